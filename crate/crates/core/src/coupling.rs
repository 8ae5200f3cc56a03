//! Dependence coefficients `γ`, `θ` and `τ`: coupling estimates for linear
//! fields, transfer-operator values for torus fields, and the `λ(k)` bound.

use std::io::Write;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};
use crate::field::{FieldModel, LinearFieldSpec, TorusModel};
use crate::rng::{json_hash, par_replicates, rng_from_seed};
use crate::transfer::fourier::default_resolution;
use crate::transfer::{k_power_l1, FourierObservable, IntMatrix, TorusMap};

/// Inner `ε*` draws per outer replicate.
pub const INNER_DRAWS: usize = 64;
/// Largest `|det|` for pointwise conditional expectations.
pub const MAX_PREIMAGES: u64 = 4096;
const MAX_POINTWISE_WORK: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileKind {
    Gamma,
    Theta,
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    /// Fourier pushes plus lattice quadrature.
    Exact,
    /// Pointwise preimage averaging on a lattice.
    Quadrature,
    MonteCarlo,
    Coupling,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::Exact => "exact",
            EstimateMethod::Quadrature => "quadrature",
            EstimateMethod::MonteCarlo => "monte_carlo",
            EstimateMethod::Coupling => "coupling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub method: EstimateMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub lag: Vec<usize>,
    pub estimate: f64,
    pub stderr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Smallest nonincreasing majorant of the estimates at this lag.
    pub envelope: f64,
    pub method: EstimateMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceProfile {
    pub kind: ProfileKind,
    /// Axis for `γ_i`, 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<usize>,
    pub model_hash: String,
    pub reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_m: Option<f64>,
    /// Values are maxima over a finite `M` grid of a supremum over `M`.
    #[serde(default)]
    pub lower_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_const: Option<f64>,
    pub entries: Vec<ProfileEntry>,
}

impl DependenceProfile {
    fn new(kind: ProfileKind, model_hash: String, reps: usize, entries: Vec<ProfileEntry>) -> Self {
        let mut p = DependenceProfile {
            kind,
            coordinate: None,
            model_hash,
            reps,
            truncation_m: None,
            lower_bound: false,
            k_const: None,
            entries,
        };
        p.fill_envelope();
        p
    }

    /// Recomputes `envelope` as the maximum over entries with a lag `⪰` the
    /// entry's lag.
    pub fn fill_envelope(&mut self) {
        let est: Vec<(Vec<usize>, f64)> = self.entries.iter().map(|e| (e.lag.clone(), e.estimate)).collect();
        for e in &mut self.entries {
            e.envelope = est
                .iter()
                .filter(|(l, _)| l.iter().zip(&e.lag).all(|(a, b)| a >= b))
                .map(|(_, v)| *v)
                .fold(0.0, f64::max);
        }
    }

    /// The envelope as a plain sequence (for one-dimensional lags).
    pub fn envelope(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.envelope).collect()
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.estimate).collect()
    }

    pub fn get(&self, lag: &[usize]) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.lag == lag)
    }

    /// CSV with columns `lag_1..lag_r, estimate, stderr, bound, envelope,
    /// method`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let r = self.entries.first().map_or(1, |e| e.lag.len());
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=r).map(|i| format!("lag_{i}")).collect();
        header.extend(["estimate", "stderr", "bound", "envelope", "method"].map(String::from));
        out.write_record(&header)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.lag.iter().map(|v| v.to_string()).collect();
            row.push(fmt(e.estimate));
            row.push(fmt(e.stderr));
            row.push(e.bound.map(fmt).unwrap_or_default());
            row.push(fmt(e.envelope));
            row.push(e.method.as_str().to_string());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

/// Dense `R × R` coefficient table.
fn coefficient_table(spec: &LinearFieldSpec) -> (usize, Vec<f64>) {
    let r = spec.radius();
    let mut c = vec![0.0; r * r];
    for (i, j, a) in spec.coefficient_list() {
        if i < r && j < r {
            c[i * r + j] += a;
        }
    }
    (r, c)
}

/// `S[a][b] = Σ_{i ≥ a, j ≥ b} c_{ij} x_{ij}` on an `(R+1)²` table.
fn suffix_sums(r: usize, c: &[f64], x: &[f64], out: &mut [f64]) {
    let w = r + 1;
    for v in out[r * w..].iter_mut() {
        *v = 0.0;
    }
    for i in (0..r).rev() {
        out[i * w + r] = 0.0;
        for j in (0..r).rev() {
            out[i * w + j] = c[i * r + j] * x[i * r + j] + out[(i + 1) * w + j] + out[i * w + j + 1]
                - out[(i + 1) * w + j + 1];
        }
    }
}

/// Coupling estimates of `E_ε |E_{ε*}[g(Y′) − g(Y*)]|` for every lag pair,
/// all pairs sharing the same innovation panels.
///
/// `Y′` keeps `ε` on `E_{a,b} = {i ≥ a, j ≥ b}` and uses `ε*` elsewhere;
/// `Y*` uses `ε*` throughout.
pub fn coupling_estimates(
    spec: &LinearFieldSpec,
    pairs: &[(usize, usize)],
    g: &(dyn Fn(f64) -> f64 + Sync),
    reps: usize,
    inner: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if reps < 2 {
        return domain("coupling estimates need at least 2 outer replicates");
    }
    if inner == 0 {
        return domain("at least one inner draw is required");
    }
    spec.validate()?;
    let (r, c) = coefficient_table(spec);
    let tag = format!("coupling/{}", json_hash(spec));
    let per_rep = par_replicates(reps, seed, &tag, |_, s| {
        let mut rng = rng_from_seed(s);
        let w = r + 1;
        let mut eps = vec![0.0; r * r];
        let mut star = vec![0.0; r * r];
        let mut se = vec![0.0; w * w];
        let mut ss = vec![0.0; w * w];
        for v in eps.iter_mut() {
            *v = spec.innovation.sample(&mut rng);
        }
        suffix_sums(r, &c, &eps, &mut se);
        let mut acc = vec![0.0; pairs.len()];
        for _ in 0..inner {
            for v in star.iter_mut() {
                *v = spec.innovation.sample(&mut rng);
            }
            suffix_sums(r, &c, &star, &mut ss);
            let y_star = ss[0];
            let g_star = g(y_star);
            for (slot, &(a, b)) in acc.iter_mut().zip(pairs) {
                let (a, b) = (a.min(r), b.min(r));
                let y_prime = se[a * w + b] + y_star - ss[a * w + b];
                *slot += g(y_prime) - g_star;
            }
        }
        acc.iter().map(|v| (v / inner as f64).abs()).collect::<Vec<f64>>()
    });
    Ok((0..pairs.len())
        .map(|p| {
            let col: Vec<f64> = per_rep.iter().map(|v| v[p]).collect();
            mean_se(&col)
        })
        .collect())
}

/// `τ(a, b) = ∥E_{k−a,ℓ−b}(X_{k,ℓ})∥₁` by coupling, `INNER_DRAWS` inner
/// draws per replicate.
pub fn estimate_tau_linear(spec: &LinearFieldSpec, a: usize, b: usize, reps: usize, seed: u64) -> Result<(f64, f64)> {
    let h = spec.observable;
    Ok(coupling_estimates(spec, &[(a, b)], &move |y| h.apply(y), reps, INNER_DRAWS, seed)?[0])
}

/// `τ(a, b)` on `[0, amax] × [0, bmax]` with `λ(a ∨ b)` as the bound.
pub fn tau_profile(spec: &LinearFieldSpec, amax: usize, bmax: usize, reps: usize, seed: u64) -> Result<DependenceProfile> {
    let pairs: Vec<(usize, usize)> = (0..=amax).flat_map(|a| (0..=bmax).map(move |b| (a, b))).collect();
    let h = spec.observable;
    let est = coupling_estimates(spec, &pairs, &move |y| h.apply(y), reps, INNER_DRAWS, seed)?;
    let k_const = default_k_const(spec);
    let mut entries = Vec::with_capacity(pairs.len());
    for (&(a, b), &(e, s)) in pairs.iter().zip(&est) {
        let bound = lambda_bound(a.max(b), spec, k_const)?.value;
        entries.push(ProfileEntry {
            lag: vec![a, b],
            estimate: e,
            stderr: s,
            bound: Some(bound),
            envelope: 0.0,
            method: EstimateMethod::Coupling,
        });
    }
    let mut p = DependenceProfile::new(ProfileKind::Tau, json_hash(spec), reps, entries);
    p.k_const = Some(k_const);
    Ok(p)
}

/// `max(Lip(h) κ / (1 − √ρ)², 2∥h∥_∞ ∨ 1)`.
pub fn default_k_const(spec: &LinearFieldSpec) -> f64 {
    let a = spec.observable.lipschitz() * spec.kappa / (1.0 - spec.rho.sqrt()).powi(2);
    a.max((2.0 * spec.observable.bound()).max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBound {
    pub k: usize,
    pub value: f64,
    pub k_const: f64,
    /// `E[(log|ε − ε*|)² 1{log|ε − ε*| > k log c}]`.
    pub moment: f64,
    pub moment_stderr: f64,
}

/// `λ(k) = K ρ^{k/2} + K E[(log|ε−ε*|)² 1{log|ε−ε*| > k log c}]`, `c = ρ^{-1/2}`.
pub fn lambda_bound(k: usize, spec: &LinearFieldSpec, k_const: f64) -> Result<LambdaBound> {
    if !(k_const > 0.0) || !k_const.is_finite() {
        return domain("K must be a positive finite constant");
    }
    if !(spec.rho > 0.0 && spec.rho < 1.0) {
        return domain("rho must lie in (0, 1)");
    }
    let log_c = -0.5 * spec.rho.ln();
    let m = spec.innovation.trunc_log_sq_diff(k as f64 * log_c);
    Ok(LambdaBound {
        k,
        value: k_const * spec.rho.powf(k as f64 / 2.0) + k_const * m.value,
        k_const,
        moment: m.value,
        moment_stderr: m.stderr,
    })
}

/// How `θ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    /// Transfer operators (torus only).
    Exact,
    /// Random points with pointwise transfer operators (torus only).
    MonteCarlo,
    /// Coupling surrogate (linear only).
    Coupling,
}

fn phi(m: f64, x: f64) -> f64 {
    x.clamp(-m, m)
}

/// `A_1^{i_1} ⋯ A_d^{i_d}`.
fn lag_matrix(model: &TorusModel, lag: &[usize]) -> Result<IntMatrix> {
    let mut b = IntMatrix::identity(model.m());
    for (map, &k) in model.maps().iter().zip(lag) {
        let p = map.matrix().checked_pow(k as u32).and_then(|p| b.checked_mul(&p));
        b = match p {
            Some(p) => p,
            None => return capability("lag too large: matrix power overflows"),
        };
    }
    Ok(b)
}

fn lag_map(model: &TorusModel, lag: &[usize]) -> Result<TorusMap> {
    let b = lag_matrix(model, lag)?;
    if b.det().unsigned_abs() > MAX_PREIMAGES as u128 {
        return capability(format!("more than {MAX_PREIMAGES} preimages at lag {lag:?}"));
    }
    TorusMap::new(b)
}

fn lattice_points(m: usize, res: usize) -> impl Iterator<Item = Vec<f64>> {
    let total = res.pow(m as u32);
    (0..total).map(move |mut idx| {
        let mut x = vec![0.0; m];
        for j in (0..m).rev() {
            x[j] = (idx % res) as f64 / res as f64;
            idx /= res;
        }
        x
    })
}

/// `∥K^lag g − E g∥₁` with `g = pointwise(f_c)` applied to the centered
/// observable, by preimage averaging on a lattice or at random points.
fn torus_pointwise_l1(
    model: &TorusModel,
    lag: &[usize],
    g: &(dyn Fn(f64) -> f64 + Sync),
    monte_carlo: Option<(usize, u64)>,
) -> Result<Estimate> {
    let obs = &model.spec().observable;
    let c = model.centering();
    let m = model.m();
    let map = if lag.iter().all(|&k| k == 0) { None } else { Some(lag_map(model, lag)?) };
    let res = default_resolution(m);
    let mean = lattice_points(m, res).map(|x| g(obs.eval(&x) - c)).sum::<f64>() / res.pow(m as u32) as f64;
    let kg = |x: &[f64]| -> Result<f64> {
        match &map {
            None => Ok(g(obs.eval(x) - c)),
            Some(t) => t.perron_apply(&|y: &[f64]| g(obs.eval(y) - c), x),
        }
    };
    match monte_carlo {
        None => {
            let work = res.pow(m as u32) as u64 * map.as_ref().map_or(1, |t| t.det_abs());
            if work > MAX_POINTWISE_WORK {
                return capability("pointwise quadrature too expensive at this lag; use Monte Carlo");
            }
            let mut acc = 0.0;
            for x in lattice_points(m, res) {
                acc += (kg(&x)? - mean).abs();
            }
            Ok(Estimate { estimate: acc / res.pow(m as u32) as f64, stderr: 0.0, method: EstimateMethod::Quadrature })
        }
        Some((reps, seed)) => {
            if reps < 2 {
                return domain("Monte Carlo needs at least 2 replicates");
            }
            let tag = format!("theta-mc/{}/{lag:?}", json_hash(model.spec()));
            let vals = par_replicates(reps, seed, &tag, |_, s| -> Result<f64> {
                let mut rng = rng_from_seed(s);
                let x: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                Ok((kg(&x)? - mean).abs())
            });
            let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
            let (e, s) = mean_se(&vals);
            Ok(Estimate { estimate: e, stderr: s, method: EstimateMethod::MonteCarlo })
        }
    }
}

fn fourier_k_l1(model: &TorusModel, lag: &[usize], f: &FourierObservable) -> Result<Estimate> {
    let ell: Vec<u32> = lag.iter().map(|&k| k as u32).collect();
    let v = k_power_l1(model.maps(), &f.centered(), &ell)?;
    Ok(Estimate { estimate: v.value, stderr: 0.0, method: EstimateMethod::Exact })
}

/// `∥E_0(φ_M(X_i)) − E φ_M(X_i)∥₁`.
///
/// Torus models use `E(·|F_i) = U^i K^i`, so the value is
/// `∥K^i φ_M(X) − E φ_M(X)∥₁`; when `M ≥ sup|X|` and the observable is
/// Fourier this is computed by Fourier pushes. Linear models use the
/// coupling surrogate with `g = φ_M(h − m)` at lag `(a, b)`.
pub fn estimate_theta(
    model: &FieldModel,
    lag: &[usize],
    m: f64,
    method: ThetaMethod,
    reps: usize,
    seed: u64,
) -> Result<Estimate> {
    if !(m > 0.0) {
        return domain("truncation level M must be positive");
    }
    if lag.len() != model.d() {
        return domain("lag dimension does not match the field");
    }
    match (model, method) {
        (FieldModel::Torus(t), ThetaMethod::Exact) => match t.fourier() {
            Some(f) if m >= model.sup_bound() => fourier_k_l1(t, lag, f),
            _ => torus_pointwise_l1(t, lag, &move |x| phi(m, x), None),
        },
        (FieldModel::Torus(t), ThetaMethod::MonteCarlo) => {
            torus_pointwise_l1(t, lag, &move |x| phi(m, x), Some((reps, seed)))
        }
        (FieldModel::Linear { spec, .. }, ThetaMethod::Coupling) => {
            let h = spec.observable;
            let c = spec.centering.unwrap_or(0.0);
            let (e, s) =
                coupling_estimates(spec, &[(lag[0], lag[1])], &move |y| phi(m, h.apply(y) - c), reps, INNER_DRAWS, seed)?[0];
            Ok(Estimate { estimate: e, stderr: s, method: EstimateMethod::Coupling })
        }
        _ => capability(format!("theta method {method:?} is not available for this model")),
    }
}

fn axis_lag(d: usize, axis: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; d];
    v[axis] = k;
    v
}

/// `γ_i(k) = ∥E_0(X_{k e_i})∥₁` for `k = 0..=kmax`, one profile per axis.
pub fn gamma_profiles(model: &FieldModel, kmax: usize, reps: usize, seed: u64) -> Result<Vec<DependenceProfile>> {
    let d = model.d();
    let mut out = Vec::with_capacity(d);
    match model {
        FieldModel::Torus(t) => {
            for axis in 0..d {
                let mut entries = Vec::new();
                for k in 0..=kmax {
                    let lag = axis_lag(d, axis, k);
                    let e = match t.fourier() {
                        Some(f) => fourier_k_l1(t, &lag, f)?,
                        None => torus_pointwise_l1(t, &lag, &|x| x, None)?,
                    };
                    entries.push(entry(lag, e));
                }
                let mut p = DependenceProfile::new(ProfileKind::Gamma, model.hash(), 0, entries);
                p.coordinate = Some(axis + 1);
                out.push(p);
            }
        }
        FieldModel::Linear { spec, .. } => {
            let pairs: Vec<(usize, usize)> =
                (0..d).flat_map(|axis| (0..=kmax).map(move |k| if axis == 0 { (k, 0) } else { (0, k) })).collect();
            let h = spec.observable;
            let est = coupling_estimates(spec, &pairs, &move |y| h.apply(y), reps, INNER_DRAWS, seed)?;
            for axis in 0..d {
                let entries = (0..=kmax)
                    .map(|k| {
                        let (e, s) = est[axis * (kmax + 1) + k];
                        entry(axis_lag(d, axis, k), Estimate { estimate: e, stderr: s, method: EstimateMethod::Coupling })
                    })
                    .collect();
                let mut p = DependenceProfile::new(ProfileKind::Gamma, model.hash(), reps, entries);
                p.coordinate = Some(axis + 1);
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn entry(lag: Vec<usize>, e: Estimate) -> ProfileEntry {
    ProfileEntry { lag, estimate: e.estimate, stderr: e.stderr, bound: None, envelope: 0.0, method: e.method }
}

/// The one-parameter sequence `θ(k)`, the maximum over axes of the estimate
/// at lag `k e_ℓ`, with its monotone envelope.
pub fn theta_profile(
    model: &FieldModel,
    kmax: usize,
    m: f64,
    method: ThetaMethod,
    reps: usize,
    seed: u64,
) -> Result<DependenceProfile> {
    let d = model.d();
    let mut entries = Vec::with_capacity(kmax + 1);
    let per_axis: Vec<Vec<Estimate>> = match model {
        FieldModel::Linear { spec, .. } if method == ThetaMethod::Coupling => {
            let pairs: Vec<(usize, usize)> = (0..d).flat_map(|axis| (0..=kmax).map(move |k| if axis == 0 { (k, 0) } else { (0, k) })).collect();
            if !(m > 0.0) {
                return domain("truncation level M must be positive");
            }
            let h = spec.observable;
            let c = spec.centering.unwrap_or(0.0);
            let est = coupling_estimates(spec, &pairs, &move |y| phi(m, h.apply(y) - c), reps, INNER_DRAWS, seed)?;
            (0..d)
                .map(|axis| {
                    (0..=kmax)
                        .map(|k| {
                            let (e, s) = est[axis * (kmax + 1) + k];
                            Estimate { estimate: e, stderr: s, method: EstimateMethod::Coupling }
                        })
                        .collect()
                })
                .collect()
        }
        _ => {
            let mut all = Vec::with_capacity(d);
            for axis in 0..d {
                let mut v = Vec::with_capacity(kmax + 1);
                for k in 0..=kmax {
                    v.push(estimate_theta(model, &axis_lag(d, axis, k), m, method, reps, seed)?);
                }
                all.push(v);
            }
            all
        }
    };
    for k in 0..=kmax {
        let best = per_axis
            .iter()
            .map(|v| v[k])
            .fold(None::<Estimate>, |acc, e| match acc {
                Some(a) if a.estimate >= e.estimate => Some(a),
                _ => Some(e),
            })
            .expect("at least one axis");
        entries.push(entry(vec![k], best));
    }
    let mut p = DependenceProfile::new(ProfileKind::Theta, model.hash(), reps, entries);
    p.truncation_m = Some(m);
    Ok(p)
}

/// Product coefficient `sup_M M^{-1} ∥E_0(φ_M(X_i)²) − E φ_M(X_i)²∥₁` on the
/// diagonal lags `i = (k, …, k)`, maximised over `m_grid` and flagged as a
/// lower bound on the supremum.
pub fn theta_product_profile(
    model: &FieldModel,
    kmax: usize,
    m_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<DependenceProfile> {
    if m_grid.is_empty() || m_grid.iter().any(|&m| !(m > 0.0)) {
        return domain("the M grid must be nonempty and positive");
    }
    let d = model.d();
    let mut entries = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let lag = vec![k; d];
        let mut best: Option<Estimate> = None;
        for &m in m_grid {
            let e = match model {
                FieldModel::Torus(t) => match t.fourier() {
                    Some(f) if m >= model.sup_bound() => {
                        let fc = f.sub(&FourierObservable::constant(t.m(), t.centering()));
                        fourier_k_l1(t, &lag, &fc.mul(&fc))?
                    }
                    _ => torus_pointwise_l1(t, &lag, &move |x| phi(m, x).powi(2), None)?,
                },
                FieldModel::Linear { spec, .. } => {
                    let h = spec.observable;
                    let c = spec.centering.unwrap_or(0.0);
                    let (e, s) = coupling_estimates(
                        spec,
                        &[(k, k)],
                        &move |y| phi(m, h.apply(y) - c).powi(2),
                        reps,
                        INNER_DRAWS,
                        seed,
                    )?[0];
                    Estimate { estimate: e, stderr: s, method: EstimateMethod::Coupling }
                }
            };
            let scaled = Estimate { estimate: e.estimate / m, stderr: e.stderr / m, method: e.method };
            if best.is_none_or(|b| scaled.estimate > b.estimate) {
                best = Some(scaled);
            }
        }
        entries.push(entry(vec![k], best.expect("nonempty grid")));
    }
    let mut p = DependenceProfile::new(ProfileKind::Theta, model.hash(), reps, entries);
    p.lower_bound = true;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CoefficientRule, InnovationLaw, ScalarObservable, TorusFieldSpec};

    #[test]
    fn iid_field_has_zero_tau_beyond_origin() {
        let spec = LinearFieldSpec { coefficients: CoefficientRule::Single, ..Default::default() };
        let (e, s) = estimate_tau_linear(&spec, 1, 0, 50, 1).unwrap();
        assert_eq!((e, s), (0.0, 0.0));
        let (e, _) = estimate_tau_linear(&spec, 0, 0, 50, 1).unwrap();
        assert!(e > 0.1);
    }

    #[test]
    fn zero_kappa_gives_zero() {
        let spec = LinearFieldSpec { kappa: 0.0, ..Default::default() };
        assert_eq!(estimate_tau_linear(&spec, 0, 0, 10, 3).unwrap().0, 0.0);
    }

    #[test]
    fn single_pair_matches_shared_panels() {
        let spec = LinearFieldSpec::default();
        let prof = tau_profile(&spec, 2, 2, 20, 9).unwrap();
        let (e, s) = estimate_tau_linear(&spec, 1, 2, 20, 9).unwrap();
        let entry = prof.get(&[1, 2]).unwrap();
        assert_eq!((entry.estimate, entry.stderr), (e, s));
    }

    #[test]
    fn lambda_examples() {
        let spec = LinearFieldSpec::default();
        let k = default_k_const(&spec);
        assert!((k - 1.0 / (1.0 - 0.5f64.sqrt()).powi(2)).abs() < 1e-12);
        // |ε − ε*| ≤ 2 and k log √2 > log 2 once k ≥ 3
        for kk in [3usize, 5, 10] {
            let l = lambda_bound(kk, &spec, k).unwrap();
            assert_eq!(l.value, k * 0.5f64.powf(kk as f64 / 2.0));
        }
        let l0 = lambda_bound(0, &spec, k).unwrap();
        let direct = spec.innovation.trunc_log_sq_diff(0.0).value;
        assert!((l0.value - (k + k * direct)).abs() < 1e-12);
        let (l4, l8) = (lambda_bound(4, &spec, k).unwrap().value, lambda_bound(8, &spec, k).unwrap().value);
        assert!((l8 / l4 - 0.5f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance_of_tau() {
        let spec = LinearFieldSpec { observable: ScalarObservable::Clip { lo: -1.0, hi: 1.0 }, ..Default::default() };
        let a = coupling_estimates(&spec, &[(1, 1)], &|y| y.clamp(-1.0, 1.0), 30, 16, 4).unwrap()[0];
        let b = coupling_estimates(&spec, &[(1, 1)], &|y| y.clamp(-1.0, 1.0) + 3.0, 30, 16, 4).unwrap()[0];
        assert!((a.0 - b.0).abs() < 1e-12);
    }

    #[test]
    fn doubling_map_theta() {
        let t = TorusFieldSpec::scalar(&[2], FourierObservable::cos(&[1], 1.0));
        let model = FieldModel::torus(t).unwrap();
        let e0 = estimate_theta(&model, &[0], 10.0, ThetaMethod::Exact, 0, 0).unwrap();
        assert!((e0.estimate - 2.0 / std::f64::consts::PI).abs() < 1e-6);
        for k in 1..4 {
            let e = estimate_theta(&model, &[k], 10.0, ThetaMethod::Exact, 0, 0).unwrap();
            assert_eq!(e.estimate, 0.0);
            // grid quadrature of the two-point average
            let q = estimate_theta(&model, &[k], 0.5, ThetaMethod::Exact, 0, 0).unwrap();
            assert!(q.estimate < 1e-12 && q.method == EstimateMethod::Quadrature);
        }
    }

    #[test]
    fn theta_monte_carlo_matches_exact() {
        let mut f = FourierObservable::cos(&[2], 1.0);
        f.add_cos(&[3], 0.5);
        let model = FieldModel::torus(TorusFieldSpec::scalar(&[2, 3], f)).unwrap();
        for lag in [[1usize, 0], [0, 1], [1, 1]] {
            let ex = estimate_theta(&model, &lag, 10.0, ThetaMethod::Exact, 0, 0).unwrap();
            let mc = estimate_theta(&model, &lag, 10.0, ThetaMethod::MonteCarlo, 4000, 5).unwrap();
            assert!((ex.estimate - mc.estimate).abs() < 3.0 * mc.stderr + 1e-9, "{lag:?}: {ex:?} {mc:?}");
        }
    }

    #[test]
    fn envelope_is_nonincreasing() {
        let spec = LinearFieldSpec { innovation: InnovationLaw::Gaussian { sd: 1.0 }, ..Default::default() };
        let model = FieldModel::linear(spec).unwrap();
        let p = theta_profile(&model, 6, 0.5, ThetaMethod::Coupling, 20, 2).unwrap();
        let env = p.envelope();
        assert!(env.windows(2).all(|w| w[0] >= w[1]));
        assert!(env.iter().zip(p.estimates()).all(|(e, v)| *e >= v));
        assert!(estimate_theta(&model, &[1, 1], 1.0, ThetaMethod::Exact, 2, 0).is_err());
    }

    #[test]
    fn profile_csv_has_header() {
        let spec = LinearFieldSpec::default();
        let p = tau_profile(&spec, 1, 1, 4, 1).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lag_1,lag_2,estimate,stderr,bound,envelope,method\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
