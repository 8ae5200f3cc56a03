//! Monte Carlo checks of the CLT, the Brownian-sheet FCLT, the tightness
//! tail bound and the Rosenthal-type moment inequality.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};
use crate::field::{FieldModel, TorusModel};
use crate::rng::par_replicates;
use crate::stats::{ks_critical_95, ks_normal, mean_se, normal_quantile, quantile_sorted, wls_slope};
use crate::sums::{Sigma2Estimate, SumProcess};
use crate::transfer::{lp_norm, FourierObservable};

/// Slack applied to the 95% KS critical value for finite-`n` bias.
pub const KS_SLACK: f64 = 1.5;
/// `|S| / √|n|` below this counts as zero on the degenerate path.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub passed: bool,
}

impl Statistic {
    fn new(name: impl Into<String>, value: f64, stderr: Option<f64>, threshold: Option<f64>, passed: bool) -> Self {
        Statistic { name: name.into(), value, stderr, threshold, passed }
    }
}

/// A named numeric table, exported as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub model_hash: String,
    pub reps: usize,
    pub seed: u64,
    pub passed: bool,
    pub statistics: Vec<Statistic>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(experiment: &str, model: &FieldModel, reps: usize, seed: u64) -> Self {
        VerificationReport {
            experiment: experiment.into(),
            model_hash: model.hash(),
            reps,
            seed,
            passed: true,
            statistics: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, s: Statistic) {
        self.passed &= s.passed;
        self.statistics.push(s);
    }

    pub fn statistic(&self, name: &str) -> Option<&Statistic> {
        self.statistics.iter().find(|s| s.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn check_shape(model: &FieldModel, n: &[usize]) -> Result<()> {
    if n.len() != model.d() || n.iter().any(|&v| v == 0) {
        return domain(format!("shape {n:?} does not fit a field with d = {}", model.d()));
    }
    Ok(())
}

fn normalized_sums(model: &FieldModel, n: &[usize], reps: usize, seed: u64, tag: &str) -> Result<Vec<f64>> {
    let norm = (n.iter().product::<usize>() as f64).sqrt();
    let hash = format!("{}/{tag}", model.hash());
    par_replicates(reps, seed, &hash, |_, s| model.sample_values(n, s).map(|v| v.iter().sum::<f64>() / norm))
        .into_iter()
        .collect()
}

const QUANTILE_PROBS: [f64; 9] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

/// KS distance of `S_n / √|n|` to `N(0, σ²)` over `reps` replicates, with a
/// normal-quantile table. A nonpositive `σ²` switches to checking that all
/// mass sits at 0.
pub fn clt_check(
    model: &FieldModel,
    n: &[usize],
    reps: usize,
    sigma2: &Sigma2Estimate,
    seed: u64,
    ks_threshold: Option<f64>,
) -> Result<VerificationReport> {
    check_shape(model, n)?;
    if reps < 2 {
        return domain("at least 2 replicates are required");
    }
    let z = normalized_sums(model, n, reps, seed, "clt")?;
    let mut rep = VerificationReport::new("clt", model, reps, seed);
    rep.push(Statistic::new("sigma2", sigma2.value, Some(sigma2.stderr), None, true));
    if sigma2.value <= 0.0 {
        let worst = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        rep.push(Statistic::new("max_abs_normalized_sum", worst, None, Some(DEGENERATE_TOL), worst <= DEGENERATE_TOL));
        rep.notes.push("degenerate limit: checked concentration at 0".into());
        return Ok(rep);
    }
    let threshold = ks_threshold.unwrap_or(KS_SLACK * ks_critical_95(reps));
    let ks = ks_normal(&z, sigma2.value);
    rep.push(Statistic::new("ks_distance", ks, None, Some(threshold), ks <= threshold));
    let (m, se) = mean_se(&z);
    rep.push(Statistic::new("mean", m, Some(se), None, true));
    let mut sorted = z.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut t = Table::new("quantiles", &["prob", "empirical", "normal"]);
    for p in QUANTILE_PROBS {
        t.rows.push(vec![p, quantile_sorted(&sorted, p), normal_quantile(p, sigma2.value)]);
    }
    rep.tables.push(t);
    Ok(rep)
}

/// Compares `E(W_s W_t)` with `σ² Π_i min(s_i, t_i)` for every pair of the
/// grid (the field is centered, so raw product means are used), plus a
/// marginal KS check per `t` and a positive-semidefiniteness check.
pub fn fclt_fdd_check(
    model: &FieldModel,
    n: &[usize],
    t_grid: &[Vec<f64>],
    reps: usize,
    sigma2: &Sigma2Estimate,
    seed: u64,
    z_threshold: f64,
) -> Result<VerificationReport> {
    check_shape(model, n)?;
    if reps < 2 {
        return domain("at least 2 replicates are required");
    }
    let d = n.len();
    if t_grid.is_empty() || t_grid.iter().any(|t| t.len() != d || t.iter().any(|v| !(0.0..=1.0).contains(v))) {
        return domain("t grid points must lie in [0, 1]^d");
    }
    let hash = format!("{}/fclt", model.hash());
    let w: Vec<Vec<f64>> = par_replicates(reps, seed, &hash, |_, s| -> Result<Vec<f64>> {
        let v = model.sample_values(n, s)?;
        let sp = SumProcess::new(n, &v)?;
        Ok(t_grid.iter().map(|t| sp.w_at(t)).collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut rep = VerificationReport::new("fclt", model, reps, seed);
    let g = t_grid.len();
    let mut cols: Vec<String> = (1..=d).map(|i| format!("s{i}")).collect();
    cols.extend((1..=d).map(|i| format!("t{i}")));
    cols.extend(["empirical_cov", "target_cov", "stderr"].map(String::from));
    let mut table = Table { name: "fdd".into(), columns: cols, rows: Vec::new() };
    let mut cov = DMatrix::<f64>::zeros(g, g);
    let mut worst_z = 0.0f64;
    let mut worst_se = 0.0f64;
    let mut all_ok = true;
    for a in 0..g {
        for b in a..g {
            let prods: Vec<f64> = w.iter().map(|r| r[a] * r[b]).collect();
            let (emp, se) = mean_se(&prods);
            let target = sigma2.value * t_grid[a].iter().zip(&t_grid[b]).map(|(s, t)| s.min(*t)).product::<f64>();
            cov[(a, b)] = emp;
            cov[(b, a)] = emp;
            worst_se = worst_se.max(se);
            let dev = (emp - target).abs();
            let ok = if se > 0.0 { dev <= z_threshold * se } else { dev <= 1e-12 };
            if se > 0.0 {
                worst_z = worst_z.max(dev / se);
            }
            all_ok &= ok;
            let mut row: Vec<f64> = t_grid[a].clone();
            row.extend(&t_grid[b]);
            row.extend([emp, target, se]);
            table.rows.push(row);
        }
    }
    rep.push(Statistic::new("max_cov_z", worst_z, None, Some(z_threshold), all_ok));
    let min_eig = cov.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let psd_tol = -z_threshold * worst_se * g as f64;
    rep.push(Statistic::new("min_eigenvalue", min_eig, None, Some(psd_tol), min_eig >= psd_tol));
    let ks_thr = KS_SLACK * ks_critical_95(reps);
    for (a, t) in t_grid.iter().enumerate() {
        let var = sigma2.value * t.iter().product::<f64>();
        if var > 0.0 {
            let col: Vec<f64> = w.iter().map(|r| r[a]).collect();
            let ks = ks_normal(&col, var);
            rep.push(Statistic::new(format!("ks_t{a}"), ks, None, Some(ks_thr), ks <= ks_thr));
        }
    }
    rep.tables.push(table);
    Ok(rep)
}

/// `λ² P̂(max_i |S_i| ≥ λ √|n|)` over an increasing `λ` grid, binomial
/// stderr, and a check that the curve does not increase beyond
/// `2 · √(se₁² + se₂²)` between consecutive points.
pub fn tightness_tail(
    model: &FieldModel,
    n: &[usize],
    lambda_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_shape(model, n)?;
    if lambda_grid.len() < 3 || lambda_grid.windows(2).any(|w| !(w[1] > w[0])) || lambda_grid[0] <= 0.0 {
        return domain("the lambda grid must be positive, increasing, with at least 3 points");
    }
    if reps < 2 {
        return domain("at least 2 replicates are required");
    }
    let maxima = maxima(model, n, reps, seed, "tightness", false)?;
    let mut rep = VerificationReport::new("tightness", model, reps, seed);
    let (curve, se) = tail_curve(&maxima, lambda_grid);
    let mut t = Table::new("tail", &["lambda", "lambda2_phat", "stderr"]);
    for i in 0..lambda_grid.len() {
        t.rows.push(vec![lambda_grid[i], curve[i], se[i]]);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for i in 1..curve.len() {
        let rise = curve[i] - curve[i - 1];
        let band = 2.0 * (se[i].powi(2) + se[i - 1].powi(2)).sqrt();
        worst = worst.max(rise - band);
        ok &= rise <= band;
    }
    rep.push(Statistic::new("max_excess_rise", worst, None, Some(0.0), ok));
    rep.tables.push(t);
    Ok(rep)
}

fn tail_curve(maxima: &[f64], lambdas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let reps = maxima.len() as f64;
    let mut curve = Vec::new();
    let mut se = Vec::new();
    for &l in lambdas {
        let p = maxima.iter().filter(|&&m| m >= l).count() as f64 / reps;
        curve.push(l * l * p);
        se.push(l * l * (p * (1.0 - p) / reps).sqrt());
    }
    (curve, se)
}

/// `max_i |S_i| / √|n|` per replicate; `reversed` anchors rectangles at the
/// far corner.
fn maxima(model: &FieldModel, n: &[usize], reps: usize, seed: u64, tag: &str, reversed: bool) -> Result<Vec<f64>> {
    let hash = format!("{}/{tag}/{n:?}", model.hash());
    par_replicates(reps, seed, &hash, |_, s| -> Result<f64> {
        let mut v = model.sample_values(n, s)?;
        if reversed {
            v.reverse();
        }
        let sp = SumProcess::new(n, &v)?;
        Ok(sp.max_rect() / sp.norm())
    })
    .into_iter()
    .collect()
}

/// Tightness curves for several shapes, with the per-shape monotonicity
/// checks and the change of `λ₁² P̂(λ₁)` from the first to the last shape.
pub fn tightness_trend(
    model: &FieldModel,
    n_list: &[Vec<usize>],
    lambda_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if n_list.is_empty() {
        return domain("at least one shape is required");
    }
    let mut rep = VerificationReport::new("tightness_trend", model, reps, seed);
    let mut t = Table::new("tail_by_shape", &["cells", "lambda", "lambda2_phat", "stderr"]);
    let mut first_last = Vec::new();
    let mut shapes = Vec::new();
    for n in n_list {
        let r = tightness_tail(model, n, lambda_grid, reps, seed)?;
        let cells = n.iter().product::<usize>() as f64;
        for row in &r.table("tail").expect("tail table").rows {
            t.rows.push(vec![cells, row[0], row[1], row[2]]);
        }
        first_last.push(r.table("tail").unwrap().rows[0][1]);
        let mut per_shape = r.table("tail").unwrap().clone();
        per_shape.name = format!("tail_{}", n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("x"));
        shapes.push(per_shape);
        let s = r.statistic("max_excess_rise").unwrap();
        rep.push(Statistic::new(format!("max_excess_rise_{cells}"), s.value, None, Some(0.0), s.passed));
    }
    let change = first_last.last().unwrap() - first_last[0];
    rep.push(Statistic::new("lambda1_change", change, None, None, true));
    rep.tables.push(t);
    rep.tables.extend(shapes);
    Ok(rep)
}

/// `δ = min(1/2, 1/(p − 2))`.
pub fn rosenthal_delta(p: f64) -> f64 {
    (0.5f64).min(1.0 / (p - 2.0))
}

/// For every `k ⪯ kmax`,
/// `∥K^{k−1}(g_k²)∥_{p/2}` with `g_k = Σ_{0 ⪯ j ⪯ k−1} U^j f`, evaluated as
/// `Σ_{|δ| ⪯ k−1} Σ_{0 ⪯ s ⪯ k−1−|δ|} K^s(K^{δ⁻} f · K^{δ⁺} f)`.
pub fn conditional_square_norms(model: &TorusModel, f: &FourierObservable, kmax: &[usize], q: f64) -> Result<BTreeMap<Vec<usize>, f64>> {
    let d = model.d();
    let maps = model.maps();
    let k_pow = |g: &FourierObservable, e: &[usize]| -> FourierObservable {
        let mut g = g.clone();
        for (t, &k) in maps.iter().zip(e) {
            if g.is_empty() {
                break;
            }
            g = t.perron_pow(&g, k as u32);
        }
        g
    };
    let boxes = |ext: &[usize]| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &e in ext {
            out = out.into_iter().flat_map(|p| (0..e).map(move |v| { let mut q = p.clone(); q.push(v); q })).collect();
        }
        out
    };
    // K^j f for j in [0, kmax − 1]
    let mut kf: BTreeMap<Vec<usize>, FourierObservable> = BTreeMap::new();
    for j in boxes(kmax) {
        let g = k_pow(f, &j);
        if !g.is_empty() {
            kf.insert(j, g);
        }
    }
    // signed lags δ as (δ⁻, δ⁺) pairs with disjoint supports
    struct Lag {
        abs: Vec<usize>,
        constant: f64,
        tails: Vec<(Vec<usize>, FourierObservable)>,
    }
    let mut lags: Vec<Lag> = Vec::new();
    for (jm, a) in &kf {
        for (jp, b) in &kf {
            if jm.iter().zip(jp).any(|(x, y)| *x > 0 && *y > 0) {
                continue;
            }
            let abs: Vec<usize> = jm.iter().zip(jp).map(|(x, y)| x + y).collect();
            let prod = a.mul(b);
            let constant = prod.mean();
            let rest = prod.centered();
            let mut tails = Vec::new();
            if !rest.is_empty() {
                let ext: Vec<usize> = kmax.iter().zip(&abs).map(|(k, a)| k - a).collect();
                for s in boxes(&ext) {
                    let g = k_pow(&rest, &s);
                    if !g.is_empty() {
                        tails.push((s, g));
                    }
                }
            }
            lags.push(Lag { abs, constant, tails });
        }
    }
    let mut out = BTreeMap::new();
    for km1 in boxes(kmax) {
        let k: Vec<usize> = km1.iter().map(|v| v + 1).collect();
        let mut constant = 0.0;
        let mut g = FourierObservable::zero(model.m());
        for lag in &lags {
            if lag.abs.iter().zip(&km1).any(|(a, b)| a > b) {
                continue;
            }
            let count: f64 = (0..d).map(|i| (k[i] - lag.abs[i]) as f64).product();
            constant += lag.constant * count;
            for (s, t) in &lag.tails {
                if s.iter().zip(&lag.abs).zip(&km1).all(|((s, a), b)| s + a <= *b) {
                    g = g.add(t);
                }
            }
        }
        g = g.add(&FourierObservable::constant(model.m(), constant));
        out.insert(k, lp_norm(&g, q).value);
    }
    Ok(out)
}

/// LHS `∥max_{k⪯n}|S_k|∥_p` (rectangles anchored at the far corner), the
/// constant-free RHS bracket and their ratio across `n_list`, with the
/// weighted log-slope of the ratio; passes when the slope is `≤ 0` within
/// its 95% interval.
pub fn rosenthal_ratio(model: &FieldModel, p: f64, n_list: &[Vec<usize>], reps: usize, seed: u64) -> Result<VerificationReport> {
    if !(p > 2.0 && p <= 4.0) {
        return capability("the Rosenthal check supports p in (2, 4]");
    }
    let Some(t) = model.as_torus() else {
        return capability("the Rosenthal check needs a torus model with exact conditional expectations");
    };
    let Some(f) = t.fourier() else {
        return capability("the Rosenthal check needs a Fourier observable");
    };
    if n_list.len() < 2 {
        return domain("at least two shapes are required");
    }
    for n in n_list {
        check_shape(model, n)?;
    }
    if reps < 2 {
        return domain("at least 2 replicates are required");
    }
    let d = model.d();
    let fc = f.sub(&FourierObservable::constant(t.m(), t.centering()));
    let delta = rosenthal_delta(p);
    let kmax: Vec<usize> = (0..d).map(|i| n_list.iter().map(|n| n[i]).max().unwrap()).collect();
    let norms = if fc.is_empty() { BTreeMap::new() } else { conditional_square_norms(t, &fc, &kmax, p / 2.0)? };
    let f_p = lp_norm(&fc, p).value;
    let mut rep = VerificationReport::new("rosenthal", model, reps, seed);
    let mut cols: Vec<String> = (1..=d).map(|i| format!("n{i}")).collect();
    cols.extend(["lhs", "lhs_stderr", "rhs", "ratio", "ratio_stderr"].map(String::from));
    let mut table = Table { name: "ratio".into(), columns: cols, rows: Vec::new() };
    let (mut xs, mut ys, mut vs) = (Vec::new(), Vec::new(), Vec::new());
    for n in n_list {
        let maxima = maxima(model, n, reps, seed, "rosenthal", true)?;
        let cells = n.iter().product::<usize>() as f64;
        let pw: Vec<f64> = maxima.iter().map(|m| (m * cells.sqrt()).powf(p)).collect();
        let (mp, se_mp) = mean_se(&pw);
        let lhs = mp.powf(1.0 / p);
        let lhs_se = if mp > 0.0 { lhs / p * se_mp / mp } else { 0.0 };
        let mut series = 0.0;
        for (k, v) in &norms {
            if k.iter().zip(n).all(|(a, b)| a <= b) {
                let w: f64 = k.iter().map(|&ki| (ki as f64).powf(1.0 + 2.0 * delta / p)).product();
                series += v.powf(delta) / w;
            }
        }
        let scale: f64 = n.iter().map(|&ni| (ni as f64).powf(1.0 / p)).product();
        let rhs = scale * (f_p + series.powf(1.0 / (2.0 * delta)));
        let (ratio, ratio_se) = if rhs > 0.0 { (lhs / rhs, lhs_se / rhs) } else { (0.0, 0.0) };
        let mut row: Vec<f64> = n.iter().map(|&v| v as f64).collect();
        row.extend([lhs, lhs_se, rhs, ratio, ratio_se]);
        table.rows.push(row);
        if ratio > 0.0 {
            xs.push(n.iter().map(|&v| (v as f64).ln()).sum::<f64>() / d as f64);
            ys.push(ratio.ln());
            vs.push((ratio_se / ratio).powi(2));
        }
    }
    if xs.len() >= 2 {
        let (slope, se) = wls_slope(&xs, &ys, &vs);
        let lower = slope - 1.96 * se;
        rep.push(Statistic::new("log_slope", slope, Some(se), Some(0.0), lower <= 0.0));
    } else {
        rep.notes.push("ratio identically 0".into());
        rep.push(Statistic::new("log_slope", 0.0, Some(0.0), Some(0.0), true));
    }
    rep.push(Statistic::new("delta", delta, None, None, true));
    rep.tables.push(table);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CoefficientRule, InnovationLaw, LinearFieldSpec, ScalarObservable, TorusFieldSpec};
    use crate::sums::{sigma2, Sigma2Method};

    fn iid_gauss() -> FieldModel {
        FieldModel::linear(LinearFieldSpec {
            coefficients: CoefficientRule::Single,
            innovation: InnovationLaw::Gaussian { sd: 1.0 },
            observable: ScalarObservable::Clip { lo: -1e6, hi: 1e6 },
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn gaussian_baseline_passes_ks() {
        let m = iid_gauss();
        let s2 = Sigma2Estimate::exact(1.0);
        let rep = clt_check(&m, &[4, 4], 800, &s2, 3, Some(ks_critical_95(800))).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn zero_observable_is_degenerate() {
        let m = FieldModel::torus(TorusFieldSpec::scalar(&[2, 3], FourierObservable::zero(1))).unwrap();
        let s2 = sigma2(&m, Sigma2Method::Exact, 0, &[], 0, 0).unwrap();
        let rep = clt_check(&m, &[8, 8], 10, &s2, 1, None).unwrap();
        assert!(rep.passed && rep.statistic("max_abs_normalized_sum").is_some());
    }

    #[test]
    fn tail_is_zero_beyond_the_bound() {
        let m = FieldModel::linear(LinearFieldSpec { coefficients: CoefficientRule::Single, ..Default::default() }).unwrap();
        let n = [4usize, 4];
        let big = 1.0 * 4.0 + 1.0;
        let rep = tightness_tail(&m, &n, &[big, 2.0 * big, 3.0 * big], 50, 2).unwrap();
        assert!(rep.table("tail").unwrap().rows.iter().all(|r| r[1] == 0.0));
        assert!(tightness_tail(&m, &n, &[1.0, 2.0], 50, 2).is_err());
    }

    #[test]
    fn cosine_conditional_squares() {
        // with (2), (3) only δ = 0 survives: K^{k−1}(g_k²) = k₁k₂/2 + cos 4πx/2 + [k₁ ≥ 2] cos 2πx/2
        let f = FourierObservable::cos(&[1], 1.0);
        let t = TorusModel::new(TorusFieldSpec::scalar(&[2, 3], f.clone())).unwrap();
        let norms = conditional_square_norms(&t, &f, &[3, 2], 1.5).unwrap();
        for k1 in 1..=3usize {
            for k2 in 1..=2usize {
                let mut g = FourierObservable::constant(1, (k1 * k2) as f64 / 2.0);
                g.add_cos(&[2], 0.5);
                if k1 >= 2 {
                    g.add_cos(&[1], 0.5);
                }
                let want = lp_norm(&g, 1.5).value;
                assert!((norms[&vec![k1, k2]] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rosenthal_zero_and_errors() {
        let m = FieldModel::torus(TorusFieldSpec::scalar(&[2, 3], FourierObservable::zero(1))).unwrap();
        let rep = rosenthal_ratio(&m, 3.0, &[vec![4, 4], vec![8, 8]], 4, 1).unwrap();
        assert!(rep.passed);
        assert!(rep.table("ratio").unwrap().rows.iter().all(|r| r[5] == 0.0));
        assert!(matches!(rosenthal_ratio(&m, 5.0, &[vec![4, 4], vec![8, 8]], 4, 1), Err(crate::Error::Capability(_))));
        assert!(matches!(rosenthal_ratio(&iid_gauss(), 3.0, &[vec![4, 4], vec![8, 8]], 4, 1), Err(crate::Error::Capability(_))));
    }
}
