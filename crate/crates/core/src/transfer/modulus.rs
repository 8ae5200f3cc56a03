//! `L¹` modulus of continuity, the contraction lemmas for the Perron
//! operator and the integral condition on the modulus.

use serde::{Deserialize, Serialize};

use super::fourier::{l1_norm, FourierObservable, NormEstimate};
use super::map::TorusMap;
use super::TorusObservable;
use crate::error::{domain, Result};
use crate::quad;
use crate::quantile::{classify, ConditionReport, Verdict};

/// Deterministic shifts of Euclidean length at most `delta`, containing the
/// extreme length `delta` along every probed direction.
pub fn probe_shifts(dim: usize, delta: f64, probes: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => (1..=probes).map(|j| vec![delta * j as f64 / probes as f64]).collect(),
        2 => {
            let mut out = Vec::new();
            for k in 0..probes {
                let a = std::f64::consts::PI * k as f64 / probes as f64;
                for r in [0.25, 0.5, 0.75, 1.0] {
                    out.push(vec![delta * r * a.cos(), delta * r * a.sin()]);
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            for i in 0..dim {
                for r in 1..=probes {
                    let mut h = vec![0.0; dim];
                    h[i] = delta * r as f64 / probes as f64;
                    out.push(h);
                }
            }
            // diagonals of the cube
            for mask in 1..(1usize << dim) {
                let s = 1.0 / (dim as f64).sqrt();
                out.push((0..dim).map(|i| if (mask >> i) & 1 == 1 { delta * s } else { -delta * s }).collect());
            }
            out
        }
    }
}

fn shift_l1(f: &TorusObservable, h: &[f64]) -> f64 {
    match f {
        TorusObservable::Fourier(g) => l1_norm(&g.sub(&g.shifted(h))).value,
        TorusObservable::Grid(g) => g.l1_shift_difference(h),
    }
}

/// `max_h ∥f − f(· + h)∥₁` over the probe shifts; a lower bound on
/// `ω_{1,f}(δ)`.
pub fn l1_modulus(f: &TorusObservable, delta: f64, probes: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= 0.5) {
        return domain("delta must lie in (0, 1/2]");
    }
    if probes < 8 {
        return domain("at least 8 probes are required");
    }
    let shifts = probe_shifts(f.dim(), delta, probes);
    Ok(shifts.iter().map(|h| shift_l1(f, h)).fold(0.0, f64::max))
}

/// Exact `∥K_1^{ℓ_1} ⋯ K_d^{ℓ_d} f∥₁` by Fourier pushes and lattice
/// quadrature.
pub fn k_power_l1(maps: &[TorusMap], f: &FourierObservable, ell: &[u32]) -> Result<NormEstimate> {
    if maps.len() != ell.len() {
        return domain("one exponent per map is required");
    }
    let mut g = f.clone();
    for (t, &l) in maps.iter().zip(ell) {
        g = t.perron_pow(&g, l);
    }
    Ok(l1_norm(&g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub delta: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub checks: Vec<InequalityCheck>,
    pub all_hold: bool,
    pub probes: usize,
}

const LEMMA_SLACK: f64 = 1e-9;

/// Checks, with independently computed sides,
/// `∥K f∥₁ ≤ ω_f(Δ(A^{-1}[0,1)^m))`,
/// `ω_{Kf}(δ) ≤ ω_f(|A^{-1}|₂ δ)` and
/// `ω_{fg}(δ) ≤ ∥f∥_∞ ω_g(δ) + ∥g∥_∞ ω_f(δ)`.
pub fn modulus_lemmas_check(
    map: &TorusMap,
    f: &FourierObservable,
    g: &FourierObservable,
    probes: usize,
) -> Result<ModulusReport> {
    let mut checks = Vec::new();
    let tf = TorusObservable::Fourier(f.clone());
    let kf = TorusObservable::Fourier(map.perron(f));
    let push = |name: &str, delta: Option<f64>, lhs: f64, rhs: f64, checks: &mut Vec<InequalityCheck>| {
        checks.push(InequalityCheck { name: name.into(), delta, lhs, rhs, holds: lhs <= rhs + LEMMA_SLACK });
    };

    let lhs = l1_norm(&map.perron(f)).value;
    let rhs = l1_modulus(&tf, map.diameter().min(0.5), probes)?;
    push("perron_l1_by_modulus", Some(map.diameter()), lhs, rhs, &mut checks);

    for delta in [0.01, 0.05, 0.1, 0.2] {
        let lhs = l1_modulus(&kf, delta, probes)?;
        let rhs = l1_modulus(&tf, (map.inv_norm() * delta).min(0.5), probes)?;
        push("perron_modulus_contraction", Some(delta), lhs, rhs, &mut checks);
    }

    let fg = TorusObservable::Fourier(f.mul(g));
    let tg = TorusObservable::Fourier(g.clone());
    let sup_f = f.sup_at(super::fourier::default_resolution(f.dim()));
    let sup_g = g.sup_at(super::fourier::default_resolution(g.dim()));
    for delta in [0.01, 0.05, 0.1] {
        let lhs = l1_modulus(&fg, delta, probes)?;
        let rhs = sup_f * l1_modulus(&tg, delta, probes)? + sup_g * l1_modulus(&tf, delta, probes)?;
        push("product_modulus", Some(delta), lhs, rhs, &mut checks);
    }
    let all_hold = checks.iter().all(|c| c.holds);
    Ok(ModulusReport { checks, all_hold, probes })
}

/// A modulus of continuity `t ↦ ω(t)` on `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModulusCurve {
    /// `c · t^alpha`
    Power { c: f64, alpha: f64 },
    /// `c / (1 + |log t|)^beta`
    LogDecay { c: f64, beta: f64 },
    /// Samples `(t, ω)` interpolated linearly in `log t`; below the smallest
    /// sample the power law through the two smallest samples is used.
    Table { points: Vec<(f64, f64)> },
}

impl ModulusCurve {
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_neglog(-t.ln())
    }

    /// `ω(e^{−s})`, evaluated without forming `e^{−s}`.
    pub fn eval_neglog(&self, s: f64) -> f64 {
        match self {
            ModulusCurve::Power { c, alpha } => c * (-alpha * s).exp(),
            ModulusCurve::LogDecay { c, beta } => c / (1.0 + s.abs()).powf(*beta),
            ModulusCurve::Table { points } => {
                let n = points.len();
                let lt = -s;
                let ln = |i: usize| points[i].0.ln();
                if lt >= ln(n - 1) {
                    return points[n - 1].1;
                }
                if lt <= ln(0) {
                    let (w0, w1) = (points[0].1, points[1].1);
                    if w0 <= 0.0 || w1 <= 0.0 {
                        return 0.0;
                    }
                    let slope = (w1.ln() - w0.ln()) / (ln(1) - ln(0));
                    return w0 * (slope.max(0.0) * (lt - ln(0))).exp();
                }
                let i = points.partition_point(|p| p.0.ln() <= lt) - 1;
                let (w0, w1) = (points[i].1, points[i + 1].1);
                let u = (lt - ln(i)) / (ln(i + 1) - ln(i));
                w0 + u * (w1 - w0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let ModulusCurve::Table { points } = self {
            if points.len() < 2 {
                return domain("a tabulated modulus needs at least two points");
            }
            if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points[0].0 <= 0.0 {
                return domain("tabulated modulus abscissae must be positive and increasing");
            }
        }
        Ok(())
    }
}

/// Evaluates `∫_0^1 |log t|^{d−1} ω(t) dt / t` after the substitution
/// `t = e^{−s}`, as partial integrals over `[0, 2^j]`, `j ≤ 10`.
pub fn condmodcont_integral(omega: &ModulusCurve, d: usize) -> Result<ConditionReport> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    omega.validate()?;
    let integrand = |s: f64| s.powi(d as i32 - 1) * omega.eval_neglog(s);
    let mut partial_sums = Vec::new();
    let mut cutoffs = Vec::new();
    let mut acc = 0.0;
    let mut lo = 0.0;
    let mut converged = true;
    for j in 0..=10 {
        let hi = f64::from(1u32 << j);
        let r = quad::integrate(integrand, lo, hi, 1e-12 * (1.0 + acc), 30);
        converged &= r.converged;
        acc += r.value;
        partial_sums.push(acc);
        cutoffs.push(hi);
        lo = hi;
    }
    let verdict = if converged { classify(&partial_sums) } else { Verdict::Inconclusive };
    Ok(ConditionReport {
        value: acc,
        verdict,
        partial_sums,
        cutoffs,
        alternate_value: None,
        literal_r_form: None,
    })
}
