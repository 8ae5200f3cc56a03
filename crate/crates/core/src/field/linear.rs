//! Linear random fields `Y_{k,ℓ} = Σ_{i,j≥0} a_{i,j} ε_{k−i,ℓ−j}` observed
//! through a bounded Lipschitz map.

use serde::{Deserialize, Serialize};

use super::innovation::InnovationLaw;
use super::observable::ScalarObservable;
use crate::error::{domain, Result};
use crate::rng::{rng_from_seed, substream};

/// Relative tail of the coefficient envelope left out by the truncation.
pub const TRUNCATION_TOL: f64 = 1e-12;
/// Draws used for a Monte Carlo centering estimate.
pub const CENTERING_DRAWS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientRule {
    /// `a_{i,j} = κ ρ^{i+j}`
    #[default]
    Geometric,
    /// `a_{i,j} = κ (−ρ)^i ρ^j`
    Alternating,
    /// `a_{0,0} = κ`, all others 0 (an iid field).
    Single,
    /// Listed coefficients `(i, j, a)`, all others 0.
    Sparse { entries: Vec<(usize, usize, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearFieldSpec {
    pub kappa: f64,
    pub rho: f64,
    #[serde(default)]
    pub coefficients: CoefficientRule,
    #[serde(default)]
    pub innovation: InnovationLaw,
    #[serde(default)]
    pub observable: ScalarObservable,
    /// Series truncation radius; derived from `rho` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// `E h(Y)`; computed by [`LinearFieldSpec::resolve`] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centering: Option<f64>,
}

impl Default for LinearFieldSpec {
    fn default() -> Self {
        LinearFieldSpec {
            kappa: 1.0,
            rho: 0.5,
            coefficients: CoefficientRule::Geometric,
            innovation: InnovationLaw::Uniform { a: 1.0 },
            observable: ScalarObservable::Clip { lo: -1.0, hi: 1.0 },
            truncation: None,
            centering: None,
        }
    }
}

/// How the centering constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringMethod {
    Given,
    /// Symmetric innovations and odd `h`.
    Symmetry,
    Quadrature,
    MonteCarlo,
}

impl LinearFieldSpec {
    /// Smallest radius `R` whose neglected envelope tail
    /// `Σ_{max(i,j) ≥ R} ρ^{i+j}` is below `TRUNCATION_TOL · (1−ρ)^{-2}`.
    pub fn required_radius(rho: f64) -> usize {
        if rho <= 0.0 {
            return 1;
        }
        let mut r = 1usize;
        while 2.0 * rho.powi(r as i32) - rho.powi(2 * r as i32) >= TRUNCATION_TOL {
            r += 1;
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return domain("rho must lie in (0, 1)");
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return domain("kappa must be a nonnegative finite number");
        }
        self.innovation.validate()?;
        self.observable.validate()?;
        if let CoefficientRule::Sparse { entries } = &self.coefficients {
            for &(i, j, a) in entries {
                let env = self.kappa * self.rho.powi((i + j) as i32);
                if !a.is_finite() || a.abs() > env * (1.0 + 1e-12) {
                    return domain(format!("coefficient a[{i},{j}] = {a} exceeds the envelope {env}"));
                }
            }
        }
        let need = self.min_radius();
        if let Some(r) = self.truncation {
            if r < need {
                return domain(format!("truncation radius {r} is below the required {need}"));
            }
        }
        Ok(())
    }

    fn min_radius(&self) -> usize {
        match &self.coefficients {
            CoefficientRule::Single => 1,
            CoefficientRule::Sparse { entries } => entries.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(1),
            _ => Self::required_radius(self.rho),
        }
    }

    pub fn radius(&self) -> usize {
        self.truncation.unwrap_or_else(|| self.min_radius())
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let k = self.kappa;
        match &self.coefficients {
            CoefficientRule::Geometric => k * self.rho.powi((i + j) as i32),
            CoefficientRule::Alternating => {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * k * self.rho.powi((i + j) as i32)
            }
            CoefficientRule::Single => {
                if i == 0 && j == 0 {
                    k
                } else {
                    0.0
                }
            }
            CoefficientRule::Sparse { entries } => {
                entries.iter().filter(|e| e.0 == i && e.1 == j).map(|e| e.2).sum()
            }
        }
    }

    /// Factors `(u, v)` with `a_{i,j} = κ u_i v_j`, when the rule is separable.
    pub fn separable(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let r = self.radius();
        let geo: Vec<f64> = (0..r).map(|i| self.rho.powi(i as i32)).collect();
        match self.coefficients {
            CoefficientRule::Geometric => Some((geo.clone(), geo)),
            CoefficientRule::Alternating => {
                let alt = geo.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -v }).collect();
                Some((alt, geo))
            }
            _ => None,
        }
    }

    /// Nonzero coefficients inside the truncation box.
    pub fn coefficient_list(&self) -> Vec<(usize, usize, f64)> {
        match &self.coefficients {
            CoefficientRule::Single => vec![(0, 0, self.kappa)],
            CoefficientRule::Sparse { entries } => entries.clone(),
            _ => {
                let r = self.radius();
                let mut out = Vec::with_capacity(r * r);
                for i in 0..r {
                    for j in 0..r {
                        out.push((i, j, self.coefficient(i, j)));
                    }
                }
                out
            }
        }
    }

    /// Fills `centering` and `truncation`, returning how the centering was
    /// obtained.
    pub fn resolve(&self) -> Result<(LinearFieldSpec, CenteringMethod)> {
        self.validate()?;
        let mut out = self.clone();
        out.truncation = Some(self.radius());
        let method = if let Some(_) = self.centering {
            CenteringMethod::Given
        } else if self.observable.is_odd() || self.kappa == 0.0 && self.observable.apply(0.0) == 0.0 {
            out.centering = Some(if self.observable.is_odd() { 0.0 } else { self.observable.apply(0.0) });
            CenteringMethod::Symmetry
        } else if self.kappa == 0.0 {
            out.centering = Some(self.observable.apply(0.0));
            CenteringMethod::Quadrature
        } else if matches!(self.coefficients, CoefficientRule::Single) {
            let h = self.observable;
            let k = self.kappa;
            out.centering = Some(self.innovation.expect(|e| h.apply(k * e)));
            CenteringMethod::Quadrature
        } else {
            out.centering = Some(self.monte_carlo_mean(CENTERING_DRAWS, 0x63656e746572));
            CenteringMethod::MonteCarlo
        };
        Ok((out, method))
    }

    fn monte_carlo_mean(&self, draws: usize, seed: u128) -> f64 {
        let coeffs = self.coefficient_list();
        let mut rng = rng_from_seed(seed);
        let mut acc = 0.0;
        for _ in 0..draws {
            let y: f64 = coeffs.iter().map(|&(_, _, a)| a * self.innovation.sample(&mut rng)).sum();
            acc += self.observable.apply(y);
        }
        acc / draws as f64
    }

    /// `Ŷ` on `[1, n1] × [1, n2]` from one innovation panel drawn from `seed`.
    pub fn sample_y(&self, n: [usize; 2], seed: u128) -> Vec<f64> {
        let r = self.radius();
        let (w1, w2) = (n[0] + r - 1, n[1] + r - 1);
        let mut rng = rng_from_seed(substream(seed, 0));
        // panel[p][q] holds ε at (p + 1 − (r − 1), q + 1 − (r − 1))
        let panel: Vec<f64> = (0..w1 * w2).map(|_| self.innovation.sample(&mut rng)).collect();
        let mut y = vec![0.0; n[0] * n[1]];
        if self.kappa == 0.0 {
            return y;
        }
        if let Some((u, v)) = self.separable() {
            let mut z = vec![0.0; w1 * n[1]];
            for p in 0..w1 {
                for l in 0..n[1] {
                    let q0 = l + r - 1;
                    let mut s = 0.0;
                    for (j, vj) in v.iter().enumerate() {
                        s += vj * panel[p * w2 + q0 - j];
                    }
                    z[p * n[1] + l] = s;
                }
            }
            for k in 0..n[0] {
                let p0 = k + r - 1;
                for l in 0..n[1] {
                    let mut s = 0.0;
                    for (i, ui) in u.iter().enumerate() {
                        s += ui * z[(p0 - i) * n[1] + l];
                    }
                    y[k * n[1] + l] = self.kappa * s;
                }
            }
        } else {
            let coeffs = self.coefficient_list();
            for k in 0..n[0] {
                for l in 0..n[1] {
                    let (p0, q0) = (k + r - 1, l + r - 1);
                    y[k * n[1] + l] = coeffs.iter().map(|&(i, j, a)| a * panel[(p0 - i) * w2 + q0 - j]).sum();
                }
            }
        }
        y
    }

    /// Tail bound used by the truncation: `κ (1−ρ)^{-2} (2ρ^R − ρ^{2R})`.
    pub fn truncation_tail(&self) -> f64 {
        let r = self.radius() as i32;
        self.kappa / (1.0 - self.rho).powi(2) * (2.0 * self.rho.powi(r) - self.rho.powi(2 * r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_for_default_rho() {
        assert_eq!(LinearFieldSpec::required_radius(0.5), 41);
        let s = LinearFieldSpec::default();
        assert!(s.truncation_tail() < 1e-12 * 4.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut s = LinearFieldSpec::default();
        s.rho = 1.0;
        assert!(s.validate().is_err());
        s.rho = 0.5;
        s.kappa = -1.0;
        assert!(s.validate().is_err());
        s.kappa = 1.0;
        s.truncation = Some(10);
        assert!(s.validate().is_err());
        s.truncation = None;
        s.coefficients = CoefficientRule::Sparse { entries: vec![(1, 1, 0.3)] };
        assert!(s.validate().is_err());
    }

    #[test]
    fn separable_matches_direct_sum() {
        for rule in [CoefficientRule::Geometric, CoefficientRule::Alternating] {
            let spec = LinearFieldSpec { coefficients: rule.clone(), ..Default::default() };
            let fast = spec.sample_y([5, 7], 99);
            let sparse = LinearFieldSpec {
                coefficients: CoefficientRule::Sparse { entries: spec.coefficient_list() },
                ..spec.clone()
            };
            let slow = sparse.sample_y([5, 7], 99);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn centering_methods() {
        let (s, m) = LinearFieldSpec::default().resolve().unwrap();
        assert_eq!(m, CenteringMethod::Symmetry);
        assert_eq!(s.centering, Some(0.0));
        let single = LinearFieldSpec {
            coefficients: CoefficientRule::Single,
            observable: ScalarObservable::Clip { lo: 0.0, hi: 1.0 },
            ..Default::default()
        };
        let (s, m) = single.resolve().unwrap();
        assert_eq!(m, CenteringMethod::Quadrature);
        // E (ε ∨ 0) for ε ~ U(−1, 1)
        assert!((s.centering.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn doubling_the_radius_changes_cells_little() {
        use rand::SeedableRng;
        let spec = LinearFieldSpec::default();
        let r = spec.radius();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let w = 2 * r;
        let panel: Vec<f64> = (0..w * w).map(|_| spec.innovation.sample(&mut rng)).collect();
        let y = |rad: usize| {
            let mut s = 0.0;
            for i in 0..rad {
                for j in 0..rad {
                    s += spec.coefficient(i, j) * panel[(w - 1 - i) * w + (w - 1 - j)];
                }
            }
            s
        };
        let scale = spec.kappa / (1.0 - spec.rho).powi(2);
        assert!((y(r) - y(2 * r)).abs() < 1e-10 * scale);
    }
}
