//! Bounded Lipschitz maps `h: R → R` applied to linear fields.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarObservable {
    /// `x ↦ (x ∧ hi) ∨ lo`
    Clip {
        #[serde(default = "neg_one")]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
    /// `x ↦ tanh(scale · x)`
    TanhScaled { scale: f64 },
    /// `x ↦ sin(freq · x)`
    Sin { freq: f64 },
}

fn one() -> f64 {
    1.0
}
fn neg_one() -> f64 {
    -1.0
}

impl Default for ScalarObservable {
    fn default() -> Self {
        ScalarObservable::Clip { lo: -1.0, hi: 1.0 }
    }
}

impl ScalarObservable {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ScalarObservable::Clip { lo, hi } => x.clamp(lo, hi),
            ScalarObservable::TanhScaled { scale } => (scale * x).tanh(),
            ScalarObservable::Sin { freq } => {
                if x.is_finite() {
                    (freq * x).sin()
                } else {
                    0.0
                }
            }
        }
    }

    /// `∥h∥_∞`.
    pub fn bound(&self) -> f64 {
        match *self {
            ScalarObservable::Clip { lo, hi } => lo.abs().max(hi.abs()),
            ScalarObservable::TanhScaled { .. } | ScalarObservable::Sin { .. } => 1.0,
        }
    }

    /// Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            ScalarObservable::Clip { .. } => 1.0,
            ScalarObservable::TanhScaled { scale } => scale.abs(),
            ScalarObservable::Sin { freq } => freq.abs(),
        }
    }

    /// Whether `h(−x) = −h(x)`.
    pub fn is_odd(&self) -> bool {
        match *self {
            ScalarObservable::Clip { lo, hi } => lo == -hi,
            _ => true,
        }
    }

    /// Validates parameters and spot-checks the recorded bound and Lipschitz
    /// constant on a fixed set of points.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ScalarObservable::Clip { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            ScalarObservable::TanhScaled { scale } => scale.is_finite() && scale != 0.0,
            ScalarObservable::Sin { freq } => freq.is_finite() && freq != 0.0,
        };
        if !ok {
            return domain(format!("invalid observable parameters {self:?}"));
        }
        let pts: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.037).collect();
        let (b, l) = (self.bound(), self.lipschitz());
        for w in pts.windows(2) {
            let (x, y) = (w[0], w[1]);
            if self.apply(x).abs() > b + 1e-12 || (self.apply(x) - self.apply(y)).abs() > l * (y - x) + 1e-12 {
                return domain(format!("observable {self:?} violates its declared bound or Lipschitz constant"));
            }
        }
        Ok(())
    }
}
