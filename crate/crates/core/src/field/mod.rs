//! Stationary random-field generators on integer rectangles.

pub mod dyadic;
pub mod grid;
pub mod innovation;
pub mod linear;
pub mod observable;
pub mod torus;

use serde::{Deserialize, Serialize};

pub use dyadic::DyadicPoint;
pub use grid::{Provenance, SampleGrid};
pub use innovation::{InnovationLaw, Moment};
pub use linear::{CenteringMethod, CoefficientRule, LinearFieldSpec};
pub use observable::ScalarObservable;
pub use torus::{exact_sigma2_torus, TorusFieldSpec, TorusModel};

use crate::error::{domain, Result};
use crate::rng::json_hash;

/// Serialized model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FieldSpec {
    Linear(LinearFieldSpec),
    Torus(TorusFieldSpec),
}

/// A validated model ready to sample.
#[derive(Debug, Clone)]
pub enum FieldModel {
    Linear { spec: LinearFieldSpec, centering: CenteringMethod },
    Torus(TorusModel),
}

impl FieldModel {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        match spec {
            FieldSpec::Linear(s) => {
                let (spec, centering) = s.resolve()?;
                Ok(FieldModel::Linear { spec, centering })
            }
            FieldSpec::Torus(s) => Ok(FieldModel::Torus(TorusModel::new(s)?)),
        }
    }

    pub fn linear(spec: LinearFieldSpec) -> Result<Self> {
        Self::new(FieldSpec::Linear(spec))
    }

    pub fn torus(spec: TorusFieldSpec) -> Result<Self> {
        Self::new(FieldSpec::Torus(spec))
    }

    /// The model description with centering and truncation filled in.
    pub fn resolved_spec(&self) -> FieldSpec {
        match self {
            FieldModel::Linear { spec, .. } => FieldSpec::Linear(spec.clone()),
            FieldModel::Torus(t) => FieldSpec::Torus(t.spec().clone()),
        }
    }

    pub fn hash(&self) -> String {
        json_hash(&self.resolved_spec())
    }

    /// Index dimension `d`.
    pub fn d(&self) -> usize {
        match self {
            FieldModel::Linear { .. } => 2,
            FieldModel::Torus(t) => t.d(),
        }
    }

    /// Bound on `|X|`.
    pub fn sup_bound(&self) -> f64 {
        match self {
            FieldModel::Linear { spec, .. } => spec.observable.bound() + spec.centering.unwrap_or(0.0).abs(),
            FieldModel::Torus(t) => t.spec().observable.sup_bound() + t.centering().abs(),
        }
    }

    pub fn as_torus(&self) -> Option<&TorusModel> {
        match self {
            FieldModel::Torus(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_linear(&self) -> Option<&LinearFieldSpec> {
        match self {
            FieldModel::Linear { spec, .. } => Some(spec),
            _ => None,
        }
    }

    /// Centered values on `[1, n]`, row-major, for one replicate seed.
    pub fn sample_values(&self, n: &[usize], seed: u128) -> Result<Vec<f64>> {
        if n.len() != self.d() || n.iter().any(|&v| v == 0) {
            return domain(format!("shape {n:?} does not fit a field with d = {}", self.d()));
        }
        Ok(match self {
            FieldModel::Linear { spec, .. } => {
                let c = spec.centering.unwrap_or(0.0);
                spec.sample_y([n[0], n[1]], seed).into_iter().map(|y| spec.observable.apply(y) - c).collect()
            }
            FieldModel::Torus(t) => t.sample_values(n, seed),
        })
    }

    pub fn sample(&self, n: &[usize], seed: u128) -> Result<SampleGrid> {
        let values = self.sample_values(n, seed)?;
        SampleGrid::new(n.to_vec(), values, Provenance { model_hash: self.hash(), seed: format!("{seed:032x}") })
    }
}

/// `sample_linear(spec, n, seed)`.
pub fn sample_linear(spec: &LinearFieldSpec, n: [usize; 2], seed: u128) -> Result<SampleGrid> {
    FieldModel::linear(spec.clone())?.sample(&n, seed)
}

/// `sample_torus(spec, n, seed)`.
pub fn sample_torus(spec: &TorusFieldSpec, n: &[usize], seed: u128) -> Result<SampleGrid> {
    FieldModel::torus(spec.clone())?.sample(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::FourierObservable;

    #[test]
    fn zero_fields() {
        let spec = LinearFieldSpec { kappa: 0.0, ..Default::default() };
        let g = sample_linear(&spec, [4, 5], 1).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
        let t = TorusFieldSpec::scalar(&[2, 3], FourierObservable::zero(1));
        let g = sample_torus(&t, &[4, 5], 1).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn iid_uniform_variance() {
        let spec = LinearFieldSpec { coefficients: CoefficientRule::Single, ..Default::default() };
        let g = sample_linear(&spec, [320, 320], 3).unwrap();
        let n = g.len() as f64;
        let mean = g.sum() / n;
        let var = g.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // Var of the sample variance of U(−1,1) is (1/5 − 1/9)/n
        let se = ((0.2 - 1.0 / 9.0) / n).sqrt();
        assert!((var - 1.0 / 3.0).abs() < 4.0 * se, "{var}");
    }

    #[test]
    fn worker_count_does_not_change_grids() {
        let spec = LinearFieldSpec::default();
        let model = FieldModel::linear(spec).unwrap();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| crate::rng::par_replicates(8, 42, &model.hash(), |_, s| model.sample_values(&[6, 6], s).unwrap()))
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = FieldSpec::Linear(LinearFieldSpec::default());
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FieldSpec>(&s).unwrap(), spec);
        let bad = r#"{"model":"linear","kappa":1,"rho":0.5,"bogus":1}"#;
        assert!(serde_json::from_str::<FieldSpec>(bad).is_err());
    }
}
