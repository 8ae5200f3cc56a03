//! Koopman and Perron operators of expanding integer-matrix endomorphisms of
//! `T^m`, acting on trigonometric polynomials and on sampled functions.

pub mod fourier;
pub mod grid;
pub mod identities;
pub mod map;
pub mod matrix;
pub mod modulus;

use serde::{Deserialize, Serialize};

pub use fourier::{l1_norm, lp_norm, FourierObservable, NormEstimate};
pub use grid::GridFunction;
pub use identities::{check_identities, IdentityReport};
pub use map::TorusMap;
pub use matrix::{coset_representatives, coset_representatives_bruteforce, IntMatrix};
pub use modulus::{condmodcont_integral, k_power_l1, l1_modulus, modulus_lemmas_check, ModulusCurve};

/// An observable on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum TorusObservable {
    Fourier(FourierObservable),
    Grid(GridFunction),
}

impl TorusObservable {
    pub fn dim(&self) -> usize {
        match self {
            TorusObservable::Fourier(f) => f.dim(),
            TorusObservable::Grid(g) => g.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TorusObservable::Fourier(f) => f.eval(x),
            TorusObservable::Grid(g) => g.eval(x),
        }
    }

    pub fn as_fourier(&self) -> Option<&FourierObservable> {
        match self {
            TorusObservable::Fourier(f) => Some(f),
            TorusObservable::Grid(_) => None,
        }
    }

    /// Mean against Lebesgue measure (exact for Fourier, lattice average for
    /// grids).
    pub fn mean(&self) -> f64 {
        match self {
            TorusObservable::Fourier(f) => f.mean(),
            TorusObservable::Grid(g) => g.mean(),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            TorusObservable::Fourier(f) => f.abs_sum(),
            TorusObservable::Grid(g) => g.sup(),
        }
    }
}
