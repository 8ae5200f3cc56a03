//! Expanding endomorphisms `x ↦ A x mod 1` of `T^m` with their Koopman and
//! Perron operators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fourier::FourierObservable;
use super::matrix::{coset_representatives, IntMatrix};
use crate::error::{domain, Result};

/// Most preimages a pointwise Perron evaluation will enumerate.
pub const MAX_POINTWISE_PREIMAGES: usize = 1 << 16;

#[derive(Debug, Clone, Serialize)]
pub struct TorusMap {
    a: IntMatrix,
    det_abs: u64,
    #[serde(skip)]
    reps: Vec<Vec<i64>>,
    inv_norm: f64,
    diameter: f64,
    eigen_moduli: Vec<f64>,
}

impl<'de> Deserialize<'de> for TorusMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = IntMatrix::deserialize(d)?;
        TorusMap::new(a).map_err(serde::de::Error::custom)
    }
}

impl PartialEq for TorusMap {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
    }
}

fn to_dmatrix(a: &IntMatrix) -> DMatrix<f64> {
    let m = a.dim();
    DMatrix::from_fn(m, m, |i, j| a.get(i, j) as f64)
}

impl TorusMap {
    /// Validates that `A` is nonsingular and expanding.
    pub fn new(a: IntMatrix) -> Result<Self> {
        let det = a.det();
        if det == 0 {
            return domain("matrix is singular");
        }
        let det_abs = u64::try_from(det.unsigned_abs()).map_err(|_| crate::Error::Domain("determinant too large".into()))?;
        let dm = to_dmatrix(&a);
        let eigen_moduli: Vec<f64> = dm.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        if eigen_moduli.iter().any(|&r| r <= 1.0 + 1e-12) {
            return domain(format!("matrix is not expanding: eigenvalue moduli {eigen_moduli:?}"));
        }
        let inv = dm.clone().try_inverse().expect("nonsingular");
        let inv_norm = inv.clone().svd(false, false).singular_values.max();
        let m = a.dim();
        let mut diameter: f64 = 0.0;
        for mask in 0..(1usize << m) {
            let v = nalgebra::DVector::from_fn(m, |i, _| ((mask >> i) & 1) as f64);
            diameter = diameter.max((&inv * v).norm());
        }
        let reps = if (det_abs as usize) <= MAX_POINTWISE_PREIMAGES { coset_representatives(&a)? } else { Vec::new() };
        Ok(TorusMap { a, det_abs, reps, inv_norm, diameter, eigen_moduli })
    }

    pub fn scalar(s: i64) -> Result<Self> {
        Self::new(IntMatrix::scalar(1, s))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn det_abs(&self) -> u64 {
        self.det_abs
    }

    /// Coset representatives of `Z^m / A Z^m`.
    pub fn reps(&self) -> &[Vec<i64>] {
        &self.reps
    }

    /// `|A^{-1}|₂`.
    pub fn inv_norm(&self) -> f64 {
        self.inv_norm
    }

    /// Diameter of `A^{-1}([0,1)^m)`.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn eigen_moduli(&self) -> &[f64] {
        &self.eigen_moduli
    }

    /// `A^k` as a map, `None` on overflow.
    pub fn power(&self, k: u32) -> Option<Result<TorusMap>> {
        self.a.checked_pow(k).map(TorusMap::new)
    }

    /// Coprime determinants, the condition for complete commutation used here.
    pub fn completely_commutes_with(&self, other: &TorusMap) -> bool {
        self.a.commutes_with(&other.a) && gcd(self.det_abs, other.det_abs) == 1
    }

    /// Koopman push `U f = f ∘ A`: frequency `n ↦ Aᵀ n`.
    pub fn koopman(&self, f: &FourierObservable) -> FourierObservable {
        let at = self.a.transpose();
        f.map_frequencies(|n| Some(at.checked_apply(n).expect("frequency overflow under Koopman push")))
    }

    pub fn koopman_pow(&self, f: &FourierObservable, k: u32) -> FourierObservable {
        (0..k).fold(f.clone(), |g, _| self.koopman(&g))
    }

    /// Perron push: the coefficient at `n` survives at `n′` with `n = Aᵀ n′`;
    /// every other frequency is annihilated.
    pub fn perron(&self, f: &FourierObservable) -> FourierObservable {
        let at = self.a.transpose();
        f.map_frequencies(|n| at.solve_integral(n))
    }

    pub fn perron_pow(&self, f: &FourierObservable, k: u32) -> FourierObservable {
        let mut g = f.clone();
        for _ in 0..k {
            if g.len() == 1 && g.mean() != 0.0 || g.is_empty() {
                break;
            }
            g = self.perron(&g);
        }
        g
    }

    /// `x ↦ A x mod 1` in floating point.
    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..m {
                    let p = self.a.get(i, j) as f64 * x[j];
                    s += p - p.floor();
                }
                s - s.floor()
            })
            .collect()
    }

    /// The `|det A|` preimages `A^{-1}(x + γ) mod 1`.
    pub fn preimages(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let m = self.dim();
        let adj = self.a.adjugate();
        let det_abs = self.a.det().abs();
        let det = self.a.det() as f64;
        self.reps
            .iter()
            .map(|g| {
                (0..m)
                    .map(|i| {
                        // adj · (x + γ) / det, the integer part of adj·γ / det kept exact
                        let mut int_part: i128 = 0;
                        let mut frac = 0.0;
                        for j in 0..m {
                            int_part += adj[i * m + j] * g[j] as i128;
                            frac += adj[i * m + j] as f64 * x[j];
                        }
                        let r = int_part.rem_euclid(det_abs) as f64;
                        let v = (r + frac) / det;
                        v - v.floor()
                    })
                    .collect()
            })
            .collect()
    }

    /// Pointwise Perron operator `K f(x) = |det A|^{-1} Σ_γ f(A^{-1}(x + γ))`.
    pub fn perron_apply(&self, f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Result<f64> {
        if self.reps.is_empty() {
            return crate::error::capability("too many preimages for pointwise evaluation");
        }
        let pre = self.preimages(x);
        Ok(pre.iter().map(|y| f(y)).sum::<f64>() / self.det_abs as f64)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_map_data() {
        let t = TorusMap::scalar(2).unwrap();
        assert_eq!(t.det_abs(), 2);
        assert!((t.inv_norm() - 0.5).abs() < 1e-15);
        assert!((t.diameter() - 0.5).abs() < 1e-15);
        assert!(TorusMap::scalar(1).is_err());
        assert!(TorusMap::scalar(-1).is_err());
        assert!(TorusMap::scalar(0).is_err());
    }

    #[test]
    fn perron_fourier_rule_on_doubling() {
        let t = TorusMap::scalar(2).unwrap();
        let c1 = FourierObservable::cos(&[1], 1.0);
        let c2 = FourierObservable::cos(&[2], 1.0);
        assert!(t.perron(&c1).is_empty());
        assert_eq!(t.perron(&c2), c1);
        let one = FourierObservable::constant(1, 1.0);
        assert_eq!(t.perron(&one), one);
    }

    #[test]
    fn preimages_map_back() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![-1, 3]]).unwrap();
        let t = TorusMap::new(a).unwrap();
        let x = [0.3, 0.71];
        let pre = t.preimages(&x);
        assert_eq!(pre.len(), 7);
        for y in &pre {
            let z = t.apply_point(y);
            for i in 0..2 {
                let d = (z[i] - x[i]).rem_euclid(1.0);
                assert!(d.min(1.0 - d) < 1e-12);
            }
        }
        // distinct points
        for i in 0..pre.len() {
            for j in i + 1..pre.len() {
                assert!((pre[i][0] - pre[j][0]).abs() + (pre[i][1] - pre[j][1]).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn negative_determinant_preimages() {
        let t = TorusMap::new(IntMatrix::from_rows(&[vec![-3]]).unwrap()).unwrap();
        let pre = t.preimages(&[0.2]);
        for y in pre {
            let z = (-3.0 * y[0]).rem_euclid(1.0);
            assert!((z - 0.2).abs() < 1e-12);
        }
    }
}
