//! Observables on `T^m` given by samples on a regular lattice.

use serde::{Deserialize, Serialize};

use super::fourier::FourierObservable;
use crate::error::{domain, Result};

/// Periodic multilinear interpolant of samples at `{j / res}^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc")]
pub struct GridFunction {
    dim: usize,
    res: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    dim: usize,
    res: usize,
    values: Vec<f64>,
}

impl TryFrom<GridDoc> for GridFunction {
    type Error = crate::error::Error;
    fn try_from(d: GridDoc) -> Result<Self> {
        GridFunction::new(d.dim, d.res, d.values)
    }
}

impl GridFunction {
    pub fn new(dim: usize, res: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > 3 || res < 2 {
            return domain("grid observable needs 1 ≤ dim ≤ 3 and res ≥ 2");
        }
        if values.len() != res.pow(dim as u32) {
            return domain(format!("grid observable expects {} values", res.pow(dim as u32)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("grid observable values must be finite");
        }
        Ok(GridFunction { dim, res, values })
    }

    /// Samples a Fourier observable.
    pub fn from_fourier(f: &FourierObservable, res: usize) -> Result<Self> {
        Self::new(f.dim(), res, f.eval_lattice(res))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = self.res;
        let mut base = [0usize; 3];
        let mut w = [0.0f64; 3];
        for i in 0..self.dim {
            let s = (x[i] - x[i].floor()) * r as f64;
            let b = s.floor();
            base[i] = (b as usize) % r;
            w[i] = s - b;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << self.dim) {
            let mut weight = 1.0;
            let mut idx = 0usize;
            for i in 0..self.dim {
                let up = (corner >> i) & 1;
                weight *= if up == 1 { w[i] } else { 1.0 - w[i] };
                idx = idx * r + (base[i] + up) % r;
            }
            if weight != 0.0 {
                acc += weight * self.values[idx];
            }
        }
        acc
    }

    /// `E|f(·) − f(· + h)|` by quadrature on a lattice twice as fine as the
    /// samples.
    pub fn l1_shift_difference(&self, h: &[f64]) -> f64 {
        let q = 2 * self.res;
        let total = q.pow(self.dim as u32);
        let mut idx = vec![0usize; self.dim];
        let mut x = vec![0.0; self.dim];
        let mut y = vec![0.0; self.dim];
        let mut acc = 0.0;
        for _ in 0..total {
            for i in 0..self.dim {
                x[i] = (idx[i] as f64 + 0.5) / q as f64;
                y[i] = x[i] + h[i];
            }
            acc += (self.eval(&x) - self.eval(&y)).abs();
            for i in (0..self.dim).rev() {
                idx[i] += 1;
                if idx[i] < q {
                    break;
                }
                idx[i] = 0;
            }
        }
        acc / total as f64
    }
}
