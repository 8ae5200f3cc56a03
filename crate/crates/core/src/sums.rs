//! Prefix sums over rectangles, the interpolated process `W_{n,t}`, maximal
//! partial sums and variance estimators.

use serde::{Deserialize, Serialize};

use crate::error::{capability, domain, Result};
use crate::field::{exact_sigma2_torus, CoefficientRule, FieldModel, SampleGrid};
use crate::rng::par_replicates;

/// Inclusive prefix sums `S_i = Σ_{1 ⪯ k ⪯ i} X_k`, stored with a zero
/// boundary layer so `S_i = 0` whenever some `i_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumProcess {
    shape: Vec<usize>,
    /// Extents `n_j + 1`, row-major.
    prefix: Vec<f64>,
    strides: Vec<usize>,
    norm: f64,
}

impl SumProcess {
    pub fn new(shape: &[usize], values: &[f64]) -> Result<Self> {
        let d = shape.len();
        if d == 0 || d > 4 || shape.iter().any(|&n| n == 0) {
            return domain("shape must have 1 to 4 positive extents");
        }
        if values.len() != shape.iter().product::<usize>() {
            return domain("values do not match the shape");
        }
        let ext: Vec<usize> = shape.iter().map(|n| n + 1).collect();
        let mut strides = vec![1usize; d];
        for j in (0..d - 1).rev() {
            strides[j] = strides[j + 1] * ext[j + 1];
        }
        let total: usize = ext.iter().product();
        let mut prefix = vec![0.0; total];
        // copy values into the interior, then accumulate along each axis
        let mut idx = vec![1usize; d];
        for &v in values {
            let off: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            prefix[off] = v;
            for j in (0..d).rev() {
                if idx[j] < shape[j] {
                    idx[j] += 1;
                    break;
                }
                idx[j] = 1;
            }
        }
        for axis in 0..d {
            let s = strides[axis];
            for off in 0..total {
                let coord = (off / s) % ext[axis];
                if coord >= 1 {
                    prefix[off] += prefix[off - s];
                }
            }
        }
        let norm = (shape.iter().product::<usize>() as f64).sqrt();
        Ok(SumProcess { shape: shape.to_vec(), prefix, strides, norm })
    }

    pub fn from_grid(grid: &SampleGrid) -> Self {
        Self::new(&grid.shape, &grid.values).expect("validated grid")
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    /// `√|n|`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `S_i` for `0 ⪯ i ⪯ n`.
    pub fn s(&self, i: &[usize]) -> f64 {
        let off: usize = i.iter().zip(&self.strides).map(|(a, s)| a * s).sum();
        self.prefix[off]
    }

    /// `S_n`.
    pub fn total(&self) -> f64 {
        self.s(&self.shape)
    }

    /// Sum over the box `lo ⪯ k ⪯ hi` (1-based, inclusive) by
    /// inclusion–exclusion.
    pub fn rect_sum(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        let mut corner = vec![0usize; d];
        for mask in 0..(1usize << d) {
            let mut sign = 1.0;
            for j in 0..d {
                if mask >> j & 1 == 1 {
                    corner[j] = lo[j] - 1;
                    sign = -sign;
                } else {
                    corner[j] = hi[j];
                }
            }
            acc += sign * self.s(&corner);
        }
        acc
    }

    /// The single cell `X_k`.
    pub fn cell(&self, k: &[usize]) -> f64 {
        self.rect_sum(k, k)
    }

    /// `W_{n,t} = S_{n,t} / √|n|`, where `S_{n,t}` weights `X_k` by
    /// `Π_i clamp(n_i t_i − k_i + 1, 0, 1)`; this is the multilinear
    /// interpolation of `S` at the corner `n·t`.
    pub fn w_at(&self, t: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for j in 0..d {
            let u = (self.shape[j] as f64 * t[j].clamp(0.0, 1.0)).min(self.shape[j] as f64);
            let f = u.floor();
            base[j] = f as usize;
            frac[j] = u - f;
            if base[j] == self.shape[j] {
                frac[j] = 0.0;
            }
        }
        let mut acc = 0.0;
        let mut corner = vec![0usize; d];
        for mask in 0..(1usize << d) {
            let mut w = 1.0;
            for j in 0..d {
                if mask >> j & 1 == 1 {
                    w *= frac[j];
                    corner[j] = base[j] + 1;
                } else {
                    w *= 1.0 - frac[j];
                    corner[j] = base[j];
                }
            }
            if w != 0.0 {
                acc += w * self.s(&corner);
            }
        }
        acc / self.norm
    }

    /// `max_{1 ⪯ i ⪯ n} |S_i|`.
    pub fn max_rect(&self) -> f64 {
        let d = self.dim();
        let mut best = 0.0f64;
        for (off, v) in self.prefix.iter().enumerate() {
            let interior = (0..d).all(|j| (off / self.strides[j]) % (self.shape[j] + 1) >= 1);
            if interior {
                best = best.max(v.abs());
            }
        }
        best
    }
}

/// `prefix_sums(grid)`.
pub fn prefix_sums(grid: &SampleGrid) -> SumProcess {
    SumProcess::from_grid(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sigma2Method {
    Covseries,
    Varsums,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma2Estimate {
    pub value: f64,
    pub method: Sigma2Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    pub stderr: f64,
    pub reps: usize,
    /// Contribution of each covariance shell `max_i |k_i| = r`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shells: Vec<f64>,
    /// Set when the last shell carries at least 1% of the accumulated value.
    #[serde(default)]
    pub tail_flag: bool,
}

impl Sigma2Estimate {
    pub fn exact(value: f64) -> Self {
        Sigma2Estimate {
            value,
            method: Sigma2Method::Exact,
            radius: None,
            shape: None,
            stderr: 0.0,
            reps: 0,
            shells: Vec::new(),
            tail_flag: false,
        }
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimates `σ² = Σ_k Cov(X_0, X_k)`.
///
/// * `Covseries` sums within-grid covariances over `|k_i| ≤ radius` on grids
///   of the given shape (values are centered, so products are not
///   re-centered).
/// * `Varsums` uses `Var(S_n) / |n|` across replicates.
/// * `Exact` uses Fourier matching for torus models and `Var(X)` for iid
///   linear fields.
pub fn sigma2(
    model: &FieldModel,
    method: Sigma2Method,
    radius: usize,
    shape: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Sigma2Estimate> {
    match method {
        Sigma2Method::Exact => match model {
            FieldModel::Torus(t) => Ok(Sigma2Estimate::exact(exact_sigma2_torus(t)?)),
            FieldModel::Linear { spec, .. } if matches!(spec.coefficients, CoefficientRule::Single) || spec.kappa == 0.0 => {
                let (h, k, c) = (spec.observable, spec.kappa, spec.centering.unwrap_or(0.0));
                let v = spec.innovation.expect(|e| (h.apply(k * e) - c).powi(2));
                Ok(Sigma2Estimate::exact(v))
            }
            _ => capability("exact variance is available for Fourier torus models and iid linear fields"),
        },
        Sigma2Method::Varsums => {
            if reps < 2 {
                return domain("variance of sums needs at least 2 replicates");
            }
            let cells: usize = shape.iter().product();
            let hash = model.hash();
            let sums = par_replicates(reps, seed, &hash, |_, s| {
                model.sample_values(shape, s).map(|v| v.iter().sum::<f64>())
            });
            let sums: Vec<f64> = sums.into_iter().collect::<Result<_>>()?;
            let (m, _) = mean_se(&sums);
            let sq: Vec<f64> = sums.iter().map(|s| (s - m).powi(2) / cells as f64).collect();
            let (v, se) = mean_se(&sq);
            let value = v * reps as f64 / (reps as f64 - 1.0);
            Ok(Sigma2Estimate {
                value,
                method,
                radius: None,
                shape: Some(shape.to_vec()),
                stderr: se,
                reps,
                shells: Vec::new(),
                tail_flag: false,
            })
        }
        Sigma2Method::Covseries => {
            if reps < 2 {
                return domain("covariance series needs at least 2 replicates");
            }
            let d = model.d();
            if shape.len() != d || shape.iter().any(|&n| n < 2 * radius + 1) {
                return domain("grid shape must exceed 2·radius + 1 in every coordinate");
            }
            let hash = model.hash();
            let results = par_replicates(reps, seed, &hash, |_, s| -> Result<Vec<f64>> {
                let v = model.sample_values(shape, s)?;
                Ok(shell_covariances(&v, shape, radius))
            });
            let per_rep: Vec<Vec<f64>> = results.into_iter().collect::<Result<_>>()?;
            let totals: Vec<f64> = per_rep.iter().map(|sh| sh.iter().sum()).collect();
            let (value, stderr) = mean_se(&totals);
            let shells: Vec<f64> =
                (0..=radius).map(|r| per_rep.iter().map(|sh| sh[r]).sum::<f64>() / reps as f64).collect();
            let tail_flag = radius > 0 && shells[radius].abs() >= 0.01 * value.abs();
            Ok(Sigma2Estimate {
                value,
                method,
                radius: Some(radius),
                shape: Some(shape.to_vec()),
                stderr,
                reps,
                shells,
                tail_flag,
            })
        }
    }
}

/// Per-shell sums of averaged products `X_p X_{p+k}`, `|k_i| ≤ r`, over the
/// base points whose full neighbourhood lies in the grid.
fn shell_covariances(v: &[f64], shape: &[usize], r: usize) -> Vec<f64> {
    let d = shape.len();
    let mut strides = vec![1isize; d];
    for j in (0..d.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * shape[j + 1] as isize;
    }
    let side = 2 * r + 1;
    let nk = side.pow(d as u32);
    let mut lag_offsets = Vec::with_capacity(nk);
    let mut lag_shell = Vec::with_capacity(nk);
    for idx in 0..nk {
        let mut rem = idx;
        let mut off = 0isize;
        let mut shell = 0usize;
        for j in (0..d).rev() {
            let k = (rem % side) as isize - r as isize;
            rem /= side;
            off += k * strides[j];
            shell = shell.max(k.unsigned_abs());
        }
        lag_offsets.push(off);
        lag_shell.push(shell);
    }
    let inner: Vec<usize> = shape.iter().map(|n| n - 2 * r).collect();
    let count: usize = inner.iter().product();
    let mut acc = vec![0.0; nk];
    let mut p = vec![r; d];
    for _ in 0..count {
        let base: isize = p.iter().zip(&strides).map(|(a, s)| *a as isize * s).sum();
        let x0 = v[base as usize];
        for (a, off) in acc.iter_mut().zip(&lag_offsets) {
            *a += x0 * v[(base + off) as usize];
        }
        for j in (0..d).rev() {
            if p[j] + 1 < shape[j] - r {
                p[j] += 1;
                break;
            }
            p[j] = r;
        }
    }
    let mut shells = vec![0.0; r + 1];
    for (a, s) in acc.iter().zip(&lag_shell) {
        shells[*s] += a / count as f64;
    }
    shells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_grid() {
        let sp = SumProcess::new(&[3, 3], &[1.0; 9]).unwrap();
        assert_eq!(sp.s(&[3, 3]), 9.0);
        assert_eq!(sp.s(&[2, 1]), 2.0);
        assert_eq!(sp.s(&[0, 2]), 0.0);
        assert_eq!(sp.max_rect(), 9.0);
        assert_eq!(sp.w_at(&[0.0, 0.0]), 0.0);
        assert!((sp.w_at(&[1.0, 1.0]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_cell() {
        let mut v = vec![0.0; 9];
        v[4] = 2.5;
        let sp = SumProcess::new(&[3, 3], &v).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                assert_eq!(sp.s(&[i, j]), if i >= 2 && j >= 2 { 2.5 } else { 0.0 });
            }
        }
        assert_eq!(sp.cell(&[2, 2]), 2.5);
    }

    #[test]
    fn zero_grid_has_zero_max() {
        let sp = SumProcess::new(&[4, 2], &[0.0; 8]).unwrap();
        assert_eq!(sp.max_rect(), 0.0);
    }

    #[test]
    fn interpolated_corner() {
        // n = (4, 4), t = (0.625, 0.5): weights 1, 1, 1/2 on rows and 1, 1 on columns
        let v: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let sp = SumProcess::new(&[4, 4], &v).unwrap();
        let mut direct = 0.0;
        for k1 in 1..=4usize {
            for k2 in 1..=4usize {
                let w1 = (2.5 - k1 as f64 + 1.0).clamp(0.0, 1.0);
                let w2 = (2.0 - k2 as f64 + 1.0).clamp(0.0, 1.0);
                direct += w1 * w2 * v[(k1 - 1) * 4 + k2 - 1];
            }
        }
        assert_eq!(sp.w_at(&[0.625, 0.5]), direct / 4.0);
    }

    #[test]
    fn exact_sigma2_needs_fourier_or_iid() {
        let model = FieldModel::linear(Default::default()).unwrap();
        assert!(matches!(
            sigma2(&model, Sigma2Method::Exact, 0, &[2, 2], 2, 0),
            Err(crate::Error::Capability(_))
        ));
    }
}
