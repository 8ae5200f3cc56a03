//! Finite trigonometric polynomials on `T^m`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Coefficients below this modulus are dropped after every operation.
pub const PRUNE: f64 = 1e-300;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermDoc {
    freq: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierDoc {
    dim: usize,
    terms: Vec<TermDoc>,
}

/// `f(x) = Σ_n c_n e^{2πi n·x}` with finitely many nonzero `c_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourierDoc", into = "FourierDoc")]
pub struct FourierObservable {
    dim: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl TryFrom<FourierDoc> for FourierObservable {
    type Error = crate::error::Error;
    fn try_from(doc: FourierDoc) -> Result<Self> {
        let mut f = FourierObservable::zero(doc.dim);
        for t in doc.terms {
            if t.freq.len() != doc.dim {
                return domain(format!("frequency {:?} does not have dimension {}", t.freq, doc.dim));
            }
            f.add_term(t.freq, Complex64::new(t.re, t.im));
        }
        Ok(f)
    }
}

impl From<FourierObservable> for FourierDoc {
    fn from(f: FourierObservable) -> Self {
        FourierDoc {
            dim: f.dim,
            terms: f.terms.into_iter().map(|(freq, c)| TermDoc { freq, re: c.re, im: c.im }).collect(),
        }
    }
}

/// `frac(n x)` for integer `n` and `x ∈ [0, 1)`, with the rounding error of
/// the product folded back in.
fn frac_product(n: i64, x: f64) -> f64 {
    let nf = n as f64;
    let p = nf * x;
    let e = nf.mul_add(x, -p);
    let r = p - p.floor();
    let s = r + e;
    s - s.floor()
}

impl FourierObservable {
    pub fn zero(dim: usize) -> Self {
        FourierObservable { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(vec![0; dim], Complex64::new(c, 0.0));
        f
    }

    /// `amp · cos(2π n·x)`.
    pub fn cos(freq: &[i64], amp: f64) -> Self {
        let mut f = Self::zero(freq.len());
        f.add_cos(freq, amp);
        f
    }

    /// `amp · sin(2π n·x)`.
    pub fn sin(freq: &[i64], amp: f64) -> Self {
        let mut f = Self::zero(freq.len());
        f.add_sin(freq, amp);
        f
    }

    pub fn add_cos(&mut self, freq: &[i64], amp: f64) {
        let neg: Vec<i64> = freq.iter().map(|v| -v).collect();
        self.add_term(freq.to_vec(), Complex64::new(0.5 * amp, 0.0));
        self.add_term(neg, Complex64::new(0.5 * amp, 0.0));
    }

    pub fn add_sin(&mut self, freq: &[i64], amp: f64) {
        let neg: Vec<i64> = freq.iter().map(|v| -v).collect();
        self.add_term(freq.to_vec(), Complex64::new(0.0, -0.5 * amp));
        self.add_term(neg, Complex64::new(0.0, 0.5 * amp));
    }

    pub fn add_term(&mut self, freq: Vec<i64>, c: Complex64) {
        assert_eq!(freq.len(), self.dim, "frequency dimension");
        let e = self.terms.entry(freq.clone()).or_default();
        *e += c;
        if e.norm() <= PRUNE {
            self.terms.remove(&freq);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, freq: &[i64]) -> Complex64 {
        self.terms.get(freq).copied().unwrap_or_default()
    }

    /// Zero-frequency coefficient, the integral against Lebesgue measure.
    pub fn mean(&self) -> f64 {
        self.coeff(&vec![0; self.dim]).re
    }

    /// Whether `c_{-n} = conj(c_n)` for every `n`.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(n, c)| {
            let neg: Vec<i64> = n.iter().map(|v| -v).collect();
            (self.coeff(&neg) - c.conj()).norm() <= 1e-14 * (1.0 + c.norm())
        })
    }

    /// `Σ |c_n|`, an upper bound on the sup norm.
    pub fn abs_sum(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a + c.norm())
    }

    /// `E|f|² = Σ |c_n|²`.
    pub fn l2_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// `E(f · conj g) = Σ c_n conj(d_n)`.
    pub fn inner(&self, g: &Self) -> Complex64 {
        self.terms.iter().map(|(n, c)| c * g.coeff(n).conj()).sum()
    }

    /// `E(f · g)` for real observables.
    pub fn expect_product(&self, g: &Self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in &self.terms {
            let neg: Vec<i64> = n.iter().map(|v| -v).collect();
            acc += c * g.coeff(&neg);
        }
        acc.re
    }

    pub fn max_freq(&self) -> i64 {
        self.terms.keys().flat_map(|n| n.iter().map(|v| v.abs())).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (n, c) in &self.terms {
            out.add_term(n.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.add_term(n.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (n, c) in &self.terms {
            for (k, d) in &other.terms {
                let s: Vec<i64> = n.iter().zip(k).map(|(a, b)| a + b).collect();
                out.add_term(s, c * d);
            }
        }
        out
    }

    /// Removes the zero-frequency coefficient.
    pub fn centered(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&vec![0; self.dim]);
        out
    }

    /// Shifted observable `x ↦ f(x + h)`.
    pub fn shifted(&self, h: &[f64]) -> Self {
        let mut out = Self::zero(self.dim);
        for (n, c) in &self.terms {
            let phase: f64 = n.iter().zip(h).map(|(&k, &x)| k as f64 * x).sum();
            out.add_term(n.clone(), c * Complex64::from_polar(1.0, TAU * phase));
        }
        out
    }

    /// Maps each frequency through `map`; terms sent to `None` are dropped.
    pub fn map_frequencies(&self, map: impl Fn(&[i64]) -> Option<Vec<i64>>) -> Self {
        let mut out = Self::zero(self.dim);
        for (n, c) in &self.terms {
            if let Some(k) = map(n) {
                out.add_term(k, *c);
            }
        }
        out
    }

    /// Fractional phase `n·x mod 1`.
    pub fn phase(n: &[i64], x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (&k, &v) in n.iter().zip(x) {
            s += frac_product(k, v - v.floor());
        }
        s - s.floor()
    }

    /// Real part of `f(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (n, c) in &self.terms {
            let (s, co) = (TAU * Self::phase(n, x)).sin_cos();
            acc += c.re * co - c.im * s;
        }
        acc
    }

    /// Real part of `f` at phases supplied by the caller, one per term in
    /// term order.
    pub fn eval_phases(&self, phases: impl Iterator<Item = f64>) -> f64 {
        let mut acc = 0.0;
        for (c, p) in self.terms.values().zip(phases) {
            let (s, co) = (TAU * p).sin_cos();
            acc += c.re * co - c.im * s;
        }
        acc
    }

    /// Real part of `f` on the lattice `{j / N}^m`, in row-major order.
    pub fn eval_lattice(&self, res: usize) -> Vec<f64> {
        let m = self.dim;
        let total = res.pow(m as u32);
        let table: Vec<(f64, f64)> = (0..res).map(|j| (TAU * j as f64 / res as f64).sin_cos()).collect();
        let r = res as i64;
        let terms: Vec<(Vec<i64>, Complex64)> =
            self.terms.iter().map(|(n, c)| (n.iter().map(|v| v.rem_euclid(r)).collect(), *c)).collect();
        let mut out = vec![0.0; total];
        let mut idx = vec![0i64; m];
        for cell in out.iter_mut() {
            let mut acc = 0.0;
            for (n, c) in &terms {
                let mut p = 0i64;
                for (a, b) in n.iter().zip(&idx) {
                    p = (p + a * b) % r;
                }
                let (s, co) = table[p as usize];
                acc += c.re * co - c.im * s;
            }
            *cell = acc;
            for i in (0..m).rev() {
                idx[i] += 1;
                if idx[i] < r {
                    break;
                }
                idx[i] = 0;
            }
        }
        out
    }

    /// `E|f|` by midpoint-free lattice quadrature with `res` points per axis.
    pub fn l1_at(&self, res: usize) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let vals = self.eval_lattice(res);
        vals.iter().map(|v| v.abs()).sum::<f64>() / vals.len() as f64
    }

    /// `E|f|^p` by lattice quadrature.
    pub fn lp_pow_at(&self, p: f64, res: usize) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let vals = self.eval_lattice(res);
        vals.iter().map(|v| v.abs().powf(p)).sum::<f64>() / vals.len() as f64
    }

    /// Sup of `|f|` over the quadrature lattice.
    pub fn sup_at(&self, res: usize) -> f64 {
        self.eval_lattice(res).iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Norm estimate with a Richardson-style resolution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// `|value(res) − value(res/2)|`, a proxy for the quadrature error.
    pub resolution_gap: f64,
    pub res: usize,
}

/// Default quadrature resolution per axis for a given torus dimension.
pub fn default_resolution(m: usize) -> usize {
    match m {
        1 => 1 << 12,
        2 => 1 << 10,
        _ => 1 << 6,
    }
}

/// `∥f∥_p` by lattice quadrature, with the resolution raised above the
/// default when the frequencies would alias.
pub fn lp_norm(f: &FourierObservable, p: f64) -> NormEstimate {
    let cap = if f.dim() == 1 { 1 << 20 } else { 1 << 12 };
    let need = (8 * (f.max_freq() as usize + 1)).next_power_of_two();
    let res = default_resolution(f.dim()).max(need).min(cap);
    let fine = f.lp_pow_at(p, res).powf(1.0 / p);
    let coarse = f.lp_pow_at(p, res / 2).powf(1.0 / p);
    NormEstimate { value: fine, resolution_gap: (fine - coarse).abs(), res }
}

/// `∥f∥₁`.
pub fn l1_norm(f: &FourierObservable) -> NormEstimate {
    lp_norm(f, 1.0)
}
