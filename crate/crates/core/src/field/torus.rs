//! Fields `X_k = f(A_1^{k_1} ⋯ A_d^{k_d} x) − c` driven by commuting expanding
//! endomorphisms of `T^m`.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dyadic::DyadicPoint;
use crate::error::{capability, domain, Result};
use crate::rng::{rng_from_seed, substream};
use crate::transfer::map::gcd;
use crate::transfer::{FourierObservable, IntMatrix, TorusMap, TorusObservable};

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusFieldSpec {
    pub maps: Vec<IntMatrix>,
    pub observable: TorusObservable,
    /// Subtracted from every value; the mean of the observable when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centering: Option<f64>,
    /// Require pairwise coprime determinants.
    #[serde(default = "yes")]
    pub completely_commuting: bool,
    /// Declared, not verified.
    #[serde(default = "yes")]
    pub ergodic: bool,
}

impl TorusFieldSpec {
    pub fn new(maps: Vec<IntMatrix>, observable: TorusObservable) -> Self {
        TorusFieldSpec { maps, observable, centering: None, completely_commuting: true, ergodic: true }
    }

    /// Scalar maps `x ↦ p_i x` on `T^1` with a Fourier observable.
    pub fn scalar(ps: &[i64], f: FourierObservable) -> Self {
        Self::new(ps.iter().map(|&p| IntMatrix::scalar(1, p)).collect(), TorusObservable::Fourier(f))
    }
}

/// Validated torus field with its maps built.
#[derive(Debug, Clone)]
pub struct TorusModel {
    spec: TorusFieldSpec,
    maps: Vec<TorusMap>,
    centering: f64,
    /// `(n, 2 Re-weights)` for one frequency of each conjugate pair, plus
    /// the constant term.
    half_terms: Vec<(Vec<i64>, f64, f64)>,
    constant: f64,
}

impl TorusModel {
    pub fn new(spec: TorusFieldSpec) -> Result<Self> {
        let d = spec.maps.len();
        if d == 0 || d > 4 {
            return domain("a torus field needs 1 to 4 maps");
        }
        let m = spec.observable.dim();
        if m == 0 || m > 3 {
            return domain("torus dimension must be 1, 2 or 3");
        }
        let mut maps = Vec::with_capacity(d);
        for a in &spec.maps {
            if a.dim() != m {
                return domain("map dimension does not match the observable");
            }
            maps.push(TorusMap::new(a.clone())?);
        }
        for i in 0..d {
            for j in i + 1..d {
                if !spec.maps[i].commutes_with(&spec.maps[j]) {
                    return domain(format!("maps {i} and {j} do not commute"));
                }
                if spec.completely_commuting && gcd(maps[i].det_abs(), maps[j].det_abs()) != 1 {
                    return domain(format!("maps {i} and {j} lack coprime determinants"));
                }
            }
        }
        if let TorusObservable::Fourier(f) = &spec.observable {
            if !f.is_real() {
                return domain("Fourier observable must be real valued");
            }
        }
        let centering = spec.centering.unwrap_or_else(|| spec.observable.mean());
        if !centering.is_finite() {
            return domain("centering must be finite");
        }
        let mut spec = spec;
        spec.centering = Some(centering);
        let (mut half_terms, mut constant) = (Vec::new(), 0.0);
        if let TorusObservable::Fourier(f) = &spec.observable {
            for (n, c) in f.terms() {
                match n.iter().find(|&&k| k != 0) {
                    None => constant += c.re,
                    Some(&k) if k > 0 => half_terms.push((n.clone(), 2.0 * c.re, 2.0 * c.im)),
                    _ => {}
                }
            }
        }
        Ok(TorusModel { spec, maps, centering, half_terms, constant })
    }

    pub fn spec(&self) -> &TorusFieldSpec {
        &self.spec
    }

    pub fn maps(&self) -> &[TorusMap] {
        &self.maps
    }

    pub fn d(&self) -> usize {
        self.maps.len()
    }

    pub fn m(&self) -> usize {
        self.spec.observable.dim()
    }

    pub fn centering(&self) -> f64 {
        self.centering
    }

    pub fn fourier(&self) -> Option<&FourierObservable> {
        self.spec.observable.as_fourier()
    }

    /// `f(x)` at a dyadic point, phases computed exactly.
    pub fn eval(&self, p: &DyadicPoint) -> f64 {
        match &self.spec.observable {
            TorusObservable::Fourier(_) => {
                let mut acc = self.constant;
                for (n, re, im) in &self.half_terms {
                    let (s, c) = (TAU * p.phase(n)).sin_cos();
                    acc += re * c - im * s;
                }
                acc
            }
            TorusObservable::Grid(g) => g.eval(&p.to_f64()),
        }
    }

    /// `A_1^{k_1} ⋯ A_d^{k_d} x`.
    pub fn orbit_point(&self, x: &DyadicPoint, k: &[usize]) -> DyadicPoint {
        let mut p = x.clone();
        for (map, &ki) in self.maps.iter().zip(k) {
            p = p.apply_pow(map.matrix(), ki);
        }
        p
    }

    /// The uniform starting point used for `seed`.
    pub fn start_point(&self, seed: u128) -> DyadicPoint {
        let mut rng = rng_from_seed(substream(seed, 0));
        DyadicPoint::random(&mut rng, self.m())
    }

    /// Centered values on `[1, n]` along the orbit of `x`, row-major.
    pub fn values_from(&self, x: &DyadicPoint, n: &[usize]) -> Vec<f64> {
        let d = self.d();
        let total: usize = n.iter().product();
        let mut out = Vec::with_capacity(total);
        if total == 0 {
            return out;
        }
        let mats: Vec<&IntMatrix> = self.maps.iter().map(|m| m.matrix()).collect();
        let mut k = vec![1usize; d];
        let mut pts: Vec<DyadicPoint> = Vec::with_capacity(d);
        for j in 0..d {
            let base = if j == 0 { x } else { &pts[j - 1] };
            pts.push(base.apply(mats[j]));
        }
        loop {
            out.push(self.eval(&pts[d - 1]) - self.centering);
            let mut level = d;
            while level > 0 && k[level - 1] == n[level - 1] {
                level -= 1;
            }
            if level == 0 {
                break;
            }
            let l = level - 1;
            k[l] += 1;
            pts[l] = pts[l].apply(mats[l]);
            for j in l + 1..d {
                k[j] = 1;
                pts[j] = pts[j - 1].apply(mats[j]);
            }
        }
        out
    }

    pub fn sample_values(&self, n: &[usize], seed: u128) -> Vec<f64> {
        self.values_from(&self.start_point(seed), n)
    }
}

/// Exact `σ² = Σ_k Cov(X_{k⁺}, X_{k⁻})` for a Fourier observable.
///
/// With `P_i = A_iᵀ`, the term for disjoint `a, b` collects `c_n conj(c_{n′})`
/// over `P^a n = P^b n′`. Under complete commutation every such pair has a
/// common integral ancestor `w` with `n = P^b w`, `n′ = P^a w`, and only
/// finitely many ancestors exist because the maps expand.
pub fn exact_sigma2_torus(model: &TorusModel) -> Result<f64> {
    let Some(f) = model.fourier() else {
        return capability("exact variance needs a Fourier observable; use a Monte Carlo estimator");
    };
    let maps = model.maps();
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if !maps[i].completely_commutes_with(&maps[j]) {
                return capability("exact variance needs completely commuting maps");
            }
        }
    }
    let f = f.centered();
    let transposes: Vec<IntMatrix> = maps.iter().map(|m| m.matrix().transpose()).collect();
    let d = maps.len();
    // ancestor w ↦ list of (b, coefficient of P^b w)
    let mut groups: BTreeMap<Vec<i64>, Vec<(Vec<u32>, Complex64)>> = BTreeMap::new();
    for (n, c) in f.terms() {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut stack = vec![(vec![0u32; d], n.clone())];
        seen.insert(vec![0u32; d]);
        while let Some((b, w)) = stack.pop() {
            for (i, pt) in transposes.iter().enumerate() {
                if let Some(w2) = pt.solve_integral(&w) {
                    let mut b2 = b.clone();
                    b2[i] += 1;
                    if seen.insert(b2.clone()) {
                        stack.push((b2, w2));
                    }
                }
            }
            groups.entry(w).or_default().push((b, *c));
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for members in groups.values() {
        for (b, cn) in members {
            for (a, cn2) in members {
                if a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0) {
                    total += cn * cn2.conj();
                }
            }
        }
    }
    Ok(total.re)
}
