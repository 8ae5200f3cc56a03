//! Orthomartingale plus coboundary decompositions.
//!
//! For a completely commuting pair on the torus, with
//! `D_i^j = K_i^j − U_i K_i^{j+1}`,
//!
//! ```text
//! m_N  = Σ_{i,j<N} D_1^i D_2^j f
//! g1_N = Σ_{i,j<N} K_1^{i+1} D_2^j f
//! g2_N = Σ_{i,j<N} K_2^{j+1} D_1^i f
//! g3_N = Σ_{i,j<N} K_1^{i+1} K_2^{j+1} f
//! h_N  = K_1^N f + K_2^N f − K_1^N K_2^N f
//! ```
//!
//! and `f = m_N − (I−U_1)g1_N − (I−U_2)g2_N + (I−U_1)(I−U_2)g3_N + h_N`.

use serde::{Deserialize, Serialize};

use crate::coupling::estimate_tau_linear;
use crate::error::{capability, domain, Result};
use crate::field::{LinearFieldSpec, TorusFieldSpec, TorusModel};
use crate::rng::{json_hash, par_replicates};
use crate::transfer::{FourierObservable, TorusMap, TorusObservable};

pub const MAX_ORDER: usize = 16;
pub const REASSEMBLY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Orientation {
    Reverse,
    Adapted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseDecomposition {
    #[serde(rename = "N")]
    pub n: usize,
    pub orientation: Orientation,
    pub f: FourierObservable,
    pub m: FourierObservable,
    pub g1: FourierObservable,
    pub g2: FourierObservable,
    pub g3: FourierObservable,
    pub h: FourierObservable,
    /// `Σ|coefficients|` of `f` minus the reassembled pieces.
    pub reassembly_deviation: f64,
    #[serde(skip)]
    maps: Option<[TorusMap; 2]>,
}

fn ops(maps: &[TorusMap; 2]) -> (impl Fn(usize, &FourierObservable) -> FourierObservable + '_, impl Fn(usize, &FourierObservable) -> FourierObservable + '_) {
    let u = move |i: usize, g: &FourierObservable| maps[i].koopman(g);
    let k = move |i: usize, g: &FourierObservable| maps[i].perron(g);
    (u, k)
}

/// `Σ_{j<N} D_i^j g`.
fn sum_differences(maps: &[TorusMap; 2], i: usize, g: &FourierObservable, n: usize) -> FourierObservable {
    let (u, k) = ops(maps);
    let mut out = FourierObservable::zero(g.dim());
    let mut kj = g.clone();
    for _ in 0..n {
        let next = k(i, &kj);
        out = out.add(&kj).sub(&u(i, &next));
        kj = next;
    }
    out
}

/// `Σ_{j<N} K_i^{j+1} g`.
fn sum_k_powers(maps: &[TorusMap; 2], i: usize, g: &FourierObservable, n: usize) -> FourierObservable {
    let (_, k) = ops(maps);
    let mut out = FourierObservable::zero(g.dim());
    let mut kj = g.clone();
    for _ in 0..n {
        kj = k(i, &kj);
        out = out.add(&kj);
    }
    out
}

fn two_maps(spec: &TorusFieldSpec) -> Result<[TorusMap; 2]> {
    if spec.maps.len() != 2 {
        return capability("the decomposition is implemented for d = 2 only");
    }
    let model = TorusModel::new(spec.clone())?;
    let maps = model.maps();
    if !maps[0].completely_commutes_with(&maps[1]) {
        return capability("the decomposition needs completely commuting maps");
    }
    Ok([maps[0].clone(), maps[1].clone()])
}

/// Builds the reverse decomposition of `f` at order `n`.
pub fn build_reverse(spec: &TorusFieldSpec, f: &FourierObservable, n: usize) -> Result<ReverseDecomposition> {
    let maps = two_maps(spec)?;
    if n == 0 || n > MAX_ORDER {
        return domain(format!("order N must lie in 1..={MAX_ORDER}"));
    }
    if f.dim() != maps[0].dim() {
        return domain("observable dimension does not match the maps");
    }
    let (u, k) = ops(&maps);
    let d2f = sum_differences(&maps, 1, f, n);
    let d1f = sum_differences(&maps, 0, f, n);
    let m = sum_differences(&maps, 0, &d2f, n);
    let g1 = sum_k_powers(&maps, 0, &d2f, n);
    let g2 = sum_k_powers(&maps, 1, &d1f, n);
    let g3 = sum_k_powers(&maps, 0, &sum_k_powers(&maps, 1, f, n), n);
    let k1n = (0..n).fold(f.clone(), |g, _| k(0, &g));
    let k2n = (0..n).fold(f.clone(), |g, _| k(1, &g));
    let k12n = (0..n).fold(k1n.clone(), |g, _| k(1, &g));
    let h = k1n.add(&k2n).sub(&k12n);

    let cob = |i: usize, g: &FourierObservable| g.sub(&u(i, g));
    let rebuilt = m.sub(&cob(0, &g1)).sub(&cob(1, &g2)).add(&cob(0, &cob(1, &g3))).add(&h);
    let reassembly_deviation = f.sub(&rebuilt).abs_sum();
    if reassembly_deviation > REASSEMBLY_TOL {
        return domain(format!("reassembly identity fails by {reassembly_deviation:e}"));
    }
    Ok(ReverseDecomposition {
        n,
        orientation: Orientation::Reverse,
        f: f.clone(),
        m,
        g1,
        g2,
        g3,
        h,
        reassembly_deviation,
        maps: Some(maps.clone()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoReport {
    /// Upper bounds on `∥U_i K_i m_N∥_∞` (sum of absolute coefficients).
    pub uk_sup: [f64; 2],
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `U_i K_i m_N = 0` for `i = 1, 2` in the Fourier algebra.
pub fn verify_orthomartingale(dec: &ReverseDecomposition) -> OrthoReport {
    verify_difference(dec, &dec.m)
}

/// The same check for an arbitrary candidate `m` against the maps of `dec`.
pub fn verify_difference(dec: &ReverseDecomposition, m: &FourierObservable) -> OrthoReport {
    let maps = dec.maps.as_ref().expect("decomposition built in this process");
    let (u, k) = ops(maps);
    let uk_sup = [u(0, &k(0, m)).abs_sum(), u(1, &k(1, m)).abs_sum()];
    let tolerance = 1e-12;
    OrthoReport { uk_sup, tolerance, passed: uk_sup.iter().all(|v| *v < tolerance) }
}

/// `max |E(m∘T_i · m∘T_j)|` over `i ≠ j` in `[0, radius]²`.
pub fn orthogonality_defect(dec: &ReverseDecomposition, radius: usize) -> f64 {
    let maps = dec.maps.as_ref().expect("decomposition built in this process");
    let mut shifted = Vec::new();
    let mut row = dec.m.clone();
    for i in 0..=radius {
        let mut g = row.clone();
        for j in 0..=radius {
            shifted.push(((i, j), g.clone()));
            if j < radius {
                g = maps[1].koopman(&g);
            }
        }
        if i < radius {
            row = maps[0].koopman(&row);
        }
    }
    let mut worst = 0.0f64;
    for (a, (ia, ga)) in shifted.iter().enumerate() {
        for (ib, gb) in &shifted[a + 1..] {
            debug_assert_ne!(ia, ib);
            worst = worst.max(ga.expect_product(gb).abs());
        }
    }
    worst
}

/// Monte Carlo `∥S_n(f) − S_n(m_N)∥₂ / √|n|` on shared orbits, with the
/// delta-method stderr.
pub fn l2_gap(spec: &TorusFieldSpec, dec: &ReverseDecomposition, n: &[usize], reps: usize, seed: u64) -> Result<(f64, f64)> {
    if reps < 2 {
        return domain("l2_gap needs at least 2 replicates");
    }
    let diff = dec.f.centered().sub(&dec.m);
    let mut s = spec.clone();
    s.observable = TorusObservable::Fourier(diff);
    s.centering = Some(0.0);
    let model = TorusModel::new(s)?;
    let cells: usize = n.iter().product();
    let tag = format!("l2gap/{}/{}", json_hash(spec), json_hash(&dec.m));
    let sq = par_replicates(reps, seed, &tag, |_, sd| {
        let v = model.sample_values(n, sd);
        v.iter().sum::<f64>().powi(2) / cells as f64
    });
    let mean = sq.iter().sum::<f64>() / reps as f64;
    let var = sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
    let se_mean = (var / reps as f64).sqrt();
    let gap = mean.sqrt();
    let se = if gap > 0.0 { se_mean / (2.0 * gap) } else { 0.0 };
    Ok((gap, se))
}

/// Adapted orientation for linear fields: Monte Carlo estimate of the
/// remainder `∥h_N∥₁ = ∥E_{0,0}(X_{N,N})∥₁` by coupling, with stderr.
pub fn adapted_remainder(spec: &LinearFieldSpec, n: usize, reps: usize, seed: u64) -> Result<(f64, f64)> {
    estimate_tau_linear(spec, n, n, reps, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::IntMatrix;

    fn dt() -> TorusFieldSpec {
        TorusFieldSpec::scalar(&[2, 3], FourierObservable::cos(&[1], 1.0))
    }

    #[test]
    fn zero_observable() {
        let dec = build_reverse(&dt(), &FourierObservable::zero(1), 3).unwrap();
        for p in [&dec.m, &dec.g1, &dec.g2, &dec.g3, &dec.h] {
            assert!(p.is_empty());
        }
    }

    #[test]
    fn odd_cosine_is_already_a_difference() {
        let f = FourierObservable::cos(&[1], 1.0);
        let dec = build_reverse(&dt(), &f, 1).unwrap();
        assert_eq!(dec.m, f);
        assert!(dec.g1.is_empty() && dec.g2.is_empty() && dec.g3.is_empty() && dec.h.is_empty());
    }

    #[test]
    fn remainder_of_cos_4pi_matches_direct_pushforward() {
        let f = FourierObservable::cos(&[2], 1.0);
        let dec = build_reverse(&dt(), &f, 2).unwrap();
        // K_1 halves even frequencies, K_2 divides multiples of 3: K_1² f = 0 (1 is odd),
        // K_2² f = 0, so h_2 = 0
        let push = |g: &FourierObservable, p: i64, times: usize| {
            let mut g = g.clone();
            for _ in 0..times {
                g = g.map_frequencies(|n| if n[0] % p == 0 { Some(vec![n[0] / p]) } else { None });
            }
            g
        };
        let expect = push(&f, 2, 2).add(&push(&f, 3, 2)).sub(&push(&push(&f, 2, 2), 3, 2));
        assert_eq!(dec.h, expect);
        let dec1 = build_reverse(&dt(), &f, 1).unwrap();
        assert_eq!(dec1.h, push(&f, 2, 1));
        assert!(verify_orthomartingale(&dec).passed);
    }

    #[test]
    fn corrupted_difference_is_flagged() {
        let a1 = IntMatrix::from_rows(&[vec![1, 1], vec![-1, 1]]).unwrap();
        let a2 = IntMatrix::scalar(2, 3);
        let f = FourierObservable::cos(&[1, 0], 1.0);
        let spec = TorusFieldSpec::new(vec![a1, a2], TorusObservable::Fourier(f.clone()));
        let dec = build_reverse(&spec, &f, 2).unwrap();
        assert!(verify_orthomartingale(&dec).passed);
        // cos 2πx cos 2πy has frequency (1, 1), which survives K_1
        let bad = dec.m.add(&FourierObservable::cos(&[1, 0], 1.0).mul(&FourierObservable::cos(&[0, 1], 1.0)));
        let rep = verify_difference(&dec, &bad);
        assert!(!rep.passed && rep.uk_sup[0] > 0.1);
    }

    #[test]
    fn constant_has_zero_difference() {
        let dec = build_reverse(&dt(), &FourierObservable::constant(1, 2.0), 4).unwrap();
        assert!(dec.m.is_empty());
        assert!(verify_orthomartingale(&dec).passed);
    }

    #[test]
    fn capability_and_domain_errors() {
        let one = TorusFieldSpec::scalar(&[2], FourierObservable::cos(&[1], 1.0));
        assert!(matches!(build_reverse(&one, &FourierObservable::cos(&[1], 1.0), 1), Err(crate::Error::Capability(_))));
        assert!(build_reverse(&dt(), &FourierObservable::cos(&[1], 1.0), 17).is_err());
    }

    #[test]
    fn increments_are_orthogonal() {
        let mut f = FourierObservable::cos(&[1], 1.0);
        f.add_cos(&[6], 0.5);
        f.add_sin(&[4], 0.25);
        let dec = build_reverse(&dt(), &f, 4).unwrap();
        assert!(orthogonality_defect(&dec, 3) < 1e-14);
    }

    #[test]
    fn gap_is_zero_when_f_is_a_difference() {
        let f = FourierObservable::cos(&[1], 1.0);
        let dec = build_reverse(&dt(), &f, 1).unwrap();
        let (gap, se) = l2_gap(&dt(), &dec, &[8, 8], 20, 1).unwrap();
        assert_eq!((gap, se), (0.0, 0.0));
    }
}
