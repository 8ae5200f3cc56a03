//! Naive oracles and small-instance generators shared by the test targets.
#![allow(dead_code)]

use orthofield::transfer::{FourierObservable, IntMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Row-major multi-index (1-based) of a flat offset.
pub fn unflatten(shape: &[usize], mut off: usize) -> Vec<usize> {
    let mut k = vec![0; shape.len()];
    for j in (0..shape.len()).rev() {
        k[j] = off % shape[j] + 1;
        off /= shape[j];
    }
    k
}

/// `Σ_{1 ⪯ k ⪯ i} X_k` by direct scan.
pub fn brute_prefix(shape: &[usize], values: &[f64], i: &[usize]) -> f64 {
    let mut acc = 0.0;
    for (off, v) in values.iter().enumerate() {
        let k = unflatten(shape, off);
        if k.iter().zip(i).all(|(a, b)| a <= b) {
            acc += v;
        }
    }
    acc
}

/// `Σ_k X_k Π_i clamp(n_i t_i − k_i + 1, 0, 1) / √|n|`.
pub fn brute_w(shape: &[usize], values: &[f64], t: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (off, v) in values.iter().enumerate() {
        let k = unflatten(shape, off);
        let w: f64 = (0..shape.len())
            .map(|j| (shape[j] as f64 * t[j] - k[j] as f64 + 1.0).clamp(0.0, 1.0))
            .product();
        acc += w * v;
    }
    acc / (shape.iter().product::<usize>() as f64).sqrt()
}

/// All multi-indices `1 ⪯ i ⪯ n`.
pub fn indices(shape: &[usize]) -> Vec<Vec<usize>> {
    (0..shape.iter().product::<usize>()).map(|off| unflatten(shape, off)).collect()
}

/// `max_{1 ⪯ i ⪯ n} |S_i|` with every `S_i` recomputed from scratch.
pub fn brute_max_rect(shape: &[usize], values: &[f64]) -> f64 {
    indices(shape).iter().map(|i| brute_prefix(shape, values, i).abs()).fold(0.0, f64::max)
}

/// Small-integer values so float sums are exact in any order.
pub fn integer_grid(r: &mut ChaCha8Rng, shape: &[usize]) -> Vec<f64> {
    (0..shape.iter().product::<usize>()).map(|_| r.random_range(-9i32..=9) as f64).collect()
}

pub fn random_shape(r: &mut ChaCha8Rng) -> Vec<usize> {
    let d = r.random_range(1..=3usize);
    (0..d).map(|_| r.random_range(1..=6usize)).collect()
}

fn det(a: &[Vec<i64>]) -> i128 {
    match a.len() {
        1 => a[0][0] as i128,
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * a[0][c] as i128 * det(&minor)
            })
            .sum(),
    }
}

/// `v ∈ A Z^m` iff `adj(A) v ≡ 0 (mod det A)`.
pub fn in_lattice(a: &[Vec<i64>], v: &[i64]) -> bool {
    let m = a.len();
    let d = det(a);
    (0..m).all(|i| {
        // component i of adj(A) v is det of A with column i replaced by v
        let mut b = a.to_vec();
        for r in 0..m {
            b[r][i] = v[r];
        }
        det(&b) % d == 0
    })
}

pub fn abs_det(a: &[Vec<i64>]) -> u64 {
    det(a).unsigned_abs() as u64
}

/// Random nonsingular integer matrix with `1 < |det| ≤ 30`.
pub fn random_matrix(r: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    loop {
        let m = r.random_range(1..=3usize);
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| r.random_range(-4i64..=4)).collect()).collect();
        let d = abs_det(&a);
        if d > 1 && d <= 30 {
            return a;
        }
    }
}

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows).expect("valid matrix")
}

/// Real trigonometric polynomials used across the identity checks.
pub fn registry() -> Vec<(&'static str, FourierObservable)> {
    let mut mixed = FourierObservable::cos(&[1], 1.0);
    mixed.add_sin(&[3], 0.4);
    mixed.add_cos(&[6], -0.25);
    let mut wide = FourierObservable::sin(&[2], 0.7);
    wide.add_cos(&[5], 0.3);
    wide.add_cos(&[12], 0.2);
    wide.add_sin(&[18], -0.1);
    let mut shifted = FourierObservable::constant(1, 0.5);
    shifted.add_cos(&[4], 1.0);
    vec![
        ("cos1", FourierObservable::cos(&[1], 1.0)),
        ("cos2", FourierObservable::cos(&[2], 1.0)),
        ("sin3", FourierObservable::sin(&[3], 1.0)),
        ("mixed", mixed),
        ("wide", wide),
        ("shifted", shifted),
    ]
}
