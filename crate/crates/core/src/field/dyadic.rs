//! Torus points with 256-bit dyadic coordinates. Integer matrices act on
//! the numerators modulo `2^256`, so orbits are exact.

use rand::RngCore;

use crate::transfer::IntMatrix;

/// Little-endian limbs of a numerator over `2^256`.
pub type U256 = [u64; 4];

pub const BITS: u32 = 256;

fn add(a: &U256, b: &U256) -> U256 {
    let mut out = [0u64; 4];
    let mut carry = 0u64;
    for i in 0..4 {
        let (s1, c1) = a[i].overflowing_add(b[i]);
        let (s2, c2) = s1.overflowing_add(carry);
        out[i] = s2;
        carry = (c1 as u64) + (c2 as u64);
    }
    out
}

fn neg(a: &U256) -> U256 {
    let inv = [!a[0], !a[1], !a[2], !a[3]];
    add(&inv, &[1, 0, 0, 0])
}

fn mul_small(a: &U256, k: u64) -> U256 {
    let mut out = [0u64; 4];
    let mut carry: u128 = 0;
    for i in 0..4 {
        let p = a[i] as u128 * k as u128 + carry;
        out[i] = p as u64;
        carry = p >> 64;
    }
    out
}

/// `k · a mod 2^256` for signed `k`.
pub fn mul_signed(a: &U256, k: i64) -> U256 {
    let p = mul_small(a, k.unsigned_abs());
    if k < 0 {
        neg(&p)
    } else {
        p
    }
}

/// A point of `T^m`, coordinate `i` equal to `num[i] / 2^256`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    num: Vec<U256>,
}

impl DyadicPoint {
    /// Uniform on the dyadic lattice of mesh `2^{-256}`.
    pub fn random<R: RngCore>(rng: &mut R, m: usize) -> Self {
        let num = (0..m).map(|_| [rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64()]).collect();
        DyadicPoint { num }
    }

    pub fn from_numerators(num: Vec<U256>) -> Self {
        DyadicPoint { num }
    }

    /// Nearest dyadic point below `x` (only the top 64 bits are set).
    pub fn from_f64(x: &[f64]) -> Self {
        let num = x
            .iter()
            .map(|v| {
                let f = v - v.floor();
                let top = (f * 2f64.powi(64)) as u64;
                [0, 0, 0, top]
            })
            .collect();
        DyadicPoint { num }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn numerators(&self) -> &[U256] {
        &self.num
    }

    /// `A x mod 1`.
    pub fn apply(&self, a: &IntMatrix) -> Self {
        let m = self.dim();
        let num = (0..m)
            .map(|i| {
                let mut acc = [0u64; 4];
                for j in 0..m {
                    let k = a.get(i, j);
                    if k != 0 {
                        acc = add(&acc, &mul_signed(&self.num[j], k));
                    }
                }
                acc
            })
            .collect();
        DyadicPoint { num }
    }

    pub fn apply_pow(&self, a: &IntMatrix, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.apply(a))
    }

    /// `n·x mod 1` as a 64-bit fixed-point fraction, computed exactly before
    /// rounding.
    pub fn phase_bits(&self, n: &[i64]) -> u64 {
        let mut acc = [0u64; 4];
        for (x, &k) in self.num.iter().zip(n) {
            if k != 0 {
                acc = add(&acc, &mul_signed(x, k));
            }
        }
        acc[3]
    }

    /// `n·x mod 1` in `[0, 1)`.
    pub fn phase(&self, n: &[i64]) -> f64 {
        self.phase_bits(n) as f64 * 2f64.powi(-64)
    }

    /// Coordinates rounded to `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        self.num.iter().map(|x| x[3] as f64 * 2f64.powi(-64) + x[2] as f64 * 2f64.powi(-128)).map(|v| if v >= 1.0 { 0.0 } else { v }).collect()
    }
}
