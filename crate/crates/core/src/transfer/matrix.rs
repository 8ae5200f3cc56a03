//! Small square integer matrices: exact determinants, adjugates, Hermite
//! normal form and coset representatives of `Z^m / A Z^m`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Row-major `m × m` integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    m: usize,
    a: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = crate::error::Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        (0..m.m).map(|i| m.row(i).to_vec()).collect()
    }
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return domain("matrix must be square and nonempty");
        }
        Ok(IntMatrix { m, a: rows.concat() })
    }

    pub fn scalar(m: usize, s: i64) -> Self {
        let mut a = vec![0; m * m];
        for i in 0..m {
            a[i * m + i] = s;
        }
        IntMatrix { m, a }
    }

    pub fn identity(m: usize) -> Self {
        Self::scalar(m, 1)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.a[i * self.m..(i + 1) * self.m]
    }

    pub fn entries(&self) -> &[i64] {
        &self.a
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        let mut a = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                a[j * m + i] = self.a[i * m + j];
            }
        }
        IntMatrix { m, a }
    }

    /// Product, `None` on overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let m = self.m;
        let mut a = vec![0i64; m * m];
        for i in 0..m {
            for j in 0..m {
                let mut acc: i64 = 0;
                for k in 0..m {
                    acc = acc.checked_add(self.get(i, k).checked_mul(other.get(k, j))?)?;
                }
                a[i * m + j] = acc;
            }
        }
        Some(IntMatrix { m, a })
    }

    pub fn checked_pow(&self, k: u32) -> Option<Self> {
        let mut out = Self::identity(self.m);
        for _ in 0..k {
            out = out.checked_mul(self)?;
        }
        Some(out)
    }

    /// `A v`, `None` on overflow.
    pub fn checked_apply(&self, v: &[i64]) -> Option<Vec<i64>> {
        (0..self.m)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .try_fold(0i64, |acc, (&a, &x)| acc.checked_add(a.checked_mul(x)?))
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        match (self.checked_mul(other), other.checked_mul(self)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Exact determinant (fraction-free Bareiss elimination).
    pub fn det(&self) -> i128 {
        let m = self.m;
        let mut w: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..m {
            if w[k * m + k] == 0 {
                match (k + 1..m).find(|&r| w[r * m + k] != 0) {
                    Some(r) => {
                        for c in 0..m {
                            w.swap(k * m + c, r * m + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    w[i * m + j] = (w[i * m + j] * w[k * m + k] - w[i * m + k] * w[k * m + j]) / prev;
                }
            }
            prev = w[k * m + k];
        }
        sign * w[m * m - 1]
    }

    /// Adjugate, so that `adj(A) A = det(A) I`.
    pub fn adjugate(&self) -> Vec<i128> {
        let m = self.m;
        if m == 1 {
            return vec![1];
        }
        let mut out = vec![0i128; m * m];
        for i in 0..m {
            for j in 0..m {
                let rows: Vec<Vec<i64>> = (0..m)
                    .filter(|&r| r != j)
                    .map(|r| (0..m).filter(|&c| c != i).map(|c| self.get(r, c)).collect())
                    .collect();
                let minor = IntMatrix { m: m - 1, a: rows.concat() }.det();
                out[i * m + j] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        out
    }

    /// Lower-triangular column Hermite form `H = A U` with `U` unimodular and
    /// positive diagonal. The columns of `H` span the same lattice `A Z^m`.
    pub fn hermite_lower(&self) -> Result<Vec<i128>> {
        let m = self.m;
        let mut h: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        for i in 0..m {
            // clear row i to the right of the diagonal with column gcd steps
            for j in i + 1..m {
                while h[i * m + j] != 0 {
                    let q = h[i * m + i].div_euclid(h[i * m + j]);
                    for r in 0..m {
                        h[r * m + i] -= q * h[r * m + j];
                    }
                    for r in 0..m {
                        h.swap(r * m + i, r * m + j);
                    }
                }
            }
            if h[i * m + i] == 0 {
                return domain("singular matrix has no coset representatives");
            }
            if h[i * m + i] < 0 {
                for r in 0..m {
                    h[r * m + i] = -h[r * m + i];
                }
            }
        }
        Ok(h)
    }

    /// Whether `v ∈ A Z^m`.
    pub fn in_lattice(&self, v: &[i64]) -> bool {
        let det = self.det();
        if det == 0 {
            return false;
        }
        let adj = self.adjugate();
        let m = self.m;
        (0..m).all(|i| {
            let s: i128 = (0..m).map(|j| adj[i * m + j] * v[j] as i128).sum();
            s.rem_euclid(det) == 0
        })
    }

    /// `A^{-1} v` as an exact integer vector when it exists.
    pub fn solve_integral(&self, v: &[i64]) -> Option<Vec<i64>> {
        let det = self.det();
        if det == 0 {
            return None;
        }
        let adj = self.adjugate();
        let m = self.m;
        (0..m)
            .map(|i| {
                let s: i128 = (0..m).map(|j| adj[i * m + j] * v[j] as i128).sum();
                if s % det == 0 {
                    i64::try_from(s / det).ok()
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Coset representatives of `Z^m / A Z^m` from the Hermite form: the box
/// `Π [0, H_ii)`.
pub fn coset_representatives(a: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let m = a.dim();
    let h = a.hermite_lower()?;
    let diag: Vec<i64> = (0..m).map(|i| h[i * m + i] as i64).collect();
    let count: i64 = diag.iter().product();
    let mut reps = Vec::with_capacity(count as usize);
    let mut cur = vec![0i64; m];
    loop {
        reps.push(cur.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(reps);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < diag[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Brute-force representatives: scan the box `[0, |det A|)^m` and keep each
/// point not congruent to an earlier keeper. Exponential in `m`; meant as an
/// oracle for small determinants.
pub fn coset_representatives_bruteforce(a: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let det = a.det();
    if det == 0 {
        return domain("singular matrix has no coset representatives");
    }
    let side = det.unsigned_abs() as i64;
    let m = a.dim();
    let mut keep: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; m];
    'scan: loop {
        let fresh = keep.iter().all(|k| {
            let diff: Vec<i64> = cur.iter().zip(k).map(|(x, y)| x - y).collect();
            !a.in_lattice(&diff)
        });
        if fresh {
            keep.push(cur.clone());
            if keep.len() as i64 == side {
                break 'scan;
            }
        }
        let mut i = m;
        loop {
            if i == 0 {
                break 'scan;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < side {
                break;
            }
            cur[i] = 0;
        }
    }
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_and_adjugate() {
        let a = mat(&[&[2, 1, 0], &[0, 3, 1], &[1, 0, 4]]);
        assert_eq!(a.det(), 2 * 12 - 1 * (0 - 1));
        let adj = a.adjugate();
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| adj[i * 3 + k] * a.get(k, j) as i128).sum();
                assert_eq!(s, if i == j { a.det() } else { 0 });
            }
        }
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).det(), -1);
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).det(), 0);
    }

    #[test]
    fn small_representative_sets() {
        assert_eq!(coset_representatives(&mat(&[&[2]])).unwrap(), vec![vec![0], vec![1]]);
        let r = coset_representatives(&IntMatrix::scalar(2, 2)).unwrap();
        assert_eq!(r, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let a = mat(&[&[2, 1], &[0, 3]]);
        let r = coset_representatives(&a).unwrap();
        assert_eq!(r.len(), 6);
        // independent oracle: search for z with A z = γ - γ'
        for (x, g) in r.iter().enumerate() {
            for h in &r[x + 1..] {
                let d = [g[0] - h[0], g[1] - h[1]];
                for z0 in -10i64..=10 {
                    for z1 in -10i64..=10 {
                        assert!(!(2 * z0 + z1 == d[0] && 3 * z1 == d[1]));
                    }
                }
            }
        }
    }

    #[test]
    fn singular_is_rejected() {
        assert!(coset_representatives(&mat(&[&[1, 2], &[2, 4]])).is_err());
        assert!(coset_representatives_bruteforce(&mat(&[&[0]])).is_err());
    }

    #[test]
    fn negative_and_nontriangular_matrices() {
        for a in [mat(&[&[1, 1], &[-1, 1]]), mat(&[&[-3]]), mat(&[&[0, 2], &[3, 1]]), mat(&[&[3, 1], &[1, 3]])] {
            let r = coset_representatives(&a).unwrap();
            let b = coset_representatives_bruteforce(&a).unwrap();
            assert_eq!(r.len() as i128, a.det().abs());
            assert_eq!(b.len(), r.len());
        }
    }

    #[test]
    fn solve_integral_roundtrip() {
        let a = mat(&[&[2, 1], &[0, 3]]);
        assert_eq!(a.solve_integral(&[5, 9]), Some(vec![1, 3]));
        assert_eq!(a.solve_integral(&[1, 0]), None);
    }
}
