//! Operator identities between Koopman and Perron operators, each evaluated
//! in the Fourier representation and pointwise at quadrature points.

use serde::{Deserialize, Serialize};

use super::fourier::FourierObservable;
use super::map::TorusMap;
use crate::error::{domain, Result};

pub const POINTWISE_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityDeviation {
    pub name: String,
    /// `Σ |c_n|` of the coefficient difference, a bound on the sup norm.
    pub fourier: f64,
    /// Max absolute difference over the pointwise probes.
    pub pointwise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identities: Vec<IdentityDeviation>,
    pub max_deviation: f64,
}

impl IdentityReport {
    pub fn get(&self, name: &str) -> Option<&IdentityDeviation> {
        self.identities.iter().find(|d| d.name == name)
    }
}

/// Weyl-sequence points in `[0,1)^m`.
pub fn probe_points(m: usize, count: usize) -> Vec<Vec<f64>> {
    // generalized golden ratios
    let phi: f64 = match m {
        1 => 1.618_033_988_749_895,
        2 => 1.324_717_957_244_746,
        _ => 1.220_744_084_605_759,
    };
    let alpha: Vec<f64> = (1..=m).map(|i| (1.0 / phi.powi(i as i32)).fract()).collect();
    (0..count).map(|j| alpha.iter().map(|a| (0.5 + a * (j + 1) as f64).fract()).collect()).collect()
}

type PointFn<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

fn koopman_pt<'a>(t: &'a TorusMap, f: PointFn<'a>) -> PointFn<'a> {
    Box::new(move |x| f(&t.apply_point(x)))
}

fn perron_pt<'a>(t: &'a TorusMap, f: PointFn<'a>) -> PointFn<'a> {
    Box::new(move |x| t.perron_apply(&*f, x).expect("pointwise Perron average"))
}

fn fourier_pt(f: &FourierObservable) -> PointFn<'_> {
    Box::new(move |x| f.eval(x))
}

fn sup_diff(a: &PointFn<'_>, b: &PointFn<'_>, pts: &[Vec<f64>]) -> f64 {
    pts.iter().map(|x| (a(x) - b(x)).abs()).fold(0.0, f64::max)
}

fn lattice_mean(m: usize, res: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let total = res.pow(m as u32);
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0; m];
    let mut acc = 0.0;
    for _ in 0..total {
        for i in 0..m {
            x[i] = idx[i] as f64 / res as f64;
        }
        acc += f(&x);
        for i in (0..m).rev() {
            idx[i] += 1;
            if idx[i] < res {
                break;
            }
            idx[i] = 0;
        }
    }
    acc / total as f64
}

/// Checks `K_A U_A f = f`, `K_B U_B f = f`, `E(U_A f · g) = E(f · K_A g)`,
/// `U_B K_A f = K_A U_B f`, `K_A^ℓ(U_A^ℓ g · f) = g · K_A^ℓ f` for
/// `ℓ ∈ {1, 2}` and `K_A²(U_A g · U_A² f) = K_A g · f`.
pub fn check_identities(
    a: &TorusMap,
    b: &TorusMap,
    f: &FourierObservable,
    g: &FourierObservable,
) -> Result<IdentityReport> {
    let m = a.dim();
    if b.dim() != m || f.dim() != m || g.dim() != m {
        return domain("maps and observables must share the torus dimension");
    }
    if !a.matrix().commutes_with(b.matrix()) {
        return domain("the two maps must commute");
    }
    let pts = probe_points(m, POINTWISE_POINTS);
    let mut out = Vec::new();

    for (name, t) in [("isometry_a", a), ("isometry_b", b)] {
        let lhs = t.perron(&t.koopman(f));
        let pl = perron_pt(t, koopman_pt(t, fourier_pt(f)));
        let pr = fourier_pt(f);
        out.push(IdentityDeviation {
            name: name.into(),
            fourier: lhs.sub(f).abs_sum(),
            pointwise: sup_diff(&pl, &pr, &pts),
        });
    }

    {
        let uf = a.koopman(f);
        let kg = a.perron(g);
        let lhs = uf.expect_product(g);
        let rhs = f.expect_product(&kg);
        let maxf = uf.max_freq().max(g.max_freq()).max(f.max_freq()) as usize;
        let cap = if m == 1 { 1 << 14 } else { 1 << 8 };
        let res = (4 * (maxf + 1)).next_power_of_two().min(cap);
        let kg_pt = perron_pt(a, fourier_pt(g));
        let pl = lattice_mean(m, res, |x| f.eval(&a.apply_point(x)) * g.eval(x));
        let pr = lattice_mean(m, res, |x| f.eval(x) * kg_pt(x));
        out.push(IdentityDeviation {
            name: "duality".into(),
            fourier: (lhs - rhs).abs(),
            pointwise: (pl - pr).abs(),
        });
    }

    if a.completely_commutes_with(b) {
        let lhs = b.koopman(&a.perron(f));
        let rhs = a.perron(&b.koopman(f));
        let pl = koopman_pt(b, perron_pt(a, fourier_pt(f)));
        let pr = perron_pt(a, koopman_pt(b, fourier_pt(f)));
        out.push(IdentityDeviation {
            name: "commutation".into(),
            fourier: lhs.sub(&rhs).abs_sum(),
            pointwise: sup_diff(&pl, &pr, &pts),
        });
    }

    for ell in 1..=2u32 {
        let power = a.power(ell).ok_or_else(|| crate::Error::Domain("matrix power overflows".into()))??;
        let lhs = a.perron_pow(&a.koopman_pow(g, ell).mul(f), ell);
        let rhs = g.mul(&a.perron_pow(f, ell));
        let gf = |x: &[f64]| g.eval(&power.apply_point(x)) * f.eval(x);
        let pl = perron_pt(&power, Box::new(gf));
        let kf = perron_pt(&power, fourier_pt(f));
        let pr: PointFn<'_> = Box::new(|x| g.eval(x) * kf(x));
        out.push(IdentityDeviation {
            name: format!("conditional_pullout_{ell}"),
            fourier: lhs.sub(&rhs).abs_sum(),
            pointwise: sup_diff(&pl, &pr, &pts),
        });
    }

    {
        // K^{2}(U g · U² f) = K g · f
        let lhs = a.perron_pow(&a.koopman(g).mul(&a.koopman_pow(f, 2)), 2);
        let rhs = a.perron(g).mul(f);
        let sq = a.power(2).ok_or_else(|| crate::Error::Domain("matrix power overflows".into()))??;
        let prod = |x: &[f64]| g.eval(&a.apply_point(x)) * f.eval(&sq.apply_point(x));
        let pl = perron_pt(&sq, Box::new(prod));
        let kg = perron_pt(a, fourier_pt(g));
        let pr: PointFn<'_> = Box::new(|x| kg(x) * f.eval(x));
        out.push(IdentityDeviation {
            name: "conditional_two_powers".into(),
            fourier: lhs.sub(&rhs).abs_sum(),
            pointwise: sup_diff(&pl, &pr, &pts),
        });
    }

    let max_deviation = out.iter().map(|d| d.fourier.max(d.pointwise)).fold(0.0, f64::max);
    Ok(IdentityReport { identities: out, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_tripling_identities() {
        let a = TorusMap::scalar(2).unwrap();
        let b = TorusMap::scalar(3).unwrap();
        let f = FourierObservable::cos(&[1], 1.0);
        let g = FourierObservable::cos(&[2], 1.0);
        let r = check_identities(&a, &b, &f, &g).unwrap();
        assert!(r.max_deviation < 1e-12, "{r:?}");
        assert!(r.get("commutation").is_some());
        // U f = cos 4πx, so E(U f · g) = E(cos² 4πx) = 1/2
        let dual = a.koopman(&f).expect_product(&g);
        assert!((dual - 0.5).abs() < 1e-15);
    }

    #[test]
    fn duality_inner_products() {
        // K g = cos 2πx, so E(f · K g) = E(cos² 2πx) = 1/2
        let a = TorusMap::scalar(2).unwrap();
        let f = FourierObservable::cos(&[1], 1.0);
        let g = FourierObservable::cos(&[2], 1.0);
        let kg = a.perron(&g);
        let rhs = f.expect_product(&kg);
        assert!((rhs - 0.5).abs() < 1e-15);
    }
}
