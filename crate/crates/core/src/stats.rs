//! Small statistical helpers shared by the verification routines.

use statrs::distribution::{ContinuousCDF, Normal};

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and `cdf`.
pub fn ks_distance(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS distance to `N(0, var)`.
pub fn ks_normal(xs: &[f64], var: f64) -> f64 {
    let n = Normal::new(0.0, var.sqrt()).expect("positive variance");
    ks_distance(xs, |x| n.cdf(x))
}

/// `1.36 / √reps`, the asymptotic 95% KS critical value.
pub fn ks_critical_95(reps: usize) -> f64 {
    1.36 / (reps as f64).sqrt()
}

/// Empirical quantile (type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn normal_quantile(p: f64, var: f64) -> f64 {
    Normal::new(0.0, var.sqrt()).expect("positive variance").inverse_cdf(p)
}

/// Weighted least-squares slope of `y` on `x` and its standard error, with
/// weights `1 / var_i`. Falls back to ordinary least squares when every
/// variance is zero.
pub fn wls_slope(x: &[f64], y: &[f64], var: &[f64]) -> (f64, f64) {
    let ols = var.iter().all(|v| *v <= 0.0);
    let w: Vec<f64> = var.iter().map(|v| if ols { 1.0 } else { 1.0 / v.max(1e-300) }).collect();
    let sw: f64 = w.iter().sum();
    let xb = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let yb = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(a, b)| a * (b - xb).powi(2)).sum();
    let sxy: f64 = w.iter().zip(x.iter().zip(y)).map(|(a, (b, c))| a * (b - xb) * (c - yb)).sum();
    let slope = sxy / sxx;
    let se = if ols {
        let n = x.len() as f64;
        if n > 2.0 {
            let rss: f64 = x.iter().zip(y).map(|(b, c)| (c - yb - slope * (b - xb)).powi(2)).sum();
            (rss / (n - 2.0) / sxx).sqrt()
        } else {
            0.0
        }
    } else {
        (1.0 / sxx).sqrt()
    };
    (slope, se)
}
