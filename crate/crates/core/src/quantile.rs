//! Quantile profiles `Q`, the inverse `G` of their running integral, and the
//! summability conditions built from `∫ Q∘G`.
//!
//! A profile is stored as knots `(u, q)` on `[0, 1]`. Step profiles (from
//! data) hold `q_i` on `[u_i, u_{i+1})`; linear profiles (from analytic
//! descriptions) interpolate between knots. Every integral below is exact on
//! the stored representation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Step,
    Linear,
}

impl Default for ProfileKind {
    fn default() -> Self {
        ProfileKind::Linear
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    #[serde(default)]
    kind: ProfileKind,
    knots: Vec<[f64; 2]>,
}

/// Right-continuous nonincreasing quantile function of `|f|` with its
/// running integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct QuantileProfile {
    kind: ProfileKind,
    u: Vec<f64>,
    q: Vec<f64>,
    /// cumulative integral at each knot
    cum: Vec<f64>,
    /// ∫ Q² at each knot
    cum_sq: Vec<f64>,
}

impl TryFrom<ProfileDoc> for QuantileProfile {
    type Error = crate::error::Error;
    fn try_from(doc: ProfileDoc) -> Result<Self> {
        QuantileProfile::new(doc.kind, doc.knots.into_iter().map(|[u, q]| (u, q)).collect())
    }
}

impl From<QuantileProfile> for ProfileDoc {
    fn from(p: QuantileProfile) -> Self {
        ProfileDoc { kind: p.kind, knots: p.u.iter().zip(&p.q).map(|(&u, &q)| [u, q]).collect() }
    }
}

impl QuantileProfile {
    /// Builds a profile from knots. The first knot must sit at `u = 0`, the
    /// last at `u = 1`, `u` strictly increasing and `q` nonincreasing, `q ≥ 0`.
    pub fn new(kind: ProfileKind, knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("a quantile profile needs at least two knots");
        }
        let (u, q): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        if u[0] != 0.0 || *u.last().unwrap() != 1.0 {
            return domain("profile knots must span [0, 1]");
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("profile knots must be strictly increasing in u");
        }
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return domain("profile values must be finite and nonnegative");
        }
        if q.windows(2).any(|w| w[1] > w[0]) {
            return domain("profile values must be nonincreasing");
        }
        let mut cum = vec![0.0; u.len()];
        let mut cum_sq = vec![0.0; u.len()];
        for i in 0..u.len() - 1 {
            let h = u[i + 1] - u[i];
            let (a, sq) = piece_integrals(kind, q[i], q[i + 1], h, h);
            cum[i + 1] = cum[i] + a;
            cum_sq[i + 1] = cum_sq[i] + sq;
        }
        Ok(QuantileProfile { kind, u, q, cum, cum_sq })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(ProfileKind::Linear, vec![(0.0, value), (1.0, value)])
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.q.iter().copied())
    }

    fn piece(&self, x: f64) -> usize {
        let i = self.u.partition_point(|&v| v <= x);
        i.saturating_sub(1).min(self.u.len() - 2)
    }

    /// `Q(u)`.
    pub fn q(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return *self.q.last().unwrap();
        }
        let x = x.max(0.0);
        let i = self.piece(x);
        match self.kind {
            ProfileKind::Step => self.q[i],
            ProfileKind::Linear => {
                let t = (x - self.u[i]) / (self.u[i + 1] - self.u[i]);
                self.q[i] + t * (self.q[i + 1] - self.q[i])
            }
        }
    }

    /// `∫_0^x Q`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.piece(x);
        let h = self.u[i + 1] - self.u[i];
        self.cum[i] + piece_integrals(self.kind, self.q[i], self.q[i + 1], h, x - self.u[i]).0
    }

    /// `∫_0^x Q²`.
    pub fn cumulative_sq(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.piece(x);
        let h = self.u[i + 1] - self.u[i];
        self.cum_sq[i] + piece_integrals(self.kind, self.q[i], self.q[i + 1], h, x - self.u[i]).1
    }

    /// `∫_0^1 Q = E|f|`.
    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// `G(y)`: leftmost preimage of `y` under the running integral, clamped
    /// to 1 beyond `cumulative(1)`.
    pub fn g_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y > self.total() {
            return 1.0;
        }
        // first piece whose right end reaches y
        let i = self.cum[1..].partition_point(|&c| c < y);
        let i = i.min(self.u.len() - 2);
        let r = y - self.cum[i];
        let q0 = self.q[i];
        let h = self.u[i + 1] - self.u[i];
        let t = match self.kind {
            ProfileKind::Step => {
                if q0 > 0.0 {
                    r / q0
                } else {
                    0.0
                }
            }
            ProfileKind::Linear => {
                let s = (self.q[i + 1] - q0) / h;
                let disc = (q0 * q0 + 2.0 * s * r).max(0.0);
                let denom = q0 + disc.sqrt();
                if denom > 0.0 {
                    2.0 * r / denom
                } else {
                    0.0
                }
            }
        };
        (self.u[i] + t.clamp(0.0, h)).min(1.0)
    }

    /// `∫_0^y Q∘G(u) du`, evaluated through the change of variables
    /// `∫_0^{G(y)} Q²`.
    pub fn int_qg(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y >= self.total() {
            return *self.cum_sq.last().unwrap();
        }
        self.cumulative_sq(self.g_inverse(y))
    }

    /// `∫_0^y Q∘G(u) du` by direct adaptive quadrature of the composite in
    /// `u`, piece by piece. Independent of [`Self::int_qg`].
    pub fn int_qg_composite(&self, y: f64) -> f64 {
        let y = y.min(self.total());
        if y <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.u.len() - 1 {
            let a = self.cum[i];
            let b = self.cum[i + 1].min(y);
            if b <= a {
                if self.cum[i] >= y {
                    break;
                }
                continue;
            }
            let r = quad::integrate(|v| self.q(self.g_inverse(v)), a, b, 1e-13 * (1.0 + b - a), 50);
            acc += r.value;
        }
        acc
    }
}

/// (∫ Q, ∫ Q²) over `[u_i, u_i + t]` of a piece with end values `q0`, `q1`
/// and width `h`.
fn piece_integrals(kind: ProfileKind, q0: f64, q1: f64, h: f64, t: f64) -> (f64, f64) {
    match kind {
        ProfileKind::Step => (q0 * t, q0 * q0 * t),
        ProfileKind::Linear => {
            let s = if h > 0.0 { (q1 - q0) / h } else { 0.0 };
            let a = q0 * t + 0.5 * s * t * t;
            let sq = q0 * q0 * t + q0 * s * t * t + s * s * t * t * t / 3.0;
            (a, sq)
        }
    }
}

/// Exact generalized inverse of the empirical tail of `|samples|`.
pub fn empirical_quantile(samples: &[f64]) -> Result<QuantileProfile> {
    if samples.is_empty() {
        return domain("empirical quantile of an empty sample");
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return domain("samples must be finite");
    }
    let mut abs: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let n = abs.len() as f64;
    let mut knots = Vec::new();
    let mut j = 0;
    while j < abs.len() {
        let v = abs[j];
        knots.push((j as f64 / n, v));
        while j < abs.len() && abs[j] == v {
            j += 1;
        }
    }
    // Q(1) = 0 for any finite sample
    knots.push((1.0, 0.0));
    QuantileProfile::new(ProfileKind::Step, knots)
}

/// `G(y)` with the clamping contract.
pub fn g_of(profile: &QuantileProfile, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return domain("g_of requires y >= 0");
    }
    Ok(profile.g_inverse(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

/// Numeric summability report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Truncated value at the largest cut-off.
    pub value: f64,
    pub verdict: Verdict,
    pub partial_sums: Vec<f64>,
    /// Cut-offs at which `partial_sums` were taken.
    #[serde(default)]
    pub cutoffs: Vec<f64>,
    /// Equivalent evaluation by a second route, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate_value: Option<f64>,
    /// The literal `∫ Q² (θ⁻¹∘G⁻¹)^d` integral, same order as `value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal_r_form: Option<f64>,
}

/// Classifies a nondecreasing sequence of partial sums taken at doubling
/// cut-offs.
///
/// DIVERGENT when each of the last three doublings grows the sum by more
/// than 1%; FINITE when the geometric extrapolation of the tail is below
/// `1e-6` of the total; INCONCLUSIVE otherwise.
pub fn classify(partial_sums: &[f64]) -> Verdict {
    let n = partial_sums.len();
    let Some(&total) = partial_sums.last() else {
        return Verdict::Inconclusive;
    };
    if !total.is_finite() {
        return Verdict::Divergent;
    }
    if total == 0.0 {
        return Verdict::Finite;
    }
    if n < 3 {
        return Verdict::Inconclusive;
    }
    let window = 3.min(n - 1);
    let growing = (n - window..n).all(|j| {
        let prev = partial_sums[j - 1];
        prev > 0.0 && (partial_sums[j] - prev) / prev > 0.01
    });
    if growing {
        return Verdict::Divergent;
    }
    let last = partial_sums[n - 1] - partial_sums[n - 2];
    let before = partial_sums[n - 2] - partial_sums[n - 3];
    let tail = if last <= 0.0 {
        0.0
    } else if before > 0.0 && last < before {
        let ratio = last / before;
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    if tail < 1e-6 * total {
        Verdict::Finite
    } else {
        Verdict::Inconclusive
    }
}

/// Doubling cut-offs `0, 1, 2, 4, …` ending exactly at `cutoff`.
fn doubling_cutoffs(cutoff: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut c = 1;
    while c < cutoff {
        out.push(c);
        c *= 2;
    }
    if cutoff > 0 {
        out.push(cutoff);
    }
    out
}

fn check_sequence(seq: &[f64], name: &str, cutoff: usize) -> Result<()> {
    if seq.len() <= cutoff {
        return domain(format!("{name} has {} terms, cut-off {cutoff} needs {}", seq.len(), cutoff + 1));
    }
    if seq.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return domain(format!("{name} must be finite and nonnegative"));
    }
    if seq.windows(2).any(|w| w[1] > w[0]) {
        return domain(format!("{name} must be nonincreasing"));
    }
    Ok(())
}

/// `Σ_{i ∈ [0, cutoff]^d} ∫_0^{min_l γ_l(i_l)} Q∘G` for `d = gammas.len()`.
///
/// Tuples are grouped by the value of their minimum: with every γ
/// nonincreasing, the number of tuples whose minimum is at least `v` is a
/// product of prefix lengths.
fn min_box_sum(gammas: &[&[f64]], cutoff: usize, weight: impl Fn(f64) -> f64) -> f64 {
    let mut values: Vec<f64> = gammas.iter().flat_map(|g| g[..=cutoff].iter().copied()).collect();
    values.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    values.dedup();
    let mut acc = 0.0;
    let mut below = 0.0;
    for v in values {
        if v <= 0.0 {
            break;
        }
        let at_least: f64 = gammas
            .iter()
            .map(|g| g[..=cutoff].partition_point(|&x| x >= v) as f64)
            .product();
        acc += weight(v) * (at_least - below);
        below = at_least;
    }
    acc
}

/// Evaluates the multi-index CLT summability condition.
pub fn clt_condition(gammas: &[Vec<f64>], profile: &QuantileProfile, cutoff: usize) -> Result<ConditionReport> {
    if gammas.is_empty() {
        return domain("clt_condition needs at least one coefficient sequence");
    }
    if cutoff < 1 {
        return domain("cut-off must be at least 1");
    }
    for (l, g) in gammas.iter().enumerate() {
        check_sequence(g, &format!("gamma_{}", l + 1), cutoff)?;
    }
    let refs: Vec<&[f64]> = gammas.iter().map(|g| g.as_slice()).collect();
    let cutoffs = doubling_cutoffs(cutoff);
    let partial_sums: Vec<f64> = cutoffs.iter().map(|&c| min_box_sum(&refs, c, |v| profile.int_qg(v))).collect();
    Ok(ConditionReport {
        value: *partial_sums.last().unwrap(),
        verdict: classify(&partial_sums),
        partial_sums,
        cutoffs: cutoffs.iter().map(|&c| c as f64).collect(),
        alternate_value: None,
        literal_r_form: None,
    })
}

/// Generalized inverse of a nonincreasing sequence: `#{k : θ(k) > y}`.
pub fn theta_inverse(theta: &[f64], y: f64) -> usize {
    theta.partition_point(|&t| t > y)
}

/// Evaluates the tightness summability condition as a series and as the
/// equivalent integral against `Q²` weighted through `θ⁻¹∘G⁻¹`.
pub fn tightness_condition(
    theta: &[f64],
    profile: &QuantileProfile,
    d: usize,
    cutoff: usize,
) -> Result<ConditionReport> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    if cutoff < 1 {
        return domain("cut-off must be at least 1");
    }
    check_sequence(theta, "theta", cutoff)?;
    let exponent = (d - 1) as i32;
    let term = |k: usize| ((k + 1) as f64).powi(exponent) * profile.int_qg(theta[k]);
    let cutoffs = doubling_cutoffs(cutoff);
    let mut partial_sums = Vec::with_capacity(cutoffs.len());
    let mut acc = 0.0;
    let mut next = 0;
    for &c in &cutoffs {
        while next <= c {
            acc += term(next);
            next += 1;
        }
        partial_sums.push(acc);
    }

    // Integral form in the quantile variable: on [b_{k+1}, b_k) with
    // b_k = G(θ(k)) the count θ⁻¹(∫_0^x Q) equals k + 1.
    let truncated = &theta[..=cutoff];
    let mut weight_sum = 0.0; // Σ_{j ≤ K} j^{d-1}
    let mut integral = 0.0;
    let mut literal = 0.0;
    for k in 0..=cutoff {
        let upper = profile.g_inverse(truncated[k]);
        let lower = if k < cutoff { profile.g_inverse(truncated[k + 1]) } else { 0.0 };
        let count = (k + 1) as f64;
        weight_sum += count.powi(exponent);
        if upper > lower {
            let mass = profile.cumulative_sq(upper) - profile.cumulative_sq(lower);
            integral += weight_sum * mass;
            literal += count.powi(d as i32) * mass;
        }
    }
    let value = *partial_sums.last().unwrap();
    let rel = (integral - value).abs() / value.abs().max(f64::MIN_POSITIVE);
    debug_assert!(value == 0.0 || rel < 1e-2, "series and integral forms disagree: {value} vs {integral}");
    Ok(ConditionReport {
        value,
        verdict: classify(&partial_sums),
        partial_sums,
        cutoffs: cutoffs.iter().map(|&c| c as f64).collect(),
        alternate_value: Some(integral),
        literal_r_form: Some(literal),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn tri() -> QuantileProfile {
        // Q(u) = 1 - u
        QuantileProfile::new(ProfileKind::Linear, vec![(0.0, 1.0), (1.0, 0.0)]).unwrap()
    }

    #[test]
    fn degenerate_and_point_mass_samples() {
        let p = empirical_quantile(&[0.0, 0.0, 0.0]).unwrap();
        for u in [0.0, 0.3, 0.99, 1.0] {
            assert_eq!(p.q(u), 0.0);
        }
        assert_eq!(p.total(), 0.0);

        let p = empirical_quantile(&[1.0, -1.0, 1.0, 1.0]).unwrap();
        for x in [0.0, 0.25, 0.5, 0.9] {
            assert_eq!(p.q(x), 1.0);
            assert!((p.cumulative(x) - x).abs() < 1e-15);
            assert!((p.g_inverse(x) - x).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_sample_is_a_domain_error() {
        assert!(matches!(empirical_quantile(&[]), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn uniform_sample_recovers_analytic_quantile() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let p = empirical_quantile(&samples).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=2000 {
            let u = i as f64 / 2000.0;
            if u < 1.0 {
                worst = worst.max((p.q(u) - (1.0 - u)).abs());
            }
        }
        assert!(worst < 0.01, "sup deviation {worst}");
    }

    #[test]
    fn g_of_examples() {
        let one = QuantileProfile::constant(1.0).unwrap();
        assert!((g_of(&one, 0.4).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(g_of(&one, 0.0).unwrap(), 0.0);
        assert_eq!(g_of(&one, 3.0).unwrap(), 1.0);
        assert!(g_of(&one, -1.0).is_err());

        // closed form 1 - sqrt(1 - 2y) against bisection on x - x²/2
        let p = tri();
        let y = 0.375;
        let closed = 1.0 - (1.0f64 - 2.0 * y).sqrt();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - mid * mid / 2.0 < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((closed - 0.5).abs() < 1e-15);
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((g_of(&p, y).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn g_is_leftmost_preimage_on_flat_pieces() {
        let p = QuantileProfile::new(ProfileKind::Step, vec![(0.0, 2.0), (0.5, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(p.total(), 1.0);
        assert!((p.g_inverse(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.g_inverse(1.0 + 1e-9), 1.0);
    }

    #[test]
    fn g_inverts_cumulative_where_q_positive() {
        let p = QuantileProfile::new(
            ProfileKind::Linear,
            vec![(0.0, 3.0), (0.2, 2.0), (0.7, 0.5), (0.9, 0.0), (1.0, 0.0)],
        )
        .unwrap();
        for i in 0..900 {
            let x = i as f64 / 1000.0;
            assert!((p.g_inverse(p.cumulative(x)) - x).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn change_of_variables_matches_composite_quadrature() {
        let profiles = [
            tri(),
            QuantileProfile::constant(2.5).unwrap(),
            QuantileProfile::new(ProfileKind::Linear, vec![(0.0, 4.0), (0.1, 1.0), (0.6, 0.3), (1.0, 0.0)]).unwrap(),
            QuantileProfile::new(ProfileKind::Step, vec![(0.0, 3.0), (0.3, 1.0), (0.8, 0.2), (1.0, 0.0)]).unwrap(),
        ];
        for p in &profiles {
            for y in [0.01, 0.1, 0.3, p.total(), 10.0] {
                let a = p.int_qg(y);
                let b = p.int_qg_composite(y);
                assert!((a - b).abs() < 1e-8, "{a} vs {b} at y = {y}");
            }
        }
    }

    #[test]
    fn clt_condition_zero_gammas() {
        let p = tri();
        let r = clt_condition(&[vec![0.0; 9], vec![0.0; 9]], &p, 8).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.verdict, Verdict::Finite);
    }

    #[test]
    fn clt_condition_single_term() {
        // γ(0) = c, γ(k ≥ 1) = 0, Q ≡ M: one term ∫_0^{min(c, M)} Q∘G = M·min(c, M)
        let m = 0.8;
        let p = QuantileProfile::constant(m).unwrap();
        for c in [0.3, 2.0] {
            let mut g = vec![0.0; 6];
            g[0] = c;
            let r = clt_condition(&[g.clone(), g], &p, 5).unwrap();
            let expect = p.int_qg_composite(c.min(p.total()));
            assert!((r.value - expect).abs() < 1e-12);
            assert!((r.value - m * c.min(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn clt_condition_geometric_closed_form() {
        let p = QuantileProfile::constant(1.0).unwrap();
        let c = 40;
        let g: Vec<f64> = (0..=c).map(|k| 0.5f64.powi(k as i32)).collect();
        let r = clt_condition(&[g.clone(), g.clone()], &p, c).unwrap();
        let closed: f64 = (0..=c).map(|m| 0.5f64.powi(m as i32) * (2 * m + 1) as f64).sum();
        let mut brute = 0.0;
        for i in 0..=c {
            for j in 0..=c {
                brute += g[i].min(g[j]);
            }
        }
        assert!((closed - brute).abs() < 1e-12);
        assert!((r.value - closed).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Finite);
    }

    #[test]
    fn clt_condition_rejects_nonmonotone() {
        let p = tri();
        let err = clt_condition(&[vec![0.1, 0.2, 0.0]], &p, 2);
        assert!(matches!(err, Err(crate::Error::Domain(_))));
    }

    #[test]
    fn tightness_examples() {
        let p = QuantileProfile::constant(1.0).unwrap();
        let zero = tightness_condition(&[0.0; 11], &p, 2, 10).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.verdict, Verdict::Finite);

        let c = 1 << 16;
        let theta: Vec<f64> = (0..=c).map(|k| ((k + 1) as f64).powi(-3)).collect();
        let r = tightness_condition(&theta, &p, 2, c).unwrap();
        let target = std::f64::consts::PI.powi(2) / 6.0;
        // tail of Σ (k+1)^{-2} beyond the cut-off is below 1/(c+1)
        assert!(r.value <= target && target - r.value < 1.0 / (c as f64 + 1.0));
        let alt = r.alternate_value.unwrap();
        assert!((alt - r.value).abs() < 1e-2 * r.value);

        let flat = vec![1.0; 1025];
        let tri = tri();
        let r = tightness_condition(&flat, &tri, 2, 1024).unwrap();
        assert_eq!(r.verdict, Verdict::Divergent);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&[1.0, 1.5, 1.75, 1.875, 1.875]), Verdict::Finite);
        assert_eq!(classify(&[1.0, 2.0, 4.0, 8.0]), Verdict::Divergent);
        assert_eq!(classify(&[1.0, 1.001, 1.002, 1.0031]), Verdict::Inconclusive);
    }

    #[test]
    fn profile_json_round_trip() {
        let p = tri();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"knots\":[[0.0,1.0],[1.0,0.0]]"));
        let back: QuantileProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::from_str::<QuantileProfile>("{\"knots\":[[0.0,0.0],[1.0,1.0]]}");
        assert!(bad.is_err());
    }
}
