//! Innovation laws for linear fields, with log-moment hooks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{domain, Result};
use crate::quad;
use crate::rng::{rng_from_seed, Rng as Chacha};

/// Law of one innovation `ε`. All laws are symmetric about 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnovationLaw {
    /// Uniform on `[-a, a]`.
    Uniform {
        #[serde(default = "one")]
        a: f64,
    },
    Gaussian {
        #[serde(default = "one")]
        sd: f64,
    },
    /// `log(1 + |ε|)` has tail `P(· > t) = (1 + t)^{-alpha}`; random sign.
    LogPareto { alpha: f64 },
    /// `±a` with probability 1/2 each.
    TwoPoint {
        #[serde(default = "one")]
        a: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for InnovationLaw {
    fn default() -> Self {
        InnovationLaw::Uniform { a: 1.0 }
    }
}

/// Value with the Monte Carlo error it carries (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub value: f64,
    pub stderr: f64,
}

impl Moment {
    fn exact(value: f64) -> Self {
        Moment { value, stderr: 0.0 }
    }
}

/// Draws used by one-time Monte Carlo moment estimates.
pub const MOMENT_DRAWS: usize = 1 << 20;
const MOMENT_SEED: u128 = 0x6c61_6d62_6461;

impl InnovationLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InnovationLaw::Uniform { a } | InnovationLaw::TwoPoint { a } => a > 0.0 && a.is_finite(),
            InnovationLaw::Gaussian { sd } => sd > 0.0 && sd.is_finite(),
            InnovationLaw::LogPareto { alpha } => alpha > 0.0 && alpha.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid innovation parameters {self:?}"))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationLaw::Uniform { a } => a * (2.0 * rng.random::<f64>() - 1.0),
            InnovationLaw::Gaussian { sd } => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z
            }
            InnovationLaw::LogPareto { alpha } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let t = u.powf(-1.0 / alpha) - 1.0;
                let mag = t.exp_m1();
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
            InnovationLaw::TwoPoint { a } => {
                if rng.random::<bool>() {
                    a
                } else {
                    -a
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, InnovationLaw::Uniform { .. } | InnovationLaw::TwoPoint { .. })
    }

    /// `∥ε∥_∞` for bounded laws.
    pub fn sup(&self) -> f64 {
        match *self {
            InnovationLaw::Uniform { a } | InnovationLaw::TwoPoint { a } => a,
            _ => f64::INFINITY,
        }
    }

    /// `E g(ε)` by deterministic quadrature (exact for the two-point law).
    /// `g` must be bounded for the heavy-tailed law.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        let sym = |x: f64| 0.5 * (g(x) + g(-x));
        match *self {
            InnovationLaw::Uniform { a } => quad::integrate(sym, 0.0, a, 1e-13, 40).value / a,
            InnovationLaw::Gaussian { sd } => {
                let dens = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                2.0 * quad::integrate(|z| dens(z) * sym(sd * z), 0.0, 40.0, 1e-13, 40).value
            }
            InnovationLaw::LogPareto { alpha } => {
                // u = (1 + t)^{-alpha} is uniform on (0, 1]
                let f = |u: f64| {
                    if u <= 0.0 {
                        return 0.0;
                    }
                    let mag = (u.powf(-1.0 / alpha) - 1.0).exp_m1();
                    if mag.is_finite() {
                        sym(mag)
                    } else {
                        0.5 * (g(f64::MAX) + g(-f64::MAX))
                    }
                };
                quad::integrate(f, 0.0, 1.0, 1e-12, 50).value
            }
            InnovationLaw::TwoPoint { a } => sym(a),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            InnovationLaw::Uniform { a } => a * a / 3.0,
            InnovationLaw::Gaussian { sd } => sd * sd,
            InnovationLaw::TwoPoint { a } => a * a,
            InnovationLaw::LogPareto { .. } => f64::INFINITY,
        }
    }

    /// `E log^p(1 + |ε|)`.
    pub fn log_moment(&self, p: f64) -> f64 {
        match *self {
            InnovationLaw::LogPareto { alpha } => {
                if p >= alpha {
                    f64::INFINITY
                } else {
                    gamma(p + 1.0) * gamma(alpha - p) / gamma(alpha)
                }
            }
            InnovationLaw::TwoPoint { a } => a.ln_1p().powf(p),
            _ => self.expect(|x| x.abs().ln_1p().powf(p)),
        }
    }

    /// `E[(log D)² 1{log D > s}]` with `D = |ε − ε*|` for an independent copy
    /// `ε*`.
    pub fn trunc_log_sq_diff(&self, s: f64) -> Moment {
        let thr = s.exp();
        match *self {
            InnovationLaw::Uniform { a } => {
                // D has density (2a − x) / (2a²) on [0, 2a]
                let hi = 2.0 * a;
                if thr >= hi {
                    return Moment::exact(0.0);
                }
                let lo = thr.max(0.0);
                let f0 = |x: f64| if x == 0.0 { 0.0 } else { x * (x.ln().powi(2) - 2.0 * x.ln() + 2.0) };
                let f1 = |x: f64| if x == 0.0 { 0.0 } else { 0.5 * x * x * (x.ln().powi(2) - x.ln() + 0.5) };
                let value = (2.0 * a * (f0(hi) - f0(lo)) - (f1(hi) - f1(lo))) / (2.0 * a * a);
                Moment::exact(value)
            }
            InnovationLaw::TwoPoint { a } => {
                let l = (2.0 * a).ln();
                Moment::exact(if l > s { 0.5 * l * l } else { 0.0 })
            }
            InnovationLaw::Gaussian { sd } => {
                // D = sd·√2·|Z|
                let scale = sd * std::f64::consts::SQRT_2;
                let zlo = thr / scale;
                if zlo >= 40.0 {
                    return Moment::exact(0.0);
                }
                let dens = |z: f64| 2.0 * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                let g = |z: f64| dens(z) * (scale * z).ln().powi(2);
                let mut acc = 0.0;
                let mut lo = zlo;
                // split at 1 to keep the log singularity at an endpoint
                for hi in [zlo.max(1.0), 40.0] {
                    if hi > lo {
                        acc += quad::integrate(g, lo, hi, 1e-14, 50).value;
                        lo = hi;
                    }
                }
                Moment::exact(acc)
            }
            InnovationLaw::LogPareto { .. } => {
                let mut rng: Chacha = rng_from_seed(MOMENT_SEED ^ s.to_bits() as u128);
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                for _ in 0..MOMENT_DRAWS {
                    let d = (self.sample(&mut rng) - self.sample(&mut rng)).abs();
                    let l = d.ln();
                    let v = if l > s && l.is_finite() { l * l } else { 0.0 };
                    sum += v;
                    sum_sq += v * v;
                }
                let n = MOMENT_DRAWS as f64;
                let mean = sum / n;
                let var = (sum_sq / n - mean * mean).max(0.0);
                Moment { value: mean, stderr: (var / n).sqrt() }
            }
        }
    }
}
