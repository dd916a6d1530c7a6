use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::gamma;

use super::quad;
use super::rng::StreamRng;
use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// A nonnegative lifetime model. All times are in years.
///
/// The JSON form is internally tagged by `kind`, e.g.
/// `{"kind":"weibull","scale":15,"shape":1.7}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LifetimeDistribution {
    /// `F(t) = 1 - exp(-(t/scale)^shape)`.
    Weibull { scale: f64, shape: f64 },
    /// Lognormal parameterised by its own mean and standard deviation.
    LognormalMoments { mean: f64, sd: f64 },
    /// Degenerate lifetime at a fixed time.
    PointMass { time: f64 },
    /// Minimum of independent constituents.
    ComposedMin {
        constituents: Vec<LifetimeDistribution>,
    },
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

/// Weibull lifetime with the given scale (years) and shape.
pub fn weibull(scale: f64, shape: f64) -> Result<LifetimeDistribution> {
    positive("scale", scale)?;
    positive("shape", shape)?;
    Ok(LifetimeDistribution::Weibull { scale, shape })
}

/// Lognormal lifetime whose mean and standard deviation equal the inputs.
pub fn lognormal_from_moments(mean: f64, sd: f64) -> Result<LifetimeDistribution> {
    positive("mean", mean)?;
    positive("sd", sd)?;
    Ok(LifetimeDistribution::LognormalMoments { mean, sd })
}

pub fn point_mass(time: f64) -> Result<LifetimeDistribution> {
    positive("time", time)?;
    Ok(LifetimeDistribution::PointMass { time })
}

/// Underlying normal parameters `(mu, sigma)` of a lognormal with the given moments.
pub fn lognormal_log_params(mean: f64, sd: f64) -> (f64, f64) {
    let sigma2 = (1.0 + (sd / mean).powi(2)).ln();
    (mean.ln() - 0.5 * sigma2, sigma2.sqrt())
}

/// Weibull scale giving the requested mean at a fixed shape.
pub fn weibull_scale_from_mean(mean: f64, shape: f64) -> Result<f64> {
    positive("mean", mean)?;
    positive("shape", shape)?;
    Ok(mean / gamma(1.0 + 1.0 / shape))
}

fn std_normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name: "t",
            value: t,
            reason: "time must be nonnegative",
        })
    }
}

impl LifetimeDistribution {
    /// Checks parameter domains recursively. Deserialized values bypass the
    /// constructors, so loaders call this.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Weibull { scale, shape } => {
                positive("scale", scale)?;
                positive("shape", shape)
            }
            Self::LognormalMoments { mean, sd } => {
                positive("mean", mean)?;
                positive("sd", sd)
            }
            Self::PointMass { time } => positive("time", time),
            Self::ComposedMin { ref constituents } => {
                if constituents.is_empty() {
                    return Err(Error::Argument(
                        "composed distribution needs at least one constituent".into(),
                    ));
                }
                constituents.iter().try_for_each(Self::validate)
            }
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(1.0 - self.survival_at(t))
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.survival_at(t))
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.pdf_at(t))
    }

    /// `P(T > t)` for `t >= 0`, unchecked.
    pub(crate) fn survival_at(&self, t: f64) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => (-(t / scale).powf(shape)).exp(),
            Self::LognormalMoments { mean, sd } => {
                if t <= 0.0 {
                    return 1.0;
                }
                let (mu, sigma) = lognormal_log_params(mean, sd);
                0.5 * erfc((t.ln() - mu) / (sigma * SQRT_2))
            }
            Self::PointMass { time } => {
                if t < time {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ComposedMin { ref constituents } => {
                constituents.iter().map(|c| c.survival_at(t)).product()
            }
        }
    }

    pub(crate) fn pdf_at(&self, t: f64) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => {
                if t == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    };
                }
                let x = t / scale;
                shape / scale * x.powf(shape - 1.0) * (-x.powf(shape)).exp()
            }
            Self::LognormalMoments { mean, sd } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let (mu, sigma) = lognormal_log_params(mean, sd);
                let z = (t.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (t * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            // The density is a Dirac impulse; it has no finite pointwise value.
            Self::PointMass { .. } => 0.0,
            Self::ComposedMin { ref constituents } => {
                // Product rule over every constituent's survival factor.
                let survivals: Vec<f64> = constituents.iter().map(|c| c.survival_at(t)).collect();
                constituents
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let others: f64 = survivals
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, s)| s)
                            .product();
                        c.pdf_at(t) * others
                    })
                    .sum()
            }
        }
    }

    /// Expected lifetime in years.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => scale * gamma(1.0 + 1.0 / shape),
            Self::LognormalMoments { mean, .. } => mean,
            Self::PointMass { time } => time,
            Self::ComposedMin { ref constituents } => {
                if let [only] = constituents.as_slice() {
                    return only.mean();
                }
                if constituents.iter().all(|c| matches!(c, Self::PointMass { .. })) {
                    return self.point_mass_cap().unwrap_or(0.0);
                }
                self.integrated_survival()
            }
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => {
                let g1 = gamma(1.0 + 1.0 / shape);
                let g2 = gamma(1.0 + 2.0 / shape);
                scale * (g2 - g1 * g1).max(0.0).sqrt()
            }
            Self::LognormalMoments { sd, .. } => sd,
            Self::PointMass { .. } => 0.0,
            Self::ComposedMin { .. } => {
                // E[T^2] = int 2 t S(t) dt
                let m = self.mean();
                let (lo, hi) = self.integration_bounds();
                let second = quad::integrate(
                    |u: f64| {
                        let t = u.exp();
                        2.0 * t * self.survival_at(t) * t
                    },
                    lo.ln(),
                    hi.ln(),
                    128,
                    1e-12 * m * m,
                );
                (second - m * m).max(0.0).sqrt()
            }
        }
    }

    /// `(t_lo, t_hi)` such that `S` is ~1 below `t_lo` and negligible above `t_hi`.
    fn integration_bounds(&self) -> (f64, f64) {
        let characteristic = self.quantile_unchecked(0.5).max(f64::MIN_POSITIVE);
        let lo = characteristic * 1e-12;
        let cap = self.point_mass_cap();
        let mut hi = characteristic;
        while self.survival_at(hi) > 1e-20 && hi < 1e15 {
            hi *= 2.0;
        }
        if let Some(cap) = cap {
            hi = hi.min(cap);
        }
        (lo, hi.max(lo * 2.0))
    }

    fn point_mass_cap(&self) -> Option<f64> {
        match *self {
            Self::PointMass { time } => Some(time),
            Self::ComposedMin { ref constituents } => constituents
                .iter()
                .filter_map(Self::point_mass_cap)
                .reduce(f64::min),
            _ => None,
        }
    }

    fn integrated_survival(&self) -> f64 {
        let (lo, hi) = self.integration_bounds();
        let scale = self.quantile_unchecked(0.5).max(f64::MIN_POSITIVE);
        // Substituting t = e^u spreads heavy lognormal tails over a short range.
        let body = quad::integrate(
            |u: f64| {
                let t = u.exp();
                self.survival_at(t) * t
            },
            lo.ln(),
            hi.ln(),
            128,
            1e-13 * scale,
        );
        lo + body
    }

    /// Inverse CDF for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Argument(format!("quantile level {p} outside (0, 1)")));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => scale * (-(1.0 - p).ln()).powf(1.0 / shape),
            Self::LognormalMoments { mean, sd } => {
                let (mu, sigma) = lognormal_log_params(mean, sd);
                (mu + sigma * std_normal_quantile(p)).exp()
            }
            Self::PointMass { time } => time,
            Self::ComposedMin { ref constituents } => {
                // S(t) = 1 - p; every constituent quantile bounds it from above.
                let mut hi = constituents
                    .iter()
                    .map(|c| c.quantile_unchecked(p))
                    .fold(f64::INFINITY, f64::min);
                let target = 1.0 - p;
                let mut lo = 0.0;
                if self.survival_at(hi) > target {
                    // Only a degenerate nesting reaches here; widen until bracketed.
                    while self.survival_at(hi) > target && hi < 1e300 {
                        hi *= 2.0;
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.survival_at(mid) > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// Inverse-transform draw of a single lifetime from `u` in (0, 1).
    /// `u` is the survival level, so larger `u` gives a shorter lifetime.
    pub(crate) fn lifetime_at_survival(&self, u: f64) -> f64 {
        match *self {
            Self::Weibull { scale, shape } => scale * (-u.ln()).powf(1.0 / shape),
            Self::LognormalMoments { mean, sd } => {
                let (mu, sigma) = lognormal_log_params(mean, sd);
                (mu - sigma * std_normal_quantile(u)).exp()
            }
            Self::PointMass { time } => time,
            Self::ComposedMin { .. } => self.quantile_unchecked(1.0 - u),
        }
    }

    /// Draws one lifetime. Composed distributions draw every constituent
    /// (one uniform each, in order) and return the minimum.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            Self::ComposedMin { ref constituents } => constituents
                .iter()
                .map(|c| c.sample(rng))
                .fold(f64::INFINITY, f64::min),
            _ => self.lifetime_at_survival(rng.next_open01()),
        }
    }

    /// Constituents of a composed distribution; a basic kind is its own sole constituent.
    pub fn constituents(&self) -> &[LifetimeDistribution] {
        match self {
            Self::ComposedMin { constituents } => constituents,
            other => std::slice::from_ref(other),
        }
    }
}
