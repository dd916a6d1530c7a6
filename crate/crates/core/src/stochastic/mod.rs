//! Lifetime distributions and reproducible random streams.

mod distribution;
mod quad;
mod rng;

pub use distribution::{
    lognormal_from_moments, lognormal_log_params, point_mass, weibull, weibull_scale_from_mean,
    LifetimeDistribution,
};
pub use rng::{label_hash, RngStream, StreamRng};
