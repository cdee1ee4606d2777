//! Sampling on signed cones, density evaluation and Monte Carlo inequality checks.

pub mod inequality;
pub mod rng;
pub mod spec;
pub mod stats;
pub mod wishart;

pub use rng::RngStream;
pub use spec::{pd_image, DistributionSpec, Draw, Measure, Sampler};
pub use wishart::{bartlett_sample, jacobian_logdet, log_multigamma};
pub use inequality::{verify_inequality, verify_many, Group, Inequality, Preset, Report, Verdict, Walk};
