//! Secrecy rate regions of the two-user multiple-access relay wiretap channel.
//!
//! The crate evaluates decode-forward, noise-forward and compress-forward
//! inner bounds, the degraded outer bound, and the no-relay multiple-access
//! wiretap baseline. It covers both closed-form Gaussian channels
//! ([`gaussian_regions`]) and user-supplied discrete memoryless channels
//! ([`discrete`]). Two independent numeric routes back every bound: exact
//! information measures ([`info`]) for discrete channels and covariance
//! log-determinants ([`gaussian`]) as an oracle for the closed forms.
//!
//! All rates are in bits per channel use.

pub mod discrete;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod gaussian_regions;
pub mod geometry;
pub mod info;

pub use error::{Error, Result};
pub use gaussian::{GaussianScenario, InputStructure};
pub use geometry::{Point, RatePentagon, RateRegion};
pub use info::JointPmf;
