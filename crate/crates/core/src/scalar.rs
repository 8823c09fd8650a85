//! Floating-point abstraction used throughout the crate.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign};
use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Scalar type for all numeric state: durations, priorities, rewards,
/// network weights and evaluation metrics.
///
/// Implemented for `f32` and `f64`. Everything that has to be exactly
/// reproducible (CSV output, experiment replays) goes through this trait, so
/// an experiment instantiated at a fixed scalar type and seed is
/// bit-reproducible.
pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + SampleUniform
    + FromStr
    + Display
    + Debug
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Draw from the standard normal distribution N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// Convert an `f64` constant (configuration value, literal) into `S`.
pub fn cast<S: Scalar>(value: f64) -> S {
    S::from_f64(value).expect("f64 converts into every Scalar")
}

/// Widen a scalar to `f64` for reporting.
pub fn to_f64<S: Scalar>(value: S) -> f64 {
    value.to_f64().expect("Scalar converts into f64")
}
