//! Numerical toolkit for joint source-channel coding over state-dependent
//! memoryless channels with generalized feedback (integrated sensing and
//! communication).
//!
//! The crate computes the capacity-distortion-cost function `C(D_s, B)`, the
//! classical rate-distortion function, the binary closed forms, and simulates
//! the random-coding and symbolwise schemes that achieve them.

pub mod binary;
pub mod error;
pub mod estimators;
pub mod fmt;
pub mod info;
pub mod prob;
pub mod sim;
pub mod tradeoff;

pub use error::{Error, Result};
pub use estimators::{
    comm_estimator, expected_sensing_distortion, posterior, sensing_estimator, CommEstimator,
    PosteriorTable, SensingEstimator,
};
pub use prob::{
    build_binary_isac_channel, marginal_input, validate_channel, Alphabet, ChannelSpec,
    ConditionalDistribution, Distribution, SourceSpec, SpecFile,
};
pub use tradeoff::{ConstraintSet, SolverResult, TradeoffCurve, TradeoffPoint};
