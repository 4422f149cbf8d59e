//! Behavioral authentication from physical interactions with instrumented
//! household objects.
//!
//! The pipeline runs from raw sensor streams to biometric error rates:
//!
//! 1. [`ingestion`] parses recordings, contact events, runs and co-location.
//! 2. [`segmentation`] cuts one padded window per OPEN/CLOSE pair.
//! 3. [`features`] applies fifteen statistics to every sensor column.
//! 4. [`selection`] keeps the most informative features by mutual information.
//! 5. [`learners`] fits per-object random forests or SVMs.
//! 6. [`fusion`] combines objects by hard voting or stacking.
//! 7. [`evaluation`] reports FRR at fixed FAR under zero-effort and mimicry attacks.
//!
//! [`synth`] generates sessions with known user profiles and imitation
//! attackers for end-to-end checks.

pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod features;
pub mod fusion;
pub mod ingestion;
pub mod learners;
pub mod seed;
pub mod segmentation;
pub mod selection;
pub mod synth;

pub use error::{Error, ErrorKind, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/data.md")]
    pub struct Data;
    #[doc = include_str!("../../../book/src/features.md")]
    pub struct Features;
    #[doc = include_str!("../../../book/src/selection.md")]
    pub struct Selection;
    #[doc = include_str!("../../../book/src/learners.md")]
    pub struct Learners;
    #[doc = include_str!("../../../book/src/fusion.md")]
    pub struct Fusion;
    #[doc = include_str!("../../../book/src/evaluation.md")]
    pub struct Evaluation;
    #[doc = include_str!("../../../book/src/synthetic.md")]
    pub struct Synthetic;
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    pub struct Reproducibility;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
