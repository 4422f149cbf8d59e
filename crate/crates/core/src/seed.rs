//! Sub-seed derivation.
//!
//! Every random choice in the pipeline draws from a [`ChaCha8Rng`] whose seed
//! is derived from one root seed and a path of labels, e.g.
//! `("forest", object, fold, tree)`. The derived seed is the first eight bytes
//! (little endian) of `SHA-256(root_le || label_1 || 0xff || label_2 || 0xff ...)`.
//! Workers therefore never share a generator, and results do not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One component of a derivation path.
#[derive(Debug, Clone, Copy)]
pub enum Label<'a> {
    Str(&'a str),
    Num(u64),
}

impl<'a> From<&'a str> for Label<'a> {
    fn from(s: &'a str) -> Self {
        Label::Str(s)
    }
}

impl<'a> From<&'a String> for Label<'a> {
    fn from(s: &'a String) -> Self {
        Label::Str(s)
    }
}

impl From<u64> for Label<'_> {
    fn from(n: u64) -> Self {
        Label::Num(n)
    }
}

impl From<usize> for Label<'_> {
    fn from(n: usize) -> Self {
        Label::Num(n as u64)
    }
}

pub fn derive(root: u64, path: &[Label<'_>]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    for label in path {
        match label {
            Label::Str(s) => {
                hasher.update([0u8]);
                hasher.update(s.as_bytes());
            }
            Label::Num(n) => {
                hasher.update([1u8]);
                hasher.update(n.to_le_bytes());
            }
        }
        hasher.update([0xffu8]);
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng(root: u64, path: &[Label<'_>]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(root, path))
}

/// Shorthand for building a label path: `labels!["forest", obj, fold]`.
#[macro_export]
macro_rules! labels {
    ($($x:expr),* $(,)?) => {
        &[$($crate::seed::Label::from($x)),*]
    };
}
