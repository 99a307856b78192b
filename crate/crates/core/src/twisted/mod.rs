//! Twisted complexes over a DG category, bounded or streamed.
//!
//! A twisted complex is a family of objects `a_i` with morphisms `α_ij` of
//! degree `i - j + 1` satisfying `(-1)^j dα_ij + Σ_k α_kj ∘ α_ik = 0`.

mod complex;
mod convolve;
mod morphism;
mod ops;
mod tw;

pub use complex::{Classification, DegreeHull, Stream, StreamCertificate, TwistedComplex};
pub use convolve::{
    convolve, convolve_in_degrees, convolve_morphism, deconvolve_morphism, stable_degrees, StableDegrees,
};
pub use morphism::TwistedMorphism;
pub use ops::{
    check_twisted, classify, gauge_transform, trivial, tw_compose, tw_diff, tw_identity, tw_inverse_unipotent,
    twisted_endomorphism, TwistedViolation,
};
pub use tw::Tw;

/// A finite index interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Window {
        Window { lo, hi }
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn indices(&self) -> impl DoubleEndedIterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn hull(&self, other: &Window) -> Window {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Window { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Word-length window `[-n + 1, 0]` used for bar constructions.
    pub fn words(n: usize) -> Window {
        Window { lo: 1 - n as i64, hi: 0 }
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
