//! The DG-category interface shared by complexes, quivers, twisted complexes
//! and module categories.

use std::fmt::Debug;

use crate::complex::{hom_differential, Complex};
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::scalar::{Field, Scalar};

/// A DG category presented by its objects and homogeneous morphisms.
///
/// Morphisms are assumed to know their own degree. Composition is written
/// `compose(g, f) = g ∘ f`.
pub trait DgCategory: Sync + Send {
    type Object: Clone + Debug + Send + Sync;
    type Morphism: Clone + Debug + Send + Sync;

    fn field(&self) -> Field;
    fn degree(&self, f: &Self::Morphism) -> i64;
    fn zero(&self, source: &Self::Object, target: &Self::Object, degree: i64) -> Self::Morphism;
    fn identity(&self, object: &Self::Object) -> Self::Morphism;
    fn compose(&self, g: &Self::Morphism, f: &Self::Morphism) -> Result<Self::Morphism>;
    fn add(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism>;
    fn scale(&self, c: &Scalar, f: &Self::Morphism) -> Self::Morphism;
    fn differential(&self, source: &Self::Object, target: &Self::Object, f: &Self::Morphism) -> Result<Self::Morphism>;
    fn is_zero(&self, f: &Self::Morphism) -> bool;
    /// Degrees (or other coarse coordinates) where a morphism is nonzero,
    /// used in failure reports.
    fn support(&self, f: &Self::Morphism) -> Vec<i64>;

    fn signed(&self, e: i64, f: &Self::Morphism) -> Self::Morphism {
        if e.rem_euclid(2) == 0 {
            f.clone()
        } else {
            self.scale(&self.field().int(-1), f)
        }
    }

    fn sub(&self, f: &Self::Morphism, g: &Self::Morphism) -> Result<Self::Morphism> {
        self.add(f, &self.scale(&self.field().int(-1), g))
    }

    fn equal(&self, f: &Self::Morphism, g: &Self::Morphism) -> bool {
        self.degree(f) == self.degree(g) && self.sub(f, g).map(|d| self.is_zero(&d)).unwrap_or(false)
    }
}

/// The DG category of complexes over a fixed field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ch {
    pub field: Field,
}

impl Ch {
    pub fn new(field: Field) -> Ch {
        Ch { field }
    }
}

impl DgCategory for Ch {
    type Object = Complex;
    type Morphism = GradedMap;

    fn field(&self) -> Field {
        self.field
    }

    fn degree(&self, f: &GradedMap) -> i64 {
        f.degree()
    }

    fn zero(&self, source: &Complex, target: &Complex, degree: i64) -> GradedMap {
        GradedMap::zero(self.field, source.space().clone(), target.space().clone(), degree)
    }

    fn identity(&self, object: &Complex) -> GradedMap {
        object.identity()
    }

    fn compose(&self, g: &GradedMap, f: &GradedMap) -> Result<GradedMap> {
        g.compose(f)
    }

    fn add(&self, f: &GradedMap, g: &GradedMap) -> Result<GradedMap> {
        f.add(g)
    }

    fn scale(&self, c: &Scalar, f: &GradedMap) -> GradedMap {
        f.scale(c)
    }

    fn differential(&self, source: &Complex, target: &Complex, f: &GradedMap) -> Result<GradedMap> {
        if source.field() != self.field {
            return Err(Error::FieldMismatch(self.field, source.field()));
        }
        hom_differential(source, target, f)
    }

    fn is_zero(&self, f: &GradedMap) -> bool {
        f.is_zero()
    }

    fn support(&self, f: &GradedMap) -> Vec<i64> {
        f.support()
    }

    fn signed(&self, e: i64, f: &GradedMap) -> GradedMap {
        f.signed(e)
    }

    fn equal(&self, f: &GradedMap, g: &GradedMap) -> bool {
        f == g
    }
}
