use super::{tw_compose, tw_diff, tw_identity, TwistedComplex, TwistedMorphism};
use crate::category::DgCategory;
use crate::error::Result;
use crate::scalar::{Field, Scalar};

/// The DG category of bounded twisted complexes over `C`.
#[derive(Clone, Debug)]
pub struct Tw<C> {
    pub base: C,
}

impl<C: DgCategory> Tw<C> {
    pub fn new(base: C) -> Tw<C> {
        Tw { base }
    }
}

impl<C: DgCategory> DgCategory for Tw<C> {
    type Object = TwistedComplex<C>;
    type Morphism = TwistedMorphism<C>;

    fn field(&self) -> Field {
        self.base.field()
    }

    fn degree(&self, f: &TwistedMorphism<C>) -> i64 {
        f.degree()
    }

    fn zero(&self, _source: &TwistedComplex<C>, _target: &TwistedComplex<C>, degree: i64) -> TwistedMorphism<C> {
        TwistedMorphism::zero(degree)
    }

    fn identity(&self, object: &TwistedComplex<C>) -> TwistedMorphism<C> {
        let w = object.support().expect("objects of Tw are bounded");
        tw_identity(&self.base, object, w)
    }

    fn compose(&self, g: &TwistedMorphism<C>, f: &TwistedMorphism<C>) -> Result<TwistedMorphism<C>> {
        tw_compose(&self.base, g, f)
    }

    fn add(&self, f: &TwistedMorphism<C>, g: &TwistedMorphism<C>) -> Result<TwistedMorphism<C>> {
        f.add(&self.base, g)
    }

    fn scale(&self, c: &Scalar, f: &TwistedMorphism<C>) -> TwistedMorphism<C> {
        f.scale(&self.base, c)
    }

    fn differential(
        &self,
        source: &TwistedComplex<C>,
        target: &TwistedComplex<C>,
        f: &TwistedMorphism<C>,
    ) -> Result<TwistedMorphism<C>> {
        tw_diff(&self.base, f, source, target, None)
    }

    fn is_zero(&self, f: &TwistedMorphism<C>) -> bool {
        f.is_zero()
    }

    fn support(&self, f: &TwistedMorphism<C>) -> Vec<i64> {
        let mut s: Vec<i64> = f.components().keys().map(|(i, _)| *i).collect();
        s.dedup();
        s
    }
}
