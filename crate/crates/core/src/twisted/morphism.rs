use std::collections::BTreeMap;
use std::fmt;

use super::Window;
use crate::category::DgCategory;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A degree-`n` morphism of twisted complexes; the component `(i, j)` maps
/// `a_i -> b_j` and has degree `n + i - j`. Zero components are never stored.
pub struct TwistedMorphism<C: DgCategory> {
    degree: i64,
    components: BTreeMap<(i64, i64), C::Morphism>,
}

impl<C: DgCategory> Clone for TwistedMorphism<C> {
    fn clone(&self) -> Self {
        TwistedMorphism { degree: self.degree, components: self.components.clone() }
    }
}

impl<C: DgCategory> fmt::Debug for TwistedMorphism<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedMorphism").field("degree", &self.degree).field("components", &self.components).finish()
    }
}

impl<C: DgCategory> TwistedMorphism<C> {
    pub fn zero(degree: i64) -> TwistedMorphism<C> {
        TwistedMorphism { degree, components: BTreeMap::new() }
    }

    /// Checks component degrees and drops zeros.
    pub fn new(cat: &C, degree: i64, components: BTreeMap<(i64, i64), C::Morphism>) -> Result<TwistedMorphism<C>> {
        let mut kept = BTreeMap::new();
        for ((i, j), f) in components {
            if cat.degree(&f) != degree + i - j {
                return Err(Error::Degree(format!(
                    "component ({i},{j}) of a degree {degree} morphism has degree {}, expected {}",
                    cat.degree(&f),
                    degree + i - j
                )));
            }
            if !cat.is_zero(&f) {
                kept.insert((i, j), f);
            }
        }
        Ok(TwistedMorphism { degree, components: kept })
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<(i64, i64), C::Morphism> {
        &self.components
    }

    pub fn component(&self, i: i64, j: i64) -> Option<&C::Morphism> {
        self.components.get(&(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Adds `f` to the `(i, j)` component.
    pub fn accumulate(&mut self, cat: &C, i: i64, j: i64, f: C::Morphism) -> Result<()> {
        let sum = match self.components.remove(&(i, j)) {
            Some(g) => cat.add(&g, &f)?,
            None => f,
        };
        if !cat.is_zero(&sum) {
            self.components.insert((i, j), sum);
        }
        Ok(())
    }

    pub fn add(&self, cat: &C, other: &TwistedMorphism<C>) -> Result<TwistedMorphism<C>> {
        if self.degree != other.degree {
            return Err(Error::Degree(format!("adding morphisms of degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for ((i, j), f) in &other.components {
            out.accumulate(cat, *i, *j, f.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, cat: &C, c: &Scalar) -> TwistedMorphism<C> {
        if c.is_zero() {
            return TwistedMorphism::zero(self.degree);
        }
        TwistedMorphism {
            degree: self.degree,
            components: self.components.iter().map(|(k, f)| (*k, cat.scale(c, f))).collect(),
        }
    }

    pub fn sub(&self, cat: &C, other: &TwistedMorphism<C>) -> Result<TwistedMorphism<C>> {
        self.add(cat, &other.scale(cat, &cat.field().int(-1)))
    }

    pub fn equals(&self, cat: &C, other: &TwistedMorphism<C>) -> bool {
        self.degree == other.degree && self.sub(cat, other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Components with both indices in `w`.
    pub fn restrict(&self, w: Window) -> TwistedMorphism<C> {
        TwistedMorphism {
            degree: self.degree,
            components: self
                .components
                .iter()
                .filter(|((i, j), _)| w.contains(*i) && w.contains(*j))
                .map(|(k, f)| (*k, f.clone()))
                .collect(),
        }
    }

    /// Applies `op` to every component, keeping indices.
    pub fn map_components(
        &self,
        cat: &C,
        degree: i64,
        mut op: impl FnMut(i64, i64, &C::Morphism) -> Result<C::Morphism>,
    ) -> Result<TwistedMorphism<C>> {
        let mut out = BTreeMap::new();
        for ((i, j), f) in &self.components {
            out.insert((*i, *j), op(*i, *j, f)?);
        }
        TwistedMorphism::new(cat, degree, out)
    }
}
