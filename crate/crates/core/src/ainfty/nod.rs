//! The DG category of right A∞-modules, computed through bars.
//!
//! Composition and differential are taken in the category of twisted
//! complexes on the bars and read back from the components landing on the
//! word of length one. Every read-back is re-derived and compared.

use std::collections::BTreeMap;

use super::action::RightAction;
use super::module::{bar_module_right, bar_right_morphism, ModMorphism, RightModule};
use crate::category::DgCategory;
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::twisted::{tw_compose, tw_diff, TwistedMorphism, Window};

/// Right modules over an A∞-algebra in `X`, with morphisms truncated to
/// arity at most `words`.
#[derive(Clone, Debug)]
pub struct Nod<X> {
    pub base: X,
    pub words: usize,
}

impl<X: RightAction> Nod<X> {
    pub fn new(base: X, words: usize) -> Nod<X> {
        Nod { base, words }
    }

    fn window(&self) -> Window {
        Window::words(self.words)
    }

    fn read_back(
        &self,
        bar: &TwistedMorphism<X>,
        source: &RightModule<X>,
        target: &RightModule<X>,
    ) -> Result<ModMorphism<X>> {
        let comps: BTreeMap<usize, X::Morphism> = bar
            .components()
            .iter()
            .filter(|((_, j), _)| *j == 0)
            .map(|((i, _), m)| ((1 - *i) as usize, m.clone()))
            .collect();
        let out = ModMorphism::new(&self.base, source.clone(), target.clone(), bar.degree(), comps)?;
        let again = bar_right_morphism(&self.base, &out, self.words)?;
        if !again.equals(&self.base, &bar.restrict(self.window())) {
            return Err(Error::Inconsistent("bar computation is not the bar of a module morphism".into()));
        }
        Ok(out)
    }
}

impl<X: RightAction> DgCategory for Nod<X> {
    type Object = RightModule<X>;
    type Morphism = ModMorphism<X>;

    fn field(&self) -> Field {
        self.base.field()
    }

    fn degree(&self, f: &ModMorphism<X>) -> i64 {
        f.degree()
    }

    fn zero(&self, source: &RightModule<X>, target: &RightModule<X>, degree: i64) -> ModMorphism<X> {
        ModMorphism::zero(source.clone(), target.clone(), degree)
    }

    fn identity(&self, object: &RightModule<X>) -> ModMorphism<X> {
        let id = self.base.identity(object.object());
        ModMorphism::new(&self.base, object.clone(), object.clone(), 0, BTreeMap::from([(1, id)]))
            .expect("identity has the right shape")
    }

    fn compose(&self, g: &ModMorphism<X>, f: &ModMorphism<X>) -> Result<ModMorphism<X>> {
        let bf = bar_right_morphism(&self.base, f, self.words)?;
        let bg = bar_right_morphism(&self.base, g, self.words)?;
        let c = tw_compose(&self.base, &bg, &bf)?;
        self.read_back(&c, &f.source, &g.target)
    }

    fn add(&self, f: &ModMorphism<X>, g: &ModMorphism<X>) -> Result<ModMorphism<X>> {
        let x = &self.base;
        f.combine(x, g, |a, b| match (a, b) {
            (Some(a), Some(b)) => x.add(a, b).map(Some),
            (Some(a), None) | (None, Some(a)) => Ok(Some(a.clone())),
            (None, None) => Ok(None),
        })
    }

    fn scale(&self, c: &Scalar, f: &ModMorphism<X>) -> ModMorphism<X> {
        f.map_components(&self.base, |_, m| self.base.scale(c, m))
    }

    fn differential(&self, source: &RightModule<X>, target: &RightModule<X>, f: &ModMorphism<X>) -> Result<ModMorphism<X>> {
        let x = &self.base;
        let w = self.window();
        let bs = bar_module_right(x, source).truncate(x, w)?;
        let bt = bar_module_right(x, target).truncate(x, w)?;
        let d = tw_diff(x, &bar_right_morphism(x, f, self.words)?, &bs, &bt, Some(w))?;
        self.read_back(&d, source, target)
    }

    fn is_zero(&self, f: &ModMorphism<X>) -> bool {
        f.is_zero()
    }

    fn support(&self, f: &ModMorphism<X>) -> Vec<i64> {
        f.components().keys().map(|k| *k as i64).collect()
    }
}
