//! Right tensoring with powers of an algebra inside a DG category.

use std::collections::BTreeMap;

use super::algebra::AInfAlgebra;
use crate::category::{Ch, DgCategory};
use crate::complex::{tensor_complexes, Complex};
use crate::error::Result;
use crate::graded::{GradedMap, GradedSpace};
use crate::tensor::{tensor_maps, TensorFactor};
use crate::twisted::{Tw, TwistedComplex, TwistedMorphism};

/// A DG category with `- ⊗ A^{⊗k}`, where `E ⊗ A^{⊗k}` is the flat product
/// `[E, A, ..., A]`.
pub trait RightAction: DgCategory + Clone + 'static {
    fn act(&self, e: &Self::Object, alg: &AInfAlgebra, k: usize) -> Result<Self::Object>;

    /// `id_E ⊗ g` for a map `g: A^{⊗ks} -> A^{⊗kt}` of complexes.
    fn act_on_identity(&self, e: &Self::Object, alg: &AInfAlgebra, g: &GradedMap, ks: usize, kt: usize)
        -> Result<Self::Morphism>;

    /// `f ⊗ id^{⊗n}` for `f: E ⊗ A^{⊗k} -> F`.
    fn act_on_morphism(
        &self,
        f: &Self::Morphism,
        e: &Self::Object,
        k: usize,
        target: &Self::Object,
        alg: &AInfAlgebra,
        n: usize,
    ) -> Result<Self::Morphism>;

    /// Degree range of an object when it is a plain complex.
    fn degree_range(&self, e: &Self::Object) -> Option<Option<(i64, i64)>>;
}

fn power_spaces(alg: &AInfAlgebra, k: usize) -> Vec<GradedSpace> {
    vec![alg.space().clone(); k]
}

impl RightAction for Ch {
    fn act(&self, e: &Complex, alg: &AInfAlgebra, k: usize) -> Result<Complex> {
        let mut factors = vec![e];
        factors.extend(std::iter::repeat_n(alg.complex(), k));
        tensor_complexes(self.field, &factors)
    }

    fn act_on_identity(&self, e: &Complex, alg: &AInfAlgebra, g: &GradedMap, ks: usize, kt: usize) -> Result<GradedMap> {
        let id = e.identity();
        tensor_maps(
            self.field,
            &[TensorFactor::single(&id), TensorFactor::new(g, power_spaces(alg, ks), power_spaces(alg, kt))],
        )
    }

    fn act_on_morphism(
        &self,
        f: &GradedMap,
        e: &Complex,
        k: usize,
        target: &Complex,
        alg: &AInfAlgebra,
        n: usize,
    ) -> Result<GradedMap> {
        let mut src = vec![e.space().clone()];
        src.extend(power_spaces(alg, k));
        let id = alg.complex().identity();
        let mut parts = vec![TensorFactor::new(f, src, vec![target.space().clone()])];
        parts.extend(std::iter::repeat_n(TensorFactor::single(&id), n));
        tensor_maps(self.field, &parts)
    }

    fn degree_range(&self, e: &Complex) -> Option<Option<(i64, i64)>> {
        Some(e.space().min_degree().zip(e.space().max_degree()))
    }
}

/// `(E_i, α_ij) ⊗ A^{⊗k} = (E_i ⊗ A^{⊗k}, α_ij ⊗ id)`; a map `f ⊗ g` has
/// components `(-1)^{|g| i} f_ij ⊗ g`, which makes convolution monoidal.
impl RightAction for Tw<Ch> {
    fn act(&self, t: &TwistedComplex<Ch>, alg: &AInfAlgebra, k: usize) -> Result<TwistedComplex<Ch>> {
        let w = t.require_support("tensoring a twisted complex")?;
        let base = &self.base;
        let mut objects = BTreeMap::new();
        for i in t.indices(w) {
            objects.insert(i, base.act(&t.object(i).unwrap(), alg, k)?);
        }
        let mut diffs = BTreeMap::new();
        for i in t.indices(w) {
            for (j, a) in t.arrows_from(base, i) {
                let m = base.act_on_morphism(&a, &t.object(i).unwrap(), 0, &t.object(j).unwrap(), alg, k)?;
                diffs.insert((i, j), m);
            }
        }
        TwistedComplex::bounded(base, objects, diffs)
    }

    fn act_on_identity(
        &self,
        t: &TwistedComplex<Ch>,
        alg: &AInfAlgebra,
        g: &GradedMap,
        ks: usize,
        kt: usize,
    ) -> Result<TwistedMorphism<Ch>> {
        let w = t.require_support("tensoring a twisted complex")?;
        let mut comps = BTreeMap::new();
        for i in t.indices(w) {
            let m = self.base.act_on_identity(&t.object(i).unwrap(), alg, g, ks, kt)?;
            comps.insert((i, i), m.signed(g.degree() * i));
        }
        TwistedMorphism::new(&self.base, g.degree(), comps)
    }

    fn act_on_morphism(
        &self,
        f: &TwistedMorphism<Ch>,
        t: &TwistedComplex<Ch>,
        k: usize,
        target: &TwistedComplex<Ch>,
        alg: &AInfAlgebra,
        n: usize,
    ) -> Result<TwistedMorphism<Ch>> {
        let mut comps = BTreeMap::new();
        for ((i, j), m) in f.components() {
            let (Some(e), Some(e2)) = (t.object(*i), target.object(*j)) else {
                return Err(crate::error::Error::Support(format!("component ({i},{j}) leaves the given objects")));
            };
            comps.insert((*i, *j), self.base.act_on_morphism(m, &e, k, &e2, alg, n)?);
        }
        TwistedMorphism::new(&self.base, f.degree(), comps)
    }

    fn degree_range(&self, _t: &TwistedComplex<Ch>) -> Option<Option<(i64, i64)>> {
        None
    }
}
