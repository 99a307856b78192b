//! A∞-algebras, modules and morphisms through their bar constructions.
//!
//! Every bar construction is a one-sided twisted complex with the word of
//! length `ℓ` at index `1 - ℓ`. Sign rules live in [`formal`] as symbolic sums
//! of tensor words; the numeric bars evaluate those sums.

pub mod action;
pub mod algebra;
pub mod formal;
pub mod module;
pub mod nod;
pub mod phi;

pub use action::RightAction;
pub use algebra::{bar_alg_morphism, bar_algebra, is_ainfty_algebra, is_alg_morphism, word_length, AInfAlgebra, AInfMorphism};
pub use formal::{Factor, Formal, Term};
pub use module::{
    bar_left_morphism, bar_module_left, bar_module_right, bar_right_morphism, is_left_closed, is_left_module, is_right_closed,
    is_right_module, transport,
    LeftModMorphism, LeftModule, ModMorphism, RightModule,
};
pub use nod::Nod;
pub use phi::{bar_of_complex, phi_morphism, phi_morphism_inverse, phi_object, phi_square, phi_square_morphism, SquareMismatch};

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::scalar::Field;
use crate::tensor::{tensor_maps, TensorFactor};
use crate::twisted::{DegreeHull, StreamCertificate};

/// A map together with the flat factor lists of its source and target.
#[derive(Clone, Debug)]
pub(crate) struct Slot {
    pub map: GradedMap,
    pub source: Vec<GradedSpace>,
    pub target: Vec<GradedSpace>,
}

impl Slot {
    pub fn new(map: GradedMap, source: Vec<GradedSpace>, target: Vec<GradedSpace>) -> Slot {
        Slot { map, source, target }
    }

    pub fn identity(field: Field, space: GradedSpace) -> Slot {
        Slot { map: GradedMap::identity(field, &space), source: vec![space.clone()], target: vec![space] }
    }
}

/// Evaluates a formal sum in complexes. Identities must resolve; words with
/// an absent operation are zero. Returns `None` for a zero sum.
pub(crate) fn eval_formal(
    field: Field,
    formal: &Formal,
    slot: &dyn Fn(&Factor) -> Option<Slot>,
) -> Result<Option<GradedMap>> {
    let mut total: Option<GradedMap> = None;
    'terms: for t in &formal.terms {
        let mut slots = Vec::with_capacity(t.factors.len());
        for f in &t.factors {
            match slot(f) {
                Some(s) => slots.push(s),
                None if matches!(f, Factor::Id(_)) => {
                    return Err(Error::Invalid(format!("no object named {f} in this context")));
                }
                None => continue 'terms,
            }
        }
        let parts: Vec<TensorFactor<'_>> =
            slots.iter().map(|s| TensorFactor::new(&s.map, s.source.clone(), s.target.clone())).collect();
        let term = tensor_maps(field, &parts)?.scale(&field.int(t.coeff));
        total = Some(match total {
            Some(acc) => acc.add(&term)?,
            None => term,
        });
    }
    Ok(total.filter(|m| !m.is_zero()))
}

/// Certificate of a bar stream whose object at index `-w` is `C ⊗ A^{⊗w}`
/// (`C = A` for algebras). Without a known `C` the tails are unknown.
pub(crate) fn word_certificate(first: Option<(i64, i64)>, alg: Option<(i64, i64)>) -> StreamCertificate {
    let tail = move |w0: i64, w1: Option<i64>| -> DegreeHull {
        let Some((c_lo, c_hi)) = first else { return DegreeHull::Empty };
        let (s, t, w1) = match alg {
            Some((a_lo, a_hi)) => (a_lo - 1, a_hi - 1, w1),
            None => (0, 0, Some(0)),
        };
        if w1.is_some_and(|w1| w1 < w0) {
            return DegreeHull::Empty;
        }
        let lo = if s >= 0 { Some(c_lo + w0 * s) } else { w1.map(|w| c_lo + w * s) };
        let hi = if t <= 0 { Some(c_hi + w0 * t) } else { w1.map(|w| c_hi + w * t) };
        DegreeHull::Range { lo, hi }
    };
    StreamCertificate {
        lower: None,
        upper: Some(0),
        one_sided: true,
        below: Some(Box::new(move |lo| tail((1 - lo).max(0), None))),
        above: Some(Box::new(move |hi| if hi >= 0 { DegreeHull::Empty } else { tail(0, Some(-hi - 1)) })),
    }
}
