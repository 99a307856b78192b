use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::formal::{bar_alg_morphism_terms, bar_algebra_terms, Factor, Formal};
use super::{eval_formal, word_certificate, Slot};
use crate::category::Ch;
use crate::complex::{tensor_complexes, Complex};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::scalar::Field;
use crate::tensor::tensor_spaces;
use crate::twisted::{check_twisted, tw_diff, Stream, TwistedComplex, TwistedMorphism, TwistedViolation, Window};

/// An A∞-algebra `(A, m_2, m_3, ...)` in complexes; `m_1` is the differential
/// of `A` and `m_k` for `k >= 2` has degree `2 - k`.
#[derive(Debug)]
pub struct AInfAlgebra {
    name: String,
    complex: Complex,
    ops: BTreeMap<usize, GradedMap>,
    powers: Mutex<BTreeMap<usize, Complex>>,
}

impl AInfAlgebra {
    pub fn new(name: impl Into<String>, complex: Complex, ops: BTreeMap<usize, GradedMap>) -> Result<Arc<AInfAlgebra>> {
        let alg = AInfAlgebra { name: name.into(), complex, ops: BTreeMap::new(), powers: Mutex::new(BTreeMap::new()) };
        let mut kept = BTreeMap::new();
        for (k, m) in ops {
            if k < 2 {
                return Err(Error::Invalid(format!("operation m_{k}: arities start at 2")));
            }
            let src = tensor_spaces(&vec![alg.complex.space().clone(); k]);
            if m.source() != &src || m.target() != alg.complex.space() {
                return Err(Error::Shape(format!("m_{k} must map A^⊗{k} to A")));
            }
            if m.degree() != 2 - k as i64 {
                return Err(Error::Degree(format!("m_{k} has degree {}, expected {}", m.degree(), 2 - k as i64)));
            }
            if !m.is_zero() {
                kept.insert(k, m);
            }
        }
        Ok(Arc::new(AInfAlgebra { ops: kept, ..alg }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &GradedSpace {
        self.complex.space()
    }

    pub fn op(&self, k: usize) -> Option<&GradedMap> {
        self.ops.get(&k)
    }

    pub fn ops(&self) -> &BTreeMap<usize, GradedMap> {
        &self.ops
    }

    /// Largest arity with a nonzero operation (at least 2).
    pub fn max_arity(&self) -> usize {
        self.ops.keys().next_back().copied().unwrap_or(2).max(2)
    }

    /// `A^{⊗k}` with the Koszul differential.
    pub fn power(&self, k: usize) -> Result<Complex> {
        if let Some(c) = self.powers.lock().unwrap().get(&k) {
            return Ok(c.clone());
        }
        let factors = vec![&self.complex; k];
        let c = tensor_complexes(self.field(), &factors)?;
        self.powers.lock().unwrap().insert(k, c.clone());
        Ok(c)
    }

    /// Degree range of `A`, used for convolution stability tails.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        Some((self.space().min_degree()?, self.space().max_degree()?))
    }

    /// Evaluates a word whose factors are `A` identities and operations `m_k`.
    pub(crate) fn slot(&self, f: &Factor) -> Option<Slot> {
        let a = self.space().clone();
        match f {
            Factor::Id('A') => Some(Slot::identity(self.field(), a)),
            Factor::Op('m', k) => self.op(*k).map(|m| Slot::new(m.clone(), vec![a.clone(); *k], vec![a])),
            _ => None,
        }
    }
}

/// Word length `ℓ` sits at index `1 - ℓ`.
pub fn word_length(index: i64) -> usize {
    (1 - index) as usize
}

/// The bar construction of an A∞-algebra: `A^{⊗ℓ}` at index `1 - ℓ`.
pub fn bar_algebra(alg: &Arc<AInfAlgebra>) -> TwistedComplex<Ch> {
    let field = alg.field();
    let (a1, a2, a3) = (Arc::clone(alg), Arc::clone(alg), alg.degree_range());
    let reach_arity = alg.max_arity() as i64;
    let stream = Stream::new(
        format!("bar({})", alg.name),
        move |i| if i <= 0 { a1.power(word_length(i)).ok() } else { None },
        move |i, j| {
            let (ls, lt) = (word_length(i), word_length(j));
            if lt == 0 || ls <= lt {
                return None;
            }
            let terms = bar_algebra_terms(lt, ls - lt);
            eval_formal(field, &terms, &|f| a2.slot(f)).ok().flatten()
        },
        move |i| if i < 0 { Some((i + 1, (i + reach_arity - 1).min(0))) } else { None },
        word_certificate(a3, a3),
    );
    TwistedComplex::streamed(stream)
}

/// Checks the A∞ relations for all words of length at most `n`.
pub fn is_ainfty_algebra(alg: &Arc<AInfAlgebra>, n: usize) -> Result<(usize, Option<TwistedViolation<GradedMap>>)> {
    check_twisted(&Ch::new(alg.field()), &bar_algebra(alg), Window::words(n))
}

/// An A∞-morphism `f_k: A^{⊗k} -> B` of degree `1 - k`.
#[derive(Clone, Debug)]
pub struct AInfMorphism {
    pub source: Arc<AInfAlgebra>,
    pub target: Arc<AInfAlgebra>,
    comps: BTreeMap<usize, GradedMap>,
}

impl AInfMorphism {
    pub fn new(source: Arc<AInfAlgebra>, target: Arc<AInfAlgebra>, comps: BTreeMap<usize, GradedMap>) -> Result<AInfMorphism> {
        let mut kept = BTreeMap::new();
        for (k, f) in comps {
            if k == 0 {
                return Err(Error::Invalid("morphism components start at arity 1".into()));
            }
            if f.source() != &tensor_spaces(&vec![source.space().clone(); k]) || f.target() != target.space() {
                return Err(Error::Shape(format!("f_{k} must map A^⊗{k} to B")));
            }
            if f.degree() != 1 - k as i64 {
                return Err(Error::Degree(format!("f_{k} has degree {}, expected {}", f.degree(), 1 - k as i64)));
            }
            if !f.is_zero() {
                kept.insert(k, f);
            }
        }
        Ok(AInfMorphism { source, target, comps: kept })
    }

    pub fn component(&self, k: usize) -> Option<&GradedMap> {
        self.comps.get(&k)
    }

    pub fn components(&self) -> &BTreeMap<usize, GradedMap> {
        &self.comps
    }
}

/// The bar of an A∞-morphism on words of length at most `n`.
pub fn bar_alg_morphism(f: &AInfMorphism, n: usize) -> Result<TwistedMorphism<Ch>> {
    let field = f.source.field();
    let (a, b) = (f.source.space().clone(), f.target.space().clone());
    let slot = |x: &Factor| match x {
        Factor::Op('f', k) => f.component(*k).map(|m| Slot::new(m.clone(), vec![a.clone(); *k], vec![b.clone()])),
        _ => None,
    };
    let mut comps = BTreeMap::new();
    for ls in 1..=n {
        for lt in 1..=ls {
            let terms: Formal = bar_alg_morphism_terms(lt, ls - lt);
            if let Some(m) = eval_formal(field, &terms, &slot)? {
                comps.insert((1 - ls as i64, 1 - lt as i64), m);
            }
        }
    }
    TwistedMorphism::new(&Ch::new(field), 0, comps)
}

/// First component `(i, j)` (shortest source word) where the bar of `f`
/// fails to be closed.
pub fn is_alg_morphism(f: &AInfMorphism, n: usize) -> Result<Option<(i64, i64, GradedMap)>> {
    let cat = Ch::new(f.source.field());
    let w = Window::words(n);
    let ba = bar_algebra(&f.source).truncate(&cat, w)?;
    let bb = bar_algebra(&f.target).truncate(&cat, w)?;
    let d = tw_diff(&cat, &bar_alg_morphism(f, n)?, &ba, &bb, Some(w))?;
    Ok(shortest_word(&d))
}

/// The nonzero component of `d` with the shortest source word.
pub(crate) fn shortest_word(d: &TwistedMorphism<Ch>) -> Option<(i64, i64, GradedMap)> {
    let mut first: Option<(i64, i64, GradedMap)> = None;
    for ((i, j), m) in d.components() {
        if !m.is_zero() && first.as_ref().is_none_or(|(fi, fj, _)| (-*i, *j) < (-*fi, *fj)) {
            first = Some((*i, *j, m.clone()));
        }
    }
    first
}
