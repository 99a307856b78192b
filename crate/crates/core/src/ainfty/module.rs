use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::action::RightAction;
use super::algebra::{shortest_word, word_length, AInfAlgebra};
use super::formal::{
    bar_left_morphism_terms, bar_left_terms, bar_right_morphism_terms, bar_right_terms, Factor, Formal, Term,
};
use super::{eval_formal, word_certificate, Slot};
use crate::category::Ch;
use crate::complex::{tensor_complexes, Complex};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::twisted::{check_twisted, tw_diff, Stream, StreamCertificate, TwistedComplex, TwistedMorphism, TwistedViolation, Window};

/// A right A∞-module `(E, p_2, p_3, ...)` in a category with a right action;
/// `p_k: E ⊗ A^{⊗(k-1)} -> E` has degree `2 - k`.
pub struct RightModule<X: RightAction> {
    pub alg: Arc<AInfAlgebra>,
    name: String,
    object: X::Object,
    ops: BTreeMap<usize, X::Morphism>,
    bar: Arc<OnceLock<TwistedComplex<X>>>,
}

impl<X: RightAction> Clone for RightModule<X> {
    fn clone(&self) -> Self {
        RightModule {
            alg: Arc::clone(&self.alg),
            name: self.name.clone(),
            object: self.object.clone(),
            ops: self.ops.clone(),
            bar: Arc::clone(&self.bar),
        }
    }
}

impl<X: RightAction> fmt::Debug for RightModule<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RightModule").field("name", &self.name).field("object", &self.object).field("ops", &self.ops).finish()
    }
}

fn check_arity(k: usize, what: char) -> Result<()> {
    if k == 0 {
        return Err(Error::Invalid(format!("{what}_0 does not exist; arities start at 1")));
    }
    Ok(())
}

impl<X: RightAction> RightModule<X> {
    pub fn new(
        x: &X,
        name: impl Into<String>,
        alg: Arc<AInfAlgebra>,
        object: X::Object,
        ops: BTreeMap<usize, X::Morphism>,
    ) -> Result<RightModule<X>> {
        let mut kept = BTreeMap::new();
        for (k, p) in ops {
            check_arity(k, 'p')?;
            if k == 1 {
                return Err(Error::Invalid("p_1 is the differential of the underlying object".into()));
            }
            if x.degree(&p) != 2 - k as i64 {
                return Err(Error::Degree(format!("p_{k} has degree {}, expected {}", x.degree(&p), 2 - k as i64)));
            }
            x.act_on_morphism(&p, &object, k - 1, &object, &alg, 0)?;
            if !x.is_zero(&p) {
                kept.insert(k, p);
            }
        }
        Ok(RightModule { alg, name: name.into(), object, ops: kept, bar: Arc::new(OnceLock::new()) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object(&self) -> &X::Object {
        &self.object
    }

    pub fn op(&self, k: usize) -> Option<&X::Morphism> {
        self.ops.get(&k)
    }

    pub fn ops(&self) -> &BTreeMap<usize, X::Morphism> {
        &self.ops
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().next_back().copied().unwrap_or(2).max(self.alg.max_arity())
    }
}

fn bar_reach(max_arity: usize) -> impl Fn(i64) -> Option<(i64, i64)> + Send + Sync + 'static {
    let m = max_arity as i64;
    move |i| if i < 0 { Some((i + 1, (i + m - 1).min(0))) } else { None }
}

fn right_bar_component<X: RightAction>(x: &X, m: &RightModule<X>, ls: usize, lt: usize) -> Result<Option<X::Morphism>> {
    let alg = &m.alg;
    let field = alg.field();
    let mut total: Option<X::Morphism> = None;
    for t in bar_right_terms(lt, ls - lt).terms {
        let c = field.int(t.coeff);
        let piece = match t.factors[0] {
            Factor::Id('E') => {
                let rest = Formal { terms: vec![Term { coeff: 1, factors: t.factors[1..].to_vec() }] };
                match eval_formal(field, &rest, &|f| alg.slot(f))? {
                    Some(g) => x.act_on_identity(&m.object, alg, &g, ls - 1, lt - 1)?,
                    None => continue,
                }
            }
            Factor::Op('p', r) => match m.op(r) {
                Some(p) => x.act_on_morphism(p, &m.object, r - 1, &m.object, alg, t.factors.len() - 1)?,
                None => continue,
            },
            _ => unreachable!("right bar words start with E or p"),
        };
        let piece = x.scale(&c, &piece);
        total = Some(match total {
            Some(acc) => x.add(&acc, &piece)?,
            None => piece,
        });
    }
    Ok(total.filter(|t| !x.is_zero(t)))
}

fn certificate(range: Option<Option<(i64, i64)>>, alg: &AInfAlgebra) -> StreamCertificate {
    match range {
        Some(first) => word_certificate(first, alg.degree_range()),
        None => StreamCertificate { lower: None, upper: Some(0), one_sided: true, below: None, above: None },
    }
}

/// The bar construction `E ⊗ A^{⊗w}` at index `-w`. The stream is built once
/// per module and shared by its clones.
pub fn bar_module_right<X: RightAction>(x: &X, m: &RightModule<X>) -> TwistedComplex<X> {
    m.bar
        .get_or_init(|| {
            let (x1, x2) = (x.clone(), x.clone());
            let (m1, m2) = (m.clone_shallow(), m.clone_shallow());
            let stream = Stream::new(
                format!("bar({})", m.name),
                move |i| if i <= 0 { x1.act(&m1.object, &m1.alg, word_length(i) - 1).ok() } else { None },
                move |i, j| {
                    let (ls, lt) = (word_length(i), word_length(j));
                    if lt == 0 || ls <= lt {
                        return None;
                    }
                    right_bar_component(&x2, &m2, ls, lt).ok().flatten()
                },
                bar_reach(m.max_arity()),
                certificate(x.degree_range(&m.object), &m.alg),
            );
            TwistedComplex::streamed(stream)
        })
        .clone()
}

impl<X: RightAction> RightModule<X> {
    /// A copy without the shared bar cache, for use inside the bar itself.
    fn clone_shallow(&self) -> RightModule<X> {
        RightModule {
            alg: Arc::clone(&self.alg),
            name: self.name.clone(),
            object: self.object.clone(),
            ops: self.ops.clone(),
            bar: Arc::new(OnceLock::new()),
        }
    }
}

/// Checks the module relations on words of length at most `n`.
pub fn is_right_module<X: RightAction>(
    x: &X,
    m: &RightModule<X>,
    n: usize,
) -> Result<(usize, Option<TwistedViolation<X::Morphism>>)> {
    check_twisted(x, &bar_module_right(x, m), Window::words(n))
}

/// A degree-`j` morphism of right modules, `f_k: E ⊗ A^{⊗(k-1)} -> F` of
/// degree `j + 1 - k`.
pub struct ModMorphism<X: RightAction> {
    pub source: RightModule<X>,
    pub target: RightModule<X>,
    degree: i64,
    comps: BTreeMap<usize, X::Morphism>,
}

impl<X: RightAction> Clone for ModMorphism<X> {
    fn clone(&self) -> Self {
        ModMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            comps: self.comps.clone(),
        }
    }
}

impl<X: RightAction> fmt::Debug for ModMorphism<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModMorphism")
            .field("source", &self.source.name)
            .field("target", &self.target.name)
            .field("degree", &self.degree)
            .field("comps", &self.comps)
            .finish()
    }
}

impl<X: RightAction> ModMorphism<X> {
    pub fn new(
        x: &X,
        source: RightModule<X>,
        target: RightModule<X>,
        degree: i64,
        comps: BTreeMap<usize, X::Morphism>,
    ) -> Result<ModMorphism<X>> {
        let mut kept = BTreeMap::new();
        for (k, f) in comps {
            check_arity(k, 'f')?;
            let want = degree + 1 - k as i64;
            if x.degree(&f) != want {
                return Err(Error::Degree(format!("f_{k} has degree {}, expected {want}", x.degree(&f))));
            }
            x.act_on_morphism(&f, &source.object, k - 1, &target.object, &source.alg, 0)?;
            if !x.is_zero(&f) {
                kept.insert(k, f);
            }
        }
        Ok(ModMorphism { source, target, degree, comps: kept })
    }

    pub fn zero(source: RightModule<X>, target: RightModule<X>, degree: i64) -> ModMorphism<X> {
        ModMorphism { source, target, degree, comps: BTreeMap::new() }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn component(&self, k: usize) -> Option<&X::Morphism> {
        self.comps.get(&k)
    }

    pub fn components(&self) -> &BTreeMap<usize, X::Morphism> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Componentwise combination; `op` sees `None` for absent components.
    pub fn combine(
        &self,
        x: &X,
        other: &ModMorphism<X>,
        op: impl Fn(Option<&X::Morphism>, Option<&X::Morphism>) -> Result<Option<X::Morphism>>,
    ) -> Result<ModMorphism<X>> {
        if self.degree != other.degree {
            return Err(Error::Degree(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut comps = BTreeMap::new();
        for k in self.comps.keys().chain(other.comps.keys()) {
            if let Some(m) = op(self.comps.get(k), other.comps.get(k))? {
                if !x.is_zero(&m) {
                    comps.insert(*k, m);
                }
            }
        }
        Ok(ModMorphism { source: self.source.clone(), target: self.target.clone(), degree: self.degree, comps })
    }

    pub fn map_components(&self, x: &X, f: impl Fn(usize, &X::Morphism) -> X::Morphism) -> ModMorphism<X> {
        let comps = self.comps.iter().map(|(k, m)| (*k, f(*k, m))).filter(|(_, m)| !x.is_zero(m)).collect();
        ModMorphism { source: self.source.clone(), target: self.target.clone(), degree: self.degree, comps }
    }

    /// Exact equality of degrees and components.
    pub fn equals(&self, x: &X, other: &ModMorphism<X>) -> bool {
        self.degree == other.degree
            && self.comps.keys().chain(other.comps.keys()).all(|k| match (self.comps.get(k), other.comps.get(k)) {
                (Some(a), Some(b)) => x.equal(a, b),
                (Some(a), None) | (None, Some(a)) => x.is_zero(a),
                (None, None) => true,
            })
    }
}

/// The bar of a module morphism on words of length at most `n`.
pub fn bar_right_morphism<X: RightAction>(x: &X, f: &ModMorphism<X>, n: usize) -> Result<TwistedMorphism<X>> {
    let (e, tgt, alg) = (&f.source.object, &f.target.object, &f.source.alg);
    let field = alg.field();
    let mut comps = BTreeMap::new();
    for ls in 1..=n {
        for lt in 1..=ls {
            let k = ls - lt;
            let Some(fk) = f.component(k + 1) else { continue };
            for t in bar_right_morphism_terms(f.degree, lt, k).terms {
                let m = x.act_on_morphism(fk, e, k, tgt, alg, lt - 1)?;
                comps.insert((1 - ls as i64, 1 - lt as i64), x.scale(&field.int(t.coeff), &m));
            }
        }
    }
    TwistedMorphism::new(x, f.degree, comps)
}

/// Transports the module structure of `m` along a degree-0 endomorphism `u`
/// of its underlying object with `u_1 = id`: the result `m'` makes `u` a
/// closed isomorphism `m -> m'`. Operations of arity above `n` are dropped.
pub fn transport<X: RightAction>(x: &X, m: &RightModule<X>, u: &ModMorphism<X>, n: usize) -> Result<RightModule<X>> {
    if u.degree != 0 || u.component(1).is_none_or(|u1| !x.equal(u1, &x.identity(&m.object))) {
        return Err(Error::Invalid("transport needs a degree-0 morphism with u_1 = id".into()));
    }
    let w = Window::words(n);
    let bar = bar_module_right(x, m).truncate(x, w)?;
    let big_u = bar_right_morphism(x, u, n)?;
    let big_u_inv = crate::twisted::tw_inverse_unipotent(x, &big_u, &bar, w)?;
    let moved = crate::twisted::gauge_transform(x, &bar, &big_u, &big_u_inv)?;
    let ops = (2..=n).filter_map(|r| moved.diff(1 - r as i64, 0).map(|p| (r, p))).collect();
    let out = RightModule::new(x, format!("{}'", m.name), Arc::clone(&m.alg), m.object.clone(), ops)?;
    let again = bar_module_right(x, &out).truncate(x, w)?;
    let same = again.diffs().unwrap().len() == moved.diffs().unwrap().len()
        && moved.diffs().unwrap().iter().all(|((i, j), a)| again.diff(*i, *j).is_some_and(|b| x.equal(a, &b)));
    if !same {
        return Err(Error::Inconsistent("transported bar is not the bar of a module".into()));
    }
    Ok(out)
}

/// A left A∞-module in complexes; `p_k: A^{⊗(k-1)} ⊗ E -> E`.
#[derive(Clone, Debug)]
pub struct LeftModule {
    pub alg: Arc<AInfAlgebra>,
    name: String,
    object: Complex,
    ops: BTreeMap<usize, GradedMap>,
}

fn left_spaces(alg: &AInfAlgebra, k: usize, e: &GradedSpace) -> Vec<GradedSpace> {
    let mut v = vec![alg.space().clone(); k];
    v.push(e.clone());
    v
}

impl LeftModule {
    pub fn new(name: impl Into<String>, alg: Arc<AInfAlgebra>, object: Complex, ops: BTreeMap<usize, GradedMap>) -> Result<LeftModule> {
        let mut kept = BTreeMap::new();
        for (k, p) in ops {
            check_arity(k, 'p')?;
            if k == 1 {
                return Err(Error::Invalid("p_1 is the differential of the underlying object".into()));
            }
            if p.degree() != 2 - k as i64 {
                return Err(Error::Degree(format!("p_{k} has degree {}, expected {}", p.degree(), 2 - k as i64)));
            }
            if p.source() != &crate::tensor::tensor_spaces(&left_spaces(&alg, k - 1, object.space()))
                || p.target() != object.space()
            {
                return Err(Error::Shape(format!("p_{k} must map A^⊗{} ⊗ E to E", k - 1)));
            }
            if !p.is_zero() {
                kept.insert(k, p);
            }
        }
        Ok(LeftModule { alg, name: name.into(), object, ops: kept })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object(&self) -> &Complex {
        &self.object
    }

    pub fn op(&self, k: usize) -> Option<&GradedMap> {
        self.ops.get(&k)
    }

    pub fn ops(&self) -> &BTreeMap<usize, GradedMap> {
        &self.ops
    }

    fn slot(&self, f: &Factor) -> Option<Slot> {
        match f {
            Factor::Id('E') => Some(Slot::identity(self.alg.field(), self.object.space().clone())),
            Factor::Op('p', k) => self
                .op(*k)
                .map(|p| Slot::new(p.clone(), left_spaces(&self.alg, k - 1, self.object.space()), vec![self.object.space().clone()])),
            other => self.alg.slot(other),
        }
    }
}

/// The bar construction `A^{⊗w} ⊗ E` at index `-w`.
pub fn bar_module_left(m: &LeftModule) -> TwistedComplex<Ch> {
    let field = m.alg.field();
    let (m1, m2) = (m.clone(), m.clone());
    let arity = m.ops.keys().next_back().copied().unwrap_or(2).max(m.alg.max_arity());
    let stream = Stream::new(
        format!("bar({})", m.name),
        move |i| {
            if i > 0 {
                return None;
            }
            let mut factors = vec![m1.alg.complex(); word_length(i) - 1];
            factors.push(&m1.object);
            tensor_complexes(field, &factors).ok()
        },
        move |i, j| {
            let (ls, lt) = (word_length(i), word_length(j));
            if lt == 0 || ls <= lt {
                return None;
            }
            eval_formal(field, &bar_left_terms(lt, ls - lt), &|f| m2.slot(f)).ok().flatten()
        },
        bar_reach(arity),
        word_certificate(m.object.space().min_degree().zip(m.object.space().max_degree()), m.alg.degree_range()),
    );
    TwistedComplex::streamed(stream)
}

pub fn is_left_module(m: &LeftModule, n: usize) -> Result<(usize, Option<TwistedViolation<GradedMap>>)> {
    check_twisted(&Ch::new(m.alg.field()), &bar_module_left(m), Window::words(n))
}

/// A degree-`j` morphism of left modules, `f_k: A^{⊗(k-1)} ⊗ E -> F`.
#[derive(Clone, Debug)]
pub struct LeftModMorphism {
    pub source: LeftModule,
    pub target: LeftModule,
    degree: i64,
    comps: BTreeMap<usize, GradedMap>,
}

impl LeftModMorphism {
    pub fn new(source: LeftModule, target: LeftModule, degree: i64, comps: BTreeMap<usize, GradedMap>) -> Result<LeftModMorphism> {
        let mut kept = BTreeMap::new();
        for (k, f) in comps {
            check_arity(k, 'f')?;
            if f.degree() != degree + 1 - k as i64 {
                return Err(Error::Degree(format!("f_{k} has degree {}, expected {}", f.degree(), degree + 1 - k as i64)));
            }
            let src = crate::tensor::tensor_spaces(&left_spaces(&source.alg, k - 1, source.object.space()));
            if f.source() != &src || f.target() != target.object.space() {
                return Err(Error::Shape(format!("f_{k} must map A^⊗{} ⊗ E to F", k - 1)));
            }
            if !f.is_zero() {
                kept.insert(k, f);
            }
        }
        Ok(LeftModMorphism { source, target, degree, comps: kept })
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<usize, GradedMap> {
        &self.comps
    }
}

/// The bar of a left-module morphism on words of length at most `n`.
pub fn bar_left_morphism(f: &LeftModMorphism, n: usize) -> Result<TwistedMorphism<Ch>> {
    let alg = &f.source.alg;
    let field = alg.field();
    let e = f.source.object.space();
    let slot = |x: &Factor| match x {
        Factor::Op('f', k) => f
            .comps
            .get(k)
            .map(|m| Slot::new(m.clone(), left_spaces(alg, k - 1, e), vec![f.target.object.space().clone()])),
        other => alg.slot(other),
    };
    let mut comps = BTreeMap::new();
    for ls in 1..=n {
        for lt in 1..=ls {
            if let Some(m) = eval_formal(field, &bar_left_morphism_terms(f.degree, lt, ls - lt), &slot)? {
                comps.insert((1 - ls as i64, 1 - lt as i64), m);
            }
        }
    }
    TwistedMorphism::new(&Ch::new(field), f.degree, comps)
}

/// First component (shortest source word) where the bar of a right-module
/// morphism fails to be closed.
pub fn is_right_closed(f: &ModMorphism<Ch>, n: usize) -> Result<Option<(i64, i64, GradedMap)>> {
    let cat = Ch::new(f.source.alg.field());
    let w = Window::words(n);
    let bs = bar_module_right(&cat, &f.source).truncate(&cat, w)?;
    let bt = bar_module_right(&cat, &f.target).truncate(&cat, w)?;
    Ok(shortest_word(&tw_diff(&cat, &bar_right_morphism(&cat, f, n)?, &bs, &bt, Some(w))?))
}

/// Left-module version of [`is_right_closed`].
pub fn is_left_closed(f: &LeftModMorphism, n: usize) -> Result<Option<(i64, i64, GradedMap)>> {
    let cat = Ch::new(f.source.alg.field());
    let w = Window::words(n);
    let bs = bar_module_left(&f.source).truncate(&cat, w)?;
    let bt = bar_module_left(&f.target).truncate(&cat, w)?;
    Ok(shortest_word(&tw_diff(&cat, &bar_left_morphism(f, n)?, &bs, &bt, Some(w))?))
}
