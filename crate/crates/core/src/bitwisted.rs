//! Twisted bicomplexes, the row and column functors from twisted complexes of
//! twisted complexes, and the reflection and sign automorphisms.
//!
//! A bicomplex has objects `a_ij` and maps `α_ijkl: a_ij -> a_kl` of degree
//! `(i+j) - (k+l) + 1` with `(-1)^{k+l} dα_ijkl + Σ_mn α_mnkl ∘ α_ijmn = 0`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::category::{Ch, DgCategory};
use crate::complex::{direct_sum, Complex};
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::twisted::{TwistedComplex, TwistedMorphism, Tw, Window};

/// A `(row, column)` position.
pub type Cell = (i64, i64);

fn weight(c: Cell) -> i64 {
    c.0 + c.1
}

/// A bounded twisted bicomplex. Absent objects and maps are zero.
pub struct TwistedBicomplex<C: DgCategory> {
    objects: BTreeMap<Cell, C::Object>,
    diffs: BTreeMap<(Cell, Cell), C::Morphism>,
}

impl<C: DgCategory> Clone for TwistedBicomplex<C> {
    fn clone(&self) -> Self {
        TwistedBicomplex { objects: self.objects.clone(), diffs: self.diffs.clone() }
    }
}

impl<C: DgCategory> fmt::Debug for TwistedBicomplex<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedBicomplex").field("objects", &self.objects).field("diffs", &self.diffs).finish()
    }
}

/// A degree-`n` bicomplex morphism; the component `a_ij -> b_kl` has degree
/// `n + (i+j) - (k+l)`.
pub struct BicomplexMorphism<C: DgCategory> {
    degree: i64,
    components: BTreeMap<(Cell, Cell), C::Morphism>,
}

impl<C: DgCategory> Clone for BicomplexMorphism<C> {
    fn clone(&self) -> Self {
        BicomplexMorphism { degree: self.degree, components: self.components.clone() }
    }
}

impl<C: DgCategory> fmt::Debug for BicomplexMorphism<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BicomplexMorphism").field("degree", &self.degree).field("components", &self.components).finish()
    }
}

impl<C: DgCategory> TwistedBicomplex<C> {
    /// Drops zero maps; every map must run between present objects.
    pub fn new(
        cat: &C,
        objects: BTreeMap<Cell, C::Object>,
        diffs: BTreeMap<(Cell, Cell), C::Morphism>,
    ) -> Result<TwistedBicomplex<C>> {
        let mut kept = BTreeMap::new();
        for ((s, t), a) in diffs {
            if !objects.contains_key(&s) || !objects.contains_key(&t) {
                return Err(Error::Support(format!("map {s:?} -> {t:?} touches a missing object")));
            }
            if !cat.is_zero(&a) {
                kept.insert((s, t), a);
            }
        }
        Ok(TwistedBicomplex { objects, diffs: kept })
    }

    pub fn objects(&self) -> &BTreeMap<Cell, C::Object> {
        &self.objects
    }

    pub fn diffs(&self) -> &BTreeMap<(Cell, Cell), C::Morphism> {
        &self.diffs
    }

    pub fn object(&self, c: Cell) -> Option<&C::Object> {
        self.objects.get(&c)
    }

    pub fn diff(&self, s: Cell, t: Cell) -> Option<&C::Morphism> {
        self.diffs.get(&(s, t))
    }

    fn arrows_from(&self, s: Cell) -> impl Iterator<Item = (Cell, &C::Morphism)> {
        self.diffs.range((s, (i64::MIN, i64::MIN))..=(s, (i64::MAX, i64::MAX))).map(|((_, t), a)| (*t, a))
    }

    /// `α_ijkl = 0` whenever `k < i`.
    pub fn is_vertically_one_sided(&self) -> bool {
        self.diffs.keys().all(|(s, t)| t.0 >= s.0)
    }

    /// `α_ijkl = 0` whenever `l < j`.
    pub fn is_horizontally_one_sided(&self) -> bool {
        self.diffs.keys().all(|(s, t)| t.1 >= s.1)
    }

    /// Semantic equality: same objects and the same nonzero maps.
    pub fn equals(&self, cat: &C, other: &TwistedBicomplex<C>, same_object: impl Fn(&C::Object, &C::Object) -> bool) -> bool {
        self.objects.len() == other.objects.len()
            && self.objects.iter().all(|(c, o)| other.objects.get(c).is_some_and(|p| same_object(o, p)))
            && self.diffs.len() == other.diffs.len()
            && self.diffs.iter().all(|(k, a)| other.diffs.get(k).is_some_and(|b| cat.equal(a, b)))
    }
}

impl<C: DgCategory> BicomplexMorphism<C> {
    pub fn zero(degree: i64) -> BicomplexMorphism<C> {
        BicomplexMorphism { degree, components: BTreeMap::new() }
    }

    pub fn new(cat: &C, degree: i64, components: BTreeMap<(Cell, Cell), C::Morphism>) -> Result<BicomplexMorphism<C>> {
        let mut kept = BTreeMap::new();
        for ((s, t), f) in components {
            let want = degree + weight(s) - weight(t);
            if cat.degree(&f) != want {
                return Err(Error::Degree(format!(
                    "component {s:?} -> {t:?} has degree {}, expected {want}",
                    cat.degree(&f)
                )));
            }
            if !cat.is_zero(&f) {
                kept.insert((s, t), f);
            }
        }
        Ok(BicomplexMorphism { degree, components: kept })
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn components(&self) -> &BTreeMap<(Cell, Cell), C::Morphism> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn accumulate(&mut self, cat: &C, s: Cell, t: Cell, f: C::Morphism) -> Result<()> {
        let sum = match self.components.remove(&(s, t)) {
            Some(g) => cat.add(&g, &f)?,
            None => f,
        };
        if !cat.is_zero(&sum) {
            self.components.insert((s, t), sum);
        }
        Ok(())
    }

    pub fn equals(&self, cat: &C, other: &BicomplexMorphism<C>) -> bool {
        self.degree == other.degree
            && self.components.len() == other.components.len()
            && self.components.iter().all(|(k, a)| other.components.get(k).is_some_and(|b| cat.equal(a, b)))
    }
}

/// First cell where the bicomplex equation fails.
#[derive(Clone, Debug)]
pub struct BitwistedViolation<M> {
    pub source: Cell,
    pub target: Cell,
    pub residual: M,
}

/// Evaluates the bicomplex equation on all pairs of cells inside `window`
/// (rows, columns), or on all cells when `window` is `None`.
pub fn check_bitwisted<C: DgCategory>(
    cat: &C,
    b: &TwistedBicomplex<C>,
    window: Option<(Window, Window)>,
) -> Result<(usize, Option<BitwistedViolation<C::Morphism>>)> {
    for ((s, t), a) in &b.diffs {
        let want = weight(*s) - weight(*t) + 1;
        if cat.degree(a) != want {
            return Err(Error::Degree(format!("α {s:?} -> {t:?} has degree {}, expected {want}", cat.degree(a))));
        }
    }
    let cells: Vec<Cell> = b
        .objects
        .keys()
        .copied()
        .filter(|c| window.is_none_or(|(r, k)| r.contains(c.0) && k.contains(c.1)))
        .collect();
    let pairs: Vec<(Cell, Cell)> = cells.iter().flat_map(|s| cells.iter().map(move |t| (*s, *t))).collect();
    let residuals: Vec<Result<Option<C::Morphism>>> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let (os, ot) = (&b.objects[&s], &b.objects[&t]);
            let mut r = cat.zero(os, ot, weight(s) - weight(t) + 2);
            if let Some(a) = b.diff(s, t) {
                r = cat.add(&r, &cat.signed(weight(t), &cat.differential(os, ot, a)?))?;
            }
            for (m, a_sm) in b.arrows_from(s) {
                if let Some(a_mt) = b.diff(m, t) {
                    r = cat.add(&r, &cat.compose(a_mt, a_sm)?)?;
                }
            }
            Ok(if cat.is_zero(&r) { None } else { Some(r) })
        })
        .collect();
    let n = pairs.len();
    for ((source, target), r) in pairs.into_iter().zip(residuals) {
        if let Some(residual) = r? {
            return Ok((n, Some(BitwistedViolation { source, target, residual })));
        }
    }
    Ok((n, None))
}

/// `(df)_st = (-1)^{|t|} d f_st + Σ_m β_mt ∘ f_sm - (-1)^{|f|} Σ_m f_mt ∘ α_sm`.
pub fn bitw_diff<C: DgCategory>(
    cat: &C,
    f: &BicomplexMorphism<C>,
    b: &TwistedBicomplex<C>,
    c: &TwistedBicomplex<C>,
) -> Result<BicomplexMorphism<C>> {
    let mut out = BicomplexMorphism::zero(f.degree + 1);
    for ((s, t), fst) in &f.components {
        let os = b.object(*s).ok_or_else(|| Error::Support(format!("no source object at {s:?}")))?;
        let ot = c.object(*t).ok_or_else(|| Error::Support(format!("no target object at {t:?}")))?;
        out.accumulate(cat, *s, *t, cat.signed(weight(*t), &cat.differential(os, ot, fst)?))?;
        for (u, beta) in c.arrows_from(*t) {
            out.accumulate(cat, *s, u, cat.compose(beta, fst)?)?;
        }
    }
    for (s, _) in b.objects.iter() {
        for (m, alpha) in b.arrows_from(*s) {
            for ((_, t), fmt) in f.components.range((m, (i64::MIN, i64::MIN))..=(m, (i64::MAX, i64::MAX))) {
                out.accumulate(cat, *s, *t, cat.signed(f.degree + 1, &cat.compose(fmt, alpha)?))?;
            }
        }
    }
    Ok(out)
}

/// `(g ∘ f)_su = Σ_t g_tu ∘ f_st`.
pub fn bitw_compose<C: DgCategory>(
    cat: &C,
    g: &BicomplexMorphism<C>,
    f: &BicomplexMorphism<C>,
) -> Result<BicomplexMorphism<C>> {
    let mut out = BicomplexMorphism::zero(g.degree + f.degree);
    for ((s, t), fst) in &f.components {
        for ((_, u), gtu) in g.components.range((*t, (i64::MIN, i64::MIN))..=(*t, (i64::MAX, i64::MAX))) {
            out.accumulate(cat, *s, *u, cat.compose(gtu, fst)?)?;
        }
    }
    Ok(out)
}

pub fn bitw_identity<C: DgCategory>(cat: &C, b: &TwistedBicomplex<C>) -> BicomplexMorphism<C> {
    let components = b.objects.iter().map(|(c, o)| ((*c, *c), cat.identity(o))).collect();
    BicomplexMorphism { degree: 0, components }
}

fn bounded_support<C: DgCategory>(t: &TwistedComplex<C>) -> Result<Window> {
    t.require_support("the row and column functors")
}

/// Rows of the bicomplex are the inner complexes `E_i` with diffs signed by
/// `(-1)^i` plus the diagonal outer components; outer components `α_ik`
/// with `i != k` connect rows.
pub fn cxrow<C: DgCategory + Clone>(cat: &C, cc: &TwistedComplex<Tw<C>>) -> Result<TwistedBicomplex<C>> {
    let outer = bounded_support(cc)?;
    let tw = Tw::new(cat.clone());
    let mut objects = BTreeMap::new();
    let mut diffs: BTreeMap<(Cell, Cell), C::Morphism> = BTreeMap::new();
    let add = |s: Cell, t: Cell, a: C::Morphism, diffs: &mut BTreeMap<(Cell, Cell), C::Morphism>| -> Result<()> {
        let sum = match diffs.remove(&(s, t)) {
            Some(b) => cat.add(&b, &a)?,
            None => a,
        };
        diffs.insert((s, t), sum);
        Ok(())
    };
    for i in cc.indices(outer) {
        let e = cc.object(i).unwrap();
        let inner = bounded_support(&e)?;
        for j in e.indices(inner) {
            objects.insert((i, j), e.object(j).unwrap());
        }
        for ((j, l), a) in e.diffs().unwrap() {
            add((i, *j), (i, *l), cat.signed(i, a), &mut diffs)?;
        }
        for (k, alpha) in cc.arrows_from(&tw, i) {
            for ((j, l), a) in alpha.components() {
                add((i, *j), (k, *l), a.clone(), &mut diffs)?;
            }
        }
    }
    TwistedBicomplex::new(cat, objects, diffs)
}

/// Cell `(i, j)` holds `E_{j,i}`: the transpose of [`cxrow`].
pub fn cxcol<C: DgCategory + Clone>(cat: &C, cc: &TwistedComplex<Tw<C>>) -> Result<TwistedBicomplex<C>> {
    Ok(transpose(&cxrow(cat, cc)?))
}

pub fn cxrow_morphism<C: DgCategory>(cat: &C, f: &TwistedMorphism<Tw<C>>) -> Result<BicomplexMorphism<C>> {
    let mut components = BTreeMap::new();
    for ((i, k), fik) in f.components() {
        for ((j, l), a) in fik.components() {
            components.insert(((*i, *j), (*k, *l)), a.clone());
        }
    }
    BicomplexMorphism::new(cat, f.degree(), components)
}

pub fn cxcol_morphism<C: DgCategory>(cat: &C, f: &TwistedMorphism<Tw<C>>) -> Result<BicomplexMorphism<C>> {
    Ok(transpose_morphism(&cxrow_morphism(cat, f)?))
}

fn transpose<C: DgCategory>(b: &TwistedBicomplex<C>) -> TwistedBicomplex<C> {
    TwistedBicomplex {
        objects: b.objects.iter().map(|((i, j), o)| ((*j, *i), o.clone())).collect(),
        diffs: b.diffs.iter().map(|(((i, j), (k, l)), a)| (((*j, *i), (*l, *k)), a.clone())).collect(),
    }
}

fn transpose_morphism<C: DgCategory>(f: &BicomplexMorphism<C>) -> BicomplexMorphism<C> {
    BicomplexMorphism {
        degree: f.degree,
        components: f.components.iter().map(|(((i, j), (k, l)), a)| (((*j, *i), (*l, *k)), a.clone())).collect(),
    }
}

/// Reflection along the diagonal: `a_ij -> a_ji`, `α_ijkl -> α_jilk` with
/// no extra sign, so that `reflect ∘ cxcol = cxrow`.
pub fn reflect<C: DgCategory>(b: &TwistedBicomplex<C>) -> TwistedBicomplex<C> {
    transpose(b)
}

pub fn reflect_morphism<C: DgCategory>(f: &BicomplexMorphism<C>) -> BicomplexMorphism<C> {
    transpose_morphism(f)
}

/// Multiplies `α_ijkl` by `(-1)^{ij + kl}`.
pub fn sigma<C: DgCategory>(cat: &C, b: &TwistedBicomplex<C>) -> TwistedBicomplex<C> {
    TwistedBicomplex {
        objects: b.objects.clone(),
        diffs: b.diffs.iter().map(|((s, t), a)| ((*s, *t), cat.signed(s.0 * s.1 + t.0 * t.1, a))).collect(),
    }
}

pub fn sigma_morphism<C: DgCategory>(cat: &C, f: &BicomplexMorphism<C>) -> BicomplexMorphism<C> {
    BicomplexMorphism {
        degree: f.degree,
        components: f
            .components
            .iter()
            .map(|((s, t), a)| ((*s, *t), cat.signed(s.0 * s.1 + t.0 * t.1, a)))
            .collect(),
    }
}

/// Inverse of [`cxrow`] on vertically one-sided bicomplexes. The row-internal
/// maps become the diffs of the inner complexes (undoing the `(-1)^i`
/// twist), and maps between rows become a one-sided outer complex.
pub fn cxrow_inverse<C: DgCategory + Clone>(cat: &C, b: &TwistedBicomplex<C>) -> Result<TwistedComplex<Tw<C>>> {
    if let Some((s, t)) = b.diffs.keys().find(|(s, t)| t.0 < s.0) {
        return Err(Error::NotOneSided(format!("map {s:?} -> {t:?} goes to an earlier row")));
    }
    let tw = Tw::new(cat.clone());
    let mut rows: BTreeMap<i64, (BTreeMap<i64, C::Object>, BTreeMap<(i64, i64), C::Morphism>)> = BTreeMap::new();
    for ((i, j), o) in &b.objects {
        rows.entry(*i).or_default().0.insert(*j, o.clone());
    }
    let mut outer: BTreeMap<(i64, i64), BTreeMap<(i64, i64), C::Morphism>> = BTreeMap::new();
    for ((s, t), a) in &b.diffs {
        if s.0 == t.0 {
            rows.get_mut(&s.0).unwrap().1.insert((s.1, t.1), cat.signed(s.0, a));
        } else {
            outer.entry((s.0, t.0)).or_default().insert((s.1, t.1), a.clone());
        }
    }
    let mut objects = BTreeMap::new();
    for (i, (objs, diffs)) in rows {
        objects.insert(i, TwistedComplex::bounded(cat, objs, diffs)?);
    }
    let mut diffs = BTreeMap::new();
    for ((i, k), comps) in outer {
        diffs.insert((i, k), TwistedMorphism::new(cat, i - k + 1, comps)?);
    }
    TwistedComplex::bounded(&tw, objects, diffs)
}

/// Inverse of [`cxcol`] on horizontally one-sided bicomplexes.
pub fn cxcol_inverse<C: DgCategory + Clone>(cat: &C, b: &TwistedBicomplex<C>) -> Result<TwistedComplex<Tw<C>>> {
    if let Some((s, t)) = b.diffs.keys().find(|(s, t)| t.1 < s.1) {
        return Err(Error::NotOneSided(format!("map {s:?} -> {t:?} goes to an earlier column")));
    }
    cxrow_inverse(cat, &transpose(b))
}

/// Order of the summands of a bicomplex convolution inside each degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellOrder {
    /// By row, then column; matches convolving the rows first.
    RowMajor,
    /// By column, then row; matches convolving the columns first.
    ColumnMajor,
}

/// Total complex `⊕ a_ij[-i-j]` with differential `d_nat + Σ α`.
pub fn convolve_bicomplex(field: crate::scalar::Field, b: &TwistedBicomplex<Ch>, order: CellOrder) -> Result<Complex> {
    let mut cells: Vec<Cell> = b.objects.keys().copied().collect();
    if order == CellOrder::ColumnMajor {
        cells.sort_by_key(|(i, j)| (*j, *i));
    }
    let shifted: Vec<Complex> = cells.iter().map(|c| b.objects[c].shift(-weight(*c))).collect();
    let sum = direct_sum(field, &shifted.iter().collect::<Vec<_>>())?;
    let position: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(p, c)| (*c, p)).collect();
    let space = sum.complex.space().clone();
    let mut pert = GradedMap::zero(field, space.clone(), space, 1);
    for ((s, t), a) in &b.diffs {
        let inner = a.reindex(-weight(*s), -weight(*t));
        let term = sum.inclusions[position[t]].compose(&inner)?.compose(&sum.projections[position[s]])?;
        pert = pert.add(&term)?;
    }
    sum.complex.perturb(&pert)
}

/// Convolves every inner complex, then the resulting outer complex.
pub fn double_convolve(field: crate::scalar::Field, cc: &TwistedComplex<Tw<Ch>>) -> Result<Complex> {
    let outer = bounded_support(cc)?;
    let mut inner = Window::new(0, -1);
    for i in cc.indices(outer) {
        inner = inner.hull(&bounded_support(&cc.object(i).unwrap())?);
    }
    let ch = Ch::new(field);
    let tw = Tw::new(ch);
    let mut objects = BTreeMap::new();
    for i in cc.indices(outer) {
        let e = cc.object(i).unwrap();
        let conv = if e.indices(inner).is_empty() { Complex::zero(field) } else { crate::twisted::convolve(&e, inner)? };
        objects.insert(i, conv);
    }
    let mut diffs = BTreeMap::new();
    for i in cc.indices(outer) {
        for (k, alpha) in cc.arrows_from(&tw, i) {
            let m = crate::twisted::convolve_morphism(&alpha, &cc.object(i).unwrap(), &cc.object(k).unwrap(), inner)?;
            diffs.insert((i, k), m);
        }
    }
    let conv_outer = TwistedComplex::bounded(&ch, objects, diffs)?;
    crate::twisted::convolve(&conv_outer, outer)
}
