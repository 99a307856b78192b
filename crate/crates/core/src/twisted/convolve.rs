use std::collections::BTreeMap;

use super::{DegreeHull, TwistedComplex, TwistedMorphism, Window};
use crate::category::Ch;
use crate::complex::{direct_sum, Complex, DirectSum};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};

/// Which output degrees a window computes exactly: degree `n` is stable when
/// no object outside the window contributes to degrees `n` or `n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableDegrees {
    pub below: DegreeHull,
    pub above: DegreeHull,
}

impl StableDegrees {
    pub fn is_stable(&self, n: i64) -> bool {
        [n, n + 1].iter().all(|m| !self.below.contains(*m) && !self.above.contains(*m))
    }

    pub fn everything(&self) -> bool {
        self.below == DegreeHull::Empty && self.above == DegreeHull::Empty
    }
}

fn exact_hull(t: &TwistedComplex<Ch>, indices: impl Iterator<Item = i64>) -> DegreeHull {
    let mut lo: Option<i64> = None;
    let mut hi: Option<i64> = None;
    for i in indices {
        if let Some(a) = t.object(i) {
            if let (Some(a_lo), Some(a_hi)) = (a.space().min_degree(), a.space().max_degree()) {
                lo = Some(lo.map_or(a_lo + i, |l| l.min(a_lo + i)));
                hi = Some(hi.map_or(a_hi + i, |h| h.max(a_hi + i)));
            }
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => DegreeHull::Range { lo: Some(lo), hi: Some(hi) },
        _ => DegreeHull::Empty,
    }
}

const UNKNOWN: DegreeHull = DegreeHull::Range { lo: None, hi: None };

pub fn stable_degrees(t: &TwistedComplex<Ch>, w: Window) -> StableDegrees {
    match t.support() {
        Some(s) => {
            let below = if s.is_empty() { DegreeHull::Empty } else { exact_hull(t, s.lo..w.lo.min(s.hi + 1)) };
            let above = if s.is_empty() { DegreeHull::Empty } else { exact_hull(t, (w.hi + 1).max(s.lo)..=s.hi) };
            StableDegrees { below, above }
        }
        None => {
            let c = t.certificate().expect("streams carry certificates");
            let below = if c.lower.is_some_and(|l| w.lo <= l) {
                DegreeHull::Empty
            } else {
                c.below.as_ref().map_or(UNKNOWN, |tail| tail(w.lo))
            };
            let above = if c.upper.is_some_and(|u| u <= w.hi) {
                DegreeHull::Empty
            } else {
                c.above.as_ref().map_or(UNKNOWN, |tail| tail(w.hi))
            };
            StableDegrees { below, above }
        }
    }
}

struct Assembly {
    sum: DirectSum,
    position: BTreeMap<i64, usize>,
}

fn assemble(t: &TwistedComplex<Ch>, field: crate::scalar::Field, w: Window) -> Result<Assembly> {
    let idx = t.indices(w);
    let shifted: Vec<Complex> = idx.iter().map(|i| t.object(*i).unwrap().shift(-i)).collect();
    let sum = direct_sum(field, &shifted.iter().collect::<Vec<_>>())?;
    let position = idx.iter().enumerate().map(|(p, i)| (*i, p)).collect();
    Ok(Assembly { sum, position })
}

fn place(asm_src: &Assembly, asm_tgt: &Assembly, i: i64, j: i64, m: &GradedMap) -> Result<GradedMap> {
    let inner = m.reindex(-i, -j);
    asm_tgt.sum.inclusions[asm_tgt.position[&j]].compose(&inner)?.compose(&asm_src.sum.projections[asm_src.position[&i]])
}

fn restrict_space(s: &GradedSpace, keep: &dyn Fn(i64) -> bool) -> GradedSpace {
    GradedSpace::new(s.dims().iter().filter(|(n, _)| keep(**n)).map(|(n, d)| (*n, *d)))
}

fn restrict_map(m: &GradedMap, keep_src: &dyn Fn(i64) -> bool, keep_tgt: &dyn Fn(i64) -> bool) -> Result<GradedMap> {
    let blocks = m
        .blocks()
        .iter()
        .filter(|(n, _)| keep_src(**n) && keep_tgt(**n + m.degree()))
        .map(|(n, b)| (*n, b.clone()))
        .collect();
    GradedMap::from_blocks(
        m.field(),
        restrict_space(m.source(), keep_src),
        restrict_space(m.target(), keep_tgt),
        m.degree(),
        blocks,
    )
}

fn convolve_full(t: &TwistedComplex<Ch>, field: crate::scalar::Field, w: Window) -> Result<(Assembly, Complex)> {
    let asm = assemble(t, field, w)?;
    let mut pert = GradedMap::zero(field, asm.sum.complex.space().clone(), asm.sum.complex.space().clone(), 1);
    for i in t.indices(w) {
        for (j, a) in t.arrows_from(&Ch::new(field), i) {
            if w.contains(j) {
                pert = pert.add(&place(&asm, &asm, i, j, &a)?)?;
            }
        }
    }
    let total = asm.sum.complex.perturb(&pert)?;
    Ok((asm, total))
}

fn field_of(t: &TwistedComplex<Ch>, w: Window, fallback: Option<crate::scalar::Field>) -> Result<crate::scalar::Field> {
    t.indices(w)
        .first()
        .map(|i| t.object(*i).unwrap().field())
        .or(fallback)
        .ok_or_else(|| Error::Invalid("cannot infer the field of an empty twisted complex".into()))
}

/// The convolution `⊕ a_i[-i]` with differential `d_nat + Σ α`, built from the
/// objects in `w` and restricted to the stable degrees of the window.
pub fn convolve(t: &TwistedComplex<Ch>, w: Window) -> Result<Complex> {
    let field = match field_of(t, w, None) {
        Ok(f) => f,
        Err(_) => return Ok(Complex::zero(crate::scalar::Field::Rationals)),
    };
    let (_, total) = convolve_full(t, field, w)?;
    let stable = stable_degrees(t, w);
    if stable.everything() {
        return Ok(total);
    }
    let keep = |n: i64| stable.is_stable(n);
    Complex::new(restrict_map(total.differential(), &keep, &keep)?)
}

/// Convolution restricted to the degrees `[lo, hi]`; fails unless all of them are stable.
pub fn convolve_in_degrees(t: &TwistedComplex<Ch>, w: Window, lo: i64, hi: i64) -> Result<Complex> {
    let stable = stable_degrees(t, w);
    if let Some(n) = (lo..=hi).find(|n| !stable.is_stable(*n)) {
        return Err(Error::Unstable {
            lo: w.lo,
            hi: w.hi,
            reason: format!("output degree {n} receives contributions from outside the window"),
        });
    }
    let full = convolve(t, w)?;
    let keep = |n: i64| lo <= n && n <= hi;
    Complex::new(restrict_map(full.differential(), &keep, &keep)?)
}

/// The block map `Σ f_ij` between convolutions.
pub fn convolve_morphism(
    f: &TwistedMorphism<Ch>,
    t: &TwistedComplex<Ch>,
    s: &TwistedComplex<Ch>,
    w: Window,
) -> Result<GradedMap> {
    let field = field_of(t, w, None).or_else(|_| field_of(s, w, None))?;
    let (asm_t, conv_t) = convolve_full(t, field, w)?;
    let (asm_s, conv_s) = convolve_full(s, field, w)?;
    let mut out = GradedMap::zero(field, conv_t.space().clone(), conv_s.space().clone(), f.degree());
    for ((i, j), m) in f.components() {
        if w.contains(*i) && w.contains(*j) {
            out = out.add(&place(&asm_t, &asm_s, *i, *j, m)?)?;
        }
    }
    let (st, ss) = (stable_degrees(t, w), stable_degrees(s, w));
    if st.everything() && ss.everything() {
        return Ok(out);
    }
    restrict_map(&out, &|n| st.is_stable(n), &|n| ss.is_stable(n))
}

/// Splits a map between convolutions back into twisted components; inverse
/// to [`convolve_morphism`] on bounded complexes.
pub fn deconvolve_morphism(
    m: &GradedMap,
    t: &TwistedComplex<Ch>,
    s: &TwistedComplex<Ch>,
    w: Window,
) -> Result<TwistedMorphism<Ch>> {
    if !stable_degrees(t, w).everything() || !stable_degrees(s, w).everything() {
        return Err(Error::Unstable { lo: w.lo, hi: w.hi, reason: "deconvolution needs the full complexes".into() });
    }
    let field = m.field();
    let asm_t = assemble(t, field, w)?;
    let asm_s = assemble(s, field, w)?;
    let cat = Ch::new(field);
    let mut comps = BTreeMap::new();
    for (i, pi) in &asm_t.position {
        for (j, pj) in &asm_s.position {
            let block = asm_s.sum.projections[*pj].compose(m)?.compose(&asm_t.sum.inclusions[*pi])?;
            comps.insert((*i, *j), block.reindex(*i, *j));
        }
    }
    TwistedMorphism::new(&cat, m.degree(), comps)
}
