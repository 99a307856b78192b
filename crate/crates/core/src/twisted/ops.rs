use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Classification, TwistedComplex, TwistedMorphism, Window};
use crate::category::DgCategory;
use crate::error::{Error, Result};

/// First cell `(i, j)` where `(-1)^j dα_ij + Σ_k α_kj ∘ α_ik` is nonzero.
#[derive(Clone, Debug)]
pub struct TwistedViolation<M> {
    pub i: i64,
    pub j: i64,
    pub residual: M,
}

/// The one-object twisted complex with `a_0 = object`.
pub fn trivial<C: DgCategory>(cat: &C, object: C::Object) -> TwistedComplex<C> {
    TwistedComplex::bounded(cat, BTreeMap::from([(0, object)]), BTreeMap::new()).expect("one object, no diffs")
}

fn check_degrees<C: DgCategory>(cat: &C, t: &TwistedComplex<C>, w: Window) -> Result<()> {
    for i in t.indices(w) {
        for (j, a) in t.arrows_from(cat, i) {
            if cat.degree(&a) != i - j + 1 {
                return Err(Error::Degree(format!(
                    "α_({i},{j}) has degree {}, expected {}",
                    cat.degree(&a),
                    i - j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Evaluates the twisted-complex equation on every cell of `w`.
///
/// Cells are visited with `i` descending and then `j` ascending, so for bar
/// constructions the reported cell is the shortest violated word. Returns the
/// number of cells checked and the first violation.
pub fn check_twisted<C: DgCategory>(
    cat: &C,
    t: &TwistedComplex<C>,
    w: Window,
) -> Result<(usize, Option<TwistedViolation<C::Morphism>>)> {
    check_degrees(cat, t, w)?;
    let idx = t.indices(w);
    let mut cells = Vec::new();
    for i in idx.iter().rev() {
        for j in &idx {
            cells.push((*i, *j));
        }
    }
    let residuals: Vec<Result<Option<C::Morphism>>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let ai = t.object(i).unwrap();
            let aj = t.object(j).unwrap();
            let mut r = cat.zero(&ai, &aj, i - j + 2);
            if let Some(a) = t.diff(i, j) {
                r = cat.add(&r, &cat.signed(j, &cat.differential(&ai, &aj, &a)?))?;
            }
            for (k, a_ik) in t.arrows_from(cat, i) {
                if let Some(a_kj) = t.diff(k, j) {
                    r = cat.add(&r, &cat.compose(&a_kj, &a_ik)?)?;
                }
            }
            Ok(if cat.is_zero(&r) { None } else { Some(r) })
        })
        .collect();
    let n = cells.len();
    for ((i, j), r) in cells.into_iter().zip(residuals) {
        if let Some(residual) = r? {
            return Ok((n, Some(TwistedViolation { i, j, residual })));
        }
    }
    Ok((n, None))
}

fn default_window<C: DgCategory>(t: &TwistedComplex<C>, s: &TwistedComplex<C>) -> Result<Window> {
    Ok(t.require_support("a windowless computation")?.hull(&s.require_support("a windowless computation")?))
}

/// The differential of a twisted morphism `f: T -> S` on the window `w`
/// (default: the hull of both supports):
/// `(df)_kl = (-1)^l d f_kl + Σ_m β_ml ∘ f_km - (-1)^{|f|} Σ_m f_ml ∘ α_km`.
pub fn tw_diff<C: DgCategory>(
    cat: &C,
    f: &TwistedMorphism<C>,
    t: &TwistedComplex<C>,
    s: &TwistedComplex<C>,
    w: Option<Window>,
) -> Result<TwistedMorphism<C>> {
    let w = match w {
        Some(w) => w,
        None => default_window(t, s)?,
    };
    if !t.is_closed_on(w) || !s.is_closed_on(w) {
        return Err(Error::Support(format!("window {w} is not closed under the diffs")));
    }
    for (i, j) in f.components().keys() {
        if w.contains(*i) && !w.contains(*j) {
            return Err(Error::Support(format!("component ({i},{j}) leaves the window {w}")));
        }
    }
    let f = f.restrict(w);
    let deg = f.degree();
    let mut out = TwistedMorphism::zero(deg + 1);
    let by_source = |k: i64| f.components().range((k, i64::MIN)..=(k, i64::MAX)).map(|((_, m), g)| (*m, g));
    for ((k, l), fkl) in f.components() {
        let ak = t.object(*k).ok_or_else(|| Error::Support(format!("no source object at {k}")))?;
        let bl = s.object(*l).ok_or_else(|| Error::Support(format!("no target object at {l}")))?;
        out.accumulate(cat, *k, *l, cat.signed(*l, &cat.differential(&ak, &bl, fkl)?))?;
    }
    for ((k, m), fkm) in f.components() {
        for (l, beta) in s.arrows_from(cat, *m) {
            if w.contains(l) {
                out.accumulate(cat, *k, l, cat.compose(&beta, fkm)?)?;
            }
        }
    }
    for k in t.indices(w) {
        for (m, alpha) in t.arrows_from(cat, k) {
            for (l, fml) in by_source(m) {
                out.accumulate(cat, k, l, cat.signed(deg + 1, &cat.compose(fml, &alpha)?))?;
            }
        }
    }
    Ok(out)
}

/// `(g ∘ f)_ik = Σ_j g_jk ∘ f_ij`.
pub fn tw_compose<C: DgCategory>(
    cat: &C,
    g: &TwistedMorphism<C>,
    f: &TwistedMorphism<C>,
) -> Result<TwistedMorphism<C>> {
    let mut out = TwistedMorphism::zero(g.degree() + f.degree());
    for ((i, j), fij) in f.components() {
        for ((_, k), gjk) in g.components().range((*j, i64::MIN)..=(*j, i64::MAX)) {
            out.accumulate(cat, *i, *k, cat.compose(gjk, fij)?)?;
        }
    }
    Ok(out)
}

/// Identity of `T` on the window.
pub fn tw_identity<C: DgCategory>(cat: &C, t: &TwistedComplex<C>, w: Window) -> TwistedMorphism<C> {
    let mut out = TwistedMorphism::zero(0);
    for i in t.indices(w) {
        let id = cat.identity(&t.object(i).unwrap());
        out.accumulate(cat, i, i, id).expect("identity components are disjoint");
    }
    out
}

/// The diffs of `T` on `w` as a degree-1 endomorphism of its underlying objects.
pub fn twisted_endomorphism<C: DgCategory>(cat: &C, t: &TwistedComplex<C>, w: Window) -> TwistedMorphism<C> {
    let mut out = TwistedMorphism::zero(1);
    for i in t.indices(w) {
        for (j, a) in t.arrows_from(cat, i) {
            if w.contains(j) {
                out.accumulate(cat, i, j, a).expect("diff components are disjoint");
            }
        }
    }
    out
}

/// Inverse of `g = id + N` for `N` nilpotent, as the finite series `Σ (-N)^k`.
pub fn tw_inverse_unipotent<C: DgCategory>(
    cat: &C,
    g: &TwistedMorphism<C>,
    t: &TwistedComplex<C>,
    w: Window,
) -> Result<TwistedMorphism<C>> {
    let id = tw_identity(cat, t, w);
    let minus_n = id.sub(cat, g)?;
    let mut total = id.clone();
    let mut power = id;
    for _ in 0..=t.indices(w).len() {
        power = tw_compose(cat, &power, &minus_n)?;
        if power.is_zero() {
            return Ok(total);
        }
        total = total.add(cat, &power)?;
    }
    Err(Error::Invalid("morphism is not unipotent on the window".into()))
}

/// Transports the twisted differential of `T` along a degree-0 automorphism
/// `g` of its underlying objects: `α' = (g α - d_0(g)) g⁻¹`, where `d_0` is the
/// differential for the complex with no diffs. The result is a twisted
/// complex whenever `T` is.
pub fn gauge_transform<C: DgCategory>(
    cat: &C,
    t: &TwistedComplex<C>,
    g: &TwistedMorphism<C>,
    g_inv: &TwistedMorphism<C>,
) -> Result<TwistedComplex<C>> {
    let w = t.require_support("gauge_transform")?;
    let t0 = t.underlying(cat, w)?;
    let alpha = twisted_endomorphism(cat, t, w);
    let dg = tw_diff(cat, g, &t0, &t0, Some(w))?;
    let term = tw_compose(cat, g, &alpha)?.sub(cat, &dg)?;
    let new_alpha = tw_compose(cat, &term, g_inv)?;
    TwistedComplex::bounded(cat, t0.objects().unwrap().clone(), new_alpha.components().clone())
}

pub fn classify<C: DgCategory>(cat: &C, t: &TwistedComplex<C>) -> Classification {
    match t.certificate() {
        Some(c) => Classification {
            bounded: c.lower.is_some() && c.upper.is_some(),
            bounded_above: c.upper.is_some(),
            bounded_below: c.lower.is_some(),
            one_sided: c.one_sided,
        },
        None => {
            let one_sided = t.diffs().unwrap().iter().all(|((i, j), a)| i < j || cat.is_zero(a));
            Classification { bounded: true, bounded_above: true, bounded_below: true, one_sided }
        }
    }
}
