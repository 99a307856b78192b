//! Twisted complexes of right modules as right modules over twisted complexes.
//!
//! A twisted complex `(E_i, α_ij•)` in right modules becomes the module over
//! the twisted complex `(E_i, α_ij1)` with
//! `P_{k+1}|_{i->j} = (-1)^{ik} α_ij,k+1 + δ_ij (-1)^{i(k+1)} p_i,k+1`.
//! The construction is checked against bars: the sign-twisted column
//! bicomplex of the bars equals the row bicomplex of the bar of the result.

use std::collections::BTreeMap;

use super::module::{bar_module_right, bar_right_morphism, ModMorphism, RightModule};
use super::nod::Nod;
use crate::bitwisted::{cxcol, cxcol_morphism, cxrow, cxrow_morphism, sigma, sigma_morphism, Cell};
use crate::category::Ch;
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::twisted::{Tw, TwistedComplex, TwistedMorphism, Window};

/// Sign applied to the arity-`r` component of a morphism leaving index `i`.
fn morphism_sign(i: i64, r: usize) -> i64 {
    i * (r as i64 - 1)
}

fn modules(tc: &TwistedComplex<Nod<Ch>>) -> Result<(Window, BTreeMap<i64, RightModule<Ch>>)> {
    let w = tc.require_support("the module construction")?;
    let objects = tc.objects().expect("bounded").clone();
    if objects.is_empty() {
        return Err(Error::Invalid("empty twisted complex of modules".into()));
    }
    Ok((w, objects))
}

pub fn phi_object(nod: &Nod<Ch>, tc: &TwistedComplex<Nod<Ch>>) -> Result<RightModule<Tw<Ch>>> {
    let ch = nod.base;
    let (_, objects) = modules(tc)?;
    let alg = objects.values().next().unwrap().alg.clone();
    let inner: BTreeMap<i64, _> = objects.iter().map(|(i, m)| (*i, m.object().clone())).collect();
    let diffs = tc.diffs().expect("bounded");
    let mut first = BTreeMap::new();
    let mut arity = 1;
    for ((i, j), a) in diffs {
        if let Some(a1) = a.component(1) {
            first.insert((*i, *j), a1.clone());
        }
        arity = arity.max(a.components().keys().next_back().copied().unwrap_or(1));
    }
    for m in objects.values() {
        arity = arity.max(m.ops().keys().next_back().copied().unwrap_or(1));
    }
    let t = TwistedComplex::bounded(&ch, inner, first)?;
    let mut ops = BTreeMap::new();
    for r in 2..=arity {
        let k = r as i64 - 1;
        let mut comps: BTreeMap<(i64, i64), GradedMap> = BTreeMap::new();
        for ((i, j), a) in diffs {
            if let Some(ar) = a.component(r) {
                comps.insert((*i, *j), ar.signed(i * k));
            }
        }
        for (i, m) in &objects {
            if let Some(p) = m.op(r) {
                let term = p.signed(i * (k + 1));
                let sum = match comps.remove(&(*i, *i)) {
                    Some(c) => c.add(&term)?,
                    None => term,
                };
                comps.insert((*i, *i), sum);
            }
        }
        ops.insert(r, TwistedMorphism::new(&ch, 1 - k, comps)?);
    }
    RightModule::new(&Tw::new(ch), "phi", alg, t, ops)
}

/// `Φ(f)_r|_{i->j} = (-1)^{i(r-1)} f_ij,r`.
pub fn phi_morphism(
    nod: &Nod<Ch>,
    f: &TwistedMorphism<Nod<Ch>>,
    source: &TwistedComplex<Nod<Ch>>,
    target: &TwistedComplex<Nod<Ch>>,
) -> Result<ModMorphism<Tw<Ch>>> {
    let ch = nod.base;
    let ps = phi_object(nod, source)?;
    let pt = phi_object(nod, target)?;
    let mut by_arity: BTreeMap<usize, BTreeMap<(i64, i64), GradedMap>> = BTreeMap::new();
    for ((i, j), fij) in f.components() {
        for (r, m) in fij.components() {
            by_arity.entry(*r).or_default().insert((*i, *j), m.signed(morphism_sign(*i, *r)));
        }
    }
    let mut comps = BTreeMap::new();
    for (r, c) in by_arity {
        comps.insert(r, TwistedMorphism::new(&ch, f.degree() + 1 - r as i64, c)?);
    }
    ModMorphism::new(&Tw::new(ch), ps, pt, f.degree(), comps)
}

/// Inverse of [`phi_morphism`] on components.
pub fn phi_morphism_inverse(
    nod: &Nod<Ch>,
    g: &ModMorphism<Tw<Ch>>,
    source: &TwistedComplex<Nod<Ch>>,
    target: &TwistedComplex<Nod<Ch>>,
) -> Result<TwistedMorphism<Nod<Ch>>> {
    let (_, src) = modules(source)?;
    let (_, tgt) = modules(target)?;
    let mut parts: BTreeMap<(i64, i64), BTreeMap<usize, GradedMap>> = BTreeMap::new();
    for (r, gr) in g.components() {
        for ((i, j), m) in gr.components() {
            parts.entry((*i, *j)).or_default().insert(*r, m.signed(morphism_sign(*i, *r)));
        }
    }
    let mut comps = BTreeMap::new();
    for ((i, j), c) in parts {
        let (Some(e), Some(f)) = (src.get(&i), tgt.get(&j)) else {
            return Err(Error::Support(format!("component ({i},{j}) leaves the given complexes")));
        };
        comps.insert((i, j), ModMorphism::new(&nod.base, e.clone(), f.clone(), g.degree() + i - j, c)?);
    }
    TwistedMorphism::new(nod, g.degree(), comps)
}

/// First disagreement between the two sides of the bar square.
#[derive(Clone, Debug)]
pub enum SquareMismatch {
    Object { cell: Cell },
    Map { source: Cell, target: Cell, left: Option<GradedMap>, right: Option<GradedMap> },
}

fn first_map_mismatch(
    left: &BTreeMap<(Cell, Cell), GradedMap>,
    right: &BTreeMap<(Cell, Cell), GradedMap>,
) -> Option<SquareMismatch> {
    let mut keys: Vec<&(Cell, Cell)> = left.keys().chain(right.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let (l, r) = (left.get(k), right.get(k));
        let same = match (l, r) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            (None, None) => true,
        };
        (!same).then(|| SquareMismatch::Map { source: k.0, target: k.1, left: l.cloned(), right: r.cloned() })
    })
}

/// The bars of the modules and diffs of `tc`, as a twisted complex of
/// twisted complexes on words of length at most `nod.words`.
pub fn bar_of_complex(nod: &Nod<Ch>, tc: &TwistedComplex<Nod<Ch>>) -> Result<TwistedComplex<Tw<Ch>>> {
    let ch = nod.base;
    let w = Window::words(nod.words);
    let (_, objects) = modules(tc)?;
    let mut bars = BTreeMap::new();
    for (i, m) in &objects {
        bars.insert(*i, bar_module_right(&ch, m).truncate(&ch, w)?);
    }
    let mut diffs = BTreeMap::new();
    for ((i, j), a) in tc.diffs().expect("bounded") {
        diffs.insert((*i, *j), bar_right_morphism(&ch, a, nod.words)?);
    }
    TwistedComplex::bounded(&Tw::new(ch), bars, diffs)
}

/// Compares `σ(cxcol(bars of tc))` with `cxrow(bar(Φ(tc)))` cell by cell.
pub fn phi_square(nod: &Nod<Ch>, tc: &TwistedComplex<Nod<Ch>>) -> Result<Option<SquareMismatch>> {
    let ch = nod.base;
    let tw = Tw::new(ch);
    let left = sigma(&ch, &cxcol(&ch, &bar_of_complex(nod, tc)?)?);
    let phi = phi_object(nod, tc)?;
    let right = cxrow(&ch, &bar_module_right(&tw, &phi).truncate(&tw, Window::words(nod.words))?)?;
    let mut cells: Vec<&Cell> = left.objects().keys().chain(right.objects().keys()).collect();
    cells.sort();
    cells.dedup();
    for c in cells {
        let same = match (left.object(*c), right.object(*c)) {
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.space().is_zero(),
            (None, None) => true,
        };
        if !same {
            return Ok(Some(SquareMismatch::Object { cell: *c }));
        }
    }
    Ok(first_map_mismatch(left.diffs(), right.diffs()))
}

/// The morphism version of [`phi_square`].
pub fn phi_square_morphism(
    nod: &Nod<Ch>,
    f: &TwistedMorphism<Nod<Ch>>,
    source: &TwistedComplex<Nod<Ch>>,
    target: &TwistedComplex<Nod<Ch>>,
) -> Result<Option<SquareMismatch>> {
    let ch = nod.base;
    let mut comps = BTreeMap::new();
    for ((i, j), fij) in f.components() {
        comps.insert((*i, *j), bar_right_morphism(&ch, fij, nod.words)?);
    }
    let bf = TwistedMorphism::new(&Tw::new(ch), f.degree(), comps)?;
    let left = sigma_morphism(&ch, &cxcol_morphism(&ch, &bf)?);
    let g = phi_morphism(nod, f, source, target)?;
    let right = cxrow_morphism(&ch, &bar_right_morphism(&Tw::new(ch), &g, nod.words)?)?;
    Ok(first_map_mismatch(left.components(), right.components()))
}
