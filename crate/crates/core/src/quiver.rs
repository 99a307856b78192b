//! Finite DG categories presented by hom complexes and structure maps.

use std::collections::BTreeMap;

use crate::category::DgCategory;
use crate::complex::{Complex, HomBasis};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::{ColumnAccumulator, Matrix};
use crate::scalar::{Field, Scalar};
use crate::tensor::TensorLayout;

/// A DG category with finitely many objects. `homs[(a, b)]` is the
/// differential of `hom(a, b)`; `compositions[(a, b, c)]` is the degree-0
/// map `hom(b, c) ⊗ hom(a, b) -> hom(a, c)`. Missing entries are zero.
#[derive(Clone, Debug)]
pub struct DgQuiver {
    field: Field,
    objects: Vec<String>,
    homs: BTreeMap<(usize, usize), GradedMap>,
    compositions: BTreeMap<(usize, usize, usize), GradedMap>,
    units: BTreeMap<usize, Vec<Scalar>>,
}

/// A homogeneous element of `hom(source, target)` in coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMorphism {
    pub source: usize,
    pub target: usize,
    pub degree: i64,
    pub coords: Vec<Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuiverLaw {
    DSquared,
    Leibniz,
    Associativity,
    UnitClosed,
    LeftUnit,
    RightUnit,
}

/// The first violated identity: the law, the objects involved and the basis
/// elements `(degree, index)` it was evaluated on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverViolation {
    pub law: QuiverLaw,
    pub objects: Vec<String>,
    pub basis: Vec<(i64, usize)>,
}

impl DgQuiver {
    pub fn new(field: Field, objects: Vec<String>) -> DgQuiver {
        DgQuiver { field, objects, homs: BTreeMap::new(), compositions: BTreeMap::new(), units: BTreeMap::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    fn check_object(&self, a: usize) -> Result<()> {
        if a >= self.objects.len() {
            return Err(Error::Invalid(format!("object index {a} out of range")));
        }
        Ok(())
    }

    /// Sets the differential of `hom(a, b)`; d∘d = 0 is checked by [`check_dg_quiver`].
    pub fn set_hom(&mut self, a: usize, b: usize, d: GradedMap) -> Result<()> {
        self.check_object(a)?;
        self.check_object(b)?;
        if d.degree() != 1 || d.source() != d.target() {
            return Err(Error::Shape(format!("hom({a},{b}) differential must be a degree 1 endomorphism")));
        }
        self.homs.insert((a, b), d);
        Ok(())
    }

    pub fn set_composition(&mut self, a: usize, b: usize, c: usize, m: GradedMap) -> Result<()> {
        let src = TensorLayout::new(&[self.hom_space(b, c), self.hom_space(a, b)]);
        if m.degree() != 0 || m.source() != src.space() || m.target() != &self.hom_space(a, c) {
            return Err(Error::Shape(format!("composition ({a},{b},{c}) has the wrong shape")));
        }
        self.compositions.insert((a, b, c), m);
        Ok(())
    }

    pub fn set_unit(&mut self, a: usize, coords: Vec<Scalar>) -> Result<()> {
        if coords.len() != self.hom_space(a, a).dim(0) {
            return Err(Error::Shape(format!("unit of object {a} has the wrong length")));
        }
        self.units.insert(a, coords);
        Ok(())
    }

    pub fn hom_space(&self, a: usize, b: usize) -> GradedSpace {
        self.homs.get(&(a, b)).map(|d| d.source().clone()).unwrap_or_default()
    }

    pub fn hom_differential(&self, a: usize, b: usize) -> GradedMap {
        self.homs
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| GradedMap::zero(self.field, GradedSpace::zero(), GradedSpace::zero(), 1))
    }

    pub fn composition(&self, a: usize, b: usize, c: usize) -> Option<&GradedMap> {
        self.compositions.get(&(a, b, c))
    }

    pub fn composition_mut(&mut self, a: usize, b: usize, c: usize) -> Option<&mut GradedMap> {
        self.compositions.get_mut(&(a, b, c))
    }

    pub fn unit(&self, a: usize) -> QuiverMorphism {
        let coords = self
            .units
            .get(&a)
            .cloned()
            .unwrap_or_else(|| vec![self.field.zero(); self.hom_space(a, a).dim(0)]);
        QuiverMorphism { source: a, target: a, degree: 0, coords }
    }

    pub fn homs(&self) -> impl Iterator<Item = (&(usize, usize), &GradedMap)> {
        self.homs.iter()
    }

    pub fn compositions(&self) -> impl Iterator<Item = (&(usize, usize, usize), &GradedMap)> {
        self.compositions.iter()
    }

    pub fn units(&self) -> impl Iterator<Item = (&usize, &Vec<Scalar>)> {
        self.units.iter()
    }

    pub fn basis(&self, a: usize, b: usize, degree: i64, i: usize) -> QuiverMorphism {
        let mut coords = vec![self.field.zero(); self.hom_space(a, b).dim(degree)];
        coords[i] = self.field.one();
        QuiverMorphism { source: a, target: b, degree, coords }
    }

    fn zero_morphism(&self, a: usize, b: usize, degree: i64) -> QuiverMorphism {
        QuiverMorphism { source: a, target: b, degree, coords: vec![self.field.zero(); self.hom_space(a, b).dim(degree)] }
    }

    fn compose_coords(&self, g: &QuiverMorphism, f: &QuiverMorphism) -> Result<QuiverMorphism> {
        if f.target != g.source {
            return Err(Error::Shape(format!("cannot compose {}->{} after {}->{}", g.source, g.target, f.source, f.target)));
        }
        let (a, b, c) = (f.source, f.target, g.target);
        let degree = g.degree + f.degree;
        let mut out = self.zero_morphism(a, c, degree);
        let Some(m) = self.compositions.get(&(a, b, c)) else { return Ok(out) };
        let layout = TensorLayout::new(&[self.hom_space(b, c), self.hom_space(a, b)]);
        for (i, x) in g.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in f.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let pos = layout.encode(&[g.degree, f.degree], &[i, j]);
                let xy = x * y;
                for (r, v) in m.column(degree, pos) {
                    out.coords[*r] += &(&xy * v);
                }
            }
        }
        Ok(out)
    }

    fn d_coords(&self, f: &QuiverMorphism) -> QuiverMorphism {
        let d = self.hom_differential(f.source, f.target);
        let mut out = self.zero_morphism(f.source, f.target, f.degree + 1);
        for (c, x) in f.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, v) in d.column(f.degree, c) {
                out.coords[*r] += &(x * v);
            }
        }
        out
    }

    /// The quiver whose objects are the given complexes, with `hom_complex`
    /// homs, composition of maps and identity units.
    pub fn from_complexes(field: Field, named: &[(String, Complex)]) -> Result<DgQuiver> {
        let mut q = DgQuiver::new(field, named.iter().map(|(n, _)| n.clone()).collect());
        let bases: BTreeMap<(usize, usize), HomBasis> = (0..named.len())
            .flat_map(|a| (0..named.len()).map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), HomBasis::new(field, named[a].1.space(), named[b].1.space())))
            .collect();
        for a in 0..named.len() {
            for b in 0..named.len() {
                let hc = crate::complex::hom_complex(&named[a].1, &named[b].1)?;
                q.set_hom(a, b, hc.differential().clone())?;
            }
        }
        for a in 0..named.len() {
            for b in 0..named.len() {
                for c in 0..named.len() {
                    let (bc, ab, ac) = (&bases[&(b, c)], &bases[&(a, b)], &bases[&(a, c)]);
                    let layout = TensorLayout::new(&[bc.space(), ab.space()]);
                    let target = ac.space();
                    let mut blocks = BTreeMap::new();
                    for (n, dim) in layout.space().dims() {
                        let mut columns = Vec::with_capacity(*dim);
                        for pos in 0..*dim {
                            let (degs, idx) = layout.decode(*n, pos);
                            let g = bc.basis_map(degs[0], idx[0])?;
                            let f = ab.basis_map(degs[1], idx[1])?;
                            let gf = g.compose(&f)?;
                            let mut acc = ColumnAccumulator::new();
                            for (r, v) in ac.coords(&gf).into_iter().enumerate() {
                                acc.add(r, v);
                            }
                            columns.push(acc.finish());
                        }
                        blocks.insert(*n, Matrix::from_columns(field, target.dim(*n), columns)?);
                    }
                    let m = GradedMap::from_blocks(field, layout.space().clone(), target, 0, blocks)?;
                    q.set_composition(a, b, c, m)?;
                }
            }
            let id = named[a].1.identity();
            q.set_unit(a, bases[&(a, a)].coords(&id))?;
        }
        Ok(q)
    }
}

impl DgCategory for DgQuiver {
    type Object = usize;
    type Morphism = QuiverMorphism;

    fn field(&self) -> Field {
        self.field
    }

    fn degree(&self, f: &QuiverMorphism) -> i64 {
        f.degree
    }

    fn zero(&self, source: &usize, target: &usize, degree: i64) -> QuiverMorphism {
        self.zero_morphism(*source, *target, degree)
    }

    fn identity(&self, object: &usize) -> QuiverMorphism {
        self.unit(*object)
    }

    fn compose(&self, g: &QuiverMorphism, f: &QuiverMorphism) -> Result<QuiverMorphism> {
        self.compose_coords(g, f)
    }

    fn add(&self, f: &QuiverMorphism, g: &QuiverMorphism) -> Result<QuiverMorphism> {
        if (f.source, f.target, f.degree) != (g.source, g.target, g.degree) {
            return Err(Error::Shape("adding quiver morphisms of different type".into()));
        }
        let coords = f.coords.iter().zip(&g.coords).map(|(x, y)| x + y).collect();
        Ok(QuiverMorphism { coords, ..f.clone() })
    }

    fn scale(&self, c: &Scalar, f: &QuiverMorphism) -> QuiverMorphism {
        QuiverMorphism { coords: f.coords.iter().map(|x| x * c).collect(), ..f.clone() }
    }

    fn differential(&self, _source: &usize, _target: &usize, f: &QuiverMorphism) -> Result<QuiverMorphism> {
        Ok(self.d_coords(f))
    }

    fn is_zero(&self, f: &QuiverMorphism) -> bool {
        f.coords.iter().all(Scalar::is_zero)
    }

    fn support(&self, f: &QuiverMorphism) -> Vec<i64> {
        if self.is_zero(f) {
            Vec::new()
        } else {
            vec![f.degree]
        }
    }
}

/// Checks d² = 0, the Leibniz rule, associativity and the unit laws on all
/// basis elements; returns the first violation found.
pub fn check_dg_quiver(q: &DgQuiver) -> Result<Option<QuiverViolation>> {
    let n = q.objects.len();
    let name = |a: usize| q.objects[a].clone();
    let basis_of = |a: usize, b: usize| -> Vec<QuiverMorphism> {
        let s = q.hom_space(a, b);
        s.dims().iter().flat_map(|(deg, dim)| (0..*dim).map(move |i| (*deg, i))).map(|(deg, i)| q.basis(a, b, deg, i)).collect()
    };
    let key = |f: &QuiverMorphism| (f.degree, f.coords.iter().position(|x| !x.is_zero()).unwrap_or(0));
    for a in 0..n {
        for b in 0..n {
            let d = q.hom_differential(a, b);
            if let Some(deg) = d.compose(&d)?.support().first() {
                return Ok(Some(QuiverViolation {
                    law: QuiverLaw::DSquared,
                    objects: vec![name(a), name(b)],
                    basis: vec![(*deg, 0)],
                }));
            }
        }
    }
    for a in 0..n {
        let u = q.unit(a);
        if !q.is_zero(&q.d_coords(&u)) {
            return Ok(Some(QuiverViolation { law: QuiverLaw::UnitClosed, objects: vec![name(a)], basis: vec![] }));
        }
        for b in 0..n {
            for f in basis_of(a, b) {
                if q.compose_coords(&q.unit(b), &f)? != f {
                    return Ok(Some(QuiverViolation {
                        law: QuiverLaw::LeftUnit,
                        objects: vec![name(a), name(b)],
                        basis: vec![key(&f)],
                    }));
                }
                if q.compose_coords(&f, &q.unit(a))? != f {
                    return Ok(Some(QuiverViolation {
                        law: QuiverLaw::RightUnit,
                        objects: vec![name(a), name(b)],
                        basis: vec![key(&f)],
                    }));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let fs = basis_of(a, b);
            for c in 0..n {
                let gs = basis_of(b, c);
                for g in &gs {
                    for f in &fs {
                        let lhs = q.d_coords(&q.compose_coords(g, f)?);
                        let t1 = q.compose_coords(&q.d_coords(g), f)?;
                        let t2 = q.signed(g.degree, &q.compose_coords(g, &q.d_coords(f))?);
                        let rhs = q.add(&t1, &t2)?;
                        if lhs != rhs {
                            return Ok(Some(QuiverViolation {
                                law: QuiverLaw::Leibniz,
                                objects: vec![name(a), name(b), name(c)],
                                basis: vec![key(g), key(f)],
                            }));
                        }
                    }
                }
                for d in 0..n {
                    let hs = basis_of(c, d);
                    for h in &hs {
                        for g in &gs {
                            let hg = q.compose_coords(h, g)?;
                            for f in &fs {
                                let lhs = q.compose_coords(&hg, f)?;
                                let rhs = q.compose_coords(h, &q.compose_coords(g, f)?)?;
                                if lhs != rhs {
                                    return Ok(Some(QuiverViolation {
                                        law: QuiverLaw::Associativity,
                                        objects: vec![name(a), name(b), name(c), name(d)],
                                        basis: vec![key(h), key(g), key(f)],
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_object_with_scalar_endomorphisms_passes() {
        let q = Field::Rationals;
        let quiver = DgQuiver::from_complexes(q, &[("k".into(), Complex::unit(q))]).unwrap();
        assert_eq!(check_dg_quiver(&quiver).unwrap(), None);
        assert_eq!(quiver.hom_space(0, 0), GradedSpace::line(0));
    }
}
