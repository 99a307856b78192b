//! Cochain complexes and the basic constructions on them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::{self, Matrix};
use crate::scalar::{Field, Scalar};
use crate::tensor::{tensor_maps, TensorFactor};

/// A graded space with a degree +1 differential squaring to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    d: GradedMap,
}

impl Complex {
    pub fn new(d: GradedMap) -> Result<Complex> {
        if d.degree() != 1 {
            return Err(Error::Degree(format!("differential has degree {}, expected 1", d.degree())));
        }
        if d.source() != d.target() {
            return Err(Error::Shape("differential must be an endomorphism".into()));
        }
        let dd = d.compose(&d)?;
        if let Some(n) = dd.support().first() {
            return Err(Error::NotAComplex(*n));
        }
        Ok(Complex { d })
    }

    /// A graded space with zero differential.
    pub fn from_space(field: Field, space: GradedSpace) -> Complex {
        Complex { d: GradedMap::zero(field, space.clone(), space, 1) }
    }

    pub fn zero(field: Field) -> Complex {
        Complex::from_space(field, GradedSpace::zero())
    }

    /// The ground field in degree 0.
    pub fn unit(field: Field) -> Complex {
        Complex::from_space(field, GradedSpace::line(0))
    }

    pub fn field(&self) -> Field {
        self.d.field()
    }

    pub fn space(&self) -> &GradedSpace {
        self.d.source()
    }

    pub fn differential(&self) -> &GradedMap {
        &self.d
    }

    pub fn identity(&self) -> GradedMap {
        GradedMap::identity(self.field(), self.space())
    }

    /// `E[n]` with `E[n]^m = E^{m+n}`. The differential of `E[n]` is
    /// `(-1)^n d_E`; this is the sign that makes the twisted-complex equation
    /// equivalent to `D^2 = 0` on the convolution.
    pub fn shift(&self, n: i64) -> Complex {
        Complex { d: self.d.reindex(n, n).signed(n) }
    }

    /// `d_E + f` for a Maurer-Cartan element `f`.
    pub fn perturb(&self, f: &GradedMap) -> Result<Complex> {
        if f.degree() != 1 || f.source() != self.space() || f.target() != self.space() {
            return Err(Error::Shape("perturbation must be a degree 1 endomorphism".into()));
        }
        let residual = hom_differential(self, self, f)?.add(&f.compose(f)?)?;
        if !residual.is_zero() {
            return Err(Error::NotMaurerCartan { residual: Box::new(residual) });
        }
        Complex::new(self.d.add(f)?)
    }

    /// Ranks of `d` and dimensions of cohomology, degree by degree.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for n in self.space().degrees() {
            let rank_out = self.d.block(n).map_or(0, Matrix::rank);
            let rank_in = self.d.block(n - 1).map_or(0, Matrix::rank);
            let h = self.space().dim(n) - rank_out - rank_in;
            if h > 0 {
                out.insert(n, h);
            }
        }
        out
    }
}

/// A finite direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub complex: Complex,
    pub inclusions: Vec<GradedMap>,
    pub projections: Vec<GradedMap>,
}

/// Degreewise direct sum; summands are stacked in list order inside each degree.
pub fn direct_sum(field: Field, summands: &[&Complex]) -> Result<DirectSum> {
    let space = GradedSpace::direct_sum(&summands.iter().map(|c| c.space()).collect::<Vec<_>>());
    let mut offsets: Vec<BTreeMap<i64, usize>> = Vec::new();
    let mut running: BTreeMap<i64, usize> = BTreeMap::new();
    for c in summands {
        if c.field() != field {
            return Err(Error::FieldMismatch(field, c.field()));
        }
        let mut off = BTreeMap::new();
        for (n, d) in c.space().dims() {
            let r = running.entry(*n).or_insert(0);
            off.insert(*n, *r);
            *r += d;
        }
        offsets.push(off);
    }
    let mut d_cols: BTreeMap<i64, Vec<Vec<(usize, Scalar)>>> =
        space.dims().iter().map(|(n, d)| (*n, vec![Vec::new(); *d])).collect();
    let mut inclusions = Vec::new();
    let mut projections = Vec::new();
    for (k, c) in summands.iter().enumerate() {
        let mut inc = BTreeMap::new();
        let mut proj = BTreeMap::new();
        for (n, dim) in c.space().dims() {
            let o = offsets[k][n];
            let total = space.dim(*n);
            let inc_cols = (0..*dim).map(|i| vec![(o + i, field.one())]).collect();
            inc.insert(*n, Matrix::from_columns(field, total, inc_cols)?);
            let mut proj_cols = vec![Vec::new(); total];
            for i in 0..*dim {
                proj_cols[o + i].push((i, field.one()));
            }
            proj.insert(*n, Matrix::from_columns(field, *dim, proj_cols)?);
            if let Some(b) = c.differential().block(*n) {
                let o_t = offsets[k][&(n + 1)];
                for (col, entries) in b.columns().iter().enumerate() {
                    d_cols.get_mut(n).unwrap()[o + col].extend(entries.iter().map(|(r, v)| (o_t + r, v.clone())));
                }
            }
        }
        inclusions.push(GradedMap::from_blocks(field, c.space().clone(), space.clone(), 0, inc)?);
        projections.push(GradedMap::from_blocks(field, space.clone(), c.space().clone(), 0, proj)?);
    }
    let mut blocks = BTreeMap::new();
    for (n, cols) in d_cols {
        blocks.insert(n, Matrix::from_columns(field, space.dim(n + 1), cols)?);
    }
    let d = GradedMap::from_blocks(field, space.clone(), space, 1, blocks)?;
    Ok(DirectSum { complex: Complex::new(d)?, inclusions, projections })
}

/// Tensor product of a flat list of complexes, with the Koszul differential
/// `Σ_k id ⊗ ... ⊗ d_k ⊗ ... ⊗ id`.
pub fn tensor_complexes(field: Field, factors: &[&Complex]) -> Result<Complex> {
    let spaces: Vec<GradedSpace> = factors.iter().map(|c| c.space().clone()).collect();
    let ids: Vec<GradedMap> = factors.iter().map(|c| c.identity()).collect();
    let mut d: Option<GradedMap> = None;
    for k in 0..factors.len() {
        let parts: Vec<TensorFactor<'_>> = (0..factors.len())
            .map(|j| {
                let m = if j == k { factors[j].differential() } else { &ids[j] };
                TensorFactor::new(m, vec![spaces[j].clone()], vec![spaces[j].clone()])
            })
            .collect();
        let term = tensor_maps(field, &parts)?;
        d = Some(match d {
            Some(acc) => acc.add(&term)?,
            None => term,
        });
    }
    match d {
        Some(d) => Complex::new(d),
        None => Ok(Complex::unit(field)),
    }
}

pub fn tensor(e: &Complex, f: &Complex) -> Result<Complex> {
    tensor_complexes(e.field(), &[e, f])
}

/// `f ⊗ g` for maps between single complexes.
pub fn tensor_map(f: &GradedMap, g: &GradedMap) -> Result<GradedMap> {
    tensor_maps(f.field(), &[TensorFactor::single(f), TensorFactor::single(g)])
}

/// `d_F ∘ f - (-1)^{|f|} f ∘ d_E`.
pub fn hom_differential(e: &Complex, f_cx: &Complex, f: &GradedMap) -> Result<GradedMap> {
    if f.source() != e.space() || f.target() != f_cx.space() {
        return Err(Error::Shape("map does not go between the given complexes".into()));
    }
    let a = f_cx.differential().compose(f)?;
    let b = f.compose(e.differential())?.signed(f.degree());
    a.sub(&b)
}

/// Coordinates on `Hom(E, F)`: the degree-`n` piece is the direct sum over
/// source degrees `p` (ascending) of `F^{p+n} x E^p` matrices, row-major.
#[derive(Clone, Debug)]
pub struct HomBasis {
    field: Field,
    source: GradedSpace,
    target: GradedSpace,
    /// degree -> list of (source degree, offset, rows, cols)
    pieces: BTreeMap<i64, Vec<(i64, usize, usize, usize)>>,
}

impl HomBasis {
    pub fn new(field: Field, source: &GradedSpace, target: &GradedSpace) -> HomBasis {
        let mut pieces: BTreeMap<i64, Vec<(i64, usize, usize, usize)>> = BTreeMap::new();
        for (p, cols) in source.dims() {
            for (q, rows) in target.dims() {
                let n = q - p;
                let list = pieces.entry(n).or_default();
                let offset = list.last().map_or(0, |(_, o, r, c)| o + r * c);
                list.push((*p, offset, *rows, *cols));
            }
        }
        for list in pieces.values_mut() {
            list.sort_by_key(|x| x.0);
            let mut off = 0;
            for x in list.iter_mut() {
                x.1 = off;
                off += x.2 * x.3;
            }
        }
        HomBasis { field, source: source.clone(), target: target.clone(), pieces }
    }

    pub fn space(&self) -> GradedSpace {
        GradedSpace::new(self.pieces.iter().map(|(n, l)| (*n, l.iter().map(|(_, _, r, c)| r * c).sum())))
    }

    pub fn dim(&self, n: i64) -> usize {
        self.pieces.get(&n).map_or(0, |l| l.iter().map(|(_, _, r, c)| r * c).sum())
    }

    /// Coordinates of a degree-`n` map.
    pub fn coords(&self, f: &GradedMap) -> Vec<Scalar> {
        let n = f.degree();
        let mut v = vec![self.field.zero(); self.dim(n)];
        if let Some(list) = self.pieces.get(&n) {
            for (p, off, _, cols) in list {
                if let Some(b) = f.block(*p) {
                    for (c, col) in b.columns().iter().enumerate() {
                        for (r, x) in col {
                            v[off + r * cols + c] = x.clone();
                        }
                    }
                }
            }
        }
        v
    }

    /// The degree-`n` map with the given coordinates.
    pub fn map(&self, n: i64, coords: &[Scalar]) -> Result<GradedMap> {
        let mut blocks = BTreeMap::new();
        if let Some(list) = self.pieces.get(&n) {
            for (p, off, rows, cols) in list {
                let mut columns = vec![Vec::new(); *cols];
                for r in 0..*rows {
                    for (c, column) in columns.iter_mut().enumerate() {
                        let x = &coords[off + r * cols + c];
                        if !x.is_zero() {
                            column.push((r, x.clone()));
                        }
                    }
                }
                blocks.insert(*p, Matrix::from_columns(self.field, *rows, columns)?);
            }
        }
        GradedMap::from_blocks(self.field, self.source.clone(), self.target.clone(), n, blocks)
    }

    /// The `i`-th basis map of degree `n`.
    pub fn basis_map(&self, n: i64, i: usize) -> Result<GradedMap> {
        let mut coords = vec![self.field.zero(); self.dim(n)];
        coords[i] = self.field.one();
        self.map(n, &coords)
    }
}

/// The hom complex `Hom(E, F)` with `d(f) = d_F f - (-1)^{|f|} f d_E`,
/// in the coordinates of [`HomBasis`].
pub fn hom_complex(e: &Complex, f: &Complex) -> Result<Complex> {
    let field = e.field();
    let basis = HomBasis::new(field, e.space(), f.space());
    let space = basis.space();
    let mut blocks = BTreeMap::new();
    for (n, dim) in space.dims() {
        let mut columns = Vec::with_capacity(*dim);
        for i in 0..*dim {
            let g = basis.basis_map(*n, i)?;
            let dg = hom_differential(e, f, &g)?;
            columns.push(
                basis.coords(&dg).into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect::<Vec<_>>(),
            );
        }
        blocks.insert(*n, Matrix::from_columns(field, space.dim(n + 1), columns)?);
    }
    Complex::new(GradedMap::from_blocks(field, space.clone(), space, 1, blocks)?)
}

/// Solves `d(x) = target` in `Hom(E, F)` for `x` of degree `deg(target) - 1`.
pub fn solve_hom_boundary(e: &Complex, f: &Complex, target: &GradedMap) -> Result<Option<GradedMap>> {
    let field = e.field();
    let basis = HomBasis::new(field, e.space(), f.space());
    let n = target.degree() - 1;
    let dim = basis.dim(n);
    let rhs = basis.coords(target);
    let mut dense = vec![vec![field.zero(); dim]; rhs.len()];
    for i in 0..dim {
        let g = basis.basis_map(n, i)?;
        for (r, x) in basis.coords(&hom_differential(e, f, &g)?).into_iter().enumerate() {
            dense[r][i] = x;
        }
    }
    if dim == 0 {
        return Ok(if target.is_zero() { Some(GradedMap::zero(field, e.space().clone(), f.space().clone(), n)) } else { None });
    }
    match matrix::solve(field, &dense, &rhs) {
        Some(x) => Ok(Some(basis.map(n, &x)?)),
        None => Ok(None),
    }
}
