//! Graded vector spaces and homogeneous maps between them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Field, Scalar};

/// Finitely supported degree -> dimension map; zero dimensions are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedSpace {
    dims: BTreeMap<i64, usize>,
}

impl GradedSpace {
    pub fn zero() -> GradedSpace {
        GradedSpace::default()
    }

    pub fn new<I: IntoIterator<Item = (i64, usize)>>(dims: I) -> GradedSpace {
        let mut out = BTreeMap::new();
        for (n, d) in dims {
            if d > 0 {
                *out.entry(n).or_insert(0) += d;
            }
        }
        GradedSpace { dims: out }
    }

    /// One-dimensional space concentrated in `degree`.
    pub fn line(degree: i64) -> GradedSpace {
        GradedSpace::new([(degree, 1)])
    }

    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.dims.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.dims.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.dims.keys().next_back().copied()
    }

    /// `E[n]`, with `E[n]^m = E^{m+n}`.
    pub fn shift(&self, n: i64) -> GradedSpace {
        GradedSpace { dims: self.dims.iter().map(|(k, d)| (k - n, *d)).collect() }
    }

    pub fn direct_sum(spaces: &[&GradedSpace]) -> GradedSpace {
        GradedSpace::new(spaces.iter().flat_map(|s| s.dims.iter().map(|(k, d)| (*k, *d))))
    }
}

/// A homogeneous linear map of fixed degree. The block keyed by `n` is the
/// `dim(target, n + degree) x dim(source, n)` matrix; absent blocks are zero.
#[derive(Clone, Debug)]
pub struct GradedMap {
    field: Field,
    source: GradedSpace,
    target: GradedSpace,
    degree: i64,
    blocks: BTreeMap<i64, Matrix>,
}

impl PartialEq for GradedMap {
    fn eq(&self, other: &GradedMap) -> bool {
        self.field == other.field
            && self.degree == other.degree
            && self.source == other.source
            && self.target == other.target
            && self.blocks == other.blocks
    }
}

impl Eq for GradedMap {}

impl GradedMap {
    pub fn zero(field: Field, source: GradedSpace, target: GradedSpace, degree: i64) -> GradedMap {
        GradedMap { field, source, target, degree, blocks: BTreeMap::new() }
    }

    pub fn identity(field: Field, space: &GradedSpace) -> GradedMap {
        let blocks = space.dims.iter().map(|(n, d)| (*n, Matrix::identity(field, *d))).collect();
        GradedMap { field, source: space.clone(), target: space.clone(), degree: 0, blocks }
    }

    /// Validates block shapes; zero blocks are dropped.
    pub fn from_blocks(
        field: Field,
        source: GradedSpace,
        target: GradedSpace,
        degree: i64,
        blocks: BTreeMap<i64, Matrix>,
    ) -> Result<GradedMap> {
        let mut kept = BTreeMap::new();
        for (n, m) in blocks {
            if m.field() != field {
                return Err(Error::FieldMismatch(field, m.field()));
            }
            let (r, c) = (target.dim(n + degree), source.dim(n));
            if m.rows() != r || m.cols() != c {
                return Err(Error::Shape(format!(
                    "block at source degree {n} is {}x{}, expected {r}x{c} (target degree {})",
                    m.rows(),
                    m.cols(),
                    n + degree
                )));
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        Ok(GradedMap { field, source, target, degree, blocks: kept })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn blocks(&self) -> &BTreeMap<i64, Matrix> {
        &self.blocks
    }

    pub fn block(&self, n: i64) -> Option<&Matrix> {
        self.blocks.get(&n)
    }

    /// The block at source degree `n`, materialising zeros.
    pub fn block_or_zero(&self, n: i64) -> Matrix {
        self.blocks
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.target.dim(n + self.degree), self.source.dim(n)))
    }

    /// Image of the `c`-th basis vector of the source in degree `n`.
    pub fn column(&self, n: i64, c: usize) -> &[(usize, Scalar)] {
        match self.blocks.get(&n) {
            Some(m) => m.column(c),
            None => &[],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Degrees of the source where the map is nonzero.
    pub fn support(&self) -> Vec<i64> {
        self.blocks.keys().copied().collect()
    }

    fn same_shape(&self, other: &GradedMap, what: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!("{what}: degrees {} and {}", self.degree, other.degree)));
        }
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape(format!(
                "{what}: spaces differ ({:?} -> {:?} vs {:?} -> {:?})",
                self.source.dims, self.target.dims, other.source.dims, other.target.dims
            )));
        }
        Ok(())
    }

    /// `g ∘ f` with `g = self`.
    pub fn compose(&self, f: &GradedMap) -> Result<GradedMap> {
        if self.field != f.field {
            return Err(Error::FieldMismatch(self.field, f.field));
        }
        if f.target != self.source {
            return Err(Error::Shape(format!(
                "compose: target {:?} of the first map differs from source {:?} of the second",
                f.target.dims, self.source.dims
            )));
        }
        let mut blocks = BTreeMap::new();
        for (n, fb) in &f.blocks {
            if let Some(gb) = self.blocks.get(&(n + f.degree)) {
                let m = gb.mul(fb)?;
                if !m.is_zero() {
                    blocks.insert(*n, m);
                }
            }
        }
        Ok(GradedMap {
            field: self.field,
            source: f.source.clone(),
            target: self.target.clone(),
            degree: self.degree + f.degree,
            blocks,
        })
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.same_shape(other, "add")?;
        let mut blocks = self.blocks.clone();
        for (n, b) in &other.blocks {
            let sum = match blocks.get(n) {
                Some(a) => a.add(b)?,
                None => b.clone(),
            };
            if sum.is_zero() {
                blocks.remove(n);
            } else {
                blocks.insert(*n, sum);
            }
        }
        Ok(GradedMap { blocks, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> GradedMap {
        if c.is_zero() {
            return self.clone_shape();
        }
        GradedMap { blocks: self.blocks.iter().map(|(n, b)| (*n, b.scale(c))).collect(), ..self.clone_shape() }
    }

    pub fn neg(&self) -> GradedMap {
        GradedMap { blocks: self.blocks.iter().map(|(n, b)| (*n, b.neg())).collect(), ..self.clone_shape() }
    }

    /// Multiplies by `(-1)^e`.
    pub fn signed(&self, e: i64) -> GradedMap {
        if e.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Same spaces and degree, all blocks zero.
    pub fn clone_shape(&self) -> GradedMap {
        GradedMap::zero(self.field, self.source.clone(), self.target.clone(), self.degree)
    }

    /// The same matrices regarded as a map between shifted spaces
    /// `source[s] -> target[t]`; the degree changes by `s - t`.
    pub fn reindex(&self, s: i64, t: i64) -> GradedMap {
        GradedMap {
            field: self.field,
            source: self.source.shift(s),
            target: self.target.shift(t),
            degree: self.degree + s - t,
            blocks: self.blocks.iter().map(|(n, b)| (n - s, b.clone())).collect(),
        }
    }

    pub fn entry(&self, n: i64, r: usize, c: usize) -> Scalar {
        self.blocks.get(&n).map(|b| b.get(r, c)).unwrap_or_else(|| self.field.zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: Field) -> (GradedSpace, GradedMap) {
        let s = GradedSpace::new([(0, 2), (1, 1)]);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_ints(f, &[&[1, 2]]));
        (s.clone(), GradedMap::from_blocks(f, s.clone(), s, 1, blocks).unwrap())
    }

    #[test]
    fn identity_and_zero_compose() {
        let f = Field::prime(7).unwrap();
        let (s, d) = sample(f);
        let id = GradedMap::identity(f, &s);
        assert_eq!(id.compose(&d).unwrap(), d);
        assert_eq!(d.compose(&id).unwrap(), d);
        let z = GradedMap::zero(f, s.clone(), s, 0);
        assert!(d.compose(&z).unwrap().is_zero());
    }

    #[test]
    fn explicit_zero_blocks_are_equal_to_absent_ones() {
        let f = Field::Rationals;
        let s = GradedSpace::new([(0, 1)]);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::zeros(f, 1, 1));
        let a = GradedMap::from_blocks(f, s.clone(), s.clone(), 0, blocks).unwrap();
        assert_eq!(a, GradedMap::zero(f, s.clone(), s, 0));
    }

    #[test]
    fn shape_errors_name_the_degree() {
        let f = Field::Rationals;
        let s = GradedSpace::new([(0, 1)]);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::zeros(f, 2, 1));
        let err = GradedMap::from_blocks(f, s.clone(), s, 0, blocks).unwrap_err();
        assert!(err.to_string().contains("source degree 0"));
    }

    #[test]
    fn add_rejects_degree_mismatch() {
        let f = Field::Rationals;
        let (s, d) = sample(f);
        assert!(d.add(&GradedMap::identity(f, &s)).is_err());
        assert_eq!(d.add(&d.clone_shape()).unwrap(), d);
        assert_eq!(d.scale(&f.one()), d);
    }

    #[test]
    fn shift_moves_degrees_down() {
        let s = GradedSpace::line(0).shift(1);
        assert_eq!(s.dim(-1), 1);
        assert_eq!(s.shift(-1), GradedSpace::line(0));
    }
}
