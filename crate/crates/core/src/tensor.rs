//! Flattened tensor products of several graded factors.
//!
//! The degree-`n` piece of `V_1 ⊗ ... ⊗ V_r` is the direct sum of the blocks
//! `V_1^{p_1} ⊗ ... ⊗ V_r^{p_r}` with `Σ p = n`, ordered lexicographically by
//! `(p_1, ..., p_r)`; inside a block the basis is row-major in the factor
//! indices. Because the ordering only depends on the flat factor list,
//! regrouping a product never permutes the basis, so `A^{⊗n}` is one object.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::{ColumnAccumulator, Matrix};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug)]
struct Block {
    degs: Vec<i64>,
    dims: Vec<usize>,
    offset: usize,
    size: usize,
}

/// Basis bookkeeping for a flattened tensor product.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    space: GradedSpace,
    blocks: BTreeMap<i64, Vec<Block>>,
    index: HashMap<Vec<i64>, (i64, usize)>,
}

impl TensorLayout {
    pub fn new(factors: &[GradedSpace]) -> TensorLayout {
        let mut combos: Vec<Vec<i64>> = vec![Vec::new()];
        for f in factors {
            let mut next = Vec::new();
            for c in &combos {
                for p in f.degrees() {
                    let mut c2 = c.clone();
                    c2.push(p);
                    next.push(c2);
                }
            }
            combos = next;
        }
        combos.sort();
        let mut blocks: BTreeMap<i64, Vec<Block>> = BTreeMap::new();
        for degs in combos {
            let n: i64 = degs.iter().sum();
            let dims: Vec<usize> = degs.iter().zip(factors).map(|(p, f)| f.dim(*p)).collect();
            let size = dims.iter().product();
            let list = blocks.entry(n).or_default();
            let offset = list.last().map_or(0, |b: &Block| b.offset + b.size);
            list.push(Block { degs, dims, offset, size });
        }
        let mut index = HashMap::new();
        for (n, list) in &blocks {
            for b in list {
                index.insert(b.degs.clone(), (*n, b.offset));
            }
        }
        let space = GradedSpace::new(blocks.iter().map(|(n, l)| (*n, l.iter().map(|b| b.size).sum())));
        TensorLayout { space, blocks, index }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    /// Position of the basis element with the given factor degrees and indices.
    pub fn encode(&self, degs: &[i64], idx: &[usize]) -> usize {
        let (n, offset) = self.index[degs];
        let block = self.blocks[&n].iter().find(|b| b.offset == offset).unwrap();
        let mut pos = 0;
        for (i, d) in idx.iter().zip(&block.dims) {
            pos = pos * d + i;
        }
        offset + pos
    }

    /// Factor degrees and indices of the basis element at `pos` in degree `n`.
    pub fn decode(&self, n: i64, pos: usize) -> (Vec<i64>, Vec<usize>) {
        let list = &self.blocks[&n];
        let k = list.partition_point(|b| b.offset + b.size <= pos);
        let b = &list[k];
        let mut rest = pos - b.offset;
        let mut idx = vec![0; b.dims.len()];
        for (slot, d) in idx.iter_mut().zip(&b.dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        (b.degs.clone(), idx)
    }
}

pub fn tensor_spaces(factors: &[GradedSpace]) -> GradedSpace {
    TensorLayout::new(factors).space
}

/// One tensor factor of a map: `map` goes from the product of `source`
/// factors to the product of `target` factors.
#[derive(Clone, Debug)]
pub struct TensorFactor<'a> {
    pub map: &'a GradedMap,
    pub source: Vec<GradedSpace>,
    pub target: Vec<GradedSpace>,
}

impl<'a> TensorFactor<'a> {
    /// A map between single factors.
    pub fn single(map: &'a GradedMap) -> TensorFactor<'a> {
        TensorFactor { map, source: vec![map.source().clone()], target: vec![map.target().clone()] }
    }

    pub fn new(map: &'a GradedMap, source: Vec<GradedSpace>, target: Vec<GradedSpace>) -> TensorFactor<'a> {
        TensorFactor { map, source, target }
    }
}

type Image = Vec<(Vec<i64>, Vec<usize>, Scalar)>;

/// `g_1 ⊗ ... ⊗ g_r` with the Koszul rule
/// `(g_1 ⊗ ... ⊗ g_r)(x_1 ⊗ ... ⊗ x_r) = (-1)^{Σ_{s<t} |g_t||x_s|} g_1(x_1) ⊗ ... ⊗ g_r(x_r)`.
pub fn tensor_maps(field: Field, parts: &[TensorFactor<'_>]) -> Result<GradedMap> {
    let src_factors: Vec<GradedSpace> = parts.iter().flat_map(|p| p.source.iter().cloned()).collect();
    let tgt_factors: Vec<GradedSpace> = parts.iter().flat_map(|p| p.target.iter().cloned()).collect();
    let src = TensorLayout::new(&src_factors);
    let tgt = TensorLayout::new(&tgt_factors);
    let mut part_src = Vec::with_capacity(parts.len());
    let mut part_tgt = Vec::with_capacity(parts.len());
    for (k, p) in parts.iter().enumerate() {
        if p.map.field() != field {
            return Err(Error::FieldMismatch(field, p.map.field()));
        }
        let ls = TensorLayout::new(&p.source);
        let lt = TensorLayout::new(&p.target);
        if ls.space() != p.map.source() || lt.space() != p.map.target() {
            return Err(Error::Shape(format!("tensor factor {k} does not match its declared factor spaces")));
        }
        part_src.push(ls);
        part_tgt.push(lt);
    }
    let degree: i64 = parts.iter().map(|p| p.map.degree()).sum();
    let mut caches: Vec<HashMap<(i64, usize), Image>> = vec![HashMap::new(); parts.len()];
    let mut blocks = BTreeMap::new();
    for (n, dim) in src.space().dims() {
        let rows = tgt.space().dim(n + degree);
        if rows == 0 {
            continue;
        }
        let mut columns = Vec::with_capacity(*dim);
        for pos in 0..*dim {
            let (degs, idx) = src.decode(*n, pos);
            let mut sign_exp = 0i64;
            let mut seen_deg = 0i64;
            let mut start = 0;
            let mut empty = false;
            for (k, p) in parts.iter().enumerate() {
                let len = p.source.len();
                let sub_degs = &degs[start..start + len];
                let sub_idx = &idx[start..start + len];
                start += len;
                let pdeg: i64 = sub_degs.iter().sum();
                sign_exp += p.map.degree() * seen_deg;
                seen_deg += pdeg;
                let ppos = part_src[k].encode(sub_degs, sub_idx);
                let cache = &mut caches[k];
                if !cache.contains_key(&(pdeg, ppos)) {
                    let img: Image = p
                        .map
                        .column(pdeg, ppos)
                        .iter()
                        .map(|(r, v)| {
                            let (d, i) = part_tgt[k].decode(pdeg + p.map.degree(), *r);
                            (d, i, v.clone())
                        })
                        .collect();
                    cache.insert((pdeg, ppos), img);
                }
                if caches[k][&(pdeg, ppos)].is_empty() {
                    empty = true;
                    break;
                }
            }
            if empty {
                columns.push(Vec::new());
                continue;
            }
            // Re-walk to collect references now that every cache entry exists.
            let mut images: Vec<&Image> = Vec::with_capacity(parts.len());
            start = 0;
            for (k, p) in parts.iter().enumerate() {
                let len = p.source.len();
                let pdeg: i64 = degs[start..start + len].iter().sum();
                let ppos = part_src[k].encode(&degs[start..start + len], &idx[start..start + len]);
                start += len;
                images.push(&caches[k][&(pdeg, ppos)]);
            }
            let sign = field.sign(sign_exp);
            let mut acc = ColumnAccumulator::new();
            let mut cursor = vec![0usize; images.len()];
            'outer: loop {
                let mut out_degs = Vec::with_capacity(tgt_factors.len());
                let mut out_idx = Vec::with_capacity(tgt_factors.len());
                let mut coeff = sign.clone();
                for (k, img) in images.iter().enumerate() {
                    let (d, i, v) = &img[cursor[k]];
                    out_degs.extend_from_slice(d);
                    out_idx.extend_from_slice(i);
                    coeff = &coeff * v;
                }
                acc.add(tgt.encode(&out_degs, &out_idx), coeff);
                for k in (0..images.len()).rev() {
                    cursor[k] += 1;
                    if cursor[k] < images[k].len() {
                        continue 'outer;
                    }
                    cursor[k] = 0;
                }
                break;
            }
            columns.push(acc.finish());
        }
        blocks.insert(*n, Matrix::from_columns(field, rows, columns)?);
    }
    GradedMap::from_blocks(field, src.space().clone(), tgt.space().clone(), degree, blocks)
}

/// Identity on a product of factors, as a single tensor factor.
pub fn identity_factor(field: Field, factors: &[GradedSpace]) -> GradedMap {
    GradedMap::identity(field, &tensor_spaces(factors))
}

/// The canonical isomorphism from the flat product of all factors to the
/// product of the grouped factors `⊗_g (⊗ groups[g])`. No signs arise since
/// no factors move.
pub fn regroup(field: Field, groups: &[Vec<GradedSpace>]) -> Result<GradedMap> {
    let flat: Vec<GradedSpace> = groups.iter().flatten().cloned().collect();
    let inner: Vec<TensorLayout> = groups.iter().map(|g| TensorLayout::new(g)).collect();
    let outer = TensorLayout::new(&inner.iter().map(|l| l.space().clone()).collect::<Vec<_>>());
    let src = TensorLayout::new(&flat);
    let mut blocks = BTreeMap::new();
    for (n, dim) in src.space().dims() {
        let mut columns = Vec::with_capacity(*dim);
        for pos in 0..*dim {
            let (degs, idx) = src.decode(*n, pos);
            let (mut gdegs, mut gidx, mut start) = (Vec::new(), Vec::new(), 0);
            for (g, l) in groups.iter().zip(&inner) {
                let (d, i) = (&degs[start..start + g.len()], &idx[start..start + g.len()]);
                start += g.len();
                gdegs.push(d.iter().sum::<i64>());
                gidx.push(l.encode(d, i));
            }
            columns.push(vec![(outer.encode(&gdegs, &gidx), field.one())]);
        }
        blocks.insert(*n, Matrix::from_columns(field, outer.space().dim(*n), columns)?);
    }
    GradedMap::from_blocks(field, src.space().clone(), outer.space().clone(), 0, blocks)
}

/// Inverse of [`regroup`].
pub fn ungroup(field: Field, groups: &[Vec<GradedSpace>]) -> Result<GradedMap> {
    let r = regroup(field, groups)?;
    let blocks = r.blocks().iter().map(|(n, m)| (*n, m.transpose())).collect();
    GradedMap::from_blocks(field, r.target().clone(), r.source().clone(), 0, blocks)
}

#[cfg(test)]
mod tests {

    #[test]
    fn regroup_is_a_permutation_that_can_differ_from_identity() {
        let f = Field::Rationals;
        let v = GradedSpace::new([(0, 1), (1, 1)]);
        let a = GradedSpace::new([(0, 1), (1, 1), (2, 1)]);
        let groups = vec![vec![v.clone(), a.clone()], vec![a.clone()]];
        let r = regroup(f, &groups).unwrap();
        let u = ungroup(f, &groups).unwrap();
        assert_eq!(u.compose(&r).unwrap(), GradedMap::identity(f, r.source()));
        let n = r.source().dim(2);
        assert_ne!(r.block(2).unwrap().to_dense(), Matrix::identity(f, n).to_dense());
    }
    use super::*;

    #[test]
    fn layout_orders_blocks_lexicographically() {
        let a = GradedSpace::new([(0, 1), (1, 1)]);
        let l = TensorLayout::new(&[a.clone(), a.clone()]);
        assert_eq!(l.space().dims().clone(), GradedSpace::new([(0, 1), (1, 2), (2, 1)]).dims().clone());
        assert_eq!(l.decode(1, 0), (vec![0, 1], vec![0, 0]));
        assert_eq!(l.decode(1, 1), (vec![1, 0], vec![0, 0]));
        assert_eq!(l.encode(&[1, 0], &[0, 0]), 1);
    }

    #[test]
    fn regrouping_is_strict() {
        let f = Field::Rationals;
        let a = GradedSpace::new([(0, 1), (1, 2), (-1, 1)]);
        let aa = tensor_spaces(&[a.clone(), a.clone()]);
        let id_a = GradedMap::identity(f, &a);
        let id_aa = GradedMap::identity(f, &aa);
        let grouped = tensor_maps(
            f,
            &[TensorFactor::new(&id_aa, vec![a.clone(), a.clone()], vec![a.clone(), a.clone()]), TensorFactor::single(&id_a)],
        )
        .unwrap();
        assert_eq!(grouped, GradedMap::identity(f, &tensor_spaces(&[a.clone(), a.clone(), a])));
    }

    #[test]
    fn koszul_sign_on_odd_maps() {
        let f = Field::Rationals;
        let a = GradedSpace::new([(0, 1), (1, 1)]);
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::from_ints(f, &[&[1]]));
        let d = GradedMap::from_blocks(f, a.clone(), a.clone(), 1, blocks).unwrap();
        let id = GradedMap::identity(f, &a);
        let m = tensor_maps(f, &[TensorFactor::single(&id), TensorFactor::single(&d)]).unwrap();
        let l = TensorLayout::new(&[a.clone(), a.clone()]);
        let x = l.encode(&[1, 0], &[0, 0]);
        let y = l.encode(&[1, 1], &[0, 0]);
        assert_eq!(m.entry(1, y, x), f.int(-1));
    }
}
