//! Small named algebras and modules used by the examples, the self-test and
//! the test suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{AInfAlgebra, RightModule};
use crate::category::Ch;
use crate::complex::Complex;
use crate::error::Result;
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::Matrix;
use crate::scalar::Field;
use crate::tensor::{tensor_maps, tensor_spaces, ungroup, TensorFactor};

fn map_from_images(
    field: Field,
    source: GradedSpace,
    target: GradedSpace,
    degree: i64,
    images: &[(i64, usize, &[(usize, i64)])],
) -> Result<GradedMap> {
    let mut cols: BTreeMap<i64, Vec<Vec<(usize, crate::scalar::Scalar)>>> = BTreeMap::new();
    for (n, d) in source.dims() {
        cols.insert(*n, vec![Vec::new(); *d]);
    }
    for (n, c, img) in images {
        cols.get_mut(n).unwrap()[*c] = img.iter().map(|(r, v)| (*r, field.int(*v))).collect();
    }
    let mut blocks = BTreeMap::new();
    for (n, columns) in cols {
        blocks.insert(n, Matrix::from_columns(field, target.dim(n + degree), columns)?);
    }
    GradedMap::from_blocks(field, source, target, degree, blocks)
}

/// Upper triangular 2x2 matrices with basis `e11, e12, e22` in degree 0.
pub fn upper_triangular(field: Field) -> Arc<AInfAlgebra> {
    let a = GradedSpace::new([(0, 3)]);
    let aa = tensor_spaces(&[a.clone(), a.clone()]);
    // Basis of A ⊗ A in degree 0 is `3 i + j`.
    let m2 = map_from_images(
        field,
        aa,
        a.clone(),
        0,
        &[(0, 0, &[(0, 1)]), (0, 1, &[(1, 1)]), (0, 5, &[(1, 1)]), (0, 8, &[(2, 1)])],
    )
    .unwrap();
    AInfAlgebra::new("upper-triangular", Complex::from_space(field, a), BTreeMap::from([(2, m2)])).unwrap()
}

/// The dual numbers `k[x]/x^2` with basis `1, x` in degree 0.
pub fn dual_numbers(field: Field) -> Arc<AInfAlgebra> {
    let a = GradedSpace::new([(0, 2)]);
    let aa = tensor_spaces(&[a.clone(), a.clone()]);
    let m2 = map_from_images(field, aa, a.clone(), 0, &[(0, 0, &[(0, 1)]), (0, 1, &[(1, 1)]), (0, 2, &[(1, 1)])])
        .unwrap();
    AInfAlgebra::new("dual-numbers", Complex::from_space(field, a), BTreeMap::from([(2, m2)])).unwrap()
}

/// Basis `a, w` in degree 0 and `z` in degree -1 with `dz = w`;
/// `aa = a + w`, `aw = w`, `az = z`, all other products zero.
/// `m_2` fails associativity by a boundary, so the algebra needs `m_3`.
pub fn m2_only(field: Field) -> (Complex, GradedMap) {
    let a = GradedSpace::new([(-1, 1), (0, 2)]);
    let d = map_from_images(field, a.clone(), a.clone(), 1, &[(-1, 0, &[(1, 1)])]).unwrap();
    let aa = tensor_spaces(&[a.clone(), a.clone()]);
    // Degree 0 of A ⊗ A: `2 i + j` over `a, w`. Degree -1: `z⊗a, z⊗w, a⊗z, w⊗z`.
    let m2 = map_from_images(
        field,
        aa,
        a,
        0,
        &[(0, 0, &[(0, 1), (1, 1)]), (0, 1, &[(1, 1)]), (-1, 2, &[(0, 1)])],
    )
    .unwrap();
    (Complex::new(d).unwrap(), m2)
}

/// [`m2_only`] completed by `m_3(a, a, a) = -z`.
pub fn with_m3(field: Field) -> Arc<AInfAlgebra> {
    let (a, m2) = m2_only(field);
    let aaa = tensor_spaces(&vec![a.space().clone(); 3]);
    let m3 = map_from_images(field, aaa, a.space().clone(), -1, &[(0, 0, &[(0, -1)])]).unwrap();
    AInfAlgebra::new("m3-compensated", a, BTreeMap::from([(2, m2), (3, m3)])).unwrap()
}

/// The free module `V ⊗ A` with `p_k = id_V ⊗ m_k`.
pub fn free_module(alg: &Arc<AInfAlgebra>, v: &Complex) -> Result<RightModule<Ch>> {
    let field = alg.field();
    let a = alg.space().clone();
    let e = crate::complex::tensor(v, alg.complex())?;
    let id_v = v.identity();
    let mut ops = BTreeMap::new();
    for (k, m) in alg.ops() {
        let flat = tensor_maps(
            field,
            &[TensorFactor::single(&id_v), TensorFactor::new(m, vec![a.clone(); *k], vec![a.clone()])],
        )?;
        let mut groups = vec![vec![v.space().clone(), a.clone()]];
        groups.extend(std::iter::repeat_n(vec![a.clone()], k - 1));
        ops.insert(*k, flat.compose(&ungroup(field, &groups)?)?);
    }
    RightModule::new(&Ch::new(field), format!("free({})", alg.name()), Arc::clone(alg), e, ops)
}
