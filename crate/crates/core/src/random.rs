//! Seeded generators of random valid data: complexes, maps, Maurer-Cartan
//! elements, twisted complexes, twisted complexes of twisted complexes and
//! A∞-modules.
//!
//! Validity is by construction: twisted differentials are produced by gauge
//! transforming simple seeds, so every generated complex satisfies the
//! twisted-complex equation exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ainfty::{transport, AInfAlgebra, ModMorphism, Nod, RightModule};
use crate::category::{Ch, DgCategory};
use crate::fixtures;
use crate::complex::{hom_differential, Complex, HomBasis};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::{self, Matrix};
use crate::scalar::{Field, Scalar};
use crate::twisted::{gauge_transform, tw_compose, tw_identity, tw_inverse_unipotent, Tw, TwistedComplex, TwistedMorphism, Window};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small integers over `Q` (with an occasional half), uniform residues over `F_p`.
pub fn scalar(field: Field, rng: &mut TestRng) -> Scalar {
    match field {
        Field::Rationals => {
            if rng.gen_bool(0.1) {
                field.ratio(rng.gen_range(-3..=3), 2).unwrap()
            } else {
                field.int(rng.gen_range(-3..=3))
            }
        }
        Field::Prime(p) => field.int(rng.gen_range(0..p as i64)),
    }
}

pub fn nonzero_scalar(field: Field, rng: &mut TestRng) -> Scalar {
    loop {
        let x = scalar(field, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A random matrix whose entries are nonzero with probability `density`.
pub fn matrix(field: Field, rows: usize, cols: usize, density: f64, rng: &mut TestRng) -> Matrix {
    let columns = (0..cols)
        .map(|_| (0..rows).filter_map(|r| rng.gen_bool(density).then(|| (r, scalar(field, rng)))).collect())
        .collect();
    Matrix::from_columns(field, rows, columns).expect("entries are in range")
}

/// A random invertible matrix and its inverse.
pub fn invertible_matrix(field: Field, n: usize, rng: &mut TestRng) -> (Matrix, Matrix) {
    loop {
        let m = matrix(field, n, n, 0.7, rng);
        if let Some(inv) = matrix::inverse(field, &m.to_dense()) {
            return (m, Matrix::from_dense(field, n, n, &inv).unwrap());
        }
    }
}

/// Dimensions in `0..=max_dim` on the degrees `lo..=hi`.
pub fn space(lo: i64, hi: i64, max_dim: usize, rng: &mut TestRng) -> GradedSpace {
    GradedSpace::new((lo..=hi).map(|n| (n, rng.gen_range(0..=max_dim))))
}

pub fn map(field: Field, source: &GradedSpace, target: &GradedSpace, degree: i64, rng: &mut TestRng) -> GradedMap {
    let blocks = source
        .dims()
        .iter()
        .map(|(n, c)| (*n, matrix(field, target.dim(n + degree), *c, 0.5, rng)))
        .collect();
    GradedMap::from_blocks(field, source.clone(), target.clone(), degree, blocks).expect("shapes match")
}

/// A degree-0 automorphism of a graded space and its inverse.
pub fn automorphism(field: Field, space: &GradedSpace, rng: &mut TestRng) -> (GradedMap, GradedMap) {
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    for (n, d) in space.dims() {
        let (m, inv) = invertible_matrix(field, *d, rng);
        fwd.insert(*n, m);
        bwd.insert(*n, inv);
    }
    (
        GradedMap::from_blocks(field, space.clone(), space.clone(), 0, fwd).unwrap(),
        GradedMap::from_blocks(field, space.clone(), space.clone(), 0, bwd).unwrap(),
    )
}

/// A random complex on degrees `lo..=hi`: a sum of contractible pairs and
/// lines, conjugated by a random automorphism.
pub fn complex(field: Field, lo: i64, hi: i64, max_dim: usize, rng: &mut TestRng) -> Complex {
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    let mut pairs: BTreeMap<i64, usize> = BTreeMap::new();
    for n in lo..=hi {
        let room = max_dim.saturating_sub(dims.get(&n).copied().unwrap_or(0));
        let lines = rng.gen_range(room.min(1)..=room.min(2));
        *dims.entry(n).or_insert(0) += lines;
        if n < hi {
            let room_n = max_dim.saturating_sub(dims[&n]);
            let p = rng.gen_range(0..=room_n.min(1));
            pairs.insert(n, p);
            *dims.entry(n).or_insert(0) += p;
            *dims.entry(n + 1).or_insert(0) += p;
        }
    }
    let space = GradedSpace::new(dims.iter().map(|(n, d)| (*n, *d)));
    // place each pair's source at the end of degree n and its target at the start of degree n+1
    let mut blocks = BTreeMap::new();
    for (n, p) in &pairs {
        if *p == 0 {
            continue;
        }
        let (src, tgt) = (space.dim(*n), space.dim(n + 1));
        let mut cols = vec![Vec::new(); src];
        for k in 0..*p {
            cols[src - p + k].push((k, field.one()));
        }
        blocks.insert(*n, Matrix::from_columns(field, tgt, cols).unwrap());
    }
    let d = GradedMap::from_blocks(field, space.clone(), space.clone(), 1, blocks).unwrap();
    let (g, g_inv) = automorphism(field, &space, rng);
    Complex::new(g.compose(&d).unwrap().compose(&g_inv).unwrap()).expect("conjugate of a differential")
}

/// A random element of `Z^n Hom(E, F)`.
pub fn closed_map(e: &Complex, f: &Complex, degree: i64, rng: &mut TestRng) -> GradedMap {
    let field = e.field();
    let basis = HomBasis::new(field, e.space(), f.space());
    let dim = basis.dim(degree);
    let rows = basis.dim(degree + 1);
    let mut dense = vec![vec![field.zero(); dim]; rows];
    for i in 0..dim {
        let g = basis.basis_map(degree, i).unwrap();
        for (r, x) in basis.coords(&hom_differential(e, f, &g).unwrap()).into_iter().enumerate() {
            dense[r][i] = x;
        }
    }
    let ker = if rows == 0 {
        (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect()
    } else {
        matrix::kernel(field, &dense, dim)
    };
    let mut coords = vec![field.zero(); dim];
    for v in ker {
        let c = scalar(field, rng);
        for (x, y) in coords.iter_mut().zip(v) {
            *x = &*x + &(&c * &y);
        }
    }
    basis.map(degree, &coords).unwrap()
}

/// A Maurer-Cartan element for `E`: the difference between a conjugate of
/// `d_E` and `d_E`.
pub fn maurer_cartan(e: &Complex, rng: &mut TestRng) -> GradedMap {
    let (g, g_inv) = automorphism(e.field(), e.space(), rng);
    let d = e.differential();
    g.compose(d).unwrap().compose(&g_inv).unwrap().sub(d).unwrap()
}

/// Random morphism between twisted complexes with components drawn by `draw`.
pub fn twisted_morphism_with<C: DgCategory>(
    cat: &C,
    t: &TwistedComplex<C>,
    s: &TwistedComplex<C>,
    degree: i64,
    w: Window,
    keep: impl Fn(i64, i64) -> bool,
    rng: &mut TestRng,
    draw: &mut dyn FnMut(&C::Object, &C::Object, i64, &mut TestRng) -> C::Morphism,
) -> TwistedMorphism<C> {
    let mut comps = BTreeMap::new();
    for i in t.indices(w) {
        for j in s.indices(w) {
            if keep(i, j) && rng.gen_bool(0.7) {
                let a = t.object(i).unwrap();
                let b = s.object(j).unwrap();
                comps.insert((i, j), draw(&a, &b, degree + i - j, rng));
            }
        }
    }
    TwistedMorphism::new(cat, degree, comps).expect("drawn with the right degrees")
}

/// A random degree-0 automorphism `(1 + L) D (1 + U)` of the objects of `t`
/// and its inverse. `L` and `U` are strictly lower and upper; `D` is optional.
pub fn gauge<C: DgCategory>(
    cat: &C,
    t: &TwistedComplex<C>,
    lower: bool,
    diagonal: Option<&mut dyn FnMut(&C::Object, &mut TestRng) -> (C::Morphism, C::Morphism)>,
    rng: &mut TestRng,
    draw: &mut dyn FnMut(&C::Object, &C::Object, i64, &mut TestRng) -> C::Morphism,
) -> (TwistedMorphism<C>, TwistedMorphism<C>) {
    let w = t.support().expect("bounded");
    let id = tw_identity(cat, t, w);
    let u = twisted_morphism_with(cat, t, t, 0, w, |i, j| i < j, rng, draw);
    let one_u = id.add(cat, &u).unwrap();
    let one_u_inv = tw_inverse_unipotent(cat, &one_u, t, w).unwrap();
    let (mut g, mut g_inv) = (one_u.clone(), one_u_inv);
    if let Some(diag) = diagonal {
        let mut d = BTreeMap::new();
        let mut d_inv = BTreeMap::new();
        for i in t.indices(w) {
            let (m, m_inv) = diag(&t.object(i).unwrap(), rng);
            d.insert((i, i), m);
            d_inv.insert((i, i), m_inv);
        }
        let d = TwistedMorphism::new(cat, 0, d).unwrap();
        let d_inv = TwistedMorphism::new(cat, 0, d_inv).unwrap();
        g = tw_compose(cat, &d, &g).unwrap();
        g_inv = tw_compose(cat, &g_inv, &d_inv).unwrap();
    }
    if lower {
        let l = twisted_morphism_with(cat, t, t, 0, w, |i, j| i > j, rng, draw);
        let one_l = id.add(cat, &l).unwrap();
        let one_l_inv = tw_inverse_unipotent(cat, &one_l, t, w).unwrap();
        g = tw_compose(cat, &one_l, &g).unwrap();
        g_inv = tw_compose(cat, &g_inv, &one_l_inv).unwrap();
    }
    (g, g_inv)
}

/// Size parameters for random twisted complexes.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub field: Field,
    /// Index window of the objects.
    pub window: Window,
    /// Degrees of the underlying complexes.
    pub degrees: (i64, i64),
    pub max_dim: usize,
    /// Restrict to one-sided data (`α_ij = 0` for `i >= j`).
    pub one_sided: bool,
}

fn draw_ch(field: Field) -> impl FnMut(&Complex, &Complex, i64, &mut TestRng) -> GradedMap {
    move |a: &Complex, b: &Complex, n: i64, rng: &mut TestRng| map(field, a.space(), b.space(), n, rng)
}

/// A random valid twisted complex over `Ch`.
pub fn twisted(shape: &Shape, rng: &mut TestRng) -> TwistedComplex<Ch> {
    let field = shape.field;
    let cat = Ch::new(field);
    let w = shape.window;
    let objects: BTreeMap<i64, Complex> =
        w.indices().map(|i| (i, complex(field, shape.degrees.0, shape.degrees.1, shape.max_dim, rng))).collect();
    let mut diffs = BTreeMap::new();
    for i in w.indices().step_by(2) {
        if w.contains(i + 1) {
            diffs.insert((i, i + 1), closed_map(&objects[&i], &objects[&(i + 1)], 0, rng));
        }
    }
    let seed = TwistedComplex::bounded(&cat, objects, diffs).unwrap();
    let mut draw = draw_ch(field);
    let mut diag = |a: &Complex, rng: &mut TestRng| automorphism(field, a.space(), rng);
    let diagonal: Option<&mut dyn FnMut(&Complex, &mut TestRng) -> (GradedMap, GradedMap)> =
        if shape.one_sided { None } else { Some(&mut diag) };
    let (g, g_inv) = gauge(&cat, &seed, !shape.one_sided, diagonal, rng, &mut draw);
    gauge_transform(&cat, &seed, &g, &g_inv).unwrap()
}

/// A random morphism of the given degree between bounded twisted complexes over `Ch`.
pub fn twisted_morphism(
    field: Field,
    t: &TwistedComplex<Ch>,
    s: &TwistedComplex<Ch>,
    degree: i64,
    rng: &mut TestRng,
) -> TwistedMorphism<Ch> {
    let w = t.support().unwrap().hull(&s.support().unwrap());
    twisted_morphism_with(&Ch::new(field), t, s, degree, w, |_, _| true, rng, &mut draw_ch(field))
}

/// A random closed degree-0 isomorphism out of `t` and its target.
pub fn closed_iso(
    field: Field,
    t: &TwistedComplex<Ch>,
    rng: &mut TestRng,
) -> (TwistedMorphism<Ch>, TwistedComplex<Ch>) {
    let cat = Ch::new(field);
    let mut draw = draw_ch(field);
    let mut diag = |a: &Complex, rng: &mut TestRng| automorphism(field, a.space(), rng);
    let (g, g_inv) = gauge(&cat, t, true, Some(&mut diag), rng, &mut draw);
    let s = gauge_transform(&cat, t, &g, &g_inv).unwrap();
    (g, s)
}

/// A random valid twisted complex of twisted complexes over `Ch`. `outer`
/// carries the outer window and one-sidedness; `inner` the shape of each row.
pub fn twisted_of_twisted(outer: &Shape, inner: &Shape, rng: &mut TestRng) -> TwistedComplex<Tw<Ch>> {
    let field = outer.field;
    let ch = Ch::new(field);
    let tw = Tw::new(ch);
    let w = outer.window;
    let mut objects = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut i = w.lo;
    while i <= w.hi {
        let e = twisted(inner, rng);
        if w.contains(i + 1) {
            let (g, e2) = closed_iso(field, &e, rng);
            objects.insert(i + 1, e2);
            diffs.insert((i, i + 1), g);
        }
        objects.insert(i, e);
        i += 2;
    }
    let seed = TwistedComplex::bounded(&tw, objects, diffs).unwrap();
    let inner_w = inner.window;
    let mut draw = |a: &TwistedComplex<Ch>, b: &TwistedComplex<Ch>, n: i64, rng: &mut TestRng| {
        twisted_morphism_with(&ch, a, b, n, inner_w, |_, _| true, rng, &mut draw_ch(field))
    };
    let mut diag = |a: &TwistedComplex<Ch>, rng: &mut TestRng| {
        let mut d = draw_ch(field);
        gauge(&ch, a, true, None, rng, &mut d)
    };
    let diagonal: Option<&mut dyn FnMut(&TwistedComplex<Ch>, &mut TestRng) -> (TwistedMorphism<Ch>, TwistedMorphism<Ch>)> =
        if outer.one_sided { None } else { Some(&mut diag) };
    let (g, g_inv) = gauge(&tw, &seed, !outer.one_sided, diagonal, rng, &mut draw);
    gauge_transform(&tw, &seed, &g, &g_inv).unwrap()
}

/// A random morphism between twisted complexes of twisted complexes.
pub fn twisted_of_twisted_morphism(
    field: Field,
    t: &TwistedComplex<Tw<Ch>>,
    s: &TwistedComplex<Tw<Ch>>,
    degree: i64,
    inner: Window,
    rng: &mut TestRng,
) -> TwistedMorphism<Tw<Ch>> {
    let ch = Ch::new(field);
    let tw = Tw::new(ch);
    let w = t.support().unwrap().hull(&s.support().unwrap());
    let mut draw = |a: &TwistedComplex<Ch>, b: &TwistedComplex<Ch>, n: i64, rng: &mut TestRng| {
        twisted_morphism_with(&ch, a, b, n, inner, |_, _| true, rng, &mut draw_ch(field))
    };
    twisted_morphism_with(&tw, t, s, degree, w, |_, _| true, rng, &mut draw)
}

/// Uniformly random field for property tests: `Q` or `F_101`.
pub fn field(rng: &mut TestRng) -> Field {
    if rng.gen_bool(0.5) {
        Field::Rationals
    } else {
        Field::Prime(101)
    }
}

fn module_component(
    src: &RightModule<Ch>,
    tgt: &RightModule<Ch>,
    k: usize,
    degree: i64,
    rng: &mut TestRng,
) -> GradedMap {
    let mut factors = vec![src.object().space().clone()];
    factors.extend(std::iter::repeat_n(src.alg.space().clone(), k - 1));
    let source = crate::tensor::tensor_spaces(&factors);
    map(src.alg.field(), &source, tgt.object().space(), degree + 1 - k as i64, rng)
}

/// A random degree-`degree` module morphism with components of arity at most `n`.
pub fn module_morphism(
    src: &RightModule<Ch>,
    tgt: &RightModule<Ch>,
    degree: i64,
    n: usize,
    rng: &mut TestRng,
) -> ModMorphism<Ch> {
    let mut comps = BTreeMap::new();
    for k in 1..=n {
        if rng.gen_bool(0.7) {
            comps.insert(k, module_component(src, tgt, k, degree, rng));
        }
    }
    ModMorphism::new(&Ch::new(src.alg.field()), src.clone(), tgt.clone(), degree, comps).expect("drawn with the right shapes")
}

/// A random `u: m -> m` of degree 0 with `u_1 = id`.
pub fn unipotent(m: &RightModule<Ch>, n: usize, rng: &mut TestRng) -> ModMorphism<Ch> {
    let mut comps = BTreeMap::new();
    for k in 2..=n {
        if rng.gen_bool(0.7) {
            comps.insert(k, module_component(m, m, k, 0, rng));
        }
    }
    comps.insert(1, m.object().identity());
    ModMorphism::new(&Ch::new(m.alg.field()), m.clone(), m.clone(), 0, comps).expect("drawn with the right shapes")
}

/// `u` and its inverse as the finite series `Σ (id - u)^k` in modules.
pub fn module_automorphism(nod: &Nod<Ch>, m: &RightModule<Ch>, rng: &mut TestRng) -> (ModMorphism<Ch>, ModMorphism<Ch>) {
    let u = unipotent(m, nod.words, rng);
    let id = nod.identity(m);
    let minus_n = nod.sub(&id, &u).unwrap();
    let (mut total, mut power) = (id.clone(), id);
    for _ in 1..nod.words {
        power = nod.compose(&power, &minus_n).unwrap();
        total = nod.add(&total, &power).unwrap();
    }
    (u, total)
}

/// A random right module truncated at arity `n`: the free module on a small
/// random complex, transported along a random unipotent automorphism.
pub fn right_module(alg: &Arc<AInfAlgebra>, n: usize, rng: &mut TestRng) -> RightModule<Ch> {
    let v = complex(alg.field(), -1, 0, 1, rng);
    let free = fixtures::free_module(alg, &v).unwrap();
    let u = unipotent(&free, n, rng);
    transport(&Ch::new(alg.field()), &free, &u, n).unwrap()
}

/// A random valid twisted complex of right modules on `window`: cones on
/// closed isomorphisms, gauge transformed.
pub fn twisted_modules(nod: &Nod<Ch>, alg: &Arc<AInfAlgebra>, window: Window, rng: &mut TestRng) -> TwistedComplex<Nod<Ch>> {
    let ch = nod.base;
    let mut objects = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut i = window.lo;
    while i <= window.hi {
        let m = right_module(alg, nod.words, rng);
        if window.contains(i + 1) {
            let u = unipotent(&m, nod.words, rng);
            let m2 = transport(&ch, &m, &u, nod.words).unwrap();
            let u = ModMorphism::new(&ch, m.clone(), m2.clone(), 0, u.components().clone()).unwrap();
            objects.insert(i + 1, m2);
            diffs.insert((i, i + 1), u);
        }
        objects.insert(i, m);
        i += 2;
    }
    let seed = TwistedComplex::bounded(nod, objects, diffs).unwrap();
    let words = nod.words;
    let mut draw = |a: &RightModule<Ch>, b: &RightModule<Ch>, deg: i64, rng: &mut TestRng| module_morphism(a, b, deg, words, rng);
    let mut diag = |a: &RightModule<Ch>, rng: &mut TestRng| module_automorphism(nod, a, rng);
    let (g, g_inv) = gauge(nod, &seed, true, Some(&mut diag), rng, &mut draw);
    gauge_transform(nod, &seed, &g, &g_inv).unwrap()
}

/// A random morphism between twisted complexes of modules.
pub fn twisted_modules_morphism(
    nod: &Nod<Ch>,
    t: &TwistedComplex<Nod<Ch>>,
    s: &TwistedComplex<Nod<Ch>>,
    degree: i64,
    rng: &mut TestRng,
) -> TwistedMorphism<Nod<Ch>> {
    let w = t.support().unwrap().hull(&s.support().unwrap());
    let words = nod.words;
    let mut draw = |a: &RightModule<Ch>, b: &RightModule<Ch>, deg: i64, rng: &mut TestRng| module_morphism(a, b, deg, words, rng);
    twisted_morphism_with(nod, t, s, degree, w, |_, _| true, rng, &mut draw)
}

/// The isomorphic copy of `m` along a random automorphism `u` of its
/// underlying graded space: `d' = u d u^{-1}`, `p'_k = u p_k (u^{-1} ⊗ id)`.
pub fn rebase_module(m: &RightModule<Ch>, rng: &mut TestRng) -> RightModule<Ch> {
    use crate::ainfty::RightAction;
    let field = m.alg.field();
    let ch = Ch::new(field);
    let e = m.object();
    let (u, u_inv) = automorphism(field, e.space(), rng);
    let moved = Complex::new(u.compose(e.differential()).unwrap().compose(&u_inv).unwrap()).unwrap();
    let mut ops = BTreeMap::new();
    for (k, p) in m.ops() {
        let twist = ch.act_on_morphism(&u_inv, &moved, 0, e, &m.alg, k - 1).unwrap();
        ops.insert(*k, u.compose(&p.compose(&twist).unwrap()).unwrap());
    }
    RightModule::new(&ch, m.name(), Arc::clone(&m.alg), moved, ops).unwrap()
}

/// For an algebra concentrated in degree 0 with only `m_2`: the module
/// `V ⊗ A` on a two-term `V` (degrees -1, 0) with differential
/// `Σ c_i ⊗ (a_i ·)` for random `c_i: V^{-1} -> V^0` and sparse `a_i ∈ A`
/// (often zero divisors, so the homology is usually nonzero), and
/// `p_2 = id ⊗ m_2`. Left multiplication commutes with the right action,
/// so this is a strict module.
pub fn two_term_module(alg: &Arc<AInfAlgebra>, max_dim: usize, rng: &mut TestRng) -> RightModule<Ch> {
    let field = alg.field();
    let a = alg.space();
    let dim_a = a.dim(0);
    assert!(a.dims().len() == 1 && dim_a > 0 && alg.ops().keys().eq([2].iter()), "needs a degree-0 associative algebra");
    let m2 = alg.op(2).unwrap();
    let v = GradedSpace::new([(-1, rng.gen_range(1..=max_dim)), (0, rng.gen_range(1..=max_dim))]);
    let v_cx = Complex::from_space(field, v.clone());
    let free = fixtures::free_module(alg, &v_cx).unwrap();
    let mut d = GradedMap::zero(field, free.object().space().clone(), free.object().space().clone(), 1);
    for _ in 0..rng.gen_range(1..=2) {
        let c = map(field, &v, &v, 1, rng);
        let x: Vec<Scalar> =
            (0..dim_a).map(|_| if rng.gen_bool(0.5) { scalar(field, rng) } else { field.zero() }).collect();
        // Left multiplication by x: column j is Σ_i x_i m_2(e_i ⊗ e_j).
        let cols = (0..dim_a)
            .map(|j| {
                let mut col: Vec<(usize, Scalar)> = Vec::new();
                for (i, xi) in x.iter().enumerate() {
                    for (r, val) in m2.column(0, i * dim_a + j) {
                        col.push((*r, xi * val));
                    }
                }
                col
            })
            .collect();
        let left = GradedMap::from_blocks(
            field,
            a.clone(),
            a.clone(),
            0,
            BTreeMap::from([(0, Matrix::from_columns(field, dim_a, cols).unwrap())]),
        )
        .unwrap();
        d = d.add(&crate::complex::tensor_map(&c, &left).unwrap()).unwrap();
    }
    let object = Complex::new(d).expect("two-term differentials square to zero");
    RightModule::new(&Ch::new(field), "two-term", Arc::clone(alg), object, free.ops().clone()).unwrap()
}
