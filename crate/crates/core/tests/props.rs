use std::collections::BTreeMap;

use proptest::prelude::*;
use twistkit::ainfty::{bar_algebra, bar_module_right};
use twistkit::bitwisted::*;
use twistkit::category::Ch;
use twistkit::complex::{hom_differential, Complex};
use twistkit::error::Error;
use twistkit::fixtures;
use twistkit::graded::GradedMap;
use twistkit::matrix::{inverse, kernel, solve, Matrix};
use twistkit::random::{self, Shape, TestRng};
use twistkit::scalar::{Field, Scalar};
use twistkit::tensor::{tensor_maps, TensorFactor, TensorLayout};
use twistkit::twisted::*;

fn field_of(k: u8) -> Field {
    if k % 2 == 0 {
        Field::Rationals
    } else {
        Field::Prime(101)
    }
}

fn dense(field: Field, rows: &[Vec<i64>]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|x| field.int(*x)).collect()).collect()
}

fn apply(m: &[Vec<Scalar>], v: &[Scalar], field: Field) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(field.zero(), |acc, (a, b)| &acc + &(a * b)))
        .collect()
}

fn int_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn nonzero_maps(m: &BTreeMap<(i64, i64), GradedMap>) -> BTreeMap<(i64, i64), GradedMap> {
    m.iter().filter(|(_, a)| !a.is_zero()).map(|(k, a)| (*k, a.clone())).collect()
}

fn same_twisted(a: &TwistedComplex<Ch>, b: &TwistedComplex<Ch>) -> bool {
    a.objects() == b.objects() && nonzero_maps(a.diffs().unwrap()) == nonzero_maps(b.diffs().unwrap())
}

fn same_nested(cat: &Ch, a: &TwistedComplex<Tw<Ch>>, b: &TwistedComplex<Tw<Ch>>) -> bool {
    let (oa, ob) = (a.objects().unwrap(), b.objects().unwrap());
    let objects = oa.len() == ob.len() && oa.iter().all(|(i, e)| ob.get(i).is_some_and(|f| same_twisted(e, f)));
    let live = |t: &TwistedComplex<Tw<Ch>>| -> Vec<(i64, i64)> {
        t.diffs().unwrap().iter().filter(|(_, m)| !m.is_zero()).map(|(k, _)| *k).collect()
    };
    objects
        && live(a) == live(b)
        && live(a).iter().all(|(i, j)| a.diff(*i, *j).unwrap().equals(cat, &b.diff(*i, *j).unwrap()))
}

fn shape(field: Field, len: i64, one_sided: bool) -> Shape {
    Shape { field, window: Window::new(0, len - 1), degrees: (-1, 1), max_dim: 2, one_sided }
}

fn nested(field: Field, one_sided: bool, rng: &mut TestRng) -> TwistedComplex<Tw<Ch>> {
    random::twisted_of_twisted(&shape(field, 2, one_sided), &shape(field, 2, false), rng)
}

/// `(f ⊗ g)(v ⊗ w) = (-1)^{|g||v|} f(v) ⊗ g(w)`, read off basis by basis.
fn koszul_oracle(field: Field, f: &GradedMap, g: &GradedMap) -> GradedMap {
    let src = TensorLayout::new(&[f.source().clone(), g.source().clone()]);
    let tgt = TensorLayout::new(&[f.target().clone(), g.target().clone()]);
    let degree = f.degree() + g.degree();
    let mut blocks = BTreeMap::new();
    for (n, dim) in src.space().dims() {
        let rows = tgt.space().dim(n + degree);
        let mut m = vec![vec![field.zero(); *dim]; rows];
        for c in 0..*dim {
            let (degs, idx) = src.decode(*n, c);
            let sign = field.sign(g.degree() * degs[0]);
            for (r1, x) in f.column(degs[0], idx[0]) {
                for (r2, y) in g.column(degs[1], idx[1]) {
                    let r = tgt.encode(&[degs[0] + f.degree(), degs[1] + g.degree()], &[*r1, *r2]);
                    m[r][c] = &m[r][c] + &(&sign * &(x * y));
                }
            }
        }
        if rows > 0 {
            blocks.insert(*n, Matrix::from_dense(field, rows, *dim, &m).unwrap());
        }
    }
    GradedMap::from_blocks(field, src.space().clone(), tgt.space().clone(), degree, blocks).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_two_sided(k in 0u8..2, rows in int_matrix(4)) {
        let field = field_of(k);
        let n = rows.len();
        let square: Vec<Vec<i64>> = rows.iter().map(|r| (0..n).map(|j| r.get(j).copied().unwrap_or(j as i64 + 1)).collect()).collect();
        let m = dense(field, &square);
        let a = Matrix::from_dense(field, n, n, &m).unwrap();
        match inverse(field, &m) {
            Some(inv) => {
                let b = Matrix::from_dense(field, n, n, &inv).unwrap();
                prop_assert_eq!(a.mul(&b).unwrap(), Matrix::identity(field, n));
                prop_assert_eq!(b.mul(&a).unwrap(), Matrix::identity(field, n));
            }
            None => prop_assert!(a.rank() < n),
        }
    }

    #[test]
    fn kernel_has_the_complementary_dimension(k in 0u8..2, rows in int_matrix(5)) {
        let field = field_of(k);
        let cols = rows[0].len();
        let m = dense(field, &rows);
        let basis = kernel(field, &m, cols);
        let rank = Matrix::from_dense(field, rows.len(), cols, &m).unwrap().rank();
        prop_assert_eq!(basis.len(), cols - rank);
        for v in &basis {
            prop_assert!(apply(&m, v, field).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn solve_finds_preimages(k in 0u8..2, rows in int_matrix(5), x in prop::collection::vec(-4i64..=4, 5)) {
        let field = field_of(k);
        let m = dense(field, &rows);
        let x: Vec<Scalar> = x.iter().take(rows[0].len()).map(|v| field.int(*v)).collect();
        let b = apply(&m, &x, field);
        let y = solve(field, &m, &b).expect("b is in the image");
        prop_assert_eq!(apply(&m, &y, field), b);
    }

    #[test]
    fn tensor_products_follow_the_koszul_rule(k in 0u8..2, seed in any::<u64>(), p in -1i64..=1, q in -1i64..=1) {
        let field = field_of(k);
        let mut rng = random::rng(seed);
        let sp = |rng: &mut TestRng| random::space(-1, 1, 2, rng);
        let (v, v2, w, w2) = (sp(&mut rng), sp(&mut rng), sp(&mut rng), sp(&mut rng));
        let f = random::map(field, &v, &v2, p, &mut rng);
        let g = random::map(field, &w, &w2, q, &mut rng);
        let built = tensor_maps(field, &[TensorFactor::single(&f), TensorFactor::single(&g)]).unwrap();
        prop_assert_eq!(built, koszul_oracle(field, &f, &g));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hom_differential_squares_to_zero(k in 0u8..2, seed in any::<u64>(), deg in -1i64..=1) {
        let field = field_of(k);
        let mut rng = random::rng(seed);
        let e = random::complex(field, -1, 2, 2, &mut rng);
        let f = random::complex(field, -1, 2, 2, &mut rng);
        let m = random::map(field, e.space(), f.space(), deg, &mut rng);
        let dm = hom_differential(&e, &f, &m).unwrap();
        prop_assert!(hom_differential(&e, &f, &dm).unwrap().is_zero());
    }

    #[test]
    fn perturbation_round_trips(k in 0u8..2, seed in any::<u64>()) {
        let field = field_of(k);
        let mut rng = random::rng(seed);
        let e = random::complex(field, -1, 2, 3, &mut rng);
        let mc = random::maurer_cartan(&e, &mut rng);
        let moved = e.perturb(&mc).unwrap();
        prop_assert_eq!(moved.perturb(&mc.neg()).unwrap(), e);
    }

    #[test]
    fn twisted_differential_squares_to_zero(k in 0u8..2, seed in any::<u64>(), deg in -1i64..=1) {
        let field = field_of(k);
        let cat = Ch::new(field);
        let mut rng = random::rng(seed);
        let t = random::twisted(&shape(field, 3, false), &mut rng);
        let s = random::twisted(&shape(field, 2, true), &mut rng);
        let f = random::twisted_morphism(field, &t, &s, deg, &mut rng);
        let df = tw_diff(&cat, &f, &t, &s, None).unwrap();
        prop_assert!(tw_diff(&cat, &df, &t, &s, None).unwrap().is_zero());
    }

    #[test]
    fn reflection_and_sign_twist_are_involutions(k in 0u8..2, seed in any::<u64>()) {
        let field = field_of(k);
        let cat = Ch::new(field);
        let mut rng = random::rng(seed);
        let row = cxrow(&cat, &nested(field, false, &mut rng)).unwrap();
        let eq = |a: &Complex, b: &Complex| a == b;
        prop_assert!(reflect(&reflect(&row)).equals(&cat, &row, eq));
        prop_assert!(sigma(&cat, &sigma(&cat, &row)).equals(&cat, &row, eq));
        prop_assert!(check_bitwisted(&cat, &reflect(&row), None).unwrap().1.is_none());
    }

    #[test]
    fn row_functor_inverts_on_one_sided_input(k in 0u8..2, seed in any::<u64>()) {
        let field = field_of(k);
        let cat = Ch::new(field);
        let mut rng = random::rng(seed);
        let cc = nested(field, true, &mut rng);
        let row = cxrow(&cat, &cc).unwrap();
        prop_assert!(same_nested(&cat, &cxrow_inverse(&cat, &row).unwrap(), &cc));
        let col = cxcol(&cat, &cc).unwrap();
        prop_assert!(same_nested(&cat, &cxcol_inverse(&cat, &col).unwrap(), &cc));
        prop_assert!(reflect(&col).equals(&cat, &row, |a, b| a == b));
    }

    #[test]
    fn stream_convolution_is_stable_in_the_window(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = random::rng(seed);
        let field = random::field(&mut rng);
        let cat = Ch::new(field);
        let alg = fixtures::dual_numbers(field);
        let m = random::two_term_module(&alg, 2, &mut rng);
        for t in [bar_module_right(&cat, &m), bar_algebra(&alg)] {
            let (small, large) = (Window::words(n), Window::words(n + 2));
            let stable: Vec<i64> = (-3..=n as i64 + 3).filter(|d| stable_degrees(&t, small).is_stable(*d)).collect();
            prop_assert!(!stable.is_empty());
            let (lo, hi) = (stable[0], *stable.last().unwrap());
            prop_assert_eq!(
                convolve_in_degrees(&t, small, lo, hi).unwrap(),
                convolve_in_degrees(&t, large, lo, hi).unwrap()
            );
        }
    }
}

#[test]
fn row_functor_inverse_rejects_maps_to_earlier_rows() {
    let field = Field::Rationals;
    let cat = Ch::new(field);
    let mut rng = random::rng(5);
    let mut found = false;
    for _ in 0..20 {
        let row = cxrow(&cat, &nested(field, false, &mut rng)).unwrap();
        if !row.is_vertically_one_sided() {
            assert!(matches!(cxrow_inverse(&cat, &row), Err(Error::NotOneSided(_))));
            found = true;
        }
    }
    assert!(found, "no two-sided sample drawn");
}
