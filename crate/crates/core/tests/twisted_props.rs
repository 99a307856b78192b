use twistkit::bitwisted::*;
use twistkit::category::Ch;
use twistkit::complex::hom_differential;
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::twisted::*;

fn shape(field: Field, len: i64, one_sided: bool) -> Shape {
    Shape { field, window: Window::new(0, len - 1), degrees: (-1, 2), max_dim: 3, one_sided }
}

#[test]
fn random_twisted_complexes_are_valid() {
    for seed in 0..20 {
        let mut rng = random::rng(seed);
        let field = random::field(&mut rng);
        let t = random::twisted(&shape(field, 3, seed % 2 == 0), &mut rng);
        let (_, v) = check_twisted(&Ch::new(field), &t, t.support().unwrap()).unwrap();
        assert!(v.is_none(), "seed {seed}");
    }
}

#[test]
fn hom_differential_squares_to_zero() {
    for seed in 0..20 {
        let mut rng = random::rng(seed);
        let field = random::field(&mut rng);
        let cat = Ch::new(field);
        let t = random::twisted(&shape(field, 3, false), &mut rng);
        let s = random::twisted(&shape(field, 3, false), &mut rng);
        let f = random::twisted_morphism(field, &t, &s, 0, &mut rng);
        let df = tw_diff(&cat, &f, &t, &s, None).unwrap();
        let ddf = tw_diff(&cat, &df, &t, &s, None).unwrap();
        assert!(ddf.is_zero(), "seed {seed}");
    }
}

#[test]
fn convolution_intertwines_differentials() {
    for seed in 0..20 {
        let mut rng = random::rng(seed);
        let field = random::field(&mut rng);
        let cat = Ch::new(field);
        let t = random::twisted(&shape(field, 3, false), &mut rng);
        let s = random::twisted(&shape(field, 3, false), &mut rng);
        let w = Window::new(0, 2);
        let f = random::twisted_morphism(field, &t, &s, 1, &mut rng);
        let df = tw_diff(&cat, &f, &t, &s, None).unwrap();
        let ct = convolve(&t, w).unwrap();
        let cs = convolve(&s, w).unwrap();
        let lhs = convolve_morphism(&df, &t, &s, w).unwrap();
        let rhs = hom_differential(&ct, &cs, &convolve_morphism(&f, &t, &s, w).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "seed {seed}");
    }
}

#[test]
fn row_and_column_functors() {
    for seed in 0..10 {
        let mut rng = random::rng(seed);
        let field = random::field(&mut rng);
        let cat = Ch::new(field);
        let outer = Shape { window: Window::new(0, 1), ..shape(field, 2, false) };
        let inner = shape(field, 2, false);
        let cc = random::twisted_of_twisted(&outer, &inner, &mut rng);
        let (_, v) = check_twisted(&Tw::new(cat), &cc, cc.support().unwrap()).unwrap();
        assert!(v.is_none(), "outer validity, seed {seed}");
        let row = cxrow(&cat, &cc).unwrap();
        assert!(check_bitwisted(&cat, &row, None).unwrap().1.is_none(), "cxrow validity, seed {seed}");
        let col = cxcol(&cat, &cc).unwrap();
        assert!(check_bitwisted(&cat, &col, None).unwrap().1.is_none());
        let dd = double_convolve(field, &cc).unwrap();
        assert_eq!(convolve_bicomplex(field, &row, CellOrder::RowMajor).unwrap(), dd, "seed {seed}");
        assert_eq!(convolve_bicomplex(field, &col, CellOrder::ColumnMajor).unwrap(), dd, "seed {seed}");
        let sg = sigma(&cat, &row);
        assert!(check_bitwisted(&cat, &sg, None).unwrap().1.is_none());
    }
}

#[test]
fn generated_data_is_nontrivial() {
    let mut rng = random::rng(7);
    let field = Field::Rationals;
    let cat = Ch::new(field);
    let t = random::twisted(&shape(field, 3, false), &mut rng);
    let s = random::twisted(&shape(field, 3, false), &mut rng);
    let f = random::twisted_morphism(field, &t, &s, 0, &mut rng);
    let df = tw_diff(&cat, &f, &t, &s, None).unwrap();
    eprintln!("diffs {} comps {} dcomps {}", t.diffs().unwrap().len(), f.components().len(), df.components().len());
    assert!(t.diffs().unwrap().len() >= 4);
    assert!(!df.is_zero());
    let outer = Shape { window: Window::new(0, 1), ..shape(field, 2, false) };
    let cc = random::twisted_of_twisted(&outer, &shape(field, 2, false), &mut rng);
    let row = cxrow(&cat, &cc).unwrap();
    eprintln!("bicomplex cells {} maps {}", row.objects().len(), row.diffs().len());
    assert!(row.diffs().len() >= 6);
}
