//! Right A∞-modules as a DG category, and twisted complexes of modules
//! turned into modules over twisted complexes.
//!
//! `cargo run --example modules`

use twistkit::ainfty::{is_right_module, phi_morphism, phi_object, phi_square, Nod};
use twistkit::category::{Ch, DgCategory};
use twistkit::fixtures;
use twistkit::random;
use twistkit::scalar::Field;
use twistkit::twisted::{tw_compose, Tw, Window};

fn main() -> twistkit::Result<()> {
    let field = Field::Prime(101);
    let alg = fixtures::with_m3(field);
    let nod = Nod::new(Ch::new(field), 3);
    let mut rng = random::rng(3);

    let m = random::right_module(&alg, 3, &mut rng);
    let n = random::right_module(&alg, 3, &mut rng);
    println!("random module passes: {}", is_right_module(&nod.base, &m, 3)?.1.is_none());
    let f = random::module_morphism(&m, &n, 0, 3, &mut rng);
    let df = nod.differential(&m, &n, &f)?;
    println!("f has arities {:?}, d(f) has arities {:?}", f.components().keys().collect::<Vec<_>>(), df.components().keys().collect::<Vec<_>>());
    println!("d(d(f)) = 0: {}", nod.differential(&m, &n, &df)?.is_zero());

    let w = Window::new(0, 1);
    let t = random::twisted_modules(&nod, &alg, w, &mut rng);
    let s = random::twisted_modules(&nod, &alg, w, &mut rng);
    let module = phi_object(&nod, &t)?;
    println!("module over twisted complexes has operations {:?}", module.ops().keys().collect::<Vec<_>>());
    println!("bar square commutes: {}", phi_square(&nod, &t)?.is_none());

    let big = Nod::new(Tw::new(nod.base), 3);
    let g = random::twisted_modules_morphism(&nod, &t, &s, 0, &mut rng);
    let h = random::twisted_modules_morphism(&nod, &s, &t, 0, &mut rng);
    let lhs = phi_morphism(&nod, &tw_compose(&nod, &h, &g)?, &t, &t)?;
    let rhs = big.compose(&phi_morphism(&nod, &h, &s, &t)?, &phi_morphism(&nod, &g, &t, &s)?)?;
    println!("composition is preserved: {}", lhs.equals(&big.base, &rhs));
    Ok(())
}
