//! Random twisted complexes: validity, the differential on morphisms and
//! convolution.
//!
//! `cargo run --example twisted_complexes`

use twistkit::category::Ch;
use twistkit::complex::hom_differential;
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::twisted::{check_twisted, convolve, convolve_morphism, tw_diff, Window};

fn main() -> twistkit::Result<()> {
    let field = Field::Rationals;
    let cat = Ch::new(field);
    let mut rng = random::rng(1);
    let shape = Shape { field, window: Window::new(0, 3), degrees: (-1, 1), max_dim: 2, one_sided: false };
    let t = random::twisted(&shape, &mut rng);
    let s = random::twisted(&shape, &mut rng);
    let (cells, violation) = check_twisted(&cat, &t, Window::new(0, 3))?;
    println!("checked {cells} cells, violation: {:?}", violation.map(|v| (v.i, v.j)));

    let f = random::twisted_morphism(field, &t, &s, 0, &mut rng);
    let df = tw_diff(&cat, &f, &t, &s, None)?;
    println!("d(f) has {} components, d(d(f)) = 0: {}", df.components().len(), tw_diff(&cat, &df, &t, &s, None)?.is_zero());

    let w = Window::new(0, 3);
    let (ct, cs) = (convolve(&t, w)?, convolve(&s, w)?);
    println!("convolution dims {:?}, cohomology {:?}", ct.space().dims(), ct.cohomology_dims());
    let lhs = convolve_morphism(&df, &t, &s, w)?;
    let rhs = hom_differential(&ct, &cs, &convolve_morphism(&f, &t, &s, w)?)?;
    println!("convolution intertwines differentials: {}", lhs == rhs);
    Ok(())
}
