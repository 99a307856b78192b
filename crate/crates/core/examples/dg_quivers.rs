//! A finite DG category built from complexes, checked for the DG laws.
//!
//! `cargo run --example dg_quivers`

use twistkit::quiver::{check_dg_quiver, DgQuiver};
use twistkit::random;
use twistkit::scalar::Field;

fn main() -> twistkit::Result<()> {
    let field = Field::Rationals;
    let mut rng = random::rng(6);
    let named: Vec<(String, _)> =
        ["X", "Y"].iter().map(|n| (n.to_string(), random::complex(field, 0, 2, 2, &mut rng))).collect();
    let mut q = DgQuiver::from_complexes(field, &named)?;
    for a in 0..2 {
        for b in 0..2 {
            println!("hom({}, {}) dims {:?}", q.objects()[a], q.objects()[b], q.hom_space(a, b).dims());
        }
    }
    println!("violation: {:?}", check_dg_quiver(&q)?.map(|v| v.law));

    // Breaking one composition map is caught.
    if let Some(m) = q.composition_mut(0, 1, 1) {
        *m = m.scale(&field.int(2));
    }
    println!("after scaling one composition: {:?}", check_dg_quiver(&q)?.map(|v| v.law));
    Ok(())
}
