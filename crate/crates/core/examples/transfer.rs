//! Homotopy transfer of a right module structure onto cohomology.
//!
//! `cargo run --example transfer`

use twistkit::ainfty::is_right_module;
use twistkit::category::Ch;
use twistkit::fixtures;
use twistkit::random;
use twistkit::scalar::Field;
use twistkit::transfer::{agree_up_to, transfer, verify_transfer, RetractData};

fn main() -> twistkit::Result<()> {
    let field = Field::Prime(101);
    let alg = fixtures::dual_numbers(field);
    let mut rng = random::rng(4);
    // Draw until the transferred structure has a ternary operation.
    let (m, r, result) = loop {
        let m = random::rebase_module(&random::two_term_module(&alg, 3, &mut rng), &mut rng);
        let r = RetractData::onto_homology(m.object())?;
        let result = transfer(&m, &r, 5)?;
        if result.q.op(3).is_some() {
            break (m, r, result);
        }
    };
    println!("P dims {:?}, cohomology {:?}", m.object().space().dims(), m.object().cohomology_dims());
    println!("transferred operations: {:?}", result.q.ops().keys().collect::<Vec<_>>());
    println!("{}", verify_transfer(&m, &r, &result, 5)?);
    println!("q is a module: {}", is_right_module(&Ch::new(field), &result.q, 5)?.1.is_none());

    let longer = transfer(&m, &r, 7)?;
    println!("N=7 agrees with N=5 up to arity 5: {}", agree_up_to(&result, &longer, 5).is_none());
    Ok(())
}
