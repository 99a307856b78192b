//! A∞-algebras through their bar constructions: relation checks, the first
//! failing word, and the symbolic bar components.
//!
//! `cargo run --example ainfty_algebras`

use std::collections::BTreeMap;

use twistkit::ainfty::{formal, is_ainfty_algebra, word_length, AInfAlgebra};
use twistkit::fixtures;
use twistkit::scalar::Field;

fn main() -> twistkit::Result<()> {
    let field = Field::Rationals;
    for alg in [fixtures::upper_triangular(field), fixtures::dual_numbers(field), fixtures::with_m3(field)] {
        let (cells, v) = is_ainfty_algebra(&alg, 6)?;
        println!("{}: {cells} cells checked up to word length 6, passes: {}", alg.name(), v.is_none());
    }

    let (a, m2) = fixtures::m2_only(field);
    let bare = AInfAlgebra::new("m2-only", a, BTreeMap::from([(2, m2)]))?;
    if let (_, Some(v)) = is_ainfty_algebra(&bare, 4)? {
        println!("m2-only fails first on words of length {} at cell ({}, {})", word_length(v.i), v.i, v.j);
    }

    for (i, k) in [(2, 1), (2, 2), (3, 1)] {
        println!("algebra bar A^{} -> A^{}: {}", i + k, i, formal::bar_algebra_terms(i, k));
    }
    println!("module bar E A^2 -> E A: {}", formal::bar_right_terms(2, 1));
    println!("morphism bar A^3 -> B^2: {}", formal::bar_alg_morphism_terms(2, 1));
    Ok(())
}
