//! Writes a set of small `.dgj` documents into a directory.
//!
//! `cargo run --example export_fixtures -- crates/core/tests/fixtures`

use std::collections::BTreeMap;
use std::path::PathBuf;

use twistkit::category::Ch;
use twistkit::complex::hom_differential;
use twistkit::fixtures;
use twistkit::io::{serialize, DocumentBuilder, StreamDecl};
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::transfer::{transfer, RetractData};
use twistkit::twisted::{TwistedComplex, Window};

fn write(dir: &PathBuf, file: &str, b: DocumentBuilder) {
    let path = dir.join(file);
    std::fs::write(&path, serialize(&b.finish())).expect("writable output directory");
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir).expect("output directory");
    let field = Field::Rationals;
    let cat = Ch::new(field);
    let mut rng = random::rng(11);

    let shape = Shape { field, window: Window::new(0, 2), degrees: (0, 1), max_dim: 2, one_sided: false };
    let t = random::twisted(&shape, &mut rng);
    let mut b = DocumentBuilder::new(field);
    b.twisted("T", &t).unwrap();
    write(&dir, "twisted_valid.dgj", b);

    // Perturb α_01 by a map that is not closed, so the equation fails first at (0, 1).
    let (a0, a1) = (t.object(0).unwrap(), t.object(1).unwrap());
    let delta = loop {
        let m = random::map(field, a0.space(), a1.space(), 0, &mut rng);
        if !hom_differential(&a0, &a1, &m).unwrap().is_zero() {
            break m;
        }
    };
    let mut diffs = t.diffs().unwrap().clone();
    let a01 = diffs.get(&(0, 1)).cloned().unwrap_or_else(|| delta.clone_shape());
    diffs.insert((0, 1), a01.add(&delta).unwrap());
    let broken = TwistedComplex::bounded(&cat, t.objects().unwrap().clone(), diffs).unwrap();
    let mut b = DocumentBuilder::new(field);
    b.twisted("T", &broken).unwrap();
    write(&dir, "twisted_broken.dgj", b);

    let alg = fixtures::with_m3(field);
    let mut b = DocumentBuilder::new(field);
    b.algebra("A", &alg);
    let mut doc = b.finish();
    doc.streams.insert("BA".into(), StreamDecl::BarAlgebra { of: "A".into() });
    write(&dir, "algebra_m3.dgj", DocumentBuilder::extend(doc));

    let mut b = DocumentBuilder::new(field);
    b.twisted("BA4", &twistkit::ainfty::bar_algebra(&alg).truncate(&cat, Window::words(4)).unwrap()).unwrap();
    write(&dir, "bar_m3.dgj", b);

    let (complex, m2) = fixtures::m2_only(field);
    let bare = twistkit::ainfty::AInfAlgebra::new("m2-only", complex, BTreeMap::from([(2, m2)])).unwrap();
    let mut b = DocumentBuilder::new(field);
    b.algebra("A", &bare);
    write(&dir, "algebra_m2_only.dgj", b);

    let dual = fixtures::dual_numbers(field);
    // Draw until the transferred structure has a nonzero q_3.
    let (m, r, result) = loop {
        let m = random::rebase_module(&random::two_term_module(&dual, 2, &mut rng), &mut rng);
        let r = RetractData::onto_homology(m.object()).unwrap();
        let result = transfer(&m, &r, 4).unwrap();
        if result.q.op(3).is_some() {
            break (m, r, result);
        }
    };
    let mut b = DocumentBuilder::new(field);
    b.algebra("D", &dual);
    b.right_module("M", &m, "D");
    b.retract("R", &r);
    let module_doc = b.clone().finish();
    write(&dir, "module_retract.dgj", b);

    let mut b = DocumentBuilder::extend(module_doc);
    b.transfer("T4", "M", "R", &result);
    write(&dir, "transfer.dgj", b);

    let small = Shape { field, window: Window::new(0, 1), degrees: (0, 1), max_dim: 1, one_sided: false };
    let cc = random::twisted_of_twisted(&small, &small, &mut rng);
    let mut b = DocumentBuilder::new(field);
    b.nested("N", &cc).unwrap();
    let row = twistkit::bitwisted::cxrow(&cat, &cc).unwrap();
    b.bicomplex("B", &row);
    write(&dir, "nested.dgj", b);
}
