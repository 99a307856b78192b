//! Writing and reading `.dgj` documents.
//!
//! `cargo run --example documents`

use twistkit::fixtures;
use twistkit::io::{parse, serialize, DocumentBuilder};
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::twisted::Window;

fn main() {
    let field = Field::Rationals;
    let mut rng = random::rng(5);
    let shape = Shape { field, window: Window::new(0, 1), degrees: (0, 1), max_dim: 1, one_sided: false };
    let mut b = DocumentBuilder::new(field);
    b.twisted("T", &random::twisted(&shape, &mut rng)).expect("bounded twisted complex");
    b.algebra("A", &fixtures::dual_numbers(field));
    let text = serialize(&b.finish());
    println!("{text}");

    let doc = parse(text.as_bytes()).expect("own output parses");
    println!("round trip is byte-identical: {}", serialize(&doc) == text);
    let t = doc.twisted("T").expect("declared above");
    println!("T has {} objects", t.objects().map_or(0, |o| o.len()));

    match parse(br#"{"format": 1, "field": "q", "complexes": {"C": {"space": "V", "d": "d"}}}"#) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("error at {}: {}", e.path, e.message),
    }
}
