use std::path::Path;

use twistkit::ainfty::bar_algebra;
use twistkit::category::Ch;
use twistkit::fixtures;
use twistkit::io::{parse, serialize, Document, DocumentBuilder};
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::twisted::Window;

fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn parse_str(s: &str) -> Result<Document, twistkit::io::DocError> {
    parse(s.as_bytes())
}

#[test]
fn empty_document_round_trips() {
    let text = serialize(&Document::new(Field::Rationals));
    assert_eq!(text, "{\n  \"field\": \"q\",\n  \"format\": 1\n}\n");
    assert_eq!(parse_str(&text).unwrap(), Document::new(Field::Rationals));
    let fp = serialize(&Document::new(Field::Prime(7)));
    assert_eq!(parse_str(&fp).unwrap().field, Field::Prime(7));
}

#[test]
fn fixtures_round_trip_byte_identically() {
    for name in [
        "twisted_valid.dgj",
        "twisted_broken.dgj",
        "algebra_m3.dgj",
        "algebra_m2_only.dgj",
        "bar_m3.dgj",
        "module_retract.dgj",
        "transfer.dgj",
        "nested.dgj",
    ] {
        let bytes = fixture(name);
        let doc = parse(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(serialize(&doc).as_bytes(), bytes.as_slice(), "{name}");
    }
}

#[test]
fn built_documents_round_trip() {
    for seed in 0..6 {
        let mut rng = random::rng(seed);
        let field = if seed % 2 == 0 { Field::Prime(101) } else { Field::Rationals };
        let shape = Shape { field, window: Window::new(-1, 1), degrees: (-1, 1), max_dim: 2, one_sided: false };
        let t = random::twisted(&shape, &mut rng);
        let alg = fixtures::with_m3(field);
        let mut b = DocumentBuilder::new(field);
        b.twisted("T", &t).unwrap();
        b.algebra("A", &alg);
        let doc = b.finish();
        let text = serialize(&doc);
        let back = parse_str(&text).unwrap();
        assert_eq!(back, doc, "seed {seed}");
        assert_eq!(serialize(&back), text);
        let t2 = back.twisted("T").unwrap();
        assert_eq!(t2.diffs(), t.diffs());
        assert_eq!(t2.objects(), t.objects());
        let a2 = back.algebra("A").unwrap();
        assert_eq!(a2.ops(), alg.ops());
        assert_eq!(a2.complex(), alg.complex());
    }
}

#[test]
fn stream_entities_resolve_to_the_bar_construction() {
    let doc = parse(&fixture("algebra_m3.dgj")).unwrap();
    let cat = Ch::new(Field::Rationals);
    let w = Window::words(4);
    let from_doc = doc.twisted("BA").unwrap().truncate(&cat, w).unwrap();
    let direct = bar_algebra(&fixtures::with_m3(Field::Rationals)).truncate(&cat, w).unwrap();
    assert_eq!(from_doc.diffs(), direct.diffs());
    assert_eq!(from_doc.objects(), direct.objects());

    let stored = parse(&fixture("bar_m3.dgj")).unwrap().twisted("BA4").unwrap();
    assert_eq!(stored.diffs(), direct.diffs());
    assert_eq!(stored.objects(), direct.objects());
}

#[test]
fn undeclared_references_are_named_with_their_path() {
    let text = r#"{"format": 1, "field": "q",
        "spaces": {"V": {"0": 1}},
        "complexes": {"C": {"space": "V", "d": "ghost"}}}"#;
    let e = parse_str(text).unwrap_err();
    assert!(e.message.contains("ghost"), "{e}");
    assert_eq!(e.path, "complexes.C.d");

    let text = r#"{"format": 1, "field": "q",
        "maps": {"f": {"source": "nowhere", "target": "nowhere", "deg": 0, "blocks": {}}}}"#;
    let e = parse_str(text).unwrap_err();
    assert!(e.message.contains("nowhere"), "{e}");
    assert!(e.path.starts_with("maps.f"), "{e}");
}

#[test]
fn malformed_input_is_located() {
    let e = parse_str("{\"format\": 1,\n \"field\": }").unwrap_err();
    assert!(e.path.starts_with("line 2"), "{e}");

    let e = parse_str(r#"{"format": 2, "field": "q"}"#).unwrap_err();
    assert_eq!(e.path, "format");

    let e = parse_str(r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1}}, "extra": 3}"#).unwrap_err();
    assert_eq!(e.path, "extra");

    let text = r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 2}},
        "maps": {"f": {"source": "V", "target": "V", "deg": 0, "blocks": {"0": [["1", "0"]]}}}}"#;
    let e = parse_str(text).unwrap_err();
    assert!(e.path.starts_with("maps.f.blocks.0"), "{e}");
    assert!(e.message.contains("expected 2 rows"), "{e}");

    let text = r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1}},
        "maps": {"f": {"source": "V", "target": "V", "deg": 0, "blocks": {"0": [["x"]]}}}}"#;
    let e = parse_str(text).unwrap_err();
    assert!(e.path.starts_with("maps.f.blocks.0"), "{e}");
}

#[test]
fn scalars_are_written_in_lowest_terms() {
    let text = r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1}},
        "maps": {"f": {"source": "V", "target": "V", "deg": 0, "blocks": {"0": [["6/-4"]]}}}}"#;
    let doc = parse_str(text).unwrap();
    assert!(serialize(&doc).contains("\"-3/2\""));

    let text = r#"{"format": 1, "field": "fp:7", "spaces": {"V": {"0": 1}},
        "maps": {"f": {"source": "V", "target": "V", "deg": 0, "blocks": {"0": [["-1"]]}}}}"#;
    let doc = parse_str(text).unwrap();
    assert!(serialize(&doc).contains("\"6\""));
}

#[test]
fn zero_blocks_are_omitted() {
    let text = r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1}},
        "maps": {"f": {"source": "V", "target": "V", "deg": 0, "blocks": {"0": [["0"]]}}}}"#;
    let doc = parse_str(text).unwrap();
    assert!(doc.map("f").unwrap().is_zero());
    assert!(serialize(&doc).contains("\"blocks\": {}"));
}

#[test]
fn merging_rejects_conflicting_definitions() {
    let a = parse_str(r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1}}}"#).unwrap();
    let b = parse_str(r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 2}}}"#).unwrap();
    let c = parse_str(r#"{"format": 1, "field": "q", "spaces": {"W": {"1": 2}}}"#).unwrap();
    let mut x = a.clone();
    assert_eq!(x.merge(b).unwrap_err().path, "spaces.V");
    let mut y = a.clone();
    y.merge(a.clone()).unwrap();
    y.merge(c).unwrap();
    assert_eq!(y.spaces.len(), 2);
    let mut z = a;
    assert!(z.merge(Document::new(Field::Prime(5))).is_err());
}

#[test]
fn mathematical_failures_do_not_block_parsing() {
    // d∘d ≠ 0 is reported when the complex is used, not at parse time.
    let text = r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1, "1": 1, "2": 1}},
        "maps": {"d": {"source": "V", "target": "V", "deg": 1, "blocks": {"0": [["1"]], "1": [["1"]]}}},
        "complexes": {"C": {"space": "V", "d": "d"}}}"#;
    let doc = parse_str(text).unwrap();
    let e = doc.complex("C").unwrap_err();
    assert!(e.is_mathematical());
}
