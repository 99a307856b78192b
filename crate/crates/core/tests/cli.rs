use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use twistkit::bitwisted::{check_bitwisted, cxrow};
use twistkit::category::Ch;
use twistkit::complex::hom_differential;
use twistkit::io::{map_json, parse, serialize};
use twistkit::twisted::{check_twisted, Window};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn twistkit(args: &[&str]) -> (i32, Value) {
    twistkit_env(args, &[])
}

fn twistkit_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_twistkit")).args(args).envs(env.iter().copied()).output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), report)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn valid_twisted_complex_passes() {
    let (code, r) = twistkit(&["check", "twisted", path(&fixture("twisted_valid.dgj"))]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["command"], "check twisted");
    assert!(r["timings"]["total_ms"].is_u64());
}

#[test]
fn broken_twisted_complex_reports_the_first_cell() {
    let file = fixture("twisted_broken.dgj");
    let (code, r) = twistkit(&["check", "twisted", path(&file)]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["status"], "fail");
    let w = &r["witness"];
    assert_eq!((w["i"].as_i64(), w["j"].as_i64()), (Some(0), Some(1)));
    assert_eq!(w["residual_norm"], "nonzero");

    // Recompute the residual at (0, 1) from the raw maps: -dα_01 + Σ_k α_k1 α_0k.
    let doc = parse(&std::fs::read(&file).unwrap()).unwrap();
    let decl = &doc.twisted["T"];
    let cx = |i: i64| doc.complex(&decl.objects[&i]).unwrap();
    let alpha = |i: i64, j: i64| decl.diffs.get(&(i, j)).map(|m| doc.map(m).unwrap().clone());
    let a01 = alpha(0, 1).unwrap();
    let mut residual = hom_differential(&cx(0), &cx(1), &a01).unwrap().neg();
    for k in decl.objects.keys() {
        if let (Some(a0k), Some(ak1)) = (alpha(0, *k), alpha(*k, 1)) {
            residual = residual.add(&ak1.compose(&a0k).unwrap()).unwrap();
        }
    }
    assert!(!residual.is_zero());
    assert_eq!(w["residual"], map_json(&residual));
}

#[test]
fn check_dg_reports_complexes() {
    let (code, r) = twistkit(&["check", "dg", path(&fixture("twisted_valid.dgj"))]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["entities"].as_array().unwrap().len(), 3);

    let bad = scratch("bad_complex.dgj");
    std::fs::write(
        &bad,
        r#"{"format": 1, "field": "q", "spaces": {"V": {"0": 1, "1": 1, "2": 1}},
        "maps": {"d": {"source": "V", "target": "V", "deg": 1, "blocks": {"0": [["1"]], "1": [["1"]]}}},
        "complexes": {"C": {"space": "V", "d": "d"}}}"#,
    )
    .unwrap();
    let (code, r) = twistkit(&["check", "dg", path(&bad)]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["witness"]["degree"], 0);
    assert_eq!(r["witness"]["residual_support"], serde_json::json!([0]));
}

#[test]
fn algebra_checks_distinguish_the_m3_completion() {
    let (code, r) = twistkit(&["ainfty", "check-algebra", path(&fixture("algebra_m3.dgj")), "--max-word", "5"]);
    assert_eq!(code, 0, "{r}");
    let (code, r) = twistkit(&["ainfty", "check-algebra", path(&fixture("algebra_m2_only.dgj")), "--max-word", "5"]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["witness"]["word_length"], 3);
    let (code, r) = twistkit(&["ainfty", "check-algebra", path(&fixture("algebra_m2_only.dgj")), "--max-word", "2"]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn streamed_bars_need_a_window() {
    let file = fixture("algebra_m3.dgj");
    let (code, r) = twistkit(&["check", "twisted", path(&file)]);
    assert_eq!(code, 2, "{r}");
    let (code, r) = twistkit(&["check", "twisted", path(&file), "--max-word", "4"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["entities"][0]["window"], serde_json::json!([-3, 0]));
    let (code, r) = twistkit(&["check", "twisted", path(&file), "--window", "-3", "0"]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn ainfty_bar_writes_a_checkable_twisted_complex() {
    let out = scratch("bar.dgj");
    let (code, r) =
        twistkit(&["ainfty", "bar", path(&fixture("algebra_m3.dgj")), "--name", "A", "--max-word", "3", "--out", path(&out)]);
    assert_eq!(code, 0, "{r}");
    let doc = parse(&std::fs::read(&out).unwrap()).unwrap();
    let t = doc.twisted("bar(A)").unwrap();
    assert_eq!(t.support(), Some(Window::words(3)));
    assert!(check_twisted(&Ch::new(doc.field), &t, Window::words(3)).unwrap().1.is_none());
    let (code, _) = twistkit(&["check", "twisted", path(&out)]);
    assert_eq!(code, 0);
}

#[test]
fn module_checks() {
    let file = fixture("module_retract.dgj");
    let (code, r) = twistkit(&["ainfty", "check-module", path(&file), "--max-word", "4"]);
    assert_eq!(code, 0, "{r}");
    let recorded = fixture("transfer.dgj");
    for name in ["T4.phi", "T4.psi"] {
        let (code, r) = twistkit(&["ainfty", "check-morphism", path(&recorded), "--name", name, "--max-word", "4"]);
        assert_eq!(code, 0, "{name}: {r}");
    }
    // The homotopy is not closed: d(H) = ψφ - id, which is nonzero on single elements.
    let (code, r) = twistkit(&["ainfty", "check-morphism", path(&recorded), "--max-word", "4"]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["witness"]["entity"], "T4.H");
    assert_eq!(r["witness"]["word_length"], 1);
}

#[test]
fn transfer_reproduces_the_recorded_result() {
    let out = scratch("transfer.dgj");
    let (code, r) = twistkit(&[
        "transfer",
        path(&fixture("module_retract.dgj")),
        "--max-word",
        "4",
        "--name",
        "T4",
        "--out",
        path(&out),
    ]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["transferred_ops"], serde_json::json!([2, 3]));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(fixture("transfer.dgj")).unwrap());
    let (code, r) = twistkit(&["transfer", "verify", path(&out)]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn tampered_transfer_fails_verification() {
    let mut doc: Value = serde_json::from_slice(&std::fs::read(fixture("transfer.dgj")).unwrap()).unwrap();
    let q3 = doc["modules"]["T4.q"]["ops"]["3"].as_str().unwrap().to_string();
    let blocks = doc["maps"][&q3]["blocks"].as_object_mut().unwrap();
    let (_, block) = blocks.iter_mut().next().unwrap();
    let entry = &mut block[0][0];
    *entry = Value::String(if entry == "0" { "1".into() } else { "0".into() });
    let bad = scratch("tampered.dgj");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, r) = twistkit(&["transfer", "verify", path(&bad)]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["status"], "fail");
    assert!(r["witness"]["check"].is_string());
}

#[test]
fn rowcol_and_convolve_produce_documents() {
    let file = fixture("nested.dgj");
    let out = scratch("row.dgj");
    let (code, r) = twistkit(&["rowcol", path(&file), "--mode", "row", "--out", path(&out)]);
    assert_eq!(code, 0, "{r}");
    let doc = parse(&std::fs::read(&file).unwrap()).unwrap();
    let row = cxrow(&Ch::new(doc.field), &doc.nested("N").unwrap()).unwrap();
    let written = parse(&std::fs::read(&out).unwrap()).unwrap();
    let b = written.bicomplex("row(N)").unwrap();
    assert_eq!(b.diffs(), row.diffs());
    assert!(check_bitwisted(&Ch::new(doc.field), &b, None).unwrap().1.is_none());
    for mode in ["col", "reflect", "sigma"] {
        let input = if mode == "col" { path(&file).to_string() } else { path(&out).to_string() };
        let (code, r) = twistkit(&["rowcol", &input, "--mode", mode]);
        assert_eq!(code, 0, "{mode}: {r}");
        assert!(r["document"]["bicomplexes"].is_object());
    }

    let (code, r) = twistkit(&["convolve", path(&file), "--name", "N"]);
    assert_eq!(code, 0, "{r}");
    let conv = parse(serde_json::to_string(&r["document"]).unwrap().as_bytes()).unwrap();
    let c = conv.complex("conv(N)").unwrap();
    let d = c.differential();
    assert!(d.compose(d).unwrap().is_zero());
    let (code, r) = twistkit(&["convolve", path(&file)]);
    assert_eq!(code, 2, "ambiguous entity: {r}");
}

#[test]
fn convolving_the_same_entity_twice_is_deterministic() {
    let file = fixture("twisted_valid.dgj");
    let (_, a) = twistkit(&["convolve", path(&file)]);
    let (_, b) = twistkit(&["convolve", path(&file)]);
    assert_eq!(a["document"], b["document"]);
    let doc = parse(serde_json::to_string(&a["document"]).unwrap().as_bytes()).unwrap();
    assert_eq!(serialize(&doc), serde_json::to_string_pretty(&a["document"]).unwrap() + "\n");
}

#[test]
fn input_errors_exit_with_two() {
    let missing = fixture("missing.dgj");
    let (code, r) = twistkit(&["check", "dg", path(&missing)]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");

    let bad = scratch("undeclared.dgj");
    std::fs::write(&bad, r#"{"format": 1, "field": "q", "complexes": {"C": {"space": "V"}}}"#).unwrap();
    let (code, r) = twistkit(&["check", "dg", path(&bad)]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["path"], "complexes.C.space");
    assert!(r["error"]["message"].as_str().unwrap().contains("\"V\""));

    let (code, _) = twistkit(&["--field", "fp:5", "check", "twisted", path(&fixture("twisted_valid.dgj"))]);
    assert_eq!(code, 2);
    let (code, _) = twistkit(&["--field", "q", "check", "twisted", path(&fixture("twisted_valid.dgj"))]);
    assert_eq!(code, 0);
    let (code, r) = twistkit(&["check"]);
    assert_eq!(code, 2);
    assert_eq!(r["status"], "error");
    let (code, _) = twistkit(&["check", "twisted", path(&fixture("twisted_valid.dgj")), "--name", "nope"]);
    assert_eq!(code, 2);
    let (code, _) = twistkit(&["check", "twisted", path(&fixture("twisted_valid.dgj")), "--window", "2", "0"]);
    assert_eq!(code, 2);
    let (code, _) = twistkit_env(&["selftest"], &[("TWISTKIT_THREADS", "zero")]);
    assert_eq!(code, 2);
}

#[test]
fn merged_inputs_and_thread_setting() {
    let (code, r) = twistkit_env(
        &["ainfty", "check-algebra", path(&fixture("algebra_m3.dgj")), path(&fixture("module_retract.dgj")), "--max-word", "3"],
        &[("TWISTKIT_THREADS", "1")],
    );
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["entities"].as_array().unwrap().len(), 2);
}

#[test]
fn selftest_passes() {
    for seed in ["0", "1"] {
        let (code, r) = twistkit(&["selftest", "--seed", seed]);
        assert_eq!(code, 0, "{r}");
    }
    let (code, r) = twistkit(&["--field", "fp:101", "selftest", "--seed", "2"]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn library_entry_point_matches_the_binary() {
    let file = fixture("twisted_broken.dgj");
    let out = twistkit::cli::run(["twistkit", "check", "twisted", path(&file)]);
    assert_eq!(out.code, 1);
    let r: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r["witness"]["i"], 0);
}
