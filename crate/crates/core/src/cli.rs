//! The `twistkit` command line: checks and constructions on `.dgj` documents
//! with a JSON report on stdout.
//!
//! Exit codes: 0 when every check passes, 1 when an identity fails, 2 on
//! malformed input or usage errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::ainfty::{
    bar_algebra, bar_module_left, bar_module_right, is_ainfty_algebra, is_alg_morphism, is_left_closed, is_left_module,
    is_right_closed, is_right_module,
};
use crate::bitwisted::{check_bitwisted, convolve_bicomplex, cxcol, cxrow, double_convolve, reflect, sigma, CellOrder};
use crate::category::Ch;
use crate::complex::Complex;
use crate::error::Error;
use crate::graded::GradedMap;
use crate::io::{map_json, parse, serialize, to_value, AnyModMorphism, DocError, DocResult, Document, DocumentBuilder, Side};
use crate::quiver::{check_dg_quiver, QuiverLaw};
use crate::scalar::Field;
use crate::transfer::{transfer, verify_transfer, TransferReport};
use crate::twisted::{check_twisted, convolve, Tw, TwistedComplex, TwistedMorphism, Window};

#[derive(Parser, Debug)]
#[command(name = "twistkit", version, about = "Exact checks and constructions for twisted complexes and A-infinity structures")]
struct Cli {
    /// Expected field of the input documents (`q` or `fp:P`); for selftest, the field to draw from.
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<Field>,
    #[command(subcommand)]
    command: Command,
}

fn parse_field(s: &str) -> Result<Field, String> {
    s.parse::<Field>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the defining identities of complexes and twisted structures.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Convolve a twisted complex, bicomplex or twisted complex of twisted complexes.
    Convolve(ConvolveArgs),
    /// Row and column functors, reflection and the sign twist on bicomplexes.
    Rowcol(RowcolArgs),
    /// A-infinity algebras, modules and morphisms.
    #[command(subcommand)]
    Ainfty(AinftyCommand),
    /// Transfer a right module along a retract, or verify recorded transfers.
    Transfer(TransferCommand),
    /// Run a short randomized battery of identities.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct Inputs {
    /// Input documents; they are merged.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Restrict to one entity.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug)]
struct WindowArg {
    /// Index window `LO HI`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<i64>>,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Complexes (d∘d = 0) and DG quivers.
    Dg(Inputs),
    /// Twisted complexes, streamed bars and twisted complexes of twisted complexes.
    Twisted {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        window: WindowArg,
        /// Word-length bound for streamed bars; same as `--window 1-N 0`.
        #[arg(long, conflicts_with = "window")]
        max_word: Option<usize>,
    },
    /// Twisted bicomplexes; the window bounds both rows and columns.
    Bitwisted {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        window: WindowArg,
    },
}

#[derive(Args, Debug)]
struct ConvolveArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    window: WindowArg,
    /// Output document; embedded in the report when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Row,
    Col,
    Reflect,
    Sigma,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::Row => "row",
            Mode::Col => "col",
            Mode::Reflect => "reflect",
            Mode::Sigma => "sigma",
        }
    }
}

#[derive(Args, Debug)]
struct RowcolArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WordArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Longest word checked.
    #[arg(long)]
    max_word: usize,
}

#[derive(Subcommand, Debug)]
enum AinftyCommand {
    CheckAlgebra(WordArgs),
    CheckModule(WordArgs),
    CheckMorphism(WordArgs),
    /// Write the bar construction of an algebra or module truncated to words of length at most N.
    Bar {
        #[command(flatten)]
        words: WordArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct TransferCommand {
    #[command(subcommand)]
    action: Option<TransferAction>,
    #[command(flatten)]
    run: TransferRun,
}

#[derive(Args, Debug)]
struct TransferRun {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Arity bound of the transferred structure.
    #[arg(long, required = true)]
    max_word: Option<usize>,
    #[arg(long)]
    module: Option<String>,
    #[arg(long)]
    retract: Option<String>,
    /// Name of the recorded transfer.
    #[arg(long, default_value = "transfer")]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum TransferAction {
    /// Re-verify the transfers recorded in a document.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        /// Verify on shorter words than recorded.
        #[arg(long)]
        max_word: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// An input or usage problem (exit code 2).
#[derive(Debug)]
struct InputError {
    message: String,
    file: Option<String>,
    path: Option<String>,
}

impl InputError {
    fn new(message: impl Into<String>) -> InputError {
        InputError { message: message.into(), file: None, path: None }
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("message".into(), json!(self.message));
        if let Some(f) = &self.file {
            m.insert("file".into(), json!(f));
        }
        if let Some(p) = &self.path {
            m.insert("path".into(), json!(p));
        }
        Value::Object(m)
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> InputError {
        InputError::new(e.to_string())
    }
}

impl From<DocError> for InputError {
    fn from(e: DocError) -> InputError {
        InputError { message: e.message, file: None, path: (!e.path.is_empty()).then_some(e.path) }
    }
}

type CliResult<T> = Result<T, InputError>;

/// Per-entity results and the first witness of failure.
struct Report {
    fields: Map<String, Value>,
    entities: Vec<Value>,
    witness: Option<Value>,
    failed: bool,
}

impl Report {
    fn new() -> Report {
        Report { fields: Map::new(), entities: Vec::new(), witness: None, failed: false }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    fn pass(&mut self, kind: &str, name: &str, extra: Value) {
        let mut e = json!({"name": name, "kind": kind, "status": "pass"});
        merge_into(&mut e, extra);
        self.entities.push(e);
    }

    fn fail(&mut self, kind: &str, name: &str, witness: Value) {
        let mut w = json!({"entity": name});
        merge_into(&mut w, witness);
        self.entities.push(json!({"name": name, "kind": kind, "status": "fail"}));
        self.failed = true;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    /// Unwraps a resolved entity; a failed identity is recorded, anything else is an input error.
    fn resolve<T>(&mut self, kind: &str, name: &str, r: DocResult<T>) -> CliResult<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_mathematical() => {
                self.fail(kind, name, doc_error_witness(&e));
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }
}

fn merge_into(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(x)) = (target, extra) {
        t.extend(x);
    }
}

fn doc_error_witness(e: &DocError) -> Value {
    let mut w = json!({"path": e.path, "message": e.message});
    match &e.cause {
        Some(Error::NotAComplex(n)) => merge_into(&mut w, json!({"degree": n})),
        Some(Error::NotMaurerCartan { residual }) | Some(Error::Retract { residual }) => {
            merge_into(&mut w, json!({"residual_support": residual.support(), "residual": map_json(residual)}))
        }
        _ => {}
    }
    w
}

fn residual_json(m: &GradedMap) -> Value {
    json!({"residual_norm": "nonzero", "residual_support": m.support(), "residual": map_json(m)})
}

fn tw_residual_json(m: &TwistedMorphism<Ch>) -> Value {
    let comps: Vec<Value> = m
        .components()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((i, j), c)| json!({"from": i, "to": j, "map": map_json(c)}))
        .collect();
    json!({"residual_norm": "nonzero", "residual": comps})
}

fn cell_witness(i: i64, j: i64, residual: Value) -> Value {
    let mut w = json!({"i": i, "j": j});
    merge_into(&mut w, residual);
    w
}

fn word_witness(i: i64, j: i64, residual: &GradedMap) -> Value {
    let mut w = json!({"word_length": 1 - i, "cell": [i, j]});
    merge_into(&mut w, residual_json(residual));
    w
}

fn dims_json(dims: &std::collections::BTreeMap<i64, usize>) -> Value {
    Value::Object(dims.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn load(files: &[PathBuf], field: Option<Field>) -> CliResult<Document> {
    let mut doc: Option<Document> = None;
    for f in files {
        let file = f.display().to_string();
        let with_file = |mut e: InputError| {
            e.file = Some(file.clone());
            e
        };
        let bytes = std::fs::read(f).map_err(|e| with_file(InputError::new(format!("cannot read: {e}"))))?;
        let d = parse(&bytes).map_err(|e| with_file(e.into()))?;
        match &mut doc {
            None => doc = Some(d),
            Some(acc) => acc.merge(d).map_err(|e| with_file(e.into()))?,
        }
    }
    let doc = doc.ok_or_else(|| InputError::new("no input files"))?;
    if let Some(f) = field {
        if f != doc.field {
            return Err(InputError::new(format!("--field {f} does not match the document field {}", doc.field)));
        }
    }
    Ok(doc)
}

/// Names from `candidates`, or just `name` when given and present.
fn select<'a>(candidates: impl Iterator<Item = &'a String>, name: Option<&str>) -> Vec<String> {
    candidates.filter(|c| name.is_none_or(|n| n == c.as_str())).cloned().collect()
}

fn require_some(found: usize, name: Option<&str>, what: &str) -> CliResult<()> {
    if found > 0 {
        return Ok(());
    }
    Err(InputError::new(match name {
        Some(n) => format!("no {what} named {n:?}"),
        None => format!("the input contains no {what}"),
    }))
}

fn window_of(arg: &WindowArg) -> CliResult<Option<Window>> {
    match arg.window.as_deref() {
        None => Ok(None),
        Some([lo, hi]) if lo <= hi => Ok(Some(Window::new(*lo, *hi))),
        Some(_) => Err(InputError::new("--window needs LO <= HI")),
    }
}

fn twisted_window<C: crate::category::DgCategory>(
    name: &str,
    t: &TwistedComplex<C>,
    given: Option<Window>,
) -> CliResult<Window> {
    match (given, t.support()) {
        (Some(w), _) => Ok(w),
        (None, Some(w)) => Ok(w),
        (None, None) => Err(InputError::new(format!("{name} is streamed; pass --window or --max-word"))),
    }
}

fn emit(report: &mut Report, out: Option<&Path>, doc: &Document) -> CliResult<()> {
    match out {
        Some(p) => {
            std::fs::write(p, serialize(doc))
                .map_err(|e| InputError { message: format!("cannot write: {e}"), file: Some(p.display().to_string()), path: None })?;
            report.set("output", json!(p.display().to_string()));
        }
        None => report.set("document", to_value(doc)),
    }
    Ok(())
}

fn law_name(law: QuiverLaw) -> &'static str {
    match law {
        QuiverLaw::DSquared => "d_squared",
        QuiverLaw::Leibniz => "leibniz",
        QuiverLaw::Associativity => "associativity",
        QuiverLaw::UnitClosed => "unit_closed",
        QuiverLaw::LeftUnit => "left_unit",
        QuiverLaw::RightUnit => "right_unit",
    }
}

fn check_dg(report: &mut Report, doc: &Document, name: Option<&str>) -> CliResult<()> {
    let complexes = select(doc.complexes.keys(), name);
    let quivers = select(doc.quivers.keys(), name);
    require_some(complexes.len() + quivers.len(), name, "complex or quiver")?;
    for c in &complexes {
        match doc.complex(c) {
            Ok(cx) => report.pass(
                "complex",
                c,
                json!({"dims": dims_json(cx.space().dims()), "cohomology": dims_json(&cx.cohomology_dims())}),
            ),
            Err(e) if e.is_mathematical() => {
                let mut w = doc_error_witness(&e);
                if let Some(d) = doc.complexes[c].d.as_deref().and_then(|d| doc.map(d).ok()) {
                    merge_into(&mut w, residual_json(&d.compose(d)?));
                }
                report.fail("complex", c, w);
            }
            Err(e) => return Err(e.into()),
        }
    }
    for q in &quivers {
        let quiver = doc.quiver(q)?;
        match check_dg_quiver(&quiver)? {
            None => report.pass("quiver", q, json!({})),
            Some(v) => report.fail(
                "quiver",
                q,
                json!({"law": law_name(v.law), "objects": v.objects, "basis": v.basis.iter().map(|(d, k)| json!([d, k])).collect::<Vec<_>>()}),
            ),
        }
    }
    Ok(())
}

fn check_twisted_cmd(report: &mut Report, doc: &Document, name: Option<&str>, w: Option<Window>) -> CliResult<()> {
    let cat = Ch::new(doc.field);
    let plain = select(doc.twisted.keys().chain(doc.streams.keys()), name);
    let nested = select(doc.nested.keys(), name);
    require_some(plain.len() + nested.len(), name, "twisted complex")?;
    for n in &plain {
        let Some(t) = report.resolve("twisted", n, doc.twisted(n))? else { continue };
        let win = twisted_window(n, &t, w)?;
        let (cells, v) = check_twisted(&cat, &t, win)?;
        match v {
            None => report.pass("twisted", n, json!({"window": [win.lo, win.hi], "cells": cells})),
            Some(v) => report.fail("twisted", n, cell_witness(v.i, v.j, residual_json(&v.residual))),
        }
    }
    for n in &nested {
        let Some(cc) = report.resolve("nested", n, doc.nested(n))? else { continue };
        let win = twisted_window(n, &cc, w)?;
        let mut inner_ok = true;
        for (i, t) in cc.objects().into_iter().flatten() {
            let inner_w = twisted_window(n, t, None)?;
            if let (_, Some(v)) = check_twisted(&cat, t, inner_w)? {
                let mut wit = cell_witness(v.i, v.j, residual_json(&v.residual));
                merge_into(&mut wit, json!({"object": i}));
                report.fail("nested", n, wit);
                inner_ok = false;
                break;
            }
        }
        if !inner_ok {
            continue;
        }
        let (cells, v) = check_twisted(&Tw::new(cat), &cc, win)?;
        match v {
            None => report.pass("nested", n, json!({"window": [win.lo, win.hi], "cells": cells})),
            Some(v) => report.fail("nested", n, cell_witness(v.i, v.j, tw_residual_json(&v.residual))),
        }
    }
    Ok(())
}

fn check_bitwisted_cmd(report: &mut Report, doc: &Document, name: Option<&str>, w: Option<Window>) -> CliResult<()> {
    let cat = Ch::new(doc.field);
    let names = select(doc.bicomplexes.keys(), name);
    require_some(names.len(), name, "bicomplex")?;
    for n in &names {
        let Some(b) = report.resolve("bicomplex", n, doc.bicomplex(n))? else { continue };
        let (cells, v) = check_bitwisted(&cat, &b, w.map(|w| (w, w)))?;
        match v {
            None => report.pass("bicomplex", n, json!({"pairs": cells})),
            Some(v) => {
                let mut wit = json!({"source": [v.source.0, v.source.1], "target": [v.target.0, v.target.1]});
                merge_into(&mut wit, residual_json(&v.residual));
                report.fail("bicomplex", n, wit);
            }
        }
    }
    Ok(())
}

/// The single entity among `names`, or the one called `name`.
fn pick(names: Vec<String>, name: Option<&str>, what: &str) -> CliResult<String> {
    match (names.len(), name) {
        (0, _) => require_some(0, name, what).map(|_| unreachable!()),
        (1, _) => Ok(names.into_iter().next().unwrap()),
        (_, _) => Err(InputError::new(format!("several {what} entities; choose one with --name"))),
    }
}

fn convolve_cmd(report: &mut Report, doc: &Document, args: &ConvolveArgs) -> CliResult<Option<Document>> {
    let name = args.inputs.name.as_deref();
    let w = window_of(&args.window)?;
    let all = select(
        doc.twisted.keys().chain(doc.streams.keys()).chain(doc.nested.keys()).chain(doc.bicomplexes.keys()),
        name,
    );
    let n = pick(all, name, "convolvable")?;
    let (kind, total): (&str, Complex) = if doc.nested.contains_key(&n) {
        let Some(cc) = report.resolve("nested", &n, doc.nested(&n))? else { return Ok(None) };
        ("nested", double_convolve(doc.field, &cc)?)
    } else if doc.bicomplexes.contains_key(&n) {
        let Some(b) = report.resolve("bicomplex", &n, doc.bicomplex(&n))? else { return Ok(None) };
        ("bicomplex", convolve_bicomplex(doc.field, &b, CellOrder::RowMajor)?)
    } else {
        let Some(t) = report.resolve("twisted", &n, doc.twisted(&n))? else { return Ok(None) };
        let win = twisted_window(&n, &t, w)?;
        report.set("window", json!([win.lo, win.hi]));
        ("twisted", convolve(&t, win)?)
    };
    let mut b = DocumentBuilder::new(doc.field);
    let out_name = b.complex(&format!("conv({n})"), &total);
    report.pass(
        kind,
        &n,
        json!({"output": out_name, "dims": dims_json(total.space().dims()), "cohomology": dims_json(&total.cohomology_dims())}),
    );
    Ok(Some(b.finish()))
}

fn rowcol_cmd(report: &mut Report, doc: &Document, args: &RowcolArgs) -> CliResult<Option<Document>> {
    let name = args.inputs.name.as_deref();
    let cat = Ch::new(doc.field);
    let result = match args.mode {
        Mode::Row | Mode::Col => {
            let n = pick(select(doc.nested.keys(), name), name, "twisted complex of twisted complexes")?;
            let Some(cc) = report.resolve("nested", &n, doc.nested(&n))? else { return Ok(None) };
            let b = if matches!(args.mode, Mode::Row) { cxrow(&cat, &cc)? } else { cxcol(&cat, &cc)? };
            (n, b)
        }
        Mode::Reflect | Mode::Sigma => {
            let n = pick(select(doc.bicomplexes.keys(), name), name, "bicomplex")?;
            let Some(b) = report.resolve("bicomplex", &n, doc.bicomplex(&n))? else { return Ok(None) };
            let b = if matches!(args.mode, Mode::Reflect) { reflect(&b) } else { sigma(&cat, &b) };
            (n, b)
        }
    };
    let (n, b) = result;
    let mut builder = DocumentBuilder::new(doc.field);
    let out_name = builder.bicomplex(&format!("{}({n})", args.mode.label()), &b);
    report.pass("rowcol", &n, json!({"output": out_name, "cells": b.objects().len(), "maps": b.diffs().len()}));
    Ok(Some(builder.finish()))
}

fn check_algebras(report: &mut Report, doc: &Document, args: &WordArgs) -> CliResult<()> {
    let name = args.inputs.name.as_deref();
    let names = select(doc.algebras.keys(), name);
    require_some(names.len(), name, "algebra")?;
    for n in &names {
        let Some(alg) = report.resolve("algebra", n, doc.algebra(n))? else { continue };
        match is_ainfty_algebra(&alg, args.max_word)? {
            (cells, None) => report.pass("algebra", n, json!({"cells": cells})),
            (_, Some(v)) => report.fail("algebra", n, word_witness(v.i, v.j, &v.residual)),
        }
    }
    Ok(())
}

fn check_modules(report: &mut Report, doc: &Document, args: &WordArgs) -> CliResult<()> {
    let name = args.inputs.name.as_deref();
    let names = select(doc.modules.keys(), name);
    require_some(names.len(), name, "module")?;
    let cat = Ch::new(doc.field);
    for n in &names {
        let checked = match doc.modules[n].side {
            Side::Right => match report.resolve("module", n, doc.right_module(n))? {
                Some(m) => is_right_module(&cat, &m, args.max_word)?,
                None => continue,
            },
            Side::Left => match report.resolve("module", n, doc.left_module(n))? {
                Some(m) => is_left_module(&m, args.max_word)?,
                None => continue,
            },
        };
        match checked {
            (cells, None) => report.pass("module", n, json!({"cells": cells})),
            (_, Some(v)) => report.fail("module", n, word_witness(v.i, v.j, &v.residual)),
        }
    }
    Ok(())
}

fn check_morphisms(report: &mut Report, doc: &Document, args: &WordArgs) -> CliResult<()> {
    let name = args.inputs.name.as_deref();
    let algs = select(doc.algebra_morphisms.keys(), name);
    let mods = select(doc.module_morphisms.keys(), name);
    require_some(algs.len() + mods.len(), name, "morphism")?;
    let record = |report: &mut Report, kind: &str, n: &str, v: Option<(i64, i64, GradedMap)>| match v {
        None => report.pass(kind, n, json!({})),
        Some((i, j, m)) => report.fail(kind, n, word_witness(i, j, &m)),
    };
    for n in &algs {
        let Some(f) = report.resolve("algebra_morphism", n, doc.algebra_morphism(n))? else { continue };
        let v = is_alg_morphism(&f, args.max_word)?;
        record(report, "algebra_morphism", n, v);
    }
    for n in &mods {
        let Some(f) = report.resolve("module_morphism", n, doc.module_morphism(n))? else { continue };
        let v = match &f {
            AnyModMorphism::Right(f) => is_right_closed(f, args.max_word)?,
            AnyModMorphism::Left(f) => is_left_closed(f, args.max_word)?,
        };
        record(report, "module_morphism", n, v);
    }
    Ok(())
}

fn bar_cmd(report: &mut Report, doc: &Document, args: &WordArgs) -> CliResult<Option<Document>> {
    let name = args.inputs.name.as_deref();
    let n = pick(select(doc.algebras.keys().chain(doc.modules.keys()), name), name, "algebra or module")?;
    let cat = Ch::new(doc.field);
    let stream = if doc.algebras.contains_key(&n) {
        let Some(a) = report.resolve("algebra", &n, doc.algebra(&n))? else { return Ok(None) };
        bar_algebra(&a)
    } else if doc.modules[&n].side == Side::Right {
        let Some(m) = report.resolve("module", &n, doc.right_module(&n))? else { return Ok(None) };
        bar_module_right(&cat, &m)
    } else {
        let Some(m) = report.resolve("module", &n, doc.left_module(&n))? else { return Ok(None) };
        bar_module_left(&m)
    };
    let w = Window::words(args.max_word);
    let bar = stream.truncate(&cat, w)?;
    let mut b = DocumentBuilder::new(doc.field);
    let out_name = b.twisted(&format!("bar({n})"), &bar)?;
    report.set("max_word", json!(args.max_word));
    report.pass("bar", &n, json!({"output": out_name, "window": [w.lo, w.hi], "maps": bar.diffs().map_or(0, |d| d.len())}));
    Ok(Some(b.finish()))
}

fn transfer_report(report: &mut Report, name: &str, r: &TransferReport) {
    let checks: Vec<Value> = r.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect();
    match r.first_failure() {
        None => report.pass("transfer", name, json!({"words": r.words, "checks": checks})),
        Some(c) => {
            let mut w = json!({"check": c.name});
            if let Some((i, j)) = c.cell {
                merge_into(&mut w, json!({"cell": [i, j], "word_length": 1 - i}));
            }
            if let Some(d) = &c.detail {
                merge_into(&mut w, json!({"detail": d}));
            }
            report.fail("transfer", name, w);
        }
    }
}

fn transfer_cmd(report: &mut Report, doc: &Document, args: &TransferRun) -> CliResult<Option<Document>> {
    let n = args.max_word.expect("required by the parser");
    let rights: Vec<String> = doc.modules.iter().filter(|(_, m)| m.side == Side::Right).map(|(k, _)| k.clone()).collect();
    let module = pick(select(rights.iter(), args.module.as_deref()), args.module.as_deref(), "right module")?;
    let complex = &doc.modules[&module].complex;
    let value = doc.complex(complex).ok();
    let fitting: Vec<String> = doc
        .retracts
        .iter()
        .filter(|(_, r)| &r.p == complex || (value.is_some() && doc.complex(&r.p).ok() == value))
        .map(|(k, _)| k.clone())
        .collect();
    let retract = match &args.retract {
        Some(r) => pick(select(doc.retracts.keys(), Some(r)), Some(r), "retract")?,
        None => pick(fitting, None, &format!("retract of {complex}"))?,
    };
    report.set("max_word", json!(n));
    let Some(m) = report.resolve("module", &module, doc.right_module(&module))? else { return Ok(None) };
    let Some(r) = report.resolve("retract", &retract, doc.retract(&retract))? else { return Ok(None) };
    if m.object() != &r.p {
        return Err(InputError::new(format!("retract {retract} does not start at the complex of module {module}")));
    }
    let result = transfer(&m, &r, n)?;
    let verified = verify_transfer(&m, &r, &result, n)?;
    let ops: Vec<usize> = result.q.ops().keys().copied().collect();
    let mut b = DocumentBuilder::extend(doc.clone());
    let recorded = b.transfer(&args.name, &module, &retract, &result);
    report.set("transferred_ops", json!(ops));
    transfer_report(report, &recorded, &verified);
    Ok(Some(b.finish()))
}

fn verify_cmd(report: &mut Report, doc: &Document, inputs: &Inputs, max_word: Option<usize>) -> CliResult<()> {
    let name = inputs.name.as_deref();
    let names = select(doc.transfers.keys(), name);
    require_some(names.len(), name, "transfer")?;
    for t in &names {
        let Some((m, r, result)) = report.resolve("transfer", t, doc.transfer_result(t))? else { continue };
        let n = max_word.unwrap_or(result.words);
        if n > result.words {
            return Err(InputError::new(format!("transfer {t} was computed for words of length at most {}", result.words)));
        }
        let verified = verify_transfer(&m, &r, &result, n)?;
        transfer_report(report, t, &verified);
    }
    Ok(())
}

fn selftest_cmd(report: &mut Report, seed: u64, field: Option<Field>) -> CliResult<()> {
    report.set("seed", json!(seed));
    for item in crate::selftest::run(seed, field)? {
        match item.failure {
            None => report.pass("selftest", item.name, json!({"trials": item.trials})),
            Some((trial, detail)) => report.fail("selftest", item.name, json!({"trial": trial, "detail": detail})),
        }
    }
    Ok(())
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("TWISTKIT_THREADS") {
        let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| InputError::new(format!("TWISTKIT_THREADS={v:?} is not a positive integer")))?;
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn command_label(c: &Command) -> &'static str {
    match c {
        Command::Check(CheckCommand::Dg(_)) => "check dg",
        Command::Check(CheckCommand::Twisted { .. }) => "check twisted",
        Command::Check(CheckCommand::Bitwisted { .. }) => "check bitwisted",
        Command::Convolve(_) => "convolve",
        Command::Rowcol(_) => "rowcol",
        Command::Ainfty(AinftyCommand::CheckAlgebra(_)) => "ainfty check-algebra",
        Command::Ainfty(AinftyCommand::CheckModule(_)) => "ainfty check-module",
        Command::Ainfty(AinftyCommand::CheckMorphism(_)) => "ainfty check-morphism",
        Command::Ainfty(AinftyCommand::Bar { .. }) => "ainfty bar",
        Command::Transfer(TransferCommand { action: Some(_), .. }) => "transfer verify",
        Command::Transfer(_) => "transfer",
        Command::Selftest(_) => "selftest",
    }
}

fn dispatch(cli: &Cli, report: &mut Report) -> CliResult<()> {
    configure_threads()?;
    let field = cli.field;
    match &cli.command {
        Command::Check(CheckCommand::Dg(inputs)) => check_dg(report, &load(&inputs.files, field)?, inputs.name.as_deref()),
        Command::Check(CheckCommand::Twisted { inputs, window, max_word }) => {
            let w = match max_word {
                Some(n) => Some(Window::words(*n)),
                None => window_of(window)?,
            };
            if let Some(n) = max_word {
                report.set("max_word", json!(n));
            } else if let Some(w) = w {
                report.set("window", json!([w.lo, w.hi]));
            }
            check_twisted_cmd(report, &load(&inputs.files, field)?, inputs.name.as_deref(), w)
        }
        Command::Check(CheckCommand::Bitwisted { inputs, window }) => {
            let w = window_of(window)?;
            if let Some(w) = w {
                report.set("window", json!([w.lo, w.hi]));
            }
            check_bitwisted_cmd(report, &load(&inputs.files, field)?, inputs.name.as_deref(), w)
        }
        Command::Convolve(args) => {
            let doc = load(&args.inputs.files, field)?;
            match convolve_cmd(report, &doc, args)? {
                Some(out) => emit(report, args.out.as_deref(), &out),
                None => Ok(()),
            }
        }
        Command::Rowcol(args) => {
            let doc = load(&args.inputs.files, field)?;
            match rowcol_cmd(report, &doc, args)? {
                Some(out) => emit(report, args.out.as_deref(), &out),
                None => Ok(()),
            }
        }
        Command::Ainfty(cmd) => {
            let args = match cmd {
                AinftyCommand::CheckAlgebra(a) | AinftyCommand::CheckModule(a) | AinftyCommand::CheckMorphism(a) => a,
                AinftyCommand::Bar { words, .. } => words,
            };
            let doc = load(&args.inputs.files, field)?;
            report.set("max_word", json!(args.max_word));
            match cmd {
                AinftyCommand::CheckAlgebra(a) => check_algebras(report, &doc, a),
                AinftyCommand::CheckModule(a) => check_modules(report, &doc, a),
                AinftyCommand::CheckMorphism(a) => check_morphisms(report, &doc, a),
                AinftyCommand::Bar { words, out } => match bar_cmd(report, &doc, words)? {
                    Some(d) => emit(report, out.as_deref(), &d),
                    None => Ok(()),
                },
            }
        }
        Command::Transfer(TransferCommand { action: Some(TransferAction::Verify { inputs, max_word }), .. }) => {
            verify_cmd(report, &load(&inputs.files, field)?, inputs, *max_word)
        }
        Command::Transfer(TransferCommand { action: None, run }) => {
            let doc = load(&run.files, field)?;
            match transfer_cmd(report, &doc, run)? {
                Some(d) => emit(report, run.out.as_deref(), &d),
                None => Ok(()),
            }
        }
        Command::Selftest(args) => selftest_cmd(report, args.seed, field),
    }
}

fn finish(command: Option<&str>, status: &str, body: Map<String, Value>, started: Instant) -> String {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("status".into(), json!(status));
    out.extend(body);
    out.insert("timings".into(), json!({"total_ms": started.elapsed().as_millis() as u64}));
    let mut s = serde_json::to_string_pretty(&Value::Object(out)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let started = Instant::now();
    let matches = Cli::command().try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m));
    let cli = match matches {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Execution { code: 0, stdout: e.to_string(), stderr: String::new() };
            }
            let message = e.kind().to_string();
            let body = Map::from_iter([("error".to_string(), json!({"message": message}))]);
            return Execution { code: 2, stdout: finish(None, "error", body, started), stderr: e.render().to_string() };
        }
    };
    let label = command_label(&cli.command);
    let mut report = Report::new();
    match dispatch(&cli, &mut report) {
        Err(e) => {
            let body = Map::from_iter([("error".to_string(), e.json())]);
            let stderr = match (&e.file, &e.path) {
                (Some(f), Some(p)) => format!("error: {f}: at {p}: {}\n", e.message),
                (Some(f), None) => format!("error: {f}: {}\n", e.message),
                (None, Some(p)) => format!("error: at {p}: {}\n", e.message),
                (None, None) => format!("error: {}\n", e.message),
            };
            Execution { code: 2, stdout: finish(Some(label), "error", body, started), stderr }
        }
        Ok(()) => {
            let mut body = report.fields;
            if let Some(w) = report.witness {
                body.insert("witness".into(), w);
            }
            body.insert("entities".into(), Value::Array(report.entities));
            let (code, status) = if report.failed { (1, "fail") } else { (0, "pass") };
            Execution { code, stdout: finish(Some(label), status, body, started), stderr: String::new() }
        }
    }
}
