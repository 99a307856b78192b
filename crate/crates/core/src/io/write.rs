//! Canonical serialization.

use serde_json::{json, Map, Value};

use super::*;

/// Lowest-terms text of a scalar: `a/b` or `a` over ℚ, the residue over F_p.
pub fn scalar_text(s: &Scalar) -> String {
    match s {
        Scalar::Q(q) => {
            let q = q.reduced();
            if q.denom() == &1.into() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        Scalar::Fp { r, .. } => r.to_string(),
    }
}

fn object(pairs: Vec<(String, Value)>) -> Value {
    let mut sorted = pairs;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    Value::Object(sorted.into_iter().collect::<Map<String, Value>>())
}

fn numeric<K: ToString, V>(entries: impl IntoIterator<Item = (K, V)>, f: impl Fn(V) -> Value) -> Value {
    // Callers iterate in numeric order; keep it.
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), f(v))).collect())
}

fn names<K: std::fmt::Display>(entries: &BTreeMap<K, String>) -> Value {
    numeric(entries.iter(), |s| Value::String(s.clone()))
}

fn cell(c: &Cell) -> Value {
    json!([c.0, c.1])
}

/// The blocks of a map as row-major arrays of scalar strings.
pub fn map_json(m: &GradedMap) -> Value {
    numeric(m.blocks().iter(), |b| {
        Value::Array(
            b.to_dense()
                .iter()
                .map(|row| Value::Array(row.iter().map(|x| Value::String(scalar_text(x))).collect()))
                .collect(),
        )
    })
}

fn space_json(s: &GradedSpace) -> Value {
    numeric(s.dims().iter(), |d| json!(d))
}

fn section<T>(doc: &mut Vec<(String, Value)>, name: &str, entries: &BTreeMap<String, T>, f: impl Fn(&T) -> Value) {
    if !entries.is_empty() {
        doc.push((name.to_string(), Value::Object(entries.iter().map(|(k, v)| (k.clone(), f(v))).collect())));
    }
}

fn twisted_json(t: &TwistedDecl) -> Value {
    let diffs = t
        .diffs
        .iter()
        .map(|((i, j), m)| object(vec![("from".into(), json!(i)), ("to".into(), json!(j)), ("map".into(), json!(m))]))
        .collect();
    object(vec![("objects".into(), names(&t.objects)), ("diffs".into(), Value::Array(diffs))])
}

pub fn to_value(doc: &Document) -> Value {
    let mut out: Vec<(String, Value)> = vec![
        ("format".into(), json!(FORMAT_VERSION)),
        ("field".into(), Value::String(doc.field.to_string())),
    ];
    section(&mut out, "spaces", &doc.spaces, space_json);
    section(&mut out, "maps", &doc.maps, |m| {
        object(vec![
            ("source".into(), json!(m.source)),
            ("target".into(), json!(m.target)),
            ("deg".into(), json!(m.map.degree())),
            ("blocks".into(), map_json(&m.map)),
        ])
    });
    section(&mut out, "complexes", &doc.complexes, |c| {
        let mut v = vec![("space".into(), json!(c.space))];
        if let Some(d) = &c.d {
            v.push(("d".into(), json!(d)));
        }
        object(v)
    });
    section(&mut out, "quivers", &doc.quivers, |q| {
        let homs = q
            .homs
            .iter()
            .map(|((a, b), d)| object(vec![("from".into(), json!(a)), ("to".into(), json!(b)), ("d".into(), json!(d))]))
            .collect();
        let comps = q
            .compositions
            .iter()
            .map(|((a, b, c), m)| object(vec![("objects".into(), json!([a, b, c])), ("map".into(), json!(m))]))
            .collect();
        let units = q
            .units
            .iter()
            .map(|(a, coords)| {
                let c: Vec<Value> = coords.iter().map(|x| Value::String(scalar_text(x))).collect();
                object(vec![("object".into(), json!(a)), ("coords".into(), Value::Array(c))])
            })
            .collect();
        object(vec![
            ("objects".into(), json!(q.objects)),
            ("homs".into(), Value::Array(homs)),
            ("compositions".into(), Value::Array(comps)),
            ("units".into(), Value::Array(units)),
        ])
    });
    section(&mut out, "twisted", &doc.twisted, twisted_json);
    section(&mut out, "nested", &doc.nested, |n| {
        let diffs = n
            .diffs
            .iter()
            .map(|((i, j), m)| {
                let inner = TwistedDecl { objects: BTreeMap::new(), diffs: m.components.clone() };
                let comps = twisted_json(&inner)["diffs"].clone();
                object(vec![
                    ("from".into(), json!(i)),
                    ("to".into(), json!(j)),
                    ("degree".into(), json!(m.degree)),
                    ("components".into(), comps),
                ])
            })
            .collect();
        object(vec![("objects".into(), names(&n.objects)), ("diffs".into(), Value::Array(diffs))])
    });
    section(&mut out, "bicomplexes", &doc.bicomplexes, |b| {
        let objects =
            b.objects.iter().map(|(c, x)| object(vec![("cell".into(), cell(c)), ("complex".into(), json!(x))])).collect();
        let diffs = b
            .diffs
            .iter()
            .map(|((s, t), m)| object(vec![("from".into(), cell(s)), ("to".into(), cell(t)), ("map".into(), json!(m))]))
            .collect();
        object(vec![("objects".into(), Value::Array(objects)), ("diffs".into(), Value::Array(diffs))])
    });
    section(&mut out, "streams", &doc.streams, |s| {
        let (c, of) = match s {
            StreamDecl::BarAlgebra { of } => ("bar_algebra", of),
            StreamDecl::BarModule { of } => ("bar_module", of),
        };
        object(vec![("constructor".into(), json!(c)), ("of".into(), json!(of))])
    });
    section(&mut out, "algebras", &doc.algebras, |a| {
        object(vec![("complex".into(), json!(a.complex)), ("ops".into(), names(&a.ops))])
    });
    section(&mut out, "algebra_morphisms", &doc.algebra_morphisms, |f| {
        object(vec![
            ("source".into(), json!(f.source)),
            ("target".into(), json!(f.target)),
            ("components".into(), names(&f.components)),
        ])
    });
    section(&mut out, "modules", &doc.modules, |m| {
        object(vec![
            ("side".into(), json!(if m.side == Side::Left { "left" } else { "right" })),
            ("algebra".into(), json!(m.algebra)),
            ("complex".into(), json!(m.complex)),
            ("ops".into(), names(&m.ops)),
        ])
    });
    section(&mut out, "module_morphisms", &doc.module_morphisms, |f| {
        object(vec![
            ("source".into(), json!(f.source)),
            ("target".into(), json!(f.target)),
            ("degree".into(), json!(f.degree)),
            ("components".into(), names(&f.components)),
        ])
    });
    section(&mut out, "retracts", &doc.retracts, |r| {
        object(vec![
            ("p".into(), json!(r.p)),
            ("q".into(), json!(r.q)),
            ("f".into(), json!(r.f)),
            ("g".into(), json!(r.g)),
            ("h".into(), json!(r.h)),
        ])
    });
    section(&mut out, "transfers", &doc.transfers, |t| {
        object(vec![
            ("module".into(), json!(t.module)),
            ("retract".into(), json!(t.retract)),
            ("words".into(), json!(t.words)),
            ("q".into(), json!(t.q)),
            ("phi".into(), json!(t.phi)),
            ("psi".into(), json!(t.psi)),
            ("h".into(), json!(t.h)),
        ])
    });
    object(out)
}

/// Canonical text of a document, newline terminated.
pub fn serialize(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(doc)).expect("JSON values serialize");
    s.push('\n');
    s
}
