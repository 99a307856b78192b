//! Parsing with path diagnostics.

use serde_json::{Map, Value};

use super::*;
use crate::matrix::Matrix;

struct At<'a> {
    path: String,
    value: &'a Value,
}

impl<'a> At<'a> {
    fn root(value: &'a Value) -> At<'a> {
        At { path: String::new(), value }
    }

    fn child(&self, key: &str, value: &'a Value) -> At<'a> {
        let path = if self.path.is_empty() { key.to_string() } else { format!("{}.{key}", self.path) };
        At { path, value }
    }

    fn err(&self, message: impl Into<String>) -> DocError {
        DocError::new(self.path.clone(), message)
    }

    fn object(&self) -> DocResult<&'a Map<String, Value>> {
        self.value.as_object().ok_or_else(|| self.err("expected an object"))
    }

    fn array(&self) -> DocResult<&'a Vec<Value>> {
        self.value.as_array().ok_or_else(|| self.err("expected an array"))
    }

    fn string(&self) -> DocResult<String> {
        self.value.as_str().map(str::to_string).ok_or_else(|| self.err("expected a string"))
    }

    fn int(&self) -> DocResult<i64> {
        self.value.as_i64().ok_or_else(|| self.err("expected an integer"))
    }

    fn count(&self) -> DocResult<usize> {
        self.value.as_u64().map(|n| n as usize).ok_or_else(|| self.err("expected a non-negative integer"))
    }

    /// The fields of an object, rejecting keys outside `allowed`.
    fn fields(&self, allowed: &[&str]) -> DocResult<Fields<'a>> {
        let obj = self.object()?;
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(self.child(k, &Value::Null).err(format!("unknown key (expected one of {})", allowed.join(", "))));
            }
        }
        Ok(Fields { at: At { path: self.path.clone(), value: self.value }, obj })
    }

    fn entries(&self) -> DocResult<Vec<(String, At<'a>)>> {
        Ok(self.object()?.iter().map(|(k, v)| (k.clone(), self.child(k, v))).collect())
    }

    fn items(&self) -> DocResult<Vec<At<'a>>> {
        Ok(self.array()?.iter().enumerate().map(|(i, v)| self.child(&i.to_string(), v)).collect())
    }

    fn cell(&self) -> DocResult<Cell> {
        let a = self.array()?;
        match a.as_slice() {
            [x, y] => Ok((self.child("0", x).int()?, self.child("1", y).int()?)),
            _ => Err(self.err("expected a cell [i, j]")),
        }
    }
}

struct Fields<'a> {
    at: At<'a>,
    obj: &'a Map<String, Value>,
}

impl<'a> Fields<'a> {
    fn req(&self, key: &str) -> DocResult<At<'a>> {
        self.obj.get(key).map(|v| self.at.child(key, v)).ok_or_else(|| self.at.err(format!("missing key {key:?}")))
    }

    fn opt(&self, key: &str) -> Option<At<'a>> {
        self.obj.get(key).map(|v| self.at.child(key, v))
    }
}

fn int_key(at: &At<'_>, key: &str) -> DocResult<i64> {
    key.parse().map_err(|_| at.err(format!("key {key:?} is not an integer")))
}

fn arity_key(at: &At<'_>, key: &str) -> DocResult<usize> {
    key.parse().ok().filter(|k| *k >= 1).ok_or_else(|| at.err(format!("key {key:?} is not a positive arity")))
}

fn name_map<K: Ord>(at: &At<'_>, key: impl Fn(&At<'_>, &str) -> DocResult<K>) -> DocResult<BTreeMap<K, String>> {
    let mut out = BTreeMap::new();
    for (k, v) in at.entries()? {
        out.insert(key(&v, &k)?, v.string()?);
    }
    Ok(out)
}

fn insert_unique<K: Ord + fmt::Debug, V>(at: &At<'_>, map: &mut BTreeMap<K, V>, k: K, v: V) -> DocResult<()> {
    if map.contains_key(&k) {
        return Err(at.err(format!("duplicate entry {k:?}")));
    }
    map.insert(k, v);
    Ok(())
}

fn twisted_diffs(at: &At<'_>) -> DocResult<BTreeMap<Cell, String>> {
    let mut out = BTreeMap::new();
    for item in at.items()? {
        let f = item.fields(&["from", "to", "map"])?;
        let key = (f.req("from")?.int()?, f.req("to")?.int()?);
        insert_unique(&item, &mut out, key, f.req("map")?.string()?)?;
    }
    Ok(out)
}

fn parse_space(at: &At<'_>) -> DocResult<GradedSpace> {
    let mut dims = Vec::new();
    for (k, v) in at.entries()? {
        dims.push((int_key(&v, &k)?, v.count()?));
    }
    Ok(GradedSpace::new(dims))
}

fn parse_scalar(at: &At<'_>, field: Field) -> DocResult<Scalar> {
    let text = at.string()?;
    field.parse_scalar(&text).map_err(|e| DocError::from_error(at.path.clone(), e))
}

fn parse_map(at: &At<'_>, field: Field, spaces: &BTreeMap<String, GradedSpace>) -> DocResult<MapDecl> {
    let f = at.fields(&["source", "target", "deg", "blocks"])?;
    let space = |key: &str| -> DocResult<(String, GradedSpace)> {
        let a = f.req(key)?;
        let name = a.string()?;
        let s = spaces.get(&name).ok_or_else(|| a.err(format!("undeclared space {name:?}")))?;
        Ok((name, s.clone()))
    };
    let (source, src) = space("source")?;
    let (target, tgt) = space("target")?;
    let degree = f.req("deg")?.int()?;
    let mut blocks = BTreeMap::new();
    if let Some(b) = f.opt("blocks") {
        for (k, rows_at) in b.entries()? {
            let n = int_key(&rows_at, &k)?;
            let (r, c) = (tgt.dim(n + degree), src.dim(n));
            let rows = rows_at.items()?;
            if rows.len() != r {
                return Err(rows_at.err(format!("expected {r} rows (target degree {}), found {}", n + degree, rows.len())));
            }
            let mut dense = Vec::with_capacity(r);
            for row in rows {
                let entries = row.items()?;
                if entries.len() != c {
                    return Err(row.err(format!("expected {c} entries (source degree {n}), found {}", entries.len())));
                }
                dense.push(entries.iter().map(|x| parse_scalar(x, field)).collect::<DocResult<Vec<_>>>()?);
            }
            let m = Matrix::from_dense(field, r, c, &dense).map_err(|e| DocError::from_error(rows_at.path.clone(), e))?;
            blocks.insert(n, m);
        }
    }
    let map = GradedMap::from_blocks(field, src, tgt, degree, blocks).map_err(|e| DocError::from_error(at.path.clone(), e))?;
    Ok(MapDecl { source, target, map })
}

const SECTIONS: &[&str] = &[
    "format",
    "field",
    "spaces",
    "maps",
    "complexes",
    "quivers",
    "twisted",
    "nested",
    "bicomplexes",
    "streams",
    "algebras",
    "algebra_morphisms",
    "modules",
    "module_morphisms",
    "retracts",
    "transfers",
];

/// Parses and validates a document.
pub fn parse(bytes: &[u8]) -> DocResult<Document> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| DocError::new(format!("line {} column {}", e.line(), e.column()), format!("malformed JSON: {e}")))?;
    let root = At::root(&value);
    let top = root.fields(SECTIONS)?;
    if let Some(v) = top.opt("format") {
        let n = v.count()?;
        if n as u64 != FORMAT_VERSION {
            return Err(v.err(format!("unsupported format version {n}")));
        }
    }
    let field_at = top.req("field")?;
    let field: Field = field_at.string()?.parse().map_err(|e| DocError::from_error("field", e))?;
    let mut doc = Document::new(field);

    let section = |key: &str| -> DocResult<Vec<(String, At<'_>)>> {
        match top.opt(key) {
            Some(a) => a.entries(),
            None => Ok(Vec::new()),
        }
    };
    for (name, at) in section("spaces")? {
        doc.spaces.insert(name, parse_space(&at)?);
    }
    for (name, at) in section("maps")? {
        let m = parse_map(&at, field, &doc.spaces)?;
        doc.maps.insert(name, m);
    }
    for (name, at) in section("complexes")? {
        let f = at.fields(&["space", "d"])?;
        let d = f.opt("d").map(|a| a.string()).transpose()?;
        doc.complexes.insert(name, ComplexDecl { space: f.req("space")?.string()?, d });
    }
    for (name, at) in section("quivers")? {
        let f = at.fields(&["objects", "homs", "compositions", "units"])?;
        let mut q = QuiverDecl::default();
        for o in f.req("objects")?.items()? {
            q.objects.push(o.string()?);
        }
        if let Some(h) = f.opt("homs") {
            for item in h.items()? {
                let g = item.fields(&["from", "to", "d"])?;
                let key = (g.req("from")?.string()?, g.req("to")?.string()?);
                insert_unique(&item, &mut q.homs, key, g.req("d")?.string()?)?;
            }
        }
        if let Some(c) = f.opt("compositions") {
            for item in c.items()? {
                let g = item.fields(&["objects", "map"])?;
                let objs = g.req("objects")?;
                let names = objs.items()?.iter().map(At::string).collect::<DocResult<Vec<_>>>()?;
                let [a, b, c] = <[String; 3]>::try_from(names).map_err(|_| objs.err("expected three objects"))?;
                insert_unique(&item, &mut q.compositions, (a, b, c), g.req("map")?.string()?)?;
            }
        }
        if let Some(u) = f.opt("units") {
            for item in u.items()? {
                let g = item.fields(&["object", "coords"])?;
                let coords = g.req("coords")?.items()?.iter().map(|x| parse_scalar(x, field)).collect::<DocResult<Vec<_>>>()?;
                insert_unique(&item, &mut q.units, g.req("object")?.string()?, coords)?;
            }
        }
        doc.quivers.insert(name, q);
    }
    for (name, at) in section("twisted")? {
        let f = at.fields(&["objects", "diffs"])?;
        let objects = name_map(&f.req("objects")?, int_key)?;
        let diffs = match f.opt("diffs") {
            Some(d) => twisted_diffs(&d)?,
            None => BTreeMap::new(),
        };
        doc.twisted.insert(name, TwistedDecl { objects, diffs });
    }
    for (name, at) in section("nested")? {
        let f = at.fields(&["objects", "diffs"])?;
        let objects = name_map(&f.req("objects")?, int_key)?;
        let mut diffs = BTreeMap::new();
        if let Some(d) = f.opt("diffs") {
            for item in d.items()? {
                let g = item.fields(&["from", "to", "degree", "components"])?;
                let key = (g.req("from")?.int()?, g.req("to")?.int()?);
                let components = match g.opt("components") {
                    Some(c) => twisted_diffs(&c)?,
                    None => BTreeMap::new(),
                };
                insert_unique(&item, &mut diffs, key, TwMorphismDecl { degree: g.req("degree")?.int()?, components })?;
            }
        }
        doc.nested.insert(name, NestedDecl { objects, diffs });
    }
    for (name, at) in section("bicomplexes")? {
        let f = at.fields(&["objects", "diffs"])?;
        let mut b = BicomplexDecl::default();
        for item in f.req("objects")?.items()? {
            let g = item.fields(&["cell", "complex"])?;
            insert_unique(&item, &mut b.objects, g.req("cell")?.cell()?, g.req("complex")?.string()?)?;
        }
        if let Some(d) = f.opt("diffs") {
            for item in d.items()? {
                let g = item.fields(&["from", "to", "map"])?;
                let key = (g.req("from")?.cell()?, g.req("to")?.cell()?);
                insert_unique(&item, &mut b.diffs, key, g.req("map")?.string()?)?;
            }
        }
        doc.bicomplexes.insert(name, b);
    }
    for (name, at) in section("streams")? {
        let f = at.fields(&["constructor", "of"])?;
        let of = f.req("of")?.string()?;
        let c = f.req("constructor")?;
        let s = match c.string()?.as_str() {
            "bar_algebra" => StreamDecl::BarAlgebra { of },
            "bar_module" => StreamDecl::BarModule { of },
            other => return Err(c.err(format!("unknown constructor {other:?} (expected bar_algebra or bar_module)"))),
        };
        doc.streams.insert(name, s);
    }
    for (name, at) in section("algebras")? {
        let f = at.fields(&["complex", "ops"])?;
        let ops = name_map(&f.req("ops")?, arity_key)?;
        doc.algebras.insert(name, AlgebraDecl { complex: f.req("complex")?.string()?, ops });
    }
    for (name, at) in section("algebra_morphisms")? {
        let f = at.fields(&["source", "target", "components"])?;
        doc.algebra_morphisms.insert(
            name,
            AlgMorphismDecl {
                source: f.req("source")?.string()?,
                target: f.req("target")?.string()?,
                components: name_map(&f.req("components")?, arity_key)?,
            },
        );
    }
    for (name, at) in section("modules")? {
        let f = at.fields(&["side", "algebra", "complex", "ops"])?;
        let side = match f.opt("side") {
            None => Side::Right,
            Some(s) => match s.string()?.as_str() {
                "right" => Side::Right,
                "left" => Side::Left,
                other => return Err(s.err(format!("unknown side {other:?} (expected left or right)"))),
            },
        };
        let ops = match f.opt("ops") {
            Some(o) => name_map(&o, arity_key)?,
            None => BTreeMap::new(),
        };
        doc.modules.insert(
            name,
            ModuleDecl { side, algebra: f.req("algebra")?.string()?, complex: f.req("complex")?.string()?, ops },
        );
    }
    for (name, at) in section("module_morphisms")? {
        let f = at.fields(&["source", "target", "degree", "components"])?;
        doc.module_morphisms.insert(
            name,
            ModMorphismDecl {
                source: f.req("source")?.string()?,
                target: f.req("target")?.string()?,
                degree: f.req("degree")?.int()?,
                components: name_map(&f.req("components")?, arity_key)?,
            },
        );
    }
    for (name, at) in section("retracts")? {
        let f = at.fields(&["p", "q", "f", "g", "h"])?;
        let s = |k: &str| f.req(k).and_then(|a| a.string());
        doc.retracts.insert(name, RetractDecl { p: s("p")?, q: s("q")?, f: s("f")?, g: s("g")?, h: s("h")? });
    }
    for (name, at) in section("transfers")? {
        let f = at.fields(&["module", "retract", "words", "q", "phi", "psi", "h"])?;
        let s = |k: &str| f.req(k).and_then(|a| a.string());
        doc.transfers.insert(
            name,
            TransferDecl {
                module: s("module")?,
                retract: s("retract")?,
                words: f.req("words")?.count()?,
                q: s("q")?,
                phi: s("phi")?,
                psi: s("psi")?,
                h: s("h")?,
            },
        );
    }
    doc.validate()?;
    Ok(doc)
}
