//! The `.dgj` document format: canonical JSON naming spaces, maps and the
//! structures built from them, with cross-references by name.
//!
//! Parsing validates shapes and references and reports the JSON path of the
//! first problem. Serialization is canonical: keys sorted (numeric keys
//! numerically), scalars in lowest terms, two-space indentation.

mod build;
mod parse;
mod resolve;
mod write;

use std::collections::BTreeMap;
use std::fmt;

pub use build::DocumentBuilder;
pub use parse::parse;
pub use resolve::AnyModMorphism;
pub use write::{map_json, scalar_text, serialize, to_value};

use crate::error::Error;
use crate::graded::{GradedMap, GradedSpace};
use crate::scalar::{Field, Scalar};

pub const FORMAT_VERSION: u64 = 1;

pub type Cell = (i64, i64);

/// A problem with a document, located by a dotted JSON path.
#[derive(Debug)]
pub struct DocError {
    pub path: String,
    pub message: String,
    pub cause: Option<Error>,
}

impl DocError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> DocError {
        DocError { path: path.into(), message: message.into(), cause: None }
    }

    pub fn from_error(path: impl Into<String>, e: Error) -> DocError {
        DocError { path: path.into(), message: e.to_string(), cause: Some(e) }
    }

    /// Whether the problem is a failed identity rather than malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self.cause,
            Some(
                Error::NotAComplex(_)
                    | Error::NotMaurerCartan { .. }
                    | Error::Retract { .. }
                    | Error::NotOneSided(_)
                    | Error::Inconsistent(_)
            )
        )
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for DocError {}

pub type DocResult<T> = std::result::Result<T, DocError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub source: String,
    pub target: String,
    pub map: GradedMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexDecl {
    pub space: String,
    pub d: Option<String>,
}

/// A bounded twisted complex of complexes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistedDecl {
    pub objects: BTreeMap<i64, String>,
    pub diffs: BTreeMap<Cell, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwMorphismDecl {
    pub degree: i64,
    pub components: BTreeMap<Cell, String>,
}

/// A twisted complex whose objects are twisted complexes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NestedDecl {
    pub objects: BTreeMap<i64, String>,
    pub diffs: BTreeMap<Cell, TwMorphismDecl>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BicomplexDecl {
    pub objects: BTreeMap<Cell, String>,
    pub diffs: BTreeMap<(Cell, Cell), String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuiverDecl {
    pub objects: Vec<String>,
    pub homs: BTreeMap<(String, String), String>,
    pub compositions: BTreeMap<(String, String, String), String>,
    pub units: BTreeMap<String, Vec<Scalar>>,
}

/// A streamed complex given by a named constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamDecl {
    BarAlgebra { of: String },
    BarModule { of: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub complex: String,
    pub ops: BTreeMap<usize, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDecl {
    pub side: Side,
    pub algebra: String,
    pub complex: String,
    pub ops: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMorphismDecl {
    pub source: String,
    pub target: String,
    pub degree: i64,
    pub components: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgMorphismDecl {
    pub source: String,
    pub target: String,
    pub components: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractDecl {
    pub p: String,
    pub q: String,
    pub f: String,
    pub g: String,
    pub h: String,
}

/// The outcome of a transfer: `module` along `retract` gives `q` with
/// comparison morphisms, valid on words of length at most `words`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferDecl {
    pub module: String,
    pub retract: String,
    pub words: usize,
    pub q: String,
    pub phi: String,
    pub psi: String,
    pub h: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub field: Field,
    pub spaces: BTreeMap<String, GradedSpace>,
    pub maps: BTreeMap<String, MapDecl>,
    pub complexes: BTreeMap<String, ComplexDecl>,
    pub quivers: BTreeMap<String, QuiverDecl>,
    pub twisted: BTreeMap<String, TwistedDecl>,
    pub nested: BTreeMap<String, NestedDecl>,
    pub bicomplexes: BTreeMap<String, BicomplexDecl>,
    pub streams: BTreeMap<String, StreamDecl>,
    pub algebras: BTreeMap<String, AlgebraDecl>,
    pub algebra_morphisms: BTreeMap<String, AlgMorphismDecl>,
    pub modules: BTreeMap<String, ModuleDecl>,
    pub module_morphisms: BTreeMap<String, ModMorphismDecl>,
    pub retracts: BTreeMap<String, RetractDecl>,
    pub transfers: BTreeMap<String, TransferDecl>,
}

impl Document {
    pub fn new(field: Field) -> Document {
        Document {
            field,
            spaces: BTreeMap::new(),
            maps: BTreeMap::new(),
            complexes: BTreeMap::new(),
            quivers: BTreeMap::new(),
            twisted: BTreeMap::new(),
            nested: BTreeMap::new(),
            bicomplexes: BTreeMap::new(),
            streams: BTreeMap::new(),
            algebras: BTreeMap::new(),
            algebra_morphisms: BTreeMap::new(),
            modules: BTreeMap::new(),
            module_morphisms: BTreeMap::new(),
            retracts: BTreeMap::new(),
            transfers: BTreeMap::new(),
        }
    }

    /// Adds the entities of `other`; a name defined in both must carry the
    /// same definition.
    pub fn merge(&mut self, other: Document) -> DocResult<()> {
        if other.field != self.field {
            return Err(DocError::new("field", format!("documents use different fields: {} and {}", self.field, other.field)));
        }
        fn join<T: PartialEq>(section: &str, into: &mut BTreeMap<String, T>, from: BTreeMap<String, T>) -> DocResult<()> {
            for (k, v) in from {
                match into.get(&k) {
                    Some(old) if *old != v => {
                        return Err(DocError::new(format!("{section}.{k}"), "defined differently in two documents"));
                    }
                    Some(_) => {}
                    None => {
                        into.insert(k, v);
                    }
                }
            }
            Ok(())
        }
        join("spaces", &mut self.spaces, other.spaces)?;
        join("maps", &mut self.maps, other.maps)?;
        join("complexes", &mut self.complexes, other.complexes)?;
        join("quivers", &mut self.quivers, other.quivers)?;
        join("twisted", &mut self.twisted, other.twisted)?;
        join("nested", &mut self.nested, other.nested)?;
        join("bicomplexes", &mut self.bicomplexes, other.bicomplexes)?;
        join("streams", &mut self.streams, other.streams)?;
        join("algebras", &mut self.algebras, other.algebras)?;
        join("algebra_morphisms", &mut self.algebra_morphisms, other.algebra_morphisms)?;
        join("modules", &mut self.modules, other.modules)?;
        join("module_morphisms", &mut self.module_morphisms, other.module_morphisms)?;
        join("retracts", &mut self.retracts, other.retracts)?;
        join("transfers", &mut self.transfers, other.transfers)?;
        Ok(())
    }
}
