//! Writing library objects into a document under generated names.

use super::*;
use crate::ainfty::{AInfAlgebra, LeftModule, ModMorphism, RightModule};
use crate::bitwisted::TwistedBicomplex;
use crate::category::Ch;
use crate::complex::Complex;
use crate::error::Result;
use crate::transfer::{RetractData, TransferResult};
use crate::twisted::{Tw, TwistedComplex};

/// Accumulates entities; equal spaces, maps and complexes are shared, other
/// names are made unique by a numeric suffix.
#[derive(Clone, Debug)]
pub struct DocumentBuilder {
    doc: Document,
}

fn fresh<T>(entries: &BTreeMap<String, T>, name: &str) -> String {
    if !entries.contains_key(name) {
        return name.to_string();
    }
    (2..).map(|k| format!("{name}#{k}")).find(|n| !entries.contains_key(n)).unwrap()
}

fn insert<T: PartialEq>(entries: &mut BTreeMap<String, T>, name: &str, value: T) -> String {
    if entries.get(name) == Some(&value) {
        return name.to_string();
    }
    let n = fresh(entries, name);
    entries.insert(n.clone(), value);
    n
}

impl DocumentBuilder {
    pub fn new(field: Field) -> DocumentBuilder {
        DocumentBuilder { doc: Document::new(field) }
    }

    pub fn extend(doc: Document) -> DocumentBuilder {
        DocumentBuilder { doc }
    }

    pub fn finish(self) -> Document {
        self.doc
    }

    pub fn space(&mut self, name: &str, s: &GradedSpace) -> String {
        if let Some((n, _)) = self.doc.spaces.iter().find(|(_, x)| *x == s) {
            return n.clone();
        }
        insert(&mut self.doc.spaces, name, s.clone())
    }

    pub fn map(&mut self, name: &str, m: &GradedMap) -> String {
        let source = self.space(&format!("{name}.source"), m.source());
        let target = self.space(&format!("{name}.target"), m.target());
        let decl = MapDecl { source, target, map: m.clone() };
        if let Some((n, _)) = self.doc.maps.iter().find(|(_, x)| **x == decl) {
            return n.clone();
        }
        insert(&mut self.doc.maps, name, decl)
    }

    pub fn complex(&mut self, name: &str, c: &Complex) -> String {
        let space = self.space(name, c.space());
        let d = (!c.differential().is_zero()).then(|| self.map(&format!("{name}.d"), c.differential()));
        let decl = ComplexDecl { space, d };
        if let Some((n, _)) = self.doc.complexes.iter().find(|(_, x)| **x == decl) {
            return n.clone();
        }
        insert(&mut self.doc.complexes, name, decl)
    }

    fn twisted_decl(&mut self, name: &str, t: &TwistedComplex<Ch>) -> Result<TwistedDecl> {
        t.require_support("serialization")?;
        let mut decl = TwistedDecl::default();
        for (i, c) in t.objects().expect("bounded") {
            decl.objects.insert(*i, self.complex(&format!("{name}[{i}]"), c));
        }
        for ((i, j), a) in t.diffs().expect("bounded") {
            decl.diffs.insert((*i, *j), self.map(&format!("{name}[{i},{j}]"), a));
        }
        Ok(decl)
    }

    /// A bounded twisted complex; streamed ones must be truncated first.
    pub fn twisted(&mut self, name: &str, t: &TwistedComplex<Ch>) -> Result<String> {
        let decl = self.twisted_decl(name, t)?;
        Ok(insert(&mut self.doc.twisted, name, decl))
    }

    pub fn nested(&mut self, name: &str, cc: &TwistedComplex<Tw<Ch>>) -> Result<String> {
        cc.require_support("serialization")?;
        let mut decl = NestedDecl::default();
        for (i, t) in cc.objects().expect("bounded") {
            decl.objects.insert(*i, self.twisted(&format!("{name}[{i}]"), t)?);
        }
        for ((i, j), a) in cc.diffs().expect("bounded") {
            let mut components = BTreeMap::new();
            for ((k, l), m) in a.components() {
                components.insert((*k, *l), self.map(&format!("{name}[{i},{j}][{k},{l}]"), m));
            }
            decl.diffs.insert((*i, *j), TwMorphismDecl { degree: a.degree(), components });
        }
        Ok(insert(&mut self.doc.nested, name, decl))
    }

    pub fn bicomplex(&mut self, name: &str, b: &TwistedBicomplex<Ch>) -> String {
        let mut decl = BicomplexDecl::default();
        for (c, x) in b.objects() {
            decl.objects.insert(*c, self.complex(&format!("{name}[{},{}]", c.0, c.1), x));
        }
        for ((s, t), a) in b.diffs() {
            decl.diffs.insert((*s, *t), self.map(&format!("{name}[{},{}->{},{}]", s.0, s.1, t.0, t.1), a));
        }
        insert(&mut self.doc.bicomplexes, name, decl)
    }

    pub fn algebra(&mut self, name: &str, a: &AInfAlgebra) -> String {
        let complex = self.complex(name, a.complex());
        let ops = a.ops().iter().map(|(k, m)| (*k, self.map(&format!("{name}.m{k}"), m))).collect();
        insert(&mut self.doc.algebras, name, AlgebraDecl { complex, ops })
    }

    pub fn right_module(&mut self, name: &str, m: &RightModule<Ch>, algebra: &str) -> String {
        let complex = self.complex(name, m.object());
        let ops = m.ops().iter().map(|(k, p)| (*k, self.map(&format!("{name}.p{k}"), p))).collect();
        let decl = ModuleDecl { side: Side::Right, algebra: algebra.to_string(), complex, ops };
        insert(&mut self.doc.modules, name, decl)
    }

    pub fn left_module(&mut self, name: &str, m: &LeftModule, algebra: &str) -> String {
        let complex = self.complex(name, m.object());
        let ops = m.ops().iter().map(|(k, p)| (*k, self.map(&format!("{name}.p{k}"), p))).collect();
        let decl = ModuleDecl { side: Side::Left, algebra: algebra.to_string(), complex, ops };
        insert(&mut self.doc.modules, name, decl)
    }

    pub fn right_morphism(&mut self, name: &str, f: &ModMorphism<Ch>, source: &str, target: &str) -> String {
        let components = f.components().iter().map(|(k, m)| (*k, self.map(&format!("{name}.f{k}"), m))).collect();
        let decl =
            ModMorphismDecl { source: source.to_string(), target: target.to_string(), degree: f.degree(), components };
        insert(&mut self.doc.module_morphisms, name, decl)
    }

    pub fn retract(&mut self, name: &str, r: &RetractData) -> String {
        let p = self.complex(&format!("{name}.P"), &r.p);
        let q = self.complex(&format!("{name}.Q"), &r.q);
        let decl = RetractDecl {
            p,
            q,
            f: self.map(&format!("{name}.f"), &r.f),
            g: self.map(&format!("{name}.g"), &r.g),
            h: self.map(&format!("{name}.h"), &r.h),
        };
        insert(&mut self.doc.retracts, name, decl)
    }

    /// Records a transfer of the already present `module` along `retract`.
    pub fn transfer(&mut self, name: &str, module: &str, retract: &str, result: &TransferResult) -> String {
        let algebra = self.doc.modules[module].algebra.clone();
        let q = self.right_module(&format!("{name}.q"), &result.q, &algebra);
        let decl = TransferDecl {
            module: module.to_string(),
            retract: retract.to_string(),
            words: result.words,
            phi: self.right_morphism(&format!("{name}.phi"), &result.phi, module, &q),
            psi: self.right_morphism(&format!("{name}.psi"), &result.psi, &q, module),
            h: self.right_morphism(&format!("{name}.H"), &result.big_h, module, module),
            q,
        };
        insert(&mut self.doc.transfers, name, decl)
    }
}
