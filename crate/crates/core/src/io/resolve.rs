//! Building library objects from a document.

use std::sync::Arc;

use super::*;
use crate::ainfty::{AInfAlgebra, AInfMorphism, LeftModMorphism, LeftModule, ModMorphism, RightModule};
use crate::bitwisted::TwistedBicomplex;
use crate::category::Ch;
use crate::complex::Complex;
use crate::quiver::DgQuiver;
use crate::transfer::{RetractData, TransferResult};
use crate::twisted::{Tw, TwistedComplex, TwistedMorphism};

/// A module morphism on either side.
#[derive(Clone, Debug)]
pub enum AnyModMorphism {
    Right(ModMorphism<Ch>),
    Left(LeftModMorphism),
}

fn lookup<'a, T>(section: &str, kind: &str, entries: &'a BTreeMap<String, T>, name: &str) -> DocResult<&'a T> {
    entries.get(name).ok_or_else(|| DocError::new(section, format!("undeclared {kind} {name:?}")))
}

fn wrap<T>(path: &str, r: crate::error::Result<T>) -> DocResult<T> {
    r.map_err(|e| DocError::from_error(path, e))
}

impl Document {
    fn ch(&self) -> Ch {
        Ch::new(self.field)
    }

    pub fn space(&self, name: &str) -> DocResult<&GradedSpace> {
        lookup("spaces", "space", &self.spaces, name)
    }

    pub fn map(&self, name: &str) -> DocResult<&GradedMap> {
        lookup("maps", "map", &self.maps, name).map(|m| &m.map)
    }

    fn map_at(&self, path: &str, name: &str) -> DocResult<&GradedMap> {
        self.maps.get(name).map(|m| &m.map).ok_or_else(|| DocError::new(path, format!("undeclared map {name:?}")))
    }

    /// The complex; an uncancelled `d∘d` is a mathematical failure.
    pub fn complex(&self, name: &str) -> DocResult<Complex> {
        let c = lookup("complexes", "complex", &self.complexes, name)?;
        let path = format!("complexes.{name}");
        let space = self.spaces.get(&c.space).ok_or_else(|| DocError::new(format!("{path}.space"), format!("undeclared space {:?}", c.space)))?;
        match &c.d {
            None => Ok(Complex::from_space(self.field, space.clone())),
            Some(d) => {
                let m = self.map_at(&format!("{path}.d"), d)?;
                if m.source() != space || m.target() != space || m.degree() != 1 {
                    return Err(DocError::new(format!("{path}.d"), "differential must be a degree 1 endomorphism of the space"));
                }
                wrap(&path, Complex::new(m.clone()))
            }
        }
    }

    fn complex_at(&self, path: &str, name: &str) -> DocResult<Complex> {
        if !self.complexes.contains_key(name) {
            return Err(DocError::new(path, format!("undeclared complex {name:?}")));
        }
        self.complex(name)
    }

    fn checked_map(&self, path: &str, name: &str, source: &GradedSpace, target: &GradedSpace, degree: i64) -> DocResult<GradedMap> {
        let m = self.map_at(path, name)?;
        if m.source() != source || m.target() != target {
            return Err(DocError::new(path, format!("map {name:?} does not run between the expected spaces")));
        }
        if m.degree() != degree {
            return Err(DocError::new(path, format!("map {name:?} has degree {}, expected {degree}", m.degree())));
        }
        Ok(m.clone())
    }

    /// A bounded twisted complex, or a streamed one given by a constructor.
    pub fn twisted(&self, name: &str) -> DocResult<TwistedComplex<Ch>> {
        if let Some(s) = self.streams.get(name) {
            return self.stream(name, s);
        }
        let t = lookup("twisted", "twisted complex", &self.twisted, name)?;
        let path = format!("twisted.{name}");
        self.twisted_from(&path, t)
    }

    fn twisted_from(&self, path: &str, t: &TwistedDecl) -> DocResult<TwistedComplex<Ch>> {
        let mut objects = BTreeMap::new();
        for (i, c) in &t.objects {
            objects.insert(*i, self.complex_at(&format!("{path}.objects.{i}"), c)?);
        }
        let mut diffs = BTreeMap::new();
        for ((i, j), m) in &t.diffs {
            let p = format!("{path}.diffs.({i},{j})");
            let (Some(a), Some(b)) = (objects.get(i), objects.get(j)) else {
                return Err(DocError::new(p, "diff touches a missing object"));
            };
            diffs.insert((*i, *j), self.checked_map(&p, m, a.space(), b.space(), i - j + 1)?);
        }
        wrap(path, TwistedComplex::bounded(&self.ch(), objects, diffs))
    }

    fn stream(&self, name: &str, s: &StreamDecl) -> DocResult<TwistedComplex<Ch>> {
        let path = format!("streams.{name}.of");
        match s {
            StreamDecl::BarAlgebra { of } => {
                let alg = self.algebra_at(&path, of)?;
                Ok(crate::ainfty::bar_algebra(&alg))
            }
            StreamDecl::BarModule { of } => match self.modules.get(of).map(|m| m.side) {
                Some(Side::Right) => Ok(crate::ainfty::bar_module_right(&self.ch(), &self.right_module(of)?)),
                Some(Side::Left) => Ok(crate::ainfty::bar_module_left(&self.left_module(of)?)),
                None => Err(DocError::new(path, format!("undeclared module {of:?}"))),
            },
        }
    }

    /// A twisted complex of twisted complexes.
    pub fn nested(&self, name: &str) -> DocResult<TwistedComplex<Tw<Ch>>> {
        let n = lookup("nested", "nested complex", &self.nested, name)?;
        let path = format!("nested.{name}");
        let mut objects = BTreeMap::new();
        for (i, t) in &n.objects {
            let p = format!("{path}.objects.{i}");
            let decl = self.twisted.get(t).ok_or_else(|| DocError::new(&p, format!("undeclared twisted complex {t:?}")))?;
            objects.insert(*i, self.twisted_from(&format!("twisted.{t}"), decl)?);
        }
        let ch = self.ch();
        let mut diffs = BTreeMap::new();
        for ((i, j), m) in &n.diffs {
            let p = format!("{path}.diffs.({i},{j})");
            let (Some(a), Some(b)) = (objects.get(i), objects.get(j)) else {
                return Err(DocError::new(p, "diff touches a missing object"));
            };
            if m.degree != i - j + 1 {
                return Err(DocError::new(p, format!("degree {}, expected {}", m.degree, i - j + 1)));
            }
            let mut comps = BTreeMap::new();
            for ((k, l), name) in &m.components {
                let q = format!("{p}.components.({k},{l})");
                let (Some(x), Some(y)) = (a.object(*k), b.object(*l)) else {
                    return Err(DocError::new(q, "component touches a missing object"));
                };
                comps.insert((*k, *l), self.checked_map(&q, name, x.space(), y.space(), m.degree + k - l)?);
            }
            diffs.insert((*i, *j), wrap(&p, TwistedMorphism::new(&ch, m.degree, comps))?);
        }
        wrap(&path, TwistedComplex::bounded(&Tw::new(ch), objects, diffs))
    }

    pub fn bicomplex(&self, name: &str) -> DocResult<TwistedBicomplex<Ch>> {
        let b = lookup("bicomplexes", "bicomplex", &self.bicomplexes, name)?;
        let path = format!("bicomplexes.{name}");
        let mut objects = BTreeMap::new();
        for (c, x) in &b.objects {
            objects.insert(*c, self.complex_at(&format!("{path}.objects.({},{})", c.0, c.1), x)?);
        }
        let mut diffs = BTreeMap::new();
        for ((s, t), m) in &b.diffs {
            let p = format!("{path}.diffs.({},{})->({},{})", s.0, s.1, t.0, t.1);
            let (Some(a), Some(c)) = (objects.get(s), objects.get(t)) else {
                return Err(DocError::new(p, "map touches a missing object"));
            };
            let deg = (s.0 + s.1) - (t.0 + t.1) + 1;
            diffs.insert((*s, *t), self.checked_map(&p, m, a.space(), c.space(), deg)?);
        }
        wrap(&path, TwistedBicomplex::new(&self.ch(), objects, diffs))
    }

    pub fn quiver(&self, name: &str) -> DocResult<DgQuiver> {
        let q = lookup("quivers", "quiver", &self.quivers, name)?;
        let path = format!("quivers.{name}");
        let mut out = DgQuiver::new(self.field, q.objects.clone());
        let index = |p: &str, o: &str| out_index(&q.objects, p, o);
        for ((a, b), d) in &q.homs {
            let p = format!("{path}.homs.({a},{b})");
            let (i, j) = (index(&p, a)?, index(&p, b)?);
            wrap(&p, out.set_hom(i, j, self.map_at(&p, d)?.clone()))?;
        }
        for ((a, b, c), m) in &q.compositions {
            let p = format!("{path}.compositions.({a},{b},{c})");
            let (i, j, k) = (index(&p, a)?, index(&p, b)?, index(&p, c)?);
            wrap(&p, out.set_composition(i, j, k, self.map_at(&p, m)?.clone()))?;
        }
        for (a, coords) in &q.units {
            let p = format!("{path}.units.{a}");
            wrap(&p, out.set_unit(index(&p, a)?, coords.clone()))?;
        }
        Ok(out)
    }

    pub fn algebra(&self, name: &str) -> DocResult<Arc<AInfAlgebra>> {
        let a = lookup("algebras", "algebra", &self.algebras, name)?;
        let path = format!("algebras.{name}");
        let complex = self.complex_at(&format!("{path}.complex"), &a.complex)?;
        let mut ops = BTreeMap::new();
        for (k, m) in &a.ops {
            ops.insert(*k, self.map_at(&format!("{path}.ops.{k}"), m)?.clone());
        }
        wrap(&path, AInfAlgebra::new(name, complex, ops))
    }

    fn algebra_at(&self, path: &str, name: &str) -> DocResult<Arc<AInfAlgebra>> {
        if !self.algebras.contains_key(name) {
            return Err(DocError::new(path, format!("undeclared algebra {name:?}")));
        }
        self.algebra(name)
    }

    fn module_parts(&self, name: &str, side: Side) -> DocResult<(String, Arc<AInfAlgebra>, Complex, BTreeMap<usize, GradedMap>)> {
        let m = lookup("modules", "module", &self.modules, name)?;
        let path = format!("modules.{name}");
        if m.side != side {
            return Err(DocError::new(format!("{path}.side"), format!("expected a {} module", if side == Side::Left { "left" } else { "right" })));
        }
        let alg = self.algebra_at(&format!("{path}.algebra"), &m.algebra)?;
        let complex = self.complex_at(&format!("{path}.complex"), &m.complex)?;
        let mut ops = BTreeMap::new();
        for (k, op) in &m.ops {
            ops.insert(*k, self.map_at(&format!("{path}.ops.{k}"), op)?.clone());
        }
        Ok((path, alg, complex, ops))
    }

    pub fn right_module(&self, name: &str) -> DocResult<RightModule<Ch>> {
        let (path, alg, complex, ops) = self.module_parts(name, Side::Right)?;
        wrap(&path, RightModule::new(&self.ch(), name, alg, complex, ops))
    }

    pub fn left_module(&self, name: &str) -> DocResult<LeftModule> {
        let (path, alg, complex, ops) = self.module_parts(name, Side::Left)?;
        wrap(&path, LeftModule::new(name, alg, complex, ops))
    }

    pub fn module_morphism(&self, name: &str) -> DocResult<AnyModMorphism> {
        let f = lookup("module_morphisms", "module morphism", &self.module_morphisms, name)?;
        let path = format!("module_morphisms.{name}");
        let mut comps = BTreeMap::new();
        for (k, m) in &f.components {
            comps.insert(*k, self.map_at(&format!("{path}.components.{k}"), m)?.clone());
        }
        let side = |n: &str, key: &str| {
            self.modules.get(n).map(|m| m.side).ok_or_else(|| DocError::new(format!("{path}.{key}"), format!("undeclared module {n:?}")))
        };
        match (side(&f.source, "source")?, side(&f.target, "target")?) {
            (Side::Right, Side::Right) => {
                let (s, t) = (self.right_module(&f.source)?, self.right_module(&f.target)?);
                wrap(&path, ModMorphism::new(&self.ch(), s, t, f.degree, comps)).map(AnyModMorphism::Right)
            }
            (Side::Left, Side::Left) => {
                let (s, t) = (self.left_module(&f.source)?, self.left_module(&f.target)?);
                wrap(&path, LeftModMorphism::new(s, t, f.degree, comps)).map(AnyModMorphism::Left)
            }
            _ => Err(DocError::new(path, "source and target modules are on different sides")),
        }
    }

    pub fn algebra_morphism(&self, name: &str) -> DocResult<AInfMorphism> {
        let f = lookup("algebra_morphisms", "algebra morphism", &self.algebra_morphisms, name)?;
        let path = format!("algebra_morphisms.{name}");
        let src = self.algebra_at(&format!("{path}.source"), &f.source)?;
        let tgt = self.algebra_at(&format!("{path}.target"), &f.target)?;
        let mut comps = BTreeMap::new();
        for (k, m) in &f.components {
            comps.insert(*k, self.map_at(&format!("{path}.components.{k}"), m)?.clone());
        }
        wrap(&path, AInfMorphism::new(src, tgt, comps))
    }

    /// The retract; `g f = id + d(h)` is checked here.
    pub fn retract(&self, name: &str) -> DocResult<RetractData> {
        let r = lookup("retracts", "retract", &self.retracts, name)?;
        let path = format!("retracts.{name}");
        let p = self.complex_at(&format!("{path}.p"), &r.p)?;
        let q = self.complex_at(&format!("{path}.q"), &r.q)?;
        let f = self.checked_map(&format!("{path}.f"), &r.f, p.space(), q.space(), 0)?;
        let g = self.checked_map(&format!("{path}.g"), &r.g, q.space(), p.space(), 0)?;
        let h = self.checked_map(&format!("{path}.h"), &r.h, p.space(), p.space(), -1)?;
        wrap(&path, RetractData::new(p, q, f, g, h))
    }

    /// The module, retract and recorded result of a transfer.
    pub fn transfer_result(&self, name: &str) -> DocResult<(RightModule<Ch>, RetractData, TransferResult)> {
        let t = lookup("transfers", "transfer", &self.transfers, name)?;
        let path = format!("transfers.{name}");
        let module = self.right_module(&t.module)?;
        let retract = self.retract(&t.retract)?;
        let q = self.right_module(&t.q)?;
        let right = |key: &str, n: &str| match self.module_morphism(n)? {
            AnyModMorphism::Right(f) => Ok(f),
            AnyModMorphism::Left(_) => Err(DocError::new(format!("{path}.{key}"), "expected a right module morphism")),
        };
        let result = TransferResult {
            q,
            phi: right("phi", &t.phi)?,
            psi: right("psi", &t.psi)?,
            big_h: right("h", &t.h)?,
            words: t.words,
        };
        Ok((module, retract, result))
    }

    /// Resolves every entity, failing on malformed input. Failed identities
    /// (`d∘d ≠ 0`, a broken retract) are left for the checks to report.
    pub(super) fn validate(&self) -> DocResult<()> {
        let keep = |r: DocResult<()>| match r {
            Err(e) if !e.is_mathematical() => Err(e),
            _ => Ok(()),
        };
        for n in self.complexes.keys() {
            keep(self.complex(n).map(drop))?;
        }
        for n in self.quivers.keys() {
            keep(self.quiver(n).map(drop))?;
        }
        for n in self.twisted.keys().chain(self.streams.keys()) {
            keep(self.twisted(n).map(drop))?;
        }
        for n in self.nested.keys() {
            keep(self.nested(n).map(drop))?;
        }
        for n in self.bicomplexes.keys() {
            keep(self.bicomplex(n).map(drop))?;
        }
        for n in self.algebras.keys() {
            keep(self.algebra(n).map(drop))?;
        }
        for n in self.algebra_morphisms.keys() {
            keep(self.algebra_morphism(n).map(drop))?;
        }
        for (n, m) in &self.modules {
            keep(match m.side {
                Side::Right => self.right_module(n).map(drop),
                Side::Left => self.left_module(n).map(drop),
            })?;
        }
        for n in self.module_morphisms.keys() {
            keep(self.module_morphism(n).map(drop))?;
        }
        for n in self.retracts.keys() {
            keep(self.retract(n).map(drop))?;
        }
        for n in self.transfers.keys() {
            keep(self.transfer_result(n).map(drop))?;
        }
        Ok(())
    }
}

fn out_index(objects: &[String], path: &str, name: &str) -> DocResult<usize> {
    objects.iter().position(|o| o == name).ok_or_else(|| DocError::new(path, format!("undeclared quiver object {name:?}")))
}
