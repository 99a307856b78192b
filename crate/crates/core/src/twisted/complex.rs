use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::Window;
use crate::category::DgCategory;
use crate::error::{Error, Result};

/// Hull of the degrees occupied by shifted objects `a_i[-i]`; `None` bounds
/// are unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeHull {
    Empty,
    Range { lo: Option<i64>, hi: Option<i64> },
}

impl DegreeHull {
    pub fn contains(&self, n: i64) -> bool {
        match self {
            DegreeHull::Empty => false,
            DegreeHull::Range { lo, hi } => lo.is_none_or(|l| l <= n) && hi.is_none_or(|h| n <= h),
        }
    }
}

type ObjectGen<C> = Box<dyn Fn(i64) -> Option<<C as DgCategory>::Object> + Send + Sync>;
type DiffGen<C> = Box<dyn Fn(i64, i64) -> Option<<C as DgCategory>::Morphism> + Send + Sync>;
type Reach = Box<dyn Fn(i64) -> Option<(i64, i64)> + Send + Sync>;
type Tail = Box<dyn Fn(i64) -> DegreeHull + Send + Sync>;

/// Facts a stream asserts about itself.
pub struct StreamCertificate {
    /// Objects vanish below / above these indices.
    pub lower: Option<i64>,
    pub upper: Option<i64>,
    /// All `α_ij` with `i >= j` vanish.
    pub one_sided: bool,
    /// Degree hulls of `a_i[-i]` over all `i < lo` and all `i > hi`, used to
    /// decide which convolution degrees a window computes exactly.
    pub below: Option<Tail>,
    pub above: Option<Tail>,
}

/// A lazily generated twisted complex. Generators must be pure; results are
/// memoised.
pub struct Stream<C: DgCategory> {
    name: String,
    object: ObjectGen<C>,
    diff: DiffGen<C>,
    reach: Reach,
    certificate: StreamCertificate,
    objects: Mutex<HashMap<i64, Option<C::Object>>>,
    diffs: Mutex<HashMap<(i64, i64), Option<C::Morphism>>>,
}

impl<C: DgCategory> Stream<C> {
    /// `reach(i)` bounds the targets `j` with possibly nonzero `α_ij`; `diff`
    /// is only called inside that range.
    pub fn new(
        name: impl Into<String>,
        object: impl Fn(i64) -> Option<C::Object> + Send + Sync + 'static,
        diff: impl Fn(i64, i64) -> Option<C::Morphism> + Send + Sync + 'static,
        reach: impl Fn(i64) -> Option<(i64, i64)> + Send + Sync + 'static,
        certificate: StreamCertificate,
    ) -> Stream<C> {
        Stream {
            name: name.into(),
            object: Box::new(object),
            diff: Box::new(diff),
            reach: Box::new(reach),
            certificate,
            objects: Mutex::new(HashMap::new()),
            diffs: Mutex::new(HashMap::new()),
        }
    }

    fn object(&self, i: i64) -> Option<C::Object> {
        if let Some(o) = self.objects.lock().unwrap().get(&i) {
            return o.clone();
        }
        let o = (self.object)(i);
        self.objects.lock().unwrap().insert(i, o.clone());
        o
    }

    fn diff(&self, i: i64, j: i64) -> Option<C::Morphism> {
        match (self.reach)(i) {
            Some((lo, hi)) if lo <= j && j <= hi => {}
            _ => return None,
        }
        if let Some(d) = self.diffs.lock().unwrap().get(&(i, j)) {
            return d.clone();
        }
        let d = (self.diff)(i, j);
        self.diffs.lock().unwrap().insert((i, j), d.clone());
        d
    }
}

enum Repr<C: DgCategory> {
    Bounded { objects: BTreeMap<i64, C::Object>, diffs: BTreeMap<(i64, i64), C::Morphism> },
    Streamed(Arc<Stream<C>>),
}

/// A twisted complex `(a_i, α_ij)`; absent objects and diffs are zero.
pub struct TwistedComplex<C: DgCategory> {
    repr: Repr<C>,
}

impl<C: DgCategory> Clone for TwistedComplex<C> {
    fn clone(&self) -> Self {
        let repr = match &self.repr {
            Repr::Bounded { objects, diffs } => Repr::Bounded { objects: objects.clone(), diffs: diffs.clone() },
            Repr::Streamed(s) => Repr::Streamed(Arc::clone(s)),
        };
        TwistedComplex { repr }
    }
}

impl<C: DgCategory> fmt::Debug for TwistedComplex<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Bounded { objects, diffs } => f
                .debug_struct("TwistedComplex")
                .field("objects", objects)
                .field("diffs", diffs)
                .finish(),
            Repr::Streamed(s) => write!(f, "TwistedComplex(stream {:?})", s.name),
        }
    }
}

/// Boundedness and one-sidedness flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub bounded: bool,
    pub bounded_above: bool,
    pub bounded_below: bool,
    pub one_sided: bool,
}

impl<C: DgCategory> TwistedComplex<C> {
    /// A finite twisted complex. Zero diffs are dropped; every diff must run
    /// between present objects. Degrees are checked by [`super::check_twisted`].
    pub fn bounded(
        cat: &C,
        objects: BTreeMap<i64, C::Object>,
        diffs: BTreeMap<(i64, i64), C::Morphism>,
    ) -> Result<TwistedComplex<C>> {
        let mut kept = BTreeMap::new();
        for ((i, j), a) in diffs {
            if !objects.contains_key(&i) || !objects.contains_key(&j) {
                return Err(Error::Support(format!("diff ({i},{j}) touches a missing object")));
            }
            if !cat.is_zero(&a) {
                kept.insert((i, j), a);
            }
        }
        Ok(TwistedComplex { repr: Repr::Bounded { objects, diffs: kept } })
    }

    pub fn streamed(stream: Stream<C>) -> TwistedComplex<C> {
        TwistedComplex { repr: Repr::Streamed(Arc::new(stream)) }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.repr, Repr::Bounded { .. })
    }

    pub fn name(&self) -> Option<&str> {
        match &self.repr {
            Repr::Streamed(s) => Some(&s.name),
            Repr::Bounded { .. } => None,
        }
    }

    /// Index range of the objects of a bounded complex.
    pub fn support(&self) -> Option<Window> {
        match &self.repr {
            Repr::Bounded { objects, .. } => {
                let lo = objects.keys().next().copied();
                let hi = objects.keys().next_back().copied();
                Some(match (lo, hi) {
                    (Some(lo), Some(hi)) => Window::new(lo, hi),
                    _ => Window::new(0, -1),
                })
            }
            Repr::Streamed(_) => None,
        }
    }

    /// Support of a bounded complex, or an error naming `what` for streams.
    pub fn require_support(&self, what: &str) -> Result<Window> {
        self.support()
            .ok_or_else(|| Error::Support(format!("{what} needs a bounded complex; truncate the stream first")))
    }

    pub fn object(&self, i: i64) -> Option<C::Object> {
        match &self.repr {
            Repr::Bounded { objects, .. } => objects.get(&i).cloned(),
            Repr::Streamed(s) => s.object(i),
        }
    }

    pub fn diff(&self, i: i64, j: i64) -> Option<C::Morphism> {
        match &self.repr {
            Repr::Bounded { diffs, .. } => diffs.get(&(i, j)).cloned(),
            Repr::Streamed(s) => s.diff(i, j),
        }
    }

    /// Range of targets reachable from `i`.
    pub fn reach(&self, i: i64) -> Option<(i64, i64)> {
        match &self.repr {
            Repr::Bounded { diffs, .. } => {
                let mut js = diffs.range((i, i64::MIN)..=(i, i64::MAX)).map(|((_, j), _)| *j);
                let first = js.next()?;
                let last = js.last().unwrap_or(first);
                Some((first, last))
            }
            Repr::Streamed(s) => (s.reach)(i),
        }
    }

    /// Nonzero diffs out of `i`, by target.
    pub fn arrows_from(&self, cat: &C, i: i64) -> Vec<(i64, C::Morphism)> {
        match &self.repr {
            Repr::Bounded { diffs, .. } => {
                diffs.range((i, i64::MIN)..=(i, i64::MAX)).map(|((_, j), a)| (*j, a.clone())).collect()
            }
            Repr::Streamed(s) => match (s.reach)(i) {
                Some((lo, hi)) => {
                    (lo..=hi).filter_map(|j| s.diff(i, j).filter(|a| !cat.is_zero(a)).map(|a| (j, a))).collect()
                }
                None => Vec::new(),
            },
        }
    }

    /// Indices in `w` carrying an object.
    pub fn indices(&self, w: Window) -> Vec<i64> {
        match &self.repr {
            Repr::Bounded { objects, .. } => {
                if w.is_empty() {
                    return Vec::new();
                }
                objects.range(w.lo..=w.hi).map(|(i, _)| *i).collect()
            }
            Repr::Streamed(s) => w.indices().filter(|i| s.object(*i).is_some()).collect(),
        }
    }

    /// Whether every arrow leaving an object in `w` lands in `w`; windowed
    /// computations are exact exactly on such windows.
    pub fn is_closed_on(&self, w: Window) -> bool {
        self.indices(w).into_iter().all(|i| match self.reach(i) {
            None => true,
            Some((lo, hi)) => (lo..=hi).all(|j| w.contains(j) || self.object(j).is_none()),
        })
    }

    /// Restriction to the objects and diffs inside `w`.
    pub fn truncate(&self, cat: &C, w: Window) -> Result<TwistedComplex<C>> {
        let idx = self.indices(w);
        let objects: BTreeMap<i64, C::Object> = idx.iter().map(|i| (*i, self.object(*i).unwrap())).collect();
        let mut diffs = BTreeMap::new();
        for i in &idx {
            for (j, a) in self.arrows_from(cat, *i) {
                if objects.contains_key(&j) {
                    diffs.insert((*i, j), a);
                }
            }
        }
        TwistedComplex::bounded(cat, objects, diffs)
    }

    /// All nonzero diffs of a bounded complex.
    pub fn diffs(&self) -> Option<&BTreeMap<(i64, i64), C::Morphism>> {
        match &self.repr {
            Repr::Bounded { diffs, .. } => Some(diffs),
            Repr::Streamed(_) => None,
        }
    }

    pub fn objects(&self) -> Option<&BTreeMap<i64, C::Object>> {
        match &self.repr {
            Repr::Bounded { objects, .. } => Some(objects),
            Repr::Streamed(_) => None,
        }
    }

    pub(crate) fn certificate(&self) -> Option<&StreamCertificate> {
        match &self.repr {
            Repr::Streamed(s) => Some(&s.certificate),
            Repr::Bounded { .. } => None,
        }
    }

    /// Same objects, no diffs.
    pub fn underlying(&self, cat: &C, w: Window) -> Result<TwistedComplex<C>> {
        let objects = self.indices(w).into_iter().map(|i| (i, self.object(i).unwrap())).collect();
        TwistedComplex::bounded(cat, objects, BTreeMap::new())
    }
}
