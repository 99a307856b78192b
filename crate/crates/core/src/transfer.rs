//! Homotopy transfer of right A∞-module structure along a retract.
//!
//! Everything is computed on bars truncated to words of length at most `N`.
//! With `μ̄` the bar of the operations `p_k` (`k >= 2`) viewed as a degree-1
//! morphism, `ρ̄ = μ̄ + μ̄ h̄ μ̄ + ...`, the transferred structure is read from
//! `ν̄ = f̄ ρ̄ ḡ` and the comparison maps are `φ̄ = f̄ (1 + ρ̄ h̄)`,
//! `ψ̄ = (1 + h̄ ρ̄) ḡ` and `H̄ = h̄ (1 + ρ̄ h̄)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ainfty::{bar_module_right, bar_right_morphism, is_right_module, ModMorphism, RightModule};
use crate::category::Ch;
use crate::complex::{hom_differential, Complex};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::{inverse, kernel, rref, Matrix};
use crate::scalar::{Field, Scalar};
use crate::twisted::{tw_compose, tw_diff, tw_identity, TwistedMorphism, Window};

/// A homotopy retract: closed degree-0 maps `f: P -> Q`, `g: Q -> P` and a
/// degree -1 map `h` on `P` with `g f = id + d(h)`.
#[derive(Clone, Debug)]
pub struct RetractData {
    pub p: Complex,
    pub q: Complex,
    pub f: GradedMap,
    pub g: GradedMap,
    pub h: GradedMap,
}

impl RetractData {
    pub fn new(p: Complex, q: Complex, f: GradedMap, g: GradedMap, h: GradedMap) -> Result<RetractData> {
        for (name, m, deg) in [("f", &f, 0), ("g", &g, 0), ("h", &h, -1)] {
            if m.degree() != deg {
                return Err(Error::Degree(format!("{name} has degree {}, expected {deg}", m.degree())));
            }
        }
        if !hom_differential(&p, &q, &f)?.is_zero() {
            return Err(Error::Invalid("f is not closed".into()));
        }
        if !hom_differential(&q, &p, &g)?.is_zero() {
            return Err(Error::Invalid("g is not closed".into()));
        }
        let residual = g.compose(&f)?.sub(&p.identity())?.sub(&hom_differential(&p, &p, &h)?)?;
        if !residual.is_zero() {
            return Err(Error::Retract { residual: Box::new(residual) });
        }
        Ok(RetractData { p, q, f, g, h })
    }

    /// `f = g = id`, `h = 0`.
    pub fn trivial(p: &Complex) -> RetractData {
        let id = p.identity();
        let h = GradedMap::zero(p.field(), p.space().clone(), p.space().clone(), -1);
        RetractData { p: p.clone(), q: p.clone(), f: id.clone(), g: id, h }
    }

    /// The retract of `P` onto its cohomology, by row reduction: in each
    /// degree `P^n = B^n ⊕ H^n ⊕ C^n` with `d: C^n -> B^{n+1}` sending chosen
    /// coordinate vectors to a basis of boundaries, and `h` minus the
    /// inverse of that isomorphism.
    pub fn onto_homology(p: &Complex) -> Result<RetractData> {
        let field = p.field();
        let space = p.space();
        let dense = |n: i64| -> Vec<Vec<Scalar>> { p.differential().block_or_zero(n).to_dense() };
        let mut homology = BTreeMap::new();
        let mut f_blocks = BTreeMap::new();
        let mut g_blocks = BTreeMap::new();
        let mut s_blocks = BTreeMap::new();
        let mut reps_by_degree = BTreeMap::new();
        let mut dual_by_degree = BTreeMap::new();
        for (&n, &dim) in space.dims() {
            let d_prev = dense(n - 1);
            let d_here = dense(n);
            let prev_pivots = if d_prev.is_empty() { Vec::new() } else { rref(&d_prev).1 };
            let here_pivots = if d_here.is_empty() { Vec::new() } else { rref(&d_here).1 };
            let mut basis: Vec<Vec<Scalar>> = prev_pivots.iter().map(|&c| d_prev.iter().map(|row| row[c].clone()).collect()).collect();
            let cycles = if d_here.is_empty() { unit_vectors(field, dim) } else { kernel(field, &d_here, dim) };
            let mut reps = Vec::new();
            for z in cycles {
                let mut trial = basis.clone();
                trial.push(z.clone());
                if rref(&trial).1.len() == trial.len() {
                    basis.push(z.clone());
                    reps.push(z);
                }
            }
            for &c in &here_pivots {
                let mut e = vec![field.zero(); dim];
                e[c] = field.one();
                basis.push(e);
            }
            if basis.len() != dim {
                return Err(Error::Inconsistent(format!("degree {n}: split has {} vectors, expected {dim}", basis.len())));
            }
            // `basis` holds columns; transpose into a row-major matrix.
            let t: Vec<Vec<Scalar>> = (0..dim).map(|r| basis.iter().map(|v| v[r].clone()).collect()).collect();
            let t_inv = inverse(field, &t).ok_or_else(|| Error::Inconsistent(format!("degree {n}: split is singular")))?;
            let (nb, nh) = (prev_pivots.len(), reps.len());
            homology.insert(n, nh);
            reps_by_degree.insert(n, reps);
            dual_by_degree.insert(n, t_inv[nb..nb + nh].to_vec());
            if nb > 0 {
                let rows = space.dim(n - 1);
                let mut s = vec![vec![field.zero(); dim]; rows];
                for (k, &c) in prev_pivots.iter().enumerate() {
                    s[c] = t_inv[k].iter().map(|x| -x).collect();
                }
                s_blocks.insert(n, Matrix::from_dense(field, rows, dim, &s)?);
            }
        }
        let q_space = GradedSpace::new(homology.iter().map(|(n, d)| (*n, *d)));
        for (n, reps) in reps_by_degree {
            let dim = space.dim(n);
            let dense_g: Vec<Vec<Scalar>> = (0..dim).map(|r| reps.iter().map(|v| v[r].clone()).collect()).collect();
            g_blocks.insert(n, Matrix::from_dense(field, dim, reps.len(), &dense_g)?);
            let dual = &dual_by_degree[&n];
            f_blocks.insert(n, Matrix::from_dense(field, reps.len(), dim, dual)?);
        }
        let f = GradedMap::from_blocks(field, space.clone(), q_space.clone(), 0, f_blocks)?;
        let g = GradedMap::from_blocks(field, q_space.clone(), space.clone(), 0, g_blocks)?;
        let h = GradedMap::from_blocks(field, space.clone(), space.clone(), -1, s_blocks)?;
        RetractData::new(p.clone(), Complex::from_space(field, q_space), f, g, h)
    }
}

fn unit_vectors(field: Field, dim: usize) -> Vec<Vec<Scalar>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect()
}

fn bare(m: &RightModule<Ch>, object: &Complex, name: &str) -> Result<RightModule<Ch>> {
    RightModule::new(&Ch::new(m.alg.field()), name, Arc::clone(&m.alg), object.clone(), BTreeMap::new())
}

fn strict(source: &RightModule<Ch>, target: &RightModule<Ch>, map: &GradedMap, n: usize) -> Result<TwistedMorphism<Ch>> {
    let ch = Ch::new(source.alg.field());
    let m = ModMorphism::new(&ch, source.clone(), target.clone(), map.degree(), BTreeMap::from([(1, map.clone())]))?;
    bar_right_morphism(&ch, &m, n)
}

/// `μ̄`: the bar of the operations of `m` as a degree-1 endomorphism of the
/// bar without operations.
pub fn mu_bar(m: &RightModule<Ch>, n: usize) -> Result<TwistedMorphism<Ch>> {
    let ch = Ch::new(m.alg.field());
    let p0 = bare(m, m.object(), "P")?;
    let mu = ModMorphism::new(&ch, p0.clone(), p0, 1, m.ops().clone())?;
    bar_right_morphism(&ch, &mu, n)
}

/// `ρ̄ = μ̄ + μ̄ h̄ μ̄ + ...` on words of length at most `n`, by iterating
/// `ρ̄ <- μ̄ + μ̄ h̄ ρ̄` until it is stable.
pub fn rho_bar(m: &RightModule<Ch>, h: &GradedMap, n: usize) -> Result<TwistedMorphism<Ch>> {
    let ch = Ch::new(m.alg.field());
    let p0 = bare(m, m.object(), "P")?;
    let mu = mu_bar(m, n)?;
    let hb = strict(&p0, &p0, h, n)?;
    let mu_h = tw_compose(&ch, &mu, &hb)?;
    let mut rho = mu.clone();
    for _ in 0..=n {
        let next = mu.add(&ch, &tw_compose(&ch, &mu_h, &rho)?)?;
        if next.equals(&ch, &rho) {
            return Ok(rho);
        }
        rho = next;
    }
    Err(Error::Inconsistent("the series for rho did not terminate on the window".into()))
}

/// The transferred structure and comparison data, truncated at arity `N`.
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub q: RightModule<Ch>,
    pub phi: ModMorphism<Ch>,
    pub psi: ModMorphism<Ch>,
    pub big_h: ModMorphism<Ch>,
    pub words: usize,
}

fn read_back(bar: &TwistedMorphism<Ch>, source: &RightModule<Ch>, target: &RightModule<Ch>, n: usize) -> Result<ModMorphism<Ch>> {
    let ch = Ch::new(source.alg.field());
    let comps: BTreeMap<usize, GradedMap> =
        bar.components().iter().filter(|((_, j), _)| *j == 0).map(|((i, _), m)| ((1 - *i) as usize, m.clone())).collect();
    let out = ModMorphism::new(&ch, source.clone(), target.clone(), bar.degree(), comps)?;
    if !bar_right_morphism(&ch, &out, n)?.equals(&ch, &bar.restrict(Window::words(n))) {
        return Err(Error::Inconsistent("series value is not the bar of a module morphism".into()));
    }
    Ok(out)
}

/// Transfers the structure of `m` on `P` to `Q` along `r`.
pub fn transfer(m: &RightModule<Ch>, r: &RetractData, n: usize) -> Result<TransferResult> {
    let field = m.alg.field();
    let ch = Ch::new(field);
    if m.object() != &r.p {
        return Err(Error::Shape("the retract does not start at the module's complex".into()));
    }
    let r = RetractData::new(r.p.clone(), r.q.clone(), r.f.clone(), r.g.clone(), r.h.clone())?;
    let p0 = bare(m, &r.p, "P")?;
    let q0 = bare(m, &r.q, "Q")?;
    let rho = rho_bar(m, &r.h, n)?;
    let fb = strict(&p0, &q0, &r.f, n)?;
    let gb = strict(&q0, &p0, &r.g, n)?;
    let hb = strict(&p0, &p0, &r.h, n)?;
    let w = Window::words(n);
    let id_p = tw_identity(&ch, &bar_module_right(&ch, &p0).truncate(&ch, w)?, w);
    let rho_h = tw_compose(&ch, &rho, &hb)?;
    let h_rho = tw_compose(&ch, &hb, &rho)?;
    let nu = tw_compose(&ch, &fb, &tw_compose(&ch, &rho, &gb)?)?;
    let phi = tw_compose(&ch, &fb, &id_p.add(&ch, &rho_h)?)?;
    let psi = tw_compose(&ch, &id_p.add(&ch, &h_rho)?, &gb)?;
    let big_h = tw_compose(&ch, &hb, &id_p.add(&ch, &rho_h)?)?;

    let nu = read_back(&nu, &q0, &q0, n)?;
    if nu.component(1).is_some() {
        return Err(Error::Inconsistent("transferred structure has an arity-1 part".into()));
    }
    let q = RightModule::new(&ch, format!("{}*", m.name()), Arc::clone(&m.alg), r.q.clone(), nu.components().clone())?;
    Ok(TransferResult {
        phi: read_back(&phi, m, &q, n)?,
        psi: read_back(&psi, &q, m, n)?,
        big_h: read_back(&big_h, m, m, n)?,
        q,
        words: n,
    })
}

/// One post-condition of the transfer and, on failure, where it fails:
/// the bar cell `(source index, target index)` of the first nonzero
/// residual.
#[derive(Clone, Debug)]
pub struct TransferCheck {
    pub name: &'static str,
    pub passed: bool,
    pub cell: Option<(i64, i64)>,
    pub detail: Option<String>,
}

impl TransferCheck {
    fn pass(name: &'static str) -> TransferCheck {
        TransferCheck { name, passed: true, cell: None, detail: None }
    }

    fn from_residual(name: &'static str, residual: &TwistedMorphism<Ch>) -> TransferCheck {
        match residual.components().iter().find(|(_, m)| !m.is_zero()) {
            None => TransferCheck::pass(name),
            Some(((i, j), m)) => TransferCheck {
                name,
                passed: false,
                cell: Some((*i, *j)),
                detail: Some(format!("nonzero residual in degrees {:?}", m.support())),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub words: usize,
    pub checks: Vec<TransferCheck>,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&TransferCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.name, if c.passed { "ok" } else { "FAILED" })?;
            if let Some((i, j)) = c.cell {
                write!(f, " at cell ({i},{j})")?;
            }
            if let Some(d) = &c.detail {
                write!(f, " ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn extends(name: &'static str, m: &ModMorphism<Ch>, want: &GradedMap) -> TransferCheck {
    let ok = match m.component(1) {
        Some(x) => x == want,
        None => want.is_zero(),
    };
    if ok {
        TransferCheck::pass(name)
    } else {
        TransferCheck { name, passed: false, cell: Some((0, 0)), detail: Some("arity-1 component differs".into()) }
    }
}

/// Checks the post-conditions of [`transfer`] on words of length at most `n`:
/// `q` is a module, `φ` and `ψ` are closed, `φ_1 = f`, `ψ_1 = g`,
/// `H_1 = h`, and `d(H) = ψ φ - id`.
pub fn verify_transfer(m: &RightModule<Ch>, r: &RetractData, result: &TransferResult, n: usize) -> Result<TransferReport> {
    let ch = Ch::new(m.alg.field());
    let w = Window::words(n);
    let mut checks = Vec::new();
    match is_right_module(&ch, &result.q, n)?.1 {
        None => checks.push(TransferCheck::pass("q_is_module")),
        Some(v) => checks.push(TransferCheck {
            name: "q_is_module",
            passed: false,
            cell: Some((v.i, v.j)),
            detail: Some(format!("module relation fails in degrees {:?}", v.residual.support())),
        }),
    }
    let bp = bar_module_right(&ch, m).truncate(&ch, w)?;
    let bq = bar_module_right(&ch, &result.q).truncate(&ch, w)?;
    let phi = bar_right_morphism(&ch, &result.phi, n)?;
    let psi = bar_right_morphism(&ch, &result.psi, n)?;
    let big_h = bar_right_morphism(&ch, &result.big_h, n)?;
    for (name, f, deg) in [("phi_degree", &result.phi, 0), ("psi_degree", &result.psi, 0), ("h_degree", &result.big_h, -1)] {
        if f.degree() != deg {
            checks.push(TransferCheck { name, passed: false, cell: None, detail: Some(format!("degree {}", f.degree())) });
        }
    }
    checks.push(TransferCheck::from_residual("phi_closed", &tw_diff(&ch, &phi, &bp, &bq, Some(w))?));
    checks.push(TransferCheck::from_residual("psi_closed", &tw_diff(&ch, &psi, &bq, &bp, Some(w))?));
    checks.push(extends("phi_extends_f", &result.phi, &r.f));
    checks.push(extends("psi_extends_g", &result.psi, &r.g));
    checks.push(extends("h_extends_h", &result.big_h, &r.h));
    let dh = tw_diff(&ch, &big_h, &bp, &bp, Some(w))?;
    let want = tw_compose(&ch, &psi, &phi)?.sub(&ch, &tw_identity(&ch, &bp, w))?;
    checks.push(TransferCheck::from_residual("homotopy", &dh.sub(&ch, &want)?));
    Ok(TransferReport { words: n, checks })
}

/// The identity `d(ρ̄) = -ρ̄ ḡ f̄ ρ̄`, with `d` taken between bars without
/// operations. Returns the residual.
pub fn rho_identity_residual(m: &RightModule<Ch>, r: &RetractData, n: usize) -> Result<TwistedMorphism<Ch>> {
    let ch = Ch::new(m.alg.field());
    let w = Window::words(n);
    let p0 = bare(m, &r.p, "P")?;
    let q0 = bare(m, &r.q, "Q")?;
    let rho = rho_bar(m, &r.h, n)?;
    let b0 = bar_module_right(&ch, &p0).truncate(&ch, w)?;
    let d = tw_diff(&ch, &rho, &b0, &b0, Some(w))?;
    let gf = tw_compose(&ch, &strict(&q0, &p0, &r.g, n)?, &strict(&p0, &q0, &r.f, n)?)?;
    let rhs = tw_compose(&ch, &rho, &tw_compose(&ch, &gf, &rho)?)?;
    d.add(&ch, &rhs)
}

/// Compares two transfer results on arities up to `n`.
pub fn agree_up_to(a: &TransferResult, b: &TransferResult, n: usize) -> Option<(&'static str, usize)> {
    let parts: [(&'static str, &BTreeMap<usize, GradedMap>, &BTreeMap<usize, GradedMap>); 4] = [
        ("q", a.q.ops(), b.q.ops()),
        ("phi", a.phi.components(), b.phi.components()),
        ("psi", a.psi.components(), b.psi.components()),
        ("H", a.big_h.components(), b.big_h.components()),
    ];
    for (name, x, y) in parts {
        for k in 1..=n {
            let same = match (x.get(&k), y.get(&k)) {
                (Some(u), Some(v)) => u == v,
                (Some(u), None) | (None, Some(u)) => u.is_zero(),
                (None, None) => true,
            };
            if !same {
                return Some((name, k));
            }
        }
    }
    None
}
