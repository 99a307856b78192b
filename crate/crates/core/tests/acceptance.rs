//! Acceptance run: one PASS/FAIL line per criterion, all checks exact.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use twistkit::ainfty::*;
use twistkit::bitwisted::*;
use twistkit::category::{Ch, DgCategory};
use twistkit::complex::{hom_differential, Complex};
use twistkit::error::Error;
use twistkit::fixtures;
use twistkit::random::{self, Shape, TestRng};
use twistkit::scalar::Field;
use twistkit::tensor::{tensor_maps, TensorFactor};
use twistkit::transfer::{agree_up_to, transfer, verify_transfer, RetractData};
use twistkit::twisted::*;

type Outcome = Result<String, String>;

const FIELDS: [Field; 2] = [Field::Rationals, Field::Prime(101)];

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn shape(field: Field, len: i64, max_dim: usize, one_sided: bool) -> Shape {
    Shape { field, window: Window::new(0, len - 1), degrees: (-1, 1), max_dim, one_sided }
}

fn twisted_complexes() -> Outcome {
    let mut count = 0;
    for trial in 0..200u64 {
        let mut rng = random::rng(1_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let cat = Ch::new(field);
        let len = 1 + (trial % 8) as i64;
        let t = random::twisted(&shape(field, len, 1 + (trial / 2 % 3) as usize, trial % 3 == 0), &mut rng);
        let (_, v) = check_twisted(&cat, &t, t.support().unwrap()).map_err(e2s)?;
        ensure(v.is_none(), || format!("trial {trial}: generated complex is not twisted"))?;
        let s = random::twisted(&shape(field, 1 + (trial % 3) as i64, 2, false), &mut rng);
        let f = random::twisted_morphism(field, &t, &s, trial as i64 % 3 - 1, &mut rng);
        let df = tw_diff(&cat, &f, &t, &s, None).map_err(e2s)?;
        let ddf = tw_diff(&cat, &df, &t, &s, None).map_err(e2s)?;
        ensure(ddf.is_zero(), || format!("trial {trial}: d(d(f)) is nonzero"))?;
        count += 1;
    }
    Ok(format!("{count} complexes up to 8 terms, dims up to 3, Q and F_101"))
}

fn convolution_functor() -> Outcome {
    for trial in 0..100u64 {
        let mut rng = random::rng(2_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let cat = Ch::new(field);
        let ts: Vec<TwistedComplex<Ch>> =
            (0..3).map(|k| random::twisted(&shape(field, 1 + ((trial + k) % 4) as i64, 2, false), &mut rng)).collect();
        let (t, s, u) = (&ts[0], &ts[1], &ts[2]);
        let w = t.support().unwrap().hull(&s.support().unwrap()).hull(&u.support().unwrap());
        let f = random::twisted_morphism(field, t, s, trial as i64 % 3 - 1, &mut rng);
        let g = random::twisted_morphism(field, s, u, (trial / 3) as i64 % 3 - 1, &mut rng);
        let (ct, cs, cu) = (convolve(t, w).map_err(e2s)?, convolve(s, w).map_err(e2s)?, convolve(u, w).map_err(e2s)?);
        let cf = convolve_morphism(&f, t, s, w).map_err(e2s)?;
        let cg = convolve_morphism(&g, s, u, w).map_err(e2s)?;
        let df = tw_diff(&cat, &f, t, s, None).map_err(e2s)?;
        let lhs = convolve_morphism(&df, t, s, w).map_err(e2s)?;
        ensure(lhs == hom_differential(&ct, &cs, &cf).map_err(e2s)?, || format!("trial {trial}: differential"))?;
        let gf = tw_compose(&cat, &g, &f).map_err(e2s)?;
        let lhs = convolve_morphism(&gf, t, u, w).map_err(e2s)?;
        ensure(lhs == cg.compose(&cf).map_err(e2s)?, || format!("trial {trial}: composition"))?;
        let id = tw_identity(&cat, t, w);
        ensure(convolve_morphism(&id, t, t, w).map_err(e2s)? == ct.identity(), || format!("trial {trial}: identity"))?;
        let back = deconvolve_morphism(&cf, t, s, w).map_err(e2s)?;
        ensure(back.equals(&cat, &f), || format!("trial {trial}: deconvolution"))?;
        let _ = cu;
    }
    Ok("100 triples: differentials, compositions, identities, deconvolution".into())
}

fn nested_equal(cat: &Ch, a: &TwistedComplex<Tw<Ch>>, b: &TwistedComplex<Tw<Ch>>) -> bool {
    let (oa, ob) = (a.objects().unwrap(), b.objects().unwrap());
    let inner_equal = |x: &TwistedComplex<Ch>, y: &TwistedComplex<Ch>| {
        let live = |t: &TwistedComplex<Ch>| -> BTreeMap<(i64, i64), twistkit::graded::GradedMap> {
            t.diffs().unwrap().iter().filter(|(_, m)| !m.is_zero()).map(|(k, m)| (*k, m.clone())).collect()
        };
        x.objects() == y.objects() && live(x) == live(y)
    };
    let keys = |t: &TwistedComplex<Tw<Ch>>| -> Vec<(i64, i64)> {
        t.diffs().unwrap().iter().filter(|(_, m)| !m.is_zero()).map(|(k, _)| *k).collect()
    };
    oa.len() == ob.len()
        && oa.iter().all(|(i, e)| ob.get(i).is_some_and(|f| inner_equal(e, f)))
        && keys(a) == keys(b)
        && keys(a).iter().all(|(i, j)| a.diff(*i, *j).unwrap().equals(cat, &b.diff(*i, *j).unwrap()))
}

fn row_and_column() -> Outcome {
    let mut one_sided = 0;
    for trial in 0..100u64 {
        let mut rng = random::rng(3_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let cat = Ch::new(field);
        let sided = trial % 2 == 0;
        let outer = shape(field, 2 + (trial % 2) as i64, 2, sided);
        let cc = random::twisted_of_twisted(&outer, &shape(field, 2, 2, false), &mut rng);
        let (row, col) = (cxrow(&cat, &cc).map_err(e2s)?, cxcol(&cat, &cc).map_err(e2s)?);
        let dd = double_convolve(field, &cc).map_err(e2s)?;
        ensure(convolve_bicomplex(field, &row, CellOrder::RowMajor).map_err(e2s)? == dd, || format!("trial {trial}: rows"))?;
        ensure(convolve_bicomplex(field, &col, CellOrder::ColumnMajor).map_err(e2s)? == dd, || format!("trial {trial}: columns"))?;
        let same = |a: &Complex, b: &Complex| a == b;
        ensure(reflect(&col).equals(&cat, &row, same), || format!("trial {trial}: reflected columns"))?;
        ensure(reflect(&reflect(&row)).equals(&cat, &row, same), || format!("trial {trial}: reflect twice"))?;
        ensure(sigma(&cat, &sigma(&cat, &row)).equals(&cat, &row, same), || format!("trial {trial}: sigma twice"))?;
        for b in [&row, &col, &sigma(&cat, &row)] {
            ensure(check_bitwisted(&cat, b, None).map_err(e2s)?.1.is_none(), || format!("trial {trial}: invalid bicomplex"))?;
        }
        if sided {
            let back = cxrow_inverse(&cat, &row).map_err(e2s)?;
            ensure(nested_equal(&cat, &back, &cc), || format!("trial {trial}: row inverse"))?;
            one_sided += 1;
        } else if !row.is_vertically_one_sided() {
            ensure(matches!(cxrow_inverse(&cat, &row), Err(Error::NotOneSided(_))), || {
                format!("trial {trial}: two-sided input accepted")
            })?;
        }
    }
    Ok(format!("100 nested complexes, {one_sided} one-sided round trips"))
}

fn labels() -> Outcome {
    for seed in 0..10u64 {
        let mut rng = random::rng(4_000 + seed);
        common::label_checks(FIELDS[seed as usize % 2], &mut rng).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok("4 labels symbolically, and evaluated on 10 random operation sets".into())
}

/// `m_2(m_2 ⊗ 1) - m_2(1 ⊗ m_2)` for an algebra concentrated in degree 0.
fn associator(alg: &AInfAlgebra) -> twistkit::graded::GradedMap {
    let field = alg.field();
    let (a, m2, id) = (alg.space().clone(), alg.op(2).unwrap(), alg.complex().identity());
    let two = vec![a.clone(); 2];
    let left = tensor_maps(field, &[TensorFactor::new(m2, two.clone(), vec![a.clone()]), TensorFactor::single(&id)]).unwrap();
    let right = tensor_maps(field, &[TensorFactor::single(&id), TensorFactor::new(m2, two, vec![a])]).unwrap();
    m2.compose(&left).unwrap().sub(&m2.compose(&right).unwrap()).unwrap()
}

fn ainfty_detection() -> Outcome {
    let mut broken = 0;
    for field in FIELDS {
        let (_, v) = is_ainfty_algebra(&fixtures::upper_triangular(field), 6).map_err(e2s)?;
        ensure(v.is_none(), || format!("upper triangular algebra fails over {field}"))?;
        for seed in 0..10u64 {
            let mut rng = random::rng(5_000 + seed);
            let alg = common::perturbed(&fixtures::upper_triangular(field), &mut rng);
            let (_, v) = is_ainfty_algebra(&alg, 6).map_err(e2s)?;
            match (associator(&alg).is_zero(), v) {
                (true, None) => {}
                (false, Some(v)) if word_length(v.i) == 3 => broken += 1,
                (_, v) => return Err(format!("perturbation {seed}: detector reported {:?}", v.map(|v| word_length(v.i)))),
            }
        }
        let solved = common::solved_m3(field)?;
        let (_, v) = is_ainfty_algebra(&solved, 4).map_err(e2s)?;
        ensure(v.is_none(), || format!("solved m_3 fails over {field}"))?;
    }
    ensure(broken > 0, || "no perturbation broke associativity".into())?;
    Ok(format!("N=6 pass, {broken} perturbations caught at word length 3, solved m_3 passes at N=4"))
}

fn module_pairs() -> Outcome {
    for trial in 0..100u64 {
        let mut rng = random::rng(6_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let alg = if trial % 3 == 0 { fixtures::dual_numbers(field) } else { fixtures::with_m3(field) };
        let nod = Nod::new(Ch::new(field), 3);
        let x = &nod.base;
        let w = Window::words(3);
        let ms: Vec<RightModule<Ch>> = (0..3).map(|_| random::right_module(&alg, 3, &mut rng)).collect();
        let f = random::module_morphism(&ms[0], &ms[1], trial as i64 % 3 - 1, 3, &mut rng);
        let g = random::module_morphism(&ms[1], &ms[2], (trial / 3) as i64 % 3 - 1, 3, &mut rng);
        let oracle = common::compose_oracle(&g, &f, 3);
        let bars = tw_compose(x, &bar_right_morphism(x, &g, 3).map_err(e2s)?, &bar_right_morphism(x, &f, 3).map_err(e2s)?)
            .map_err(e2s)?;
        ensure(bar_right_morphism(x, &oracle, 3).map_err(e2s)?.equals(x, &bars.restrict(w)), || {
            format!("trial {trial}: bar of the composite")
        })?;
        ensure(nod.compose(&g, &f).map_err(e2s)?.equals(x, &oracle), || format!("trial {trial}: composition"))?;
        let b0 = bar_module_right(x, &ms[0]).truncate(x, w).map_err(e2s)?;
        let b1 = bar_module_right(x, &ms[1]).truncate(x, w).map_err(e2s)?;
        let dbar = tw_diff(x, &bar_right_morphism(x, &f, 3).map_err(e2s)?, &b0, &b1, Some(w)).map_err(e2s)?;
        let df = nod.differential(&ms[0], &ms[1], &f).map_err(e2s)?;
        ensure(bar_right_morphism(x, &df, 3).map_err(e2s)?.equals(x, &dbar.restrict(w)), || {
            format!("trial {trial}: bar of the differential")
        })?;
    }
    Ok("100 pairs: bars of composites and differentials".into())
}

fn phi_runs() -> Outcome {
    for trial in 0..50u64 {
        let mut rng = random::rng(7_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let alg = fixtures::with_m3(field);
        let nod = Nod::new(Ch::new(field), 3);
        let big = Nod::new(Tw::new(nod.base), 3);
        let w = Window::new(0, 1);
        let [t, s, u] = [(); 3].map(|_| random::twisted_modules(&nod, &alg, w, &mut rng));
        ensure(phi_square(&nod, &t).map_err(e2s)?.is_none(), || format!("trial {trial}: object square"))?;
        let f = random::twisted_modules_morphism(&nod, &t, &s, trial as i64 % 3 - 1, &mut rng);
        let g = random::twisted_modules_morphism(&nod, &s, &u, 0, &mut rng);
        ensure(phi_square_morphism(&nod, &f, &t, &s).map_err(e2s)?.is_none(), || format!("trial {trial}: morphism square"))?;
        let phi = |h: &TwistedMorphism<Nod<Ch>>, a: &TwistedComplex<Nod<Ch>>, b: &TwistedComplex<Nod<Ch>>| {
            phi_morphism(&nod, h, a, b).map_err(e2s)
        };
        let lhs = phi(&tw_compose(&nod, &g, &f).map_err(e2s)?, &t, &u)?;
        let rhs = big.compose(&phi(&g, &s, &u)?, &phi(&f, &t, &s)?).map_err(e2s)?;
        ensure(lhs.equals(&big.base, &rhs), || format!("trial {trial}: composition"))?;
        let (pt, ps) = (phi_object(&nod, &t).map_err(e2s)?, phi_object(&nod, &s).map_err(e2s)?);
        let lhs = phi(&tw_diff(&nod, &f, &t, &s, None).map_err(e2s)?, &t, &s)?;
        let rhs = big.differential(&pt, &ps, &phi(&f, &t, &s)?).map_err(e2s)?;
        ensure(lhs.equals(&big.base, &rhs), || format!("trial {trial}: differential"))?;
        let back = phi_morphism_inverse(&nod, &phi(&f, &t, &s)?, &t, &s).map_err(e2s)?;
        ensure(back.equals(&nod, &f), || format!("trial {trial}: inverse after forward"))?;
        let forward = phi(&phi_morphism_inverse(&nod, &phi(&g, &s, &u)?, &s, &u).map_err(e2s)?, &s, &u)?;
        ensure(forward.equals(&big.base, &phi(&g, &s, &u)?), || format!("trial {trial}: forward after inverse"))?;
    }
    Ok("50 twisted complexes of modules: squares commute, composition, differential, bijection".into())
}

fn transfer_module(trial: u64, rng: &mut TestRng) -> RightModule<Ch> {
    let field = Field::Prime(101);
    let m = match trial % 4 {
        0 | 2 => random::two_term_module(&fixtures::dual_numbers(field), 3, rng),
        1 => random::two_term_module(&fixtures::upper_triangular(field), 2, rng),
        _ => {
            let v = random::complex(field, 0, 1, 2, rng);
            fixtures::free_module(&fixtures::with_m3(field), &v).unwrap()
        }
    };
    random::rebase_module(&m, rng)
}

fn transfers() -> Outcome {
    let ch = Ch::new(Field::Prime(101));
    let mut nontrivial = 0;
    for trial in 0..100u64 {
        let mut rng = random::rng(8_000 + trial);
        let m = transfer_module(trial, &mut rng);
        let dim = m.object().space().total_dim();
        ensure(dim <= 12 && m.max_arity() <= 3, || format!("trial {trial}: module too large"))?;
        ensure(is_right_module(&ch, &m, 7).map_err(e2s)?.1.is_none(), || format!("trial {trial}: input is not a module"))?;
        let r = RetractData::onto_homology(m.object()).map_err(e2s)?;
        let r5 = transfer(&m, &r, 5).map_err(e2s)?;
        let report = verify_transfer(&m, &r, &r5, 5).map_err(e2s)?;
        ensure(report.passed(), || format!("trial {trial}: {report}"))?;
        ensure(is_right_module(&ch, &r5.q, 5).map_err(e2s)?.1.is_none(), || format!("trial {trial}: q is not a module"))?;
        let r7 = transfer(&m, &r, 7).map_err(e2s)?;
        if let Some((part, k)) = agree_up_to(&r5, &r7, 5) {
            return Err(format!("trial {trial}: {part}_{k} changes between N=5 and N=7"));
        }
        if r5.q.ops().keys().any(|k| *k >= 3) {
            nontrivial += 1;
        }
    }
    Ok(format!("100 retracts over F_101 at N=5, stable at N=7, {nontrivial} with higher operations"))
}

fn stability() -> Outcome {
    for trial in 0..50u64 {
        let mut rng = random::rng(9_000 + trial);
        let field = FIELDS[trial as usize % 2];
        let e = random::complex(field, -1, 2, 3, &mut rng);
        let mc = random::maurer_cartan(&e, &mut rng);
        let moved = e.perturb(&mc).map_err(e2s)?;
        ensure(moved.perturb(&mc.neg()).map_err(e2s)? == e, || format!("trial {trial}: perturbation round trip"))?;
    }
    let mut streams = 0;
    for trial in 0..50u64 {
        let mut rng = random::rng(9_500 + trial);
        let field = FIELDS[trial as usize % 2];
        let cat = Ch::new(field);
        let alg = if trial % 2 == 0 { fixtures::dual_numbers(field) } else { fixtures::upper_triangular(field) };
        let t = if trial % 5 == 0 {
            bar_algebra(&alg)
        } else {
            bar_module_right(&cat, &random::two_term_module(&alg, 2, &mut rng))
        };
        let n = 2 + (trial % 3) as usize;
        let (small, large) = (Window::words(n), Window::words(n + 2));
        let stable: Vec<i64> = (-4..=n as i64 + 4).filter(|d| stable_degrees(&t, small).is_stable(*d)).collect();
        let (Some(lo), Some(hi)) = (stable.first(), stable.last()) else {
            return Err(format!("stream {trial}: no stable degrees"));
        };
        let a = convolve_in_degrees(&t, small, *lo, *hi).map_err(e2s)?;
        let b = convolve_in_degrees(&t, large, *lo, *hi).map_err(e2s)?;
        ensure(a == b && !a.space().is_zero(), || format!("stream {trial}: convolution changes with the window"))?;
        streams += 1;
    }
    Ok(format!("50 perturbation round trips, {streams} streams stable between N and N+2"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("twisted differential squares to zero", twisted_complexes),
        ("convolution is a dg functor", convolution_functor),
        ("row and column functors", row_and_column),
        ("bar labels", labels),
        ("A-infinity relation detection", ainfty_detection),
        ("module category through bars", module_pairs),
        ("twisted complexes of modules as modules", phi_runs),
        ("homotopy transfer", transfers),
        ("perturbation and window stability", stability),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {} {name}: {reason} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
