//! Helpers shared by the integration tests: a direct evaluator for bar
//! labels and the explicit composition formula for module morphisms.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use twistkit::ainfty::{
    bar_alg_morphism, bar_algebra, bar_module_right, formal, AInfAlgebra, AInfMorphism, Factor, Formal, ModMorphism,
    RightAction, RightModule,
};
use twistkit::category::Ch;
use twistkit::graded::{GradedMap, GradedSpace};
use twistkit::random::{self, TestRng};
use twistkit::scalar::Field;
use twistkit::tensor::{tensor_maps, tensor_spaces, TensorFactor};
use twistkit::twisted::Window;

pub type Slot = (GradedMap, Vec<GradedSpace>, Vec<GradedSpace>);

/// Sums `coeff · (x_1 ⊗ ... ⊗ x_r)` over the terms of a label.
pub fn eval_label(field: Field, label: &Formal, slot: &dyn Fn(&Factor) -> Slot) -> Option<GradedMap> {
    let mut total: Option<GradedMap> = None;
    for term in &label.terms {
        let slots: Vec<Slot> = term.factors.iter().map(slot).collect();
        let parts: Vec<TensorFactor<'_>> =
            slots.iter().map(|(m, s, t)| TensorFactor::new(m, s.clone(), t.clone())).collect();
        let value = tensor_maps(field, &parts).unwrap().scale(&field.int(term.coeff));
        total = Some(match total {
            Some(t) => t.add(&value).unwrap(),
            None => value,
        });
    }
    total
}

fn power(space: &GradedSpace, k: usize) -> GradedSpace {
    tensor_spaces(&vec![space.clone(); k])
}

/// Random maps are sparse; redraw until nonzero so every operation is present.
pub fn nonzero_map(field: Field, s: &GradedSpace, t: &GradedSpace, degree: i64, rng: &mut TestRng) -> GradedMap {
    loop {
        let m = random::map(field, s, t, degree, rng);
        if !m.is_zero() {
            return m;
        }
    }
}

/// A graded space with an odd part, so that Koszul signs are exercised.
fn odd_space(rng: &mut TestRng) -> GradedSpace {
    GradedSpace::new([(0, rng.gen_range(1..=2)), (1, 1)])
}

/// Random `m_2`, `m_3` on a complex with zero differential; no relations imposed.
pub fn loose_algebra(field: Field, rng: &mut TestRng) -> Arc<AInfAlgebra> {
    let a = odd_space(rng);
    let ops = (2..=3).map(|k| (k, nonzero_map(field, &power(&a, k), &a, 2 - k as i64, rng))).collect();
    AInfAlgebra::new("loose", twistkit::complex::Complex::from_space(field, a), ops).unwrap()
}

/// Absent components are zero.
fn same(found: Option<&GradedMap>, expected: &GradedMap) -> bool {
    found.map_or(expected.is_zero(), |m| m == expected)
}

fn identity_slot(field: Field, s: &GradedSpace) -> Slot {
    (GradedMap::identity(field, s), vec![s.clone()], vec![s.clone()])
}

/// Checks the four displayed labels symbolically, then evaluates each one
/// on random operations and compares with the bar constructions.
pub fn label_checks(field: Field, rng: &mut TestRng) -> Result<(), String> {
    let cases = [
        ("Am_2 - m_2A", formal::bar_algebra_terms(2, 1)),
        ("-Am_3 - m_3A", formal::bar_algebra_terms(2, 2)),
        ("Em_2 - p_2A", formal::bar_right_terms(2, 1)),
        ("-f_1f_2 + f_2f_1", formal::bar_alg_morphism_terms(2, 1)),
    ];
    for (label, built) in &cases {
        let parsed = Formal::parse(label).map_err(|e| e.to_string())?;
        if &parsed != built {
            return Err(format!("label {label} is built as {built}"));
        }
    }
    let ch = Ch::new(field);
    let w = Window::words(4);
    let alg = loose_algebra(field, rng);
    let a = alg.space().clone();
    let alg_slot = |x: &Factor| match x {
        Factor::Id('A') => identity_slot(field, &a),
        Factor::Op('m', k) => (alg.op(*k).unwrap().clone(), vec![a.clone(); *k], vec![a.clone()]),
        other => panic!("unexpected factor {other}"),
    };
    let bar = bar_algebra(&alg).truncate(&ch, w).unwrap();
    for (label, (s, t)) in [(&cases[0].0, (-2, -1)), (&cases[1].0, (-3, -1))] {
        let expected = eval_label(field, &Formal::parse(label).unwrap(), &alg_slot).unwrap();
        if !same(bar.diff(s, t).as_ref(), &expected) {
            return Err(format!("bar component ({s}, {t}) differs from {label}"));
        }
    }

    let e_space = odd_space(rng);
    let p2 = nonzero_map(field, &tensor_spaces(&[e_space.clone(), a.clone()]), &e_space, 0, rng);
    let e = twistkit::complex::Complex::from_space(field, e_space.clone());
    let m = RightModule::new(&ch, "E", Arc::clone(&alg), e, BTreeMap::from([(2, p2.clone())])).unwrap();
    let mod_slot = |x: &Factor| match x {
        Factor::Id('A') => identity_slot(field, &a),
        Factor::Id('E') => identity_slot(field, &e_space),
        Factor::Op('m', k) => (alg.op(*k).unwrap().clone(), vec![a.clone(); *k], vec![a.clone()]),
        Factor::Op('p', 2) => (p2.clone(), vec![e_space.clone(), a.clone()], vec![e_space.clone()]),
        other => panic!("unexpected factor {other}"),
    };
    let expected = eval_label(field, &Formal::parse(cases[2].0).unwrap(), &mod_slot).unwrap();
    let bar = bar_module_right(&ch, &m).truncate(&ch, w).unwrap();
    if !same(bar.diff(-2, -1).as_ref(), &expected) {
        return Err("module bar component differs from Em_2 - p_2A".into());
    }

    let target = loose_algebra(field, rng);
    let b = target.space().clone();
    let f1 = nonzero_map(field, &a, &b, 0, rng);
    let f2 = nonzero_map(field, &power(&a, 2), &b, -1, rng);
    let f = AInfMorphism::new(Arc::clone(&alg), target, BTreeMap::from([(1, f1.clone()), (2, f2.clone())])).unwrap();
    let mor_slot = |x: &Factor| match x {
        Factor::Op('f', 1) => (f1.clone(), vec![a.clone()], vec![b.clone()]),
        Factor::Op('f', 2) => (f2.clone(), vec![a.clone(); 2], vec![b.clone()]),
        other => panic!("unexpected factor {other}"),
    };
    let expected = eval_label(field, &Formal::parse(cases[3].0).unwrap(), &mor_slot).unwrap();
    let bar = bar_alg_morphism(&f, 3).unwrap();
    if !same(bar.component(-2, -1), &expected) {
        return Err("morphism bar component differs from -f_1f_2 + f_2f_1".into());
    }
    Ok(())
}

/// `(g∘f)_n = Σ_l (-1)^{|f|(l-1)} g_l ∘ (f_{n-l+1} ⊗ 1^{l-1})` for `n ≤ words`.
pub fn compose_oracle(g: &ModMorphism<Ch>, f: &ModMorphism<Ch>, words: usize) -> ModMorphism<Ch> {
    let alg = &f.source.alg;
    let ch = Ch::new(alg.field());
    let mut comps: BTreeMap<usize, GradedMap> = BTreeMap::new();
    for n in 1..=words {
        for l in 1..=n {
            let (Some(gl), Some(fk)) = (g.component(l), f.component(n - l + 1)) else { continue };
            let lifted = ch.act_on_morphism(fk, f.source.object(), n - l, f.target.object(), alg, l - 1).unwrap();
            let term = gl.compose(&lifted).unwrap().signed(f.degree() * (l as i64 - 1));
            let sum = match comps.remove(&n) {
                Some(c) => c.add(&term).unwrap(),
                None => term,
            };
            comps.insert(n, sum);
        }
    }
    ModMorphism::new(&ch, f.source.clone(), g.target.clone(), f.degree() + g.degree(), comps).unwrap()
}

/// `m_2` of the fixture completed by an `m_3` found by solving
/// `d(m_3) = -R`, where `R` is the first residual of the bare `m_2`.
pub fn solved_m3(field: Field) -> Result<Arc<AInfAlgebra>, String> {
    let (a, m2) = twistkit::fixtures::m2_only(field);
    let bare = AInfAlgebra::new("bare", a.clone(), BTreeMap::from([(2, m2.clone())])).unwrap();
    let (_, v) = twistkit::ainfty::is_ainfty_algebra(&bare, 3).unwrap();
    let v = v.ok_or("the bare product is already associative")?;
    if (v.i, v.j) != (-2, 0) {
        return Err(format!("first residual at ({}, {})", v.i, v.j));
    }
    let a3 = bare.power(3).unwrap();
    let m3 = twistkit::complex::solve_hom_boundary(&a3, &a, &v.residual.neg())
        .unwrap()
        .ok_or("the associator is not a boundary")?;
    Ok(AInfAlgebra::new("solved", a, BTreeMap::from([(2, m2), (3, m3)])).unwrap())
}

/// `m_2` plus a random nonzero perturbation, which is still a chain map on a
/// degree-0 algebra with zero differential.
pub fn perturbed(alg: &Arc<AInfAlgebra>, rng: &mut TestRng) -> Arc<AInfAlgebra> {
    let field = alg.field();
    let a = alg.space();
    let delta = nonzero_map(field, &power(a, 2), a, 0, rng);
    let m2 = alg.op(2).unwrap().add(&delta).unwrap();
    AInfAlgebra::new("perturbed", alg.complex().clone(), BTreeMap::from([(2, m2)])).unwrap()
}
