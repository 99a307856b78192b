mod common;

use std::collections::BTreeMap;

use twistkit::ainfty::*;
use twistkit::category::{Ch, DgCategory};
use twistkit::fixtures;
use twistkit::graded::GradedMap;
use twistkit::random::{self, TestRng};
use twistkit::scalar::Field;
use twistkit::tensor::tensor_spaces;
use twistkit::twisted::{tw_compose, tw_diff, TwistedComplex, TwistedMorphism, Tw, Window};

const FIELDS: [Field; 2] = [Field::Rationals, Field::Prime(101)];

#[test]
fn bar_labels_match_their_evaluation() {
    for seed in 0..6 {
        let mut rng = random::rng(seed);
        common::label_checks(FIELDS[seed as usize % 2], &mut rng).unwrap();
    }
}

#[test]
fn formal_labels_print_and_parse() {
    for label in ["Am_2 - m_2A", "-Am_3 - m_3A", "Em_2 - p_2A", "-f_1f_2 + f_2f_1"] {
        let f = Formal::parse(label).unwrap();
        assert_eq!(Formal::parse(&f.to_string()).unwrap(), f, "{label}");
    }
    assert!(Formal::parse("Am_").is_err());
    assert!(formal::bar_algebra_terms(0, 2).is_zero());
}

#[test]
fn fixture_algebras_satisfy_the_relations() {
    for field in FIELDS {
        for alg in [fixtures::upper_triangular(field), fixtures::dual_numbers(field), fixtures::with_m3(field)] {
            let (_, v) = is_ainfty_algebra(&alg, 6).unwrap();
            assert!(v.is_none(), "{} over {field}", alg.name());
        }
    }
}

#[test]
fn perturbed_products_fail_on_words_of_length_three() {
    for seed in 0..6 {
        let mut rng = random::rng(seed);
        let field = FIELDS[seed as usize % 2];
        let alg = common::perturbed(&fixtures::upper_triangular(field), &mut rng);
        let (_, v) = is_ainfty_algebra(&alg, 6).unwrap();
        let v = v.expect("perturbation breaks associativity");
        assert_eq!(word_length(v.i), 3, "seed {seed}");
    }
}

#[test]
fn bare_product_needs_a_ternary_operation() {
    for field in FIELDS {
        let (a, m2) = fixtures::m2_only(field);
        let bare = AInfAlgebra::new("bare", a, BTreeMap::from([(2, m2)])).unwrap();
        let (_, v) = is_ainfty_algebra(&bare, 2).unwrap();
        assert!(v.is_none());
        let (_, v) = is_ainfty_algebra(&bare, 4).unwrap();
        assert_eq!(word_length(v.unwrap().i), 3);
        let solved = common::solved_m3(field).unwrap();
        let (_, v) = is_ainfty_algebra(&solved, 4).unwrap();
        assert!(v.is_none(), "over {field}");
    }
}

#[test]
fn identity_morphisms_have_closed_bars() {
    let field = Field::Rationals;
    let alg = fixtures::with_m3(field);
    let id = AInfMorphism::new(alg.clone(), alg.clone(), BTreeMap::from([(1, alg.complex().identity())])).unwrap();
    assert!(is_alg_morphism(&id, 4).unwrap().is_none());
    let mut rng = random::rng(3);
    let m = random::right_module(&alg, 3, &mut rng);
    let nod = Nod::new(Ch::new(field), 3);
    assert!(is_right_closed(&nod.identity(&m), 3).unwrap().is_none());
}

fn module_pair(seed: u64) -> (Nod<Ch>, Vec<RightModule<Ch>>, TestRng) {
    let mut rng = random::rng(seed);
    let field = FIELDS[seed as usize % 2];
    let alg = fixtures::with_m3(field);
    let nod = Nod::new(Ch::new(field), 3);
    let ms = (0..3).map(|_| random::right_module(&alg, 3, &mut rng)).collect();
    (nod, ms, rng)
}

#[test]
fn module_composition_matches_the_explicit_formula() {
    for seed in 0..8 {
        let (nod, ms, mut rng) = module_pair(seed);
        let f = random::module_morphism(&ms[0], &ms[1], seed as i64 % 3 - 1, 3, &mut rng);
        let g = random::module_morphism(&ms[1], &ms[2], 1 - seed as i64 % 2, 3, &mut rng);
        let gf = nod.compose(&g, &f).unwrap();
        assert!(gf.equals(&nod.base, &common::compose_oracle(&g, &f, 3)), "seed {seed}");
        let id = nod.identity(&ms[1]);
        assert!(nod.compose(&id, &f).unwrap().equals(&nod.base, &f));
        assert!(nod.compose(&g, &id).unwrap().equals(&nod.base, &g));
    }
}

#[test]
fn module_differential_is_a_derivation() {
    for seed in 0..6 {
        let (nod, ms, mut rng) = module_pair(seed);
        let x = &nod.base;
        let f = random::module_morphism(&ms[0], &ms[1], 0, 3, &mut rng);
        let g = random::module_morphism(&ms[1], &ms[2], 1, 3, &mut rng);
        let df = nod.differential(&ms[0], &ms[1], &f).unwrap();
        let w = Window::words(3);
        let b0 = bar_module_right(x, &ms[0]).truncate(x, w).unwrap();
        let b1 = bar_module_right(x, &ms[1]).truncate(x, w).unwrap();
        let dbar = tw_diff(x, &bar_right_morphism(x, &f, 3).unwrap(), &b0, &b1, Some(w)).unwrap();
        assert!(bar_right_morphism(x, &df, 3).unwrap().equals(x, &dbar.restrict(w)));
        assert!(nod.differential(&ms[0], &ms[1], &df).unwrap().is_zero());

        let lhs = nod.differential(&ms[0], &ms[2], &nod.compose(&g, &f).unwrap()).unwrap();
        let dg = nod.differential(&ms[1], &ms[2], &g).unwrap();
        let rhs = nod
            .add(&nod.compose(&dg, &f).unwrap(), &nod.compose(&g, &df).unwrap().map_components(x, |_, m| m.neg()))
            .unwrap();
        assert!(lhs.equals(x, &rhs), "seed {seed}");
    }
}

fn tw_modules(seed: u64) -> (Nod<Ch>, [TwistedComplex<Nod<Ch>>; 3], TestRng) {
    let mut rng = random::rng(seed);
    let field = FIELDS[seed as usize % 2];
    let alg = fixtures::with_m3(field);
    let nod = Nod::new(Ch::new(field), 3);
    let w = Window::new(0, 1);
    let t = [(); 3].map(|_| random::twisted_modules(&nod, &alg, w, &mut rng));
    (nod, t, rng)
}

#[test]
fn module_construction_is_a_dg_functor() {
    for seed in 0..3 {
        let (nod, [t, s, u], mut rng) = tw_modules(seed);
        assert!(phi_square(&nod, &t).unwrap().is_none());
        let big = Nod::new(Tw::new(nod.base), nod.words);
        let (pt, ps) = (phi_object(&nod, &t).unwrap(), phi_object(&nod, &s).unwrap());
        assert!(is_right_module(&big.base, &pt, 3).unwrap().1.is_none());
        let f = random::twisted_modules_morphism(&nod, &t, &s, 0, &mut rng);
        let g = random::twisted_modules_morphism(&nod, &s, &u, -1, &mut rng);
        let gf = tw_compose(&nod, &g, &f).unwrap();
        let lhs = phi_morphism(&nod, &gf, &t, &u).unwrap();
        let rhs = big.compose(&phi_morphism(&nod, &g, &s, &u).unwrap(), &phi_morphism(&nod, &f, &t, &s).unwrap()).unwrap();
        assert!(lhs.equals(&big.base, &rhs), "composition, seed {seed}");

        let df = tw_diff(&nod, &f, &t, &s, None).unwrap();
        let lhs = phi_morphism(&nod, &df, &t, &s).unwrap();
        let rhs = big.differential(&pt, &ps, &phi_morphism(&nod, &f, &t, &s).unwrap()).unwrap();
        assert!(lhs.equals(&big.base, &rhs), "differential, seed {seed}");
    }
}

/// A random morphism `Φ(t) -> Φ(s)` drawn component by component.
fn random_phi_morphism(
    nod: &Nod<Ch>,
    t: &TwistedComplex<Nod<Ch>>,
    s: &TwistedComplex<Nod<Ch>>,
    degree: i64,
    rng: &mut TestRng,
) -> ModMorphism<Tw<Ch>> {
    let ch = nod.base;
    let (pt, ps) = (phi_object(nod, t).unwrap(), phi_object(nod, s).unwrap());
    let alg = &pt.alg;
    let mut comps = BTreeMap::new();
    for r in 1..=nod.words {
        let mut parts: BTreeMap<(i64, i64), GradedMap> = BTreeMap::new();
        for (i, e) in t.objects().unwrap() {
            for (j, f) in s.objects().unwrap() {
                let mut factors = vec![e.object().space().clone()];
                factors.extend(std::iter::repeat_n(alg.space().clone(), r - 1));
                let deg = degree + 1 - r as i64 + i - j;
                parts.insert((*i, *j), random::map(ch.field, &tensor_spaces(&factors), f.object().space(), deg, rng));
            }
        }
        comps.insert(r, TwistedMorphism::new(&ch, degree + 1 - r as i64, parts).unwrap());
    }
    ModMorphism::new(&Tw::new(ch), pt, ps, degree, comps).unwrap()
}

#[test]
fn module_construction_is_bijective_on_morphisms() {
    for seed in 0..4 {
        let (nod, [t, s, _], mut rng) = tw_modules(seed);
        let tw = Tw::new(nod.base);
        let f = random::twisted_modules_morphism(&nod, &t, &s, 1, &mut rng);
        let back = phi_morphism_inverse(&nod, &phi_morphism(&nod, &f, &t, &s).unwrap(), &t, &s).unwrap();
        assert!(back.equals(&nod, &f), "seed {seed}");
        let g = random_phi_morphism(&nod, &t, &s, 0, &mut rng);
        let again = phi_morphism(&nod, &phi_morphism_inverse(&nod, &g, &t, &s).unwrap(), &t, &s).unwrap();
        assert!(again.equals(&tw, &g), "seed {seed}");
    }
}
