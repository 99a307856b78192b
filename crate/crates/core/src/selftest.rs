//! A quick randomized battery over the main identities, used by `twistkit selftest`.

use crate::ainfty::{is_ainfty_algebra, is_right_module, phi_object, phi_square, phi_square_morphism, Nod};
use crate::bitwisted::{check_bitwisted, convolve_bicomplex, cxcol, cxrow, double_convolve, sigma, CellOrder};
use crate::category::Ch;
use crate::complex::hom_differential;
use crate::error::Result;
use crate::fixtures;
use crate::random::{self, Shape, TestRng};
use crate::scalar::Field;
use crate::transfer::{transfer, verify_transfer, RetractData};
use crate::twisted::{check_twisted, convolve, convolve_morphism, tw_diff, Tw, Window};

/// Outcome of one battery item.
#[derive(Clone, Debug)]
pub struct SelfTestItem {
    pub name: &'static str,
    pub trials: usize,
    /// Trial index and description of the first failure.
    pub failure: Option<(usize, String)>,
}

fn shape(field: Field, len: i64) -> Shape {
    Shape { field, window: Window::new(0, len - 1), degrees: (-1, 1), max_dim: 2, one_sided: false }
}

type Trial = fn(Field, &mut TestRng) -> Result<Option<String>>;

fn twisted_valid(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let t = random::twisted(&shape(field, 3), rng);
    let (_, v) = check_twisted(&Ch::new(field), &t, Window::new(0, 2))?;
    Ok(v.map(|v| format!("cell ({}, {})", v.i, v.j)))
}

fn hom_d_squared(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let cat = Ch::new(field);
    let t = random::twisted(&shape(field, 3), rng);
    let s = random::twisted(&shape(field, 2), rng);
    let f = random::twisted_morphism(field, &t, &s, 0, rng);
    let ddf = tw_diff(&cat, &tw_diff(&cat, &f, &t, &s, None)?, &t, &s, None)?;
    Ok((!ddf.is_zero()).then(|| "d(d(f)) is nonzero".to_string()))
}

fn convolution(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let cat = Ch::new(field);
    let w = Window::new(0, 2);
    let t = random::twisted(&shape(field, 3), rng);
    let s = random::twisted(&shape(field, 3), rng);
    let f = random::twisted_morphism(field, &t, &s, 1, rng);
    let lhs = convolve_morphism(&tw_diff(&cat, &f, &t, &s, None)?, &t, &s, w)?;
    let rhs = hom_differential(&convolve(&t, w)?, &convolve(&s, w)?, &convolve_morphism(&f, &t, &s, w)?)?;
    Ok((lhs != rhs).then(|| "convolution does not intertwine differentials".to_string()))
}

fn row_column(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let cat = Ch::new(field);
    let cc = random::twisted_of_twisted(&shape(field, 2), &shape(field, 2), rng);
    if check_twisted(&Tw::new(cat), &cc, Window::new(0, 1))?.1.is_some() {
        return Ok(Some("generated twisted complex of twisted complexes is invalid".into()));
    }
    let (row, col) = (cxrow(&cat, &cc)?, cxcol(&cat, &cc)?);
    for (name, b) in [("row", &row), ("column", &col), ("sigma", &sigma(&cat, &row))] {
        if let Some(v) = check_bitwisted(&cat, b, None)?.1 {
            return Ok(Some(format!("{name} bicomplex fails at {:?} -> {:?}", v.source, v.target)));
        }
    }
    let dd = double_convolve(field, &cc)?;
    if convolve_bicomplex(field, &row, CellOrder::RowMajor)? != dd
        || convolve_bicomplex(field, &col, CellOrder::ColumnMajor)? != dd
    {
        return Ok(Some("total complexes disagree".into()));
    }
    Ok(None)
}

fn fixture_algebras(field: Field, _: &mut TestRng) -> Result<Option<String>> {
    for alg in [fixtures::upper_triangular(field), fixtures::dual_numbers(field), fixtures::with_m3(field)] {
        if let (_, Some(v)) = is_ainfty_algebra(&alg, 4)? {
            return Ok(Some(format!("{} fails at cell ({}, {})", alg.name(), v.i, v.j)));
        }
    }
    Ok(None)
}

fn modules_and_phi(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let alg = fixtures::with_m3(field);
    let nod = Nod::new(Ch::new(field), 3);
    let m = random::right_module(&alg, 3, rng);
    if let (_, Some(v)) = is_right_module(&nod.base, &m, 3)? {
        return Ok(Some(format!("random module fails at cell ({}, {})", v.i, v.j)));
    }
    let t = random::twisted_modules(&nod, &alg, Window::new(0, 1), rng);
    let s = random::twisted_modules(&nod, &alg, Window::new(0, 1), rng);
    phi_object(&nod, &t)?;
    if phi_square(&nod, &t)?.is_some() {
        return Ok(Some("object square does not commute".into()));
    }
    let g = random::twisted_modules_morphism(&nod, &t, &s, 0, rng);
    Ok(phi_square_morphism(&nod, &g, &t, &s)?.map(|_| "morphism square does not commute".to_string()))
}

fn transfers(field: Field, rng: &mut TestRng) -> Result<Option<String>> {
    let alg = fixtures::dual_numbers(field);
    let m = random::rebase_module(&random::two_term_module(&alg, 2, rng), rng);
    let r = RetractData::onto_homology(m.object())?;
    let result = transfer(&m, &r, 4)?;
    let report = verify_transfer(&m, &r, &result, 4)?;
    Ok(report.first_failure().map(|c| format!("check {} fails", c.name)))
}

const BATTERY: [(&str, usize, Trial); 7] = [
    ("twisted_validity", 4, twisted_valid),
    ("hom_d_squared", 4, hom_d_squared),
    ("convolution_functor", 3, convolution),
    ("row_column", 2, row_column),
    ("fixture_algebras", 1, fixture_algebras),
    ("modules_and_phi", 1, modules_and_phi),
    ("transfer", 2, transfers),
];

/// Runs the battery; `field` fixes the field, otherwise each trial draws
/// `Q` or `F_101`.
pub fn run(seed: u64, field: Option<Field>) -> Result<Vec<SelfTestItem>> {
    let mut items = Vec::new();
    for (k, (name, trials, f)) in BATTERY.iter().enumerate() {
        let mut failure = None;
        for t in 0..*trials {
            let mut rng = random::rng(seed.wrapping_mul(1_000_003).wrapping_add((k * 100 + t) as u64));
            let fld = field.unwrap_or_else(|| random::field(&mut rng));
            if let Some(msg) = f(fld, &mut rng)? {
                failure = Some((t, format!("{msg} (field {fld})")));
                break;
            }
        }
        items.push(SelfTestItem { name, trials: *trials, failure });
    }
    Ok(items)
}
