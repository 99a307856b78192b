//! Twisted complexes of twisted complexes as bicomplexes: rows, columns,
//! reflection and total complexes.
//!
//! `cargo run --example bicomplexes`

use twistkit::bitwisted::{
    check_bitwisted, convolve_bicomplex, cxcol, cxrow, cxrow_inverse, double_convolve, reflect, sigma, CellOrder,
};
use twistkit::category::Ch;
use twistkit::random::{self, Shape};
use twistkit::scalar::Field;
use twistkit::twisted::Window;

fn main() -> twistkit::Result<()> {
    let field = Field::Prime(101);
    let cat = Ch::new(field);
    let mut rng = random::rng(2);
    let outer = Shape { field, window: Window::new(0, 2), degrees: (0, 1), max_dim: 2, one_sided: true };
    let inner = Shape { window: Window::new(0, 1), one_sided: false, ..outer };
    let cc = random::twisted_of_twisted(&outer, &inner, &mut rng);

    let (row, col) = (cxrow(&cat, &cc)?, cxcol(&cat, &cc)?);
    println!("{} cells, {} maps", row.objects().len(), row.diffs().len());
    for (name, b) in [("row", &row), ("column", &col), ("sigma", &sigma(&cat, &row))] {
        println!("{name} bicomplex valid: {}", check_bitwisted(&cat, b, None)?.1.is_none());
    }
    println!("reflect(column) = row: {}", reflect(&col).equals(&cat, &row, |a, b| a == b));

    let total = double_convolve(field, &cc)?;
    println!("total dims {:?}", total.space().dims());
    println!(
        "row-major and column-major totals agree: {}",
        convolve_bicomplex(field, &row, CellOrder::RowMajor)? == total
            && convolve_bicomplex(field, &col, CellOrder::ColumnMajor)? == total
    );
    let back = cxrow_inverse(&cat, &row)?;
    println!("row inverse recovers {} outer objects", back.objects().map_or(0, |o| o.len()));
    Ok(())
}
