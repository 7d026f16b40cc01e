//! Factor a psd matrix polynomial as `A = B B^T` with `n + 1` columns.
//!
//!     cargo run --release --example factor_matrix

use minsos::factor::{factor, random_psd_matrix, FactorOptions, SymMatrixPoly};
use minsos::{BinaryForm, Rational};
use rand::SeedableRng;

fn show(a: &SymMatrixPoly, opts: &FactorOptions) -> minsos::Result<()> {
    let fac = factor(a, opts)?;
    println!("n = {}, row degrees {:?}", a.n(), fac.heights);
    for row in &fac.b {
        let cells: Vec<String> = row.iter().map(|p| format!("{}", p.to_poly().map(|c| (c * 1e4).round() / 1e4))).collect();
        println!("  [ {} ]", cells.join(" | "));
    }
    println!("  relative residual {:.1e}, ranks {:?}", fac.relative_residual, fac.rank_history);
    for w in &fac.warnings {
        println!("  note: {w}");
    }
    Ok(())
}

fn main() -> minsos::Result<()> {
    // diag(s^2 + t^2, 2s^2 + 2st + 2t^2)
    let a = SymMatrixPoly::from_fn(2, |i, j| match (i, j) {
        (0, 0) => BinaryForm::<Rational>::from_ints(&[1, 0, 1]),
        (1, 1) => BinaryForm::from_ints(&[2, 2, 2]),
        _ => BinaryForm::from_ints(&[0, 0, 0]),
    });
    let opts = FactorOptions::default();
    show(&a, &opts)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    show(&random_psd_matrix(&[2, 1, 3], 5, &mut rng), &opts)?;
    Ok(())
}
