//! Combinatorics of scrolls and the genericity diagnostics of a biform.
//!
//!     cargo run --release --example scroll_geometry

use minsos::enumerate::expected_counts;
use minsos::fixtures::{genus_two_form, nongeneric_form};
use minsos::surface::{discriminant, genericity_check, hilbert_data, monomial_basis};
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    println!("{:<12} {:>5} {:>6} {:>6} {:>6}  expected counts", "surface", "genus", "curve", "|B1|", "|B2|");
    for (d, e) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
        let spec = SurfaceSpec::scroll(d, e)?;
        let h = hilbert_data(&spec)?;
        println!(
            "{:<12} {:>5} {:>6} {:>6} {:>6}  {:?}",
            spec.label(),
            h.genus,
            h.curve_degree,
            monomial_basis(&spec, 1)?.len(),
            monomial_basis(&spec, 2)?.len(),
            expected_counts(&spec).unwrap()
        );
    }
    for (f, spec) in [
        (genus_two_form(), SurfaceSpec::Scroll { d: 2, e: 1 }),
        (nongeneric_form(), SurfaceSpec::Scroll { d: 2, e: 2 }),
    ] {
        println!("\nf = {}", f.poly());
        println!("discriminant {}", discriminant(&f, &spec)?.to_poly());
        println!("{:?}", genericity_check(&f, &spec)?);
    }
    Ok(())
}
