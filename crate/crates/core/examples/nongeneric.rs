//! A smooth but special form on Scroll(2,2): 60 rank-three Gram matrices
//! instead of 64. The missing solutions escape to infinity, which shows up
//! as extra diverging paths compared with a generic form.
//!
//!     cargo run --release --example nongeneric

use minsos::fixtures::{generic_form, nongeneric_form};
use minsos::pipeline::{enumerate, EnumerateOptions};
use minsos::surface::genericity_check;
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let spec = SurfaceSpec::Scroll { d: 2, e: 2 };
    let f = nongeneric_form();
    println!("f = {}", f.poly());
    println!("{:?}", genericity_check(&f, &spec)?);
    let opts = EnumerateOptions::default();
    let special = enumerate(f.poly(), &spec, &opts)?;
    let generic = enumerate(&generic_form(&spec, 0), &spec, &opts)?;
    for (name, e) in [("special", &special), ("generic", &generic)] {
        println!("{name:>8}: {:?}", e.report.counts);
        println!("          {:?}", e.report.paths);
    }
    for w in &special.report.warnings {
        println!("warning: {w}");
    }
    println!(
        "missing solutions: {}, extra diverging paths: {}",
        generic.report.counts.complex - special.report.counts.complex,
        special.report.paths.diverged as i64 - generic.report.paths.diverged as i64
    );
    Ok(())
}
