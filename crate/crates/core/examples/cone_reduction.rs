//! Forms on the cone over a rational normal curve: completing the square in
//! the apex variable reduces everything to binary forms, and Gram matrices
//! correspond through the Schur complement.
//!
//!     cargo run --release --example cone_reduction

use minsos::cone::{schur, split};
use minsos::fixtures::generic_form;
use minsos::gram::{build_for_surface, build_gram_space};
use minsos::pipeline::{enumerate, EnumerateOptions};
use minsos::surface::rnc_basis;
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let spec = SurfaceSpec::ConeOverRnc { d: 4 };
    let f = generic_form(&spec, 0);
    let names = ["s", "t", "w"];
    println!("f = {}", f.with_vars(&names));
    let sp = split(&f, 4)?;
    println!("a = {}, reduced form c - b^2/a = {}", sp.a, sp.reduce());
    assert_eq!(sp.join(), f);

    // Gram matrices of the reduced form lift to Gram matrices of f and back
    let base = build_gram_space(&sp.reduce(), &rnc_basis(4))?;
    let lifted = sp.lift_gram_exact(base.g0());
    let cone_space = build_for_surface(&f, &spec)?;
    let theta = cone_space.coords_of(&lifted);
    println!("lifted G0 is the cone Gram matrix at theta = {:?}: {}", theta.iter().map(|x| x.to_string()).collect::<Vec<_>>(), cone_space.gram_at_exact(&theta)? == lifted);
    println!("Schur complement recovers G0: {}", &schur(&lifted) == base.g0());

    let e = enumerate(&f, &spec, &EnumerateOptions::default())?;
    println!("{:?}", e.report.counts);
    Ok(())
}
