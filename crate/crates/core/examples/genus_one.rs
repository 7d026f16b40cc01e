//! Rank-three Gram matrices of a form on Scroll(1,1) (a genus-one curve):
//! 4 complex, 4 real, 2 psd, each with an exact rational certificate.
//!
//!     cargo run --release --example genus_one

use minsos::fixtures::genus_one_form;
use minsos::pipeline::{enumerate, EnumerateOptions};
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let f = genus_one_form();
    let spec = SurfaceSpec::Scroll { d: 1, e: 1 };
    let opts = EnumerateOptions {
        exact: true,
        ..Default::default()
    };
    let e = enumerate(f.poly(), &spec, &opts)?;
    println!("f = {}", f.poly());
    println!("{:?}", e.report.counts);
    for (p, rep) in e.report.points.iter().filter(|p| p.real).zip(&e.representations) {
        let alpha = p.theta[0][0];
        let terms: Vec<String> = (0..rep.len())
            .map(|i| format!("{}({})^2", if rep.signs[i] > 0 { "+" } else { "-" }, rep.form(i).map(|c| (c * 1e6).round() / 1e6)))
            .collect();
        println!("alpha = {alpha:+.6}  inertia {:?}\n    f = {}", p.inertia.unwrap(), terms.join(" "));
    }
    for c in &e.exact {
        println!("exact certificate at theta = {}: {}", serde_json::to_string(&c.theta)?, serde_json::to_string(&c.weights)?);
    }
    Ok(())
}
