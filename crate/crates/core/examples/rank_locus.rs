//! The solver underneath the enumeration: rank-r minors of the Gram pencil,
//! solved by total-degree homotopy continuation, then classified.
//!
//!     cargo run --release --example rank_locus

use minsos::enumerate::{classify, expected_counts, minor_system, solve_rank_locus};
use minsos::fixtures::genus_two_form;
use minsos::gram::build_for_surface;
use minsos::homotopy::SolveConfig;
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let spec = SurfaceSpec::Scroll { d: 2, e: 1 };
    let space = build_for_surface(genus_two_form().poly(), &spec)?;
    let sys = minor_system(&space, 3, 0)?;
    println!("{} parameters, {} minors of size 4", space.dim(), sys.minors().len());

    let mut cfg = SolveConfig::default();
    cfg.tracker.seed = 3;
    let sols = solve_rank_locus(&space, 3, &cfg)?;
    println!("{:?}", sols.stats);
    let cls = classify(&space, &sols, 3, &spec.label(), expected_counts(&spec));
    println!("{:?}", cls.report.counts);
    for p in cls.report.points.iter().filter(|p| p.real) {
        let theta: Vec<f64> = p.theta.iter().map(|z| z[0]).collect();
        println!("  theta {theta:+.4?} inertia {:?}", p.inertia.unwrap());
    }
    Ok(())
}
