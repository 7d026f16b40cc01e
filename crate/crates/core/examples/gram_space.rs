//! The affine space of Gram matrices of a form on a scroll: a particular
//! Gram matrix `G0` plus the span of the kernel matrices.
//!
//!     cargo run --release --example gram_space

use minsos::fixtures::{genus_one_form, genus_two_form};
use minsos::gram::build_for_surface;
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    for (f, spec) in [
        (genus_one_form(), SurfaceSpec::Scroll { d: 1, e: 1 }),
        (genus_two_form(), SurfaceSpec::Scroll { d: 2, e: 1 }),
    ] {
        let space = build_for_surface(f.poly(), &spec)?;
        println!("f = {}", f.poly());
        println!("{}: {} x {} Gram matrices, {} parameters", spec.label(), space.size(), space.size(), space.dim());
        println!("basis {:?}", space.basis().exps());
        println!("G0 = {}", space.g0());
        for (i, k) in space.kernel().iter().enumerate() {
            println!("K{} = {}", i + 1, k);
        }
        // every point of the fiber represents f
        let theta = vec![0.5; space.dim()];
        let g = space.gram_at_real(&theta)?;
        println!("fiber residual at theta = 1/2: {:.1e}\n", space.fiber_residual(&g));
    }
    Ok(())
}
