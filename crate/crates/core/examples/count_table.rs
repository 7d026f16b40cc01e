//! Counts of rank-three Gram matrices of seeded generic positive forms on
//! the surfaces of minimal degree in P^5. Pass `--veronese` to add the
//! (slowest) Veronese row.
//!
//!     cargo run --release --example count_table [-- --veronese]

use minsos::cli::DEFAULT_TABLE;
use minsos::pipeline::{table, EnumerateOptions};
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let mut surfaces = DEFAULT_TABLE.to_vec();
    if std::env::args().any(|a| a == "--veronese") {
        surfaces.insert(1, SurfaceSpec::Veronese);
    }
    println!("{:<12} {:>4} {:>5} {:>8}", "surface", "psd", "real", "complex");
    for row in table(&surfaces, 0, &EnumerateOptions::default())? {
        let c = row.counts;
        println!(
            "{:<12} {:>4} {:>5} {:>8}   {} ({:.1}s)",
            row.surface.label(),
            c.psd,
            c.real,
            c.complex,
            if row.matches { "ok" } else { "MISMATCH" },
            row.seconds
        );
    }
    Ok(())
}
