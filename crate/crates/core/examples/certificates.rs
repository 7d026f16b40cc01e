//! Certificates survive serialization: write every representation of the
//! genus-two form to JSON, read it back and re-check it.
//!
//!     cargo run --release --example certificates

use minsos::fixtures::genus_two_form;
use minsos::gram::Certificate;
use minsos::pipeline::{enumerate, EnumerateOptions};
use minsos::SurfaceSpec;

fn main() -> minsos::Result<()> {
    let spec = SurfaceSpec::Scroll { d: 2, e: 1 };
    let e = enumerate(genus_two_form().poly(), &spec, &EnumerateOptions::default())?;
    println!("{:?}", e.report.counts);
    let dir = std::env::temp_dir().join("minsos-certificates");
    std::fs::create_dir_all(&dir)?;
    for (i, c) in e.certificates.iter().enumerate() {
        let path = dir.join(format!("cert{i}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(c)?)?;
        let back: Certificate = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        let signs: String = back.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        println!("{} [{signs}] residual {:.1e}", path.display(), back.recheck()?);
    }
    Ok(())
}
