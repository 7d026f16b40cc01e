//! A nonnegative binary form of degree 2d with distinct roots is a sum of
//! two squares in exactly 2^(d-1) inequivalent ways.
//!
//!     cargo run --release --example two_squares

use minsos::binary_sos::{enumerate_two_squares, expected_two_squares_count, roots};
use minsos::fixtures::random_nonnegative_binary_form;
use minsos::BinaryForm;
use rand::SeedableRng;

fn main() -> minsos::Result<()> {
    let mut forms = vec![BinaryForm::<f64>::new(vec![2.0, 0.0, 3.0, 0.0, 1.0])];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    forms.push(random_nonnegative_binary_form(3, &mut rng).to_f64());
    for f in forms {
        let reps = enumerate_two_squares(&f)?;
        println!("f = {}", f.to_poly());
        println!("  {} representations (expected {:?})", reps.len(), expected_two_squares_count(&roots(&f)));
        for r in &reps {
            let round = |c: &f64| (c * 1e9).round() / 1e9;
            println!("  ({})^2 + ({})^2", r.form(0).map(round), r.form(1).map(round));
        }
    }
    Ok(())
}
