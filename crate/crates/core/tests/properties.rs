use minsos::binary_sos::enumerate_two_squares;
use minsos::cone::{schur, split};
use minsos::factor::{alternating_projections, factor, random_psd_matrix, FactorOptions};
use minsos::fixtures::{generic_form, random_positive_form};
use minsos::gram::{build_for_surface, build_gram_space, verify_representation};
use minsos::scalar::{rat, Rational};
use minsos::surface::rnc_basis;
use minsos::{BinaryForm, SurfaceSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scroll() -> impl Strategy<Value = SurfaceSpec> {
    (1u32..=3, 1u32..=3).prop_filter_map("d >= e", |(d, e)| (d >= e).then_some(SurfaceSpec::Scroll { d, e }))
}

fn theta(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-40i64..40, 1i64..12).prop_map(|(p, q)| rat(p, q)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_fiber_point_represents_the_form(spec in scroll(), seed in 0u64..1000, raw in theta(16)) {
        let f = random_positive_form(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let space = build_for_surface(&f, &spec).unwrap();
        let g = space.gram_at_exact(&raw[..space.dim()]).unwrap();
        prop_assert_eq!(&space.quadratic_form_of(&g), space.form());
        prop_assert_eq!(space.coords_of(&g), raw[..space.dim()].to_vec());
    }

    #[test]
    fn schur_complement_inverts_the_lift(d in 2u32..=5, seed in 0u64..1000, raw in theta(12)) {
        let spec = SurfaceSpec::ConeOverRnc { d };
        let f = generic_form(&spec, seed);
        let sp = split(&f, d).unwrap();
        prop_assert_eq!(&sp.join(), &f);
        let base = build_gram_space(&sp.reduce(), &rnc_basis(d)).unwrap();
        let g = base.gram_at_exact(&raw[..base.dim()]).unwrap();
        let lifted = sp.lift_gram_exact(&g);
        prop_assert_eq!(schur(&lifted), g);
        prop_assert_eq!(build_for_surface(&f, &spec).unwrap().quadratic_form_of(&lifted), f);
    }

    #[test]
    fn projection_distances_never_increase(seed in 0u64..1000, shift in 1.0f64..50.0) {
        let spec = SurfaceSpec::Scroll { d: 2, e: 1 };
        let space = build_for_surface(&generic_form(&spec, seed), &spec).unwrap();
        let start = space.gram_at_real(&vec![shift; space.dim()]).unwrap();
        let run = alternating_projections(&space, &start, 0.0, 1e-12, 300);
        for w in run.distances.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} > {}", w[1], w[0]);
        }
        prop_assert!(space.fiber_residual(&run.gram) <= 1e-9 * space.form_scale());
    }

    #[test]
    fn sums_of_two_squares_are_recovered(p in proptest::collection::vec(-6i64..=6, 4), q in proptest::collection::vec(-6i64..=6, 4)) {
        let (p, q) = (BinaryForm::<Rational>::from_ints(&p), BinaryForm::<Rational>::from_ints(&q));
        let f = p.mul(&p).add(&q.mul(&q)).unwrap().to_f64();
        prop_assume!(!f.is_zero());
        let reps = enumerate_two_squares(&f).unwrap();
        let fp = f.to_poly();
        for r in &reps {
            prop_assert!(verify_representation(&fp, r) <= 1e-8 * f.max_abs_coeff());
        }
        prop_assert!(!reps.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn factors_have_n_plus_one_columns(seed in 0u64..10_000, h0 in 0u32..=3, h1 in 0u32..=3, k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_psd_matrix(&[h0, h1], k, &mut rng);
        let fac = factor(&a, &FactorOptions::default()).unwrap();
        prop_assert!(fac.b.iter().all(|row| row.len() == 3));
        prop_assert!(fac.relative_residual <= 1e-8, "residual {}", fac.relative_residual);
    }
}
