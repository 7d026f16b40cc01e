//! End-to-end enumeration: Gram space, rank locus, classification and
//! certificates, with the cone reduction for forms on cones.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biform::Biform;
use crate::cone;
use crate::enumerate::{classify, expected_counts, solve_rank_locus, CountReport, Counts};
use crate::error::{Error, Result};
use crate::gram::{build_for_surface, build_gram_space, ldl_exact, Certificate, FormJson, GramSpace, Representation};
use crate::homotopy::{SolutionSet, SolveConfig};
use crate::json::{CoeffJson, JsonCoeff};
use crate::poly::Poly;
use crate::scalar::{rationalize, Rational};
use crate::surface::{genericity_check, rnc_basis, SurfaceSpec};

/// Rows of the count table for surfaces of minimal degree in P^5:
/// `(surface, psd / real / complex)`.
pub const TABLE_ONE: [(SurfaceSpec, Counts); 4] = [
    (SurfaceSpec::ConeOverRnc { d: 4 }, Counts { complex: 35, real: 11, psd: 8, indefinite: 3 }),
    (SurfaceSpec::Veronese, Counts { complex: 63, real: 15, psd: 8, indefinite: 7 }),
    (SurfaceSpec::Scroll { d: 2, e: 2 }, Counts { complex: 64, real: 16, psd: 8, indefinite: 8 }),
    (SurfaceSpec::Scroll { d: 3, e: 1 }, Counts { complex: 64, real: 16, psd: 8, indefinite: 8 }),
];

pub fn table_expected(spec: &SurfaceSpec) -> Option<Counts> {
    TABLE_ONE.iter().find(|(s, _)| s == spec).map(|(_, c)| *c).or_else(|| expected_counts(spec))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerateOptions {
    pub rank: usize,
    pub solve: SolveConfig,
    /// Also produce exact rational certificates for psd points.
    pub exact: bool,
    /// Denominator bound when rationalizing parameters.
    pub max_den: i64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            rank: 3,
            solve: SolveConfig::default(),
            exact: false,
            max_den: 1_000_000,
        }
    }
}

/// `f = sum_i w_i l_i^2` over the rationals, from a rationalized parameter.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExactCertificate {
    pub theta: Vec<CoeffJson>,
    pub forms: Vec<FormJson>,
    pub weights: Vec<CoeffJson>,
    /// Number of squares, i.e. the exact rank of the Gram matrix.
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub report: CountReport,
    pub space: GramSpace,
    /// Representations of the real points, in report order.
    pub representations: Vec<Representation<f64>>,
    pub certificates: Vec<Certificate>,
    pub exact: Vec<ExactCertificate>,
}

/// Enumerates the rank-`opts.rank` Gram matrices of `form` on `spec`.
pub fn enumerate(form: &Poly<Rational>, spec: &SurfaceSpec, opts: &EnumerateOptions) -> Result<Enumeration> {
    spec.validate()?;
    let space = build_for_surface(form, spec)?;
    let sols = match *spec {
        SurfaceSpec::ConeOverRnc { d } => cone_solutions(form, d, &space, opts)?,
        _ => solve_rank_locus(&space, opts.rank, &opts.solve)?,
    };
    let cls = classify(&space, &sols, opts.rank, &spec.label(), table_expected(spec));
    let mut report = cls.report;
    if let SurfaceSpec::Scroll { d, .. } = *spec {
        let b = Biform::from_poly(2 * d, 2, form.clone())?;
        let diag = genericity_check(&b, spec)?;
        if !diag.discriminant_squarefree {
            report.warnings.push("the discriminant has a repeated root".into());
        }
        if !diag.curve_smooth {
            report.warnings.push("the curve of the form is singular".into());
        }
    }
    let certificates = cls
        .representations
        .iter()
        .map(|rep| Certificate::new(form, spec, rep))
        .collect();
    let exact = if opts.exact {
        exact_certificates(&space, &report, opts)
    } else {
        Vec::new()
    };
    Ok(Enumeration {
        report,
        space,
        representations: cls.representations,
        certificates,
        exact,
    })
}

/// Rank-`(r-1)` points of the reduced form on the base curve, lifted to
/// coordinates of the cone's Gram space.
fn cone_solutions(form: &Poly<Rational>, d: u32, space: &GramSpace, opts: &EnumerateOptions) -> Result<SolutionSet> {
    if opts.rank < 2 {
        return Err(Error::Input("the cone route needs rank at least 2".into()));
    }
    let split = cone::split(form, d)?;
    let base = build_gram_space(&split.reduce(), &rnc_basis(d))?;
    let mut sols = solve_rank_locus(&base, opts.rank - 1, &opts.solve)?;
    for p in &mut sols.points {
        let g = base.gram_at(&p.theta)?;
        let lifted = split.lift_gram(&g, |x| Complex64::new(crate::scalar::rat_to_f64(x), 0.0));
        p.theta = space.coords_of(&lifted);
        if p.real {
            p.theta.iter_mut().for_each(|z| z.im = 0.0);
        }
    }
    Ok(sols)
}

fn exact_certificates(space: &GramSpace, report: &CountReport, opts: &EnumerateOptions) -> Vec<ExactCertificate> {
    let mut out = Vec::new();
    for p in &report.points {
        if !p.inertia.is_some_and(|i| i.is_psd()) {
            continue;
        }
        let theta: Vec<Rational> = p.theta.iter().map(|z| rationalize(z[0], opts.max_den)).collect();
        let Ok(g) = space.gram_at_exact(&theta) else { continue };
        if let Some(c) = exact_certificate(space, &g) {
            out.push(ExactCertificate {
                theta: theta.iter().map(|x| x.to_json()).collect(),
                ..c
            });
        }
    }
    out
}

/// LDL certificate of a rational Gram matrix, checked by exact expansion.
pub fn exact_certificate(space: &GramSpace, g: &DMatrix<Rational>) -> Option<ExactCertificate> {
    let ws = ldl_exact(space.basis(), g)?;
    if !ws.is_psd() || &ws.expand() != space.form() {
        return None;
    }
    Some(ExactCertificate {
        theta: space.coords_of(g).iter().map(|x| x.to_json()).collect(),
        forms: ws.forms.iter().map(|v| FormJson::from_poly(&space.basis().form(v), None)).collect(),
        weights: ws.weights.iter().map(|w| w.to_json()).collect(),
        rank: ws.weights.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub surface: SurfaceSpec,
    pub seed: u64,
    pub counts: Counts,
    pub expected: Counts,
    pub matches: bool,
    pub seconds: f64,
    pub warnings: Vec<String>,
}

/// One seeded generic positive form per surface, enumerated and compared
/// with the table.
pub fn table(surfaces: &[SurfaceSpec], seed: u64, opts: &EnumerateOptions) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for spec in surfaces {
        let expected = table_expected(spec)
            .ok_or_else(|| Error::Input(format!("{} is not a row of the table", spec.label())))?;
        let form = crate::fixtures::generic_form(spec, seed);
        let start = std::time::Instant::now();
        let mut o = opts.clone();
        o.solve.tracker.seed = seed;
        let e = enumerate(&form, spec, &o)?;
        let counts = e.report.counts;
        rows.push(TableRow {
            surface: *spec,
            seed,
            counts,
            expected,
            matches: counts == expected,
            seconds: start.elapsed().as_secs_f64(),
            warnings: e.report.warnings,
        });
    }
    Ok(rows)
}
