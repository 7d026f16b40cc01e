//! Command-line front end: argument parsing, file IO and exit codes. The
//! binary in `src/bin/minsos.rs` only calls [`main`].

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::FromPrimitive;
use serde::{Deserialize, Serialize};

use crate::binary_form::BinaryForm;
use crate::binary_sos::{enumerate_two_squares, expected_two_squares_count, roots};
use crate::biform::Biform;
use crate::enumerate::CountReport;
use crate::error::{Error, Result};
use crate::factor::{factor, factor_residual, FactorOptions, Factorization, SymMatrixPoly};
use crate::gram::{build_for_surface, verify_representation, Certificate, FormJson, Representation};
use crate::json::{JsonCoeff, MatrixJson};
use crate::pipeline::{self, EnumerateOptions, ExactCertificate, TableRow};
use crate::poly::Poly;
use crate::scalar::{rat_to_f64, Rational};
use crate::surface::SurfaceSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "minsos", version, about = "Low-rank sums of squares on surfaces of minimal degree")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for start systems, minor selection and generated forms.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Floating-point output (accepts float coefficients on input).
    #[arg(long, global = true, conflicts_with = "exact")]
    pub float: bool,
    /// Exact rational output and certificates.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Residual below which a path endpoint counts as a solution.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub residual_tol: f64,
    /// Endpoints closer than this are merged.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub cluster_radius: f64,
    /// Threads for path tracking (0: all cores, 1: sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub paths_parallel: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Affine space of Gram matrices of a form.
    GramSpace {
        form: PathBuf,
        #[arg(long)]
        surface: SurfaceSpec,
    },
    /// Rank-r Gram matrices: counts, inertia and certificates.
    Enumerate {
        form: PathBuf,
        #[arg(long)]
        surface: SurfaceSpec,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        /// Real points of V(f) and of the first square of each real
        /// representation in the chart t = y = 1 (scrolls only).
        #[arg(long, value_name = "CSV")]
        dump_curve_samples: Option<PathBuf>,
    },
    /// A = B B^T with n + 1 columns for a psd matrix polynomial.
    Factor { matrix: PathBuf },
    /// All ways of writing a nonnegative binary form as p^2 + q^2.
    TwoSquares { form: PathBuf },
    /// Counts for seeded generic forms on the surfaces of minimal degree in P^5.
    Table {
        /// Comma-separated, e.g. `cone_rnc(4),scroll(2,2)`.
        #[arg(long, value_parser = parse_surface_list)]
        surfaces: Option<SurfaceList>,
        /// Add the Veronese row (slowest).
        #[arg(long)]
        with_veronese: bool,
    },
    /// Re-check a certificate or any JSON output of this tool.
    Verify {
        file: PathBuf,
        /// Accepted residual relative to the largest coefficient.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SurfaceList(pub Vec<SurfaceSpec>);

// Commas inside `scroll(2,2)` do not separate entries.
fn parse_surface_list(s: &str) -> std::result::Result<SurfaceList, String> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ','))) {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                let item = s[start..i].trim();
                if !item.is_empty() {
                    out.push(item.parse::<SurfaceSpec>().map_err(|e| e.to_string())?);
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if out.is_empty() {
        return Err("no surfaces given".into());
    }
    Ok(SurfaceList(out))
}

pub const DEFAULT_TABLE: [SurfaceSpec; 3] = [
    SurfaceSpec::ConeOverRnc { d: 4 },
    SurfaceSpec::Scroll { d: 2, e: 2 },
    SurfaceSpec::Scroll { d: 3, e: 1 },
];

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PathFailureBudgetExceeded { .. }
        | Error::IterationBudgetExceeded { .. }
        | Error::StuckAboveTarget { .. } => EXIT_SOLVER,
        Error::VerificationFailed(_) => EXIT_VERIFY,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GramSpaceOutput {
    pub surface: SurfaceSpec,
    pub basis: Vec<Vec<u32>>,
    pub dim: usize,
    pub g0: MatrixJson,
    pub kernel: Vec<MatrixJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EnumerateOutput {
    pub form: FormJson,
    pub surface: SurfaceSpec,
    pub report: CountReport,
    pub certificates: Vec<Certificate>,
    #[serde(default)]
    pub exact_certificates: Vec<ExactCertificate>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FactorOutput {
    pub matrix: SymMatrixPoly,
    #[serde(flatten)]
    pub factorization: Factorization,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TwoSquaresOutput {
    pub form: BinaryForm<f64>,
    pub count: usize,
    pub expected: Option<usize>,
    /// Pairs `(p, q)`.
    pub representations: Vec<[BinaryForm<f64>; 2]>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub checked: usize,
    pub worst_residual: f64,
    pub tol: f64,
    pub ok: bool,
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.paths_parallel)
        .build()
        .map_err(|e| Error::Input(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::GramSpace { form, surface } => cmd_gram_space(g, form, surface),
        Command::Enumerate {
            form,
            surface,
            rank,
            dump_curve_samples,
        } => cmd_enumerate(g, form, surface, *rank, dump_curve_samples.as_deref()),
        Command::Factor { matrix } => cmd_factor(g, matrix),
        Command::TwoSquares { form } => cmd_two_squares(g, form),
        Command::Table { surfaces, with_veronese } => {
            let mut list = match surfaces {
                Some(SurfaceList(v)) => v.clone(),
                None => DEFAULT_TABLE.to_vec(),
            };
            if *with_veronese && !list.contains(&SurfaceSpec::Veronese) {
                list.insert(list.len().min(1), SurfaceSpec::Veronese);
            }
            cmd_table(g, &list)
        }
        Command::Verify { file, tol } => cmd_verify(g, file, *tol),
    })
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit<T: Serialize>(g: &GlobalOpts, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &g.json_out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Reads a form; float coefficients are accepted (and converted exactly)
/// under `--float`.
pub fn read_form(path: &Path, float: bool) -> Result<Poly<Rational>> {
    let j: FormJson = serde_json::from_value(read_json(path)?)?;
    match j.to_poly::<Rational>() {
        Ok(p) => Ok(p),
        Err(_) if float => {
            let p = j.to_poly::<f64>()?;
            Ok(p.map(|x| Rational::from_f64(*x).unwrap_or_default()))
        }
        Err(e) => Err(e),
    }
}

fn solver_options(g: &GlobalOpts, rank: usize) -> EnumerateOptions {
    let mut o = EnumerateOptions {
        rank,
        exact: g.exact,
        ..Default::default()
    };
    o.solve.residual_tol = g.residual_tol;
    o.solve.cluster_radius = g.cluster_radius;
    o.solve.tracker.seed = g.seed;
    o.solve.tracker.parallel = g.paths_parallel != 1;
    o
}

fn cmd_gram_space(g: &GlobalOpts, path: &Path, spec: &SurfaceSpec) -> Result<i32> {
    let f = read_form(path, g.float)?;
    let space = build_for_surface(&f, spec)?;
    let mat = |m: &nalgebra::DMatrix<Rational>| {
        if g.float {
            MatrixJson::from_f64(&m.map(|x| rat_to_f64(&x)))
        } else {
            MatrixJson::from_rational(m)
        }
    };
    emit(
        g,
        &GramSpaceOutput {
            surface: *spec,
            basis: space.basis().exps().to_vec(),
            dim: space.dim(),
            g0: mat(space.g0()),
            kernel: space.kernel().iter().map(mat).collect(),
        },
    )?;
    Ok(EXIT_OK)
}

fn cmd_enumerate(g: &GlobalOpts, path: &Path, spec: &SurfaceSpec, rank: usize, csv: Option<&Path>) -> Result<i32> {
    let f = read_form(path, g.float)?;
    let e = pipeline::enumerate(&f, spec, &solver_options(g, rank))?;
    for w in &e.report.warnings {
        eprintln!("warning: {w}");
    }
    // every emitted representation is re-verified from its serialized form
    let tol = 1e-8 * f.max_abs_coeff().max(1.0);
    let mut worst = 0.0f64;
    for c in &e.certificates {
        let back: Certificate = serde_json::from_str(&serde_json::to_string(c)?)?;
        worst = worst.max(back.recheck()?);
    }
    if let Some(p) = csv {
        write_curve_samples(p, &f, spec, &e.representations)?;
    }
    emit(
        g,
        &EnumerateOutput {
            form: FormJson::from_poly(&f, Some(spec)),
            surface: *spec,
            report: e.report,
            certificates: e.certificates,
            exact_certificates: e.exact,
        },
    )?;
    if worst > tol {
        return Err(Error::VerificationFailed(worst));
    }
    Ok(EXIT_OK)
}

/// Real points `x` of `V(f)` above `s` in the chart `t = y = 1`; `f` has
/// degree 1 or 2 in `(x, y)`.
fn curve_points(f: &Biform<f64>, s: f64) -> Vec<f64> {
    let c = |k| f.xy_coefficient(k).eval_real(s, 1.0);
    let (a, b, c) = if f.bidegree().1 == 1 { (0.0, c(1), c(0)) } else { (c(2), c(1), c(0)) };
    if a.abs() < 1e-14 {
        return if b.abs() < 1e-14 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let r = disc.sqrt();
    vec![(-b - r) / (2.0 * a), (-b + r) / (2.0 * a)]
}

fn write_curve_samples(path: &Path, f: &Poly<Rational>, spec: &SurfaceSpec, reps: &[Representation<f64>]) -> Result<()> {
    let SurfaceSpec::Scroll { d, .. } = *spec else {
        return Err(Error::NotAScroll);
    };
    let mut curves = vec![("form".to_string(), Biform::from_poly(2 * d, 2, f.map(rat_to_f64))?)];
    for (k, rep) in reps.iter().enumerate() {
        if let Some(l) = rep.forms.first() {
            curves.push((format!("rep{k}"), Biform::from_poly(d, 1, rep.basis.form(l))?));
        }
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "curve,s,x")?;
    for (name, c) in &curves {
        for i in 0..=600 {
            let s = -3.0 + i as f64 / 100.0;
            for x in curve_points(c, s) {
                if x.is_finite() {
                    writeln!(out, "{name},{s},{x}")?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_factor(g: &GlobalOpts, path: &Path) -> Result<i32> {
    let matrix: SymMatrixPoly = serde_json::from_value(read_json(path)?)?;
    let opts = FactorOptions {
        seed: g.seed,
        ..Default::default()
    };
    let fac = factor(&matrix, &opts)?;
    for w in &fac.warnings {
        eprintln!("warning: {w}");
    }
    let res = fac.relative_residual;
    emit(g, &FactorOutput { matrix, factorization: fac })?;
    if res > 1e-8 {
        return Err(Error::VerificationFailed(res));
    }
    Ok(EXIT_OK)
}

fn read_binary_form(path: &Path, float: bool) -> Result<BinaryForm<f64>> {
    let v = read_json(path)?;
    match serde_json::from_value::<BinaryForm<Rational>>(v.clone()) {
        Ok(f) => Ok(f.to_f64()),
        Err(_) if float => Ok(serde_json::from_value::<BinaryForm<f64>>(v)?),
        Err(e) => Err(Error::Input(format!("{e} (use --float for float coefficients)"))),
    }
}

fn cmd_two_squares(g: &GlobalOpts, path: &Path) -> Result<i32> {
    let f = read_binary_form(path, g.float)?;
    let reps = enumerate_two_squares(&f)?;
    // binary forms and representations on the rational normal curve share (s, t)
    let fp = f.to_poly();
    let residuals: Vec<f64> = reps.iter().map(|r| verify_representation(&fp, r)).collect();
    let scale = f.max_abs_coeff().max(1.0);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    emit(
        g,
        &TwoSquaresOutput {
            expected: expected_two_squares_count(&roots(&f)),
            count: reps.len(),
            representations: reps
                .iter()
                .map(|r| [BinaryForm::new(r.forms[0].clone()), BinaryForm::new(r.forms[1].clone())])
                .collect(),
            residuals,
            form: f,
        },
    )?;
    if worst > 1e-10 * scale {
        return Err(Error::VerificationFailed(worst));
    }
    Ok(EXIT_OK)
}

fn cmd_table(g: &GlobalOpts, surfaces: &[SurfaceSpec]) -> Result<i32> {
    let start = Instant::now();
    let rows: Vec<TableRow> = pipeline::table(surfaces, g.seed, &solver_options(g, 3))?;
    eprintln!("{:<14} {:>5} {:>5} {:>7}   expected      time", "surface", "psd", "real", "complex");
    for r in &rows {
        eprintln!(
            "{:<14} {:>5} {:>5} {:>7}   {:>2}/{:>2}/{:>2}  {}{:>6.1}s",
            r.surface.label(),
            r.counts.psd,
            r.counts.real,
            r.counts.complex,
            r.expected.psd,
            r.expected.real,
            r.expected.complex,
            if r.matches { "  " } else { "! " },
            r.seconds
        );
    }
    eprintln!("total {:.1}s", start.elapsed().as_secs_f64());
    emit(g, &rows)?;
    Ok(EXIT_OK)
}

fn cmd_verify(g: &GlobalOpts, path: &Path, tol: f64) -> Result<i32> {
    let v = read_json(path)?;
    let (checked, worst) = verify_value(&v)?;
    let ok = worst <= tol;
    emit(
        g,
        &VerifyOutput {
            checked,
            worst_residual: worst,
            tol,
            ok,
        },
    )?;
    if !ok {
        return Err(Error::VerificationFailed(worst));
    }
    Ok(EXIT_OK)
}

fn relative(res: f64, scale: f64) -> f64 {
    res / scale.max(f64::MIN_POSITIVE)
}

/// Number of checked items and the worst residual relative to the largest
/// coefficient of the input.
pub fn verify_value(v: &serde_json::Value) -> Result<(usize, f64)> {
    let obj = v.as_object();
    let has = |k: &str| obj.is_some_and(|o| o.contains_key(k));
    if has("report") && has("certificates") {
        let out: EnumerateOutput = serde_json::from_value(v.clone())?;
        let f = out.form.to_poly::<Rational>()?;
        let scale = f.max_abs_coeff();
        let mut worst = 0.0f64;
        for c in &out.certificates {
            worst = worst.max(relative(c.recheck()?, scale));
        }
        for c in &out.exact_certificates {
            if !exact_certificate_holds(&f, c)? {
                return Err(Error::VerificationFailed(f64::INFINITY));
            }
        }
        return Ok((out.certificates.len() + out.exact_certificates.len(), worst));
    }
    if has("matrix") && has("b") {
        let out: FactorOutput = serde_json::from_value(v.clone())?;
        if out.factorization.b.iter().any(|row| row.len() != out.matrix.n() + 1) {
            return Err(Error::VerificationFailed(f64::INFINITY));
        }
        return Ok((1, factor_residual(&out.matrix, &out.factorization.b)));
    }
    if has("representations") {
        let out: TwoSquaresOutput = serde_json::from_value(v.clone())?;
        let f = out.form.to_poly();
        let scale = out.form.max_abs_coeff();
        let mut worst = 0.0f64;
        for [p, q] in &out.representations {
            let sum = p.mul(p).add(&q.mul(q))?;
            worst = worst.max(relative(f.sub(&sum.to_poly()).max_abs_coeff(), scale));
        }
        return Ok((out.representations.len(), worst));
    }
    if let Some(list) = v.as_array() {
        let mut worst = 0.0f64;
        for item in list {
            worst = worst.max(verify_value(item)?.1);
        }
        return Ok((list.len(), worst));
    }
    let c: Certificate = serde_json::from_value(v.clone())?;
    let scale = c.form.to_poly::<f64>().map(|p| p.max_abs_coeff()).unwrap_or(1.0);
    Ok((1, relative(c.recheck()?, scale)))
}

/// `f = sum_i w_i l_i^2` exactly.
pub fn exact_certificate_holds(f: &Poly<Rational>, c: &ExactCertificate) -> Result<bool> {
    if c.forms.len() != c.weights.len() {
        return Err(Error::Input("forms and weights differ in length".into()));
    }
    let mut sum = Poly::zero(f.nvars());
    for (l, w) in c.forms.iter().zip(&c.weights) {
        let w = Rational::from_json(w)?;
        sum = sum.add(&l.to_poly::<Rational>()?.square().scale(&w));
    }
    Ok(&sum == f)
}
