//! Command pipelines behind the binary.

use std::path::PathBuf;

use esspos_core::berezin::{
    berezin_disk_quadrature_tol, berezin_series, boundary_limit, cesaro_means, classify_radial,
    difference_coeffs, BerezinProfile, BerezinSample, BoundaryLimit, LambdaPoint, RadialOptions,
    SeriesOptions, Terms, QUADRATURE_T_MAX,
};
use esspos_core::carleson::{
    carleson_report_depth, weighted_implication_check, CarlesonReport, WeightedImplication,
};
use esspos_core::hardy::{
    classify_hardy, hull_cross_check, toeplitz_truncation, EssentialRangeEstimate, HullReport,
};
use esspos_core::radial::lacunary_operator;
use esspos_core::spectra::{
    apply_finite_rank, classify_diagonal, negative_count_profile, Classification, CountProfile,
    FiniteRankPerturbation, HermitianTruncation,
};
use esspos_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Settings;
use crate::model::Operator;
use crate::parse::{parse_symbol, render, Kind, ParseError, SymbolSpec};
use crate::report::{to_json, Cell, Table};

pub const TOOL: &str = "esspos";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Berezin,
    Carleson,
    Spectrum,
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Berezin => "berezin",
            Command::Carleson => "carleson",
            Command::Spectrum => "spectrum",
            Command::Demo => "demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Process exit status; the numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Certified = 0,
    Failure = 1,
    Inconclusive = 2,
    Hypothesis = 3,
    Parse = 4,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub settings: Settings,
    pub format: Option<Format>,
    /// Evaluation points for `berezin`.
    pub t: Option<Vec<f64>>,
    /// Weight exponent for `carleson`.
    pub alpha: f64,
    /// Rows for `spectrum`.
    pub rows: usize,
    /// RNG seed for `demo`.
    pub seed: u64,
    /// Directory against which sample paths resolve.
    pub base_dir: PathBuf,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            settings: Settings::default(),
            format: None,
            t: None,
            alpha: 0.0,
            rows: 256,
            seed: DEMO_SEED,
            base_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub exit: Exit,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Spec(CoreError),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(CoreError),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::HypothesisNotMet(msg) => RunError::Hypothesis(msg),
            other => RunError::Core(other),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    error: ErrorBody<'a>,
}

impl RunError {
    pub fn exit(&self) -> Exit {
        match self {
            RunError::Parse(_) | RunError::Spec(_) => Exit::Parse,
            RunError::Hypothesis(_) => Exit::Hypothesis,
            RunError::Usage(_) | RunError::Core(_) => Exit::Failure,
        }
    }

    /// Machine-readable form written in place of the report.
    pub fn to_json(&self, command: &str) -> String {
        let (kind, line, column) = match self {
            RunError::Parse(p) => (
                match p.kind {
                    crate::parse::ParseErrorKind::Syntax => "syntax",
                    crate::parse::ParseErrorKind::Semantic => "semantic",
                },
                Some(p.line),
                Some(p.column),
            ),
            RunError::Spec(_) => ("semantic", None, None),
            RunError::Hypothesis(_) => ("hypothesis_not_met", None, None),
            RunError::Usage(_) => ("usage", None, None),
            RunError::Core(_) => ("numerical", None, None),
        };
        let message = match self {
            RunError::Parse(p) => p.message.clone(),
            other => other.to_string(),
        };
        to_json(&ErrorReport {
            tool: TOOL,
            version: VERSION,
            command,
            error: ErrorBody {
                kind,
                message,
                line,
                column,
            },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpecEcho {
    pub kind: Kind,
    pub source: String,
    pub canonical: String,
}

impl SpecEcho {
    fn new(spec: &SymbolSpec) -> Self {
        Self {
            kind: spec.kind(),
            source: spec.source.clone(),
            canonical: render(spec),
        }
    }
}

/// Output of `classify`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub spec: SpecEcho,
    pub tolerances: Settings,
    pub classification: Classification,
    /// `λ_0 … λ_32`.
    pub lambda_head: Vec<f64>,
    pub boundary_limit: Option<BoundaryLimit>,
    pub berezin: Vec<BerezinSample>,
    pub berezin_necessary_condition: Option<bool>,
    pub carleson: Option<CarlesonReport>,
    pub essential_range: Option<EssentialRangeEstimate>,
    pub finite_sections: Option<HullReport>,
}

const LAMBDA_HEAD: usize = 33;
const EVIDENCE_DEPTH: i32 = 12;
const HARDY_SECTIONS: [usize; 3] = [8, 32, 128];

fn series_options(s: &Settings) -> SeriesOptions {
    SeriesOptions {
        tol: s.series_tol,
        max_terms: s.max_terms,
    }
}

fn radial_options(s: &Settings) -> RadialOptions {
    RadialOptions {
        terms: s.terms,
        evidence_depth: EVIDENCE_DEPTH,
        grid_depth: s.grid_depth,
        series: series_options(s),
        ..RadialOptions::default()
    }
}

fn build(text: &str, opts: &Options) -> Result<(SymbolSpec, Operator), RunError> {
    let spec = parse_symbol(text)?;
    let op = Operator::build(&spec, &opts.base_dir).map_err(RunError::Spec)?;
    Ok((spec, op))
}

fn validate(s: &Settings) -> Result<(), RunError> {
    if s.terms < 64 {
        return Err(RunError::Usage(format!("terms = {} is below the minimum of 64", s.terms)));
    }
    if s.max_terms == 0 {
        return Err(RunError::Usage("max_terms must be positive".into()));
    }
    Ok(())
}

fn verdict_exit(c: &Classification) -> Exit {
    if c.verdict.is_certified() {
        Exit::Certified
    } else {
        Exit::Inconclusive
    }
}

/// Runs `command` on the spec text; `demo` ignores the spec.
pub fn run(command: Command, spec: Option<&str>, opts: &Options) -> Result<Outcome, RunError> {
    validate(&opts.settings)?;
    if command == Command::Demo {
        return demo_lacunary(opts);
    }
    let text = spec.ok_or_else(|| RunError::Usage(format!("{} needs --spec or --spec-file", command.name())))?;
    let (spec, op) = build(text, opts)?;
    match command {
        Command::Classify => classify(spec, &op, opts),
        Command::Berezin => berezin(&op, opts),
        Command::Carleson => carleson(spec, &op, opts),
        Command::Spectrum => spectrum(&op, opts),
        Command::Demo => unreachable!(),
    }
}

fn json_only(opts: &Options, command: Command) -> Result<(), RunError> {
    if opts.format == Some(Format::Csv) {
        return Err(RunError::Usage(format!("{} emits JSON only", command.name())));
    }
    Ok(())
}

fn classify(spec: SymbolSpec, op: &Operator, opts: &Options) -> Result<Outcome, RunError> {
    json_only(opts, Command::Classify)?;
    let s = &opts.settings;
    let lambda_head = op
        .sequence(LAMBDA_HEAD)?
        .map_or_else(Vec::new, |h| h.values().to_vec());
    let mut boundary = None;
    let mut berezin = Vec::new();
    let mut necessary = None;
    let mut carleson = None;
    let mut range = None;
    let mut sections = None;
    let classification = match op {
        Operator::Radial(m) => {
            let r = classify_radial(m, s.epsilon, &radial_options(s))?;
            boundary = Some(r.boundary_limit);
            berezin = r.berezin.samples;
            necessary = Some(r.berezin.necessary_condition_holds);
            carleson = Some(r.carleson);
            r.classification
        }
        Operator::Diagonal(_) => {
            let seq = op.sequence(s.terms)?.expect("diagonal specs have a sequence");
            let so = series_options(s);
            boundary = Some(boundary_limit(&seq, &so)?);
            let ts: Vec<f64> = (1..=EVIDENCE_DEPTH).map(|k| 1.0 - 2f64.powi(-k)).collect();
            let profile = BerezinProfile::from_series(&seq, &ts, &so)?;
            let deepest = &profile.samples[profile.samples.len() - 3..];
            let liminf = deepest.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
            necessary = Some(liminf >= -s.epsilon);
            berezin = profile.samples;
            classify_diagonal(&seq, s.epsilon)?
        }
        Operator::Hardy(sym) => {
            let h = classify_hardy(sym, s.epsilon)?;
            range = Some(h.range);
            sections = Some(hull_cross_check(sym, &HARDY_SECTIONS)?);
            h.classification
        }
    };
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: Command::Classify.name(),
        spec: SpecEcho::new(&spec),
        tolerances: *s,
        classification,
        lambda_head,
        boundary_limit: boundary,
        berezin,
        berezin_necessary_condition: necessary,
        carleson,
        essential_range: range,
        finite_sections: sections,
    };
    let exit = verdict_exit(&report.classification);
    Ok(Outcome {
        text: to_json(&report),
        exit,
    })
}

/// `t = 0`, `1 - 2^{-k}` for `k = 1..=14`, and `0.9, 0.99, 0.999`.
pub fn default_berezin_points() -> Vec<f64> {
    let mut ts: Vec<f64> = std::iter::once(0.0)
        .chain((1..=14).map(|k| 1.0 - 2f64.powi(-k)))
        .chain([0.9, 0.99, 0.999])
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

pub const BEREZIN_COLUMNS: &[&str] = &["t", "value", "tail_bound", "quadrature_value"];
pub const SPECTRUM_COLUMNS: &[&str] = &["n", "lambda", "cesaro", "a_n"];

fn emit(table: Table, opts: &Options) -> Outcome {
    let text = match opts.format {
        Some(Format::Json) => table.to_json(),
        _ => table.to_csv(),
    };
    Outcome {
        text,
        exit: Exit::Certified,
    }
}

fn berezin(op: &Operator, opts: &Options) -> Result<Outcome, RunError> {
    let s = &opts.settings;
    let seq = op
        .sequence(s.terms)?
        .ok_or_else(|| RunError::Usage("berezin applies to radial and diagonal specs".into()))?;
    let mut ts = opts.t.clone().unwrap_or_else(default_berezin_points);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let so = series_options(s);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = berezin_series(&seq, t, Terms::Auto, &so)?;
        let q = match op {
            Operator::Radial(m) if t <= QUADRATURE_T_MAX => {
                Some(berezin_disk_quadrature_tol(m, t, s.quadrature_tol)?.value)
            }
            _ => None,
        };
        rows.push(vec![t.into(), v.value.into(), v.tail_bound.into(), q.into()]);
    }
    Ok(emit(
        Table {
            columns: BEREZIN_COLUMNS,
            rows,
        },
        opts,
    ))
}

fn spectrum(op: &Operator, opts: &Options) -> Result<Outcome, RunError> {
    if opts.rows == 0 {
        return Err(RunError::Usage("rows must be positive".into()));
    }
    let rows = match op {
        Operator::Hardy(sym) => {
            // eigenvalues of the leading section, ascending
            let spec = toeplitz_truncation(sym, opts.rows)?.eigen()?;
            spec.values
                .iter()
                .enumerate()
                .map(|(n, &v)| vec![n.into(), v.into(), Cell::Missing, Cell::Missing])
                .collect()
        }
        _ => {
            let seq = op.sequence(opts.rows)?.expect("Bergman kinds have a sequence");
            let a = difference_coeffs(&seq)?;
            let c = cesaro_means(&a);
            (0..opts.rows)
                .map(|n| {
                    vec![
                        n.into(),
                        seq.values()[n].into(),
                        c[n].into(),
                        a.a[n].into(),
                    ]
                })
                .collect()
        }
    };
    Ok(emit(
        Table {
            columns: SPECTRUM_COLUMNS,
            rows,
        },
        opts,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct CarlesonOutput {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub spec: SpecEcho,
    pub tolerances: Settings,
    /// `"measure"` when nonnegative, otherwise `"total_variation"`.
    pub tested: &'static str,
    pub carleson: CarlesonReport,
    pub weighted_implication: Option<WeightedImplication>,
}

const CARLESON_N: usize = 1024;

fn carleson(spec: SymbolSpec, op: &Operator, opts: &Options) -> Result<Outcome, RunError> {
    json_only(opts, Command::Carleson)?;
    let Operator::Radial(m) = op else {
        return Err(RunError::Usage("carleson applies to radial specs".into()));
    };
    let s = &opts.settings;
    let (tested, target) = if m.is_nonnegative() {
        ("measure", m.clone())
    } else {
        ("total_variation", m.total_variation())
    };
    let carleson = carleson_report_depth(&target, opts.alpha, CARLESON_N, s.grid_depth)?;
    let weighted_implication = if tested == "measure" {
        Some(weighted_implication_check(m, CARLESON_N)?)
    } else {
        None
    };
    let out = CarlesonOutput {
        tool: TOOL,
        version: VERSION,
        command: Command::Carleson.name(),
        spec: SpecEcho::new(&spec),
        tolerances: *s,
        tested,
        carleson,
        weighted_implication,
    };
    Ok(Outcome {
        text: to_json(&out),
        exit: Exit::Certified,
    })
}

pub const DEMO_SEED: u64 = 0x5eed_1ac0;
/// Perturbations live on `span(e_0 … e_{N-1})`.
pub const PERTURBATION_SUPPORT: usize = 256;
pub const DEMO_SIZES: [usize; 5] = [32, 64, 128, 256, 512];
const DEMO_DEPTH: i32 = 14;

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationSummary {
    pub rank: usize,
    pub support: usize,
    pub weights: Vec<f64>,
    pub unperturbed: CountProfile,
    pub perturbed: CountProfile,
    /// `⟨(T+K) e_{2^k}, e_{2^k}⟩`.
    pub perturbed_diagonal: Vec<LambdaPoint>,
    /// Each perturbed count is at least the unperturbed one minus the rank.
    pub interlacing_bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub demo: &'static str,
    pub tolerances: Settings,
    pub seed: u64,
    pub classification: Classification,
    /// `λ_{2^k}` for `k = 0..=20`.
    pub witness: Vec<LambdaPoint>,
    /// Series at `t = 1 - 2^{-k}`, `k = 1..=14`, then `t = 0.999`.
    pub berezin: Vec<BerezinSample>,
    pub boundary_limit: BoundaryLimit,
    pub perturbation: PerturbationSummary,
    pub conclusion: String,
}

/// Random real perturbation of rank 1 to 5 supported on the first [`PERTURBATION_SUPPORT`] coordinates.
pub fn random_perturbation(seed: u64, len: usize) -> esspos_core::Result<FiniteRankPerturbation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.gen_range(1..=5);
    let support = PERTURBATION_SUPPORT.min(len);
    let mut vectors = Vec::with_capacity(rank);
    let mut weights = Vec::with_capacity(rank);
    for _ in 0..rank {
        let mut v: Vec<f64> = (0..support).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v.resize(len, 0.0);
        vectors.push(v);
        weights.push(rng.gen_range(-2.0..2.0));
    }
    FiniteRankPerturbation::real(vectors, weights)
}

fn demo_lacunary(opts: &Options) -> Result<Outcome, RunError> {
    json_only(opts, Command::Demo)?;
    let s = &opts.settings;
    let so = series_options(s);
    let seq = lacunary_operator(s.terms)?;
    let classification = classify_diagonal(&seq, s.epsilon)?;
    let witness = (0..=20)
        .map(|k| {
            let n = 1usize << k;
            LambdaPoint {
                n,
                value: esspos_core::spectra::Generator::Lacunary.eval(n),
            }
        })
        .collect();
    let mut ts: Vec<f64> = (1..=DEMO_DEPTH).map(|k| 1.0 - 2f64.powi(-k)).collect();
    ts.push(0.999);
    let berezin = ts
        .iter()
        .map(|&t| {
            let v = berezin_series(&seq, t, Terms::Auto, &so)?;
            Ok(BerezinSample {
                t,
                value: v.value,
                tail_bound: v.tail_bound,
            })
        })
        .collect::<esspos_core::Result<Vec<_>>>()?;
    let boundary = boundary_limit(&seq, &so)?;

    let max = *DEMO_SIZES.last().expect("sizes are nonempty");
    let k = random_perturbation(opts.seed, max)?;
    let diag: Vec<f64> = (0..max).map(|n| seq.values()[n]).collect();
    let base = |n: usize| Ok(HermitianTruncation::diagonal(&diag[..n]));
    let unperturbed = negative_count_profile(base, s.epsilon, &DEMO_SIZES)?;
    let perturbed = negative_count_profile(|n| apply_finite_rank(&base(n)?, &k), s.epsilon, &DEMO_SIZES)?;
    let full = apply_finite_rank(&base(max)?, &k)?;
    let perturbed_diagonal = (0..)
        .map(|j| 1usize << j)
        .take_while(|&n| n < max)
        .map(|n| LambdaPoint {
            n,
            value: full.get(n, n).re,
        })
        .collect();
    let rank = k.rank_bound();
    let interlacing_bound_holds = perturbed
        .counts
        .iter()
        .zip(&unperturbed.counts)
        .all(|(&p, &u)| p + rank >= u);
    let deepest = berezin[DEMO_DEPTH as usize - 1];
    let conclusion = format!(
        "Berezin transform is {:.3e} at t = 1 - 2^-{DEMO_DEPTH}, tending to 0, yet λ_{{2^k}} = -1 for every k: \
         verdict {:?}; a rank-{rank} perturbation leaves a growing count of negative eigenvalues",
        deepest.value, classification.verdict
    );
    let report = DemoReport {
        tool: TOOL,
        version: VERSION,
        command: Command::Demo.name(),
        demo: "lacunary",
        tolerances: *s,
        seed: opts.seed,
        classification,
        witness,
        berezin,
        boundary_limit: boundary,
        perturbation: PerturbationSummary {
            rank,
            support: PERTURBATION_SUPPORT,
            weights: k.weights().to_vec(),
            unperturbed,
            perturbed,
            perturbed_diagonal,
            interlacing_bound_holds,
        },
        conclusion,
    };
    Ok(Outcome {
        text: to_json(&report),
        exit: Exit::Certified,
    })
}
