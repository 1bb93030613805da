//! Command-line front end. JSON output is the stable contract; `table` is
//! for reading at a terminal.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::bundle::{
    det_trace_report, gram_fb2, gram_fb3, minor_det_identity_check, projection_hs_check,
    second_fundamental_form_sq, tensor_curvature, trace_additivity_report, FrameSpecJson,
    NumericFrame, SeriesMatrix, DEFAULT_STEP,
};
use crate::fps::serial::series_strings;
use crate::fps::{BiSeries, RadialSeries};
use crate::kernel::{
    canonical_p_kernel, check_theorem_p, kernel_from_spec, lemma_sum_identity, line_curvature,
    log_coeffs, pd_necessary_bound, solve_theorem_p, validate_pd, KernelSpec,
};
use crate::operator::{homogeneity_check, hypercontraction_defect, rigidity_exponent, shift_from_kernel};
use crate::random;
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::similarity::{
    certificate, curvature_difference, fb2_similarity_report, Fb2Options, ScalarData,
    SimilarityReport, Verdict, DEFAULT_BOUND, DEFAULT_DIM, DEFAULT_GRID,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

const MIN_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "cdcurv", version, about = "Curvature invariants of Cowen-Douglas eigenvector bundles")]
pub struct Cli {
    /// Truncation order of radial series.
    #[arg(long, global = true, env = "CDCURV_ORDER", default_value_t = 32)]
    pub order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Comma-separated sample points in t = |w|².
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Truncation dimension for shifts and numeric frames.
    #[arg(long, global = true, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    pub bound: f64,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = random::DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Line-bundle curvature of a radial metric.
    Curvature {
        #[arg(long)]
        spec: String,
    },
    /// Coefficients b_n of log K.
    Logk {
        #[arg(long)]
        spec: String,
    },
    /// Nonnegativity of kernel coefficients.
    PdCheck {
        #[arg(long)]
        spec: String,
    },
    /// Lower bound on a_{n+1} forced by positivity of K·(-𝒦) at t^n.
    PdBound {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        n: usize,
    },
    /// ∂∂̄ log K = K^p for a kernel, or for the canonical solution.
    TheoremP {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        spec: Option<String>,
    },
    /// Signed composition sum against 2/n.
    #[command(name = "lemma-2n")]
    Lemma2n {
        #[arg(long)]
        n: usize,
    },
    /// Rank-two frame report: det, trace, θ², additivity.
    Fb2 {
        #[arg(long)]
        spec: String,
    },
    /// Rank-three frame report.
    Fb3 {
        #[arg(long)]
        spec: String,
    },
    /// Minor identity on seeded random matrices.
    DetIdentity {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Curvature of a bundle tensored with a line bundle.
    Tensor {
        /// Kernel or FB₂ frame spec.
        #[arg(long)]
        spec: String,
        /// JSON list of polynomial sections, e.g. '[["1","1"]]'. Random if absent.
        #[arg(long)]
        sections: Option<String>,
    },
    /// Weighted-shift realization and its defect diagonal.
    Shift {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        hyper: Option<usize>,
    },
    /// Homogeneity of a rank-two frame.
    Homogeneous {
        #[arg(long)]
        h0: String,
        #[arg(long)]
        h1: String,
        #[arg(long, default_value = "1")]
        a: String,
    },
    /// Growth of the intertwiner product ratio.
    Rigidity {
        #[arg(long)]
        k0: u64,
        #[arg(long)]
        k1: u64,
        #[arg(long, default_value_t = 100_000)]
        m_max: u64,
    },
    /// Curvature-difference certificate for similarity of T to S*.
    Similar {
        #[arg(long)]
        t: String,
        #[arg(long)]
        s: String,
        /// Second-level metric of T; switches to the two-level report.
        #[arg(long, requires = "s1")]
        t1: Option<String>,
        #[arg(long, requires = "t1")]
        s1: Option<String>,
        #[arg(long)]
        ratio_t: Option<String>,
        #[arg(long)]
        ratio_s: Option<String>,
        #[arg(long)]
        phi_sq: Option<String>,
    },
    /// ‖∂P‖²_HS against -trace 𝒦 at a point.
    HsCheck {
        /// Kernel or FB₂ frame spec.
        #[arg(long)]
        spec: String,
        /// Complex point, e.g. 0.3, 0.6i, 0.1+0.2i.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// exp(log f) = f and f·(1/f) = 1 on seeded random series.
    SeriesCheck {
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

/// Report plus whether its verdict passed.
struct Outcome {
    report: Value,
    ok: bool,
}

impl Outcome {
    fn pass(report: Value) -> Self {
        Self { report, ok: true }
    }

    fn verdict(report: Value, ok: bool) -> Self {
        Self { report, ok }
    }
}

type CliResult<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Inline JSON, or `@path` to read it from a file.
fn load(arg: &str) -> CliResult<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(arg.to_string()),
    }
}

fn kernel_spec(arg: &str) -> CliResult<KernelSpec> {
    KernelSpec::from_json(&load(arg)?).map_err(err)
}

enum AnySpec {
    Kernel(KernelSpec),
    Frame(Box<FrameSpecJson>),
}

fn any_spec(arg: &str) -> CliResult<AnySpec> {
    let text = load(arg)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("malformed spec: {e}"))?;
    if value.get("kind").is_some() {
        KernelSpec::from_json(&text).map(AnySpec::Kernel).map_err(err)
    } else {
        FrameSpecJson::from_json(&text)
            .map(|f| AnySpec::Frame(Box::new(f)))
            .map_err(err)
    }
}

fn rational(s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn strings(f: &RadialSeries<Rational>) -> Value {
    json!(series_strings(f))
}

fn q(x: &Rational) -> Value {
    json!(x.to_string())
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn similarity_json(r: &SimilarityReport<Rational>) -> Value {
    json!({
        "verdict": r.verdict,
        "psi": strings(&r.psi),
        "difference": strings(&r.difference),
        "tail_exponent": r.tail_exponent.map_or(Value::Null, num),
        "partial_sum": num(r.partial_sum),
        "reason": r.reason,
        "flags": r.flags,
        "grid": r.grid.iter().map(|g| json!({
            "t": num(g.t),
            "difference": num(g.difference),
            "laplacian_psi": num(g.laplacian_psi),
        })).collect::<Vec<_>>(),
    })
}

struct Ctx<'a> {
    cli: &'a Cli,
    grid: Vec<f64>,
}

fn dispatch(ctx: &Ctx) -> CliResult<Outcome> {
    let cli = ctx.cli;
    let order = cli.order;
    match &cli.command {
        Command::Curvature { spec } => {
            let h = kernel_spec(spec)?.metric_series::<Rational>(order).map_err(err)?;
            let k = line_curvature(&h).map_err(err)?;
            Ok(Outcome::pass(json!({ "coefficients": strings(&k) })))
        }
        Command::Logk { spec } => {
            let k = kernel_from_spec::<Rational>(&kernel_spec(spec)?, order).map_err(err)?;
            let b = log_coeffs(&k).b;
            Ok(Outcome::pass(json!({ "b": b.iter().map(q).collect::<Vec<_>>() })))
        }
        Command::PdCheck { spec } => {
            let k = kernel_from_spec::<Rational>(&kernel_spec(spec)?, order).map_err(err)?;
            let v = validate_pd(&k);
            Ok(Outcome::verdict(
                json!({ "pd": v.pd, "first_negative": v.first_negative }),
                v.pd,
            ))
        }
        Command::PdBound { spec, n } => {
            let k = kernel_from_spec::<Rational>(&kernel_spec(spec)?, order.max(n + 1)).map_err(err)?;
            let b = pd_necessary_bound(&k, *n).map_err(err)?;
            let consistent = b.satisfied == b.product_nonneg;
            Ok(Outcome::verdict(
                json!({
                    "n": n,
                    "a_next": q(k.coeff(n + 1)),
                    "bound": q(&b.bound),
                    "satisfied": b.satisfied,
                    "product_nonneg": b.product_nonneg,
                    "consistent": consistent,
                }),
                b.satisfied && consistent,
            ))
        }
        Command::TheoremP { p, spec } => theorem_p(*p, spec.as_deref(), order),
        Command::Lemma2n { n } => {
            let value = lemma_sum_identity(*n).map_err(err)?;
            let expected = Rational::from_ratio(2, *n as i64);
            let ok = value == expected;
            Ok(Outcome::verdict(
                json!({ "value": q(&value), "expected": q(&expected), "ok": ok }),
                ok,
            ))
        }
        Command::Fb2 { spec } => fb2(&FrameSpecJson::from_json(&load(spec)?).map_err(err)?, order),
        Command::Fb3 { spec } => {
            let frame = FrameSpecJson::from_json(&load(spec)?).map_err(err)?;
            let f = frame.fb3::<Rational>(order).map_err(err)?;
            let r = det_trace_report(&gram_fb3(&f)).map_err(err)?;
            Ok(Outcome::verdict(
                json!({
                    "det": strings(&r.det),
                    "trace_curv": strings(&r.trace_curv),
                    "det_curv": strings(&r.det_curv),
                    "equal": r.equal,
                }),
                r.equal,
            ))
        }
        Command::DetIdentity { trials } => det_identity(*trials, cli.seed),
        Command::Tensor { spec, sections } => tensor(spec, sections.as_deref(), order, cli.seed),
        Command::Shift { spec, hyper } => {
            let k = kernel_from_spec::<Rational>(&kernel_spec(spec)?, cli.dim).map_err(err)?;
            let s = shift_from_kernel(&k, cli.dim).map_err(err)?;
            let mut out = Map::new();
            out.insert("dim".into(), json!(cli.dim));
            out.insert("sq_weights".into(), json!(s.sq_weights().iter().map(q).collect::<Vec<_>>()));
            let mut ok = true;
            if let Some(m) = hyper {
                let d = hypercontraction_defect(&s, *m).map_err(err)?;
                ok = d.nonneg;
                out.insert("m".into(), json!(m));
                out.insert("defect".into(), json!(d.diag.iter().map(q).collect::<Vec<_>>()));
                out.insert("nonneg".into(), json!(d.nonneg));
                out.insert("first_negative".into(), json!(d.first_negative));
            }
            Ok(Outcome::verdict(Value::Object(out), ok))
        }
        Command::Homogeneous { h0, h1, a } => {
            let k0 = kernel_from_spec::<Rational>(&kernel_spec(h0)?, order).map_err(err)?;
            let k1 = kernel_from_spec::<Rational>(&kernel_spec(h1)?, order).map_err(err)?;
            let v = homogeneity_check(&k0, &k1, &rational(a)?);
            Ok(Outcome::verdict(json!(v), v.homogeneous))
        }
        Command::Rigidity { k0, k1, m_max } => {
            let r = rigidity_exponent(*k0, *k1, *m_max).map_err(err)?;
            Ok(Outcome::pass(json!({
                "exponent": q(&r.exponent),
                "fitted_slope": num(r.fitted_slope),
                "samples": r.samples.iter().map(|s| json!({ "m": s.m, "ratio": num(s.ratio) })).collect::<Vec<_>>(),
            })))
        }
        Command::Similar {
            t,
            s,
            t1,
            s1,
            ratio_t,
            ratio_s,
            phi_sq,
        } => {
            let report = match (t1, s1) {
                (Some(t1), Some(s1)) => {
                    let radial = |arg: &Option<String>| -> CliResult<Option<RadialSeries<Rational>>> {
                        arg.as_deref()
                            .map(|a| kernel_spec(a)?.metric_series(order).map_err(err))
                            .transpose()
                    };
                    let data = ScalarData {
                        ratio_t: radial(ratio_t)?,
                        ratio_s: radial(ratio_s)?,
                        phi_sq: radial(phi_sq)?,
                    };
                    let opts = Fb2Options {
                        order,
                        grid: ctx.grid.clone(),
                        bound: cli.bound,
                        dim: cli.dim,
                    };
                    let (t0, t1, s0, s1) = (kernel_spec(t)?, kernel_spec(t1)?, kernel_spec(s)?, kernel_spec(s1)?);
                    fb2_similarity_report((&t0, &t1), (&s0, &s1), &data, &opts).map_err(err)?
                }
                _ => {
                    let ht = kernel_spec(t)?.metric_series::<Rational>(order).map_err(err)?;
                    let hs = kernel_spec(s)?.metric_series::<Rational>(order).map_err(err)?;
                    let d = curvature_difference(&ht, &hs).map_err(err)?;
                    certificate(&d, &ctx.grid, cli.bound)
                }
            };
            let ok = report.verdict != Verdict::NotCertified;
            Ok(Outcome::verdict(similarity_json(&report), ok))
        }
        Command::HsCheck { spec, w, step, tol } => {
            let w: Complex64 = w.trim().parse().map_err(|_| format!("not a complex number: {w:?}"))?;
            let frame = match any_spec(spec)? {
                AnySpec::Kernel(k) => NumericFrame::from_kernel(&k, cli.dim),
                AnySpec::Frame(f) => NumericFrame::fb2(&f.h0, &f.h1, cli.dim),
            }
            .map_err(err)?;
            let r = projection_hs_check(&frame, w, *step).map_err(err)?;
            let ok = r.gap < *tol;
            Ok(Outcome::verdict(
                json!({
                    "w": [num(w.re), num(w.im)],
                    "hs_sq": num(r.hs_sq),
                    "neg_trace_curv": num(r.neg_trace_curv),
                    "gap": num(r.gap),
                    "ok": ok,
                }),
                ok,
            ))
        }
        Command::SeriesCheck { trials } => series_check(*trials, order, cli.seed),
    }
}

fn theorem_p(p: u32, spec: Option<&str>, order: usize) -> CliResult<Outcome> {
    if p == 0 {
        return Err("p must be at least 1".into());
    }
    let k = match spec {
        Some(s) => kernel_from_spec::<Rational>(&kernel_spec(s)?, order).map_err(err)?,
        None => canonical_p_kernel::<Rational>(p, order),
    };
    let v = check_theorem_p(&k, p);
    let mut out = Map::new();
    out.insert("p".into(), json!(p));
    out.insert("holds".into(), json!(v.holds));
    out.insert("first_mismatch".into(), json!(v.first_mismatch));
    out.insert("lhs".into(), strings(&v.lhs));
    out.insert("rhs".into(), strings(&v.rhs));
    let mut ok = v.holds;
    if spec.is_none() {
        let solved = solve_theorem_p::<Rational>(p, order);
        let solve_matches = solved.series() == k.series();
        // [K^p]_i = (i+1) p^i / 2^i
        let ps = Rational::from_i64(p as i64);
        let ell_ok = (0..=v.rhs.order()).all(|i| {
            *v.rhs.coeff(i) == Rational::from_i64(i as i64 + 1) * num_traits::pow(ps.clone() / Rational::from_i64(2), i)
        });
        out.insert("solve_matches".into(), json!(solve_matches));
        out.insert("ell_closed_form".into(), json!(ell_ok));
        ok = ok && solve_matches && ell_ok;
    }
    Ok(Outcome::verdict(Value::Object(out), ok))
}

fn fb2(frame: &FrameSpecJson, order: usize) -> CliResult<Outcome> {
    let f = frame.fb2::<Rational>(order).map_err(err)?;
    let r = det_trace_report(&gram_fb2(&f)).map_err(err)?;
    let ratio = match &frame.ratio {
        Some(spec) => spec.metric_series::<Rational>(order).map_err(err)?,
        None => f.default_ratio().map_err(err)?,
    };
    let theta_sq = second_fundamental_form_sq(&f, &ratio).ok();
    let k1_metric = match &frame.k1 {
        Some(spec) => spec.metric_series::<Rational>(order).map_err(err)?,
        None => f.h1.clone(),
    };
    let add = trace_additivity_report(&f, &k1_metric).map_err(err)?;
    let mut out = Map::new();
    out.insert("det".into(), strings(&r.det));
    out.insert("trace_curv".into(), strings(&r.trace_curv));
    out.insert("det_curv".into(), strings(&r.det_curv));
    out.insert("equal".into(), json!(r.equal));
    out.insert("curvature_h0".into(), strings(&line_curvature(&f.h0).map_err(err)?));
    out.insert("theta_sq".into(), theta_sq.as_ref().map_or(Value::Null, strings));
    out.insert("additive".into(), json!(add.additive));
    out.insert("lambda".into(), add.lambda.as_ref().map_or(Value::Null, q));
    if let Some(cross) = &frame.cross {
        out.insert("cross".into(), strings(&cross.metric_series::<Rational>(order).map_err(err)?));
    }
    Ok(Outcome::verdict(Value::Object(out), r.equal))
}

fn det_identity(trials: usize, seed: u64) -> CliResult<Outcome> {
    let mut rng = random::rng(seed);
    let mut singular = 0usize;
    let mut failures = Vec::new();
    let sizes = [3usize, 4, 5];
    for &n in &sizes {
        for trial in 0..trials {
            let a = if trial % 10 == 0 {
                random::singular_matrix(&mut rng, n)
            } else {
                random::matrix(&mut rng, n)
            };
            if crate::bundle::linalg::det(&a).map_err(err)?.is_zero() {
                singular += 1;
            }
            if !minor_det_identity_check(&a).map_err(err)?.holds {
                failures.push(json!({ "n": n, "trial": trial }));
            }
        }
    }
    let ok = failures.is_empty();
    Ok(Outcome::verdict(
        json!({
            "seed": seed,
            "trials": trials,
            "sizes": sizes,
            "singular": singular,
            "failures": failures,
            "ok": ok,
        }),
        ok,
    ))
}

fn tensor(spec: &str, sections: Option<&str>, order: usize, seed: u64) -> CliResult<Outcome> {
    let h1 = match any_spec(spec)? {
        AnySpec::Kernel(k) => SeriesMatrix::scalar(BiSeries::lift(&k.metric_series::<Rational>(order).map_err(err)?)),
        AnySpec::Frame(f) => gram_fb2(&f.fb2::<Rational>(order).map_err(err)?),
    };
    let sections: Vec<Vec<Rational>> = match sections {
        Some(s) => {
            let raw: Vec<Vec<String>> =
                serde_json::from_str(&load(s)?).map_err(|e| format!("malformed sections: {e}"))?;
            raw.iter()
                .map(|p| p.iter().map(|c| rational(c)).collect::<CliResult<Vec<_>>>())
                .collect::<CliResult<_>>()?
        }
        None => random::sections(&mut random::rng(seed)),
    };
    let r = tensor_curvature(&h1, &sections).map_err(err)?;
    let line = r.line.restrict().ok();
    Ok(Outcome::verdict(
        json!({
            "rank": h1.dim(),
            "sections": sections.iter().map(|p| p.iter().map(q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "line_curvature": line.as_ref().map_or(Value::Null, strings),
            "additive": r.additive,
        }),
        r.additive,
    ))
}

fn series_check(trials: usize, order: usize, seed: u64) -> CliResult<Outcome> {
    let mut rng = random::rng(seed);
    let one = RadialSeries::<Rational>::one(order);
    let (mut exp_log, mut recip) = (0usize, 0usize);
    for _ in 0..trials {
        let f = random::unit_series(&mut rng, order);
        if f.log().and_then(|l| l.exp()).map_err(err)? == f {
            exp_log += 1;
        }
        if &f * &f.reciprocal().map_err(err)? == one {
            recip += 1;
        }
    }
    let ok = exp_log == trials && recip == trials;
    Ok(Outcome::verdict(
        json!({
            "seed": seed,
            "order": order,
            "trials": trials,
            "exp_log_ok": exp_log,
            "reciprocal_ok": recip,
            "ok": ok,
        }),
        ok,
    ))
}

fn table_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            items.iter().map(table_cell).collect::<Vec<_>>().join(" ")
        }
        other => other.to_string(),
    }
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(report).expect("serializable report"),
        Format::Table => match report {
            Value::Object(map) => {
                let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
                map.iter()
                    .map(|(k, v)| format!("{k:<width$}  {}", table_cell(v)))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
            other => table_cell(other),
        },
    }
}

fn validate(cli: &Cli) -> CliResult<Vec<f64>> {
    if cli.order < MIN_ORDER {
        return Err(format!("order must be at least {MIN_ORDER}, got {}", cli.order));
    }
    let grid = cli.grid.clone().unwrap_or_else(|| DEFAULT_GRID.to_vec());
    if let Some(t) = grid.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(format!("grid values must lie in [0, 1), got {t}"));
    }
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    if !(cli.bound > 0.0) {
        return Err(format!("bound must be positive, got {}", cli.bound));
    }
    if cli.dim == 0 {
        return Err("dim must be positive".into());
    }
    Ok(grid)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err_out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err_out, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    let grid = match validate(&cli) {
        Ok(g) => g,
        Err(msg) => {
            let _ = writeln!(err_out, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    match dispatch(&Ctx { cli: &cli, grid }) {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", render(&outcome.report, cli.format));
            if outcome.ok {
                EXIT_OK
            } else {
                EXIT_VERDICT
            }
        }
        Err(msg) => {
            let _ = writeln!(err_out, "error: {msg}");
            EXIT_INPUT
        }
    }
}
