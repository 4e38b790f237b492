//! Command-line front end.  The binary is a thin wrapper around [`run`], so
//! every subcommand can also be driven in-process.

use crate::error::{Result, TorsionError};
use crate::family::{Family, Manifold};
use crate::rootfind::Precision;
use crate::torsion::{self, Method, TorsionRecord, CROSS_CHECK_TOL};
use crate::variety::{self, ReconstructionRoute};
use crate::verify::{self, Status, VerificationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "torsionlab", version, about = "Adjoint Reidemeister torsion of surgeries on 4_1 and 5_2")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Root-finding precision profile.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_precision)]
    pub precision: Precision,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20240101)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn parse_precision(s: &str) -> std::result::Result<Precision, String> {
    s.parse().map_err(|e: TorsionError| e.to_string())
}

#[derive(Args, Debug, Clone, Default)]
pub struct Target {
    /// Knot: 41 or 52.
    #[arg(long, default_value = "41")]
    pub knot: String,
    /// A single surgery coefficient p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub surgery: Option<String>,
    /// p range for p/1 surgery on 4_1: `a:b`, `a` or `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// q range for 1/q surgery: `a:b`, `a` or `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Q_M, its roots, the variety points and their representations.
    Variety(Target),
    /// Torsion at every variety point.
    Torsion {
        #[command(flatten)]
        target: Target,
        /// closed, chain or both.
        #[arg(long, default_value = "both")]
        method: String,
    },
    /// Theorem and lemma checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Σ 2/τ = 0 over the variety.
    Vanishing(Target),
    /// Divisibility of Q_M and square-freeness of the quotient.
    Lemmas(Target),
    /// Power sums of 2τ and integrality of 2Σ(8τ)^n.
    Sums {
        #[command(flatten)]
        target: Target,
        /// Exponents: `a:b`, `a` or `a,b,c`.
        #[arg(long, default_value = "-1,1,2,3", allow_hyphen_values = true)]
        n: String,
    },
    /// Σ 1/τ for |p| ≤ 4.
    Table {
        #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
        p: String,
    },
    /// Randomized residue-sum instances.
    Residue {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        controls: usize,
    },
    /// Partial fractions of 2τ for p = 2m.
    PartialFractions {
        #[arg(long, default_value = "-5,-4,-3,3,4,5", allow_hyphen_values = true)]
        m: String,
    },
    /// Power sums of roots against companion-matrix traces.
    Newton {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 12)]
        count: usize,
    },
}

/// Parse `a:b` (inclusive), a single integer, or a comma list.
pub fn parse_range(s: &str) -> Result<Vec<i64>> {
    let bad = || TorsionError::Parse(format!("range {s:?}: expected a:b, a, or a,b,c"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once(':') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        if b - a > 512 {
            return Err(TorsionError::InvalidArgument(format!("range {s} is too long")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| bad())).collect()
}

/// The manifolds named by a target (explicit, finite).
pub fn manifolds(t: &Target) -> Result<Vec<Manifold>> {
    let mut out = Vec::new();
    if let Some(s) = &t.surgery {
        out.push(Manifold::from_surgery(&t.knot, s)?);
    }
    let five_two = matches!(t.knot.as_str(), "52" | "5_2");
    if !five_two && !matches!(t.knot.as_str(), "41" | "4_1") {
        return Err(TorsionError::UnsupportedFamily(format!("knot {}", t.knot)));
    }
    if let Some(p) = &t.p {
        if five_two {
            return Err(TorsionError::UnsupportedFamily("p/1 surgery on 5_2 is not implemented".into()));
        }
        for v in parse_range(p)? {
            out.push(Manifold::new(Family::FigureEightP, v)?);
        }
    }
    if let Some(q) = &t.q {
        let fam = if five_two { Family::FiveTwoQ } else { Family::FigureEightQ };
        for v in parse_range(q)?.into_iter().filter(|&v| v != 0) {
            out.push(Manifold::new(fam, v)?);
        }
    }
    if out.is_empty() {
        return Err(TorsionError::InvalidArgument("give --surgery, --p or --q".into()));
    }
    Ok(out)
}

/// Surgery label as `S^3_{p/q}(K)`.
pub fn manifold_label(m: &Manifold) -> String {
    m.to_string()
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cfmt(z: Complex64) -> String {
    format!("{:+.15e} {:+.15e}i", z.re, z.im)
}

#[derive(Serialize)]
struct RootOut {
    value: [f64; 2],
    multiplicity: usize,
}

#[derive(Serialize)]
struct PointOut {
    a: [f64; 2],
    route: Option<ReconstructionRoute>,
    residual: Option<f64>,
    irreducible: Option<bool>,
    error: Option<String>,
}

#[derive(Serialize)]
struct VarietyOut {
    manifold: String,
    family: Family,
    parameter: i64,
    qm: String,
    degree: usize,
    roots: Vec<RootOut>,
    points: Vec<PointOut>,
}

/// Accumulated output plus pass/fail state.
#[derive(Default, Debug)]
pub struct Output {
    pub text: String,
    pub failed: bool,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn json<T: Serialize>(&mut self, v: &T) {
        let s = serde_json::to_string(v).expect("serializable");
        self.line(s);
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed {
            EXIT_FAILED
        } else {
            EXIT_OK
        }
    }
}

pub fn cmd_variety(t: &Target, g: &GlobalOpts) -> Result<Output> {
    let mut out = Output::default();
    let ms = manifolds(t)?;
    if g.format == Format::Csv {
        out.line("family,parameter,re_a,im_a,route,residual");
    }
    for m in &ms {
        let var = variety::compute_variety(m, g.precision)?;
        let reps: Vec<_> = {
            use rayon::prelude::*;
            var.points.par_iter().map(|p| variety::reconstruct_representation(p, m)).collect()
        };
        let mut points = Vec::new();
        for (p, rep) in var.points.iter().zip(&reps) {
            let po = match rep {
                Ok(r) => {
                    if r.max_residual() > variety::RESIDUAL_GATE || !r.invariant_violations().is_empty() {
                        out.failed = true;
                    }
                    PointOut {
                        a: c2(p.a),
                        route: Some(r.route),
                        residual: Some(r.max_residual()),
                        irreducible: Some(r.irreducible),
                        error: None,
                    }
                }
                Err(e) => {
                    out.failed = true;
                    PointOut { a: c2(p.a), route: None, residual: None, irreducible: None, error: Some(e.to_string()) }
                }
            };
            points.push(po);
        }
        let vo = VarietyOut {
            manifold: manifold_label(m),
            family: m.family,
            parameter: m.parameter,
            qm: var.qm.to_string(),
            degree: var.degree,
            roots: var.roots.roots.iter().map(|r| RootOut { value: c2(r.value), multiplicity: r.multiplicity }).collect(),
            points,
        };
        match g.format {
            Format::Json => out.json(&vo),
            Format::Csv => {
                for p in &vo.points {
                    out.line(format!(
                        "{},{},{:.16e},{:.16e},{},{}",
                        m.family,
                        m.parameter,
                        p.a[0],
                        p.a[1],
                        p.route.map_or("error".to_string(), route_name),
                        p.residual.map_or("nan".to_string(), |r| format!("{r:.3e}"))
                    ));
                }
            }
            Format::Text => {
                out.line(format!("{}  ({})", vo.manifold, m.family));
                out.line(format!("  Q_M = {}", vo.qm));
                out.line(format!("  degree {}; {} distinct roots", vo.degree, vo.roots.len()));
                for r in &var.roots.roots {
                    if r.multiplicity > 1 {
                        out.line(format!("    root {} multiplicity {}", cfmt(r.value), r.multiplicity));
                    }
                }
                out.line(format!("  {} points", vo.points.len()));
                for p in &vo.points {
                    let a = Complex64::new(p.a[0], p.a[1]);
                    match (&p.error, p.route, p.residual) {
                        (None, Some(route), Some(res)) => out.line(format!(
                            "    a = {}  route {:<14} residual {:.2e}{}",
                            cfmt(a),
                            route_name(route),
                            res,
                            if p.irreducible == Some(false) { "  reducible" } else { "" }
                        )),
                        (Some(e), _, _) => out.line(format!("    a = {}  FAILED: {e}", cfmt(a))),
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(out)
}

fn route_name(r: ReconstructionRoute) -> String {
    match r {
        ReconstructionRoute::ClosedForm => "closed-form".into(),
        ReconstructionRoute::SpecialUnit => "special-unit".into(),
        ReconstructionRoute::Cubic => "cubic".into(),
        ReconstructionRoute::Newton { seed } => format!("newton[{seed}]"),
    }
}

/// Cross-check failures of a torsion table (for a single manifold).
pub fn torsion_failures(records: &[TorsionRecord], method: Method) -> Vec<String> {
    let mut fails = Vec::new();
    let mut first_ratio: Option<Complex64> = None;
    for r in records {
        let a = cfmt(r.a);
        if method != Method::ChainComplex && r.closed_form.is_none() {
            fails.push(format!("a = {a}: no closed-form value"));
        }
        if method == Method::ClosedForm || !r.irreducible {
            continue;
        }
        if r.chain_complex.is_none() {
            fails.push(format!("a = {a}: no chain-complex value ({})", r.notes.join("; ")));
            continue;
        }
        if let Some(d) = r.modulus_mismatch() {
            if !(d < CROSS_CHECK_TOL) {
                fails.push(format!("a = {a}: |τ| mismatch {d:.2e}"));
            }
        }
        if let Some(q) = r.ratio {
            match first_ratio {
                None => first_ratio = Some(q),
                Some(q0) if (q - q0).norm() > CROSS_CHECK_TOL => {
                    fails.push(format!("a = {a}: ratio {} differs from {}", cfmt(q), cfmt(q0)))
                }
                _ => {}
            }
        }
    }
    fails
}

pub fn cmd_torsion(t: &Target, method: &str, g: &GlobalOpts) -> Result<Output> {
    let method: Method = method.parse()?;
    let ms = manifolds(t)?;
    let mut out = Output::default();
    let mut all = Vec::new();
    for m in &ms {
        let recs = torsion::torsion_table(m, method, g.precision)?;
        let fails = torsion_failures(&recs, method);
        if !fails.is_empty() {
            out.failed = true;
        }
        match g.format {
            Format::Json => recs.iter().for_each(|r| out.json(r)),
            Format::Csv => all.extend(recs.iter().cloned()),
            Format::Text => {
                out.line(format!("{}  ({} points)", manifold_label(m), recs.len()));
                for r in &recs {
                    let mut l = format!("  a = {}", cfmt(r.a));
                    if let Some(c) = r.closed_form {
                        let _ = write!(l, "  τ_cf = {}", cfmt(c));
                    }
                    if let Some(c) = r.chain_complex {
                        let _ = write!(l, "  τ_cc = {}", cfmt(c));
                    }
                    if let Some(q) = r.ratio {
                        let _ = write!(l, "  ratio {:+.6}", q.re);
                    }
                    if !r.notes.is_empty() {
                        let _ = write!(l, "  [{}]", r.notes.join("; "));
                    }
                    out.line(l);
                }
                for f in &fails {
                    out.line(format!("  FAIL {f}"));
                }
            }
        }
    }
    if g.format == Format::Csv {
        let mut buf = Vec::new();
        torsion::write_csv(&all, &mut buf).map_err(|e| TorsionError::InvalidArgument(e.to_string()))?;
        out.text.push_str(&String::from_utf8(buf).expect("utf-8 csv"));
    }
    Ok(out)
}

/// Run a verify subcommand to its list of reports.
pub fn verify_reports(check: &VerifyCommand, g: &GlobalOpts) -> Result<Vec<VerificationReport>> {
    Ok(match check {
        VerifyCommand::Vanishing(t) => verify::sweep(&manifolds(t)?, verify::check_vanishing),
        VerifyCommand::Lemmas(t) => verify::sweep(&manifolds(t)?, verify::check_lemma_kappa),
        VerifyCommand::Sums { target, n } => {
            let ns = parse_range(n)?;
            let ms = manifolds(target)?;
            let jobs: Vec<(Manifold, i64)> = ms.iter().flat_map(|m| ns.iter().map(move |&n| (*m, n))).collect();
            use rayon::prelude::*;
            jobs.par_iter().map(|(m, n)| verify::check_power_sums(m, *n)).collect()
        }
        VerifyCommand::Table { p } => parse_range(p)?.into_iter().map(verify::check_small_p_table).collect(),
        VerifyCommand::Residue { trials, controls } => vec![verify::check_residue_lemma(*trials, *controls, g.seed)],
        VerifyCommand::PartialFractions { m } => {
            use rayon::prelude::*;
            parse_range(m)?.par_iter().map(|&m| verify::check_partial_fractions(m)).collect()
        }
        VerifyCommand::Newton { target, count } => {
            manifolds(target)?.iter().map(|m| verify::check_girard_newton(m, *count)).collect()
        }
    })
}

/// Per-claim counts of pass / finding / fail.
pub fn summary_table(rs: &[VerificationReport]) -> String {
    let mut counts: BTreeMap<(String, String), [usize; 3]> = BTreeMap::new();
    for r in rs {
        let fam = r.family.map_or("-".to_string(), |f| f.to_string());
        let e = counts.entry((r.claim.clone(), fam)).or_default();
        e[match r.status {
            Status::Pass => 0,
            Status::Finding => 1,
            Status::Fail => 2,
        }] += 1;
    }
    let mut s = format!("{:<20} {:<16} {:>5} {:>5} {:>5}\n", "claim", "family", "pass", "find", "fail");
    for ((c, f), [p, fi, fa]) in &counts {
        let _ = writeln!(s, "{c:<20} {f:<16} {p:>5} {fi:>5} {fa:>5}");
    }
    s
}

pub fn cmd_verify(check: &VerifyCommand, g: &GlobalOpts) -> Result<(Output, String)> {
    let rs = verify_reports(check, g)?;
    let mut out = Output { failed: !verify::all_passed(&rs), ..Default::default() };
    let summary = summary_table(&rs);
    match g.format {
        Format::Json => rs.iter().for_each(|r| out.json(r)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header =
                ["claim", "family", "parameters", "status", "method", "provenance", "computed", "expected", "deviation", "tolerance"];
            w.write_record(header).map_err(|e| TorsionError::InvalidArgument(e.to_string()))?;
            for r in &rs {
                let v = serde_json::to_value(r).expect("serializable");
                let field = |k: &str| v[k].as_str().map_or_else(|| v[k].to_string(), str::to_string);
                w.write_record([
                    r.claim.clone(),
                    r.family.map_or(String::new(), |f| f.to_string()),
                    r.parameters.clone(),
                    field("status"),
                    field("method"),
                    field("provenance"),
                    r.computed.clone(),
                    r.expected.clone(),
                    r.deviation.map_or(String::new(), |d| format!("{d:.3e}")),
                    r.tolerance.map_or(String::new(), |t| format!("{t:e}")),
                ])
                .map_err(|e| TorsionError::InvalidArgument(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| TorsionError::InvalidArgument(e.to_string()))?;
            out.text.push_str(&String::from_utf8(bytes).expect("utf-8 csv"));
        }
        Format::Text => {
            for r in &rs {
                out.line(r.to_string());
                for d in &r.details {
                    out.line(format!("    {d}"));
                }
            }
            out.line("");
            out.text.push_str(&summary);
        }
    }
    Ok((out, summary))
}

/// Size the global thread pool from TORSIONLAB_THREADS, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("TORSIONLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Variety(t) => cmd_variety(t, g).map(|o| (o, None)),
        Command::Torsion { target, method } => cmd_torsion(target, method, g).map(|o| (o, None)),
        Command::Verify { check } => cmd_verify(check, g).map(|(o, s)| (o, Some(s))),
    };
    let (out, summary) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                TorsionError::Parse(_) | TorsionError::InvalidArgument(_) | TorsionError::UnsupportedFamily(_) => EXIT_USAGE,
                _ => EXIT_FAILED,
            };
        }
    };
    let written = match &g.out {
        Some(path) => std::fs::write(path, &out.text),
        None => std::io::stdout().lock().write_all(out.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_FAILED;
    }
    if let (Some(s), true) = (summary, g.format != Format::Text) {
        eprint!("{s}");
    }
    out.exit_code()
}
