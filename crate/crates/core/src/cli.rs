//! The `webrank` command line.
//!
//! Every subcommand reads JSON (from the named files, or standard input when
//! the main input is omitted) and writes one JSON report to standard output
//! or `--out`. Failures are reported on standard error as
//! `{"error": code, "detail": text}`.
//!
//! Exit status: 0 on success, 1 for malformed input or invalid parameters,
//! 2 for degenerate mathematical data, 3 when `verify` or `example` finds a
//! failing certificate.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abelian::{rank, reconstruct_relation};
use crate::error::{Error, Result};
use crate::nakai::{
    certify, check_nakai, harmonic_example, solve_p, BuildSpec, Certificates, March,
};
use crate::normal_form::{invariants_3jet, normalize, slope_from_h, FieldMode};
use crate::scalar::Scalar;
use crate::series::{BiSeries, UniSeries};
use crate::web::{blaschke_curvature, cross_ratio, is_hexagonal, make_wc, PlanarWeb};

#[derive(Debug, Parser)]
#[command(
    name = "webrank",
    version,
    about = "Exact jet computations for planar 3- and 4-webs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Rational,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Formal rank of W_C = (dx, dy, dy − p dx, dy − C p dx).
    Rank {
        #[arg(long)]
        p: Option<PathBuf>,
        /// Cross-ratio constant; defaults to the input's "C", else −1.
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<Scalar>,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blaschke curvature of a 3-web, of every 3-subweb of a 4-web, or of
    /// the slope web (dx, dy, dy − p dx).
    Curvature {
        #[arg(long, conflicts_with = "web")]
        p: Option<PathBuf>,
        #[arg(long)]
        web: Option<PathBuf>,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<Scalar>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-ratio of a 4-web.
    Crossratio {
        #[arg(long, conflicts_with = "web")]
        p: Option<PathBuf>,
        #[arg(long)]
        web: Option<PathBuf>,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<Scalar>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal form 1 + xy(1 + h) of the slope web.
    Normalize {
        #[arg(long)]
        p: Option<PathBuf>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = Field::Rational)]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve (*) for p from a relation (r, s) and a trace.
    Build {
        #[arg(long)]
        r: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum)]
        side: Option<Side>,
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<Scalar>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The harmonic example with u(0) = a, with certificates.
    Example {
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        a: Scalar,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the certificates of an example bundle.
    Verify {
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Report plus whether its checks passed.
struct Outcome {
    report: Value,
    pass: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, pass: true }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_degeneracy() {
        2
    } else {
        1
    }
}

/// Runs the command line on `args` (program name first) and returns the
/// exit status.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let out = cli.command.out().map(Path::to_path_buf);
    match execute(cli.command, stdin, stderr) {
        Ok(outcome) => {
            let text =
                serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
            let written = match &out {
                Some(path) => fs::write(path, text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::Parse(e.to_string())),
            };
            match written {
                Err(e) => report_error(stderr, &e),
                Ok(()) if outcome.pass => 0,
                Ok(()) => 3,
            }
        }
        Err(e) => report_error(stderr, &e),
    }
}

fn report_error(stderr: &mut dyn Write, e: &Error) -> i32 {
    let obj = json!({"error": e.code(), "detail": e.to_string()});
    let _ = writeln!(stderr, "{obj}");
    exit_code(e)
}

impl Command {
    fn out(&self) -> Option<&Path> {
        match self {
            Command::Rank { out, .. }
            | Command::Curvature { out, .. }
            | Command::Crossratio { out, .. }
            | Command::Normalize { out, .. }
            | Command::Build { out, .. }
            | Command::Example { out, .. }
            | Command::Verify { out, .. } => out.as_deref(),
        }
    }
}

fn read_json(path: Option<&Path>, stdin: &mut dyn Read) -> Result<Value> {
    let text = match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
        }
        None => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::Parse(format!("standard input: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn decode<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn encode<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

#[derive(Deserialize)]
struct NormalFormInput {
    h: BiSeries,
    c: Scalar,
    strict: bool,
}

/// A slope `p` from a bare series, a `{"p": .., "C": ..}` object or a
/// normal form report, with the cross-ratio constant if one is recorded.
fn slope_input(v: Value) -> Result<(BiSeries, Option<Scalar>)> {
    let Value::Object(map) = &v else {
        return Err(Error::Parse("expected a JSON object".into()));
    };
    if map.contains_key("terms") {
        return Ok((decode(v)?, None));
    }
    if let Some(p) = map.get("p") {
        let c = map.get("C").cloned().map(decode).transpose()?;
        return Ok((decode(p.clone())?, c));
    }
    if map.contains_key("h") {
        let nf: NormalFormInput = decode(v)?;
        let k = if nf.strict { Scalar::one() } else { nf.c };
        return Ok((slope_from_h(&nf.h, &k), None));
    }
    Err(Error::Parse(
        "expected a series, {\"p\": ...} or a normal form".into(),
    ))
}

#[allow(clippy::large_enum_variant)]
enum WebInput {
    Slope(BiSeries, Option<Scalar>),
    Web(PlanarWeb),
}

fn web_or_slope(p: Option<&Path>, web: Option<&Path>, stdin: &mut dyn Read) -> Result<WebInput> {
    if let Some(w) = web {
        return Ok(WebInput::Web(decode(read_json(Some(w), stdin)?)?));
    }
    let v = read_json(p, stdin)?;
    if v.get("foliations").is_some() {
        return Ok(WebInput::Web(decode(v)?));
    }
    let (p, c) = slope_input(v)?;
    Ok(WebInput::Slope(p, c))
}

fn resolve_c(flag: Option<Scalar>, recorded: Option<Scalar>) -> Scalar {
    flag.or(recorded).unwrap_or_else(|| Scalar::int(-1))
}

fn uni(path: &Path, stdin: &mut dyn Read) -> Result<UniSeries> {
    decode(read_json(Some(path), stdin)?)
}

fn curvature_entry(web: &PlanarWeb) -> Result<Value> {
    let k = blaschke_curvature(web)?;
    Ok(json!({
        "curvature": encode(&k),
        "origin": encode(k.constant_term()),
        "hexagonal": is_hexagonal(web)?,
    }))
}

#[derive(Deserialize)]
struct RelationInput {
    r: UniSeries,
    s: UniSeries,
}

#[derive(Deserialize)]
struct BundleInput {
    a: Scalar,
    u: UniSeries,
    f: BiSeries,
    g: BiSeries,
    p: BiSeries,
    relation: RelationInput,
    #[serde(default)]
    certificates: Option<Certificates>,
}

fn execute(command: Command, stdin: &mut dyn Read, stderr: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Rank { p, c, order, .. } => {
            let (p, recorded) = slope_input(read_json(p.as_deref(), stdin)?)?;
            let c = resolve_c(c, recorded);
            let report = rank(&p, &c, order)?;
            let mut warnings = report.warnings();
            if order < 5 {
                warnings.push(format!(
                    "order {order} is below 5; the degree-3 conditions are not yet included"
                ));
            }
            for w in &warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let mut v = encode(&report);
            v["C"] = encode(&c);
            v["warnings"] = encode(&warnings);
            Ok(Outcome::ok(v))
        }
        Command::Curvature {
            p, web, c, order, ..
        } => match web_or_slope(p.as_deref(), web.as_deref(), stdin)? {
            WebInput::Web(w) => {
                let w = match order {
                    Some(n) => {
                        PlanarWeb::new(w.foliations().iter().map(|f| f.truncate(n)).collect())?
                    }
                    None => w,
                };
                if w.len() == 3 {
                    let mut v = curvature_entry(&w)?;
                    v["order"] = json!(w.order());
                    return Ok(Outcome::ok(v));
                }
                let subwebs = w
                    .subwebs()?
                    .iter()
                    .zip([[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]])
                    .map(|(sw, idx)| {
                        let mut v = curvature_entry(sw)?;
                        v["foliations"] = json!(idx);
                        Ok(v)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Outcome::ok(json!({"order": w.order(), "subwebs": subwebs})))
            }
            WebInput::Slope(p, recorded) => {
                let c = resolve_c(c, recorded);
                let n = order.unwrap_or(p.order());
                let report = check_nakai(&p, &c, n)?;
                let wc = make_wc(p.truncate(n), c)?;
                let mut v = encode(&report);
                v["curvature"] = encode(&blaschke_curvature(&wc.base_web())?);
                v["order"] = json!(wc.order());
                Ok(Outcome::ok(v))
            }
        },
        Command::Crossratio { p, web, c, .. } => {
            let web = match web_or_slope(p.as_deref(), web.as_deref(), stdin)? {
                WebInput::Web(w) => w,
                WebInput::Slope(p, recorded) => make_wc(p, resolve_c(c, recorded))?.to_planar_web(),
            };
            let cr = cross_ratio(&web)?;
            let constant = cr.is_constant();
            Ok(Outcome::ok(json!({
                "order": cr.order(),
                "cross_ratio": encode(&cr),
                "constant": constant,
                "value": if constant { encode(cr.constant_term()) } else { Value::Null },
            })))
        }
        Command::Normalize {
            p, order, field, ..
        } => {
            let (p, _) = slope_input(read_json(p.as_deref(), stdin)?)?;
            let mode = match field {
                Field::Rational => FieldMode::Rational,
                Field::Quadratic => FieldMode::Quadratic,
            };
            let nw = normalize(&p, order.unwrap_or(p.order()), mode)?;
            let mut v = encode(&nw);
            v["invariants"] = match invariants_3jet(&nw) {
                Ok((a, b)) => json!({"a": encode(&a), "b": encode(&b)}),
                Err(Error::StrictFormRequired) | Err(Error::OrderExhausted(_)) => Value::Null,
                Err(e) => return Err(e),
            };
            v["slope"] = encode(&nw.slope());
            Ok(Outcome::ok(v))
        }
        Command::Build {
            r,
            s,
            trace,
            side,
            c,
            order,
            ..
        } => {
            let (r, s, trace) = (uni(&r, stdin)?, uni(&s, stdin)?, uni(&trace, stdin)?);
            let order = order.unwrap_or(r.order().min(s.order()).min(trace.order()));
            let spec = BuildSpec {
                r,
                s,
                trace,
                side: side.map(|s| match s {
                    Side::X => March::X,
                    Side::Y => March::Y,
                }),
                cross_ratio: resolve_c(c, None),
                order,
            };
            let march = spec.march()?;
            let p = solve_p(&spec)?;
            let relation = reconstruct_relation(&spec.r, &spec.s, &p, &spec.cross_ratio)?;
            let nakai = check_nakai(&p, &spec.cross_ratio, order)?;
            Ok(Outcome::ok(json!({
                "p": encode(&p),
                "C": encode(&spec.cross_ratio),
                "order": order,
                "side": encode(&march),
                "relation": encode(&relation),
                "nakai": encode(&nakai),
            })))
        }
        Command::Example { a, order, .. } => {
            let bundle = harmonic_example(&a, order)?;
            Ok(Outcome {
                pass: bundle.all_pass(),
                report: encode(&bundle),
            })
        }
        Command::Verify { bundle, .. } => {
            let b: BundleInput = decode(read_json(bundle.as_deref(), stdin)?)?;
            let certificates = certify(&b.a, &b.u, &b.f, &b.g, &b.p, &b.relation.r, &b.relation.s)?;
            let pass = certificates.values().all(|c| c.pass);
            let recorded_match = b.certificates.as_ref().map(|rec| {
                rec.len() == certificates.len()
                    && rec
                        .iter()
                        .all(|(k, c)| certificates.get(k).map(|d| d.pass) == Some(c.pass))
            });
            Ok(Outcome {
                pass: pass && recorded_match != Some(false),
                report: json!({
                    "pass": pass,
                    "recorded_match": recorded_match,
                    "certificates": encode(&certificates),
                }),
            })
        }
    }
}
