//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 on
//! usage or parameter-domain errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{inner_region, outer_region, Delay, InnerKind, MgRegion};
use crate::error::Error;
use crate::model::{fig5_realization, ActivityRealization, NetworkConfig};
use crate::montecarlo::{estimate_mg_with, MgEstimate};
use crate::numeric::fmt_sig;
use crate::scheduler::{schedule_scheme1, schedule_scheme2, PatternCondition, PhaseId, Scheme};
use crate::verify::{run_verification, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wyner-mg",
    version,
    about = "Mixed-delay multiplexing-gain regions of Wyner's linear network under random user activity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Outer,
    InnerTheorem1,
    InnerTimeshare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Display,
    Prose,
}

impl From<ConditionArg> for PatternCondition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Display => PatternCondition::Display,
            ConditionArg::Prose => PatternCondition::Prose,
        }
    }
}

fn parse_delay(s: &str) -> Result<Delay, Error> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Scheme, Error> {
    let v: u8 = s
        .parse()
        .map_err(|_| crate::error::invalid("scheme", format!("expected 1 or 2, got `{s}`")))?;
    Scheme::try_from(v)
}

fn parse_phase(s: &str) -> Result<PhaseId, Error> {
    let v: u8 = s
        .parse()
        .map_err(|_| crate::error::invalid("phase", format!("expected 1 or 2, got `{s}`")))?;
    PhaseId::new(v)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit an inner or outer MG region.
    Region {
        #[arg(long)]
        rho: f64,
        #[arg(long = "rho-f")]
        rho_f: f64,
        /// Cooperation rounds, or `inf`.
        #[arg(long = "d", value_parser = parse_delay)]
        d: Delay,
        #[arg(long, value_enum, default_value_t = KindArg::Outer)]
        kind: KindArg,
    },
    /// Estimate a scheme's MG pair by Monte Carlo.
    Simulate {
        #[arg(long)]
        rho: f64,
        #[arg(long = "rho-f")]
        rho_f: f64,
        #[arg(long = "d", value_parser = parse_delay)]
        d: Delay,
        #[arg(long = "k", default_value_t = 2000)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long = "pattern-condition", value_enum, default_value_t = ConditionArg::Display)]
        pattern_condition: ConditionArg,
    },
    /// Check the closed forms against brute-force oracles.
    Verify {
        #[arg(long)]
        rho: f64,
        #[arg(long = "rho-f")]
        rho_f: f64,
        #[arg(long = "d")]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        truncation: u64,
        #[arg(long = "enum-k", default_value_t = 10)]
        enum_k: usize,
    },
    /// Emit the curves of one of the reference figures (2, 3 or 4).
    Figure {
        #[arg(long)]
        which: u8,
    },
    /// Dump the per-user schedule of a realization.
    Schedule {
        /// A realization JSON file, or `builtin:fig5`.
        #[arg(long)]
        realization: String,
        #[arg(long = "d", value_parser = parse_delay)]
        d: Delay,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long, value_parser = parse_phase)]
        phase: Option<PhaseId>,
    },
}

/// A rendered document and the exit code it should produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub exit_code: i32,
}

fn ok(text: String) -> Rendered {
    Rendered {
        text,
        exit_code: EXIT_OK,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn labelled_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a MgRegion)>) -> String {
    let mut out = String::from("label,s_f,s_s\n");
    for (label, region) in rows {
        for v in &region.vertices {
            out.push_str(&format!("{label},{},{}\n", fmt_sig(v.s_f), fmt_sig(v.s_s)));
        }
    }
    out
}

fn finite_only(d: Delay, what: &str) -> Result<u32, Error> {
    d.finite().ok_or_else(|| {
        crate::error::invalid(
            "D",
            format!("`inf` has no meaning for {what}; give an integer"),
        )
    })
}

pub fn region_document(rho: f64, rho_f: f64, d: Delay, kind: KindArg) -> Result<MgRegion, Error> {
    match kind {
        KindArg::Outer => outer_region(rho, rho_f, d),
        KindArg::InnerTheorem1 => inner_region(rho, rho_f, d, InnerKind::Theorem1),
        KindArg::InnerTimeshare => inner_region(rho, rho_f, d, InnerKind::TimeShare),
    }
}

/// One labelled curve of a figure document.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FigureCurve {
    pub label: String,
    pub region: MgRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FigureDocument {
    pub figure: u8,
    pub rho: f64,
    pub rho_f: f64,
    pub curves: Vec<FigureCurve>,
}

/// The five curves of reference figure 2, 3 or 4: the combined `D = inf`
/// region, then outer and time-sharing inner regions at `D = 10` and `D = 4`.
pub fn figure_document(which: u8) -> Result<FigureDocument, Error> {
    let (rho, rho_f) = match which {
        2 => (0.8, 0.6),
        3 => (0.8, 0.3),
        4 => (0.4, 0.3),
        other => {
            return Err(crate::error::invalid(
                "which",
                format!("unknown figure {other}; expected 2, 3 or 4"),
            ))
        }
    };
    let mut curves = vec![FigureCurve {
        label: "outer and inner, D=inf".into(),
        region: outer_region(rho, rho_f, Delay::Infinite)?,
    }];
    for d in [10, 4] {
        let delay = Delay::Finite(d);
        curves.push(FigureCurve {
            label: format!("outer, D={d}"),
            region: outer_region(rho, rho_f, delay)?,
        });
        curves.push(FigureCurve {
            label: format!("inner, D={d}"),
            region: inner_region(rho, rho_f, delay, InnerKind::TimeShare)?,
        });
    }
    Ok(FigureDocument {
        figure: which,
        rho,
        rho_f,
        curves,
    })
}

pub fn load_realization(source: &str) -> Result<ActivityRealization, Error> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return match name {
            "fig5" => Ok(fig5_realization()),
            other => Err(Error::MalformedRealization(format!(
                "unknown builtin realization `{other}`"
            ))),
        };
    }
    let text = fs::read_to_string(source)
        .map_err(|e| Error::MalformedRealization(format!("cannot read {source}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedRealization(format!("{source}: {e}")))
}

fn estimate_csv(e: &MgEstimate) -> String {
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
    format!(
        "scheme,K,n_trials,seed,s_f,s_s,stderr_f,stderr_s,target_s_f,target_s_s\n{},{},{},{},{},{},{},{},{},{}\n",
        u8::from(e.scheme),
        e.k,
        e.n_trials,
        e.seed,
        fmt_sig(e.point.s_f),
        fmt_sig(e.point.s_s),
        opt(e.stderr_f),
        opt(e.stderr_s),
        opt(e.target.map(|t| t.s_f)),
        opt(e.target.map(|t| t.s_s)),
    )
}

fn verify_csv(r: &VerifyReport) -> String {
    let mut out = String::from("name,status,error,tolerance\n");
    for c in &r.checks {
        let status = serde_json::to_value(c.status).expect("status serializes");
        out.push_str(&format!(
            "\"{}\",{},{},{}\n",
            c.name,
            status.as_str().unwrap_or_default(),
            c.error.map(fmt_sig).unwrap_or_default(),
            fmt_sig(c.tolerance)
        ));
    }
    out
}

/// Evaluates a parsed invocation into its output document.
pub fn execute(cli: &Cli) -> Result<Rendered, Error> {
    let format = cli.format;
    match &cli.command {
        Command::Region {
            rho,
            rho_f,
            d,
            kind,
        } => {
            let region = region_document(*rho, *rho_f, *d, *kind)?;
            Ok(ok(match format {
                Format::Json => to_json(&region),
                Format::Csv => labelled_csv([(region.kind.label(), &region)]),
            }))
        }
        Command::Simulate {
            rho,
            rho_f,
            d,
            k,
            trials,
            seed,
            scheme,
            pattern_condition,
        } => {
            let d = finite_only(*d, "simulate")?;
            let cfg = NetworkConfig::new(*k, *rho, *rho_f, d, *seed)?;
            let est = estimate_mg_with(&cfg, *scheme, *trials, (*pattern_condition).into())?;
            Ok(ok(match format {
                Format::Json => to_json(&est),
                Format::Csv => estimate_csv(&est),
            }))
        }
        Command::Verify {
            rho,
            rho_f,
            d,
            truncation,
            enum_k,
        } => {
            let report = run_verification(*rho, *rho_f, *d, *truncation, *enum_k)?;
            let text = match format {
                Format::Json => to_json(&report),
                Format::Csv => verify_csv(&report),
            };
            Ok(Rendered {
                text,
                exit_code: if report.passed {
                    EXIT_OK
                } else {
                    EXIT_VERIFY_FAILED
                },
            })
        }
        Command::Figure { which } => {
            let doc = figure_document(*which)?;
            Ok(ok(match format {
                Format::Json => to_json(&doc),
                Format::Csv => {
                    labelled_csv(doc.curves.iter().map(|c| (c.label.as_str(), &c.region)))
                }
            }))
        }
        Command::Schedule {
            realization,
            d,
            scheme,
            phase,
        } => {
            let d = finite_only(*d, "schedule")?;
            let r = load_realization(realization)?;
            let schedules = match (scheme, phase) {
                (Scheme::One, _) => {
                    let (p1, p2) = schedule_scheme1(&r, d)?;
                    match phase {
                        Some(PhaseId::One) => vec![p1],
                        Some(PhaseId::Two) => vec![p2],
                        None => vec![p1, p2],
                    }
                }
                (Scheme::Two, None) => vec![schedule_scheme2(&r, d)],
                (Scheme::Two, Some(_)) => {
                    return Err(crate::error::invalid(
                        "phase",
                        "scheme 2 has a single phase; drop --phase",
                    ))
                }
            };
            Ok(ok(match format {
                Format::Json if schedules.len() == 1 => to_json(&schedules[0]),
                Format::Json => to_json(&schedules),
                Format::Csv => {
                    let mut out = String::from("phase,k,state\n");
                    for s in &schedules {
                        let phase = s.phase.map(|p| p.value().to_string()).unwrap_or_default();
                        for (i, st) in s.states.iter().enumerate() {
                            let st = serde_json::to_value(st).expect("state serializes");
                            out.push_str(&format!(
                                "{phase},{},{}\n",
                                i + 1,
                                st.as_str().unwrap_or_default()
                            ));
                        }
                    }
                    out
                }
            }))
        }
    }
}

/// Parses `args`, runs the command and writes its document. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let rendered = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &rendered.text),
        None => std::io::stdout().write_all(rendered.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    rendered.exit_code
}
