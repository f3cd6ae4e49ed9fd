//! The `grassdesign` command line.
//!
//! Exit codes: 0 on success, 1 when a configuration fails certification
//! (|gap| > tol), 2 on malformed input or any other error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::{table1_fixtures, Family};
use crate::io::{config_to_json, parse_configuration, report_to_json, to_json_string};
use crate::kernels::intertwining;
use crate::optimizer::{search_design, Method, OptimizerSettings};
use crate::partitions::{enumerate, Partition};
use crate::potential::{certify, CertificationReport, Configuration, DEFAULT_TOL};
use crate::repdim::{dim_irrep, dim_pol_union, max_rank_index, multiplicity, rank_set};
use crate::zonal::{format_rational, parse_rational, ExactMeasure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNCERTIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "grassdesign", version, about = "Designs and cubatures on unions of Grassmannians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of the space of polynomials of degree ≤ t on the union of G_{k,d}, k ∈ ranks.
    Dim {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long)]
        t: usize,
        /// Also list every irreducible component with its multiplicity.
        #[arg(long)]
        table: bool,
    },
    /// Exact lower bound of the fusion frame potential for a measure.
    Bound {
        #[arg(long)]
        d: usize,
        /// Masses as rank:value pairs, e.g. 1:1,2:5/3.
        #[arg(long, value_delimiter = ',', required = true)]
        masses: Vec<String>,
        #[arg(long)]
        t: usize,
    },
    /// Certify a configuration read from a file or stdin.
    Verify {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Configuration file; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for a design by minimizing the fusion frame potential.
    Optimize {
        #[arg(long)]
        d: usize,
        /// Points per rank as rank:count pairs, e.g. 1:6,2:4.
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<String>,
        /// Mass per rank as rank:value pairs, e.g. 1:1,2:3/2.
        #[arg(long, value_delimiter = ',', required = true)]
        masses: Vec<String>,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        grad_tol: f64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Gradient)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build one of the explicit families and certify it.
    Family {
        #[arg(long, value_enum)]
        name: FamilyName,
        /// Ambient dimension (lines-hyperplane only).
        #[arg(long)]
        d: Option<usize>,
        /// Hyperplane mass (lines-hyperplane).
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        m1: Option<String>,
        #[arg(long)]
        m2: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rebuild and certify every optimal configuration of the summary table.
    Table1 {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Evaluate the intertwining functions p_π^{k,ℓ} between all points of a configuration.
    KernelEval {
        /// One of (0), (1), (2), (1,1).
        #[arg(long)]
        pi: String,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Gradient,
    Cg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    LinesHyperplane,
    R4_1design,
    R3_2design,
    R4_2design,
    R5_2design,
}

/// Streams used by [`run_with`]; swapped for buffers in tests.
pub struct Streams<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs the command line with the process streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (stdin, stdout, stderr) = (io::stdin(), io::stdout(), io::stderr());
    let mut streams = Streams {
        stdin: &mut stdin.lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut stderr.lock(),
    };
    run_with(argv, &mut streams)
}

pub fn run_with<I, T>(argv: I, streams: &mut Streams<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(streams.stderr, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(streams.stdout, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, streams) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(streams.stderr, "error: {e}");
            if let Error::Numerical { dump, .. } = &e {
                let _ = writeln!(streams.stderr, "last iterate:\n{dump}");
            }
            EXIT_INPUT
        }
    }
}

fn io_error(e: io::Error) -> Error {
    Error::Input(e.to_string())
}

fn read_input(path: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(io_error)?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => writeln!(stdout, "{text}").map_err(io_error),
    }
}

fn parse_pairs(items: &[String]) -> Result<BTreeMap<usize, String>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("expected rank:value, got {item:?}")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad rank in {item:?}")))?;
        if out.insert(k, v.trim().to_string()).is_some() {
            return Err(Error::Input(format!("rank {k} given twice")));
        }
    }
    Ok(out)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn number(flag: &str, value: &Option<String>) -> Result<f64> {
    let s = value
        .as_ref()
        .ok_or_else(|| Error::Input(format!("--{flag} is required for this family")))?;
    Ok(to_f64(&parse_rational(s)?))
}

fn exit_for(report: &CertificationReport) -> i32 {
    if report.is_cubature() {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    }
}

fn config_document(config: &Configuration, meta: Map<String, Value>) -> String {
    to_json_string(&config_to_json(config, Some(meta)))
}

fn dispatch(command: Command, s: &mut Streams<'_>) -> Result<i32> {
    match command {
        Command::Dim { d, ranks, t, table } => {
            let set: Vec<usize> = rank_set(d, &ranks)?.into_iter().collect();
            let total = dim_pol_union(d, &set, t)?;
            writeln!(s.stdout, "{total}").map_err(io_error)?;
            if table {
                writeln!(s.stdout, "pi\tdim\tmultiplicity").map_err(io_error)?;
                for pi in enumerate(t, max_rank_index(d, &set)) {
                    let mult = multiplicity(d, &set, &pi, t);
                    if mult > 0 {
                        let dim = dim_irrep(d, &pi.doubled())?;
                        writeln!(s.stdout, "{}\t{dim}\t{mult}", pi.doubled()).map_err(io_error)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Bound { d, masses, t } => {
            let masses = parse_pairs(&masses)?
                .into_iter()
                .map(|(k, v)| parse_rational(&v).map(|q| (k, q)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            let exact = ExactMeasure::new(d, masses)?.lower_bound(t)?;
            writeln!(s.stdout, "{} ≈ {}", format_rational(&exact), to_f64(&exact)).map_err(io_error)?;
            Ok(EXIT_OK)
        }
        Command::Verify { t, tol, input, output } => {
            let loaded = parse_configuration(&read_input(&input, s.stdin)?)?;
            let report = certify(&loaded.config, t, tol)?;
            write_output(&output, &to_json_string(&report_to_json(&report)), s.stdout)?;
            Ok(exit_for(&report))
        }
        Command::Optimize {
            d,
            counts,
            masses,
            t,
            seed,
            max_iter,
            grad_tol,
            restarts,
            method,
            tol,
            output,
        } => {
            let counts = parse_pairs(&counts)?
                .into_iter()
                .map(|(k, v)| {
                    v.parse::<usize>()
                        .map(|n| (k, n))
                        .map_err(|_| Error::Input(format!("bad count {v:?} for rank {k}")))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            let masses = parse_pairs(&masses)?
                .into_iter()
                .map(|(k, v)| parse_rational(&v).map(|q| (k, to_f64(&q))))
                .collect::<Result<BTreeMap<_, _>>>()?;
            let settings = OptimizerSettings {
                max_iter,
                grad_tol,
                seed,
                restarts,
                method: match method {
                    MethodArg::Gradient => Method::Gradient,
                    MethodArg::Cg => Method::ConjugateGradient,
                },
                ..Default::default()
            };
            let search = search_design(d, &counts, &masses, t, &settings, tol)?;
            let best = search.best_run();
            let runs: Vec<Value> = search
                .runs
                .iter()
                .map(|r| {
                    json!({
                        "seed": r.seed,
                        "iterations": r.result.iterations,
                        "stop": r.result.stop,
                        "ffp": r.result.final_value(),
                        "gap": r.report.gap,
                    })
                })
                .collect();
            let mut meta = Map::new();
            meta.insert("settings".into(), serde_json::to_value(&settings).expect("settings serialize"));
            meta.insert("restarts".into(), Value::Array(runs));
            meta.insert("best_seed".into(), json!(best.seed));
            meta.insert("report".into(), report_to_json(&best.report));
            write_output(&output, &config_document(&best.result.config, meta), s.stdout)?;
            Ok(exit_for(&best.report))
        }
        Command::Family {
            name,
            d,
            m,
            m1,
            m2,
            tol,
            output,
        } => {
            let family = match name {
                FamilyName::LinesHyperplane => Family::LinesHyperplane {
                    d: d.ok_or_else(|| Error::Input("--d is required for lines-hyperplane".into()))?,
                    m: number("m", &m)?,
                },
                FamilyName::R4_1design => Family::R4OneDesign { m1: number("m1", &m1)? },
                FamilyName::R3_2design => Family::R3TwoDesign { m2: number("m2", &m2)? },
                FamilyName::R4_2design => Family::R4TwoDesign { m2: number("m2", &m2)? },
                FamilyName::R5_2design => Family::R5TwoDesign,
            };
            let (config, measure) = family.build()?;
            let report = certify(&config, family.strength(), tol)?;
            let mut meta = Map::new();
            meta.insert("family".into(), json!(family.name()));
            meta.insert("strength".into(), json!(family.strength()));
            meta.insert("measure".into(), json!(measure.masses));
            meta.insert("report".into(), report_to_json(&report));
            write_output(&output, &config_document(&config, meta), s.stdout)?;
            Ok(exit_for(&report))
        }
        Command::Table1 { tol } => {
            let mut code = EXIT_OK;
            writeln!(s.stdout, "t\td\tn1\tn2\tm1\tm2\tlines\tplanes\tgap\tverdict").map_err(io_error)?;
            for row in table1_fixtures() {
                let (config, _) = row.build()?;
                let report = certify(&config, row.t, tol)?;
                let counts = config.rank_counts();
                let ok = report.is_cubature()
                    && counts.get(&1) == Some(&row.n1)
                    && counts.get(&2) == Some(&row.n2);
                if !ok {
                    code = EXIT_UNCERTIFIED;
                }
                let frac = |(p, q): (i64, i64)| if q == 1 { p.to_string() } else { format!("{p}/{q}") };
                writeln!(
                    s.stdout,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3e}\t{}",
                    row.t,
                    row.d,
                    row.n1,
                    row.n2,
                    frac(row.m1),
                    frac(row.m2),
                    counts.get(&1).copied().unwrap_or(0),
                    counts.get(&2).copied().unwrap_or(0),
                    report.gap,
                    report.verdict
                )
                .map_err(io_error)?;
            }
            Ok(code)
        }
        Command::KernelEval { pi, input, output } => {
            let pi: Partition = pi.parse().map_err(Error::Input)?;
            let loaded = parse_configuration(&read_input(&input, s.stdin)?)?;
            let pts = loaded.config.points();
            let values = pts
                .iter()
                .map(|p| {
                    pts.iter()
                        .map(|q| intertwining(&pi, p.rank(), q.rank(), p, q))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let doc = json!({ "pi": pi.to_string(), "values": values });
            write_output(&output, &to_json_string(&doc), s.stdout)?;
            Ok(EXIT_OK)
        }
    }
}
