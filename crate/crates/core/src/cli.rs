//! Command-line front end.
//!
//! Exit codes: 0 success or optimal, 1 usage or input error, 2 valid result
//! without optimality, 3 resource failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::SmusLimits;
use crate::dimacs::{parse_dimacs, parse_dimacs_clauses, write_dimacs};
use crate::generators::{generate, generate_mus_variant, InstanceSpec};
use crate::lrat::measure;
use crate::proof::{verify_proof, Proof, Verdict};
use crate::search::{minimize_with_progress, root_bound, SearchConfig, SearchError, Seeding};

/// Environment variable holding the search memory cap in MiB.
pub const MEMORY_CAP_VAR: &str = "RESMIN_MEMORY_CAP_MB";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FEASIBLE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "resmin", version, about = "Short and shortest resolution proofs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Optimal,
    Short,
    Competition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Php,
    Parity,
    Ordering,
    Random3cnf,
    SubsetCardinality,
    Coloring,
    ColoringClique,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for a short or shortest resolution proof.
    Minimize {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value = "optimal")]
        mode: ModeArg,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// A number, or `dynamic` for time-seeded completions.
        #[arg(long, default_value = "0", value_parser = parse_seed)]
        seed: Seeding,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
        #[arg(long)]
        queue_limit: Option<usize>,
        #[arg(long)]
        branch_width: Option<usize>,
        /// The input is minimally unsatisfiable.
        #[arg(long)]
        mus: bool,
        /// Suppress progress lines on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Check a proof against a formula.
    Verify { cnf: PathBuf, proof: PathBuf },
    /// Resolution length of an LRAT certificate.
    Measure {
        cnf: PathBuf,
        lrat: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Lower bound on the proof length of a formula.
    Bound {
        cnf: PathBuf,
        #[arg(long)]
        mus: bool,
        /// Seconds per smallest-unsatisfiable-subset computation.
        #[arg(long, default_value_t = 1.0)]
        smus_budget: f64,
    },
    /// Write a benchmark formula in DIMACS.
    Generate {
        #[arg(value_enum)]
        family: Family,
        /// `key=value` pairs, such as `holes=3` or `vars=10,clauses=40`.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Reduce the formula to a minimal unsatisfiable subset.
        #[arg(long)]
        mus: bool,
    },
}

fn parse_seed(s: &str) -> Result<Seeding, String> {
    if s == "dynamic" {
        return Ok(Seeding::Dynamic);
    }
    s.parse().map(Seeding::Static).map_err(|_| format!("`{s}` is neither a number nor `dynamic`"))
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid duration {s}"))
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_formula(path: &Path) -> anyhow::Result<crate::cnf::Formula> {
    parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn memory_cap_from_env() -> Option<usize> {
    std::env::var(MEMORY_CAP_VAR).ok()?.trim().parse::<usize>().ok().map(|mb| mb << 20)
}

fn spec_from(family: Family, params: &[String], seed: u64) -> anyhow::Result<InstanceSpec> {
    let mut kv = std::collections::HashMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("parameter `{p}` is not key=value"))?;
        let v: u64 = v.parse().with_context(|| format!("parameter `{k}` is not a number"))?;
        kv.insert(k.to_string(), v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| anyhow!("missing parameter `{k}`"));
    let small = |k: &str| -> anyhow::Result<u32> { u32::try_from(get(k)?).context("parameter too large") };
    Ok(match family {
        Family::Php => InstanceSpec::Php { holes: small("holes")? },
        Family::Parity => InstanceSpec::Parity { n: small("n")? },
        Family::Ordering => InstanceSpec::Ordering { n: small("n")? },
        Family::Random3cnf => InstanceSpec::Random3Cnf { vars: small("vars")?, clauses: get("clauses")? as usize, seed },
        Family::SubsetCardinality => InstanceSpec::SubsetCardinality { n: small("n")?, seed },
        Family::Coloring => InstanceSpec::GraphColoring { colors: small("colors")?, vertices: small("vertices")?, seed },
        Family::ColoringClique => {
            InstanceSpec::GraphColoringClique { colors: small("colors")?, vertices: small("vertices")?, seed }
        }
    })
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Minimize { cnf, mode, time_limit, seed, emit_proof, queue_limit, branch_width, mus, quiet } => {
            let formula = read_formula(&cnf)?;
            let mut cfg = match mode {
                ModeArg::Optimal => SearchConfig::optimal(),
                ModeArg::Short => SearchConfig::short(),
                ModeArg::Competition => SearchConfig::competition(),
            };
            cfg.seeding = seed;
            cfg.mus = mus;
            cfg.time_limit = time_limit.map(seconds).transpose()?;
            cfg.queue_limit = queue_limit.or(cfg.queue_limit);
            cfg.branch_width = branch_width.or(cfg.branch_width);
            cfg.memory_cap_bytes = memory_cap_from_env();
            let result = minimize_with_progress(&formula, &cfg, &mut |p| {
                if !quiet {
                    let _ = writeln!(err, "{p}");
                }
            });
            let outcome = match result {
                Ok(o) => o,
                Err(SearchError::Satisfiable) => bail!("formula is satisfiable"),
                Err(e @ SearchError::NoProof) => {
                    writeln!(err, "error: {e}")?;
                    return Ok(EXIT_RESOURCE);
                }
            };
            if let Some(path) = emit_proof {
                std::fs::write(&path, outcome.incumbent.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let status = if outcome.optimal { "OPTIMAL" } else { "FEASIBLE" };
            writeln!(
                out,
                "status={status} length={} bound={} nodes={}",
                outcome.incumbent_length, outcome.best_lower_bound, outcome.stats.nodes_expanded
            )?;
            Ok(if outcome.optimal {
                EXIT_OK
            } else if outcome.memory_limited {
                EXIT_RESOURCE
            } else {
                EXIT_FEASIBLE
            })
        }
        Command::Verify { cnf, proof } => {
            let formula = read_formula(&cnf)?;
            let text = String::from_utf8(read(&proof)?).context("proof is not UTF-8")?;
            let proof = Proof::parse_text(&text).with_context(|| format!("parsing {}", proof.display()))?;
            match verify_proof(&formula, &proof) {
                Verdict::Valid => {
                    writeln!(out, "VALID length={}", proof.len())?;
                    Ok(EXIT_OK)
                }
                Verdict::Invalid { step, reason } => {
                    writeln!(out, "INVALID step={step} reason={reason}")?;
                    Ok(EXIT_INPUT)
                }
            }
        }
        Command::Measure { cnf, lrat, json } => {
            let cnf = parse_dimacs_clauses(&read(&cnf)?).context("parsing formula")?;
            let report = measure(&cnf, &read(&lrat)?)?;
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                writeln!(out, "{}", report.to_key_value())?;
            }
            Ok(EXIT_OK)
        }
        Command::Bound { cnf, mus, smus_budget } => {
            let formula = read_formula(&cnf)?;
            let limits = SmusLimits { time: seconds(smus_budget)?, ..SmusLimits::default() };
            let b = root_bound(&formula, mus, limits).map_err(|e| anyhow!("{e}"))?;
            writeln!(out, "bound={} exact={} provenance={:?}", b.value, b.exact, b.provenance)?;
            Ok(EXIT_OK)
        }
        Command::Generate { family, params, seed, output, mus } => {
            let spec = spec_from(family, &params, seed)?;
            let mut formula = generate(&spec)?;
            let mut echo = spec.to_string();
            if !echo.contains("seed=") {
                echo.push_str(&format!(" seed={seed}"));
            }
            let mut comments = vec![echo];
            if mus {
                let variant = generate_mus_variant(&formula, 1_000_000)?;
                formula = variant.formula;
                comments.push(format!("mus exact={}", variant.exact));
            }
            let text = write_dimacs(&formula, &comments);
            match output {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}
