//! The `weightlab` command line.

pub mod config;
pub mod output;
pub mod scenarios;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::{sample, ClosedForm, GridFunction, Interval};
use crate::hardy::{outer_from_weight, szego_test, CircleGrid, CircleWeight, Offset};
use crate::majorant::{
    classify_local, coifman_rochberg, global_a1_test, rubio_de_francia_auto, GlobalA1Config, LocalConfig, LocalSource,
    RdfSpace,
};
use crate::maximal::{maximal_fast, maximal_naive, maximal_shifted_dyadic, op_norm_estimate};
use crate::weights::{ap_constant, reverse_holder_exponent, Weight};
use crate::WindowFamily;

use config::{CommonFlags, Format, Settings};
use scenarios::{run_scenario, ScenarioOutcome, SCENARIOS};

#[derive(Debug, Parser)]
#[command(name = "weightlab", version, about = "Numerical lab for Muckenhoupt weights")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    All,
    Dyadic,
}

impl From<FamilyArg> for WindowFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::All => WindowFamily::All,
            FamilyArg::Dyadic => WindowFamily::Dyadic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MaximalMethod {
    Fast,
    Naive,
    Dyadic,
    Shifted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MajorantMethod {
    Cr,
    Rdf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Domain {
    Local,
    Global,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// A_p constant of a weight.
    Apconst {
        /// Weight spec: example1 | const:C | abs:ALPHA[@X0] | indicator:A,B | file.csv | JSON closed form.
        #[arg(long)]
        weight: String,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        /// Domain `a,b` for closed forms.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
    },
    /// Maximal function of a grid function.
    Maximal {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum, default_value = "fast")]
        method: MaximalMethod,
        /// Number of iterations of M.
        #[arg(long, default_value_t = 1)]
        iterate: usize,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        /// Also estimate the weighted operator norm with this weight.
        #[arg(long)]
        norm_weight: Option<String>,
    },
    /// Reverse Hölder exponent of a weight.
    Rh {
        #[arg(long)]
        weight: String,
        #[arg(long, value_enum, default_value = "all")]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
    },
    /// A_1 majorant of a function.
    Majorant {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum, default_value = "cr")]
        method: MajorantMethod,
        /// Coifman–Rochberg exponent.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
    },
    /// Membership classification.
    Classify {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, value_enum, default_value = "local")]
        domain: Domain,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        p0: f64,
    },
    /// Outer functions and the Szegő test on the circle.
    Hardy {
        #[command(subcommand)]
        command: HardyCommand,
    },
    /// Run one named scenario.
    Repro {
        scenario: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Run every scenario.
    Suite {
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum HardyCommand {
    Outer {
        /// Circle weight: CSV of samples, `2-2cos`, `abs:A` or `const:C`.
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 2.0)]
        p0: f64,
        /// log2 of the number of samples for closed-form weights.
        #[arg(long, default_value_t = 12)]
        m: u32,
    },
    Szego {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 12)]
        m: u32,
    },
}

/// Parsed function argument.
pub enum FnSpec {
    Closed(ClosedForm),
    Grid(GridFunction),
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: `{s}`")))
}

pub fn parse_interval(s: &str) -> Result<Interval> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("interval must be `a,b`, got `{s}`")))?;
    Interval::new(parse_f64(a)?, parse_f64(b)?)
}

pub fn parse_fn_spec(spec: &str) -> Result<FnSpec> {
    let spec = spec.trim();
    if spec == "example1" {
        return Ok(FnSpec::Closed(ClosedForm::example1()));
    }
    if spec.starts_with('{') {
        let cf = serde_json::from_str(spec).map_err(|e| Error::Parse(format!("closed form: {e}")))?;
        return Ok(FnSpec::Closed(cf));
    }
    if spec.ends_with(".csv") {
        return Ok(FnSpec::Grid(GridFunction::read_csv(Path::new(spec))?));
    }
    if let Some(c) = spec.strip_prefix("const:") {
        return Ok(FnSpec::Closed(ClosedForm::constant(parse_f64(c)?)));
    }
    if let Some(rest) = spec.strip_prefix("abs:") {
        let (alpha, x0) = match rest.split_once('@') {
            Some((a, x)) => (parse_f64(a)?, parse_f64(x)?),
            None => (parse_f64(rest)?, 0.0),
        };
        return Ok(FnSpec::Closed(ClosedForm::abs_power(x0, alpha)));
    }
    if let Some(rest) = spec.strip_prefix("indicator:") {
        return Ok(FnSpec::Closed(ClosedForm::constant(1.0).restrict(parse_interval(rest)?)));
    }
    Err(Error::Parse(format!("unrecognised function spec `{spec}`")))
}

/// Default domain: `[0, 1]` for example1, `[-R, R]` otherwise.
fn domain_for(spec: &str, interval: Option<&str>, s: &Settings) -> Result<Interval> {
    match interval {
        Some(i) => parse_interval(i),
        None if spec.trim() == "example1" => Interval::new(0.0, 1.0),
        None => Interval::symmetric(s.radius),
    }
}

fn grid_arg(spec: &str, interval: Option<&str>, s: &Settings) -> Result<GridFunction> {
    match parse_fn_spec(spec)? {
        FnSpec::Grid(g) => Ok(g),
        FnSpec::Closed(cf) => sample(&cf, domain_for(spec, interval, s)?, s.depth),
    }
}

fn weight_arg(spec: &str, interval: Option<&str>, s: &Settings) -> Result<Weight> {
    Weight::new(grid_arg(spec, interval, s)?)
}

fn circle_weight_arg(spec: &str, m: u32) -> Result<CircleGrid<f64>> {
    let spec = spec.trim();
    if spec.ends_with(".csv") {
        return CircleGrid::<num_complex::Complex64>::read_csv(Path::new(spec))?.to_real();
    }
    let w = if spec == "2-2cos" {
        CircleWeight::TwoMinusTwoCos
    } else if let Some(a) = spec.strip_prefix("abs:") {
        CircleWeight::AbsOneMinusZ { a: parse_f64(a)? }
    } else if let Some(c) = spec.strip_prefix("const:") {
        CircleWeight::Constant { c: parse_f64(c)? }
    } else if spec.starts_with('{') {
        serde_json::from_str(spec).map_err(|e| Error::Parse(format!("circle weight: {e}")))?
    } else {
        return Err(Error::Parse(format!("unrecognised circle weight `{spec}`")));
    };
    w.sample(m, Offset::Midpoint)
}

fn emit_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn emit_grid(g: &GridFunction, s: &Settings) -> Result<()> {
    match s.format {
        Format::Csv => print!("{}", g.to_csv()),
        Format::Json => emit_json(
            &json!({"domain": [g.domain().left, g.domain().right], "depth": g.depth(), "values": g.values()}),
        )?,
    }
    Ok(())
}

/// Writes `report.json`, CSV tables and (optionally) SVG plots for one
/// scenario under `<out>/<name>/`.
pub fn write_outcome(o: &ScenarioOutcome, out: &Path, plots: bool) -> Result<PathBuf> {
    let dir = out.join(&o.name);
    std::fs::create_dir_all(&dir)?;
    let mut text = serde_json::to_string_pretty(&o.report())?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text)?;
    for (file, table) in &o.tables {
        std::fs::write(dir.join(file), table.to_csv())?;
    }
    if plots {
        for p in &o.plots {
            std::fs::write(dir.join(&p.file), p.to_svg())?;
        }
    }
    Ok(dir)
}

fn summarize(o: &ScenarioOutcome) -> String {
    if o.passed() {
        format!("PASS {} ({} checks)", o.name, o.checks.len())
    } else {
        format!("FAIL {}: {}", o.name, o.failed_ids().join(", "))
    }
}

fn run_suite(s: &Settings) -> Result<bool> {
    let work = || -> Vec<(String, Result<ScenarioOutcome>)> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            SCENARIOS.par_iter().map(|n| (n.to_string(), run_scenario(n, s))).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            SCENARIOS.iter().map(|n| (n.to_string(), run_scenario(n, s))).collect()
        }
    };
    #[cfg(feature = "parallel")]
    let results = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(s.jobs)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(work)
    };
    #[cfg(not(feature = "parallel"))]
    let results = work();

    let mut all = true;
    for (name, res) in results {
        match res {
            Ok(o) => {
                write_outcome(&o, &s.out, s.plots)?;
                println!("{}", summarize(&o));
                all &= o.passed();
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                all = false;
            }
        }
    }
    Ok(all)
}

fn execute(cli: Cli) -> Result<bool> {
    let s = Settings::resolve(&cli.common)?;
    match cli.command {
        Command::Apconst { weight, family, interval } => {
            let w = weight_arg(&weight, interval.as_deref(), &s)?;
            emit_json(&ap_constant(&w, s.p, family.into())?)?;
        }
        Command::Maximal { function, method, iterate, interval, norm_weight } => {
            let mut g = grid_arg(&function, interval.as_deref(), &s)?;
            for _ in 0..iterate.max(1) {
                g = match method {
                    MaximalMethod::Fast => maximal_fast(&g),
                    MaximalMethod::Naive => maximal_naive(&g, WindowFamily::All),
                    MaximalMethod::Dyadic => maximal_naive(&g, WindowFamily::Dyadic),
                    MaximalMethod::Shifted => maximal_shifted_dyadic(&g),
                };
            }
            emit_grid(&g, &s)?;
            if let Some(wspec) = norm_weight {
                let w = grid_arg(&wspec, interval.as_deref(), &s)?;
                emit_json(&op_norm_estimate(&w, s.p, s.trials, s.seed)?)?;
            }
        }
        Command::Rh { weight, family, interval } => {
            let w = weight_arg(&weight, interval.as_deref(), &s)?;
            emit_json(&reverse_holder_exponent(&w, family.into())?)?;
        }
        Command::Majorant { function, method, delta, interval } => {
            let f = grid_arg(&function, interval.as_deref(), &s)?;
            let summary = match method {
                MajorantMethod::Cr => coifman_rochberg(&f, delta)?.summary(),
                MajorantMethod::Rdf => {
                    let w = Weight::constant(f.domain(), f.depth(), 1.0)?;
                    let out = rubio_de_francia_auto(&f, &RdfSpace::Weighted { p: s.p, w }, 2.0, 8, 1e-6)?;
                    emit_json(&out.contracts)?;
                    out.certificate.summary()
                }
            };
            emit_json(&summary)?;
        }
        Command::Classify { function, domain, interval, p0 } => match domain {
            Domain::Local => {
                let q = domain_for(&function, interval.as_deref(), &s)?;
                let reports = match parse_fn_spec(&function)? {
                    FnSpec::Closed(cf) => classify_local(LocalSource::ClosedForm(&cf), q, p0, &LocalConfig::default())?,
                    FnSpec::Grid(g) => classify_local(LocalSource::Grid(&g), g.domain(), p0, &LocalConfig::default())?,
                };
                emit_json(&reports)?;
            }
            Domain::Global => match parse_fn_spec(&function)? {
                FnSpec::Closed(cf) => emit_json(&global_a1_test(&cf, &GlobalA1Config::default())?)?,
                FnSpec::Grid(_) => return Err(Error::InvalidInput("global classification needs a closed form".into())),
            },
        },
        Command::Hardy { command } => match command {
            HardyCommand::Outer { weight, p0, m } => {
                let w = circle_weight_arg(&weight, m)?;
                let h = outer_from_weight(&w, p0)?;
                std::fs::create_dir_all(s.out.join("hardy"))?;
                let path = s.out.join("hardy").join("outer.csv");
                h.boundary.write_csv(&path)?;
                emit_json(&json!({
                    "p0": p0,
                    "samples": w.n(),
                    "origin_value": [h.origin_value.re, h.origin_value.im],
                    "tail_energy": h.tail_energy,
                    "resolved": h.resolved,
                    "boundary_csv": path,
                }))?;
            }
            HardyCommand::Szego { weight, m } => {
                emit_json(&szego_test(&circle_weight_arg(&weight, m)?)?)?;
            }
        },
        Command::Repro { scenario, list } => {
            if list || scenario.is_none() {
                for n in SCENARIOS {
                    println!("{n}");
                }
                return Ok(true);
            }
            let name = scenario.unwrap_or_default();
            let o = run_scenario(&name, &s)?;
            let dir = write_outcome(&o, &s.out, s.plots)?;
            println!("{}", summarize(&o));
            for c in o.checks.iter().filter(|c| !c.passed) {
                eprintln!("  {}: {}", c.id, c.detail);
            }
            println!("wrote {}", dir.display());
            return Ok(o.passed());
        }
        Command::Suite { list } => {
            if list {
                for n in SCENARIOS {
                    println!("{n}");
                }
                return Ok(true);
            }
            return run_suite(&s);
        }
    }
    Ok(true)
}

/// Runs the CLI and returns the process exit code: 0 when every check
/// passes, 1 when a check fails or a computation errors, 2 on usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownScenario(_) | Error::InvalidInput(_) | Error::Parse(_) => 2,
                _ => 1,
            }
        }
    }
}
