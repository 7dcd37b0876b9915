mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{compare_baseline, to_canonical, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rootshell::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn is_usage(&self) -> bool {
        use rootshell::Error as E;
        match self {
            CliError::Usage(_) => true,
            CliError::Core(e) => matches!(
                e,
                E::Invalid(_) | E::InvalidType { .. } | E::NotDominant | E::NotFiniteType | E::Reducible | E::EnumerationCap { .. }
            ),
            _ => false,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "rootshell", version, about = "Root-system combinatorics and shell-intersection numerics")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Print the full JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Write tabular output as CSV ("-" for stdout).
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, env = "ROOTSHELL_THREADS")]
    threads: Option<usize>,
    /// Compare results against a stored report.
    #[arg(long, global = true, value_name = "FILE")]
    baseline: Option<PathBuf>,
    /// key=value defaults, overridden by flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Record the wall-clock time (reports are then no longer byte-stable).
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Root system data: counts, ρ, coweights, w0.
    Rootsys(SysArgs),
    #[command(subcommand)]
    Semidense(SemidenseCmd),
    #[command(subcommand)]
    Tables(TablesCmd),
    #[command(subcommand)]
    Exponent(ExponentCmd),
    #[command(subcommand)]
    Spherical(SphericalCmd),
    #[command(subcommand)]
    Mc(McCmd),
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    Split,
    Complex,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum E6Arg {
    InE8,
    TripleA2,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SysArgs {
    /// Cartan type letter A–G.
    #[arg(long = "type", value_parser = parse_type)]
    pub ty: char,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value = "split")]
    pub form: FormArg,
    #[arg(long, value_enum, default_value = "in-e8")]
    pub e6_model: E6Arg,
}

#[derive(Subcommand, Debug)]
pub enum SemidenseCmd {
    /// Test a standard Φ0 given by its simple nodes.
    Check {
        #[command(flatten)]
        sys: SysArgs,
        /// 1-based simple nodes generating Φ0.
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<usize>,
        #[arg(long, default_value_t = rootshell::DEFAULT_CAP)]
        cap: usize,
        /// Expected verdict; a mismatch fails the run.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Extremal Levis of classical types up to a rank, plus E7.
    Scan {
        #[arg(long, default_value_t = 7)]
        max_rank: usize,
        #[arg(long)]
        skip_e7: bool,
    },
    /// Exceptional non-existence certificates.
    Exceptional,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Holds,
    Fails,
}

#[derive(Subcommand, Debug)]
pub enum TablesCmd {
    /// Weyl group and root counts for the extremal Levi of each type.
    Weyl {
        /// Rank at which the classical rows are evaluated.
        #[arg(long, default_value_t = 5)]
        rank: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LeviArgs {
    #[command(flatten)]
    pub sys: SysArgs,
    /// 1-based simple nodes generating M; defaults to the Levi of `--node`.
    #[arg(long, value_delimiter = ',')]
    pub nodes: Option<Vec<usize>>,
    /// 1-based node of the coweight H0; defaults to the first extremal one.
    #[arg(long)]
    pub node: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum ExponentCmd {
    /// The log-exponent k.
    K(LeviArgs),
    /// Full (σ, i, w) table.
    Table(LeviArgs),
    /// Power-of-log bounds for the I-integrals and, in rank ≤ 2, the spectral integral.
    Verify {
        #[command(flatten)]
        levi: LeviArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e2, 1e3, 1e4])]
        t: Vec<f64>,
        /// Allowed (max − min)/min of the per-t maximum.
        #[arg(long, default_value_t = 0.25)]
        variation: f64,
        #[arg(long)]
        spectral: bool,
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 100.0, 1000.0])]
        spectral_t: Vec<f64>,
        /// H = frac·tH0 in the spectral integral.
        #[arg(long, default_value_t = 1.0)]
        h_frac: f64,
        #[arg(long, default_value_t = 3.0)]
        spread: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum GroupArg {
    Sl2r,
    Sl2c,
    Sl3,
}

#[derive(Subcommand, Debug)]
pub enum SphericalCmd {
    /// Evaluate φ_λ.
    Eval {
        #[arg(long, value_enum, default_value = "sl2r")]
        group: GroupArg,
        /// Spectral parameters such as 0.7 or 0.7+0.1i (three entries for sl3).
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
        lambda: Vec<num_complex::Complex64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
        t: Vec<f64>,
        /// Diagonal H for sl3.
        #[arg(long = "H", value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// |φ_λ(e^H)| against the majorant on a grid.
    VerifyBd {
        #[arg(long, value_enum, default_value = "sl2r")]
        group: GroupArg,
        #[arg(long, value_parser = parse_axis, default_value = "0,10,21")]
        lambda_grid: rootshell::harmonic::Axis,
        #[arg(long, value_parser = parse_axis, default_value = "-0.2,0.2,5", allow_hyphen_values = true)]
        im_grid: rootshell::harmonic::Axis,
        #[arg(long, value_parser = parse_axis, default_value = "0,20,41")]
        t_grid: rootshell::harmonic::Axis,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.2)]
        kappa: f64,
        #[arg(long, default_value_t = 10.0)]
        limit: f64,
    },
    /// Two-sided SL2(ℂ) bound.
    VerifyCx {
        #[arg(long, value_parser = parse_axis, default_value = "0,20,41")]
        lambda_grid: rootshell::harmonic::Axis,
        #[arg(long, value_parser = parse_axis, default_value = "0,20,41")]
        t_grid: rootshell::harmonic::Axis,
        #[arg(long, default_value_t = 0.1)]
        lower: f64,
        #[arg(long, default_value_t = 10.0)]
        upper: f64,
    },
    /// Time-averaged lower bound on a compact set of λ.
    Lowerbound {
        #[arg(long, value_parser = parse_axis, default_value = "1,3,21")]
        lambda_grid: rootshell::harmonic::Axis,
        #[arg(long, value_delimiter = ',', default_values_t = vec![20.0, 40.0])]
        tau: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        eps0: f64,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Residual of the Harish-Chandra main term in rank one.
    Gv {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0])]
        lambda: Vec<f64>,
        #[arg(long, value_parser = parse_axis, default_value = "5,30,26")]
        t_grid: rootshell::harmonic::Axis,
        #[arg(long, default_value_t = 0.55)]
        rate: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Along {
    /// H = frac·tH0.
    H0,
    /// H = frac·t(H0 − w0H0).
    Apex,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShellArgs {
    /// SL_n with n ∈ {2, 3}.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// 1-based node of the coweight H0.
    #[arg(long, default_value_t = 1)]
    pub node: usize,
    /// Explicit H0 (trace zero, non-increasing); overrides --node.
    #[arg(long = "H0", value_delimiter = ',', allow_hyphen_values = true)]
    pub h0: Option<Vec<f64>>,
    #[arg(long, default_value_t = rootshell::geometry::DEFAULT_EPS0)]
    pub eps0: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Subcommand, Debug)]
pub enum McCmd {
    /// vol(e^H S_t ∩ S_t)/vol(S_t); several t or H values give a sweep.
    Intersect {
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8.0])]
        t: Vec<f64>,
        /// Explicit H; overrides --h-frac.
        #[arg(long = "H", value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0])]
        h_frac: Vec<f64>,
        #[arg(long, value_enum, default_value = "h0")]
        along: Along,
        /// Allowed max/min of the bound quotient across t, per H.
        #[arg(long, default_value_t = 4.0)]
        spread: f64,
    },
    /// Triangle inequality for the Cartan projection on random triples.
    Triangle {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// κ(g⁻¹) = −w0κ(g) on random g.
    Inverse {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// The polytope integral over P_{2τ} grows linearly in τ.
    Brion {
        #[command(flatten)]
        sys: SysArgs,
        #[arg(long, default_value_t = 1)]
        node: usize,
        #[arg(long, default_value_t = 0.25)]
        theta: f64,
        #[arg(long, value_delimiter = ',', default_values_t = rootshell::geometry::DEFAULT_TAUS.to_vec())]
        tau: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        spread: f64,
    },
    /// Polynomial-loss upper bound on a grid of H.
    Anker {
        #[command(flatten)]
        shell: ShellArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![6.0, 8.0])]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0])]
        h_frac: Vec<f64>,
        #[arg(long, value_enum, default_value = "h0")]
        along: Along,
    },
}

fn parse_type(s: &str) -> Result<char, String> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) if rootshell::CartanType::from_char(c.to_ascii_uppercase()).is_some() => Ok(c.to_ascii_uppercase()),
        _ => Err(format!("expected a type letter A–G, got {s:?}")),
    }
}

pub fn parse_complex(s: &str) -> Result<num_complex::Complex64, String> {
    let s = s.trim();
    let bad = || format!("cannot parse {s:?} as a complex number (use 0.7 or 0.7+0.1i)");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| num_complex::Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not an exponent sign or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            let im_s = &body[k..];
            let im = match im_s {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_s.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(num_complex::Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(num_complex::Complex64::new(0.0, im))
        }
    }
}

pub fn parse_axis(s: &str) -> Result<rootshell::harmonic::Axis, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let err = || format!("expected min,max,count, got {s:?}");
    if parts.len() != 3 {
        return Err(err());
    }
    let min: f64 = parts[0].parse().map_err(|_| err())?;
    let max: f64 = parts[1].parse().map_err(|_| err())?;
    let count: usize = parts[2].parse().map_err(|_| err())?;
    if count == 0 || max < min || (count == 1 && max != min) {
        return Err(err());
    }
    Ok(rootshell::harmonic::Axis::new(min, max, count))
}

/// Merges `key=value` lines from `--config` under the explicit flags.
fn merged_args() -> Result<Vec<String>, CliError> {
    let mut args: Vec<String> = std::env::args().collect();
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or_else(|| CliError::Usage("--config needs a file".into()))?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{path}:{}: expected key=value", lineno + 1)))?;
        let flag = format!("--{}", k.trim());
        let present = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v.trim() {
            "true" => args.push(flag),
            "false" => {}
            v => args.push(format!("{flag}={v}")),
        }
    }
    Ok(args)
}

fn main() -> ExitCode {
    let args = match merged_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start a pool of {n} threads");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(pass) => ExitCode::from(if pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let out = commands::dispatch(&cli.cmd, cli.seed)?;
    let mut verdicts = out.verdicts;
    let mut results = out.results;
    if let Some(path) = &cli.baseline {
        let drift = compare_baseline(path, &results)?;
        verdicts.insert("baseline".into(), drift.is_empty());
        if let serde_json::Value::Object(map) = &mut results {
            map.insert("baseline_drift".into(), serde_json::to_value(&drift).unwrap_or_default());
        }
    }
    let pass = verdicts.values().all(|v| *v);
    let timestamp = cli
        .stamp
        .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let report = RunReport { command: out.command, parameters: out.parameters, seed: cli.seed, timestamp, results, verdicts, pass };
    if let Some(path) = &cli.csv {
        if let Some(table) = &out.table {
            write_csv(path, table)?;
        } else {
            return Err(CliError::Usage("this command has no tabular output".into()));
        }
    }
    if cli.json {
        let value = serde_json::to_value(&report).map_err(|e| CliError::Usage(e.to_string()))?;
        print!("{}", to_canonical(&value));
    } else {
        for line in &out.summary {
            println!("{line}");
        }
        for (k, v) in &report.verdicts {
            println!("{k}: {}", if *v { "pass" } else { "FAIL" });
        }
    }
    Ok(pass)
}

fn write_csv(path: &std::path::Path, table: &commands::Table) -> Result<(), CliError> {
    let sink: Box<dyn std::io::Write> = if path.as_os_str() == "-" {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::fs::File::create(path)?)
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&table.headers)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
