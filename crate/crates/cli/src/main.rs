//! `fxbell` command-line front end.
//!
//! Exit codes: 0 on success (violations are results, not failures), 2 for
//! usage errors and invalid argument values, 3 when the input data cannot be
//! read or has the wrong shape.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fxbell::correlation::all_correlations;
use fxbell::fine::{check_three3, construct_trivariate, feasibility_oracle, k123_interval, point, K123Choice, MomentSet};
use fxbell::inequality::{singlet_demo, SettingVector};
use fxbell::ingest::{SegmentedDataFile, SignMatrixFile, ZeroPolicy};
use fxbell::report::{gamma_report, load_dataset, run_pooled, run_scan, AnalysisConfig, Dataset, TOOL_NAME, TOOL_VERSION};
use fxbell::synth::{gen_biased, gen_random, run_experiment, SyntheticConfig};
use fxbell::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fxbell", version, about = "Boole-Bell inequality analysis of exchange-rate sign data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and digitize a rate file; print its fingerprint and segment correlations.
    Ingest {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Also write the ±1 sign matrix as JSON.
        #[arg(long, value_name = "PATH")]
        signs: Option<PathBuf>,
        /// Also write the segmented data as JSON.
        #[arg(long, value_name = "PATH")]
        segmented: Option<PathBuf>,
    },
    /// Scan all currency triples for inequality violations.
    Scan {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Compute Γ for every test, not only for violations.
        #[arg(long)]
        with_gamma: bool,
        /// List only violations with lhs at or above this value.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Maximum triple fraction Γ for one currency triple.
    Gamma {
        #[command(flatten)]
        data: DataArgs,
        /// Three currency codes, e.g. EUR,CHF,DKK.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        triple: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Same scan with correlations over the unsplit rows.
    Pooled {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Synthetic two-column experiments.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Check lower-order moments and build a trivariate from them.
    Fine {
        /// k1,k2,k3,k12,k13,k23
        #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
        moments: Vec<f64>,
        /// lower, upper, mid or a number.
        #[arg(long, default_value = "mid", allow_hyphen_values = true)]
        k123: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        kind: DemoKind,
    },
}

#[derive(Subcommand)]
enum SynthKind {
    /// Independent uniform signs.
    Random {
        #[command(flatten)]
        synth: SynthArgs,
    },
    /// Biased signs; segment s has expected correlation −c_s.
    Singlet {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2, allow_negative_numbers = true)]
        c1: f64,
        #[arg(long, default_value_t = -std::f64::consts::FRAC_1_SQRT_2, allow_negative_numbers = true)]
        c2: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c3: f64,
    },
}

#[derive(Subcommand)]
enum DemoKind {
    /// Singlet correlations for settings a, b, c.
    Bell {
        #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
        a: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
        b: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
        c: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Exchange-rate CSV.
    #[arg(long, value_name = "CSV")]
    input: PathBuf,
    #[arg(long, default_value = "plus", value_parser = parse_policy)]
    zero_sign: ZeroPolicy,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u16).range(1..))]
    segments: u16,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the generated segmented data as JSON.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_policy(s: &str) -> Result<ZeroPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{TOOL_NAME}: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("{TOOL_NAME}: {e}");
            match e {
                Error::Domain(_) => ExitCode::from(2),
                e if e.is_data_error() => ExitCode::from(3),
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Ingest {
            data,
            out,
            signs,
            segmented,
        } => {
            let ds = load(&data)?;
            if let Some(path) = signs {
                write_json(&path, &serde_json::to_value(SignMatrixFile::from(&ds.signs))?)?;
            }
            if let Some(path) = segmented {
                write_json(&path, &serde_json::to_value(SegmentedDataFile::from(&ds.data))?)?;
            }
            let corrs = all_correlations(&ds.data)?;
            match out.format.unwrap_or(Format::Json) {
                Format::Csv => emit(&out, &corrs.to_csv()?),
                Format::Json => emit_json(
                    &out,
                    &json!({
                        "tool": TOOL_NAME,
                        "version": TOOL_VERSION,
                        "config": config(&data),
                        "dataset": ds.fingerprint,
                        "correlations": corrs.records,
                    }),
                ),
                Format::Text => Err(unsupported("ingest", Format::Text)),
            }
        }
        Command::Scan {
            data,
            out,
            with_gamma,
            threshold,
        } => {
            if !threshold.is_finite() {
                return Err(Failure::Usage(format!("threshold {threshold} is not finite")));
            }
            let ds = load(&data)?;
            let cfg = AnalysisConfig {
                with_gamma,
                threshold,
                ..config(&data)
            };
            let report = run_scan(&ds, &cfg)?;
            match out.format.unwrap_or(Format::Json) {
                Format::Csv => emit(&out, &report.violations_csv()?),
                Format::Json => emit_json(&out, &serde_json::to_value(&report)?),
                Format::Text => Err(unsupported("scan", Format::Text)),
            }
        }
        Command::Gamma { data, triple, out } => {
            let codes: [&str; 3] = match triple.as_slice() {
                [a, b, c] => [a.trim(), b.trim(), c.trim()],
                _ => return Err(Failure::Usage("--triple takes exactly three currency codes".into())),
            };
            let ds = load(&data)?;
            let r = gamma_report(&ds.data, codes)?;
            match out.format.unwrap_or(Format::Text) {
                Format::Json => emit_json(&out, &serde_json::to_value(&r)?),
                Format::Text => {
                    let mut s = format!("triple      {} {} {}\n", codes[0], codes[1], codes[2]);
                    s += &format!("n           {}\n", r.counts.n());
                    for (k, row) in r.counts.counts.iter().enumerate() {
                        s += &format!("counts s{}   ++ {} +- {} -+ {} -- {}\n", k + 1, row[0], row[1], row[2], row[3]);
                    }
                    s += &format!(
                        "C1 C2 C3    {:.6} {:.6} {:.6}\n",
                        r.correlations[0], r.correlations[1], r.correlations[2]
                    );
                    s += &format!("lhs         plus {:.6} minus {:.6}\n", r.lhs_plus, r.lhs_minus);
                    s += &format!("gamma       {:.6}\n", r.gamma);
                    s += &format!("2(1-gamma)  {:.6}\n", r.two_one_minus_gamma);
                    s += &format!("slack       plus {:.6} minus {:.6}\n", r.slack_plus, r.slack_minus);
                    s += &format!("integral    {}\n", r.integral);
                    emit(&out, &s)
                }
                Format::Csv => Err(unsupported("gamma", Format::Csv)),
            }
        }
        Command::Pooled { data, out } => {
            let ds = load(&data)?;
            let report = run_pooled(&ds, &config(&data))?;
            match out.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(&out, &serde_json::to_value(&report)?),
                f => Err(unsupported("pooled", f)),
            }
        }
        Command::Synth { kind } => {
            let (synth, cfg, data) = match kind {
                SynthKind::Random { synth } => {
                    let cfg = SyntheticConfig::new(synth.n, synth.seed, [0.0; 3])?;
                    let data = gen_random(synth.n, synth.seed)?;
                    (synth, cfg, data)
                }
                SynthKind::Singlet { synth, c1, c2, c3 } => {
                    let cfg = SyntheticConfig::new(synth.n, synth.seed, [c1, c2, c3])?;
                    let data = gen_biased(&cfg)?;
                    (synth, cfg, data)
                }
            };
            if let Some(path) = &synth.out {
                write_json(path, &serde_json::to_value(SegmentedDataFile::from(&data))?)?;
            }
            let report = run_experiment(cfg, &data)?;
            match synth.output.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(&synth.output, &serde_json::to_value(&report)?),
                f => Err(unsupported("synth", f)),
            }
        }
        Command::Fine { moments, k123, out } => {
            let m: [f64; 6] = moments
                .as_slice()
                .try_into()
                .map_err(|_| Failure::Usage(format!("--moments takes 6 values, got {}", moments.len())))?;
            if let Some(bad) = m.iter().find(|v| !v.is_finite()) {
                return Err(Failure::Usage(format!("moment {bad} is not finite")));
            }
            let choice: K123Choice = k123.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let ms = MomentSet::from_lower_order(m);
            let three3 = check_three3(&ms);
            let interval = k123_interval(&ms);
            let feasible = feasibility_oracle(&ms);
            let built = match construct_trivariate(&ms, choice) {
                Ok(f) => Some(f),
                Err(Error::NoDistribution(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let violations: Vec<_> = three3.violations().into_iter().cloned().collect();
            match out.format.unwrap_or(Format::Text) {
                Format::Json => emit_json(
                    &out,
                    &json!({
                        "moments": m,
                        "interval": interval,
                        "feasible": feasible,
                        "checks": three3,
                        "violations": violations,
                        "trivariate": built.as_ref().map(|f| f.values()),
                    }),
                ),
                Format::Text => {
                    let mut s = format!(
                        "K123 interval [{:.6}, {:.6}] width {:.6}\n",
                        interval.lhs,
                        interval.rhs,
                        interval.width()
                    );
                    s += &format!("feasible {feasible}\n");
                    match &built {
                        Some(f) => {
                            for (i, v) in f.values().iter().enumerate() {
                                let (a, b, c) = point(i);
                                s += &format!("f({a:+},{b:+},{c:+}) = {v:.9}\n");
                            }
                        }
                        None => {
                            s += "no nonnegative trivariate; violated:\n";
                            for v in &violations {
                                s += &format!("  {}  (lhs {:.6}, rhs {:.6})\n", v.name, v.lhs, v.rhs);
                            }
                            if violations.is_empty() {
                                s += &format!("  chosen K123 outside [{:.6}, {:.6}]\n", interval.lhs, interval.rhs);
                            }
                        }
                    }
                    emit(&out, &s)
                }
                Format::Csv => Err(unsupported("fine", Format::Csv)),
            }
        }
        Command::Demo {
            kind: DemoKind::Bell { a, b, c, out },
        } => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let a = setting(a, [1.0, 0.0, 0.0])?;
            let b = setting(b, [h, h, 0.0])?;
            let c = setting(c, [h, -h, 0.0])?;
            let mut r = singlet_demo(&a, &b, &c)?;
            // orthogonal settings give −0.0; print it as 0
            for v in [&mut r.c_ab, &mut r.c_ac, &mut r.c_bc] {
                *v += 0.0;
            }
            match out.format.unwrap_or(Format::Text) {
                Format::Json => emit_json(&out, &serde_json::to_value(&r)?),
                Format::Text => {
                    let mut s = format!("C(a,b) = {:.6}  C(a,c) = {:.6}  C(b,c) = {:.6}\n", r.c_ab, r.c_ac, r.c_bc);
                    s += &format!("|C(a,b) + C(a,c)| - C(b,c) = {:.6} <= 1 ?\n", r.plus_lhs + 1.0);
                    s += &format!("|C(a,b) - C(a,c)| + C(b,c) = {:.6} <= 1 ?\n", r.minus_lhs + 1.0);
                    s += if r.violated { "violated\n" } else { "satisfied\n" };
                    emit(&out, &s)
                }
                Format::Csv => Err(unsupported("demo bell", Format::Csv)),
            }
        }
    }
}

fn setting(v: Option<Vec<f64>>, default: [f64; 3]) -> CliResult<SettingVector> {
    match v {
        None => Ok(SettingVector::normalized(default)?),
        Some(v) => {
            let arr: [f64; 3] = v
                .as_slice()
                .try_into()
                .map_err(|_| Failure::Usage(format!("setting vectors take 3 components, got {}", v.len())))?;
            Ok(SettingVector::normalized(arr)?)
        }
    }
}

fn config(data: &DataArgs) -> AnalysisConfig {
    AnalysisConfig {
        input: Some(data.input.display().to_string()),
        zero_policy: data.zero_sign,
        segments: usize::from(data.segments),
        ..AnalysisConfig::default()
    }
}

fn load(data: &DataArgs) -> CliResult<Dataset> {
    let file = File::open(&data.input)
        .map_err(|e| Failure::Core(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", data.input.display())))))?;
    Ok(load_dataset(BufReader::new(file), data.zero_sign, usize::from(data.segments))?)
}

fn unsupported(cmd: &str, f: Format) -> Failure {
    let name = match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Text => "text",
    };
    Failure::Usage(format!("{cmd} does not support --format {name}"))
}

fn emit(out: &OutputArgs, text: &str) -> CliResult {
    match &out.report {
        Some(path) => std::fs::write(path, text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn emit_json(out: &OutputArgs, value: &Value) -> CliResult {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, &s)
}

fn write_json(path: &Path, value: &Value) -> CliResult {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
