use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cqed::config::{Format, InputFile};
use cqed::error::{CliError, Result};
use cqed::eval::Evaluator;
use cqed::presets::{preset, PRESETS};
use cqed::sweep::{self, metadata};
use cqed::verify::{self, VerifyLevel};
use cqed_core::green::ReflectionSigns;

#[derive(Parser)]
#[command(name = "cqed", version, about = "Dispersion and electrostatic potentials of two atoms in a planar cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Input JSON; repeat to merge several files (later keys win).
    #[arg(long, global = true)]
    config: Vec<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    m_max: Option<usize>,
    #[arg(long, global = true)]
    guard_band: Option<f64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use (-1)^m on every reflection-series component. For testing that
    /// `verify` notices a wrong sign.
    #[arg(long, global = true, hide = true)]
    tamper_series_sign: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one point and print every column with its channel breakdown.
    Eval {
        /// Override a point parameter, e.g. `--set Kd=5`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Tabulate a quantity over a grid.
    Sweep {
        /// Run a built-in sweep instead of `--config`.
        #[arg(long)]
        preset: Option<String>,
        /// Also write a gnuplot script next to `--out`.
        #[arg(long)]
        plot_script: bool,
    },
    /// Run the built-in checks and print a JSON verdict.
    Verify {
        #[arg(value_enum, default_value = "quick")]
        level: VerifyLevel,
    },
    /// List the built-in sweeps, or print one as an input file.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::VerifyFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    let signs = if c.tamper_series_sign { ReflectionSigns::ALL_ALTERNATING } else { ReflectionSigns::ADJUDICATED };
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
    }
    match &cli.command {
        Command::Eval { set } => {
            let mut input = load(c, None)?;
            for s in set {
                let (k, v) = s.split_once('=').ok_or_else(|| CliError::config(format!("--set {s}: expected NAME=VALUE")))?;
                let v = v.trim().parse::<f64>().map_err(|e| CliError::config(format!("--set {s}: {e}")))?;
                input.point.insert(k.trim().to_string(), v);
            }
            eval(&input, signs)
        }
        Command::Sweep { preset, plot_script } => {
            let input = load(c, preset.as_deref())?;
            run_sweep(&input, c, signs, *plot_script)
        }
        Command::Verify { level } => {
            let verdict = verify::run(*level, signs);
            let mut out = output(c.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &verdict).map_err(|e| CliError::Io(e.into()))?;
            writeln!(out)?;
            out.flush()?;
            if verdict.passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
        Command::Presets { show } => {
            let mut out = output(c.out.as_deref())?;
            match show {
                Some(name) => {
                    let p = preset(name).ok_or_else(|| CliError::config(format!("unknown preset {name}")))?;
                    serde_json::to_writer_pretty(&mut out, &p).map_err(|e| CliError::Io(e.into()))?;
                    writeln!(out)?;
                }
                None => {
                    for p in &PRESETS {
                        writeln!(out, "{:<10} {}", p.name, p.description)?;
                    }
                }
            }
            out.flush()?;
            Ok(())
        }
    }
}

/// Reads the input and applies the command-line overrides.
fn load(c: &Common, preset_name: Option<&str>) -> Result<InputFile> {
    let mut input = match preset_name {
        Some(name) => {
            if !c.config.is_empty() {
                return Err(CliError::config("--preset and --config are exclusive"));
            }
            preset(name).ok_or_else(|| CliError::config(format!("unknown preset {name}")))?
        }
        None if c.config.is_empty() => return Err(CliError::config("--config is required")),
        None => InputFile::load(&c.config)?,
    };
    if let Some(x) = c.rel_tol {
        input.tolerances.rel_tol = x;
    }
    if let Some(x) = c.m_max {
        input.tolerances.m_max = x;
    }
    if let Some(x) = c.guard_band {
        input.tolerances.guard_band = x;
    }
    if let Some(f) = c.format {
        input.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(p) = &c.out {
        input.output.path = Some(p.display().to_string());
    }
    input.check()?;
    Ok(input)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn eval(input: &InputFile, signs: ReflectionSigns) -> Result<()> {
    let ev = Evaluator::new(input, signs)?;
    let point = input.eval_point()?;
    let row = ev.eval(&point)?;
    let columns = ev.columns();
    let hbar = ev.system.as_ref().map(|s| s.options.constants.hbar);
    let mut out = output(input.output.path.as_deref().map(Path::new))?;
    let point_desc: BTreeMap<&str, f64> = point.iter().map(|(k, v)| (k.name(), *v)).collect();
    match input.output.format {
        Format::Json => {
            let values: serde_json::Map<String, serde_json::Value> =
                columns.iter().cloned().zip(row.values.iter().map(|&v| v.into())).collect();
            let (breakdown, skipped) = match &row.energy {
                Some(e) => (
                    e.breakdown
                        .iter()
                        .map(|b| {
                            serde_json::json!({
                                "family": b.family, "i": b.i, "j": b.j, "k": b.k,
                                "w_a": b.w_a, "w_b": b.w_b, "phase_shift": b.phase_shift,
                            })
                        })
                        .collect(),
                    e.skipped
                        .iter()
                        .map(|s| serde_json::json!({"family": s.family, "i": s.i, "j": s.j, "k": s.k, "reason": s.error.to_string()}))
                        .collect(),
                ),
                None => (Vec::new(), Vec::new()),
            };
            let meta: serde_json::Map<String, serde_json::Value> =
                metadata(&ev, &[]).into_iter().map(|(k, v)| (k, v.into())).collect();
            let doc = serde_json::json!({
                "metadata": meta,
                "point": point_desc,
                "values": values,
                "diagnostics": row.diagnostics,
                "breakdown": breakdown,
                "skipped": skipped,
            });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.into()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "quantity = {}", ev.quantity.name())?;
            for (k, v) in &point_desc {
                writeln!(out, "{k} = {v:?}")?;
            }
            for (k, v) in columns.iter().zip(&row.values) {
                writeln!(out, "{k} = {v:?}")?;
            }
            if !row.diagnostics.is_empty() {
                writeln!(out, "diagnostics = {}", row.diagnostics)?;
            }
            if let Some(e) = &row.energy {
                writeln!(out, "channels:")?;
                for b in &e.breakdown {
                    writeln!(
                        out,
                        "  {:<8} i={} j={} k={:?} w_a={:?} w_b={:?} phase_shift={:?}",
                        b.family, b.i, b.j, b.k, b.w_a, b.w_b, b.phase_shift
                    )?;
                }
                for s in &e.skipped {
                    writeln!(out, "  skipped {} i={} j={} k={:?}: {}", s.family, s.i, s.j, s.k, s.error)?;
                }
                if let Some(h) = hbar {
                    writeln!(out, "phase_rate_rad_per_s = {:?}", e.phase_shift_rate(h))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn run_sweep(input: &InputFile, c: &Common, signs: ReflectionSigns, plot_script: bool) -> Result<()> {
    let ev = Evaluator::new(input, signs)?;
    let (grid, fixed) = input.sweep_plan()?;
    let result = sweep::run(&ev, &grid, &fixed, c.threads)?;
    for s in &result.skipped {
        eprintln!("skipped {}={:?}: {}", result.variable, s.x, s.reason);
    }
    let path = input.output.path.as_deref();
    let mut out = output(path.map(Path::new))?;
    match input.output.format {
        Format::Csv => result.write_csv(&mut out)?,
        Format::Json => result.write_json(&mut out)?,
    }
    out.flush()?;
    if plot_script || input.output.plot_script {
        let data = path.ok_or_else(|| CliError::config("a plot script needs an output file"))?;
        if input.output.format != Format::Csv {
            return Err(CliError::config("a plot script needs CSV output"));
        }
        let name = Path::new(data).file_name().map_or_else(|| data.to_string(), |n| n.to_string_lossy().into_owned());
        std::fs::write(format!("{data}.gp"), result.plot_script(&name))?;
    }
    Ok(())
}
