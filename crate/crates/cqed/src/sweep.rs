//! Grid sweeps and their CSV/JSON output.

use std::collections::BTreeMap;
use std::io::Write;

use cqed_core::Error as CoreError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{GridSpec, Quantity, Spacing, Variable};
use crate::error::{CliError, Result};
use crate::eval::{Evaluator, Row};

pub const GREEN_CONVENTION: &str = "G = -(textbook dyadic Green function e^{ikR}/(4 pi R)[...]); par along r, perp in-plane normal to r, zz normal to the plates; pm = (par+perp)/2, pp = (par-perp)/2, 00 = zz";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub values: Vec<f64>,
    pub diagnostics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub x: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub metadata: Vec<(String, String)>,
    pub variable: String,
    pub log_spacing: bool,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<Skipped>,
}

/// What each quantity evaluates, in words.
pub fn formula(q: Quantity) -> &'static str {
    match q {
        Quantity::GreenModesum => "cavity Green tensor at real k: Bessel-J mode sum (imaginary part), Bessel-Y mode sum plus Bessel-K evanescent tails (real part); lengths in units of 1/K",
        Quantity::GreenSeries => "cavity Green tensor at real k: free-space term plus Wynn-accelerated sum over plate reflections",
        Quantity::GreenImagfreq => "cavity Green tensor at k = iu: evanescent mode sum, or zeta integral for narrow separations; lengths in units of 1/u",
        Quantity::VOff => "off-resonant tensor potential int_0^inf dq q^4 G(Kr, Kd; iq)^2 / (q^2 + 1)^2",
        Quantity::VRes => "resonant tensor potentials V_A = Re^2 G - Im^2 G and V_B = Re^2 G + Im^2 G at k = K",
        Quantity::VStatic => "electrostatic tensor potentials as Bessel-K series in r/d (free-space forms below r/d = 0.005)",
        Quantity::WOff => "off-resonant pair energies (J) and phase shift: per-channel integral over the imaginary frequency axis",
        Quantity::WRes => "resonant pair energies (J) and phase shift for the configured excitation scenario, real-frequency Green tensor at each transition",
        Quantity::WStatic => "electrostatic pair energy (J) of two polarised atoms in a static field",
    }
}

pub fn metadata(ev: &Evaluator, extra: &[(String, String)]) -> Vec<(String, String)> {
    let t = &ev.tolerances;
    let mut m = vec![
        ("tool".into(), format!("cqed {}", env!("CARGO_PKG_VERSION"))),
        ("quantity".into(), ev.quantity.name().into()),
        ("formula".into(), formula(ev.quantity).into()),
        (
            "tolerances".into(),
            format!("rel_tol={:?} abs_tol={:?} m_max={} guard_band={:?}", t.rel_tol, t.abs_tol, t.m_max, t.guard_band),
        ),
        ("reflection_signs".into(), ev.signs.describe().into()),
        ("green_convention".into(), GREEN_CONVENTION.into()),
    ];
    if ev.normalize {
        m.push(("normalized".into(), "divided by the free-space forms".into()));
    }
    m.extend(extra.iter().cloned());
    m.push(("timestamp".into(), timestamp()));
    m
}

/// RFC 3339, from `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse::<i64>().ok()).unwrap_or_else(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs() as i64)
    });
    chrono::DateTime::from_timestamp(secs, 0).map_or_else(|| secs.to_string(), |t| t.to_rfc3339())
}

/// Evaluates every grid point; rows in grid order. Points inside a threshold
/// guard band are dropped and listed in `skipped`; any other error aborts.
pub fn run(
    ev: &Evaluator,
    grid: &GridSpec,
    fixed: &BTreeMap<Variable, f64>,
    threads: Option<usize>,
) -> Result<SweepResult> {
    let xs = grid.values();
    let eval_at = |x: f64| -> Result<Row> {
        let mut p = fixed.clone();
        p.insert(grid.variable, x);
        ev.eval(&p)
    };
    let results: Vec<Result<Row>> = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?
            .install(|| xs.par_iter().map(|&x| eval_at(x)).collect()),
        None => xs.par_iter().map(|&x| eval_at(x)).collect(),
    };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (&x, r) in xs.iter().zip(results) {
        match r {
            Ok(row) => rows.push(SweepRow { x, values: row.values, diagnostics: row.diagnostics }),
            Err(CliError::Core(e @ CoreError::Threshold { .. })) => skipped.push(Skipped { x, reason: e.to_string() }),
            Err(e) => return Err(e),
        }
    }
    let spacing = match grid.spacing {
        Spacing::Linear => "linear",
        Spacing::Log => "log",
    };
    let grid_desc = format!(
        "{} from {:?} to {:?}, {} points, {spacing}",
        grid.variable.name(),
        grid.start,
        grid.stop,
        grid.points
    );
    let mut extra = vec![("grid".to_string(), grid_desc)];
    if !fixed.is_empty() {
        let fixed_desc = fixed.iter().map(|(k, v)| format!("{}={v:?}", k.name())).collect::<Vec<_>>().join(" ");
        extra.push(("fixed".to_string(), fixed_desc));
    }
    Ok(SweepResult {
        metadata: metadata(ev, &extra),
        variable: grid.variable.name().into(),
        log_spacing: grid.spacing == Spacing::Log,
        columns: ev.columns(),
        rows,
        skipped,
    })
}

impl SweepResult {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        for s in &self.skipped {
            writeln!(w, "# skipped {}={:?}: {}", self.variable, s.x, s.reason)?;
        }
        let mut csv = csv::Writer::from_writer(w);
        let header = std::iter::once(self.variable.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .chain(std::iter::once("diagnostics"));
        csv.write_record(header)?;
        for row in &self.rows {
            let fields = std::iter::once(format!("{:?}", row.x))
                .chain(row.values.iter().map(|v| format!("{v:?}")))
                .chain(std::iter::once(row.diagnostics.clone()));
            csv.write_record(fields)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        let metadata: serde_json::Map<String, serde_json::Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
        let doc = serde_json::json!({
            "metadata": metadata,
            "variable": self.variable,
            "columns": self.columns,
            "rows": self.rows,
            "skipped": self.skipped,
        });
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    }

    /// A gnuplot script plotting every column against the swept variable.
    pub fn plot_script(&self, data_file: &str) -> String {
        let log = if self.log_spacing { "set logscale x\n" } else { "" };
        let curves = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| format!("'{data_file}' using 1:{} with lines title '{c}'", i + 2))
            .collect::<Vec<_>>()
            .join(", \\\n     ");
        format!("set datafile separator ','\nset key autotitle columnhead\n{log}set xlabel '{}'\nplot {curves}\n", self.variable)
    }
}
