//! Command implementations behind the `qcm-keyrate` binary.
//!
//! Every command writes its data file plus `<out>.manifest.json`. Exit status:
//! 0 on success, 1 for usage errors (bad flags, unreadable config, unwritable
//! path), 2 when a computation is flagged invalid (for example an out-of-window row).

pub mod format;
pub mod manifest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcm_keyrate::bounds::{alpha_window_bh, alpha_window_wz, delta_z_threshold, fidelity_window, r_lb, r_lb_quadratic};
use qcm_keyrate::distances::{
    bh_efficiency_table, default_bh_blocks, wz_efficiency_table, BhBlock, BH_TABLE_ROWS, WZ_TABLE_ALPHA_SQ,
};
use qcm_keyrate::protocol::run_protocol;
use qcm_keyrate::{CloningMachine, Decision, EfficiencyRow, ProtocolConfig, ProtocolOutcome, Window};

use format::{cell, exact, parse_grid};
use manifest::{write_json, RunManifest};

/// Relative distance below `δ_z1` of the last point of each figure curve.
pub const THRESHOLD_APPROACH: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "qcm-keyrate",
    version,
    about = "Key-rate bounds under state-dependent cloning attacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MachineKind {
    Wz,
    Bh,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wootters-Zurek efficiency table (fidelity, distance bounds).
    TableWz {
        /// Comma-separated α² values; defaults to the standard six rows.
        #[arg(long, value_delimiter = ',')]
        alpha_sq: Vec<f64>,
        #[arg(long, default_value = "table_wz.csv")]
        out: PathBuf,
    },
    /// Modified Buzek-Hillery table (fidelity, δ_z threshold, distance bounds).
    TableBh {
        /// Comma-separated ξ values; defaults to 0.1,0.2,0.3,0.4,0.455.
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
        /// α² values used for every ξ; required for ξ without default rows.
        #[arg(long, value_delimiter = ',')]
        alpha_sq: Vec<f64>,
        #[arg(long, default_value = "table_bh.csv")]
        out: PathBuf,
    },
    /// Long-format samples of the modified lower bound below the δ_z threshold.
    FigureRlb {
        #[arg(long, value_enum, default_value = "wz")]
        machine: MachineKind,
        /// Cloner parameter, required with `--machine bh`.
        #[arg(long)]
        xi: Option<f64>,
        /// `AxD`: A α² points across the window, D δ_z points per curve.
        #[arg(long, default_value = "14x50")]
        grid: String,
        /// Explicit α² values instead of the grid's A points.
        #[arg(long, value_delimiter = ',')]
        alpha_sq: Vec<f64>,
        #[arg(long, default_value = "figure_rlb.csv")]
        out: PathBuf,
    },
    /// Monte Carlo protocol run from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed; one is generated when neither is given.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "outcome.json")]
        out: PathBuf,
    },
    /// Fidelity and α² validity windows with bisection residuals.
    Windows {
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
        #[arg(long, default_value = "windows.json")]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Some results are flagged invalid; table files are still written in full.
    Flagged(Vec<String>),
    Failed(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Failed(_) => 1,
            CliError::Flagged(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Flagged(rows) => {
                write!(f, "{} flagged result(s):", rows.len())?;
                for r in rows {
                    write!(f, "\n  {r}")?;
                }
                Ok(())
            }
            CliError::Failed(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failed(e)
    }
}

/// What a successful command produced.
#[derive(Debug)]
pub struct Report {
    pub out: PathBuf,
    pub manifest: PathBuf,
    pub summary: Option<String>,
}

pub fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::TableWz { alpha_sq, out } => cmd_table_wz(&alpha_sq, &out),
        Command::TableBh { xi, alpha_sq, out } => cmd_table_bh(&xi, &alpha_sq, &out),
        Command::FigureRlb {
            machine,
            xi,
            grid,
            alpha_sq,
            out,
        } => cmd_figure_rlb(machine, xi, &grid, &alpha_sq, &out),
        Command::Simulate { config, seed, out } => cmd_simulate(&config, seed, &out),
        Command::Windows { xi, out } => cmd_windows(&xi, &out),
    }
}

fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<std::fs::File>> {
    use anyhow::Context;
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

fn flags_of(rows: &[EfficiencyRow]) -> Vec<String> {
    rows.iter()
        .filter_map(|r| {
            r.flag.as_ref().map(|f| match r.xi {
                Some(xi) => format!("xi={xi}, alpha^2={}: {f:?}", r.alpha_sq),
                None => format!("alpha^2={}: {f:?}", r.alpha_sq),
            })
        })
        .collect()
}

fn finish(report: Report, flags: Vec<String>) -> Result<Report, CliError> {
    if flags.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Flagged(flags))
    }
}

const EFFICIENCY_COLUMNS: [&str; 8] = [
    "fidelity",
    "delta_z_upper",
    "trace_dist_sq_upper",
    "hs_upper",
    "hs_eve_ideal",
    "hs_eve_pair",
    "condition_holds",
    "flag",
];

fn efficiency_cells(r: &EfficiencyRow) -> Vec<String> {
    vec![
        cell(r.fidelity),
        opt_cell(r.delta_z_threshold),
        cell(r.trace_dist_sq_interval.upper),
        cell(r.hs_interval.upper),
        cell(r.measured.hs_eve_ideal),
        cell(r.measured.hs_eve_pair),
        r.condition_holds.to_string(),
        match &r.flag {
            None => String::new(),
            Some(qcm_keyrate::distances::RowFlag::Invalid(m)) => format!("invalid: {m}"),
            Some(qcm_keyrate::distances::RowFlag::OutOfWindow(m)) => format!("out of window: {m}"),
        },
    ]
}

pub fn cmd_table_wz(alpha_sq: &[f64], out: &Path) -> Result<Report, CliError> {
    let alphas = if alpha_sq.is_empty() {
        WZ_TABLE_ALPHA_SQ.to_vec()
    } else {
        alpha_sq.to_vec()
    };
    let rows = wz_efficiency_table(&alphas);
    let mut w = csv_writer(out)?;
    let mut header = vec!["alpha_sq"];
    header.extend(EFFICIENCY_COLUMNS);
    w.write_record(&header).map_err(anyhow::Error::from)?;
    for r in &rows {
        let mut rec = vec![exact(r.alpha_sq)];
        rec.extend(efficiency_cells(r));
        w.write_record(&rec).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    let manifest = RunManifest::new("table-wz")
        .param("alpha_sq", &alphas)
        .artifact(out)
        .write_next_to(out)?;
    finish(
        Report {
            out: out.to_path_buf(),
            manifest,
            summary: Some(format!("{} rows", rows.len())),
        },
        flags_of(&rows),
    )
}

/// ξ blocks for `table-bh`: the defaults, or the given ξ with default or explicit α² rows.
pub fn bh_blocks(xi: &[f64], alpha_sq: &[f64]) -> Result<Vec<BhBlock>, CliError> {
    if xi.is_empty() && alpha_sq.is_empty() {
        return Ok(default_bh_blocks());
    }
    let xis: Vec<f64> = if xi.is_empty() {
        BH_TABLE_ROWS.iter().map(|r| r.0).collect()
    } else {
        xi.to_vec()
    };
    xis.into_iter()
        .map(|x| {
            let alphas = if !alpha_sq.is_empty() {
                alpha_sq.to_vec()
            } else {
                BH_TABLE_ROWS
                    .iter()
                    .find(|r| r.0 == x)
                    .map(|r| r.1.to_vec())
                    .ok_or_else(|| CliError::Usage(format!("xi = {x} has no default rows; pass --alpha-sq")))?
            };
            Ok(BhBlock {
                xi: x,
                alpha_sq: alphas,
            })
        })
        .collect()
}

pub fn cmd_table_bh(xi: &[f64], alpha_sq: &[f64], out: &Path) -> Result<Report, CliError> {
    let blocks = bh_blocks(xi, alpha_sq)?;
    let rows = bh_efficiency_table(&blocks);
    let mut w = csv_writer(out)?;
    let mut header = vec!["xi", "alpha_sq"];
    header.extend(EFFICIENCY_COLUMNS);
    w.write_record(&header).map_err(anyhow::Error::from)?;
    for r in &rows {
        let mut rec = vec![r.xi.map(exact).unwrap_or_default(), exact(r.alpha_sq)];
        rec.extend(efficiency_cells(r));
        w.write_record(&rec).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    let manifest = RunManifest::new("table-bh")
        .param("blocks", &blocks)
        .artifact(out)
        .write_next_to(out)?;
    finish(
        Report {
            out: out.to_path_buf(),
            manifest,
            summary: Some(format!("{} rows", rows.len())),
        },
        flags_of(&rows),
    )
}

/// One sample of a figure curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigurePoint {
    pub alpha_sq: f64,
    pub fidelity: f64,
    pub delta_z: f64,
    /// The quadratic modified lower bound, which vanishes at `δ_z1`.
    pub r_lb: f64,
    /// The logarithmic lower bound it is derived from.
    pub r_lb_log: f64,
    /// Last point of the curve, `δ_z1 (1 - THRESHOLD_APPROACH)`.
    pub at_threshold: bool,
}

/// `n` points strictly inside `(w.lower, w.upper)`.
pub fn interior_grid(w: &Window, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| w.lower + (w.upper - w.lower) * i as f64 / (n + 1) as f64)
        .collect()
}

fn machine_for(kind: MachineKind, xi: Option<f64>) -> Result<(CloningMachine, Window), CliError> {
    match (kind, xi) {
        (MachineKind::Wz, None) => Ok((CloningMachine::WoottersZurek, alpha_window_wz())),
        (MachineKind::Wz, Some(_)) => Err(CliError::Usage("--xi only applies to --machine bh".into())),
        (MachineKind::Bh, None) => Err(CliError::Usage("--machine bh needs --xi".into())),
        (MachineKind::Bh, Some(x)) => {
            let m = CloningMachine::buzek_hillery(x).map_err(|e| CliError::Usage(e.to_string()))?;
            match alpha_window_bh(x).map_err(|e| CliError::Usage(e.to_string()))? {
                Some(w) => Ok((m, w)),
                None => Err(CliError::Flagged(vec![format!(
                    "xi = {x}: no alpha^2 gives a fidelity inside the window"
                )])),
            }
        }
    }
}

/// Samples `δ_z = δ_z1 k / D` for `k < D` and a last point just below `δ_z1`,
/// for every `α²` (which must lie inside `window`).
pub fn figure_points(
    machine: &CloningMachine,
    window: &Window,
    alphas: &[f64],
    deltas_per_curve: usize,
) -> Result<Vec<FigurePoint>, CliError> {
    if alphas.is_empty() || deltas_per_curve == 0 {
        return Err(CliError::Usage("empty grid".into()));
    }
    let outside: Vec<String> = alphas
        .iter()
        .filter(|a| !window.contains(**a))
        .map(|a| format!("alpha^2 = {a} is outside ({:.6}, {:.6})", window.lower, window.upper))
        .collect();
    if !outside.is_empty() {
        return Err(CliError::Flagged(outside));
    }
    let mut points = Vec::with_capacity(alphas.len() * deltas_per_curve);
    for &a2 in alphas {
        let fidelity = machine
            .closed_form_fidelity(a2)
            .map_err(|e| CliError::Failed(e.into()))?;
        let t = delta_z_threshold(fidelity).ok_or_else(|| {
            CliError::Flagged(vec![format!("alpha^2 = {a2}: no delta_z threshold at F = {fidelity}")])
        })?;
        for k in 1..=deltas_per_curve {
            let at_threshold = k == deltas_per_curve;
            let delta_z = if at_threshold {
                t * (1.0 - THRESHOLD_APPROACH)
            } else {
                t * k as f64 / deltas_per_curve as f64
            };
            let q = r_lb_quadratic(fidelity, delta_z).map_err(|e| CliError::Failed(e.into()))?;
            let log_form = r_lb(fidelity, delta_z).map_err(|e| CliError::Failed(e.into()))?;
            points.push(FigurePoint {
                alpha_sq: a2,
                fidelity,
                delta_z,
                r_lb: q.value,
                r_lb_log: log_form,
                at_threshold,
            });
        }
    }
    Ok(points)
}

pub fn cmd_figure_rlb(
    kind: MachineKind,
    xi: Option<f64>,
    grid: &str,
    alpha_sq: &[f64],
    out: &Path,
) -> Result<Report, CliError> {
    let (n_alpha, n_delta) = parse_grid(grid).map_err(CliError::Usage)?;
    let (machine, window) = machine_for(kind, xi)?;
    let alphas = if alpha_sq.is_empty() {
        interior_grid(&window, n_alpha)
    } else {
        alpha_sq.to_vec()
    };
    let points = figure_points(&machine, &window, &alphas, n_delta)?;

    let mut w = csv_writer(out)?;
    for p in &points {
        w.serialize(p).map_err(anyhow::Error::from)?;
    }
    w.flush().map_err(anyhow::Error::from)?;
    let manifest = RunManifest::new("figure-rlb")
        .param("machine", machine)
        .param("grid", grid)
        .param("alpha_sq", &alphas)
        .param("alpha_window", window)
        .artifact(out)
        .write_next_to(out)?;
    Ok(Report {
        out: out.to_path_buf(),
        manifest,
        summary: Some(format!("{} points on {} curves", points.len(), alphas.len())),
    })
}

/// Reads a protocol config, filling in the seed from `seed` or a fresh random one.
///
/// Returns the config and whether the seed was generated here.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<(ProtocolConfig, bool), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Usage(format!("{}: config must be a JSON object", path.display())))?;
    let mut generated = false;
    if let Some(s) = seed {
        obj.insert("seed".into(), s.into());
    } else if !obj.contains_key("seed") {
        obj.insert("seed".into(), rand::random::<u64>().into());
        generated = true;
    }
    let cfg: ProtocolConfig = serde_path_to_error::deserialize(value)
        .map_err(|e| CliError::Usage(format!("{}: field `{}`: {}", path.display(), e.path(), e.inner())))?;
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((cfg, generated))
}

pub fn summarize(o: &ProtocolOutcome) -> String {
    let decision = match o.decision {
        Decision::Continue => "continue",
        Decision::Abort => "abort",
    };
    let threshold = o.decision_threshold.map_or("none".to_string(), |t| format!("{t:.6}"));
    format!(
        "decision: {decision} (delta_z_hat = {:.6} from {} of {} sifted bits, threshold = {threshold}, R > 0: {}, key bits = {})",
        o.delta_z_hat,
        o.sample_size,
        o.sifted_length,
        o.rate_positive,
        o.final_key_bits_alice.len()
    )
}

pub fn cmd_simulate(config: &Path, seed: Option<u64>, out: &Path) -> Result<Report, CliError> {
    let (cfg, generated) = load_config(config, seed)?;
    let outcome = run_protocol(&cfg).map_err(|e| CliError::Flagged(vec![e.to_string()]))?;
    write_json(out, &outcome)?;
    let mut m = RunManifest::new("simulate")
        .param("config_path", config.display().to_string())
        .param("config", &cfg)
        .param("seed_generated", generated)
        .artifact(out);
    m.seed = Some(cfg.seed);
    let manifest = m.write_next_to(out)?;
    Ok(Report {
        out: out.to_path_buf(),
        manifest,
        summary: Some(summarize(&outcome)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BhWindow {
    pub xi: f64,
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowsReport {
    pub fidelity_window: Window,
    pub wz_alpha_window: Window,
    pub bh_alpha_windows: Vec<BhWindow>,
}

pub fn windows_report(xi: &[f64]) -> Result<WindowsReport, CliError> {
    let xis: Vec<f64> = if xi.is_empty() {
        BH_TABLE_ROWS.iter().map(|r| r.0).collect()
    } else {
        xi.to_vec()
    };
    let bh_alpha_windows = xis
        .into_iter()
        .map(|x| {
            alpha_window_bh(x)
                .map(|window| BhWindow { xi: x, window })
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok(WindowsReport {
        fidelity_window: fidelity_window(),
        wz_alpha_window: alpha_window_wz(),
        bh_alpha_windows,
    })
}

pub fn cmd_windows(xi: &[f64], out: &Path) -> Result<Report, CliError> {
    let report = windows_report(xi)?;
    write_json(out, &report)?;
    let xis: Vec<f64> = report.bh_alpha_windows.iter().map(|w| w.xi).collect();
    let manifest = RunManifest::new("windows")
        .param("xi", xis)
        .artifact(out)
        .write_next_to(out)?;
    let f = report.fidelity_window;
    let a = report.wz_alpha_window;
    Ok(Report {
        out: out.to_path_buf(),
        manifest,
        summary: Some(format!(
            "fidelity window ({:.6}, {:.6}); WZ alpha^2 window ({:.6}, {:.6})",
            f.lower, f.upper, a.lower, a.upper
        )),
    })
}
