//! Monte-Carlo experiment driver and result files.
//!
//! Every trial draws its channels and cancellers once from a stream derived
//! from `(master_seed, trial)`; all (mode, rate, P_max) combinations then
//! reuse that realization. Aggregation always walks trials in index order, so
//! the output does not depend on the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, RngStream};
use crate::error::{Error, Result};
use crate::solver::{draw_trial, solve, SolveResult, TxMode};
use crate::types::{dbm_to_mw, mw_to_dbm, SinrTargets, SystemConfig};

/// Rate at which the outage-vs-P_max figure is taken, when swept.
pub const OUTAGE_RATE_BPS_HZ: f64 = 8.0;

/// How a trial counts as a power outage: `min(P₁,P₂) > P_max` or
/// `max(P₁,P₂) > P_max`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutageMode {
    #[default]
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    pub target_rates_bps_hz: Vec<f64>,
    pub p_max_sweep_dbm: Vec<f64>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub tx_modes: Vec<TxMode>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub outage_mode: OutageMode,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base: SystemConfig::default(),
            target_rates_bps_hz: (2..=8).map(f64::from).collect(),
            p_max_sweep_dbm: (0..=10).map(|i| 4.0 * i as f64).collect(),
            n_trials: 500,
            master_seed: 1,
            tx_modes: TxMode::ALL.to_vec(),
            output_dir: PathBuf::from("results"),
            outage_mode: OutageMode::Min,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig("n_trials must be >= 1".into()));
        }
        if self.target_rates_bps_hz.is_empty() {
            return Err(Error::InvalidConfig("target rate list is empty".into()));
        }
        if let Some(r) = self
            .target_rates_bps_hz
            .iter()
            .find(|r| !(**r > 0.0 && r.is_finite()))
        {
            return Err(Error::InvalidConfig(format!(
                "target rate {r} must be positive"
            )));
        }
        if self.p_max_sweep_dbm.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig(
                "P_max sweep values must be finite".into(),
            ));
        }
        if self.tx_modes.is_empty() {
            return Err(Error::InvalidConfig("no TX modes selected".into()));
        }
        Ok(())
    }

    /// P_max grid: the sweep plus the base value, ascending, deduplicated.
    pub fn p_max_grid(&self) -> Vec<f64> {
        let mut grid = self.p_max_sweep_dbm.clone();
        grid.push(self.base.p_max_dbm);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub tx_mode: TxMode,
    pub target_rate: f64,
    pub p_max_dbm: f64,
    /// Per-node TX power over feasible trials, averaged in mW.
    pub mean_tx_power_dbm: f64,
    /// Residual SI after RX combining over feasible trials, averaged in mW.
    pub mean_residual_si_dbm: f64,
    pub outage_prob: f64,
    pub convergence_rate: f64,
    pub mean_iterations: f64,
    pub mean_runtime_s: f64,
}

/// Whether one result is a power outage. Infeasible solves carry no valid
/// power vector and always count as outages.
fn is_outage(r: &SolveResult, p_max_mw: f64, mode: OutageMode) -> bool {
    if !r.feasible {
        return true;
    }
    let [p1, p2] = r.state.p;
    let p = match mode {
        OutageMode::Min => p1.min(p2),
        OutageMode::Max => p1.max(p2),
    };
    p > p_max_mw
}

/// Fraction of results with `min(P₁, P₂) > p_max` (mW).
pub fn outage_probability(results: &[SolveResult], p_max_mw: f64) -> Result<f64> {
    outage_probability_with(results, p_max_mw, OutageMode::Min)
}

pub fn outage_probability_with(
    results: &[SolveResult],
    p_max_mw: f64,
    mode: OutageMode,
) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyStatistic("outage probability"));
    }
    let hits = results
        .iter()
        .filter(|r| is_outage(r, p_max_mw, mode))
        .count();
    Ok(hits as f64 / results.len() as f64)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Aggregates one (mode, rate, P_max) cell. `results` must be in trial order.
pub fn aggregate(
    tx_mode: TxMode,
    target_rate: f64,
    p_max_dbm: f64,
    results: &[SolveResult],
    outage_mode: OutageMode,
) -> Result<AggregateRow> {
    let feasible = || results.iter().filter(|r| r.feasible);
    let power = mean(feasible().map(|r| 0.5 * (r.state.p[0] + r.state.p[1])));
    let resid = mean(feasible().flat_map(|r| r.residual_si_dbm.map(dbm_to_mw)));
    let converged = results.iter().filter(|r| r.converged).count();
    Ok(AggregateRow {
        tx_mode,
        target_rate,
        p_max_dbm,
        mean_tx_power_dbm: mw_to_dbm(power),
        mean_residual_si_dbm: mw_to_dbm(resid),
        outage_prob: outage_probability_with(results, dbm_to_mw(p_max_dbm), outage_mode)?,
        convergence_rate: converged as f64 / results.len() as f64,
        mean_iterations: mean(results.iter().map(|r| r.iterations as f64)),
        mean_runtime_s: mean(results.iter().map(|r| r.wall_time_s)),
    })
}

/// One (mode, rate, P_max) cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub tx_mode: TxMode,
    pub target_rate: f64,
    pub p_max_dbm: f64,
}

impl ExperimentSpec {
    /// Grid cells in output order: mode, then rate, then P_max.
    pub fn cells(&self) -> Vec<Cell> {
        let grid = self.p_max_grid();
        let mut cells = Vec::new();
        for &tx_mode in &self.tx_modes {
            for &target_rate in &self.target_rates_bps_hz {
                for &p_max_dbm in &grid {
                    cells.push(Cell {
                        tx_mode,
                        target_rate,
                        p_max_dbm,
                    });
                }
            }
        }
        cells
    }
}

/// Solves every cell on one trial's realization.
fn run_trial(spec: &ExperimentSpec, cells: &[Cell], trial: usize) -> Result<Vec<SolveResult>> {
    let mut rng = RngStream::for_trial(spec.master_seed, trial as u64);
    let (ch, cancellers) = draw_trial(&spec.base, &mut rng)?;
    cells
        .iter()
        .map(|cell| {
            let cfg = SystemConfig {
                p_max_dbm: cell.p_max_dbm,
                ..spec.base.clone()
            };
            let targets = SinrTargets::from_rate(cell.target_rate)?;
            solve(
                &cfg,
                &ch,
                &cancellers,
                &targets,
                &mut rng.clone(),
                cell.tx_mode,
            )
        })
        .collect()
}

/// Raw per-trial results, indexed `[cell][trial]`.
pub fn run_trials(spec: &ExperimentSpec) -> Result<(Vec<Cell>, Vec<Vec<SolveResult>>)> {
    spec.validate()?;
    let cells = spec.cells();
    let per_trial: Vec<Vec<SolveResult>> = (0..spec.n_trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, &cells, trial))
        .collect::<Result<_>>()?;
    let mut per_cell: Vec<Vec<SolveResult>> = vec![Vec::with_capacity(spec.n_trials); cells.len()];
    for trial in per_trial {
        for (slot, r) in per_cell.iter_mut().zip(trial) {
            slot.push(r);
        }
    }
    Ok((cells, per_cell))
}

/// Runs the full (mode × rate × P_max) grid on the current rayon pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<AggregateRow>> {
    let (cells, results) = run_trials(spec)?;
    cells
        .iter()
        .zip(&results)
        .map(|(c, r)| aggregate(c.tx_mode, c.target_rate, c.p_max_dbm, r, spec.outage_mode))
        .collect()
}

/// [`run_experiment`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: usize,
) -> Result<Vec<AggregateRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(spec))
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "tx_mode",
    "target_rate",
    "p_max_dbm",
    "mean_tx_power_dbm",
    "mean_residual_si_dbm",
    "outage_prob",
    "convergence_rate",
    "mean_iterations",
    "mean_runtime_s",
];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

/// One header line plus one line per row, floats with 6 significant digits.
pub fn write_results(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let nums = [
            r.target_rate,
            r.p_max_dbm,
            r.mean_tx_power_dbm,
            r.mean_residual_si_dbm,
            r.outage_prob,
            r.convergence_rate,
            r.mean_iterations,
            r.mean_runtime_s,
        ];
        let mut record = vec![r.tx_mode.to_string()];
        record.extend(nums.iter().map(|x| format_sig6(*x)));
        w.write_record(&record).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_err(path, e)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub spec: ExperimentSpec,
    pub power_averaging: String,
    pub residual_si_averaging: String,
    pub outage_definition: String,
    pub rows: Vec<AggregateRow>,
}

impl Summary {
    pub fn new(spec: &ExperimentSpec, rows: &[AggregateRow]) -> Self {
        let outage = match spec.outage_mode {
            OutageMode::Min => "min(P1,P2) > P_max; infeasible trials count as outage",
            OutageMode::Max => "max(P1,P2) > P_max; infeasible trials count as outage",
        };
        Self {
            spec: spec.clone(),
            power_averaging: "per-node TX power averaged in mW over feasible trials, then dBm".into(),
            residual_si_averaging: format!(
                "P_k|u_k H_kk v_k|^2 averaged in mW over feasible trials and both nodes; exact zeros reported as {} dBm",
                crate::solver::RESIDUAL_SI_FLOOR_DBM
            ),
            outage_definition: outage.into(),
            rows: rows.to_vec(),
        }
    }
}

pub fn write_summary(spec: &ExperimentSpec, rows: &[AggregateRow], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(&Summary::new(spec, rows))
        .map_err(|e| Error::format(path, e))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

/// Rate sweep at the base P_max.
pub fn rate_sweep_rows(spec: &ExperimentSpec, rows: &[AggregateRow]) -> Vec<AggregateRow> {
    rows.iter()
        .filter(|r| r.p_max_dbm == spec.base.p_max_dbm)
        .cloned()
        .collect()
}

/// P_max sweep at 8 bps/Hz, or at the highest swept rate when 8 is absent.
pub fn outage_rows(spec: &ExperimentSpec, rows: &[AggregateRow]) -> Vec<AggregateRow> {
    let rate = if spec.target_rates_bps_hz.contains(&OUTAGE_RATE_BPS_HZ) {
        OUTAGE_RATE_BPS_HZ
    } else {
        spec.target_rates_bps_hz
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    rows.iter()
        .filter(|r| r.target_rate == rate)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub tx_mode: TxMode,
    pub n_solves: usize,
    pub mean_runtime_s: f64,
    pub mean_iterations: f64,
}

/// Mean solve time per mode over the rate sweep (every rate weighs equally).
pub fn timing_rows(spec: &ExperimentSpec, rows: &[AggregateRow]) -> Vec<TimingRow> {
    let sweep = rate_sweep_rows(spec, rows);
    spec.tx_modes
        .iter()
        .map(|&mode| {
            let mine: Vec<_> = sweep.iter().filter(|r| r.tx_mode == mode).collect();
            TimingRow {
                tx_mode: mode,
                n_solves: mine.len() * spec.n_trials,
                mean_runtime_s: mean(mine.iter().map(|r| r.mean_runtime_s)),
                mean_iterations: mean(mine.iter().map(|r| r.mean_iterations)),
            }
        })
        .collect()
}

pub fn write_timings(rows: &[TimingRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["tx_mode", "n_solves", "mean_runtime_s", "mean_iterations"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.tx_mode.to_string(),
            r.n_solves.to_string(),
            format_sig6(r.mean_runtime_s),
            format_sig6(r.mean_iterations),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Which result files to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub rate_figures: bool,
    pub outage_figure: bool,
    pub timings: bool,
}

impl Outputs {
    pub const ALL: Outputs = Outputs {
        rate_figures: true,
        outage_figure: true,
        timings: true,
    };
}

/// Writes `figure2.csv`, `figure3.csv`, `figure4.csv`, `table1.csv` (as
/// selected) and `summary.json` into `dir`.
pub fn write_outputs(
    spec: &ExperimentSpec,
    rows: &[AggregateRow],
    dir: &Path,
    which: Outputs,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if which.rate_figures {
        let sweep = rate_sweep_rows(spec, rows);
        for name in ["figure2.csv", "figure3.csv"] {
            let path = dir.join(name);
            write_results(&sweep, &path)?;
            written.push(path);
        }
    }
    if which.outage_figure {
        let path = dir.join("figure4.csv");
        write_results(&outage_rows(spec, rows), &path)?;
        written.push(path);
    }
    if which.timings {
        let path = dir.join("table1.csv");
        write_timings(&timing_rows(spec, rows), &path)?;
        written.push(path);
    }
    let path = dir.join("summary.json");
    write_summary(spec, rows, &path)?;
    written.push(path);
    Ok(written)
}

/// Writes `trial_<i>.txt` channel dumps for the first `n` trials of `spec`.
pub fn dump_channels(spec: &ExperimentSpec, n: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    (0..n)
        .map(|trial| {
            let mut rng = RngStream::for_trial(spec.master_seed, trial as u64);
            let ch: ChannelSet = draw_trial(&spec.base, &mut rng)?.0;
            let path = dir.join(format!("trial_{trial}.txt"));
            ch.write_dump(&path)?;
            Ok(path)
        })
        .collect()
}

/// Flat key-value config file (TOML). Every key is optional; unknown keys
/// are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub n_tap: Option<usize>,
    pub noise_floor_dbm: Option<f64>,
    pub p_max_dbm: Option<f64>,
    pub pl_link_db: Option<f64>,
    pub pl_si_db: Option<f64>,
    pub k_factor_db: Option<f64>,
    pub amp_imp_db: Option<f64>,
    pub phase_imp_deg: Option<f64>,
    pub max_iter: Option<usize>,
    pub conv_tol: Option<f64>,
    pub target_rates_bps_hz: Option<Vec<f64>>,
    pub p_max_sweep_dbm: Option<Vec<f64>>,
    pub n_trials: Option<usize>,
    pub master_seed: Option<u64>,
    pub tx_modes: Option<Vec<TxMode>>,
    pub output_dir: Option<PathBuf>,
    pub outage_mode: Option<OutageMode>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|m| Error::format(path, m))
    }

    /// Overlays the file onto the defaults and validates the result.
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::default();
        let b = &mut spec.base;
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        set!(b.m, self.m);
        set!(b.n, self.n);
        set!(b.n_tap, self.n_tap);
        set!(b.noise_floor_dbm, self.noise_floor_dbm);
        set!(b.p_max_dbm, self.p_max_dbm);
        set!(b.pl_link_db, self.pl_link_db);
        set!(b.pl_si_db, self.pl_si_db);
        set!(b.k_factor_db, self.k_factor_db);
        set!(b.amp_imp_db, self.amp_imp_db);
        set!(b.phase_imp_deg, self.phase_imp_deg);
        set!(b.max_iter, self.max_iter);
        set!(b.conv_tol, self.conv_tol);
        set!(spec.target_rates_bps_hz, self.target_rates_bps_hz);
        set!(spec.p_max_sweep_dbm, self.p_max_sweep_dbm);
        set!(spec.n_trials, self.n_trials);
        set!(spec.master_seed, self.master_seed);
        set!(spec.tx_modes, self.tx_modes);
        set!(spec.output_dir, self.output_dir);
        set!(spec.outage_mode, self.outage_mode);
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::LinkState;
    use crate::ComplexVector;

    fn result_with(p: [f64; 2], feasible: bool) -> SolveResult {
        SolveResult {
            state: LinkState {
                v_bar: [ComplexVector::zeros(1), ComplexVector::zeros(1)],
                u: [ComplexVector::zeros(1), ComplexVector::zeros(1)],
                p,
            },
            achieved_sinr: [0.0; 2],
            residual_si_dbm: [-400.0; 2],
            iterations: 1,
            converged: true,
            feasible,
            power_outage: false,
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn outage_literal_min() {
        assert_eq!(
            outage_probability(&[result_with([0.0, 0.0], true)], 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            outage_probability(&[result_with([2.0, 3.0], true)], 1.0).unwrap(),
            1.0
        );
        assert_eq!(
            outage_probability(&[result_with([0.5, 3.0], true)], 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            outage_probability_with(&[result_with([0.5, 3.0], true)], 1.0, OutageMode::Max)
                .unwrap(),
            1.0
        );
        assert!(matches!(
            outage_probability(&[], 1.0),
            Err(Error::EmptyStatistic(_))
        ));
    }

    #[test]
    fn infeasible_counts_as_outage() {
        let rs = [
            result_with([0.1, 0.1], false),
            result_with([0.1, 0.1], true),
        ];
        assert_eq!(outage_probability(&rs, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(15.453219), "15.4532");
        assert_eq!(format_sig6(-209.1734), "-209.173");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.5), "0.5");
        assert_eq!(format_sig6(8.54e-5), "8.54e-5");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
        assert_eq!(format_sig6(f64::NAN), "NaN");
        for x in [4.81726153, -1e-7, 123456.7, 0.000123456789] {
            let back: f64 = format_sig6(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-6, "{x}");
        }
    }

    #[test]
    fn p_max_grid_includes_base() {
        let spec = ExperimentSpec {
            p_max_sweep_dbm: vec![10.0, 0.0, 30.0],
            ..ExperimentSpec::default()
        };
        assert_eq!(spec.p_max_grid(), vec![0.0, 10.0, 30.0]);
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec::default().validate().is_ok());
        let bad = ExperimentSpec {
            n_trials: 0,
            ..ExperimentSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec {
            target_rates_bps_hz: vec![],
            ..ExperimentSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentSpec {
            target_rates_bps_hz: vec![2.0, -1.0],
            ..ExperimentSpec::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_file_overlay_and_rejection() {
        let spec = ConfigFile::parse(
            "n_trials = 7\ntx_modes = [\"MRT\"]\noutage_mode = \"max\"\nn_tap = 4\n",
        )
        .unwrap()
        .into_spec()
        .unwrap();
        assert_eq!(spec.n_trials, 7);
        assert_eq!(spec.tx_modes, vec![TxMode::Mrt]);
        assert_eq!(spec.outage_mode, OutageMode::Max);
        assert_eq!(spec.base.n_tap, 4);
        assert_eq!(spec.base.m, 4);
        assert!(ConfigFile::parse("bogus_key = 1\n").is_err());
        assert!(ConfigFile::parse("n_tap = 99\n")
            .unwrap()
            .into_spec()
            .is_err());
    }
}
