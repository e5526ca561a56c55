//! Run configuration: a TOML file, `--set section.key=value` overrides and a
//! few dedicated flags, applied in that order.

use std::path::Path;

use jch_core::dynamics::{RampShape, TimescaleParams};
use jch_core::scan::{linspace, ModelKind, ScanGrid, Threshold};
use jch_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub n_sites: usize,
    pub g: f64,
    pub g_c: f64,
    pub delta: f64,
    pub delta_c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_site_delta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_site_g: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_junction_gc: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_junction_delta_c: Option<Vec<f64>>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            n_sites: 3,
            g: 1.0,
            g_c: 1.0,
            delta: 0.0,
            delta_c: 10.0,
            per_site_delta: None,
            per_site_g: None,
            per_junction_gc: None,
            per_junction_delta_c: None,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            n_sites: self.n_sites,
            g: self.g,
            g_c: self.g_c,
            delta: self.delta,
            delta_c: self.delta_c,
            per_site_delta: self.per_site_delta.clone(),
            per_site_g: self.per_site_g.clone(),
            per_junction_gc: self.per_junction_gc.clone(),
            per_junction_delta_c: self.per_junction_delta_c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub delta_c_min: f64,
    pub delta_c_max: f64,
    pub delta_c_points: usize,
    pub model: ModelKind,
    pub max_dim: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            delta_min: -5.0,
            delta_max: 10.0,
            delta_points: 61,
            delta_c_min: 10.0,
            delta_c_max: 100.0,
            delta_c_points: 31,
            model: ModelKind::Effective,
            max_dim: jch_core::scan::DEFAULT_MAX_DIM,
        }
    }
}

impl GridSection {
    pub fn grid(&self, n_sites: usize) -> ScanGrid {
        ScanGrid::uniform(
            (self.delta_min, self.delta_max, self.delta_points),
            (self.delta_c_min, self.delta_c_max, self.delta_c_points),
            n_sites,
            self.model,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub model: ModelKind,
    pub levels: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            model: ModelKind::Effective,
            levels: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl BoundarySection {
    pub fn threshold(&self) -> Threshold {
        self.threshold.map_or(Threshold::MidRange, Threshold::Value)
    }
}

/// `points` evenly spaced detunings over `[delta_min, delta_max]`.
pub fn line_deltas(delta_min: f64, delta_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 || delta_min.is_nan() || delta_max.is_nan() || delta_min >= delta_max {
        return Err(CliError::Config(format!(
            "need points >= 2 and delta_min < delta_max, got {points} points over [{delta_min}, {delta_max}]"
        )));
    }
    Ok(linspace(delta_min, delta_max, points))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    pub max_dim: usize,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            delta_min: -5.0,
            delta_max: 10.0,
            points: 31,
            max_dim: jch_core::scan::DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SizesSection {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
    pub sites: Vec<usize>,
}

impl Default for SizesSection {
    fn default() -> Self {
        Self {
            delta_min: -5.0,
            delta_max: 10.0,
            points: 31,
            sites: vec![2, 3, 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// Exact ground state at `delta_start`.
    Ground,
    /// Product of single-site lower polaritons.
    Mott,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RampSection {
    pub shape: RampShape,
    pub delta_start: f64,
    pub delta_end: f64,
    /// Ramp duration in units of `1/kappa`.
    pub duration_kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub snapshots: usize,
    pub initial: InitialState,
}

impl Default for RampSection {
    fn default() -> Self {
        Self {
            shape: RampShape::Linear,
            delta_start: -2.0,
            delta_end: 10.0,
            duration_kappa: 50.0,
            dt: None,
            snapshots: 100,
            initial: InitialState::Ground,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasuredState {
    Mott,
    Superfluid,
    Ground,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSection {
    pub state: MeasuredState,
    pub site: usize,
    pub shots: u64,
    pub bootstrap: usize,
    pub g_c_hz: f64,
    pub lifetime_ns: f64,
}

impl Default for MeasureSection {
    fn default() -> Self {
        let ts = TimescaleParams::default();
        Self {
            state: MeasuredState::Superfluid,
            site: 0,
            shots: 10_000,
            bootstrap: 400,
            g_c_hz: ts.g_c_hz,
            lifetime_ns: ts.polariton_lifetime_ns,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub model: ModelSection,
    pub grid: GridSection,
    pub spectrum: SpectrumSection,
    pub boundary: BoundarySection,
    pub compare: CompareSection,
    pub sizes: SizesSection,
    pub ramp: RampSection,
    pub measure: MeasureSection,
    pub run: RunSection,
}

impl Config {
    /// Reads `path` (if any), then applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item.split_once('=').ok_or_else(|| {
        CliError::Config(format!("override `{item}` is not of the form key=value"))
    })?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!(
            "override key `{key}` is malformed"
        )));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (last, parents) = path
        .split_last()
        .expect("split yields at least one segment");
    let mut node = table;
    for part in parents {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("`{part}` in override `{key}` is not a section"))
        })?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Every configuration key with its default and meaning.
pub const KEY_DOCS: &[(&str, &str, &str)] = &[
    ("model.n_sites", "3", "ring size"),
    (
        "model.g",
        "1.0",
        "site qubit-resonator coupling; the energy unit",
    ),
    ("model.g_c", "1.0", "coupler qubit-resonator coupling"),
    (
        "model.delta",
        "0.0",
        "site qubit detuning from the resonators",
    ),
    (
        "model.delta_c",
        "10.0",
        "coupler qubit detuning (>= 10 g_c for the effective model)",
    ),
    (
        "model.per_site_delta",
        "unset",
        "list overriding delta site by site",
    ),
    (
        "model.per_site_g",
        "unset",
        "list overriding g site by site",
    ),
    (
        "model.per_junction_gc",
        "unset",
        "list overriding g_c per junction (i, i+1)",
    ),
    (
        "model.per_junction_delta_c",
        "unset",
        "list overriding delta_c per junction",
    ),
    ("grid.delta_min", "-5.0", "first delta of the scan"),
    ("grid.delta_max", "10.0", "last delta of the scan"),
    ("grid.delta_points", "61", "number of delta values"),
    ("grid.delta_c_min", "10.0", "first delta_c of the scan"),
    ("grid.delta_c_max", "100.0", "last delta_c of the scan"),
    ("grid.delta_c_points", "31", "number of delta_c values"),
    (
        "grid.model",
        "effective",
        "Hamiltonian scanned: effective | full",
    ),
    (
        "grid.max_dim",
        "4000",
        "largest sector dimension a scan accepts",
    ),
    (
        "spectrum.model",
        "effective",
        "Hamiltonian diagonalized: effective | full",
    ),
    (
        "spectrum.levels",
        "10",
        "number of lowest eigenvalues reported",
    ),
    (
        "boundary.threshold",
        "unset",
        "var level of the crossing; unset means mid-range of each slice",
    ),
    ("compare.delta_min", "-5.0", "first delta of the comparison"),
    ("compare.delta_max", "10.0", "last delta of the comparison"),
    ("compare.points", "31", "number of delta values"),
    (
        "compare.max_dim",
        "4000",
        "largest full-model sector accepted",
    ),
    (
        "sizes.delta_min",
        "-5.0",
        "first delta of the size comparison",
    ),
    (
        "sizes.delta_max",
        "10.0",
        "last delta of the size comparison",
    ),
    ("sizes.points", "31", "number of delta values"),
    ("sizes.sites", "[2, 3, 4]", "ring sizes compared"),
    (
        "ramp.shape",
        "linear",
        "detuning profile: linear | smoothstep",
    ),
    ("ramp.delta_start", "-2.0", "delta at t = 0"),
    ("ramp.delta_end", "10.0", "delta at the end of the ramp"),
    (
        "ramp.duration_kappa",
        "50.0",
        "ramp duration in units of 1/kappa",
    ),
    (
        "ramp.dt",
        "unset",
        "integration step in 1/g; unset picks one from the spectral width",
    ),
    (
        "ramp.snapshots",
        "100",
        "number of trajectory intervals written",
    ),
    (
        "ramp.initial",
        "ground",
        "initial state: ground (exact) | mott (analytic)",
    ),
    (
        "measure.state",
        "superfluid",
        "measured state: mott | superfluid | ground (at model.delta)",
    ),
    ("measure.site", "0", "measured site"),
    ("measure.shots", "10000", "number of protocol repetitions"),
    (
        "measure.bootstrap",
        "400",
        "bootstrap resamples for the standard error",
    ),
    (
        "measure.g_c_hz",
        "2.0e8",
        "physical g_c / 2pi for the timescale report",
    ),
    (
        "measure.lifetime_ns",
        "2000.0",
        "polariton lifetime for the timescale report",
    ),
    (
        "run.seed",
        "unset",
        "RNG seed (required by measure); --seed wins",
    ),
    (
        "run.threads",
        "unset",
        "worker threads; --threads or JCH_THREADS win",
    ),
    (
        "run.format",
        "csv",
        "output format: csv | json; --format wins",
    ),
];

/// Help text listing the keys of `sections`.
pub fn key_help(sections: &[&str]) -> String {
    let mut out = String::from("Config keys (TOML sections, or --set section.key=value):\n");
    for (key, default, doc) in KEY_DOCS {
        let section = key.split('.').next().unwrap_or_default();
        if sections.contains(&section) {
            out.push_str(&format!("  {key:<28} {doc} [default: {default}]\n"));
        }
    }
    out
}
