//! Sweeps over `(delta, delta_c)`: phase diagrams, boundary extraction and
//! the effective-vs-full and array-size comparisons.
//!
//! Records of a [`PhaseDiagram`] are stored row-major with one row per
//! `delta_c` value, so each fixed-`delta_c` slice is contiguous.

use alloc::format;
use alloc::vec::Vec;

use crate::model::{
    build_effective_hamiltonian, build_full_hamiltonian, enumerate_basis, sector_dimension,
    BasisSet, ModelParams, SectorSpec,
};
use crate::observables::variance_polariton_number;
use crate::spectra::{ground_state, u_eff, GroundState};
use crate::{Error, Result};

/// Largest sector a scan will diagonalize densely.
pub const DEFAULT_MAX_DIM: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ModelKind {
    Effective,
    Full,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Effective => "effective",
            ModelKind::Full => "full",
        }
    }

    fn sector(self, n_sites: usize) -> SectorSpec {
        match self {
            ModelKind::Effective => SectorSpec::effective(n_sites as u32),
            ModelKind::Full => SectorSpec::full(n_sites as u32),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanGrid {
    pub delta_values: Vec<f64>,
    pub delta_c_values: Vec<f64>,
    pub n_sites: usize,
    pub model: ModelKind,
}

impl ScanGrid {
    /// Evenly spaced grid, endpoints included.
    pub fn uniform(
        delta: (f64, f64, usize),
        delta_c: (f64, f64, usize),
        n_sites: usize,
        model: ModelKind,
    ) -> Self {
        Self {
            delta_values: linspace(delta.0, delta.1, delta.2),
            delta_c_values: linspace(delta_c.0, delta_c.1, delta_c.2),
            n_sites,
            model,
        }
    }

    pub fn len(&self) -> usize {
        self.delta_values.len() * self.delta_c_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(delta, delta_c)` of record `index`.
    pub fn point(&self, index: usize) -> (f64, f64) {
        let n = self.delta_values.len();
        (self.delta_values[index % n], self.delta_c_values[index / n])
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::InvalidGrid("n_sites must be at least 1".into()));
        }
        for (name, values) in [
            ("delta", &self.delta_values),
            ("delta_c", &self.delta_c_values),
        ] {
            if values.is_empty() {
                return Err(Error::InvalidGrid(format!("{name} grid is empty")));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "{name} grid has non-finite values"
                )));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGrid(format!(
                    "{name} grid is not strictly increasing"
                )));
            }
        }
        if params.has_site_delta_overrides() {
            return Err(Error::InvalidGrid(
                "per-site delta / per-junction delta_c overrides cannot be swept".into(),
            ));
        }
        let probe = params.with_sites(self.n_sites);
        for &dc in &self.delta_c_values {
            let p = probe.with_detunings(self.delta_values[0], dc);
            match self.model {
                ModelKind::Effective => p.validate_effective()?,
                ModelKind::Full => p.validate()?,
            }
        }
        Ok(())
    }
}

pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|k| {
                    if k == points - 1 {
                        end
                    } else {
                        start + step * k as f64
                    }
                })
                .collect()
        }
    }
}

/// One grid point. `var` and `ground_energy` are absent for ratio-only maps.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRecord {
    pub delta: f64,
    pub delta_c: f64,
    pub var: Option<f64>,
    /// `kappa / U_eff(1)` at `delta' = delta + 2 kappa`.
    pub ratio: f64,
    pub ground_energy: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseDiagram {
    pub grid: ScanGrid,
    pub params: ModelParams,
    pub records: Vec<ScanRecord>,
}

impl PhaseDiagram {
    /// Records with `delta_c = grid.delta_c_values[row]`, ordered by `delta`.
    pub fn slice(&self, row: usize) -> &[ScanRecord] {
        let n = self.grid.delta_values.len();
        &self.records[row * n..(row + 1) * n]
    }
}

/// `kappa / U_eff(1)` for the global `g`, `g_c` of `params`.
pub fn hopping_ratio(params: &ModelParams, delta: f64, delta_c: f64) -> f64 {
    let kappa = params.g_c * params.g_c / delta_c;
    kappa / u_eff(delta + 2.0 * kappa, params.g)
}

/// Ground state of one model at one parameter point, and `var(N_0)`.
pub fn ground_state_variance(
    model: ModelKind,
    params: &ModelParams,
    basis: &BasisSet,
) -> Result<(GroundState, f64)> {
    let h = match model {
        ModelKind::Effective => build_effective_hamiltonian(params, basis)?,
        ModelKind::Full => build_full_hamiltonian(params, basis)?,
    };
    let gs = ground_state(&h, basis)?;
    let var = variance_polariton_number(basis, &gs.state, 0)?;
    Ok((gs, var))
}

/// A validated grid with its basis, ready to evaluate points independently
/// (in any order or concurrently).
#[derive(Debug, Clone)]
pub struct ScanPlan {
    grid: ScanGrid,
    params: ModelParams,
    basis: BasisSet,
}

impl ScanPlan {
    pub fn new(grid: &ScanGrid, params: &ModelParams, max_dim: usize) -> Result<Self> {
        grid.validate(params)?;
        let sector = grid.model.sector(grid.n_sites);
        let dim = sector_dimension(grid.n_sites, sector);
        if dim > max_dim {
            return Err(Error::DimensionGuard {
                dim,
                limit: max_dim,
            });
        }
        Ok(Self {
            grid: grid.clone(),
            params: params.with_sites(grid.n_sites),
            basis: enumerate_basis(grid.n_sites, sector),
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn evaluate(&self, index: usize) -> Result<ScanRecord> {
        let (delta, delta_c) = self.grid.point(index);
        let params = self.params.with_detunings(delta, delta_c);
        let (gs, var) = ground_state_variance(self.grid.model, &params, &self.basis)?;
        Ok(ScanRecord {
            delta,
            delta_c,
            var: Some(var),
            ratio: hopping_ratio(&params, delta, delta_c),
            ground_energy: Some(gs.energy),
            degenerate: gs.degenerate,
        })
    }

    /// Wraps records produced by [`evaluate`](Self::evaluate) in grid order.
    pub fn assemble(self, records: Vec<ScanRecord>) -> Result<PhaseDiagram> {
        if records.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: records.len(),
            });
        }
        Ok(PhaseDiagram {
            grid: self.grid,
            params: self.params,
            records,
        })
    }
}

/// Ground-state `var(N_0)` and hopping ratio at every grid point.
pub fn scan_grid(grid: &ScanGrid, params: &ModelParams) -> Result<PhaseDiagram> {
    let plan = ScanPlan::new(grid, params, DEFAULT_MAX_DIM)?;
    let records = (0..plan.len())
        .map(|i| plan.evaluate(i))
        .collect::<Result<Vec<_>>>()?;
    plan.assemble(records)
}

/// Analytic `kappa / U_eff(1)` over the grid, without diagonalizing.
pub fn ratio_map(grid: &ScanGrid, params: &ModelParams) -> Result<PhaseDiagram> {
    grid.validate(params)?;
    let records = (0..grid.len())
        .map(|i| {
            let (delta, delta_c) = grid.point(i);
            ScanRecord {
                delta,
                delta_c,
                var: None,
                ratio: hopping_ratio(params, delta, delta_c),
                ground_energy: None,
                degenerate: false,
            }
        })
        .collect();
    Ok(PhaseDiagram {
        grid: grid.clone(),
        params: params.with_sites(grid.n_sites),
        records,
    })
}

/// Level at which a slice of `var` values is cut.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Threshold {
    /// Halfway between the smallest and largest value of the slice.
    #[default]
    MidRange,
    Value(f64),
}

impl Threshold {
    fn level(self, values: &[f64]) -> f64 {
        match self {
            Threshold::Value(v) => v,
            Threshold::MidRange => {
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                0.5 * (lo + hi)
            }
        }
    }
}

/// First `x` where `ys` crosses `level`, by linear interpolation between
/// neighbouring samples. A sample exactly on the level is returned as is.
pub fn first_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    for k in 0..xs.len() {
        let a = ys[k] - level;
        if a == 0.0 {
            return Some(xs[k]);
        }
        if k + 1 < xs.len() {
            let b = ys[k + 1] - level;
            if b != 0.0 && (a < 0.0) != (b < 0.0) {
                return Some(xs[k] + (xs[k + 1] - xs[k]) * a / (a - b));
            }
        }
    }
    None
}

/// Largest `|dy/dx|` between neighbouring samples.
pub fn max_slope(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| crate::math::abs((y[1] - y[0]) / (x[1] - x[0])))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryPoint {
    pub delta_c: f64,
    pub delta_star: f64,
    /// `kappa / U_eff(1)` at `delta_star`.
    pub ratio: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Boundary {
    pub points: Vec<BoundaryPoint>,
    /// `delta_c` slices on which `var` never crosses the threshold.
    pub missing: Vec<f64>,
}

/// Per `delta_c` slice, the `delta` where `var` first crosses `criterion`.
pub fn find_boundary(diagram: &PhaseDiagram, criterion: Threshold) -> Result<Boundary> {
    let deltas = &diagram.grid.delta_values;
    if deltas.len() < 2 {
        return Err(Error::InvalidGrid(
            "boundary search needs at least two delta values".into(),
        ));
    }
    let mut points = Vec::new();
    let mut missing = Vec::new();
    for (row, &delta_c) in diagram.grid.delta_c_values.iter().enumerate() {
        let vars = diagram
            .slice(row)
            .iter()
            .map(|r| r.var)
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::InvalidGrid("diagram carries no variances".into()))?;
        let level = criterion.level(&vars);
        let flat = matches!(criterion, Threshold::MidRange)
            && vars.iter().all(|&v| crate::math::abs(v - vars[0]) < 1e-12);
        match first_crossing(deltas, &vars, level).filter(|_| !flat) {
            Some(delta_star) => points.push(BoundaryPoint {
                delta_c,
                delta_star,
                ratio: hopping_ratio(&diagram.params, delta_star, delta_c),
                threshold: level,
            }),
            None => missing.push(delta_c),
        }
    }
    Ok(Boundary { points, missing })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub delta: f64,
    pub var_eff: f64,
    pub var_full: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub max_abs_diff: f64,
}

/// Ground-state `var(N_0)` from the effective and the full Hamiltonian along
/// `delta_values` at the `delta_c` of `params`.
pub fn compare_eff_full(
    delta_values: &[f64],
    params: &ModelParams,
    max_dim: usize,
) -> Result<Comparison> {
    params.validate_effective()?;
    let n = params.n_sites;
    let full_sector = SectorSpec::full(n as u32);
    let dim = sector_dimension(n, full_sector);
    if dim > max_dim {
        return Err(Error::DimensionGuard {
            dim,
            limit: max_dim,
        });
    }
    let eff_basis = enumerate_basis(n, SectorSpec::effective(n as u32));
    let full_basis = enumerate_basis(n, full_sector);
    let rows = delta_values
        .iter()
        .map(|&delta| {
            let p = ModelParams {
                delta,
                ..params.clone()
            };
            let (_, var_eff) = ground_state_variance(ModelKind::Effective, &p, &eff_basis)?;
            let (_, var_full) = ground_state_variance(ModelKind::Full, &p, &full_basis)?;
            Ok(ComparisonRow {
                delta,
                var_eff,
                var_full,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_diff = rows
        .iter()
        .map(|r| crate::math::abs(r.var_eff - r.var_full))
        .fold(0.0, f64::max);
    Ok(Comparison { rows, max_abs_diff })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SizeCurve {
    pub n_sites: usize,
    pub deltas: Vec<f64>,
    pub vars: Vec<f64>,
    pub max_slope: f64,
    /// Mid-range crossing of the curve.
    pub crossing: Option<f64>,
}

/// Effective-model `var(N_0)` curves along `delta_values` for each ring size.
pub fn size_comparison(
    delta_values: &[f64],
    params: &ModelParams,
    sizes: &[usize],
) -> Result<Vec<SizeCurve>> {
    sizes
        .iter()
        .map(|&n| {
            let p = params.with_sites(n);
            p.validate_effective()?;
            let basis = enumerate_basis(n, SectorSpec::effective(n as u32));
            let vars = delta_values
                .iter()
                .map(|&delta| {
                    let q = ModelParams { delta, ..p.clone() };
                    ground_state_variance(ModelKind::Effective, &q, &basis).map(|(_, v)| v)
                })
                .collect::<Result<Vec<_>>>()?;
            let level = Threshold::MidRange.level(&vars);
            Ok(SizeCurve {
                n_sites: n,
                deltas: delta_values.to_vec(),
                max_slope: max_slope(delta_values, &vars),
                crossing: first_crossing(delta_values, &vars, level),
                vars,
            })
        })
        .collect()
}
