use jch_core::observables::variance_polariton_number;
use jch_core::scan::{
    compare_eff_full, find_boundary, linspace, ratio_map, scan_grid, size_comparison, ModelKind,
    ScanGrid, ScanPlan, Threshold, DEFAULT_MAX_DIM,
};
use jch_core::spectra::ground_state;
use jch_core::{build_effective_hamiltonian, ModelParams};

fn coarse_grid() -> ScanGrid {
    ScanGrid::uniform((-5.0, 10.0, 31), (10.0, 100.0, 10), 3, ModelKind::Effective)
}

#[test]
fn coarse_boundary_sits_near_the_quoted_ratio() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let diagram = scan_grid(&coarse_grid(), &params).unwrap();
    let boundary = find_boundary(&diagram, Threshold::MidRange).unwrap();
    assert!(boundary.missing.is_empty());
    assert_eq!(boundary.points.len(), 10);
    for p in &boundary.points {
        assert!((0.2..=0.4).contains(&p.ratio), "{p:?}");
    }
    // a larger coupler detuning needs a larger delta to reach the same ratio
    assert!(boundary
        .points
        .windows(2)
        .all(|w| w[0].delta_star < w[1].delta_star));
}

#[test]
fn endpoints_are_ordered_on_every_slice() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let diagram = scan_grid(&coarse_grid(), &params).unwrap();
    for row in 0..diagram.grid.delta_c_values.len() {
        let slice = diagram.slice(row);
        let first = slice.first().unwrap().var.unwrap();
        let last = slice.last().unwrap().var.unwrap();
        assert!(first < 0.01 && last > 0.5, "row {row}: {first} {last}");
    }
}

#[test]
fn every_tenth_point_is_site_independent() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let grid = coarse_grid();
    let plan = ScanPlan::new(&grid, &params, DEFAULT_MAX_DIM).unwrap();
    let basis = plan.basis().clone();
    for index in (0..grid.len()).step_by(10) {
        let (delta, delta_c) = grid.point(index);
        let p = params.with_detunings(delta, delta_c);
        let gs = ground_state(&build_effective_hamiltonian(&p, &basis).unwrap(), &basis).unwrap();
        let v0 = variance_polariton_number(&basis, &gs.state, 0).unwrap();
        let v1 = variance_polariton_number(&basis, &gs.state, 1).unwrap();
        assert!((v0 - v1).abs() <= 1e-9, "index {index}");
        assert_eq!(plan.evaluate(index).unwrap().var, Some(v0));
    }
}

#[test]
fn scans_are_bit_reproducible() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let grid = ScanGrid::uniform((-5.0, 10.0, 7), (10.0, 100.0, 3), 3, ModelKind::Effective);
    let a = scan_grid(&grid, &params).unwrap();
    let b = scan_grid(&grid, &params).unwrap();
    assert_eq!(a, b);
    // out-of-order evaluation gives the same records
    let plan = ScanPlan::new(&grid, &params, DEFAULT_MAX_DIM).unwrap();
    let mut reversed: Vec<_> = (0..grid.len())
        .rev()
        .map(|i| (i, plan.evaluate(i).unwrap()))
        .collect();
    reversed.sort_by_key(|(i, _)| *i);
    let c = plan
        .assemble(reversed.into_iter().map(|(_, r)| r).collect())
        .unwrap();
    assert_eq!(a, c);
}

#[test]
fn effective_tracks_full_model() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let cmp = compare_eff_full(&linspace(-5.0, 10.0, 16), &params, DEFAULT_MAX_DIM).unwrap();
    assert_eq!(cmp.rows.len(), 16);
    assert!(cmp.max_abs_diff <= 0.05, "{}", cmp.max_abs_diff);
    // the full model also runs on its own grid
    let grid = ScanGrid::uniform((-5.0, 10.0, 4), (10.0, 20.0, 2), 3, ModelKind::Full);
    let diagram = scan_grid(&grid, &params).unwrap();
    assert!(diagram.records.iter().all(|r| r.var.is_some()));
}

#[test]
fn larger_rings_sharpen_the_transition() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let curves = size_comparison(&linspace(-5.0, 10.0, 31), &params, &[2, 3, 4]).unwrap();
    assert!(curves[0].max_slope < curves[1].max_slope);
    assert!(curves[1].max_slope < curves[2].max_slope);
    let crossings: Vec<f64> = curves.iter().map(|c| c.crossing.unwrap()).collect();
    let spread = crossings.iter().cloned().fold(f64::MIN, f64::max)
        - crossings.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 1.0, "{crossings:?}");
}

#[test]
fn ratio_map_spans_four_decades() {
    let params = ModelParams::uniform(3, 0.0, 10.0);
    let grid = ScanGrid::uniform((-5.0, 10.0, 61), (10.0, 100.0, 31), 3, ModelKind::Effective);
    let map = ratio_map(&grid, &params).unwrap();
    let min = map.records.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    let max = map.records.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    assert!(min < 1e-2 && max > 10.0, "{min} {max}");
}
