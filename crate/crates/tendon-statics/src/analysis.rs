//! Batch facilities: equilibrium-curve sampling, tension-grid sweeps,
//! finite-difference sensitivity and the independent grid-scan oracle.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    equilibrium_function, pressure_from_theta, MaterialParams, TensionInput, UnitGeometry, MAX_TILT,
};
use crate::solver::{solve_unit, verify_state, BisectionConfig, SolverError};

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error("sensitivity unavailable: flanking solve at ({t_l}, {t_s}) failed: {source}")]
    SensitivityUnavailable {
        t_l: f64,
        t_s: f64,
        source: SolverError,
    },
}

/// One point of the equilibrium-function curve. Infeasible angles carry no
/// numeric values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    pub f_value: Option<f64>,
    pub p_value: Option<f64>,
}

/// Samples the equilibrium function and pressure on a sorted grid of angles
/// within `[0, 30 deg]`. Pure: resampling yields identical values.
pub fn sample_curve(
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
    grid: &[f64],
) -> Vec<CurveSample> {
    grid.iter()
        .map(|&theta| CurveSample {
            theta,
            f_value: equilibrium_function(theta, t, geom, mat).ok(),
            p_value: pressure_from_theta(theta, t, geom, mat).ok(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Converged,
    NoSignChange,
    Infeasible,
    MaxIter,
}

impl SweepStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepStatus::Converged => "converged",
            SweepStatus::NoSignChange => "no_sign_change",
            SweepStatus::Infeasible => "infeasible",
            SweepStatus::MaxIter => "max_iter",
        }
    }
}

/// One cell of a tension sweep. `theta`/`p` are present iff the solve
/// converged and its verification passed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub t_l: f64,
    pub t_s: f64,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub iterations: usize,
    pub status: SweepStatus,
}

fn sweep_one(
    t_l: f64,
    t_s: f64,
    geom: &UnitGeometry,
    mat: &MaterialParams,
    cfg: &BisectionConfig,
) -> SweepRecord {
    let t = TensionInput { t_l, t_s };
    match solve_unit(&t, geom, mat, cfg) {
        Ok(state) => {
            let verified = state.converged && verify_state(&state, &t, geom, mat).passed;
            if verified {
                SweepRecord {
                    t_l,
                    t_s,
                    theta: Some(state.theta),
                    p: Some(state.p),
                    iterations: state.iterations,
                    status: SweepStatus::Converged,
                }
            } else {
                SweepRecord {
                    t_l,
                    t_s,
                    theta: None,
                    p: None,
                    iterations: state.iterations,
                    status: SweepStatus::MaxIter,
                }
            }
        }
        Err(e) => {
            let status = match e {
                SolverError::NoSignChange { .. } => SweepStatus::NoSignChange,
                SolverError::InfeasibleBracket { .. } | SolverError::Model(_) => {
                    SweepStatus::Infeasible
                }
                SolverError::MaxIterExceeded { .. } | SolverError::NonConverged { .. } => {
                    SweepStatus::MaxIter
                }
            };
            SweepRecord {
                t_l,
                t_s,
                theta: None,
                p: None,
                iterations: 0,
                status,
            }
        }
    }
}

/// Cartesian product sweep over the two tension grids, one record per cell,
/// row-major by `(t_l, t_s)`. Per-record failures are captured in `status`;
/// the batch never aborts. Records are computed in parallel but returned in
/// deterministic row-major order.
pub fn sweep(
    t_l_range: &[f64],
    t_s_range: &[f64],
    geom: &UnitGeometry,
    mat: &MaterialParams,
    cfg: &BisectionConfig,
) -> Vec<SweepRecord> {
    let cells: Vec<(f64, f64)> = t_l_range
        .iter()
        .flat_map(|&a| t_s_range.iter().map(move |&b| (a, b)))
        .collect();
    cells
        .par_iter()
        .map(|&(t_l, t_s)| sweep_one(t_l, t_s, geom, mat, cfg))
        .collect()
}

/// Central finite-difference sensitivity of the solved angle to each tension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub dtheta_dtl: f64,
    pub dtheta_dts: f64,
    /// Step actually used (N).
    pub h: f64,
    /// Flanking solves (theta at t_l - h, t_l + h).
    pub theta_tl_flanks: (f64, f64),
    /// Flanking solves (theta at t_s - h, t_s + h).
    pub theta_ts_flanks: (f64, f64),
}

/// Default step: 1% of the smaller tension, floored at 1e-3 N.
pub fn default_sensitivity_step(t: &TensionInput) -> f64 {
    (0.01 * t.t_l.min(t.t_s)).max(1e-3)
}

/// Central differences of `solve_unit`'s angle with respect to each tension.
/// Errors if any flanking solve fails.
pub fn sensitivity(
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
    cfg: &BisectionConfig,
    h: Option<f64>,
) -> Result<Sensitivity, AnalysisError> {
    let h = h.unwrap_or_else(|| default_sensitivity_step(t));
    let solve_at = |t_l: f64, t_s: f64| -> Result<f64, AnalysisError> {
        let flank = TensionInput { t_l, t_s };
        solve_unit(&flank, geom, mat, cfg)
            .map(|s| s.theta)
            .map_err(|e| AnalysisError::SensitivityUnavailable {
                t_l,
                t_s,
                source: e,
            })
    };
    let tl_lo = solve_at(t.t_l - h, t.t_s)?;
    let tl_hi = solve_at(t.t_l + h, t.t_s)?;
    let ts_lo = solve_at(t.t_l, t.t_s - h)?;
    let ts_hi = solve_at(t.t_l, t.t_s + h)?;
    Ok(Sensitivity {
        dtheta_dtl: (tl_hi - tl_lo) / (2.0 * h),
        dtheta_dts: (ts_hi - ts_lo) / (2.0 * h),
        h,
        theta_tl_flanks: (tl_lo, tl_hi),
        theta_ts_flanks: (ts_lo, ts_hi),
    })
}

/// An interval over which the equilibrium function changes sign. Degenerate
/// (`lo == hi`) where a sample hits zero exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChangeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SignChangeInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Independent root-localization oracle: scans `[0, 30 deg]` at `grid_step`
/// (rad) and returns every interval where the equilibrium function changes
/// sign between consecutive feasible samples, plus degenerate intervals at
/// exact zeros. Used to cross-check bisection.
pub fn oracle_scan(
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
    grid_step: f64,
) -> Vec<SignChangeInterval> {
    assert!(grid_step > 0.0, "grid_step must be > 0");
    let n = ((MAX_TILT / grid_step) + 1e-9).floor() as usize;
    let mut intervals = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let theta = (k as f64 * grid_step).min(MAX_TILT);
        match equilibrium_function(theta, t, geom, mat) {
            Ok(f) => {
                if f == 0.0 {
                    intervals.push(SignChangeInterval {
                        lo: theta,
                        hi: theta,
                    });
                } else if let Some((pt, pf)) = prev {
                    if pf != 0.0 && pf.signum() != f.signum() {
                        intervals.push(SignChangeInterval { lo: pt, hi: theta });
                    }
                }
                prev = Some((theta, f));
            }
            Err(_) => prev = None, // never bridge a sign check across an infeasible gap
        }
    }
    intervals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{reference_geometry, reference_material};

    fn deg_grid(step: f64) -> Vec<f64> {
        let n = ((30.0 / step) + 1e-9).floor() as usize;
        (0..=n).map(|k| (k as f64 * step).to_radians()).collect()
    }

    #[test]
    fn symmetric_weightless_curve_starts_at_zero() {
        let geom = reference_geometry();
        let mat = MaterialParams::new(0.0, 1.05).unwrap();
        let t = TensionInput::new(2.0, 2.0).unwrap();
        let samples = sample_curve(&t, &geom, &mat, &deg_grid(1.0));
        assert_eq!(samples[0].f_value, Some(0.0));
        assert!(samples.iter().all(|s| s.f_value.is_some()));
    }

    #[test]
    fn curve_sampling_is_pure() {
        let geom = reference_geometry();
        let mat = reference_material();
        let t = TensionInput::new(1.0, 2.0).unwrap();
        let grid = deg_grid(0.5);
        let a = sample_curve(&t, &geom, &mat, &grid);
        let b = sample_curve(&t, &geom, &mat, &grid);
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_covers_cartesian_product_row_major() {
        let geom = reference_geometry();
        let mat = reference_material();
        let cfg = BisectionConfig::default();
        let tl = [1.0, 2.0, 3.0];
        let ts = [1.0, 2.0];
        let recs = sweep(&tl, &ts, &geom, &mat, &cfg);
        assert_eq!(recs.len(), 6);
        let mut idx = 0;
        for &a in &tl {
            for &b in &ts {
                assert_eq!((recs[idx].t_l, recs[idx].t_s), (a, b));
                idx += 1;
            }
        }
    }

    #[test]
    fn symmetric_weightless_sweep_rests_at_zero() {
        let geom = reference_geometry();
        let mat = MaterialParams::new(0.0, 1.05).unwrap();
        let cfg = BisectionConfig::default();
        let grid = [0.5, 1.0, 2.0];
        let recs = sweep(&grid, &grid, &geom, &mat, &cfg);
        for r in recs.iter().filter(|r| r.t_l == r.t_s) {
            assert_eq!(r.status, SweepStatus::Converged);
            assert_eq!(r.theta, Some(0.0));
        }
    }

    #[test]
    fn weightless_sweep_records_share_the_angle_across_scaled_loads() {
        let geom = reference_geometry();
        let mat = MaterialParams::new(0.0, 1.05).unwrap();
        let cfg = BisectionConfig::default();
        let recs = sweep(
            &[1.0, 2.0, 5.0, 10.0],
            &[2.0, 4.0, 10.0, 20.0],
            &geom,
            &mat,
            &cfg,
        );
        // Diagonal cells are (k*1, k*2) for k in {1, 2, 5, 10}.
        let base = recs[0].theta.unwrap();
        for (i, k) in [(5, 2.0), (10, 5.0), (15, 10.0)] {
            assert_eq!(recs[i].status, SweepStatus::Converged);
            assert_eq!((recs[i].t_l, recs[i].t_s), (k, 2.0 * k));
            assert!((recs[i].theta.unwrap() - base).abs() <= 1e-9);
        }
    }

    #[test]
    fn sweep_order_is_independent_of_parallelism() {
        let geom = reference_geometry();
        let mat = reference_material();
        let cfg = BisectionConfig::default();
        let tl = [0.5, 1.0, 1.5, 2.0, 2.5];
        let ts = [0.5, 1.0, 1.5, 2.0, 2.5];
        let par = sweep(&tl, &ts, &geom, &mat, &cfg);
        let ser: Vec<SweepRecord> = tl
            .iter()
            .flat_map(|&a| ts.iter().map(move |&b| (a, b)))
            .map(|(a, b)| sweep_one(a, b, &geom, &mat, &cfg))
            .collect();
        assert_eq!(par, ser);
    }

    #[test]
    fn sensitivity_is_antisymmetric_at_symmetric_point() {
        let geom = reference_geometry();
        let mat = MaterialParams::new(0.0, 1.05).unwrap();
        let cfg = BisectionConfig::default();
        let t = TensionInput::new(1.5, 1.5).unwrap();
        let s = sensitivity(&t, &geom, &mat, &cfg, Some(0.01)).unwrap();
        assert_eq!(s.dtheta_dtl, -s.dtheta_dts);
        assert!(s.dtheta_dts > 0.0);
    }

    #[test]
    fn sensitivity_at_reference_point_is_finite_and_step_stable() {
        let geom = reference_geometry();
        let mat = reference_material();
        let cfg = BisectionConfig::default();
        let t = TensionInput::new(1.0, 2.0).unwrap();
        let s1 = sensitivity(&t, &geom, &mat, &cfg, Some(0.01)).unwrap();
        let s2 = sensitivity(&t, &geom, &mat, &cfg, Some(0.02)).unwrap();
        assert!(s1.dtheta_dtl.is_finite() && s1.dtheta_dts.is_finite());
        assert!(s1.dtheta_dtl < 0.0, "more t_l should reduce the tilt");
        assert!(s1.dtheta_dts > 0.0, "more t_s should increase the tilt");
        assert!((s2.dtheta_dtl - s1.dtheta_dtl).abs() / s1.dtheta_dtl.abs() < 0.05);
        assert!((s2.dtheta_dts - s1.dtheta_dts).abs() / s1.dtheta_dts.abs() < 0.05);
    }

    #[test]
    fn oracle_scan_brackets_the_bisection_root_at_millidegree_resolution() {
        let geom = reference_geometry();
        let mat = reference_material();
        let t = TensionInput::new(1.0, 2.0).unwrap();
        let step = 0.001_f64.to_radians();
        let intervals = oracle_scan(&t, &geom, &mat, step);
        assert_eq!(intervals.len(), 1);
        let s = solve_unit(&t, &geom, &mat, &BisectionConfig::default()).unwrap();
        assert!(intervals[0].contains(s.theta));
        assert!(intervals[0].hi - intervals[0].lo <= step * 1.0001);
    }

    #[test]
    fn oracle_scan_reports_root_at_origin_for_unloaded_unit() {
        let geom = reference_geometry();
        let mat = MaterialParams::new(0.0, 1.05).unwrap();
        let t = TensionInput::new(0.0, 0.0).unwrap();
        let step = 1.0_f64.to_radians();
        let intervals = oracle_scan(&t, &geom, &mat, step);
        assert!(intervals.iter().any(|iv| iv.contains(0.0)));
    }
}
