//! Bracketed bisection over the equilibrium function and assembly of the
//! solved state.

use thiserror::Error;

use crate::model::{
    self, contact_integrals, equilibrium_function, force_resultants, pressure_from_theta,
    residuals, EquilibriumState, MaterialParams, ModelError, TensionInput, UnitGeometry,
    COULOMB_SLACK, FORCE_RESIDUAL_TOL, MAX_TILT, MOMENT_RESIDUAL_TOL,
};

/// Step used to shrink the bracket inward past infeasible endpoints (0.1 deg).
pub const ENDPOINT_SCAN_STEP: f64 = 0.1 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("no sign change over [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("function undefined inside the bracket at {at}")]
    InfeasibleBracket { at: f64 },
    #[error("bracket [{lo}, {hi}] not below tolerance after {iterations} iterations")]
    MaxIterExceeded { lo: f64, hi: f64, iterations: usize },
    #[error("solve did not converge; best bracket [{lo}, {hi}] after {iterations} iterations")]
    NonConverged { lo: f64, hi: f64, iterations: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Bisection bracket and termination settings. Angle units are the caller's;
/// `tol` bounds the final bracket width in the same unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl BisectionConfig {
    pub fn new(lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Self, ModelError> {
        let cfg = Self {
            lo,
            hi,
            tol,
            max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo >= self.hi {
            return Err(ModelError::Domain(format!(
                "bisection range requires lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(ModelError::Domain(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        let needed = Self::iteration_bound(self.lo, self.hi, self.tol);
        if self.max_iter < needed {
            return Err(ModelError::Domain(format!(
                "max_iter = {} cannot reach tol (bracket halving needs {needed})",
                self.max_iter
            )));
        }
        Ok(())
    }

    /// `ceil(log2((hi - lo) / tol))`: midpoint evaluations needed to shrink
    /// the bracket below `tol`.
    pub fn iteration_bound(lo: f64, hi: f64, tol: f64) -> usize {
        let ratio = (hi - lo) / tol;
        if ratio <= 1.0 {
            0
        } else {
            ratio.log2().ceil() as usize
        }
    }
}

impl Default for BisectionConfig {
    /// The full mechanical range `[0, 30 deg]` with a bracket tolerance of
    /// 1e-10 degrees.
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: MAX_TILT,
            tol: 1e-10_f64.to_radians(),
            max_iter: 64,
        }
    }
}

/// Result of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub f_at_root: f64,
    pub iterations: usize,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

/// Bisection on `f` over `cfg`'s bracket. `f` returns `None` where it is
/// undefined; encountering such a point aborts with `InfeasibleBracket`
/// rather than fabricating a sign.
///
/// `f(mid) == 0` exactly terminates immediately with `root = mid`; otherwise
/// the sub-bracket whose endpoints change sign is kept. Deterministic for
/// identical inputs.
pub fn bisect<F>(mut f: F, cfg: &BisectionConfig) -> Result<RootResult, SolverError>
where
    F: FnMut(f64) -> Option<f64>,
{
    cfg.validate()?;
    let mut lo = cfg.lo;
    let mut hi = cfg.hi;
    let f_lo = f(lo).ok_or(SolverError::InfeasibleBracket { at: lo })?;
    let f_hi = f(hi).ok_or(SolverError::InfeasibleBracket { at: hi })?;
    if f_lo == 0.0 {
        return Ok(RootResult {
            root: lo,
            f_at_root: 0.0,
            iterations: 0,
            bracket_lo: lo,
            bracket_hi: lo,
        });
    }
    if f_hi == 0.0 {
        return Ok(RootResult {
            root: hi,
            f_at_root: 0.0,
            iterations: 0,
            bracket_lo: hi,
            bracket_hi: hi,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SolverError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let mut f_lo = f_lo;
    let mut iterations = 0;
    while hi - lo > cfg.tol {
        if iterations >= cfg.max_iter {
            return Err(SolverError::MaxIterExceeded { lo, hi, iterations });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // f64 exhausted below tol; the bracket cannot shrink further.
            return Err(SolverError::MaxIterExceeded { lo, hi, iterations });
        }
        let f_mid = f(mid).ok_or(SolverError::InfeasibleBracket { at: mid })?;
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(RootResult {
                root: mid,
                f_at_root: 0.0,
                iterations,
                bracket_lo: mid,
                bracket_hi: mid,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let f_at_root = f(root).ok_or(SolverError::InfeasibleBracket { at: root })?;
    Ok(RootResult {
        root,
        f_at_root,
        iterations,
        bracket_lo: lo,
        bracket_hi: hi,
    })
}

/// Shrinks an endpoint-infeasible bracket inward at [`ENDPOINT_SCAN_STEP`]
/// until both ends are feasible; errors if no feasible point exists.
fn feasible_bracket<F>(f: &mut F, cfg: &BisectionConfig) -> Result<(f64, f64), SolverError>
where
    F: FnMut(f64) -> Option<f64>,
{
    let mut lo = cfg.lo;
    let mut hi = cfg.hi;
    if f(lo).is_none() {
        loop {
            lo += ENDPOINT_SCAN_STEP;
            if lo >= hi {
                return Err(SolverError::InfeasibleBracket { at: cfg.lo });
            }
            if f(lo).is_some() {
                break;
            }
        }
    }
    if f(hi).is_none() {
        loop {
            hi -= ENDPOINT_SCAN_STEP;
            if hi <= lo {
                // lo itself is feasible; a zero-width range has no bracket.
                return Err(SolverError::NoSignChange {
                    lo,
                    hi: lo,
                    f_lo: f(lo).unwrap_or(f64::NAN),
                    f_hi: f(lo).unwrap_or(f64::NAN),
                });
            }
            if f(hi).is_some() {
                break;
            }
        }
    }
    Ok((lo, hi))
}

/// Solves one unit: bisects the equilibrium function, computes the pressure
/// at the root and fills the full state with residuals.
///
/// `t_l > t_s` tilts the unit the other way; the mirrored problem (tensions
/// swapped) is solved and the angle negated.
pub fn solve_unit(
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
    cfg: &BisectionConfig,
) -> Result<EquilibriumState, SolverError> {
    t.validate()?;
    geom.validate()?;
    mat.validate()?;
    cfg.validate()?;

    let mirrored = t.t_l > t.t_s;
    let t_solved = if mirrored {
        TensionInput {
            t_l: t.t_s,
            t_s: t.t_l,
        }
    } else {
        *t
    };

    let mut f = |theta: f64| equilibrium_function(theta, &t_solved, geom, mat).ok();
    let (lo, hi) = feasible_bracket(&mut f, cfg)?;
    let run = BisectionConfig { lo, hi, ..*cfg };
    let root = match bisect(&mut f, &run) {
        Ok(r) => r,
        Err(SolverError::MaxIterExceeded { lo, hi, iterations }) => {
            return Err(SolverError::NonConverged { lo, hi, iterations })
        }
        Err(e) => return Err(e),
    };

    let p = pressure_from_theta(root.root, &t_solved, geom, mat)?;
    let ci = contact_integrals(geom, root.root)?;
    let resultants = force_resultants(p, mat.mu_s, &ci)?;
    let res = residuals(root.root, p, &t_solved, geom, mat)?;
    let converged = res.fx.abs().max(res.fz.abs()) <= FORCE_RESIDUAL_TOL
        && res.moment.abs() <= MOMENT_RESIDUAL_TOL
        && p >= 0.0;

    Ok(EquilibriumState {
        theta: if mirrored { -root.root } else { root.root },
        p,
        resultants,
        residual_fx: res.fx,
        residual_fz: res.fz,
        residual_m: res.moment,
        converged,
        iterations: root.iterations,
    })
}

/// One named check of a verification report.
#[derive(Debug, Clone)]
pub struct VerificationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify_state`]: every check with its detail, plus the
/// overall flag.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub checks: Vec<VerificationCheck>,
    pub passed: bool,
}

impl VerificationReport {
    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.passed &= passed;
        self.checks.push(VerificationCheck {
            name,
            passed,
            detail,
        });
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<24} {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        write!(f, "overall: {}", if self.passed { "pass" } else { "FAIL" })
    }
}

/// Sign, range, residual and Coulomb-bound checks of a solved state.
/// Always produces a report; never errors.
pub fn verify_state(
    s: &EquilibriumState,
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
) -> VerificationReport {
    let mut rep = VerificationReport {
        checks: Vec::new(),
        passed: true,
    };

    rep.push(
        "pressure-nonnegative",
        s.p >= 0.0,
        format!("p = {:.6e} Pa", s.p),
    );
    rep.push(
        "theta-range",
        s.theta.abs() <= MAX_TILT + 1e-12,
        format!("|theta| = {:.6} deg (limit 30)", s.theta.abs().to_degrees()),
    );
    rep.push(
        "normal-force-sign",
        s.resultants.n_total >= 0.0,
        format!("N = {:.6e} N", s.resultants.n_total),
    );
    rep.push(
        "friction-component-signs",
        s.resultants.ff_xg >= 0.0 && s.resultants.ff_zg >= 0.0 && s.resultants.ff_tangential >= 0.0,
        format!(
            "F_fXG = {:.6e}, F_fZG = {:.6e}, F_f = {:.6e} N",
            s.resultants.ff_xg, s.resultants.ff_zg, s.resultants.ff_tangential
        ),
    );
    rep.push(
        "coulomb-bound",
        s.resultants.ff_tangential <= mat.mu_s * s.resultants.n_total + COULOMB_SLACK,
        format!(
            "F_f = {:.6e} <= mu_s N = {:.6e}",
            s.resultants.ff_tangential,
            mat.mu_s * s.resultants.n_total
        ),
    );

    // Recompute the residuals from (theta, p); mirrored states verify their
    // mirror image.
    let (theta, t_eval) = if s.theta < 0.0 {
        (
            -s.theta,
            TensionInput {
                t_l: t.t_s,
                t_s: t.t_l,
            },
        )
    } else {
        (s.theta, *t)
    };
    match residuals(theta, s.p, &t_eval, geom, mat) {
        Ok(res) => {
            rep.push(
                "force-residuals",
                res.fx.abs() <= FORCE_RESIDUAL_TOL && res.fz.abs() <= FORCE_RESIDUAL_TOL,
                format!(
                    "|fx| = {:.3e}, |fz| = {:.3e} N (tol {FORCE_RESIDUAL_TOL:.0e})",
                    res.fx.abs(),
                    res.fz.abs()
                ),
            );
            rep.push(
                "moment-residual",
                res.moment.abs() <= MOMENT_RESIDUAL_TOL,
                format!(
                    "|m| = {:.3e} N*m (tol {MOMENT_RESIDUAL_TOL:.0e})",
                    res.moment.abs()
                ),
            );
        }
        Err(e) => {
            rep.push("force-residuals", false, format!("not evaluable: {e}"));
            rep.push("moment-residual", false, String::new());
        }
    }
    rep.push(
        "converged-flag",
        s.converged,
        format!("converged = {}", s.converged),
    );
    rep
}

/// Reference geometry used across the test suite and bundled fixtures:
/// l = 8 mm, r = 7.8 mm, delta = 1 mm, contact zone 60..88.49 deg.
/// delta and the unit mass have no published reference values; these are
/// the documented defaults of this project.
pub fn reference_geometry() -> UnitGeometry {
    UnitGeometry::new(
        0.008,
        0.0078,
        0.001,
        60.0_f64.to_radians(),
        88.49_f64.to_radians(),
    )
    .expect("reference geometry is valid")
}

/// Reference material: m = 10 g (project default, see [`reference_geometry`]),
/// standard gravity, mu_s = 1.05 (aluminium on aluminium).
pub fn reference_material() -> MaterialParams {
    MaterialParams::new(0.01, 1.05).expect("reference material is valid")
}

pub use model::STANDARD_GRAVITY;
