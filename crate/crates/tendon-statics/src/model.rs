//! Static model of a single tendon-driven unit resting on a ball-socket joint.
//!
//! # Geometry and frames
//!
//! The unit carries a spherical socket of radius `r` that rests on its
//! neighbour's ball. The joint centre is the origin. The unit's local frame
//! has `z_L` along its symmetry axis (towards its own centre of gravity) and
//! tilts by the rotation angle `theta` about the global Y axis, so in global
//! coordinates
//!
//! ```text
//! x_L = (cos t, 0, -sin t)      z_L = (sin t, 0, cos t)
//! ```
//!
//! Contact occurs on a spherical zone of radius `r` between polar angles
//! `theta1` and `theta2`, measured from the unit's own axis `z_L`. A surface
//! point is
//!
//! ```text
//! P = r (sin q cos u, sin q sin u, cos q),   q in [theta1, theta2], u in [0, 2 pi)
//! dA = r^2 sin q  dq du
//! ```
//!
//! # Traction fields and antiderivatives
//!
//! Uniform pressure `p` acts radially on the zone; the traction on the unit is
//! `+p P_hat` (the ball pushes the socket away from the joint centre). Its
//! azimuthal components cancel, leaving an axial resultant `N = p * A_n` along
//! `+z_L` with
//!
//! ```text
//! A_n = pi r^2 (sin^2 theta2 - sin^2 theta1)
//! ```
//!
//! Tangential traction opposes the relative slip of the joint surfaces. For a
//! tilt rotation about Y the slip direction at `P` is `y_hat x P_hat`
//! normalised; the transmitted traction is Coulomb traction scaled by a
//! mobilization factor: it ramps with `gamma(t) = 2 sin(t/2)` — the net
//! (chord) slip a contact point has accumulated between the upright pose and
//! tilt `t`, divided by its ring radius — and saturates where the tangential
//! resultant reaches the Coulomb limit `mu_s N` of the lumped joint contact.
//! No net slip has occurred at `t = 0`, so no tangential traction is
//! transmitted there. Pointwise:
//!
//! ```text
//! t_f = -mu_s * p * min(gamma(t), A_n / A_t) * (y_hat x P_hat) / |y_hat x P_hat|
//! ```
//!
//! The azimuthal integral of the unit slip field has the closed form
//! `A_t = 4 r^2 [ E(k) - (1 - k^2) K(k) ]` evaluated between `k = sin theta1`
//! and `k = sin theta2` (complete elliptic integrals, modulus `k`), so the
//! friction resultant has magnitude `mu_s * p * min(gamma A_t, A_n)` directed
//! along `-x_L` and never exceeds `mu_s N`.
//!
//! The four antiderivatives stored in [`ContactIntegrals`] are the projections
//! of these two fields per unit pressure, with the sign convention of the
//! force-balance equations (the friction X term enters with a minus sign, so
//! `c_fxg_fric` is the projection on `-X_G`):
//!
//! ```text
//! c_fxg_force = A_n sin t            c_fzg_force = A_n cos t
//! c_fxg_fric  = gamma A_t cos t      c_fzg_fric  = gamma A_t sin t
//! ```
//!
//! where `gamma` is the saturated mobilization `min(2 sin(t/2), A_n / A_t)`.
//!
//! # Equilibrium equations
//!
//! With `S = t_l + t_s` pulling along `-z_L`, `N = p A_n` pushing along
//! `+z_L`, weight `m g` along `-Z_G` and friction components
//! `F_fXG, F_fZG >= 0` in the drawn directions `(-X_G, +Z_G)`:
//!
//! ```text
//! (1)  (N - S) sin t - F_fXG            = 0
//! (2)  (N - S) cos t + F_fZG - m g      = 0
//! (3)  (r + delta)(t_s - t_l) - F_f r + m g l sin t = 0
//! ```
//!
//! The transmitted friction force has magnitude pinned at the mobilized
//! Coulomb limit `F_f = mu_s p W`, `W = hypot(c_fxg_fric, c_fzg_fric)`, and
//! direction determined by the force balance. Substituting the components
//! required by (1)-(2) into `F_fXG^2 + F_fZG^2 = (mu_s p W)^2` gives the
//! quadratic solved by [`pressure_from_theta`]:
//!
//! ```text
//! (A_n^2 - mu_s^2 W^2) p^2 - 2 A_n (S + mg cos t) p + (S^2 + 2 S mg cos t + (mg)^2) = 0
//! ```
//!
//! [`equilibrium_function`] is the moment balance (3) evaluated at that
//! pressure, oriented so that it increases with the tilt:
//! `f(t) = mu_s p(t) W(t) r - (r + delta)(t_s - t_l) - m g l sin t`.
//! Its root is the equilibrium angle.

use thiserror::Error;

/// Force residual threshold for a converged state (N).
pub const FORCE_RESIDUAL_TOL: f64 = 1e-6;
/// Moment residual threshold for a converged state (N*m).
pub const MOMENT_RESIDUAL_TOL: f64 = 1e-8;
/// Absolute slack allowed on the Coulomb resultant bound.
pub const COULOMB_SLACK: f64 = 1e-12;
/// Mechanical tilt stop of the unit (rad).
pub const MAX_TILT: f64 = std::f64::consts::PI / 6.0;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    /// The pressure quadratic has no non-negative real root at this angle:
    /// no equilibrium pressure can support the load there.
    #[error("no physical pressure at theta = {theta} rad")]
    NoPhysicalPressure { theta: f64 },
}

fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}

/// Joint and cable geometry of one unit. Lengths in metres, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitGeometry {
    /// Distance from the joint centre to the unit's centre of gravity.
    pub l: f64,
    /// Radius of the ball joint.
    pub r: f64,
    /// Distance from the socket-joint edge to the wire cable.
    pub delta: f64,
    /// First polar angle of the contact zone.
    pub theta1: f64,
    /// Second polar angle of the contact zone.
    pub theta2: f64,
}

impl UnitGeometry {
    pub fn new(l: f64, r: f64, delta: f64, theta1: f64, theta2: f64) -> Result<Self, ModelError> {
        let g = Self {
            l,
            r,
            delta,
            theta1,
            theta2,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.l <= 0.0 || !self.l.is_finite() {
            return Err(domain(format!("l must be > 0, got {}", self.l)));
        }
        if self.r <= 0.0 || !self.r.is_finite() {
            return Err(domain(format!("r must be > 0, got {}", self.r)));
        }
        if self.delta < 0.0 || !self.delta.is_finite() {
            return Err(domain(format!("delta must be >= 0, got {}", self.delta)));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(0.0 <= self.theta1 && self.theta1 <= self.theta2 && self.theta2 <= half_pi) {
            return Err(domain(format!(
                "contact zone must satisfy 0 <= theta1 <= theta2 <= pi/2, got [{}, {}]",
                self.theta1, self.theta2
            )));
        }
        Ok(())
    }
}

/// Mass and surface properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Unit mass (kg).
    pub m: f64,
    /// Gravitational acceleration (m/s^2).
    pub g: f64,
    /// Static friction coefficient of the joint surfaces.
    pub mu_s: f64,
}

/// Default gravitational acceleration (m/s^2).
pub const STANDARD_GRAVITY: f64 = 9.81;

impl MaterialParams {
    /// Uses [`STANDARD_GRAVITY`].
    pub fn new(m: f64, mu_s: f64) -> Result<Self, ModelError> {
        Self::with_gravity(m, STANDARD_GRAVITY, mu_s)
    }

    pub fn with_gravity(m: f64, g: f64, mu_s: f64) -> Result<Self, ModelError> {
        let p = Self { m, g, mu_s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m < 0.0 || !self.m.is_finite() {
            return Err(domain(format!("m must be >= 0, got {}", self.m)));
        }
        if self.g <= 0.0 || !self.g.is_finite() {
            return Err(domain(format!("g must be > 0, got {}", self.g)));
        }
        if self.mu_s < 0.0 || !self.mu_s.is_finite() {
            return Err(domain(format!("mu_s must be >= 0, got {}", self.mu_s)));
        }
        Ok(())
    }
}

/// The two cable tensions. Cables cannot push, so both are non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionInput {
    /// Tension on the long (loose) side (N).
    pub t_l: f64,
    /// Tension on the short (taut) side (N).
    pub t_s: f64,
}

impl TensionInput {
    pub fn new(t_l: f64, t_s: f64) -> Result<Self, ModelError> {
        let t = Self { t_l, t_s };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.t_l < 0.0 || !self.t_l.is_finite() {
            return Err(domain(format!("t_l must be >= 0, got {}", self.t_l)));
        }
        if self.t_s < 0.0 || !self.t_s.is_finite() {
            return Err(domain(format!("t_s must be >= 0, got {}", self.t_s)));
        }
        Ok(())
    }

    /// Total pull along the unit axis (N).
    pub fn total(&self) -> f64 {
        self.t_l + self.t_s
    }
}

/// The four contact-zone antiderivatives (m^2), per unit pressure.
///
/// See the module docs for the integrand definitions and sign conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactIntegrals {
    /// Pressure-force antiderivative along `X_G`.
    pub c_fxg_force: f64,
    /// Pressure-force antiderivative along `Z_G`.
    pub c_fzg_force: f64,
    /// Friction antiderivative along `-X_G` (the drawn friction direction).
    pub c_fxg_fric: f64,
    /// Friction antiderivative along `Z_G`.
    pub c_fzg_fric: f64,
}

impl ContactIntegrals {
    /// Magnitude of the pressure antiderivative pair; `N = p * normal_area()`.
    pub fn normal_area(&self) -> f64 {
        self.c_fxg_force.hypot(self.c_fzg_force)
    }

    /// Magnitude of the friction antiderivative pair; `F_f = mu_s * p * friction_area()`.
    pub fn friction_area(&self) -> f64 {
        self.c_fxg_fric.hypot(self.c_fzg_fric)
    }
}

/// Contact force resultants at a given pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResultants {
    /// Pressure-induced normal resultant magnitude `N` (N).
    pub n_total: f64,
    /// Friction component along `X_G` from the antiderivative field (N).
    pub ff_xg: f64,
    /// Friction component along `Z_G` from the antiderivative field (N).
    pub ff_zg: f64,
    /// Equivalent friction magnitude `F_f` used by the moment balance (N).
    pub ff_tangential: f64,
}

/// Residuals of the three equilibrium equations at a `(theta, p)` state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// Left side of the X force balance (N).
    pub fx: f64,
    /// Left side of the Z force balance minus `m g` (N).
    pub fz: f64,
    /// Left side of the moment balance (N*m).
    pub moment: f64,
}

/// A solved equilibrium state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumState {
    /// Equilibrium tilt (rad). Negative when the unit tilts towards the
    /// `t_l` side (solved by mirror symmetry).
    pub theta: f64,
    /// Average contact pressure (Pa).
    pub p: f64,
    pub resultants: ForceResultants,
    pub residual_fx: f64,
    pub residual_fz: f64,
    pub residual_m: f64,
    pub converged: bool,
    pub iterations: usize,
}

// ---------------------------------------------------------------------------
// Complete elliptic integrals (AGM iteration)
// ---------------------------------------------------------------------------

/// Complete elliptic integral of the first kind, modulus convention `K(k)`.
///
/// `K(k) = pi / (2 agm(1, sqrt(1 - k^2)))`; diverges at `k = 1`.
pub(crate) fn complete_elliptic_k(k: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&k));
    if k >= 1.0 {
        return f64::INFINITY;
    }
    let mut a = 1.0_f64;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    while (a - b).abs() > f64::EPSILON * a {
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::FRAC_PI_2 / a
}

/// Complete elliptic integral of the second kind, modulus convention `E(k)`.
pub(crate) fn complete_elliptic_e(k: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&k));
    if k >= 1.0 {
        return 1.0;
    }
    let mut a = 1.0_f64;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow2 = 0.5;
    while c.abs() > f64::EPSILON {
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    (std::f64::consts::FRAC_PI_2 / a) * (1.0 - sum)
}

/// `E(k) - (1 - k^2) K(k)`, the antiderivative of `k K(k)`; finite on [0, 1].
fn elliptic_bracket(k: f64) -> f64 {
    if k >= 1.0 {
        return 1.0; // limit value: (1 - k^2) K(k) -> 0
    }
    let m = k * k;
    complete_elliptic_e(k) - (1.0 - m) * complete_elliptic_k(k)
}

// ---------------------------------------------------------------------------
// Zone integrals
// ---------------------------------------------------------------------------

/// Axial pressure integral of the zone: `pi r^2 (sin^2 theta2 - sin^2 theta1)`.
fn axial_zone_integral(geom: &UnitGeometry) -> f64 {
    let (s1, s2) = (geom.theta1.sin(), geom.theta2.sin());
    std::f64::consts::PI * geom.r * geom.r * (s2 - s1) * (s2 + s1)
}

/// Tangential (unit slip field) integral of the zone:
/// `4 r^2 [E(k) - (1 - k^2) K(k)]` between `k = sin theta1` and `sin theta2`.
fn tangential_zone_integral(geom: &UnitGeometry) -> f64 {
    let b1 = elliptic_bracket(geom.theta1.sin());
    let b2 = elliptic_bracket(geom.theta2.sin());
    4.0 * geom.r * geom.r * (b2 - b1)
}

/// Mobilization factor: ramps as `2 sin(theta/2)` (net chord slip per unit
/// ring radius accumulated between the upright pose and tilt `theta`) and
/// saturates at `a_n / a_t`, where the tangential resultant reaches the
/// Coulomb limit of the lumped contact.
fn mobilization(theta: f64, a_n: f64, a_t: f64) -> f64 {
    let gamma = 2.0 * (0.5 * theta).sin();
    if a_t > 0.0 {
        gamma.min(a_n / a_t)
    } else {
        gamma
    }
}

fn check_theta(theta: f64) -> Result<(), ModelError> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(domain(format!("theta must lie in [0, pi/2), got {theta}")));
    }
    Ok(())
}

/// Closed-form contact antiderivatives of the tilted unit.
///
/// Matches 2-D quadrature of the module-doc integrands to <= 1e-9 relative.
pub fn contact_integrals(geom: &UnitGeometry, theta: f64) -> Result<ContactIntegrals, ModelError> {
    geom.validate()?;
    check_theta(theta)?;
    let a_n = axial_zone_integral(geom);
    let a_t = tangential_zone_integral(geom);
    let gamma = mobilization(theta, a_n, a_t);
    let (sin_t, cos_t) = theta.sin_cos();
    Ok(ContactIntegrals {
        c_fxg_force: a_n * sin_t,
        c_fzg_force: a_n * cos_t,
        c_fxg_fric: gamma * a_t * cos_t,
        c_fzg_fric: gamma * a_t * sin_t,
    })
}

/// Force resultants at pressure `p`: normal components are `p` times the
/// force antiderivatives, friction components `mu_s * p` times the friction
/// antiderivatives, with the Euclidean magnitudes alongside.
pub fn force_resultants(
    p: f64,
    mu_s: f64,
    ci: &ContactIntegrals,
) -> Result<ForceResultants, ModelError> {
    if p < 0.0 || !p.is_finite() {
        return Err(domain(format!("p must be >= 0, got {p}")));
    }
    if mu_s < 0.0 || !mu_s.is_finite() {
        return Err(domain(format!("mu_s must be >= 0, got {mu_s}")));
    }
    Ok(ForceResultants {
        n_total: p * ci.normal_area(),
        ff_xg: mu_s * p * ci.c_fxg_fric,
        ff_zg: mu_s * p * ci.c_fzg_fric,
        ff_tangential: mu_s * p * ci.friction_area(),
    })
}

/// Friction components required by the two force balances, in the drawn
/// `(-X_G, +Z_G)` directions.
fn required_friction(
    theta: f64,
    p: f64,
    t: &TensionInput,
    mat: &MaterialParams,
    ci: &ContactIntegrals,
) -> (f64, f64) {
    let axial = p * ci.normal_area() - t.total();
    let (sin_t, cos_t) = theta.sin_cos();
    let req_x = axial * sin_t;
    let req_z = mat.m * mat.g - axial * cos_t;
    (req_x, req_z)
}

/// Residuals of the three equilibrium equations at `(theta, p)`.
///
/// The transmitted friction is the mobilized Coulomb limit `mu_s p W` along
/// the direction required by the force balance (or along the antiderivative
/// field when the required force vanishes); all three residuals are zero
/// exactly at a true equilibrium.
pub fn residuals(
    theta: f64,
    p: f64,
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
) -> Result<Residuals, ModelError> {
    t.validate()?;
    mat.validate()?;
    if p < 0.0 || !p.is_finite() {
        return Err(domain(format!("p must be >= 0, got {p}")));
    }
    let ci = contact_integrals(geom, theta)?;
    let limit = mu_sp_w(p, mat, &ci);
    let (req_x, req_z) = required_friction(theta, p, t, mat, &ci);
    let req_mag = req_x.hypot(req_z);
    let (sin_t, cos_t) = theta.sin_cos();
    let (mob_x, mob_z) = if req_mag > 0.0 {
        (limit * req_x / req_mag, limit * req_z / req_mag)
    } else {
        (limit * cos_t, limit * sin_t)
    };
    let fx = req_x - mob_x;
    let fz = mob_z - req_z;
    let moment =
        (geom.r + geom.delta) * (t.t_s - t.t_l) - limit * geom.r + mat.m * mat.g * sin_t * geom.l;
    Ok(Residuals { fx, fz, moment })
}

fn mu_sp_w(p: f64, mat: &MaterialParams, ci: &ContactIntegrals) -> f64 {
    mat.mu_s * p * ci.friction_area()
}

/// Average contact pressure that satisfies the two force balances combined
/// with the Coulomb friction relation at tilt `theta`.
///
/// Solves the quadratic from the module docs. Root selection: the minus
/// branch of the quadratic formula; if it is negative, the plus branch when
/// non-negative; otherwise [`ModelError::NoPhysicalPressure`].
pub fn pressure_from_theta(
    theta: f64,
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
) -> Result<f64, ModelError> {
    t.validate()?;
    mat.validate()?;
    let ci = contact_integrals(geom, theta)?;
    let a_n = ci.normal_area();
    let w = ci.friction_area();
    let s = t.total();
    let mg = mat.m * mat.g;
    let cos_t = theta.cos();
    let u = s + mg * cos_t;
    let v2 = s * s + 2.0 * s * mg * cos_t + mg * mg;

    let a = a_n * a_n - (mat.mu_s * w) * (mat.mu_s * w);
    let c = v2;

    let no_pressure = || ModelError::NoPhysicalPressure { theta };

    // Quarter discriminant in its factored analytic form,
    //   b^2/4 - a c = (mu_s W V)^2 - (A_n mg sin t)^2,
    // which is exact where both factors vanish (theta = 0, or m = 0) instead
    // of amplifying rounding through sqrt near the double root.
    let x = mat.mu_s * w * v2.sqrt();
    let y = a_n * mg * theta.sin();
    let disc4 = (x - y) * (x + y);
    if disc4 < 0.0 {
        return Err(no_pressure());
    }
    // -b/2 = A_n u >= 0, so q carries no cancellation.
    let q = a_n * u + disc4.sqrt();
    if q == 0.0 {
        // Zero-area patch or fully unloaded unit.
        return if c == 0.0 {
            Ok(0.0)
        } else {
            Err(no_pressure())
        };
    }
    let minus = c / q; // the minus branch of the quadratic formula
    if minus >= 0.0 {
        return Ok(minus);
    }
    if a != 0.0 {
        let plus = q / a;
        if plus >= 0.0 {
            return Ok(plus);
        }
    }
    Err(no_pressure())
}

/// Scalar equilibrium function whose root is the equilibrium tilt.
///
/// The moment balance evaluated at `p = pressure_from_theta(theta)`, oriented
/// to increase with the tilt:
/// `f(t) = mu_s p(t) W(t) r - (r + delta)(t_s - t_l) - m g l sin t`.
/// `f` vanishes exactly where all three equilibrium equations hold
/// simultaneously. Propagates [`ModelError::NoPhysicalPressure`] so that
/// infeasible sample angles are reported, not skipped.
pub fn equilibrium_function(
    theta: f64,
    t: &TensionInput,
    geom: &UnitGeometry,
    mat: &MaterialParams,
) -> Result<f64, ModelError> {
    let p = pressure_from_theta(theta, t, geom, mat)?;
    let res = residuals(theta, p, t, geom, mat)?;
    Ok(-res.moment)
}
