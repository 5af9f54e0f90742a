//! Test-side oracles, independent of the library's closed forms.
//!
//! `quad_contact_integrals` integrates the raw contact-zone integrands with
//! adaptive 2-D quadrature (periodic trapezoid in azimuth inside adaptive
//! Simpson in the polar angle) and must agree with the library's
//! elliptic-integral closed forms to <= 1e-9 relative.

use tendon_statics::UnitGeometry;

/// Quadrature of the four raw integrands over the contact zone:
/// `[c_fxg_force, c_fzg_force, c_fxg_fric, c_fzg_fric]`.
///
/// Integrand definitions (zone point at polar angle `phi`, azimuth `psi`;
/// unit tilted by `theta`; `dA = r^2 sin(phi) dphi dpsi`):
/// - radial traction `+P_hat`, projected on `+X_G` and `+Z_G`;
/// - tangential slip-opposing unit field, projected on `-X_G` and `+Z_G`,
///   scaled afterwards by the mobilization factor
///   `min(2 sin(theta/2), A_n / A_t)` with `A_n`, `A_t` taken from this
///   oracle's own integrals (Coulomb saturation of the tangential resultant).
pub fn quad_contact_integrals(geom: &UnitGeometry, theta: f64) -> [f64; 4] {
    let (sin_t, cos_t) = theta.sin_cos();
    let r2 = geom.r * geom.r;

    // Azimuthal integral at fixed polar angle, all four integrands at once
    // (friction pair with unit mobilization).
    let ring = |phi: f64| -> [f64; 4] {
        let (sin_p, cos_p) = phi.sin_cos();
        let f = |psi: f64| -> [f64; 4] {
            let (sin_u, cos_u) = psi.sin_cos();
            // local components of the radial direction
            let (ax, az) = (sin_p * cos_u, cos_p);
            // unit tangential slip-opposing direction
            let d = (1.0 - (sin_p * sin_u) * (sin_p * sin_u)).sqrt();
            let (tx, tz) = (-cos_p / d, sin_p * cos_u / d);
            [
                ax * cos_t + az * sin_t,    // pressure on +X_G
                -ax * sin_t + az * cos_t,   // pressure on +Z_G
                -(tx * cos_t + tz * sin_t), // friction on -X_G
                -tx * sin_t + tz * cos_t,   // friction on +Z_G
            ]
        };
        let mut vals = periodic_trapezoid(f, 64);
        for v in &mut vals {
            *v *= r2 * sin_p;
        }
        vals
    };

    let mut vals = adaptive_simpson(&ring, geom.theta1, geom.theta2, 1e-14 * r2.max(1e-12));
    let a_n = vals[0].hypot(vals[1]);
    let a_t = vals[2].hypot(vals[3]);
    let gamma = 2.0 * (0.5 * theta).sin();
    let mobilization = if a_t > 0.0 {
        gamma.min(a_n / a_t)
    } else {
        gamma
    };
    vals[2] *= mobilization;
    vals[3] *= mobilization;
    vals
}

/// Trapezoid rule over one period `[0, 2 pi)`, doubling the node count until
/// the four components stabilize. Spectrally convergent for smooth periodic
/// integrands.
fn periodic_trapezoid<F: Fn(f64) -> [f64; 4]>(f: F, start_n: usize) -> [f64; 4] {
    let two_pi = 2.0 * std::f64::consts::PI;
    let eval = |n: usize| -> [f64; 4] {
        let h = two_pi / n as f64;
        let mut acc = [0.0; 4];
        for i in 0..n {
            let v = f(i as f64 * h);
            for k in 0..4 {
                acc[k] += v[k];
            }
        }
        for a in &mut acc {
            *a *= h;
        }
        acc
    };
    let mut n = start_n;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        let ok = (0..4).all(|k| {
            let tol = 1e-14 * cur[k].abs().max(1e-16) + 1e-18;
            (cur[k] - prev[k]).abs() <= tol
        });
        if ok || n >= 1 << 16 {
            return cur;
        }
        prev = cur;
    }
}

fn simpson_panel<F: Fn(f64) -> [f64; 4]>(
    f: &F,
    a: f64,
    b: f64,
) -> ([f64; 4], [f64; 4], [f64; 4], [f64; 4]) {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let mut s = [0.0; 4];
    for k in 0..4 {
        s[k] = (b - a) / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
    }
    (fa, fm, fb, s)
}

fn adaptive_simpson<F: Fn(f64) -> [f64; 4]>(f: &F, a: f64, b: f64, eps: f64) -> [f64; 4] {
    if a == b {
        return [0.0; 4];
    }
    let (fa, fm, fb, whole) = simpson_panel(f, a, b);
    simpson_rec(f, a, b, fa, fm, fb, whole, eps, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> [f64; 4]>(
    f: &F,
    a: f64,
    b: f64,
    fa: [f64; 4],
    fm: [f64; 4],
    fb: [f64; 4],
    whole: [f64; 4],
    eps: f64,
    depth: usize,
) -> [f64; 4] {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let mut left = [0.0; 4];
    let mut right = [0.0; 4];
    for k in 0..4 {
        left[k] = (m - a) / 6.0 * (fa[k] + 4.0 * flm[k] + fm[k]);
        right[k] = (b - m) / 6.0 * (fm[k] + 4.0 * frm[k] + fb[k]);
    }
    let converged = (0..4).all(|k| (left[k] + right[k] - whole[k]).abs() <= 15.0 * eps);
    if converged || depth == 0 {
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = left[k] + right[k] + (left[k] + right[k] - whole[k]) / 15.0;
        }
        return out;
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1);
    let r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = l[k] + r[k];
    }
    out
}

/// Largest relative deviation between the library's closed forms and the
/// quadrature oracle.
pub fn closed_form_vs_quadrature(geom: &UnitGeometry, theta: f64) -> f64 {
    let ci = tendon_statics::contact_integrals(geom, theta).expect("valid inputs");
    let q = quad_contact_integrals(geom, theta);
    let cf = [ci.c_fxg_force, ci.c_fzg_force, ci.c_fxg_fric, ci.c_fzg_fric];
    (0..4)
        .map(|k| (cf[k] - q[k]).abs() / q[k].abs().max(1e-300))
        .fold(0.0, f64::max)
}
