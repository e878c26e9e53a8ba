//! Exact zeros of `K_{i nu}(z)` as Dirichlet eigenvalues.
//!
//! With `y = z e^s` the modified Bessel equation of order `i nu` becomes
//!
//! ```text
//! psi''(s) = (z^2 e^{2s} - nu^2) psi(s),    s in [0, inf),
//! ```
//!
//! and `K_{i nu}(z e^s)` is its solution decaying as `s -> inf`. A zero of
//! `K_{i nu}(z)` in `nu` is therefore an eigenvalue `nu^2` of this equation
//! with `psi(0) = 0`. The `n`-th zero belongs to the eigenfunction with
//! `n - 1` interior nodes.
//!
//! With `Q(s) = nu^2 - z^2 e^{2s}` and a positive scale `S(s)`, the
//! modified Prüfer substitution `psi = r sin(theta) / sqrt(S)`,
//! `psi' = r sqrt(S) cos(theta)` gives
//!
//! ```text
//! theta' = S cos^2(theta) + (Q / S) sin^2(theta) + (S' / S) sin(theta) cos(theta).
//! ```
//!
//! `S` equals `sqrt(Q)` in the oscillatory region, away from the turning
//! point `s* = ln(nu / z)`, and `sqrt(|Q|)` beyond it, blending smoothly
//! across a turning-point width. Inside the well the angle tracks the WKB
//! phase `R(s) = int_s^{s*} sqrt(Q)`, which is known in closed form, and
//! only the deviation `theta + R` (of order one) is integrated
//! numerically. This keeps both the step count and the rounding error of
//! the accumulated angle independent of how many nodes the eigenfunction
//! has. `R` has a square-root branch at `s*`, so across the turning region
//! the angle itself is integrated and the switch to the deviation happens
//! a few widths inside the well, where every right-hand side is smooth.
//!
//! Integration runs from deep inside the classically forbidden region down
//! to `s = 0`. The decaying solution dominates in that direction, so its
//! angle is selected without ever representing its `e^{-pi nu / 2}`
//! magnitude.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators;
use crate::ode::Dop853;

/// Domain truncation and step control for the phase method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSolverConfig {
    /// Distance past the turning point `ln(nu / z)` at which integration
    /// starts, in units of the turning-point width `(2 nu^2)^{-1/3}`.
    pub s_max_margin: f64,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    /// Relative tolerance on `nu` for the root search.
    pub bisect_tol: f64,
}

impl Default for PhaseSolverConfig {
    fn default() -> Self {
        PhaseSolverConfig {
            s_max_margin: 10.0,
            ode_rel_tol: 1e-12,
            ode_abs_tol: 1e-14,
            bisect_tol: 1e-11,
        }
    }
}

impl PhaseSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_max_margin >= 3.0) || !self.s_max_margin.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "s_max_margin must be at least 3 (got {})",
                self.s_max_margin
            )));
        }
        for (name, v) in [
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
        ] {
            if !(v > 0.0 && v <= 1e-6) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be in (0, 1e-6] (got {v})"
                )));
            }
        }
        if !(self.bisect_tol > 0.0 && self.bisect_tol <= 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "bisect_tol must be in (0, 1e-9] (got {})",
                self.bisect_tol
            )));
        }
        Ok(())
    }
}

/// The `n`-th zero `nu_n` of `K_{i nu}(z)`, equivalently the eigenvalue
/// `epsilon = nu^2` of the dimensionless exponential well with `u = z^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResult {
    pub n: u32,
    pub z: f64,
    pub nu: f64,
    pub epsilon: f64,
    /// Interior nodes of the eigenfunction, `n - 1`.
    pub node_count: u32,
}

/// Lower limit on how far into the forbidden region integration starts
/// when `nu <= z`, where no turning point lies in `s > 0`.
const MIN_S_MAX: f64 = 5.0;

/// Start point of the backward integration.
fn s_start(nu: f64, z: f64, margin: f64) -> f64 {
    if nu > z {
        (nu / z).ln() + margin * (2.0 * nu * nu).cbrt().recip()
    } else {
        // Make sure the decaying solution has locked in: int kappa ds ~ z e^s.
        MIN_S_MAX.max((40.0 / z).ln())
    }
}

/// Depth `Q / c^2` below the turning point, in squared turning-point
/// widths, at which integration switches from the angle to its deviation
/// from the WKB phase.
const SPLIT: f64 = 4.0;

/// Step cap on the deviation leg, as a fraction of the shortest oscillation
/// period of its right-hand side. Steps approaching a full period can pass
/// the embedded error estimate with local errors far above tolerance.
const MAX_STEP_PERIODS: f64 = 0.25;

/// Size of the last retained term of the WKB series at the point where
/// it takes over from the integration. The terms grow monotonically
/// towards the turning point, so the series is at least this accurate on
/// the whole of `[0, s_m]`.
const SERIES_TAIL: f64 = 1e-15;

/// The point `s_m > 0` where the third WKB correction reaches
/// [`SERIES_TAIL`], if any.
fn match_point(nu: f64, z: f64) -> Option<f64> {
    let nu2 = nu * nu;
    let c3 = |x: f64| wkb_terms(nu2 * (1.0 - x), nu2 * x)[2].abs();
    if c3(z * z / nu2) >= SERIES_TAIL {
        return None;
    }
    // Bisection on x = v / nu^2 in (v(0) / nu^2, 1).
    let (mut lo, mut hi) = (z * z / nu2, 1.0_f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if c3(mid) < SERIES_TAIL {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo * nu2 / (z * z)).ln())
}

/// The corrections `c_k = P_k(r) / Q^k`, `r = v / Q`, of the WKB series
/// `p = sqrt(Q) (1 + c_1 + c_2 + c_3)` for the Milne phase derivative,
/// followed by their `s`-derivatives.
fn wkb_terms(q: f64, v: f64) -> [f64; 6] {
    let r = v / q;
    let (q2, q3) = (q * q, q * q * q);
    [
        r * (5.0 * r + 4.0) / 8.0 / q,
        -r * (((1105.0 * r + 1768.0) * r + 752.0) * r + 64.0) / 128.0 / q2,
        r * (((((414125.0 * r + 993900.0) * r + 822128.0) * r + 270592.0) * r + 29824.0) * r
            + 512.0)
            / 1024.0
            / q3,
        r * ((15.0 * r + 18.0) * r + 4.0) / 4.0 / q,
        -r * ((((3315.0 * r + 6630.0) * r + 4156.0) * r + 848.0) * r + 32.0) / 32.0 / q2,
        r * ((((((3727125.0 * r + 10435950.0) * r + 10724396.0) * r + 4912064.0) * r + 960896.0)
            * r
            + 61696.0)
            * r
            + 512.0)
            / 512.0
            / q3,
    ]
}

/// Milne phase derivative `p` and `p'/p`.
fn milne(q: f64, v: f64) -> (f64, f64) {
    let [c1, c2, c3, d1, d2, d3] = wkb_terms(q, v);
    let c = 1.0 + c1 + c2 + c3;
    (q.sqrt() * c, -v / q + (d1 + d2 + d3) / c)
}

/// Antiderivative in `s` of `sqrt(Q) (c_1 + c_2 + c_3)`.
fn bulk_correction(q: f64, v: f64) -> f64 {
    let r = v / q;
    let rq = q.sqrt();
    (5.0 * r + 2.0) / 24.0 / rq
        - (((5525.0 * r + 6630.0) * r + 1464.0) * r - 16.0) / 5760.0 / (q * rq)
        + (((((8696625.0 * r + 17393250.0) * r + 10893120.0) * r + 2208640.0) * r + 80000.0) * r
            + 256.0)
            / 322560.0
            / (q * q * rq)
}

/// Signed angle from `theta` to the direction `(x, y)`.
fn turn(theta: f64, x: f64, y: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    (y * cos - x * sin).atan2(x * cos + y * sin)
}

/// Accumulated Prüfer phase `Theta(nu)`, normalised so that `nu` is the
/// `n`-th zero of `K_{i nu}(z)` exactly when `Theta(nu) = n pi`.
///
/// `Theta` is continuous and strictly increasing in `nu`. Away from the
/// turning point the angle is carried to `s = 0` by the WKB series, so the
/// cost does not grow with `nu`.
pub fn phase_at_origin(nu: f64, z: f64, cfg: &PhaseSolverConfig) -> Result<f64> {
    phase(nu, z, cfg, true)
}

/// The same phase with the angle integrated numerically all the way to
/// `s = 0`. The cost grows linearly with `nu`.
pub fn phase_by_integration(nu: f64, z: f64, cfg: &PhaseSolverConfig) -> Result<f64> {
    phase(nu, z, cfg, false)
}

fn phase(nu: f64, z: f64, cfg: &PhaseSolverConfig, bulk_series: bool) -> Result<f64> {
    cfg.validate()?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(
            "phase_at_origin",
            nu,
            "order must be positive and finite",
        ));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "phase_at_origin",
            z,
            "z must be positive and finite",
        ));
    }
    let nu2 = nu * nu;
    let z2 = z * z;
    let k = nu.max(z);
    // Size of Q across one turning-point width (2 k^2)^{-1/3}.
    let c2 = (2.0 * k * k).powf(2.0 / 3.0);
    let c4 = c2 * c2;
    let ln_z = z.ln();

    // S^4 = Q^2 + c^4 exp(-(Q/c^2)^2), returning (S, S'/S).
    let scale = |q: f64, v: f64| {
        let g = (-(q / c2).powi(2)).exp();
        let d = q * q + c4 * g;
        (d.sqrt().sqrt(), -q * v * (1.0 - g) / d)
    };
    let theta_dot = |s: f64, theta: f64| {
        let v = z2 * (2.0 * s).exp();
        let q = nu2 - v;
        let (sc, log_ds) = scale(q, v);
        let (sin, cos) = theta.sin_cos();
        (q, sc * cos * cos + q / sc * sin * sin + log_ds * sin * cos)
    };
    // WKB phase int_s^{s*} sqrt(Q), for Q > 0.
    let wkb_phase = |s: f64, q: f64| {
        let w = q.sqrt();
        nu * ((nu + w).ln() - ln_z - s) - w
    };

    let s_top = s_start(nu, z, cfg.s_max_margin);
    // Decaying WKB solution psi ~ kappa^{-1/2} exp(-int kappa) at s_top.
    let v = z2 * (2.0 * s_top).exp();
    let q_top = nu2 - v;
    let kappa = (-q_top).sqrt();
    let log_deriv = -kappa - v / (2.0 * kappa * kappa);
    let theta_top = scale(q_top, v).0.atan2(log_deriv);

    let s_match = if bulk_series {
        match_point(nu, z)
    } else {
        None
    };
    let s_end = s_match.unwrap_or(0.0);
    // Angle leg through the turning region, down to Q = SPLIT c^2.
    let q_split = nu2 - SPLIT * c2;
    let s_split = if q_split > z2 {
        (0.5 * (q_split / z2).ln()).max(s_end)
    } else {
        s_end
    };

    let ode = Dop853::new(cfg.ode_rel_tol, cfg.ode_abs_tol);
    let mut theta_end = ode
        .integrate(
            |s, th: &[f64; 1]| [theta_dot(s, th[0]).1],
            s_top,
            [theta_top],
            s_split,
        )?
        .y[0];
    if s_split > s_end {
        // Deviation leg: phi = theta + R(s), phi' = theta' - sqrt(Q).
        let v_split = z2 * (2.0 * s_split).exp();
        let phi_split = theta_end + wkb_phase(s_split, nu2 - v_split);
        let rhs = |s: f64, phi: &[f64; 1]| {
            let q = nu2 - z2 * (2.0 * s).exp();
            let (_, dot) = theta_dot(s, phi[0] - wkb_phase(s, q));
            [dot - q.sqrt()]
        };
        // The right-hand side oscillates with period pi / sqrt(Q), shortest
        // at s_end.
        let q_end = nu2 - z2 * (2.0 * s_end).exp();
        let ode = ode.with_max_step(MAX_STEP_PERIODS * PI / q_end.sqrt());
        let phi_end = ode.integrate(rhs, s_split, [phi_split], s_end)?.y[0];
        theta_end = phi_end - wkb_phase(s_end, nu2 - z2 * (2.0 * s_end).exp());
    }

    let q0 = nu2 - z2;
    let theta0 = match s_match {
        None => theta_end,
        Some(sm) => {
            // Hand over to the Milne phase alpha (psi = A sin(alpha),
            // alpha' = 1/A^2 = p) and carry it to s = 0 in closed form.
            let vm = z2 * (2.0 * sm).exp();
            let qm = nu2 - vm;
            let (p, dlogp) = milne(qm, vm);
            let sc = scale(qm, vm).0;
            let (sin, cos) = theta_end.sin_cos();
            let alpha_m = theta_end + turn(theta_end, sc / p * cos + dlogp / (2.0 * p) * sin, sin);
            let alpha0 = alpha_m
                - (wkb_phase(0.0, q0) - wkb_phase(sm, qm))
                - (bulk_correction(qm, vm) - bulk_correction(q0, z2));
            let (p, dlogp) = milne(q0, z2);
            let sc = scale(q0, z2).0;
            let (sin, cos) = alpha0.sin_cos();
            alpha0 + turn(alpha0, cos - dlogp / (2.0 * p) * sin, sc / p * sin)
        }
    };
    Ok(PI - theta0)
}

/// Brent's method on `g` over `[a, b]` with `g(a) < 0 < g(b)` already
/// evaluated; terminates once the certified bracket is narrower than
/// `2 * tol`.
fn brent<G>(mut g: G, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // Secant.
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                // Inverse quadratic interpolation.
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b)?;
    }
    Err(Error::NonConvergence {
        routine: "brent",
        iterations: 200,
    })
}

/// The `n`-th zero of `K_{i nu}(z)` with respect to `nu`.
///
/// The search starts at the Lambert-W asymptotic estimate, brackets the
/// root by stepping outward with the asymptotic zero spacing (widening
/// geometrically on failure), then closes the bracket with Brent's method.
pub fn nu_zero(n: u32, z: f64, cfg: &PhaseSolverConfig) -> Result<EigenResult> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain(
            "nu_zero",
            0.0,
            "zeros are counted from n = 1",
        ));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain("nu_zero", z, "z must be positive and finite"));
    }
    let target = f64::from(n) * PI;
    let residual = |nu: f64| -> Result<f64> { Ok(phase_at_origin(nu, z, cfg)? - target) };

    let guess = estimators::nu_asymp_w(n, z)?.value;
    let (lo_b, hi_b) = estimators::asymptotic_bracket(n, z)?;
    let spacing = (hi_b - lo_b).max(1e-3 * guess);

    // The phase grows by about pi per zero spacing.
    let f0 = residual(guess)?;
    if f0 == 0.0 {
        return Ok(make_result(n, z, guess));
    }
    let slope = PI / spacing;
    let mut step = (1.5 * f0.abs() / slope).max(cfg.bisect_tol * guess);
    let toward = if f0 > 0.0 { -1.0 } else { 1.0 };
    let (mut near, mut f_near) = (guess, f0);
    let mut bracket = None;
    for _ in 0..64 {
        let far = (guess + toward * step).max(f64::MIN_POSITIVE);
        let f_far = residual(far)?;
        if f_far.signum() != f0.signum() {
            bracket = Some((near, f_near, far, f_far));
            break;
        }
        if far <= f64::MIN_POSITIVE {
            break;
        }
        near = far;
        f_near = f_far;
        step *= 2.0;
    }
    let (p, fp, q, fq) = bracket.ok_or(Error::BracketFailure { n, z })?;
    let (a, fa, b, fb) = if fp < 0.0 {
        (p, fp, q, fq)
    } else {
        (q, fq, p, fp)
    };
    let nu = brent(residual, a, fa, b, fb, cfg.bisect_tol * guess)?;
    Ok(make_result(n, z, nu))
}

fn make_result(n: u32, z: f64, nu: f64) -> EigenResult {
    EigenResult {
        n,
        z,
        nu,
        epsilon: nu * nu,
        node_count: n - 1,
    }
}

/// Zeros `n = 1..=n_max`, in order. Individual zeros are computed
/// independently and in parallel; the output does not depend on the
/// scheduling.
pub fn batch_zeros(n_max: u32, z: f64, cfg: &PhaseSolverConfig) -> Result<Vec<EigenResult>> {
    zeros_for(&(1..=n_max).collect::<Vec<_>>(), z, cfg)
}

/// Zeros for an arbitrary list of indices, returned in the same order.
pub fn zeros_for(ns: &[u32], z: f64, cfg: &PhaseSolverConfig) -> Result<Vec<EigenResult>> {
    cfg.validate()?;
    ns.par_iter()
        .map(|&n| {
            nu_zero(n, z, cfg).map_err(|e| Error::AtIndex {
                n,
                source: Box::new(e),
            })
        })
        .collect()
}
