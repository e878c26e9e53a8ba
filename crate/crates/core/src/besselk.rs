//! Direct evaluation of `K_{i nu}(x)` for real `nu` and `x > 0`.
//!
//! The starting point is the cosine transform
//!
//! ```text
//! K_{i nu}(x) = int_0^inf cos(nu t) exp(-x cosh t) dt,
//! ```
//!
//! which is even in `nu`. For `nu` beyond a few units the integrand is
//! `O(e^{-x})` while the result is `O(e^{-pi nu / 2})`, so the plain form
//! cancels away all significant digits. Writing the integral over the whole
//! real line and moving the path to `Im t = phi` (`0 <= phi < pi/2`) gives
//!
//! ```text
//! K_{i nu}(x) = e^{-nu phi} int_0^inf cos(nu s - x sin(phi) sinh s)
//!                                    exp(-x cos(phi) cosh s) ds
//! ```
//!
//! for every such `phi`. With `phi = pi/2 - 1/nu` the exponential factor
//! carries the `e^{-pi nu / 2}` decay and the remaining integral loses only
//! one or two digits to cancellation. The integral is truncated where the
//! envelope drops below machine precision and is evaluated with 20-point
//! Gauss–Legendre panels, initially one cosine half-period wide and bisected
//! adaptively where the oscillation is faster.

use std::f64::consts::{FRAC_PI_2, LN_10};

use crate::error::{Error, Result};
use crate::quadrature::gl20;

/// Tolerances for the `K_{i nu}` quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Target error relative to the integral of the integrand's envelope.
    pub rel_tol: f64,
    /// Extra decades of envelope decay to integrate past machine epsilon.
    pub t_max_margin: f64,
    /// Cap on the number of Gauss panels.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-12,
            t_max_margin: 2.0,
            max_panels: 1 << 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::InvalidConfig(format!(
                "quadrature rel_tol must be in (0, 1e-4] (got {})",
                self.rel_tol
            )));
        }
        if self.max_panels < 64 {
            return Err(Error::InvalidConfig(format!(
                "max_panels must be at least 64 (got {})",
                self.max_panels
            )));
        }
        if !(self.t_max_margin >= 1.0) || !self.t_max_margin.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_max_margin must be at least 1 (got {})",
                self.t_max_margin
            )));
        }
        Ok(())
    }
}

/// Value, `nu`-derivative and error estimate of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEval {
    pub value: f64,
    pub dnu: f64,
    /// Estimated absolute error of `value`.
    pub abs_err: f64,
    /// Rounding floor of `value`: below this the sign is not meaningful.
    pub noise: f64,
}

/// Largest order accepted at argument `x`.
///
/// `|K_{i nu}(x)|` scales like `e^{-pi nu / 2}` once `nu > x`; past this cap
/// that scale leaves fewer than `-log10(rel_tol)` digits above the smallest
/// normal double.
pub fn nu_cap(x: f64, cfg: &QuadratureConfig) -> f64 {
    let headroom = -f64::MIN_POSITIVE.ln() - (1.0 / cfg.rel_tol).ln();
    x + headroom / FRAC_PI_2
}

fn check_args(nu: f64, x: f64, cfg: &QuadratureConfig) -> Result<()> {
    cfg.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "k_inu",
            x,
            "argument x must be positive and finite",
        ));
    }
    if !nu.is_finite() {
        return Err(Error::domain("k_inu", nu, "order must be finite"));
    }
    let cap = nu_cap(x, cfg);
    if nu.abs() > cap {
        return Err(Error::PrecisionLoss { nu, x, cap });
    }
    Ok(())
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Integration path and integrand for one `(nu, x)`.
struct Integrand {
    nu: f64,
    /// `x cos(phi)`
    c: f64,
    /// `x sin(phi)`
    d: f64,
}

impl Integrand {
    /// `(cos-part, s*sin-part, envelope, s*envelope)` at `s`; the envelope
    /// is normalised to 1 at `s = 0`.
    #[inline]
    fn eval(&self, s: f64) -> [f64; 4] {
        let sh = (0.5 * s).sinh();
        let env = (-2.0 * self.c * sh * sh).exp();
        let (sin, cos) = (self.nu * s - self.d * s.sinh()).sin_cos();
        [cos * env, s * sin * env, env, s * env]
    }

    fn panel(&self, a: f64, b: f64) -> [f64; 4] {
        let rule = gl20();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; 4];
        for (x, w) in rule.nodes().iter().zip(rule.weights()) {
            let v = self.eval(mid + half * x);
            for k in 0..4 {
                acc[k] += w * v[k];
            }
        }
        acc.map(|v| v * half)
    }
}

/// Evaluates `K_{i nu}(x)` and `dK_{i nu}(x)/d nu` together.
pub fn k_inu_eval(nu: f64, x: f64, cfg: &QuadratureConfig) -> Result<KEval> {
    check_args(nu, x, cfg)?;
    let sign = if nu < 0.0 { -1.0 } else { 1.0 };
    let nu = nu.abs();

    let phi = if nu > 1.0 { FRAC_PI_2 - 1.0 / nu } else { 0.0 };
    let f = Integrand {
        nu,
        c: x * phi.cos(),
        d: x * phi.sin(),
    };
    let log_pref = -nu * phi - f.c;
    let pref = log_pref.exp();

    // Truncate where c (cosh S - 1) reaches the envelope cutoff.
    let cutoff = -f64::EPSILON.ln() + cfg.t_max_margin * LN_10;
    let s_max = (1.0 + cutoff / f.c).acosh();
    let h0 = if nu > 0.0 {
        (std::f64::consts::PI / nu).min(0.5)
    } else {
        0.5
    };
    let initial = ((s_max / h0).ceil() as usize).max(1);
    if initial > cfg.max_panels {
        return Err(Error::QuadratureFailure { panels: initial });
    }
    let h = s_max / initial as f64;

    // First pass: envelopes, which are smooth and need no refinement.
    let mut env_c = 0.0;
    let mut env_s = 0.0;
    let mut coarse = Vec::with_capacity(initial);
    for i in 0..initial {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let p = f.panel(a, b);
        env_c += p[2];
        env_s += p[3];
        coarse.push((a, b, p));
    }

    let mut cos_parts = Vec::with_capacity(initial * 2);
    let mut sin_parts = Vec::with_capacity(initial * 2);
    let mut err_c = 0.0;
    let mut panels = initial;
    let mut stack = Vec::new();
    for (a, b, p) in coarse.into_iter().rev() {
        stack.push((a, b, p));
    }
    while let Some((a, b, whole)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = f.panel(a, m);
        let right = f.panel(m, b);
        panels += 2;
        let dc = (left[0] + right[0] - whole[0]).abs();
        let ds = (left[1] + right[1] - whole[1]).abs();
        let share = (b - a) / s_max;
        let ok_c = dc <= cfg.rel_tol * env_c * share;
        let ok_s = ds <= cfg.rel_tol * env_s.max(f64::MIN_POSITIVE) * share;
        if (ok_c && ok_s) || (b - a) <= 1e-12 * s_max {
            cos_parts.push(left[0]);
            cos_parts.push(right[0]);
            sin_parts.push(left[1]);
            sin_parts.push(right[1]);
            err_c += dc;
            continue;
        }
        if panels > cfg.max_panels {
            return Err(Error::QuadratureFailure { panels });
        }
        // Right half first so the left half is processed next.
        stack.push((m, b, right));
        stack.push((a, m, left));
    }

    let ic = pairwise_sum(&cos_parts);
    let is = pairwise_sum(&sin_parts);
    let value = pref * ic;
    let dnu = sign * pref * (-phi * ic - is);
    let noise = pref * 16.0 * f64::EPSILON * env_c;
    Ok(KEval {
        value,
        dnu,
        abs_err: pref * err_c + noise,
        noise,
    })
}

/// `K_{i nu}(x)`. Even in `nu`; negative orders are accepted.
pub fn k_inu(nu: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(k_inu_eval(nu, x, cfg)?.value)
}

/// `d K_{i nu}(x) / d nu`.
pub fn k_inu_dnu(nu: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(k_inu_eval(nu, x, cfg)?.dnu)
}

/// Safeguarded Newton iteration for a zero of `nu -> K_{i nu}(x)` inside
/// `bracket`, falling back to bisection whenever a Newton step leaves the
/// current bracket.
pub fn refine_zero(
    nu_guess: f64,
    x: f64,
    bracket: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::domain(
            "refine_zero",
            lo,
            "bracket must satisfy lo < hi",
        ));
    }
    if !(nu_guess >= lo && nu_guess <= hi) {
        return Err(Error::domain(
            "refine_zero",
            nu_guess,
            "initial guess outside bracket",
        ));
    }
    let f_lo = k_inu(lo, x, cfg)?;
    let f_hi = k_inu(hi, x, cfg)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let lo_sign = f_lo.signum();

    let mut nu = nu_guess;
    for _ in 0..200 {
        let ev = k_inu_eval(nu, x, cfg)?;
        if ev.value == 0.0 || ev.value.abs() <= ev.noise {
            return Ok(nu);
        }
        if ev.value.signum() == lo_sign {
            lo = nu;
        } else {
            hi = nu;
        }
        let newton = nu - ev.value / ev.dnu;
        let next = if ev.dnu != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - nu).abs() <= 4.0 * f64::EPSILON * nu || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        nu = next;
    }
    Err(Error::NonConvergence {
        routine: "refine_zero",
        iterations: 200,
    })
}
