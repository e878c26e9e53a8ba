//! Principal branch of the Lambert W function.
//!
//! `w0` solves `w e^w = x` for `x >= -1/e` by Halley iteration. Arguments
//! above `e` are iterated in log form, `w + ln w = ln x`, which never forms
//! `e^w` and so cannot overflow.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Iteration cap for every Halley/Newton loop in this module. Halley
/// converges in a handful of steps from the initial guesses used here, so
/// hitting the cap means a defect rather than a hard argument.
pub const MAX_ITERATIONS: usize = 50;

/// Default residual tolerance used by the estimators.
pub const DEFAULT_TOL: f64 = 1e-14;

const INV_E: f64 = 1.0 / E;

/// Number of terms retained from the large-argument expansion
/// `W(x) = ln x - ln ln x + ln ln x / ln x + ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WSeriesOrder(u8);

impl WSeriesOrder {
    pub const ONE: WSeriesOrder = WSeriesOrder(1);
    pub const TWO: WSeriesOrder = WSeriesOrder(2);
    pub const THREE: WSeriesOrder = WSeriesOrder(3);

    pub fn new(terms: u8) -> Result<Self> {
        match terms {
            1..=3 => Ok(WSeriesOrder(terms)),
            _ => Err(Error::InvalidConfig(format!(
                "series order must be 1, 2 or 3 (got {terms})"
            ))),
        }
    }

    pub fn terms(self) -> u8 {
        self.0
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "tolerance must be positive (got {tol})"
        )))
    }
}

/// Unavoidable rounding in evaluating `w e^w` near the root.
fn residual_floor(w: f64, x: f64) -> f64 {
    4.0 * f64::EPSILON * (1.0 + w.abs()) * x.abs().max(1.0)
}

/// Principal branch `W_0(x)`.
///
/// The result satisfies `|w e^w - x| <= tol * max(|x|, 1)` (or the rounding
/// floor of evaluating `w e^w`, when that is larger) and `w >= -1`.
pub fn w0(x: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !x.is_finite() {
        return Err(Error::domain("w0", x, "argument must be finite"));
    }
    if x < -INV_E {
        // -1/e is not representable; accept arguments that round just below it.
        if x >= -INV_E * (1.0 + 4.0 * f64::EPSILON) {
            return Ok(-1.0);
        }
        return Err(Error::domain("w0", x, "argument below -1/e"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x > E {
        return halley_log(x.ln(), tol, x);
    }
    halley_direct(x, tol)
}

/// `W_0(e^y)` evaluated without forming `e^y` when that would overflow.
pub fn w0_exp(y: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !y.is_finite() {
        return Err(Error::domain("w0_exp", y, "exponent must be finite"));
    }
    if y <= 1.0 {
        return w0(y.exp(), tol);
    }
    let x = y.exp();
    halley_log(y, tol, x)
}

fn halley_direct(x: f64, tol: f64) -> Result<f64> {
    let mut w = if x < -0.25 {
        // Expansion about the branch point.
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };

    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if f == 0.0 || wp1 == 0.0 {
            return Ok(w);
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs()) {
            let residual = (next * next.exp() - x).abs();
            if residual <= tol * x.abs().max(1.0) + residual_floor(next, x) {
                return Ok(next);
            }
        }
        w = next;
    }
    Err(Error::NonConvergence {
        routine: "w0",
        iterations: MAX_ITERATIONS,
    })
}

/// Halley on `g(w) = w + ln w - y`, for `y > 1`. `x` is `e^y` (possibly
/// infinite) and is only used for the residual check.
fn halley_log(y: f64, tol: f64, x: f64) -> Result<f64> {
    let ly = y.ln();
    let mut w = y - ly + ly / y;

    for _ in 0..MAX_ITERATIONS {
        let g = w + w.ln() - y;
        let gp = 1.0 + 1.0 / w;
        let gpp = -1.0 / (w * w);
        let step = 2.0 * g * gp / (2.0 * gp * gp - g * gpp);
        let next = w - step;
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs() {
            let ok = if x.is_finite() {
                let residual = (next * next.exp() - x).abs();
                residual <= tol * x + residual_floor(next, x)
            } else {
                // Relative residual of w e^w against e^y, in log form.
                let rel = (next + next.ln() - y).exp_m1().abs();
                rel <= tol + 4.0 * f64::EPSILON * (1.0 + y)
            };
            if ok {
                return Ok(next);
            }
        }
        w = next;
    }
    Err(Error::NonConvergence {
        routine: "w0",
        iterations: MAX_ITERATIONS,
    })
}

/// Truncation of the large-argument series for `W(x)` after `order` terms.
pub fn w_series(x: f64, order: WSeriesOrder) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("w_series", x, "argument must be finite"));
    }
    if order.terms() == 1 {
        if x <= 1.0 {
            return Err(Error::domain("w_series", x, "one-term series needs x > 1"));
        }
        return Ok(x.ln());
    }
    if x <= E {
        return Err(Error::domain(
            "w_series",
            x,
            "two- and three-term series need x > e",
        ));
    }
    let l1 = x.ln();
    let l2 = l1.ln();
    let mut w = l1 - l2;
    if order.terms() == 3 {
        w += l2 / l1;
    }
    Ok(w)
}

/// Solves `b X + X ln X = p` for `X > 0`, returning `p / W(e^b p)`.
pub fn solve_xlog(b: f64, p: f64, tol: f64) -> Result<f64> {
    if !b.is_finite() {
        return Err(Error::domain("solve_xlog", b, "b must be finite"));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(
            "solve_xlog",
            p,
            "p must be positive and finite",
        ));
    }
    let y = b + p.ln();
    let w = if y.abs() < 700.0 {
        w0(b.exp() * p, tol)?
    } else if y > 0.0 {
        w0_exp(y, tol).map_err(|_| Error::OverflowGuard { exponent: y })?
    } else {
        // W(a) = a to double precision for a below 1e-304.
        y.exp()
    };
    let x = p / w;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::OverflowGuard { exponent: y });
    }
    Ok(x)
}
