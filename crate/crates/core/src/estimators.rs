//! Closed-form estimates of the zeros `nu_n` of `K_{i nu}(z)` and of the
//! spectrum of the exponential well.
//!
//! Zeros are counted from `n = 1`; energy levels from `n = 0` (the number
//! of nodes of the wave function). The two counts differ by one:
//! `eps_n = nu_{n+1}^2` at `z = sqrt(u)`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lambertw::{self, WSeriesOrder, DEFAULT_TOL};

/// Estimator formula for `nu_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// `pi (n - 1/4) / W(2 pi (n - 1/4) / (e z))`
    LambertW,
    /// `W` replaced by `ln x`.
    Series1,
    /// `W` replaced by `ln x - ln ln x`.
    Series2,
    /// `W` replaced by `ln x - ln ln x + ln ln x / ln x`.
    Series3,
    /// `pi (n + 1/4) / ln(pi (n + 1/4) / (e z))`
    MagnusKotin,
    /// `pi n / ln(3 pi n / (e z))`
    Cochran,
    /// `pi n / ln n`; independent of `z`.
    BagirovaKhanmamedov,
    /// `z V(pi (n - 1/4) / z)`, the unexpanded semiclassical condition.
    ExactWkbV,
}

impl Method {
    /// Every method, in the fixed column order used by the CSV tables.
    pub const ALL: [Method; 8] = [
        Method::LambertW,
        Method::Series1,
        Method::Series2,
        Method::Series3,
        Method::MagnusKotin,
        Method::Cochran,
        Method::BagirovaKhanmamedov,
        Method::ExactWkbV,
    ];

    /// Column name.
    pub fn name(self) -> &'static str {
        match self {
            Method::LambertW => "lambert_w",
            Method::Series1 => "series_1",
            Method::Series2 => "series_2",
            Method::Series3 => "series_3",
            Method::MagnusKotin => "mk",
            Method::Cochran => "cochran",
            Method::BagirovaKhanmamedov => "bk",
            Method::ExactWkbV => "exact_wkb_v",
        }
    }

    /// Evaluates this method for zero `n` at argument `z`.
    pub fn estimate(self, n: u32, z: f64) -> Result<ZeroEstimate> {
        match self {
            Method::LambertW => nu_asymp_w(n, z),
            Method::Series1 => nu_asymp_series(n, z, WSeriesOrder::ONE),
            Method::Series2 => nu_asymp_series(n, z, WSeriesOrder::TWO),
            Method::Series3 => nu_asymp_series(n, z, WSeriesOrder::THREE),
            Method::MagnusKotin => nu_mk(n, z),
            Method::Cochran => nu_cochran(n, z),
            Method::BagirovaKhanmamedov => nu_bk(n, z),
            Method::ExactWkbV => nu_exact_wkb(n, z),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim().to_ascii_lowercase().as_str() {
            "lambert_w" | "lambertw" | "w" => Method::LambertW,
            "series_1" | "series1" => Method::Series1,
            "series_2" | "series2" => Method::Series2,
            "series_3" | "series3" => Method::Series3,
            "mk" | "magnus_kotin" => Method::MagnusKotin,
            "cochran" | "c" => Method::Cochran,
            "bk" | "bagirova_khanmamedov" => Method::BagirovaKhanmamedov,
            "exact_wkb_v" | "exact_wkb" | "v" => Method::ExactWkbV,
            other => return Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        };
        Ok(m)
    }
}

/// One estimate of `nu_n` at fixed `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEstimate {
    pub n: u32,
    pub z: f64,
    pub method: Method,
    pub value: f64,
}

/// Physical parameters of the well `U(x) = U0 exp(2x/a)` for `x > 0`,
/// with an infinite wall at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    u0: f64,
    a: f64,
    m: f64,
    hbar: f64,
}

impl PotentialParams {
    pub fn new(u0: f64, a: f64, m: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("U0", u0), ("a", a), ("m", m), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite (got {v})"
                )));
            }
        }
        let p = PotentialParams { u0, a, m, hbar };
        if !(p.u().is_finite() && p.u() > 0.0 && p.energy_unit() > 0.0) {
            return Err(Error::InvalidConfig(
                "dimensionless well depth u = 2 m a^2 U0 / hbar^2 is not representable".into(),
            ));
        }
        Ok(p)
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Energy unit `hbar^2 / (2 m a^2)`.
    pub fn energy_unit(&self) -> f64 {
        (self.hbar / self.a) * (self.hbar / self.a) / (2.0 * self.m)
    }

    /// `u = U0 / energy_unit`.
    pub fn u(&self) -> f64 {
        self.u0 / self.energy_unit()
    }

    /// Bessel argument `z = sqrt(u)`.
    pub fn z(&self) -> f64 {
        self.u().sqrt()
    }
}

fn check_nz(routine: &'static str, n: u32, z: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(routine, 0.0, "zeros are counted from n = 1"));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(routine, z, "z must be positive and finite"));
    }
    Ok(())
}

fn estimate(n: u32, z: f64, method: Method, value: f64) -> ZeroEstimate {
    ZeroEstimate {
        n,
        z,
        method,
        value,
    }
}

/// `pi k / W(2 pi k / (e z))` for a real shifted index `k > 0`. With
/// `k = n - 1/4` this is [`nu_asymp_w`].
pub fn nu_lambert(k: f64, z: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(
            "nu_lambert",
            k,
            "shifted index must be positive",
        ));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(
            "nu_lambert",
            z,
            "z must be positive and finite",
        ));
    }
    let p = PI * k / z;
    // nu / z solves ln(2/e) X + X ln X = pi k / z.
    Ok(z * lambertw::solve_xlog((2.0 / E).ln(), p, DEFAULT_TOL)?)
}

/// Lambert-W estimate of the `n`-th zero.
pub fn nu_asymp_w(n: u32, z: f64) -> Result<ZeroEstimate> {
    check_nz("nu_asymp_w", n, z)?;
    let k = f64::from(n) - 0.25;
    let value = PI * k / lambertw::w0(2.0 * PI * k / (E * z), DEFAULT_TOL)?;
    Ok(estimate(n, z, Method::LambertW, value))
}

/// Lambert-W estimate with `W` replaced by its truncated log series.
pub fn nu_asymp_series(n: u32, z: f64, order: WSeriesOrder) -> Result<ZeroEstimate> {
    check_nz("nu_asymp_series", n, z)?;
    let k = f64::from(n) - 0.25;
    let w = lambertw::w_series(2.0 * PI * k / (E * z), order)?;
    let method = match order.terms() {
        1 => Method::Series1,
        2 => Method::Series2,
        _ => Method::Series3,
    };
    Ok(estimate(n, z, method, PI * k / w))
}

/// Magnus–Kotin estimate `pi (n + 1/4) / ln(pi (n + 1/4) / (e z))`.
pub fn nu_mk(n: u32, z: f64) -> Result<ZeroEstimate> {
    check_nz("nu_mk", n, z)?;
    let k = f64::from(n) + 0.25;
    let arg = PI * k / (E * z);
    if arg <= 1.0 {
        return Err(Error::domain(
            "nu_mk",
            f64::from(n),
            "logarithm not positive",
        ));
    }
    Ok(estimate(n, z, Method::MagnusKotin, PI * k / arg.ln()))
}

/// Cochran estimate `pi n / ln(3 pi n / (e z))`.
pub fn nu_cochran(n: u32, z: f64) -> Result<ZeroEstimate> {
    check_nz("nu_cochran", n, z)?;
    let k = f64::from(n);
    let arg = 3.0 * PI * k / (E * z);
    if arg <= 1.0 {
        return Err(Error::domain("nu_cochran", k, "logarithm not positive"));
    }
    Ok(estimate(n, z, Method::Cochran, PI * k / arg.ln()))
}

/// Bagirova–Khanmamedov estimate `pi n / ln n`. The formula carries no `z`
/// dependence; `z` is only recorded in the returned estimate.
pub fn nu_bk(n: u32, z: f64) -> Result<ZeroEstimate> {
    check_nz("nu_bk", n, z)?;
    if n < 2 {
        return Err(Error::domain("nu_bk", 1.0, "ln n vanishes at n = 1"));
    }
    let k = f64::from(n);
    Ok(estimate(n, z, Method::BagirovaKhanmamedov, PI * k / k.ln()))
}

/// `t - tanh t` times `cosh t`, i.e. `t cosh t - sinh t`, accurate for
/// small `t` where the two terms cancel.
fn v_condition(t: f64) -> f64 {
    if t < 0.5 {
        // sum_{k>=1} t^{2k+1} (1/(2k)! - 1/(2k+1)!) = sum t^{2k+1} 2k/(2k+1)!
        let t2 = t * t;
        let mut term = t; // t^{2k+1} / (2k+1)!
        let mut sum = 0.0;
        for k in 1..30 {
            let kk = f64::from(k);
            term *= t2 / ((2.0 * kk) * (2.0 * kk + 1.0));
            let add = term * 2.0 * kk;
            sum += add;
            if add < sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        t * t.cosh() - t.sinh()
    }
}

/// Solves `V (artanh s - s) = x` with `s = sqrt(1 - 1/V^2)` for `V >= 1`.
///
/// This is the semiclassical quantization condition of the exponential well
/// written for `V = nu / z` (equivalently `V = sqrt(E / U0)`); the zeros
/// estimate is `nu_n = z V(pi (n - 1/4) / z)`. Internally the equation is
/// solved for `t = artanh s`, where it reads `t cosh t - sinh t = x` and
/// `V = cosh t`. The residual is below `tol * max(x, 1)`.
pub fn v_solve(x: f64, tol: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "v_solve",
            x,
            "x must be non-negative and finite",
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let scale = x.max(1.0);

    // Small x: x ~ t^3 / 3. Large x: x ~ (t - 1) e^t / 2, so
    // (t - 1) e^(t - 1) = 2x/e.
    let mut t = if x < 0.3 {
        (3.0 * x).cbrt()
    } else {
        1.0 + lambertw::w0(2.0 * x / E, DEFAULT_TOL)?
    };

    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    for _ in 0..100 {
        let h = v_condition(t) - x;
        if h.abs() <= tol * scale {
            return Ok(t.cosh());
        }
        if h < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // d/dt (t cosh t - sinh t) = t sinh t
        let mut next = t - h / (t * t.sinh());
        if !(next > lo && next < hi) {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * t.max(lo) + 1.0
            };
        }
        if (next - t).abs() <= 2.0 * f64::EPSILON * t {
            // Converged to rounding; accept if within the representable floor.
            let r = (v_condition(next) - x).abs();
            if r <= tol * scale + 8.0 * f64::EPSILON * scale {
                return Ok(next.cosh());
            }
        }
        t = next;
    }
    Err(Error::NonConvergence {
        routine: "v_solve",
        iterations: 100,
    })
}

/// `z V(pi (n - 1/4) / z)`.
pub fn nu_exact_wkb(n: u32, z: f64) -> Result<ZeroEstimate> {
    check_nz("nu_exact_wkb", n, z)?;
    let x = PI * (f64::from(n) - 0.25) / z;
    let value = z * v_solve(x, DEFAULT_TOL)?;
    Ok(estimate(n, z, Method::ExactWkbV, value))
}

/// `artanh s - s`, with a series near zero where the difference cancels.
fn artanh_minus_identity(s: f64) -> f64 {
    if s < 0.3 {
        let s2 = s * s;
        let mut pow = s;
        let mut sum = 0.0;
        for k in 1..60 {
            pow *= s2;
            let add = pow / f64::from(2 * k + 1);
            sum += add;
            if add < sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        s.atanh() - s
    }
}

/// Closed-form semiclassical action between the wall and the turning point,
/// `sqrt(2m) a (sqrt(E) artanh sqrt(1 - U0/E) - sqrt(E - U0))`.
pub fn wkb_action(energy: f64, p: &PotentialParams) -> Result<f64> {
    if !energy.is_finite() || energy < p.u0 {
        return Err(Error::domain(
            "wkb_action",
            energy,
            "energy must be at least U0",
        ));
    }
    let s = ((energy - p.u0) / energy).sqrt();
    Ok((2.0 * p.m).sqrt() * p.a * energy.sqrt() * artanh_minus_identity(s))
}

/// Semiclassical energy of level `n` (number of nodes, from 0).
pub fn wkb_energy(n: u32, p: &PotentialParams) -> Result<f64> {
    let k = f64::from(n) + 0.75;
    let arg = 2.0 / E * PI * p.hbar * k / (2.0 * p.m * p.u0 * p.a * p.a).sqrt();
    let w = lambertw::w0(arg, DEFAULT_TOL)?;
    let kinetic = PI * k / p.a;
    Ok(p.hbar * p.hbar / (2.0 * p.m) * kinetic * kinetic / (w * w))
}

/// Bracket around the `n`-th zero whose half-widths are half the asymptotic
/// spacing to the neighbouring zeros.
pub fn asymptotic_bracket(n: u32, z: f64) -> Result<(f64, f64)> {
    let g = nu_asymp_w(n, z)?.value;
    let up = nu_asymp_w(n + 1, z)?.value - g;
    let down = if n > 1 {
        g - nu_asymp_w(n - 1, z)?.value
    } else {
        up
    };
    Ok(((g - 0.5 * down).max(0.5 * g), g + 0.5 * up))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_first_zero() {
        let e = nu_asymp_w(1, 1.0).unwrap();
        assert_eq!(e.method, Method::LambertW);
        let arg = 2.0 * PI * 0.75 / E;
        assert!((arg - 1.733_591).abs() < 1e-6);
        assert!((e.value - 2.9893).abs() < 1e-4, "{}", e.value);
        // Same value through the transcendental-equation route.
        assert!((nu_lambert(0.75, 1.0).unwrap() - e.value).abs() < 1e-13);
    }

    #[test]
    fn series_one_at_e_to_e() {
        // Choose z so that the W argument at n = 5 is exactly e^e.
        let n = 5;
        let k = 4.75;
        let z = 2.0 * PI * k / (E * E.powf(E));
        let v = nu_asymp_series(n, z, WSeriesOrder::ONE).unwrap().value;
        assert!((v - PI * k / E).abs() < 1e-12);
    }

    #[test]
    fn literature_formulas() {
        let mk = nu_mk(1, 1.0).unwrap().value;
        // 1.25 pi / ln(1.25 pi / e), evaluated in 30-digit arithmetic.
        assert!((mk - 10.674_841_998_012_3).abs() < 1e-11, "{mk}");
        assert!((mk - 10.672).abs() < 5e-3);
        let c = nu_cochran(1000, 1.0).unwrap().value;
        assert!((c - 385.4).abs() < 0.1, "{c}");
        for k in 1..8 {
            let n = (k as f64).exp().round() as u32;
            let v = nu_bk(n, 1.0).unwrap().value;
            let nf = f64::from(n);
            assert!((v - PI * nf / nf.ln()).abs() < 1e-12);
        }
        assert!(nu_bk(1, 1.0).is_err());
        assert!(nu_mk(1, 2.0).is_err());
        assert!(nu_cochran(1, 4.0).is_err());
        assert_eq!(nu_bk(10, 1.0).unwrap().value, nu_bk(10, 7.0).unwrap().value);
    }

    #[test]
    fn argument_validation() {
        assert!(nu_asymp_w(0, 1.0).is_err());
        assert!(nu_asymp_w(1, 0.0).is_err());
        assert!(nu_asymp_w(1, f64::NAN).is_err());
        assert!(nu_asymp_series(1, 1.0, WSeriesOrder::TWO).is_err());
        assert!(PotentialParams::new(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }

    #[test]
    fn v_solve_trivial_and_parametric() {
        assert_eq!(v_solve(0.0, 1e-14).unwrap(), 1.0);
        // s = 0.8: V = 1/sqrt(1 - s^2) = 5/3, x = V (artanh s - s).
        let s: f64 = 0.8;
        let v = 1.0 / (1.0 - s * s).sqrt();
        let x = v * (s.atanh() - s);
        assert!((v_solve(x, 1e-14).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert!(v_solve(-1.0, 1e-14).is_err());
    }

    #[test]
    fn v_condition_series_matches_direct() {
        for &t in &[0.2_f64, 0.35, 0.49] {
            let direct = t * t.cosh() - t.sinh();
            assert!((v_condition(t) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn action_values() {
        let p = PotentialParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(wkb_action(1.0, &p).unwrap(), 0.0);
        // r = 4 with sqrt(2m) a sqrt(U0) = 1.
        let got = wkb_action(4.0, &p).unwrap();
        let want = 2.0 * 0.75_f64.sqrt().atanh() - 3.0_f64.sqrt();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.901_865).abs() < 1e-6);
        assert!(wkb_action(0.5, &p).is_err());
    }

    #[test]
    fn energy_index_shift() {
        for &u in &[1.0, 4.0] {
            let p = PotentialParams::new(u, 1.0, 0.5, 1.0).unwrap();
            assert!((p.u() - u).abs() < 1e-15);
            for n in 0..=100 {
                let eps = wkb_energy(n, &p).unwrap() / p.energy_unit();
                let nu = nu_asymp_w(n + 1, p.z()).unwrap().value;
                assert!((eps / (nu * nu) - 1.0).abs() < 1e-14, "u={u} n={n}");
            }
        }
    }

    #[test]
    fn bracket_contains_estimate() {
        for n in [1, 2, 10, 1000] {
            let (lo, hi) = asymptotic_bracket(n, 1.0).unwrap();
            let g = nu_asymp_w(n, 1.0).unwrap().value;
            assert!(lo > 0.0 && lo < g && g < hi);
        }
    }
}
