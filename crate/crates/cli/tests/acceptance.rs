//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::f64::consts::{E, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kinu_core::besselk::{refine_zero, QuadratureConfig};
use kinu_core::estimators::{asymptotic_bracket, nu_asymp_w, nu_lambert, wkb_action, Method};
use kinu_core::lambertw::DEFAULT_TOL;
use kinu_core::quadrature::GaussLegendre;
use kinu_core::slprufer::{nu_zero, phase_at_origin, PhaseSolverConfig};
use kinu_core::{w0, PotentialParams};

const FIRST_ZERO_TOL: f64 = 0.01;
const Z2_FIRST_RANGE: (f64, f64) = (0.02, 0.04);
const Z2_THIRD_TOL: f64 = 0.01;
const SMALL_CASE_TIME: Duration = Duration::from_secs(1);
const SLOPE_RANGE: (f64, f64) = (-2.3, -1.7);
const SLOPE_WINDOW: (u32, u32) = (50, 5000);
const RANKING_N: u32 = 1000;
const V_SLACK: f64 = 1.1;
const V_W_AGREEMENT: f64 = 1e-4;
const ORACLE_TOL: f64 = 1e-8;
const ACTION_TOL: f64 = 1e-10;
const W_RESIDUAL: f64 = 1e-13;
const MASLOV_FACTOR: f64 = 10.0;
const SCALE_COUNT: u32 = 10_000;
const SCALE_TIME: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact(n: u32, z: f64) -> f64 {
    nu_zero(n, z, &PhaseSolverConfig::default()).unwrap().nu
}

fn rel_err(est: f64, exact: f64) -> f64 {
    (est / exact - 1.0).abs()
}

fn first_zero() -> Outcome {
    let t = Instant::now();
    let e = rel_err(nu_asymp_w(1, 1.0).unwrap().value, exact(1, 1.0));
    let dt = t.elapsed();
    check(
        e < FIRST_ZERO_TOL && dt < SMALL_CASE_TIME,
        format!("rel_err {e:.4e}, {dt:.2?}"),
    )
}

fn z2_profile() -> Outcome {
    let t = Instant::now();
    let e1 = rel_err(nu_asymp_w(1, 2.0).unwrap().value, exact(1, 2.0));
    let e3 = rel_err(nu_asymp_w(3, 2.0).unwrap().value, exact(3, 2.0));
    let dt = t.elapsed();
    let ok =
        e1 > Z2_FIRST_RANGE.0 && e1 < Z2_FIRST_RANGE.1 && e3 < Z2_THIRD_TOL && dt < SMALL_CASE_TIME;
    check(ok, format!("n=1 {e1:.4e}, n=3 {e3:.4e}, {dt:.2?}"))
}

/// Least-squares slope of `ln rel_err` against `ln n`.
fn decay_slope(table: &[(u32, f64)]) -> Outcome {
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|(n, _)| (SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(n))
        .map(|&(n, nu)| {
            let e = rel_err(nu_asymp_w(n, 1.0).unwrap().value, nu);
            (f64::from(n).ln(), e.ln())
        })
        .collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    check(
        slope >= SLOPE_RANGE.0 && slope <= SLOPE_RANGE.1,
        format!("slope {slope:.4} over {} zeros", pts.len()),
    )
}

fn ranking() -> Outcome {
    let nu = exact(RANKING_N, 1.0);
    let err = |m: Method| rel_err(m.estimate(RANKING_N, 1.0).unwrap().value, nu);
    let [w, s1, s2, s3, mk, c, bk] = [
        Method::LambertW,
        Method::Series1,
        Method::Series2,
        Method::Series3,
        Method::MagnusKotin,
        Method::Cochran,
        Method::BagirovaKhanmamedov,
    ]
    .map(err);
    let ok = w < s3 && s3 < s2 && s2 < s1 && w < mk.min(c).min(bk);
    check(
        ok,
        format!("W {w:.2e} < S3 {s3:.2e} < S2 {s2:.2e} < S1 {s1:.2e}; MK {mk:.2e}, C {c:.2e}, BK {bk:.2e}"),
    )
}

fn exact_wkb_non_inferior() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [10, 100, 1000] {
        let nu = exact(n, 1.0);
        let v = rel_err(Method::ExactWkbV.estimate(n, 1.0).unwrap().value, nu);
        let w = rel_err(nu_asymp_w(n, 1.0).unwrap().value, nu);
        ok &= v <= V_SLACK * w;
        detail.push(format!("n={n} V/W {:.3}", v / w));
    }
    let n = 10_000;
    let agree = rel_err(
        Method::ExactWkbV.estimate(n, 1.0).unwrap().value,
        nu_asymp_w(n, 1.0).unwrap().value,
    );
    ok &= agree <= V_W_AGREEMENT;
    detail.push(format!("n=1e4 |V/W-1| {agree:.2e}"));
    check(ok, detail.join(", "))
}

fn two_oracles() -> Outcome {
    let quad = QuadratureConfig::default();
    let mut worst = 0.0_f64;
    for z in [1.0, 2.0] {
        for n in 1..=10 {
            let est = nu_asymp_w(n, z).unwrap().value;
            let q = match refine_zero(est, z, asymptotic_bracket(n, z).unwrap(), &quad) {
                Ok(q) => q,
                Err(e) => return Err(format!("besselk failed at n={n}, z={z}: {e}")),
            };
            worst = worst.max(rel_err(q, exact(n, z)));
        }
    }
    check(worst <= ORACLE_TOL, format!("max rel diff {worst:.2e}"))
}

/// The action integral after `x = x_t - w^2`, by 40-point Gauss-Legendre on
/// 16 panels.
fn action_quadrature(energy: f64, p: &PotentialParams) -> f64 {
    let rule = GaussLegendre::new(40);
    // ln(E / U0) via ln_1p: E - U0 is exact near the bottom of the well.
    let top = (0.5 * p.a() * ((energy - p.u0()) / p.u0()).ln_1p()).sqrt();
    let f = |w: f64| 2.0 * w * (2.0 * p.m() * energy * -(-2.0 * w * w / p.a()).exp_m1()).sqrt();
    (0..16)
        .map(|i| rule.integrate(top * f64::from(i) / 16.0, top * f64::from(i + 1) / 16.0, f))
        .sum()
}

fn action() -> Outcome {
    let p = PotentialParams::new(1.3, 0.8, 0.5, 1.0).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..=120 {
        let r = 1.0 + 10f64.powf(-6.0 + 12.0 * f64::from(i) / 120.0);
        let e = r * p.u0();
        worst = worst.max(rel_err(
            wkb_action(e, &p).unwrap(),
            action_quadrature(e, &p),
        ));
    }
    check(
        worst <= ACTION_TOL,
        format!("max rel diff {worst:.2e} over 121 energies"),
    )
}

fn lambert() -> Outcome {
    let mut worst = 0.0_f64;
    for i in 0..=3000 {
        let x = 10f64.powf(-3.0 + 15.0 * f64::from(i) / 3000.0);
        let w = w0(x, DEFAULT_TOL).unwrap();
        worst = worst.max((w * w.exp() / x - 1.0).abs());
    }
    let we = w0(E, DEFAULT_TOL).unwrap();
    let wz = w0(0.0, DEFAULT_TOL).unwrap();
    check(
        worst <= W_RESIDUAL && we == 1.0 && wz == 0.0,
        format!("max residual {worst:.2e}, W(e) = {we}, W(0) = {wz}"),
    )
}

fn maslov() -> Outcome {
    let nu = exact(100, 1.0);
    let with = rel_err(nu_lambert(99.75, 1.0).unwrap(), nu);
    let without = rel_err(nu_lambert(100.0, 1.0).unwrap(), nu);
    check(
        without >= MASLOV_FACTOR * with,
        format!("{without:.2e} / {with:.2e} = {:.0}", without / with),
    )
}

/// Runs the batch through the CLI, then checks every row's zero against
/// the solver contract: the phase crosses `n pi` within `bisect_tol`
/// (relative to the starting estimate) of the reported value.
fn scale(table: &mut Vec<(u32, f64)>) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.csv");
    let t = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_kinu"))
        .args([
            "zeros",
            "--z",
            "1",
            "--count",
            &SCALE_COUNT.to_string(),
            "--out",
        ])
        .arg(&path)
        .status()
        .unwrap();
    let dt = t.elapsed();
    if !status.success() {
        return Err(format!("kinu exited with {status}"));
    }
    let mut reader = csv::Reader::from_path(&path).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        table.push((rec[0].parse().unwrap(), rec[2].parse().unwrap()));
    }
    let cfg = PhaseSolverConfig::default();
    let mut violations = 0;
    for &(n, nu) in table.iter() {
        let half = cfg.bisect_tol * nu_asymp_w(n, 1.0).unwrap().value + 4.0 * f64::EPSILON * nu;
        let below = phase_at_origin(nu - half, 1.0, &cfg).unwrap() - f64::from(n) * PI;
        let above = phase_at_origin(nu + half, 1.0, &cfg).unwrap() - f64::from(n) * PI;
        if !(below <= 0.0 && above >= 0.0) {
            violations += 1;
        }
    }
    let ordered = table
        .iter()
        .enumerate()
        .all(|(i, &(n, _))| n == i as u32 + 1);
    check(
        dt <= SCALE_TIME && table.len() == SCALE_COUNT as usize && ordered && violations == 0,
        format!(
            "{} rows in {dt:.1?}, {violations} outside the tolerance contract",
            table.len()
        ),
    )
}

fn main() -> ExitCode {
    // The scale run also provides the exact zeros for the decay fit.
    let mut table = Vec::new();
    let scaled = scale(&mut table);
    let results: [(&str, Outcome); 10] = [
        ("first zero at z=1 within 1%", first_zero()),
        ("z=2: 2-4% at n=1, below 1% at n=3", z2_profile()),
        (
            "error decay slope in [-2.3, -1.7] over n in [50, 5000]",
            decay_slope(&table),
        ),
        ("method ranking at n=1000, z=1", ranking()),
        (
            "exact WKB condition non-inferior, agrees with W at n=1e4",
            exact_wkb_non_inferior(),
        ),
        ("besselk and phase solver agree to 1e-8", two_oracles()),
        ("closed-form action vs quadrature to 1e-10", action()),
        ("Lambert W residual and exact values", lambert()),
        ("dropping the 1/4 offset costs a factor >= 10", maslov()),
        (
            "10000 zeros at z=1 within 10 minutes, all within tolerance",
            scaled,
        ),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(d) => println!("PASS [{}] {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL [{}] {name}: {d}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
