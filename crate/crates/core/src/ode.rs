//! Dormand–Prince 8(5,3) explicit Runge–Kutta integrator with adaptive step
//! control, for small fixed-size systems.

use crate::error::{Error, Result};

#[rustfmt::skip]
const C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
#[rustfmt::skip]
const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];
#[rustfmt::skip]
const B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
#[rustfmt::skip]
const E3: [f64; 12] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082];
#[rustfmt::skip]
const E5: [f64; 12] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// Step-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dop853 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step length.
    pub max_step: f64,
}

/// End state of an integration and step statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution<const N: usize> {
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn rms<const N: usize>(v: &[f64; N]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / N as f64).sqrt()
}

impl Dop853 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Dop853 {
            rtol,
            atol,
            max_steps: 10_000_000,
            max_step: f64::INFINITY,
        }
    }

    pub fn with_max_step(self, max_step: f64) -> Self {
        Dop853 { max_step, ..self }
    }

    fn scale<const N: usize>(&self, a: &[f64; N], b: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| self.atol + self.rtol * a[i].abs().max(b[i].abs()))
    }

    /// Integrates `y' = f(t, y)` from `(t0, y0)` to `t1`. `t1 < t0` is
    /// allowed and integrates backwards.
    pub fn integrate<const N: usize, F>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
    ) -> Result<Solution<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidConfig(
                "ODE tolerances must be positive".into(),
            ));
        }
        let mut sol = Solution {
            y: y0,
            accepted: 0,
            rejected: 0,
            evaluations: 0,
        };
        if t0 == t1 {
            return Ok(sol);
        }
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut y = y0;
        let mut k0 = f(t, &y);
        sol.evaluations += 1;

        let mut h = self
            .initial_step(&mut f, t, &y, &k0, dir, &mut sol.evaluations)
            .min(self.max_step);
        let mut k = [[0.0; N]; 12];
        let mut just_rejected = false;

        loop {
            if sol.accepted + sol.rejected >= self.max_steps {
                return Err(Error::OdeFailure { s: t, step: h });
            }
            let min_step = 10.0 * f64::EPSILON * t.abs().max(1e-300);
            if h < min_step {
                return Err(Error::OdeFailure { s: t, step: h });
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;

            k[0] = k0;
            for s in 1..12 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += hs * a * kj[i];
                        }
                    }
                }
                k[s] = f(t + C[s] * hs, &ys);
            }
            sol.evaluations += 11;

            let mut y_new = y;
            let mut e5 = [0.0; N];
            let mut e3 = [0.0; N];
            for (s, ks) in k.iter().enumerate() {
                for i in 0..N {
                    y_new[i] += hs * B[s] * ks[i];
                    e5[i] += E5[s] * ks[i];
                    e3[i] += E3[s] * ks[i];
                }
            }
            let sc = self.scale(&y, &y_new);
            let n5: f64 = (0..N).map(|i| (e5[i] / sc[i]).powi(2)).sum();
            let n3: f64 = (0..N).map(|i| (e3[i] / sc[i]).powi(2)).sum();
            let err = if n5 == 0.0 && n3 == 0.0 {
                0.0
            } else {
                h * n5 / ((n5 + 0.01 * n3) * N as f64).sqrt()
            };
            if !err.is_finite() {
                h *= MIN_FACTOR;
                sol.rejected += 1;
                just_rejected = true;
                continue;
            }

            if err < 1.0 {
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(ERROR_EXPONENT)).min(MAX_FACTOR)
                };
                if just_rejected {
                    factor = factor.min(1.0);
                }
                t = if last { t1 } else { t + hs };
                y = y_new;
                sol.accepted += 1;
                if last {
                    sol.y = y;
                    return Ok(sol);
                }
                k0 = f(t, &y);
                sol.evaluations += 1;
                h = (h * factor).min(self.max_step);
                just_rejected = false;
            } else {
                h *= (SAFETY * err.powf(ERROR_EXPONENT)).max(MIN_FACTOR);
                sol.rejected += 1;
                just_rejected = true;
            }
        }
    }

    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[f64; N],
        f0: &[f64; N],
        dir: f64,
        evals: &mut usize,
    ) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let sc = self.scale(y, y);
        let d0 = rms::<N>(&std::array::from_fn(|i| y[i] / sc[i]));
        let d1 = rms::<N>(&std::array::from_fn(|i| f0[i] / sc[i]));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1: [f64; N] = std::array::from_fn(|i| y[i] + h0 * dir * f0[i]);
        let f1 = f(t + h0 * dir, &y1);
        *evals += 1;
        let d2 = rms::<N>(&std::array::from_fn(|i| (f1[i] - f0[i]) / sc[i])) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_consistency() {
        let b: f64 = B.iter().sum();
        assert!((b - 1.0).abs() < 1e-14);
        for s in 1..12 {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-13, "stage {s}");
        }
    }

    #[test]
    fn exponential_decay() {
        let ode = Dop853::new(1e-12, 1e-14);
        let sol = ode
            .integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0)
            .unwrap();
        assert!((sol.y[0] - (-5.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn step_cap_is_respected() {
        let ode = Dop853::new(1e-10, 1e-12);
        let free = ode
            .integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 1.0)
            .unwrap();
        let capped = ode
            .with_max_step(0.1)
            .integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 1.0)
            .unwrap();
        assert!(free.accepted < 10);
        assert!(capped.accepted >= 10);
        assert!((capped.y[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let ode = Dop853::new(1e-12, 1e-14);
        let w = 7.0;
        let sol = ode
            .integrate(|_, y: &[f64; 2]| [y[1], -w * w * y[0]], 10.0, [0.0, w], 0.0)
            .unwrap();
        // y = sin(w (t - 10))
        let want = (w * -10.0_f64).sin();
        assert!((sol.y[0] - want).abs() < 1e-9, "{} vs {}", sol.y[0], want);
        assert!(sol.accepted > 10);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let ode = Dop853::new(0.0, 1e-14);
        assert!(ode
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0)
            .is_err());
    }
}
