//! Zeros of the modified Bessel function `K_{i nu}(z)` with respect to the
//! order `nu`, and the bound-state spectrum of the exponential well
//! `U(x) = U0 e^{2x/a}` on the half line.
//!
//! The two problems are the same: the `n`-th zero `nu_n` at `z = sqrt(u)`
//! gives the level `eps_{n-1} = nu_n^2` in units of `hbar^2 / (2 m a^2)`,
//! where `u = 2 m a^2 U0 / hbar^2`.
//!
//! - [`estimators`]: closed-form estimates, chiefly the Lambert-W formula
//!   `nu_n ~ pi (n - 1/4) / W(2 pi (n - 1/4) / (e z))`, plus the classical
//!   logarithmic asymptotics it is compared against.
//! - [`slprufer`]: exact zeros for any `n` from a Prüfer phase method.
//! - [`besselk`]: direct quadrature of `K_{i nu}(x)`, an independent check
//!   on the phase method for moderate `nu`.
//! - [`lambertw`]: the principal branch `W_0`.
//! - [`table`]: comparison records and their CSV layout.
//!
//! ```
//! use kinu_core::{estimators, slprufer};
//!
//! let exact = slprufer::nu_zero(1, 1.0, &Default::default()).unwrap();
//! let est = estimators::nu_asymp_w(1, 1.0).unwrap();
//! assert!((est.value / exact.nu - 1.0).abs() < 0.01);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besselk;
pub mod error;
pub mod estimators;
pub mod lambertw;
pub mod ode;
pub mod quadrature;
pub mod slprufer;
pub mod table;

pub use besselk::{k_inu, k_inu_dnu, refine_zero, QuadratureConfig};
pub use error::{Error, Result};
pub use estimators::{Method, PotentialParams, ZeroEstimate};
pub use lambertw::{w0, WSeriesOrder};
pub use slprufer::{batch_zeros, nu_zero, phase_at_origin, EigenResult, PhaseSolverConfig};
pub use table::ZeroRecord;
