//! Numerical laboratory for radial solutions of the Trudinger–Moser
//! Euler–Lagrange equation on the unit disc
//!
//! ```text
//!     -Δu - αu = γ u e^{u²}   in B₁,   u > 0,   u = 0 on ∂B₁
//! ```
//!
//! The crate solves the radial boundary-value problem by shooting on the
//! multiplier `γ` for a prescribed peak `c = u(0)`, rescales blow-up
//! families around the concentration radius `r_ε`, compares them with the
//! Liouville bubble `φ₀ = -ln(1+r²)` and its second-order correction `w₀`,
//! measures the Dirichlet energy expansion in powers of `c⁻⁴`, and computes
//! subcritical extremals of the Trudinger–Moser and Adimurthi–Druet type
//! functionals.
//!
//! Module map:
//!
//! * [`grid`]: graded radial meshes and disc quadrature.
//! * [`bubble`]: closed forms of `φ₀`, `w₀` and the dilogarithm integral.
//! * [`ode`]: embedded Dormand–Prince 5(4) integrator.
//! * [`shooting`]: IVP and BVP solvers for the radial equation.
//! * [`family`]: scaling radius, rescaled profiles, blow-up sweeps.
//! * [`energy`]: energy norms, inner/outer split, `c⁻⁴` coefficient fit.
//! * [`green`]: radial Green function `G_α` and the `α₀` threshold.
//! * [`extremal`]: subcritical extremals and the functional evaluator.
//! * [`parallel`]: data-parallel map with a sequential fallback.

pub mod bubble;
pub mod energy;
mod error;
pub mod extremal;
pub mod family;
pub mod green;
pub mod grid;
pub mod ode;
pub mod parallel;
pub mod quad;
pub mod rootfind;
pub mod shooting;

pub use error::{Error, Result};

/// First positive zero of the Bessel function `J₀`.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// First Dirichlet eigenvalue of `-Δ` on the unit disc, `j₀,₁²`.
pub const LAMBDA1: f64 = J0_FIRST_ZERO * J0_FIRST_ZERO;

/// Largest peak value `c` for which `e^{c²}` stays inside binary64.
pub const MAX_PEAK: f64 = 26.0;

pub(crate) fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
