//! Key-rate bounds from Eve's fidelity and the Z-basis error rate.
//!
//! Entropies are in bits. The coefficient `a(F)` is in nats, matching the
//! explicit `1/ln 2` prefactor in front of the natural-log form of the rate.
//!
//! Chain of quantities, each a lower bound of the previous one on its domain:
//!
//! ```text
//! R        = 1 - h((1+F)/2) - h(δ)
//! R_lb     = [a + δ ln δ - δ] / ln 2                 (0 < δ < 1)
//! R_lb,q   = [a + (δ² - 1)/2.5 - δ] / ln 2           (0 < δ < 0.305)
//! ```
//!
//! `R_lb,q > 0` is the quadratic `δ² - 2.5δ + 2.5a - 1 > 0`, whose smaller root is
//! the error-rate threshold `δ_z1 = (2.5 - √(10.25 - 10a)) / 2`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::cloners::CloningMachine;
use crate::error::{check_closed, Result};
use crate::roots::{bisect, Root};
use crate::tolerance;

/// `x ln x` with `0 ln 0 = 0`.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `h(x) = -x log₂ x - (1-x) log₂ (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_closed("x", x, 0.0, 1.0, "[0, 1]")?;
    Ok(-(xlnx(x) + xlnx(1.0 - x)) / LN_2)
}

/// `1 - h(δ_x) - h(δ_z)`.
pub fn shor_preskill_rate(delta_x: f64, delta_z: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(delta_x)? - binary_entropy(delta_z)?)
}

/// `R = 1 - h((1+F)/2) - h(δ_z)`.
pub fn woodhead_rate(fidelity: f64, delta_z: f64) -> Result<f64> {
    check_closed("F", fidelity, 0.0, 1.0, "[0, 1]")?;
    Ok(1.0 - binary_entropy(0.5 * (1.0 + fidelity))? - binary_entropy(delta_z)?)
}

/// `a(F) = ln 2 + u ln u + (1-u) ln(1-u)` with `u = (1+F)/2`, in nats.
pub fn a_coefficient(fidelity: f64) -> Result<f64> {
    check_closed("F", fidelity, 0.0, 1.0, "[0, 1]")?;
    Ok(a_unchecked(fidelity))
}

fn a_unchecked(fidelity: f64) -> f64 {
    let u = 0.5 * (1.0 + fidelity);
    LN_2 + xlnx(u) + xlnx(1.0 - u)
}

/// `R_lb = [a + δ ln δ - δ] / ln 2`.
///
/// At `δ_z = 0` this returns the limit `a / ln 2`.
pub fn r_lb(fidelity: f64, delta_z: f64) -> Result<f64> {
    let a = a_coefficient(fidelity)?;
    check_closed("delta_z", delta_z, 0.0, 1.0, "[0, 1)")?;
    Ok((a + xlnx(delta_z) - delta_z) / LN_2)
}

/// The quadratic lower bound with a flag for whether `δ_z` lies where the
/// underlying log inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBound {
    pub value: f64,
    /// `0 < δ_z < 0.305`.
    pub valid: bool,
}

/// `R_lb,q = [a + (δ² - 1)/2.5 - δ] / ln 2`, evaluated for any `δ_z ∈ [0, 1]`
/// and flagged outside `(0, 0.305)`.
pub fn r_lb_quadratic(fidelity: f64, delta_z: f64) -> Result<QuadraticBound> {
    let a = a_coefficient(fidelity)?;
    check_closed("delta_z", delta_z, 0.0, 1.0, "[0, 1]")?;
    Ok(QuadraticBound {
        value: (a + (delta_z * delta_z - 1.0) / 2.5 - delta_z) / LN_2,
        valid: quadratic_valid(delta_z),
    })
}

/// Whether `ln δ > (δ² - 1)/(2.5 δ)` is guaranteed at `δ`.
pub fn quadratic_valid(delta_z: f64) -> bool {
    delta_z > 0.0 && delta_z < tolerance::QUADRATIC_VALIDITY
}

/// Smaller root of `δ² - 2.5δ + 2.5a - 1`, present only when it is positive
/// (`a > 0.4`). `None` for fidelities outside `[0, 1]`.
pub fn delta_z_threshold(fidelity: f64) -> Option<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return None;
    }
    let a = a_unchecked(fidelity);
    // 10.25 - 10a > 0 since a ≤ ln 2
    let root = 0.5 * (2.5 - (10.25 - 10.0 * a).sqrt());
    (root > 0.0).then_some(root)
}

/// Larger root of the quadratic, always above 1 and therefore never an error rate.
pub fn delta_z_rejected_root(fidelity: f64) -> Result<f64> {
    let a = a_coefficient(fidelity)?;
    Ok(0.5 * (2.5 + (10.25 - 10.0 * a).sqrt()))
}

/// An open interval with the residuals of its bisected endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lower: f64,
    pub upper: f64,
    pub lower_residual: f64,
    pub upper_residual: f64,
}

impl Window {
    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    fn from_roots(lower: Root, upper: Root) -> Self {
        Self {
            lower: lower.x,
            upper: upper.x,
            lower_residual: lower.residual,
            upper_residual: upper.residual,
        }
    }
}

/// Fidelities for which the error-rate threshold exists and stays inside the
/// validity range of the quadratic bound: lower end solves `a(F) = 0.4`, upper
/// end solves `δ_z1(F) = 0.305`.
pub fn fidelity_window() -> Window {
    let lower =
        bisect(|f| a_unchecked(f) - 0.4, 0.0, 1.0, tolerance::BISECTION).expect("a(F) - 0.4 changes sign on [0, 1]");
    let upper = bisect(
        |f| delta_z_threshold(f).unwrap_or(0.0) - tolerance::QUADRATIC_VALIDITY,
        lower.x,
        1.0,
        tolerance::BISECTION,
    )
    .expect("threshold crosses 0.305 inside the window");
    Window::from_roots(lower, upper)
}

/// Solves `F(α²) = target` for a fidelity increasing on `(0, ½)`.
fn invert_on_half(f: impl Fn(f64) -> f64, target: f64) -> Result<Root> {
    bisect(|x| f(x) - target, 0.0, 0.5, tolerance::BISECTION)
}

/// `α² ∈ (0, ½)` for which the Wootters-Zurek fidelity lies in the fidelity window.
pub fn alpha_window_wz() -> Window {
    let fw = fidelity_window();
    let f = |x: f64| 4.0 * x * (1.0 - x);
    let lower = invert_on_half(f, fw.lower).expect("F_WZ spans [0, 1] on [0, 1/2]");
    let upper = invert_on_half(f, fw.upper).expect("F_WZ spans [0, 1] on [0, 1/2]");
    Window::from_roots(lower, upper)
}

/// `α² ∈ (0, ½)` for which the modified Buzek-Hillery fidelity lies in the
/// fidelity window, or `None` when even `α² → 0` already overshoots it.
///
/// When `F_BH(0, ξ)` is inside the window the lower end is `0` with its residual
/// measured against the window's lower fidelity.
pub fn alpha_window_bh(xi: f64) -> Result<Option<Window>> {
    crate::error::check_open("xi", xi, 0.0, 0.5 + f64::EPSILON, "(0, 0.5]")?;
    let fw = fidelity_window();
    let f = |x: f64| 4.0 * (x * (1.0 - x) * (1.0 - 2.0 * xi).powi(2) + xi * (1.0 - xi));
    let floor = f(0.0);
    if floor >= fw.upper {
        return Ok(None);
    }
    let lower = if floor > fw.lower {
        Root {
            x: 0.0,
            residual: floor - fw.lower,
            width: 0.0,
            iterations: 0,
        }
    } else {
        invert_on_half(f, fw.lower)?
    };
    let upper = invert_on_half(f, fw.upper)?;
    Ok(Some(Window::from_roots(lower, upper)))
}

/// Every quantity of the bound chain at one `(F, δ_z)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub fidelity: f64,
    pub delta_z: f64,
    /// Cloning-bound rate `R`.
    pub rate: f64,
    pub r_lb: f64,
    pub r_lb_quadratic: f64,
    /// Whether `δ_z` lies where the quadratic bound is derived.
    pub quadratic_valid: bool,
    pub delta_z_threshold: Option<f64>,
    /// `0 < δ_z < δ_z1(F)`; certifies a positive key rate through the quadratic bound.
    pub positive: bool,
}

impl KeyRateReport {
    pub fn evaluate(fidelity: f64, delta_z: f64) -> Result<Self> {
        let rate = woodhead_rate(fidelity, delta_z)?;
        let lb = r_lb(fidelity, delta_z.min(1.0 - f64::EPSILON))?;
        let quad = r_lb_quadratic(fidelity, delta_z)?;
        let threshold = delta_z_threshold(fidelity);
        Ok(Self {
            fidelity,
            delta_z,
            rate,
            r_lb: lb,
            r_lb_quadratic: quad.value,
            quadratic_valid: quad.valid,
            delta_z_threshold: threshold,
            positive: threshold.is_some_and(|t| delta_z < t),
        })
    }

    /// Report using the closed-form fidelity of `machine` at `α²`.
    pub fn for_machine(machine: &CloningMachine, alpha_sq: f64, delta_z: f64) -> Result<Self> {
        Self::evaluate(machine.closed_form_fidelity(alpha_sq)?, delta_z)
    }
}
