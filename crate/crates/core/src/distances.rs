//! Cloning-efficiency bounds.
//!
//! From `D(ρ_E, ρ_E′)² ≤ 1 - F²` and `½ D_HS ≤ D²`, together with the imposed
//! condition `D_HS(ρ_E, ρ_id) ≤ D_HS(ρ_E, ρ_E′)`, the Hilbert-Schmidt distance
//! between Eve's copy and the input is bounded by `2(1 - F²)`.
//!
//! The imposed condition is an assumption, not a consequence of the cloners;
//! [`condition_check`] evaluates it on the actual output states and can fail.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{alpha_window_bh, fidelity_window};
use crate::circuits::signal_pair;
use crate::cloners::{clone, fidelity_bh_closed, fidelity_wz_closed, CloningMachine};
use crate::error::{check_closed, Result};
use crate::qstate::{hs_distance, trace_distance};

/// Default `α²` rows of the Wootters-Zurek efficiency table.
pub const WZ_TABLE_ALPHA_SQ: [f64; 6] = [0.293, 0.30, 0.35, 0.40, 0.45, 0.456];

/// One `ξ` block of the Buzek-Hillery tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhBlock {
    pub xi: f64,
    pub alpha_sq: Vec<f64>,
}

/// `(ξ, α²)` rows shared by the Buzek-Hillery threshold and efficiency tables.
pub const BH_TABLE_ROWS: [(f64, &[f64]); 5] = [
    (0.1, &[0.241, 0.30, 0.35, 0.40, 0.445]),
    (0.2, &[0.155, 0.20, 0.25, 0.30, 0.35, 0.40, 0.426]),
    (0.3, &[0.001, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.39]),
    (0.4, &[0.001, 0.05, 0.10, 0.15, 0.20, 0.25, 0.28]),
    (0.455, &[0.001, 0.011]),
];

pub fn default_bh_blocks() -> Vec<BhBlock> {
    BH_TABLE_ROWS
        .iter()
        .map(|(xi, a)| BhBlock {
            xi: *xi,
            alpha_sq: a.to_vec(),
        })
        .collect()
}

/// `[0, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfOpen {
    pub upper: f64,
}

impl fmt::Display for HalfOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[0,{:.*})", p, self.upper),
            None => write!(f, "[0,{})", self.upper),
        }
    }
}

/// `1 - F²`, the bound on the squared trace distance between Eve's states.
pub fn trace_dist_sq_upper(fidelity: f64) -> Result<f64> {
    check_closed("F", fidelity, 0.0, 1.0, "[0, 1]")?;
    Ok(1.0 - fidelity * fidelity)
}

/// `2(1 - F²)`, the bound on `D_HS(ρ_E, ρ_id)`.
pub fn hs_upper(fidelity: f64) -> Result<f64> {
    Ok(2.0 * trace_dist_sq_upper(fidelity)?)
}

/// Distances measured on the actual cloner output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    /// `D_HS(ρ_E, ρ_id)`
    pub hs_eve_ideal: f64,
    /// `D_HS(ρ_E, ρ_E′)`
    pub hs_eve_pair: f64,
    /// `D(ρ_E, ρ_E′)`
    pub trace_eve_pair: f64,
    /// `D_HS(ρ_E, ρ_id) ≤ D_HS(ρ_E, ρ_E′)`
    pub holds: bool,
}

/// Evaluates the imposed condition for the signal pair at `α² ∈ [0, 1]`.
pub fn condition_check(m: &CloningMachine, alpha_sq: f64) -> Result<ConditionCheck> {
    check_closed("alpha^2", alpha_sq, 0.0, 1.0, "[0, 1]")?;
    let (phi, phi_prime) = signal_pair(alpha_sq);
    let out = clone(m, &phi)?;
    let out_prime = clone(m, &phi_prime)?;
    let hs_eve_ideal = hs_distance(&out.rho_e, &out.rho_id)?;
    let hs_eve_pair = hs_distance(&out.rho_e, &out_prime.rho_e)?;
    let trace_eve_pair = trace_distance(&out.rho_e, &out_prime.rho_e)?;
    Ok(ConditionCheck {
        hs_eve_ideal,
        hs_eve_pair,
        trace_eve_pair,
        holds: hs_eve_ideal <= hs_eve_pair,
    })
}

/// Why a table row falls outside the analysed region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    /// Parameters are not valid at all; no numbers were produced.
    Invalid(String),
    /// Computed, but `α²` (or `ξ`) lies outside the interval the tables cover.
    OutOfWindow(String),
}

/// One row of an efficiency table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub xi: Option<f64>,
    pub alpha_sq: f64,
    pub fidelity: f64,
    /// Threshold `δ_z1(F)` on the error rate, when it exists.
    pub delta_z_threshold: Option<f64>,
    pub trace_dist_sq_interval: HalfOpen,
    pub hs_interval: HalfOpen,
    pub measured: ConditionCheck,
    pub condition_holds: bool,
    pub flag: Option<RowFlag>,
}

impl EfficiencyRow {
    pub fn is_flagged(&self) -> bool {
        self.flag.is_some()
    }

    fn compute(
        machine: &CloningMachine,
        xi: Option<f64>,
        alpha_sq: f64,
        fidelity: f64,
        flag: Option<RowFlag>,
    ) -> Result<Self> {
        let b1 = trace_dist_sq_upper(fidelity)?;
        let measured = condition_check(machine, alpha_sq)?;
        Ok(Self {
            xi,
            alpha_sq,
            fidelity,
            delta_z_threshold: crate::bounds::delta_z_threshold(fidelity),
            trace_dist_sq_interval: HalfOpen { upper: b1 },
            hs_interval: HalfOpen { upper: 2.0 * b1 },
            condition_holds: measured.holds,
            measured,
            flag,
        })
    }

    fn invalid(xi: Option<f64>, alpha_sq: f64, reason: String) -> Self {
        let nan_check = ConditionCheck {
            hs_eve_ideal: f64::NAN,
            hs_eve_pair: f64::NAN,
            trace_eve_pair: f64::NAN,
            holds: false,
        };
        Self {
            xi,
            alpha_sq,
            fidelity: f64::NAN,
            delta_z_threshold: None,
            trace_dist_sq_interval: HalfOpen { upper: f64::NAN },
            hs_interval: HalfOpen { upper: f64::NAN },
            measured: nan_check,
            condition_holds: false,
            flag: Some(RowFlag::Invalid(reason)),
        }
    }
}

/// Wootters-Zurek rows; `α²` outside `(0, ½)` is flagged.
pub fn wz_efficiency_table(alpha_sq_list: &[f64]) -> Vec<EfficiencyRow> {
    let machine = CloningMachine::WoottersZurek;
    alpha_sq_list
        .iter()
        .map(|&a2| {
            let fidelity = match fidelity_wz_closed(a2) {
                Ok(f) => f,
                Err(e) => return EfficiencyRow::invalid(None, a2, e.to_string()),
            };
            let flag =
                (!(a2 > 0.0 && a2 < 0.5)).then(|| RowFlag::OutOfWindow(format!("alpha^2 = {a2} is outside (0, 0.5)")));
            EfficiencyRow::compute(&machine, None, a2, fidelity, flag)
                .unwrap_or_else(|e| EfficiencyRow::invalid(None, a2, e.to_string()))
        })
        .collect()
}

/// Modified Buzek-Hillery rows; `ξ` outside `(0, 0.455]` or `α²` outside
/// `alpha_window_bh(ξ)` is flagged.
pub fn bh_efficiency_table(blocks: &[BhBlock]) -> Vec<EfficiencyRow> {
    let mut rows = Vec::new();
    for block in blocks {
        let xi = block.xi;
        let machine = match CloningMachine::buzek_hillery(xi) {
            Ok(m) if xi > 0.0 => m,
            Ok(_) | Err(_) => {
                let reason = format!("xi = {xi} is outside (0, 0.5]");
                rows.extend(
                    block
                        .alpha_sq
                        .iter()
                        .map(|&a2| EfficiencyRow::invalid(Some(xi), a2, reason.clone())),
                );
                continue;
            }
        };
        let window = alpha_window_bh(xi).ok().flatten();
        for &a2 in &block.alpha_sq {
            let fidelity = match fidelity_bh_closed(a2, xi) {
                Ok(f) => f,
                Err(e) => {
                    rows.push(EfficiencyRow::invalid(Some(xi), a2, e.to_string()));
                    continue;
                }
            };
            let flag = if xi > 0.455 {
                Some(RowFlag::OutOfWindow(format!("xi = {xi} exceeds 0.455")))
            } else {
                match window {
                    Some(w) if w.contains(a2) => None,
                    Some(w) => Some(RowFlag::OutOfWindow(format!(
                        "alpha^2 = {a2} is outside ({:.6}, {:.6})",
                        w.lower, w.upper
                    ))),
                    None => Some(RowFlag::OutOfWindow(format!("no alpha^2 window for xi = {xi}"))),
                }
            };
            rows.push(
                EfficiencyRow::compute(&machine, Some(xi), a2, fidelity, flag)
                    .unwrap_or_else(|e| EfficiencyRow::invalid(Some(xi), a2, e.to_string())),
            );
        }
    }
    rows
}

/// Whether `F` is inside the fidelity window.
pub fn in_fidelity_window(fidelity: f64) -> bool {
    fidelity_window().contains(fidelity)
}
