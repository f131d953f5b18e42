//! State-dependent 1→2 cloning machines as explicit isometries.
//!
//! The output register order is `B ⊗ E ⊗ M`: the copy forwarded to Bob, Eve's
//! copy, and the machine.
//!
//! For the modified Buzek-Hillery machine (η = 0) the machine vectors are
//! embedded as `|Q_i⟩ = √(1-2ξ) e_i` and `|Y_i⟩ = √ξ e_{2+i}` in a
//! four-dimensional machine space. Any vectors with the same inner products give
//! the same reduced states.

use serde::{Deserialize, Serialize};

use crate::circuits::signal_pair;
use crate::error::{check_closed, check_open, Error, Result};
use crate::qstate::{density_from_pure, fidelity_product_form, partial_trace, CMatrix, DensityOperator, PureState};

/// Subsystem positions in the cloner output.
pub const BOB: usize = 0;
pub const EVE: usize = 1;
pub const MACHINE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CloningMachine {
    WoottersZurek,
    ModifiedBuzekHillery { xi: f64 },
}

impl CloningMachine {
    /// Modified Buzek-Hillery machine; `ξ = 0` collapses to Wootters-Zurek.
    pub fn buzek_hillery(xi: f64) -> Result<Self> {
        check_closed("xi", xi, 0.0, 0.5, "[0, 0.5]")?;
        if xi == 0.0 {
            Ok(Self::WoottersZurek)
        } else {
            Ok(Self::ModifiedBuzekHillery { xi })
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::WoottersZurek => Ok(()),
            Self::ModifiedBuzekHillery { xi } => {
                check_closed("xi", xi, 0.0, 0.5, "(0, 0.5]")?;
                if xi == 0.0 {
                    return Err(Error::OutOfRange {
                        name: "xi",
                        value: xi,
                        range: "(0, 0.5]",
                    });
                }
                Ok(())
            }
        }
    }

    /// `ξ`, zero for Wootters-Zurek.
    pub fn xi(&self) -> f64 {
        match *self {
            Self::WoottersZurek => 0.0,
            Self::ModifiedBuzekHillery { xi } => xi,
        }
    }

    pub fn machine_dim(&self) -> usize {
        match self {
            Self::WoottersZurek => 2,
            Self::ModifiedBuzekHillery { .. } => 4,
        }
    }

    /// Output subsystem dimensions `[B, E, M]`.
    pub fn output_dims(&self) -> Vec<usize> {
        vec![2, 2, self.machine_dim()]
    }

    pub fn label(&self) -> String {
        match self {
            Self::WoottersZurek => "WZ".to_string(),
            Self::ModifiedBuzekHillery { xi } => format!("BH(xi={xi})"),
        }
    }

    /// Closed-form fidelity between Eve's two reduced states.
    pub fn closed_form_fidelity(&self, alpha_sq: f64) -> Result<f64> {
        match *self {
            Self::WoottersZurek => fidelity_wz_closed(alpha_sq),
            Self::ModifiedBuzekHillery { xi } => fidelity_bh_closed(alpha_sq, xi),
        }
    }
}

/// Eve's cloner applied to one input qubit.
#[derive(Debug, Clone)]
pub struct CloneOutput {
    /// Bob ⊗ Eve after tracing out the machine.
    pub rho_be: DensityOperator,
    pub rho_e: DensityOperator,
    pub rho_b: DensityOperator,
    /// Projector onto the input.
    pub rho_id: DensityOperator,
}

/// The isometry `V : C² → C² ⊗ C² ⊗ C^{d_M}` as a `(4 d_M) × 2` matrix.
pub fn machine_isometry(m: &CloningMachine) -> Result<CMatrix> {
    m.validate()?;
    let dm = m.machine_dim();
    let idx = |b: usize, e: usize, k: usize| (b * 2 + e) * dm + k;
    let mut v = CMatrix::zeros(4 * dm, 2);
    match *m {
        CloningMachine::WoottersZurek => {
            // |0⟩ → |00⟩|Q0⟩,  |1⟩ → |11⟩|Q1⟩
            v[(idx(0, 0, 0), 0)] = 1.0.into();
            v[(idx(1, 1, 1), 1)] = 1.0.into();
        }
        CloningMachine::ModifiedBuzekHillery { xi } => {
            let q = (1.0 - 2.0 * xi).max(0.0).sqrt();
            let y = xi.sqrt();
            // |0⟩ → |00⟩|Q0⟩ + (|01⟩ + |10⟩)|Y0⟩
            v[(idx(0, 0, 0), 0)] = q.into();
            v[(idx(0, 1, 2), 0)] = y.into();
            v[(idx(1, 0, 2), 0)] = y.into();
            // |1⟩ → |11⟩|Q1⟩ + (|01⟩ + |10⟩)|Y1⟩
            v[(idx(1, 1, 1), 1)] = q.into();
            v[(idx(0, 1, 3), 1)] = y.into();
            v[(idx(1, 0, 3), 1)] = y.into();
        }
    }
    Ok(v)
}

/// Clones one qubit and returns the reduced states.
pub fn clone(m: &CloningMachine, input: &PureState) -> Result<CloneOutput> {
    if input.dims() != [2] {
        return Err(Error::DimensionMismatch(format!(
            "cloner input must be a qubit, got {:?}",
            input.dims()
        )));
    }
    let v = machine_isometry(m)?;
    let output = input.evolve(&v, m.output_dims())?;
    let full = density_from_pure(&output);
    let rho_be = partial_trace(&full, &[BOB, EVE])?;
    let rho_e = partial_trace(&rho_be, &[1])?;
    let rho_b = partial_trace(&rho_be, &[0])?;
    Ok(CloneOutput {
        rho_be,
        rho_e,
        rho_b,
        rho_id: density_from_pure(input),
    })
}

/// `(ρ_E, ρ_E′)` for the signal pair with parameter `α²`.
pub fn eve_state_pair(m: &CloningMachine, alpha_sq: f64) -> Result<(DensityOperator, DensityOperator)> {
    check_open("alpha^2", alpha_sq, 0.0, 1.0, "(0, 1)")?;
    let (phi, phi_prime) = signal_pair(alpha_sq);
    Ok((clone(m, &phi)?.rho_e, clone(m, &phi_prime)?.rho_e))
}

/// Fidelity of Eve's states obtained from the density pipeline rather than the closed form.
pub fn fidelity_numeric(m: &CloningMachine, alpha_sq: f64) -> Result<f64> {
    let (rho_e, rho_e_prime) = eve_state_pair(m, alpha_sq)?;
    fidelity_product_form(&rho_e, &rho_e_prime)
}

/// `4 α² (1 - α²)`.
pub fn fidelity_wz_closed(alpha_sq: f64) -> Result<f64> {
    check_closed("alpha^2", alpha_sq, 0.0, 1.0, "[0, 1]")?;
    Ok(4.0 * alpha_sq * (1.0 - alpha_sq))
}

/// `4 [α² (1 - α²)(1 - 2ξ)² + ξ (1 - ξ)]`.
pub fn fidelity_bh_closed(alpha_sq: f64, xi: f64) -> Result<f64> {
    check_closed("alpha^2", alpha_sq, 0.0, 1.0, "[0, 1]")?;
    check_closed("xi", xi, 0.0, 0.5, "[0, 0.5]")?;
    let shrink = (1.0 - 2.0 * xi).powi(2);
    Ok(4.0 * (alpha_sq * (1.0 - alpha_sq) * shrink + xi * (1.0 - xi)))
}

/// Z-basis error rate Bob sees when every signal is cloned, averaged over the
/// two signal states: `½ Σ_S (1 - ⟨S|ρ_B^(S)|S⟩)`.
pub fn bob_qber_oracle(m: &CloningMachine, alpha_sq: f64) -> Result<f64> {
    check_closed("alpha^2", alpha_sq, 0.0, 1.0, "[0, 1]")?;
    let (phi, phi_prime) = signal_pair(alpha_sq);
    let mut err = 0.0;
    for s in [&phi, &phi_prime] {
        let rho_b = clone(m, s)?.rho_b;
        err += 1.0 - rho_b.expectation(s)?;
    }
    Ok((0.5 * err).clamp(0.0, 1.0))
}
