//! Shared fixtures for the criterion benches.

use qcm_keyrate::{CloningMachine, DensityOperator, ProtocolConfig, PureState};

/// Full Wootters-Zurek interception at `α² = 0.4`.
pub fn attack_config(n_pulses: usize) -> ProtocolConfig {
    ProtocolConfig::new(n_pulses, 0.4, 42).with_eve(CloningMachine::WoottersZurek, 1.0)
}

/// Two mixed two-qubit states with full-rank, non-commuting supports.
pub fn mixed_pair() -> (DensityOperator, DensityOperator) {
    let a = PureState::from_real(&[0.6, 0.0, 0.0, 0.8], vec![2, 2])
        .unwrap()
        .density();
    let b = PureState::from_real(&[0.5, 0.5, 0.5, 0.5], vec![2, 2])
        .unwrap()
        .density();
    let c = PureState::from_real(&[0.0, 0.8, -0.6, 0.0], vec![2, 2])
        .unwrap()
        .density();
    let mixed = DensityOperator::maximally_mixed(4);
    let rho = a.mix(&b, 0.3).unwrap().mix(&mixed, 0.1).unwrap();
    let sigma = c.mix(&b, 0.6).unwrap().mix(&mixed, 0.2).unwrap();
    (rho, sigma)
}

pub fn bh_machine() -> CloningMachine {
    CloningMachine::buzek_hillery(0.2).unwrap()
}
