//! Ideal-unitary state preparation for Alice's two-qubit source and the
//! Z-basis signal pair it emits.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_open, Error, Result};
use crate::qstate::{CMatrix, PureState};

/// Rotation angles of the preparation circuit.
///
/// `theta1 = 0` is accepted as the Bell-state limit even though the source
/// angle is nominally restricted to `(0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepParams {
    pub theta1: f64,
    pub theta2: f64,
}

impl PrepParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&theta1) {
            return Err(Error::OutOfRange {
                name: "theta1",
                value: theta1,
                range: "[0, pi/2)",
            });
        }
        if !(0.0..FRAC_PI_2).contains(&theta2) {
            return Err(Error::OutOfRange {
                name: "theta2",
                value: theta2,
                range: "[0, pi/2)",
            });
        }
        Ok(Self { theta1, theta2 })
    }

    /// `θ2 = 0`, the setting that yields the signal pair.
    pub fn for_signal(theta1: f64) -> Result<Self> {
        Self::new(theta1, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.theta1.cos()
    }

    pub fn beta(&self) -> f64 {
        self.theta1.sin()
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha().powi(2)
    }
}

/// `(1/√2)[[1, 1], [1, -1]]`.
pub fn gate_hadamard() -> CMatrix {
    CMatrix::from_real(2, 2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
}

/// CNOT with qubit 1 as control and qubit 2 as target.
pub fn gate_cnot12() -> CMatrix {
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ];
    CMatrix::from_real(4, 4, &m)
}

/// Controlled rotation: identity on the control-0 block, rotation by `θ/2`
/// (`[[cos, -sin], [sin, cos]]`) on the control-1 block.
pub fn gate_crot(theta: f64) -> CMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, c,   -s,
        0.0, 0.0, s,   c,
    ];
    CMatrix::from_real(4, 4, &m)
}

/// Real rotation taking `|0⟩` to `cos θ1 |0⟩ + sin θ1 |1⟩`.
pub fn gate_u1(theta1: f64) -> CMatrix {
    let (s, c) = theta1.sin_cos();
    CMatrix::from_real(2, 2, &[c, -s, s, c])
}

/// The gate sequence acting on `|00⟩`, in application order.
pub fn preparation_sequence(p: &PrepParams) -> [CMatrix; 5] {
    let id = CMatrix::identity(2);
    [
        gate_u1(p.theta1).kron(&id),
        gate_cnot12(),
        gate_crot(2.0 * p.theta2),
        gate_hadamard().kron(&id),
        gate_cnot12(),
    ]
}

/// Runs the preparation circuit on `|00⟩`.
pub fn prepare_alice_state(p: &PrepParams) -> Result<PureState> {
    let mut state = PureState::from_real(&[1.0, 0.0, 0.0, 0.0], vec![2, 2])?;
    for gate in preparation_sequence(p) {
        state = state.apply(&gate)?;
    }
    Ok(state)
}

/// `|φ⟩ = α|0⟩ + β|1⟩` and `|φ′⟩ = α|1⟩ - β|0⟩` for `0 < α² < 1`.
pub fn z_basis_states(alpha_sq: f64) -> Result<(PureState, PureState)> {
    check_open("alpha^2", alpha_sq, 0.0, 1.0, "(0, 1)")?;
    Ok(signal_pair(alpha_sq))
}

/// Same pair without the open-interval restriction (`α² ∈ [0, 1]`).
pub(crate) fn signal_pair(alpha_sq: f64) -> (PureState, PureState) {
    let alpha = alpha_sq.clamp(0.0, 1.0).sqrt();
    let beta = (1.0 - alpha_sq).clamp(0.0, 1.0).sqrt();
    let phi = PureState::from_real(&[alpha, beta], vec![2]).expect("normalised by construction");
    let phi_prime = PureState::from_real(&[-beta, alpha], vec![2]).expect("normalised by construction");
    (phi, phi_prime)
}

/// Measures qubit 1 of a two-qubit state in the computational basis and returns
/// the outcome with the renormalised state of qubit 2.
pub fn alice_measure_and_emit<R: Rng + ?Sized>(state: &PureState, rng: &mut R) -> Result<(u8, PureState)> {
    if state.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "expected a two-qubit state, got dims {:?}",
            state.dims()
        )));
    }
    let amps = state.amplitudes();
    let p0 = amps[0].norm_sqr() + amps[1].norm_sqr();
    let outcome: u8 = if rng.random::<f64>() < p0 { 0 } else { 1 };
    let base = 2 * outcome as usize;
    let branch: Vec<Complex64> = amps[base..base + 2].to_vec();
    Ok((outcome, PureState::normalized(branch, vec![2])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn unitary_defect(g: &CMatrix) -> f64 {
        (&g.adjoint() * g).max_abs_diff(&CMatrix::identity(g.rows()))
    }

    fn real_state(amps: &[f64]) -> PureState {
        PureState::from_real(amps, vec![2, 2]).unwrap()
    }

    #[test]
    fn gates_are_unitary() {
        assert!(unitary_defect(&gate_hadamard()) < TOL);
        assert!(unitary_defect(&gate_cnot12()) < TOL);
        for k in 0..10 {
            let t = 0.37 * k as f64;
            assert!(unitary_defect(&gate_crot(t)) < TOL);
            assert!(unitary_defect(&gate_u1(t)) < TOL);
        }
    }

    #[test]
    fn hadamard_examples() {
        let h = gate_hadamard();
        let plus = h.mul_vec(PureState::basis(2, 0).amplitudes());
        assert!((plus[0].re - FRAC_1_SQRT_2).abs() < TOL && (plus[1].re - FRAC_1_SQRT_2).abs() < TOL);
        assert!((&h * &h).max_abs_diff(&CMatrix::identity(2)) < TOL);
        let h1 = h.kron(&CMatrix::identity(2));
        let out = real_state(&[1.0, 0.0, 0.0, 0.0]).apply(&h1).unwrap();
        let expected = real_state(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]);
        assert!(out.same_ray(&expected, TOL));
    }

    #[test]
    fn cnot_examples() {
        let cnot = gate_cnot12();
        let out = real_state(&[0.0, 0.0, 1.0, 0.0]).apply(&cnot).unwrap();
        assert_eq!(out.amplitudes()[3].re, 1.0);
        let out = real_state(&[1.0, 0.0, 0.0, 0.0]).apply(&cnot).unwrap();
        assert_eq!(out.amplitudes()[0].re, 1.0);
        assert!((&cnot * &cnot).max_abs_diff(&CMatrix::identity(4)) < TOL);
    }

    #[test]
    fn crot_examples() {
        assert!(gate_crot(0.0).max_abs_diff(&CMatrix::identity(4)) < TOL);
        // 2θ2 with θ2 = π/2 rotates |10⟩ by a quarter turn onto |11⟩
        let out = real_state(&[0.0, 0.0, 1.0, 0.0])
            .apply(&gate_crot(std::f64::consts::PI))
            .unwrap();
        assert!(out.same_ray(&real_state(&[0.0, 0.0, 0.0, 1.0]), TOL));
        for x in [0usize, 1] {
            let mut amps = [0.0; 4];
            amps[x] = 1.0;
            let out = real_state(&amps).apply(&gate_crot(1.1)).unwrap();
            assert!((out.amplitudes()[x].re - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn u1_examples() {
        assert!(gate_u1(0.0).max_abs_diff(&CMatrix::identity(2)) < TOL);
        let u = gate_u1(std::f64::consts::FRAC_PI_4).kron(&CMatrix::identity(2));
        let out = real_state(&[1.0, 0.0, 0.0, 0.0]).apply(&u).unwrap();
        assert!(out.same_ray(&real_state(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]), TOL));
        let g = gate_u1(0.83);
        assert!((&g.transpose() * &g).max_abs_diff(&CMatrix::identity(2)) < TOL);
    }

    #[test]
    fn bell_limit_and_quarter_angle() {
        let bell = prepare_alice_state(&PrepParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!(bell.same_ray(&real_state(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]), TOL));
        let s = prepare_alice_state(&PrepParams::new(std::f64::consts::FRAC_PI_4, 0.0).unwrap()).unwrap();
        assert!(s.same_ray(&real_state(&[0.5, 0.5, -0.5, 0.5]), TOL));
    }

    #[test]
    fn parameter_ranges() {
        assert!(PrepParams::new(FRAC_PI_2, 0.0).is_err());
        assert!(PrepParams::new(-0.1, 0.0).is_err());
        assert!(PrepParams::new(0.5, FRAC_PI_2).is_err());
        assert!(PrepParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn z_basis_examples() {
        assert!(z_basis_states(1.0).is_err());
        assert!(z_basis_states(0.0).is_err());
        let (phi, phi_p) = z_basis_states(0.5).unwrap();
        assert!(phi.same_ray(
            &PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).unwrap(),
            TOL
        ));
        assert!(phi_p.same_ray(
            &PureState::from_real(&[-FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).unwrap(),
            TOL
        ));
        let (phi, phi_p) = z_basis_states(0.3).unwrap();
        assert!(phi.inner(&phi_p).unwrap().norm() < TOL);
    }

    #[test]
    fn measuring_product_state_is_deterministic() {
        let (phi, _) = z_basis_states(0.3).unwrap();
        let input = crate::qstate::tensor(&PureState::basis(2, 0), &phi);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (bit, out) = alice_measure_and_emit(&input, &mut rng).unwrap();
            assert_eq!(bit, 0);
            assert!(out.same_ray(&phi, TOL));
        }
    }

    #[test]
    fn collapse_of_signal_state() {
        let theta1 = 0.9;
        let state = prepare_alice_state(&PrepParams::for_signal(theta1).unwrap()).unwrap();
        let (phi, phi_p) = z_basis_states(theta1.cos().powi(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (bit, out) = alice_measure_and_emit(&state, &mut rng).unwrap();
            let expected = if bit == 0 { &phi } else { &phi_p };
            assert!(out.same_ray(expected, TOL));
            seen[bit as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }
}
