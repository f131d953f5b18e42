use num_complex::Complex64;
use proptest::prelude::*;
use qcm_keyrate::bounds::{
    a_coefficient, binary_entropy, delta_z_threshold, fidelity_window, r_lb, r_lb_quadratic, woodhead_rate,
};
use qcm_keyrate::cloners::{fidelity_numeric, fidelity_wz_closed};
use qcm_keyrate::qstate::{
    fidelity_product_form, fidelity_trace_norm, hermitian_eigen, hs_distance, partial_trace, tensor, trace_distance,
    CMatrix,
};
use qcm_keyrate::{CloningMachine, DensityOperator, PureState};

/// Qubit state from a Bloch vector with |r| ≤ 1.
fn bloch(r: [f64; 3]) -> DensityOperator {
    let [x, y, z] = r;
    let m = CMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    );
    DensityOperator::new(m, vec![2]).unwrap()
}

fn bloch_vector() -> impl Strategy<Value = [f64; 3]> {
    (0.0..=1.0f64, -1.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, cz, phi)| {
        let sz = (1.0 - cz * cz).sqrt();
        [r * sz * phi.cos(), r * sz * phi.sin(), r * cz]
    })
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Qubit fidelity `Tr ρσ + 2√(det ρ det σ)`.
fn fidelity_oracle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let det = |r: [f64; 3]| ((1.0 - r.iter().map(|x| x * x).sum::<f64>()) / 4.0).max(0.0);
    (1.0 + dot) / 2.0 + 2.0 * (det(a) * det(b)).sqrt()
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn qubit_fidelity_matches_oracle(a in bloch_vector(), b in bloch_vector()) {
        let (rho, sigma) = (bloch(a), bloch(b));
        let f = fidelity_product_form(&rho, &sigma).unwrap();
        prop_assert!((f - fidelity_oracle(a, b)).abs() < 1e-9);
        prop_assert!((f - fidelity_product_form(&sigma, &rho).unwrap()).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn qubit_distances_match_bloch_geometry(a in bloch_vector(), b in bloch_vector()) {
        let (rho, sigma) = (bloch(a), bloch(b));
        let d = dist(a, b);
        let td = trace_distance(&rho, &sigma).unwrap();
        let hs = hs_distance(&rho, &sigma).unwrap();
        prop_assert!((td - d / 2.0).abs() < 1e-10);
        prop_assert!((hs - d * d / 2.0).abs() < 1e-12);
        // D² ≤ 1 - F² and D_HS ≤ 2 D²
        let f = fidelity_product_form(&rho, &sigma).unwrap();
        prop_assert!(td * td <= 1.0 - f * f + 1e-10);
        prop_assert!(hs <= 2.0 * td * td + 1e-12);
    }

    #[test]
    fn fidelity_forms_agree_on_mixed_ququarts(u in complex_vec(4), v in complex_vec(4), w in complex_vec(4), p in 0.05..0.95f64) {
        let st = |x: Vec<Complex64>| PureState::normalized(x, vec![2, 2]).unwrap().density();
        let rho = st(u.clone()).mix(&st(v), p).unwrap();
        let sigma = st(w).mix(&st(u), 1.0 - p).unwrap();
        let f1 = fidelity_product_form(&rho, &sigma).unwrap();
        let f2 = fidelity_trace_norm(&rho, &sigma).unwrap();
        prop_assert!((f1 - f2).abs() < 1e-8, "{f1} vs {f2}");
        let td = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(td * td <= 1.0 - f1 + 1e-8);
    }

    #[test]
    fn partial_trace_inverts_tensor(a in bloch_vector(), u in complex_vec(3)) {
        let rho = bloch(a);
        let sigma = PureState::normalized(u, vec![3]).unwrap().density();
        let joint = tensor(&rho, &sigma);
        let left = partial_trace(&joint, &[0]).unwrap();
        let right = partial_trace(&joint, &[1]).unwrap();
        prop_assert!(left.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        prop_assert!(right.matrix().max_abs_diff(sigma.matrix()) < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_hermitian(v in complex_vec(16)) {
        let m = CMatrix::from_vec(4, 4, v);
        let h = &m + &m.adjoint();
        let e = hermitian_eigen(&h);
        let rebuilt = e.map(|x| x);
        prop_assert!(rebuilt.max_abs_diff(&h) < 1e-10 * (1.0 + h.max_abs()));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = e.values.iter().sum();
        prop_assert!((tr - h.trace().re).abs() < 1e-10);
    }

    #[test]
    fn cloner_fidelity_closed_equals_numeric(a2 in 0.0..=1.0f64, xi in 0.0..=0.5f64) {
        for m in [CloningMachine::WoottersZurek, CloningMachine::buzek_hillery(xi).unwrap()] {
            let closed = m.closed_form_fidelity(a2).unwrap();
            let numeric = fidelity_numeric(&m, a2).unwrap();
            prop_assert!((closed - numeric).abs() < 1e-10, "{m:?} α²={a2}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn wz_fidelity_symmetric_about_half(a2 in 0.0..=1.0f64) {
        prop_assert!((fidelity_wz_closed(a2).unwrap() - fidelity_wz_closed(1.0 - a2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bound_chain_below_threshold(f in 0.8281..0.9922f64, t in 0.001..0.999f64) {
        let thr = delta_z_threshold(f).unwrap();
        let d = t * thr;
        let q = r_lb_quadratic(f, d).unwrap();
        let lb = r_lb(f, d).unwrap();
        let rate = woodhead_rate(f, d).unwrap();
        prop_assert!(q.valid);
        prop_assert!(0.0 < q.value && q.value <= lb + 1e-12 && lb <= rate + 1e-12, "{} {} {}", q.value, lb, rate);
    }

    #[test]
    fn quadratic_bound_negative_past_threshold(f in 0.8281..0.9922f64, t in 1.001..1.5f64) {
        let thr = delta_z_threshold(f).unwrap();
        prop_assert!(r_lb_quadratic(f, (t * thr).min(1.0)).unwrap().value < 0.0);
    }

    #[test]
    fn entropy_symmetric_and_bounded(x in 0.0..=1.0f64) {
        let h = binary_entropy(x).unwrap();
        prop_assert!((h - binary_entropy(1.0 - x).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn a_is_one_minus_entropy(f in 0.0..=1.0f64) {
        let a = a_coefficient(f).unwrap();
        let h = binary_entropy((1.0 + f) / 2.0).unwrap();
        prop_assert!((a / std::f64::consts::LN_2 - (1.0 - h)).abs() < 1e-12);
    }
}

#[test]
fn threshold_increases_across_window() {
    let w = fidelity_window();
    let grid: Vec<f64> = (0..=400)
        .map(|i| w.lower + (w.upper - w.lower) * i as f64 / 400.0)
        .collect();
    let t: Vec<f64> = grid.iter().map(|&f| delta_z_threshold(f).unwrap_or(0.0)).collect();
    assert!(t.windows(2).all(|p| p[0] < p[1]));
}
