//! Hermitian eigen-decomposition.
//!
//! 2×2 matrices use the closed form; anything larger goes through cyclic complex
//! Jacobi rotations, which is plenty for the dimensions used here (≤ 16).

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::tolerance;

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Σ f(λ_i) |v_i⟩⟨v_i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out.symmetrize();
        out
    }
}

/// Eigen-decomposition of a Hermitian matrix. Only the upper triangle's
/// Hermitian part is meaningful; the input is symmetrised first.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    assert!(m.is_square(), "hermitian_eigen: matrix must be square");
    let mut h = m.clone();
    h.symmetrize();
    match h.rows() {
        0 => HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        },
        1 => HermitianEigen {
            values: vec![h[(0, 0)].re],
            vectors: CMatrix::identity(1),
        },
        2 => eigen_2x2(&h),
        _ => jacobi(h),
    }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).values
}

fn eigen_2x2(h: &CMatrix) -> HermitianEigen {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let lo = mean - half_gap;
    let hi = mean + half_gap;

    if b.norm() <= f64::EPSILON * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
        // already diagonal
        let (values, vectors) = if a <= d {
            (vec![a, d], CMatrix::identity(2))
        } else {
            (vec![d, a], CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]))
        };
        return HermitianEigen { values, vectors };
    }

    // (H - λ)v = 0 with v = (b, λ - a) up to normalisation; pick the better
    // conditioned of the two row-derived forms for each eigenvalue.
    let vec_for = |lam: f64| -> [Complex64; 2] {
        let v1 = [b, Complex64::new(lam - a, 0.0)];
        let v2 = [Complex64::new(lam - d, 0.0), b.conj()];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        if n1 >= n2 {
            [v1[0] / n1, v1[1] / n1]
        } else {
            [v2[0] / n2, v2[1] / n2]
        }
    };
    let v_lo = vec_for(lo);
    let v_hi = vec_for(hi);
    let vectors = CMatrix::from_vec(2, 2, vec![v_lo[0], v_hi[0], v_lo[1], v_hi[1]]);
    HermitianEigen {
        values: vec![lo, hi],
        vectors,
    }
}

fn off_diagonal_norm(h: &CMatrix) -> f64 {
    let n = h.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut h: CMatrix) -> HermitianEigen {
    let n = h.rows();
    let mut v = CMatrix::identity(n);
    let scale = h.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..tolerance::JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&h) <= tolerance::JACOBI * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(i, i)].re.total_cmp(&h[(j, j)].re));
    let values = order.iter().map(|&i| h[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    HermitianEigen { values, vectors }
}

/// One complex Jacobi rotation annihilating `h[p][q]`.
///
/// `G = P R` where `P` removes the phase of `h[p][q]` and `R` is the real
/// symmetric Jacobi rotation; `h ← G† h G`, `v ← v G`.
fn rotate(h: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let hpq = h[(p, q)];
    let mag = hpq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = hpq / mag; // e^{iφ}
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = h.rows();
    // columns: h ← h G
    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * g_pp + hkq * g_qp;
        h[(k, q)] = hkp * g_pq + hkq * g_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    // rows: h ← G† h
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = g_pp.conj() * hpk + g_qp.conj() * hqk;
        h[(q, k)] = g_pq.conj() * hpk + g_qq.conj() * hqk;
    }
    h[(p, q)] = Complex64::new(0.0, 0.0);
    h[(q, p)] = Complex64::new(0.0, 0.0);
    h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);
}

/// Eigenvalues of an arbitrary 2×2 complex matrix from its characteristic
/// polynomial `λ² - tr λ + det = 0`.
pub fn eigenvalues_2x2(m: &CMatrix) -> [Complex64; 2] {
    assert!(m.rows() == 2 && m.cols() == 2);
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - det * 4.0).sqrt();
    [(tr - disc) * 0.5, (tr + disc) * 0.5]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct_error(m: &CMatrix) -> f64 {
        let e = hermitian_eigen(m);
        e.map(|x| x).max_abs_diff(m)
    }

    #[test]
    fn closed_form_2x2_matches_hand_values() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = CMatrix::from_vec(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let e = hermitian_eigen(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        assert!(reconstruct_error(&m) < 1e-14);
    }

    #[test]
    fn diagonal_2x2_is_sorted() {
        let m = CMatrix::from_diagonal(&[0.7, 0.3]);
        let e = hermitian_eigen(&m);
        assert_eq!(e.values, vec![0.3, 0.7]);
        assert!(reconstruct_error(&m) < 1e-15);
    }

    #[test]
    fn jacobi_on_complex_4x4() {
        let data = vec![
            c(4.0, 0.0),
            c(1.0, 1.0),
            c(0.0, -0.5),
            c(0.2, 0.0),
            c(1.0, -1.0),
            c(3.0, 0.0),
            c(0.3, 0.3),
            c(0.0, 0.0),
            c(0.0, 0.5),
            c(0.3, -0.3),
            c(2.0, 0.0),
            c(-1.0, 0.2),
            c(0.2, 0.0),
            c(0.0, 0.0),
            c(-1.0, -0.2),
            c(1.0, 0.0),
        ];
        let m = CMatrix::from_vec(4, 4, data);
        let e = hermitian_eigen(&m);
        assert!(reconstruct_error(&m) < 1e-12);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 10.0).abs() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jacobi_handles_degenerate_spectrum() {
        let m = CMatrix::identity(5).scale(c(0.2, 0.0));
        let e = hermitian_eigen(&m);
        assert!(e.values.iter().all(|&x| (x - 0.2).abs() < 1e-15));
    }

    #[test]
    fn general_2x2_eigenvalues() {
        // product of two non-commuting projectors-ish matrices
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let [l0, l1] = eigenvalues_2x2(&m);
        assert!((l0 - c(1.0, 0.0)).norm() < 1e-14);
        assert!((l1 - c(3.0, 0.0)).norm() < 1e-14);
    }
}
