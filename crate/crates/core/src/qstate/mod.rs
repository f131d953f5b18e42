//! Pure states, density operators and the measures between them.
//!
//! Composite systems carry a `dims` list; amplitudes and matrix indices are
//! row-major in the subsystems, leftmost factor slowest.

mod eigen;
mod matrix;

use num_complex::Complex64;

pub use eigen::{eigenvalues_2x2, hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use matrix::CMatrix;

use crate::error::{Error, Result};
use crate::tolerance;

/// Normalised state vector over a product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || expected != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} do not describe a vector of length {}",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tolerance::NORM {
            return Err(Error::InvalidState(format!("squared norm {norm_sq} differs from 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Single system of dimension `amplitudes.len()`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        Self::new(amplitudes, vec![n])
    }

    pub fn from_real(amplitudes: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(), dims)
    }

    /// Computational basis vector `|index⟩` of a `dim`-dimensional system.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            dims: vec![dim],
        }
    }

    /// Renormalises an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect(), dims)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.len(), other.len())));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Equality as rays: `|⟨a|b⟩| = 1` within `tol`.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        self.inner(other).is_ok_and(|z| (z.norm() - 1.0).abs() <= tol)
    }

    /// Applies a unitary (or isometry) and relabels the output subsystems.
    pub fn evolve(&self, op: &CMatrix, out_dims: Vec<usize>) -> Result<Self> {
        if op.cols() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} columns, state has length {}",
                op.cols(),
                self.len()
            )));
        }
        Self::new(op.mul_vec(&self.amplitudes), out_dims)
    }

    /// Applies a unitary on the same space.
    pub fn apply(&self, op: &CMatrix) -> Result<Self> {
        self.evolve(op, self.dims.clone())
    }

    pub fn density(&self) -> DensityOperator {
        density_from_pure(self)
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != n || dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} do not describe a {}x{} matrix",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tolerance::HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerance::HERMITIAN || tr.im.abs() > tolerance::HERMITIAN {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min < -tolerance::NEGATIVE_EIGENVALUE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-system diagonal state.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(probabilities), vec![probabilities.len()])
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
            dims: vec![dim],
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real diagonal (populations).
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Principal square root; negative and sub-floor eigenvalues are zeroed.
    pub fn sqrt(&self) -> CMatrix {
        let e = hermitian_eigen(&self.matrix);
        let floor = spectral_floor(&e.values);
        e.map(|x| if x > floor { x.sqrt() } else { 0.0 })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", psi.len(), self.dim())));
        }
        let rho_psi = self.matrix.mul_vec(psi.amplitudes());
        let z: Complex64 = psi.amplitudes().iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum();
        Ok(z.re)
    }

    /// Convex combination `(1-p) self + p other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        ensure_same_shape(self, other)?;
        let a = self.matrix.scale(Complex64::new(1.0 - p, 0.0));
        let b = other.matrix.scale(Complex64::new(p, 0.0));
        Self::new(&a + &b, self.dims.clone())
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }
}

/// Kronecker product of like-kinded states.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

impl Kron for PureState {
    fn kron(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.len() * other.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amplitudes, dims }
    }
}

impl Kron for DensityOperator {
    fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: self.matrix.kron(&other.matrix),
            dims,
        }
    }
}

/// `a ⊗ b` with concatenated subsystem lists.
pub fn tensor<T: Kron>(a: &T, b: &T) -> T {
    a.kron(b)
}

/// `|s⟩⟨s|`.
pub fn density_from_pure(s: &PureState) -> DensityOperator {
    let mut matrix = CMatrix::outer(&s.amplitudes, &s.amplitudes);
    matrix.symmetrize();
    DensityOperator {
        matrix,
        dims: s.dims.clone(),
    }
}

/// Reduced operator on the subsystems listed in `keep` (any order; the result
/// keeps the original subsystem order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let nsys = rho.dims.len();
    if keep.is_empty() {
        return Err(Error::InvalidSubsystem("at least one subsystem must be kept".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidSubsystem(format!("duplicate indices in {keep:?}")));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= nsys) {
        return Err(Error::InvalidSubsystem(format!(
            "subsystem {bad} does not exist ({nsys} subsystems)"
        )));
    }
    let traced: Vec<usize> = (0..nsys).filter(|i| !kept.contains(i)).collect();

    // row-major strides of the full index
    let mut strides = vec![1usize; nsys];
    for i in (0..nsys.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * rho.dims[i + 1];
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&i| rho.dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| rho.dims[i]).collect();
    let n_keep: usize = kept_dims.iter().product();
    let n_trace: usize = traced_dims.iter().product();

    // offset into the full index contributed by a multi-index over `systems`
    let offsets = |systems: &[usize], sys_dims: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut flat| {
                let mut off = 0;
                for (k, &s) in systems.iter().enumerate().rev() {
                    let d = sys_dims[k];
                    off += (flat % d) * strides[s];
                    flat /= d;
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&kept, &kept_dims, n_keep);
    let trace_off = offsets(&traced, &traced_dims, n_trace);

    let mut out = CMatrix::zeros(n_keep, n_keep);
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &rj) in keep_off.iter().enumerate() {
            out[(i, j)] = trace_off.iter().map(|&t| rho.matrix[(ri + t, rj + t)]).sum();
        }
    }
    out.symmetrize();
    Ok(DensityOperator {
        matrix: out,
        dims: kept_dims,
    })
}

fn ensure_same_shape(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional vs {}-dimensional operator",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

fn spectral_floor(values: &[f64]) -> f64 {
    tolerance::SPECTRAL_FLOOR * values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `Σ √λ`, zeroing values under the spectral floor; negative values beyond the
/// tolerance are rejected.
fn sum_sqrt(values: &[f64]) -> Result<f64> {
    let floor = spectral_floor(values);
    let mut total = 0.0;
    for &x in values {
        if x < -tolerance::NEGATIVE_EIGENVALUE {
            return Err(Error::NegativeEigenvalue(x));
        }
        if x > floor {
            total += x.sqrt();
        }
    }
    Ok(total)
}

/// `(Σ_i √λ_i(ρσ))²` from the eigenvalues of the operator product.
///
/// For qubits the spectrum of `ρσ` comes straight from its characteristic
/// polynomial; in higher dimension the similar matrix `√σ ρ √σ` is diagonalised.
pub fn fidelity_product_form(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    ensure_same_shape(rho, sigma)?;
    let lambdas: Vec<f64> = if rho.dim() == 2 {
        let product = rho.matrix() * sigma.matrix();
        eigenvalues_2x2(&product).iter().map(|z| z.re).collect()
    } else {
        let root = sigma.sqrt();
        let m = &(&root * rho.matrix()) * &root;
        hermitian_eigenvalues(&m)
    };
    let total = sum_sqrt(&lambdas)?;
    Ok((total * total).min(1.0))
}

/// Squared trace norm `‖√ρ √σ‖₁²`, via the singular values of `√ρ √σ`.
///
/// Squared so that it sits on the same scale as [`fidelity_product_form`].
pub fn fidelity_trace_norm(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    ensure_same_shape(rho, sigma)?;
    let m = &rho.sqrt() * &sigma.sqrt();
    let gram = &m * &m.adjoint();
    let norm = sum_sqrt(&hermitian_eigenvalues(&gram))?;
    Ok((norm * norm).min(1.0))
}

/// `½ Σ |μ_i|` over the eigenvalues of `ρ - σ`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    ensure_same_shape(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|m| m.abs()).sum::<f64>())
}

/// `Tr[(ρ - σ)²]`; note the squared-norm convention.
pub fn hs_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    ensure_same_shape(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(diff.as_slice().iter().map(|z| z.norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn qubit(a: f64, b: f64) -> PureState {
        PureState::from_real(&[a, b], vec![2]).unwrap()
    }

    #[test]
    fn projector_of_basis_state() {
        let rho = density_from_pure(&PureState::basis(2, 0));
        assert_eq!(rho.matrix(), &CMatrix::from_diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn projector_of_plus_state() {
        let rho = qubit(H, H).density();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.entry(i, j).re - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn projector_of_phi() {
        let rho = qubit(0.3f64.sqrt(), 0.7f64.sqrt()).density();
        let off = 0.21f64.sqrt();
        let expected = CMatrix::from_real(2, 2, &[0.3, off, off, 0.7]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalised_and_mismatched() {
        assert!(matches!(qubit_err(&[1.0, 1.0]), Error::InvalidState(_)));
        assert!(PureState::from_real(&[1.0, 0.0, 0.0], vec![2]).is_err());
        assert!(DensityOperator::diagonal(&[0.6, 0.6]).is_err());
        assert!(DensityOperator::diagonal(&[1.2, -0.2]).is_err());
    }

    fn qubit_err(a: &[f64]) -> Error {
        PureState::from_real(a, vec![2]).unwrap_err()
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&PureState::basis(2, 0), &PureState::basis(2, 0));
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn tensor_of_diagonal_operators() {
        let a = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(tensor(&a, &b).diagonal_entries(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_index_bookkeeping_matches_loop() {
        let phi = qubit(0.3f64.sqrt(), 0.7f64.sqrt());
        let zero = PureState::basis(2, 0);
        let q = PureState::from_real(&[0.5, 0.5, 0.5, 0.5], vec![4]).unwrap();
        let s = tensor(&tensor(&phi, &zero), &q);
        assert_eq!(s.len(), 16);
        assert_eq!(s.dims(), &[2, 2, 4]);
        for a in 0..2 {
            for b in 0..2 {
                for m in 0..4 {
                    let expected = phi.amplitudes()[a] * zero.amplitudes()[b] * q.amplitudes()[m];
                    assert_eq!(s.amplitudes()[a * 8 + b * 4 + m], expected);
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let b = qubit(H, H).density();
        let ab = tensor(&a, &b);
        assert!(partial_trace(&ab, &[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-15);
        assert!(partial_trace(&ab, &[1]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let bell = PureState::from_real(&[H, 0.0, 0.0, H], vec![2, 2]).unwrap();
        let reduced = partial_trace(&bell.density(), &[0]).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(reduced.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let bell = PureState::from_real(&[H, 0.0, 0.0, H], vec![2, 2]).unwrap().density();
        assert!(matches!(partial_trace(&bell, &[]), Err(Error::InvalidSubsystem(_))));
        assert!(matches!(partial_trace(&bell, &[2]), Err(Error::InvalidSubsystem(_))));
        assert!(matches!(partial_trace(&bell, &[0, 0]), Err(Error::InvalidSubsystem(_))));
    }

    #[test]
    fn fidelity_examples() {
        let z0 = PureState::basis(2, 0).density();
        let z1 = PureState::basis(2, 1).density();
        assert!((fidelity_product_form(&z0, &z0).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity_product_form(&z0, &z1).unwrap().abs() < 1e-15);
        let a = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityOperator::diagonal(&[0.7, 0.3]).unwrap();
        assert!((fidelity_product_form(&a, &b).unwrap() - 0.84).abs() < 1e-12);
        assert!((fidelity_trace_norm(&a, &b).unwrap() - 0.84).abs() < 1e-12);
        assert!((fidelity_trace_norm(&z0, &z0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_mixed_vs_pure_both_routes() {
        // eigenvalues of (I/2)|+⟩⟨+| are {1/2, 0}: (√½)² = ½
        let mixed = DensityOperator::maximally_mixed(2);
        let plus = qubit(H, H).density();
        let f1 = fidelity_product_form(&mixed, &plus).unwrap();
        let f2 = fidelity_trace_norm(&mixed, &plus).unwrap();
        assert!((f1 - 0.5).abs() < 1e-12);
        assert!((f2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(2);
        let b = DensityOperator::maximally_mixed(4);
        assert!(matches!(
            fidelity_product_form(&a, &b),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(fidelity_trace_norm(&a, &b), Err(Error::DimensionMismatch(_))));
        assert!(trace_distance(&a, &b).is_err());
        assert!(hs_distance(&a, &b).is_err());
    }

    #[test]
    fn distance_examples() {
        let z0 = PureState::basis(2, 0).density();
        let z1 = PureState::basis(2, 1).density();
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        let a = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityOperator::diagonal(&[0.7, 0.3]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(hs_distance(&a, &a).unwrap(), 0.0);
        assert!((hs_distance(&a, &b).unwrap() - 2.0 * 0.16).abs() < 1e-15);
    }

    #[test]
    fn hs_distance_wz_eve_vs_input() {
        // diag(α², β²) vs |φ⟩⟨φ| differ only by ±αβ off the diagonal
        let (a2, b2) = (0.4f64, 0.6f64);
        let rho_e = DensityOperator::diagonal(&[a2, b2]).unwrap();
        let rho_id = qubit(a2.sqrt(), b2.sqrt()).density();
        assert!((hs_distance(&rho_e, &rho_id).unwrap() - 0.48).abs() < 1e-15);
    }

    #[test]
    fn jacobi_path_agrees_with_closed_form_on_embedded_qubits() {
        // 4-dimensional operators route through Jacobi; a ⊗ |0⟩⟨0| keeps the qubit fidelity
        let a = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let b = qubit(0.8f64.sqrt(), 0.2f64.sqrt()).density();
        let z = PureState::basis(2, 0).density();
        let f2 = fidelity_product_form(&a, &b).unwrap();
        let f4 = fidelity_product_form(&tensor(&a, &z), &tensor(&b, &z)).unwrap();
        let t4 = fidelity_trace_norm(&tensor(&a, &z), &tensor(&b, &z)).unwrap();
        assert!((f2 - f4).abs() < 1e-12);
        assert!((f2 - t4).abs() < 1e-12);
    }
}
