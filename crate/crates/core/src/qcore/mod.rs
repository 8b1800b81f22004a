//! Finite-dimensional quantum states on `K` subsystems of local dimension `N`.
//!
//! Composite indices are row-major with the leftmost tensor factor most
//! significant: `i = sum_k i_k N^(K-1-k)`. Subsystem indices in this API are
//! zero-based, `0` being the leftmost factor.

pub mod random;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::Serialize;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default validation slack for states.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest total dimension accepted.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TensorShape {
    k: usize,
    n: usize,
    d: usize,
}

impl TensorShape {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::BadShape(format!("need at least one subsystem, got K = {k}")));
        }
        if n < 2 {
            return Err(Error::BadShape(format!("local dimension must be >= 2, got N = {n}")));
        }
        let d = u32::try_from(k)
            .ok()
            .and_then(|k| n.checked_pow(k))
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| Error::BadShape(format!("N^K exceeds {MAX_DIM} for K = {k}, N = {n}")))?;
        Ok(TensorShape { k, n, d })
    }

    pub fn two_qubits() -> Self {
        TensorShape { k: 2, n: 2, d: 4 }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Weight of subsystem `s` in the composite index.
    pub fn place(&self, s: usize) -> usize {
        self.n.pow((self.k - 1 - s) as u32)
    }

    /// Local indices of composite index `i`, leftmost subsystem first.
    pub fn digits(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for s in (0..self.k).rev() {
            out[s] = i % self.n;
            i /= self.n;
        }
        out
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.k];
        for &s in subset {
            if s >= self.k || seen[s] {
                return Err(Error::BadSubset(subset.to_vec()));
            }
            seen[s] = true;
        }
        if subset.is_empty() || subset.len() == self.k {
            return Err(Error::BadSubset(subset.to_vec()));
        }
        Ok(())
    }
}

impl std::fmt::Display for TensorShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K={}, N={} (D={})", self.k, self.n, self.d)
    }
}

/// Largest entrywise deviation `|M_ij - conj(M_ji)|`.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// Kronecker product of the factors, leftmost first.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Transpose the indices of the subsystems in `subset`:
/// `(m, mu; n, nu) -> (n, mu; m, nu)` on every chosen factor.
pub fn partial_transpose_matrix(mat: &ComplexMatrix, shape: TensorShape, subset: &[usize]) -> Result<ComplexMatrix> {
    shape.check_subset(subset)?;
    let d = shape.dim();
    if mat.nrows() != d || mat.ncols() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", mat.nrows(), mat.ncols()),
        });
    }
    let n = shape.n();
    let places: Vec<usize> = subset.iter().map(|&s| shape.place(s)).collect();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let (mut r2, mut c2) = (r, c);
            for &p in &places {
                let rd = (r / p) % n;
                let cd = (c / p) % n;
                r2 = r2 - rd * p + cd * p;
                c2 = c2 - cd * p + rd * p;
            }
            out[(r2, c2)] = mat[(r, c)];
        }
    }
    Ok(out)
}

/// A validated density operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    shape: TensorShape,
    mat: ComplexMatrix,
    tol: f64,
}

impl DensityMatrix {
    /// Validate `mat` as a unit-trace state on `shape`.
    ///
    /// Eigenvalues in `[-tol, 0)` are clipped to zero and the matrix is
    /// renormalised; larger violations are errors.
    pub fn validate(mat: ComplexMatrix, shape: TensorShape, tol: f64) -> Result<Self> {
        Self::validate_with_trace(mat, shape, tol, 1.0)
    }

    /// Like [`DensityMatrix::validate`] but for a declared trace other than one.
    pub fn validate_with_trace(mat: ComplexMatrix, shape: TensorShape, tol: f64, trace: f64) -> Result<Self> {
        let d = shape.dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::ShapeMismatch {
                expected: format!("{d}x{d}"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        let max_deviation = hermiticity_deviation(&mat);
        if max_deviation > tol {
            return Err(Error::HermiticityViolation { max_deviation });
        }
        let mut mat = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
        let tr = mat.trace().re;
        if (tr - trace).abs() > tol {
            return Err(Error::TraceViolation { trace: tr, expected: trace });
        }
        let (values, vectors) = hermitian_eigen(&mat);
        let min_eig = values[0];
        if min_eig < -tol {
            return Err(Error::NegativeEigenvalue { min_eig });
        }
        if min_eig < 0.0 {
            let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
                d,
                clipped.iter().map(|&v| C64::new(v * trace / total, 0.0)),
            ));
            mat = &vectors * diag * vectors.adjoint();
        }
        Ok(DensityMatrix { shape, mat, tol })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        DensityMatrix { shape: psi.shape(), mat: a * a.adjoint(), tol: DEFAULT_TOL }
    }

    pub fn maximally_mixed(shape: TensorShape) -> Self {
        let d = shape.dim();
        let mat = ComplexMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        DensityMatrix { shape, mat, tol: DEFAULT_TOL }
    }

    /// Convex combination `sum_i w_i rho_i`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| Error::BadParams("empty mixture".into()))?;
        let shape = first.shape;
        let d = shape.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.shape != shape {
                return Err(Error::ShapeMismatch { expected: shape.to_string(), found: rho.shape.to_string() });
            }
            if *w < 0.0 {
                return Err(Error::BadParams(format!("negative mixture weight {w}")));
            }
            acc += &rho.mat * C64::new(*w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::BadParams(format!("mixture weights sum to {total}")));
        }
        Self::validate(acc, shape, DEFAULT_TOL)
    }

    pub fn shape(&self) -> TensorShape {
        self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    pub fn partial_transpose(&self, subset: &[usize]) -> Result<ComplexMatrix> {
        partial_transpose_matrix(&self.mat, self.shape, subset)
    }

    /// Smallest eigenvalue of the partial transpose on `subset`.
    pub fn min_pt_eigenvalue(&self, subset: &[usize]) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.partial_transpose(subset)?)[0])
    }

    /// True when every bipartite partial transpose is positive within `tol`.
    pub fn is_ppt(&self, tol: f64) -> bool {
        let k = self.shape.k();
        // complementary subsets give transposed spectra, so subsets containing 0 suffice
        (1u64..(1 << k))
            .filter(|mask| mask & 1 == 1 && mask.count_ones() < k as u32)
            .all(|mask| {
                let subset: Vec<usize> = (0..k).filter(|s| mask >> s & 1 == 1).collect();
                self.min_pt_eigenvalue(&subset).map(|e| e >= -tol).unwrap_or(false)
            })
    }

    /// `(U_1 x ... x U_K) rho (U_1 x ... x U_K)^dagger`.
    pub fn conjugate_local(&self, locals: &[ComplexMatrix]) -> Result<Self> {
        check_locals(self.shape, locals)?;
        let u = kron_all(locals);
        Ok(DensityMatrix { shape: self.shape, mat: &u * &self.mat * u.adjoint(), tol: self.tol })
    }

    /// `rho_A x rho_B x ...` for states on single subsystems.
    pub fn product(factors: &[&DensityMatrix]) -> Result<Self> {
        let n = factors.first().ok_or_else(|| Error::BadParams("empty product".into()))?.shape.dim();
        if factors.iter().any(|f| f.shape.k() != 1 || f.shape.dim() != n) {
            return Err(Error::BadParams("product factors must be single subsystems of equal dimension".into()));
        }
        let shape = TensorShape::new(factors.len(), n)?;
        let mats: Vec<ComplexMatrix> = factors.iter().map(|f| f.mat.clone()).collect();
        Ok(DensityMatrix { shape, mat: kron_all(&mats), tol: DEFAULT_TOL })
    }
}

fn check_locals(shape: TensorShape, locals: &[ComplexMatrix]) -> Result<()> {
    if locals.len() != shape.k() || locals.iter().any(|u| u.nrows() != shape.n() || u.ncols() != shape.n()) {
        return Err(Error::ShapeMismatch {
            expected: format!("{} local {}x{} matrices", shape.k(), shape.n(), shape.n()),
            found: format!("{} matrices", locals.len()),
        });
    }
    Ok(())
}

/// A normalised state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    shape: TensorShape,
    amps: ComplexVector,
}

impl PureState {
    /// Accepts amplitudes whose norm is within `tol` of one and renormalises them.
    pub fn new(shape: TensorShape, amps: ComplexVector, tol: f64) -> Result<Self> {
        if amps.len() != shape.dim() {
            return Err(Error::ShapeMismatch { expected: format!("{} amplitudes", shape.dim()), found: amps.len().to_string() });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { shape, amps: amps / C64::new(norm, 0.0) })
    }

    /// Normalises an arbitrary nonzero vector.
    pub fn normalized(shape: TensorShape, amps: ComplexVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(shape, amps / C64::new(norm, 0.0), DEFAULT_TOL)
    }

    pub fn from_real(shape: TensorShape, amps: &[f64]) -> Result<Self> {
        Self::normalized(shape, DVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0))))
    }

    /// Computational basis state `|index>`.
    pub fn basis(shape: TensorShape, index: usize) -> Result<Self> {
        if index >= shape.dim() {
            return Err(Error::BadParams(format!("basis index {index} out of range for {shape}")));
        }
        let mut amps = ComplexVector::zeros(shape.dim());
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { shape, amps })
    }

    /// `|psi_1> x ... x |psi_K>` from single-subsystem vectors.
    pub fn product(factors: &[ComplexVector]) -> Result<Self> {
        let n = factors.first().ok_or_else(|| Error::BadParams("empty product".into()))?.len();
        if factors.iter().any(|f| f.len() != n) {
            return Err(Error::BadParams("product factors must share a dimension".into()));
        }
        let shape = TensorShape::new(factors.len(), n)?;
        let mut amps = ComplexVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            amps = amps.kronecker(f);
        }
        Self::normalized(shape, amps)
    }

    /// `(|00...0> + |11...1> + ...)/sqrt(N)` on two subsystems.
    pub fn maximally_entangled(n: usize) -> Result<Self> {
        Self::schmidt_form(&vec![1.0 / n as f64; n])
    }

    /// `sum_i sqrt(lambda_i) |ii>`.
    pub fn schmidt_form(lambdas: &[f64]) -> Result<Self> {
        let n = lambdas.len();
        let shape = TensorShape::new(2, n)?;
        let mut amps = ComplexVector::zeros(shape.dim());
        for (i, &l) in lambdas.iter().enumerate() {
            if l < 0.0 {
                return Err(Error::BadLambda(format!("negative entry {l}")));
            }
            amps[i * n + i] = C64::new(l.sqrt(), 0.0);
        }
        Self::new(shape, amps, 1e-9)
    }

    pub fn shape(&self) -> TensorShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// `(U_1 x ... x U_K)|psi>`; the locals must be unitary.
    pub fn apply_local(&self, locals: &[ComplexMatrix]) -> Result<Self> {
        check_locals(self.shape, locals)?;
        Self::normalized(self.shape, kron_all(locals) * &self.amps)
    }

    fn require_bipartite(&self) -> Result<()> {
        if self.shape.k() != 2 {
            return Err(Error::NotBipartite(self.shape.k()));
        }
        Ok(())
    }

    /// `N x N` coefficient matrix `M_ij = <ij|psi>` of a bipartite state.
    pub fn amplitude_matrix(&self) -> Result<ComplexMatrix> {
        self.require_bipartite()?;
        let n = self.shape.n();
        Ok(ComplexMatrix::from_fn(n, n, |i, j| self.amps[i * n + j]))
    }

    pub fn schmidt(&self) -> Result<SchmidtData> {
        let m = self.amplitude_matrix()?;
        let n = m.nrows();
        let svd = m.svd(true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let lambdas = order.iter().map(|&i| svd.singular_values[i].powi(2)).collect();
        let left_basis = ComplexMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
        let right_basis = ComplexMatrix::from_fn(n, n, |r, c| v_t[(order[c], r)]);
        Ok(SchmidtData { lambdas, left_basis, right_basis })
    }

    /// `(||(|psi><psi|)^{T_B}||_1 - 1) / (N - 1)`.
    pub fn negativity(&self) -> Result<f64> {
        self.require_bipartite()?;
        let pt = self.projector().partial_transpose(&[1])?;
        let n = self.shape.n() as f64;
        Ok(((trace_norm(&pt) - 1.0) / (n - 1.0)).clamp(0.0, 1.0))
    }
}

/// Schmidt coefficients with their local bases:
/// `|psi> = sum_i sqrt(lambda_i) |left_i> x |right_i>`.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    /// Squared singular values, descending.
    pub lambdas: Vec<f64>,
    /// Columns are the `|left_i>`.
    pub left_basis: ComplexMatrix,
    /// Columns are the `|right_i>`.
    pub right_basis: ComplexMatrix,
}

impl SchmidtData {
    pub fn reconstruct(&self) -> ComplexVector {
        let n = self.lambdas.len();
        let mut out = ComplexVector::zeros(n * n);
        for (k, &l) in self.lambdas.iter().enumerate() {
            let s = C64::new(l.sqrt(), 0.0);
            out += self.left_basis.column(k).kronecker(&self.right_basis.column(k)) * s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_qubits() -> TensorShape {
        TensorShape::two_qubits()
    }

    fn bell() -> PureState {
        PureState::from_real(two_qubits(), &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    /// Eigenvalues by scanning the characteristic polynomial of a real symmetric
    /// 4x4 matrix for sign changes; independent of the library eigensolver.
    fn brute_force_eigenvalues_real4(m: &ComplexMatrix) -> Vec<f64> {
        let det = |x: f64| {
            let a = nalgebra::Matrix4::from_fn(|i, j| m[(i, j)].re - if i == j { x } else { 0.0 });
            a.determinant()
        };
        let mut roots = Vec::new();
        let steps = 40_000;
        let (lo, hi) = (-2.0, 2.0);
        let h = (hi - lo) / steps as f64;
        let mut prev = det(lo);
        for s in 1..=steps {
            let x = lo + s as f64 * h;
            let cur = det(x);
            if prev == 0.0 || prev.signum() != cur.signum() {
                let (mut a, mut b) = (x - h, x);
                for _ in 0..100 {
                    let mid = 0.5 * (a + b);
                    if det(a).signum() == det(mid).signum() {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn shape_checks() {
        assert_eq!(TensorShape::new(3, 2).unwrap().dim(), 8);
        assert!(TensorShape::new(0, 2).is_err());
        assert!(TensorShape::new(2, 1).is_err());
        assert!(TensorShape::new(13, 2).is_err());
        assert!(TensorShape::new(64, 3).is_err());
        assert_eq!(TensorShape::new(3, 3).unwrap().digits(5), vec![0, 1, 2]);
    }

    #[test]
    fn validate_maximally_mixed_and_pure() {
        let mixed = ComplexMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        let rho = DensityMatrix::validate(mixed, two_qubits(), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.25, epsilon = 1e-15);

        let pure = PureState::basis(two_qubits(), 0).unwrap().projector();
        let rho = DensityMatrix::validate(pure.matrix().clone(), two_qubits(), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn validate_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [1.0, -0.1, 0.05, 0.05].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        match DensityMatrix::validate(m, two_qubits(), 1e-9) {
            Err(Error::NegativeEigenvalue { min_eig }) => assert_abs_diff_eq!(min_eig, -0.1, epsilon = 1e-12),
            other => panic!("expected NegativeEigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_trace_and_hermiticity() {
        let m = ComplexMatrix::identity(4, 4) * C64::new(0.3, 0.0);
        assert!(matches!(DensityMatrix::validate(m, two_qubits(), 1e-9), Err(Error::TraceViolation { .. })));
        let mut m = ComplexMatrix::identity(4, 4) * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::validate(m, two_qubits(), 1e-9), Err(Error::HermiticityViolation { .. })));
        let m = ComplexMatrix::identity(3, 3);
        assert!(matches!(DensityMatrix::validate(m, two_qubits(), 1e-9), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn validate_clips_tiny_negative_eigenvalues() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [0.5, 0.5 + 5e-10, -5e-10, 0.0].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        let rho = DensityMatrix::validate(m, two_qubits(), 1e-9).unwrap();
        assert!(rho.eigenvalues()[0] >= -1e-15);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_transpose_examples() {
        let mixed = DensityMatrix::maximally_mixed(two_qubits());
        assert_eq!(mixed.partial_transpose(&[0]).unwrap(), *mixed.matrix());

        let pt = bell().projector().partial_transpose(&[1]).unwrap();
        let brute = brute_force_eigenvalues_real4(&pt);
        assert_abs_diff_eq!(brute[0], -0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(hermitian_eigenvalues(&pt)[0], -0.5, epsilon = 1e-12);

        let diag = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [0.1, 0.2, 0.3, 0.4].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        let rho = DensityMatrix::validate(diag.clone(), two_qubits(), 1e-9).unwrap();
        assert_eq!(rho.partial_transpose(&[1]).unwrap(), diag);
    }

    #[test]
    fn partial_transpose_bad_subsets() {
        let rho = DensityMatrix::maximally_mixed(two_qubits());
        assert!(matches!(rho.partial_transpose(&[]), Err(Error::BadSubset(_))));
        assert!(matches!(rho.partial_transpose(&[0, 1]), Err(Error::BadSubset(_))));
        assert!(matches!(rho.partial_transpose(&[2]), Err(Error::BadSubset(_))));
        assert!(matches!(rho.partial_transpose(&[0, 0]), Err(Error::BadSubset(_))));
    }

    #[test]
    fn partial_transpose_middle_factor() {
        // |0 1 0><1 0 0| on three qubits; transposing qubits 0 and 1 maps it to |1 0 0><0 1 0|
        let shape = TensorShape::new(3, 2).unwrap();
        let mut m = ComplexMatrix::zeros(8, 8);
        m[(0b010, 0b100)] = C64::new(1.0, 0.0);
        let pt = partial_transpose_matrix(&m, shape, &[0, 1]).unwrap();
        assert_eq!(pt[(0b100, 0b010)], C64::new(1.0, 0.0));
        assert_eq!(pt.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn purity_examples() {
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [0.5, 0.0, 0.0, 0.5].iter().map(|&x| C64::new(x, 0.0)).collect(),
        ));
        let rho = DensityMatrix::validate(m, two_qubits(), 1e-9).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn schmidt_examples() {
        let s = PureState::basis(two_qubits(), 0).unwrap().schmidt().unwrap();
        assert_abs_diff_eq!(s.lambdas[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lambdas[1], 0.0, epsilon = 1e-12);

        let s = bell().schmidt().unwrap();
        assert_abs_diff_eq!(s.lambdas[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lambdas[1], 0.5, epsilon = 1e-12);

        let psi = PureState::from_real(two_qubits(), &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        let s = psi.schmidt().unwrap();
        assert_abs_diff_eq!(s.lambdas[0], 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lambdas[1], 0.2, epsilon = 1e-12);
        assert!((s.reconstruct() - psi.amplitudes()).norm() < 1e-10);

        let three = PureState::basis(TensorShape::new(3, 2).unwrap(), 0).unwrap();
        assert!(matches!(three.schmidt(), Err(Error::NotBipartite(3))));
    }

    #[test]
    fn negativity_examples() {
        // ||X||_1 = Tr X - 2 * (sum of negative eigenvalues), negatives located by brute force
        let pt = bell().projector().partial_transpose(&[1]).unwrap();
        let negatives: f64 = brute_force_eigenvalues_real4(&pt).iter().filter(|&&e| e < 0.0).sum();
        let brute = pt.trace().re - 2.0 * negatives;
        assert_abs_diff_eq!(brute, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(bell().negativity().unwrap(), 1.0, epsilon = 1e-12);

        assert_abs_diff_eq!(PureState::basis(two_qubits(), 0).unwrap().negativity().unwrap(), 0.0, epsilon = 1e-12);

        let psi = PureState::from_real(two_qubits(), &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        let from_lambdas = (0.8f64.sqrt() + 0.2f64.sqrt()).powi(2) - 1.0;
        assert_abs_diff_eq!(from_lambdas, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.negativity().unwrap(), 0.8, epsilon = 1e-9);
    }

    #[test]
    fn pure_state_validation() {
        let amps = DVector::from_element(4, C64::new(1.0, 0.0));
        assert!(matches!(PureState::new(two_qubits(), amps, 1e-9), Err(Error::NotNormalized { .. })));
        let amps = DVector::from_element(3, C64::new(1.0, 0.0));
        assert!(matches!(PureState::new(two_qubits(), amps, 1e-9), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn bell_is_not_ppt_but_mixed_is() {
        assert!(!bell().projector().is_ppt(1e-12));
        assert!(DensityMatrix::maximally_mixed(TensorShape::new(3, 2).unwrap()).is_ppt(1e-12));
    }
}
