//! Random states and unitaries for sampling-based checks.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{kron_all, ComplexMatrix, ComplexVector, DensityMatrix, PureState, TensorShape, C64, DEFAULT_TOL};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    let v = DVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Haar-random pure state.
pub fn haar_state<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> PureState {
    PureState::normalized(shape, unit_vector(shape.dim(), rng)).expect("gaussian vector is nonzero")
}

/// Haar-random product state `|a> x |b> x ...`.
pub fn product_state<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> PureState {
    let factors: Vec<ComplexVector> = (0..shape.k()).map(|_| unit_vector(shape.n(), rng)).collect();
    PureState::product(&factors).expect("factors share a dimension")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// One Haar-random unitary per subsystem.
pub fn local_unitaries<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> Vec<ComplexMatrix> {
    (0..shape.k()).map(|_| unitary(shape.n(), rng)).collect()
}

/// `G G^dagger / Tr(G G^dagger)` for a `d x rank` Ginibre matrix.
pub fn density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Random full-rank (Hilbert-Schmidt measure) state.
pub fn density<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> DensityMatrix {
    let d = shape.dim();
    DensityMatrix::validate(density_matrix(d, d, rng), shape, DEFAULT_TOL).expect("Ginibre state is valid")
}

/// Random state with the given rank.
pub fn density_of_rank<R: Rng + ?Sized>(shape: TensorShape, rank: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::validate(density_matrix(shape.dim(), rank, rng), shape, DEFAULT_TOL).expect("Ginibre state is valid")
}

/// Convex mixture of `terms` random product states with uniform-simplex weights.
pub fn separable<R: Rng + ?Sized>(shape: TensorShape, terms: usize, rng: &mut R) -> DensityMatrix {
    let raw: Vec<f64> = (0..terms.max(1)).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let d = shape.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for w in raw {
        let psi = product_state(shape, rng);
        let a = psi.amplitudes();
        acc += a * a.adjoint() * C64::new(w / total, 0.0);
    }
    DensityMatrix::validate(acc, shape, DEFAULT_TOL).expect("mixture of states is valid")
}

/// PPT two-party state by rejection sampling random states of the given rank.
pub fn ppt_state<R: Rng + ?Sized>(shape: TensorShape, rank: usize, rng: &mut R) -> DensityMatrix {
    loop {
        let rho = density_of_rank(shape, rank, rng);
        if rho.is_ppt(0.0) {
            return rho;
        }
    }
}

/// `(U_1 x ... x U_K)` for Haar-random locals.
pub fn local_unitary_operator<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> ComplexMatrix {
    kron_all(&local_unitaries(shape, rng))
}
