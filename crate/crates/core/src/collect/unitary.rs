//! `U(N)` parameterised by complex Givens rotations and diagonal phases.
//!
//! Parameter layout for one local unitary (`N^2` reals): for every pair
//! `p < q` in lexicographic order an angle pair `(theta, phi)`, followed by
//! `N` row phases.

use crate::qcore::{ComplexMatrix, C64};

pub fn param_count(n: usize) -> usize {
    n * n
}

/// `diag(e^{i delta}) * prod_{p<q} G_pq(theta, phi)`.
pub fn local_unitary(n: usize, params: &[f64]) -> ComplexMatrix {
    debug_assert_eq!(params.len(), param_count(n));
    let mut u = ComplexMatrix::identity(n, n);
    let mut idx = 0;
    for p in 0..n {
        for q in p + 1..n {
            let (theta, phi) = (params[idx], params[idx + 1]);
            idx += 2;
            let (s, c) = theta.sin_cos();
            let e = C64::from_polar(1.0, phi);
            for r in 0..n {
                let (up, uq) = (u[(r, p)], u[(r, q)]);
                u[(r, p)] = up * c + uq * e * s;
                u[(r, q)] = -up * e.conj() * s + uq * c;
            }
        }
    }
    for r in 0..n {
        let phase = C64::from_polar(1.0, params[idx + r]);
        for c in 0..n {
            u[(r, c)] *= phase;
        }
    }
    u
}
