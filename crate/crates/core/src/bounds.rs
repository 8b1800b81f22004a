//! Upper bounds on products of matrix elements at fixed trace and purity,
//! PPT bounds on mixed-state collectibility, and the purities at which
//! those bounds stop being informative.

use serde::Serialize;

use crate::qcore::{ComplexMatrix, TensorShape, C64};
use crate::{Error, Result};

const XI_SLACK: f64 = 1e-12;
const BISECTION_TOL: f64 = 1e-10;

/// Trace and purity of a `D x D` Hermitian matrix, and the size `N` of the
/// principal block whose entries are multiplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundQuery {
    pub d: usize,
    pub n: usize,
    pub trace: f64,
    pub purity: f64,
}

impl BoundQuery {
    pub fn new(d: usize, n: usize, trace: f64, purity: f64) -> Result<Self> {
        if n < 1 || n > d {
            return Err(Error::BadQuery(format!("need 1 <= N <= D, got N = {n}, D = {d}")));
        }
        if !(trace > 0.0 && trace.is_finite()) || !purity.is_finite() {
            return Err(Error::BadQuery(format!("trace {trace} / purity {purity} not admissible")));
        }
        Ok(BoundQuery { d, n, trace, purity })
    }

    /// `xi = Tr(rho^2) / (Tr rho)^2`.
    pub fn xi(&self) -> f64 {
        self.purity / (self.trace * self.trace)
    }

    /// `D - N`.
    pub fn dual_dim(&self) -> usize {
        self.d - self.n
    }

    fn checked_xi(&self) -> Result<f64> {
        let xi = self.xi();
        let min = 1.0 / self.d as f64;
        if xi < min - XI_SLACK || xi > 1.0 + XI_SLACK {
            return Err(Error::XiOutOfRange { xi, min });
        }
        Ok(xi.clamp(min, 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub phi: f64,
    pub r_n: f64,
}

/// Smaller root of `D Dt x^2 - (D + Dt - 1) x + 1 - xi = 0`, in a form that
/// stays finite when `Dt = 0`.
fn smaller_root(d: f64, dt: f64, xi: f64) -> f64 {
    let b = d + dt - 1.0;
    let gap = 1.0 - xi;
    if gap <= 0.0 {
        return 0.0;
    }
    let disc = (b * b - 4.0 * d * dt * gap).max(0.0);
    2.0 * gap / (b + disc.sqrt())
}

/// `r_N = (Tr/N)^N (1 - D phi)^{(N-1)/2} (1 - (D-N) phi)^{(N+1)/2}`, the
/// largest value of `(prod_{i,j<=N} rho_ij)^{1/N}` at the query's trace and
/// purity.
pub fn r_bound(q: &BoundQuery) -> Result<BoundResult> {
    let xi = q.checked_xi()?;
    let (d, dt, n) = (q.d as f64, q.dual_dim() as f64, q.n as f64);
    let phi = smaller_root(d, dt, xi);
    let a = (1.0 - d * phi).max(0.0);
    let b = (1.0 - dt * phi).max(0.0);
    let r_n = (q.trace / n).powf(n) * a.powf((n - 1.0) / 2.0) * b.powf((n + 1.0) / 2.0);
    Ok(BoundResult { phi, r_n })
}

/// `(prod_{i,j in I} m_ij)^{1/|I|}` over a principal block of a Hermitian
/// matrix, accumulated in the log domain. Assumes a nonnegative diagonal;
/// any vanishing factor gives 0.
pub fn principal_block_product_root(m: &ComplexMatrix, indices: &[usize]) -> f64 {
    let mut log_sum = 0.0;
    for (a, &i) in indices.iter().enumerate() {
        let diag = m[(i, i)].re;
        if diag <= crate::collect::UNDERFLOW {
            return 0.0;
        }
        log_sum += diag.ln();
        for &j in &indices[a + 1..] {
            let off = m[(i, j)].norm();
            if off <= crate::collect::UNDERFLOW {
                return 0.0;
            }
            log_sum += 2.0 * off.ln();
        }
    }
    (log_sum / indices.len() as f64).exp()
}

/// The matrix attaining [`r_bound`]: constant diagonal `rho_a` and
/// off-diagonal modulus `rho_b` on the leading `N x N` block, `rho_c` on the
/// remaining diagonal, zero elsewhere (all scaled by the trace).
#[derive(Debug, Clone)]
pub struct MaximizerMatrix {
    pub rho_a: f64,
    pub rho_b: f64,
    pub rho_c: f64,
    pub n: usize,
    pub matrix: ComplexMatrix,
}

impl MaximizerMatrix {
    pub fn block_product_root(&self) -> f64 {
        principal_block_product_root(&self.matrix, &(0..self.n).collect::<Vec<_>>())
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Builds the maximiser. `phases`, if given, holds `phi_km` for `k < m` in
/// lexicographic order (`N(N-1)/2` values); `phi_mk = -phi_km`.
pub fn maximizer_matrix(q: &BoundQuery, phases: Option<&[f64]>) -> Result<MaximizerMatrix> {
    let xi = q.checked_xi()?;
    let (d, dt, n) = (q.d as f64, q.dual_dim() as f64, q.n as f64);
    let pairs = q.n * (q.n - 1) / 2;
    if let Some(p) = phases {
        if p.len() != pairs {
            return Err(Error::BadParams(format!("expected {pairs} phases, got {}", p.len())));
        }
    }
    let rho_c = smaller_root(d, dt, xi);
    let rho_a = (1.0 - dt * rho_c) / n;
    let rho_b = ((1.0 - d * rho_c).max(0.0) * (1.0 - dt * rho_c).max(0.0)).sqrt() / n;

    let mut matrix = ComplexMatrix::zeros(q.d, q.d);
    let mut idx = 0;
    for k in 0..q.n {
        matrix[(k, k)] = C64::new(q.trace * rho_a, 0.0);
        for m in k + 1..q.n {
            let phase = phases.map_or(0.0, |p| p[idx]);
            idx += 1;
            let z = C64::from_polar(q.trace * rho_b, phase);
            matrix[(k, m)] = z;
            matrix[(m, k)] = z.conj();
        }
    }
    for k in q.n..q.d {
        matrix[(k, k)] = C64::new(q.trace * rho_c, 0.0);
    }
    Ok(MaximizerMatrix { rho_a, rho_b, rho_c, n: q.n, matrix })
}

/// Upper bound on mixed-state collectibility of PPT states: `N^{-2N}` for
/// two parties, `1/(16 (2^{K-1} - 1))` for `K` qubits PPT across every cut.
pub fn ppt_bound(shape: TensorShape) -> Result<f64> {
    let (k, n) = (shape.k(), shape.n());
    if k == 2 {
        Ok((n as f64).powi(-2 * n as i32))
    } else if n == 2 && k > 2 {
        Ok(1.0 / (16.0 * (2f64.powi(k as i32 - 1) - 1.0)))
    } else {
        Err(Error::Unsupported { k, n })
    }
}

/// `(P_min, P_PPT) = (N^{-K}, 1/(N^K - 1))`: the smallest possible purity,
/// and the purity below which every state is PPT across all cuts.
pub fn purity_floors(shape: TensorShape) -> (f64, f64) {
    let d = shape.dim() as f64;
    (1.0 / d, 1.0 / (d - 1.0))
}

/// Purity at which `r_N(N^K, 1, P)` equals [`ppt_bound`]; below it the
/// collectibility test cannot flag any state.
pub fn critical_purity(shape: TensorShape) -> Result<f64> {
    let target = ppt_bound(shape)?;
    let (d, n) = (shape.dim(), shape.n());
    let gap = |p: f64| -> Result<f64> { Ok(r_bound(&BoundQuery::new(d, n, 1.0, p)?)?.r_n - target) };
    let (mut lo, mut hi) = (1.0 / d as f64, 1.0);
    if gap(hi)? < 0.0 {
        return Err(Error::NoRoot(format!("bound {target} exceeds r_N at unit purity for {shape}")));
    }
    if gap(lo)? >= 0.0 {
        return Err(Error::NoRoot(format!("bound {target} not exceeded at minimal purity for {shape}")));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One column of the critical-purity tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CritRow {
    pub panel: &'static str,
    pub k: usize,
    pub n: usize,
    pub p_min: f64,
    pub p_ppt: f64,
    pub p_crit: f64,
}

/// Two panels: two parties with `N = 2, 3, 4`, then `K = 2, 3, 4` qubits.
pub fn critical_purity_table() -> Result<Vec<CritRow>> {
    let bipartite = [2usize, 3, 4].map(|n| ("bipartite", 2usize, n));
    let qubits = [2usize, 3, 4].map(|k| ("qubits", k, 2usize));
    bipartite
        .into_iter()
        .chain(qubits)
        .map(|(panel, k, n)| {
            let shape = TensorShape::new(k, n)?;
            let (p_min, p_ppt) = purity_floors(shape);
            Ok(CritRow { panel, k, n, p_min, p_ppt, p_crit: critical_purity(shape)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn shape(k: usize, n: usize) -> TensorShape {
        TensorShape::new(k, n).unwrap()
    }

    #[test]
    fn r_bound_examples() {
        let r = r_bound(&BoundQuery::new(4, 2, 1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(r.r_n, 0.25, epsilon = 1e-15);
        assert_eq!(r.phi, 0.0);
        let r = r_bound(&BoundQuery::new(4, 2, 1.0, 0.25).unwrap()).unwrap();
        assert_abs_diff_eq!(r.r_n, 0.0, epsilon = 1e-12);
        let r = r_bound(&BoundQuery::new(4, 2, 1.0, 0.3456).unwrap()).unwrap();
        assert_abs_diff_eq!(r.r_n, 1.0 / 16.0, epsilon = 1e-3);
    }

    #[test]
    fn pure_states_give_n_to_minus_n_for_any_d() {
        for d in 3..20 {
            for n in 1..=d {
                let r = r_bound(&BoundQuery::new(d, n, 1.0, 1.0).unwrap()).unwrap();
                assert_abs_diff_eq!(r.r_n, (n as f64).powi(-(n as i32)), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn trace_scales_as_power() {
        let a = r_bound(&BoundQuery::new(6, 3, 1.0, 0.4).unwrap()).unwrap().r_n;
        let b = r_bound(&BoundQuery::new(6, 3, 2.0, 1.6).unwrap()).unwrap().r_n;
        assert_abs_diff_eq!(b, 8.0 * a, epsilon = 1e-14);
    }

    #[test]
    fn xi_out_of_range() {
        assert!(matches!(r_bound(&BoundQuery::new(4, 2, 1.0, 0.2).unwrap()), Err(Error::XiOutOfRange { .. })));
        assert!(matches!(r_bound(&BoundQuery::new(4, 2, 1.0, 1.1).unwrap()), Err(Error::XiOutOfRange { .. })));
        assert!(matches!(maximizer_matrix(&BoundQuery::new(4, 2, 1.0, 1.1).unwrap(), None), Err(Error::XiOutOfRange { .. })));
        assert!(BoundQuery::new(2, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn maximizer_examples() {
        let m = maximizer_matrix(&BoundQuery::new(4, 2, 1.0, 1.0).unwrap(), None).unwrap();
        assert_abs_diff_eq!(m.rho_a, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.rho_b, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.block_product_root(), 0.25, epsilon = 1e-15);

        let m = maximizer_matrix(&BoundQuery::new(4, 2, 1.0, 0.25).unwrap(), None).unwrap();
        assert_abs_diff_eq!(m.block_product_root(), 0.0, epsilon = 1e-12);

        let m = maximizer_matrix(&BoundQuery::new(9, 3, 1.0, 0.1728).unwrap(), None).unwrap();
        assert_abs_diff_eq!(m.block_product_root(), 3f64.powi(-6), epsilon = 1e-3);
    }

    #[test]
    fn maximizer_with_phases_keeps_moduli() {
        let q = BoundQuery::new(7, 3, 1.5, 0.9).unwrap();
        let plain = maximizer_matrix(&q, None).unwrap();
        let phased = maximizer_matrix(&q, Some(&[0.3, -1.2, 2.0])).unwrap();
        assert_abs_diff_eq!(plain.block_product_root(), phased.block_product_root(), epsilon = 1e-14);
        assert_abs_diff_eq!(phased.trace(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(phased.purity(), 0.9, epsilon = 1e-12);
        assert!(crate::qcore::hermiticity_deviation(&phased.matrix) < 1e-15);
        assert!(maximizer_matrix(&q, Some(&[0.3])).is_err());
    }

    #[test]
    fn ppt_bound_examples() {
        assert_abs_diff_eq!(ppt_bound(shape(2, 2)).unwrap(), 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(ppt_bound(shape(3, 2)).unwrap(), 1.0 / 48.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ppt_bound(shape(2, 3)).unwrap(), 1.0 / 729.0, epsilon = 1e-15);
        assert!(matches!(ppt_bound(shape(3, 3)), Err(Error::Unsupported { k: 3, n: 3 })));
        assert!(matches!(ppt_bound(shape(1, 2)), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn purity_floor_examples() {
        let (a, b) = purity_floors(shape(2, 2));
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0 / 3.0, epsilon = 1e-15);
        let (a, b) = purity_floors(shape(2, 3));
        assert_abs_diff_eq!(a, 0.1111, epsilon = 5e-5);
        assert_abs_diff_eq!(b, 0.1250, epsilon = 5e-5);
        let (a, b) = purity_floors(shape(4, 2));
        assert_abs_diff_eq!(a, 0.0625, epsilon = 5e-5);
        assert_abs_diff_eq!(b, 0.0667, epsilon = 5e-5);
    }

    #[test]
    fn critical_purity_examples() {
        assert_abs_diff_eq!(critical_purity(shape(2, 2)).unwrap(), 0.3456, epsilon = 5e-5);
        assert_abs_diff_eq!(critical_purity(shape(2, 4)).unwrap(), 0.1033, epsilon = 5e-5);
        assert_abs_diff_eq!(critical_purity(shape(3, 2)).unwrap(), 0.1599, epsilon = 5e-5);
        assert!(matches!(critical_purity(shape(3, 3)), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn critical_purity_solves_its_equation() {
        for s in [shape(2, 2), shape(2, 3), shape(5, 2), shape(2, 5)] {
            let p = critical_purity(s).unwrap();
            let r = r_bound(&BoundQuery::new(s.dim(), s.n(), 1.0, p).unwrap()).unwrap().r_n;
            assert_abs_diff_eq!(r, ppt_bound(s).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn ordering_of_thresholds() {
        for s in [shape(2, 2), shape(2, 3), shape(2, 4), shape(2, 5), shape(3, 2), shape(4, 2), shape(5, 2), shape(6, 2)] {
            let (p_min, p_ppt) = purity_floors(s);
            let p_crit = critical_purity(s).unwrap();
            assert!(p_min < p_ppt && p_ppt < p_crit, "{s}: {p_min} {p_ppt} {p_crit}");
        }
    }

    #[test]
    fn table_panels_share_two_qubit_column() {
        let rows = critical_purity_table().unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].p_min, rows[0].p_ppt, rows[0].p_crit), (rows[3].p_min, rows[3].p_ppt, rows[3].p_crit));
    }
}
