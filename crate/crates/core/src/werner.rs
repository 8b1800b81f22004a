//! Generalized Werner states `alpha (U x V)|psi_lambda><psi_lambda|(U x V)^dagger
//! + (1 - alpha) I / N^2` and their closed-form collectibility.

use serde::Serialize;

use crate::collect::SeparableBasisSet;
use crate::qcore::{unitarity_deviation, ComplexMatrix, DensityMatrix, PureState, TensorShape, C64};
use crate::{Error, Result};

const LAMBDA_SUM_TOL: f64 = 1e-12;
const BISECTION_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct WernerSpec {
    lambdas: Vec<f64>,
    alpha: f64,
    local_u: Option<ComplexMatrix>,
    local_v: Option<ComplexMatrix>,
}

impl WernerSpec {
    pub fn new(lambdas: &[f64], alpha: f64) -> Result<Self> {
        check_lambdas(lambdas)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::BadParams(format!("alpha = {alpha} outside [0, 1]")));
        }
        Ok(WernerSpec { lambdas: lambdas.to_vec(), alpha, local_u: None, local_v: None })
    }

    /// Two qubits with Schmidt vector `(lambda, 1 - lambda)`.
    pub fn two_qubit(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(&[lambda, 1.0 - lambda], alpha)
    }

    pub fn with_locals(mut self, u: ComplexMatrix, v: ComplexMatrix) -> Result<Self> {
        let n = self.n();
        for m in [&u, &v] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::ShapeMismatch { expected: format!("{n}x{n}"), found: format!("{}x{}", m.nrows(), m.ncols()) });
            }
            let deviation = unitarity_deviation(m);
            if deviation > 1e-9 {
                return Err(Error::NotUnitary { deviation });
            }
        }
        self.local_u = Some(u);
        self.local_v = Some(v);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn locals(&self) -> (ComplexMatrix, ComplexMatrix) {
        let id = ComplexMatrix::identity(self.n(), self.n());
        (self.local_u.clone().unwrap_or_else(|| id.clone()), self.local_v.clone().unwrap_or(id))
    }
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.len() < 2 {
        return Err(Error::BadLambda(format!("need at least two entries, got {}", lambdas.len())));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::BadLambda(format!("entry {bad} is not a nonnegative number")));
    }
    let sum: f64 = lambdas.iter().sum();
    if (sum - 1.0).abs() > LAMBDA_SUM_TOL {
        return Err(Error::BadLambda(format!("entries sum to {sum}")));
    }
    Ok(())
}

pub fn werner_state(spec: &WernerSpec) -> Result<DensityMatrix> {
    let (u, v) = spec.locals();
    let psi = PureState::schmidt_form(&spec.lambdas)?.apply_local(&[u, v])?;
    let shape = psi.shape();
    DensityMatrix::mixture(&[(spec.alpha, &psi.projector()), (1.0 - spec.alpha, &DensityMatrix::maximally_mixed(shape))])
}

/// `y(lambda) = (sum_i sqrt(lambda_i) / N)^{2N}`, the collectibility of the
/// pure state with Schmidt vector `lambda`.
pub fn pure_collectibility(lambdas: &[f64]) -> Result<f64> {
    check_lambdas(lambdas)?;
    let n = lambdas.len() as f64;
    Ok((lambdas.iter().map(|l| l.sqrt()).sum::<f64>() / n).powi(2 * lambdas.len() as i32))
}

/// `alpha^{N-1} y (alpha + (1 - alpha) y^{-1/N} / N^2)`.
pub fn werner_collectibility(spec: &WernerSpec) -> f64 {
    let n = spec.n() as f64;
    let y = pure_collectibility(&spec.lambdas).expect("spec lambdas are validated");
    let a = spec.alpha;
    a.powi(spec.n() as i32 - 1) * y * (a + (1.0 - a) / (n * n) * y.powf(-1.0 / n))
}

/// `H_{1/2}(lambda) = 2 ln(sum_i sqrt(lambda_i))`.
pub fn renyi_half(lambdas: &[f64]) -> Result<f64> {
    check_lambdas(lambdas)?;
    Ok(2.0 * lambdas.iter().map(|l| l.sqrt()).sum::<f64>().ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerThresholds {
    pub lambda: f64,
    pub omega: f64,
    /// Separable for `alpha <= alpha_t`.
    pub alpha_t: f64,
    /// Collectibility exceeds `1/16` for `alpha > alpha_c`.
    pub alpha_c: f64,
}

pub fn thresholds_two_qubit(lambda: f64) -> Result<WernerThresholds> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::BadLambda(format!("lambda = {lambda} outside [0, 1]")));
    }
    let omega = (lambda * (1.0 - lambda)).sqrt();
    let alpha_t = 1.0 / (1.0 + 4.0 * omega);
    let alpha_c = 2.0 / (1.0 + 2.0 * omega + ((1.0 + 2.0 * omega) * (1.0 + 10.0 * omega)).sqrt());
    Ok(WernerThresholds { lambda, omega, alpha_t, alpha_c })
}

/// Smallest `alpha` in `[0, 1]` with `above(alpha)`, for a monotone predicate;
/// 1 if it never holds.
fn bisect_alpha(above: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    if !above(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `alpha_c` recovered by bisection on `werner_collectibility > 1/16`.
pub fn alpha_c_by_bisection(lambda: f64) -> Result<f64> {
    WernerSpec::two_qubit(lambda, 0.0)?;
    bisect_alpha(|a| Ok(werner_collectibility(&WernerSpec::two_qubit(lambda, a)?) > 1.0 / 16.0))
}

/// `alpha_t` recovered by bisection on the sign of the smallest eigenvalue
/// of the partial transpose.
pub fn alpha_t_by_bisection(lambda: f64) -> Result<f64> {
    WernerSpec::two_qubit(lambda, 0.0)?;
    bisect_alpha(|a| Ok(werner_state(&WernerSpec::two_qubit(lambda, a)?)?.min_pt_eigenvalue(&[1])? < 0.0))
}

/// `(1 + (N-1) Neg)^N / N^{2N}` with the negativity normalised to `[0, 1]`.
pub fn negativity_collectibility(psi: &PureState) -> Result<f64> {
    let neg = psi.negativity()?;
    let n = psi.shape().n() as f64;
    Ok((1.0 + (n - 1.0) * neg).powf(n) / n.powf(2.0 * n))
}

/// `Theta = (x_j - x_k)(dh/dx_j - dh/dx_k)` for `h(x) = prod_i (x_i^2 + b) x_i^q`
/// (zero-based `j`, `k`), in closed form:
///
/// `-(x_j - x_k)^2 (x_j x_k)^{q-1} prod_{i != j,k} (x_i^2 + b) x_i^q
///  [(q+2) x_j^2 x_k^2 + b(q-1)(x_j^2 + x_k^2) + b(x_k - x_j)^2 + q b^2]`.
pub fn schur_theta(x: &[f64], b: f64, q: f64, j: usize, k: usize) -> Result<f64> {
    if j == k || j >= x.len() || k >= x.len() {
        return Err(Error::BadParams(format!("indices ({j}, {k}) invalid for length {}", x.len())));
    }
    if x.iter().any(|v| !(*v >= 0.0)) || !(b >= 0.0) || !(q >= 1.0) {
        return Err(Error::BadParams("need x >= 0, b >= 0, q >= 1".into()));
    }
    let (xj, xk) = (x[j], x[k]);
    let rest: f64 = x
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j && *i != k)
        .map(|(_, &xi)| (xi * xi + b) * xi.powf(q))
        .product();
    let bracket = (q + 2.0) * xj * xj * xk * xk + b * (q - 1.0) * (xj * xj + xk * xk) + b * (xk - xj).powi(2) + q * b * b;
    Ok(-(xj - xk).powi(2) * (xj * xk).powf(q - 1.0) * rest * bracket)
}

/// `h(x) = prod_i (x_i^2 + b) x_i^q`.
pub fn schur_h(x: &[f64], b: f64, q: f64) -> f64 {
    x.iter().map(|&xi| (xi * xi + b) * xi.powf(q)).product()
}

/// `U_jk = e^{2 pi i jk/N} / sqrt(N)` and `V = conj(U)`.
pub fn saturating_basis(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n < 2 {
        return Err(Error::BadParams(format!("need N >= 2, got {n}")));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let u = ComplexMatrix::from_fn(n, n, |j, k| {
        C64::from_polar(scale, std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64)
    });
    let v = u.map(|z| z.conj());
    Ok((u, v))
}

/// `max_i | |sum_n u_in v_in sqrt(lambda_n)| - sum_n sqrt(lambda_n) / N |`.
pub fn saturation_residual(lambdas: &[f64], u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let n = lambdas.len();
    let target = lambdas.iter().map(|l| l.sqrt()).sum::<f64>() / n as f64;
    (0..n)
        .map(|i| {
            let s: C64 = (0..n).map(|m| u[(i, m)] * v[(i, m)] * lambdas[m].sqrt()).sum();
            (s.norm() - target).abs()
        })
        .fold(0.0, f64::max)
}

/// Product basis attaining [`werner_collectibility`] for `spec`, including
/// its local rotations.
pub fn saturating_basis_set(spec: &WernerSpec) -> Result<SeparableBasisSet> {
    let (su, sv) = saturating_basis(spec.n())?;
    let (lu, lv) = spec.locals();
    SeparableBasisSet::new(TensorShape::new(2, spec.n())?, vec![lu * su.adjoint(), lv * sv.adjoint()])
}

/// `alpha_t`, `alpha_c` on `m` evenly spaced `lambda` in `[0, 1]`.
pub fn scan(m: usize) -> Result<Vec<WernerThresholds>> {
    if m < 2 {
        return Err(Error::BadParams(format!("need at least 2 grid points, got {m}")));
    }
    (0..m).map(|i| thresholds_two_qubit(i as f64 / (m - 1) as f64)).collect()
}
