//! Collectibility: products of overlaps with locally orthonormal product
//! bases, maximised over those bases.

pub mod simplex;
pub mod unitary;

use serde::Serialize;

use crate::bounds;
use crate::qcore::{unitarity_deviation, ComplexMatrix, ComplexVector, DensityMatrix, PureState, TensorShape, C64};
use crate::{Error, Result, Verdict};

/// Factors below this magnitude make a product collapse to zero.
pub const UNDERFLOW: f64 = 1e-300;
/// Values must clear a threshold by this much to count as detection.
pub const VERDICT_GUARD: f64 = 1e-8;
/// Tolerance for `|G_12|^2 <= G_11 G_22` and for negative radicands.
pub const GRAM_TOL: f64 = 1e-12;

/// `K` local unitaries; column `j` of `U^(I)` is `|a_j^I>`, and
/// `|chi_j> = |a_j^1> x ... x |a_j^K>`.
#[derive(Debug, Clone)]
pub struct SeparableBasisSet {
    shape: TensorShape,
    locals: Vec<ComplexMatrix>,
}

impl SeparableBasisSet {
    pub fn new(shape: TensorShape, locals: Vec<ComplexMatrix>) -> Result<Self> {
        if locals.len() != shape.k() {
            return Err(Error::ShapeMismatch { expected: format!("{} locals", shape.k()), found: locals.len().to_string() });
        }
        for u in &locals {
            if u.nrows() != shape.n() || u.ncols() != shape.n() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{0}x{0}", shape.n()),
                    found: format!("{}x{}", u.nrows(), u.ncols()),
                });
            }
            let deviation = unitarity_deviation(u);
            if deviation > 1e-9 {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(SeparableBasisSet { shape, locals })
    }

    /// `|chi_j> = |jj...j>`.
    pub fn computational(shape: TensorShape) -> Self {
        let locals = vec![ComplexMatrix::identity(shape.n(), shape.n()); shape.k()];
        SeparableBasisSet { shape, locals }
    }

    pub fn param_count(shape: TensorShape) -> usize {
        shape.k() * unitary::param_count(shape.n())
    }

    pub fn from_params(shape: TensorShape, params: &[f64]) -> Self {
        let per = unitary::param_count(shape.n());
        let locals = params.chunks(per).map(|p| unitary::local_unitary(shape.n(), p)).collect();
        SeparableBasisSet { shape, locals }
    }

    pub fn shape(&self) -> TensorShape {
        self.shape
    }

    pub fn locals(&self) -> &[ComplexMatrix] {
        &self.locals
    }

    /// `|chi_j>` as a vector of length `N^K`.
    pub fn product_vector(&self, j: usize) -> ComplexVector {
        let mut v = ComplexVector::from_element(1, C64::new(1.0, 0.0));
        for u in &self.locals {
            v = v.kronecker(&u.column(j).into_owned());
        }
        v
    }

    fn check(&self, shape: TensorShape) -> Result<()> {
        if self.shape != shape {
            return Err(Error::ShapeMismatch { expected: shape.to_string(), found: self.shape.to_string() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub objective_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 32, max_iters: 2000, objective_tol: 1e-10, seed: 0 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::BadConfig("restarts must be >= 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::BadConfig("max_iters must be >= 1".into()));
        }
        if !(self.objective_tol > 0.0) {
            return Err(Error::BadConfig("objective_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Result of a collectibility maximisation. `value` is the best value found,
/// so it is a lower bound on the true maximum.
#[derive(Debug, Clone)]
pub struct CollectReport {
    pub value: f64,
    pub basis: SeparableBasisSet,
    pub restarts_converged: usize,
    /// Bound the value was compared against, when one is known for the shape.
    pub threshold: Option<f64>,
    pub verdict: Verdict,
}

/// `prod_j |<psi|chi_j>|^2`.
pub fn product_functional_pure(psi: &PureState, basis: &SeparableBasisSet) -> Result<f64> {
    basis.check(psi.shape())?;
    let mut log_sum = 0.0;
    for j in 0..basis.shape.n() {
        let overlap = basis.product_vector(j).dotc(psi.amplitudes()).norm_sqr();
        if overlap < UNDERFLOW {
            return Ok(0.0);
        }
        log_sum += overlap.ln();
    }
    Ok(log_sum.exp())
}

/// `(prod_{j,k} <chi_j|rho|chi_k>)^{1/N}`, evaluated as
/// `(prod_j rho_jj prod_{j<k} |rho_jk|^2)^{1/N}`.
pub fn product_functional_mixed(rho: &DensityMatrix, basis: &SeparableBasisSet) -> Result<f64> {
    basis.check(rho.shape())?;
    let n = basis.shape.n();
    let chis: Vec<ComplexVector> = (0..n).map(|j| basis.product_vector(j)).collect();
    let images: Vec<ComplexVector> = chis.iter().map(|c| rho.matrix() * c).collect();
    let mut log_sum = 0.0;
    for j in 0..n {
        let diag = chis[j].dotc(&images[j]).re;
        if diag < UNDERFLOW {
            return Ok(0.0);
        }
        log_sum += diag.ln();
        for k in j + 1..n {
            let off = chis[j].dotc(&images[k]).norm();
            if off < UNDERFLOW {
                return Ok(0.0);
            }
            log_sum += 2.0 * off.ln();
        }
    }
    Ok((log_sum / n as f64).exp())
}

/// Separable bound `N^{-NK}` for pure states.
pub fn pure_separable_bound(shape: TensorShape) -> f64 {
    (shape.n() as f64).powi(-((shape.n() * shape.k()) as i32))
}

/// Bound `N^{-N}` valid for every pure state.
pub fn pure_universal_bound(shape: TensorShape) -> f64 {
    (shape.n() as f64).powi(-(shape.n() as i32))
}

pub fn collectibility_pure_max(psi: &PureState, cfg: &OptimizerConfig) -> Result<CollectReport> {
    cfg.validate()?;
    let shape = psi.shape();
    let objective = |x: &[f64]| {
        product_functional_pure(psi, &SeparableBasisSet::from_params(shape, x)).unwrap_or(0.0)
    };
    let best = simplex::maximize(objective, SeparableBasisSet::param_count(shape), cfg);
    let threshold = pure_separable_bound(shape);
    Ok(CollectReport {
        value: best.value,
        basis: SeparableBasisSet::from_params(shape, &best.x),
        restarts_converged: best.restarts_converged,
        threshold: Some(threshold),
        verdict: Verdict::above(best.value, threshold, VERDICT_GUARD),
    })
}

/// Maximised mixed-state functional. The verdict compares against the PPT
/// bound, so detection means the state is not PPT; shapes without a known
/// bound are always inconclusive.
pub fn collectibility_mixed_max(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<CollectReport> {
    cfg.validate()?;
    let shape = rho.shape();
    let objective = |x: &[f64]| {
        product_functional_mixed(rho, &SeparableBasisSet::from_params(shape, x)).unwrap_or(0.0)
    };
    let best = simplex::maximize(objective, SeparableBasisSet::param_count(shape), cfg);
    let threshold = bounds::ppt_bound(shape).ok();
    let verdict = match threshold {
        Some(t) => Verdict::above(best.value, t, VERDICT_GUARD),
        None => Verdict::Inconclusive,
    };
    Ok(CollectReport {
        value: best.value,
        basis: SeparableBasisSet::from_params(shape, &best.x),
        restarts_converged: best.restarts_converged,
        threshold,
        verdict,
    })
}

/// Overlaps `G_jk = <phi_j|phi_k>` of the two conditional vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramMatrix2 {
    pub g11: f64,
    pub g22: f64,
    pub g12_abs2: f64,
}

impl GramMatrix2 {
    pub fn new(g11: f64, g22: f64, g12_abs2: f64) -> Result<Self> {
        if !(g11 >= 0.0 && g22 >= 0.0 && g12_abs2 >= 0.0) {
            return Err(Error::BadGram(format!("entries must be nonnegative: ({g11}, {g22}, {g12_abs2})")));
        }
        if g12_abs2 > g11 * g22 + GRAM_TOL {
            return Err(Error::BadGram(format!("|G12|^2 = {g12_abs2} exceeds G11 G22 = {}", g11 * g22)));
        }
        Ok(GramMatrix2 { g11, g22, g12_abs2 })
    }
}

/// `(sqrt(G11 G22) + sqrt(G11 G22 - |G12|^2))^2 / 4`.
pub fn collectibility_ya(gram: &GramMatrix2) -> Result<f64> {
    ya_from_parts(gram.g11, gram.g22, gram.g12_abs2)
}

pub(crate) fn ya_from_parts(g11: f64, g22: f64, g12_abs2: f64) -> Result<f64> {
    let product = g11 * g22;
    let radicand = product - g12_abs2;
    if radicand < -GRAM_TOL {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(0.25 * (product.max(0.0).sqrt() + radicand.max(0.0).sqrt()).powi(2))
}

/// Gram matrix of `|phi_j> = (<a_j^B| x ... x <a_j^K|)|psi>` for a
/// `K`-qubit state, given the bases on subsystems `B..K`.
pub fn gram_from_pure(psi: &PureState, downstream: &SeparableBasisSet) -> Result<GramMatrix2> {
    let shape = psi.shape();
    if shape.n() != 2 {
        return Err(Error::NotQubits(shape.n()));
    }
    if shape.k() < 2 {
        return Err(Error::NotBipartite(shape.k()));
    }
    downstream.check(TensorShape::new(shape.k() - 1, 2)?)?;
    let rest = downstream.shape.dim();
    let amps = psi.amplitudes();
    let phis: Vec<[C64; 2]> = (0..2)
        .map(|j| {
            let chi = downstream.product_vector(j);
            let mut phi = [C64::new(0.0, 0.0); 2];
            for (a, slot) in phi.iter_mut().enumerate() {
                *slot = (0..rest).map(|r| chi[r].conj() * amps[a * rest + r]).sum();
            }
            phi
        })
        .collect();
    let inner = |x: &[C64; 2], y: &[C64; 2]| x[0].conj() * y[0] + x[1].conj() * y[1];
    GramMatrix2::new(
        inner(&phis[0], &phis[0]).re,
        inner(&phis[1], &phis[1]).re,
        inner(&phis[0], &phis[1]).norm_sqr(),
    )
}

#[derive(Debug, Clone)]
pub struct YaReport {
    pub value: f64,
    pub downstream: SeparableBasisSet,
    pub restarts_converged: usize,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// `Y_a` additionally maximised over the downstream bases on `B..K`.
pub fn collectibility_ya_max(psi: &PureState, cfg: &OptimizerConfig) -> Result<YaReport> {
    cfg.validate()?;
    let shape = psi.shape();
    if shape.n() != 2 {
        return Err(Error::NotQubits(shape.n()));
    }
    if shape.k() < 2 {
        return Err(Error::NotBipartite(shape.k()));
    }
    let down = TensorShape::new(shape.k() - 1, 2)?;
    let objective = |x: &[f64]| {
        gram_from_pure(psi, &SeparableBasisSet::from_params(down, x))
            .and_then(|g| collectibility_ya(&g))
            .unwrap_or(0.0)
    };
    let best = simplex::maximize(objective, SeparableBasisSet::param_count(down), cfg);
    let threshold = pure_separable_bound(shape);
    Ok(YaReport {
        value: best.value,
        downstream: SeparableBasisSet::from_params(down, &best.x),
        restarts_converged: best.restarts_converged,
        threshold,
        verdict: Verdict::above(best.value, threshold, VERDICT_GUARD),
    })
}
