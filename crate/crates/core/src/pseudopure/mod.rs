//! Two-qubit entanglement test from two complementary measurements on
//! Alice's qubit and two-copy interference of Bob's conditional states.
//!
//! Alice measures `n.sigma` and `n'.sigma` with `n . n' = 0`. Each outcome
//! prepares a conditional state on Bob's side; their purities and mutual
//! overlaps are the only data the test uses.

pub mod clicks;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::collect::{self, GramMatrix2};
use crate::qcore::{ComplexMatrix, DensityMatrix, TensorShape, C64};
use crate::{Error, Result, Verdict};

pub use clicks::{read_click_csv, simulate_clicks, simulate_pair, witness_from_clicks, write_click_csv, ClickRecord, ClickStatistics};

/// Guard band on exact-state verdicts.
pub const WITNESS_GUARD: f64 = 1e-9;
/// Branches with smaller probability have no conditional state.
pub const DEGENERATE_P: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Bloch direction `(sin t cos p, sin t sin p, cos t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementAxis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementAxis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::BadParams(format!("axis angles ({theta}, {phi}) must be finite")));
        }
        Ok(MeasurementAxis { theta, phi })
    }

    pub fn z() -> Self {
        MeasurementAxis { theta: 0.0, phi: 0.0 }
    }

    pub fn x() -> Self {
        MeasurementAxis { theta: std::f64::consts::FRAC_PI_2, phi: 0.0 }
    }

    pub fn y() -> Self {
        MeasurementAxis { theta: std::f64::consts::FRAC_PI_2, phi: std::f64::consts::FRAC_PI_2 }
    }

    pub fn from_versor(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::BadParams("zero axis vector".into()));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    pub fn versor(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn dot(&self, other: &MeasurementAxis) -> f64 {
        let (a, b) = (self.versor(), other.versor());
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    /// `(I + n.sigma)/2` and `(I - n.sigma)/2`.
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let [x, y, z] = self.versor();
        let ns = ComplexMatrix::from_row_slice(2, 2, &[C64::new(z, 0.0), C64::new(x, -y), C64::new(x, y), C64::new(-z, 0.0)]);
        let id = ComplexMatrix::identity(2, 2);
        let half = C64::new(0.5, 0.0);
        ((&id + &ns) * half, (&id - &ns) * half)
    }

    fn check_complementary(&self, other: &MeasurementAxis) -> Result<()> {
        let dot = self.dot(other);
        if dot.abs() > ORTHOGONALITY_TOL {
            return Err(Error::AxesNotComplementary { dot });
        }
        Ok(())
    }
}

impl fmt::Display for MeasurementAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, axis) in [("z", Self::z()), ("x", Self::x()), ("y", Self::y())] {
            if *self == axis {
                return f.write_str(name);
            }
        }
        write!(f, "{}:{}", self.theta, self.phi)
    }
}

impl FromStr for MeasurementAxis {
    type Err = Error;

    /// `z`, `x`, `y`, or `theta:phi` in radians.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "z" => Ok(Self::z()),
            "x" => Ok(Self::x()),
            "y" => Ok(Self::y()),
            other => {
                let (t, p) = other.split_once(':').ok_or_else(|| Error::Parse(format!("axis '{other}': expected z, x, y or theta:phi")))?;
                let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("axis '{other}': {e}")));
                Self::new(parse(t)?, parse(p)?)
            }
        }
    }
}

/// `A_+- = Tr_A[(P_+- x I) rho] = p_+- sigma_+-`.
#[derive(Debug, Clone)]
pub struct ConditionalDecomposition {
    pub axis: MeasurementAxis,
    pub p_plus: f64,
    pub p_minus: f64,
    a_plus: ComplexMatrix,
    a_minus: ComplexMatrix,
}

impl ConditionalDecomposition {
    pub fn a_plus(&self) -> &ComplexMatrix {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &ComplexMatrix {
        &self.a_minus
    }

    /// `rho_B = A_+ + A_-`.
    pub fn rho_b(&self) -> ComplexMatrix {
        &self.a_plus + &self.a_minus
    }

    pub fn is_degenerate(&self, branch: char) -> bool {
        match branch {
            '+' => self.p_plus < DEGENERATE_P,
            _ => self.p_minus < DEGENERATE_P,
        }
    }

    /// `sigma_+` or `sigma_-`; undefined for a zero-probability branch.
    pub fn sigma(&self, branch: char) -> Result<ComplexMatrix> {
        let (p, a) = match branch {
            '+' => (self.p_plus, &self.a_plus),
            '-' => (self.p_minus, &self.a_minus),
            other => return Err(Error::BadParams(format!("branch must be '+' or '-', got '{other}'"))),
        };
        if p < DEGENERATE_P {
            return Err(Error::DegenerateBranch(branch));
        }
        Ok(a / C64::new(p, 0.0))
    }

    /// Per-branch summary used by the inequalities.
    pub fn observables(&self) -> AxisObservables {
        let tr = |a: &ComplexMatrix, b: &ComplexMatrix| (a * b).trace().re;
        let purity = |p: f64, a: &ComplexMatrix| if p < DEGENERATE_P { 1.0 } else { (tr(a, a) / (p * p)).clamp(0.0, 1.0) };
        let degenerate = [self.is_degenerate('+'), self.is_degenerate('-')];
        let overlap = if degenerate[0] || degenerate[1] {
            0.0
        } else {
            (tr(&self.a_plus, &self.a_minus) / (self.p_plus * self.p_minus)).clamp(0.0, 1.0)
        };
        AxisObservables {
            p_plus: self.p_plus,
            p_minus: self.p_minus,
            purity_plus: purity(self.p_plus, &self.a_plus),
            purity_minus: purity(self.p_minus, &self.a_minus),
            overlap,
            degenerate,
        }
    }
}

fn require_two_qubits(shape: TensorShape) -> Result<()> {
    if shape.k() != 2 || shape.n() != 2 {
        return Err(Error::NotTwoQubits { k: shape.k(), n: shape.n() });
    }
    Ok(())
}

pub fn condition_on_axis(rho: &DensityMatrix, axis: MeasurementAxis) -> Result<ConditionalDecomposition> {
    require_two_qubits(rho.shape())?;
    let (pp, pm) = axis.projectors();
    let m = rho.matrix();
    let reduce = |p: &ComplexMatrix| {
        ComplexMatrix::from_fn(2, 2, |b, bp| {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..2 {
                for ap in 0..2 {
                    s += p[(a, ap)] * m[(2 * ap + b, 2 * a + bp)];
                }
            }
            s
        })
    };
    let (a_plus, a_minus) = (reduce(&pp), reduce(&pm));
    let p_plus = a_plus.trace().re.max(0.0);
    let p_minus = a_minus.trace().re.max(0.0);
    Ok(ConditionalDecomposition { axis, p_plus, p_minus, a_plus, a_minus })
}

/// Branch probabilities, conditional purities `Tr(sigma^2)` and the overlap
/// `Tr(sigma_+ sigma_-)` for one axis. Degenerate branches carry purity 1
/// (so `eps = 0`) and overlap 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisObservables {
    pub p_plus: f64,
    pub p_minus: f64,
    pub purity_plus: f64,
    pub purity_minus: f64,
    pub overlap: f64,
    pub degenerate: [bool; 2],
}

impl AxisObservables {
    /// `(1 - Tr sigma_+^2, 1 - Tr sigma_-^2)`.
    pub fn eps(&self) -> (f64, f64) {
        ((1.0 - self.purity_plus).clamp(0.0, 1.0), (1.0 - self.purity_minus).clamp(0.0, 1.0))
    }

    pub fn gram(&self) -> GramObservables {
        let g = |p: f64, pur: f64, deg: bool| if deg { 0.0 } else { p * pur.sqrt() };
        let g_pp = g(self.p_plus, self.purity_plus, self.degenerate[0]);
        let g_mm = g(self.p_minus, self.purity_minus, self.degenerate[1]);
        GramObservables { g_pp, g_mm, g_pm_abs2: self.p_plus * self.p_minus * self.overlap, overlap: self.overlap }
    }
}

/// `G_++ = p_+ sqrt(Tr sigma_+^2)`, `G_-- = p_- sqrt(Tr sigma_-^2)`,
/// `|G_+-|^2 = p_+ p_- Tr(sigma_+ sigma_-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramObservables {
    pub g_pp: f64,
    pub g_mm: f64,
    pub g_pm_abs2: f64,
    /// `Tr(sigma_+ sigma_-) = 1 - 2 p_12(+,+)`.
    pub overlap: f64,
}

pub fn gram_observables(dec: &ConditionalDecomposition) -> GramObservables {
    dec.observables().gram()
}

/// Remote-purity deficits on both axes and the noise budget
/// `eta = 8 p_+ p_- sqrt(eps_+ eps_-) + 2 eps'`, `eps' = max(eps'_+, eps'_-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityBudget {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub eps_plus_prime: f64,
    pub eps_minus_prime: f64,
    pub eps_prime_max: f64,
    pub eta: f64,
}

impl PurityBudget {
    pub fn new(p_plus: f64, p_minus: f64, eps: (f64, f64), eps_prime: (f64, f64)) -> Self {
        let eps_prime_max = eps_prime.0.max(eps_prime.1);
        let eta = 8.0 * p_plus * p_minus * (eps.0 * eps.1).sqrt() + 2.0 * eps_prime_max;
        PurityBudget {
            eps_plus: eps.0,
            eps_minus: eps.1,
            eps_plus_prime: eps_prime.0,
            eps_minus_prime: eps_prime.1,
            eps_prime_max,
            eta,
        }
    }
}

pub fn remote_purities(dec_z: &ConditionalDecomposition, dec_x: &ConditionalDecomposition) -> Result<PurityBudget> {
    dec_z.axis.check_complementary(&dec_x.axis)?;
    Ok(budget(&dec_z.observables(), &dec_x.observables()))
}

fn budget(primary: &AxisObservables, secondary: &AxisObservables) -> PurityBudget {
    PurityBudget::new(primary.p_plus, primary.p_minus, primary.eps(), secondary.eps())
}

/// One side of the test: `lhs = G_++ G_-- - |G_+-|^2`,
/// `rhs = (eta + (G_++ + G_--)^2 - 1)/2`, `w = rhs - lhs`, and the bound
/// on `Y_a` that separability implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub gram: GramObservables,
    pub budget: PurityBudget,
    pub lhs: f64,
    pub rhs: f64,
    pub w: f64,
    /// `Y_a` evaluated on the measured Gram entries.
    pub ya: f64,
    /// `(sqrt(2 G_++ G_--) + sqrt(eta + (G_++ + G_--)^2 - 1))^2 / 8`, radicand clamped at 0.
    pub ya_bound: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn new(gram: GramObservables, budget: PurityBudget, guard: f64) -> Result<Self> {
        let GramObservables { g_pp, g_mm, g_pm_abs2, .. } = gram;
        let lhs = g_pp * g_mm - g_pm_abs2;
        let sum = g_pp + g_mm;
        let rhs = (budget.eta + sum * sum - 1.0) / 2.0;
        let w = 0.5 * (budget.eta + g_pp * g_pp + g_mm * g_mm + 2.0 * g_pm_abs2 - 1.0);
        let ya = collect::collectibility_ya(&GramMatrix2::new(g_pp, g_mm, g_pm_abs2)?)?;
        let ya_bound = ((2.0 * g_pp * g_mm).sqrt() + (budget.eta + sum * sum - 1.0).max(0.0).sqrt()).powi(2) / 8.0;
        let verdict = if w < -guard { Verdict::EntangledDetected } else { Verdict::Inconclusive };
        Ok(InequalityReport { gram, budget, lhs, rhs, w, ya, ya_bound, verdict })
    }
}

/// `Y_a > 1/16 + (eta/2 + sqrt(eta/2))/4` certifies entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YaCriterion {
    pub value: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

pub fn ya_criterion(value: f64, eta: f64) -> YaCriterion {
    let h = (eta / 2.0).max(0.0);
    let threshold = 1.0 / 16.0 + 0.25 * (h + h.sqrt());
    YaCriterion { value, threshold, verdict: Verdict::above(value, threshold, WITNESS_GUARD) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub axis_z: MeasurementAxis,
    pub axis_x: MeasurementAxis,
    /// Gram entries on `axis_z`, `eps'` from `axis_x`.
    pub primary: InequalityReport,
    /// Roles of the axes swapped.
    pub dual: InequalityReport,
    pub ya_criterion: YaCriterion,
    /// Detected if either inequality is violated beyond the guard.
    pub verdict: Verdict,
    /// Branches without a conditional state, e.g. `"z-"`.
    pub degenerate_branches: Vec<String>,
    /// Present for reports estimated from click counts.
    pub statistics: Option<ClickStatistics>,
    pub warnings: Vec<String>,
}

pub fn criteria_ya_mixed(report: &WitnessReport) -> YaCriterion {
    ya_criterion(report.primary.ya, report.primary.budget.eta)
}

pub(crate) fn assemble_report(
    axis_z: MeasurementAxis,
    axis_x: MeasurementAxis,
    obs_z: &AxisObservables,
    obs_x: &AxisObservables,
    guard: f64,
) -> Result<WitnessReport> {
    let primary = InequalityReport::new(obs_z.gram(), budget(obs_z, obs_x), guard)?;
    let dual = InequalityReport::new(obs_x.gram(), budget(obs_x, obs_z), guard)?;
    let mut degenerate_branches = Vec::new();
    for (axis, obs) in [(axis_z, obs_z), (axis_x, obs_x)] {
        for (sign, deg) in ['+', '-'].iter().zip(obs.degenerate) {
            if deg {
                degenerate_branches.push(format!("{axis}{sign}"));
            }
        }
    }
    let verdict = if primary.verdict.is_detected() || dual.verdict.is_detected() {
        Verdict::EntangledDetected
    } else {
        Verdict::Inconclusive
    };
    let ya_criterion = ya_criterion(primary.ya, primary.budget.eta);
    Ok(WitnessReport { axis_z, axis_x, primary, dual, ya_criterion, verdict, degenerate_branches, statistics: None, warnings: Vec::new() })
}

pub fn witness(rho: &DensityMatrix, axis_z: MeasurementAxis, axis_x: MeasurementAxis) -> Result<WitnessReport> {
    require_two_qubits(rho.shape())?;
    axis_z.check_complementary(&axis_x)?;
    let dec_z = condition_on_axis(rho, axis_z)?;
    let dec_x = condition_on_axis(rho, axis_x)?;
    assemble_report(axis_z, axis_x, &dec_z.observables(), &dec_x.observables(), WITNESS_GUARD)
}

/// `Tr(rho_B^2) >= 1 - eta` and its dual with the axes swapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityBoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub dual_rhs: f64,
    pub dual_holds: bool,
}

pub fn bob_purity_bound(rho: &DensityMatrix, axis_z: MeasurementAxis, axis_x: MeasurementAxis) -> Result<PurityBoundReport> {
    require_two_qubits(rho.shape())?;
    axis_z.check_complementary(&axis_x)?;
    let dec_z = condition_on_axis(rho, axis_z)?;
    let dec_x = condition_on_axis(rho, axis_x)?;
    let rho_b = dec_z.rho_b();
    let lhs = (&rho_b * &rho_b).trace().re;
    let (oz, ox) = (dec_z.observables(), dec_x.observables());
    let rhs = 1.0 - budget(&oz, &ox).eta;
    let dual_rhs = 1.0 - budget(&ox, &oz).eta;
    Ok(PurityBoundReport {
        lhs,
        rhs,
        holds: lhs >= rhs - WITNESS_GUARD,
        dual_rhs,
        dual_holds: lhs >= dual_rhs - WITNESS_GUARD,
    })
}

/// `(1 - p)|Psi+><Psi+| + p I/4` with `|Psi+> = (|01> + |10>)/sqrt(2)`.
pub fn depolarized_singlet(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadParams(format!("noise weight p = {p} outside [0, 1]")));
    }
    let shape = TensorShape::two_qubits();
    let psi = crate::qcore::PureState::from_real(shape, &[0.0, 1.0, 1.0, 0.0])?;
    DensityMatrix::mixture(&[(1.0 - p, &psi.projector()), (p, &DensityMatrix::maximally_mixed(shape))])
}

/// Noise weight at which the exact witness on the depolarized state (axes
/// `z`, `x`) stops detecting entanglement, by bisection on `[0, 1]`.
pub fn depolarized_singlet_threshold(tol: f64) -> Result<f64> {
    let detected = |p: f64| -> Result<bool> { Ok(witness(&depolarized_singlet(p)?, MeasurementAxis::z(), MeasurementAxis::x())?.verdict.is_detected()) };
    if !detected(0.0)? || detected(1.0)? {
        return Err(Error::NoRoot("verdict does not change sign on [0, 1]".into()));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if detected(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityMatrix {
        PureState::from_real(TensorShape::two_qubits(), &[1.0, 0.0, 0.0, 1.0]).unwrap().projector()
    }

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(TensorShape::two_qubits())
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
        (a - b).iter().all(|z| z.norm() < 1e-12)
    }

    fn real(m: [f64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &m.map(|x| C64::new(x, 0.0)))
    }

    #[test]
    fn axis_parsing_and_versors() {
        assert_eq!("z".parse::<MeasurementAxis>().unwrap(), MeasurementAxis::z());
        assert_eq!("x".parse::<MeasurementAxis>().unwrap().to_string(), "x");
        let a: MeasurementAxis = "0.3:1.25".parse().unwrap();
        assert_eq!(a.to_string().parse::<MeasurementAxis>().unwrap(), a);
        let v = a.versor();
        assert_abs_diff_eq!(v.iter().map(|c| c * c).sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!("0.3".parse::<MeasurementAxis>().is_err());
        assert!("q:1".parse::<MeasurementAxis>().is_err());
        assert_abs_diff_eq!(MeasurementAxis::z().dot(&MeasurementAxis::x()), 0.0, epsilon = 1e-15);
        let b = MeasurementAxis::from_versor(v).unwrap();
        assert_abs_diff_eq!(a.dot(&b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn condition_examples() {
        let dec = condition_on_axis(&bell(), MeasurementAxis::z()).unwrap();
        assert_abs_diff_eq!(dec.p_plus, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dec.p_minus, 0.5, epsilon = 1e-15);
        assert!(close(&dec.sigma('+').unwrap(), &real([1.0, 0.0, 0.0, 0.0])));
        assert!(close(&dec.sigma('-').unwrap(), &real([0.0, 0.0, 0.0, 1.0])));

        let dec = condition_on_axis(&mixed(), "0.7:2.1".parse().unwrap()).unwrap();
        assert_abs_diff_eq!(dec.p_plus, 0.5, epsilon = 1e-15);
        assert!(close(&dec.sigma('+').unwrap(), &real([0.5, 0.0, 0.0, 0.5])));
        assert!(close(&dec.sigma('-').unwrap(), &real([0.5, 0.0, 0.0, 0.5])));

        let three = DensityMatrix::maximally_mixed(TensorShape::new(2, 3).unwrap());
        assert!(matches!(condition_on_axis(&three, MeasurementAxis::z()), Err(Error::NotTwoQubits { k: 2, n: 3 })));
    }

    #[test]
    fn product_state_conditions_to_bob_marginal() {
        let a = DensityMatrix::validate(real([0.7, 0.2, 0.2, 0.3]), TensorShape::new(1, 2).unwrap(), 1e-9).unwrap();
        let b = DensityMatrix::validate(real([0.6, -0.1, -0.1, 0.4]), TensorShape::new(1, 2).unwrap(), 1e-9).unwrap();
        let rho = DensityMatrix::product(&[&a, &b]).unwrap();
        for axis in [MeasurementAxis::z(), MeasurementAxis::x(), "1.1:0.4".parse().unwrap()] {
            let dec = condition_on_axis(&rho, axis).unwrap();
            assert_abs_diff_eq!(dec.p_plus + dec.p_minus, 1.0, epsilon = 1e-12);
            assert!(close(&dec.sigma('+').unwrap(), b.matrix()));
            assert!(close(&dec.sigma('-').unwrap(), b.matrix()));
            assert!(close(&dec.rho_b(), b.matrix()));
        }
    }

    #[test]
    fn degenerate_branch_is_flagged() {
        let zero = PureState::basis(TensorShape::two_qubits(), 0).unwrap().projector();
        let dec = condition_on_axis(&zero, MeasurementAxis::z()).unwrap();
        assert!(matches!(dec.sigma('-'), Err(Error::DegenerateBranch('-'))));
        let g = gram_observables(&dec);
        assert_eq!((g.g_mm, g.g_pm_abs2), (0.0, 0.0));
        let report = witness(&zero, MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert_eq!(report.degenerate_branches, vec!["z-".to_string()]);
    }

    #[test]
    fn remote_purity_examples() {
        let (z, x) = (MeasurementAxis::z(), MeasurementAxis::x());
        let b = remote_purities(&condition_on_axis(&bell(), z).unwrap(), &condition_on_axis(&bell(), x).unwrap()).unwrap();
        assert_abs_diff_eq!(b.eta, 0.0, epsilon = 1e-12);
        let b = remote_purities(&condition_on_axis(&mixed(), z).unwrap(), &condition_on_axis(&mixed(), x).unwrap()).unwrap();
        assert_abs_diff_eq!(b.eps_plus, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.eps_minus_prime, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.eta, 2.0, epsilon = 1e-12);
        let tilted: MeasurementAxis = "0.1:0".parse().unwrap();
        assert!(matches!(
            remote_purities(&condition_on_axis(&bell(), z).unwrap(), &condition_on_axis(&bell(), tilted).unwrap()),
            Err(Error::AxesNotComplementary { .. })
        ));
    }

    #[test]
    fn depolarized_budget_matches_closed_form() {
        for p in [0.0, 0.05, 0.3, 0.9] {
            let rho = depolarized_singlet(p).unwrap();
            let b = remote_purities(&condition_on_axis(&rho, MeasurementAxis::z()).unwrap(), &condition_on_axis(&rho, MeasurementAxis::x()).unwrap()).unwrap();
            // conditional states (1-p)|k><k| + p I/2 have eps = p - p^2/2
            assert_abs_diff_eq!(b.eta, 4.0 * (p - p * p / 2.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn gram_examples() {
        let g = gram_observables(&condition_on_axis(&bell(), MeasurementAxis::z()).unwrap());
        assert_abs_diff_eq!(g.g_pp, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.g_mm, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.g_pm_abs2, 0.0, epsilon = 1e-15);

        let prod = PureState::product(&[
            nalgebra::DVector::from_vec(vec![C64::new(0.8, 0.0), C64::new(0.6, 0.0)]),
            nalgebra::DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]),
        ])
        .unwrap();
        let g = gram_observables(&condition_on_axis(&prod.projector(), "0.4:0.9".parse().unwrap()).unwrap());
        assert_abs_diff_eq!(g.g_pp * g.g_mm, g.g_pm_abs2, epsilon = 1e-12);

        let g = gram_observables(&condition_on_axis(&mixed(), MeasurementAxis::z()).unwrap());
        assert_abs_diff_eq!(g.g_pp, 0.5 * 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.g_pm_abs2, 0.125, epsilon = 1e-15);
    }

    #[test]
    fn witness_examples() {
        let r = witness(&bell(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert_abs_diff_eq!(r.primary.lhs, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.primary.rhs, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.primary.w, -0.25, epsilon = 1e-12);
        assert_eq!(r.verdict, Verdict::EntangledDetected);
        assert_eq!(r.dual.verdict, Verdict::EntangledDetected);

        let prod = PureState::basis(TensorShape::two_qubits(), 1).unwrap().apply_local(&[
            crate::qcore::random::unitary(2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5)),
            ComplexMatrix::identity(2, 2),
        ]);
        let r = witness(&prod.unwrap().projector(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert_abs_diff_eq!(r.primary.lhs, r.primary.rhs, epsilon = 1e-12);
        assert_eq!(r.verdict, Verdict::Inconclusive);

        let r = witness(&mixed(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_abs_diff_eq!(r.primary.budget.eta, 2.0, epsilon = 1e-12);

        assert!(witness(&depolarized_singlet(0.05).unwrap(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap().verdict.is_detected());
        assert!(!witness(&depolarized_singlet(0.20).unwrap(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap().verdict.is_detected());
    }

    use rand::SeedableRng;

    #[test]
    fn ya_criterion_examples() {
        let r = witness(&bell(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        let c = criteria_ya_mixed(&r);
        assert_abs_diff_eq!(c.value, 0.25, epsilon = 1e-12);
        assert_eq!(c.verdict, Verdict::EntangledDetected);
        let c = ya_criterion(0.25, 2.0);
        assert_abs_diff_eq!(c.threshold, 0.5625, epsilon = 1e-15);
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let c = ya_criterion(0.3, 0.5);
        assert_abs_diff_eq!(c.threshold, 0.25, epsilon = 1e-15);
        assert_eq!(c.verdict, Verdict::EntangledDetected);
    }

    #[test]
    fn bob_purity_examples() {
        let a = PureState::basis(TensorShape::new(1, 2).unwrap(), 0).unwrap();
        let rho_a = DensityMatrix::validate(real([0.5, 0.1, 0.1, 0.5]), TensorShape::new(1, 2).unwrap(), 1e-9).unwrap();
        let prod = DensityMatrix::product(&[&rho_a, &a.projector()]).unwrap();
        let r = bob_purity_bound(&prod, MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.rhs, 1.0, epsilon = 1e-12);
        assert!(r.holds && r.dual_holds);
        let r = bob_purity_bound(&bell(), MeasurementAxis::z(), MeasurementAxis::x()).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn depolarized_threshold_is_exact_root() {
        let p = depolarized_singlet_threshold(1e-12).unwrap();
        assert_abs_diff_eq!(p, 1.0 - 3f64.sqrt() / 2.0, epsilon = 1e-9);
        assert!(depolarized_singlet(1.2).is_err());
    }
}
