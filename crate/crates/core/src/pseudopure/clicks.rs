//! Seeded simulation of the two-copy click statistics, their CSV form, and
//! the estimators that turn counts back into a witness report.
//!
//! One shot prepares two copies of the state. Alice's outcomes on the two
//! copies select the branches `(i, j)`; Bob's conditional states then meet
//! at a beam splitter, which gives a double click with probability
//! `(1 - Tr(sigma_i sigma_j))/2`.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble_report, condition_on_axis, ya_criterion, AxisObservables, InequalityReport, MeasurementAxis, PurityBudget, WitnessReport};
use crate::qcore::DensityMatrix;
use crate::{Error, Result, Verdict};

const BATCH: u64 = 1 << 16;
/// Fewer events than this on any branch is too few to estimate from.
pub const MIN_BRANCH_COUNT: u64 = 10;
/// Click-based verdicts require a violation of this many standard errors.
pub const SIGMA_GUARD: f64 = 3.0;
const SECOND_AXIS_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counts for one axis. Index 0 is outcome `+`, index 1 is `-`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickRecord {
    pub axis: MeasurementAxis,
    pub shots: u64,
    /// Double clicks when copy 1 gave `i` and copy 2 gave `j`.
    pub coincidences: [[u64; 2]; 2],
    /// Outcome counts on copy 1.
    pub marginals_1: [u64; 2],
    /// Outcome counts on copy 2.
    pub marginals_2: [u64; 2],
}

impl ClickRecord {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::BadParams("record has zero shots".into()));
        }
        for m in [self.marginals_1, self.marginals_2] {
            if m[0] + m[1] != self.shots {
                return Err(Error::BadParams(format!("marginal counts {m:?} do not add up to {} shots", self.shots)));
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let c = self.coincidences[i][j];
                if c > self.marginals_1[i].min(self.marginals_2[j]) {
                    return Err(Error::BadParams(format!("coincidence count {c} for branches ({}, {}) exceeds its marginals", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("probability in (0, 1)").sample(rng)
}

/// Simulates `shots` two-copy trials. Shots are split into fixed-size
/// batches, each driven by its own stream of a generator seeded with `seed`,
/// so the counts depend only on `(rho, axis, shots, seed)`.
pub fn simulate_clicks(rho: &DensityMatrix, axis: MeasurementAxis, shots: u64, seed: u64) -> Result<ClickRecord> {
    if shots == 0 {
        return Err(Error::BadParams("shots must be >= 1".into()));
    }
    let obs = condition_on_axis(rho, axis)?.observables();
    let p = [obs.p_plus, obs.p_minus];
    let cells: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let pair_p = cells.map(|(i, j)| p[i] * p[j]);
    let click_p = cells.map(|(i, j)| match (i, j) {
        (0, 0) => (1.0 - obs.purity_plus) / 2.0,
        (1, 1) => (1.0 - obs.purity_minus) / 2.0,
        _ => (1.0 - obs.overlap) / 2.0,
    });

    let batches = shots.div_ceil(BATCH);
    let (pairs, clicks) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let size = BATCH.min(shots - b * BATCH);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut pairs = [0u64; 4];
            let (mut left, mut mass) = (size, 1.0);
            for c in 0..3 {
                let n = if mass > 0.0 { binomial(&mut rng, left, pair_p[c] / mass) } else { 0 };
                pairs[c] = n;
                left -= n;
                mass -= pair_p[c];
            }
            pairs[3] = left;
            let clicks = std::array::from_fn(|c| binomial(&mut rng, pairs[c], click_p[c]));
            (pairs, clicks)
        })
        .reduce(|| ([0u64; 4], [0u64; 4]), |a, b| (std::array::from_fn(|c| a.0[c] + b.0[c]), std::array::from_fn(|c| a.1[c] + b.1[c])));

    Ok(ClickRecord {
        axis,
        shots,
        coincidences: [[clicks[0], clicks[1]], [clicks[2], clicks[3]]],
        marginals_1: [pairs[0] + pairs[1], pairs[2] + pairs[3]],
        marginals_2: [pairs[0] + pairs[2], pairs[1] + pairs[3]],
    })
}

/// Records for both axes; the second axis uses a seed derived from `seed`.
pub fn simulate_pair(
    rho: &DensityMatrix,
    axis_z: MeasurementAxis,
    axis_x: MeasurementAxis,
    shots: u64,
    seed: u64,
) -> Result<(ClickRecord, ClickRecord)> {
    Ok((simulate_clicks(rho, axis_z, shots, seed)?, simulate_clicks(rho, axis_x, shots, seed ^ SECOND_AXIS_SALT)?))
}

#[derive(Debug, Serialize, Deserialize)]
struct ClickRow {
    axis: String,
    branch_i: u8,
    branch_j: u8,
    coincidence_count: u64,
    marginal_count_1: u64,
    marginal_count_2: u64,
    shots: u64,
}

/// Four rows per record, branches numbered 1 (`+`) and 2 (`-`).
pub fn write_click_csv<W: Write>(records: &[ClickRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        for i in 0..2 {
            for j in 0..2 {
                w.serialize(ClickRow {
                    axis: r.axis.to_string(),
                    branch_i: i as u8 + 1,
                    branch_j: j as u8 + 1,
                    coincidence_count: r.coincidences[i][j],
                    marginal_count_1: r.marginals_1[i],
                    marginal_count_2: r.marginals_2[j],
                    shots: r.shots,
                })
                .map_err(|e| Error::Io(e.to_string()))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses records written by [`write_click_csv`], one per distinct axis label
/// in order of first appearance. Lines starting with `#` are skipped.
pub fn read_click_csv<R: Read>(reader: R) -> Result<Vec<ClickRecord>> {
    let mut groups: Vec<(String, Vec<ClickRow>)> = Vec::new();
    for row in csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader).deserialize::<ClickRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        match groups.iter_mut().find(|(label, _)| *label == row.axis) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((row.axis.clone(), vec![row])),
        }
    }
    groups.into_iter().map(|(label, rows)| record_from_rows(&label, &rows)).collect()
}

fn record_from_rows(label: &str, rows: &[ClickRow]) -> Result<ClickRecord> {
    let axis: MeasurementAxis = label.parse()?;
    let bad = |msg: String| Error::Parse(format!("axis '{label}': {msg}"));
    if rows.len() != 4 {
        return Err(bad(format!("expected 4 rows, found {}", rows.len())));
    }
    let shots = rows[0].shots;
    let mut seen = [[false; 2]; 2];
    let mut coincidences = [[0; 2]; 2];
    let mut marginals_1 = [None; 2];
    let mut marginals_2 = [None; 2];
    for row in rows {
        if row.shots != shots {
            return Err(bad("inconsistent shot counts".into()));
        }
        let (i, j) = match (row.branch_i, row.branch_j) {
            (1..=2, 1..=2) => (row.branch_i as usize - 1, row.branch_j as usize - 1),
            other => return Err(bad(format!("branch pair {other:?} outside 1..=2"))),
        };
        if std::mem::replace(&mut seen[i][j], true) {
            return Err(bad(format!("duplicate row for branches ({}, {})", i + 1, j + 1)));
        }
        coincidences[i][j] = row.coincidence_count;
        for (slot, value) in [(&mut marginals_1[i], row.marginal_count_1), (&mut marginals_2[j], row.marginal_count_2)] {
            if slot.is_some_and(|v| v != value) {
                return Err(bad("inconsistent marginal counts".into()));
            }
            *slot = Some(value);
        }
    }
    let record = ClickRecord {
        axis,
        shots,
        coincidences,
        marginals_1: marginals_1.map(|m| m.unwrap_or(0)),
        marginals_2: marginals_2.map(|m| m.unwrap_or(0)),
    };
    record.validate()?;
    Ok(record)
}

/// Standard errors attached to a click-based report, and the witness values
/// with each `eps` raised by [`SIGMA_GUARD`] standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClickStatistics {
    pub shots: u64,
    pub se_lhs: f64,
    pub se_rhs: f64,
    pub se_w: f64,
    pub w_conservative: f64,
    pub dual_se_lhs: f64,
    pub dual_se_rhs: f64,
    pub dual_se_w: f64,
    pub dual_w_conservative: f64,
}

/// Point estimates `(p_+, q_11, q_22, q_12)` for one axis, with standard
/// errors. `q_ij` is the double-click probability given branches `(i, j)`;
/// the two mixed cells are pooled.
#[derive(Debug, Clone, Copy)]
struct AxisEstimate {
    theta: [f64; 4],
    se: [f64; 4],
}

fn estimate(rec: &ClickRecord) -> Result<AxisEstimate> {
    let low = rec.marginals_1.iter().chain(&rec.marginals_2).copied().min().unwrap_or(0);
    if low < MIN_BRANCH_COUNT {
        return Err(Error::InsufficientCounts(format!(
            "axis {}: a branch has {low} events, need at least {MIN_BRANCH_COUNT}",
            rec.axis
        )));
    }
    let shots = rec.shots as f64;
    let pairs = |i: usize, j: usize| rec.marginals_1[i] as f64 * rec.marginals_2[j] as f64 / shots;
    let c = |i: usize, j: usize| rec.coincidences[i][j] as f64;
    let rate = |clicks: f64, n: f64| (clicks / n, {
        let smooth = (clicks + 1.0) / (n + 2.0);
        (smooth * (1.0 - smooth) / n).sqrt()
    });
    let plus = (rec.marginals_1[0] + rec.marginals_2[0]) as f64;
    let (p, se_p) = rate(plus, 2.0 * shots);
    let (q11, se11) = rate(c(0, 0), pairs(0, 0));
    let (q22, se22) = rate(c(1, 1), pairs(1, 1));
    let (q12, se12) = rate(c(0, 1) + c(1, 0), pairs(0, 1) + pairs(1, 0));
    Ok(AxisEstimate { theta: [p, q11, q22, q12], se: [se_p, se11, se22, se12] })
}

/// Observables implied by `(p_+, q_11, q_22, q_12)`, clamped to the physical
/// range; out-of-range inputs are reported through `warn`.
fn observables(theta: &[f64], label: &str, mut warn: impl FnMut(String)) -> AxisObservables {
    let p_plus = theta[0].clamp(0.0, 1.0);
    let mut clamp = |name: &str, raw: f64| {
        if !(0.0..=1.0).contains(&raw) {
            warn(format!("axis {label}: estimated {name} = {raw:.6} clamped to [0, 1]"));
        }
        raw.clamp(0.0, 1.0)
    };
    let purity_plus = clamp("Tr(sigma_+^2)", 1.0 - 2.0 * theta[1]);
    let purity_minus = clamp("Tr(sigma_-^2)", 1.0 - 2.0 * theta[2]);
    let overlap = clamp("Tr(sigma_+ sigma_-)", 1.0 - 2.0 * theta[3]);
    let cap = (purity_plus * purity_minus).sqrt();
    if overlap > cap + 1e-12 {
        warn(format!("axis {label}: estimated overlap {overlap:.6} exceeds sqrt of purities {cap:.6}, capped"));
    }
    AxisObservables {
        p_plus,
        p_minus: 1.0 - p_plus,
        purity_plus,
        purity_minus,
        overlap: overlap.min(cap),
        degenerate: [false, false],
    }
}

fn reports(oz: &AxisObservables, ox: &AxisObservables, eps_z: (f64, f64), eps_x: (f64, f64)) -> Result<(InequalityReport, InequalityReport)> {
    Ok((
        InequalityReport::new(oz.gram(), PurityBudget::new(oz.p_plus, oz.p_minus, eps_z, eps_x), 0.0)?,
        InequalityReport::new(ox.gram(), PurityBudget::new(ox.p_plus, ox.p_minus, eps_x, eps_z), 0.0)?,
    ))
}

/// Witness report estimated from click records on two complementary axes.
///
/// `lhs`, `rhs` and `w` are point estimates under the equality convention
/// for `eps`. A side counts as violated only if its conservative `w`
/// (every `eps` raised by three standard errors) is below minus three
/// standard errors of `w`.
pub fn witness_from_clicks(rec_z: &ClickRecord, rec_x: &ClickRecord) -> Result<WitnessReport> {
    rec_z.validate()?;
    rec_x.validate()?;
    if rec_z.shots != rec_x.shots {
        return Err(Error::BadParams(format!("shot counts differ: {} vs {}", rec_z.shots, rec_x.shots)));
    }
    rec_z.axis.check_complementary(&rec_x.axis)?;
    let (ez, ex) = (estimate(rec_z)?, estimate(rec_x)?);
    let (lz, lx) = (rec_z.axis.to_string(), rec_x.axis.to_string());

    let mut warnings = Vec::new();
    let oz = observables(&ez.theta, &lz, |w| warnings.push(w));
    let ox = observables(&ex.theta, &lx, |w| warnings.push(w));
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut report = assemble_report(rec_z.axis, rec_x.axis, &oz, &ox, 0.0)?;

    let theta: Vec<f64> = ez.theta.iter().chain(&ex.theta).copied().collect();
    let se: Vec<f64> = ez.se.iter().chain(&ex.se).copied().collect();
    let eval = |t: &[f64]| -> Result<[f64; 6]> {
        let (oz, ox) = (observables(&t[..4], &lz, |_| ()), observables(&t[4..], &lx, |_| ()));
        let (a, b) = reports(&oz, &ox, oz.eps(), ox.eps())?;
        Ok([a.lhs, a.rhs, a.w, b.lhs, b.rhs, b.w])
    };
    let mut var = [0.0; 6];
    for k in 0..theta.len() {
        let (mut up, mut down) = (theta.clone(), theta.clone());
        up[k] = (theta[k] + se[k]).min(1.0);
        down[k] = (theta[k] - se[k]).max(0.0);
        let span = up[k] - down[k];
        if span <= 0.0 {
            continue;
        }
        let (fu, fd) = (eval(&up)?, eval(&down)?);
        for (v, (a, b)) in var.iter_mut().zip(fu.iter().zip(&fd)) {
            *v += ((a - b) / span * se[k]).powi(2);
        }
    }
    let sd = var.map(f64::sqrt);

    let widen = |o: &AxisObservables, e: &AxisEstimate| {
        let (a, b) = o.eps();
        ((a + SIGMA_GUARD * 2.0 * e.se[1]).min(1.0), (b + SIGMA_GUARD * 2.0 * e.se[2]).min(1.0))
    };
    let (cons_z, cons_x) = reports(&oz, &ox, widen(&oz, &ez), widen(&ox, &ex))?;

    let flag = |w: f64, sd: f64| if w < -SIGMA_GUARD * sd { Verdict::EntangledDetected } else { Verdict::Inconclusive };
    report.primary.verdict = flag(cons_z.w, sd[2]);
    report.dual.verdict = flag(cons_x.w, sd[5]);
    report.verdict = if report.primary.verdict.is_detected() || report.dual.verdict.is_detected() {
        Verdict::EntangledDetected
    } else {
        Verdict::Inconclusive
    };
    report.ya_criterion = ya_criterion(report.primary.ya, cons_z.budget.eta);
    report.statistics = Some(ClickStatistics {
        shots: rec_z.shots,
        se_lhs: sd[0],
        se_rhs: sd[1],
        se_w: sd[2],
        w_conservative: cons_z.w,
        dual_se_lhs: sd[3],
        dual_se_rhs: sd[4],
        dual_se_w: sd[5],
        dual_w_conservative: cons_x.w,
    });
    report.warnings = warnings;
    Ok(report)
}
