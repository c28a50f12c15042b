use rayon::prelude::*;

use super::trials::{TrialSet, TrialStats};
use crate::error::{Error, Result};
use crate::rates::{ergodic_sum_rate, guarded_ratio, EsrScope, RateReport, SinrModel, UserRates};

#[derive(Clone, Debug, PartialEq)]
pub struct EsrEvaluation {
    pub delta: f64,
    pub report: RateReport,
    /// SINRs whose denominator hit the guard floor.
    pub guarded: usize,
}

impl EsrEvaluation {
    pub fn esr(&self) -> f64 {
        self.report.sum_rate
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSearch {
    pub delta_opt: f64,
    pub best: EsrEvaluation,
    /// `(delta, esr)` over the whole grid, ascending in delta.
    pub curve: Vec<(f64, f64)>,
}

/// `{0, step, 2 step, ..., 1}`. When `1 / step` is an integer `n` the points
/// are `i / n`, otherwise `1` is appended after the last full step.
pub fn delta_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::config("delta_grid_step", format!("must lie in (0, 1], got {step}")));
    }
    let inv = 1.0 / step;
    let n = inv.round();
    if (inv - n).abs() <= 1e-9 * n {
        let n = n as usize;
        return Ok((0..=n).map(|i| i as f64 / n as f64).collect());
    }
    let full = inv.floor() as usize;
    let mut grid: Vec<f64> = (0..=full).map(|i| (i as f64 * step).min(1.0)).collect();
    if *grid.last().expect("non-empty") < 1.0 {
        grid.push(1.0);
    }
    Ok(grid)
}

#[inline]
fn log2_1p(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

#[inline]
fn form_sinr(model: SinrModel, desired: f64, loss: f64, interference: f64, noise: f64) -> (f64, bool) {
    let s = match model {
        SinrModel::Decomposition => guarded_ratio(desired, loss + interference + noise, noise),
        SinrModel::ReceivedPower => guarded_ratio((desired + loss).max(0.0), interference + noise, noise),
    };
    (s.value, s.guarded)
}

/// Error-averaged rates of one realization at split `delta`, from cached statistics only.
fn realization_rates(trials: &[TrialStats], k: usize, delta: f64, model: SinrModel) -> (UserRates, usize) {
    let mut common = vec![0.0; k];
    let mut private = vec![0.0; k];
    let mut guarded = 0;
    for rec in trials {
        let ac2 = delta * rec.p_t;
        let a2 = (1.0 - delta) * rec.p_t / k as f64;
        let noise = rec.sigma_w2;
        for u in 0..k {
            let row = &rec.private[u * k..(u + 1) * k];
            let (mut est_others, mut err_others) = (0.0, 0.0);
            for (i, t) in row.iter().enumerate() {
                if i != u {
                    est_others += a2 * t.est;
                    err_others += a2 * t.error_part();
                }
            }
            let own = &row[u];
            let own_est = a2 * own.est;
            let own_err = a2 * own.error_part();

            let c = &rec.common[u];
            let (gc, gc_guard) = form_sinr(model, ac2 * c.est, ac2 * c.error_part(), (est_others + own_est) + (err_others + own_err), noise);
            let (gp, gp_guard) = form_sinr(model, own_est, own_err, est_others + err_others, noise);
            guarded += usize::from(gc_guard) + usize::from(gp_guard);
            common[u] += log2_1p(gc);
            private[u] += log2_1p(gp);
        }
    }
    let n = trials.len() as f64;
    common.iter_mut().chain(private.iter_mut()).for_each(|r| *r /= n);
    (UserRates { common, private }, guarded)
}

/// Ergodic sum rate at a fixed common-power fraction, rebuilt from the
/// cached trial statistics without touching any matrix.
pub fn esr_for_delta(stats: &TrialSet, delta: f64, scope: EsrScope, model: SinrModel) -> Result<EsrEvaluation> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::config("delta", format!("must lie in [0, 1], got {delta}")));
    }
    if stats.records.is_empty() {
        return Err(Error::Empty("trial statistics"));
    }
    let k = stats.num_users();
    let per_realization: Vec<(UserRates, usize)> = stats
        .records
        .par_chunks(stats.n_error())
        .map(|chunk| realization_rates(chunk, k, delta, model))
        .collect();
    let guarded = per_realization.iter().map(|(_, g)| g).sum();
    let rates: Vec<UserRates> = per_realization.into_iter().map(|(r, _)| r).collect();
    Ok(EsrEvaluation {
        delta,
        report: ergodic_sum_rate(&rates, scope)?,
        guarded,
    })
}

/// Exhaustive search for the common-power fraction maximizing the ESR.
/// Ties go to the smallest fraction.
pub fn optimize_delta(stats: &TrialSet, grid_step: f64, scope: EsrScope, model: SinrModel) -> Result<DeltaSearch> {
    let grid = delta_grid(grid_step)?;
    let evals = grid
        .par_iter()
        .map(|&d| esr_for_delta(stats, d, scope, model))
        .collect::<Result<Vec<_>>>()?;
    let curve: Vec<(f64, f64)> = evals.iter().map(|e| (e.delta, e.esr())).collect();
    let mut best = 0;
    for (i, e) in evals.iter().enumerate() {
        if e.esr() > evals[best].esr() {
            best = i;
        }
    }
    let best = evals.into_iter().nth(best).expect("grid is non-empty");
    Ok(DeltaSearch {
        delta_opt: best.delta,
        best,
        curve,
    })
}
