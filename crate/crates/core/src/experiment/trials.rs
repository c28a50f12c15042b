use rayon::prelude::*;

use super::config::{ExperimentConfig, SnrNorm};
use crate::channel::{channel_trace, large_scale_coefficients, power_for_trace, sample_error, sample_estimate, LargeScaleFading};
use crate::error::{Error, Result};
use crate::geometry::{distances, place_network, NetworkLayout};
use crate::precoding::{build_precoders, PrecoderSet};
use crate::rng::{stream, Purpose};
use crate::{CMatrix, Complex64};

/// Everything drawn for one channel realization.
#[derive(Clone, Debug)]
pub struct Realization {
    pub index: usize,
    pub layout: NetworkLayout,
    pub large_scale: LargeScaleFading,
    pub g_hat: CMatrix,
    pub precoders: PrecoderSet,
    pub errors: Vec<CMatrix>,
    /// Small-scale redraws needed before the precoder could be built.
    pub resampled: usize,
}

/// Draws realization `index` of a run. Independent of every other
/// realization, so realizations may be produced in any order.
pub fn realize(config: &ExperimentConfig, index: usize) -> Result<Realization> {
    let geometry_index = if config.fixed_geometry { 0 } else { index as u32 };
    let phys = &config.physical;
    let layout = place_network(
        config.m,
        config.k,
        phys.area_side,
        config.variant.topology,
        &mut stream(config.seed, Purpose::Layout, geometry_index, 0),
    )?
    .with_heights(phys.h_ap, phys.h_u);
    let large_scale = large_scale_coefficients(
        &distances(&layout),
        &phys.path_loss_model()?,
        &mut stream(config.seed, Purpose::Shadowing, geometry_index, 0),
    )?;

    let mut last_err = None;
    for attempt in 0..=config.max_resamples {
        let mut rng = stream(config.seed, Purpose::Fading, index as u32, attempt as u32);
        let g_hat = sample_estimate(&large_scale, config.sigma_e2, &mut rng)?;
        match build_precoders(config.variant.precoder, &g_hat, config.zf_condition_cap) {
            Ok(precoders) => {
                let errors = (0..config.n_error)
                    .map(|e| sample_error(&large_scale, config.sigma_e2, &mut stream(config.seed, Purpose::Error, index as u32, e as u32)))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Realization {
                    index,
                    layout,
                    large_scale,
                    g_hat,
                    precoders,
                    errors,
                    resampled: attempt,
                });
            }
            Err(e @ (Error::SingularChannel { .. } | Error::DegenerateUser { .. } | Error::ZeroChannel)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetryBudget {
        realization: index,
        attempts: config.max_resamples,
        last: Box::new(last_err.expect("at least one attempt")),
    })
}

/// Powers through one precoder column `p` at one user:
/// `|g_hat^T p|^2`, `Re{(g_hat^T p)^* (g_err^T p)}`, `|g_err^T p|^2` and `|g^T p|^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTerms {
    pub est: f64,
    pub cross: f64,
    pub err: f64,
    pub total: f64,
}

impl StageTerms {
    fn new(est: Complex64, err: Complex64, total: Complex64) -> Self {
        StageTerms {
            est: est.norm_sqr(),
            cross: (est.conj() * err).re,
            err: err.norm_sqr(),
            total: total.norm_sqr(),
        }
    }

    /// `2 cross + err`: what the estimation error adds to `est`.
    #[inline]
    pub fn error_part(&self) -> f64 {
        2.0 * self.cross + self.err
    }
}

/// Split-independent statistics of one (realization, error draw) trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialStats {
    pub realization: usize,
    pub error_index: usize,
    pub sigma_w2: f64,
    /// Channel power the SNR target is referenced to.
    pub trace: f64,
    /// Transmit power at the current SNR target.
    pub p_t: f64,
    /// Per user `k`: powers through the common precoder.
    pub common: Vec<StageTerms>,
    /// Row-major `K x K`: entry `k * K + i` is user `k` seen through private column `i`.
    pub private: Vec<StageTerms>,
}

impl TrialStats {
    pub fn private_terms(&self, user: usize, stream: usize) -> &StageTerms {
        let k = self.common.len();
        &self.private[user * k + stream]
    }
}

/// All trials of one run, ordered by realization then error draw.
#[derive(Clone, Debug)]
pub struct TrialSet {
    pub config: ExperimentConfig,
    pub records: Vec<TrialStats>,
    pub resampled: usize,
    pub svd_ties: usize,
}

impl TrialSet {
    pub fn num_users(&self) -> usize {
        self.config.k
    }

    pub fn n_channel(&self) -> usize {
        self.config.n_channel
    }

    pub fn n_error(&self) -> usize {
        self.config.n_error
    }

    /// Recomputes every trial's transmit power for a new SNR target.
    pub fn retarget_snr(&mut self, snr_db: f64) -> Result<()> {
        self.config.snr_db = snr_db;
        let snr = self.config.snr_linear();
        let (m, k) = (self.config.m, self.config.k);
        for rec in &mut self.records {
            rec.p_t = power_for_trace(snr, rec.trace, m, k, rec.sigma_w2)?;
        }
        Ok(())
    }
}

fn trial_stats(config: &ExperimentConfig, real: &Realization, error_index: usize, sigma_w2: f64) -> Result<TrialStats> {
    let g_err = &real.errors[error_index];
    let g = &real.g_hat + g_err;
    let trace = match config.snr_norm {
        SnrNorm::PerRealization => channel_trace(&g),
        SnrNorm::ExpectedTrace => real.large_scale.expected_trace(),
    };
    let p_t = power_for_trace(config.snr_linear(), trace, config.m, config.k, sigma_w2)?;

    // Rows of G^T P: one matrix product per channel instead of K^2 dot products.
    let p = &real.precoders;
    let through = |h: &CMatrix| (h.transpose() * &p.p_common, h.transpose() * &p.p_private);
    let (hc, hp) = through(&real.g_hat);
    let (ec, ep) = through(g_err);
    let (tc, tp) = through(&g);

    let k = config.k;
    let common = (0..k).map(|u| StageTerms::new(hc[u], ec[u], tc[u])).collect();
    let mut private = Vec::with_capacity(k * k);
    for u in 0..k {
        for i in 0..k {
            private.push(StageTerms::new(hp[(u, i)], ep[(u, i)], tp[(u, i)]));
        }
    }
    Ok(TrialStats {
        realization: real.index,
        error_index,
        sigma_w2,
        trace,
        p_t,
        common,
        private,
    })
}

/// Draws every realization and caches its trial statistics.
///
/// Realizations run in parallel on the current rayon pool; results are
/// reassembled in index order so the output does not depend on the schedule.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialSet> {
    config.validate()?;
    let sigma_w2 = config.physical.sigma_w2();
    let per_realization: Vec<Result<(Vec<TrialStats>, usize, bool)>> = (0..config.n_channel)
        .into_par_iter()
        .map(|r| {
            let real = realize(config, r)?;
            let stats = (0..config.n_error)
                .map(|e| trial_stats(config, &real, e, sigma_w2))
                .collect::<Result<Vec<_>>>()?;
            Ok((stats, real.resampled, real.precoders.side_info.tie))
        })
        .collect();

    let mut records = Vec::with_capacity(config.n_channel * config.n_error);
    let (mut resampled, mut svd_ties) = (0, 0);
    for item in per_realization {
        let (stats, redraws, tie) = item?;
        records.extend(stats);
        resampled += redraws;
        svd_ties += usize::from(tie);
    }
    Ok(TrialSet {
        config: config.clone(),
        records,
        resampled,
        svd_ties,
    })
}
