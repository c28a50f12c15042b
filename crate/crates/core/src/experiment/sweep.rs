use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SnrNorm, Variant};
use super::search::{esr_for_delta, optimize_delta, EsrEvaluation};
use super::trials::{run_trials, TrialSet};
use crate::error::{Error, Result};
use crate::rates::{EsrScope, SinrModel};

/// One (sweep point, variant) outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis_name: String,
    pub axis_value: f64,
    pub variant: String,
    pub esr_bits_hz: f64,
    pub min_common_rate: f64,
    pub delta_opt: f64,
    pub n_channel: usize,
    pub n_error: usize,
    pub seed: u64,
    pub guarded_sinr_count: usize,
    pub resampled_count: usize,
}

/// What is needed to reproduce a sweep exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub esr_scope: EsrScope,
    pub sinr_model: SinrModel,
    pub snr_norm: SnrNorm,
    /// Realizations whose dominant singular value was not simple.
    pub svd_ties: usize,
    pub config: ExperimentConfig,
}

impl SweepMetadata {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        SweepMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config_hash: config.config_hash(),
            esr_scope: config.esr_scope,
            sinr_model: config.sinr_model,
            snr_norm: config.snr_norm,
            svd_ties: 0,
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub records: Vec<SweepRecord>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn guarded_total(&self) -> usize {
        self.records.iter().map(|r| r.guarded_sinr_count).sum()
    }

    /// Records of one variant in sweep order.
    pub fn series<'a>(&'a self, variant: &'a str) -> impl Iterator<Item = &'a SweepRecord> + 'a {
        self.records.iter().filter(move |r| r.variant == variant)
    }
}

/// Variants sharing topology and precoder share every trial; only the
/// power split differs. Groups keep first-appearance order.
fn group_variants(variants: &[Variant]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in variants.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| variants[g[0]].topology == v.topology && variants[g[0]].precoder == v.precoder)
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

fn evaluate(set: &TrialSet, variant: Variant) -> Result<EsrEvaluation> {
    let cfg = &set.config;
    if variant.rs_enabled {
        Ok(optimize_delta(set, cfg.delta_grid_step, cfg.esr_scope, cfg.sinr_model)?.best)
    } else {
        esr_for_delta(set, 0.0, cfg.esr_scope, cfg.sinr_model)
    }
}

fn record(axis_name: &str, axis_value: f64, variant: Variant, set: &TrialSet, eval: &EsrEvaluation) -> SweepRecord {
    SweepRecord {
        axis_name: axis_name.to_string(),
        axis_value,
        variant: variant.to_string(),
        esr_bits_hz: eval.esr(),
        min_common_rate: eval.report.min_common_rate,
        delta_opt: eval.delta,
        n_channel: set.n_channel(),
        n_error: set.n_error(),
        seed: set.config.seed,
        guarded_sinr_count: eval.guarded,
        resampled_count: set.resampled,
    }
}

fn check_inputs(base: &ExperimentConfig, points: &[f64], variants: &[Variant], what: &'static str) -> Result<()> {
    base.validate()?;
    if points.is_empty() {
        return Err(Error::Empty(what));
    }
    if variants.is_empty() {
        return Err(Error::Empty("variants"));
    }
    Ok(())
}

/// Fills `slots[point][variant]` for one group of variants.
type Slots = Vec<Vec<Option<SweepRecord>>>;

fn into_records(slots: Slots) -> Vec<SweepRecord> {
    slots.into_iter().flatten().map(|r| r.expect("every slot filled")).collect()
}

/// ESR against SNR. Every variant and SNR point sees the same layouts,
/// fading and error draws; only the transmit power and split change.
pub fn sweep_snr(base: &ExperimentConfig, snr_db: &[f64], variants: &[Variant]) -> Result<SweepResult> {
    check_inputs(base, snr_db, variants, "snr_db")?;
    if let Some(bad) = snr_db.iter().find(|s| !s.is_finite()) {
        return Err(Error::config("snr_db", format!("must be finite, got {bad}")));
    }
    let mut slots: Slots = vec![vec![None; variants.len()]; snr_db.len()];
    let mut svd_ties = 0;
    for group in group_variants(variants) {
        let mut set = run_trials(&base.with_variant(variants[group[0]]))?;
        svd_ties += set.svd_ties;
        for (p, &snr) in snr_db.iter().enumerate() {
            set.retarget_snr(snr)?;
            for &vi in &group {
                let eval = evaluate(&set, variants[vi])?;
                slots[p][vi] = Some(record("snr_db", snr, variants[vi], &set, &eval));
            }
        }
    }
    let mut metadata = SweepMetadata::for_config(base);
    metadata.svd_ties = svd_ties;
    Ok(SweepResult {
        axis_name: "snr_db".into(),
        records: into_records(slots),
        metadata,
    })
}

/// ESR against CSIT error variance at the base SNR. The unit normals behind
/// the estimate and the error are shared by all points, so the comparison is
/// paired across error variances too.
pub fn sweep_error_variance(base: &ExperimentConfig, sigma_e2: &[f64], variants: &[Variant]) -> Result<SweepResult> {
    check_inputs(base, sigma_e2, variants, "sigma_e2")?;
    let mut slots: Slots = vec![vec![None; variants.len()]; sigma_e2.len()];
    let mut svd_ties = 0;
    for (p, &s) in sigma_e2.iter().enumerate() {
        let point = ExperimentConfig {
            sigma_e2: s,
            ..base.clone()
        };
        point.validate()?;
        for group in group_variants(variants) {
            let set = run_trials(&point.with_variant(variants[group[0]]))?;
            svd_ties += set.svd_ties;
            for &vi in &group {
                let eval = evaluate(&set, variants[vi])?;
                slots[p][vi] = Some(record("sigma_e2", s, variants[vi], &set, &eval));
            }
        }
    }
    let mut metadata = SweepMetadata::for_config(base);
    metadata.svd_ties = svd_ties;
    Ok(SweepResult {
        axis_name: "sigma_e2".into(),
        records: into_records(slots),
        metadata,
    })
}

/// One channel realization at the base SNR, averaged over its error draws.
pub fn single_trial(base: &ExperimentConfig, variants: &[Variant]) -> Result<SweepResult> {
    let one = ExperimentConfig {
        n_channel: 1,
        ..base.clone()
    };
    sweep_snr(&one, &[one.snr_db], variants)
}
