//! The cached-statistics ESR against a from-scratch evaluation that redraws
//! every realization and works on the matrices directly.

mod common;

use common::rel;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rscf::channel::{channel_trace, db_to_linear, power_for_trace};
use rscf::experiment::{esr_for_delta, optimize_delta, realize, run_trials, ExperimentConfig, SnrNorm, Variant};
use rscf::precoding::allocate_power;
use rscf::rates::{ergodic_sum_rate, rate, sinr_common_general, sinr_private_general, EsrScope, SinrModel, UserRates};

fn uncached_esr(cfg: &ExperimentConfig, delta: f64) -> f64 {
    let sigma_w2 = cfg.physical.sigma_w2();
    let k = cfg.k;
    let per_realization: Vec<UserRates> = (0..cfg.n_channel)
        .map(|r| {
            let real = realize(cfg, r).unwrap();
            let mut rates = UserRates {
                common: vec![0.0; k],
                private: vec![0.0; k],
            };
            for g_err in &real.errors {
                let trace = match cfg.snr_norm {
                    SnrNorm::PerRealization => channel_trace(&(&real.g_hat + g_err)),
                    SnrNorm::ExpectedTrace => real.large_scale.expected_trace(),
                };
                let p_t = power_for_trace(db_to_linear(cfg.snr_db), trace, cfg.m, k, sigma_w2).unwrap();
                let alloc = allocate_power(p_t, delta, k).unwrap();
                for u in 0..k {
                    let c = sinr_common_general(u, &real.g_hat, g_err, &real.precoders, &alloc, sigma_w2).unwrap();
                    let p = sinr_private_general(u, &real.g_hat, g_err, &real.precoders, &alloc, sigma_w2).unwrap();
                    rates.common[u] += rate(c.sinr(cfg.sinr_model).value).unwrap();
                    rates.private[u] += rate(p.sinr(cfg.sinr_model).value).unwrap();
                }
            }
            let n = real.errors.len() as f64;
            rates.common.iter_mut().chain(rates.private.iter_mut()).for_each(|v| *v /= n);
            rates
        })
        .collect();
    ergodic_sum_rate(&per_realization, cfg.esr_scope).unwrap().sum_rate
}

#[test]
fn cached_esr_matches_uncached_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let labels = ["RS-CF-ZF", "RS-CF-MF", "RS-BS-ZF", "RS-BS-MF"];
    let mut worst: f64 = 0.0;
    for case in 0..120 {
        let k = rng.random_range(1..=4);
        let cfg = ExperimentConfig {
            m: k + rng.random_range(1..=4),
            k,
            variant: labels.choose(&mut rng).unwrap().parse::<Variant>().unwrap(),
            sigma_e2: [0.0, 0.1, 0.25, 0.5][rng.random_range(0..4)],
            snr_db: rng.random_range(-5.0..35.0),
            n_channel: 2,
            n_error: 3,
            seed: rng.random(),
            esr_scope: if rng.random() { EsrScope::MinOfMeans } else { EsrScope::MeanOfMins },
            snr_norm: if rng.random() { SnrNorm::PerRealization } else { SnrNorm::ExpectedTrace },
            sinr_model: if rng.random() { SinrModel::Decomposition } else { SinrModel::ReceivedPower },
            fixed_geometry: rng.random_bool(0.2),
            ..ExperimentConfig::default()
        };
        let set = run_trials(&cfg).unwrap();
        for delta in [0.0, 1.0, rng.random::<f64>()] {
            let cached = esr_for_delta(&set, delta, cfg.esr_scope, cfg.sinr_model).unwrap().esr();
            let direct = uncached_esr(&cfg, delta);
            let gap = rel(cached, direct);
            assert!(gap <= 1e-10, "case {case} delta {delta}: cached {cached} vs uncached {direct} ({cfg:?})");
            worst = worst.max(gap);
        }
    }
    println!("worst cached/uncached gap {worst:.3e}");
}

#[test]
fn perfect_csit_zero_forcing_needs_no_common_stream() {
    let cfg = ExperimentConfig {
        sigma_e2: 0.0,
        snr_db: 30.0,
        n_channel: 20,
        n_error: 1,
        seed: 2024,
        ..ExperimentConfig::default()
    };
    let set = run_trials(&cfg).unwrap();
    let search = optimize_delta(&set, cfg.delta_grid_step, cfg.esr_scope, cfg.sinr_model).unwrap();
    assert_eq!(search.curve.len(), 1001);
    assert_eq!(search.delta_opt, 0.0);
    assert!(search.curve.iter().skip(1).all(|&(_, esr)| esr < search.curve[0].1));
}
