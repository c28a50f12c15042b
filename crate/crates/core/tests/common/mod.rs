#![allow(dead_code)]

use rand::Rng;
use rscf::channel::{db_to_linear, large_scale_coefficients, sample_error, sample_estimate, transmit_power_for_snr};
use rscf::experiment::PhysicalParams;
use rscf::geometry::{distances, place_network, Topology};
use rscf::precoding::{build_precoders, PrecoderKind, PrecoderSet, DEFAULT_ZF_CONDITION_CAP};
use rscf::rng::{stream, Purpose};
use rscf::CMatrix;

pub const M: usize = 6;
pub const K: usize = 3;
pub const ERROR_VARIANCES: [f64; 4] = [0.0, 0.1, 0.25, 0.5];

/// One random downlink snapshot on the default physical model.
pub struct Instance {
    pub g_hat: CMatrix,
    pub g_err: CMatrix,
    pub sigma_e2: f64,
    pub delta: f64,
    pub p_t: f64,
    pub sigma_w2: f64,
    pub precoders: PrecoderSet,
}

impl Instance {
    pub fn g(&self) -> CMatrix {
        &self.g_hat + &self.g_err
    }
}

/// Instance `i` of a reproducible family. Topology alternates, the error
/// variance cycles through [`ERROR_VARIANCES`], and the split and SNR are
/// uniform in `[0, 1]` and `[0, 30]` dB.
pub fn instance(seed: u64, i: u32, kind: PrecoderKind) -> Instance {
    let phys = PhysicalParams::paper_sec5();
    let topology = if i.is_multiple_of(2) { Topology::CellFree } else { Topology::CentralBs };
    let sigma_e2 = ERROR_VARIANCES[(i / 2) as usize % ERROR_VARIANCES.len()];
    let mut knobs = stream(seed, Purpose::Layout, i, 1);
    let delta: f64 = knobs.random();
    let snr_db: f64 = 30.0 * knobs.random::<f64>();

    let layout = place_network(M, K, phys.area_side, topology, &mut stream(seed, Purpose::Layout, i, 0)).unwrap();
    let lsf = large_scale_coefficients(&distances(&layout), &phys.path_loss_model().unwrap(), &mut stream(seed, Purpose::Shadowing, i, 0)).unwrap();
    let sigma_w2 = phys.sigma_w2();
    for attempt in 0.. {
        let g_hat = sample_estimate(&lsf, sigma_e2, &mut stream(seed, Purpose::Fading, i, attempt)).unwrap();
        let Ok(precoders) = build_precoders(kind, &g_hat, DEFAULT_ZF_CONDITION_CAP) else {
            continue;
        };
        let g_err = sample_error(&lsf, sigma_e2, &mut stream(seed, Purpose::Error, i, 0)).unwrap();
        let p_t = transmit_power_for_snr(db_to_linear(snr_db), &(&g_hat + &g_err), sigma_w2).unwrap();
        return Instance {
            g_hat,
            g_err,
            sigma_e2,
            delta,
            p_t,
            sigma_w2,
            precoders,
        };
    }
    unreachable!()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn sample_mean_var(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
