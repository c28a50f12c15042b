//! The MF and ZF closed-form SINRs against the general per-column path,
//! and the power bookkeeping of the SINR decompositions.

mod common;

use common::{instance, rel, K};
use rscf::precoding::{allocate_power, effective_tx_power, PrecoderKind};
use rscf::rates::{sinr_common_general, sinr_mf_closed, sinr_private_general, sinr_zf_closed};
use rscf::Complex64;

const INSTANCES: u32 = 1000;

fn worst_closed_form_gap(kind: PrecoderKind) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..INSTANCES {
        let inst = instance(101, i, kind);
        let raw = inst.precoders.unnormalized();
        let alloc = allocate_power(inst.p_t, inst.delta, K).unwrap().for_raw_columns(&inst.precoders.raw_column_norms);
        for k in 0..K {
            let c = sinr_common_general(k, &inst.g_hat, &inst.g_err, &raw, &alloc, inst.sigma_w2).unwrap();
            let p = sinr_private_general(k, &inst.g_hat, &inst.g_err, &raw, &alloc, inst.sigma_w2).unwrap();
            let (cc, cp) = match kind {
                PrecoderKind::Mf => sinr_mf_closed(k, &inst.g_hat, &inst.g_err, &raw, &alloc, inst.sigma_w2).unwrap(),
                PrecoderKind::Zf => sinr_zf_closed(k, &inst.g_hat, &inst.g_err, &raw, &alloc, inst.sigma_w2).unwrap(),
            };
            let gap = rel(c.gamma, cc.value).max(rel(p.gamma, cp.value));
            assert!(gap <= 1e-9, "{kind:?} instance {i} user {k}: general {} / {} vs closed {} / {}", c.gamma, p.gamma, cc.value, cp.value);
            worst = worst.max(gap);
        }
    }
    worst
}

#[test]
fn matched_filter_closed_form_matches_general_path() {
    let worst = worst_closed_form_gap(PrecoderKind::Mf);
    println!("MF worst relative gap {worst:.3e}");
}

#[test]
fn zero_forcing_closed_form_matches_general_path() {
    let worst = worst_closed_form_gap(PrecoderKind::Zf);
    println!("ZF worst relative gap {worst:.3e}");
}

#[test]
fn closed_forms_reject_the_wrong_precoder() {
    let inst = instance(5, 0, PrecoderKind::Mf);
    let alloc = allocate_power(inst.p_t, 0.5, K).unwrap();
    assert!(sinr_zf_closed(0, &inst.g_hat, &inst.g_err, &inst.precoders, &alloc, inst.sigma_w2).is_err());
}

#[test]
fn breakdowns_account_for_all_received_power() {
    for kind in [PrecoderKind::Mf, PrecoderKind::Zf] {
        for i in 0..INSTANCES {
            let inst = instance(202, i, kind);
            let alloc = allocate_power(inst.p_t, inst.delta, K).unwrap();
            let tx = effective_tx_power(&inst.precoders, &alloc);
            assert!(rel(tx, inst.p_t) <= 1e-12, "transmit power {tx} vs {}", inst.p_t);

            let g = inst.g();
            let through = |k: usize, col: &rscf::CVector| -> f64 {
                g.column(k).iter().zip(col.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()
            };
            for k in 0..K {
                let private: f64 = (0..K)
                    .map(|j| alloc.a_private[j].powi(2) * through(k, &inst.precoders.p_private.column(j).into_owned()))
                    .sum();
                let common = alloc.a_common.powi(2) * through(k, &inst.precoders.p_common);

                let c = sinr_common_general(k, &inst.g_hat, &inst.g_err, &inst.precoders, &alloc, inst.sigma_w2).unwrap();
                let p = sinr_private_general(k, &inst.g_hat, &inst.g_err, &inst.precoders, &alloc, inst.sigma_w2).unwrap();
                let want_c = common + private + inst.sigma_w2;
                let want_p = private + inst.sigma_w2;
                assert!(rel(c.total(), want_c) <= 1e-10, "{kind:?} {i} common: {} vs {want_c}", c.total());
                assert!(rel(p.total(), want_p) <= 1e-10, "{kind:?} {i} private: {} vs {want_p}", p.total());
            }
        }
    }
}
