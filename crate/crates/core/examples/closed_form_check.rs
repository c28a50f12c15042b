//! Closed-form MF and ZF SINRs next to the general per-column expansion on
//! one imperfect-CSIT snapshot.

use rscf::channel::{db_to_linear, transmit_power_for_snr};
use rscf::experiment::{realize, ExperimentConfig, Variant};
use rscf::precoding::{allocate_power, PrecoderKind};
use rscf::rates::{sinr_common_general, sinr_mf_closed, sinr_private_general, sinr_zf_closed};

fn main() -> rscf::Result<()> {
    for label in ["RS-CF-MF", "RS-CF-ZF"] {
        let variant: Variant = label.parse()?;
        let cfg = ExperimentConfig { n_error: 1, ..ExperimentConfig::default() }.with_variant(variant);
        let real = realize(&cfg, 0)?;
        let g_err = &real.errors[0];
        let sigma_w2 = cfg.physical.sigma_w2();
        let raw = real.precoders.unnormalized();
        let p_t = transmit_power_for_snr(db_to_linear(cfg.snr_db), &(&real.g_hat + g_err), sigma_w2)?;
        let alloc = allocate_power(p_t, 0.4, cfg.k)?.for_raw_columns(&real.precoders.raw_column_norms);
        println!("{label}");
        for k in 0..cfg.k {
            let c = sinr_common_general(k, &real.g_hat, g_err, &raw, &alloc, sigma_w2)?;
            let p = sinr_private_general(k, &real.g_hat, g_err, &raw, &alloc, sigma_w2)?;
            let (cc, cp) = match variant.precoder {
                PrecoderKind::Mf => sinr_mf_closed(k, &real.g_hat, g_err, &raw, &alloc, sigma_w2)?,
                PrecoderKind::Zf => sinr_zf_closed(k, &real.g_hat, g_err, &raw, &alloc, sigma_w2)?,
            };
            println!(
                "  user {k}: common {:.6e} vs {:.6e}, private {:.6e} vs {:.6e}",
                c.gamma, cc.value, p.gamma, cp.value
            );
        }
    }
    Ok(())
}
