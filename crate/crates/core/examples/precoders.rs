//! Matched-filter and zero-forcing precoders, the SVD common precoder and
//! the power split, checked against their defining properties.

use rscf::channel::sample_channel;
use rscf::experiment::{realize, ExperimentConfig};
use rscf::precoding::{allocate_power, effective_tx_power, mf_precoder, zf_precoder, zf_residual, DEFAULT_ZF_CONDITION_CAP};
use rscf::rng::{stream, Purpose};

fn main() -> rscf::Result<()> {
    let real = realize(&ExperimentConfig::default(), 0)?;
    let ch = sample_channel(&real.large_scale, 0.25, &mut stream(5, Purpose::Fading, 0, 0))?;

    let zf = zf_precoder(&ch.g_hat, DEFAULT_ZF_CONDITION_CAP)?;
    println!("ZF residual |G^T P - I| = {:.2e}", zf_residual(&ch.g_hat, &zf.unnormalized().p_private));
    println!("ZF raw column norms {:?}", zf.raw_column_norms);

    let mf = mf_precoder(&ch.g_hat)?;
    println!("dominant singular value {:.4e}, |u_k1| = {:?}", mf.side_info.psi1, mf.side_info.u_col1.iter().map(|u| u.norm()).collect::<Vec<_>>());

    let p_t = 0.2;
    for delta in [0.0, 0.3, 1.0] {
        let alloc = allocate_power(p_t, delta, 3)?;
        println!(
            "delta {delta}: a_c = {:.4}, a_k = {:.4}, transmitted {:.6} W",
            alloc.a_common,
            alloc.a_private[0],
            effective_tx_power(&zf, &alloc)
        );
    }
    Ok(())
}
