//! Path loss, shadowing, noise power and the SNR-to-power mapping for one
//! cell-free snapshot.

use rscf::channel::{channel_trace, db_to_linear, large_scale_coefficients, path_loss_db, sample_channel, transmit_power_for_snr};
use rscf::experiment::PhysicalParams;
use rscf::geometry::{distances, place_network, Topology};
use rscf::rng::{stream, Purpose};

fn main() -> rscf::Result<()> {
    let phys = PhysicalParams::paper_sec5();
    let model = phys.path_loss_model()?;
    println!("attenuation constant L = {:.4} dB", model.l_db);
    for d in [5.0, 10.0, 30.0, 50.0, 100.0, 400.0] {
        println!("  path loss at {d:>5} m: {:8.2} dB", path_loss_db(d, model.l_db, model.d0, model.d1)?);
    }

    let sigma_w2 = phys.sigma_w2();
    println!("noise power {sigma_w2:.4e} W");

    let layout = place_network(6, 3, phys.area_side, Topology::CellFree, &mut stream(3, Purpose::Layout, 0, 0))?;
    let lsf = large_scale_coefficients(&distances(&layout), &model, &mut stream(3, Purpose::Shadowing, 0, 0))?;
    println!("shadowing [dB]:\n{:.2}", lsf.shadow_db);

    let ch = sample_channel(&lsf, 0.25, &mut stream(3, Purpose::Fading, 0, 0))?;
    let g = ch.true_channel();
    for snr_db in [0.0, 10.0, 20.0, 30.0] {
        let p_t = transmit_power_for_snr(db_to_linear(snr_db), &g, sigma_w2)?;
        println!("SNR {snr_db:>4} dB -> P_t = {p_t:.4e} W (Tr = {:.3e})", channel_trace(&g));
    }
    Ok(())
}
