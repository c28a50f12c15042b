//! ESR against CSIT error variance at 20 dB, cell-free with and without
//! rate splitting, under both SINR models.

use rscf::experiment::{sweep_error_variance, ExperimentConfig, Variant};
use rscf::rates::SinrModel;

fn main() -> rscf::Result<()> {
    let variants: Vec<Variant> = vec!["RS-CF-ZF".parse()?, "CF-ZF".parse()?];
    let sigmas = [0.05, 0.15, 0.25, 0.35, 0.5];
    for model in [SinrModel::Decomposition, SinrModel::ReceivedPower] {
        let cfg = ExperimentConfig {
            n_channel: 20,
            n_error: 20,
            sinr_model: model,
            ..ExperimentConfig::default()
        };
        let result = sweep_error_variance(&cfg, &sigmas, &variants)?;
        println!("{model:?}");
        for pair in result.records.chunks(2) {
            println!(
                "  sigma_e2 {:.2}: RS-CF-ZF {:7.3} (delta {:.3}), CF-ZF {:7.3}",
                pair[0].axis_value, pair[0].esr_bits_hz, pair[0].delta_opt, pair[1].esr_bits_hz
            );
        }
    }
    Ok(())
}
