//! Exhaustive search over the common-power fraction on cached trial
//! statistics, printing a coarse view of the ESR curve.

use rscf::experiment::{esr_for_delta, optimize_delta, run_trials, ExperimentConfig};

fn main() -> rscf::Result<()> {
    let cfg = ExperimentConfig {
        n_channel: 30,
        n_error: 30,
        snr_db: 25.0,
        ..ExperimentConfig::default()
    };
    let set = run_trials(&cfg)?;
    let search = optimize_delta(&set, cfg.delta_grid_step, cfg.esr_scope, cfg.sinr_model)?;
    for &(delta, esr) in search.curve.iter().step_by(100) {
        println!("delta {delta:.1}: ESR {esr:7.3} bit/s/Hz");
    }
    let plain = esr_for_delta(&set, 0.0, cfg.esr_scope, cfg.sinr_model)?;
    println!(
        "best delta {:.3}: ESR {:.3} (min common rate {:.3}), without splitting {:.3}",
        search.delta_opt,
        search.best.esr(),
        search.best.report.min_common_rate,
        plain.esr()
    );
    Ok(())
}
