//! Paired SNR sweep of four zero-forcing systems. Pass the number of channel
//! realizations as the first argument (default 20).

use rscf::experiment::{sweep_snr, ExperimentConfig, Variant};

fn main() -> rscf::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(20, |s| s.parse().expect("realization count"));
    let cfg = ExperimentConfig { n_channel: n, n_error: n, ..ExperimentConfig::default() };
    let variants: Vec<Variant> = ["RS-CF-ZF", "CF-ZF", "RS-BS-ZF", "BS-ZF"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let result = sweep_snr(&cfg, &[0.0, 10.0, 20.0, 30.0], &variants)?;

    print!("{:>8}", "SNR dB");
    variants.iter().for_each(|v| print!("{:>12}", v.to_string()));
    println!();
    for row in result.records.chunks(variants.len()) {
        print!("{:>8}", row[0].axis_value);
        row.iter().for_each(|r| print!("{:>12.3}", r.esr_bits_hz));
        println!();
    }
    Ok(())
}
