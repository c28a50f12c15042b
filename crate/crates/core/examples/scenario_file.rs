//! Parse an inline scenario with an override and print the result as CSV
//! and as JSON.

use rscf::experiment::single_trial;
use rscf::output::{emit_results, Format};
use rscf::scenario::{parse_override, parse_scenario};

const SCENARIO: &str = r#"
m = 6
k = 3
variants = ["RS-BS-MF", "BS-MF"]
n_error = 10
delta_grid_step = 0.01
"#;

fn main() -> rscf::Result<()> {
    let scenario = parse_scenario(SCENARIO, &[parse_override("seed=5")?])?;
    let result = single_trial(&scenario.config, &scenario.variants)?;
    print!("{}", String::from_utf8_lossy(&emit_results(&result, Format::Csv)?));
    println!("{}", String::from_utf8_lossy(&emit_results(&result, Format::Json)?));
    Ok(())
}
