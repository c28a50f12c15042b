//! Serialization of sweep results and delta curves.
//!
//! CSV floats use 17 significant digits so every value parses back to the
//! identical `f64`. JSON carries the same records plus the metadata block;
//! CSV written to a file gets that block as a `<file>.meta.json` sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{SweepMetadata, SweepRecord, SweepResult};

pub const CSV_COLUMNS: [&str; 11] = [
    "axis_name",
    "axis_value",
    "variant",
    "esr_bits_hz",
    "min_common_rate",
    "delta_opt",
    "n_channel",
    "n_error",
    "seed",
    "guarded_sinr_count",
    "resampled_count",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Round-trip exact float text.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn emit_results(result: &SweepResult, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => Ok(serde_json::to_vec_pretty(result).map_err(|e| Error::Parse(e.to_string()))?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in &result.records {
                w.write_record([
                    r.axis_name.clone(),
                    fmt_float(r.axis_value),
                    r.variant.clone(),
                    fmt_float(r.esr_bits_hz),
                    fmt_float(r.min_common_rate),
                    fmt_float(r.delta_opt),
                    r.n_channel.to_string(),
                    r.n_error.to_string(),
                    r.seed.to_string(),
                    r.guarded_sinr_count.to_string(),
                    r.resampled_count.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|rec| rec.map_err(csv_err)).collect()
}

pub fn parse_json(bytes: &[u8]) -> Result<SweepResult> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Two columns, `delta,esr`, ascending in delta.
pub fn emit_curve(curve: &[(f64, f64)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["delta", "esr"]).map_err(csv_err)?;
    for &(d, e) in curve {
        w.write_record([fmt_float(d), fmt_float(e)]).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

/// Delta search outcome in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub variant: String,
    pub delta_opt: f64,
    pub esr_bits_hz: f64,
    pub guarded_sinr_count: usize,
    pub curve: Vec<(f64, f64)>,
    pub metadata: SweepMetadata,
}

pub fn metadata_json(meta: &SweepMetadata) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(meta).map_err(|e| Error::Parse(e.to_string()))
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes to `out`, or to stdout when no path is given.
pub fn write_sink(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, bytes)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ExperimentConfig;

    fn result(n: usize) -> SweepResult {
        let cfg = ExperimentConfig::default();
        SweepResult {
            axis_name: "snr_db".into(),
            records: (0..n)
                .map(|i| SweepRecord {
                    axis_name: "snr_db".into(),
                    axis_value: 5.0 * i as f64,
                    variant: "RS-CF-ZF".into(),
                    esr_bits_hz: 0.1 + 1.0 / 3.0 * i as f64,
                    min_common_rate: std::f64::consts::PI,
                    delta_opt: 0.123,
                    n_channel: 100,
                    n_error: 100,
                    seed: u64::MAX,
                    guarded_sinr_count: i,
                    resampled_count: 0,
                })
                .collect(),
            metadata: SweepMetadata::for_config(&cfg),
        }
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let bytes = emit_results(&result(0), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), CSV_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn one_record_is_two_lines() {
        let text = String::from_utf8(emit_results(&result(1), Format::Csv).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("snr_db,0.0000000000000000e0,RS-CF-ZF,"));
    }

    #[test]
    fn csv_and_json_round_trip_exactly() {
        let res = result(4);
        let csv = parse_csv(&emit_results(&res, Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, res.records);
        let json = emit_results(&res, Format::Json).unwrap();
        let back = parse_json(&json).unwrap();
        assert_eq!(back, res);
        assert_eq!(emit_results(&back, Format::Json).unwrap(), json);
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_float(1.0 / 3.0);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn curve_and_sidecar() {
        let text = String::from_utf8(emit_curve(&[(0.0, 1.0), (1.0, 0.5)]).unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "delta,esr");
        assert_eq!(text.lines().count(), 3);
        assert_eq!(sidecar_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.meta.json"));
    }
}
