//! Scenario files: flat TOML tables whose keys map one-to-one onto
//! [`ExperimentConfig`] fields, plus sweep lists and output settings.
//!
//! ```toml
//! m = 6
//! k = 3
//! variants = ["RS-CF-ZF", "CF-ZF"]
//! snr_db = [0, 5, 10, 15, 20, 25, 30]
//! sigma_e2 = 0.25
//! ```
//!
//! Every physical constant defaults to the `paper-sec5` preset. Unknown keys
//! are rejected so a typo never silently falls back to a default.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, PhysicalParams, SnrNorm, Variant};
use crate::geometry::Topology;
use crate::output::Format;
use crate::precoding::PrecoderKind;
use crate::rates::{EsrScope, SinrModel};

pub const KEYS: &[&str] = &[
    "m",
    "k",
    "topology",
    "precoder",
    "rs_enabled",
    "variants",
    "sigma_e2",
    "snr_db",
    "n_channel",
    "n_error",
    "delta_grid_step",
    "seed",
    "esr_scope",
    "snr_norm",
    "sinr_model",
    "fixed_geometry",
    "zf_condition_cap",
    "max_resamples",
    "physical",
    "area_side",
    "freq_mhz",
    "h_ap",
    "h_u",
    "d0",
    "d1",
    "sigma_shadow_db",
    "t0",
    "k_b",
    "bandwidth_hz",
    "noise_figure_db",
    "output",
    "format",
];

/// A parsed, validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    /// Base configuration; `snr_db` and `sigma_e2` hold the first list entries.
    pub config: ExperimentConfig,
    pub variants: Vec<Variant>,
    pub snr_db: Vec<f64>,
    pub sigma_e2: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Parses one `key=value` override. The value is read as a TOML value when
/// possible (`snr_db=[0, 10]`, `seed=7`) and as a bare string otherwise
/// (`topology=central-bs`).
pub fn parse_override(item: &str) -> Result<(String, Value)> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override `{item}` is not of the form key=value")))?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    };
    Ok((key, value))
}

pub fn load_scenario(path: &Path, overrides: &[(String, Value)]) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text, overrides)
}

pub fn parse_scenario(text: &str, overrides: &[(String, Value)]) -> Result<Scenario> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    for (k, v) in overrides {
        table.insert(k.clone(), v.clone());
    }
    from_table(&table)
}

fn type_err(key: &str, want: &str, got: &Value) -> Error {
    Error::config(key, format!("expected {want}, got {got}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(type_err(key, "a number", v)),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(type_err(key, "a non-negative integer", v)),
    }
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_err(key, "true or false", v))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_err(key, "a string", v))
}

fn f64_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(items) => {
            let list = items.iter().map(|x| as_f64(key, x)).collect::<Result<Vec<_>>>()?;
            if list.is_empty() {
                return Err(Error::config(key, "list must not be empty"));
            }
            Ok(list)
        }
        other => Ok(vec![as_f64(key, other)?]),
    }
}

fn choice<T: serde::de::DeserializeOwned>(key: &str, v: &Value, allowed: &str) -> Result<T> {
    let s = as_str(key, v)?;
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| Error::config(key, format!("unknown value `{s}` (expected one of {allowed})")))
}

fn from_table(table: &Table) -> Result<Scenario> {
    if let Some(bad) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::config(bad.clone(), "unknown key"));
    }
    let mut cfg = ExperimentConfig::default();
    let mut snr_db = vec![cfg.snr_db];
    let mut sigma_e2 = vec![cfg.sigma_e2];
    let mut variants: Option<Vec<Variant>> = None;
    let (mut output, mut format) = (None, None);

    if let Some(v) = table.get("physical") {
        let name = as_str("physical", v)?;
        if name != PhysicalParams::PRESET_NAME {
            return Err(Error::config("physical", format!("unknown preset `{name}` (expected {})", PhysicalParams::PRESET_NAME)));
        }
    }

    for (key, v) in table {
        let key = key.as_str();
        let phys = &mut cfg.physical;
        match key {
            "m" => cfg.m = as_usize(key, v)?,
            "k" => cfg.k = as_usize(key, v)?,
            "topology" => cfg.variant.topology = choice::<Topology>(key, v, "cell-free, central-bs")?,
            "precoder" => cfg.variant.precoder = choice::<PrecoderKind>(key, v, "mf, zf")?,
            "rs_enabled" => cfg.variant.rs_enabled = as_bool(key, v)?,
            "variants" => {
                let items = v.as_array().ok_or_else(|| type_err(key, "a list of labels", v))?;
                let parsed = items
                    .iter()
                    .map(|x| as_str(key, x)?.parse::<Variant>())
                    .collect::<Result<Vec<_>>>()?;
                if parsed.is_empty() {
                    return Err(Error::config(key, "list must not be empty"));
                }
                variants = Some(parsed);
            }
            "sigma_e2" => sigma_e2 = f64_list(key, v)?,
            "snr_db" => snr_db = f64_list(key, v)?,
            "n_channel" => cfg.n_channel = as_usize(key, v)?,
            "n_error" => cfg.n_error = as_usize(key, v)?,
            "delta_grid_step" => cfg.delta_grid_step = as_f64(key, v)?,
            "seed" => {
                cfg.seed = match v {
                    Value::Integer(i) if *i >= 0 => *i as u64,
                    Value::String(s) => s.parse().map_err(|_| type_err(key, "an unsigned integer", v))?,
                    _ => return Err(type_err(key, "an unsigned integer", v)),
                }
            }
            "esr_scope" => cfg.esr_scope = choice::<EsrScope>(key, v, "min-of-means, mean-of-mins")?,
            "snr_norm" => cfg.snr_norm = choice::<SnrNorm>(key, v, "per-realization, expected-trace")?,
            "sinr_model" => cfg.sinr_model = choice::<SinrModel>(key, v, "decomposition, received-power")?,
            "fixed_geometry" => cfg.fixed_geometry = as_bool(key, v)?,
            "zf_condition_cap" => cfg.zf_condition_cap = as_f64(key, v)?,
            "max_resamples" => cfg.max_resamples = as_usize(key, v)?,
            "physical" => {}
            "area_side" => phys.area_side = as_f64(key, v)?,
            "freq_mhz" => phys.freq_mhz = as_f64(key, v)?,
            "h_ap" => phys.h_ap = as_f64(key, v)?,
            "h_u" => phys.h_u = as_f64(key, v)?,
            "d0" => phys.d0 = as_f64(key, v)?,
            "d1" => phys.d1 = as_f64(key, v)?,
            "sigma_shadow_db" => phys.sigma_shadow_db = as_f64(key, v)?,
            "t0" => phys.noise.t0 = as_f64(key, v)?,
            "k_b" => phys.noise.k_b = as_f64(key, v)?,
            "bandwidth_hz" => phys.noise.bandwidth_hz = as_f64(key, v)?,
            "noise_figure_db" => phys.noise.noise_figure_db = as_f64(key, v)?,
            "output" => output = Some(PathBuf::from(as_str(key, v)?)),
            "format" => format = Some(choice::<Format>(key, v, "csv, json")?),
            _ => unreachable!("key list checked above"),
        }
    }

    for &s in &sigma_e2 {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::config("sigma_e2", format!("must lie in [0, 1], got {s}")));
        }
    }
    for &s in &snr_db {
        if !s.is_finite() {
            return Err(Error::config("snr_db", format!("must be finite, got {s}")));
        }
    }
    cfg.snr_db = snr_db[0];
    cfg.sigma_e2 = sigma_e2[0];
    cfg.validate()?;

    let variants = variants.unwrap_or_else(|| {
        let v = cfg.variant;
        if v.rs_enabled {
            vec![v, v.paired()]
        } else {
            vec![v]
        }
    });
    Ok(Scenario {
        config: cfg,
        variants,
        snr_db,
        sigma_e2,
        output,
        format,
    })
}
