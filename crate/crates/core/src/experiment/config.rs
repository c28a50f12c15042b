use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{attenuation_constant, db_to_linear, NoiseModel, PathLossModel};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::precoding::{PrecoderKind, DEFAULT_ZF_CONDITION_CAP};
use crate::rates::{EsrScope, SinrModel};

/// How the transmit power is tied to the target SNR.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrNorm {
    /// `Tr(G^T G^*)` of the true channel of each trial.
    #[default]
    PerRealization,
    /// `sum zeta`, the expected trace given the large-scale fading.
    ExpectedTrace,
}

/// One system under comparison, e.g. `RS-CF-ZF` or `BS-MF`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub topology: Topology,
    pub precoder: PrecoderKind,
    pub rs_enabled: bool,
}

impl Variant {
    pub fn new(topology: Topology, precoder: PrecoderKind, rs_enabled: bool) -> Self {
        Variant {
            topology,
            precoder,
            rs_enabled,
        }
    }

    /// The same system with the other rate-splitting setting.
    pub fn paired(self) -> Self {
        Variant {
            rs_enabled: !self.rs_enabled,
            ..self
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rs_enabled {
            f.write_str("RS-")?;
        }
        write!(f, "{}-{}", self.topology.short_name(), self.precoder.short_name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let (rs_enabled, rest) = match upper.strip_prefix("RS-") {
            Some(rest) => (true, rest),
            None => (false, upper.as_str()),
        };
        let bad = || Error::config("variants", format!("unknown variant `{s}` (expected e.g. RS-CF-ZF, CF-MF, RS-BS-ZF)"));
        let (topo, prec) = rest.split_once('-').ok_or_else(bad)?;
        let topology = match topo {
            "CF" => Topology::CellFree,
            "BS" => Topology::CentralBs,
            _ => return Err(bad()),
        };
        let precoder = match prec {
            "MF" => PrecoderKind::Mf,
            "ZF" => PrecoderKind::Zf,
            _ => return Err(bad()),
        };
        Ok(Variant::new(topology, precoder, rs_enabled))
    }
}

/// Physical constants of the propagation and noise model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub area_side: f64,
    pub freq_mhz: f64,
    pub h_ap: f64,
    pub h_u: f64,
    pub d0: f64,
    pub d1: f64,
    pub sigma_shadow_db: f64,
    pub noise: NoiseModel,
}

impl PhysicalParams {
    pub const PRESET_NAME: &'static str = "paper-sec5";

    /// 600 m square, 1.9 GHz, 15 m / 1.65 m antennas, 10 m / 50 m
    /// breakpoints, 8 dB shadowing, 290 K, 20 MHz, 9 dB noise figure.
    pub fn paper_sec5() -> Self {
        PhysicalParams {
            area_side: 600.0,
            freq_mhz: 1900.0,
            h_ap: 15.0,
            h_u: 1.65,
            d0: 10.0,
            d1: 50.0,
            sigma_shadow_db: 8.0,
            noise: NoiseModel {
                t0: 290.0,
                k_b: 1.381e-23,
                bandwidth_hz: 20e6,
                noise_figure_db: 9.0,
            },
        }
    }

    pub fn path_loss_model(&self) -> Result<PathLossModel> {
        Ok(PathLossModel {
            l_db: attenuation_constant(self.freq_mhz, self.h_ap, self.h_u)?,
            d0: self.d0,
            d1: self.d1,
            sigma_shadow_db: self.sigma_shadow_db,
        })
    }

    pub fn sigma_w2(&self) -> f64 {
        self.noise.sigma_w2()
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::paper_sec5()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub k: usize,
    pub variant: Variant,
    pub sigma_e2: f64,
    pub snr_db: f64,
    pub n_channel: usize,
    pub n_error: usize,
    pub delta_grid_step: f64,
    pub seed: u64,
    pub esr_scope: EsrScope,
    pub snr_norm: SnrNorm,
    pub sinr_model: SinrModel,
    /// Reuse realization 0's layout and shadowing for every realization.
    pub fixed_geometry: bool,
    pub zf_condition_cap: f64,
    /// Fresh small-scale draws allowed per realization when precoder
    /// construction fails.
    pub max_resamples: usize,
    pub physical: PhysicalParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: 6,
            k: 3,
            variant: Variant::new(Topology::CellFree, PrecoderKind::Zf, true),
            sigma_e2: 0.25,
            snr_db: 20.0,
            n_channel: 100,
            n_error: 100,
            delta_grid_step: 0.001,
            seed: 1,
            esr_scope: EsrScope::MinOfMeans,
            snr_norm: SnrNorm::PerRealization,
            sinr_model: SinrModel::Decomposition,
            fixed_geometry: false,
            zf_condition_cap: DEFAULT_ZF_CONDITION_CAP,
            max_resamples: 100,
            physical: PhysicalParams::paper_sec5(),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::config("m", "at least one AP is required"));
        }
        if self.k == 0 {
            return Err(Error::config("k", "at least one user is required"));
        }
        if self.m <= self.k {
            return Err(Error::config("m", format!("must exceed k (under-loaded regime), got m={} k={}", self.m, self.k)));
        }
        if !(0.0..=1.0).contains(&self.sigma_e2) {
            return Err(Error::config("sigma_e2", format!("must lie in [0, 1], got {}", self.sigma_e2)));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::config("snr_db", "must be finite"));
        }
        if self.n_channel == 0 {
            return Err(Error::config("n_channel", "must be at least 1"));
        }
        if self.n_error == 0 {
            return Err(Error::config("n_error", "must be at least 1"));
        }
        if !(self.delta_grid_step > 0.0 && self.delta_grid_step <= 1.0) {
            return Err(Error::config("delta_grid_step", format!("must lie in (0, 1], got {}", self.delta_grid_step)));
        }
        if u32::try_from(self.n_channel).is_err() || u32::try_from(self.n_error).is_err() {
            return Err(Error::config("n_channel", "trial counts must fit in 32 bits"));
        }
        if !(self.zf_condition_cap >= 1.0) {
            return Err(Error::config("zf_condition_cap", format!("must be at least 1, got {}", self.zf_condition_cap)));
        }
        let p = &self.physical;
        positive("area_side", p.area_side)?;
        positive("freq_mhz", p.freq_mhz)?;
        positive("h_ap", p.h_ap)?;
        positive("h_u", p.h_u)?;
        positive("d0", p.d0)?;
        positive("d1", p.d1)?;
        if p.d0 >= p.d1 {
            return Err(Error::config("d1", format!("must exceed d0, got d0={} d1={}", p.d0, p.d1)));
        }
        if !(p.sigma_shadow_db >= 0.0 && p.sigma_shadow_db.is_finite()) {
            return Err(Error::config("sigma_shadow_db", format!("must be non-negative, got {}", p.sigma_shadow_db)));
        }
        positive("t0", p.noise.t0)?;
        positive("k_b", p.noise.k_b)?;
        positive("bandwidth_hz", p.noise.bandwidth_hz)?;
        if !p.noise.noise_figure_db.is_finite() {
            return Err(Error::config("noise_figure_db", "must be finite"));
        }
        Ok(())
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    pub fn with_variant(&self, variant: Variant) -> ExperimentConfig {
        ExperimentConfig {
            variant,
            ..self.clone()
        }
    }

    /// Short content hash of the configuration, for provenance.
    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
