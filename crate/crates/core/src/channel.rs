//! Large-scale fading (three-slope path loss with log-normal shadowing),
//! small-scale fading with a statistical CSIT error, receiver noise, and the
//! SNR to transmit-power conversion.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceMatrix, Topology};
use crate::rng::complex_normal_matrix;
use crate::CMatrix;

/// Power ratio in dB to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Attenuation constant `L` (dB) of the three-slope model, for carrier `f_mhz`
/// and antenna heights in metres.
pub fn attenuation_constant(f_mhz: f64, h_ap: f64, h_u: f64) -> Result<f64> {
    for (key, v) in [("freq_mhz", f_mhz), ("h_ap", h_ap), ("h_u", h_u)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::config(key, format!("must be positive, got {v}")));
        }
    }
    let lf = f_mhz.log10();
    Ok(46.3 + 33.9 * lf - 13.82 * h_ap.log10() - (1.1 * lf - 0.7) * h_u + (1.56 * lf - 0.8))
}

/// Three-slope path loss in dB (a negative gain). The middle slope covers
/// `d0 < d <= d1`; at or below `d0` the loss is flat.
pub fn path_loss_db(d: f64, l: f64, d0: f64, d1: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::config("distance", format!("must be non-negative, got {d}")));
    }
    if !(d0 > 0.0 && d0 < d1) {
        return Err(Error::config("d0", format!("breakpoints must satisfy 0 < d0 < d1, got d0={d0}, d1={d1}")));
    }
    Ok(if d > d1 {
        -l - 35.0 * d.log10()
    } else if d > d0 {
        -l - 15.0 * d1.log10() - 20.0 * d.log10()
    } else {
        -l - 15.0 * d1.log10() - 20.0 * d0.log10()
    })
}

/// Propagation constants for [`large_scale_coefficients`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossModel {
    pub l_db: f64,
    pub d0: f64,
    pub d1: f64,
    pub sigma_shadow_db: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LargeScaleFading {
    /// Linear power gains, `M x K`.
    pub zeta: DMatrix<f64>,
    pub path_loss_db: DMatrix<f64>,
    pub shadow_db: DMatrix<f64>,
}

impl LargeScaleFading {
    pub fn num_aps(&self) -> usize {
        self.zeta.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.zeta.ncols()
    }

    /// `sum_{m,k} zeta_{m,k}`, the expected value of `Tr(G^T G^*)`.
    pub fn expected_trace(&self) -> f64 {
        self.zeta.sum()
    }
}

/// Path loss plus shadowing, one standard-normal draw per entry. For a
/// colocated array one shadowing draw per user is shared by all rows.
pub fn large_scale_coefficients<R: Rng + ?Sized>(
    dist: &DistanceMatrix,
    model: &PathLossModel,
    rng: &mut R,
) -> Result<LargeScaleFading> {
    let (m, k) = (dist.num_aps(), dist.num_users());
    let mut path_loss = DMatrix::zeros(m, k);
    for (out, &d) in path_loss.iter_mut().zip(dist.d.iter()) {
        *out = path_loss_db(d, model.l_db, model.d0, model.d1)?;
    }
    let shadow_db = match dist.topology {
        Topology::CellFree => {
            let z: Vec<f64> = (0..m * k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            DMatrix::from_vec(m, k, z) * model.sigma_shadow_db
        }
        Topology::CentralBs => {
            let z: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            DMatrix::from_fn(m, k, |_, col| model.sigma_shadow_db * z[col])
        }
    };
    let zeta = path_loss.zip_map(&shadow_db, |p, s| db_to_linear(p + s));
    Ok(LargeScaleFading {
        zeta,
        path_loss_db: path_loss,
        shadow_db,
    })
}

/// One draw of the channel estimate and its error.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub g_hat: CMatrix,
    pub g_err: CMatrix,
    pub sigma_e2: f64,
}

impl ChannelRealization {
    /// `G = G_hat + G_err`.
    pub fn true_channel(&self) -> CMatrix {
        &self.g_hat + &self.g_err
    }
}

fn check_error_variance(sigma_e2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&sigma_e2) {
        return Err(Error::config("sigma_e2", format!("must lie in [0, 1], got {sigma_e2}")));
    }
    Ok(())
}

fn scaled_gaussian<R: Rng + ?Sized>(lsf: &LargeScaleFading, fraction: f64, rng: &mut R) -> CMatrix {
    let mut h = complex_normal_matrix(rng, lsf.num_aps(), lsf.num_users());
    for (entry, &zeta) in h.iter_mut().zip(lsf.zeta.iter()) {
        *entry *= (fraction * zeta).sqrt();
    }
    h
}

/// Channel estimate with entries `CN(0, (1 - sigma_e2) zeta)`.
///
/// The unit-variance draws do not depend on `sigma_e2`, so two runs that only
/// differ in the error variance see the same underlying fading.
pub fn sample_estimate<R: Rng + ?Sized>(lsf: &LargeScaleFading, sigma_e2: f64, rng: &mut R) -> Result<CMatrix> {
    check_error_variance(sigma_e2)?;
    Ok(scaled_gaussian(lsf, 1.0 - sigma_e2, rng))
}

/// CSIT error with entries `CN(0, sigma_e2 zeta)`.
pub fn sample_error<R: Rng + ?Sized>(lsf: &LargeScaleFading, sigma_e2: f64, rng: &mut R) -> Result<CMatrix> {
    check_error_variance(sigma_e2)?;
    Ok(scaled_gaussian(lsf, sigma_e2, rng))
}

/// Draws estimate and error independently from a single stream.
pub fn sample_channel<R: Rng + ?Sized>(lsf: &LargeScaleFading, sigma_e2: f64, rng: &mut R) -> Result<ChannelRealization> {
    let g_hat = sample_estimate(lsf, sigma_e2, rng)?;
    let g_err = sample_error(lsf, sigma_e2, rng)?;
    Ok(ChannelRealization { g_hat, g_err, sigma_e2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Noise temperature (K).
    pub t0: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
}

impl NoiseModel {
    pub fn sigma_w2(&self) -> f64 {
        noise_variance(self.t0, self.k_b, self.bandwidth_hz, self.noise_figure_db)
    }
}

pub fn noise_variance(t0: f64, k_b: f64, bandwidth_hz: f64, nf_db: f64) -> f64 {
    t0 * k_b * bandwidth_hz * db_to_linear(nf_db)
}

/// `Tr(G^T G^*)`, the total channel power gain.
pub fn channel_trace(g: &CMatrix) -> f64 {
    g.iter().map(|z| z.norm_sqr()).sum()
}

/// Transmit power that yields `snr_linear = P_t Tr(G^T G^*) / (M K sigma_w2)`.
pub fn transmit_power_for_snr(snr_linear: f64, g: &CMatrix, sigma_w2: f64) -> Result<f64> {
    power_for_trace(snr_linear, channel_trace(g), g.nrows(), g.ncols(), sigma_w2)
}

/// Same as [`transmit_power_for_snr`] with the trace already known.
pub fn power_for_trace(snr_linear: f64, trace: f64, m: usize, k: usize, sigma_w2: f64) -> Result<f64> {
    if !(snr_linear >= 0.0) {
        return Err(Error::config("snr", format!("must be non-negative, got {snr_linear}")));
    }
    if !(trace > 0.0) {
        return Err(Error::ZeroChannel);
    }
    Ok(snr_linear * (m * k) as f64 * sigma_w2 / trace)
}

/// Realized SNR for a given transmit power; inverse of [`transmit_power_for_snr`].
pub fn snr_for_power(p_t: f64, g: &CMatrix, sigma_w2: f64) -> f64 {
    p_t * channel_trace(g) / ((g.nrows() * g.ncols()) as f64 * sigma_w2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distances, NetworkLayout, Point};
    use crate::rng::{stream, Purpose};
    use crate::Complex64;

    const L_1900: f64 = 140.71508370390842;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    fn single_distance(d: f64, topology: Topology) -> DistanceMatrix {
        DistanceMatrix {
            d: DMatrix::from_element(1, 1, d),
            topology,
        }
    }

    #[test]
    fn attenuation_examples() {
        assert!(close(attenuation_constant(1900.0, 15.0, 1.65).unwrap(), L_1900, 1e-13));
        // Unit frequency and AP height: only the height-dependent constants remain.
        assert!(close(attenuation_constant(1.0, 1.0, 1.65).unwrap(), 46.3 + 0.7 * 1.65 - 0.8, 1e-13));
        assert!(close(attenuation_constant(900.0, 15.0, 1.65).unwrap(), 129.79690802993656, 1e-13));
        assert!(attenuation_constant(1900.0, 15.0, 1.65).unwrap() > attenuation_constant(900.0, 15.0, 1.65).unwrap());
        assert!(attenuation_constant(0.0, 15.0, 1.65).is_err());
        assert!(attenuation_constant(1900.0, -1.0, 1.65).is_err());
        assert!(attenuation_constant(1900.0, 15.0, 0.0).is_err());
    }

    #[test]
    fn path_loss_branches() {
        let l = L_1900;
        assert!(close(path_loss_db(100.0, l, 10.0, 50.0).unwrap(), -l - 70.0, 1e-14));
        assert!(close(path_loss_db(5.0, l, 10.0, 50.0).unwrap(), -186.1996337689487, 1e-14));
        // d = d0 falls in the flat branch.
        assert_eq!(path_loss_db(10.0, l, 10.0, 50.0).unwrap(), path_loss_db(0.0, l, 10.0, 50.0).unwrap());
        let at_d1 = path_loss_db(50.0, l, 10.0, 50.0).unwrap();
        assert!(close(at_d1, -l - 35.0 * 50f64.log10(), 1e-14));
        assert!(path_loss_db(-1.0, l, 10.0, 50.0).is_err());
        assert!(path_loss_db(1.0, l, 50.0, 10.0).is_err());
    }

    #[test]
    fn zero_shadowing_is_deterministic() {
        let model = PathLossModel {
            l_db: L_1900,
            d0: 10.0,
            d1: 50.0,
            sigma_shadow_db: 0.0,
        };
        let lsf = large_scale_coefficients(&single_distance(100.0, Topology::CellFree), &model, &mut stream(1, Purpose::Shadowing, 0, 0)).unwrap();
        assert!(close(lsf.zeta[(0, 0)], 8.481870347305216e-22, 1e-12));
        assert_eq!(lsf.shadow_db[(0, 0)], 0.0);
    }

    #[test]
    fn shadowing_standard_deviation() {
        let model = PathLossModel {
            l_db: L_1900,
            d0: 10.0,
            d1: 50.0,
            sigma_shadow_db: 8.0,
        };
        let dist = DistanceMatrix {
            d: DMatrix::from_element(100, 1000, 100.0),
            topology: Topology::CellFree,
        };
        let lsf = large_scale_coefficients(&dist, &model, &mut stream(2, Purpose::Shadowing, 0, 0)).unwrap();
        let n = lsf.shadow_db.len() as f64;
        let mean = lsf.shadow_db.sum() / n;
        let var = lsf.shadow_db.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(close(var.sqrt(), 8.0, 0.02), "{}", var.sqrt());
        for ((z, p), s) in lsf.zeta.iter().zip(lsf.path_loss_db.iter()).zip(lsf.shadow_db.iter()) {
            assert!(*z > 0.0);
            assert!(close(*z, db_to_linear(p + s), 1e-15));
        }
    }

    #[test]
    fn central_bs_rows_are_identical() {
        let layout = NetworkLayout {
            ap_positions: vec![Point::new(300.0, 300.0); 4],
            ue_positions: vec![Point::new(10.0, 20.0), Point::new(500.0, 100.0), Point::new(300.0, 320.0)],
            area_side: 600.0,
            h_ap: 15.0,
            h_u: 1.65,
            topology: Topology::CentralBs,
        };
        let model = PathLossModel {
            l_db: L_1900,
            d0: 10.0,
            d1: 50.0,
            sigma_shadow_db: 8.0,
        };
        let lsf = large_scale_coefficients(&distances(&layout), &model, &mut stream(3, Purpose::Shadowing, 0, 0)).unwrap();
        for m in 1..4 {
            assert_eq!(lsf.zeta.row(m), lsf.zeta.row(0));
        }
    }

    fn unit_lsf(m: usize, k: usize) -> LargeScaleFading {
        LargeScaleFading {
            zeta: DMatrix::from_element(m, k, 1.0),
            path_loss_db: DMatrix::zeros(m, k),
            shadow_db: DMatrix::zeros(m, k),
        }
    }

    #[test]
    fn csit_limits_are_exact() {
        let lsf = unit_lsf(6, 3);
        let perfect = sample_channel(&lsf, 0.0, &mut stream(4, Purpose::Fading, 0, 0)).unwrap();
        assert!(perfect.g_err.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert_eq!(perfect.true_channel(), perfect.g_hat);
        let blind = sample_channel(&lsf, 1.0, &mut stream(4, Purpose::Fading, 0, 0)).unwrap();
        assert!(blind.g_hat.iter().all(|z| z.norm() == 0.0));
        assert!(sample_channel(&lsf, 1.5, &mut stream(4, Purpose::Fading, 0, 0)).is_err());
        assert!(sample_channel(&lsf, -0.1, &mut stream(4, Purpose::Fading, 0, 0)).is_err());
    }

    #[test]
    fn estimate_and_error_variances() {
        let lsf = unit_lsf(100, 1000);
        let ch = sample_channel(&lsf, 0.25, &mut stream(5, Purpose::Fading, 0, 0)).unwrap();
        let n = ch.g_hat.len() as f64;
        let var_hat = ch.g_hat.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        let var_err = ch.g_err.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!(close(var_hat, 0.75, 0.03), "{var_hat}");
        assert!(close(var_err, 0.25, 0.03), "{var_err}");
    }

    #[test]
    fn noise_examples() {
        assert!(close(noise_variance(290.0, 1.381e-23, 20e6, 9.0), 6.36241029449455e-13, 1e-12));
        assert!(close(noise_variance(290.0, 1.381e-23, 20e6, 0.0), 8.0098e-14, 1e-12));
        assert!(close(noise_variance(290.0, 1.381e-23, 40e6, 9.0), 2.0 * noise_variance(290.0, 1.381e-23, 20e6, 9.0), 1e-15));
    }

    #[test]
    fn snr_power_conversion() {
        let sigma_w2 = 6.36e-13;
        let unit = CMatrix::from_element(6, 3, Complex64::new(1.0, 0.0));
        assert!(close(transmit_power_for_snr(100.0, &unit, sigma_w2).unwrap(), 100.0 * sigma_w2, 1e-15));
        assert_eq!(transmit_power_for_snr(0.0, &unit, sigma_w2).unwrap(), 0.0);
        let lsf = unit_lsf(6, 3);
        let g = sample_channel(&lsf, 0.2, &mut stream(6, Purpose::Fading, 0, 0)).unwrap().true_channel();
        let p_t = transmit_power_for_snr(316.2, &g, sigma_w2).unwrap();
        assert!(close(snr_for_power(p_t, &g, sigma_w2), 316.2, 1e-12));
        assert!(matches!(transmit_power_for_snr(1.0, &CMatrix::zeros(6, 3), sigma_w2), Err(Error::ZeroChannel)));
        assert!(transmit_power_for_snr(-1.0, &unit, sigma_w2).is_err());
    }
}
