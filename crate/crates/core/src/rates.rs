//! Per-user SINRs and rates.
//!
//! The general path decomposes the received power at user `k` for either
//! decode stage into
//!
//! - `desired`: signal power seen through the channel estimate,
//! - `loss`: the error-dependent part of the intended stream's power
//!   (`a^2 (2 Re{(g_hat^T p)^* (g_err^T p)} + |g_err^T p|^2)`, may be negative),
//! - `mui`: interference through the estimate,
//! - `residual`: interference added by the CSIT error,
//! - `noise`.
//!
//! The closed-form MF and ZF expressions are kept as independent checks of
//! the general path in the unnormalized-precoder convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precoding::{PowerAllocation, PrecoderKind, PrecoderSet};
use crate::{CMatrix, CVector, Complex64};

/// Denominators are floored at this multiple of the noise power.
pub const GUARD_FACTOR: f64 = 1e-12;

/// How an SINR is formed from a [`SinrBreakdown`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SinrModel {
    /// `desired / (loss + mui + residual + noise)`.
    #[default]
    Decomposition,
    /// `(desired + loss) / (mui + residual + noise)`: the power actually
    /// received on the intended stream against everything else.
    ReceivedPower,
}

/// Where the minimum over users is taken when aggregating common rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EsrScope {
    /// `min_k E[R_ck] + sum_k E[R_k]`.
    #[default]
    MinOfMeans,
    /// `E[min_k R_ck] + sum_k E[R_k]`.
    MeanOfMins,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sinr {
    pub value: f64,
    /// The denominator hit the guard floor.
    pub guarded: bool,
}

/// `num / den` with the denominator floored at `GUARD_FACTOR * sigma_w2`.
#[inline]
pub fn guarded_ratio(num: f64, den: f64, sigma_w2: f64) -> Sinr {
    let floor = GUARD_FACTOR * sigma_w2;
    if den < floor {
        Sinr {
            value: num / floor,
            guarded: true,
        }
    } else {
        Sinr {
            value: num / den,
            guarded: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrBreakdown {
    pub desired: f64,
    pub loss: f64,
    pub mui: f64,
    pub residual: f64,
    pub noise: f64,
    /// SINR under [`SinrModel::Decomposition`].
    pub gamma: f64,
    pub guarded: bool,
}

impl SinrBreakdown {
    fn new(desired: f64, loss: f64, mui: f64, residual: f64, noise: f64) -> Self {
        let s = guarded_ratio(desired, loss + mui + residual + noise, noise);
        SinrBreakdown {
            desired,
            loss,
            mui,
            residual,
            noise,
            gamma: s.value,
            guarded: s.guarded,
        }
    }

    /// Total received power for this decode stage.
    pub fn total(&self) -> f64 {
        self.desired + self.loss + self.mui + self.residual + self.noise
    }

    pub fn sinr(&self, model: SinrModel) -> Sinr {
        match model {
            SinrModel::Decomposition => Sinr {
                value: self.gamma,
                guarded: self.guarded,
            },
            SinrModel::ReceivedPower => guarded_ratio(self.desired + self.loss, self.mui + self.residual + self.noise, self.noise),
        }
    }
}

fn check_dims(k: usize, g_hat: &CMatrix, g_err: &CMatrix, precoders: &PrecoderSet, alloc: &PowerAllocation) -> Result<()> {
    let (m, users) = g_hat.shape();
    if g_err.shape() != (m, users) {
        return Err(Error::Dimension(format!("estimate is {m}x{users}, error is {:?}", g_err.shape())));
    }
    if precoders.p_private.shape() != (m, users) || precoders.p_common.len() != m {
        return Err(Error::Dimension(format!("precoder does not match a {m}x{users} channel")));
    }
    if alloc.a_private.len() != users {
        return Err(Error::Dimension(format!("{} private amplitudes for {users} users", alloc.a_private.len())));
    }
    if k >= users {
        return Err(Error::Dimension(format!("user index {k} out of range for {users} users")));
    }
    Ok(())
}

/// `x^T y` without conjugation.
#[inline]
fn tdot(x: &CVector, y: nalgebra::DVectorView<'_, Complex64>) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// `(a^2 |est|^2, a^2 (2 Re{est^* err} + |err|^2))`.
#[inline]
fn split(a2: f64, est: Complex64, err: Complex64) -> (f64, f64) {
    (a2 * est.norm_sqr(), a2 * (2.0 * (est.conj() * err).re + err.norm_sqr()))
}

/// SINR of the common stream at user `k`, all private streams treated as
/// interference.
pub fn sinr_common_general(
    k: usize,
    g_hat: &CMatrix,
    g_err: &CMatrix,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    sigma_w2: f64,
) -> Result<SinrBreakdown> {
    check_dims(k, g_hat, g_err, precoders, alloc)?;
    let gh: CVector = g_hat.column(k).into_owned();
    let ge: CVector = g_err.column(k).into_owned();
    let pc = precoders.p_common.column(0);
    let (desired, loss) = split(alloc.a_common.powi(2), tdot(&gh, pc), tdot(&ge, pc));
    let (mut mui, mut residual) = (0.0, 0.0);
    for (i, a) in alloc.a_private.iter().enumerate() {
        let p = precoders.p_private.column(i);
        let (m, r) = split(a * a, tdot(&gh, p), tdot(&ge, p));
        mui += m;
        residual += r;
    }
    Ok(SinrBreakdown::new(desired, loss, mui, residual, sigma_w2))
}

/// SINR of user `k`'s private stream after ideal removal of the common stream.
pub fn sinr_private_general(
    k: usize,
    g_hat: &CMatrix,
    g_err: &CMatrix,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    sigma_w2: f64,
) -> Result<SinrBreakdown> {
    check_dims(k, g_hat, g_err, precoders, alloc)?;
    let gh: CVector = g_hat.column(k).into_owned();
    let ge: CVector = g_err.column(k).into_owned();
    let (mut desired, mut loss, mut mui, mut residual) = (0.0, 0.0, 0.0, 0.0);
    for (i, a) in alloc.a_private.iter().enumerate() {
        let p = precoders.p_private.column(i);
        let (e, r) = split(a * a, tdot(&gh, p), tdot(&ge, p));
        if i == k {
            desired = e;
            loss = r;
        } else {
            mui += e;
            residual += r;
        }
    }
    Ok(SinrBreakdown::new(desired, loss, mui, residual, sigma_w2))
}

fn closed_form_prelude(
    expected: PrecoderKind,
    k: usize,
    g_hat: &CMatrix,
    g_err: &CMatrix,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
) -> Result<(CVector, CVector, Complex64)> {
    if precoders.kind != expected {
        return Err(Error::Contract(format!(
            "{} closed form called with {} precoders",
            expected.short_name(),
            precoders.kind.short_name()
        )));
    }
    check_dims(k, g_hat, g_err, precoders, alloc)?;
    let gh: CVector = g_hat.column(k).into_owned();
    let ge: CVector = g_err.column(k).into_owned();
    let err_on_common = tdot(&ge, precoders.p_common.column(0));
    Ok((gh, ge, err_on_common))
}

/// Common-stream numerator and error loss written through the dominant
/// singular pair: `a_c^2 psi1^2 |u_k1|^2` and
/// `a_c^2 (2 psi1 Re{u_k1^* g_err_k^T v1} + |g_err_k^T v1|^2)`.
fn common_through_svd(precoders: &PrecoderSet, k: usize, a_c: f64, err_on_common: Complex64) -> (f64, f64) {
    let info = &precoders.side_info;
    let u = info.u_col1[k];
    let a2 = a_c * a_c;
    let num = a2 * info.psi1.powi(2) * u.norm_sqr();
    let loss = a2 * (2.0 * info.psi1 * (u.conj() * err_on_common).re + err_on_common.norm_sqr());
    (num, loss)
}

/// Closed-form common and private SINRs for matched filtering, with raw
/// columns `p_k = g_hat_k^*` and amplitudes `alloc` applied to them.
pub fn sinr_mf_closed(
    k: usize,
    g_hat: &CMatrix,
    g_err: &CMatrix,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    sigma_w2: f64,
) -> Result<(Sinr, Sinr)> {
    let (gh, ge, err_on_common) = closed_form_prelude(PrecoderKind::Mf, k, g_hat, g_err, precoders, alloc)?;
    let (num_c, loss_c) = common_through_svd(precoders, k, alloc.a_common, err_on_common);

    let g_true = &gh + &ge;
    let mut through_true = 0.0;
    let mut others = 0.0;
    for (i, a) in alloc.a_private.iter().enumerate() {
        let gi_conj = g_hat.column(i).conjugate();
        let term = a * a * tdot(&g_true, gi_conj.column(0)).norm_sqr();
        through_true += term;
        if i != k {
            others += term;
        }
    }
    let gamma_c = guarded_ratio(num_c, loss_c + through_true + sigma_w2, sigma_w2);

    let ak2 = alloc.a_private[k].powi(2);
    let norm2 = gh.norm_squared();
    let err_on_own = tdot(&ge, gh.conjugate().column(0));
    let num_p = ak2 * norm2 * norm2;
    let loss_p = ak2 * (2.0 * norm2 * err_on_own.re + err_on_own.norm_sqr());
    let gamma_p = guarded_ratio(num_p, loss_p + others + sigma_w2, sigma_w2);
    Ok((gamma_c, gamma_p))
}

/// Closed-form SINRs for zero forcing, with raw columns `G_hat^* lambda_i`
/// (so `g_hat_k^T p_i = delta_ki`) and amplitudes `alloc` applied to them.
///
/// The private stream's own error term `a_k^2 (2 Re{x_k} + |x_k|^2)`, with
/// `x_i = g_err_k^T G_hat^* lambda_i`, appears in both denominators.
pub fn sinr_zf_closed(
    k: usize,
    g_hat: &CMatrix,
    g_err: &CMatrix,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    sigma_w2: f64,
) -> Result<(Sinr, Sinr)> {
    let (_, ge, err_on_common) = closed_form_prelude(PrecoderKind::Zf, k, g_hat, g_err, precoders, alloc)?;
    let lambda = precoders
        .zf_lambda
        .as_ref()
        .ok_or_else(|| Error::Contract("zero-forcing precoder without its Gram inverse".into()))?;
    let (num_c, loss_c) = common_through_svd(precoders, k, alloc.a_common, err_on_common);

    // x^T = g_err_k^T G_hat^* Lambda
    let leak: CVector = (lambda.transpose() * g_hat.adjoint() * &ge).into_owned();
    let ak2 = alloc.a_private[k].powi(2);
    let x_k = leak[k];
    let own_loss = ak2 * (2.0 * x_k.re + x_k.norm_sqr());
    let others: f64 = alloc
        .a_private
        .iter()
        .zip(leak.iter())
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, (a, x))| a * a * x.norm_sqr())
        .sum();

    let gamma_c = guarded_ratio(num_c, loss_c + ak2 + own_loss + others + sigma_w2, sigma_w2);
    let gamma_p = guarded_ratio(ak2, own_loss + others + sigma_w2, sigma_w2);
    Ok((gamma_c, gamma_p))
}

/// Gaussian-signalling rate `log2(1 + gamma)` in bit/s/Hz.
pub fn rate(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::config("gamma", format!("SINR must be non-negative, got {gamma}")));
    }
    Ok(gamma.ln_1p() / std::f64::consts::LN_2)
}

/// Per-user common and private rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserRates {
    pub common: Vec<f64>,
    pub private: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageRates {
    pub rates: UserRates,
    pub guarded: usize,
}

/// Rates averaged over CSIT-error draws for one channel estimate.
pub fn average_rates(
    g_hat: &CMatrix,
    error_samples: &[CMatrix],
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    sigma_w2: f64,
    model: SinrModel,
) -> Result<AverageRates> {
    if error_samples.is_empty() {
        return Err(Error::Empty("error samples"));
    }
    let users = g_hat.ncols();
    let mut common = vec![0.0; users];
    let mut private = vec![0.0; users];
    let mut guarded = 0;
    for g_err in error_samples {
        for k in 0..users {
            let c = sinr_common_general(k, g_hat, g_err, precoders, alloc, sigma_w2)?.sinr(model);
            let p = sinr_private_general(k, g_hat, g_err, precoders, alloc, sigma_w2)?.sinr(model);
            guarded += usize::from(c.guarded) + usize::from(p.guarded);
            common[k] += rate(c.value)?;
            private[k] += rate(p.value)?;
        }
    }
    let n = error_samples.len() as f64;
    common.iter_mut().chain(private.iter_mut()).for_each(|r| *r /= n);
    Ok(AverageRates {
        rates: UserRates { common, private },
        guarded,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Mean common rate of each user over realizations.
    pub common_rates: Vec<f64>,
    /// Mean private rate of each user over realizations.
    pub private_rates: Vec<f64>,
    pub min_common_rate: f64,
    /// User with the smallest mean common rate.
    pub argmin_user: usize,
    pub sum_rate: f64,
    pub scope: EsrScope,
}

/// Ergodic sum rate over realizations.
pub fn ergodic_sum_rate(per_realization: &[UserRates], scope: EsrScope) -> Result<RateReport> {
    let first = per_realization.first().ok_or(Error::Empty("realizations"))?;
    let users = first.common.len();
    if users == 0 {
        return Err(Error::Empty("users"));
    }
    let n = per_realization.len() as f64;
    let mut common_rates = vec![0.0; users];
    let mut private_rates = vec![0.0; users];
    let mut sum_of_mins = 0.0;
    for r in per_realization {
        if r.common.len() != users || r.private.len() != users {
            return Err(Error::Dimension("realizations disagree on the number of users".into()));
        }
        for k in 0..users {
            common_rates[k] += r.common[k];
            private_rates[k] += r.private[k];
        }
        sum_of_mins += r.common.iter().copied().fold(f64::INFINITY, f64::min);
    }
    common_rates.iter_mut().chain(private_rates.iter_mut()).for_each(|v| *v /= n);
    let (argmin_user, min_of_means) = common_rates
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (k, v)| if v < best.1 { (k, v) } else { best });
    let min_common_rate = match scope {
        EsrScope::MinOfMeans => min_of_means,
        EsrScope::MeanOfMins => sum_of_mins / n,
    };
    let sum_rate = min_common_rate + private_rates.iter().sum::<f64>();
    Ok(RateReport {
        common_rates,
        private_rates,
        min_common_rate,
        argmin_user,
        sum_rate,
        scope,
    })
}
