//! Private precoders (matched filter, zero forcing), the SVD-based common
//! precoder, and the common/private power split.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, Complex64};

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITER: usize = 10_000;

/// Default cap on the condition number of `G_hat^T G_hat^*` for zero forcing.
pub const DEFAULT_ZF_CONDITION_CAP: f64 = 1e8;

/// Full SVD `A = U diag(psi) V^H` with unitary `U` (rows x rows) and `V`
/// (cols x cols). Singular values are sorted in descending order.
#[derive(Clone, Debug)]
pub struct ComplexSvd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl ComplexSvd {
    pub fn reconstruct(&self) -> CMatrix {
        let (rows, cols) = (self.u.nrows(), self.v.nrows());
        let mut psi = CMatrix::zeros(rows, cols);
        for (i, &s) in self.singular_values.iter().enumerate() {
            psi[(i, i)] = Complex64::new(s, 0.0);
        }
        &self.u * psi * self.v.adjoint()
    }
}

/// Extends orthonormal columns to a full unitary basis of their ambient space.
fn complete_unitary(basis: &CMatrix) -> CMatrix {
    let n = basis.nrows();
    let r = basis.ncols();
    if r >= n {
        return basis.columns(0, n).into_owned();
    }
    let mut out = CMatrix::zeros(n, n);
    out.columns_mut(0, r).copy_from(basis);
    let mut filled = r;
    // Gram-Schmidt over the canonical vectors, twice for numerical safety.
    for j in 0..n {
        if filled == n {
            break;
        }
        let mut cand = CVector::zeros(n);
        cand[j] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in 0..filled {
                let col = out.column(c);
                let proj = col.dotc(&cand);
                cand -= col * proj;
            }
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            out.column_mut(filled).copy_from(&(cand / Complex64::new(norm, 0.0)));
            filled += 1;
        }
    }
    out
}

pub fn complex_svd(a: &CMatrix) -> Result<ComplexSvd> {
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let (rows, cols) = a.shape();
    let svd = a.clone().try_svd(true, true, SVD_EPS, SVD_MAX_ITER).ok_or(Error::SvdFailed)?;
    let u_thin = svd.u.ok_or(Error::SvdFailed)?;
    let v_thin = svd.v_t.ok_or(Error::SvdFailed)?.adjoint();
    let psi = svd.singular_values;

    let mut order: Vec<usize> = (0..psi.len()).collect();
    order.sort_by(|&i, &j| psi[j].total_cmp(&psi[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| psi[i]).collect();
    let u_sorted = CMatrix::from_fn(rows, order.len(), |r, c| u_thin[(r, order[c])]);
    let v_sorted = CMatrix::from_fn(cols, order.len(), |r, c| v_thin[(r, order[c])]);

    Ok(ComplexSvd {
        u: complete_unitary(&u_sorted),
        singular_values,
        v: complete_unitary(&v_sorted),
    })
}

/// Dominant singular triplet of `G_hat^T`, used by the closed-form SINRs.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdSideInfo {
    /// Largest singular value of `G_hat^T`.
    pub psi1: f64,
    /// First column of `U`; entry `k` satisfies `g_hat_k^T v_1 = u_{k,1} psi1`.
    pub u_col1: CVector,
    /// The largest singular value is (numerically) repeated.
    pub tie: bool,
}

/// Common precoder `v_1`, the dominant right singular vector of `G_hat^T`.
///
/// The phase is fixed so that the largest-magnitude entry of `u_{*,1}` is
/// real and positive.
pub fn common_precoder(g_hat: &CMatrix) -> Result<(CVector, SvdSideInfo)> {
    if g_hat.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::ZeroChannel);
    }
    let svd = complex_svd(&g_hat.transpose())?;
    let psi1 = svd.singular_values[0];
    let mut u1: CVector = svd.u.column(0).into_owned();
    let mut v1: CVector = svd.v.column(0).into_owned();

    let pivot = u1.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map(|(i, _)| i).unwrap_or(0);
    let anchor = u1[pivot];
    if anchor.norm() > 0.0 {
        let rot = anchor.conj() / anchor.norm();
        u1 *= rot;
        v1 *= rot;
    }
    let tie = svd.singular_values.get(1).is_some_and(|&psi2| psi2 >= psi1 * (1.0 - 1e-12));
    Ok((v1, SvdSideInfo { psi1, u_col1: u1, tie }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    Mf,
    Zf,
}

impl PrecoderKind {
    pub fn short_name(self) -> &'static str {
        match self {
            PrecoderKind::Mf => "MF",
            PrecoderKind::Zf => "ZF",
        }
    }
}

/// Common precoder plus `K` private columns.
#[derive(Clone, Debug)]
pub struct PrecoderSet {
    pub p_common: CVector,
    /// `M x K`, column `k` serves user `k`.
    pub p_private: CMatrix,
    pub kind: PrecoderKind,
    /// Norms of the private columns before unit normalization.
    pub raw_column_norms: Vec<f64>,
    /// `(G_hat^T G_hat^*)^{-1}`, present for zero forcing only.
    pub zf_lambda: Option<CMatrix>,
    pub side_info: SvdSideInfo,
    /// Whether `p_private` holds unit-norm columns.
    pub normalized: bool,
}

impl PrecoderSet {
    pub fn num_users(&self) -> usize {
        self.p_private.ncols()
    }

    pub fn num_aps(&self) -> usize {
        self.p_private.nrows()
    }

    /// The same precoder with the raw MF/ZF columns restored.
    pub fn unnormalized(&self) -> PrecoderSet {
        let mut out = self.clone();
        if self.normalized {
            for (k, &norm) in self.raw_column_norms.iter().enumerate() {
                let mut col = out.p_private.column_mut(k);
                col *= Complex64::new(norm, 0.0);
            }
            out.normalized = false;
        }
        out
    }

    fn from_raw_columns(raw: CMatrix, kind: PrecoderKind, zf_lambda: Option<CMatrix>, p_common: CVector, side_info: SvdSideInfo) -> Self {
        let raw_column_norms: Vec<f64> = raw.column_iter().map(|c| c.norm()).collect();
        let mut p_private = raw;
        for (k, &norm) in raw_column_norms.iter().enumerate() {
            let mut col = p_private.column_mut(k);
            col /= Complex64::new(norm, 0.0);
        }
        PrecoderSet {
            p_common,
            p_private,
            kind,
            raw_column_norms,
            zf_lambda,
            side_info,
            normalized: true,
        }
    }
}

fn check_columns(g_hat: &CMatrix) -> Result<()> {
    for (k, col) in g_hat.column_iter().enumerate() {
        if col.norm_squared() == 0.0 {
            return Err(Error::DegenerateUser { user: k });
        }
    }
    Ok(())
}

/// Matched filter: private columns `g_hat_k^*`, stored unit-norm.
pub fn mf_precoder(g_hat: &CMatrix) -> Result<PrecoderSet> {
    check_columns(g_hat)?;
    let (p_common, side_info) = common_precoder(g_hat)?;
    Ok(PrecoderSet::from_raw_columns(g_hat.conjugate(), PrecoderKind::Mf, None, p_common, side_info))
}

/// Zero forcing: `P = G_hat^* (G_hat^T G_hat^*)^{-1}`, stored unit-norm.
///
/// Fails with [`Error::SingularChannel`] when the Gram matrix is rank
/// deficient or its condition number exceeds `max_condition`.
pub fn zf_precoder(g_hat: &CMatrix, max_condition: f64) -> Result<PrecoderSet> {
    check_columns(g_hat)?;
    let (m, k) = g_hat.shape();
    if m < k {
        return Err(Error::SingularChannel { condition: f64::INFINITY });
    }
    let (p_common, side_info) = common_precoder(g_hat)?;
    let psi = complex_svd(g_hat)?.singular_values;
    let (smax, smin) = (psi[0], psi[k - 1]);
    let condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::SingularChannel { condition });
    }
    let g_conj = g_hat.conjugate();
    let gram = g_hat.transpose() * &g_conj;
    let lambda = gram
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::SingularChannel { condition })?;
    let raw = &g_conj * &lambda;
    Ok(PrecoderSet::from_raw_columns(raw, PrecoderKind::Zf, Some(lambda), p_common, side_info))
}

pub fn build_precoders(kind: PrecoderKind, g_hat: &CMatrix, zf_condition_cap: f64) -> Result<PrecoderSet> {
    match kind {
        PrecoderKind::Mf => mf_precoder(g_hat),
        PrecoderKind::Zf => zf_precoder(g_hat, zf_condition_cap),
    }
}

/// Total power `p_t` split into `delta p_t` for the common stream and equal
/// shares of the remainder for the `K` private streams.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerAllocation {
    pub p_t: f64,
    pub delta: f64,
    pub a_common: f64,
    pub a_private: Vec<f64>,
}

impl PowerAllocation {
    /// Amplitudes that give the same transmitted signal when the precoder
    /// columns are left unnormalized with the given raw norms.
    pub fn for_raw_columns(&self, raw_column_norms: &[f64]) -> PowerAllocation {
        PowerAllocation {
            a_private: self.a_private.iter().zip(raw_column_norms).map(|(a, n)| a / n).collect(),
            ..self.clone()
        }
    }
}

pub fn allocate_power(p_t: f64, delta: f64, k: usize) -> Result<PowerAllocation> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::config("delta", format!("must lie in [0, 1], got {delta}")));
    }
    if !(p_t >= 0.0 && p_t.is_finite()) {
        return Err(Error::config("p_t", format!("must be non-negative, got {p_t}")));
    }
    if k == 0 {
        return Err(Error::config("k", "at least one user is required"));
    }
    let private = ((1.0 - delta) * p_t / k as f64).sqrt();
    Ok(PowerAllocation {
        p_t,
        delta,
        a_common: (delta * p_t).sqrt(),
        a_private: vec![private; k],
    })
}

/// `a_c^2 ||p_c||^2 + sum_k a_k^2 ||p_k||^2` for the stored columns.
pub fn effective_tx_power(precoders: &PrecoderSet, alloc: &PowerAllocation) -> f64 {
    let common = alloc.a_common.powi(2) * precoders.p_common.norm_squared();
    let private: f64 = precoders
        .p_private
        .column_iter()
        .zip(&alloc.a_private)
        .map(|(col, a)| a * a * col.norm_squared())
        .sum();
    common + private
}

/// Largest `|(A^T P)_{ij} - I_{ij}|`, the zero-forcing residual.
pub fn zf_residual(g_hat: &CMatrix, raw_private: &CMatrix) -> f64 {
    let prod = g_hat.transpose() * raw_private;
    let eye: DMatrix<Complex64> = DMatrix::identity(prod.nrows(), prod.ncols());
    (prod - eye).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
