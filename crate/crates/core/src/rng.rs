//! Counter-derived random streams.
//!
//! Every random quantity in a run is drawn from a stream addressed by
//! `(seed, purpose, a, b)`. The seed and purpose form the ChaCha key, the two
//! indices form the stream id, so draws never depend on execution order or
//! on how many workers share the trial loop.

use nalgebra::DMatrix;
use crate::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// What a stream is used for. Distinct purposes never share key material.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Layout = 0x4c41_594f_5554,
    Shadowing = 0x5348_4144_4f57,
    Fading = 0x4641_4449_4e47,
    Error = 0x0045_5252_4f52,
}

pub fn stream(seed: u64, purpose: Purpose, a: u32, b: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((u64::from(a) << 32) | u64::from(b));
    rng
}

/// One draw of CN(0, 1).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. CN(0, 1) entries, filled column-major.
pub fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    DMatrix::from_vec(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let first = |seed, purpose, a, b| stream(seed, purpose, a, b).next_u64();
        assert_eq!(first(7, Purpose::Fading, 3, 1), first(7, Purpose::Fading, 3, 1));
        assert_ne!(first(7, Purpose::Fading, 3, 1), first(7, Purpose::Fading, 3, 2));
        assert_ne!(first(7, Purpose::Fading, 3, 1), first(7, Purpose::Fading, 4, 1));
        assert_ne!(first(7, Purpose::Fading, 3, 1), first(7, Purpose::Error, 3, 1));
        assert_ne!(first(7, Purpose::Fading, 3, 1), first(8, Purpose::Fading, 3, 1));
    }

    #[test]
    fn complex_normal_has_unit_variance() {
        let mut rng = stream(1, Purpose::Fading, 0, 0);
        let n = 100_000;
        let mut power = 0.0;
        let mut re2 = 0.0;
        for _ in 0..n {
            let z = complex_normal(&mut rng);
            power += z.norm_sqr();
            re2 += z.re * z.re;
        }
        let power = power / n as f64;
        let re2 = re2 / n as f64;
        assert!((power - 1.0).abs() < 0.02, "{power}");
        assert!((re2 - 0.5).abs() < 0.01, "{re2}");
    }
}
