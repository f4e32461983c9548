#![allow(dead_code)]

use cfma_core::{ChannelPair, CovariancePair, Matrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(lo..hi)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

pub fn channel(rng: &mut impl Rng, r: usize, t: usize) -> ChannelPair {
    ChannelPair::new(uniform_matrix(rng, r, t, -1.0, 1.0), uniform_matrix(rng, r, t, -1.0, 1.0)).unwrap()
}

pub fn diag_channel(rng: &mut impl Rng) -> ChannelPair {
    let mut d = || Matrix::from_diag(&[rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]);
    ChannelPair::new(d(), d()).unwrap()
}

/// Random PSD matrix with trace `fraction * power`.
pub fn psd(rng: &mut impl Rng, t: usize, power: f64, fraction: f64) -> Matrix {
    let a = uniform_matrix(rng, t, t, -1.0, 1.0);
    let k = a.gram();
    let tr = k.trace();
    if tr == 0.0 {
        return Matrix::zeros(t, t);
    }
    k.scale(fraction * power / tr).symmetrize()
}

pub fn covariances(rng: &mut impl Rng, t: usize, power: f64) -> CovariancePair {
    let f1 = rng.gen_range(0.05..1.0);
    let f2 = rng.gen_range(0.05..1.0);
    let k1 = psd(rng, t, power, f1);
    let k2 = psd(rng, t, power, f2);
    CovariancePair::new(k1, k2, power).unwrap()
}

pub fn log_det_sum(ch: &ChannelPair, k1: &Matrix, k2: &Matrix) -> f64 {
    let s = Matrix::identity(ch.r())
        .add(&ch.h1().mul(k1).mul(&ch.h1().transpose()))
        .add(&ch.h2().mul(k2).mul(&ch.h2().transpose()));
    0.5 * s.det().log2()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
