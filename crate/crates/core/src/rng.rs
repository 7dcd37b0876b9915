//! Counter-keyed random streams and Haar sampling on SO(n).
//!
//! Every Monte Carlo run is split into fixed-size blocks; block `b` draws from
//! ChaCha stream `b` of the run seed, so results do not depend on how blocks
//! are scheduled across threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub const BLOCK: u64 = 1024;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed rotation: QR of a Gaussian matrix, with column signs fixed
/// so that R has a positive diagonal, then folded into SO(n).
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `(block index, samples in block)` covering `samples` draws.
pub fn blocks(samples: u64) -> Vec<(u64, u64)> {
    (0..samples.div_ceil(BLOCK))
        .map(|b| (b, BLOCK.min(samples - b * BLOCK)))
        .collect()
}

/// Runs `f` once per block on its own stream; output order is block order.
pub fn par_blocks<T, F>(samples: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    blocks(samples)
        .into_par_iter()
        .map(|(b, n)| f(&mut stream(seed, b), n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, 3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream(7, 3).next_u64(), stream(7, 4).next_u64());
        assert_ne!(stream(7, 3).next_u64(), stream(8, 3).next_u64());
    }

    #[test]
    fn haar_is_special_orthogonal() {
        let mut rng = stream(1, 0);
        for n in 2..5 {
            let q = haar_orthogonal(n, &mut rng);
            let e = &q.transpose() * &q - DMatrix::identity(n, n);
            assert!(e.norm() < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_cover_samples() {
        let b = blocks(2500);
        assert_eq!(b.len(), 3);
        assert_eq!(b.iter().map(|x| x.1).sum::<u64>(), 2500);
        assert!(blocks(0).is_empty());
    }

    #[test]
    fn par_blocks_independent_of_pool_size() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| par_blocks(5000, 11, |rng, n| (0..n).map(|_| rng.random::<f64>()).sum::<f64>()))
        };
        assert_eq!(run(1), run(4));
    }
}
