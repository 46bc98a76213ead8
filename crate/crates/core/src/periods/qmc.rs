//! Randomly shifted Kronecker lattices on the unit cube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) struct QmcOutcome {
    pub mean: f64,
    /// Standard error of the mean over the shifts.
    pub std_error: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub shift_means: Vec<f64>,
}

/// Generator of the `R_d` sequence: powers of the inverse of the positive
/// root of `x^(d+1) = x + 1`.
fn generator(dim: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect()
}

/// Average of `f` over `points` lattice points for each of `shifts` random
/// shifts. Shifts are drawn from a ChaCha stream seeded by `seed`, so the
/// outcome depends only on the arguments.
pub(crate) fn integrate_qmc<F>(dim: usize, points: u64, shifts: u32, seed: u64, mut f: F) -> QmcOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let alpha = generator(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut shift_means = Vec::with_capacity(shifts as usize);
    for _ in 0..shifts {
        let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let mut sum = 0.0;
        let mut comp = 0.0;
        for k in 0..points {
            for j in 0..dim {
                x[j] = (shift[j] + k as f64 * alpha[j]).fract();
            }
            // Kahan summation keeps the mean independent of the point count scale
            let y = f(&x) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        shift_means.push(sum / points as f64);
    }
    let r = shift_means.len() as f64;
    let mean = shift_means.iter().sum::<f64>() / r;
    let var = if shift_means.len() > 1 {
        shift_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (r - 1.0)
    } else {
        f64::INFINITY
    };
    QmcOutcome {
        mean,
        std_error: (var / r).sqrt(),
        shift_means,
    }
}
