//! Farthest point sampling.
//!
//! Greedy max-min selection: after a seeded uniform first pick, each round
//! adds the point with the largest distance to the already selected set.
//! The result spreads `z` indices across the cloud far more evenly than a
//! uniform draw, which is what downstream pair construction wants.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CloudError, OrientedCloud};

/// Selects `z` spread-out point indices, in selection order.
///
/// Ties on the max-min distance go to the lowest index, so the output is a
/// pure function of the cloud and the seed.
pub fn farthest_point_sampling(cloud: &OrientedCloud, z: usize, seed: u64) -> Result<Vec<usize>, CloudError> {
    let n = cloud.len();
    if z == 0 || z > n {
        return Err(CloudError::ZOutOfRange { z, max: n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);

    let mut selected = Vec::with_capacity(z);
    // Squared distance to the selected set; -1 marks selected points so
    // they can never win the argmax, even when duplicates make every
    // remaining distance zero.
    let mut min_d2 = vec![f64::INFINITY; n];

    let mut latest = first;
    selected.push(first);
    min_d2[first] = -1.0;

    while selected.len() < z {
        let anchor = cloud.points[latest].position;
        let mut best = usize::MAX;
        let mut best_d2 = f64::NEG_INFINITY;
        for (i, entry) in min_d2.iter_mut().enumerate() {
            if *entry >= 0.0 {
                let d2 = (cloud.points[i].position - anchor).norm_squared();
                if d2 < *entry {
                    *entry = d2;
                }
                if *entry > best_d2 {
                    best_d2 = *entry;
                    best = i;
                }
            }
        }
        latest = best;
        selected.push(best);
        min_d2[best] = -1.0;
    }

    Ok(selected)
}
