//! Fixtures shared by the criterion benchmarks.

use bayesmia::{BayesianNetwork, Dataset, EncodedVector, ReleasedCounts, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Released counts of `n` sampled records and one IN target from them.
pub fn release(bn: &BayesianNetwork, n: u32, seed: u64) -> Result<(ReleasedCounts, EncodedVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records: Vec<_> = (0..n).map(|_| bn.project(&bn.sample(&mut rng))).collect();
    let target = bn.encode(&records[0])?;
    let counts = bn.dataset_counts(&Dataset::new(records)?)?;
    Ok((counts, target))
}
