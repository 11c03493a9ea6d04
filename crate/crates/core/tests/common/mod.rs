#![allow(dead_code)]

use boundbell::states::random_pure;
use boundbell::{PartyLayout, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded extraction corpus: `N` in {3, 4, 5}, local dimensions in {2, 3}.
pub fn corpus(count: u64) -> Vec<PureState> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let n = rng.random_range(3..=5);
            let dims: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
            random_pure(&PartyLayout::new(dims).unwrap(), 1000 + i).unwrap()
        })
        .collect()
}
