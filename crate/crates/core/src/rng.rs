//! Counter-based seeding: every independent work item gets its own ChaCha stream,
//! so results do not depend on how items are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids used by the experiment pipeline.
pub mod streams {
    pub const LOCATIONS: u64 = 1;
    pub const TRAIN: u64 = 2;
    pub const TEST: u64 = 3;
    pub const PARTITION: u64 = 4;
    pub const MONTE_CARLO: u64 = 5;
    pub const GRAPHS: u64 = 6;
}

/// Generator for item `index` of stream `stream` under `seed`.
pub fn item_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream << 48) ^ index);
    rng
}
