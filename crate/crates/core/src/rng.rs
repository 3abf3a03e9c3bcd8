//! Deterministic random streams.
//!
//! Every random draw in the crate comes from ChaCha8, a counter-based
//! generator. A master seed selects the key and a stream id selects an
//! independent substream, so results do not depend on thread scheduling:
//!
//! | purpose                    | stream id               |
//! |----------------------------|-------------------------|
//! | train/test split           | `SPLIT`                 |
//! | validation hold-out        | `VALIDATION`            |
//! | removal after view `g`     | `VIEW_REMOVAL + g`      |
//! | bootstrap replicate `b`    | `BOOTSTRAP + b`         |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SPLIT: u64 = 1;
pub const VALIDATION: u64 = 2;
pub const VIEW_REMOVAL: u64 = 1 << 32;
pub const BOOTSTRAP: u64 = 1 << 48;

/// Generator for `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
