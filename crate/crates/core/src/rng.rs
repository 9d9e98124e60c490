//! Seeded random streams. Every consumer of randomness draws from its own
//! ChaCha stream keyed by the same 64-bit seed, so changing how one consumer
//! uses randomness never shifts another's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Network = 1,
    InitialState = 2,
    PinSelection = 3,
    QuadSampling = 4,
}

pub(crate) fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
