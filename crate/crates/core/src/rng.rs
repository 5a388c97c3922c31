use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for work item `stream` under `seed`. Each item owns its stream,
/// so results do not depend on scheduling or thread count.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for a nested seeded component, drawn from stream `stream`.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    rand::RngCore::next_u64(&mut stream_rng(seed, stream))
}
