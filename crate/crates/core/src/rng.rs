//! Deterministic random-number streams for Monte-Carlo drops.
//!
//! Every drop of the simulation consumes randomness from its own counter
//! based stream of a ChaCha12 generator: the master seed selects the key
//! and the drop index selects the stream. Streams are independent of how
//! many drops run, in which order, or on how many threads, so ensembles
//! are reproducible bit for bit and two sweeps sharing a master seed use
//! common random numbers for equal drop indices.

use rand::SeedableRng;
pub use rand_chacha::ChaCha12Rng;

/// Generator for one drop, derived from the master seed and the drop index.
///
/// Equal `(master_seed, drop_index)` pairs always yield identical streams.
pub fn drop_rng(master_seed: u64, drop_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(drop_index);
    rng
}
