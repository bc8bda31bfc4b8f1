//! Seeded, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a [`SeedSpec`]: a master
//! seed plus a stream index. The pair keys a ChaCha8 generator (the master
//! seed expands into the 256-bit key, the stream index selects the ChaCha
//! stream), so distinct pairs give independent sequences and any sample of a
//! Monte Carlo run can be regenerated in isolation, on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// A child seed for sub-task `label` of this stream.
    ///
    /// The child has a different master seed, so its streams never collide
    /// with the parent's stream indices.
    pub fn derive(&self, label: u64) -> SeedSpec {
        let master = mix64(self.master_seed ^ mix64(self.stream_index.wrapping_add(0x632B_E59B_D9B4_E019)));
        SeedSpec::new(mix64(master ^ mix64(label ^ 0x94D0_49BB_1331_11EB)), 0)
    }

    /// The seed used for sample `index` of a run keyed by this seed.
    pub fn sample(&self, index: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, self.stream_index.wrapping_add(index))
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// SplitMix64 finalizer.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
