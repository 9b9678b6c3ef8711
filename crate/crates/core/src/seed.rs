//! Reproducible random streams.
//!
//! A [`Seed`] names one ChaCha8 stream: the root seeds the key and the stream
//! id selects one of the 2^64 independent streams under that key. Replication
//! `i` of an experiment always reads stream `substream(i)`, whatever thread
//! runs it, so results do not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub root: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(root: u64) -> Self {
        Seed { root, stream: 0 }
    }

    pub fn with_stream(root: u64, stream: u64) -> Self {
        Seed { root, stream }
    }

    /// Child stream number `index` of this stream.
    pub fn substream(self, index: u64) -> Seed {
        Seed {
            root: self.root,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019))),
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
