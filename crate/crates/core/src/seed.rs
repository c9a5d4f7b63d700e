use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hash::splitmix64;

/// Named random streams. Each one gets its own ChaCha key so that, for
/// instance, changing the weight law never perturbs the positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Points,
    Marks,
    Edges,
    Weights,
    Endpoints,
    Bootstrap,
    Queries,
    Aux(u64),
}

impl Stream {
    fn label(self) -> u64 {
        match self {
            Stream::Points => 0x706f_696e_7473,
            Stream::Marks => 0x6d61_726b_73,
            Stream::Edges => 0x6564_6765_73,
            Stream::Weights => 0x7765_6967_6874,
            Stream::Endpoints => 0x656e_6470_7473,
            Stream::Bootstrap => 0x626f_6f74,
            Stream::Queries => 0x7175_6572_79,
            Stream::Aux(k) => 0xa000_0000_0000_0000 ^ k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    #[serde(default)]
    pub trial: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed, trial: 0 }
    }

    pub fn for_trial(self, trial: u64) -> Self {
        SeedSpec { trial, ..self }
    }

    /// 64-bit key for a stream; distinct streams and trials decorrelate through splitmix.
    pub fn key(&self, stream: Stream) -> u64 {
        let a = splitmix64(self.master_seed ^ 0x5eed_0f_5eed);
        let b = splitmix64(a ^ self.trial.wrapping_mul(0xD1B5_4A32_D192_ED03));
        splitmix64(b ^ stream.label())
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let k = self.key(stream);
        let mut bytes = [0u8; 32];
        let mut x = k;
        for chunk in bytes.chunks_mut(8) {
            x = splitmix64(x);
            chunk.copy_from_slice(&x.to_le_bytes());
        }
        ChaCha8Rng::from_seed(bytes)
    }
}
