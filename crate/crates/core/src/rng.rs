use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator used everywhere in the crate. ChaCha is counter based, so a
/// `(seed, stream)` pair addresses an independent, reproducible sequence.
pub type PaRng = ChaCha8Rng;

/// Reproducible seed: a master seed plus a stream id for ensemble workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_id: 0,
        }
    }

    /// Seed for the `i`-th member of an ensemble.
    pub fn stream(self, stream_id: u64) -> Self {
        SeedSpec {
            master_seed: self.master_seed,
            stream_id,
        }
    }

    pub fn from_entropy() -> Self {
        SeedSpec::new(rand::random())
    }

    pub fn rng(&self) -> PaRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Splits `total` units of work into fixed chunks and runs `f(rng, len)` on
/// each in parallel. Chunk `i` uses stream `i + 1` of `seed`, so the result
/// does not depend on the number of threads.
pub fn par_chunks<T, F>(seed: u64, total: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut PaRng, usize) -> T + Sync,
{
    use rayon::prelude::*;
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk);
    (0..count)
        .into_par_iter()
        .map(|i| {
            let len = chunk.min(total - i * chunk);
            let mut rng = SeedSpec::new(seed).stream(i as u64 + 1).rng();
            f(&mut rng, len)
        })
        .collect()
}

impl std::fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.stream_id == 0 {
            write!(f, "{}", self.master_seed)
        } else {
            write!(f, "{}/{}", self.master_seed, self.stream_id)
        }
    }
}

impl std::str::FromStr for SeedSpec {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((m, st)) => Ok(SeedSpec {
                master_seed: m.parse()?,
                stream_id: st.parse()?,
            }),
            None => Ok(SeedSpec::new(s.parse()?)),
        }
    }
}
