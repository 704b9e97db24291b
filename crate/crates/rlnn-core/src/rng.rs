//! Counter-based random numbers (Philox-4x32-10).
//!
//! Every consumer addresses an independent substream by `(seed, id, lane)`;
//! draws inside a substream advance a block counter. Values therefore do not
//! depend on the order in which substreams are consumed, which is what makes
//! parallel path generation bit-reproducible.

use crate::math::inv_normal_cdf;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Philox-4x32 with 10 rounds: a keyed bijection on 128-bit counters.
#[derive(Clone, Copy, Debug)]
pub struct Philox4x32 {
    key: [u32; 2],
}

impl Philox4x32 {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
        }
    }

    pub fn block(&self, ctr: [u32; 4]) -> [u32; 4] {
        let mut c = ctr;
        let mut k = self.key;
        for _ in 0..10 {
            let h0 = (PHILOX_M0 as u64) * (c[0] as u64);
            let h1 = (PHILOX_M1 as u64) * (c[2] as u64);
            c = [
                (h1 >> 32) as u32 ^ c[1] ^ k[0],
                h1 as u32,
                (h0 >> 32) as u32 ^ c[3] ^ k[1],
                h0 as u32,
            ];
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        c
    }
}

/// One independent stream of uniforms/normals addressed by `(seed, id, lane)`.
pub struct CounterRng {
    gen: Philox4x32,
    id: u64,
    lane: u32,
    block: u32,
    buf: [u32; 4],
    pos: usize,
}

impl CounterRng {
    pub fn new(seed: u64, id: u64, lane: u32) -> Self {
        Self {
            gen: Philox4x32::new(seed),
            id,
            lane,
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }

    fn next_words(&mut self) -> (u32, u32) {
        if self.pos >= 4 {
            self.buf = self.gen.block([
                self.id as u32,
                (self.id >> 32) as u32,
                self.lane,
                self.block,
            ]);
            self.block = self
                .block
                .checked_add(1)
                .expect("counter stream exhausted");
            self.pos = 0;
        }
        let pair = (self.buf[self.pos], self.buf[self.pos + 1]);
        self.pos += 2;
        pair
    }

    /// Uniform in the open interval (0, 1) with 53-bit resolution.
    pub fn next_uniform(&mut self) -> f64 {
        let (hi, lo) = self.next_words();
        let bits = ((hi as u64) << 32) | lo as u64;
        ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via the inverse CDF of the uniform stream.
    pub fn next_normal(&mut self) -> f64 {
        inv_normal_cdf(self.next_uniform())
    }

    pub fn fill_normals(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.next_normal();
        }
    }
}

/// Deterministic seed derivation for sub-tasks (splitmix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
