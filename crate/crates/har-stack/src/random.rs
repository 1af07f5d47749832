//! Deterministic randomness.
//!
//! Every stochastic operation in this crate draws from an [`RngStream`]
//! obtained as a pure function of `(seed, tag, index)`. Parallel code can
//! hand each unit of work (a tree, a fold, a class) its own stream up
//! front, so scheduling order never changes results.

/// Master seed carried through every stochastic API in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Counter-based generator (splitmix64 core). The initial state is a hash
/// of `(seed, tag, index)`; each draw advances a counter through the
/// finalizer, so two streams with different keys never correlate.
#[derive(Debug, Clone)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn new(seed: RngSeed, tag: &str, index: u64) -> Self {
        let key = mix(seed.0 ^ fnv1a(tag.as_bytes())).wrapping_add(mix(index.wrapping_mul(GOLDEN) ^ GOLDEN));
        RngStream { state: mix(key) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. Widening-multiply reduction.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }

    /// Uniform real in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Draws `k` distinct values from `0..n` (partial Fisher-Yates over a
    /// scratch pool). Order of the result is the draw order.
    pub fn choose_distinct(&mut self, k: usize, n: usize, pool: &mut Vec<usize>) -> Vec<usize> {
        debug_assert!(k <= n);
        pool.clear();
        pool.extend(0..n);
        let mut out = Vec::with_capacity(k);
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
            out.push(pool[i]);
        }
        out
    }
}
