//! Counter-keyed random streams.
//!
//! Every Monte Carlo sample gets its own stream derived from
//! `(seed, purpose, index)`, so results never depend on how samples are
//! split across workers.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purposes keep the streams of independent sub-runs disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Purpose(pub u64);

impl Purpose {
    pub const PERSISTENCE: Purpose = Purpose(1);
    pub const CYCLE: Purpose = Purpose(2);
    pub const ETA: Purpose = Purpose(3);
    pub const KEY_LHS: Purpose = Purpose(4);
    pub const KEY_ETA: Purpose = Purpose(5);
    pub const KEY_CYCLES: Purpose = Purpose(6);
    pub const POSITIVITY: Purpose = Purpose(7);
    pub const COROLLARY_COND: Purpose = Purpose(8);
    pub const COROLLARY_FREE: Purpose = Purpose(9);
    pub const SYMMETRY_A: Purpose = Purpose(10);
    pub const SYMMETRY_B: Purpose = Purpose(11);
    pub const SANDWICH: Purpose = Purpose(12);
    pub const JITTER: Purpose = Purpose(13);
    pub const GENERIC: Purpose = Purpose(99);
}

/// One independent random stream. Never shared between workers.
#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: Xoshiro256PlusPlus,
}

impl RandomStream {
    pub fn new(seed: u64, purpose: Purpose, index: u64) -> Self {
        let key = splitmix64(seed ^ splitmix64(purpose.0.wrapping_mul(0xD1B5_4A32_D192_ED03)));
        let base = key ^ index.wrapping_mul(0xA076_1D64_78BD_642F);
        let mut bytes = [0u8; 32];
        let mut x = base;
        for chunk in bytes.chunks_exact_mut(8) {
            x = splitmix64(x);
            chunk.copy_from_slice(&x.to_le_bytes());
        }
        Self { inner: Xoshiro256PlusPlus::from_seed(bytes) }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, Purpose::GENERIC, 0)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
