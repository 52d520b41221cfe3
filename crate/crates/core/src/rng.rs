//! Deterministic 64-bit stream generator (splitmix64).
//!
//! Seeded data must be bit-exact reproducible across runs and platforms, so
//! the stream is pinned to the reference splitmix64 update rather than an
//! external RNG whose output could drift between versions.

/// The splitmix64 sequence: `state` advances by the golden-ratio increment,
/// and each output is the standard two-round xor-multiply mix of it.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-enough draw below `bound`; the stream contract is determinism,
    /// so this is defined as plain reduction of the next output.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        self.next_u64() % bound
    }
}
