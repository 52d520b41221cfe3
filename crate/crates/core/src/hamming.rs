//! Binary Hamming codes and their standard arrays.
//!
//! The standard array of the `(2^m - 1, 2^m - 1 - m)` Hamming code tiles the
//! binary cube: the codeword set plus its single-bit shifts cover every
//! vector exactly once, because the code is perfect for one error. That
//! tiling is what lets the repair pairing touch every symbol group exactly
//! once.
//!
//! Words are integers whose bit `j` is coordinate `j`. The parity-check
//! matrix is fixed to the ascending convention: its columns are the binary
//! representations of `1..2^m - 1`, so coordinate `j` checks against the
//! integer `j + 1`.

/// All codewords of the length-`2^m - 1` binary Hamming code, ascending.
///
/// `m = 0` yields the single empty word and `m = 1` the zero-dimensional
/// length-1 code; both degenerate to `{0}`.
pub fn hamming_codewords(m: u32) -> Vec<u32> {
    let word_len = (1u32 << m) - 1;
    // Coordinates at power-of-two column values are parity positions. Every
    // other coordinate contributes one basis codeword: its own bit plus the
    // parity bits cancelling its column in the syndrome.
    let mut basis = Vec::new();
    for j in 0..word_len {
        let col = j + 1;
        if col.is_power_of_two() {
            continue;
        }
        let mut word = 1u32 << j;
        for t in 0..m {
            if col >> t & 1 == 1 {
                word |= 1 << ((1u32 << t) - 1);
            }
        }
        basis.push(word);
    }
    let mut words: Vec<u32> = (0..1u32 << basis.len())
        .map(|mask| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0, |acc, (_, &b)| acc ^ b)
        })
        .collect();
    words.sort_unstable();
    words
}

/// The standard array of the Hamming code of parameter `m`.
///
/// `cosets()[0]` is the codeword set; `cosets()[i]` for `i in [1, word_len]`
/// is the codeword set shifted by bit `i - 1`, kept in the codewords' element
/// order so that the v-th entries of cosets 0 and i differ in exactly that
/// bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardArray {
    m: u32,
    cosets: Vec<Vec<u32>>,
}

impl StandardArray {
    pub fn new(m: u32) -> Self {
        let codewords = hamming_codewords(m);
        let word_len = (1u32 << m) - 1;
        let mut cosets = Vec::with_capacity(word_len as usize + 1);
        cosets.push(codewords.clone());
        for bit in 0..word_len {
            cosets.push(codewords.iter().map(|&c| c ^ (1 << bit)).collect());
        }
        StandardArray { m, cosets }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Word length `2^m - 1`.
    pub fn word_len(&self) -> usize {
        (1usize << self.m) - 1
    }

    pub fn cosets(&self) -> &[Vec<u32>] {
        &self.cosets
    }

    pub fn coset(&self, i: usize) -> &[u32] {
        &self.cosets[i]
    }

    /// The codeword coset, i.e. `coset(0)`.
    pub fn codewords(&self) -> &[u32] {
        &self.cosets[0]
    }
}
