//! The on-disk shard format and the byte <-> element packing.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! magic      4  b"HMSR"
//! version    1  = 1
//! n          1
//! k          1
//! q          2
//! instances  1
//! node_id    1
//! reserved   5  zero
//! data_len   8  original input length in bytes
//! body       2 * stripes * N   one u16 per field element, coordinate-major
//! ```
//!
//! Input bytes are packed at `floor(log2 q)` bits per element so every stored
//! value is a valid field element for any supported prime, and unpacking is
//! exact given `data_len`. A file larger than one codeword's capacity spans
//! multiple stripes, each an independent codeword.

use crate::CliError;
use coopmsr::code::CodeParams;
use std::fs;
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"HMSR";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardFile {
    pub n: u8,
    pub k: u8,
    pub q: u16,
    pub instances: u8,
    pub node_id: u8,
    pub data_len: u64,
    pub symbols: Vec<u16>,
}

impl ShardFile {
    pub fn params(&self) -> Result<CodeParams, CliError> {
        CodeParams::new(
            self.n as usize,
            self.k as usize,
            self.q,
            self.instances as usize,
        )
        .map_err(CliError::from)
    }

    pub fn stripes(&self) -> usize {
        let per_stripe = (self.instances as usize) << self.n;
        self.symbols.len() / per_stripe
    }

    pub fn file_name(node_id: usize) -> String {
        format!("shard_{node_id:02}.hmsr")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut bytes = Vec::with_capacity(HEADER_LEN + 2 * self.symbols.len());
        bytes.extend_from_slice(&MAGIC);
        bytes.push(VERSION);
        bytes.push(self.n);
        bytes.push(self.k);
        bytes.extend_from_slice(&self.q.to_le_bytes());
        bytes.push(self.instances);
        bytes.push(self.node_id);
        bytes.extend_from_slice(&[0u8; 5]);
        bytes.extend_from_slice(&self.data_len.to_le_bytes());
        for &s in &self.symbols {
            bytes.extend_from_slice(&s.to_le_bytes());
        }
        fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes =
            fs::read(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let name = path.display();
        if bytes.len() < HEADER_LEN {
            return Err(CliError::param(format!("{name}: truncated header")));
        }
        if bytes[0..4] != MAGIC {
            return Err(CliError::param(format!("{name}: bad magic")));
        }
        if bytes[4] != VERSION {
            return Err(CliError::param(format!(
                "{name}: unsupported version {}",
                bytes[4]
            )));
        }
        let n = bytes[5];
        let k = bytes[6];
        let q = u16::from_le_bytes([bytes[7], bytes[8]]);
        let instances = bytes[9];
        let node_id = bytes[10];
        let data_len = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let body = &bytes[HEADER_LEN..];
        if body.len() % 2 != 0 {
            return Err(CliError::param(format!("{name}: odd body length")));
        }
        let per_stripe = (instances as usize) << n;
        let count = body.len() / 2;
        if count == 0 || count % per_stripe != 0 {
            return Err(CliError::param(format!(
                "{name}: body holds {count} elements, not a multiple of N = {per_stripe}"
            )));
        }
        let mut symbols = Vec::with_capacity(count);
        for pair in body.chunks_exact(2) {
            let v = u16::from_le_bytes([pair[0], pair[1]]);
            if v >= q {
                return Err(CliError::verification(format!(
                    "{name}: element {v} outside F_{q}"
                )));
            }
            symbols.push(v);
        }
        Ok(ShardFile {
            n,
            k,
            q,
            instances,
            node_id,
            data_len,
            symbols,
        })
    }

    /// Header fields that must agree across the shards of one file.
    pub fn header_key(&self) -> (u8, u8, u16, u8, u64, usize) {
        (
            self.n,
            self.k,
            self.q,
            self.instances,
            self.data_len,
            self.symbols.len(),
        )
    }
}

/// Bits per stored element: the widest width whose values all fit below `q`.
pub fn bits_per_element(q: u16) -> usize {
    (15 - q.leading_zeros()) as usize
}

/// Packs a byte stream into `n_elements` values of `bits` bits each,
/// LSB-first, zero-padded past the end of the data.
pub fn pack_bits(data: &[u8], bits: usize, n_elements: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(n_elements);
    let total_bits = data.len() * 8;
    for e in 0..n_elements {
        let mut v = 0u16;
        for b in 0..bits {
            let bit_idx = e * bits + b;
            if bit_idx < total_bits && data[bit_idx / 8] >> (bit_idx % 8) & 1 == 1 {
                v |= 1 << b;
            }
        }
        out.push(v);
    }
    out
}

/// Inverse of [`pack_bits`], truncated to `data_len` bytes.
pub fn unpack_bits(elements: &[u16], bits: usize, data_len: usize) -> Vec<u8> {
    let mut out = vec![0u8; data_len];
    'outer: for (e, &v) in elements.iter().enumerate() {
        for b in 0..bits {
            let bit_idx = e * bits + b;
            if bit_idx >= data_len * 8 {
                break 'outer;
            }
            if v >> b & 1 == 1 {
                out[bit_idx / 8] |= 1 << (bit_idx % 8);
            }
        }
    }
    out
}
