//! Hadamard MSR erasure codes with cooperative multi-failure repair.
//!
//! An `(n, k)` Hadamard MSR code stores `N` field symbols per node and can
//! rebuild the data of any `k` nodes from any `k` survivors. This crate adds
//! the cooperative repair path: `h` simultaneously failed nodes contact only
//! `d = k + 1` helpers, then exchange partial sums among themselves, and the
//! total traffic meets the cooperative repair lower bound
//! `h(d + h - 1) N / (d - k + h)` with equality.
//!
//! The crate is organised around that pipeline:
//!
//! * [`gf`] — exact arithmetic in a prime field and the power-sum solver
//!   every other module leans on.
//! * [`code`] — code parameters, encoding, parity verification, and MDS
//!   reconstruction.
//! * [`hamming`] — binary Hamming codes and their standard arrays, the
//!   combinatorial engine behind the pairing.
//! * [`grouping`] — repair scenarios, symbol grouping, and pairing plans.
//! * [`repair`] — the two-phase repair protocol itself.
//! * [`cluster`] — an in-memory cluster simulator with a transfer ledger and
//!   bandwidth audits measured from that ledger.
//!
//! All arithmetic is exact; there are no tolerances anywhere. Heavy
//! per-coordinate loops run on rayon when the default `parallel` feature is
//! enabled and fall back to plain iterators without it.

pub mod cluster;
pub mod code;
mod exec;
pub mod gf;
pub mod grouping;
pub mod hamming;
pub mod repair;
pub mod rng;

pub use cluster::{Cluster, RepairReport, TransferRecord};
pub use code::{encode, mds_reconstruct, verify_codeword, CodeParams, Codeword, Shard};
pub use gf::{Field, FieldElement};
pub use grouping::{PairingPlan, RepairCase, RepairScenario};
pub use repair::cooperative_repair;

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotPrime(u16),
    #[error("field F_{q} is too small for n={n} nodes (need q >= 2n+1)")]
    FieldTooSmall { q: u16, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coding coefficients must be 2n pairwise-distinct nonzero values")]
    LambdaCollision,
    #[error("mixed field moduli: F_{0} vs F_{1}")]
    ModulusMismatch(u16, u16),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u16),
    #[error("zero is outside the multiplicative group")]
    ZeroElement,
    #[error("singular linear system (repeated generators)")]
    SingularSystem,
    #[error("expected {expected} shards, got {got}")]
    ShardCount { expected: usize, got: usize },
    #[error("duplicate node id {0}")]
    DuplicateNode(usize),
    #[error("node id {0} out of range")]
    NodeOutOfRange(usize),
    #[error("cannot repair {h} failures with d=k+1 helpers (need h <= r-1 = {max})")]
    TooManyFailures { h: usize, max: usize },
    #[error("code has {got} instances but the failure pattern needs {need}")]
    InstanceMismatch { need: usize, got: usize },
    #[error("operation requires the {expected} repair case")]
    CaseMismatch { expected: &'static str },
    #[error("shard for node {0} is unavailable")]
    MissingShard(usize),
    #[error("repair protocol dependency unsatisfied: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
