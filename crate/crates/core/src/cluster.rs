//! In-memory storage cluster simulation.
//!
//! The cluster owns shard placement, failure injection, and an append-only
//! transfer ledger. Bandwidth reports are computed **from the ledger**, never
//! from formulas, so optimality is measured rather than assumed; the formula
//! value appears in the report only as the target to compare against.
//!
//! Originals of erased shards are retained privately for the post-repair
//! correctness audit. The repair path receives helper shards only, so the
//! hidden copies cannot leak into the protocol.

use crate::code::{CodeParams, Codeword, Shard};
use crate::grouping::RepairScenario;
use crate::repair::cooperative_repair;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Which protocol round a transfer belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Download,
    Cooperative,
}

/// One message crossing a node boundary: `n_symbols` field elements moved
/// from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransferRecord {
    pub phase: Phase,
    pub from: usize,
    pub to: usize,
    pub n_symbols: usize,
}

/// The audited result of one repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RepairReport {
    /// Symbols per helper-to-failed link (0 when no download happened).
    pub beta1: u64,
    /// Symbols per failed-to-failed link (0 when no cooperation happened).
    pub beta2: u64,
    /// Total download-phase symbols.
    pub gamma1: u64,
    /// Total cooperative-phase symbols.
    pub gamma2: u64,
    pub gamma_total: u64,
    /// The cooperative lower bound `h(d+h-1)N/(d-k+h)` at `d = k+1`.
    pub gamma_optimal: u64,
    /// True iff the measured total meets the bound exactly and every link in
    /// each phase carried the same number of symbols.
    pub optimal: bool,
    /// True iff the repaired shards equal the erased originals exactly.
    pub correct: bool,
}

impl RepairReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// The cooperative repair bandwidth bound `h(d+h-1)N/(d-k+h)` with `d = k+1`,
/// which simplifies to `h(k+h)N/(h+1)`. `h + 1` always divides `N` for the
/// supported failure patterns, so the value is exact.
pub fn optimal_bandwidth(h: usize, k: usize, n_symbols: usize) -> u64 {
    if h == 0 {
        return 0;
    }
    let h = h as u64;
    let per_link = n_symbols as u64 / (h + 1);
    debug_assert_eq!(per_link * (h + 1), n_symbols as u64);
    h * (k as u64 + h) * per_link
}

/// Aggregates a ledger into a report. Symbols are grouped per (phase, from,
/// to) link; uniformity is judged on those per-link totals.
pub fn audit_transfers(records: &[TransferRecord], gamma_optimal: u64, correct: bool) -> RepairReport {
    let mut links: BTreeMap<(Phase, usize, usize), u64> = BTreeMap::new();
    for rec in records {
        *links.entry((rec.phase, rec.from, rec.to)).or_insert(0) += rec.n_symbols as u64;
    }
    let phase_stats = |phase: Phase| -> (u64, u64, bool) {
        let totals: Vec<u64> = links
            .iter()
            .filter(|((p, _, _), _)| *p == phase)
            .map(|(_, &v)| v)
            .collect();
        let gamma: u64 = totals.iter().sum();
        let beta = totals.first().copied().unwrap_or(0);
        let uniform = totals.iter().all(|&v| v == beta);
        (beta, gamma, uniform)
    };
    let (beta1, gamma1, uniform1) = phase_stats(Phase::Download);
    let (beta2, gamma2, uniform2) = phase_stats(Phase::Cooperative);
    let gamma_total = gamma1 + gamma2;
    RepairReport {
        beta1,
        beta2,
        gamma1,
        gamma2,
        gamma_total,
        gamma_optimal,
        optimal: uniform1 && uniform2 && gamma_total == gamma_optimal,
        correct,
    }
}

/// Default helper choice: the `k + 1` lowest-indexed survivors.
pub fn helper_selection(survivors: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut sorted = survivors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "need k+1 = {} helpers but only {} survivors",
            k + 1,
            sorted.len()
        )));
    }
    sorted.truncate(k + 1);
    Ok(sorted)
}

/// A simulated cluster of `n` nodes storing one codeword.
#[derive(Debug, Clone)]
pub struct Cluster {
    params: CodeParams,
    slots: Vec<Option<Shard>>,
    originals: Vec<Shard>,
    ledger: Vec<TransferRecord>,
}

impl Cluster {
    pub fn from_codeword(params: CodeParams, codeword: Codeword) -> Self {
        let originals = codeword.into_shards();
        let slots = originals.iter().cloned().map(Some).collect();
        Cluster {
            params,
            slots,
            originals,
            ledger: Vec::new(),
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn shard(&self, node_id: usize) -> Option<&Shard> {
        self.slots.get(node_id).and_then(|s| s.as_ref())
    }

    pub fn erased_ids(&self) -> Vec<usize> {
        (0..self.params.n())
            .filter(|&i| self.slots[i].is_none())
            .collect()
    }

    pub fn surviving_ids(&self) -> Vec<usize> {
        (0..self.params.n())
            .filter(|&i| self.slots[i].is_some())
            .collect()
    }

    pub fn ledger(&self) -> &[TransferRecord] {
        &self.ledger
    }

    /// Erases the given nodes. The total failure count must stay repairable
    /// with `k + 1` helpers, i.e. at most `r - 1`.
    pub fn inject_failures(&mut self, erased: &[usize]) -> Result<()> {
        let mut all = self.erased_ids();
        for &e in erased {
            if e >= self.params.n() {
                return Err(Error::NodeOutOfRange(e));
            }
            if !all.contains(&e) {
                all.push(e);
            }
        }
        let max = self.params.r().saturating_sub(1);
        if all.len() > max {
            return Err(Error::TooManyFailures { h: all.len(), max });
        }
        for &e in erased {
            self.slots[e] = None;
        }
        Ok(())
    }

    /// Repairs all currently erased nodes cooperatively and audits the
    /// transfer ledger of this run into a report.
    ///
    /// `helpers` overrides the default lowest-survivor selection. With no
    /// failures this is a no-op reporting zero traffic.
    pub fn run_repair(&mut self, helpers: Option<&[usize]>) -> Result<RepairReport> {
        let erased = self.erased_ids();
        if erased.is_empty() {
            return Ok(audit_transfers(&[], 0, true));
        }
        let helpers = match helpers {
            Some(ids) => ids.to_vec(),
            None => helper_selection(&self.surviving_ids(), self.params.k())?,
        };
        let scenario = RepairScenario::new(&self.params, &erased, &helpers)?;
        let helper_shards: BTreeMap<usize, &Shard> = scenario
            .helpers()
            .iter()
            .map(|&j| {
                self.slots[j]
                    .as_ref()
                    .map(|s| (j, s))
                    .ok_or(Error::MissingShard(j))
            })
            .collect::<Result<_>>()?;

        let outcome = cooperative_repair(&scenario, &helper_shards)?;

        let correct = outcome
            .repaired
            .iter()
            .all(|s| *s == self.originals[s.node_id]);
        for shard in outcome.repaired {
            let id = shard.node_id;
            self.slots[id] = Some(shard);
        }
        let report = audit_transfers(
            &outcome.transfers,
            optimal_bandwidth(
                scenario.failure_count(),
                self.params.k(),
                self.params.sub_packetization(),
            ),
            correct,
        );
        self.ledger.extend(outcome.transfers);
        Ok(report)
    }
}
