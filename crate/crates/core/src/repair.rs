//! The two-phase cooperative repair protocol.
//!
//! **Download phase.** Each failed node asks every helper for the sums
//! `f[j][left] + f[j][right]` over its pairing plan. Adding the two parity
//! checks of a pair collapses, for every node except the target, the two
//! symbols into one unknown sum; the resulting r-by-r system (one equation
//! per parity power) is a transposed Vandermonde system and solves exactly.
//! The target node thereby recovers its own two symbols on every pair, plus
//! the symbol *sums* of the other failed nodes as a by-product.
//!
//! **Cooperative phase.** Those by-product sums are exactly what the other
//! failed nodes are missing: each failed node forwards them, and the
//! recipient subtracts its already-known symbols to fill in the rest of its
//! column. Coset structure guarantees the known and unknown coordinates
//! interlock so that every coordinate is eventually covered.
//!
//! Per link, both phases move exactly `N / (h + 1)` symbols.

use crate::cluster::{Phase, TransferRecord};
use crate::code::Shard;
use crate::exec::map_collect;
use crate::gf::{solve_vandermonde_like, FieldElement};
use crate::grouping::{build_pairing, NodePlan, PairingPlan, RepairCase, RepairScenario};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Helper-to-failed-node message. Entry `v` is the pair sum for entry `v` of
/// the *recipient's* pairing plan.
#[derive(Debug, Clone)]
pub struct DownloadMessage {
    pub from: usize,
    pub to: usize,
    pub payload: Vec<FieldElement>,
}

/// Failed-to-failed-node message. Entry `v` is the recipient's pair sum for
/// entry `v` of the *sender's* pairing plan.
#[derive(Debug, Clone)]
pub struct CoopMessage {
    pub from: usize,
    pub to: usize,
    pub payload: Vec<FieldElement>,
}

/// What solving one pair yields for the target node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSolveOutput {
    /// The target's symbol at the pair's left coordinate.
    pub own_left: FieldElement,
    /// The target's symbol at the pair's right coordinate.
    pub own_right: FieldElement,
    /// `(node, f[node][left] + f[node][right])` for every other failed node
    /// and every unconnected node. The failed nodes' sums feed the
    /// cooperative phase; the unconnected ones are solved as part of the
    /// system but never used.
    pub sums: Vec<(usize, FieldElement)>,
}

/// Solves the summed parity system of one pair for the node `target`.
///
/// `helper_sums` holds `f[j][left] + f[j][right]` for each helper, aligned
/// with `scenario.helpers()`. The pair must satisfy the pairing conditions;
/// violated conditions surface as a singular system.
pub fn pair_solve(
    scenario: &RepairScenario,
    target: usize,
    left: usize,
    right: usize,
    helper_sums: &[FieldElement],
) -> Result<PairSolveOutput> {
    let params = scenario.params();
    let field = params.field();
    let r = params.r();
    let rank = scenario
        .rank_of(target)
        .ok_or(Error::NodeOutOfRange(target))?;
    if helper_sums.len() != scenario.helpers().len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} helper sums, got {}",
            scenario.helpers().len(),
            helper_sums.len()
        )));
    }

    // Unknown layout: [target@right, erased@left..., unconnected@left...],
    // with the target's own slot among the erased carrying its left symbol.
    let mut generators = Vec::with_capacity(r);
    generators.push(params.lambda_at(target, right));
    for &i in scenario.erased() {
        generators.push(params.lambda_at(i, left));
    }
    for &z in scenario.unconnected() {
        generators.push(params.lambda_at(z, left));
    }
    debug_assert_eq!(generators.len(), r);

    let mut rhs = vec![field.zero(); r];
    let mut powers = vec![field.one(); helper_sums.len()];
    for t in 0..r {
        let mut acc = field.zero();
        for (idx, &j) in scenario.helpers().iter().enumerate() {
            acc = acc + powers[idx] * helper_sums[idx];
            powers[idx] = powers[idx] * params.lambda_at(j, left);
        }
        rhs[t] = -acc;
    }

    let x = solve_vandermonde_like(&generators, &rhs)?;

    let own_right = x[0];
    let own_left = x[1 + rank];
    let mut sums = Vec::with_capacity(r - 2);
    for (u, &i) in scenario.erased().iter().enumerate() {
        if i != target {
            sums.push((i, x[1 + u]));
        }
    }
    let offset = 1 + scenario.erased().len();
    for (z_idx, &z) in scenario.unconnected().iter().enumerate() {
        sums.push((z, x[offset + z_idx]));
    }
    Ok(PairSolveOutput {
        own_left,
        own_right,
        sums,
    })
}

/// Download-phase outcome for one failed node.
#[derive(Debug, Clone)]
pub struct NodeDownload {
    pub node: usize,
    /// Recovered own symbols, `(global coordinate, value)`, two per pair.
    pub own_symbols: Vec<(usize, FieldElement)>,
    /// For each other failed node, its pair sums aligned with *this* node's
    /// plan — the payloads of the cooperative phase.
    pub peer_sums: BTreeMap<usize, Vec<FieldElement>>,
}

#[derive(Debug, Clone)]
pub struct DownloadPhase {
    pub per_node: Vec<NodeDownload>,
    pub transfers: Vec<TransferRecord>,
}

/// Runs the download phase: builds every helper message, then solves every
/// pair of every failed node's plan. Pair solves are independent and run in
/// parallel; outputs are collected in plan order, so the result is
/// deterministic.
pub fn download_phase(
    scenario: &RepairScenario,
    plan: &PairingPlan,
    helper_shards: &BTreeMap<usize, &Shard>,
) -> Result<DownloadPhase> {
    for &j in scenario.helpers() {
        let shard = helper_shards.get(&j).ok_or(Error::MissingShard(j))?;
        if shard.symbols.len() != scenario.params().sub_packetization() {
            return Err(Error::InvalidParameter(format!(
                "helper {j} shard has wrong length"
            )));
        }
    }

    let mut per_node = Vec::with_capacity(plan.nodes.len());
    let mut transfers = Vec::new();
    for node_plan in &plan.nodes {
        let messages: Vec<DownloadMessage> = scenario
            .helpers()
            .iter()
            .map(|&j| {
                let shard = helper_shards[&j];
                let payload: Vec<FieldElement> = node_plan
                    .pairs
                    .iter()
                    .map(|p| shard.symbols[p.left] + shard.symbols[p.right])
                    .collect();
                DownloadMessage {
                    from: j,
                    to: node_plan.node,
                    payload,
                }
            })
            .collect();
        for m in &messages {
            transfers.push(TransferRecord {
                phase: Phase::Download,
                from: m.from,
                to: m.to,
                n_symbols: m.payload.len(),
            });
        }

        let solved: Vec<PairSolveOutput> = {
            let outs = map_collect(node_plan.pairs.len(), |v| {
                let pair = &node_plan.pairs[v];
                let helper_sums: Vec<FieldElement> =
                    messages.iter().map(|m| m.payload[v]).collect();
                pair_solve(scenario, node_plan.node, pair.left, pair.right, &helper_sums)
            });
            outs.into_iter().collect::<Result<_>>()?
        };

        let mut own_symbols = Vec::with_capacity(2 * node_plan.pairs.len());
        let mut peer_sums: BTreeMap<usize, Vec<FieldElement>> = scenario
            .erased()
            .iter()
            .filter(|&&i| i != node_plan.node)
            .map(|&i| (i, Vec::with_capacity(node_plan.pairs.len())))
            .collect();
        for (pair, out) in node_plan.pairs.iter().zip(&solved) {
            own_symbols.push((pair.left, out.own_left));
            own_symbols.push((pair.right, out.own_right));
            for &(i, sum) in &out.sums {
                if let Some(sums) = peer_sums.get_mut(&i) {
                    sums.push(sum);
                }
            }
        }
        per_node.push(NodeDownload {
            node: node_plan.node,
            own_symbols,
            peer_sums,
        });
    }
    Ok(DownloadPhase {
        per_node,
        transfers,
    })
}

#[derive(Debug, Clone)]
pub struct CooperativePhase {
    pub repaired: Vec<Shard>,
    pub transfers: Vec<TransferRecord>,
}

/// Applies one cooperative message to a partially known column: for each pair
/// of the sender's plan, whichever side the recipient already knows
/// determines the other from the transferred sum.
fn apply_sum_message(
    known: &mut [Option<FieldElement>],
    sender_plan: &NodePlan,
    payload: &[FieldElement],
    receiver: usize,
) -> Result<()> {
    for (pair, &sum) in sender_plan.pairs.iter().zip(payload) {
        match (known[pair.left], known[pair.right]) {
            (Some(l), None) => known[pair.right] = Some(sum - l),
            (None, Some(rv)) => known[pair.left] = Some(sum - rv),
            (Some(l), Some(rv)) => debug_assert_eq!(
                l + rv,
                sum,
                "inconsistent sum for node {receiver} pair ({}, {})",
                pair.left,
                pair.right
            ),
            (None, None) => {
                return Err(Error::Protocol(format!(
                    "node {receiver} cannot use pair ({}, {}) from node {}: neither side known",
                    pair.left, pair.right, sender_plan.node
                )))
            }
        }
    }
    Ok(())
}

/// Runs the cooperative phase and assembles the repaired shards.
///
/// Messages are a pure function of the download results. Each recipient
/// processes them in a fixed schedule — in the non-divisible case the
/// instance-0 unlock message first, then intra-instance expansions, then the
/// cross-instance ones — which satisfies every data dependency.
pub fn cooperative_phase(
    scenario: &RepairScenario,
    plan: &PairingPlan,
    download: &DownloadPhase,
) -> Result<CooperativePhase> {
    let h = scenario.failure_count();
    let len = scenario.params().sub_packetization();
    let mut transfers = Vec::new();

    // All pairwise messages, sender-major for a deterministic ledger.
    let mut inbox: BTreeMap<usize, Vec<CoopMessage>> = BTreeMap::new();
    for sender in &download.per_node {
        for (&to, sums) in &sender.peer_sums {
            transfers.push(TransferRecord {
                phase: Phase::Cooperative,
                from: sender.node,
                to,
                n_symbols: sums.len(),
            });
            inbox.entry(to).or_default().push(CoopMessage {
                from: sender.node,
                to,
                payload: sums.clone(),
            });
        }
    }

    let span = scenario.case().instances_required();
    let word_len = scenario.case().word_len();
    let mut repaired = Vec::with_capacity(h);
    for (rank, result) in download.per_node.iter().enumerate() {
        let node = result.node;
        let mut known: Vec<Option<FieldElement>> = vec![None; len];
        for &(c, value) in &result.own_symbols {
            known[c] = Some(value);
        }
        let empty = Vec::new();
        let messages = inbox.get(&node).unwrap_or(&empty);
        let plan_of = |sender: usize| -> Result<&NodePlan> {
            plan.plan_for(sender)
                .ok_or_else(|| Error::Protocol(format!("no plan for sender {sender}")))
        };
        let msg_from = |sender_rank: usize| -> Result<&CoopMessage> {
            let sender = scenario.erased()[sender_rank];
            messages
                .iter()
                .find(|m| m.from == sender)
                .ok_or_else(|| Error::Protocol(format!("missing message from node {sender}")))
        };

        match scenario.case() {
            RepairCase::Divisible { .. } => {
                for m in messages {
                    apply_sum_message(&mut known, plan_of(m.from)?, &m.payload, node)?;
                }
            }
            RepairCase::NonDivisible { .. } => {
                let u1 = rank / span;
                let u2 = rank % span;
                // A node whose download did not touch the codeword coset of
                // instance 0 first unlocks it through the intra-instance
                // sender pairing that coset with the one it does know.
                if !(u1 < word_len && u2 == 0) && u1 > 0 {
                    let m = msg_from(span * (u1 - 1))?;
                    apply_sum_message(&mut known, plan_of(m.from)?, &m.payload, node)?;
                }
                let sender_pass = |sender: usize| -> usize {
                    let sr = scenario.rank_of(sender).expect("sender is erased");
                    let s1 = sr / span;
                    let s2 = sr % span;
                    if s1 < word_len && s2 == 0 {
                        0 // intra-instance: completes instance 0
                    } else if s1 < word_len {
                        1 // cross-instance from a non-final coset
                    } else {
                        2 // cross-instance from the final coset
                    }
                };
                for pass in 0..3 {
                    for m in messages.iter().filter(|m| sender_pass(m.from) == pass) {
                        apply_sum_message(&mut known, plan_of(m.from)?, &m.payload, node)?;
                    }
                }
            }
        }

        let symbols: Vec<FieldElement> = known
            .into_iter()
            .enumerate()
            .map(|(c, v)| {
                v.ok_or_else(|| {
                    Error::Protocol(format!("node {node}: coordinate {c} never recovered"))
                })
            })
            .collect::<Result<_>>()?;
        repaired.push(Shard {
            node_id: node,
            symbols,
        });
    }
    Ok(CooperativePhase {
        repaired,
        transfers,
    })
}

/// A finished repair: the rebuilt shards plus the full message ledger.
#[derive(Debug, Clone)]
pub struct RepairOutcome {
    /// Rebuilt shards of the failed nodes, in ascending node order.
    pub repaired: Vec<Shard>,
    pub transfers: Vec<TransferRecord>,
}

/// Runs grouping, pairing, and both protocol phases end to end.
///
/// `helper_shards` must hold exactly the scenario's helpers — the repair path
/// never sees any other node's data.
pub fn cooperative_repair(
    scenario: &RepairScenario,
    helper_shards: &BTreeMap<usize, &Shard>,
) -> Result<RepairOutcome> {
    let plan = build_pairing(scenario)?;
    #[cfg(debug_assertions)]
    crate::grouping::validate_plan(scenario, &plan)?;

    let download = download_phase(scenario, &plan, helper_shards)?;
    let coop = cooperative_phase(scenario, &plan, &download)?;
    let mut transfers = download.transfers;
    transfers.extend(coop.transfers);
    Ok(RepairOutcome {
        repaired: coop.repaired,
        transfers,
    })
}
