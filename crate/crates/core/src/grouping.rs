//! Symbol grouping and coordinate pairing for multi-failure repair.
//!
//! Repairing `h` nodes with only `k + 1` helpers works because coordinates
//! can be paired so that, for the target node, the two paired coordinates
//! carry *different* coefficients while every other node sees the *same*
//! coefficient on both. Summing the two parity checks then collapses all
//! other nodes' symbols into single unknowns, leaving a solvable square
//! system per pair.
//!
//! The pairing is driven by the standard array of a binary Hamming code:
//!
//! * `h + 1 = 2^m` (**divisible** case): symbols of the single instance are
//!   grouped by the bits at the failed positions, and group `g` in the
//!   codeword coset pairs with `g XOR e_u` to repair the u-th failed node.
//! * `h + 1 = (2l + 1) 2^m`, `l >= 1` (**non-divisible** case): the code
//!   stacks `2l + 1` instances, groups on a subset of `2^m - 1` failed
//!   positions, and pairs either within instance 0 (as above) or across
//!   instances, where the partner coordinate is the same group reordered by
//!   flipping the target node's bit.

use crate::code::CodeParams;
use crate::hamming::StandardArray;
use crate::{Error, Result};
use serde::Serialize;

/// Which pairing construction a failure pattern uses, derived from `h` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairCase {
    Divisible { m: u32 },
    NonDivisible { m: u32, ell: u32 },
}

impl RepairCase {
    /// Hamming word length `h' = 2^m - 1` (equal to `h` in the divisible case).
    pub fn word_len(&self) -> usize {
        (1usize << self.m()) - 1
    }

    pub fn m(&self) -> u32 {
        match *self {
            RepairCase::Divisible { m } => m,
            RepairCase::NonDivisible { m, .. } => m,
        }
    }

    /// Instances the code must stack: 1, or `2*ell + 1`.
    pub fn instances_required(&self) -> usize {
        match *self {
            RepairCase::Divisible { .. } => 1,
            RepairCase::NonDivisible { ell, .. } => 2 * ell as usize + 1,
        }
    }
}

/// Splits `h + 1` into odd and power-of-two parts to pick the construction.
pub fn detect_case(h: usize) -> Result<RepairCase> {
    if h == 0 {
        return Err(Error::InvalidParameter(
            "failure count h must be at least 1".into(),
        ));
    }
    let m = (h + 1).trailing_zeros();
    let odd = (h + 1) >> m;
    if odd == 1 {
        Ok(RepairCase::Divisible { m })
    } else {
        Ok(RepairCase::NonDivisible {
            m,
            ell: ((odd - 1) / 2) as u32,
        })
    }
}

/// A validated failure pattern: who failed, who helps, who sits out.
#[derive(Debug, Clone)]
pub struct RepairScenario {
    params: CodeParams,
    erased: Vec<usize>,
    helpers: Vec<usize>,
    unconnected: Vec<usize>,
    case: RepairCase,
}

impl RepairScenario {
    pub fn new(params: &CodeParams, erased: &[usize], helpers: &[usize]) -> Result<Self> {
        let n = params.n();
        let erased = sorted_distinct(erased, n)?;
        let helpers = sorted_distinct(helpers, n)?;
        let h = erased.len();
        let max_h = params.r().saturating_sub(1);
        if h == 0 || h > max_h {
            return Err(Error::TooManyFailures { h, max: max_h });
        }
        if helpers.len() != params.k() + 1 {
            return Err(Error::InvalidParameter(format!(
                "need exactly k+1 = {} helpers, got {}",
                params.k() + 1,
                helpers.len()
            )));
        }
        if helpers.iter().any(|j| erased.binary_search(j).is_ok()) {
            return Err(Error::InvalidParameter(
                "helper set overlaps the failed set".into(),
            ));
        }
        let case = detect_case(h)?;
        if params.instances() != case.instances_required() {
            return Err(Error::InstanceMismatch {
                need: case.instances_required(),
                got: params.instances(),
            });
        }
        let unconnected: Vec<usize> = (0..n)
            .filter(|i| erased.binary_search(i).is_err() && helpers.binary_search(i).is_err())
            .collect();
        Ok(RepairScenario {
            params: params.clone(),
            erased,
            helpers,
            unconnected,
            case,
        })
    }

    /// Convenience constructor taking the lowest-indexed `k + 1` survivors as
    /// helpers.
    pub fn with_default_helpers(params: &CodeParams, erased: &[usize]) -> Result<Self> {
        let survivors: Vec<usize> = (0..params.n()).filter(|i| !erased.contains(i)).collect();
        let helpers = crate::cluster::helper_selection(&survivors, params.k())?;
        Self::new(params, erased, &helpers)
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// Failed node ids, ascending. A node's *rank* is its position here.
    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    pub fn unconnected(&self) -> &[usize] {
        &self.unconnected
    }

    pub fn case(&self) -> RepairCase {
        self.case
    }

    pub fn failure_count(&self) -> usize {
        self.erased.len()
    }

    pub fn rank_of(&self, node: usize) -> Option<usize> {
        self.erased.binary_search(&node).ok()
    }

    /// Per-link payload length `N / (h + 1)`, identical for both phases.
    pub fn link_symbols(&self) -> usize {
        self.params.sub_packetization() / (self.failure_count() + 1)
    }

    /// The failed positions whose bits define the grouping: all of them in
    /// the divisible case, every `(2l+1)`-th in the non-divisible case.
    fn grouping_positions(&self) -> Vec<usize> {
        match self.case {
            RepairCase::Divisible { .. } => self.erased.clone(),
            RepairCase::NonDivisible { .. } => {
                let span = self.case.instances_required();
                self.erased
                    .iter()
                    .copied()
                    .step_by(span)
                    .take(self.case.word_len())
                    .collect()
            }
        }
    }
}

fn sorted_distinct(ids: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateNode(w[0]));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange(bad));
    }
    Ok(sorted)
}

/// The base-coordinate groups `S_g`: group `g` holds, in ascending order, the
/// coordinates whose bits at the grouping positions spell `g`.
///
/// Groups are shared by all instances in their default (ascending) order; the
/// per-node reorderings of the non-divisible pairing are applied at pair
/// emission time, never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    word_len: usize,
    groups: Vec<Vec<u32>>,
}

impl GroupTable {
    pub fn group(&self, g: u32) -> &[u32] {
        &self.groups[g as usize]
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group_size(&self) -> usize {
        self.groups[0].len()
    }

    /// Word length of the group index (`h` or `h'`).
    pub fn word_len(&self) -> usize {
        self.word_len
    }
}

fn partition_by_bits(n: usize, positions: &[usize]) -> GroupTable {
    let group_count = 1usize << positions.len();
    let mut groups = vec![Vec::with_capacity((1usize << n) / group_count); group_count];
    for a in 0..1u32 << n {
        let g = positions
            .iter()
            .enumerate()
            .fold(0usize, |acc, (u, &p)| acc | ((a as usize >> p & 1) << u));
        groups[g].push(a);
    }
    GroupTable {
        word_len: positions.len(),
        groups,
    }
}

/// Groups for the divisible case: one bit per failed node.
pub fn build_groups_divisible(scenario: &RepairScenario) -> Result<GroupTable> {
    match scenario.case() {
        RepairCase::Divisible { .. } => Ok(partition_by_bits(
            scenario.params().n(),
            &scenario.grouping_positions(),
        )),
        _ => Err(Error::CaseMismatch {
            expected: "divisible",
        }),
    }
}

/// Groups for the non-divisible case: one bit per `(2l+1)`-th failed node.
pub fn build_groups_nondivisible(scenario: &RepairScenario) -> Result<GroupTable> {
    match scenario.case() {
        RepairCase::NonDivisible { .. } => Ok(partition_by_bits(
            scenario.params().n(),
            &scenario.grouping_positions(),
        )),
        _ => Err(Error::CaseMismatch {
            expected: "non-divisible",
        }),
    }
}

pub fn build_groups(scenario: &RepairScenario) -> GroupTable {
    partition_by_bits(scenario.params().n(), &scenario.grouping_positions())
}

/// One coordinate pair of a node's plan, with its derivation recorded:
/// `left` comes from slot `slot` of group `group` in instance `instance`,
/// `right` from the paired group/instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub left: usize,
    pub right: usize,
    pub group: u32,
    pub paired_group: u32,
    pub slot: u32,
    pub instance: u32,
    pub paired_instance: u32,
}

/// All pairs one failed node downloads against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodePlan {
    pub node: usize,
    pub pairs: Vec<PairRecord>,
}

/// The pairing plans of every failed node, in rank order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingPlan {
    pub nodes: Vec<NodePlan>,
}

impl PairingPlan {
    pub fn plan_for(&self, node: usize) -> Option<&NodePlan> {
        self.nodes.iter().find(|p| p.node == node)
    }

    /// Canonical JSON rendering of the plan together with its scenario, for
    /// golden-file comparisons and transcripts.
    pub fn to_canonical_json(&self, scenario: &RepairScenario) -> String {
        #[derive(Serialize)]
        struct Document<'a> {
            n: usize,
            k: usize,
            q: u16,
            instances: usize,
            erased: &'a [usize],
            helpers: &'a [usize],
            case: RepairCase,
            nodes: &'a [NodePlan],
        }
        serde_json::to_string(&Document {
            n: scenario.params().n(),
            k: scenario.params().k(),
            q: scenario.params().modulus(),
            instances: scenario.params().instances(),
            erased: scenario.erased(),
            helpers: scenario.helpers(),
            case: scenario.case(),
            nodes: &self.nodes,
        })
        .expect("plan serialization cannot fail")
    }
}

/// Divisible pairing: rank-`u` node pairs every codeword group `g` with
/// `g XOR e_u`, slot by slot. Both sides live in the single instance.
pub fn pair_divisible(
    scenario: &RepairScenario,
    table: &GroupTable,
    array: &StandardArray,
) -> Result<PairingPlan> {
    if !matches!(scenario.case(), RepairCase::Divisible { .. }) {
        return Err(Error::CaseMismatch {
            expected: "divisible",
        });
    }
    let nodes = scenario
        .erased()
        .iter()
        .enumerate()
        .map(|(u, &node)| {
            let mut pairs = Vec::with_capacity(scenario.link_symbols());
            for &g in array.codewords() {
                let paired = g ^ (1 << u);
                for (v, (&left, &right)) in table
                    .group(g)
                    .iter()
                    .zip(table.group(paired))
                    .enumerate()
                {
                    pairs.push(PairRecord {
                        left: left as usize,
                        right: right as usize,
                        group: g,
                        paired_group: paired,
                        slot: v as u32,
                        instance: 0,
                        paired_instance: 0,
                    });
                }
            }
            debug_assert_eq!(pairs.len(), scenario.link_symbols());
            NodePlan { node, pairs }
        })
        .collect();
    Ok(PairingPlan { nodes })
}

/// Non-divisible pairing. With `u = (2l+1) u1 + u2`:
///
/// * `u2 = 0, u1 < h'`: intra-instance pairs in instance 0, exactly the
///   divisible rule on the reduced word length;
/// * `u2 > 0, u1 < h'`: coset `u1` of instance 0 pairs with the same coset of
///   instance `u2`, partner coordinate = own coordinate with the node's bit
///   flipped;
/// * `u1 = h'`: coset `h'` of instance 0 pairs with instance `u2 + 1`, same
///   flipped-bit partner.
pub fn pair_nondivisible(
    scenario: &RepairScenario,
    table: &GroupTable,
    array: &StandardArray,
) -> Result<PairingPlan> {
    let RepairCase::NonDivisible { ell, .. } = scenario.case() else {
        return Err(Error::CaseMismatch {
            expected: "non-divisible",
        });
    };
    let span = 2 * ell as usize + 1;
    let word_len = scenario.case().word_len();
    let base_len = scenario.params().base_len();
    let nodes = scenario
        .erased()
        .iter()
        .enumerate()
        .map(|(u, &node)| {
            let u1 = u / span;
            let u2 = u % span;
            let mut pairs = Vec::with_capacity(scenario.link_symbols());
            if u1 < word_len && u2 == 0 {
                for &g in array.codewords() {
                    let paired = g ^ (1 << u1);
                    for (v, (&left, &right)) in
                        table.group(g).iter().zip(table.group(paired)).enumerate()
                    {
                        pairs.push(PairRecord {
                            left: left as usize,
                            right: right as usize,
                            group: g,
                            paired_group: paired,
                            slot: v as u32,
                            instance: 0,
                            paired_instance: 0,
                        });
                    }
                }
            } else {
                let (coset, partner_instance) = if u1 < word_len {
                    (u1, u2)
                } else {
                    (word_len, u2 + 1)
                };
                for &g in array.coset(coset) {
                    for (v, &base) in table.group(g).iter().enumerate() {
                        let flipped = base as usize ^ (1 << node);
                        pairs.push(PairRecord {
                            left: base as usize,
                            right: partner_instance * base_len + flipped,
                            group: g,
                            paired_group: g,
                            slot: v as u32,
                            instance: 0,
                            paired_instance: partner_instance as u32,
                        });
                    }
                }
            }
            debug_assert_eq!(pairs.len(), scenario.link_symbols());
            NodePlan { node, pairs }
        })
        .collect();
    Ok(PairingPlan { nodes })
}

/// Builds the plan appropriate for the scenario's case.
pub fn build_pairing(scenario: &RepairScenario) -> Result<PairingPlan> {
    let table = build_groups(scenario);
    let array = StandardArray::new(scenario.case().m());
    match scenario.case() {
        RepairCase::Divisible { .. } => pair_divisible(scenario, &table, &array),
        RepairCase::NonDivisible { .. } => pair_nondivisible(scenario, &table, &array),
    }
}

/// Checks the pairing conditions on every emitted pair: the target node's
/// coefficients must differ across the pair while every other node's agree.
pub fn validate_plan(scenario: &RepairScenario, plan: &PairingPlan) -> Result<()> {
    let params = scenario.params();
    for node_plan in &plan.nodes {
        for pair in &node_plan.pairs {
            let own_differ =
                params.lambda_at(node_plan.node, pair.left) != params.lambda_at(node_plan.node, pair.right);
            if !own_differ {
                return Err(Error::Protocol(format!(
                    "pair ({}, {}) of node {} has equal own coefficients",
                    pair.left, pair.right, node_plan.node
                )));
            }
            for i in (0..params.n()).filter(|&i| i != node_plan.node) {
                if params.lambda_at(i, pair.left) != params.lambda_at(i, pair.right) {
                    return Err(Error::Protocol(format!(
                        "pair ({}, {}) of node {} disturbs node {}",
                        pair.left, pair.right, node_plan.node, i
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeParams;

    fn divisible_scenario() -> RepairScenario {
        let params = CodeParams::new(14, 2, 29, 1).unwrap();
        RepairScenario::new(&params, &[0, 1, 2], &[3, 4, 5]).unwrap()
    }

    #[test]
    fn case_detection() {
        assert_eq!(detect_case(1).unwrap(), RepairCase::Divisible { m: 1 });
        assert_eq!(detect_case(3).unwrap(), RepairCase::Divisible { m: 2 });
        assert_eq!(detect_case(7).unwrap(), RepairCase::Divisible { m: 3 });
        assert_eq!(
            detect_case(2).unwrap(),
            RepairCase::NonDivisible { m: 0, ell: 1 }
        );
        assert_eq!(
            detect_case(5).unwrap(),
            RepairCase::NonDivisible { m: 1, ell: 1 }
        );
        assert_eq!(
            detect_case(11).unwrap(),
            RepairCase::NonDivisible { m: 2, ell: 1 }
        );
        assert_eq!(
            detect_case(9).unwrap(),
            RepairCase::NonDivisible { m: 1, ell: 2 }
        );
        assert!(detect_case(0).is_err());
    }

    #[test]
    fn scenario_validation() {
        let params = CodeParams::new(6, 2, 13, 1).unwrap();
        assert!(RepairScenario::new(&params, &[0, 1, 2], &[3, 4, 5]).is_ok());
        // h = r = 4 leaves no room for k+1 helpers.
        assert_eq!(
            RepairScenario::new(&params, &[0, 1, 2, 3], &[4, 5]).unwrap_err(),
            Error::TooManyFailures { h: 4, max: 3 }
        );
        assert!(matches!(
            RepairScenario::new(&params, &[0, 1, 2], &[2, 3, 4]).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        assert!(matches!(
            RepairScenario::new(&params, &[0, 1, 2], &[3, 4]).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        // h = 2 needs 3 instances.
        assert_eq!(
            RepairScenario::new(&params, &[0, 1], &[2, 3, 4]).unwrap_err(),
            Error::InstanceMismatch { need: 3, got: 1 }
        );
    }

    #[test]
    fn groups_divisible_shape() {
        let s = divisible_scenario();
        let table = build_groups_divisible(&s).unwrap();
        assert_eq!(table.group_count(), 8);
        for g in 0..8 {
            assert_eq!(table.group(g).len(), 1 << 11);
            assert!(table.group(g).windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(&table.group(0)[..4], &[0, 8, 16, 24]);
        assert_eq!(table.group(7)[0], 7);
        // Each coordinate lands in exactly one group.
        let total: usize = (0..8).map(|g| table.group(g).len()).sum();
        assert_eq!(total, 1 << 14);
        assert!(matches!(
            build_groups_nondivisible(&s),
            Err(Error::CaseMismatch { .. })
        ));
    }

    #[test]
    fn pairing_divisible_matches_coset_table() {
        let s = divisible_scenario();
        let table = build_groups_divisible(&s).unwrap();
        let array = StandardArray::new(2);
        let plan = pair_divisible(&s, &table, &array).unwrap();

        // Node 0 pairs (V_0, V_1): groups 0<->1 and 7<->6.
        let node0 = plan.plan_for(0).unwrap();
        let seen: Vec<(u32, u32)> = node0
            .pairs
            .iter()
            .map(|p| (p.group, p.paired_group))
            .collect();
        assert!(seen.iter().all(|&gp| gp == (0, 1) || gp == (7, 6)));
        // Node 2 pairs (V_0, V_3): groups 0<->4 and 7<->3.
        let node2 = plan.plan_for(2).unwrap();
        assert!(node2
            .pairs
            .iter()
            .all(|p| (p.group, p.paired_group) == (0, 4) || (p.group, p.paired_group) == (7, 3)));

        validate_plan(&s, &plan).unwrap();
        for np in &plan.nodes {
            assert_eq!(np.pairs.len(), s.link_symbols());
            // The paired coordinate is always the left one with the node's
            // bit flipped.
            for p in &np.pairs {
                assert_eq!(p.right, p.left ^ (1 << np.node));
            }
        }
    }

    #[test]
    fn pairing_divisible_coverage() {
        let params = CodeParams::new(6, 2, 13, 1).unwrap();
        let s = RepairScenario::new(&params, &[1, 3, 4], &[0, 2, 5]).unwrap();
        let plan = build_pairing(&s).unwrap();
        validate_plan(&s, &plan).unwrap();
        // Per node: no coordinate repeats within the plan.
        for np in &plan.nodes {
            let mut seen = vec![false; params.base_len()];
            for p in &np.pairs {
                assert!(!seen[p.left] && !seen[p.right]);
                seen[p.left] = true;
                seen[p.right] = true;
            }
        }
        // Across nodes: left cosets are shared, right cosets are disjoint,
        // and together they reach every coordinate (the standard-array cover).
        let mut covered = vec![false; params.base_len()];
        for np in &plan.nodes {
            for p in &np.pairs {
                covered[p.left] = true;
                covered[p.right] = true;
            }
        }
        assert!(covered.iter().all(|&b| b));
    }

    #[test]
    fn groups_nondivisible_shape() {
        // m = 0: a single all-coordinates group.
        let params = CodeParams::new(6, 3, 13, 3).unwrap();
        let s = RepairScenario::new(&params, &[0, 1], &[2, 3, 4, 5]).unwrap();
        let table = build_groups_nondivisible(&s).unwrap();
        assert_eq!(table.group_count(), 1);
        assert_eq!(table.group(0).len(), 64);
        assert!(table.group(0).windows(2).all(|w| w[0] < w[1]));

        // m = 2, l = 1 at paper scale: grouping bits are failed ranks 0, 3, 6.
        let params = CodeParams::new(14, 2, 29, 3).unwrap();
        let erased: Vec<usize> = (0..11).collect();
        let s = RepairScenario::new(&params, &erased, &[11, 12, 13]).unwrap();
        let table = build_groups_nondivisible(&s).unwrap();
        assert_eq!(table.group_count(), 8);
        assert_eq!(table.group_size(), 1 << 11);
        for g in 0..8u32 {
            for &a in table.group(g) {
                let spelled = (a & 1) | (a >> 3 & 1) << 1 | (a >> 6 & 1) << 2;
                assert_eq!(spelled, g);
            }
        }
    }

    #[test]
    fn pairing_nondivisible_matches_reorder_table() {
        let params = CodeParams::new(14, 2, 29, 3).unwrap();
        let erased: Vec<usize> = (0..11).collect();
        let s = RepairScenario::new(&params, &erased, &[11, 12, 13]).unwrap();
        let table = build_groups_nondivisible(&s).unwrap();
        let array = StandardArray::new(2);
        let plan = pair_nondivisible(&s, &table, &array).unwrap();
        let base = params.base_len();

        // Node 1 (u1=0, u2=1): {0} x V_0 with {1} x V_0, partner = own ^ bit 1.
        let node1 = plan.plan_for(1).unwrap();
        for p in &node1.pairs {
            assert!(p.group == 0 || p.group == 7);
            assert_eq!(p.paired_group, p.group);
            assert_eq!(p.instance, 0);
            assert_eq!(p.paired_instance, 1);
            assert_eq!(p.right, base + (p.left ^ (1 << 1)));
        }
        // Node 9 (u1=3=h', u2=0): {0} x V_3 with {1} x V_3, partner = own ^ bit 9.
        let node9 = plan.plan_for(9).unwrap();
        for p in &node9.pairs {
            assert!(p.group == 4 || p.group == 3);
            assert_eq!(p.paired_instance, 1);
            assert_eq!(p.right, base + (p.left ^ (1 << 9)));
        }
        // Node 10 (u1=3, u2=1): {0} x V_3 with {2} x V_3.
        let node10 = plan.plan_for(10).unwrap();
        assert!(node10.pairs.iter().all(|p| p.paired_instance == 2));

        // Node 0 and node 3 use intra-instance pairing (V_0 with V_1 / V_2).
        let node0 = plan.plan_for(0).unwrap();
        assert!(node0.pairs.iter().all(|p| p.paired_instance == 0));
        let node3 = plan.plan_for(3).unwrap();
        assert!(node3
            .pairs
            .iter()
            .all(|p| (p.group, p.paired_group) == (0, 2) || (p.group, p.paired_group) == (7, 5)));

        validate_plan(&s, &plan).unwrap();
        for np in &plan.nodes {
            assert_eq!(np.pairs.len(), s.link_symbols());
        }
    }

    #[test]
    fn nondivisible_reorder_is_a_permutation() {
        // Flipping an unconstrained bit maps each group onto itself.
        let params = CodeParams::new(9, 3, 19, 3).unwrap();
        let erased: Vec<usize> = (0..5).collect();
        let s = RepairScenario::new(&params, &erased, &[5, 6, 7, 8]).unwrap();
        let table = build_groups_nondivisible(&s).unwrap();
        // Grouping bit is node 0; nodes 1..5 are unconstrained.
        for &node in &[1usize, 2, 3, 4] {
            for g in 0..table.group_count() as u32 {
                let mut flipped: Vec<u32> = table
                    .group(g)
                    .iter()
                    .map(|&a| a ^ (1 << node))
                    .collect();
                flipped.sort_unstable();
                assert_eq!(&flipped[..], table.group(g));
            }
        }
    }

    #[test]
    fn conditions_hold_for_h5_scenario() {
        let params = CodeParams::new(9, 3, 19, 3).unwrap();
        let s = RepairScenario::new(&params, &[0, 2, 3, 6, 8], &[1, 4, 5, 7]).unwrap();
        assert_eq!(s.case(), RepairCase::NonDivisible { m: 1, ell: 1 });
        let plan = build_pairing(&s).unwrap();
        validate_plan(&s, &plan).unwrap();
    }

    #[test]
    fn degenerate_single_failure() {
        let params = CodeParams::new(4, 2, 11, 1).unwrap();
        let s = RepairScenario::new(&params, &[0], &[1, 2, 3]).unwrap();
        assert_eq!(s.case(), RepairCase::Divisible { m: 1 });
        let plan = build_pairing(&s).unwrap();
        validate_plan(&s, &plan).unwrap();
        let pairs = &plan.plan_for(0).unwrap().pairs;
        assert_eq!(pairs.len(), 8);
        assert!(pairs.iter().all(|p| p.right == p.left + 1 && p.left % 2 == 0));
    }
}
