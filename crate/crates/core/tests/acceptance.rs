//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with its measured time. Every check is exact — field-element
//! equality, integer bandwidth equality — with wall-clock ceilings where the
//! criterion carries one.
//!
//! Run with `cargo test -p coopmsr --test acceptance` (add `-- --nocapture`
//! to see the PASS lines).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use coopmsr::cluster::{helper_selection, Cluster};
use coopmsr::code::{encode, mds_reconstruct, CodeParams, Codeword};
use coopmsr::gf::FieldElement;
use coopmsr::grouping::{build_pairing, detect_case, RepairCase, RepairScenario};
use coopmsr::hamming::StandardArray;
use coopmsr::rng::SplitMix64;

fn random_data(params: &CodeParams, seed: u64) -> Vec<Vec<FieldElement>> {
    let mut s = SplitMix64::new(seed);
    let field = params.field();
    (0..params.k())
        .map(|_| {
            (0..params.sub_packetization())
                .map(|_| field.element(s.next_u64()))
                .collect()
        })
        .collect()
}

fn random_codeword(params: &CodeParams, seed: u64) -> Codeword {
    encode(params, &random_data(params, seed)).unwrap()
}

/// All size-`pick` subsets of `0..n`, ascending.
fn subsets(n: usize, pick: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, pick: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == pick {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, pick, current, out);
            current.pop();
        }
    }
    rec(0, n, pick, &mut current, &mut out);
    out
}

fn finish(criterion: &str, detail: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("criterion {criterion}: PASS ({detail}, {:.2?})", elapsed);
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_01_mds_exhaustive() {
    let started = Instant::now();
    let params = CodeParams::new(6, 2, 13, 1).unwrap();
    let original = random_codeword(&params, 0xC1);
    let mut checked = 0;
    for subset in subsets(6, 2) {
        let picked: Vec<_> = subset.iter().map(|&i| original.shard(i).clone()).collect();
        let rebuilt = mds_reconstruct(&params, &picked).unwrap();
        assert_eq!(rebuilt, original, "subset {subset:?}");
        checked += 1;
    }
    assert_eq!(checked, 15);
    finish("1", "15/15 k-subsets reconstruct exactly", started, Duration::from_secs(1));
}

#[test]
fn criterion_02_divisible_cooperative_repair() {
    let started = Instant::now();
    let params = CodeParams::new(6, 2, 13, 1).unwrap();
    let failure_sets = subsets(6, 3);
    assert_eq!(failure_sets.len(), 20);
    let mut repairs = 0;
    for seed in 0..100u64 {
        let codeword = random_codeword(&params, seed);
        for erased in &failure_sets {
            let mut cluster = Cluster::from_codeword(params.clone(), codeword.clone());
            cluster.inject_failures(erased).unwrap();
            let report = cluster.run_repair(None).unwrap();
            assert!(report.correct, "seed {seed} erased {erased:?}");
            assert_eq!(report.gamma_total, 240);
            assert!(report.optimal);
            // Every link in both phases carries exactly 16 symbols.
            for t in cluster.ledger() {
                assert_eq!(t.n_symbols, 16, "link {t:?}");
            }
            for &i in erased {
                assert_eq!(cluster.shard(i).unwrap(), codeword.shard(i));
            }
            repairs += 1;
        }
    }
    assert_eq!(repairs, 2000);
    finish(
        "2",
        "2000 repairs exact, gamma=240, beta1=beta2=16 per link",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_03_paper_scale_divisible() {
    let started = Instant::now();
    let params = CodeParams::new(14, 2, 29, 1).unwrap();
    let codeword = random_codeword(&params, 0xE3);
    let mut cluster = Cluster::from_codeword(params.clone(), codeword.clone());
    cluster.inject_failures(&[0, 1, 2]).unwrap();
    let report = cluster.run_repair(Some(&[3, 4, 5])).unwrap();
    assert!(report.correct);
    assert_eq!(report.gamma_total, 61_440);
    assert_eq!(report.gamma_total, 3 * 5 * (1u64 << 14) / 4);
    assert!(report.optimal);
    finish("3", "n=14 repair exact, gamma=61440", started, Duration::from_secs(30));
}

#[test]
fn criterion_04_nondivisible_m0() {
    let started = Instant::now();
    let params = CodeParams::new(6, 3, 13, 3).unwrap();
    assert_eq!(params.sub_packetization(), 192);
    let codeword = random_codeword(&params, 0xE4);
    let mut cluster = Cluster::from_codeword(params.clone(), codeword.clone());
    cluster.inject_failures(&[0, 1]).unwrap();
    let report = cluster.run_repair(None).unwrap();
    assert!(report.correct);
    assert_eq!(report.gamma1, 512);
    assert_eq!(report.gamma2, 128);
    assert_eq!(report.gamma_total, 640);
    assert!(report.optimal);
    finish(
        "4",
        "h=2 over 3 instances exact, gamma=640 (512+128)",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_05_nondivisible_m1() {
    let started = Instant::now();
    let params = CodeParams::new(9, 3, 19, 3).unwrap();
    assert_eq!(params.sub_packetization(), 1536);
    let codeword = random_codeword(&params, 0xE5);
    let mut rng = SplitMix64::new(0xE5E5);
    let all_sets = subsets(9, 5);
    for _ in 0..20 {
        let erased = &all_sets[rng.next_below(all_sets.len() as u64) as usize];
        let mut cluster = Cluster::from_codeword(params.clone(), codeword.clone());
        cluster.inject_failures(erased).unwrap();
        let report = cluster.run_repair(None).unwrap();
        assert!(report.correct, "erased {erased:?}");
        assert_eq!(report.gamma_total, 10_240);
        assert_eq!(report.gamma_total, 5 * 8 * 1536 / 6);
        assert!(report.optimal);
    }
    finish(
        "5",
        "20 random h=5 failure sets exact, gamma=10240",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_standard_array_cover() {
    let started = Instant::now();
    for m in 0..=4u32 {
        let arr = StandardArray::new(m);
        let word_len = arr.word_len();
        let mut seen = vec![false; 1 << word_len];
        for coset in arr.cosets() {
            for &w in coset {
                assert!(!seen[w as usize], "m={m}: word {w} appears twice");
                seen[w as usize] = true;
            }
        }
        assert!(seen.iter().all(|&b| b), "m={m}: cover incomplete");
    }
    let arr = StandardArray::new(2);
    assert_eq!(arr.cosets(), &[vec![0, 7], vec![1, 6], vec![2, 5], vec![4, 3]]);
    finish(
        "6",
        "cosets tile the cube for m in 0..=4, m=2 table exact",
        started,
        Duration::from_secs(1),
    );
}

fn smallest_prime_geq(x: usize) -> u16 {
    let mut q = x as u16;
    loop {
        if coopmsr::gf::is_prime(q) {
            return q;
        }
        q += 1;
    }
}

/// Draws a random valid scenario: divisible when `divisible` is set,
/// stacked-instance otherwise. Helpers are a random survivor subset, not
/// just the lowest ones.
fn random_scenario(rng: &mut SplitMix64, divisible: bool) -> RepairScenario {
    loop {
        let n = 5 + rng.next_below(5) as usize; // 5..=9
        let h_choices: Vec<usize> = (1..n - 2)
            .filter(|&h| {
                let case = detect_case(h).unwrap();
                matches!(case, RepairCase::Divisible { .. }) == divisible
            })
            .collect();
        if h_choices.is_empty() {
            continue;
        }
        let h = h_choices[rng.next_below(h_choices.len() as u64) as usize];
        // Need k >= 2 and h <= r-1 = n-k-1, i.e. k <= n-h-1.
        if n < h + 3 {
            continue;
        }
        let k = 2 + rng.next_below((n - h - 2) as u64) as usize;
        let q = smallest_prime_geq(2 * n + 1);
        let instances = detect_case(h).unwrap().instances_required();
        let params = CodeParams::new(n, k, q, instances).unwrap();

        let mut nodes: Vec<usize> = (0..n).collect();
        // Fisher-Yates on the node list, then split off failed and helpers.
        for i in (1..n).rev() {
            let j = rng.next_below(i as u64 + 1) as usize;
            nodes.swap(i, j);
        }
        let erased: Vec<usize> = nodes[..h].to_vec();
        let helpers: Vec<usize> = nodes[h..h + k + 1].to_vec();
        return RepairScenario::new(&params, &erased, &helpers).unwrap();
    }
}

#[test]
fn criterion_07_pairing_condition_soundness() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0xC7);
    let mut pairs_checked = 0u64;
    for trial in 0..200 {
        let scenario = random_scenario(&mut rng, trial % 2 == 0);
        let params = scenario.params();
        let plan = build_pairing(&scenario).unwrap();
        for node_plan in &plan.nodes {
            for pair in &node_plan.pairs {
                assert_ne!(
                    params.lambda_at(node_plan.node, pair.left),
                    params.lambda_at(node_plan.node, pair.right),
                    "trial {trial}: target coefficients equal on pair {pair:?}"
                );
                for i in (0..params.n()).filter(|&i| i != node_plan.node) {
                    assert_eq!(
                        params.lambda_at(i, pair.left),
                        params.lambda_at(i, pair.right),
                        "trial {trial}: node {i} disturbed by pair {pair:?}"
                    );
                }
                pairs_checked += 1;
            }
        }
    }
    finish(
        "7",
        &format!("200 scenarios, {pairs_checked} pairs satisfy both conditions"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_08_measured_bandwidth_meets_bound_with_equality() {
    let started = Instant::now();
    // One representative per criterion-2..5 family; gamma is measured from
    // the ledger and compared against the bound written out in full.
    let families: [(usize, usize, u16, Vec<usize>); 4] = [
        (6, 2, 13, vec![0, 1, 2]),
        (14, 2, 29, vec![0, 1, 2]),
        (6, 3, 13, vec![0, 1]),
        (9, 3, 19, vec![0, 1, 2, 3, 4]),
    ];
    for (n, k, q, erased) in families {
        let h = erased.len();
        let instances = detect_case(h).unwrap().instances_required();
        let params = CodeParams::new(n, k, q, instances).unwrap();
        let codeword = random_codeword(&params, 0xE8);
        let mut cluster = Cluster::from_codeword(params.clone(), codeword);
        cluster.inject_failures(&erased).unwrap();
        let report = cluster.run_repair(None).unwrap();
        let measured: u64 = cluster.ledger().iter().map(|t| t.n_symbols as u64).sum();
        let (d, big_n) = (k + 1, params.sub_packetization());
        let bound = (h * (d + h - 1) * big_n / (d - k + h)) as u64;
        assert_eq!(measured, bound, "n={n} k={k} h={h}");
        assert_eq!(report.gamma_total, bound);
        assert!(report.optimal);
    }
    finish("8", "ledger gamma equals the lower bound exactly", started, Duration::from_secs(30));
}

#[test]
fn criterion_09_oracle_equivalence_small_codes() {
    let started = Instant::now();
    // Every (n <= 6) parameter family this artifact supports, swept over all
    // failure sets: cooperative repair must produce byte-identical shards to
    // the naive reconstruct-from-any-k oracle.
    let families: [(usize, usize, u16, usize, usize); 5] = [
        (6, 2, 13, 1, 3), // divisible h=3
        (6, 2, 13, 1, 1), // degenerate single failure
        (6, 3, 13, 3, 2), // non-divisible m=0
        (5, 2, 11, 3, 2), // non-divisible m=0, odd n
        (4, 2, 11, 1, 1), // minimal divisible
    ];
    let mut scenarios = 0;
    for (n, k, q, instances, h) in families {
        let params = CodeParams::new(n, k, q, instances).unwrap();
        let codeword = random_codeword(&params, 0xE9 + n as u64);
        for erased in subsets(n, h) {
            let survivors: Vec<usize> = (0..n).filter(|i| !erased.contains(i)).collect();
            let helpers = helper_selection(&survivors, k).unwrap();
            let scenario = RepairScenario::new(&params, &erased, &helpers).unwrap();
            let helper_shards: BTreeMap<usize, &coopmsr::Shard> = helpers
                .iter()
                .map(|&j| (j, codeword.shard(j)))
                .collect();
            let outcome = coopmsr::repair::cooperative_repair(&scenario, &helper_shards).unwrap();

            let oracle_input: Vec<coopmsr::Shard> = survivors[..k]
                .iter()
                .map(|&i| codeword.shard(i).clone())
                .collect();
            let oracle = mds_reconstruct(&params, &oracle_input).unwrap();
            for shard in &outcome.repaired {
                assert_eq!(
                    shard,
                    oracle.shard(shard.node_id),
                    "n={n} k={k} h={h} erased={erased:?}"
                );
            }
            scenarios += 1;
        }
    }
    finish(
        "9",
        &format!("{scenarios} scenarios equal the naive MDS oracle"),
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_10_sub_packetization_ratio() {
    let started = Instant::now();
    // Divisible: N = 2^n against the (h+1) 2^n of the space-sharing scheme.
    for (n, h) in [(14usize, 3usize), (6, 1), (8, 7)] {
        let case = detect_case(h).unwrap();
        assert!(matches!(case, RepairCase::Divisible { .. }));
        let ours = 1u64 << n;
        let prior = (h as u64 + 1) << n;
        assert_eq!(prior / ours, h as u64 + 1);
        assert_eq!(prior % ours, 0);
    }
    // Non-divisible: N = (2l+1) 2^n against (h+1) 2^n = (2l+1) 2^(n+m).
    for (n, h) in [(14usize, 11usize), (6, 2), (9, 5)] {
        let RepairCase::NonDivisible { m, ell } = detect_case(h).unwrap() else {
            panic!("expected non-divisible case for h={h}");
        };
        let ours = (2 * ell as u64 + 1) << n;
        let prior = (h as u64 + 1) << n;
        assert_eq!(prior, (2 * ell as u64 + 1) << (n as u32 + m));
        assert_eq!(prior / ours, 1 << m);
        assert_eq!(prior % ours, 0);
    }
    finish(
        "10",
        "ratios are exactly h+1 (divisible) and 2^m (non-divisible)",
        started,
        Duration::from_secs(1),
    );
}
