//! Subcommand implementations. Each returns the process exit code on the
//! success path; failures map through [`CliError`].

use crate::shard_file::{bits_per_element, pack_bits, unpack_bits, ShardFile};
use crate::CliError;
use coopmsr::cluster::{
    audit_transfers, optimal_bandwidth, Cluster, Phase, RepairReport, TransferRecord,
};
use coopmsr::code::{encode as encode_data, mds_reconstruct, CodeParams, Codeword, Shard};
use coopmsr::gf::FieldElement;
use coopmsr::grouping::{detect_case, RepairCase};
use coopmsr::rng::SplitMix64;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

fn smallest_prime_geq(x: usize) -> u16 {
    (x as u16..).find(|&q| coopmsr::gf::is_prime(q)).unwrap()
}

fn case_name(case: RepairCase) -> &'static str {
    match case {
        RepairCase::Divisible { .. } => "divisible",
        RepairCase::NonDivisible { .. } => "non_divisible",
    }
}

fn case_ell(case: RepairCase) -> usize {
    match case {
        RepairCase::Divisible { .. } => 0,
        RepairCase::NonDivisible { ell, .. } => ell as usize,
    }
}

/// Validates (n, k, q, h) as a repairable configuration and returns the code
/// parameters plus the detected case.
fn scheme_for(n: usize, k: usize, q: u16, h: usize) -> Result<(CodeParams, RepairCase), CliError> {
    let case = detect_case(h)?;
    let params = CodeParams::new(n, k, q, case.instances_required())?;
    if h > params.r() - 1 {
        return Err(CliError::param(format!(
            "h = {h} exceeds the repairable maximum r-1 = {} for (n={n}, k={k})",
            params.r() - 1
        )));
    }
    Ok((params, case))
}

pub fn params(n: usize, k: usize, q: u16, h: usize, json: bool) -> Result<u8, CliError> {
    let (params, case) = scheme_for(n, k, q, h)?;
    let sub = params.sub_packetization() as u64;
    // The space-sharing construction at d = k+1 needs (h+1) * 2^n.
    let prior = (h as u64 + 1) << n;
    let ratio = prior / sub;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "n": n, "k": k, "q": q, "h": h, "d": k + 1,
                "case": case_name(case),
                "m": case.m(),
                "ell": case_ell(case),
                "instances": params.instances(),
                "sub_packetization": sub,
                "prior_sub_packetization": prior,
                "ratio": ratio,
            })
        );
    } else {
        println!("(n, k) = ({n}, {k}), r = {}, q = {q}, d = k+1 = {}", n - k, k + 1);
        println!(
            "h = {h} failures: {} case (h+1 = {}), m = {}, ell = {}",
            case_name(case),
            h + 1,
            case.m(),
            case_ell(case),
        );
        println!(
            "instances = {}, sub-packetization N = {sub}",
            params.instances()
        );
        println!("space-sharing scheme at d = k+1: N = {prior}");
        println!("ratio: {ratio}x smaller");
    }
    Ok(0)
}

fn instances_from_flags(
    n: usize,
    k: usize,
    h: Option<usize>,
    ell: Option<usize>,
) -> Result<usize, CliError> {
    let derived = match h {
        Some(h) => {
            let case = detect_case(h)?;
            let r = n.checked_sub(k).unwrap_or(0);
            if r == 0 || h > r - 1 {
                return Err(CliError::param(format!(
                    "h = {h} exceeds the repairable maximum for (n={n}, k={k})"
                )));
            }
            Some(case.instances_required())
        }
        None => None,
    };
    match (derived, ell) {
        (Some(d), Some(l)) if 2 * l + 1 != d => Err(CliError::param(format!(
            "--ell {l} conflicts with --h: the failure pattern needs {d} instances"
        ))),
        (Some(d), _) => Ok(d),
        (None, Some(l)) => Ok(2 * l + 1),
        (None, None) => Ok(1),
    }
}

pub fn encode(
    n: usize,
    k: usize,
    q: u16,
    h: Option<usize>,
    ell: Option<usize>,
    input: &Path,
    out_dir: &Path,
) -> Result<u8, CliError> {
    let instances = instances_from_flags(n, k, h, ell)?;
    let params = CodeParams::new(n, k, q, instances)?;
    let data = fs::read(input).map_err(|e| CliError::io(format!("{}: {e}", input.display())))?;

    let bits = bits_per_element(q);
    let len = params.sub_packetization();
    let stripe_capacity_bits = k * len * bits;
    let stripes = (data.len() * 8).div_ceil(stripe_capacity_bits).max(1);
    let packed = pack_bits(&data, bits, stripes * k * len);

    let field = params.field();
    let mut node_symbols: Vec<Vec<u16>> = vec![Vec::with_capacity(stripes * len); n];
    for s in 0..stripes {
        let columns: Vec<Vec<FieldElement>> = (0..k)
            .map(|i| {
                let start = (s * k + i) * len;
                packed[start..start + len]
                    .iter()
                    .map(|&v| field.element(u64::from(v)))
                    .collect()
            })
            .collect();
        let codeword = encode_data(&params, &columns)?;
        for shard in codeword.shards() {
            node_symbols[shard.node_id].extend(shard.symbols.iter().map(|e| e.value()));
        }
    }

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::io(format!("{}: {e}", out_dir.display())))?;
    for (node_id, symbols) in node_symbols.into_iter().enumerate() {
        let file = ShardFile {
            n: n as u8,
            k: k as u8,
            q,
            instances: instances as u8,
            node_id: node_id as u8,
            data_len: data.len() as u64,
            symbols,
        };
        file.write(&out_dir.join(ShardFile::file_name(node_id)))?;
    }
    println!(
        "wrote {n} shards to {} ({stripes} stripe(s) of N = {len}, {bits} bits/element)",
        out_dir.display()
    );
    Ok(0)
}

/// Loads shard files, checks they describe the same code and payload, and
/// rejects duplicate nodes.
fn load_consistent(paths: &[PathBuf]) -> Result<Vec<ShardFile>, CliError> {
    let mut files = Vec::with_capacity(paths.len());
    for p in paths {
        files.push(ShardFile::read(p)?);
    }
    let key = files[0].header_key();
    for (f, p) in files.iter().zip(paths) {
        if f.header_key() != key {
            return Err(CliError::param(format!(
                "{}: header disagrees with {}",
                p.display(),
                paths[0].display()
            )));
        }
    }
    let mut ids: Vec<u8> = files.iter().map(|f| f.node_id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::param("duplicate node ids among shard files"));
    }
    Ok(files)
}

fn stripe_shard(file: &ShardFile, params: &CodeParams, stripe: usize) -> Shard {
    let len = params.sub_packetization();
    let field = params.field();
    Shard {
        node_id: file.node_id as usize,
        symbols: file.symbols[stripe * len..(stripe + 1) * len]
            .iter()
            .map(|&v| field.element(u64::from(v)))
            .collect(),
    }
}

/// Reconstructs the full codeword of one stripe from the k lowest-node files.
fn reconstruct_stripe(
    files: &[&ShardFile],
    params: &CodeParams,
    stripe: usize,
) -> Result<Codeword, CliError> {
    let k = params.k();
    let mut sorted: Vec<&&ShardFile> = files.iter().collect();
    sorted.sort_by_key(|f| f.node_id);
    let shards: Vec<Shard> = sorted[..k]
        .iter()
        .map(|f| stripe_shard(f, params, stripe))
        .collect();
    Ok(mds_reconstruct(params, &shards)?)
}

pub fn decode(out: &Path, shard_paths: &[PathBuf]) -> Result<u8, CliError> {
    let files = load_consistent(shard_paths)?;
    let params = files[0].params()?;
    let k = params.k();
    if files.len() < k {
        return Err(CliError::param(format!(
            "decoding needs at least k = {k} shards, got {}",
            files.len()
        )));
    }
    let refs: Vec<&ShardFile> = files.iter().collect();
    let stripes = files[0].stripes();
    let len = params.sub_packetization();
    let mut elements = Vec::with_capacity(stripes * k * len);
    for s in 0..stripes {
        let codeword = reconstruct_stripe(&refs, &params, s)?;
        for i in 0..k {
            elements.extend(codeword.shard(i).symbols.iter().map(|e| e.value()));
        }
    }
    let bytes = unpack_bits(
        &elements,
        bits_per_element(params.modulus()),
        files[0].data_len as usize,
    );
    fs::write(out, bytes).map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    println!("decoded {} bytes to {}", files[0].data_len, out.display());
    Ok(0)
}

pub fn verify(shard_paths: &[PathBuf]) -> Result<u8, CliError> {
    let files = load_consistent(shard_paths)?;
    let params = files[0].params()?;
    let k = params.k();
    if files.len() < k + 1 {
        return Err(CliError::param(format!(
            "verification needs at least k+1 = {} shards to cross-check, got {}",
            k + 1,
            files.len()
        )));
    }
    let refs: Vec<&ShardFile> = files.iter().collect();
    let mut bad_nodes = Vec::new();
    for s in 0..files[0].stripes() {
        let codeword = reconstruct_stripe(&refs, &params, s)?;
        if !coopmsr::code::verify_codeword(&params, &codeword) {
            return Err(CliError::verification(format!(
                "stripe {s}: reconstruction violates the parity checks"
            )));
        }
        for f in &files {
            let shard = stripe_shard(f, &params, s);
            if &shard != codeword.shard(f.node_id as usize)
                && !bad_nodes.contains(&f.node_id)
            {
                bad_nodes.push(f.node_id);
            }
        }
    }
    if !bad_nodes.is_empty() {
        return Err(CliError::verification(format!(
            "shards inconsistent with the code: nodes {bad_nodes:?}"
        )));
    }
    println!("ok: {} shards consistent", files.len());
    Ok(0)
}

pub struct RepairArgs {
    pub n: usize,
    pub k: usize,
    pub q: u16,
    pub h: Option<usize>,
    pub ell: Option<usize>,
    pub erased: Vec<usize>,
    pub helpers: Option<Vec<usize>>,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub transcript: Option<PathBuf>,
}

fn seeded_data(params: &CodeParams, seed: u64) -> Vec<Vec<FieldElement>> {
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

fn write_transcript(path: &Path, records: &[TransferRecord]) -> Result<(), CliError> {
    let mut out = String::new();
    for t in records {
        // The payload ordering follows one node's pairing plan: the
        // recipient's in the download phase, the sender's afterwards.
        let plan_node = match t.phase {
            Phase::Download => t.to,
            Phase::Cooperative => t.from,
        };
        let phase = match t.phase {
            Phase::Download => "download",
            Phase::Cooperative => "cooperative",
        };
        out.push_str(&serde_json::json!({
            "phase": phase,
            "from": t.from,
            "to": t.to,
            "n_symbols": t.n_symbols,
            "plan_node": plan_node,
        }).to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn emit_report(report: &RepairReport, json_only: bool) -> u8 {
    if !json_only {
        eprintln!(
            "repair: correct={} optimal={} gamma={}/{} (download {}, cooperative {})",
            report.correct,
            report.optimal,
            report.gamma_total,
            report.gamma_optimal,
            report.gamma1,
            report.gamma2
        );
    }
    println!("{}", report.to_json());
    if report.correct {
        0
    } else {
        3
    }
}

pub fn repair(args: RepairArgs) -> Result<u8, CliError> {
    let mut erased = args.erased.clone();
    erased.sort_unstable();
    erased.dedup();
    if let Some(h) = args.h {
        if h != erased.len() {
            return Err(CliError::param(format!(
                "--h {h} does not match the {} nodes in --erased",
                erased.len()
            )));
        }
    }
    match &args.input {
        Some(dir) => repair_files(&args, dir, &erased),
        None => repair_seeded(&args, &erased),
    }
}

fn repair_seeded(args: &RepairArgs, erased: &[usize]) -> Result<u8, CliError> {
    let instances = if erased.is_empty() {
        args.ell.map_or(1, |l| 2 * l + 1)
    } else {
        instances_from_flags(args.n, args.k, Some(erased.len()), args.ell)?
    };
    let params = CodeParams::new(args.n, args.k, args.q, instances)?;
    let codeword = encode_data(&params, &seeded_data(&params, args.seed))?;
    let mut cluster = Cluster::from_codeword(params.clone(), codeword);
    cluster.inject_failures(erased)?;
    let report = cluster.run_repair(args.helpers.as_deref())?;

    if let Some(path) = &args.transcript {
        write_transcript(path, cluster.ledger())?;
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        for &i in erased {
            let shard = cluster.shard(i).expect("repair restored this node");
            ShardFile {
                n: args.n as u8,
                k: args.k as u8,
                q: args.q,
                instances: instances as u8,
                node_id: i as u8,
                data_len: 0,
                symbols: shard.symbols.iter().map(|e| e.value()).collect(),
            }
            .write(&dir.join(ShardFile::file_name(i)))?;
        }
    }
    Ok(emit_report(&report, args.json))
}

fn repair_files(args: &RepairArgs, dir: &Path, erased: &[usize]) -> Result<u8, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with("shard_") && s.ends_with(".hmsr"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::param(format!(
            "no shard_*.hmsr files in {}",
            dir.display()
        )));
    }
    let files = load_consistent(&paths)?;
    let params = files[0].params()?;
    if params.n() != args.n || params.k() != args.k || params.modulus() != args.q {
        return Err(CliError::param(
            "shard headers disagree with --n/--k/--q".to_string(),
        ));
    }
    let survivors: Vec<&ShardFile> = files
        .iter()
        .filter(|f| !erased.contains(&(f.node_id as usize)))
        .collect();
    if survivors.len() < params.k() {
        return Err(CliError::param(format!(
            "only {} surviving shards on disk, need at least k = {}",
            survivors.len(),
            params.k()
        )));
    }

    let stripes = files[0].stripes();
    let mut ledger: Vec<TransferRecord> = Vec::new();
    let mut all_correct = true;
    let mut restored: Vec<Vec<u16>> = vec![Vec::new(); erased.len()];
    for s in 0..stripes {
        let codeword = reconstruct_stripe(&survivors, &params, s)?;
        for f in &survivors {
            if stripe_shard(f, &params, s) != *codeword.shard(f.node_id as usize) {
                return Err(CliError::verification(format!(
                    "stripe {s}: shard {} inconsistent with the others",
                    f.node_id
                )));
            }
        }
        let mut cluster = Cluster::from_codeword(params.clone(), codeword);
        cluster.inject_failures(erased)?;
        let report = cluster.run_repair(args.helpers.as_deref())?;
        all_correct &= report.correct;
        ledger.extend_from_slice(cluster.ledger());
        for (slot, &i) in erased.iter().enumerate() {
            let shard = cluster.shard(i).expect("repair restored this node");
            restored[slot].extend(shard.symbols.iter().map(|e| e.value()));
        }
    }

    let gamma_optimal = if erased.is_empty() {
        0
    } else {
        stripes as u64
            * optimal_bandwidth(erased.len(), params.k(), params.sub_packetization())
    };
    let report = audit_transfers(&ledger, gamma_optimal, all_correct);

    if let Some(path) = &args.transcript {
        write_transcript(path, &ledger)?;
    }
    if let Some(out_dir) = &args.out {
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::io(format!("{}: {e}", out_dir.display())))?;
        for (slot, &i) in erased.iter().enumerate() {
            ShardFile {
                n: files[0].n,
                k: files[0].k,
                q: files[0].q,
                instances: files[0].instances,
                node_id: i as u8,
                data_len: files[0].data_len,
                symbols: restored[slot].clone(),
            }
            .write(&out_dir.join(ShardFile::file_name(i)))?;
        }
    }
    Ok(emit_report(&report, args.json))
}

pub fn bench(
    n_list: &[usize],
    k_list: &[usize],
    h_list: &[usize],
    q: Option<u16>,
    seed: u64,
) -> Result<u8, CliError> {
    println!("n,k,h,q,instances,case,sub_packetization,gamma,gamma_optimal,optimal,wall_ms,error");
    let mut failed = false;
    for &n in n_list {
        for &k in k_list {
            for &h in h_list {
                let q = q.unwrap_or_else(|| smallest_prime_geq(2 * n + 1));
                match bench_point(n, k, h, q, seed) {
                    Ok((case, sub, report, wall_ms)) => {
                        println!(
                            "{n},{k},{h},{q},{},{},{sub},{},{},{},{wall_ms:.3},",
                            case.instances_required(),
                            case_name(case),
                            report.gamma_total,
                            report.gamma_optimal,
                            report.optimal
                        );
                        if !report.correct || !report.optimal {
                            failed = true;
                        }
                    }
                    Err(e) => {
                        println!("{n},{k},{h},{q},,,,,,,,\"{}\"", e.message);
                        failed = true;
                    }
                }
            }
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn bench_point(
    n: usize,
    k: usize,
    h: usize,
    q: u16,
    seed: u64,
) -> Result<(RepairCase, usize, RepairReport, f64), CliError> {
    let (params, case) = scheme_for(n, k, q, h)?;
    let codeword = encode_data(&params, &seeded_data(&params, seed))?;
    let mut cluster = Cluster::from_codeword(params.clone(), codeword);
    let erased: Vec<usize> = (0..h).collect();
    cluster.inject_failures(&erased)?;
    let started = Instant::now();
    let report = cluster.run_repair(None)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if !report.correct {
        return Err(CliError::verification("repaired shards differ".to_string()));
    }
    Ok((case, params.sub_packetization(), report, wall_ms))
}
