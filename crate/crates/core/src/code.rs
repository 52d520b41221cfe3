//! The (n, k) Hadamard MSR array code.
//!
//! The code is an array of `N` independent `(n, k)` MDS codes over F_q: at
//! every coordinate `c` the symbols of all `n` nodes satisfy the `r = n - k`
//! parity-check equations
//!
//! ```text
//! sum_i lambda(i, c)^t * f[i][c] = 0,    t in [0, r)
//! ```
//!
//! where `lambda(i, c)` takes one of two values per node, selected by bit `i`
//! of the base coordinate. The coding matrices this encodes are diagonal and
//! never materialised; all access goes through [`CodeParams::lambda_at`].
//!
//! A code may stack several instances of the base 2^n-coordinate array (the
//! multi-failure repair path needs an odd number of them when `h + 1` is not
//! a power of two); the coefficient table is shared by all instances.

use crate::exec::map_collect;
use crate::gf::{solve_vandermonde_like, Field, FieldElement};
use crate::{Error, Result};

/// Everything that defines one concrete code: field, dimensions, instance
/// count, and the per-node coefficient pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    field: Field,
    n: usize,
    k: usize,
    instances: usize,
    lambda: Vec<[FieldElement; 2]>,
}

/// Guard on the exponent in 2^n; shard sizes explode well before this.
const MAX_N: usize = 24;

impl CodeParams {
    /// Builds the standard coefficient assignment: with `alpha` the smallest
    /// primitive root of F_q, node `i` uses `(alpha^i, -alpha^i)`.
    ///
    /// Distinctness of all `2n` values needs `(q - 1) / 2 >= n`, hence the
    /// `q >= 2n + 1` requirement.
    pub fn new(n: usize, k: usize, q: u16, instances: usize) -> Result<Self> {
        let field = Field::new(q)?;
        Self::check_shape(n, k, instances)?;
        if (q as usize) < 2 * n + 1 {
            return Err(Error::FieldTooSmall { q, n });
        }
        let alpha = field.primitive_root();
        let lambda: Vec<[FieldElement; 2]> = (0..n)
            .map(|i| {
                let base = alpha.pow(i as u64);
                [base, -base]
            })
            .collect();
        Self::check_lambda(&lambda)?;
        Ok(CodeParams {
            field,
            n,
            k,
            instances,
            lambda,
        })
    }

    /// Builds a code from an explicit coefficient table (`table[i] = [value
    /// for bit 0, value for bit 1]`), for experimenting with assignments
    /// other than the primitive-root pattern.
    pub fn with_lambda(
        n: usize,
        k: usize,
        q: u16,
        instances: usize,
        table: &[[u16; 2]],
    ) -> Result<Self> {
        let field = Field::new(q)?;
        Self::check_shape(n, k, instances)?;
        if table.len() != n {
            return Err(Error::InvalidParameter(format!(
                "coefficient table has {} rows, need n = {}",
                table.len(),
                n
            )));
        }
        let lambda: Vec<[FieldElement; 2]> = table
            .iter()
            .map(|&[a, b]| [field.element(u64::from(a)), field.element(u64::from(b))])
            .collect();
        Self::check_lambda(&lambda)?;
        Ok(CodeParams {
            field,
            n,
            k,
            instances,
            lambda,
        })
    }

    fn check_shape(n: usize, k: usize, instances: usize) -> Result<()> {
        if !(2..n).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "need 2 <= k < n, got k={k}, n={n}"
            )));
        }
        if n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "n={n} exceeds the supported maximum {MAX_N}"
            )));
        }
        if instances == 0 || instances % 2 == 0 || instances > 255 {
            return Err(Error::InvalidParameter(format!(
                "instance count must be odd and in [1, 255], got {instances}"
            )));
        }
        Ok(())
    }

    fn check_lambda(lambda: &[[FieldElement; 2]]) -> Result<()> {
        let flat: Vec<FieldElement> = lambda.iter().flatten().copied().collect();
        for (i, a) in flat.iter().enumerate() {
            if a.is_zero() {
                return Err(Error::LambdaCollision);
            }
            if flat[..i].contains(a) {
                return Err(Error::LambdaCollision);
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Parity node count `r = n - k`.
    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn modulus(&self) -> u16 {
        self.field.modulus()
    }

    pub fn instances(&self) -> usize {
        self.instances
    }

    /// Coordinates per instance, `2^n`.
    pub fn base_len(&self) -> usize {
        1 << self.n
    }

    /// Symbols per node, `N = instances * 2^n`.
    pub fn sub_packetization(&self) -> usize {
        self.instances << self.n
    }

    /// The parity-check coefficient of `node` at global coordinate `coord`.
    ///
    /// Only bit `node` of the base coordinate (`coord mod 2^n`) matters; the
    /// instance index never does.
    pub fn lambda_at(&self, node: usize, coord: usize) -> FieldElement {
        assert!(node < self.n, "node {node} out of range");
        assert!(
            coord < self.sub_packetization(),
            "coordinate {coord} out of range"
        );
        let base = coord & (self.base_len() - 1);
        self.lambda[node][(base >> node) & 1]
    }
}

/// One node's column of `N` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shard {
    pub node_id: usize,
    pub symbols: Vec<FieldElement>,
}

/// A full set of `n` shards satisfying every parity-check equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    shards: Vec<Shard>,
}

impl Codeword {
    /// Wraps shards for nodes `0..n` in order. Shape is validated; parity is
    /// not (use [`verify_codeword`]), so tests can build corrupted words.
    pub fn new(params: &CodeParams, shards: Vec<Shard>) -> Result<Self> {
        if shards.len() != params.n() {
            return Err(Error::ShardCount {
                expected: params.n(),
                got: shards.len(),
            });
        }
        for (i, s) in shards.iter().enumerate() {
            if s.node_id != i {
                return Err(Error::InvalidParameter(format!(
                    "shard {i} carries node_id {}",
                    s.node_id
                )));
            }
            check_shard_shape(params, s)?;
        }
        Ok(Codeword { shards })
    }

    pub fn shards(&self) -> &[Shard] {
        &self.shards
    }

    pub fn shard(&self, node_id: usize) -> &Shard {
        &self.shards[node_id]
    }

    pub fn into_shards(self) -> Vec<Shard> {
        self.shards
    }
}

fn check_shard_shape(params: &CodeParams, shard: &Shard) -> Result<()> {
    if shard.node_id >= params.n() {
        return Err(Error::NodeOutOfRange(shard.node_id));
    }
    if shard.symbols.len() != params.sub_packetization() {
        return Err(Error::InvalidParameter(format!(
            "shard {} holds {} symbols, need N = {}",
            shard.node_id,
            shard.symbols.len(),
            params.sub_packetization()
        )));
    }
    for e in &shard.symbols {
        if e.modulus() != params.modulus() {
            return Err(Error::ModulusMismatch(params.modulus(), e.modulus()));
        }
    }
    Ok(())
}

/// Completes one coordinate: given the symbol of every node in `present`,
/// solves the parity checks for the nodes in `missing`. `present` and
/// `missing` together must cover all n nodes, leaving exactly r unknowns.
fn complete_coordinate(
    params: &CodeParams,
    present: &[(usize, FieldElement)],
    missing: &[usize],
    coord: usize,
) -> Result<Vec<FieldElement>> {
    let r = params.r();
    debug_assert_eq!(missing.len(), r);
    debug_assert_eq!(present.len(), params.k());
    let field = params.field();
    let generators: Vec<FieldElement> = missing
        .iter()
        .map(|&i| params.lambda_at(i, coord))
        .collect();
    let mut rhs = vec![field.zero(); r];
    let mut powers: Vec<FieldElement> = vec![field.one(); present.len()];
    for t in 0..r {
        let mut acc = field.zero();
        for (idx, &(i, value)) in present.iter().enumerate() {
            acc = acc + powers[idx] * value;
            powers[idx] = powers[idx] * params.lambda_at(i, coord);
        }
        rhs[t] = -acc;
    }
    solve_vandermonde_like(&generators, &rhs)
}

fn sorted_distinct_ids(params: &CodeParams, ids: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateNode(w[0]));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= params.n()) {
        return Err(Error::NodeOutOfRange(bad));
    }
    Ok(sorted)
}

/// Systematic encode with the data on nodes `0..k`.
pub fn encode(params: &CodeParams, data: &[Vec<FieldElement>]) -> Result<Codeword> {
    let systematic: Vec<usize> = (0..params.k()).collect();
    encode_systematic(params, data, &systematic)
}

/// Systematic encode with the data placed on `systematic_ids` (in order:
/// `data[j]` goes to node `systematic_ids[j]`). The remaining r nodes get the
/// unique parity symbols solving every per-coordinate parity check.
pub fn encode_systematic(
    params: &CodeParams,
    data: &[Vec<FieldElement>],
    systematic_ids: &[usize],
) -> Result<Codeword> {
    let n = params.n();
    let k = params.k();
    let len = params.sub_packetization();
    if data.len() != k || systematic_ids.len() != k {
        return Err(Error::ShardCount {
            expected: k,
            got: data.len().min(systematic_ids.len()),
        });
    }
    sorted_distinct_ids(params, systematic_ids)?;
    for column in data {
        if column.len() != len {
            return Err(Error::InvalidParameter(format!(
                "data column holds {} symbols, need N = {}",
                column.len(),
                len
            )));
        }
        for e in column {
            if e.modulus() != params.modulus() {
                return Err(Error::ModulusMismatch(params.modulus(), e.modulus()));
            }
        }
    }

    let is_systematic: Vec<Option<usize>> = {
        let mut map = vec![None; n];
        for (j, &i) in systematic_ids.iter().enumerate() {
            map[i] = Some(j);
        }
        map
    };
    let parity_ids: Vec<usize> = (0..n).filter(|&i| is_systematic[i].is_none()).collect();

    let parity_columns = map_collect(len, |c| {
        let present: Vec<(usize, FieldElement)> = systematic_ids
            .iter()
            .enumerate()
            .map(|(j, &i)| (i, data[j][c]))
            .collect();
        complete_coordinate(params, &present, &parity_ids, c)
            .expect("parity system is nonsingular by the coefficient invariant")
    });

    let mut shards: Vec<Shard> = (0..n)
        .map(|i| Shard {
            node_id: i,
            symbols: match is_systematic[i] {
                Some(j) => data[j].clone(),
                None => Vec::with_capacity(len),
            },
        })
        .collect();
    for (c, column) in parity_columns.into_iter().enumerate() {
        debug_assert_eq!(c, shards[parity_ids[0]].symbols.len());
        for (slot, value) in parity_ids.iter().zip(column) {
            shards[*slot].symbols.push(value);
        }
    }
    Ok(Codeword { shards })
}

/// True iff all `r` parity checks hold at every coordinate.
pub fn verify_codeword(params: &CodeParams, codeword: &Codeword) -> bool {
    let len = params.sub_packetization();
    let r = params.r();
    let field = params.field();
    let ok = map_collect(len, |c| {
        let mut powers: Vec<FieldElement> = vec![field.one(); params.n()];
        for _t in 0..r {
            let mut acc = field.zero();
            for (i, shard) in codeword.shards.iter().enumerate() {
                acc = acc + powers[i] * shard.symbols[c];
                powers[i] = powers[i] * params.lambda_at(i, c);
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    });
    ok.into_iter().all(|b| b)
}

/// Rebuilds the full codeword from any `k` shards.
pub fn mds_reconstruct(params: &CodeParams, available: &[Shard]) -> Result<Codeword> {
    let n = params.n();
    let k = params.k();
    let len = params.sub_packetization();
    if available.len() != k {
        return Err(Error::ShardCount {
            expected: k,
            got: available.len(),
        });
    }
    let present_ids: Vec<usize> = available.iter().map(|s| s.node_id).collect();
    sorted_distinct_ids(params, &present_ids)?;
    for s in available {
        check_shard_shape(params, s)?;
    }
    let missing: Vec<usize> = (0..n).filter(|i| !present_ids.contains(i)).collect();

    let solved = map_collect(len, |c| {
        let present: Vec<(usize, FieldElement)> = available
            .iter()
            .map(|s| (s.node_id, s.symbols[c]))
            .collect();
        complete_coordinate(params, &present, &missing, c)
            .expect("reconstruction system is nonsingular by the coefficient invariant")
    });

    let mut shards: Vec<Shard> = (0..n)
        .map(|i| Shard {
            node_id: i,
            symbols: Vec::with_capacity(len),
        })
        .collect();
    for (c, column) in solved.into_iter().enumerate() {
        for s in available {
            shards[s.node_id].symbols.push(s.symbols[c]);
        }
        for (slot, value) in missing.iter().zip(column) {
            shards[*slot].symbols.push(value);
        }
        debug_assert!(shards.iter().all(|s| s.symbols.len() == c + 1));
    }
    Ok(Codeword { shards })
}
