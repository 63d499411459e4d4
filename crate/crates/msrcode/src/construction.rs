//! Builders for the three code families: the general r-parity eigenspace
//! code, the explicit two-parity code over F_q with q >= 2m+1, and the
//! optimal-update code with generalized-permutation encoding matrices.
//!
//! Node indexing: systematic nodes are 0-based everywhere in the API and the
//! JSON schema. The eigenspace grid positions a node at index u*m + d
//! (u in 0..=r selects which digit subspace is withheld as the repairing
//! subspace, d in 0..m selects the digit).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{assemble_from_eigen, Matrix, Subspace};
use crate::verify;

pub const CODESPEC_SCHEMA: &str = "msr-codespec/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    General,
    TwoParity,
    OptimalUpdate,
    /// Externally supplied encoding matrices (no eigenspace provenance).
    External,
}

/// Repairing-subspace layout. Most codes use one subspace per erased node,
/// projected identically from every survivor; block-diagonal transforms and
/// hand-built codes may need a distinct subspace per (erased, survivor) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repairing {
    /// `identical[i]` repairs systematic node i from every survivor.
    Identical(Vec<Subspace>),
    /// `general[i][j]` repairs systematic node i using survivor j (None at j == i).
    General(Vec<Vec<Option<Subspace>>>),
}

/// Eigenspace bookkeeping for one systematic node: the raw basis matrices in
/// build order and the eigenvalue attached to each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeProvenance {
    pub eigenspaces: Vec<Matrix>,
    pub eigenvalues: Vec<u32>,
}

/// A fully specified (n, k, l) array code: parameters, encoding grid,
/// repairing subspaces, and (for built families) eigenspace provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub family: Family,
    pub r: usize,
    pub m: usize,
    pub l: usize,
    pub k: usize,
    pub field: Field,
    /// `encoding[s][j]` is the l x l block A_{s+1, j}; parity node k+s stores
    /// sum_j encoding[s][j] * C_j.
    pub encoding: Vec<Vec<Matrix>>,
    pub repairing: Repairing,
    pub provenance: Option<Vec<NodeProvenance>>,
    /// Set when the code was produced by a block-diagonal transform.
    pub transformed: bool,
}

impl CodeSpec {
    pub fn n(&self) -> usize {
        self.k + self.r
    }

    /// Repairing subspace used at survivor `j` while repairing systematic
    /// node `i`. Parity survivors are indexed k..n.
    pub fn repair_subspace(&self, i: usize, j: usize) -> Result<&Subspace> {
        assert!(i < self.k && j < self.n() && i != j);
        match &self.repairing {
            Repairing::Identical(subs) => Ok(&subs[i]),
            Repairing::General(grid) => grid[i][j].as_ref().ok_or_else(|| {
                Error::Construction(format!("missing repairing subspace ({i},{j})"))
            }),
        }
    }

    /// Keep only the listed systematic nodes (parities are re-derived from the
    /// same encoding blocks). Requires the identical-subspace layout.
    pub fn shorten(&self, keep: &[usize]) -> Result<CodeSpec> {
        let Repairing::Identical(subs) = &self.repairing else {
            return Err(Error::Construction(
                "shortening requires the identical repairing-subspace layout".into(),
            ));
        };
        for &j in keep {
            if j >= self.k {
                return Err(Error::Construction(format!("node {j} out of range")));
            }
        }
        let encoding = self
            .encoding
            .iter()
            .map(|row| keep.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let repairing = Repairing::Identical(keep.iter().map(|&j| subs[j].clone()).collect());
        let provenance = self
            .provenance
            .as_ref()
            .map(|p| keep.iter().map(|&j| p[j].clone()).collect());
        Ok(CodeSpec {
            family: self.family,
            r: self.r,
            m: self.m,
            l: self.l,
            k: keep.len(),
            field: self.field,
            encoding,
            repairing,
            provenance,
            transformed: self.transformed,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<CodeSpec> {
        Ok(serde_json::from_str(s)?)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format (schema msr-codespec/1): matrices as arrays of arrays of
// canonical integer encodings.

#[derive(Serialize, Deserialize)]
struct CodeSpecWire {
    schema: String,
    family: Family,
    params: ParamsWire,
    field: Field,
    transformed: bool,
    encoding: Vec<Vec<Vec<Vec<u32>>>>,
    repairing: RepairingWire,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<ProvenanceWire>>,
}

#[derive(Serialize, Deserialize)]
struct ParamsWire {
    n: usize,
    k: usize,
    r: usize,
    m: usize,
    l: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RepairingWire {
    Identical(Vec<Vec<Vec<u32>>>),
    General(Vec<Vec<Option<Vec<Vec<u32>>>>>),
}

#[derive(Serialize, Deserialize)]
struct ProvenanceWire {
    eigenvalues: Vec<u32>,
    eigenspaces: Vec<Vec<Vec<u32>>>,
}

impl Serialize for CodeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = CodeSpecWire {
            schema: CODESPEC_SCHEMA.to_string(),
            family: self.family,
            params: ParamsWire {
                n: self.n(),
                k: self.k,
                r: self.r,
                m: self.m,
                l: self.l,
            },
            field: self.field,
            transformed: self.transformed,
            encoding: self
                .encoding
                .iter()
                .map(|row| row.iter().map(|a| a.to_rows()).collect())
                .collect(),
            repairing: match &self.repairing {
                Repairing::Identical(subs) => {
                    RepairingWire::Identical(subs.iter().map(|s| s.basis().to_rows()).collect())
                }
                Repairing::General(grid) => RepairingWire::General(
                    grid.iter()
                        .map(|row| {
                            row.iter()
                                .map(|s| s.as_ref().map(|s| s.basis().to_rows()))
                                .collect()
                        })
                        .collect(),
                ),
            },
            provenance: self.provenance.as_ref().map(|nodes| {
                nodes
                    .iter()
                    .map(|p| ProvenanceWire {
                        eigenvalues: p.eigenvalues.clone(),
                        eigenspaces: p.eigenspaces.iter().map(|m| m.to_rows()).collect(),
                    })
                    .collect()
            }),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = CodeSpecWire::deserialize(d)?;
        if wire.schema != CODESPEC_SCHEMA {
            return Err(D::Error::custom(format!(
                "unsupported schema {:?}",
                wire.schema
            )));
        }
        let field = wire.field;
        let mat = |rows: &Vec<Vec<u32>>| Matrix::from_rows(field, rows).map_err(D::Error::custom);
        let mut encoding = Vec::with_capacity(wire.encoding.len());
        for row in &wire.encoding {
            let mut blocks = Vec::with_capacity(row.len());
            for a in row {
                blocks.push(mat(a)?);
            }
            encoding.push(blocks);
        }
        let repairing = match &wire.repairing {
            RepairingWire::Identical(subs) => {
                let mut out = Vec::with_capacity(subs.len());
                for s in subs {
                    out.push(Subspace::from_matrix(&mat(s)?));
                }
                Repairing::Identical(out)
            }
            RepairingWire::General(grid) => {
                let mut out = Vec::with_capacity(grid.len());
                for row in grid {
                    let mut r = Vec::with_capacity(row.len());
                    for s in row {
                        r.push(match s {
                            Some(s) => Some(Subspace::from_matrix(&mat(s)?)),
                            None => None,
                        });
                    }
                    out.push(r);
                }
                Repairing::General(out)
            }
        };
        let provenance = match &wire.provenance {
            None => None,
            Some(nodes) => {
                let mut out = Vec::with_capacity(nodes.len());
                for p in nodes {
                    let mut spaces = Vec::with_capacity(p.eigenspaces.len());
                    for s in &p.eigenspaces {
                        spaces.push(mat(s)?);
                    }
                    out.push(NodeProvenance {
                        eigenspaces: spaces,
                        eigenvalues: p.eigenvalues.clone(),
                    });
                }
                Some(out)
            }
        };
        Ok(CodeSpec {
            family: wire.family,
            r: wire.params.r,
            m: wire.params.m,
            l: wire.params.l,
            k: wire.params.k,
            field,
            encoding,
            repairing,
            provenance,
            transformed: wire.transformed,
        })
    }
}

// ---------------------------------------------------------------------------
// Digit machinery and the eigen-subspace family.

/// r-ary expansion of `a` with the first digit most significant:
/// a = sum_i digits[i] * r^(m-1-i).
pub fn digit_expand(a: usize, r: usize, m: usize) -> Result<Vec<usize>> {
    if a >= r.pow(m as u32) {
        return Err(Error::Construction(format!(
            "index {a} out of range [0, {})",
            r.pow(m as u32)
        )));
    }
    let mut digits = vec![0usize; m];
    let mut rest = a;
    for d in (0..m).rev() {
        digits[d] = rest % r;
        rest /= r;
    }
    Ok(digits)
}

fn digit_of(a: usize, d: usize, r: usize, m: usize) -> usize {
    (a / r.pow((m - 1 - d) as u32)) % r
}

/// Replace digit `d` of `a` with `u`.
fn with_digit(a: usize, d: usize, u: usize, r: usize, m: usize) -> usize {
    let weight = r.pow((m - 1 - d) as u32);
    let old = digit_of(a, d, r, m);
    a - old * weight + u * weight
}

/// The (r+1) * m subspaces P_{d,u} of F^l, l = r^m, each of dimension l/r:
/// for u < r the span of basis vectors whose digit d equals u, and for u = r
/// the span of sums over all r values of digit d.
#[derive(Debug, Clone)]
pub struct EigenFamily {
    pub r: usize,
    pub m: usize,
    pub l: usize,
    /// `subspaces[d][u]` is a raw (l/r) x l basis matrix, rows in ascending
    /// basis-index order.
    pub subspaces: Vec<Vec<Matrix>>,
}

pub fn build_eigen_family(r: usize, m: usize, field: Field) -> Result<EigenFamily> {
    if r < 2 || m < 1 {
        return Err(Error::Construction(format!(
            "need r >= 2 and m >= 1, got r={r}, m={m}"
        )));
    }
    if (field.order() as usize) <= r {
        return Err(Error::Construction(format!(
            "field order {} too small for r = {r} distinct nonzero eigenvalues",
            field.order()
        )));
    }
    let l = r.pow(m as u32);
    if l > crate::linalg::MAX_DIM {
        return Err(Error::Construction(format!(
            "column length {l} exceeds {}",
            crate::linalg::MAX_DIM
        )));
    }
    let mut subspaces = Vec::with_capacity(m);
    for d in 0..m {
        let mut per_digit = Vec::with_capacity(r + 1);
        for u in 0..r {
            let mut basis = Matrix::zeros(field, l / r, l);
            let mut row = 0;
            for a in 0..l {
                if digit_of(a, d, r, m) == u {
                    basis.set(row, a, 1);
                    row += 1;
                }
            }
            per_digit.push(basis);
        }
        // u = r: one row per digit-d residue class, summing the class.
        let mut basis = Matrix::zeros(field, l / r, l);
        let mut row = 0;
        for a in 0..l {
            if digit_of(a, d, r, m) == 0 {
                for u in 0..r {
                    basis.set(row, with_digit(a, d, u, r, m), 1);
                }
                row += 1;
            }
        }
        per_digit.push(basis);
        subspaces.push(per_digit);
    }
    Ok(EigenFamily { r, m, l, subspaces })
}

// ---------------------------------------------------------------------------
// General r-parity construction.

/// Assemble the encoding grid A_{s,j} = A_j^(s-1) from per-node base matrices.
fn power_grid(base: &[Matrix], r: usize, field: Field, l: usize) -> Result<Vec<Vec<Matrix>>> {
    let mut grid = Vec::with_capacity(r);
    let mut current: Vec<Matrix> = vec![Matrix::identity(field, l); base.len()];
    grid.push(current.clone());
    for _ in 1..r {
        current = current
            .iter()
            .zip(base)
            .map(|(c, a)| c.mul(a))
            .collect::<Result<Vec<_>>>()?;
        grid.push(current.clone());
    }
    Ok(grid)
}

fn assemble_general(
    family: &EigenFamily,
    field: Field,
    eigenvalues: &[Vec<u32>],
    tag: Family,
) -> Result<CodeSpec> {
    let (r, m, l) = (family.r, family.m, family.l);
    let k = (r + 1) * m;
    let mut base = Vec::with_capacity(k);
    let mut repairing = Vec::with_capacity(k);
    let mut provenance = Vec::with_capacity(k);
    for (node, node_eigenvalues) in eigenvalues.iter().enumerate().take(k) {
        let (u, d) = (node / m, node % m);
        let spaces: Vec<Matrix> = (0..=r)
            .filter(|&v| v != u)
            .map(|v| family.subspaces[d][v].clone())
            .collect();
        let a = assemble_from_eigen(&spaces, node_eigenvalues)?;
        base.push(a);
        repairing.push(Subspace::from_matrix(&family.subspaces[d][u]));
        provenance.push(NodeProvenance {
            eigenspaces: spaces,
            eigenvalues: node_eigenvalues.clone(),
        });
    }
    let encoding = power_grid(&base, r, field, l)?;
    Ok(CodeSpec {
        family: tag,
        r,
        m,
        l,
        k,
        field,
        encoding,
        repairing: Repairing::Identical(repairing),
        provenance: Some(provenance),
        transformed: false,
    })
}

/// Draw r distinct nonzero eigenvalues per node.
fn random_eigenvalues(rng: &mut ChaCha8Rng, k: usize, r: usize, field: Field) -> Vec<Vec<u32>> {
    let nonzero: Vec<u32> = (1..field.order()).collect();
    (0..k)
        .map(|_| {
            let mut pool = nonzero.clone();
            pool.shuffle(rng);
            pool.truncate(r);
            pool
        })
        .collect()
}

/// General r-parity code: seeded randomized eigenvalue search, accepted only
/// when the exhaustive block-submatrix MDS check passes. Deterministic for a
/// fixed (r, m, field, seed, max_tries).
pub fn build_general(
    r: usize,
    m: usize,
    field: Field,
    seed: u64,
    max_tries: u64,
) -> Result<CodeSpec> {
    let family = build_eigen_family(r, m, field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let eigenvalues = random_eigenvalues(&mut rng, (r + 1) * m, r, field);
        let code = assemble_general(&family, field, &eigenvalues, Family::General)?;
        if verify::check_mds(&code)?.ok {
            let sp = verify::check_subspace_property(&code)?;
            if !sp.ok {
                return Err(Error::Construction(format!(
                    "subspace property failed after MDS success: {:?}",
                    sp.witness
                )));
            }
            return Ok(code);
        }
    }
    Err(Error::SearchExhausted {
        tries: max_tries,
        order: field.order(),
    })
}

fn next_prime(mut q: u32) -> u32 {
    loop {
        if Field::prime(q).is_ok() {
            return q;
        }
        q += 1;
    }
}

/// Field-escalating wrapper: start at the smallest prime > r and double the
/// field size whenever the eigenvalue search exhausts its budget.
pub fn build_general_auto(r: usize, m: usize, seed: u64) -> Result<CodeSpec> {
    let mut q = next_prime(r as u32 + 2);
    for _ in 0..8 {
        match build_general(r, m, Field::prime(q)?, seed, 64) {
            Ok(code) => return Ok(code),
            Err(Error::SearchExhausted { .. }) => q = next_prime(2 * q),
            Err(e) => return Err(e),
        }
    }
    Err(Error::SearchExhausted {
        tries: 64 * 8,
        order: q,
    })
}

// ---------------------------------------------------------------------------
// Two-parity construction with explicit eigenvalues over F_q, q >= 2m+1.

/// Deterministic default eigenvalue pattern generalizing the published m = 2
/// instance over F_5: lambda_{d,1} = d+1 and lambda_{d,0} = q-1-d, which for
/// m = 2 yields per-node eigenvalue vectors (1,2,1,2,4,3) / (4,3,4,3,1,2).
pub fn build_two_parity(m: usize) -> Result<CodeSpec> {
    if m < 1 {
        return Err(Error::Construction("need m >= 1".into()));
    }
    let q = next_prime(2 * m as u32 + 1);
    let field = Field::prime(q)?;
    let r = 2usize;
    let family = build_eigen_family(r, m, field)?;
    let lam0: Vec<u32> = (0..m as u32).map(|d| q - 1 - d).collect();
    let lam1: Vec<u32> = (0..m as u32).map(|d| d + 1).collect();

    // Eigenspaces are stored in ascending-u order (skipping the withheld u),
    // so the table below lists eigenvalues in that same order:
    //   u=0 node: spaces (P_{d,1}, P_{d,2}) -> (lam0, lam1)
    //   u=1 node: spaces (P_{d,0}, P_{d,2}) -> (lam1, lam0)
    //   u=2 node: spaces (P_{d,0}, P_{d,1}) -> (lam0, lam1)
    // Each P_{d,u} then carries distinct eigenvalues in the two matrices where
    // it appears as an eigenspace.
    let k = 3 * m;
    let mut eigenvalues = Vec::with_capacity(k);
    for node in 0..k {
        let (u, d) = (node / m, node % m);
        eigenvalues.push(match u {
            0 => vec![lam0[d], lam1[d]],
            1 => vec![lam1[d], lam0[d]],
            2 => vec![lam0[d], lam1[d]],
            _ => unreachable!(),
        });
    }
    let code = assemble_general(&family, field, &eigenvalues, Family::TwoParity)?;
    let mds = verify::check_mds(&code)?;
    if !mds.ok {
        return Err(Error::NotMds(format!(
            "two-parity build failed MDS check: {:?}",
            mds.witness
        )));
    }
    Ok(code)
}

// ---------------------------------------------------------------------------
// Optimal-update construction (r = 2, generalized permutation matrices).

/// Per-digit parameters of the optimal-update code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateParams {
    pub x: u32,
    pub y: u32,
    pub lambda: u32,
    pub mu: u32,
}

impl UpdateParams {
    fn validate(&self, field: Field) -> Result<()> {
        let UpdateParams { x, y, lambda, mu } = *self;
        if x == 0 || y == 0 || lambda == 0 || mu == 0 {
            return Err(Error::Construction("parameters must be nonzero".into()));
        }
        if field.mul(x, x) == field.mul(y, y) {
            return Err(Error::Construction("need x^2 != y^2".into()));
        }
        if lambda == mu {
            return Err(Error::Construction("need lambda != mu".into()));
        }
        Ok(())
    }
}

/// Build the 2m encoding matrices and repairing subspaces from explicit
/// per-digit parameters, without any MDS search. Node layout: nodes 0..m are
/// the diagonal (row-preserving) matrices, nodes m..2m the row-mixing ones.
pub fn optimal_update_code(field: Field, m: usize, params: &[UpdateParams]) -> Result<CodeSpec> {
    if m < 1 {
        return Err(Error::Construction("need m >= 1".into()));
    }
    if field.characteristic() == 2 {
        return Err(Error::Construction(
            "optimal-update construction needs characteristic != 2".into(),
        ));
    }
    if params.len() != m {
        return Err(Error::Construction(
            "need one parameter tuple per digit".into(),
        ));
    }
    let r = 2usize;
    let l = 1usize << m;
    let k = 2 * m;

    // Digit subspaces over the binary expansion (first digit most significant).
    let half = l / 2;
    let mut base = Vec::with_capacity(k);
    let mut repairing = Vec::with_capacity(k);
    let mut provenance = Vec::with_capacity(k);
    let mut plain = Vec::with_capacity(m); // (P_d, R_d, Q_d, O_d) per digit
    for (d, p) in params.iter().enumerate() {
        p.validate(field)?;
        let mut p_lo = Matrix::zeros(field, half, l);
        let mut p_hi = Matrix::zeros(field, half, l);
        let mut q_plus = Matrix::zeros(field, half, l);
        let mut q_minus = Matrix::zeros(field, half, l);
        let mut row = 0;
        for a in 0..l {
            if digit_of(a, d, 2, m) == 0 {
                let b = with_digit(a, d, 1, 2, m);
                p_lo.set(row, a, 1);
                p_hi.set(row, b, 1);
                q_plus.set(row, a, p.y);
                q_plus.set(row, b, p.x);
                q_minus.set(row, a, field.neg(p.y));
                q_minus.set(row, b, p.x);
                row += 1;
            }
        }
        plain.push((p_lo, p_hi, q_plus, q_minus));
    }
    // Nodes 0..m: eigenspaces (P_d, R_d) with eigenvalues (lambda, mu);
    // repairing subspace Q_d.
    for d in 0..m {
        let p = params[d];
        let (p_lo, p_hi, q_plus, _) = &plain[d];
        let a = assemble_from_eigen(&[p_lo.clone(), p_hi.clone()], &[p.lambda, p.mu])?;
        base.push(a);
        repairing.push(Subspace::from_matrix(q_plus));
        provenance.push(NodeProvenance {
            eigenspaces: vec![p_lo.clone(), p_hi.clone()],
            eigenvalues: vec![p.lambda, p.mu],
        });
    }
    // Nodes m..2m: eigenspaces (Q_d, O_d) with eigenvalues (xy, -xy);
    // repairing subspace P_d.
    for d in 0..m {
        let p = params[d];
        let (p_lo, _, q_plus, q_minus) = &plain[d];
        let xy = field.mul(p.x, p.y);
        let a = assemble_from_eigen(&[q_plus.clone(), q_minus.clone()], &[xy, field.neg(xy)])?;
        base.push(a);
        repairing.push(Subspace::from_matrix(p_lo));
        provenance.push(NodeProvenance {
            eigenspaces: vec![q_plus.clone(), q_minus.clone()],
            eigenvalues: vec![xy, field.neg(xy)],
        });
    }
    for a in &base {
        if !a.is_generalized_permutation() {
            return Err(Error::Construction(
                "optimal-update encoding matrix is not a generalized permutation".into(),
            ));
        }
    }
    let encoding = power_grid(&base, r, field, l)?;
    Ok(CodeSpec {
        family: Family::OptimalUpdate,
        r,
        m,
        l,
        k,
        field,
        encoding,
        repairing: Repairing::Identical(repairing),
        provenance: Some(provenance),
        transformed: false,
    })
}

/// Optimal-update code with a seeded MDS search over per-digit parameter
/// tuples. The first candidate is (x, y, lambda, mu) = (1, 2, 1, 2) for every
/// digit; subsequent candidates are drawn at random.
pub fn build_optimal_update(m: usize, field: Field, seed: u64, max_tries: u64) -> Result<CodeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let default = UpdateParams {
        x: 1,
        y: 2,
        lambda: 1,
        mu: 2,
    };
    for attempt in 0..max_tries {
        let params: Vec<UpdateParams> = if attempt == 0 {
            vec![default; m]
        } else {
            (0..m)
                .map(|_| loop {
                    let p = UpdateParams {
                        x: rng.gen_range(1..field.order()),
                        y: rng.gen_range(1..field.order()),
                        lambda: rng.gen_range(1..field.order()),
                        mu: rng.gen_range(1..field.order()),
                    };
                    if p.validate(field).is_ok() {
                        break p;
                    }
                })
                .collect()
        };
        if params.iter().any(|p| p.validate(field).is_err()) {
            continue;
        }
        let code = optimal_update_code(field, m, &params)?;
        if verify::check_mds(&code)?.ok && verify::check_subspace_property(&code)?.ok {
            return Ok(code);
        }
    }
    Err(Error::SearchExhausted {
        tries: max_tries,
        order: field.order(),
    })
}

/// Field-escalating wrapper over odd prime fields.
pub fn build_optimal_update_auto(m: usize, seed: u64) -> Result<CodeSpec> {
    let mut q = 5u32;
    for _ in 0..8 {
        match build_optimal_update(m, Field::prime(q)?, seed, 128) {
            Ok(code) => return Ok(code),
            Err(Error::SearchExhausted { .. }) => q = next_prime(2 * q),
            Err(e) => return Err(e),
        }
    }
    Err(Error::SearchExhausted {
        tries: 128 * 8,
        order: q,
    })
}
