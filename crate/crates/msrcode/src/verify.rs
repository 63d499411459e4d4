//! Independent checkers for every property a code claims: the MDS property
//! (exhaustive block-submatrix invertibility), the subspace property behind
//! optimal repair, and the access / update / bandwidth metrics.

use serde::Serialize;

use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Exact nonnegative rational, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Rational {
        assert!(den != 0);
        let g = gcd(num.max(1), den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Outcome of the MDS check; `witness` names the failing block submatrix.
#[derive(Debug, Clone)]
pub struct MdsReport {
    pub ok: bool,
    /// (parity row blocks, systematic column blocks) of a singular submatrix.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(t);
    fn rec(start: usize, n: usize, t: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == t {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, t, current, out);
            current.pop();
        }
    }
    rec(0, n, t, &mut current, &mut out);
    out
}

fn block_submatrix(code: &CodeSpec, rows: &[usize], cols: &[usize]) -> Result<Matrix> {
    let t = rows.len();
    let l = code.l;
    let mut m = Matrix::zeros(code.field, t * l, t * l);
    for (bi, &s) in rows.iter().enumerate() {
        for (bj, &j) in cols.iter().enumerate() {
            let block = &code.encoding[s][j];
            for r in 0..l {
                for c in 0..l {
                    m.set(bi * l + r, bj * l + c, block.get(r, c));
                }
            }
        }
    }
    Ok(m)
}

/// Exhaustive MDS check: for every t in 1..=r, every t-subset of parity row
/// blocks and systematic column blocks, the tl x tl submatrix of the encoding
/// grid must be invertible. Returns the first failure as a witness.
pub fn check_mds(code: &CodeSpec) -> Result<MdsReport> {
    for t in 1..=code.r {
        for rows in subsets(code.r, t) {
            for cols in subsets(code.k, t) {
                let m = block_submatrix(code, &rows, &cols)?;
                if m.det()? == 0 {
                    return Ok(MdsReport {
                        ok: false,
                        witness: Some((rows, cols)),
                    });
                }
            }
        }
    }
    Ok(MdsReport {
        ok: true,
        witness: None,
    })
}

/// Fast path for r = 2 systematic-first codes: every encoding block of the
/// second parity must be invertible and so must every pairwise difference.
/// Requires the first parity blocks to be the identity.
pub fn check_mds_two_parity_fast(code: &CodeSpec) -> Result<MdsReport> {
    if code.r != 2 {
        return Err(Error::Construction("fast path needs r = 2".into()));
    }
    let identity = Matrix::identity(code.field, code.l);
    for j in 0..code.k {
        if code.encoding[0][j] != identity {
            return Err(Error::Construction("fast path needs A_{1,j} = I".into()));
        }
    }
    for x in 0..code.k {
        if code.encoding[1][x].det()? == 0 {
            return Ok(MdsReport {
                ok: false,
                witness: Some((vec![1], vec![x])),
            });
        }
        for y in x + 1..code.k {
            let diff = code.encoding[1][x].sub(&code.encoding[1][y])?;
            if diff.det()? == 0 {
                return Ok(MdsReport {
                    ok: false,
                    witness: Some((vec![0, 1], vec![x, y])),
                });
            }
        }
    }
    Ok(MdsReport {
        ok: true,
        witness: None,
    })
}

/// Outcome of the subspace-property check.
#[derive(Debug, Clone)]
pub struct SubspaceReport {
    pub ok: bool,
    pub witness: Option<String>,
}

/// Subspace property for every systematic node i: the projection used at each
/// survivor must align through every parity equation
/// (span(S_{i,k+t} * A_{t,j}) = span(S_{i,j}) for j != i), and the blocks of
/// the erased column must jointly have full rank
/// (sum_t S_{i,k+t} * A_{t,i} = F^l). Handles both repairing layouts.
pub fn check_subspace_property(code: &CodeSpec) -> Result<SubspaceReport> {
    let l = code.l;
    for i in 0..code.k {
        // Alignment condition at every surviving systematic node.
        for j in 0..code.k {
            if j == i {
                continue;
            }
            let expected = code.repair_subspace(i, j)?;
            for t in 0..code.r {
                let parity_side = code.repair_subspace(i, code.k + t)?;
                let image = parity_side.apply(&code.encoding[t][j])?;
                if &image != expected {
                    return Ok(SubspaceReport {
                        ok: false,
                        witness: Some(format!(
                            "span(S_({i},{}) * A_({},{j})) != span(S_({i},{j}))",
                            code.k + t,
                            t + 1
                        )),
                    });
                }
            }
        }
        // Full-rank condition on the erased column.
        let mut stacked: Option<Matrix> = None;
        for t in 0..code.r {
            let parity_side = code.repair_subspace(i, code.k + t)?;
            let image = parity_side.basis().mul(&code.encoding[t][i])?;
            stacked = Some(match stacked {
                None => image,
                Some(prev) => prev.vstack(&image)?,
            });
        }
        let stacked = stacked.unwrap();
        if stacked.rank() != l {
            return Ok(SubspaceReport {
                ok: false,
                witness: Some(format!("sum_t S_({i},k+t) * A_(t,{i}) has rank < {l}")),
            });
        }
    }
    Ok(SubspaceReport {
        ok: true,
        witness: None,
    })
}

/// Every metric the verifiers compute for one code, with exact ratios.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    /// Fraction of surviving data transmitted to repair node i (always 1/r
    /// when the subspace property holds).
    pub bandwidth_fraction: Vec<Rational>,
    /// Symbols accessed across all survivors while repairing node i.
    pub beta: Vec<u64>,
    /// Average fraction of surviving symbols accessed, over systematic repairs.
    pub access_ratio: Rational,
    /// update_counts[j][c]: stored symbols written when information symbol c
    /// of node j changes.
    pub update_counts: Vec<Vec<u64>>,
    /// Systematic nodes whose repair reads only l/r symbols per survivor.
    pub optimal_access_nodes: Vec<usize>,
    pub optimal_update: bool,
    pub mds: bool,
    pub subspace_property: bool,
}

/// Compute the metrics report. Access counts a stored symbol as read when its
/// coordinate carries a nonzero entry in the survivor's projection matrix
/// (equivalently, when the repairing subspace does not vanish there).
pub fn compute_metrics(code: &CodeSpec) -> Result<MetricsReport> {
    let n = code.n();
    let l = code.l as u64;
    let r = code.r as u64;
    let per_survivor = l / r;

    let mut beta = Vec::with_capacity(code.k);
    let mut bandwidth = Vec::with_capacity(code.k);
    let mut optimal_access_nodes = Vec::new();
    for i in 0..code.k {
        let mut accessed = 0u64;
        for j in 0..n {
            if j == i {
                continue;
            }
            accessed += code.repair_subspace(i, j)?.basis().nonzero_col_count() as u64;
        }
        let transmitted = (n as u64 - 1) * per_survivor;
        bandwidth.push(Rational::new(transmitted, (n as u64 - 1) * l));
        if accessed == transmitted {
            optimal_access_nodes.push(i);
        }
        beta.push(accessed);
    }
    let total: u64 = beta.iter().sum();
    let access_ratio = Rational::new(total, code.k as u64 * (n as u64 - 1) * l);

    let mut update_counts = Vec::with_capacity(code.k);
    let mut optimal_update = true;
    for j in 0..code.k {
        let mut per_symbol = Vec::with_capacity(code.l);
        for c in 0..code.l {
            let mut writes = 1u64; // the symbol itself
            for s in 0..code.r {
                writes += code.encoding[s][j].col_nonzeros(c) as u64;
            }
            per_symbol.push(writes);
        }
        for s in 0..code.r {
            if !code.encoding[s][j].is_generalized_permutation() {
                optimal_update = false;
            }
        }
        update_counts.push(per_symbol);
    }

    Ok(MetricsReport {
        bandwidth_fraction: bandwidth,
        beta,
        access_ratio,
        update_counts,
        optimal_access_nodes,
        optimal_update,
        mds: check_mds(code)?.ok,
        subspace_property: check_subspace_property(code)?.ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{
        build_general_auto, build_optimal_update_auto, build_two_parity, Repairing,
    };
    use crate::gf::Field;
    use crate::linalg::Subspace;

    #[test]
    fn two_parity_code_is_mds() {
        let code = build_two_parity(2).unwrap();
        assert!(check_mds(&code).unwrap().ok);
        assert!(check_mds_two_parity_fast(&code).unwrap().ok);
        assert!(check_subspace_property(&code).unwrap().ok);
    }

    #[test]
    fn forced_equal_eigenvalues_break_mds() {
        // Rebuild the (8,6,4) code but give two digit-sharing nodes identical
        // eigenvalue pairs; the pairwise block difference goes singular.
        use crate::construction::{build_eigen_family, CodeSpec, Family, Repairing};
        use crate::linalg::assemble_from_eigen;
        let field = Field::prime(5).unwrap();
        let fam = build_eigen_family(2, 2, field).unwrap();
        let k = 6;
        let eigenvalues = vec![vec![1u32, 2]; k];
        let mut base = Vec::new();
        let mut repairing = Vec::new();
        for (node, node_eigenvalues) in eigenvalues.iter().enumerate() {
            let (u, d) = (node / 2, node % 2);
            let spaces: Vec<_> = (0..=2usize)
                .filter(|&v| v != u)
                .map(|v| fam.subspaces[d][v].clone())
                .collect();
            base.push(assemble_from_eigen(&spaces, node_eigenvalues).unwrap());
            repairing.push(Subspace::from_matrix(&fam.subspaces[d][u]));
        }
        let identity = Matrix::identity(field, 4);
        let encoding = vec![vec![identity; k], base];
        let code = CodeSpec {
            family: Family::TwoParity,
            r: 2,
            m: 2,
            l: 4,
            k,
            field,
            encoding,
            repairing: Repairing::Identical(repairing),
            provenance: None,
            transformed: false,
        };
        let report = check_mds(&code).unwrap();
        assert!(!report.ok);
        assert!(report.witness.is_some());
        let fast = check_mds_two_parity_fast(&code).unwrap();
        assert!(!fast.ok);
    }

    #[test]
    fn corrupted_repair_subspace_fails_property() {
        let mut code = build_two_parity(2).unwrap();
        if let Repairing::Identical(subs) = &mut code.repairing {
            // Not invariant under the digit-sharing encoding matrices.
            subs[0] = Subspace::from_matrix(
                &Matrix::from_rows(code.field, &[vec![1, 2, 3, 4], vec![0, 1, 1, 0]]).unwrap(),
            );
        }
        assert!(!check_subspace_property(&code).unwrap().ok);
    }

    #[test]
    fn untransformed_access_ratio_benchmark() {
        let code = build_two_parity(2).unwrap();
        let metrics = compute_metrics(&code).unwrap();
        assert_eq!(metrics.access_ratio, Rational::new(2, 3));
        for b in &metrics.bandwidth_fraction {
            assert_eq!(*b, Rational::new(1, 2));
        }
        // The 2m digit-subspace nodes repair with optimal access, the m
        // row-sum nodes do not.
        assert_eq!(metrics.optimal_access_nodes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn shortened_subcode_is_all_optimal_access() {
        let code = build_general_auto(3, 2, 5).unwrap();
        let keep: Vec<usize> = (0..code.r * code.m).collect();
        let sub = code.shorten(&keep).unwrap();
        let metrics = compute_metrics(&sub).unwrap();
        assert_eq!(metrics.optimal_access_nodes, keep);
    }

    #[test]
    fn optimal_update_metrics() {
        let code = build_optimal_update_auto(2, 3).unwrap();
        let metrics = compute_metrics(&code).unwrap();
        assert!(metrics.optimal_update);
        for per_symbol in &metrics.update_counts {
            for &w in per_symbol {
                assert_eq!(w, 3);
            }
        }
    }

    #[test]
    fn mds_agrees_with_erasure_oracle() {
        // Cross-validate the block-submatrix check against exhaustive
        // erase-and-reconstruct on a small MDS code and a broken one.
        use crate::codec;
        use rand::{Rng, SeedableRng};
        let code = build_two_parity(1).unwrap();
        assert!(check_mds(&code).unwrap().ok);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for pattern in subsets(code.n(), 2).into_iter().chain(subsets(code.n(), 1)) {
            for _ in 0..20 {
                let data: Vec<Vec<u32>> = (0..code.k)
                    .map(|_| {
                        (0..code.l)
                            .map(|_| rng.gen_range(0..code.field.order()))
                            .collect()
                    })
                    .collect();
                let mut array = codec::encode(&code, &data).unwrap();
                let original = array.columns.clone();
                for &e in &pattern {
                    array.columns[e] = None;
                }
                let restored = codec::reconstruct(&array).unwrap();
                assert_eq!(restored.columns, original);
            }
        }
    }
}
