//! Encoding, single-systematic-node repair, and multi-erasure reconstruction.
//!
//! Repair follows the bandwidth-optimal protocol: each survivor j transmits
//! the l/r-symbol projection S_{i,j} * C_j; parity payloads are aligned with
//! the systematic payloads through precomputed change-of-basis factors and the
//! erased column is solved from the resulting full-rank l x l system. Plans
//! are precomputed once per (code, erasure pattern) so per-stripe work is a
//! handful of small matrix-vector products.

use serde::Serialize;

use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::linalg::{factor_through, Matrix};

/// n columns of a code, some possibly erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageArray {
    pub code: CodeSpec,
    pub columns: Vec<Option<Vec<u32>>>,
}

impl StorageArray {
    pub fn erased(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&j| self.columns[j].is_none())
            .collect()
    }
}

/// Per-survivor accounting for one repair.
#[derive(Debug, Clone, Serialize)]
pub struct SurvivorRecord {
    pub node: usize,
    pub symbols_accessed: u64,
    pub symbols_transmitted: u64,
    pub payload: Vec<u32>,
}

/// Full record of one systematic repair.
#[derive(Debug, Clone, Serialize)]
pub struct RepairTranscript {
    pub erased_node: usize,
    pub survivors: Vec<SurvivorRecord>,
    pub recovered: Vec<u32>,
    pub total_transmitted: u64,
    pub total_surviving: u64,
    /// False when the repair fell back to full reconstruction.
    pub bandwidth_optimal: bool,
}

/// Encode k information columns into the full n-column array:
/// parity node k+s stores sum_j A_{s+1,j} * C_j.
pub fn encode(code: &CodeSpec, data: &[Vec<u32>]) -> Result<StorageArray> {
    if data.len() != code.k {
        return Err(Error::DimensionMismatch(format!(
            "expected {} information columns, got {}",
            code.k,
            data.len()
        )));
    }
    for col in data {
        if col.len() != code.l {
            return Err(Error::DimensionMismatch(format!(
                "expected column length {}, got {}",
                code.l,
                col.len()
            )));
        }
        for &v in col {
            if v >= code.field.order() {
                return Err(Error::InvalidField(format!(
                    "symbol {v} out of range for field of order {}",
                    code.field.order()
                )));
            }
        }
    }
    let f = code.field;
    let mut columns: Vec<Option<Vec<u32>>> = data.iter().cloned().map(Some).collect();
    for s in 0..code.r {
        let mut parity = vec![0u32; code.l];
        for (j, col) in data.iter().enumerate() {
            let contrib = code.encoding[s][j].mul_col(col)?;
            for (p, c) in parity.iter_mut().zip(contrib) {
                *p = f.add(*p, c);
            }
        }
        columns.push(Some(parity));
    }
    Ok(StorageArray {
        code: code.clone(),
        columns,
    })
}

/// Precomputed repair pipeline for one erased systematic node.
pub struct RepairPlan {
    erased: usize,
    /// Projection matrix and access count per survivor, in node order.
    projections: Vec<(usize, Matrix, u64)>,
    /// align[t][j] carries the payload of systematic survivor j into the
    /// parity-t alignment frame: S_{i,k+t} * A_{t+1,j} = align[t][j] * S_{i,j}.
    align: Vec<Vec<Option<Matrix>>>,
    /// Inverse of the stacked l x l system [S_{i,k+t} * A_{t+1,i}]_t.
    solve_inv: Matrix,
}

impl RepairPlan {
    pub fn new(code: &CodeSpec, erased: usize) -> Result<RepairPlan> {
        if erased >= code.k {
            return Err(Error::NotSystematic(erased));
        }
        let n = code.n();
        let mut projections = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == erased {
                continue;
            }
            let basis = code.repair_subspace(erased, j)?.basis().clone();
            let accessed = basis.nonzero_col_count() as u64;
            projections.push((j, basis, accessed));
        }
        let mut align = Vec::with_capacity(code.r);
        let mut stacked: Option<Matrix> = None;
        for t in 0..code.r {
            let parity_side = code.repair_subspace(erased, code.k + t)?.basis().clone();
            let mut row = Vec::with_capacity(code.k);
            for j in 0..code.k {
                if j == erased {
                    row.push(None);
                    continue;
                }
                let image = parity_side.mul(&code.encoding[t][j])?;
                let survivor_basis = code.repair_subspace(erased, j)?.basis();
                row.push(Some(factor_through(&image, survivor_basis)?));
            }
            align.push(row);
            let block = parity_side.mul(&code.encoding[t][erased])?;
            stacked = Some(match stacked {
                None => block,
                Some(prev) => prev.vstack(&block)?,
            });
        }
        let solve_inv = stacked.unwrap().invert().map_err(|_| {
            Error::Construction("repair system is singular; subspace property violated".into())
        })?;
        Ok(RepairPlan {
            erased,
            projections,
            align,
            solve_inv,
        })
    }

    /// Run the plan against one stripe of surviving columns.
    pub fn apply(&self, code: &CodeSpec, columns: &[Option<Vec<u32>>]) -> Result<RepairTranscript> {
        let f = code.field;
        let l = code.l;
        let sub = l / code.r;
        let mut survivors = Vec::with_capacity(self.projections.len());
        let mut payload_by_node: Vec<Option<Vec<u32>>> = vec![None; code.n()];
        for (j, basis, accessed) in &self.projections {
            let col = columns[*j].as_ref().ok_or_else(|| {
                Error::ErasureCount(columns.iter().filter(|c| c.is_none()).count())
            })?;
            let payload = basis.mul_col(col)?;
            payload_by_node[*j] = Some(payload.clone());
            survivors.push(SurvivorRecord {
                node: *j,
                symbols_accessed: *accessed,
                symbols_transmitted: payload.len() as u64,
                payload,
            });
        }
        // Cancel the interference of every surviving systematic column from
        // the parity payloads, then solve for the erased column.
        let mut rhs = Vec::with_capacity(l);
        for t in 0..code.r {
            let mut y = payload_by_node[code.k + t].clone().expect("parity payload");
            for (j, g) in self.align[t].iter().enumerate() {
                let Some(g) = g else { continue };
                let contrib = g.mul_col(payload_by_node[j].as_ref().expect("payload"))?;
                for (yy, c) in y.iter_mut().zip(contrib) {
                    *yy = f.sub(*yy, c);
                }
            }
            debug_assert_eq!(y.len(), sub);
            rhs.extend(y);
        }
        let recovered = self.solve_inv.mul_col(&rhs)?;
        let total_transmitted = survivors.iter().map(|s| s.symbols_transmitted).sum();
        Ok(RepairTranscript {
            erased_node: self.erased,
            survivors,
            recovered,
            total_transmitted,
            total_surviving: (code.n() as u64 - 1) * l as u64,
            bandwidth_optimal: true,
        })
    }
}

impl RepairPlan {
    /// Per-stripe access counts: (survivor node, symbols accessed per stripe).
    /// Transmission is always l/r symbols per survivor per stripe.
    pub fn access_counts(&self) -> Vec<(usize, u64)> {
        self.projections.iter().map(|(j, _, a)| (*j, *a)).collect()
    }

    /// Repair many stripes at once: `columns[j]` holds survivor j's stripes
    /// as the columns of an l x b matrix. Returns the recovered l x b block.
    pub fn apply_batch(&self, code: &CodeSpec, columns: &[Option<Matrix>]) -> Result<Matrix> {
        let mut payloads: Vec<Option<Matrix>> = vec![None; code.n()];
        for (j, basis, _) in &self.projections {
            let col = columns[*j].as_ref().ok_or_else(|| {
                Error::ErasureCount(columns.iter().filter(|c| c.is_none()).count())
            })?;
            payloads[*j] = Some(basis.mul(col)?);
        }
        let mut rhs: Option<Matrix> = None;
        for t in 0..code.r {
            let mut y = payloads[code.k + t].clone().expect("parity payload");
            for (j, g) in self.align[t].iter().enumerate() {
                let Some(g) = g else { continue };
                y = y.sub(&g.mul(payloads[j].as_ref().expect("payload"))?)?;
            }
            rhs = Some(match rhs {
                None => y,
                Some(prev) => prev.vstack(&y)?,
            });
        }
        self.solve_inv.mul(&rhs.expect("at least one parity"))
    }
}

impl ReconstructPlan {
    /// Batched reconstruction: `columns[j]` holds node j's stripes as the
    /// columns of an l x b matrix. Returns the k information blocks.
    pub fn apply_batch(&self, code: &CodeSpec, columns: &[Option<Matrix>]) -> Result<Vec<Matrix>> {
        let l = code.l;
        let mut data: Vec<Option<Matrix>> = (0..code.k).map(|j| columns[j].clone()).collect();
        if let Some(inv) = &self.inv {
            let mut rhs: Option<Matrix> = None;
            for &s in &self.chosen_parities {
                let mut y = columns[code.k + s]
                    .clone()
                    .ok_or_else(|| Error::Construction("chosen parity column missing".into()))?;
                for &j in &self.surviving_sys {
                    let col = columns[j]
                        .as_ref()
                        .ok_or_else(|| Error::Construction("surviving column missing".into()))?;
                    y = y.sub(&code.encoding[s][j].mul(col)?)?;
                }
                rhs = Some(match rhs {
                    None => y,
                    Some(prev) => prev.vstack(&y)?,
                });
            }
            let solution = inv.mul(&rhs.expect("nonempty system"))?;
            for (bj, &j) in self.erased_sys.iter().enumerate() {
                data[j] = Some(solution.rows_range(bj * l, l));
            }
        }
        Ok(data
            .into_iter()
            .map(|c| c.expect("all systematic blocks known"))
            .collect())
    }
}

/// Repair the single erased systematic node of `array`, transmitting exactly
/// l/r symbols from every survivor.
pub fn repair_systematic(array: &StorageArray) -> Result<RepairTranscript> {
    let erased = array.erased();
    if erased.len() != 1 {
        return Err(Error::ErasureCount(erased.len()));
    }
    if erased[0] >= array.code.k {
        return Err(Error::NotSystematic(erased[0]));
    }
    let plan = RepairPlan::new(&array.code, erased[0])?;
    plan.apply(&array.code, &array.columns)
}

/// Precomputed reconstruction pipeline for one erasure pattern.
pub struct ReconstructPlan {
    erased_sys: Vec<usize>,
    surviving_sys: Vec<usize>,
    chosen_parities: Vec<usize>,
    erased_parities: Vec<usize>,
    /// Inverse of the t*l x t*l system over the erased systematic columns.
    inv: Option<Matrix>,
}

impl ReconstructPlan {
    pub fn new(code: &CodeSpec, erased: &[usize]) -> Result<ReconstructPlan> {
        if erased.len() > code.r {
            return Err(Error::TooManyErasures {
                erased: erased.len(),
                r: code.r,
            });
        }
        let erased_sys: Vec<usize> = erased.iter().copied().filter(|&j| j < code.k).collect();
        let erased_parities: Vec<usize> = erased
            .iter()
            .copied()
            .filter(|&j| j >= code.k)
            .map(|j| j - code.k)
            .collect();
        let surviving_sys: Vec<usize> = (0..code.k).filter(|j| !erased_sys.contains(j)).collect();
        let t = erased_sys.len();
        let chosen_parities: Vec<usize> = (0..code.r)
            .filter(|s| !erased_parities.contains(s))
            .take(t)
            .collect();
        if chosen_parities.len() < t {
            return Err(Error::TooManyErasures {
                erased: erased.len(),
                r: code.r,
            });
        }
        let inv = if t == 0 {
            None
        } else {
            let l = code.l;
            let mut system = Matrix::zeros(code.field, t * l, t * l);
            for (bi, &s) in chosen_parities.iter().enumerate() {
                for (bj, &j) in erased_sys.iter().enumerate() {
                    let block = &code.encoding[s][j];
                    for r in 0..l {
                        for c in 0..l {
                            system.set(bi * l + r, bj * l + c, block.get(r, c));
                        }
                    }
                }
            }
            Some(system.invert().map_err(|_| {
                Error::NotMds(format!(
                    "reconstruction system singular for erasures {erased:?}"
                ))
            })?)
        };
        Ok(ReconstructPlan {
            erased_sys,
            surviving_sys,
            chosen_parities,
            erased_parities,
            inv,
        })
    }

    pub fn apply(&self, code: &CodeSpec, columns: &[Option<Vec<u32>>]) -> Result<Vec<Vec<u32>>> {
        let f = code.field;
        let l = code.l;
        let mut data: Vec<Option<Vec<u32>>> = (0..code.k).map(|j| columns[j].clone()).collect();
        if let Some(inv) = &self.inv {
            // rhs block for parity s: C_{k+s} minus surviving contributions.
            let mut rhs = Vec::with_capacity(self.erased_sys.len() * l);
            for &s in &self.chosen_parities {
                let mut y = columns[code.k + s]
                    .clone()
                    .ok_or_else(|| Error::Construction("chosen parity column missing".into()))?;
                for &j in &self.surviving_sys {
                    let col = columns[j]
                        .as_ref()
                        .ok_or_else(|| Error::Construction("surviving column missing".into()))?;
                    let contrib = code.encoding[s][j].mul_col(col)?;
                    for (yy, c) in y.iter_mut().zip(contrib) {
                        *yy = f.sub(*yy, c);
                    }
                }
                rhs.extend(y);
            }
            let solution = inv.mul_col(&rhs)?;
            for (bj, &j) in self.erased_sys.iter().enumerate() {
                data[j] = Some(solution[bj * l..(bj + 1) * l].to_vec());
            }
        }
        let data: Vec<Vec<u32>> = data
            .into_iter()
            .map(|c| c.expect("all systematic columns known"))
            .collect();
        Ok(data)
    }

    pub fn erased_parities(&self) -> &[usize] {
        &self.erased_parities
    }
}

/// Reconstruct the full array from any pattern of at most r erasures.
pub fn reconstruct(array: &StorageArray) -> Result<StorageArray> {
    let erased = array.erased();
    let plan = ReconstructPlan::new(&array.code, &erased)?;
    let data = plan.apply(&array.code, &array.columns)?;
    encode(&array.code, &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_two_parity;
    use crate::gf::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(code: &CodeSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
        (0..code.k)
            .map(|_| {
                (0..code.l)
                    .map(|_| rng.gen_range(0..code.field.order()))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn zero_data_zero_parities() {
        let code = build_two_parity(2).unwrap();
        let data = vec![vec![0u32; code.l]; code.k];
        let array = encode(&code, &data).unwrap();
        for col in &array.columns {
            assert_eq!(col.as_ref().unwrap(), &vec![0u32; code.l]);
        }
    }

    #[test]
    fn first_parity_is_row_sum() {
        let code = build_two_parity(2).unwrap();
        let f = code.field;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_data(&code, &mut rng);
        let array = encode(&code, &data).unwrap();
        let parity1 = array.columns[code.k].as_ref().unwrap();
        for row in 0..code.l {
            let mut sum = 0u32;
            for col in &data {
                sum = f.add(sum, col[row]);
            }
            assert_eq!(parity1[row], sum);
        }
    }

    #[test]
    fn repair_matches_reconstruction_oracle() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..25 {
            let data = random_data(&code, &mut rng);
            let array = encode(&code, &data).unwrap();
            for i in 0..code.k {
                let mut damaged = array.clone();
                damaged.columns[i] = None;
                let transcript = repair_systematic(&damaged).unwrap();
                assert_eq!(&transcript.recovered, array.columns[i].as_ref().unwrap());
                // Independent oracle: full reconstruction of the same erasure.
                let restored = reconstruct(&damaged).unwrap();
                assert_eq!(restored.columns, array.columns);
                assert_eq!(
                    transcript.total_transmitted,
                    (code.n() as u64 - 1) * code.l as u64 / 2
                );
            }
        }
    }

    #[test]
    fn repair_bandwidth_fraction_exact() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data = random_data(&code, &mut rng);
        let array = encode(&code, &data).unwrap();
        let mut damaged = array.clone();
        damaged.columns[0] = None;
        let t = repair_systematic(&damaged).unwrap();
        assert_eq!(t.total_transmitted, 14);
        assert_eq!(t.total_surviving, 28);
        for s in &t.survivors {
            assert_eq!(s.symbols_transmitted, 2);
            assert!(s.symbols_accessed >= s.symbols_transmitted);
        }
    }

    #[test]
    fn reconstruct_all_double_erasures() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = random_data(&code, &mut rng);
        let array = encode(&code, &data).unwrap();
        for a in 0..code.n() {
            for b in a + 1..code.n() {
                let mut damaged = array.clone();
                damaged.columns[a] = None;
                damaged.columns[b] = None;
                let restored = reconstruct(&damaged).unwrap();
                assert_eq!(restored.columns, array.columns);
            }
        }
        // No erasures: identity.
        assert_eq!(reconstruct(&array).unwrap().columns, array.columns);
    }

    #[test]
    fn too_many_erasures_rejected() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = random_data(&code, &mut rng);
        let mut array = encode(&code, &data).unwrap();
        array.columns[0] = None;
        array.columns[1] = None;
        array.columns[2] = None;
        assert!(matches!(
            reconstruct(&array),
            Err(Error::TooManyErasures { erased: 3, r: 2 })
        ));
    }

    #[test]
    fn parity_repair_unsupported() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = random_data(&code, &mut rng);
        let mut array = encode(&code, &data).unwrap();
        array.columns[code.k] = None;
        assert!(matches!(
            repair_systematic(&array),
            Err(Error::NotSystematic(_))
        ));
    }

    #[test]
    fn multiple_erasures_rejected_by_repair() {
        let code = build_two_parity(2).unwrap();
        let data = vec![vec![0u32; code.l]; code.k];
        let mut array = encode(&code, &data).unwrap();
        array.columns[0] = None;
        array.columns[1] = None;
        assert!(matches!(
            repair_systematic(&array),
            Err(Error::ErasureCount(2))
        ));
    }

    #[test]
    fn encode_rejects_bad_shapes() {
        let code = build_two_parity(2).unwrap();
        assert!(encode(&code, &vec![vec![0u32; code.l]; code.k - 1]).is_err());
        assert!(encode(&code, &vec![vec![0u32; code.l + 1]; code.k]).is_err());
        let bad = vec![vec![Field::prime(5).unwrap().order(); code.l]; code.k];
        assert!(encode(&code, &bad).is_err());
    }
}
