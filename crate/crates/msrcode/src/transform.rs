//! Block-diagonal code transforms.
//!
//! Multiplying the j-th systematic column space by an invertible B_j replaces
//! every encoding block A_{s,j} with A_{s,j} * B_j and every repairing
//! subspace S_{i,j} with S_i * B_j (parity-facing subspaces are unchanged).
//! MDS-ness, the subspace property, and the repair bandwidth are all
//! invariant; what changes is which symbols each projection touches, so a
//! well-chosen transform lowers the number of symbols *accessed* without
//! affecting the number transmitted.

use crate::construction::{CodeSpec, Repairing};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::verify::{check_mds, check_subspace_property};

/// Apply invertible blocks B_0..B_{k-1} to the systematic columns.
///
/// Requires a code whose repairing subspaces are in the identical layout
/// (S_{i,j} = S_i for all j != i); the result uses the general layout since
/// the transformed subspaces differ per survivor.
pub fn apply_block_diagonal(code: &CodeSpec, blocks: &[Matrix]) -> Result<CodeSpec> {
    if blocks.len() != code.k {
        return Err(Error::DimensionMismatch(format!(
            "expected {} blocks, got {}",
            code.k,
            blocks.len()
        )));
    }
    for b in blocks {
        if b.rows() != code.l || b.cols() != code.l {
            return Err(Error::DimensionMismatch(format!(
                "transform blocks must be {l} x {l}",
                l = code.l
            )));
        }
        b.invert().map_err(|_| Error::SingularMatrix)?;
    }
    let identical = match &code.repairing {
        Repairing::Identical(subs) => subs.clone(),
        Repairing::General(_) => {
            return Err(Error::Construction(
                "block-diagonal transform requires the identical repairing layout".into(),
            ))
        }
    };
    let n = code.n();
    let mut encoding = Vec::with_capacity(code.r);
    for s in 0..code.r {
        let mut row = Vec::with_capacity(code.k);
        for (a, b) in code.encoding[s].iter().zip(blocks) {
            row.push(a.mul(b)?);
        }
        encoding.push(row);
    }
    let mut repairing = Vec::with_capacity(code.k);
    for (i, s_i) in identical.iter().enumerate() {
        let mut per_node: Vec<Option<Subspace>> = Vec::with_capacity(n);
        for j in 0..n {
            if j == i {
                per_node.push(None);
            } else if let Some(b) = blocks.get(j) {
                per_node.push(Some(Subspace::from_matrix(&s_i.basis().mul(b)?)));
            } else {
                per_node.push(Some(s_i.clone()));
            }
        }
        repairing.push(per_node);
    }
    let out = CodeSpec {
        family: code.family,
        r: code.r,
        m: code.m,
        l: code.l,
        k: code.k,
        field: code.field,
        encoding,
        repairing: Repairing::General(repairing),
        provenance: None,
        transformed: true,
    };
    let mds = check_mds(&out)?;
    if !mds.ok {
        return Err(Error::NotMds(
            "transformed code failed the MDS check".into(),
        ));
    }
    let sp = check_subspace_property(&out)?;
    if !sp.ok {
        return Err(Error::Construction(format!(
            "transformed code failed the subspace property: {}",
            sp.witness.unwrap_or_default()
        )));
    }
    Ok(out)
}

/// The access-lowering transform: B_j is the inverse of the matrix V_j whose
/// rows stack the eigenspace bases of A_j. In the new basis A_{s,j} * B_j is
/// block-aligned with the eigenspaces, so the m repair projections that have
/// A_j as an eigenvalue read only their own l/r rows, and only k - m nodes
/// per repair still need full-column access.
pub fn access_lowering(code: &CodeSpec) -> Result<CodeSpec> {
    let provenance = code
        .provenance
        .as_ref()
        .filter(|p| p.len() == code.k)
        .ok_or_else(|| {
            Error::Construction(
                "code carries no eigenspace provenance; cannot derive the access transform".into(),
            )
        })?;
    let mut blocks = Vec::with_capacity(code.k);
    for prov in provenance {
        let mut v: Option<Matrix> = None;
        for e in &prov.eigenspaces {
            v = Some(match v {
                None => e.clone(),
                Some(prev) => prev.vstack(e)?,
            });
        }
        let v = v.ok_or_else(|| Error::Construction("empty eigenspace provenance".into()))?;
        if v.rows() != code.l {
            return Err(Error::Construction(
                "eigenspace provenance does not span the column space".into(),
            ));
        }
        blocks.push(v.invert().map_err(|_| Error::SingularMatrix)?);
    }
    apply_block_diagonal(code, &blocks)
}
