//! Directory-backed node-file storage.
//!
//! A store is one directory holding `manifest.json` plus node files
//! `node_000 .. node_{n-1}`. Input bytes are packed into field elements
//! (floor(log2 q) bits each over a prime field, w bits over F_{2^w}),
//! grouped into stripes of k*l elements, and encoded stripe by stripe; node
//! file j is the concatenation of column j over all stripes, one element per
//! 1 or 2 little-endian bytes. A missing node file is an erased node.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::{ReconstructPlan, RepairPlan};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::verify::{check_mds, check_subspace_property, Rational};

pub const MANIFEST_SCHEMA: &str = "msr-store/1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Stripes processed per matrix-matrix batch in encode/repair/reconstruct.
const BATCH_STRIPES: usize = 2048;

/// View a node's element stream (stripe-major, l per stripe) as an l x b
/// matrix whose columns are stripes `start .. start + b`.
fn stream_to_matrix(
    field: crate::gf::Field,
    stream: &[u32],
    l: usize,
    start: usize,
    b: usize,
) -> Matrix {
    let mut m = Matrix::zeros(field, l, b);
    for c in 0..b {
        for i in 0..l {
            m.set(i, c, stream[(start + c) * l + i]);
        }
    }
    m
}

/// Append a matrix's columns (stripes) back onto an element stream.
fn append_columns(m: &Matrix, out: &mut Vec<u32>) {
    for c in 0..m.cols() {
        for i in 0..m.rows() {
            out.push(m.get(i, c));
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub code: CodeSpec,
    /// Input bits consumed per field element.
    pub bits_per_element: u32,
    /// Bytes per element in node files (little-endian).
    pub element_bytes: u32,
    /// Stored-bytes / input-bytes expansion from chunking and striping.
    pub expansion_factor: f64,
    pub original_len: u64,
    pub stripes: usize,
    /// Hex SHA-256 of each node file, indexed by node.
    pub checksums: Vec<String>,
}

pub struct NodeStore {
    dir: PathBuf,
    pub manifest: Manifest,
}

/// Store-level repair report aggregated over all stripes.
#[derive(Debug, Clone, Serialize)]
pub struct StoreRepairReport {
    pub node: usize,
    pub stripes: usize,
    pub symbols_transmitted: u64,
    pub symbols_accessed: u64,
    pub surviving_symbols: u64,
    pub bandwidth_fraction: String,
    pub bandwidth_optimal: bool,
    pub survivors: Vec<SurvivorTotals>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivorTotals {
    pub node: usize,
    pub symbols_accessed: u64,
    pub symbols_transmitted: u64,
}

pub fn bits_per_element(code: &CodeSpec) -> u32 {
    let q = code.field.order();
    // For F_{2^w} this is exactly w; for a prime it is floor(log2 q).
    31 - q.leading_zeros()
}

fn element_bytes(code: &CodeSpec) -> u32 {
    if code.field.order() <= 256 {
        1
    } else {
        2
    }
}

/// Pack a byte stream into field elements of `bits` bits each, MSB first.
pub fn bytes_to_elements(bytes: &[u8], bits: u32) -> Vec<u32> {
    let total_bits = bytes.len() as u64 * 8;
    let count = total_bits.div_ceil(bits as u64) as usize;
    let mut out = Vec::with_capacity(count);
    let mut acc: u64 = 0;
    let mut acc_bits: u32 = 0;
    for &b in bytes {
        acc = (acc << 8) | b as u64;
        acc_bits += 8;
        while acc_bits >= bits {
            acc_bits -= bits;
            out.push(((acc >> acc_bits) & ((1u64 << bits) - 1)) as u32);
        }
    }
    if acc_bits > 0 {
        out.push(((acc << (bits - acc_bits)) & ((1u64 << bits) - 1)) as u32);
    }
    out
}

/// Inverse of `bytes_to_elements`, truncated to `len` bytes.
pub fn elements_to_bytes(elements: &[u32], bits: u32, len: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(len as usize);
    let mut acc: u64 = 0;
    let mut acc_bits: u32 = 0;
    for &e in elements {
        acc = (acc << bits) | e as u64;
        acc_bits += bits;
        while acc_bits >= 8 {
            if out.len() as u64 >= len {
                return out;
            }
            acc_bits -= 8;
            out.push(((acc >> acc_bits) & 0xff) as u8);
        }
    }
    while (out.len() as u64) < len {
        out.push(((acc << (8 - acc_bits)) & 0xff) as u8);
        acc = 0;
        acc_bits = 0;
    }
    out
}

fn node_file_name(j: usize) -> String {
    format!("node_{j:03}")
}

fn encode_node_bytes(elements: &[u32], width: u32) -> Vec<u8> {
    let mut out = Vec::with_capacity(elements.len() * width as usize);
    for &e in elements {
        out.push((e & 0xff) as u8);
        if width == 2 {
            out.push((e >> 8) as u8);
        }
    }
    out
}

fn decode_node_bytes(bytes: &[u8], width: u32, order: u32) -> Result<Vec<u32>> {
    if !bytes.len().is_multiple_of(width as usize) {
        return Err(Error::Store(
            "node file length is not a whole number of elements".into(),
        ));
    }
    let mut out = Vec::with_capacity(bytes.len() / width as usize);
    for chunk in bytes.chunks_exact(width as usize) {
        let v = if width == 2 {
            chunk[0] as u32 | (chunk[1] as u32) << 8
        } else {
            chunk[0] as u32
        };
        if v >= order {
            return Err(Error::Store(format!(
                "element {v} out of range for field order {order}"
            )));
        }
        out.push(v);
    }
    Ok(out)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

impl NodeStore {
    /// Encode `input` under `code` into a fresh store at `dir`.
    pub fn create(
        dir: &Path,
        code: &CodeSpec,
        input: &[u8],
        skip_verify: bool,
    ) -> Result<NodeStore> {
        if !skip_verify {
            let mds = check_mds(code)?;
            if !mds.ok {
                return Err(Error::NotMds("code failed the MDS check".into()));
            }
            let sp = check_subspace_property(code)?;
            if !sp.ok {
                return Err(Error::Construction(format!(
                    "code failed the subspace property: {}",
                    sp.witness.unwrap_or_default()
                )));
            }
        }
        fs::create_dir_all(dir)?;
        let bits = bits_per_element(code);
        let width = element_bytes(code);
        let mut elements = bytes_to_elements(input, bits);
        let stripe_elems = code.k * code.l;
        let stripes = elements.len().div_ceil(stripe_elems).max(1);
        elements.resize(stripes * stripe_elems, 0);

        let n = code.n();
        let l = code.l;
        let mut node_elems: Vec<Vec<u32>> = vec![Vec::with_capacity(stripes * l); n];
        for start in (0..stripes).step_by(BATCH_STRIPES) {
            let b = BATCH_STRIPES.min(stripes - start);
            // Stripes become columns of an l x b matrix per node.
            let data_blocks: Vec<Matrix> = (0..code.k)
                .map(|j| {
                    let mut m = Matrix::zeros(code.field, l, b);
                    for c in 0..b {
                        let base = (start + c) * stripe_elems + j * l;
                        for i in 0..l {
                            m.set(i, c, elements[base + i]);
                        }
                    }
                    m
                })
                .collect();
            for (j, block) in data_blocks.iter().enumerate() {
                append_columns(block, &mut node_elems[j]);
            }
            for s in 0..code.r {
                let mut parity = Matrix::zeros(code.field, l, b);
                for (j, block) in data_blocks.iter().enumerate() {
                    parity = parity.add(&code.encoding[s][j].mul(block)?)?;
                }
                append_columns(&parity, &mut node_elems[code.k + s]);
            }
        }

        let mut checksums = Vec::with_capacity(n);
        for (j, elems) in node_elems.iter().enumerate() {
            let bytes = encode_node_bytes(elems, width);
            checksums.push(sha256_hex(&bytes));
            fs::write(dir.join(node_file_name(j)), bytes)?;
        }
        let stored = (n * stripes * code.l) as f64 * width as f64;
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA.to_string(),
            code: code.clone(),
            bits_per_element: bits,
            element_bytes: width,
            expansion_factor: if input.is_empty() {
                stored
            } else {
                stored / input.len() as f64
            },
            original_len: input.len() as u64,
            stripes,
            checksums,
        };
        fs::write(
            dir.join(MANIFEST_FILE),
            serde_json::to_vec_pretty(&manifest)?,
        )?;
        Ok(NodeStore {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    pub fn open(dir: &Path) -> Result<NodeStore> {
        let raw = fs::read(dir.join(MANIFEST_FILE))
            .map_err(|e| Error::Store(format!("cannot read manifest: {e}")))?;
        let manifest: Manifest = serde_json::from_slice(&raw)?;
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(Error::Store(format!(
                "unknown manifest schema {}",
                manifest.schema
            )));
        }
        if manifest.checksums.len() != manifest.code.n() {
            return Err(Error::Store(
                "manifest checksum count does not match code".into(),
            ));
        }
        Ok(NodeStore {
            dir: dir.to_path_buf(),
            manifest,
        })
    }

    fn node_path(&self, j: usize) -> PathBuf {
        self.dir.join(node_file_name(j))
    }

    pub fn missing_nodes(&self) -> Vec<usize> {
        (0..self.manifest.code.n())
            .filter(|&j| !self.node_path(j).exists())
            .collect()
    }

    /// Read and checksum-verify one node column stream.
    fn read_node(&self, j: usize) -> Result<Option<Vec<u32>>> {
        let path = self.node_path(j);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = fs::read(path)?;
        if sha256_hex(&bytes) != self.manifest.checksums[j] {
            return Err(Error::Store(format!("checksum mismatch on node {j}")));
        }
        let code = &self.manifest.code;
        let elems = decode_node_bytes(&bytes, self.manifest.element_bytes, code.field.order())?;
        if elems.len() != self.manifest.stripes * code.l {
            return Err(Error::Store(format!("node {j} holds wrong element count")));
        }
        Ok(Some(elems))
    }

    fn write_node(&self, j: usize, elems: &[u32]) -> Result<()> {
        let bytes = encode_node_bytes(elems, self.manifest.element_bytes);
        if sha256_hex(&bytes) != self.manifest.checksums[j] {
            return Err(Error::Store(format!(
                "restored node {j} does not match its recorded checksum"
            )));
        }
        fs::write(self.node_path(j), bytes)?;
        Ok(())
    }

    pub fn corrupt(&self, nodes: &[usize]) -> Result<()> {
        for &j in nodes {
            if j >= self.manifest.code.n() {
                return Err(Error::Store(format!("node {j} out of range")));
            }
            let path = self.node_path(j);
            if path.exists() {
                fs::remove_file(path)?;
            }
        }
        Ok(())
    }

    /// Repair one missing systematic node using the bandwidth-optimal
    /// protocol; a missing parity node falls back to re-encoding and the
    /// report is flagged accordingly.
    pub fn repair(&self, node: usize) -> Result<StoreRepairReport> {
        let code = self.manifest.code.clone();
        let missing = self.missing_nodes();
        if missing != [node] {
            return Err(Error::ErasureCount(missing.len()));
        }
        let streams: Vec<Option<Vec<u32>>> = (0..code.n())
            .map(|j| self.read_node(j))
            .collect::<Result<_>>()?;
        let stripes = self.manifest.stripes;
        let l = code.l;

        if node >= code.k {
            // Parity repair: recompute from the systematic columns. This
            // touches every stored symbol, so it is not bandwidth-optimal.
            let s = node - code.k;
            let mut restored = Vec::with_capacity(stripes * l);
            for start in (0..stripes).step_by(BATCH_STRIPES) {
                let b = BATCH_STRIPES.min(stripes - start);
                let mut parity = Matrix::zeros(code.field, l, b);
                for (stream, a) in streams[..code.k].iter().zip(&code.encoding[s]) {
                    let block = stream_to_matrix(code.field, stream.as_ref().unwrap(), l, start, b);
                    parity = parity.add(&a.mul(&block)?)?;
                }
                append_columns(&parity, &mut restored);
            }
            self.write_node(node, &restored)?;
            let surviving = (code.n() as u64 - 1) * (stripes * l) as u64;
            let accessed = (code.k * stripes * l) as u64;
            return Ok(StoreRepairReport {
                node,
                stripes,
                symbols_transmitted: accessed,
                symbols_accessed: accessed,
                surviving_symbols: surviving,
                bandwidth_fraction: Rational::new(accessed, surviving).to_string(),
                bandwidth_optimal: false,
                survivors: (0..code.k)
                    .map(|j| SurvivorTotals {
                        node: j,
                        symbols_accessed: (stripes * l) as u64,
                        symbols_transmitted: (stripes * l) as u64,
                    })
                    .collect(),
            });
        }

        let plan = RepairPlan::new(&code, node)?;
        let mut restored = Vec::with_capacity(stripes * l);
        for start in (0..stripes).step_by(BATCH_STRIPES) {
            let b = BATCH_STRIPES.min(stripes - start);
            let columns: Vec<Option<Matrix>> = streams
                .iter()
                .map(|st| {
                    st.as_ref()
                        .map(|v| stream_to_matrix(code.field, v, l, start, b))
                })
                .collect();
            append_columns(&plan.apply_batch(&code, &columns)?, &mut restored);
        }
        let per_stripe_tx = (l / code.r) as u64;
        let totals: Vec<SurvivorTotals> = plan
            .access_counts()
            .into_iter()
            .map(|(j, accessed)| SurvivorTotals {
                node: j,
                symbols_accessed: accessed * stripes as u64,
                symbols_transmitted: per_stripe_tx * stripes as u64,
            })
            .collect();
        self.write_node(node, &restored)?;
        let transmitted: u64 = totals.iter().map(|t| t.symbols_transmitted).sum();
        let accessed: u64 = totals.iter().map(|t| t.symbols_accessed).sum();
        let surviving = (code.n() as u64 - 1) * (stripes * l) as u64;
        Ok(StoreRepairReport {
            node,
            stripes,
            symbols_transmitted: transmitted,
            symbols_accessed: accessed,
            surviving_symbols: surviving,
            bandwidth_fraction: Rational::new(transmitted, surviving).to_string(),
            bandwidth_optimal: true,
            survivors: totals,
        })
    }

    /// Restore every missing node (at most r of them). Returns the nodes restored.
    pub fn reconstruct(&self) -> Result<Vec<usize>> {
        let code = self.manifest.code.clone();
        let missing = self.missing_nodes();
        if missing.is_empty() {
            return Ok(missing);
        }
        let plan = ReconstructPlan::new(&code, &missing)?;
        let streams: Vec<Option<Vec<u32>>> = (0..code.n())
            .map(|j| self.read_node(j))
            .collect::<Result<_>>()?;
        let stripes = self.manifest.stripes;
        let l = code.l;
        let mut restored: Vec<Vec<u32>> = vec![Vec::with_capacity(stripes * l); missing.len()];
        for start in (0..stripes).step_by(BATCH_STRIPES) {
            let b = BATCH_STRIPES.min(stripes - start);
            let columns: Vec<Option<Matrix>> = streams
                .iter()
                .map(|st| {
                    st.as_ref()
                        .map(|v| stream_to_matrix(code.field, v, l, start, b))
                })
                .collect();
            let data = plan.apply_batch(&code, &columns)?;
            for (slot, &j) in restored.iter_mut().zip(&missing) {
                if j < code.k {
                    append_columns(&data[j], slot);
                } else {
                    // Recompute just this parity block.
                    let s = j - code.k;
                    let mut parity = Matrix::zeros(code.field, l, b);
                    for (jj, block) in data.iter().enumerate() {
                        parity = parity.add(&code.encoding[s][jj].mul(block)?)?;
                    }
                    append_columns(&parity, slot);
                }
            }
        }
        for (slot, &j) in restored.iter().zip(&missing) {
            self.write_node(j, slot)?;
        }
        Ok(missing)
    }

    /// Recover the original byte stream from the systematic nodes.
    pub fn decode(&self) -> Result<Vec<u8>> {
        let code = &self.manifest.code;
        let missing: Vec<usize> = self
            .missing_nodes()
            .into_iter()
            .filter(|&j| j < code.k)
            .collect();
        if !missing.is_empty() {
            return Err(Error::Store(format!(
                "systematic nodes {missing:?} are missing; reconstruct first"
            )));
        }
        let stripes = self.manifest.stripes;
        let l = code.l;
        let mut elements = Vec::with_capacity(stripes * code.k * l);
        let streams: Vec<Vec<u32>> = (0..code.k)
            .map(|j| self.read_node(j).map(|o| o.unwrap()))
            .collect::<Result<_>>()?;
        for s in 0..stripes {
            for stream in &streams {
                elements.extend_from_slice(&stream[s * l..(s + 1) * l]);
            }
        }
        Ok(elements_to_bytes(
            &elements,
            self.manifest.bits_per_element,
            self.manifest.original_len,
        ))
    }

    /// Verify every present node file against its recorded checksum.
    pub fn verify_checksums(&self) -> Result<()> {
        for j in 0..self.manifest.code.n() {
            self.read_node(j)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_general, build_two_parity};
    use crate::gf::Field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chunking_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for bits in [2u32, 3, 7, 8, 11, 16] {
            for len in [0usize, 1, 2, 7, 64, 1000] {
                let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                let elems = bytes_to_elements(&bytes, bits);
                for &e in &elems {
                    assert!(e < 1 << bits);
                }
                assert_eq!(elements_to_bytes(&elems, bits, len as u64), bytes);
            }
        }
    }

    fn round_trip(len: usize) {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
        let input: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        assert_eq!(store.decode().unwrap(), input);
        // Corrupt up to r nodes, reconstruct, decode again.
        store.corrupt(&[1, 6]).unwrap();
        let store = NodeStore::open(dir.path()).unwrap();
        assert_eq!(store.reconstruct().unwrap(), vec![1, 6]);
        store.verify_checksums().unwrap();
        assert_eq!(store.decode().unwrap(), input);
    }

    #[test]
    fn round_trip_empty() {
        round_trip(0);
    }

    #[test]
    fn round_trip_one_byte() {
        round_trip(1);
    }

    #[test]
    fn round_trip_unaligned() {
        // 997 bytes is not a multiple of any stripe size here.
        round_trip(997);
    }

    #[test]
    fn repair_reports_half_bandwidth() {
        let code = build_two_parity(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let input: Vec<u8> = (0..4096).map(|_| rng.gen()).collect();
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        for node in 0..code.k {
            store.corrupt(&[node]).unwrap();
            let report = store.repair(node).unwrap();
            assert!(report.bandwidth_optimal);
            assert_eq!(report.bandwidth_fraction, "1/2");
            assert_eq!(report.symbols_transmitted * 2, report.surviving_symbols,);
            store.verify_checksums().unwrap();
        }
        assert_eq!(store.decode().unwrap(), input);
    }

    #[test]
    fn parity_repair_flagged_non_optimal() {
        let code = build_two_parity(2).unwrap();
        let input = vec![7u8; 512];
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        store.corrupt(&[code.k]).unwrap();
        let report = store.repair(code.k).unwrap();
        assert!(!report.bandwidth_optimal);
        store.verify_checksums().unwrap();
    }

    #[test]
    fn tampered_node_detected() {
        let code = build_two_parity(2).unwrap();
        let input = vec![1u8; 300];
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        let path = dir.path().join("node_000");
        let mut bytes = fs::read(&path).unwrap();
        bytes[0] ^= 1;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(store.verify_checksums(), Err(Error::Store(_))));
    }

    #[test]
    fn binary_field_store_round_trip() {
        // Covers the w-bit chunker for F_{2^w}.
        let code = build_general(2, 1, Field::binary(3).unwrap(), 42, 4096).unwrap();
        let input: Vec<u8> = (0..777u32).map(|i| (i * 31) as u8).collect();
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        store.corrupt(&[0]).unwrap();
        store.reconstruct().unwrap();
        assert_eq!(store.decode().unwrap(), input);
    }

    #[test]
    fn too_many_missing_rejected() {
        let code = build_two_parity(2).unwrap();
        let input = vec![9u8; 100];
        let dir = tempfile::tempdir().unwrap();
        let store = NodeStore::create(dir.path(), &code, &input, false).unwrap();
        store.corrupt(&[0, 1, 2]).unwrap();
        assert!(matches!(
            store.reconstruct(),
            Err(Error::TooManyErasures { erased: 3, r: 2 })
        ));
    }
}
