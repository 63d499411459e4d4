//! Dense matrix and subspace algebra over a finite field.
//!
//! Row vectors act on matrices from the left throughout the crate: a subspace
//! `S` is carried into `S * A`, and eigenvectors satisfy `v * A = lambda * v`.

use crate::error::{Error, Result};
use crate::gf::Field;

/// Hard cap on ambient dimension; desk-scale codes use l = r^m with small m.
pub const MAX_DIM: usize = 4096;

/// Dense row-major matrix over a finite field. Entries are canonical
/// integer encodings of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        assert!(
            rows <= MAX_DIM && cols <= MAX_DIM,
            "matrix dimension exceeds {MAX_DIM}"
        );
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u32>]) -> Result<Matrix> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch("ragged row lengths".into()));
            }
            for &v in row {
                if v >= field.order() {
                    return Err(Error::InvalidField(format!(
                        "entry {v} out of range for field of order {}",
                        field.order()
                    )));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols: ncols,
            data,
        })
    }

    pub fn diagonal(field: Field, entries: &[u32]) -> Matrix {
        let mut m = Matrix::zeros(field, entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.order());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn check_same_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix add shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sub shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.sub(a, b))
            .collect();
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, s)).collect();
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product treating `v` as a column vector: self * v.
    pub fn mul_col(&self, v: &[u32]) -> Result<Vec<u32>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(
                "matrix-vector shapes differ".into(),
            ));
        }
        let f = self.field;
        let mut out = vec![0u32; self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = 0u32;
            for (a, &x) in self.row(r).iter().zip(v) {
                if *a != 0 && x != 0 {
                    acc = f.add(acc, f.mul(*a, x));
                }
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Copy of `count` consecutive rows starting at `start`.
    pub fn rows_range(&self, start: usize, count: usize) -> Matrix {
        assert!(start + count <= self.rows);
        Matrix {
            field: self.field,
            rows: count,
            cols: self.cols,
            data: self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        }
    }

    pub fn pow(&self, e: usize) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "pow requires a square matrix".into(),
            ));
        }
        let mut acc = Matrix::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row-echelon form with deterministic pivoting (leftmost column,
    /// topmost row) and leading-coefficient normalization. Returns the rank.
    pub fn rref(&self) -> (Matrix, usize) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if src != pivot_row {
                for c in 0..m.cols {
                    let a = m.get(pivot_row, c);
                    let b = m.get(src, c);
                    m.set(pivot_row, c, b);
                    m.set(src, c, a);
                }
            }
            let inv = f.inv(m.get(pivot_row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                m.set(pivot_row, c, f.mul(m.get(pivot_row, c), inv));
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(pivot_row, c)));
                    m.set(r, c, v);
                }
            }
            pivot_row += 1;
        }
        (m, pivot_row)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    pub fn det(&self) -> Result<u32> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant requires a square matrix".into(),
            ));
        }
        let f = self.field;
        let mut m = self.clone();
        let n = m.rows;
        let mut det = 1u32;
        for col in 0..n {
            let Some(src) = (col..n).find(|&r| m.get(r, col) != 0) else {
                return Ok(0);
            };
            if src != col {
                for c in 0..n {
                    let a = m.get(col, c);
                    let b = m.get(src, c);
                    m.set(col, c, b);
                    m.set(src, c, a);
                }
                det = f.neg(det);
            }
            let pivot = m.get(col, col);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), inv);
                if factor == 0 {
                    continue;
                }
                for c in col..n {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse requires a square matrix".into(),
            ));
        }
        let n = self.rows;
        let f = self.field;
        // Augment with the identity and reduce.
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, _) = aug.rref();
        for i in 0..n {
            if red.get(i, i) != 1 {
                return Err(Error::SingularMatrix);
            }
        }
        let mut inv = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c));
            }
        }
        Ok(inv)
    }

    /// Solve self * x = b for a column vector x. Errors if inconsistent;
    /// free variables (underdetermined systems) are set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Vec<u32>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(
                "rhs length differs from row count".into(),
            ));
        }
        let f = self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for (r, &rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, rhs);
        }
        let (red, _) = aug.rref();
        let mut x = vec![0u32; self.cols];
        for r in 0..self.rows {
            let Some(lead) = (0..self.cols).find(|&c| red.get(r, c) != 0) else {
                if red.get(r, self.cols) != 0 {
                    return Err(Error::InconsistentSystem);
                }
                continue;
            };
            x[lead] = red.get(r, self.cols);
        }
        Ok(x)
    }

    /// Basis (as rows) of the right null space: all x with self * x = 0.
    pub fn right_null_space(&self) -> Matrix {
        let (red, rank) = self.rref();
        let mut pivots = Vec::with_capacity(rank);
        for r in 0..rank {
            let lead = (0..self.cols)
                .find(|&c| red.get(r, c) != 0)
                .expect("nonzero row");
            pivots.push(lead);
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = self.field;
        let mut basis = Matrix::zeros(f, free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis.set(bi, fc, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(bi, pc, f.neg(red.get(pr, fc)));
            }
        }
        basis
    }

    /// Basis (as rows) of the left null space: all v with v * self = 0.
    pub fn left_null_space(&self) -> Matrix {
        self.transpose().right_null_space()
    }

    /// Exactly one nonzero entry per row and per column.
    pub fn is_generalized_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        for r in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&c| self.get(r, c) != 0).collect();
            if nz.len() != 1 || col_seen[nz[0]] {
                return false;
            }
            col_seen[nz[0]] = true;
        }
        true
    }

    /// Number of columns containing at least one nonzero entry.
    pub fn nonzero_col_count(&self) -> usize {
        (0..self.cols)
            .filter(|&c| (0..self.rows).any(|r| self.get(r, c) != 0))
            .count()
    }

    /// Number of nonzero entries in column `c`.
    pub fn col_nonzeros(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c) != 0).count()
    }
}

/// A subspace of F^l held as its unique canonical basis: the RREF of any
/// spanning set with zero rows dropped. Subspace equality is therefore
/// structural equality of the basis matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Canonicalize the row span of `m`.
    pub fn from_matrix(m: &Matrix) -> Subspace {
        let (red, rank) = m.rref();
        let mut basis = Matrix::zeros(m.field(), rank, m.cols());
        for r in 0..rank {
            for c in 0..m.cols() {
                basis.set(r, c, red.get(r, c));
            }
        }
        Subspace { basis }
    }

    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::identity(field, ambient),
        }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch("ambient dimensions differ".into()));
        }
        Ok(())
    }

    /// Sum of subspaces: the span of the union of bases.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection via the kernel method: left-kernel vectors (a | b) of the
    /// stacked basis satisfy a*U = -b*V, which ranges over exactly U cap V.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.field(), self.ambient_dim()));
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let kernel = stacked.left_null_space();
        let f = self.field();
        let du = self.dim();
        let mut rows = Matrix::zeros(f, kernel.rows(), self.ambient_dim());
        for r in 0..kernel.rows() {
            for c in 0..self.ambient_dim() {
                let mut acc = 0u32;
                for k in 0..du {
                    let a = kernel.get(r, k);
                    if a != 0 {
                        acc = f.add(acc, f.mul(a, self.basis.get(k, c)));
                    }
                }
                rows.set(r, c, acc);
            }
        }
        Ok(Subspace::from_matrix(&rows))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        let stacked = self.basis.vstack(&other.basis)?;
        Ok(stacked.rank() == self.dim())
    }

    /// Image of the subspace under right multiplication: span(S * A).
    pub fn apply(&self, a: &Matrix) -> Result<Subspace> {
        Ok(Subspace::from_matrix(&self.basis.mul(a)?))
    }
}

/// True iff span(S * A) = span(S).
pub fn is_invariant(s: &Subspace, a: &Matrix) -> Result<bool> {
    if !a.is_square() || a.rows() != s.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "invariance check requires a square matrix of the ambient dimension".into(),
        ));
    }
    Ok(&s.apply(a)? == s)
}

/// Assemble the unique matrix with the given left eigenspaces and eigenvalues:
/// v * A = lambda_u * v for every v in eigenspace u. Computed as
/// A = V^-1 * Lambda * V where V stacks the eigenspace basis rows.
pub fn assemble_from_eigen(eigenspaces: &[Matrix], eigenvalues: &[u32]) -> Result<Matrix> {
    if eigenspaces.is_empty() || eigenspaces.len() != eigenvalues.len() {
        return Err(Error::Construction(
            "need one eigenvalue per eigenspace and at least one eigenspace".into(),
        ));
    }
    let field = eigenspaces[0].field();
    let l = eigenspaces[0].cols();
    for (i, &lam) in eigenvalues.iter().enumerate() {
        if lam == 0 {
            return Err(Error::Construction("eigenvalues must be nonzero".into()));
        }
        for &other in &eigenvalues[i + 1..] {
            if lam == other {
                return Err(Error::Construction("repeated eigenvalue".into()));
            }
        }
    }
    let mut v: Option<Matrix> = None;
    let mut lambda_entries = Vec::with_capacity(l);
    for (space, &lam) in eigenspaces.iter().zip(eigenvalues) {
        if space.cols() != l || space.field() != field {
            return Err(Error::Construction("eigenspace shapes disagree".into()));
        }
        lambda_entries.extend(std::iter::repeat_n(lam, space.rows()));
        v = Some(match v {
            None => space.clone(),
            Some(prev) => prev.vstack(space)?,
        });
    }
    let v = v.unwrap();
    if v.rows() != l {
        return Err(Error::Construction(format!(
            "eigenspace dimensions sum to {} but the ambient dimension is {l}",
            v.rows()
        )));
    }
    let v_inv = v
        .invert()
        .map_err(|_| Error::Construction("eigenspaces do not form a direct sum of F^l".into()))?;
    let lambda = Matrix::diagonal(field, &lambda_entries);
    v_inv.mul(&lambda)?.mul(&v)
}

/// Left eigenspace of `a` for eigenvalue `lambda`: all v with v*(A - lambda*I) = 0.
pub fn left_eigenspace(a: &Matrix, lambda: u32) -> Result<Subspace> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "eigenspace of a non-square matrix".into(),
        ));
    }
    let shifted = a.sub(&Matrix::identity(a.field(), a.rows()).scale(lambda))?;
    Ok(Subspace::from_matrix(&shifted.left_null_space()))
}

/// Find G with X = G * S, given that rowspace(X) lies inside rowspace(S).
pub fn factor_through(x: &Matrix, s: &Matrix) -> Result<Matrix> {
    if x.cols() != s.cols() {
        return Err(Error::DimensionMismatch(
            "factor_through column counts differ".into(),
        ));
    }
    let st = s.transpose();
    let f = x.field();
    let mut g = Matrix::zeros(f, x.rows(), s.rows());
    for r in 0..x.rows() {
        let coeffs = st.solve(x.row(r))?;
        for (c, &v) in coeffs.iter().enumerate() {
            g.set(r, c, v);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn f4() -> Field {
        Field::binary(2).unwrap()
    }

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn rref_identity() {
        let i4 = Matrix::identity(f5(), 4);
        let (r, rank) = i4.rref();
        assert_eq!(r, i4);
        assert_eq!(rank, 4);
    }

    #[test]
    fn rref_dependent_rows() {
        let m = Matrix::from_rows(
            f2(),
            &[vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 1, 1, 1]],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn stacked_eigenspaces_full_rank() {
        // Bases e0+e2, e1+e3, e2, e3 span F^4.
        let m = Matrix::from_rows(
            f5(),
            &[
                vec![1, 0, 1, 0],
                vec![0, 1, 0, 1],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn det_of_f4_diagonal() {
        // det(diag(t+1, t)) = (t+1)*t = t^2+t = 1 over F_4.
        let m = Matrix::diagonal(f4(), &[3, 2]);
        assert_eq!(m.det().unwrap(), 1);
    }

    #[test]
    fn invert_round_trip() {
        let m = Matrix::from_rows(f5(), &[vec![1, 2], vec![3, 4]]).unwrap();
        let inv = m.invert().unwrap();
        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f5(), 2));
        assert_eq!(
            Matrix::identity(f5(), 3).invert().unwrap(),
            Matrix::identity(f5(), 3)
        );
    }

    #[test]
    fn solve_singular_inconsistent() {
        let a = Matrix::from_rows(f5(), &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(matches!(a.solve(&[1, 3]), Err(Error::InconsistentSystem)));
    }

    #[test]
    fn span_sum_examples() {
        let f = f4();
        let u = Subspace::from_matrix(&Matrix::from_rows(f, &[vec![1, 1]]).unwrap());
        let zero = Subspace::zero(f, 2);
        assert_eq!(u.sum(&zero).unwrap(), u);

        // span(1,1) + span(t+1, t) = F_4^2
        let v = Subspace::from_matrix(&Matrix::from_rows(f, &[vec![3, 2]]).unwrap());
        assert!(u.sum(&v).unwrap().is_full());

        let f = f2();
        let a =
            Subspace::from_matrix(&Matrix::from_rows(f, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap());
        let b =
            Subspace::from_matrix(&Matrix::from_rows(f, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap());
        assert_eq!(a.sum(&b).unwrap().dim(), 3);
    }

    #[test]
    fn span_intersect_examples() {
        let f = f5();
        // Digit subspaces for r=3, m=2 in F^9.
        let e = |i: usize| {
            let mut v = vec![0u32; 9];
            v[i] = 1;
            v
        };
        let p10 = Subspace::from_matrix(&Matrix::from_rows(f, &[e(0), e(1), e(2)]).unwrap());
        let p11 = Subspace::from_matrix(&Matrix::from_rows(f, &[e(3), e(4), e(5)]).unwrap());
        let p20 = Subspace::from_matrix(&Matrix::from_rows(f, &[e(0), e(3), e(6)]).unwrap());

        assert_eq!(p10.intersect(&p10).unwrap(), p10);

        let meet = p10.intersect(&p20).unwrap();
        assert_eq!(meet.dim(), 1);
        assert_eq!(
            meet,
            Subspace::from_matrix(&Matrix::from_rows(f, &[e(0)]).unwrap())
        );

        assert_eq!(p10.intersect(&p11).unwrap().dim(), 0);
    }

    #[test]
    fn invariance_examples() {
        let f = f4();
        let s3 = Subspace::from_matrix(&Matrix::from_rows(f, &[vec![1, 1]]).unwrap());
        let identity = Matrix::identity(f, 2);
        assert!(is_invariant(&s3, &identity).unwrap());

        // (1,1) is an eigenvector of [[t,1],[0,t+1]].
        let a21 = Matrix::from_rows(f, &[vec![2, 1], vec![0, 3]]).unwrap();
        assert!(is_invariant(&s3, &a21).unwrap());

        // diag(t+1, t) carries (1,1) to (t+1, t), a different line.
        let a23 = Matrix::diagonal(f, &[3, 2]);
        assert!(!is_invariant(&s3, &a23).unwrap());
    }

    #[test]
    fn assemble_diagonal() {
        let f = f5();
        let e0 = Matrix::from_rows(f, &[vec![1, 0]]).unwrap();
        let e1 = Matrix::from_rows(f, &[vec![0, 1]]).unwrap();
        let a = assemble_from_eigen(&[e0, e1], &[2, 3]).unwrap();
        assert_eq!(a, Matrix::diagonal(f, &[2, 3]));
    }

    #[test]
    fn assemble_antidiagonal() {
        // Eigenspaces span(y,x), span(-y,x) with eigenvalues xy, -xy give the
        // antidiagonal matrix with entries x^2, y^2.
        let f = f5();
        let (x, y) = (1u32, 2u32);
        let xy = f.mul(x, y);
        let plus = Matrix::from_rows(f, &[vec![y, x]]).unwrap();
        let minus = Matrix::from_rows(f, &[vec![f.neg(y), x]]).unwrap();
        let a = assemble_from_eigen(&[plus, minus], &[xy, f.neg(xy)]).unwrap();
        let expected = Matrix::from_rows(f, &[vec![0, f.mul(x, x)], vec![f.mul(y, y), 0]]).unwrap();
        assert_eq!(a, expected);
    }

    #[test]
    fn assemble_eigen_round_trip() {
        let f = f5();
        let s1 = Matrix::from_rows(f, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
        let s2 = Matrix::from_rows(f, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let a = assemble_from_eigen(&[s1.clone(), s2.clone()], &[2, 3]).unwrap();
        assert_eq!(left_eigenspace(&a, 2).unwrap(), Subspace::from_matrix(&s1));
        assert_eq!(left_eigenspace(&a, 3).unwrap(), Subspace::from_matrix(&s2));
    }

    #[test]
    fn assemble_rejects_bad_input() {
        let f = f5();
        let e0 = Matrix::from_rows(f, &[vec![1, 0]]).unwrap();
        let e0b = Matrix::from_rows(f, &[vec![2, 0]]).unwrap();
        assert!(assemble_from_eigen(&[e0.clone(), e0b], &[1, 2]).is_err());
        let e1 = Matrix::from_rows(f, &[vec![0, 1]]).unwrap();
        assert!(assemble_from_eigen(&[e0.clone(), e1.clone()], &[2, 2]).is_err());
        assert!(assemble_from_eigen(&[e0, e1], &[0, 2]).is_err());
    }

    #[test]
    fn factor_through_recovers_combination() {
        let f = f5();
        let s = Matrix::from_rows(f, &[vec![1, 0, 2], vec![0, 1, 3]]).unwrap();
        let g = Matrix::from_rows(f, &[vec![2, 1], vec![4, 0]]).unwrap();
        let x = g.mul(&s).unwrap();
        let got = factor_through(&x, &s).unwrap();
        assert_eq!(got.mul(&s).unwrap(), x);
    }

    fn arb_matrix(field_order: u32, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(0..field_order, rows * cols).prop_map(move |data| {
            let f = Field::prime(field_order).unwrap();
            let rows_vec: Vec<Vec<u32>> = data.chunks(cols).map(|chunk| chunk.to_vec()).collect();
            Matrix::from_rows(f, &rows_vec).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rref_is_idempotent(m in arb_matrix(5, 4, 6)) {
            let (r1, _) = m.rref();
            let (r2, _) = r1.rref();
            prop_assert_eq!(r1, r2);
        }

        #[test]
        fn dim_sum_intersection_formula(
            a in arb_matrix(7, 3, 8),
            b in arb_matrix(7, 4, 8),
        ) {
            let u = Subspace::from_matrix(&a);
            let v = Subspace::from_matrix(&b);
            let sum = u.sum(&v).unwrap();
            let meet = u.intersect(&v).unwrap();
            prop_assert_eq!(sum.dim() + meet.dim(), u.dim() + v.dim());
            prop_assert!(u.contains(&meet).unwrap());
            prop_assert!(v.contains(&meet).unwrap());
            prop_assert!(sum.contains(&u).unwrap());
        }
    }
}
