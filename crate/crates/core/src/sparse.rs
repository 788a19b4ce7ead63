//! Sparse boolean/integer kernels in the GraphBLAS style.
//!
//! Matrices are stored in CSR form with sorted, duplicate-free column
//! indices. Vectors are sorted index sets. Everything here is an immutable
//! value once built: operations return new objects.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseError {
    #[error("tuple ({row}, {col}) out of bounds for {nrows}x{ncols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("index {index} out of bounds for vector of dimension {dimension}")]
    VectorIndexOutOfBounds { index: usize, dimension: usize },
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
}

pub type Result<T, E = SparseError> = std::result::Result<T, E>;

/// Binary operators usable as semiring add/multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Plus,
    Times,
    Min,
}

impl BinaryOp {
    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            BinaryOp::Or => ((a != 0) || (b != 0)) as i64,
            BinaryOp::And => ((a != 0) && (b != 0)) as i64,
            BinaryOp::Plus => a.wrapping_add(b),
            BinaryOp::Times => a.wrapping_mul(b),
            BinaryOp::Min => a.min(b),
        }
    }
}

/// An (add, multiply) pair with the additive identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Semiring {
    pub add_op: BinaryOp,
    pub mul_op: BinaryOp,
    pub add_identity: i64,
}

impl Semiring {
    /// OR/AND over {0, 1}. Products under this semiring are structural.
    pub const BOOLEAN: Semiring = Semiring {
        add_op: BinaryOp::Or,
        mul_op: BinaryOp::And,
        add_identity: 0,
    };
    pub const PLUS_TIMES: Semiring = Semiring {
        add_op: BinaryOp::Plus,
        mul_op: BinaryOp::Times,
        add_identity: 0,
    };
    /// Min-plus (tropical). Multiplication saturates so that "infinite"
    /// operands stay infinite.
    pub const MIN_PLUS: Semiring = Semiring {
        add_op: BinaryOp::Min,
        mul_op: BinaryOp::Plus,
        add_identity: i64::MAX,
    };

    pub fn is_boolean(&self) -> bool {
        *self == Semiring::BOOLEAN
    }

    pub fn add(&self, a: i64, b: i64) -> i64 {
        self.add_op.apply(a, b)
    }

    pub fn mul(&self, a: i64, b: i64) -> i64 {
        match (self.mul_op, self.add_op) {
            (BinaryOp::Plus, BinaryOp::Min) => a.saturating_add(b),
            (op, _) => op.apply(a, b),
        }
    }
}

/// Sorted set of positions in `0..dimension`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    dimension: usize,
    indices: Vec<usize>,
}

impl BitVector {
    pub fn empty(dimension: usize) -> Self {
        BitVector {
            dimension,
            indices: Vec::new(),
        }
    }

    pub fn singleton(dimension: usize, index: usize) -> Result<Self> {
        Self::from_indices(dimension, vec![index])
    }

    /// Builds a vector from arbitrary (unsorted, possibly repeated) indices.
    pub fn from_indices(dimension: usize, mut indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= dimension) {
            return Err(SparseError::VectorIndexOutOfBounds {
                index: bad,
                dimension,
            });
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(BitVector { dimension, indices })
    }

    /// Caller guarantees `indices` is strictly increasing and in bounds.
    pub(crate) fn from_sorted_unchecked(dimension: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&i| i < dimension));
        BitVector { dimension, indices }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn nvals(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Appends an index larger than every stored one.
    pub(crate) fn push(&mut self, index: usize) {
        debug_assert!(index < self.dimension);
        debug_assert!(self.indices.last().is_none_or(|&last| last < index));
        self.indices.push(index);
    }

    pub(crate) fn grow(&mut self, dimension: usize) {
        debug_assert!(dimension >= self.dimension);
        self.dimension = dimension;
    }

    /// `self \ other`.
    pub fn difference(&self, other: &BitVector) -> Result<BitVector> {
        check_dims("difference", self.dimension, other.dimension)?;
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|i| !other.contains(*i))
            .collect();
        Ok(BitVector::from_sorted_unchecked(self.dimension, indices))
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if !self.indices.windows(2).all(|w| w[0] < w[1]) {
            return Err("indices not strictly increasing".into());
        }
        if let Some(&last) = self.indices.last() {
            if last >= self.dimension {
                return Err(format!("index {last} >= dimension {}", self.dimension));
            }
        }
        Ok(())
    }
}

fn check_dims(op: &'static str, left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(SparseError::DimensionMismatch {
            op,
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(())
}

/// Sorted union of two vectors of the same dimension.
pub fn ewise_union(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    check_dims("ewise_union", a.dimension, b.dimension)?;
    let (x, y) = (&a.indices, &b.indices);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(x[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    Ok(BitVector::from_sorted_unchecked(a.dimension, out))
}

/// Compressed sparse row matrix. `vals` is `None` for structural
/// (boolean) matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Option<Vec<i64>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix({}x{}, nvals={}) ", self.nrows, self.ncols, self.nvals())?;
        match &self.vals {
            None => f.debug_set().entries(self.iter_pattern()).finish(),
            Some(_) => f.debug_map().entries(self.iter_valued().map(|(r, c, v)| ((r, c), v))).finish(),
        }
    }
}

impl SparseMatrix {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            vals: None,
        }
    }

    /// Identity pattern of order `n`.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            vals: None,
        }
    }

    /// Builds a structural matrix. Duplicate tuples collapse (boolean OR).
    pub fn build(nrows: usize, ncols: usize, tuples: &[(usize, usize)]) -> Result<Self> {
        for &(row, col) in tuples {
            if row >= nrows || col >= ncols {
                return Err(SparseError::IndexOutOfBounds {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
        }
        // counting sort by row, then sort+dedup each row
        let mut row_ptr = vec![0usize; nrows + 1];
        for &(r, _) in tuples {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut next = row_ptr.clone();
        let mut cols = vec![0usize; tuples.len()];
        for &(r, c) in tuples {
            cols[next[r]] = c;
            next[r] += 1;
        }
        let mut col_idx = Vec::with_capacity(tuples.len());
        let mut out_ptr = Vec::with_capacity(nrows + 1);
        out_ptr.push(0);
        for r in 0..nrows {
            let row = &mut cols[row_ptr[r]..row_ptr[r + 1]];
            row.sort_unstable();
            let start = col_idx.len();
            for &c in row.iter() {
                if col_idx.len() == start || *col_idx.last().unwrap() != c {
                    col_idx.push(c);
                }
            }
            out_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr: out_ptr,
            col_idx,
            vals: None,
        })
    }

    /// Builds a valued matrix; duplicates are combined with `dup`.
    pub fn build_valued(
        nrows: usize,
        ncols: usize,
        tuples: &[(usize, usize, i64)],
        dup: BinaryOp,
    ) -> Result<Self> {
        let mut sorted = tuples.to_vec();
        for &(row, col, _) in &sorted {
            if row >= nrows || col >= ncols {
                return Err(SparseError::IndexOutOfBounds {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
        }
        // stable so that dup is applied in input order
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut vals: Vec<i64> = Vec::with_capacity(sorted.len());
        let mut prev: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if prev == Some((r, c)) {
                let last = vals.last_mut().unwrap();
                *last = dup.apply(*last, v);
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            vals: Some(vals),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nvals(&self) -> usize {
        self.col_idx.len()
    }

    pub fn is_structural(&self) -> bool {
        self.vals.is_none()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn vals(&self) -> Option<&[i64]> {
        self.vals.as_deref()
    }

    /// Column indices stored in row `r`.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    fn row_vals(&self, r: usize) -> Option<&[i64]> {
        self.vals
            .as_ref()
            .map(|v| &v[self.row_ptr[r]..self.row_ptr[r + 1]])
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        r < self.nrows && self.row(r).binary_search(&c).is_ok()
    }

    /// Value at `(r, c)`; structural entries read as 1.
    pub fn get(&self, r: usize, c: usize) -> Option<i64> {
        if r >= self.nrows {
            return None;
        }
        let pos = self.row(r).binary_search(&c).ok()?;
        Some(self.row_vals(r).map_or(1, |v| v[pos]))
    }

    pub fn iter_pattern(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).iter().map(move |&c| (r, c)))
    }

    pub fn iter_valued(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let vals = self.row_vals(r);
            self.row(r)
                .iter()
                .enumerate()
                .map(move |(k, &c)| (r, c, vals.map_or(1, |v| v[k])))
        })
    }

    /// Stored pattern as sorted `(row, col)` tuples.
    pub fn extract_tuples(&self) -> Vec<(usize, usize)> {
        self.iter_pattern().collect()
    }

    pub fn out_degree(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    /// Pads the matrix to a larger shape; stored entries are unchanged.
    pub fn resize(&self, nrows: usize, ncols: usize) -> SparseMatrix {
        assert!(nrows >= self.nrows && ncols >= self.ncols, "resize only grows");
        let mut row_ptr = self.row_ptr.clone();
        row_ptr.resize(nrows + 1, self.nvals());
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx: self.col_idx.clone(),
            vals: self.vals.clone(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut row_ptr = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            row_ptr[c + 1] += 1;
        }
        for c in 0..self.ncols {
            row_ptr[c + 1] += row_ptr[c];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0usize; self.nvals()];
        let mut vals = self.vals.as_ref().map(|v| vec![0i64; v.len()]);
        // rows visited in order, so each output row comes out sorted
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let dst = next[c];
                col_idx[dst] = r;
                if let (Some(out), Some(src)) = (vals.as_mut(), self.vals.as_ref()) {
                    out[dst] = src[k];
                }
                next[c] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            vals,
        }
    }

    /// Pattern union with another matrix of the same shape.
    pub fn union_pattern(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(shape_mismatch("union_pattern", self, other));
        }
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.nvals() + other.nvals());
        for r in 0..self.nrows {
            let (x, y) = (self.row(r), other.row(r));
            let (mut i, mut j) = (0, 0);
            while i < x.len() || j < y.len() {
                let next = match (x.get(i), y.get(j)) {
                    (Some(&a), Some(&b)) if a == b => {
                        i += 1;
                        j += 1;
                        a
                    }
                    (Some(&a), Some(&b)) if a < b => {
                        i += 1;
                        a
                    }
                    (Some(_), Some(&b)) => {
                        j += 1;
                        b
                    }
                    (Some(&a), None) => {
                        i += 1;
                        a
                    }
                    (None, Some(&b)) => {
                        j += 1;
                        b
                    }
                    (None, None) => unreachable!(),
                };
                col_idx.push(next);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            vals: None,
        })
    }

    /// Checks the four structural invariants of the CSR layout.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.row_ptr.len() != self.nrows + 1 {
            return Err(format!(
                "row_ptr has length {}, expected {}",
                self.row_ptr.len(),
                self.nrows + 1
            ));
        }
        if self.row_ptr[0] != 0 {
            return Err("row_ptr[0] != 0".into());
        }
        if !self.row_ptr.windows(2).all(|w| w[0] <= w[1]) {
            return Err("row_ptr is decreasing somewhere".into());
        }
        if self.row_ptr[self.nrows] != self.col_idx.len() {
            return Err("row_ptr[nrows] != len(col_idx)".into());
        }
        for r in 0..self.nrows {
            let row = self.row(r);
            if !row.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("row {r} not strictly increasing"));
            }
            if let Some(&c) = row.last() {
                if c >= self.ncols {
                    return Err(format!("row {r} has column {c} >= ncols {}", self.ncols));
                }
            }
        }
        if let Some(v) = &self.vals {
            if v.len() != self.col_idx.len() {
                return Err("vals and col_idx differ in length".into());
            }
        }
        Ok(())
    }
}

fn shape_mismatch(op: &'static str, a: &SparseMatrix, b: &SparseMatrix) -> SparseError {
    SparseError::DimensionMismatch {
        op,
        left: format!("{}x{}", a.nrows, a.ncols),
        right: format!("{}x{}", b.nrows, b.ncols),
    }
}

/// Row vector times matrix over the boolean semiring, optionally masked.
///
/// With `complement_mask` the result excludes every position of `mask`;
/// otherwise it is restricted to them.
pub fn vxm(
    v: &BitVector,
    m: &SparseMatrix,
    mask: Option<&BitVector>,
    complement_mask: bool,
) -> Result<BitVector> {
    check_dims("vxm", v.dimension, m.nrows)?;
    if let Some(mask) = mask {
        check_dims("vxm mask", mask.dimension, m.ncols)?;
    }
    let keep = |c: usize| match mask {
        None => true,
        Some(mask) => mask.contains(c) != complement_mask,
    };

    let work: usize = v.iter().map(|r| m.out_degree(r)).sum();
    let indices = if work > m.ncols / 8 {
        // dense marker when the expansion touches a large share of columns
        let mut seen = vec![false; m.ncols];
        for r in v.iter() {
            for &c in m.row(r) {
                seen[c] = true;
            }
        }
        if let (Some(mask), true) = (mask, complement_mask) {
            for c in mask.iter() {
                seen[c] = false;
            }
            seen.iter()
                .enumerate()
                .filter_map(|(c, &s)| s.then_some(c))
                .collect()
        } else {
            seen.iter()
                .enumerate()
                .filter_map(|(c, &s)| (s && keep(c)).then_some(c))
                .collect()
        }
    } else {
        let mut out = Vec::with_capacity(work);
        for r in v.iter() {
            out.extend(m.row(r).iter().copied().filter(|&c| keep(c)));
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    Ok(BitVector::from_sorted_unchecked(m.ncols, indices))
}

/// Matrix product `A ⊕.⊗ B`, optionally restricted to the pattern of `mask`.
pub fn mxm(
    a: &SparseMatrix,
    b: &SparseMatrix,
    semiring: Semiring,
    mask: Option<&SparseMatrix>,
) -> Result<SparseMatrix> {
    if a.ncols != b.nrows {
        return Err(shape_mismatch("mxm", a, b));
    }
    if let Some(mask) = mask {
        if mask.nrows != a.nrows || mask.ncols != b.ncols {
            return Err(SparseError::DimensionMismatch {
                op: "mxm mask",
                left: format!("{}x{}", a.nrows, b.ncols),
                right: format!("{}x{}", mask.nrows, mask.ncols),
            });
        }
    }
    let boolean = semiring.is_boolean();
    // Gustavson: dense accumulator per output row
    let mut acc = vec![semiring.add_identity; b.ncols];
    let mut occupied = vec![false; b.ncols];
    let mut touched: Vec<usize> = Vec::new();
    let mut row_ptr = Vec::with_capacity(a.nrows + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut vals = Vec::new();

    for r in 0..a.nrows {
        let a_vals = a.row_vals(r);
        for (ka, &k) in a.row(r).iter().enumerate() {
            let av = a_vals.map_or(1, |v| v[ka]);
            let b_vals = b.row_vals(k);
            for (kb, &c) in b.row(k).iter().enumerate() {
                let bv = b_vals.map_or(1, |v| v[kb]);
                let prod = semiring.mul(av, bv);
                if occupied[c] {
                    acc[c] = semiring.add(acc[c], prod);
                } else {
                    occupied[c] = true;
                    acc[c] = prod;
                    touched.push(c);
                }
            }
        }
        touched.sort_unstable();
        let mask_row = mask.map(|m| m.row(r));
        for &c in &touched {
            let allowed = mask_row.is_none_or(|row| row.binary_search(&c).is_ok());
            // boolean results store the pattern only; a false entry is absent
            if allowed && (!boolean || acc[c] != 0) {
                col_idx.push(c);
                if !boolean {
                    vals.push(acc[c]);
                }
            }
            occupied[c] = false;
            acc[c] = semiring.add_identity;
        }
        touched.clear();
        row_ptr.push(col_idx.len());
    }

    Ok(SparseMatrix {
        nrows: a.nrows,
        ncols: b.ncols,
        row_ptr,
        col_idx,
        vals: if boolean { None } else { Some(vals) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SparseMatrix {
        let tuples: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        SparseMatrix::build(n, n, &tuples).unwrap()
    }

    fn bv(dim: usize, idx: &[usize]) -> BitVector {
        BitVector::from_indices(dim, idx.to_vec()).unwrap()
    }

    #[test]
    fn build_empty() {
        let m = SparseMatrix::build(2, 2, &[]).unwrap();
        assert_eq!(m.row_ptr(), &[0, 0, 0]);
        assert!(m.col_idx().is_empty());
        assert_eq!(m.nvals(), 0);
    }

    #[test]
    fn build_collapses_duplicates() {
        let m = SparseMatrix::build(3, 3, &[(0, 1), (1, 2), (0, 1)]).unwrap();
        assert_eq!(m.nvals(), 2);
        assert_eq!(m.row(0), &[1]);
        assert_eq!(m.row(1), &[2]);
        m.check_invariants().unwrap();
    }

    #[test]
    fn build_rejects_out_of_bounds() {
        let err = SparseMatrix::build(3, 3, &[(0, 1), (3, 0)]).unwrap_err();
        assert_eq!(
            err,
            SparseError::IndexOutOfBounds {
                row: 3,
                col: 0,
                nrows: 3,
                ncols: 3
            }
        );
        assert!(err.to_string().contains("(3, 0)"));
    }

    #[test]
    fn build_valued_combines_with_dup_op() {
        let m = SparseMatrix::build_valued(2, 2, &[(0, 0, 2), (0, 0, 5), (1, 1, 3)], BinaryOp::Plus)
            .unwrap();
        assert_eq!(m.get(0, 0), Some(7));
        assert_eq!(m.get(1, 1), Some(3));
        let m = SparseMatrix::build_valued(2, 2, &[(0, 0, 2), (0, 0, 5)], BinaryOp::Min).unwrap();
        assert_eq!(m.get(0, 0), Some(2));
    }

    #[test]
    fn vxm_path_step() {
        let p = path(4);
        assert_eq!(vxm(&bv(4, &[0]), &p, None, false).unwrap(), bv(4, &[1]));
    }

    #[test]
    fn vxm_identity_is_noop() {
        let v = bv(6, &[0, 2, 5]);
        assert_eq!(vxm(&v, &SparseMatrix::identity(6), None, false).unwrap(), v);
    }

    #[test]
    fn vxm_complement_mask() {
        let p = path(4);
        let out = vxm(&bv(4, &[0, 1]), &p, Some(&bv(4, &[1])), true).unwrap();
        assert_eq!(out, bv(4, &[2]));
        let out = vxm(&bv(4, &[0, 1]), &p, Some(&bv(4, &[1])), false).unwrap();
        assert_eq!(out, bv(4, &[1]));
    }

    #[test]
    fn vxm_dimension_mismatch() {
        let p = path(4);
        assert!(matches!(
            vxm(&bv(3, &[0]), &p, None, false),
            Err(SparseError::DimensionMismatch { .. })
        ));
        assert!(vxm(&bv(4, &[0]), &p, Some(&bv(5, &[])), false).is_err());
    }

    #[test]
    fn mxm_path_squared() {
        let p = path(4);
        let p2 = mxm(&p, &p, Semiring::BOOLEAN, None).unwrap();
        assert_eq!(p2.extract_tuples(), vec![(0, 2), (1, 3)]);
        assert!(p2.is_structural());
    }

    #[test]
    fn mxm_identity_left() {
        let b = SparseMatrix::build(3, 4, &[(0, 3), (2, 1), (2, 2)]).unwrap();
        let out = mxm(&SparseMatrix::identity(3), &b, Semiring::BOOLEAN, None).unwrap();
        assert_eq!(out.extract_tuples(), b.extract_tuples());
    }

    #[test]
    fn mxm_masked_and_shape_errors() {
        let p = path(4);
        let mask = SparseMatrix::build(4, 4, &[(0, 2)]).unwrap();
        let out = mxm(&p, &p, Semiring::BOOLEAN, Some(&mask)).unwrap();
        assert_eq!(out.extract_tuples(), vec![(0, 2)]);
        let bad = SparseMatrix::empty(3, 3);
        assert!(mxm(&p, &bad, Semiring::BOOLEAN, None).is_err());
        assert!(mxm(&p, &p, Semiring::BOOLEAN, Some(&bad)).is_err());
    }

    #[test]
    fn mxm_plus_times_and_min_plus() {
        // [[1,2],[0,3]] * [[4,0],[5,6]] = [[14,12],[15,18]]
        let a = SparseMatrix::build_valued(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 1, 3)], BinaryOp::Plus)
            .unwrap();
        let b = SparseMatrix::build_valued(2, 2, &[(0, 0, 4), (1, 0, 5), (1, 1, 6)], BinaryOp::Plus)
            .unwrap();
        let c = mxm(&a, &b, Semiring::PLUS_TIMES, None).unwrap();
        assert_eq!(
            c.iter_valued().collect::<Vec<_>>(),
            vec![(0, 0, 14), (0, 1, 12), (1, 0, 15), (1, 1, 18)]
        );
        let d = mxm(&a, &b, Semiring::MIN_PLUS, None).unwrap();
        // (0,0): min(1+4, 2+5)=5; (0,1): 2+6=8; (1,0): 3+5=8; (1,1): 3+6=9
        assert_eq!(
            d.iter_valued().collect::<Vec<_>>(),
            vec![(0, 0, 5), (0, 1, 8), (1, 0, 8), (1, 1, 9)]
        );
    }

    #[test]
    fn union_of_vectors() {
        assert_eq!(
            ewise_union(&bv(8, &[1, 3]), &bv(8, &[2, 3])).unwrap(),
            bv(8, &[1, 2, 3])
        );
        assert_eq!(ewise_union(&bv(8, &[]), &bv(8, &[5])).unwrap(), bv(8, &[5]));
        assert!(ewise_union(&bv(8, &[]), &bv(9, &[])).is_err());
    }

    #[test]
    fn transpose_cases() {
        let e = SparseMatrix::empty(3, 5).transpose();
        assert_eq!((e.nrows(), e.ncols(), e.nvals()), (5, 3, 0));
        assert_eq!(path(3).transpose().extract_tuples(), vec![(1, 0), (2, 1)]);
    }

    #[test]
    fn nvals_counts() {
        assert_eq!(SparseMatrix::empty(4, 4).nvals(), 0);
        assert_eq!(bv(10, &[2, 7, 9]).nvals(), 3);
    }

    #[test]
    fn resize_pads() {
        let m = path(3).resize(8, 8);
        m.check_invariants().unwrap();
        assert_eq!(m.extract_tuples(), vec![(0, 1), (1, 2)]);
        assert_eq!(m.row(7), &[] as &[usize]);
    }

    #[test]
    fn semiring_identities() {
        for s in [Semiring::BOOLEAN, Semiring::PLUS_TIMES, Semiring::MIN_PLUS] {
            let domain: &[i64] = if s.is_boolean() { &[0, 1] } else { &[-7, 0, 3, 1 << 40] };
            for &x in domain {
                assert_eq!(s.add(x, s.add_identity), x);
                for &y in domain {
                    assert_eq!(s.add(x, y), s.add(y, x));
                    for &z in domain {
                        assert_eq!(s.add(s.add(x, y), z), s.add(x, s.add(y, z)));
                    }
                }
            }
        }
    }
}
