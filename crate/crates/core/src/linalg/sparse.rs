use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Coordinate-list integer matrix without duplicates or stored zeros.
///
/// Entries are kept sorted by `(col, row)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, 1)).collect() }
    }

    /// Builds from triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidInput(format!(
                    "entry ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            let e = acc.entry((c, r)).or_insert(0);
            *e = e.checked_add(v).ok_or(Error::Overflow("matrix assembly"))?;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((c, r), v)| (r, c, v)).collect();
        Ok(SparseIntMatrix { rows, cols, entries })
    }

    /// Builds from per-column sparse vectors whose rows are already distinct.
    pub(crate) fn from_columns(rows: usize, columns: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = columns.len();
        let mut entries = Vec::with_capacity(columns.iter().map(Vec::len).sum());
        for (c, col) in columns.into_iter().enumerate() {
            let mut col = col;
            col.sort_unstable_by_key(|e| e.0);
            entries.extend(col.into_iter().filter(|e| e.1 != 0).map(|(r, v)| (r as usize, c, v)));
        }
        SparseIntMatrix { rows, cols, entries }
    }

    pub fn from_dense(m: &IntMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.cols() {
            for r in 0..m.rows() {
                let v = m.get(r, c);
                if v != 0 {
                    entries.push((r, c, v));
                }
            }
        }
        SparseIntMatrix { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m.set(r, c, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn columns(&self) -> Vec<Vec<(u32, i64)>> {
        let mut out = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            out[c].push((r as u32, v));
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        SparseIntMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let trip = self.entries.iter().map(|&(r, c, v)| (row_perm[r], col_perm[c], v));
        SparseIntMatrix::from_triplets(self.rows, self.cols, trip).expect("permutation in range")
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput("dimension mismatch in product".into()));
        }
        let left = self.columns();
        let mut trip = Vec::new();
        for &(k, c, v) in &other.entries {
            for &(r, a) in &left[k] {
                trip.push((r as usize, c, a.checked_mul(v).ok_or(Error::Overflow("product"))?));
            }
        }
        SparseIntMatrix::from_triplets(self.rows, other.cols, trip)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coordinate text: header `rows cols nnz`, then `row col value` per line.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for &(r, c, v) in &self.entries {
            let _ = writeln!(s, "{r} {c} {v}");
        }
        s
    }

    pub fn from_coordinate_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.into() };
        let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(hl, "bad header field")))
            .collect::<Result<_>>()?;
        if h.len() != 3 {
            return Err(parse_err(hl, "header must be `rows cols nnz`"));
        }
        let mut trip = Vec::with_capacity(h[2]);
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(ln, "entry must be `row col value`"));
            }
            let r = f[0].parse().map_err(|_| parse_err(ln, "bad row"))?;
            let c = f[1].parse().map_err(|_| parse_err(ln, "bad column"))?;
            let v = f[2].parse().map_err(|_| parse_err(ln, "bad value"))?;
            trip.push((r, c, v));
        }
        if trip.len() != h[2] {
            return Err(parse_err(hl, "entry count does not match header"));
        }
        SparseIntMatrix::from_triplets(h[0], h[1], trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = SparseIntMatrix::from_triplets(2, 2, [(0, 0, 1), (0, 0, -1), (1, 0, 2), (1, 0, 3)]).unwrap();
        assert_eq!(m.entries(), &[(1, 0, 5)]);
        assert!(SparseIntMatrix::from_triplets(1, 1, [(1, 0, 1)]).is_err());
    }

    #[test]
    fn coordinate_text_round_trip() {
        let m = SparseIntMatrix::from_triplets(3, 4, [(0, 1, -2), (2, 3, 7), (1, 0, 1)]).unwrap();
        let back = SparseIntMatrix::from_coordinate_text(&m.to_coordinate_text()).unwrap();
        assert_eq!(m, back);
        assert!(SparseIntMatrix::from_coordinate_text("2 2 1\n0 0\n").is_err());
        assert!(SparseIntMatrix::from_coordinate_text("2 2 2\n0 0 1\n").is_err());
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseIntMatrix::from_triplets(2, 3, [(0, 0, 1), (0, 2, 2), (1, 1, 3)]).unwrap();
        let p = a.mul(&a.transpose()).unwrap().to_dense();
        assert_eq!(p.get(0, 0), 5);
        assert_eq!(p.get(1, 1), 9);
        assert_eq!(p.get(0, 1), 0);
    }
}
