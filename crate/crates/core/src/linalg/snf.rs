use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::dense::IntMatrix;
use super::sparse::SparseIntMatrix;
use crate::budget::Budget;
use crate::error::{Error, Result};

#[inline]
fn mul_add(a: i64, q: i64, b: i64) -> Result<i64> {
    let v = a as i128 + q as i128 * b as i128;
    i64::try_from(v).map_err(|_| Error::Overflow("smith reduction"))
}

/// Result of a Smith reduction: `U * A * V = diag(diagonal, 0, ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    /// Nonzero invariant factors, each dividing the next.
    pub diagonal: Vec<u64>,
    pub rank: usize,
    #[serde(skip)]
    pub transforms: Option<(IntMatrix, IntMatrix)>,
}

impl SmithDecomposition {
    pub fn torsion(&self) -> Vec<u64> {
        self.diagonal.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// Dense Smith reduction with optional transform tracking.
pub(crate) struct DenseSmith {
    pub diag: Vec<u64>,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

struct Work {
    a: IntMatrix,
    u: Option<(IntMatrix, IntMatrix)>,
    v: Option<(IntMatrix, IntMatrix)>,
}

impl Work {
    // row_i += q * row_j
    fn row_add(&mut self, i: usize, j: usize, q: i64, from_col: usize) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        let cols = self.a.cols();
        for c in from_col..cols {
            let b = self.a.get(j, c);
            if b != 0 {
                let v = mul_add(self.a.get(i, c), q, b)?;
                self.a.set(i, c, v);
            }
        }
        if let Some((u, ui)) = &mut self.u {
            for c in 0..u.cols() {
                let b = u.get(j, c);
                if b != 0 {
                    let v = mul_add(u.get(i, c), q, b)?;
                    u.set(i, c, v);
                }
            }
            // U^{-1} <- U^{-1} (I - q e_ij): col_j -= q col_i
            for r in 0..ui.rows() {
                let b = ui.get(r, i);
                if b != 0 {
                    let v = mul_add(ui.get(r, j), -q, b)?;
                    ui.set(r, j, v);
                }
            }
        }
        Ok(())
    }

    // col_i += q * col_j
    fn col_add(&mut self, i: usize, j: usize, q: i64, from_row: usize) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for r in from_row..self.a.rows() {
            let b = self.a.get(r, j);
            if b != 0 {
                let v = mul_add(self.a.get(r, i), q, b)?;
                self.a.set(r, i, v);
            }
        }
        if let Some((v, vi)) = &mut self.v {
            for r in 0..v.rows() {
                let b = v.get(r, j);
                if b != 0 {
                    let x = mul_add(v.get(r, i), q, b)?;
                    v.set(r, i, x);
                }
            }
            // V^{-1} <- (I - q e_ji) V^{-1}: row_j -= q row_i
            for c in 0..vi.cols() {
                let b = vi.get(i, c);
                if b != 0 {
                    let x = mul_add(vi.get(j, c), -q, b)?;
                    vi.set(j, c, x);
                }
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.a.cols() {
            let t = self.a.get(i, c);
            self.a.set(i, c, self.a.get(j, c));
            self.a.set(j, c, t);
        }
        if let Some((u, ui)) = &mut self.u {
            for c in 0..u.cols() {
                let t = u.get(i, c);
                u.set(i, c, u.get(j, c));
                u.set(j, c, t);
            }
            for r in 0..ui.rows() {
                let t = ui.get(r, i);
                ui.set(r, i, ui.get(r, j));
                ui.set(r, j, t);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.a.rows() {
            let t = self.a.get(r, i);
            self.a.set(r, i, self.a.get(r, j));
            self.a.set(r, j, t);
        }
        if let Some((v, vi)) = &mut self.v {
            for r in 0..v.rows() {
                let t = v.get(r, i);
                v.set(r, i, v.get(r, j));
                v.set(r, j, t);
            }
            for c in 0..vi.cols() {
                let t = vi.get(i, c);
                vi.set(i, c, vi.get(j, c));
                vi.set(j, c, t);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.a.cols() {
            self.a.set(i, c, -self.a.get(i, c));
        }
        if let Some((u, ui)) = &mut self.u {
            for c in 0..u.cols() {
                u.set(i, c, -u.get(i, c));
            }
            for r in 0..ui.rows() {
                ui.set(r, i, -ui.get(r, i));
            }
        }
    }

    /// Smallest nonzero magnitude in the trailing block, ties to the
    /// sparsest row+column.
    fn pick_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        let mut best: Option<(u64, usize, usize, usize)> = None;
        let mut row_nnz = vec![0usize; rows];
        let mut col_nnz = vec![0usize; cols];
        for r in t..rows {
            for c in t..cols {
                if self.a.get(r, c) != 0 {
                    row_nnz[r] += 1;
                    col_nnz[c] += 1;
                }
            }
        }
        for r in t..rows {
            if row_nnz[r] == 0 {
                continue;
            }
            for c in t..cols {
                let v = self.a.get(r, c);
                if v == 0 {
                    continue;
                }
                let key = (v.unsigned_abs(), row_nnz[r] + col_nnz[c], r, c);
                if best.map_or(true, |b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        best.map(|(_, _, r, c)| (r, c))
    }

    /// Clears row t and column t outside the diagonal entry.
    fn clear_cross(&mut self, t: usize) -> Result<()> {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        loop {
            let p = self.a.get(t, t);
            let mut dirty = false;
            for r in t + 1..rows {
                let v = self.a.get(r, t);
                if v != 0 {
                    let q = v.div_euclid(p);
                    self.row_add(r, t, -q, t)?;
                    if self.a.get(r, t) != 0 {
                        dirty = true;
                    }
                }
            }
            for c in t + 1..cols {
                let v = self.a.get(t, c);
                if v != 0 {
                    let q = v.div_euclid(p);
                    self.col_add(c, t, -q, t)?;
                    if self.a.get(t, c) != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                return Ok(());
            }
            // move the smallest remaining entry of the cross onto the diagonal
            let mut best = (self.a.get(t, t).unsigned_abs(), t, t);
            for r in t + 1..rows {
                let v = self.a.get(r, t).unsigned_abs();
                if v != 0 && v < best.0 {
                    best = (v, r, t);
                }
            }
            for c in t + 1..cols {
                let v = self.a.get(t, c).unsigned_abs();
                if v != 0 && v < best.0 {
                    best = (v, t, c);
                }
            }
            self.swap_rows(t, best.1);
            self.swap_cols(t, best.2);
        }
    }
}

/// Full dense reduction. `track` requests `U`, `U^{-1}`, `V`, `V^{-1}`.
pub(crate) fn dense_smith(a: &IntMatrix, track: bool, budget: &Budget) -> Result<DenseSmith> {
    dense_smith_tracking(a, track, track, budget)
}

/// Dense reduction tracking only the row transforms, the column transforms,
/// or both.
pub(crate) fn dense_smith_tracking(a: &IntMatrix, rows_t: bool, cols_t: bool, budget: &Budget) -> Result<DenseSmith> {
    let (rows, cols) = (a.rows(), a.cols());
    if (rows_t && rows > budget.dense_dim) || (cols_t && cols > budget.dense_dim) {
        return Err(Error::BudgetExceeded(format!(
            "dense reduction with transforms of {rows}x{cols} exceeds {}",
            budget.dense_dim
        )));
    }
    if (rows as u64).saturating_mul(cols as u64) > budget.snf_entries {
        return Err(Error::BudgetExceeded(format!("dense {rows}x{cols} block exceeds the reduction budget")));
    }
    let mut w = Work {
        a: a.clone(),
        u: rows_t.then(|| (IntMatrix::identity(rows), IntMatrix::identity(rows))),
        v: cols_t.then(|| (IntMatrix::identity(cols), IntMatrix::identity(cols))),
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        if t % 32 == 0 {
            budget.check_time()?;
        }
        let Some((r, c)) = w.pick_pivot(t) else { break };
        w.swap_rows(t, r);
        w.swap_cols(t, c);
        w.clear_cross(t)?;
        if w.a.get(t, t) < 0 {
            w.negate_row(t);
        }
        rank += 1;
    }
    // divisibility chain via pairwise (gcd, lcm) on the diagonal
    for i in 0..rank {
        for j in i + 1..rank {
            let (a, b) = (w.a.get(i, i), w.a.get(j, j));
            if b % a == 0 {
                continue;
            }
            // rows: [a 0; 0 b] -> [a b; 0 b] then reduce the 2x2 block
            w.row_add(i, j, 1, 0)?;
            fix_pair(&mut w, i, j)?;
        }
    }
    let diag = (0..rank).map(|i| w.a.get(i, i) as u64).collect::<Vec<_>>();
    let (u, u_inv) = w.u.map_or((None, None), |(x, y)| (Some(x), Some(y)));
    let (v, v_inv) = w.v.map_or((None, None), |(x, y)| (Some(x), Some(y)));
    Ok(DenseSmith { diag, u, u_inv, v, v_inv })
}

// Euclid on the 2x2 block at rows/cols (i, j); all other entries of these
// rows and columns are zero.
fn fix_pair(w: &mut Work, i: usize, j: usize) -> Result<()> {
    loop {
        let (a, b) = (w.a.get(i, i), w.a.get(i, j));
        if b == 0 {
            break;
        }
        let q = b.div_euclid(a);
        w.col_add(j, i, -q, 0)?;
        if w.a.get(i, j) != 0 {
            w.swap_cols(i, j);
        }
    }
    // now [g 0; x y] with g | x, since g = gcd(a, b) divides every entry
    let g = w.a.get(i, i);
    let x = w.a.get(j, i);
    if x != 0 {
        w.row_add(j, i, -x.div_euclid(g), 0)?;
    }
    if w.a.get(i, i) < 0 {
        w.negate_row(i);
    }
    if w.a.get(j, j) < 0 {
        w.negate_row(j);
    }
    Ok(())
}

/// Smith normal form with optional unimodular transforms `(U, V)`.
pub fn smith_normal_form(a: &SparseIntMatrix, with_transforms: bool) -> Result<SmithDecomposition> {
    smith_normal_form_budgeted(a, with_transforms, &Budget::default())
}

pub fn smith_normal_form_budgeted(
    a: &SparseIntMatrix,
    with_transforms: bool,
    budget: &Budget,
) -> Result<SmithDecomposition> {
    if !with_transforms {
        let diagonal = invariant_factors(a, budget)?;
        return Ok(SmithDecomposition { rank: diagonal.len(), diagonal, transforms: None });
    }
    let dense = a.to_dense();
    let s = dense_smith(&dense, true, budget)?;
    let u = s.u.expect("tracked");
    let v = s.v.expect("tracked");
    let d = u.mul(&dense)?.mul(&v)?;
    for r in 0..d.rows() {
        for c in 0..d.cols() {
            let want = if r == c && r < s.diag.len() { s.diag[r] as i64 } else { 0 };
            if d.get(r, c) != want {
                return Err(Error::Internal("U*A*V is not the reported diagonal".into()));
            }
        }
    }
    Ok(SmithDecomposition { rank: s.diag.len(), diagonal: s.diag, transforms: Some((u, v)) })
}

/// Nonzero invariant factors of a sparse matrix, in divisibility order.
///
/// Unit pivots are eliminated sparsely first; only the residual block that
/// has no unit entries left goes through dense reduction.
pub fn invariant_factors(a: &SparseIntMatrix, budget: &Budget) -> Result<Vec<u64>> {
    if a.nnz() as u64 > budget.snf_entries {
        return Err(Error::BudgetExceeded(format!(
            "{} nonzeros exceeds the reduction budget {}",
            a.nnz(),
            budget.snf_entries
        )));
    }
    let (units, residual) = low_reduce(a.rows(), a.columns(), budget)?;
    let (units2, rest) = markowitz_units(residual, budget)?;
    let mut diagonal = vec![1u64; units + units2];
    if let Some(rest) = rest {
        if rest.rows().max(rest.cols()) > 4 * budget.dense_dim {
            return Err(Error::BudgetExceeded(format!(
                "residual block {}x{} too large for dense reduction",
                rest.rows(),
                rest.cols()
            )));
        }
        let s = dense_smith(&rest, false, budget)?;
        diagonal.extend(s.diag);
    }
    diagonal.sort_by_key(|&d| d > 1);
    debug_assert!(diagonal.windows(2).all(|w| w[1] % w[0] == 0));
    Ok(diagonal)
}

type Column = Vec<(u32, i64)>;

fn axpy(target: &Column, q: i64, source: &Column) -> Result<Column> {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let take = match (target.get(i), source.get(j)) {
            (Some(a), Some(b)) => a.0.cmp(&b.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match take {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                let v = q.checked_mul(source[j].1).ok_or(Error::Overflow("column reduction"))?;
                out.push((source[j].0, v));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = mul_add(target[i].1, q, source[j].1)?;
                if v != 0 {
                    out.push((target[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

/// Column reduction with unit lows. Returns the number of unit pivots and the
/// residual block on non-pivot rows, which has the same nonunit Smith factors.
fn low_reduce(rows: usize, mut cols: Vec<Column>, budget: &Budget) -> Result<(usize, Vec<BTreeMap<u32, i64>>)> {
    let mut pivot_of_row: Vec<Option<u32>> = vec![None; rows];
    let mut residual = Vec::new();
    for j in 0..cols.len() {
        if j % 4096 == 0 {
            budget.check_time()?;
        }
        let mut col = std::mem::take(&mut cols[j]);
        loop {
            let Some(&(low, val)) = col.last() else { break };
            match pivot_of_row[low as usize] {
                Some(p) => {
                    let pc = &cols[p as usize];
                    let u = pc.last().expect("pivot column").1;
                    col = axpy(&col, -val * u, pc)?;
                }
                None if val.abs() == 1 => {
                    pivot_of_row[low as usize] = Some(j as u32);
                    break;
                }
                None => {
                    residual.push(j);
                    break;
                }
            }
        }
        cols[j] = col;
    }
    let units = pivot_of_row.iter().filter(|p| p.is_some()).count();
    // eliminate pivot rows from the residual columns, highest row first
    let mut blocks = Vec::with_capacity(residual.len());
    for &j in &residual {
        let mut col: BTreeMap<u32, i64> = cols[j].iter().copied().collect();
        let mut cursor = u32::MAX;
        loop {
            let next = col.range(..=cursor).rev().find(|(r, _)| pivot_of_row[**r as usize].is_some());
            let Some((&r, &val)) = next else { break };
            let pc = &cols[pivot_of_row[r as usize].unwrap() as usize];
            let u = pc.last().unwrap().1;
            for &(pr, pv) in pc {
                let e = col.entry(pr).or_insert(0);
                *e = mul_add(*e, -val * u, pv)?;
                if *e == 0 {
                    col.remove(&pr);
                }
            }
            if r == 0 {
                break;
            }
            cursor = r - 1;
        }
        if !col.is_empty() {
            blocks.push(col);
        }
    }
    Ok((units, blocks))
}

/// Sparse elimination on any unit entry, Markowitz-cheapest first.
/// Returns the number of unit pivots and the leftover block, if any.
fn markowitz_units(cols: Vec<BTreeMap<u32, i64>>, budget: &Budget) -> Result<(usize, Option<IntMatrix>)> {
    if cols.is_empty() {
        return Ok((0, None));
    }
    // row-major copy keyed by (row -> (col -> val))
    let mut rows: HashMap<u32, BTreeMap<u32, i64>> = HashMap::new();
    for (c, col) in cols.iter().enumerate() {
        for (&r, &v) in col {
            rows.entry(r).or_default().insert(c as u32, v);
        }
    }
    let mut colsets: Vec<BTreeMap<u32, i64>> = cols;
    let mut units = 0;
    loop {
        budget.check_time()?;
        let mut best: Option<(usize, u32, u32)> = None;
        for (&r, row) in &rows {
            for (&c, &v) in row {
                if v.abs() == 1 {
                    let cost = (row.len() - 1) * (colsets[c as usize].len() - 1);
                    if best.map_or(true, |b| (cost, r, c) < b) {
                        best = Some((cost, r, c));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        units += 1;
        let prow = rows.remove(&pr).unwrap();
        let u = prow[&pc];
        let col_entries: Vec<(u32, i64)> = colsets[pc as usize]
            .iter()
            .filter(|(r, _)| **r != pr)
            .map(|(&r, &v)| (r, v))
            .collect();
        for (r, v) in col_entries {
            let q = -v * u;
            let row = rows.get_mut(&r).unwrap();
            for (&c, &pv) in &prow {
                let e = row.entry(c).or_insert(0);
                *e = mul_add(*e, q, pv)?;
                if *e == 0 {
                    row.remove(&c);
                    colsets[c as usize].remove(&r);
                } else {
                    colsets[c as usize].insert(r, *e);
                }
            }
            if row.is_empty() {
                rows.remove(&r);
            }
        }
        for &c in prow.keys() {
            colsets[c as usize].remove(&pr);
        }
        colsets[pc as usize].clear();
    }
    let mut row_ids: Vec<u32> = rows.keys().copied().collect();
    row_ids.sort_unstable();
    let col_ids: Vec<usize> = (0..colsets.len()).filter(|&c| !colsets[c].is_empty()).collect();
    if row_ids.is_empty() {
        return Ok((units, None));
    }
    let row_pos: HashMap<u32, usize> = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut m = IntMatrix::zeros(row_ids.len(), col_ids.len());
    for (j, &c) in col_ids.iter().enumerate() {
        for (&r, &v) in &colsets[c] {
            m.set(row_pos[&r], j, v);
        }
    }
    Ok((units, Some(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sparse(rows: &[Vec<i64>]) -> SparseIntMatrix {
        SparseIntMatrix::from_dense(&IntMatrix::from_rows(rows))
    }

    #[test]
    fn spec_examples() {
        let id = SparseIntMatrix::identity(3);
        assert_eq!(smith_normal_form(&id, false).unwrap().diagonal, vec![1, 1, 1]);
        let z = SparseIntMatrix::zeros(3, 4);
        let s = smith_normal_form(&z, true).unwrap();
        assert!(s.diagonal.is_empty());
        assert_eq!(s.rank, 0);
        let a = sparse(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&a, false).unwrap().diagonal, vec![1, 6]);
        assert_eq!(smith_normal_form(&a, true).unwrap().diagonal, vec![1, 6]);
    }

    #[test]
    fn elementary_operation_oracle() {
        // [[2,0],[0,3]]: row1 += row2 -> [[2,3],[0,3]]; col2 -= col1 -> [[2,1],[0,3]];
        // swap cols -> [[1,2],[3,0]]; col2 -= 2col1 -> [[1,0],[3,-6]]; row2 -= 3row1 -> diag(1,-6)
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let u = IntMatrix::from_rows(&[vec![1, 1], vec![-3, -2]]);
        let v = IntMatrix::from_rows(&[vec![-1, 3], vec![1, -2]]);
        let d = u.mul(&a).unwrap().mul(&v).unwrap();
        assert_eq!(d.to_rows(), vec![vec![1, 0], vec![0, -6]]);
    }

    #[test]
    fn transforms_are_inverse_pairs() {
        let a = IntMatrix::from_rows(&[vec![4, 6, 2], vec![2, 8, 0], vec![6, 0, 12], vec![0, 2, 2]]);
        let s = dense_smith(&a, true, &Budget::default()).unwrap();
        assert!(s.u.as_ref().unwrap().mul(s.u_inv.as_ref().unwrap()).unwrap().is_identity());
        assert!(s.v.as_ref().unwrap().mul(s.v_inv.as_ref().unwrap()).unwrap().is_identity());
        let d = s.u.unwrap().mul(&a).unwrap().mul(&s.v.unwrap()).unwrap();
        for r in 0..d.rows() {
            for c in 0..d.cols() {
                let want = if r == c && r < s.diag.len() { s.diag[r] as i64 } else { 0 };
                assert_eq!(d.get(r, c), want);
            }
        }
        assert!(s.diag.windows(2).all(|w| w[1] % w[0] == 0));
    }

    #[test]
    fn sparse_path_handles_torsion_residual() {
        // boundary of RP^2-like relation: column with 2 as only entry
        let a = sparse(&[vec![1, 1, 0], vec![-1, 0, 2], vec![0, -1, 2]]);
        let dense = dense_smith(&a.to_dense(), false, &Budget::default()).unwrap().diag;
        assert_eq!(invariant_factors(&a, &Budget::default()).unwrap(), dense);
    }
}
