use rayon::prelude::*;

use super::chain::ChainComplex;
use crate::budget::Budget;
use crate::error::Result;
use crate::linalg::SparseIntMatrix;
use crate::poset::{CoefficientFunctor, Entry, FinitePoset, SequencePoset};

/// Chains of a fixed length, stored flat and sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainTable {
    width: usize,
    data: Vec<u32>,
}

impl ChainTable {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn find(&self, chain: &[u32]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(chain) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.width.max(1)).take(self.len())
    }
}

/// All chains `x_0 < ... < x_k` with `k <= max_degree`, per degree, in
/// lexicographic order of element indices.
pub fn enumerate_chains(poset: &FinitePoset, max_degree: i64, budget: &Budget) -> Result<Vec<ChainTable>> {
    if max_degree < 0 {
        return Ok(Vec::new());
    }
    let top = max_degree as usize;
    let mut tables: Vec<ChainTable> = (0..=top).map(|k| ChainTable { width: k + 1, data: Vec::new() }).collect();
    let mut total = 0u64;
    let mut stack: Vec<u32> = Vec::with_capacity(top + 1);
    fn walk(
        p: &FinitePoset,
        top: usize,
        stack: &mut Vec<u32>,
        tables: &mut [ChainTable],
        total: &mut u64,
        budget: &Budget,
    ) -> Result<()> {
        let k = stack.len() - 1;
        tables[k].data.extend_from_slice(stack);
        *total += 1;
        if *total % 65536 == 0 {
            budget.check_chains(*total, "order complex")?;
        }
        if k == top {
            return Ok(());
        }
        let last = *stack.last().unwrap() as usize;
        for &y in p.above(last) {
            stack.push(y);
            walk(p, top, stack, tables, total, budget)?;
            stack.pop();
        }
        Ok(())
    }
    for x in 0..poset.len() as u32 {
        stack.push(x);
        walk(poset, top, &mut stack, &mut tables, &mut total, budget)?;
        stack.pop();
    }
    budget.check_chains(total, "order complex")?;
    Ok(tables)
}

fn simplicial_boundary(faces: &ChainTable, cells: &ChainTable) -> SparseIntMatrix {
    let columns: Vec<Vec<(u32, i64)>> = (0..cells.len())
        .into_par_iter()
        .map(|j| {
            let c = cells.get(j);
            let mut col: Vec<(u32, i64)> = (0..c.len())
                .map(|i| {
                    let mut f = c.to_vec();
                    f.remove(i);
                    let row = faces.find(&f).expect("face present") as u32;
                    (row, if i % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            col.sort_unstable();
            // distinct faces never collide, but merge defensively
            col.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            col.retain(|e| e.1 != 0);
            col
        })
        .collect();
    SparseIntMatrix::from_columns(faces.len(), columns)
}

fn assemble(tables: &[ChainTable], max_degree: i64, reduced: bool) -> Result<ChainComplex> {
    let mut dims = Vec::new();
    let mut bounds = Vec::new();
    if reduced {
        dims.push(1);
    }
    for (k, t) in tables.iter().enumerate() {
        dims.push(t.len());
        if k == 0 {
            if reduced {
                bounds.push(SparseIntMatrix::from_columns(1, (0..t.len()).map(|_| vec![(0, 1)]).collect()));
            }
        } else {
            bounds.push(simplicial_boundary(&tables[k - 1], t));
        }
    }
    if dims.is_empty() {
        dims.push(0);
    }
    let lo = if reduced { -1 } else { 0 };
    ChainComplex::new(lo, dims, bounds, max_degree, true)
}

/// Order complex with chains through degree `max_degree + 1`, so homology is
/// exact through `max_degree`.
pub fn order_complex(
    poset: &FinitePoset,
    max_degree: i64,
    reduced: bool,
    budget: &Budget,
) -> Result<(ChainComplex, Vec<ChainTable>)> {
    let tables = enumerate_chains(poset, max_degree + 1, budget)?;
    Ok((assemble(&tables, max_degree, reduced)?, tables))
}

/// Cells of the face complex of a chain-condition sequence poset: degree `k`
/// cells are the members of length `k + 1`, recorded as member indices.
pub fn sequence_cells<T: Entry>(poset: &SequencePoset<T>, max_degree: i64) -> Vec<ChainTable> {
    if max_degree < 0 {
        return Vec::new();
    }
    (0..=max_degree as usize)
        .map(|k| {
            let r = poset.length_range(k + 1);
            ChainTable { width: 1, data: r.map(|i| i as u32).collect() }
        })
        .collect()
}

/// Face complex of a sequence poset satisfying the chain condition: `C_k` is
/// free on sequences of length `k + 1` and `d` deletes entries with
/// alternating signs. Its homology is that of the order complex.
pub fn face_complex<T: Entry>(
    poset: &SequencePoset<T>,
    max_degree: i64,
    reduced: bool,
    budget: &Budget,
) -> Result<ChainComplex> {
    let top = (max_degree + 1).max(-1);
    let mut dims = Vec::new();
    let mut bounds = Vec::new();
    if reduced {
        dims.push(1);
    }
    for k in 0..=top {
        let range = poset.length_range(k as usize + 1);
        budget.check_chains(range.len() as u64, "face complex")?;
        dims.push(range.len());
        if k == 0 {
            if reduced {
                bounds.push(SparseIntMatrix::from_columns(1, range.map(|_| vec![(0, 1)]).collect()));
            }
            continue;
        }
        let lower = poset.length_range(k as usize);
        let columns: Vec<Vec<(u32, i64)>> = range
            .into_par_iter()
            .map(|j| {
                let m = poset.member(j);
                let mut col: Vec<(u32, i64)> = (0..m.len())
                    .map(|i| {
                        let mut f = m.to_vec();
                        f.remove(i);
                        let row = poset.index_of(&f).expect("chain condition") - lower.start;
                        (row as u32, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        bounds.push(SparseIntMatrix::from_columns(lower.len(), columns));
        budget.check_time()?;
    }
    if dims.is_empty() {
        dims.push(0);
    }
    ChainComplex::new(if reduced { -1 } else { 0 }, dims, bounds, max_degree, true)
}

/// `C_n = sum over chains x_0 < ... < x_n of F(x_0)`, `d = sum (-1)^i d_i`
/// with `d_0` applying `F(x_0 < x_1)`.
pub fn functor_complex(
    functor: &CoefficientFunctor,
    max_degree: i64,
    budget: &Budget,
) -> Result<(ChainComplex, Vec<ChainTable>)> {
    let poset = functor.poset();
    let tables = enumerate_chains(poset, max_degree + 1, budget)?;
    let offsets = functor_offsets(functor, &tables);
    let mut dims: Vec<usize> = offsets.iter().map(|o| *o.last().unwrap()).collect();
    let mut bounds = Vec::new();
    for k in 1..tables.len() {
        let (faces, cells) = (&tables[k - 1], &tables[k]);
        let columns: Vec<Vec<Vec<(u32, i64)>>> = (0..cells.len())
            .into_par_iter()
            .map(|j| {
                let c = cells.get(j);
                let x0 = c[0] as usize;
                let r0 = functor.rank(x0);
                let m01 = functor.map(x0, c[1] as usize).expect("chain is increasing");
                let mut cols = Vec::with_capacity(r0);
                for coord in 0..r0 {
                    let mut col: Vec<(u32, i64)> = Vec::new();
                    // d_0: drop x_0, push through F(x_0 < x_1)
                    let f0 = faces.find(&c[1..]).expect("face present");
                    let base0 = offsets[k - 1][f0];
                    for row in 0..m01.rows() {
                        let v = m01.get(row, coord);
                        if v != 0 {
                            col.push(((base0 + row) as u32, v));
                        }
                    }
                    for i in 1..c.len() {
                        let mut f = c.to_vec();
                        f.remove(i);
                        let fi = faces.find(&f).expect("face present");
                        col.push(((offsets[k - 1][fi] + coord) as u32, if i % 2 == 0 { 1 } else { -1 }));
                    }
                    col.sort_unstable();
                    col.dedup_by(|b, a| {
                        if a.0 == b.0 {
                            a.1 += b.1;
                            true
                        } else {
                            false
                        }
                    });
                    col.retain(|e| e.1 != 0);
                    cols.push(col);
                }
                cols
            })
            .collect();
        bounds.push(SparseIntMatrix::from_columns(dims[k - 1], columns.into_iter().flatten().collect()));
        budget.check_time()?;
    }
    if dims.is_empty() {
        dims.push(0);
    }
    let complex = ChainComplex::new(0, dims, bounds, max_degree, false)?;
    Ok((complex, tables))
}

/// Basis offsets of a functor complex: `offsets[k][i]` is the first
/// coordinate of chain `i` in `C_k`.
pub(crate) fn functor_offsets(functor: &CoefficientFunctor, tables: &[ChainTable]) -> Vec<Vec<usize>> {
    tables
        .iter()
        .map(|t| {
            let mut acc = 0;
            let mut off = Vec::with_capacity(t.len() + 1);
            for c in t.iter() {
                off.push(acc);
                acc += functor.rank(c[0] as usize);
            }
            off.push(acc);
            off
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_are_lexicographic() {
        let p = FinitePoset::chain(3);
        let t = enumerate_chains(&p, 2, &Budget::default()).unwrap();
        assert_eq!(t[0].len(), 3);
        assert_eq!(t[1].iter().collect::<Vec<_>>(), vec![&[0, 1][..], &[0, 2], &[1, 2]]);
        assert_eq!(t[2].len(), 1);
        assert_eq!(t[1].find(&[0, 2]), Some(1));
        assert_eq!(t[1].find(&[2, 0]), None);
    }

    #[test]
    fn chain_budget_is_enforced() {
        let p = FinitePoset::chain(12);
        let b = Budget { chains: 10, ..Budget::default() };
        assert!(enumerate_chains(&p, 11, &b).is_err());
    }
}
