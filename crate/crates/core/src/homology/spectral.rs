//! The double complex of a poset map and the first two pages of its
//! spectral sequence.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{AbelianGroup, SparseIntMatrix};
use crate::poset::{CoefficientFunctor, FinitePoset, PosetMap};

use super::basis::{induced_between, PosetHomology};
use super::builders::{enumerate_chains, functor_complex, order_complex, ChainTable};
use super::chain::{ChainComplex, DegreeGroup};

/// One page of the spectral sequence. A missing entry means the group was
/// not computed (a row whose fiber homology has torsion on page 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub page_index: u8,
    pub entries: BTreeMap<(i64, i64), Option<AbelianGroup>>,
}

impl SpectralPage {
    pub fn get(&self, p: i64, q: i64) -> Option<&AbelianGroup> {
        if p < 0 || q < 0 {
            return None;
        }
        self.entries.get(&(p, q)).and_then(Option::as_ref)
    }

    /// True when every computed entry with `0 < q` and `p + q <= n` vanishes
    /// and none of them is missing.
    pub fn concentrated_in_row_zero_through(&self, n: i64) -> bool {
        self.entries
            .iter()
            .filter(|((p, q), _)| *q > 0 && p + q <= n)
            .all(|(_, g)| matches!(g, Some(g) if g.is_trivial()))
    }

    /// True when every entry with `p > 0` and `p + q <= n` vanishes.
    pub fn concentrated_in_column_zero_through(&self, n: i64) -> bool {
        self.entries
            .iter()
            .filter(|((p, q), _)| *p > 0 && p + q <= n)
            .all(|(_, g)| matches!(g, Some(g) if g.is_trivial()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleComplexReport {
    pub max_total_degree: i64,
    pub e1: SpectralPage,
    pub e2: SpectralPage,
    pub total: Vec<AbelianGroup>,
    pub source: Vec<AbelianGroup>,
    pub total_matches_source: bool,
}

fn groups(v: Vec<DegreeGroup>) -> Vec<AbelianGroup> {
    v.into_iter().map(|g| g.group).collect()
}

/// Total complex of `C_{p,q}(f)`, free on pairs
/// `(x_0 < ... < x_q | y_0 < ... < y_p)` with `f(x_q) <= y_0`.
pub fn total_complex(f: &PosetMap, max_total: i64, budget: &Budget) -> Result<ChainComplex> {
    let top = max_total + 1;
    let xs = enumerate_chains(f.source(), top, budget)?;
    let ys = enumerate_chains(f.target(), top, budget)?;
    let target = f.target();
    // generators of each total degree, as (q, x index, p, y index)
    let mut cells: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); top as usize + 1];
    let mut index: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    for n in 0..=top as usize {
        for q in 0..=n {
            let p = n - q;
            let (Some(xt), Some(yt)) = (xs.get(q), ys.get(p)) else { continue };
            for xi in 0..xt.len() {
                let last = f.apply(*xt.get(xi).last().unwrap() as usize);
                for yi in 0..yt.len() {
                    if target.leq(last, yt.get(yi)[0] as usize) {
                        index.insert((q, xi, p, yi), cells[n].len());
                        cells[n].push((q, xi, p, yi));
                    }
                }
            }
        }
        budget.check_chains(cells[n].len() as u64, "double complex cells")?;
    }
    let dims: Vec<usize> = cells.iter().map(Vec::len).collect();
    let face = |t: &ChainTable, i: usize, drop: usize| -> Vec<u32> {
        let c = t.get(i);
        c.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &v)| v).collect()
    };
    let mut boundaries = Vec::new();
    for n in 1..=top as usize {
        let mut trip = Vec::new();
        for (col, &(q, xi, p, yi)) in cells[n].iter().enumerate() {
            if p >= 1 {
                for i in 0..=p {
                    let yf = face(&ys[p], yi, i);
                    let yj = ys[p - 1].find(&yf).ok_or_else(|| Error::Internal("missing y face".into()))?;
                    let row = index[&(q, xi, p - 1, yj)];
                    trip.push((row, col, if i % 2 == 0 { 1 } else { -1 }));
                }
            }
            if q >= 1 {
                let sign_p: i64 = if p % 2 == 0 { 1 } else { -1 };
                for j in 0..=q {
                    let xf = face(&xs[q], xi, j);
                    let xj = xs[q - 1].find(&xf).ok_or_else(|| Error::Internal("missing x face".into()))?;
                    let row = index[&(q - 1, xj, p, yi)];
                    trip.push((row, col, sign_p * if j % 2 == 0 { 1 } else { -1 }));
                }
            }
        }
        boundaries.push(SparseIntMatrix::from_triplets(dims[n - 1], dims[n], trip)?);
    }
    ChainComplex::new(0, dims, boundaries, max_total, false)
}

/// `E^1`, `E^2` and the total homology of the double complex of `f` in
/// total degrees `0..=max_total`, with the total compared against `H_*(X)`.
pub fn double_complex_pages(f: &PosetMap, max_total: i64, budget: &Budget) -> Result<DoubleComplexReport> {
    let y = f.target().clone();
    let total = groups(total_complex(f, max_total, budget)?.homology(budget)?);
    let (cx, _) = order_complex(f.source(), max_total, false, budget)?;
    let source = groups(cx.homology(budget)?);
    let fibers: Vec<(Arc<FinitePoset>, Vec<usize>)> = (0..y.len())
        .map(|b| f.fiber_under(b).map(|(p, idx)| (Arc::new(p), idx)))
        .collect::<Result<_>>()?;

    let mut e1 = SpectralPage { page_index: 1, entries: BTreeMap::new() };
    let mut e2 = SpectralPage { page_index: 2, entries: BTreeMap::new() };
    let ychains = enumerate_chains(&y, max_total, budget)?;
    for q in 0..=max_total {
        budget.check_time()?;
        let homs: Vec<PosetHomology> = fibers
            .iter()
            .map(|(p, _)| PosetHomology::new(p, q, false, budget))
            .collect::<Result<_>>()?;
        let fiber_groups: Vec<AbelianGroup> = homs.iter().map(|h| h.basis.group()).collect();
        for p in 0..=(max_total - q) {
            let g = ychains
                .get(p as usize)
                .map(|t| t.iter().fold(AbelianGroup::trivial(), |acc, c| acc.direct_sum(&fiber_groups[c[0] as usize])))
                .unwrap_or_default();
            e1.entries.insert((p, q), Some(g));
        }
        if fiber_groups.iter().any(|g| !g.is_free()) {
            for p in 0..=(max_total - q) {
                e2.entries.insert((p, q), None);
            }
            continue;
        }
        let mut covers = HashMap::new();
        for (a, b) in y.cover_pairs() {
            let (pa, ia) = &fibers[a];
            let (pb, ib) = &fibers[b];
            let pos: HashMap<usize, usize> = ib.iter().enumerate().map(|(k, &x)| (x, k)).collect();
            let assignment = ia.iter().map(|x| pos[x]).collect();
            let inc = PosetMap::new(pa.clone(), pb.clone(), assignment)?;
            let m = induced_between(&inc, &homs[a], &homs[b], q)?;
            covers.insert((a, b), m.matrix);
        }
        let ranks = fiber_groups.iter().map(|g| g.free_rank).collect();
        let functor = CoefficientFunctor::new(y.clone(), ranks, covers)?;
        let (c, _) = functor_complex(&functor, max_total - q, budget)?;
        for g in c.homology(budget)? {
            e2.entries.insert((g.degree, q), Some(g.group));
        }
    }
    let total_matches_source = total == source;
    Ok(DoubleComplexReport { max_total_degree: max_total, e1, e2, total, source, total_matches_source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_of_identity_is_source() {
        let s = Arc::new(FinitePoset::simplex_boundary(2));
        let r = double_complex_pages(&PosetMap::identity(s), 2, &Budget::default()).unwrap();
        assert!(r.total_matches_source);
        assert_eq!(r.total[1], AbelianGroup::free(1));
        assert!(r.e2.concentrated_in_row_zero_through(2));
        assert_eq!(r.e2.get(1, 0), Some(&AbelianGroup::free(1)));
    }

    #[test]
    fn constant_map_puts_everything_in_column_zero() {
        let s = Arc::new(FinitePoset::simplex_boundary(2));
        let pt = Arc::new(FinitePoset::chain(1));
        let f = PosetMap::constant(s, pt, 0).unwrap();
        let r = double_complex_pages(&f, 2, &Budget::default()).unwrap();
        assert!(r.total_matches_source);
        assert!(r.e2.concentrated_in_column_zero_through(2));
        assert_eq!(r.e2.get(0, 1), Some(&AbelianGroup::free(1)));
    }
}
