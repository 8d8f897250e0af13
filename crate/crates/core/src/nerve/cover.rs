use std::collections::HashSet;

use crate::error::{invalid, Result};
use crate::poset::{Entry, FinitePoset, SequencePoset};

/// A family of sub-posets `X_v` of a sequence poset `X`, indexed by the
/// members `v` of a sequence poset `F`, with a connectivity target `l`.
#[derive(Clone, Debug)]
pub struct PosetCover<V: Entry, T: Entry> {
    index: SequencePoset<V>,
    total: SequencePoset<T>,
    /// sorted member indices into `total`, one list per member of `index`
    pieces: Vec<Vec<u32>>,
    l: i64,
}

impl<V: Entry, T: Entry> PosetCover<V, T> {
    /// `pieces[i]` lists the members of `X_v` for `v = index.member(i)`;
    /// `X` is their union.
    pub fn new(index: SequencePoset<V>, pieces: Vec<Vec<Vec<T>>>, l: i64) -> Result<Self> {
        if pieces.len() != index.len() {
            return invalid(format!("{} pieces for {} index members", pieces.len(), index.len()));
        }
        for s in pieces.iter().flatten() {
            if s.is_empty() {
                return invalid("sequences must have length at least 1");
            }
            let distinct: HashSet<&T> = s.iter().collect();
            if distinct.len() != s.len() {
                return invalid(format!("sequence {s:?} repeats an entry"));
            }
        }
        let mut ground: Vec<T> = pieces.iter().flatten().flatten().cloned().collect();
        ground.sort();
        ground.dedup();
        let members: Vec<Vec<T>> = pieces.iter().flatten().cloned().collect();
        let total = SequencePoset::from_sorted_unchecked(ground, members);
        let pieces = pieces
            .iter()
            .map(|p| {
                let mut idx: Vec<u32> = p.iter().map(|s| total.index_of(s).expect("member of union") as u32).collect();
                idx.sort_unstable();
                idx.dedup();
                idx
            })
            .collect();
        Ok(PosetCover { index, total, pieces, l })
    }

    pub fn index(&self) -> &SequencePoset<V> {
        &self.index
    }

    pub fn total(&self) -> &SequencePoset<T> {
        &self.total
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn with_target(mut self, l: i64) -> Self {
        self.l = l;
        self
    }

    /// Members of `X_v` (indices into `total`) for the `v`-th index member.
    pub fn piece_indices(&self, v: usize) -> &[u32] {
        &self.pieces[v]
    }

    pub fn piece(&self, v: usize) -> SequencePoset<T> {
        let members = self.pieces[v].iter().map(|&x| self.total.member(x as usize).to_vec()).collect();
        SequencePoset::from_sorted_unchecked(self.total.ground().to_vec(), members)
    }

    /// Total number of incidences `x in X_v`.
    pub fn incidence_count(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    /// For every `x` in `X`, the sorted indices of the `v` with `x in X_v`.
    pub fn alpha_indices(&self) -> Vec<Vec<u32>> {
        let mut alpha: Vec<Vec<u32>> = vec![Vec::new(); self.total.len()];
        for (v, p) in self.pieces.iter().enumerate() {
            for &x in p {
                alpha[x as usize].push(v as u32);
            }
        }
        alpha
    }

    /// `alpha_x` as a sub-poset of `F`.
    pub fn alpha_sequences(&self, alpha: &[u32]) -> SequencePoset<V> {
        let members = alpha.iter().map(|&v| self.index.member(v as usize).to_vec()).collect();
        SequencePoset::from_sorted_unchecked(self.index.ground().to_vec(), members)
    }

    /// `alpha_x = {v in F : x in X_v}` with the induced order.
    pub fn alpha(&self, x: &[T]) -> Result<FinitePoset> {
        let Some(xi) = self.total.index_of(x) else {
            return invalid(format!("{x:?} is not in X"));
        };
        let alpha: Vec<u32> = (0..self.pieces.len())
            .filter(|&v| self.pieces[v].binary_search(&(xi as u32)).is_ok())
            .map(|v| v as u32)
            .collect();
        Ok(self.alpha_sequences(&alpha).to_finite())
    }

    /// Describes the first failed structural invariant: chain conditions on
    /// `F`, `X` and each `X_v`, and `X_w ⊆ X_v` for `v <= w`.
    pub fn structure_violation(&self) -> Option<String> {
        if let Some((m, f)) = self.index.chain_condition_violation() {
            return Some(format!("F lacks {f:?} below {m:?}"));
        }
        if let Some((m, f)) = self.total.chain_condition_violation() {
            return Some(format!("X lacks {f:?} below {m:?}"));
        }
        for (w, p) in self.pieces.iter().enumerate() {
            let wm = self.index.member(w);
            for &x in p {
                let xm = self.total.member(x as usize);
                for i in 0..xm.len() {
                    if xm.len() < 2 {
                        break;
                    }
                    let mut f = xm.to_vec();
                    f.remove(i);
                    let fi = self.total.index_of(&f).expect("X has the chain condition") as u32;
                    if p.binary_search(&fi).is_err() {
                        return Some(format!("X_{wm:?} contains {xm:?} but not {f:?}"));
                    }
                }
            }
            // monotonicity along covers suffices
            if wm.len() < 2 {
                continue;
            }
            for i in 0..wm.len() {
                let mut v = wm.to_vec();
                v.remove(i);
                let vi = self.index.index_of(&v).expect("F has the chain condition");
                let pv = &self.pieces[vi];
                if let Some(&x) = p.iter().find(|x| pv.binary_search(x).is_err()) {
                    return Some(format!(
                        "X_{wm:?} contains {:?} but X_{v:?} does not",
                        self.total.member(x as usize)
                    ));
                }
            }
        }
        None
    }

    /// The cover indexed by the members of `F` satisfying `keep`, with `X`
    /// replaced by the union of the remaining pieces.
    pub fn restrict_index<P: Fn(&[V]) -> bool>(&self, keep: P) -> Result<Self> {
        let kept: Vec<usize> = (0..self.index.len()).filter(|&v| keep(self.index.member(v))).collect();
        let index = self.index.filter(|m| keep(m));
        if let Some((m, f)) = index.chain_condition_violation() {
            return invalid(format!("restriction keeps {m:?} but not {f:?}"));
        }
        let pieces = kept
            .iter()
            .map(|&v| self.pieces[v].iter().map(|&x| self.total.member(x as usize).to_vec()).collect())
            .collect();
        PosetCover::new(index, pieces, self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_piece() -> PosetCover<u32, u32> {
        let f = SequencePoset::new(vec![1], vec![vec![1]]).unwrap();
        let x = SequencePoset::full(vec![1, 2, 3], 2);
        PosetCover::new(f, vec![x.members().to_vec()], 0).unwrap()
    }

    #[test]
    fn single_piece_alpha_is_f() {
        let c = single_piece();
        assert!(c.structure_violation().is_none());
        for m in c.total().members() {
            assert_eq!(c.alpha(m).unwrap().len(), 1);
        }
        assert!(c.alpha(&[7]).is_err());
    }

    #[test]
    fn disjoint_pieces_give_point_alphas() {
        let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2]]).unwrap();
        let c = PosetCover::new(f, vec![vec![vec![10]], vec![vec![20], vec![21], vec![20, 21]]], 0).unwrap();
        assert!(c.structure_violation().is_none());
        for m in c.total().members() {
            assert_eq!(c.alpha(m).unwrap().len(), 1);
        }
    }

    #[test]
    fn detects_non_monotone_pieces() {
        let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]]).unwrap();
        let c = PosetCover::new(f, vec![vec![vec![10]], vec![vec![10]], vec![vec![11]]], 0).unwrap();
        let why = c.structure_violation().unwrap();
        assert!(why.contains("[11]"), "{why}");
    }

    #[test]
    fn restriction_must_stay_downward_closed() {
        let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]]).unwrap();
        let c = PosetCover::new(f, vec![vec![vec![10]], vec![vec![10]], vec![vec![10]]], 0).unwrap();
        assert!(c.restrict_index(|v| v != [1]).is_err());
        let r = c.restrict_index(|v| v.len() == 1).unwrap();
        assert_eq!(r.index().len(), 2);
    }
}
