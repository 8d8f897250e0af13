use std::sync::Arc;

use super::cover::PosetCover;
use crate::budget::Budget;
use crate::error::Result;
use crate::poset::{Entry, FinitePoset, PosetMap, SequencePoset};

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb) as u32;
        }
    }

    /// Component label of each element (labels in order of first
    /// appearance) and the number of components.
    pub(crate) fn labels(&mut self) -> (Vec<u32>, usize) {
        let n = self.parent.len();
        let mut label = vec![u32::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == u32::MAX {
                label[r] = count as u32;
                count += 1;
            }
            out[x] = label[r];
        }
        (out, count)
    }
}

/// Up-covers of each member of a chain-condition sequence poset.
pub(crate) fn sequence_up_covers<T: Entry>(p: &SequencePoset<T>) -> Vec<Vec<u32>> {
    let mut up: Vec<Vec<u32>> = vec![Vec::new(); p.len()];
    for (j, m) in p.members().iter().enumerate() {
        if m.len() < 2 {
            continue;
        }
        for i in 0..m.len() {
            let mut f = m.clone();
            f.remove(i);
            if let Some(a) = p.index_of(&f) {
                up[a].push(j as u32);
            }
        }
    }
    for u in &mut up {
        u.sort_unstable();
        u.dedup();
    }
    up
}

/// Component labels of every member of a chain-condition sequence poset.
pub(crate) fn sequence_component_labels<T: Entry>(p: &SequencePoset<T>) -> (Vec<u32>, usize) {
    let mut uf = UnionFind::new(p.len());
    for (j, m) in p.members().iter().enumerate() {
        if m.len() >= 2 {
            let a = p.index_of(&m[..1]).expect("chain condition");
            uf.union(a, j);
            let b = p.index_of(&m[1..2]).expect("chain condition");
            uf.union(b, j);
        }
    }
    uf.labels()
}

/// `Z = {(x, v) : x in X_v}` with the product order, and its projections
/// `f: Z -> F` and `g: Z -> X`.
pub struct IncidencePoset {
    /// `(x, v)` sorted
    pairs: Vec<(u32, u32)>,
    up: Vec<Vec<u32>>,
    by_index: Vec<Vec<u32>>,
    index_up: Vec<Vec<u32>>,
    total_up: Vec<Vec<u32>>,
}

impl IncidencePoset {
    pub fn new<V: Entry, T: Entry>(cover: &PosetCover<V, T>, budget: &Budget) -> Result<Self> {
        budget.check_elements(cover.incidence_count() as u64, "incidence poset")?;
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(cover.incidence_count());
        let mut by_index = vec![Vec::new(); cover.index().len()];
        for v in 0..cover.index().len() {
            for &x in cover.piece_indices(v) {
                pairs.push((x, v as u32));
            }
        }
        pairs.sort_unstable();
        for (z, &(_, v)) in pairs.iter().enumerate() {
            by_index[v as usize].push(z as u32);
        }
        let index_up = sequence_up_covers(cover.index());
        let total_up = sequence_up_covers(cover.total());
        let find = |x: u32, v: u32| pairs.binary_search(&(x, v)).ok();
        let mut up: Vec<Vec<u32>> = vec![Vec::new(); pairs.len()];
        for (z, &(x, v)) in pairs.iter().enumerate() {
            for &x2 in &total_up[x as usize] {
                if let Some(t) = find(x2, v) {
                    up[z].push(t as u32);
                }
            }
            for &v2 in &index_up[v as usize] {
                if let Some(t) = find(x, v2) {
                    up[z].push(t as u32);
                }
            }
            up[z].sort_unstable();
        }
        budget.check_time()?;
        Ok(IncidencePoset { pairs, up, by_index, index_up, total_up })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(x, v)` for element `z`, as indices into `X` and `F`.
    pub fn pair(&self, z: usize) -> (usize, usize) {
        let (x, v) = self.pairs[z];
        (x as usize, v as usize)
    }

    pub fn covers_up(&self, z: usize) -> &[u32] {
        &self.up[z]
    }

    fn upward_closure(up: &[Vec<u32>], start: usize) -> Vec<u32> {
        let mut seen = vec![false; up.len()];
        let mut out = vec![start as u32];
        seen[start] = true;
        let mut i = 0;
        while i < out.len() {
            for &y in &up[out[i] as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// `v\f = {z : f(z) >= v}`.
    pub fn fiber_over_index(&self, v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = Self::upward_closure(&self.index_up, v)
            .into_iter()
            .flat_map(|w| self.by_index[w as usize].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// `x\g = {z : g(z) >= x}`.
    pub fn fiber_over_total(&self, x: usize) -> Vec<u32> {
        let mut out = Vec::new();
        for y in Self::upward_closure(&self.total_up, x) {
            let start = self.pairs.partition_point(|p| p.0 < y);
            out.extend((start..self.pairs.len()).take_while(|&z| self.pairs[z].0 == y).map(|z| z as u32));
        }
        out.sort_unstable();
        out
    }

    /// Component labels of the whole poset.
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let mut uf = UnionFind::new(self.len());
        for (z, ups) in self.up.iter().enumerate() {
            for &t in ups {
                uf.union(z, t as usize);
            }
        }
        uf.labels()
    }

    /// Number of components of the induced subposet on sorted `elements`.
    pub fn subset_components(&self, elements: &[u32]) -> usize {
        let mut uf = UnionFind::new(elements.len());
        for (i, &z) in elements.iter().enumerate() {
            for &t in &self.up[z as usize] {
                if let Ok(j) = elements.binary_search(&t) {
                    uf.union(i, j);
                }
            }
        }
        uf.labels().1
    }

    pub fn to_finite(&self) -> FinitePoset {
        let labels = self.pairs.iter().map(|(x, v)| format!("({x},{v})")).collect();
        FinitePoset::from_covers_unchecked(labels, self.up.clone())
    }

    /// `f` and `g` as poset maps out of `z` (which must be `self.to_finite()`).
    pub fn projections(
        &self,
        z: Arc<FinitePoset>,
        index: Arc<FinitePoset>,
        total: Arc<FinitePoset>,
    ) -> Result<(PosetMap, PosetMap)> {
        let f = PosetMap::new(z.clone(), index, self.pairs.iter().map(|p| p.1 as usize).collect())?;
        let g = PosetMap::new(z, total, self.pairs.iter().map(|p| p.0 as usize).collect())?;
        Ok((f, g))
    }
}
