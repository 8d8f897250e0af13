use std::collections::{HashMap, HashSet};
use std::fmt::{Debug, Display, Write as _};
use std::hash::Hash;
use std::str::FromStr;

use super::finite::FinitePoset;
use crate::error::{invalid, Error, Result};

/// Entry type of a sequence poset.
pub trait Entry: Clone + Eq + Hash + Ord + Debug + Send + Sync {}
impl<T: Clone + Eq + Hash + Ord + Debug + Send + Sync> Entry for T {}

/// A set of finite sequences of distinct elements of a ground set, ordered by
/// subsequence. Members are kept sorted by length, then lexicographically.
#[derive(Clone, Debug)]
pub struct SequencePoset<T: Entry> {
    ground: Vec<T>,
    members: Vec<Vec<T>>,
    index: HashMap<Vec<T>, u32>,
}

impl<T: Entry> PartialEq for SequencePoset<T> {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.members == other.members
    }
}

/// `a` is a (not necessarily contiguous) subsequence of `b`.
pub fn is_subsequence<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

fn has_distinct_entries<T: Entry>(s: &[T]) -> bool {
    let mut seen = HashSet::with_capacity(s.len());
    s.iter().all(|x| seen.insert(x))
}

impl<T: Entry> SequencePoset<T> {
    pub fn new(ground: Vec<T>, members: Vec<Vec<T>>) -> Result<Self> {
        let mut ground = ground;
        ground.sort();
        ground.dedup();
        for m in &members {
            if m.is_empty() {
                return invalid("sequences must have length at least 1");
            }
            if !has_distinct_entries(m) {
                return invalid(format!("sequence {m:?} repeats an entry"));
            }
            if let Some(x) = m.iter().find(|x| ground.binary_search(x).is_err()) {
                return invalid(format!("entry {x:?} is not in the ground set"));
            }
        }
        Ok(Self::from_sorted_unchecked(ground, members))
    }

    pub(crate) fn from_sorted_unchecked(ground: Vec<T>, mut members: Vec<Vec<T>>) -> Self {
        members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        members.dedup();
        let index = members.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        SequencePoset { ground, members, index }
    }

    /// `O(V)` restricted to sequences of length at most `max_len`.
    pub fn full(ground: Vec<T>, max_len: usize) -> Self {
        let mut ground = ground;
        ground.sort();
        ground.dedup();
        let mut members = Vec::new();
        let mut layer: Vec<Vec<T>> = vec![Vec::new()];
        for _ in 0..max_len.min(ground.len()) {
            let mut next = Vec::new();
            for s in &layer {
                for g in &ground {
                    if !s.contains(g) {
                        let mut t = s.clone();
                        t.push(g.clone());
                        next.push(t);
                    }
                }
            }
            members.extend(next.iter().cloned());
            layer = next;
        }
        Self::from_sorted_unchecked(ground, members)
    }

    pub fn ground(&self) -> &[T] {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vec<T>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &[T] {
        &self.members[i]
    }

    pub fn index_of(&self, s: &[T]) -> Option<usize> {
        self.index.get(s).map(|&i| i as usize)
    }

    pub fn contains(&self, s: &[T]) -> bool {
        self.index.contains_key(s)
    }

    pub fn max_length(&self) -> usize {
        self.members.last().map_or(0, Vec::len)
    }

    /// Number of members of each length `1..=max_length`.
    pub fn count_by_length(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_length()];
        for m in &self.members {
            counts[m.len() - 1] += 1;
        }
        counts
    }

    /// Index range of the members of length `k`.
    pub fn length_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.members.partition_point(|m| m.len() < k);
        let end = self.members.partition_point(|m| m.len() <= k);
        start..end
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        a != b && self.members[a].len() < self.members[b].len() && is_subsequence(&self.members[a], &self.members[b])
    }

    /// Members that are proper subsequences of member `i`.
    pub fn below(&self, i: usize) -> Vec<usize> {
        let m = &self.members[i];
        let n = m.len();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << n) - 1 {
            let sub: Vec<T> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| m[b].clone()).collect();
            if let Some(j) = self.index_of(&sub) {
                out.push(j);
            }
        }
        out.sort_unstable();
        out
    }

    /// First member with a missing nonempty subsequence, if any.
    pub fn chain_condition_violation(&self) -> Option<(Vec<T>, Vec<T>)> {
        // single deletions suffice: missing deeper faces show up one level down
        for m in &self.members {
            if m.len() < 2 {
                continue;
            }
            for i in 0..m.len() {
                let mut f = m.clone();
                f.remove(i);
                if !self.contains(&f) {
                    return Some((m.clone(), f));
                }
            }
        }
        None
    }

    pub fn check_chain_condition(&self) -> bool {
        self.chain_condition_violation().is_none()
    }

    /// `F_v = {w in O(V) : wv in F}`.
    pub fn sub_after(&self, v: &[T]) -> SequencePoset<T> {
        let members = self
            .members
            .iter()
            .filter(|m| m.len() > v.len() && m.ends_with(v))
            .map(|m| m[..m.len() - v.len()].to_vec())
            .collect();
        Self::from_sorted_unchecked(self.ground.clone(), members)
    }

    /// Members of length at most `k`.
    pub fn truncate_by_length(&self, k: usize) -> SequencePoset<T> {
        let end = self.members.partition_point(|m| m.len() <= k);
        Self::from_sorted_unchecked(self.ground.clone(), self.members[..end].to_vec())
    }

    /// Members satisfying a predicate.
    pub fn filter<P: Fn(&[T]) -> bool>(&self, keep: P) -> SequencePoset<T> {
        let members = self.members.iter().filter(|m| keep(m)).cloned().collect();
        Self::from_sorted_unchecked(self.ground.clone(), members)
    }

    /// Intersection with `O(W)` for a subset `W` of the ground set.
    pub fn restrict_ground(&self, subset: &[T]) -> SequencePoset<T> {
        let keep: HashSet<&T> = subset.iter().collect();
        let mut ground: Vec<T> = subset.to_vec();
        ground.sort();
        ground.dedup();
        let members = self.members.iter().filter(|m| m.iter().all(|x| keep.contains(x))).cloned().collect();
        Self::from_sorted_unchecked(ground, members)
    }

    /// `F<S>`: sequences `((v_1,s_1),...,(v_r,s_r))` with `(v_1,...,v_r)` in `F`.
    pub fn tensor_with_set<S: Entry>(&self, set: &[S]) -> Result<SequencePoset<(T, S)>> {
        if set.is_empty() {
            return invalid("F<S> needs a nonempty set S");
        }
        let mut set = set.to_vec();
        set.sort();
        set.dedup();
        let ground: Vec<(T, S)> =
            self.ground.iter().flat_map(|g| set.iter().map(move |s| (g.clone(), s.clone()))).collect();
        let mut members = Vec::new();
        for m in &self.members {
            let total = set.len().checked_pow(m.len() as u32).ok_or(Error::Overflow("F<S> size"))?;
            for mut idx in 0..total {
                let seq = m
                    .iter()
                    .map(|v| {
                        let s = set[idx % set.len()].clone();
                        idx /= set.len();
                        (v.clone(), s)
                    })
                    .collect();
                members.push(seq);
            }
        }
        Ok(SequencePoset::from_sorted_unchecked(ground, members))
    }

    /// Finite poset with the same elements in the same order.
    pub fn to_finite(&self) -> FinitePoset {
        self.to_finite_with(|s| format!("{s:?}"))
    }

    pub fn to_finite_with<L: Fn(&[T]) -> String>(&self, label: L) -> FinitePoset {
        let labels: Vec<String> = self.members.iter().map(|m| label(m)).collect();
        if self.check_chain_condition() {
            // covers are exactly the single-entry deletions
            let mut up: Vec<Vec<u32>> = vec![Vec::new(); self.len()];
            for (j, m) in self.members.iter().enumerate() {
                if m.len() < 2 {
                    continue;
                }
                for i in 0..m.len() {
                    let mut f = m.clone();
                    f.remove(i);
                    up[self.index[&f] as usize].push(j as u32);
                }
            }
            for u in &mut up {
                u.sort_unstable();
            }
            return FinitePoset::from_covers_unchecked(labels, up);
        }
        let mut rel = Vec::new();
        for j in 0..self.len() {
            for i in self.below(j) {
                rel.push((i, j));
            }
        }
        FinitePoset::new(labels, &rel).expect("subsequence order is a partial order")
    }

    /// Element indices of the images of `other`'s members in `self`.
    pub fn embedding_of(&self, other: &SequencePoset<T>) -> Option<Vec<usize>> {
        other.members.iter().map(|m| self.index_of(m)).collect()
    }
}

impl<T: Entry, S: Entry> SequencePoset<(T, S)> {
    /// The projection `p: F<S> -> F`, as member indices into `base`.
    pub fn projection_indices(&self, base: &SequencePoset<T>) -> Result<Vec<usize>> {
        self.members
            .iter()
            .map(|m| {
                let v: Vec<T> = m.iter().map(|(v, _)| v.clone()).collect();
                base.index_of(&v).ok_or_else(|| Error::InvalidInput(format!("{v:?} is not in the base")))
            })
            .collect()
    }

    /// The section `l_{s0}: F -> F<S>`, as member indices into `self`.
    pub fn section_indices(&self, base: &SequencePoset<T>, s0: &S) -> Result<Vec<usize>> {
        base.members
            .iter()
            .map(|m| {
                let w: Vec<(T, S)> = m.iter().map(|v| (v.clone(), s0.clone())).collect();
                self.index_of(&w).ok_or_else(|| Error::InvalidInput(format!("{s0:?} is not in S")))
            })
            .collect()
    }
}

impl<T: Entry + Display + FromStr> SequencePoset<T> {
    pub fn to_text(&self) -> String {
        let pos: HashMap<&T, usize> = self.ground.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut s = String::new();
        let _ = writeln!(s, "ground {}", self.ground.len());
        for g in &self.ground {
            let _ = writeln!(s, "{g}");
        }
        let _ = writeln!(s, "sequences {}", self.members.len());
        for m in &self.members {
            let line: Vec<String> = m.iter().map(|x| pos[x].to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
        let header = |l: Option<(usize, &str)>, key: &str| -> Result<(usize, usize)> {
            let (ln, l) = l.ok_or_else(|| perr(0, "unexpected end of input"))?;
            let n = l
                .trim()
                .strip_prefix(key)
                .and_then(|r| r.trim().parse().ok())
                .ok_or_else(|| perr(ln, &format!("expected '{key} N'")))?;
            Ok((ln, n))
        };
        let (_, n) = header(lines.next(), "ground")?;
        let mut ground = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, "missing ground element"))?;
            ground.push(l.trim().parse::<T>().map_err(|_| perr(ln, "unparsable ground element"))?);
        }
        let (_, m) = header(lines.next(), "sequences")?;
        let mut members = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, "missing sequence"))?;
            let seq = l
                .split_whitespace()
                .map(|t| t.parse::<usize>().ok().and_then(|i| ground.get(i).cloned()))
                .collect::<Option<Vec<T>>>()
                .ok_or_else(|| perr(ln, "bad ground index"))?;
            members.push(seq);
        }
        Self::new(ground, members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(n: u32) -> SequencePoset<u32> {
        SequencePoset::full((0..n).collect(), n as usize)
    }

    #[test]
    fn full_poset_counts() {
        assert_eq!(o(3).count_by_length(), vec![3, 6, 6]);
        assert!(o(3).check_chain_condition());
        let bad = SequencePoset::new(vec![0u32, 1], vec![vec![0, 1]]).unwrap();
        assert!(!bad.check_chain_condition());
        assert!(SequencePoset::new(vec![0u32, 1], vec![vec![0, 0]]).is_err());
        assert!(SequencePoset::new(vec![0u32, 1], vec![vec![]]).is_err());
    }

    #[test]
    fn subsequence_order() {
        assert!(is_subsequence(&[1, 3], &[1, 2, 3]));
        assert!(!is_subsequence(&[3, 1], &[1, 2, 3]));
        let p = o(3);
        let a = p.index_of(&[0]).unwrap();
        let b = p.index_of(&[2, 0]).unwrap();
        assert!(p.less(a, b) && !p.less(b, a));
    }

    #[test]
    fn sub_after_examples() {
        let f = o(3);
        let fv = f.sub_after(&[0]);
        assert!(fv.members().iter().all(|w| !w.contains(&0)));
        assert_eq!(fv.len(), 4);
        // (F_v)_w = F_{wv}
        let f4 = o(4);
        for v in f4.members() {
            for w in f4.members() {
                let mut wv = w.clone();
                wv.extend(v.iter().cloned());
                assert_eq!(f4.sub_after(v).sub_after(w), f4.sub_after(&wv));
            }
        }
    }

    #[test]
    fn tensor_counts_and_maps() {
        let f = SequencePoset::new(vec![7u32], vec![vec![7]]).unwrap();
        let t = f.tensor_with_set(&['a', 'b']).unwrap();
        assert_eq!(t.len(), 2);
        assert!(!t.less(0, 1) && !t.less(1, 0));
        assert!(f.tensor_with_set::<char>(&[]).is_err());
        let f = o(3);
        let t = f.tensor_with_set(&[0u8, 1, 2]).unwrap();
        let counts = f.count_by_length();
        for (k, c) in t.count_by_length().iter().enumerate() {
            assert_eq!(*c, counts[k] * 3usize.pow(k as u32 + 1));
        }
        let p = t.projection_indices(&f).unwrap();
        let l = t.section_indices(&f, &1).unwrap();
        for (i, &li) in l.iter().enumerate() {
            assert_eq!(p[li], i);
        }
    }

    #[test]
    fn truncation() {
        let f = o(3);
        assert_eq!(f.truncate_by_length(9), f);
        assert_eq!(f.truncate_by_length(1).len(), 3);
        assert!(f.truncate_by_length(2).check_chain_condition());
    }

    #[test]
    fn finite_poset_agrees_with_subsequence_order() {
        let f = o(3);
        let p = f.to_finite();
        for a in 0..f.len() {
            for b in 0..f.len() {
                assert_eq!(p.less(a, b), f.less(a, b));
            }
        }
        let g = SequencePoset::new(vec![0u32, 1, 2], vec![vec![0], vec![0, 1, 2], vec![2, 1]]).unwrap();
        let q = g.to_finite();
        for a in 0..g.len() {
            for b in 0..g.len() {
                assert_eq!(q.less(a, b), g.less(a, b));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f = o(3);
        assert_eq!(SequencePoset::<u32>::from_text(&f.to_text()).unwrap(), f);
    }
}
