use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkSign {
    Plus,
    Minus,
}

/// A finite poset stored as its cover relation, with the strict order
/// materialized on first use.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    labels: Vec<String>,
    up: Vec<Vec<u32>>,
    down: Vec<Vec<u32>>,
    above: OnceLock<Vec<Vec<u32>>>,
    below: OnceLock<Vec<Vec<u32>>>,
    index: OnceLock<HashMap<String, usize>>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.up == other.up
    }
}

impl Eq for FinitePoset {}

fn topological_order(n: usize, succ: &[Vec<u32>]) -> Option<Vec<u32>> {
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &y in s {
            indeg[y as usize] += 1;
        }
    }
    let mut stack: Vec<u32> = (0..n as u32).rev().filter(|&x| indeg[x as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in succ[x as usize].iter().rev() {
            indeg[y as usize] -= 1;
            if indeg[y as usize] == 0 {
                stack.push(y);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Strict up-sets from a successor relation, processed in reverse
/// topological order.
fn reach(n: usize, succ: &[Vec<u32>], order: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut mark = vec![u32::MAX; n];
    for &x in order.iter().rev() {
        let mut acc = Vec::new();
        for &y in &succ[x as usize] {
            if mark[y as usize] != x {
                mark[y as usize] = x;
                acc.push(y);
            }
            for &z in &out[y as usize] {
                if mark[z as usize] != x {
                    mark[z as usize] = x;
                    acc.push(z);
                }
            }
        }
        acc.sort_unstable();
        out[x as usize] = acc;
    }
    out
}

impl FinitePoset {
    /// Builds the poset generated by `relations` (pairs `a < b`). The
    /// relation need not be transitive or reduced; cycles are rejected.
    pub fn new(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in relations {
            if a >= n || b >= n {
                return invalid(format!("relation ({a}, {b}) out of range for {n} elements"));
            }
            if a == b {
                return invalid(format!("relation {a} < {a} violates irreflexivity"));
            }
            succ[a].push(b as u32);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        let order = topological_order(n, &succ)
            .ok_or_else(|| Error::InvalidInput("relations contain a cycle".into()))?;
        let above = reach(n, &succ, &order);
        // transitive reduction
        let mut up: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut shadow = vec![u32::MAX; n];
        for x in 0..n {
            for &z in &above[x] {
                for &w in &above[z as usize] {
                    shadow[w as usize] = x as u32;
                }
            }
            up[x] = above[x].iter().copied().filter(|&y| shadow[y as usize] != x as u32).collect();
        }
        let p = Self::from_covers_unchecked(labels, up);
        let _ = p.above.set(above);
        Ok(p)
    }

    /// Builds a poset from a strict order predicate, checked for transitivity.
    pub fn from_order<F: Fn(usize, usize) -> bool>(labels: Vec<String>, less: F) -> Result<Self> {
        let n = labels.len();
        let mut rel = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && less(a, b) {
                    rel.push((a, b));
                }
            }
        }
        let p = Self::new(labels, &rel)?;
        for a in 0..n {
            if p.above(a).len() != (0..n).filter(|&b| a != b && less(a, b)).count() {
                return invalid("order predicate is not transitive");
            }
        }
        Ok(p)
    }

    pub(crate) fn from_covers_unchecked(labels: Vec<String>, up: Vec<Vec<u32>>) -> Self {
        let n = labels.len();
        let mut down: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (x, ys) in up.iter().enumerate() {
            for &y in ys {
                down[y as usize].push(x as u32);
            }
        }
        FinitePoset {
            labels,
            up,
            down,
            above: OnceLock::new(),
            below: OnceLock::new(),
            index: OnceLock::new(),
        }
    }

    /// An antichain-free chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let up = (0..n).map(|i| if i + 1 < n { vec![i as u32 + 1] } else { vec![] }).collect();
        Self::from_covers_unchecked(labels, up)
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_covers_unchecked((0..n).map(|i| i.to_string()).collect(), vec![Vec::new(); n])
    }

    pub fn empty() -> Self {
        Self::antichain(0)
    }

    /// Proper nonempty faces of the `d`-simplex ordered by inclusion, a model
    /// of the `(d-1)`-sphere.
    pub fn simplex_boundary(d: usize) -> Self {
        let full = (1u32 << (d + 1)) - 1;
        let faces: Vec<u32> = (1..full).collect();
        let mut faces = faces;
        faces.sort_by_key(|f| (f.count_ones(), *f));
        let labels = faces
            .iter()
            .map(|f| {
                let v: Vec<String> = (0..=d).filter(|i| f >> i & 1 == 1).map(|i| i.to_string()).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        let pos: HashMap<u32, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let up = faces
            .iter()
            .map(|&f| {
                (0..=d)
                    .filter(|i| f >> i & 1 == 0)
                    .filter_map(|i| pos.get(&(f | 1 << i)).map(|&p| p as u32))
                    .collect()
            })
            .collect();
        Self::from_covers_unchecked(labels, up)
    }

    /// The `2k`-cycle `a_0 < b_0 > a_1 < b_1 ... ` modelling a circle.
    pub fn crown(k: usize) -> Self {
        let mut labels = Vec::new();
        for i in 0..k {
            labels.push(format!("a{i}"));
        }
        for i in 0..k {
            labels.push(format!("b{i}"));
        }
        let up = (0..2 * k)
            .map(|x| if x < k { vec![(k + x) as u32, (k + (x + k - 1) % k) as u32] } else { vec![] })
            .map(|mut v: Vec<u32>| {
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        Self::from_covers_unchecked(labels, up)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index
            .get_or_init(|| self.labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect())
            .get(label)
            .copied()
    }

    /// Elements covering `x`.
    pub fn covers_up(&self, x: usize) -> &[u32] {
        &self.up[x]
    }

    /// Elements covered by `x`.
    pub fn covers_down(&self, x: usize) -> &[u32] {
        &self.down[x]
    }

    pub fn cover_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.up.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y as usize)))
    }

    pub fn cover_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    fn above_all(&self) -> &Vec<Vec<u32>> {
        self.above.get_or_init(|| {
            let order = topological_order(self.len(), &self.up).expect("acyclic covers");
            reach(self.len(), &self.up, &order)
        })
    }

    fn below_all(&self) -> &Vec<Vec<u32>> {
        self.below.get_or_init(|| {
            let order = topological_order(self.len(), &self.down).expect("acyclic covers");
            reach(self.len(), &self.down, &order)
        })
    }

    /// Elements strictly above `x`, sorted.
    pub fn above(&self, x: usize) -> &[u32] {
        &self.above_all()[x]
    }

    /// Elements strictly below `x`, sorted.
    pub fn below(&self, x: usize) -> &[u32] {
        &self.below_all()[x]
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.above(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.less(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.less(b, a)
    }

    /// Induced subposet on `elements` (kept in the given order).
    pub fn induced(&self, elements: &[usize]) -> FinitePoset {
        let pos: HashMap<usize, u32> = elements.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let labels = elements.iter().map(|&x| self.labels[x].clone()).collect();
        let mut up: Vec<Vec<u32>> = vec![Vec::new(); elements.len()];
        // covers of the induced order: minimal elements of above(x) within the subset
        for (i, &x) in elements.iter().enumerate() {
            let inside: Vec<u32> = self.above(x).iter().filter(|y| pos.contains_key(&(**y as usize))).copied().collect();
            let mut covers: Vec<u32> = inside
                .iter()
                .filter(|&&y| !inside.iter().any(|&z| z != y && self.less(z as usize, y as usize)))
                .map(|y| pos[&(*y as usize)])
                .collect();
            covers.sort_unstable();
            up[i] = covers;
        }
        FinitePoset::from_covers_unchecked(labels, up)
    }

    pub fn opposite(&self) -> FinitePoset {
        let mut p = FinitePoset::from_covers_unchecked(self.labels.clone(), self.down.clone());
        if let Some(a) = self.above.get() {
            let _ = p.below.set(a.clone());
        }
        if let Some(b) = self.below.get() {
            let _ = p.above.set(b.clone());
        }
        p.down = self.up.clone();
        p
    }

    /// `Link^+(x)` (strictly above) or `Link^-(x)` (strictly below), with the
    /// original indices of its elements.
    pub fn link(&self, x: usize, sign: LinkSign) -> (FinitePoset, Vec<usize>) {
        let members: Vec<usize> = match sign {
            LinkSign::Plus => self.above(x),
            LinkSign::Minus => self.below(x),
        }
        .iter()
        .map(|&y| y as usize)
        .collect();
        (self.induced(&members), members)
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.up[x].is_empty()).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.down[x].is_empty()).collect()
    }

    pub fn maximum(&self) -> Option<usize> {
        match self.maximal_elements()[..] {
            [m] => Some(m),
            _ => None,
        }
    }

    pub fn minimum(&self) -> Option<usize> {
        match self.minimal_elements()[..] {
            [m] => Some(m),
            _ => None,
        }
    }

    /// Length of the longest chain ending at each element (minimal elements
    /// get 0).
    pub fn standard_heights(&self) -> Vec<u32> {
        let order = topological_order(self.len(), &self.up).expect("acyclic covers");
        let mut h = vec![0u32; self.len()];
        for &x in &order {
            for &y in &self.up[x as usize] {
                h[y as usize] = h[y as usize].max(h[x as usize] + 1);
            }
        }
        h
    }

    /// Longest chain length minus one; `-1` for the empty poset.
    pub fn dimension(&self) -> i64 {
        self.standard_heights().iter().map(|&h| h as i64).max().unwrap_or(-1)
    }

    /// Connected components of the comparability graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (x, y) in self.cover_pairs() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Adds a new maximum element.
    pub fn cone(&self, label: &str) -> FinitePoset {
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        let top = self.len() as u32;
        let mut up = self.up.clone();
        for x in self.maximal_elements() {
            up[x].push(top);
        }
        up.push(Vec::new());
        FinitePoset::from_covers_unchecked(labels, up)
    }

    /// Relabels elements with their index, dropping opaque labels.
    pub fn with_index_labels(&self) -> FinitePoset {
        FinitePoset::from_covers_unchecked((0..self.len()).map(|i| i.to_string()).collect(), self.up.clone())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "elements {}", self.len());
        for l in &self.labels {
            let _ = writeln!(s, "{l}");
        }
        let _ = writeln!(s, "covers {}", self.cover_count());
        for (x, y) in self.cover_pairs() {
            let _ = writeln!(s, "{x} {y}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<FinitePoset> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
        let (ln, head) = lines.next().ok_or_else(|| perr(0, "missing header"))?;
        let n: usize = head
            .trim()
            .strip_prefix("elements")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| perr(ln, "expected 'elements N'"))?;
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let (_, l) = lines.next().ok_or_else(|| perr(ln, "missing labels"))?;
            labels.push(l.trim().to_string());
        }
        let (ln, head) = lines.next().ok_or_else(|| perr(ln, "missing covers header"))?;
        let m: usize = head
            .trim()
            .strip_prefix("covers")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| perr(ln, "expected 'covers M'"))?;
        let mut rel = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = lines.next().ok_or_else(|| perr(ln, "missing cover pair"))?;
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => rel.push((a, b)),
                _ => return Err(perr(ln, "expected two indices")),
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing content"));
        }
        FinitePoset::new(labels, &rel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn closure_and_reduction() {
        let p = FinitePoset::new(labels(4), &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert_eq!(p.covers_up(0), &[1]);
        assert_eq!(p.above(0), &[1, 2, 3]);
        assert_eq!(p.below(3), &[0, 1, 2]);
        assert!(p.less(0, 3) && !p.less(3, 0));
        assert!(FinitePoset::new(labels(2), &[(0, 1), (1, 0)]).is_err());
        assert!(FinitePoset::new(labels(2), &[(0, 0)]).is_err());
    }

    #[test]
    fn links_and_extrema() {
        let p = FinitePoset::chain(3);
        assert!(p.link(2, LinkSign::Plus).0.is_empty());
        assert_eq!(p.maximum(), Some(2));
        assert_eq!(p.dimension(), 2);
        assert_eq!(FinitePoset::empty().dimension(), -1);
        let s = FinitePoset::simplex_boundary(2);
        assert_eq!(s.len(), 6);
        assert_eq!(s.maximum(), None);
        assert_eq!(s.dimension(), 1);
    }

    #[test]
    fn opposite_is_involution() {
        let p = FinitePoset::simplex_boundary(3);
        let q = p.opposite().opposite();
        assert_eq!(p, q);
        assert_eq!(p.opposite().above(0), p.below(0));
    }

    #[test]
    fn text_round_trip() {
        let p = FinitePoset::crown(3);
        let q = FinitePoset::from_text(&p.to_text()).unwrap();
        assert_eq!(p, q);
        assert!(FinitePoset::from_text("elements 2\na\nb\ncovers 1\n0 x\n").is_err());
        assert!(FinitePoset::from_text("nodes 2").is_err());
    }

    #[test]
    fn crown_is_connected_circle_model() {
        let c = FinitePoset::crown(3);
        assert_eq!(c.len(), 6);
        assert!(c.is_connected());
        assert_eq!(c.cover_count(), 6);
    }
}
