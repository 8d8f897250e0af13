//! Edge-path presentations of fundamental groups and a bounded triviality
//! decision.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::linalg::{invariant_factors, AbelianGroup, SparseIntMatrix};
use crate::poset::{Entry, FinitePoset, SequencePoset};

/// Generators are `1..=generators`; a relator letter `g` or `-g` is a
/// generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

/// A 2-dimensional cell structure: oriented edges between vertices and
/// triangles given by their three edges `(01, 12, 02)`.
struct TwoComplex {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    triangles: Vec<[usize; 3]>,
}

impl TwoComplex {
    fn presentation(&self, basepoint: usize) -> Result<GroupPresentation> {
        if basepoint >= self.vertices {
            return invalid("basepoint out of range");
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertices];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        let mut seen = vec![false; self.vertices];
        let mut tree = vec![false; self.edges.len()];
        seen[basepoint] = true;
        let mut queue = VecDeque::from([basepoint]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    tree[e] = true;
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("complex is not connected");
        }
        let mut gen_of = vec![0i32; self.edges.len()];
        let mut next = 0;
        for (e, &t) in tree.iter().enumerate() {
            if !t {
                next += 1;
                gen_of[e] = next;
            }
        }
        let relators = self
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let w = [gen_of[a], gen_of[b], -gen_of[c]];
                free_reduce(w.iter().copied().filter(|&g| g != 0).collect())
            })
            .filter(|r: &Vec<i32>| !r.is_empty())
            .collect();
        Ok(GroupPresentation { generators: next as usize, relators })
    }
}

/// Edge-path presentation of `pi_1` of the order complex.
pub fn pi1_presentation(poset: &FinitePoset, basepoint: usize, budget: &Budget) -> Result<GroupPresentation> {
    let mut edges = Vec::new();
    let mut edge_id: HashMap<(u32, u32), usize> = HashMap::new();
    for x in 0..poset.len() {
        for &y in poset.above(x) {
            edge_id.insert((x as u32, y), edges.len());
            edges.push((x, y as usize));
        }
    }
    budget.check_chains(edges.len() as u64, "pi1 edges")?;
    let mut triangles = Vec::new();
    for x in 0..poset.len() {
        for &y in poset.above(x) {
            for &z in poset.above(y as usize) {
                triangles.push([edge_id[&(x as u32, y)], edge_id[&(y, z)], edge_id[&(x as u32, z)]]);
            }
        }
        if triangles.len() as u64 > budget.chains {
            budget.check_chains(triangles.len() as u64, "pi1 triangles")?;
        }
    }
    TwoComplex { vertices: poset.len(), edges, triangles }.presentation(basepoint)
}

/// Presentation from the cell structure of a chain-condition sequence poset:
/// vertices are 1-sequences, edges 2-sequences, triangles 3-sequences.
pub fn pi1_presentation_sequences<T: Entry>(poset: &SequencePoset<T>, basepoint: usize) -> Result<GroupPresentation> {
    if !poset.check_chain_condition() {
        return invalid("cell presentation needs the chain condition");
    }
    let v = poset.length_range(1);
    let e = poset.length_range(2);
    let t = poset.length_range(3);
    let edges = e
        .clone()
        .map(|i| {
            let m = poset.member(i);
            (poset.index_of(&m[..1]).unwrap() - v.start, poset.index_of(&m[1..]).unwrap() - v.start)
        })
        .collect();
    let triangles = t
        .map(|i| {
            let m = poset.member(i);
            let f = |a: usize, b: usize| poset.index_of(&[m[a].clone(), m[b].clone()]).unwrap() - e.start;
            [f(0, 1), f(1, 2), f(0, 2)]
        })
        .collect();
    TwoComplex { vertices: v.len(), edges, triangles }.presentation(basepoint)
}

fn free_reduce(w: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for g in w {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    // cyclic reduction
    let mut s = 0;
    let mut e = out.len();
    while e - s >= 2 && out[s] == -out[e - 1] {
        s += 1;
        e -= 1;
    }
    out[s..e].to_vec()
}

fn invert(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|g| -g).collect()
}

impl GroupPresentation {
    pub fn abelianization(&self) -> Result<AbelianGroup> {
        let mut t = Vec::new();
        for (j, r) in self.relators.iter().enumerate() {
            let mut sums: HashMap<usize, i64> = HashMap::new();
            for &g in r {
                *sums.entry(g.unsigned_abs() as usize - 1).or_default() += g.signum() as i64;
            }
            for (g, s) in sums {
                if s != 0 {
                    t.push((g, j, s));
                }
            }
        }
        let m = SparseIntMatrix::from_triplets(self.generators, self.relators.len(), t)?;
        Ok(AbelianGroup::cokernel(self.generators, &invariant_factors(&m, &Budget::default())?))
    }

    /// Eliminates generators that occur exactly once in some relator, and
    /// generators killed by length-one relators. Returns a presentation of
    /// the same group.
    pub fn tietze(&self, max_total_length: usize) -> GroupPresentation {
        let mut rels: Vec<Vec<i32>> = self.relators.iter().map(|r| free_reduce(r.clone())).filter(|r| !r.is_empty()).collect();
        let mut alive = vec![true; self.generators + 1];
        alive[0] = false;
        loop {
            rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            rels.dedup();
            // pick the shortest relator with a generator occurring once
            let mut choice: Option<(usize, usize, i32)> = None;
            for (ri, r) in rels.iter().enumerate() {
                let mut count: HashMap<i32, usize> = HashMap::new();
                for &g in r {
                    *count.entry(g.abs()).or_default() += 1;
                }
                if let Some(pos) = r.iter().position(|g| count[&g.abs()] == 1) {
                    choice = Some((ri, pos, r[pos]));
                    break;
                }
            }
            let Some((ri, pos, g)) = choice else { break };
            let r = rels.remove(ri);
            // r = a g b = 1  =>  g = a^{-1} b^{-1}
            let mut value = invert(&r[..pos]);
            value.extend(invert(&r[pos + 1..]));
            let (gen, value) = if g > 0 { (g, value) } else { (-g, invert(&value)) };
            let value_inv = invert(&value);
            let mut total = 0;
            for rel in rels.iter_mut() {
                if !rel.iter().any(|x| x.abs() == gen) {
                    total += rel.len();
                    continue;
                }
                let mut out = Vec::with_capacity(rel.len());
                for &x in rel.iter() {
                    if x == gen {
                        out.extend_from_slice(&value);
                    } else if x == -gen {
                        out.extend_from_slice(&value_inv);
                    } else {
                        out.push(x);
                    }
                }
                *rel = free_reduce(out);
                total += rel.len();
            }
            alive[gen as usize] = false;
            rels.retain(|r| !r.is_empty());
            if total > max_total_length {
                break;
            }
        }
        // renumber surviving generators
        let mut new_id = vec![0i32; alive.len()];
        let mut next = 0;
        for (g, &a) in alive.iter().enumerate() {
            if a {
                next += 1;
                new_id[g] = next;
            }
        }
        let relators = rels
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.signum() * new_id[x.unsigned_abs() as usize]).collect())
            .collect();
        GroupPresentation { generators: next as usize, relators }
    }
}

/// Result of coset enumeration over the trivial subgroup.
pub enum CosetResult {
    /// Enumeration closed with this many cosets (the group order).
    Complete(usize),
    Exhausted,
}

/// Todd-Coxeter (HLT with lookahead-free scanning) for the trivial subgroup.
pub fn enumerate_cosets(p: &GroupPresentation, max_cosets: usize) -> CosetResult {
    const NONE: u32 = u32::MAX;
    let cols = 2 * p.generators;
    if cols == 0 {
        return CosetResult::Complete(1);
    }
    let col = |g: i32| -> usize { 2 * (g.unsigned_abs() as usize - 1) + usize::from(g < 0) };
    let rels: Vec<Vec<usize>> = p.relators.iter().map(|r| r.iter().map(|&g| col(g)).collect()).collect();
    let mut table: Vec<Vec<u32>> = vec![vec![NONE; cols]];
    let mut parent: Vec<u32> = vec![0];

    fn rep(parent: &mut [u32], mut c: u32) -> u32 {
        let mut root = c;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        while parent[c as usize] != root {
            let next = parent[c as usize];
            parent[c as usize] = root;
            c = next;
        }
        root
    }

    fn coincidence(table: &mut [Vec<u32>], parent: &mut [u32], a: u32, b: u32) {
        let mut queue: Vec<u32> = Vec::new();
        let merge = |parent: &mut [u32], queue: &mut Vec<u32>, k: u32, l: u32| {
            let (k, l) = (rep(parent, k), rep(parent, l));
            if k == l {
                return;
            }
            let (k, l) = (k.min(l), k.max(l));
            parent[l as usize] = k;
            queue.push(l);
        };
        merge(parent, &mut queue, a, b);
        let mut i = 0;
        while i < queue.len() {
            let c = queue[i] as usize;
            i += 1;
            for x in 0..table[c].len() {
                let d = table[c][x];
                if d == NONE {
                    continue;
                }
                table[c][x] = NONE;
                if table[d as usize][x ^ 1] == c as u32 {
                    table[d as usize][x ^ 1] = NONE;
                }
                let e1 = rep(parent, c as u32) as usize;
                let e2 = rep(parent, d) as usize;
                if table[e1][x] != NONE {
                    let t = table[e1][x];
                    merge(parent, &mut queue, e2 as u32, t);
                } else if table[e2][x ^ 1] != NONE {
                    let t = table[e2][x ^ 1];
                    merge(parent, &mut queue, e1 as u32, t);
                } else {
                    table[e1][x] = e2 as u32;
                    table[e2][x ^ 1] = e1 as u32;
                }
            }
        }
    }

    let mut c = 0usize;
    while c < table.len() {
        if parent[c] as usize == c {
            for r in &rels {
                if parent[c] as usize != c {
                    break;
                }
                // scan and fill
                let (mut f, mut b) = (c as u32, c as u32);
                let (mut i, mut j) = (0isize, r.len() as isize - 1);
                loop {
                    while i <= j && table[f as usize][r[i as usize]] != NONE {
                        f = table[f as usize][r[i as usize]];
                        i += 1;
                    }
                    if i > j {
                        if f != b {
                            coincidence(&mut table, &mut parent, f, b);
                        }
                        break;
                    }
                    while j >= i && table[b as usize][r[j as usize] ^ 1] != NONE {
                        b = table[b as usize][r[j as usize] ^ 1];
                        j -= 1;
                    }
                    if j < i {
                        coincidence(&mut table, &mut parent, f, b);
                        break;
                    } else if i == j {
                        let x = r[i as usize];
                        table[f as usize][x] = b;
                        table[b as usize][x ^ 1] = f;
                        break;
                    }
                    if table.len() >= max_cosets {
                        return CosetResult::Exhausted;
                    }
                    let d = table.len() as u32;
                    table.push(vec![NONE; cols]);
                    parent.push(d);
                    let x = r[i as usize];
                    table[f as usize][x] = d;
                    table[d as usize][x ^ 1] = f;
                }
            }
            if parent[c] as usize == c {
                for x in 0..cols {
                    if table[c][x] == NONE {
                        if table.len() >= max_cosets {
                            return CosetResult::Exhausted;
                        }
                        let d = table.len() as u32;
                        table.push(vec![NONE; cols]);
                        parent.push(d);
                        table[c][x] = d;
                        table[d as usize][x ^ 1] = c as u32;
                    }
                }
            }
        }
        c += 1;
    }
    CosetResult::Complete((0..table.len()).filter(|&i| parent[i] as usize == i).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Triviality {
    Trivial,
    Nontrivial,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi1Report {
    pub generators: usize,
    pub relators: usize,
    pub generators_after_tietze: usize,
    pub abelianization: AbelianGroup,
    pub verdict: Triviality,
    pub certificate: Option<String>,
}

/// Three-valued triviality: "nontrivial" only with a certificate.
pub fn triviality(p: &GroupPresentation, budget: &Budget) -> Result<Pi1Report> {
    let simplified = p.tietze(1 << 20);
    let abelianization = simplified.abelianization()?;
    let mut report = Pi1Report {
        generators: p.generators,
        relators: p.relators.len(),
        generators_after_tietze: simplified.generators,
        abelianization: abelianization.clone(),
        verdict: Triviality::Unknown,
        certificate: None,
    };
    if simplified.generators == 0 {
        report.verdict = Triviality::Trivial;
        report.certificate = Some("all generators eliminated".into());
        return Ok(report);
    }
    if !abelianization.is_trivial() {
        report.verdict = Triviality::Nontrivial;
        report.certificate = Some(format!("abelianization {abelianization}"));
        return Ok(report);
    }
    budget.check_time()?;
    match enumerate_cosets(&simplified, budget.cosets) {
        CosetResult::Complete(1) => {
            report.verdict = Triviality::Trivial;
            report.certificate = Some("coset enumeration closed with one coset".into());
        }
        CosetResult::Complete(n) => {
            report.verdict = Triviality::Nontrivial;
            report.certificate = Some(format!("finite group of order {n}"));
        }
        CosetResult::Exhausted => {}
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_with_maximum_is_simply_connected() {
        let p = FinitePoset::simplex_boundary(2).cone("top");
        let pres = pi1_presentation(&p, 0, &Budget::default()).unwrap();
        assert_eq!(triviality(&pres, &Budget::default()).unwrap().verdict, Triviality::Trivial);
    }

    #[test]
    fn hexagon_is_not() {
        let p = FinitePoset::crown(3);
        let pres = pi1_presentation(&p, 0, &Budget::default()).unwrap();
        let r = triviality(&pres, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Triviality::Nontrivial);
        assert_eq!(r.abelianization, AbelianGroup::free(1));
    }

    #[test]
    fn coset_enumeration_orders() {
        // <a, b | a^2, b^3, (ab)^2> is S_3
        let s3 = GroupPresentation { generators: 2, relators: vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]] };
        assert!(matches!(enumerate_cosets(&s3, 1000), CosetResult::Complete(6)));
        // perfect presentation of the trivial group: <a, b | a b a^-1 b^-2, b a b^-1 a^-2>
        let t = GroupPresentation { generators: 2, relators: vec![vec![1, 2, -1, -2, -2], vec![2, 1, -2, -1, -1]] };
        assert!(t.abelianization().unwrap().is_trivial());
        let r = triviality(&t, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Triviality::Trivial);
        // <a, b | a^2, b^3, (ab)^5> is A_5
        let a5 = GroupPresentation { generators: 2, relators: vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2]] };
        let r = triviality(&a5, &Budget::default()).unwrap();
        assert_eq!(r.verdict, Triviality::Nontrivial);
        assert_eq!(r.certificate.as_deref(), Some("finite group of order 60"));
    }

    #[test]
    fn tietze_keeps_group() {
        let z = GroupPresentation { generators: 2, relators: vec![vec![1, -2]] };
        let s = z.tietze(100);
        assert_eq!(s.generators, 1);
        assert_eq!(s.abelianization().unwrap(), AbelianGroup::free(1));
    }
}
