//! Seeded generators for test instances. Every generator draws only from the
//! `ChaCha8Rng` it is given.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::IntMatrix;
use crate::poset::{CoefficientFunctor, FinitePoset, LocalSystem, PosetMap, SequencePoset};
use crate::symplectic::SymplecticSpace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Poset on `0..n` generated by `i < j` (for `i < j`) with probability
/// `density`; index order is a linear extension.
pub fn random_poset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> FinitePoset {
    let mut rel = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(density) {
                rel.push((i, j));
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    FinitePoset::new(labels, &rel).expect("index order is acyclic")
}

/// Closure under subsequences of `count` random sequences of distinct
/// elements of `0..ground`, each of length at most `max_len`.
pub fn random_sequence_poset(rng: &mut ChaCha8Rng, ground: u32, count: usize, max_len: usize) -> SequencePoset<u32> {
    let pool: Vec<u32> = (0..ground).collect();
    let mut members = Vec::new();
    for _ in 0..count {
        let len = rng.gen_range(1..=max_len.min(ground as usize).max(1));
        let seq: Vec<u32> = pool.choose_multiple(rng, len).copied().collect();
        for mask in 1u32..(1 << seq.len()) {
            members.push((0..seq.len()).filter(|b| mask >> b & 1 == 1).map(|b| seq[b]).collect::<Vec<u32>>());
        }
    }
    SequencePoset::new(pool, members).expect("entries are distinct and in range")
}

/// A random order-preserving map between random posets.
pub fn random_poset_map(rng: &mut ChaCha8Rng, source: usize, target: usize, density: f64) -> PosetMap {
    let x = Arc::new(random_poset(rng, source, density));
    for _ in 0..50 {
        let y = random_poset(rng, target, density);
        if let Some(f) = greedy_map(rng, &x, &y) {
            return PosetMap::new(x, Arc::new(y), f).expect("built order-preserving");
        }
    }
    let y = random_poset(rng, target, density).cone("top");
    let f = greedy_map(rng, &x, &y).expect("a poset with a maximum receives every poset");
    PosetMap::new(x, Arc::new(y), f).expect("built order-preserving")
}

fn greedy_map(rng: &mut ChaCha8Rng, x: &FinitePoset, y: &FinitePoset) -> Option<Vec<usize>> {
    let mut f = vec![usize::MAX; x.len()];
    // index order is a linear extension of x
    for a in 0..x.len() {
        let lower: Vec<usize> = x.covers_down(a).iter().map(|&b| f[b as usize]).collect();
        let candidates: Vec<usize> = (0..y.len()).filter(|&c| lower.iter().all(|&l| y.leq(l, c))).collect();
        f[a] = *candidates.choose(rng)?;
    }
    Some(f)
}

/// A random matrix in `GL_r(Z)` and its inverse.
pub fn random_unimodular(rng: &mut ChaCha8Rng, r: usize) -> (IntMatrix, IntMatrix) {
    let mut a = IntMatrix::identity(r);
    let mut inv = IntMatrix::identity(r);
    if r < 2 {
        if r == 1 && rng.gen_bool(0.5) {
            a.set(0, 0, -1);
            inv.set(0, 0, -1);
        }
        return (a, inv);
    }
    for _ in 0..2 * r {
        let i = rng.gen_range(0..r);
        let mut j = rng.gen_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let s: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // a <- a * (I + s e_ij), inv <- (I - s e_ij) * inv
        for row in 0..r {
            let v = a.get(row, j) + s * a.get(row, i);
            a.set(row, j, v);
        }
        for col in 0..r {
            let v = inv.get(i, col) - s * inv.get(j, col);
            inv.set(i, col, v);
        }
    }
    (a, inv)
}

/// A functor on `poset` built from `universe` intervals: `u` lives on
/// `{x : b_u <= x, not d_u <= x}`, structure maps are the identity on
/// common `u`, and each `F(x)` is twisted by a random basis change.
pub fn random_interval_functor(rng: &mut ChaCha8Rng, poset: Arc<FinitePoset>, universe: usize) -> Result<CoefficientFunctor> {
    let n = poset.len();
    let births: Vec<usize> = (0..universe).map(|_| rng.gen_range(0..n.max(1))).collect();
    let deaths: Vec<Option<usize>> =
        (0..universe).map(|_| if rng.gen_bool(0.4) { Some(rng.gen_range(0..n.max(1))) } else { None }).collect();
    let support: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..universe)
                .filter(|&u| poset.leq(births[u], x) && !deaths[u].is_some_and(|d| poset.leq(d, x)))
                .collect()
        })
        .collect();
    let twists: Vec<(IntMatrix, IntMatrix)> = support.iter().map(|s| random_unimodular(rng, s.len())).collect();
    let mut covers = HashMap::new();
    for (x, y) in poset.cover_pairs() {
        let mut m = IntMatrix::zeros(support[y].len(), support[x].len());
        for (c, u) in support[x].iter().enumerate() {
            if let Ok(r) = support[y].binary_search(u) {
                m.set(r, c, 1);
            }
        }
        let twisted = twists[y].0.mul(&m)?.mul(&twists[x].1)?;
        covers.insert((x, y), twisted);
    }
    CoefficientFunctor::new(poset, support.iter().map(Vec::len).collect(), covers)
}

/// A connected poset of height one (`bottom` minimal and `top` maximal
/// elements) with a rank-`rank` local system of random `GL_r(Z)` matrices.
pub fn random_local_system(rng: &mut ChaCha8Rng, bottom: usize, top: usize, rank: usize) -> Result<(Arc<FinitePoset>, LocalSystem)> {
    loop {
        let mut rel = Vec::new();
        for b in 0..bottom {
            for t in 0..top {
                if rng.gen_bool(0.5) {
                    rel.push((b, bottom + t));
                }
            }
        }
        let labels = (0..bottom + top).map(|i| format!("q{i}")).collect();
        let p = FinitePoset::new(labels, &rel)?;
        if !p.is_connected() {
            continue;
        }
        let p = Arc::new(p);
        let covers = p.cover_pairs().map(|(x, y)| ((x, y), random_unimodular(rng, rank).0)).collect();
        let f = CoefficientFunctor::new(p.clone(), vec![rank; p.len()], covers)?;
        return Ok((p, LocalSystem::new(f)?));
    }
}

/// `count` random unimodular frames of length `len` in `R^{2n}`, drawn by
/// rejection.
pub fn random_frames(rng: &mut ChaCha8Rng, space: &SymplecticSpace, len: usize, count: usize) -> Vec<Vec<Vec<u64>>> {
    let total = space.vector_count().unwrap_or(0);
    let mut out = Vec::new();
    while out.len() < count {
        let v: Vec<Vec<u64>> = (0..len).map(|_| space.decode(rng.gen_range(0..total) as u32)).collect();
        if space.is_frame(&v, crate::symplectic::FrameMode::Unimodular) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_poset(&mut rng(3), 12, 0.3);
        let b = random_poset(&mut rng(3), 12, 0.3);
        assert_eq!(a, b);
        let s = random_sequence_poset(&mut rng(4), 6, 5, 3);
        assert!(s.check_chain_condition());
        assert_eq!(s, random_sequence_poset(&mut rng(4), 6, 5, 3));
    }

    #[test]
    fn unimodular_pairs_invert() {
        let mut r = rng(9);
        for size in 0..5 {
            let (a, inv) = random_unimodular(&mut r, size);
            assert!(a.mul(&inv).unwrap().is_identity());
        }
    }

    #[test]
    fn random_functors_are_functors() {
        let mut r = rng(11);
        for _ in 0..10 {
            let p = Arc::new(random_poset(&mut r, 8, 0.4));
            let f = random_interval_functor(&mut r, p, 4).unwrap();
            f.check_functoriality().unwrap();
        }
        let (_, l) = random_local_system(&mut r, 3, 3, 2).unwrap();
        assert_eq!(l.rank(), 2);
    }

    #[test]
    fn random_maps_preserve_order() {
        let mut r = rng(5);
        for _ in 0..10 {
            let f = random_poset_map(&mut r, 8, 6, 0.3);
            assert_eq!(f.source().len(), 8);
        }
    }
}
