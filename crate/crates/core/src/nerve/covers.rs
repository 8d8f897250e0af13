use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cover::PosetCover;
use super::poset_nerve::nerve_hypotheses;
use crate::budget::Budget;
use crate::error::Result;
use crate::poset::{Entry, SequencePoset};
use crate::ring::rows_unimodular;
use crate::symplectic::{enumerate_hyperbolic, enumerate_isotropic, enumerate_unimodular, Pair, SymplecticSpace};

fn length_for(l: i64) -> usize {
    (l + 2).max(1) as usize
}

/// `F = U(R^{2n})`, `X_v = IU(R^{2n}) ∩ U(R^{2n})_v ∩ O(<v>^perp)`, both
/// truncated to length `l + 2` (enough for every degree `<= l`).
pub fn bw1_cover(space: &SymplecticSpace, l: i64, budget: &Budget) -> Result<PosetCover<u32, u32>> {
    let len = length_for(l);
    let ring = space.ring();
    let f = enumerate_unimodular(ring, space.dim(), len, None, budget)?;
    let iu = enumerate_isotropic(space, len, budget)?;
    let count = space.vector_count().unwrap_or(0) as u32;
    let vectors: Vec<Vec<u64>> = (0..count).map(|c| space.decode(c)).collect();
    let pieces = f
        .members()
        .par_iter()
        .map(|v| {
            let vrows: Vec<Vec<u64>> = v.iter().map(|&c| vectors[c as usize].clone()).collect();
            let perp: Vec<bool> =
                vectors.iter().map(|x| vrows.iter().all(|vj| space.form_unchecked(x, vj) == 0)).collect();
            iu.members()
                .iter()
                .filter(|w| w.iter().all(|&c| perp[c as usize]))
                .filter(|w| {
                    let mut rows: Vec<Vec<u64>> = w.iter().map(|&c| vectors[c as usize].clone()).collect();
                    rows.extend(vrows.iter().cloned());
                    rows_unimodular(ring, &rows)
                })
                .cloned()
                .collect()
        })
        .collect();
    budget.check_time()?;
    PosetCover::new(f, pieces, l)
}

/// `F = IU(R^{2n})`, `X_v = HU(R^{2n}) ∩ MU(R^{2n})_v`, truncated to length
/// `l + 2`.
pub fn bw2_cover(space: &SymplecticSpace, l: i64, budget: &Budget) -> Result<PosetCover<u32, Pair>> {
    let len = length_for(l);
    let ring = space.ring();
    let f = enumerate_isotropic(space, len, budget)?;
    let hu = enumerate_hyperbolic(space, len, budget)?;
    let count = space.vector_count().unwrap_or(0) as u32;
    let vectors: Vec<Vec<u64>> = (0..count).map(|c| space.decode(c)).collect();
    let pieces = f
        .members()
        .par_iter()
        .map(|v| {
            let vrows: Vec<Vec<u64>> = v.iter().map(|&c| vectors[c as usize].clone()).collect();
            let perp: Vec<bool> =
                vectors.iter().map(|x| vrows.iter().all(|vj| space.form_unchecked(x, vj) == 0)).collect();
            hu.members()
                .iter()
                .filter(|x| x.iter().all(|&(a, b)| perp[a as usize] && perp[b as usize]))
                .filter(|x| {
                    let mut rows: Vec<Vec<u64>> = x.iter().map(|&(a, _)| vectors[a as usize].clone()).collect();
                    rows.extend(vrows.iter().cloned());
                    rows_unimodular(ring, &rows)
                })
                .cloned()
                .collect()
        })
        .collect();
    budget.check_time()?;
    PosetCover::new(f, pieces, l)
}

/// First member of `frames` of length at most `max_len` missing from `X`.
pub fn first_uncovered<V: Entry, T: Entry>(cover: &PosetCover<V, T>, frames: &SequencePoset<T>, max_len: usize) -> Option<Vec<T>> {
    frames.members().iter().find(|m| m.len() <= max_len && !cover.total().contains(m)).cloned()
}

/// Restrictions of `cover` to `F ∩ O(W)` for random subsets `W` of the index
/// ground set, keeping those that satisfy the nerve hypotheses. Stops after
/// `count` valid covers or `attempts` tries.
pub fn random_restrictions<V: Entry, T: Entry>(
    cover: &PosetCover<V, T>,
    count: usize,
    attempts: usize,
    seed: u64,
    budget: &Budget,
) -> Result<Vec<PosetCover<V, T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..attempts {
        if out.len() >= count {
            break;
        }
        let p: f64 = rng.gen_range(0.5..0.95);
        let keep: Vec<V> = cover.index().ground().iter().filter(|_| rng.gen_bool(p)).cloned().collect();
        let candidate = cover.restrict_index(|m| m.iter().all(|x| keep.binary_search(x).is_ok()))?;
        if candidate.index().is_empty() || candidate.structure_violation().is_some() {
            continue;
        }
        if nerve_hypotheses(&candidate, |len| cover.l() - len as i64 + 1, budget)?.is_none() {
            out.push(candidate);
        }
    }
    Ok(out)
}
