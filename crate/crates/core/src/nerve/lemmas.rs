use std::sync::Arc;

use rayon::prelude::*;

use super::cover::PosetCover;
use super::incidence::sequence_component_labels;
use super::poset_nerve::{first_false, nerve_hypotheses};
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::homology::{
    induced_map, induced_maps_into, integer_homology, jointly_surjective, sequence_acyclic_through, HomologyRequest,
};
use crate::linalg::AbelianGroup;
use crate::poset::{Entry, PosetMap, SequencePoset};
use crate::verdict::{Outcome, Verdict};

pub const SURJ_CHECK: &str = "surj";
pub const MAAZEN5_CHECK: &str = "maazen5";
pub const MAAZEN1_CHECK: &str = "maazen1";

fn budgeted(check: &str, r: Result<Verdict>) -> Result<Verdict> {
    match r {
        Err(Error::BudgetExceeded(msg)) => Ok(Verdict::inconclusive(check, msg)),
        other => other,
    }
}

/// Verifies the hypotheses of the surjectivity theorem (pieces
/// `min(l-1, l-|v|+1)`-acyclic, `alpha_x` `(l-|x|+1)`-acyclic, `F`
/// `l`-acyclic), then checks that `X` is `(l-1)`-acyclic and that the
/// length-one pieces generate `H_l(X)`. Each entry of `cones` is an index
/// member `v` of length one with a `Y_v`; if every such `v` has one, and
/// each satisfies `X_v ⊆ Y_v ⊆ X` and is `l`-acyclic, `H_l(X) = 0` is
/// checked as well.
pub fn verify_surjectivity<V: Entry, T: Entry>(
    cover: &PosetCover<V, T>,
    cones: Option<&[(Vec<V>, Vec<Vec<T>>)]>,
    budget: &Budget,
) -> Result<Verdict> {
    budgeted(SURJ_CHECK, surj_body(cover, cones, budget))
}

fn surj_body<V: Entry, T: Entry>(
    cover: &PosetCover<V, T>,
    cones: Option<&[(Vec<V>, Vec<Vec<T>>)]>,
    budget: &Budget,
) -> Result<Verdict> {
    let l = cover.l();
    if let Some(why) = cover.structure_violation() {
        return Ok(Verdict::violation(SURJ_CHECK, why));
    }
    if let Some(why) = nerve_hypotheses(cover, |len| (l - 1).min(l - len as i64 + 1), budget)? {
        return Ok(Verdict::violation(SURJ_CHECK, why));
    }
    if !sequence_acyclic_through(cover.index(), l, budget)? {
        return Ok(Verdict::violation(SURJ_CHECK, format!("F is not {l}-acyclic")));
    }
    let singles: Vec<usize> = cover.index().length_range(1).collect();
    let mut cone_posets = Vec::new();
    if let Some(cones) = cones {
        for (v, members) in cones {
            let Some(vi) = cover.index().index_of(v).filter(|_| v.len() == 1) else {
                return invalid(format!("cone given for {v:?}, which is not a length-one member of F"));
            };
            let y = SequencePoset::new(cover.total().ground().to_vec(), members.clone())?;
            if let Some(&x) = cover.piece_indices(vi).iter().find(|&&x| !y.contains(cover.total().member(x as usize))) {
                return Ok(Verdict::violation(
                    SURJ_CHECK,
                    format!("Y_{v:?} misses {:?} of X_{v:?}", cover.total().member(x as usize)),
                ));
            }
            if let Some(m) = y.members().iter().find(|m| !cover.total().contains(m)) {
                return Ok(Verdict::violation(SURJ_CHECK, format!("Y_{v:?} contains {m:?} outside X")));
            }
            if !sequence_acyclic_through(&y, l, budget)? {
                return Ok(Verdict::violation(SURJ_CHECK, format!("Y_{v:?} is not {l}-acyclic")));
            }
            cone_posets.push(vi);
        }
    }
    let x = cover.total();
    if !sequence_acyclic_through(x, l - 1, budget)? {
        return Ok(Verdict::fail(SURJ_CHECK, format!("X is not {}-acyclic", l - 1)));
    }
    let mut v = Verdict::pass(SURJ_CHECK).note(format!("X is {}-acyclic", l - 1));
    if l < 0 {
        return Ok(v);
    }
    let onto = if l == 0 {
        let (labels, count) = sequence_component_labels(x);
        let mut hit = vec![false; count];
        for &s in &singles {
            for &xi in cover.piece_indices(s) {
                hit[labels[xi as usize] as usize] = true;
            }
        }
        hit.iter().all(|&h| h)
    } else {
        let xp = Arc::new(x.to_finite());
        let maps = singles
            .iter()
            .map(|&s| {
                let idx: Vec<usize> = cover.piece_indices(s).iter().map(|&i| i as usize).collect();
                PosetMap::inclusion(Arc::new(xp.induced(&idx)), xp.clone(), &idx)
            })
            .collect::<Result<Vec<_>>>()?;
        let induced = induced_maps_into(&maps, &xp, l, false, budget)?;
        jointly_surjective(&induced)?
    };
    if !onto {
        v.outcome = Outcome::Fail;
        return Ok(v.note(format!("the length-one pieces do not generate H_{l}(X)")));
    }
    v = v.note(format!("length-one pieces generate H_{l}(X)"));
    let all_coned = !singles.is_empty() && singles.iter().all(|s| cone_posets.contains(s));
    if all_coned {
        if sequence_acyclic_through(x, l, budget)? {
            v = v.note(format!("with the cones, X is {l}-acyclic"));
        } else {
            v.outcome = Outcome::Fail;
            v = v.note(format!("cones given but reduced H_{l}(X) is nonzero"));
        }
    }
    Ok(v)
}

/// Verifies that every `F_v` is `(n-|v|)`-acyclic, then checks that the
/// section `l_{s0}: F -> F<S>` induces isomorphisms on `H_k` for `k <= n`.
pub fn verify_maazen5<T: Entry, S: Entry>(f: &SequencePoset<T>, set: &[S], s0: &S, n: i64, budget: &Budget) -> Result<Verdict> {
    budgeted(MAAZEN5_CHECK, maazen5_body(f, set, s0, n, budget))
}

fn maazen5_body<T: Entry, S: Entry>(f: &SequencePoset<T>, set: &[S], s0: &S, n: i64, budget: &Budget) -> Result<Verdict> {
    if !set.contains(s0) {
        return invalid(format!("{s0:?} is not in S"));
    }
    if let Some((m, g)) = f.chain_condition_violation() {
        return Ok(Verdict::violation(MAAZEN5_CHECK, format!("F lacks {g:?} below {m:?}")));
    }
    let results: Vec<Result<bool>> = (0..f.len())
        .into_par_iter()
        .map(|i| sequence_acyclic_through(&f.sub_after(f.member(i)), n - f.member(i).len() as i64, budget))
        .collect();
    if let Some(i) = first_false(results)? {
        let v = f.member(i);
        return Ok(Verdict::violation(MAAZEN5_CHECK, format!("F_{v:?} is not {}-acyclic", n - v.len() as i64)));
    }
    let fs = f.tensor_with_set(set)?;
    budget.check_elements(fs.len() as u64, "F<S>")?;
    let section = fs.section_indices(f, s0)?;
    let map = PosetMap::new(Arc::new(f.to_finite()), Arc::new(fs.to_finite()), section)?;
    let mut v = Verdict::pass(MAAZEN5_CHECK).note(format!("|F| = {}, |F<S>| = {}", f.len(), fs.len()));
    for k in 0..=n {
        let m = induced_map(&map, k, false, budget)?;
        if !m.is_isomorphism()? {
            v.outcome = Outcome::Fail;
            return Ok(v.note(format!("degree {k}: {} -> {} is not an isomorphism", m.source, m.target)));
        }
        v = v.note(format!("degree {k}: H_k = {}", m.source));
    }
    Ok(v)
}

/// Checks that the lower link of every member `v` of a chain-condition
/// sequence poset has the reduced homology of `S^{|v|-2}`.
pub fn verify_link_spheres<T: Entry>(f: &SequencePoset<T>, budget: &Budget) -> Result<Verdict> {
    budgeted(MAAZEN1_CHECK, link_body(f, budget))
}

fn link_body<T: Entry>(f: &SequencePoset<T>, budget: &Budget) -> Result<Verdict> {
    if let Some((m, g)) = f.chain_condition_violation() {
        return Ok(Verdict::violation(MAAZEN1_CHECK, format!("F lacks {g:?} below {m:?}")));
    }
    let fp = f.to_finite();
    let results: Vec<Result<bool>> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let len = f.member(i).len() as i64;
            let below: Vec<usize> = fp.below(i).iter().map(|&b| b as usize).collect();
            let r = integer_homology(&fp.induced(&below), "", &HomologyRequest::reduced(len - 1), budget)?;
            Ok((-1..len).all(|k| {
                let expected = if k == len - 2 { AbelianGroup::free(1) } else { AbelianGroup::default() };
                r.group(k).unwrap_or_default() == expected
            }))
        })
        .collect();
    match first_false(results)? {
        Some(i) => Ok(Verdict::fail(MAAZEN1_CHECK, format!("link of {:?} is not a homology sphere", f.member(i)))),
        None => {
            let mut v = Verdict::pass(MAAZEN1_CHECK);
            for (k, c) in f.count_by_length().iter().enumerate() {
                v = v.note(format!("{c} members of length {}: links are S^{}", k + 1, k as i64 - 1));
            }
            Ok(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs_cover(l: i64) -> PosetCover<u32, u32> {
        // hexagon as a sequence poset: vertices [i] and edges [i, i+1]
        let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]]).unwrap();
        let arc = |a: u32| -> Vec<Vec<u32>> {
            let mut m: Vec<Vec<u32>> = (a..a + 4).map(|i| vec![i % 6]).collect();
            m.extend((a..a + 3).map(|i| vec![i % 6, (i + 1) % 6]));
            m
        };
        let (a, b) = (arc(0), arc(3));
        let common: Vec<Vec<u32>> = a.iter().filter(|m| b.contains(m)).cloned().collect();
        PosetCover::new(f, vec![a, b, common], l).unwrap()
    }

    #[test]
    fn single_piece_is_trivially_surjective() {
        let f = SequencePoset::new(vec![1], vec![vec![1]]).unwrap();
        let x: Vec<Vec<u32>> = (0..6).map(|i| vec![i, (i + 1) % 6]).chain((0..6).map(|i| vec![i])).collect();
        let c = PosetCover::new(f, vec![x], 1).unwrap();
        let v = verify_surjectivity(&c, None, &Budget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Pass, "{v:?}");
    }

    #[test]
    fn circle_by_two_arcs_at_l1_violates() {
        let v = verify_surjectivity(&arcs_cover(1), None, &Budget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::HypothesisViolation, "{v:?}");
        let v0 = verify_surjectivity(&arcs_cover(0), None, &Budget::default()).unwrap();
        assert_eq!(v0.outcome, Outcome::Pass, "{v0:?}");
    }

    #[test]
    fn cones_must_contain_their_piece() {
        let c = arcs_cover(0);
        let bad = vec![(vec![1u32], vec![vec![0u32]])];
        let v = verify_surjectivity(&c, Some(&bad), &Budget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::HypothesisViolation);
    }

    #[test]
    fn maazen5_small_cases() {
        // closure of one 2-frame: F_(1) is empty, so even n = 0 fails
        let frame = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]]).unwrap();
        let v = verify_maazen5(&frame, &['a', 'b'], &'a', 0, &Budget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::HypothesisViolation);
        let o2 = SequencePoset::full(vec![1, 2], 2);
        assert!(verify_maazen5(&o2, &['a', 'b', 'c'], &'b', 0, &Budget::default()).unwrap().is_pass());
        assert!(verify_maazen5(&o2, &['a'], &'a', 0, &Budget::default()).unwrap().is_pass());
        let o3 = SequencePoset::full(vec![1, 2, 3], 3);
        let v = verify_maazen5(&o3, &[0u8, 1], &1, 1, &Budget::default()).unwrap();
        assert!(v.is_pass(), "{v:?}");
        // two points: F_v empty for a length-one v, so n = 1 violates
        let pts = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2]]).unwrap();
        let v = verify_maazen5(&pts, &[0u8, 1], &0, 1, &Budget::default()).unwrap();
        assert_eq!(v.outcome, Outcome::HypothesisViolation);
        assert!(verify_maazen5(&pts, &[0u8], &1, 0, &Budget::default()).is_err());
    }

    #[test]
    fn links_of_full_sequence_poset() {
        let f = SequencePoset::full(vec![1, 2, 3, 4], 4);
        assert!(verify_link_spheres(&f, &Budget::default()).unwrap().is_pass());
        let broken = SequencePoset::new(vec![1, 2], vec![vec![1], vec![1, 2]]).unwrap();
        assert_eq!(verify_link_spheres(&broken, &Budget::default()).unwrap().outcome, Outcome::HypothesisViolation);
    }
}
