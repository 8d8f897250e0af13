use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::cover::PosetCover;
use super::incidence::{sequence_component_labels, IncidencePoset};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::homology::{induced_map, integer_homology, sequence_acyclic_through, sequence_homology, HomologyRequest};
use crate::linalg::AbelianGroup;
use crate::poset::{Entry, SequencePoset};
use crate::verdict::{Outcome, Verdict};

pub const NERVE_CHECK: &str = "p-n-t";

#[derive(Clone, Debug, Serialize)]
pub struct NerveReport {
    pub verdict: Verdict,
    pub l: i64,
    pub index_size: usize,
    pub total_size: usize,
    pub incidence_size: usize,
    /// `H_k(F)` and `H_k(X)` for `0 <= k <= l` (empty unless both were computed)
    pub index_groups: Vec<AbelianGroup>,
    pub total_groups: Vec<AbelianGroup>,
}

/// Unreduced `H_0..H_l` of a chain-condition sequence poset.
pub(crate) fn groups_through<T: Entry>(p: &SequencePoset<T>, l: i64, budget: &Budget) -> Result<Vec<AbelianGroup>> {
    if l < 0 {
        return Ok(Vec::new());
    }
    if l == 0 {
        return Ok(vec![AbelianGroup::free(sequence_component_labels(p).1)]);
    }
    let r = sequence_homology(p, "", &HomologyRequest::unreduced(l), budget)?;
    Ok((0..=l).map(|k| r.group(k).unwrap_or_default()).collect())
}

/// Index of the first `false`, in order; errors propagate in order too.
pub(crate) fn first_false(results: Vec<Result<bool>>) -> Result<Option<usize>> {
    for (i, r) in results.into_iter().enumerate() {
        if !r? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn show(groups: &[AbelianGroup]) -> String {
    groups.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Checks the hypotheses that every `X_v` is `(l-|v|+1)`-acyclic and every
/// `alpha_x` is `(l-|x|+1)`-acyclic; `None` if both hold.
pub(crate) fn nerve_hypotheses<V: Entry, T: Entry>(
    cover: &PosetCover<V, T>,
    piece_target: impl Fn(usize) -> i64 + Sync,
    budget: &Budget,
) -> Result<Option<String>> {
    let l = cover.l();
    let f = cover.index();
    let results: Vec<Result<bool>> = (0..f.len())
        .into_par_iter()
        .map(|v| sequence_acyclic_through(&cover.piece(v), piece_target(f.member(v).len()), budget))
        .collect();
    if let Some(v) = first_false(results)? {
        return Ok(Some(format!(
            "X_{:?} is not {}-acyclic",
            f.member(v),
            piece_target(f.member(v).len())
        )));
    }
    let alpha = cover.alpha_indices();
    let x = cover.total();
    let results: Vec<Result<bool>> = (0..x.len())
        .into_par_iter()
        .map(|i| sequence_acyclic_through(&cover.alpha_sequences(&alpha[i]), l - x.member(i).len() as i64 + 1, budget))
        .collect();
    if let Some(i) = first_false(results)? {
        return Ok(Some(format!(
            "alpha_{:?} is not {}-acyclic",
            x.member(i),
            l - x.member(i).len() as i64 + 1
        )));
    }
    Ok(None)
}

/// Verifies the hypotheses of the poset nerve theorem for `cover`, then
/// checks `H_k(F) = H_k(X)` for `k <= l` and that the projections out of the
/// incidence poset have fibers with the homology of the pieces and of the
/// `alpha_x`, and induce isomorphisms through degree `l`.
pub fn verify_poset_nerve<V: Entry, T: Entry>(cover: &PosetCover<V, T>, budget: &Budget) -> Result<NerveReport> {
    let mut report = NerveReport {
        verdict: Verdict::pass(NERVE_CHECK),
        l: cover.l(),
        index_size: cover.index().len(),
        total_size: cover.total().len(),
        incidence_size: cover.incidence_count(),
        index_groups: Vec::new(),
        total_groups: Vec::new(),
    };
    match nerve_body(cover, budget, &mut report) {
        Ok(v) => report.verdict = v,
        Err(Error::BudgetExceeded(msg)) => report.verdict = Verdict::inconclusive(NERVE_CHECK, msg),
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn nerve_body<V: Entry, T: Entry>(cover: &PosetCover<V, T>, budget: &Budget, report: &mut NerveReport) -> Result<Verdict> {
    let l = cover.l();
    if let Some(why) = cover.structure_violation() {
        return Ok(Verdict::violation(NERVE_CHECK, why));
    }
    if let Some(why) = nerve_hypotheses(cover, |len| l - len as i64 + 1, budget)? {
        return Ok(Verdict::violation(NERVE_CHECK, why));
    }
    let hf = groups_through(cover.index(), l, budget)?;
    let hx = groups_through(cover.total(), l, budget)?;
    report.index_groups = hf.clone();
    report.total_groups = hx.clone();
    let mut v = Verdict::pass(NERVE_CHECK).note(format!("H(F) = [{}]", show(&hf))).note(format!("H(X) = [{}]", show(&hx)));
    if hf != hx {
        v.outcome = Outcome::Fail;
        v = v.note("homology of F and X differ");
        return Ok(v);
    }
    if l < 0 {
        return Ok(v.note("l < 0: nothing beyond the hypotheses to compare"));
    }
    let z = IncidencePoset::new(cover, budget)?;
    let z_check = if l == 0 { incidence_degree_zero(cover, &z)? } else { incidence_exact(cover, &z, budget)? };
    match z_check {
        None => Ok(v.note(format!("incidence poset Z has {} elements; fibers and projections agree", z.len()))),
        Some(why) => {
            v.outcome = Outcome::Fail;
            Ok(v.note(why))
        }
    }
}

fn incidence_degree_zero<V: Entry, T: Entry>(cover: &PosetCover<V, T>, z: &IncidencePoset) -> Result<Option<String>> {
    let f = cover.index();
    let bad = (0..f.len()).into_par_iter().find_first(|&v| {
        z.subset_components(&z.fiber_over_index(v)) != sequence_component_labels(&cover.piece(v)).1
    });
    if let Some(v) = bad {
        return Ok(Some(format!("fiber of f over {:?} has different H_0 from its piece", f.member(v))));
    }
    let alpha = cover.alpha_indices();
    let x = cover.total();
    let bad = (0..x.len()).into_par_iter().find_first(|&i| {
        z.subset_components(&z.fiber_over_total(i)) != sequence_component_labels(&cover.alpha_sequences(&alpha[i])).1
    });
    if let Some(i) = bad {
        return Ok(Some(format!("fiber of g over {:?} has different H_0 from alpha", x.member(i))));
    }
    let (zl, zc) = z.component_labels();
    let (fl, fc) = sequence_component_labels(f);
    let (xl, xc) = sequence_component_labels(x);
    for (name, labels, count, proj) in [("f", &fl, fc, 1usize), ("g", &xl, xc, 0usize)] {
        let mut image = vec![u32::MAX; zc];
        let mut hit = vec![false; count];
        for e in 0..z.len() {
            let (xi, vi) = z.pair(e);
            let t = labels[if proj == 1 { vi } else { xi }];
            let c = zl[e] as usize;
            if image[c] == u32::MAX {
                if hit[t as usize] {
                    return Ok(Some(format!("{name}_* is not injective on H_0")));
                }
                image[c] = t;
                hit[t as usize] = true;
            }
        }
        if zc != count {
            return Ok(Some(format!("{name}_* is not bijective on H_0")));
        }
    }
    Ok(None)
}

fn incidence_exact<V: Entry, T: Entry>(
    cover: &PosetCover<V, T>,
    z: &IncidencePoset,
    budget: &Budget,
) -> Result<Option<String>> {
    let l = cover.l();
    let zp = Arc::new(z.to_finite());
    let fp = Arc::new(cover.index().to_finite());
    let xp = Arc::new(cover.total().to_finite());
    let req = HomologyRequest::unreduced(l);
    let fiber_groups = |elems: &[u32]| -> Result<Vec<AbelianGroup>> {
        let idx: Vec<usize> = elems.iter().map(|&e| e as usize).collect();
        let r = integer_homology(&zp.induced(&idx), "", &req, budget)?;
        Ok((0..=l).map(|k| r.group(k).unwrap_or_default()).collect())
    };
    for v in 0..cover.index().len() {
        if fiber_groups(&z.fiber_over_index(v))? != groups_through(&cover.piece(v), l, budget)? {
            return Ok(Some(format!("fiber of f over {:?} differs from its piece", cover.index().member(v))));
        }
    }
    let alpha = cover.alpha_indices();
    for i in 0..cover.total().len() {
        if fiber_groups(&z.fiber_over_total(i))? != groups_through(&cover.alpha_sequences(&alpha[i]), l, budget)? {
            return Ok(Some(format!("fiber of g over {:?} differs from alpha", cover.total().member(i))));
        }
    }
    let (f, g) = z.projections(zp, fp, xp)?;
    for k in 0..=l {
        for (name, m) in [("f", &f), ("g", &g)] {
            if !induced_map(m, k, false, budget)?.is_isomorphism()? {
                return Ok(Some(format!("{name}_* is not an isomorphism in degree {k}")));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone_cover() -> PosetCover<u32, u32> {
        // F a single 1-frame, X = X_v the full O({1,2,3})_{<=2}
        let f = SequencePoset::new(vec![1], vec![vec![1]]).unwrap();
        let x = SequencePoset::full(vec![1, 2, 3], 3);
        PosetCover::new(f, vec![x.members().to_vec()], 1).unwrap()
    }

    #[test]
    fn single_piece_cover_passes() {
        let r = verify_poset_nerve(&cone_cover(), &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Pass, "{:?}", r.verdict);
        assert_eq!(r.index_groups, vec![AbelianGroup::free(1), AbelianGroup::default()]);
    }

    #[test]
    fn disconnected_piece_is_a_violation() {
        let f = SequencePoset::new(vec![1], vec![vec![1]]).unwrap();
        let c = PosetCover::new(f, vec![vec![vec![10], vec![11]]], 0).unwrap();
        let r = verify_poset_nerve(&c, &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::HypothesisViolation);
    }

    #[test]
    fn two_pieces_glued_along_a_point() {
        // F = {1, 2, 12}; X_1, X_2 edges sharing vertex 0, X_12 = the vertex
        let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]]).unwrap();
        let pieces = vec![
            vec![vec![0], vec![1], vec![0, 1]],
            vec![vec![0], vec![2], vec![0, 2]],
            vec![vec![0]],
        ];
        for l in 0..=1 {
            let c = PosetCover::new(f.clone(), pieces.clone(), l).unwrap();
            let r = verify_poset_nerve(&c, &Budget::default()).unwrap();
            assert_eq!(r.verdict.outcome, Outcome::Pass, "l={l}: {:?}", r.verdict);
        }
    }

    #[test]
    fn over_budget_is_inconclusive() {
        let b = Budget { elements: 1, ..Budget::default() };
        let r = verify_poset_nerve(&cone_cover().with_target(0), &b).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Inconclusive);
    }
}
