use serde::{Deserialize, Serialize};

use super::builders::{face_complex, functor_complex, order_complex};
use super::chain::{ChainComplex, DegreeGroup, HomologyOutcome};
use crate::budget::Budget;
use crate::error::Result;
use crate::linalg::AbelianGroup;
use crate::poset::{CoefficientFunctor, Entry, FinitePoset, SequencePoset};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub degree: i64,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl GroupEntry {
    pub fn group(&self) -> AbelianGroup {
        AbelianGroup { free_rank: self.free_rank, torsion: self.torsion.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Homology of one object through some degree. With `method == "snf"` the
/// groups are exact; with `"mod-p-screen"` each entry's `free_rank` is the
/// largest Betti number over the checked primes and `torsion` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub poset_id: String,
    pub coefficients: String,
    pub reduced: bool,
    pub groups: Vec<GroupEntry>,
    pub method: String,
    pub primes_checked: Vec<u64>,
}

pub const METHOD_SNF: &str = "snf";
pub const METHOD_SCREEN: &str = "mod-p-screen";

/// What to compute: degrees through `max_degree`, reduced or not, and the
/// primes to fall back on if exact reduction exceeds its budget (empty means
/// no fallback).
#[derive(Clone, Debug)]
pub struct HomologyRequest {
    pub max_degree: i64,
    pub reduced: bool,
    pub screen_primes: Vec<u64>,
}

impl HomologyRequest {
    pub fn reduced(max_degree: i64) -> Self {
        HomologyRequest { max_degree, reduced: true, screen_primes: Vec::new() }
    }

    pub fn unreduced(max_degree: i64) -> Self {
        HomologyRequest { max_degree, reduced: false, screen_primes: Vec::new() }
    }

    pub fn with_screen(mut self, primes: &[u64]) -> Self {
        self.screen_primes = primes.to_vec();
        self
    }
}

impl HomologyReport {
    pub fn is_exact(&self) -> bool {
        self.method == METHOD_SNF
    }

    pub fn degree(&self, k: i64) -> Option<&GroupEntry> {
        self.groups.iter().find(|g| g.degree == k)
    }

    pub fn group(&self, k: i64) -> Option<AbelianGroup> {
        self.degree(k).map(GroupEntry::group)
    }

    /// All reported groups in degrees `<= k` vanish.
    pub fn vanishes_through(&self, k: i64) -> bool {
        self.groups.iter().filter(|g| g.degree <= k).all(GroupEntry::is_zero)
    }

    /// Highest `k` (at most the computed range) such that every group in
    /// degrees `<= k` vanishes; `lowest - 1` if the lowest already fails.
    pub fn acyclic_through(&self) -> i64 {
        let mut last = self.groups.first().map_or(-2, |g| g.degree - 1);
        for g in &self.groups {
            if !g.is_zero() {
                break;
            }
            last = g.degree;
        }
        last
    }

    fn from_outcome(outcome: HomologyOutcome, id: &str, coefficients: &str, reduced: bool, primes: &[u64]) -> Self {
        match outcome {
            HomologyOutcome::Exact(groups) => HomologyReport {
                poset_id: id.to_string(),
                coefficients: coefficients.to_string(),
                reduced,
                groups: groups.into_iter().map(entry).collect(),
                method: METHOD_SNF.to_string(),
                primes_checked: Vec::new(),
            },
            HomologyOutcome::Screen(screens) => {
                let mut groups: Vec<GroupEntry> = Vec::new();
                for s in &screens {
                    for &(degree, b) in &s.betti {
                        match groups.iter_mut().find(|g| g.degree == degree) {
                            Some(g) => g.free_rank = g.free_rank.max(b),
                            None => groups.push(GroupEntry { degree, free_rank: b, torsion: Vec::new() }),
                        }
                    }
                }
                HomologyReport {
                    poset_id: id.to_string(),
                    coefficients: coefficients.to_string(),
                    reduced,
                    groups,
                    method: METHOD_SCREEN.to_string(),
                    primes_checked: primes.to_vec(),
                }
            }
        }
    }
}

fn entry(g: DegreeGroup) -> GroupEntry {
    GroupEntry { degree: g.degree, free_rank: g.group.free_rank, torsion: g.group.torsion }
}

fn run(complex: &ChainComplex, req: &HomologyRequest, budget: &Budget, id: &str, coeff: &str) -> Result<HomologyReport> {
    let outcome = complex.homology_or_screen(budget, &req.screen_primes)?;
    Ok(HomologyReport::from_outcome(outcome, id, coeff, req.reduced, &req.screen_primes))
}

/// Integer homology of the order complex of `poset`.
pub fn integer_homology(poset: &FinitePoset, id: &str, req: &HomologyRequest, budget: &Budget) -> Result<HomologyReport> {
    let (c, _) = order_complex(poset, req.max_degree, req.reduced, budget)?;
    run(&c, req, budget, id, "Z")
}

/// Integer homology of a sequence poset. Uses the face complex when the
/// chain condition holds and the order complex otherwise.
pub fn sequence_homology<T: Entry>(
    poset: &SequencePoset<T>,
    id: &str,
    req: &HomologyRequest,
    budget: &Budget,
) -> Result<HomologyReport> {
    if poset.check_chain_condition() {
        let c = face_complex(poset, req.max_degree, req.reduced, budget)?;
        run(&c, req, budget, id, "Z")
    } else {
        integer_homology(&poset.to_finite(), id, req, budget)
    }
}

/// Homology with coefficients in a functor (never reduced).
pub fn functor_homology(functor: &CoefficientFunctor, id: &str, max_degree: i64, budget: &Budget) -> Result<HomologyReport> {
    let (c, _) = functor_complex(functor, max_degree, budget)?;
    let req = HomologyRequest::unreduced(max_degree);
    run(&c, &req, budget, id, "functor")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_poset_conventions() {
        let e = FinitePoset::empty();
        let r = integer_homology(&e, "empty", &HomologyRequest::reduced(2), &Budget::default()).unwrap();
        assert_eq!(r.group(-1), Some(AbelianGroup::free(1)));
        assert!(r.groups.iter().filter(|g| g.degree >= 0).all(GroupEntry::is_zero));
        let u = integer_homology(&e, "empty", &HomologyRequest::unreduced(2), &Budget::default()).unwrap();
        assert!(u.vanishes_through(2));
    }

    #[test]
    fn triangle_boundary_is_circle() {
        let s = FinitePoset::simplex_boundary(2);
        let r = integer_homology(&s, "s1", &HomologyRequest::reduced(2), &Budget::default()).unwrap();
        assert!(r.group(0).unwrap().is_trivial());
        assert_eq!(r.group(1), Some(AbelianGroup::free(1)));
        assert!(r.group(2).unwrap().is_trivial());
        assert_eq!(r.acyclic_through(), 0);
    }

    #[test]
    fn report_json_shape() {
        let s = FinitePoset::chain(2);
        let r = integer_homology(&s, "c2", &HomologyRequest::reduced(0), &Budget::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["poset_id", "coefficients", "reduced", "groups", "method", "primes_checked"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
