//! Enumeration of the frame posets `U`, `IU`, `HU`, `MU` and `U'`.

use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::SymplecticSpace;
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::homology::{sequence_homology, HomologyReport, HomologyRequest};
use crate::poset::{Entry, FinitePoset, SequencePoset};
use crate::ring::{rows_unimodular, unimodular_coords, ModulusRing};

/// A pair of vector codes `(x, y)`.
pub type Pair = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    U,
    IU,
    HU,
    MU,
    #[serde(rename = "Uprime")]
    UPrime,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(Family::U),
            "IU" => Ok(Family::IU),
            "HU" => Ok(Family::HU),
            "MU" => Ok(Family::MU),
            "Uprime" | "U'" | "Uprime'" => Ok(Family::UPrime),
            other => invalid(format!("unknown family {other:?}; expected U, IU, HU, MU or Uprime")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::U => "U",
            Family::IU => "IU",
            Family::HU => "HU",
            Family::MU => "MU",
            Family::UPrime => "Uprime",
        })
    }
}

/// An enumerated frame poset: sequences of vectors or of vector pairs.
#[derive(Clone, Debug, PartialEq)]
pub enum FramePoset {
    Single(SequencePoset<u32>),
    Paired(SequencePoset<Pair>),
}

impl FramePoset {
    pub fn len(&self) -> usize {
        match self {
            FramePoset::Single(p) => p.len(),
            FramePoset::Paired(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `counts[k]` is the number of members of length `k + 1`.
    pub fn count_by_length(&self) -> Vec<usize> {
        match self {
            FramePoset::Single(p) => p.count_by_length(),
            FramePoset::Paired(p) => p.count_by_length(),
        }
    }

    pub fn check_chain_condition(&self) -> bool {
        match self {
            FramePoset::Single(p) => p.check_chain_condition(),
            FramePoset::Paired(p) => p.check_chain_condition(),
        }
    }

    pub fn homology(&self, id: &str, req: &HomologyRequest, budget: &Budget) -> Result<HomologyReport> {
        match self {
            FramePoset::Single(p) => sequence_homology(p, id, req, budget),
            FramePoset::Paired(p) => sequence_homology(p, id, req, budget),
        }
    }

    /// Finite poset labelled by coordinate tuples.
    pub fn to_finite(&self, ring: &ModulusRing, dim: usize) -> FinitePoset {
        let v = |c: u32| -> String {
            let coords = ring.decode(c as u64, dim);
            let parts: Vec<String> = coords.iter().map(u64::to_string).collect();
            format!("({})", parts.join(","))
        };
        match self {
            FramePoset::Single(p) => p.to_finite_with(|s| s.iter().map(|&c| v(c)).collect::<Vec<_>>().join("")),
            FramePoset::Paired(p) => p.to_finite_with(|s| {
                s.iter().map(|&(x, y)| format!("[{}{}]", v(x), v(y))).collect::<Vec<_>>().join("")
            }),
        }
    }
}

/// Depth-first extension of valid prefixes. `accept(prefix, c)` decides
/// whether `prefix + c` is a member, given that `prefix` is one.
fn extend_all<T, A>(candidates: &[T], max_len: usize, what: &str, budget: &Budget, accept: A) -> Result<Vec<Vec<T>>>
where
    T: Entry + Copy,
    A: Fn(&[T], T) -> bool + Sync,
{
    let count = AtomicU64::new(0);
    let over = AtomicBool::new(false);
    let limit = budget.elements;
    fn rec<T: Copy + PartialEq, A: Fn(&[T], T) -> bool>(
        prefix: &mut Vec<T>,
        candidates: &[T],
        max_len: usize,
        accept: &A,
        out: &mut Vec<Vec<T>>,
        count: &AtomicU64,
        over: &AtomicBool,
        limit: u64,
    ) {
        if prefix.len() >= max_len || over.load(Ordering::Relaxed) {
            return;
        }
        for &c in candidates {
            if prefix.contains(&c) || !accept(prefix, c) {
                continue;
            }
            if count.fetch_add(1, Ordering::Relaxed) + 1 > limit {
                over.store(true, Ordering::Relaxed);
                return;
            }
            prefix.push(c);
            out.push(prefix.clone());
            rec(prefix, candidates, max_len, accept, out, count, over, limit);
            prefix.pop();
        }
    }
    if max_len == 0 {
        return Ok(Vec::new());
    }
    let parts: Vec<Vec<Vec<T>>> = candidates
        .par_iter()
        .map(|&c| {
            let mut out = Vec::new();
            if !accept(&[], c) {
                return out;
            }
            if count.fetch_add(1, Ordering::Relaxed) + 1 > limit {
                over.store(true, Ordering::Relaxed);
                return out;
            }
            let mut prefix = vec![c];
            out.push(prefix.clone());
            rec(&mut prefix, candidates, max_len, &accept, &mut out, &count, &over, limit);
            out
        })
        .collect();
    if over.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded(format!("{what}: more than {limit} members")));
    }
    budget.check_time()?;
    Ok(parts.into_iter().flatten().collect())
}

struct Vectors {
    coords: Vec<Vec<u64>>,
}

impl Vectors {
    fn new(ring: &ModulusRing, dim: usize, budget: &Budget) -> Result<Self> {
        let total = ring.count(dim).filter(|&t| t <= u32::MAX as u64).ok_or(Error::Overflow("vector count"))?;
        budget.check_elements(total, "vectors")?;
        Ok(Vectors { coords: (0..total).map(|c| ring.decode(c, dim)).collect() })
    }

    fn get(&self, c: u32) -> &[u64] {
        &self.coords[c as usize]
    }

    fn unimodular_codes(&self, modulus: u64) -> Vec<u32> {
        (0..self.coords.len() as u32).filter(|&c| unimodular_coords(self.get(c), modulus)).collect()
    }

    fn rows(&self, codes: impl Iterator<Item = u32>) -> Vec<Vec<u64>> {
        codes.map(|c| self.get(c).to_vec()).collect()
    }
}

/// `U(R^dim)`, optionally intersected with `O(R^ambient)` (vectors supported
/// on the first `ambient` coordinates), up to length `max_len`.
pub fn enumerate_unimodular(
    ring: &ModulusRing,
    dim: usize,
    max_len: usize,
    ambient: Option<usize>,
    budget: &Budget,
) -> Result<SequencePoset<u32>> {
    let a = ambient.unwrap_or(dim);
    if a == 0 || a > dim {
        return invalid(format!("ambient dimension must be in 1..={dim}"));
    }
    let vs = Vectors::new(ring, dim, budget)?;
    let candidates: Vec<u32> = vs
        .unimodular_codes(ring.modulus())
        .into_iter()
        .filter(|&c| vs.get(c)[a..].iter().all(|&x| x == 0))
        .collect();
    let members = extend_all(&candidates, max_len, "U", budget, |prefix, c| {
        let rows = vs.rows(prefix.iter().copied().chain([c]));
        rows_unimodular(ring, &rows)
    })?;
    Ok(SequencePoset::from_sorted_unchecked(candidates, members))
}

/// `IU(R^{2n})`: bases of isotropic direct summands.
pub fn enumerate_isotropic(space: &SymplecticSpace, max_len: usize, budget: &Budget) -> Result<SequencePoset<u32>> {
    let ring = space.ring();
    let vs = Vectors::new(ring, space.dim(), budget)?;
    let candidates = vs.unimodular_codes(ring.modulus());
    let members = extend_all(&candidates, max_len, "IU", budget, |prefix, c| {
        prefix.iter().all(|&p| space.form_unchecked(vs.get(p), vs.get(c)) == 0)
            && rows_unimodular(ring, &vs.rows(prefix.iter().copied().chain([c])))
    })?;
    Ok(SequencePoset::from_sorted_unchecked(candidates, members))
}

/// `U(R^{2n})_v ∩ O(<v>^perp)`: sequences `w` of vectors orthogonal to every
/// `v_j` with `wv` unimodular; with `isotropic`, intersected with `IU`.
pub fn enumerate_relative(
    space: &SymplecticSpace,
    v: &[Vec<u64>],
    max_len: usize,
    isotropic: bool,
    budget: &Budget,
) -> Result<SequencePoset<u32>> {
    let ring = space.ring();
    if !space.is_frame(v, super::FrameMode::Unimodular) {
        return invalid("v must be a unimodular frame");
    }
    let vs = Vectors::new(ring, space.dim(), budget)?;
    let candidates: Vec<u32> = (0..vs.coords.len() as u32)
        .filter(|&c| v.iter().all(|vj| space.form_unchecked(vs.get(c), vj) == 0))
        .collect();
    let members = extend_all(&candidates, max_len, "relative frames", budget, |prefix, c| {
        if isotropic && !prefix.iter().all(|&p| space.form_unchecked(vs.get(p), vs.get(c)) == 0) {
            return false;
        }
        let mut rows = vs.rows(prefix.iter().copied().chain([c]));
        rows.extend(v.iter().cloned());
        rows_unimodular(ring, &rows)
    })?;
    Ok(SequencePoset::from_sorted_unchecked(candidates, members))
}

/// `HU(R^{2n})`: sequences of pairs with `x`, `y` isotropic frames and
/// `h(x_i, y_j) = delta_{ij}`.
pub fn enumerate_hyperbolic(space: &SymplecticSpace, max_len: usize, budget: &Budget) -> Result<SequencePoset<Pair>> {
    let ring = space.ring();
    let vs = Vectors::new(ring, space.dim(), budget)?;
    let n = vs.coords.len() as u32;
    let h = |a: u32, b: u32| space.form_unchecked(vs.get(a), vs.get(b));
    let candidates: Vec<Pair> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| h(x, y) == 1).collect();
    budget.check_elements(candidates.len() as u64, "hyperbolic pairs")?;
    let members = extend_all(&candidates, max_len, "HU", budget, |prefix, (x, y)| {
        prefix.iter().all(|&(xi, yi)| h(xi, y) == 0 && h(x, yi) == 0 && h(xi, x) == 0 && h(yi, y) == 0)
            && rows_unimodular(ring, &vs.rows(prefix.iter().map(|p| p.0).chain([x])))
            && rows_unimodular(ring, &vs.rows(prefix.iter().map(|p| p.1).chain([y])))
    })?;
    let ground = candidates;
    Ok(SequencePoset::from_sorted_unchecked(ground, members))
}

/// `MU(R^{2n})`: `x` an isotropic frame, each `y_i` zero or with
/// `h(x_j, y_i) = delta_{ji}`, and `<y_1, ..., y_k>` isotropic.
pub fn enumerate_mixed(space: &SymplecticSpace, max_len: usize, budget: &Budget) -> Result<SequencePoset<Pair>> {
    let ring = space.ring();
    let vs = Vectors::new(ring, space.dim(), budget)?;
    let n = vs.coords.len() as u32;
    let h = |a: u32, b: u32| space.form_unchecked(vs.get(a), vs.get(b));
    let zero = 0u32;
    let xs = vs.unimodular_codes(ring.modulus());
    let candidates: Vec<Pair> =
        xs.iter().flat_map(|&x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| y == zero || h(x, y) == 1).collect();
    budget.check_elements(candidates.len() as u64, "mixed pairs")?;
    let members = extend_all(&candidates, max_len, "MU", budget, |prefix, (x, y)| {
        prefix.iter().all(|&(xi, yi)| {
            h(xi, x) == 0 && (y == zero || h(xi, y) == 0) && (yi == zero || h(x, yi) == 0) && h(yi, y) == 0
        }) && rows_unimodular(ring, &vs.rows(prefix.iter().map(|p| p.0).chain([x])))
    })?;
    Ok(SequencePoset::from_sorted_unchecked(candidates, members))
}

/// `U'(R^{2n}) = U(R^{2n}) cap O(T)` with `T = {x : h'(x, x) = 0}` and
/// `h'(x, y) = sum_i (x_{2i-1} y_{2i} + y_{2i-1} x_{2i})`.
pub fn enumerate_u_prime(space: &SymplecticSpace, max_len: usize, budget: &Budget) -> Result<SequencePoset<u32>> {
    let ring = space.ring();
    let full = enumerate_unimodular(ring, space.dim(), 1, None, budget)?;
    let t: Vec<u32> = full
        .ground()
        .iter()
        .copied()
        .filter(|&c| {
            let x = space.decode(c);
            let q = (0..space.n()).fold(0, |acc, i| ring.add(acc, ring.mul(x[2 * i], x[2 * i + 1])));
            ring.add(q, q) == 0
        })
        .collect();
    let vs = Vectors::new(ring, space.dim(), budget)?;
    let members = extend_all(&t, max_len, "U'", budget, |prefix, c| {
        rows_unimodular(ring, &vs.rows(prefix.iter().copied().chain([c])))
    })?;
    Ok(SequencePoset::from_sorted_unchecked(t, members))
}

/// Dispatch by family. `dim` is the module rank (`2n` for the symplectic
/// families).
pub fn enumerate_poset(
    ring: &ModulusRing,
    dim: usize,
    family: Family,
    max_len: usize,
    ambient: Option<usize>,
    budget: &Budget,
) -> Result<FramePoset> {
    if family == Family::U {
        return Ok(FramePoset::Single(enumerate_unimodular(ring, dim, max_len, ambient, budget)?));
    }
    if dim % 2 != 0 || dim == 0 {
        return invalid(format!("family {family} needs an even positive dimension, got {dim}"));
    }
    let mut poset = match family {
        Family::U => unreachable!(),
        Family::IU => FramePoset::Single(enumerate_isotropic(&SymplecticSpace::new(ring.clone(), dim / 2)?, max_len, budget)?),
        Family::HU => FramePoset::Paired(enumerate_hyperbolic(&SymplecticSpace::new(ring.clone(), dim / 2)?, max_len, budget)?),
        Family::MU => FramePoset::Paired(enumerate_mixed(&SymplecticSpace::new(ring.clone(), dim / 2)?, max_len, budget)?),
        Family::UPrime => FramePoset::Single(enumerate_u_prime(&SymplecticSpace::new(ring.clone(), dim / 2)?, max_len, budget)?),
    };
    if let Some(a) = ambient {
        if a == 0 || a > dim {
            return invalid(format!("ambient dimension must be in 1..={dim}"));
        }
        let inside = |c: u32| ring.decode(c as u64, dim)[a..].iter().all(|&x| x == 0);
        poset = match poset {
            FramePoset::Single(p) => FramePoset::Single(p.filter(|s| s.iter().all(|&c| inside(c)))),
            FramePoset::Paired(p) => FramePoset::Paired(p.filter(|s| s.iter().all(|&(x, y)| inside(x) && inside(y)))),
        };
    }
    Ok(poset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64) -> ModulusRing {
        ModulusRing::new(m).unwrap()
    }

    #[test]
    fn isotropic_counts_over_z2() {
        let s = SymplecticSpace::new(z(2), 2).unwrap();
        let iu = enumerate_isotropic(&s, 4, &Budget::default()).unwrap();
        assert_eq!(iu.count_by_length(), vec![15, 90]);
        assert!(iu.check_chain_condition());
        let hu = enumerate_hyperbolic(&s, 1, &Budget::default()).unwrap();
        assert_eq!(hu.len(), 120);
    }

    #[test]
    fn unimodular_counts() {
        let u = enumerate_unimodular(&z(2), 3, 3, None, &Budget::default()).unwrap();
        assert_eq!(u.count_by_length(), vec![7, 42, 168]);
        let sub = enumerate_unimodular(&z(2), 4, 4, Some(2), &Budget::default()).unwrap();
        assert_eq!(sub.count_by_length(), vec![3, 6]);
    }

    #[test]
    fn over_budget_is_an_error() {
        let s = SymplecticSpace::new(z(2), 2).unwrap();
        let b = Budget { elements: 50, ..Budget::default() };
        assert!(matches!(enumerate_isotropic(&s, 4, &b), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn mixed_contains_isotropic_and_hyperbolic() {
        let s = SymplecticSpace::new(z(2), 2).unwrap();
        let mu = enumerate_mixed(&s, 4, &Budget::default()).unwrap();
        let iu = enumerate_isotropic(&s, 4, &Budget::default()).unwrap();
        let hu = enumerate_hyperbolic(&s, 4, &Budget::default()).unwrap();
        assert!(mu.check_chain_condition());
        for m in iu.members() {
            let as_pairs: Vec<Pair> = m.iter().map(|&x| (x, 0)).collect();
            assert!(mu.contains(&as_pairs));
        }
        for m in hu.members() {
            assert!(mu.contains(m));
        }
        let zero_free = mu.members().iter().filter(|m| m.iter().all(|p| p.1 != 0)).count();
        assert_eq!(zero_free, hu.len());
    }
}
