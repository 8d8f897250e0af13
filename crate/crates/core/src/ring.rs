//! Arithmetic in `Z/m` and the stable range conditions `(S_m)` and `(S_n^k)`.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::linalg::modp::rank_mod_p_rows;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization by trial division; the moduli used here are tiny.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// The coefficient ring `Z/m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusRing {
    modulus: u64,
    prime_factors: Vec<(u64, u32)>,
    #[serde(skip)]
    stable_rank: OnceLock<u32>,
}

impl PartialEq for ModulusRing {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}

impl Eq for ModulusRing {}

impl fmt::Display for ModulusRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}", self.modulus)
    }
}

impl ModulusRing {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return invalid(format!("modulus must be at least 2, got {modulus}"));
        }
        if modulus > u32::MAX as u64 {
            return invalid("modulus too large");
        }
        Ok(ModulusRing { modulus, prime_factors: factorize(modulus), stable_rank: OnceLock::new() })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime_factors(&self) -> &[(u64, u32)] {
        &self.prime_factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_factors.iter().map(|&(p, _)| p)
    }

    /// Stable rank, present only once certified by [`stable_rank`].
    pub fn stable_rank_hint(&self) -> Option<u32> {
        self.stable_rank.get().copied()
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    pub fn is_unit(&self, a: u64) -> bool {
        gcd(a % self.modulus, self.modulus) == 1
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        let (g, x, _) = ext_gcd(a as i64 % self.modulus as i64, self.modulus as i64);
        (g == 1).then(|| self.reduce(x))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.modulus
    }

    /// Decodes `index` as a little-endian base-`m` digit vector of length `len`.
    pub fn decode(&self, mut index: u64, len: usize) -> Vec<u64> {
        let mut v = vec![0; len];
        for c in v.iter_mut() {
            *c = index % self.modulus;
            index /= self.modulus;
        }
        v
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        coords.iter().rev().fold(0, |acc, &c| acc * self.modulus + c)
    }

    /// `m^len`, or `None` on overflow.
    pub fn count(&self, len: usize) -> Option<u64> {
        self.modulus.checked_pow(len as u32)
    }

    pub fn vector(&self, coords: &[i64]) -> RingVector {
        RingVector { modulus: self.modulus, coords: coords.iter().map(|&c| self.reduce(c)).collect() }
    }
}

pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A vector in `(Z/m)^n` with reduced coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingVector {
    modulus: u64,
    coords: Vec<u64>,
}

impl RingVector {
    pub fn new(ring: &ModulusRing, coords: Vec<u64>) -> Self {
        let coords = coords.into_iter().map(|c| c % ring.modulus).collect();
        RingVector { modulus: ring.modulus, coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

fn gcd_with_modulus(coords: &[u64], modulus: u64) -> u64 {
    coords.iter().fold(modulus, |g, &c| gcd(g, c % modulus))
}

/// `v` is unimodular iff `gcd(v_1, ..., v_n, m) = 1`.
pub fn is_unimodular_vector(ring: &ModulusRing, v: &RingVector) -> Result<bool> {
    if v.is_empty() {
        return invalid("unimodularity of the empty vector is undefined");
    }
    if v.modulus != ring.modulus {
        return invalid(format!("vector over Z/{} checked in {ring}", v.modulus));
    }
    Ok(gcd_with_modulus(&v.coords, ring.modulus) == 1)
}

#[inline]
pub(crate) fn unimodular_coords(coords: &[u64], modulus: u64) -> bool {
    gcd_with_modulus(coords, modulus) == 1
}

/// An input together with the parameter that makes it pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeWitness {
    pub input: Vec<Vec<u64>>,
    pub solution: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableRangeReport {
    pub ring: u64,
    pub condition: String,
    /// `None` when the enumeration budget was exceeded.
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<RangeWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Vec<u64>>>,
    pub enumerated_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    /// For `(S_n^k)`: agreement with `(S_k)` on the same ring.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent_with_sk: Option<bool>,
}

impl StableRangeReport {
    fn inconclusive(ring: u64, condition: String) -> Self {
        StableRangeReport {
            ring,
            condition,
            holds: None,
            witness: None,
            counterexample: None,
            enumerated_count: 0,
            convention: None,
            consistent_with_sk: None,
        }
    }
}

/// Searches `t` with `(r_1 + t_1 r_{m+1}, ..., r_m + t_m r_{m+1})` unimodular.
fn shorten_vector(ring: &ModulusRing, r: &[u64]) -> Option<Vec<u64>> {
    let m = r.len() - 1;
    let last = r[m];
    let total = ring.count(m)?;
    let mut buf = vec![0u64; m];
    (0..total).find_map(|idx| {
        let t = ring.decode(idx, m);
        for i in 0..m {
            buf[i] = ring.add(r[i], ring.mul(t[i], last));
        }
        unimodular_coords(&buf, ring.modulus).then_some(t)
    })
}

/// Exhaustive check of `(S_m)` over every unimodular vector of `R^{m+1}`.
pub fn check_stable_range(ring: &ModulusRing, m: usize, budget: &Budget) -> StableRangeReport {
    let condition = format!("S_{m}");
    if m == 0 {
        return StableRangeReport::inconclusive(ring.modulus, condition);
    }
    let total = match ring.count(m + 1) {
        Some(t) if budget.check_elements(t, "stable range vectors").is_ok() => t,
        _ => return StableRangeReport::inconclusive(ring.modulus, condition),
    };
    let modulus = ring.modulus;
    let failing = (0..total).into_par_iter().find_first(|&idx| {
        let r = ring.decode(idx, m + 1);
        unimodular_coords(&r, modulus) && shorten_vector(ring, &r).is_none()
    });
    let counterexample = failing.map(|idx| vec![ring.decode(idx, m + 1)]);
    let witness = if counterexample.is_none() {
        // first unimodular input whose truncation is not already unimodular
        (0..total).find_map(|idx| {
            let r = ring.decode(idx, m + 1);
            if unimodular_coords(&r, modulus) && !unimodular_coords(&r[..m], modulus) {
                shorten_vector(ring, &r).map(|t| RangeWitness { input: vec![r], solution: t })
            } else {
                None
            }
        })
    } else {
        None
    };
    StableRangeReport {
        ring: modulus,
        condition,
        holds: Some(counterexample.is_none()),
        witness,
        counterexample,
        enumerated_count: total,
        convention: None,
        consistent_with_sk: None,
    }
}

/// Rows of an `n x (n+k)` matrix over `Z/m` have a right inverse iff they
/// have full rank modulo every prime dividing `m`.
pub(crate) fn rows_unimodular(ring: &ModulusRing, rows: &[Vec<u64>]) -> bool {
    let k = rows.len();
    ring.primes().all(|p| rank_mod_p_rows(rows, p) == k)
}

/// Exhaustive check of the matrix condition `(S_n^k)` over all unimodular
/// `n x (n+k)` matrices, cross-checked against `(S_k)`.
pub fn check_matrix_stable_range(
    ring: &ModulusRing,
    n: usize,
    k: usize,
    budget: &Budget,
) -> StableRangeReport {
    let condition = format!("S_{n}^{k}");
    if n == 0 || k == 0 {
        return StableRangeReport::inconclusive(ring.modulus, condition);
    }
    let cols = n + k;
    let total = match ring.count(n * cols) {
        Some(t) if budget.check_elements(t, "stable range matrices").is_ok() => t,
        _ => return StableRangeReport::inconclusive(ring.modulus, condition),
    };
    let shift_count = ring.count(cols - 1).unwrap_or(u64::MAX);

    let to_rows = |idx: u64| -> Vec<Vec<u64>> {
        let flat = ring.decode(idx, n * cols);
        flat.chunks(cols).map(|c| c.to_vec()).collect()
    };
    // r with B [[1, r], [0, I]] = [u | B'] and B' unimodular
    let solve = |b: &[Vec<u64>]| -> Option<Vec<u64>> {
        let mut shifted: Vec<Vec<u64>> = vec![vec![0; cols - 1]; n];
        (0..shift_count).find_map(|ridx| {
            let r = ring.decode(ridx, cols - 1);
            for (row, out) in b.iter().zip(shifted.iter_mut()) {
                for j in 0..cols - 1 {
                    out[j] = ring.add(row[j + 1], ring.mul(r[j], row[0]));
                }
            }
            rows_unimodular(ring, &shifted).then_some(r)
        })
    };

    let failing = (0..total).into_par_iter().find_first(|&idx| {
        let b = to_rows(idx);
        rows_unimodular(ring, &b) && solve(&b).is_none()
    });
    let counterexample = failing.map(to_rows);
    let witness = if counterexample.is_none() {
        (0..total).find_map(|idx| {
            let b = to_rows(idx);
            let tail: Vec<Vec<u64>> = b.iter().map(|r| r[1..].to_vec()).collect();
            if rows_unimodular(ring, &b) && !rows_unimodular(ring, &tail) {
                solve(&b).map(|r| RangeWitness { input: b, solution: r })
            } else {
                None
            }
        })
    } else {
        None
    };
    let holds = counterexample.is_none();
    let sk = check_stable_range(ring, k, budget);
    StableRangeReport {
        ring: ring.modulus,
        condition,
        holds: Some(holds),
        witness,
        counterexample,
        enumerated_count: total,
        convention: Some("B ranges over unimodular (right-invertible) matrices".into()),
        consistent_with_sk: sk.holds.map(|h| h == holds),
    }
}

/// Least `m` for which `(S_m)` holds, cached on the ring.
pub fn stable_rank(ring: &ModulusRing, budget: &Budget) -> Result<u32> {
    if let Some(sr) = ring.stable_rank.get() {
        return Ok(*sr);
    }
    for m in 1.. {
        let report = check_stable_range(ring, m, budget);
        match report.holds {
            Some(true) => {
                let _ = ring.stable_rank.set(m as u32);
                return Ok(m as u32);
            }
            Some(false) => continue,
            None => {
                return Err(Error::BudgetExceeded(format!(
                    "no stable range certified for {ring} before m = {m}"
                )))
            }
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u64) -> ModulusRing {
        ModulusRing::new(m).unwrap()
    }

    #[test]
    fn factorization_multiplies_back() {
        for m in 2..200u64 {
            let r = ring(m);
            let prod: u64 = r.prime_factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, m);
        }
    }

    #[test]
    fn rejects_small_modulus() {
        assert!(ModulusRing::new(1).is_err());
        assert!(ModulusRing::new(0).is_err());
    }

    #[test]
    fn unimodular_examples() {
        let z4 = ring(4);
        assert!(is_unimodular_vector(&z4, &z4.vector(&[1, 0])).unwrap());
        assert!(!is_unimodular_vector(&z4, &z4.vector(&[2, 2])).unwrap());
        let z6 = ring(6);
        assert!(is_unimodular_vector(&z6, &z6.vector(&[2, 3])).unwrap());
        // explicit coefficients found by search
        let found = (0..6u64)
            .flat_map(|a| (0..6u64).map(move |b| (a, b)))
            .find(|&(a, b)| (2 * a + 3 * b) % 6 == 1);
        assert_eq!(found, Some((2, 1)));
        assert_eq!((2 * 5 + 3) % 6, 1);
        assert!(is_unimodular_vector(&z6, &z6.vector(&[])).is_err());
    }

    #[test]
    fn gcd_criterion_matches_coefficient_search() {
        for m in [2u64, 3, 4, 6, 8, 9, 12] {
            let r = ring(m);
            for idx in 0..m * m * m {
                let v = r.decode(idx, 3);
                let by_search = (0..m * m * m).any(|sidx| {
                    let s = r.decode(sidx, 3);
                    (0..3).map(|i| s[i] * v[i]).sum::<u64>() % m == 1
                });
                assert_eq!(unimodular_coords(&v, m), by_search, "Z/{m} {v:?}");
            }
        }
    }

    #[test]
    fn stable_range_examples() {
        let b = Budget::default();
        assert_eq!(check_stable_range(&ring(2), 1, &b).holds, Some(true));
        assert_eq!(check_stable_range(&ring(2), 1, &b).enumerated_count, 4);
        assert_eq!(check_stable_range(&ring(6), 1, &b).holds, Some(true));
        assert_eq!(check_stable_range(&ring(4), 2, &b).holds, Some(true));
    }

    #[test]
    fn s1_witness_on_z6() {
        let rep = check_stable_range(&ring(6), 1, &Budget::default());
        let w = rep.witness.unwrap();
        let (r, t) = (&w.input[0], &w.solution);
        assert!(gcd((r[0] + t[0] * r[1]) % 6, 6) == 1);
        assert!(gcd(r[0], 6) != 1);
    }

    #[test]
    fn matrix_stable_range_examples() {
        let b = Budget::default();
        for (m, n, k) in [(2, 1, 1), (2, 2, 1), (3, 1, 1)] {
            let rep = check_matrix_stable_range(&ring(m), n, k, &b);
            assert_eq!(rep.holds, Some(true), "Z/{m} S_{n}^{k}");
            assert_eq!(rep.consistent_with_sk, Some(true));
        }
    }

    #[test]
    fn budget_gives_inconclusive() {
        let b = Budget { elements: 10, ..Budget::default() };
        assert_eq!(check_stable_range(&ring(5), 2, &b).holds, None);
        assert_eq!(check_matrix_stable_range(&ring(3), 2, 2, &b).holds, None);
        assert!(stable_rank(&ring(7), &b).is_err());
    }

    #[test]
    fn stable_rank_is_one_for_small_moduli() {
        for m in [2u64, 3, 4] {
            let r = ring(m);
            assert_eq!(r.stable_rank_hint(), None);
            assert_eq!(stable_rank(&r, &Budget::default()).unwrap(), 1);
            assert_eq!(r.stable_rank_hint(), Some(1));
        }
    }

    #[test]
    fn inverse_of_units() {
        let r = ring(12);
        for a in 0..12 {
            match r.inv(a) {
                Some(b) => assert_eq!(r.mul(a, b), 1),
                None => assert!(!r.is_unit(a)),
            }
        }
    }
}
