//! Verdict-producing checks for the statements that are not covered by the
//! nerve harness or the criteria in `homology`.

use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::homology::{
    double_complex_pages, h0_coinvariants, h0_generated_by, integer_homology, sequence_homology, HomologyRequest,
};
use crate::poset::{CoefficientFunctor, Entry, FinitePoset, LocalSystem, PosetMap, SequencePoset};
use crate::ring::{check_matrix_stable_range, stable_rank, ModulusRing};
use crate::symplectic::{enumerate_isotropic, esp_orbit, Family, OrbitSeed, SymplecticSpace};
use crate::verdict::Verdict;

pub const VAS0_CHECK: &str = "vas0";
pub const VAS3_CHECK: &str = "vas3";
pub const GZ_CHECK: &str = "g-z";
pub const WH1_CHECK: &str = "wh1";
pub const H0_CHECK: &str = "h0";
pub const CHARN_CHECK: &str = "charn";

/// The standard isotropic frame `(e_1, e_3, ..., e_{2k-1})`.
pub fn standard_isotropic(space: &SymplecticSpace, k: usize) -> Vec<Vec<u64>> {
    (1..=k).map(|i| space.e(2 * i - 1)).collect()
}

/// The standard hyperbolic frame `((e_1, e_2), ..., (e_{2k-1}, e_{2k}))`.
pub fn standard_hyperbolic(space: &SymplecticSpace, k: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    (1..=k).map(|i| (space.e(2 * i - 1), space.e(2 * i))).collect()
}

/// The orbit of the standard frame of length `k` under the elementary
/// symplectic group is the whole level `k` of `IU` or `HU`.
pub fn vas0_check(space: &SymplecticSpace, family: Family, k: usize, budget: &Budget) -> Result<Verdict> {
    if k == 0 || k > space.n() {
        return invalid(format!("k must be in 1..={}", space.n()));
    }
    let seed = match family {
        Family::IU => OrbitSeed::Isotropic(standard_isotropic(space, k)),
        Family::HU => OrbitSeed::Hyperbolic(standard_hyperbolic(space, k)),
        other => return invalid(format!("orbit check needs IU or HU, got {other}")),
    };
    let sr = stable_rank(space.ring(), budget)? as usize;
    if space.n() < sr + k {
        return Ok(Verdict::violation(VAS0_CHECK, format!("n = {} < sr(R) + k = {}", space.n(), sr + k)));
    }
    let r = esp_orbit(space, &seed, budget)?;
    if !r.complete {
        return Ok(Verdict::inconclusive(VAS0_CHECK, format!("orbit search stopped at {} elements", r.orbit_size)));
    }
    let level = r.level_size.unwrap_or(0);
    let note = format!("{family} level {k}: orbit {}/{level}", r.orbit_size);
    match (r.closed, r.transitive) {
        (true, Some(true)) => Ok(Verdict::pass(VAS0_CHECK).note(note)),
        (false, _) => Ok(Verdict::fail(VAS0_CHECK, "orbit is not closed under the generators").note(note)),
        _ => Ok(Verdict::fail(VAS0_CHECK, note)),
    }
}

/// `(S_n^k)` holds exactly when `(S_k)` holds.
pub fn vas3_check(ring: &ModulusRing, n: usize, k: usize, budget: &Budget) -> Result<Verdict> {
    if n == 0 || k == 0 {
        return invalid("n and k must be positive");
    }
    let r = check_matrix_stable_range(ring, n, k, budget);
    let holds = match r.holds {
        Some(h) => h,
        None => return Ok(Verdict::inconclusive(VAS3_CHECK, format!("S_{n}^{k} over {ring} exceeds the element budget"))),
    };
    let note = format!("S_{n}^{k} over {ring}: {holds} ({} matrices)", r.enumerated_count);
    match r.consistent_with_sk {
        Some(true) => Ok(Verdict::pass(VAS3_CHECK).note(note)),
        Some(false) => Ok(Verdict::fail(VAS3_CHECK, format!("S_{k} disagrees")).note(note)),
        None => Ok(Verdict::inconclusive(VAS3_CHECK, format!("S_{k} over {ring} exceeds the element budget")).note(note)),
    }
}

/// Total homology of the double complex of `f` equals `H_*(X)` in degrees
/// `0..=max_total`.
pub fn gz_check(f: &PosetMap, max_total: i64, budget: &Budget) -> Result<Verdict> {
    let r = double_complex_pages(f, max_total, budget)?;
    let groups = |v: &[crate::linalg::AbelianGroup]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    if r.total_matches_source {
        Ok(Verdict::pass(GZ_CHECK).note(format!("H_0..H_{max_total}: {}", groups(&r.total))))
    } else {
        Ok(Verdict::fail(GZ_CHECK, format!("total [{}] vs source [{}]", groups(&r.total), groups(&r.source))))
    }
}

/// The collapse patterns of the two degenerate maps: `id_Y` puts `H_*(Y)` in
/// row zero, a map to a point puts `H_*(X)` in column zero.
pub fn gz_collapse_check(x: Arc<FinitePoset>, max_total: i64, budget: &Budget) -> Result<Verdict> {
    let id = double_complex_pages(&PosetMap::identity(x.clone()), max_total, budget)?;
    let point = Arc::new(FinitePoset::chain(1));
    let c = double_complex_pages(&PosetMap::constant(x, point, 0)?, max_total, budget)?;
    let row = id.e2.concentrated_in_row_zero_through(max_total)
        && (0..=max_total).all(|p| id.e2.get(p, 0) == id.source.get(p as usize));
    let col = c.e2.concentrated_in_column_zero_through(max_total)
        && (0..=max_total).all(|q| c.e2.get(0, q) == c.source.get(q as usize));
    let mut v = if row && col {
        Verdict::pass(GZ_CHECK)
    } else {
        Verdict::fail(GZ_CHECK, "degenerate spectral sequence does not collapse")
    };
    v = v.note(format!("identity: row zero {row}")).note(format!("point: column zero {col}"));
    Ok(v)
}

/// Coinvariants of the monodromy at `basepoint` agree with `H_0(X, L)`.
pub fn wh1_check(poset: &FinitePoset, system: &LocalSystem, basepoint: usize, budget: &Budget) -> Result<Verdict> {
    if !poset.is_connected() {
        return invalid("the poset must be connected");
    }
    let r = h0_coinvariants(poset, system, basepoint, budget)?;
    let note = format!("coinvariants {} over {} loops, H_0 {}", r.coinvariants, r.loop_count, r.functor_h0);
    if r.agrees {
        Ok(Verdict::pass(WH1_CHECK).note(note))
    } else {
        Ok(Verdict::fail(WH1_CHECK, note))
    }
}

/// For `F` with the chain condition and `G` a functor on `F^op`, the
/// summands `G(v)` with `|v| = 1` generate `H_0(F^op, G)`. The functor must
/// live on `f.to_finite().opposite()`.
pub fn h0_check<T: Entry>(f: &SequencePoset<T>, functor: &CoefficientFunctor, budget: &Budget) -> Result<Verdict> {
    if functor.poset().len() != f.len() {
        return invalid("the functor must live on F^op");
    }
    if let Some((a, b)) = f.chain_condition_violation() {
        return Ok(Verdict::violation(H0_CHECK, format!("chain condition fails for {a:?} < {b:?}")));
    }
    let generators: Vec<usize> = f.length_range(1).collect();
    if h0_generated_by(functor, &generators, budget)? {
        Ok(Verdict::pass(H0_CHECK).note(format!("{} generators, {} elements", generators.len(), f.len())))
    } else {
        Ok(Verdict::fail(H0_CHECK, "length-one summands do not generate H_0"))
    }
}

/// All `R`-linear combinations of `xs`, as vector codes.
pub fn span_codes(space: &SymplecticSpace, xs: &[Vec<u64>]) -> Vec<u32> {
    let ring = space.ring();
    let count = ring.count(xs.len()).unwrap_or(0);
    let mut out: Vec<u32> = (0..count)
        .map(|idx| {
            let coeffs = ring.decode(idx, xs.len());
            let mut v = vec![0u64; space.dim()];
            for (c, x) in coeffs.iter().zip(xs) {
                for (a, b) in v.iter_mut().zip(x) {
                    *a = ring.add(*a, ring.mul(*c, *b));
                }
            }
            space.encode(&v)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `|IU(R^{2n})_x| = |IU(R^{2(n-k)})<V>|` for the standard isotropic `x` of
/// length `k` and `V = <x>`, with equal integer homology through
/// `max_degree`.
pub fn charn_check(ring: &ModulusRing, n: usize, k: usize, max_degree: i64, budget: &Budget) -> Result<Verdict> {
    if k == 0 || k >= n {
        return invalid(format!("k must be in 1..{n}"));
    }
    let sr = stable_rank(ring, budget)? as usize;
    if n < sr + k {
        return Ok(Verdict::violation(CHARN_CHECK, format!("n = {n} < sr(R) + k = {}", sr + k)));
    }
    let big = SymplecticSpace::new(ring.clone(), n)?;
    let small = SymplecticSpace::new(ring.clone(), n - k)?;
    let len = (max_degree + 2).max(1) as usize;
    let x = standard_isotropic(&big, k);
    let xcodes: Vec<u32> = x.iter().map(|v| big.encode(v)).collect();
    let rel = enumerate_isotropic(&big, len + k, budget)?.sub_after(&xcodes).truncate_by_length(len);
    let tensor = enumerate_isotropic(&small, len, budget)?.tensor_with_set(&span_codes(&big, &x))?;
    let req = HomologyRequest::unreduced(max_degree);
    let a = sequence_homology(&rel, "IU_x", &req, budget)?;
    let b = sequence_homology(&tensor, "IU<V>", &req, budget)?;
    let sizes = format!("lengths <= {len}: {} vs {} elements", rel.len(), tensor.len());
    if rel.count_by_length() != tensor.count_by_length() {
        return Ok(Verdict::fail(CHARN_CHECK, sizes));
    }
    if a.groups != b.groups {
        return Ok(Verdict::fail(CHARN_CHECK, "homology differs").note(sizes));
    }
    Ok(Verdict::pass(CHARN_CHECK).note(sizes).note(format!("equal homology through degree {max_degree}")))
}

/// Homology of `X` and `X^op` agree through `max_degree`.
pub fn opposite_invariance(x: &FinitePoset, max_degree: i64, budget: &Budget) -> Result<bool> {
    let req = HomologyRequest::reduced(max_degree);
    let a = integer_homology(x, "X", &req, budget)?;
    let b = integer_homology(&x.opposite(), "Xop", &req, budget)?;
    Ok(a.groups == b.groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Outcome;

    fn z(m: u64) -> ModulusRing {
        ModulusRing::new(m).unwrap()
    }

    #[test]
    fn vas0_small_levels() {
        let s = SymplecticSpace::new(z(2), 2).unwrap();
        let v = vas0_check(&s, Family::IU, 1, &Budget::default()).unwrap();
        assert!(v.is_pass(), "{v:?}");
        assert!(v.details[0].contains("15/15"));
        let h = vas0_check(&s, Family::HU, 1, &Budget::default()).unwrap();
        assert!(h.details[0].contains("120/120"));
        assert_eq!(vas0_check(&s, Family::IU, 2, &Budget::default()).unwrap().outcome, Outcome::HypothesisViolation);
    }

    #[test]
    fn vas3_small() {
        assert!(vas3_check(&z(2), 2, 1, &Budget::default()).unwrap().is_pass());
        assert!(vas3_check(&z(3), 1, 2, &Budget::default()).unwrap().is_pass());
    }

    #[test]
    fn span_of_e1_over_z3() {
        let s = SymplecticSpace::new(z(3), 2).unwrap();
        let codes = span_codes(&s, &[s.e(1)]);
        assert_eq!(codes.len(), 3);
        assert!(codes.contains(&0));
    }

    #[test]
    fn hexagon_with_sign() {
        let p = Arc::new(FinitePoset::crown(3));
        let (a, b) = p.cover_pairs().next().unwrap();
        let l = LocalSystem::signed(p.clone(), &[(a, b)]).unwrap();
        let v = wh1_check(&p, &l, 0, &Budget::default()).unwrap();
        assert!(v.is_pass());
        assert!(v.details[0].contains("Z/2"), "{v:?}");
    }

    #[test]
    fn collapse_on_circle() {
        let x = Arc::new(FinitePoset::simplex_boundary(2));
        assert!(gz_collapse_check(x, 2, &Budget::default()).unwrap().is_pass());
    }

    #[test]
    fn charn_at_n2() {
        let v = charn_check(&z(2), 2, 1, 1, &Budget::default()).unwrap();
        assert!(v.is_pass(), "{v:?}");
    }
}
