//! Seeded verification suites. A report depends only on the suite, the seed
//! and the budget; wall time is kept out of it.

use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::checks::{
    charn_check, gz_check, gz_collapse_check, h0_check, opposite_invariance, vas0_check, vas3_check, wh1_check,
};
use crate::error::{invalid, Error, Result};
use crate::homology::{
    functor_homology, h0_coinvariants, integer_homology, is_acyclic_through, sequence_components, HomologyRequest,
};
use crate::linalg::AbelianGroup;
use crate::nerve::{
    bw1_cover, circle_arc_cover, classical_nerve, hexagon_by_arcs, octahedron_by_faces, random_restrictions,
    verify_bound, verify_link_spheres, verify_poset_nerve, verify_surjectivity, BoundRequest, BoundRow, BoundTheorem,
};
use crate::poset::{CoefficientFunctor, FinitePoset, LocalSystem};
use crate::random::{
    random_frames, random_interval_functor, random_local_system, random_poset, random_poset_map,
    random_sequence_poset, rng,
};
use crate::ring::{check_stable_range, stable_rank, ModulusRing};
use crate::symplectic::{
    complete_to_hyperbolic, enumerate_isotropic, enumerate_unimodular, Family, FrameMode, SymplecticSpace,
};
use crate::verdict::{Outcome, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HomologyOracles,
    Coefficients,
    DoubleComplex,
    LinkSpheres,
    StableRange,
    Orbits,
    HyperbolicCompletion,
    Kal5,
    FrameBounds,
    Nerve,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::HomologyOracles,
        Suite::Coefficients,
        Suite::DoubleComplex,
        Suite::LinkSpheres,
        Suite::StableRange,
        Suite::Orbits,
        Suite::HyperbolicCompletion,
        Suite::Kal5,
        Suite::FrameBounds,
        Suite::Nerve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HomologyOracles => "homology-oracles",
            Suite::Coefficients => "coefficients",
            Suite::DoubleComplex => "double-complex",
            Suite::LinkSpheres => "link-spheres",
            Suite::StableRange => "stable-range",
            Suite::Orbits => "orbits",
            Suite::HyperbolicCompletion => "hyperbolic-completion",
            Suite::Kal5 => "kal5",
            Suite::FrameBounds => "frame-bounds",
            Suite::Nerve => "nerve",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match Suite::ALL.iter().find(|x| x.name() == s) {
            Some(x) => Ok(*x),
            None => {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                invalid(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
            }
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A verdict next to the outcome it was expected to have. Negative controls
/// expect a hypothesis violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteCheck {
    pub expected: Outcome,
    pub verdict: Verdict,
    pub outcome: Outcome,
}

impl SuiteCheck {
    fn new(expected: Outcome, verdict: Verdict) -> Self {
        let outcome = if verdict.outcome == expected {
            Outcome::Pass
        } else if verdict.outcome == Outcome::Inconclusive {
            Outcome::Inconclusive
        } else {
            Outcome::Fail
        };
        SuiteCheck { expected, verdict, outcome }
    }

    fn pass(verdict: Verdict) -> Self {
        Self::new(Outcome::Pass, verdict)
    }

    fn violation(verdict: Verdict) -> Self {
        Self::new(Outcome::HypothesisViolation, verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub outcome: Outcome,
    pub checks: Vec<SuiteCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<BoundRow>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.verdict.check == name)
    }
}

/// Budget and overflow errors become inconclusive; anything else is a
/// failure of the check.
fn settle(check: &str, r: Result<Verdict>) -> Verdict {
    match r {
        Ok(v) => v,
        Err(Error::BudgetExceeded(m)) => Verdict::inconclusive(check, m),
        Err(e @ Error::Overflow(_)) => Verdict::inconclusive(check, e.to_string()),
        Err(e) => Verdict::fail(check, e.to_string()),
    }
}

fn renamed(name: &str, mut v: Verdict) -> Verdict {
    v.check = name.to_string();
    v
}

/// Runs `f` on every instance in parallel and folds the results into one
/// verdict named `name`, keeping the details of instances that did not pass.
fn batch<I: Sync>(name: &str, items: &[I], f: impl Fn(&I) -> Result<Verdict> + Sync) -> Verdict {
    let results: Vec<Verdict> = items.par_iter().map(|i| settle(name, f(i))).collect();
    let outcome = results.iter().map(|v| v.outcome).fold(Outcome::Pass, Outcome::combine);
    let passed = results.iter().filter(|v| v.is_pass()).count();
    let mut v = Verdict::new(name, outcome).note(format!("{passed}/{} instances pass", results.len()));
    for (i, r) in results.iter().enumerate().filter(|(_, r)| !r.is_pass()) {
        v = v.note(format!("instance {i}: {}", r.outcome));
        v.details.extend(r.details.iter().map(|d| format!("  {d}")));
    }
    v
}

fn verdict_if(name: &str, ok: bool, why: impl Into<String>) -> Verdict {
    if ok {
        Verdict::pass(name)
    } else {
        Verdict::fail(name, why)
    }
}

fn z(m: u64) -> ModulusRing {
    ModulusRing::new(m).expect("modulus at least 2")
}

fn space(m: u64, n: usize) -> SymplecticSpace {
    SymplecticSpace::new(z(m), n).expect("positive rank")
}

pub fn run_suite(suite: Suite, seed: u64, budget: &Budget) -> SuiteReport {
    let (checks, rows) = match suite {
        Suite::HomologyOracles => (homology_oracles(seed, budget), Vec::new()),
        Suite::Coefficients => (coefficients(seed, budget), Vec::new()),
        Suite::DoubleComplex => (double_complex(seed, budget), Vec::new()),
        Suite::LinkSpheres => (link_spheres(budget), Vec::new()),
        Suite::StableRange => (stable_range(budget), Vec::new()),
        Suite::Orbits => (orbits(budget), Vec::new()),
        Suite::HyperbolicCompletion => (hyperbolic_completion(seed, budget), Vec::new()),
        Suite::Kal5 => kal5(budget),
        Suite::FrameBounds => frame_bounds(budget),
        Suite::Nerve => (nerve(seed, budget), Vec::new()),
    };
    let outcome = checks.iter().map(|c| c.outcome).fold(Outcome::Pass, Outcome::combine);
    SuiteReport { suite, seed, outcome, checks, rows }
}

fn sphere_check(k: usize, budget: &Budget) -> Result<Verdict> {
    let x = FinitePoset::simplex_boundary(k + 1);
    let r = integer_homology(&x, "sphere", &HomologyRequest::reduced(k as i64 + 1), budget)?;
    let ok = r.groups.iter().all(|g| if g.degree == k as i64 { g.group() == AbelianGroup::free(1) } else { g.is_zero() });
    Ok(verdict_if("sphere", ok, format!("S^{k}: {:?}", r.groups)).note(format!("S^{k} from {} faces", x.len())))
}

fn homology_oracles(seed: u64, budget: &Budget) -> Vec<SuiteCheck> {
    let mut r = rng(seed);
    let dims: Vec<usize> = (0..=4).collect();
    let spheres = batch("spheres", &dims, |&k| sphere_check(k, budget));

    let extremal: Vec<FinitePoset> = (0..20)
        .map(|i| {
            let n = r.gen_range(1..=20);
            let d = r.gen_range(0.1..0.5);
            let c = random_poset(&mut r, n, d).cone("top");
            if i % 2 == 0 {
                c
            } else {
                c.opposite()
            }
        })
        .collect();
    let cones = batch("extremal-acyclic", &extremal, |x| {
        let d = x.dimension();
        Ok(verdict_if("extremal-acyclic", is_acyclic_through(x, d, budget)?, format!("{} elements", x.len())))
    });

    let posets: Vec<FinitePoset> = (0..50)
        .map(|_| {
            let n = r.gen_range(1..=25);
            let d = r.gen_range(0.05..0.4);
            random_poset(&mut r, n, d)
        })
        .collect();
    let opposite = batch("opposite", &posets, |x| {
        Ok(verdict_if("opposite", opposite_invariance(x, x.dimension(), budget)?, format!("{} elements", x.len())))
    });
    vec![SuiteCheck::pass(spheres), SuiteCheck::pass(cones), SuiteCheck::pass(opposite)]
}

fn coefficients(seed: u64, budget: &Budget) -> Vec<SuiteCheck> {
    let mut r = rng(seed);
    let posets: Vec<Arc<FinitePoset>> = (0..25)
        .map(|_| {
            let n = r.gen_range(1..=15);
            Arc::new(random_poset(&mut r, n, 0.3))
        })
        .collect();
    let constant = batch("constant-functor", &posets, |p| {
        let d = p.dimension();
        let f = functor_homology(&CoefficientFunctor::constant(p.clone(), 1), "const", d, budget)?;
        let h = integer_homology(p, "int", &HomologyRequest::unreduced(d), budget)?;
        Ok(verdict_if("constant-functor", f.groups == h.groups, format!("{:?} vs {:?}", f.groups, h.groups)))
    });

    let mut instances = Vec::new();
    for _ in 0..25 {
        let ground = r.gen_range(3..=7);
        let count = r.gen_range(2..=6);
        let f = random_sequence_poset(&mut r, ground, count, 3);
        let op = Arc::new(f.to_finite().opposite());
        let universe = r.gen_range(1..=4);
        instances.push((f, random_interval_functor(&mut r, op, universe)));
    }
    let h0 = batch("h0", &instances, |(f, g)| h0_check(f, g.as_ref().map_err(Clone::clone)?, budget));

    let hexagon = Arc::new(FinitePoset::crown(3));
    let first = hexagon.cover_pairs().next().expect("a cover");
    let twisted = expected_coinvariants(&hexagon, LocalSystem::signed(hexagon.clone(), &[first]), AbelianGroup {
        free_rank: 0,
        torsion: vec![2],
    }, budget);
    let untwisted = expected_coinvariants(&hexagon, LocalSystem::signed(hexagon.clone(), &[]), AbelianGroup::free(1), budget);
    let mut systems = Vec::new();
    for i in 0..8 {
        let b = r.gen_range(2..=4);
        let t = r.gen_range(2..=4);
        systems.push(random_local_system(&mut r, b, t, 1 + i % 3));
    }
    let wh1 = batch("wh1", &systems, |s| {
        let (p, l) = s.as_ref().map_err(Clone::clone)?;
        wh1_check(p, l, 0, budget)
    });
    vec![
        SuiteCheck::pass(constant),
        SuiteCheck::pass(h0),
        SuiteCheck::pass(renamed("wh1-hexagon-twisted", twisted)),
        SuiteCheck::pass(renamed("wh1-hexagon-trivial", untwisted)),
        SuiteCheck::pass(wh1),
    ]
}

fn expected_coinvariants(p: &FinitePoset, l: Result<LocalSystem>, expected: AbelianGroup, budget: &Budget) -> Verdict {
    settle("wh1", (|| {
        let r = h0_coinvariants(p, &l?, 0, budget)?;
        let ok = r.agrees && r.coinvariants == expected;
        Ok(verdict_if("wh1", ok, format!("expected {expected}")).note(format!("coinvariants {}, H_0 {}", r.coinvariants, r.functor_h0)))
    })())
}

fn double_complex(seed: u64, budget: &Budget) -> Vec<SuiteCheck> {
    let mut r = rng(seed);
    let maps: Vec<_> = (0..20)
        .map(|_| {
            let s = r.gen_range(4..=15);
            let t = r.gen_range(2..=10);
            random_poset_map(&mut r, s, t, 0.25)
        })
        .collect();
    let totals = batch("g-z", &maps, |f| {
        let top = f.source().dimension() + f.target().dimension() + 1;
        gz_check(f, top, budget)
    });
    let mut bases: Vec<Arc<FinitePoset>> = vec![Arc::new(FinitePoset::simplex_boundary(2)), Arc::new(FinitePoset::simplex_boundary(3))];
    for _ in 0..4 {
        let n = r.gen_range(3..=10);
        bases.push(Arc::new(random_poset(&mut r, n, 0.3)));
    }
    let collapse = batch("g-z-collapse", &bases, |x| gz_collapse_check(x.clone(), x.dimension() + 1, budget));
    vec![SuiteCheck::pass(totals), SuiteCheck::pass(collapse)]
}

fn link_spheres(budget: &Budget) -> Vec<SuiteCheck> {
    let iu = settle("maazen1", enumerate_isotropic(&space(2, 2), 2, budget).and_then(|f| verify_link_spheres(&f, budget)));
    let u = settle("maazen1", enumerate_unimodular(&z(2), 3, 3, None, budget).and_then(|f| verify_link_spheres(&f, budget)));
    vec![SuiteCheck::pass(renamed("maazen1-IU4", iu)), SuiteCheck::pass(renamed("maazen1-U3", u))]
}

fn stable_range(budget: &Budget) -> Vec<SuiteCheck> {
    let moduli: Vec<u64> = (2..=6).collect();
    let s1 = batch("S_1", &moduli, |&m| {
        let ring = z(m);
        let r = check_stable_range(&ring, 1, budget);
        let sr = stable_rank(&ring, budget)?;
        let ok = r.holds == Some(true) && sr == 1;
        Ok(verdict_if("S_1", ok, format!("{ring}: holds {:?}, sr {sr}", r.holds)).note(format!("{ring}: {} vectors", r.enumerated_count)))
    });
    let mut cases = Vec::new();
    for m in [2u64, 3] {
        for n in 1..=3usize {
            for k in 1..=(4 - n) {
                cases.push((m, n, k));
            }
        }
    }
    let vas3 = batch("vas3", &cases, |&(m, n, k)| vas3_check(&z(m), n, k, budget));
    vec![SuiteCheck::pass(s1), SuiteCheck::pass(vas3)]
}

fn orbits(budget: &Budget) -> Vec<SuiteCheck> {
    let cases = [
        (2u64, 2usize, 1usize, Family::IU),
        (2, 2, 1, Family::HU),
        (2, 3, 1, Family::IU),
        (2, 3, 2, Family::IU),
        (3, 2, 1, Family::IU),
        (3, 2, 1, Family::HU),
    ];
    cases
        .iter()
        .map(|&(m, n, k, fam)| {
            let name = format!("vas0-{fam}-Z/{m}-n{n}-k{k}");
            SuiteCheck::pass(renamed(&name, settle("vas0", vas0_check(&space(m, n), fam, k, budget))))
        })
        .collect()
}

fn completion(space: &SymplecticSpace, frames: &[Vec<Vec<u64>>], name: &str, budget: &Budget) -> Verdict {
    batch(name, frames, |v| {
        let b = complete_to_hyperbolic(space, v, budget)?;
        Ok(verdict_if(name, b.basis.len() == space.dim(), "short basis"))
    })
}

fn hyperbolic_completion(seed: u64, budget: &Budget) -> Vec<SuiteCheck> {
    let s4 = space(2, 2);
    let all: Vec<Vec<Vec<u64>>> = (1..16u32)
        .map(|c| vec![s4.decode(c)])
        .filter(|v| s4.is_frame(v, FrameMode::Unimodular))
        .collect();
    let s6 = space(2, 3);
    let mut r = rng(seed);
    let ones = random_frames(&mut r, &s6, 1, 100);
    let twos = random_frames(&mut r, &s6, 2, 100);
    vec![
        SuiteCheck::pass(completion(&s4, &all, "b-w0-all-1-frames-Z/2-n2", budget)),
        SuiteCheck::pass(completion(&s6, &ones, "b-w0-sample-1-frames-Z/2-n3", budget)),
        SuiteCheck::pass(completion(&s6, &twos, "b-w0-sample-2-frames-Z/2-n3", budget)),
    ]
}

fn row_verdict(name: &str, r: Result<BoundRow>) -> (Verdict, Option<BoundRow>) {
    match r {
        Ok(row) => {
            let mut v = Verdict::new(name, row.outcome)
                .note(format!("{} over Z/{}, n = {}: bound {}", row.family, row.ring, row.n, row.bound))
                .note(format!("verified through {} by {}, {} elements", row.verified_through, row.method, row.elements));
            if let Some(p) = row.pi1 {
                v = v.note(format!("pi1 {p:?}"));
            }
            v.details.extend(row.notes.iter().cloned());
            (v, Some(row))
        }
        Err(e) => (settle(name, Err(e)), None),
    }
}

fn bound_checks(requests: Vec<(String, BoundRequest)>, budget: &Budget) -> (Vec<SuiteCheck>, Vec<BoundRow>) {
    let results: Vec<(Verdict, Option<BoundRow>)> =
        requests.iter().map(|(name, req)| row_verdict(name, verify_bound(req, budget))).collect();
    let checks = results.iter().map(|(v, _)| SuiteCheck::pass(v.clone())).collect();
    let rows = results.into_iter().filter_map(|(_, r)| r).collect();
    (checks, rows)
}

fn kal5(budget: &Budget) -> (Vec<SuiteCheck>, Vec<BoundRow>) {
    let u3 = BoundRequest::new(BoundTheorem::Kal5, z(2), 3, 3);
    let mut u4 = BoundRequest::new(BoundTheorem::Kal5, z(2), 4, 4);
    u4.max_degree = Some(2);
    u4.screen_primes = vec![2, 3, 5];
    bound_checks(vec![("kal5-U3".into(), u3), ("kal5-U4".into(), u4)], budget)
}

fn frame_bounds(budget: &Budget) -> (Vec<SuiteCheck>, Vec<BoundRow>) {
    let requests = vec![
        ("b-w1-IU-n2".to_string(), BoundRequest::new(BoundTheorem::Bw1, z(2), 2, 0)),
        ("b-w1-IU-n3".to_string(), BoundRequest::new(BoundTheorem::Bw1, z(2), 3, 0)),
        ("b-w2-HU-n2".to_string(), BoundRequest::new(BoundTheorem::Bw2, z(2), 2, 0)),
        ("b-w2-HU-n3".to_string(), BoundRequest::new(BoundTheorem::Bw2, z(2), 3, 0)),
    ];
    let (mut checks, rows) = bound_checks(requests, budget);
    let full = settle("iu6-connected", (|| {
        let f = enumerate_isotropic(&space(2, 3), 3, budget)?;
        let c = sequence_components(&f);
        Ok(verdict_if("iu6-connected", c == 1, format!("{c} components")).note(format!("{} elements", f.len())))
    })());
    checks.push(SuiteCheck::pass(full));
    checks.push(SuiteCheck::pass(settle("charn", charn_check(&z(2), 3, 1, 1, budget))));
    (checks, rows)
}

fn nerve(seed: u64, budget: &Budget) -> Vec<SuiteCheck> {
    let s6 = space(2, 3);
    let mut checks = Vec::new();
    let cover = bw1_cover(&s6, 0, budget);
    let main = settle("p-n-t", cover.as_ref().map_err(Clone::clone).and_then(|c| Ok(verify_poset_nerve(c, budget)?.verdict)));
    checks.push(SuiteCheck::pass(renamed("p-n-t-bw1-IU6", main)));
    let randomized = settle("p-n-t-random", (|| {
        let c = cover.as_ref().map_err(Clone::clone)?;
        let covers = random_restrictions(c, 20, 400, seed, budget)?;
        if covers.len() < 20 {
            return Ok(Verdict::inconclusive("p-n-t-random", format!("only {} valid covers found", covers.len())));
        }
        Ok(batch("p-n-t-random", &covers, |c| Ok(verify_poset_nerve(c, budget)?.verdict)))
    })());
    checks.push(SuiteCheck::pass(randomized));

    let (k, pieces) = octahedron_by_faces();
    let oct = settle("h-n", classical_nerve(&k, &pieces, 1, budget).map(|r| r.verdict));
    checks.push(SuiteCheck::pass(renamed("h-n-octahedron", oct)));
    let (k, pieces) = hexagon_by_arcs();
    let hex0 = settle("h-n", classical_nerve(&k, &pieces, 0, budget).map(|r| r.verdict));
    checks.push(SuiteCheck::pass(renamed("h-n-hexagon-l0", hex0)));
    let arcs0 = settle("p-n-t", circle_arc_cover(0).and_then(|c| Ok(verify_poset_nerve(&c, budget)?.verdict)));
    checks.push(SuiteCheck::pass(renamed("p-n-t-circle-l0", arcs0)));

    let hex1 = settle("h-n", classical_nerve(&k, &pieces, 1, budget).map(|r| r.verdict));
    checks.push(SuiteCheck::violation(renamed("control-h-n-hexagon-l1", hex1)));
    let arcs1 = settle("p-n-t", circle_arc_cover(1).and_then(|c| Ok(verify_poset_nerve(&c, budget)?.verdict)));
    checks.push(SuiteCheck::violation(renamed("control-p-n-t-disconnected-piece", arcs1)));
    let surj1 = settle("surj", circle_arc_cover(1).and_then(|c| verify_surjectivity(&c, None, budget)));
    checks.push(SuiteCheck::violation(renamed("control-surj-circle-l1", surj1)));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass_and_repeat() {
        for s in [Suite::HomologyOracles, Suite::StableRange, Suite::LinkSpheres] {
            let a = run_suite(s, 7, &Budget::default());
            assert_eq!(a.outcome, Outcome::Pass, "{a:#?}");
            let b = run_suite(s, 7, &Budget::default());
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn controls_expect_violations() {
        let c = SuiteCheck::violation(Verdict::violation("x", "hypothesis"));
        assert_eq!(c.outcome, Outcome::Pass);
        let wrong = SuiteCheck::violation(Verdict::pass("x"));
        assert_eq!(wrong.outcome, Outcome::Fail);
    }
}
