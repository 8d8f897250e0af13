use std::sync::Arc;

use proptest::prelude::*;

use framecomplex::checks::{h0_check, opposite_invariance};
use framecomplex::homology::{
    double_complex_pages, induced_map, integer_homology, is_acyclic_through, order_complex, HomologyRequest,
};
use framecomplex::nerve::{as_poset_cover, classical_nerve, verify_bound, verify_poset_nerve, BoundRequest, BoundTheorem, SimplicialComplex};
use framecomplex::poset::{FinitePoset, PosetMap};
use framecomplex::random::{random_interval_functor, random_poset, random_poset_map, random_sequence_poset, rng};
use framecomplex::ring::ModulusRing;
use framecomplex::symplectic::{esp_orbit, OrbitSeed, SymplecticSpace};
use framecomplex::{Budget, Error, Outcome};

fn poset(seed: u64, max: usize) -> FinitePoset {
    let mut r = rng(seed);
    let n = 1 + (seed as usize % max);
    random_poset(&mut r, n, 0.1 + (seed % 5) as f64 * 0.08)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundaries_square_to_zero(seed in any::<u64>()) {
        let x = poset(seed, 14);
        let d = x.dimension();
        let (c, _) = order_complex(&x, d + 1, true, &Budget::default()).unwrap();
        for k in c.lowest_degree()..=d {
            let prod = c.boundary(k).mul(&c.boundary(k + 1)).unwrap();
            prop_assert!(prod.is_zero());
        }
    }

    #[test]
    fn reduced_h0_is_one_less(seed in any::<u64>()) {
        let x = poset(seed, 16);
        let b = Budget::default();
        let r = integer_homology(&x, "x", &HomologyRequest::reduced(0), &b).unwrap();
        let u = integer_homology(&x, "x", &HomologyRequest::unreduced(0), &b).unwrap();
        prop_assert_eq!(u.group(0).unwrap().free_rank, r.group(0).unwrap().free_rank + 1);
        prop_assert_eq!(u.group(0).unwrap().free_rank, x.components().len());
    }

    #[test]
    fn homology_ignores_orientation(seed in any::<u64>()) {
        let x = poset(seed, 18);
        prop_assert!(opposite_invariance(&x, x.dimension(), &Budget::default()).unwrap());
    }

    #[test]
    fn comparable_maps_induce_equal_maps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_poset_map(&mut r, 8, 5, 0.3);
        let y = Arc::new(f.target().cone("top"));
        let top = y.len() - 1;
        let x = f.source().clone();
        let pivot = (seed % x.len() as u64) as usize;
        let lifted: Vec<usize> = (0..x.len()).map(|a| f.apply(a)).collect();
        let raised: Vec<usize> = (0..x.len()).map(|a| if x.leq(pivot, a) { top } else { f.apply(a) }).collect();
        let lo = PosetMap::new(x.clone(), y.clone(), lifted).unwrap();
        let hi = PosetMap::new(x.clone(), y.clone(), raised).unwrap();
        prop_assert!(lo.pointwise_leq(&hi));
        for k in 0..=x.dimension().min(2) {
            let a = induced_map(&lo, k, false, &Budget::default()).unwrap();
            let b = induced_map(&hi, k, false, &Budget::default()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn row_zero_collapse_computes_total(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_poset_map(&mut r, 9, 5, 0.3);
        let n = f.source().dimension() + 1;
        let rep = double_complex_pages(&f, n, &Budget::default()).unwrap();
        prop_assert!(rep.total_matches_source);
        if rep.e2.concentrated_in_row_zero_through(n) {
            for p in 0..n {
                prop_assert_eq!(rep.e2.get(p, 0), rep.total.get(p as usize));
            }
        }
    }

    #[test]
    fn length_one_summands_generate_h0(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_sequence_poset(&mut r, 6, 4, 3);
        let op = Arc::new(f.to_finite().opposite());
        let g = random_interval_functor(&mut r, op, 3).unwrap();
        prop_assert!(h0_check(&f, &g, &Budget::default()).unwrap().is_pass());
    }

    #[test]
    fn subsequence_closure_has_chain_condition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_sequence_poset(&mut r, 7, 5, 4);
        prop_assert!(f.check_chain_condition());
        for v in f.members().iter().take(6) {
            let fv = f.sub_after(v);
            for w in fv.members().iter().take(6) {
                let wv: Vec<u32> = w.iter().chain(v.iter()).copied().collect();
                prop_assert_eq!(fv.sub_after(w), f.sub_after(&wv));
            }
        }
    }

    #[test]
    fn orbits_are_closed(code in 1u32..81) {
        let s = SymplecticSpace::new(ModulusRing::new(3).unwrap(), 2).unwrap();
        let v = s.decode(code);
        let r = esp_orbit(&s, &OrbitSeed::Isotropic(vec![v]), &Budget::default()).unwrap();
        prop_assert!(r.closed && r.complete);
        prop_assert_eq!(r.orbit_size, 80);
    }

    #[test]
    fn both_nerve_forms_agree(seed in any::<u64>(), l in 0i64..2) {
        let mut r = rng(seed);
        let facets: Vec<Vec<u32>> = (0..2 + seed % 3)
            .map(|_| {
                use rand::seq::SliceRandom;
                let size = 1 + (rand::Rng::gen_range(&mut r, 0..3usize));
                let mut f: Vec<u32> = (0..6).collect::<Vec<u32>>().choose_multiple(&mut r, size).copied().collect();
                f.sort_unstable();
                f
            })
            .collect();
        let k = SimplicialComplex::from_facets(&facets).unwrap();
        let pieces: Vec<SimplicialComplex> = facets.iter().map(|f| SimplicialComplex::from_facets(&[f.clone()]).unwrap()).collect();
        let b = Budget::default();
        let classical = classical_nerve(&k, &pieces, l, &b).unwrap();
        let poset = verify_poset_nerve(&as_poset_cover(&pieces, l).unwrap(), &b).unwrap();
        prop_assert_eq!(classical.verdict.outcome, poset.verdict.outcome);
        if classical.verdict.outcome == Outcome::Pass {
            prop_assert_eq!(&classical.complex_groups, &poset.total_groups);
            prop_assert_eq!(&classical.nerve_groups, &poset.index_groups);
        }
    }

    #[test]
    fn small_budgets_never_flip_verdicts(seed in any::<u64>(), chains in 1u64..400) {
        let x = poset(seed, 16);
        let d = x.dimension();
        let full = is_acyclic_through(&x, d, &Budget::default()).unwrap();
        let tight = Budget { chains, ..Budget::default() };
        match is_acyclic_through(&x, d, &tight) {
            Ok(v) => prop_assert_eq!(v, full),
            Err(e) => prop_assert!(matches!(e, Error::BudgetExceeded(_))),
        }
    }
}

#[test]
fn bound_rows_degrade_to_inconclusive() {
    let req = BoundRequest::new(BoundTheorem::Bw1, ModulusRing::new(2).unwrap(), 3, 0);
    let full = verify_bound(&req, &Budget::default()).unwrap();
    assert_eq!(full.outcome, Outcome::Pass);
    for elements in [10, 100, 1000, 10_000] {
        let tight = Budget { elements, ..Budget::default() };
        let row = verify_bound(&req, &tight).unwrap();
        assert!(row.outcome == Outcome::Inconclusive || row.outcome == full.outcome, "{row:?}");
    }
}
