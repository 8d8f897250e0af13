use framecomplex::homology::{sequence_homology, HomologyRequest};
use framecomplex::nerve::{
    bw1_cover, bw2_cover, first_uncovered, random_restrictions, verify_maazen5, verify_poset_nerve,
    verify_surjectivity, PosetCover,
};
use framecomplex::ring::ModulusRing;
use framecomplex::symplectic::{enumerate_hyperbolic, enumerate_isotropic, enumerate_relative, SymplecticSpace};
use framecomplex::{Budget, Outcome};

fn space(n: usize) -> SymplecticSpace {
    SymplecticSpace::new(ModulusRing::new(2).unwrap(), n).unwrap()
}

#[test]
fn bw1_cover_of_iu6_at_level_zero() {
    let s = space(3);
    let b = Budget::default();
    let cover = bw1_cover(&s, 0, &b).unwrap();
    let iu = enumerate_isotropic(&s, 2, &b).unwrap();
    assert_eq!(first_uncovered(&cover, &iu, 2), None);
    let r = verify_poset_nerve(&cover, &b).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Pass, "{:?}", r.verdict);
    assert_eq!(r.index_groups.len(), 1);
    assert_eq!(r.index_groups[0].free_rank, 1);
    assert_eq!(r.total_groups[0].free_rank, 1);
}

#[test]
fn random_restrictions_of_bw1_cover() {
    let s = space(3);
    let b = Budget::default();
    let cover = bw1_cover(&s, 0, &b).unwrap();
    let covers = random_restrictions(&cover, 20, 400, 17, &b).unwrap();
    assert_eq!(covers.len(), 20);
    for c in &covers {
        let r = verify_poset_nerve(c, &b).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Pass, "{:?}", r.verdict);
    }
}

#[test]
fn bw1_alpha_is_relative_frame_poset() {
    let s = space(2);
    let b = Budget::default();
    let cover = bw1_cover(&s, 0, &b).unwrap();
    for x in cover.total().members().iter().take(40) {
        let alpha = cover.alpha(x).unwrap();
        let rows: Vec<Vec<u64>> = x.iter().map(|&c| s.decode(c)).collect();
        let rel = enumerate_relative(&s, &rows, 2, false, &b).unwrap();
        let mut expected: Vec<String> = rel.members().iter().map(|m| format!("{m:?}")).collect();
        let mut got: Vec<String> = alpha.labels().to_vec();
        expected.sort();
        got.sort();
        assert_eq!(got, expected, "x = {x:?}");
    }
}

#[test]
fn bw2_cover_of_hu4_at_its_bound() {
    let s = space(2);
    let b = Budget::default();
    let cover = bw2_cover(&s, -1, &b).unwrap();
    let hu = enumerate_hyperbolic(&s, 1, &b).unwrap();
    assert_eq!(first_uncovered(&cover, &hu, 1), None);
    let v = verify_surjectivity(&cover, None, &b).unwrap();
    assert_eq!(v.outcome, Outcome::Pass, "{v:?}");
}

#[test]
fn maazen5_on_iu4() {
    let s = space(2);
    let b = Budget::default();
    let iu = enumerate_isotropic(&s, 2, &b).unwrap();
    let v = verify_maazen5(&iu, &[0u8, 1], &0, 0, &b).unwrap();
    assert_eq!(v.outcome, Outcome::Pass, "{v:?}");
}

#[test]
fn charn_sizes_and_homology() {
    let b = Budget::default();
    let iu6 = enumerate_isotropic(&space(3), 3, &b).unwrap();
    let e1 = space(3).encode(&space(3).e(1));
    let rel = iu6.sub_after(&[e1]);
    let iu4 = enumerate_isotropic(&space(2), 2, &b).unwrap();
    let zero = 0u32;
    let e1_4 = space(2).encode(&space(2).e(1));
    let tensor = iu4.tensor_with_set(&[zero, e1_4]).unwrap();
    assert_eq!(rel.len(), 390);
    assert_eq!(tensor.len(), 390);
    let req = HomologyRequest::unreduced(1);
    let a = sequence_homology(&rel, "a", &req, &b).unwrap();
    let t = sequence_homology(&tensor, "t", &req, &b).unwrap();
    assert_eq!(a.groups, t.groups);
}

#[test]
fn restricted_cover_keeps_structure() {
    let s = space(2);
    let b = Budget::default();
    let cover: PosetCover<u32, u32> = bw1_cover(&s, 0, &b).unwrap();
    assert!(cover.structure_violation().is_none());
}
