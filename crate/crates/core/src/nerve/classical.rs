use serde::Serialize;

use super::cover::PosetCover;
use super::poset_nerve::{first_false, groups_through};
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::homology::sequence_acyclic_through;
use crate::linalg::AbelianGroup;
use crate::poset::{FinitePoset, SequencePoset};
use crate::verdict::{Outcome, Verdict};

pub const CLASSICAL_CHECK: &str = "h-n";

/// A finite simplicial complex, stored as all of its simplices (each a
/// strictly increasing vertex list).
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    faces: SequencePoset<u32>,
}

impl SimplicialComplex {
    /// The complex generated by `facets`.
    pub fn from_facets(facets: &[Vec<u32>]) -> Result<Self> {
        let mut simplices = Vec::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                return invalid("empty facet");
            }
            if f.len() > 20 {
                return invalid("facets of dimension above 19 are not supported");
            }
            for mask in 1u32..(1 << f.len()) {
                simplices.push((0..f.len()).filter(|b| mask >> b & 1 == 1).map(|b| f[b]).collect::<Vec<u32>>());
            }
        }
        Ok(Self::from_simplices(simplices))
    }

    fn from_simplices(simplices: Vec<Vec<u32>>) -> Self {
        let mut ground: Vec<u32> = simplices.iter().flatten().copied().collect();
        ground.sort_unstable();
        ground.dedup();
        SimplicialComplex { faces: SequencePoset::from_sorted_unchecked(ground, simplices) }
    }

    pub fn vertices(&self) -> &[u32] {
        self.faces.ground()
    }

    pub fn simplices(&self) -> &[Vec<u32>] {
        self.faces.members()
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        self.faces.contains(simplex)
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices().iter().all(|s| other.contains(s))
    }

    pub fn intersection(&self, other: &SimplicialComplex) -> SimplicialComplex {
        Self::from_simplices(self.simplices().iter().filter(|s| other.contains(s)).cloned().collect())
    }

    /// Simplices as increasing sequences: a chain-condition sequence poset
    /// whose face complex is the simplicial chain complex.
    pub fn as_sequences(&self) -> &SequencePoset<u32> {
        &self.faces
    }

    /// The poset of simplices ordered by inclusion.
    pub fn face_poset(&self) -> FinitePoset {
        self.faces.to_finite_with(|s| format!("{s:?}"))
    }

    /// Unreduced integer homology through degree `l`.
    pub fn homology_through(&self, l: i64, budget: &Budget) -> Result<Vec<AbelianGroup>> {
        groups_through(&self.faces, l, budget)
    }

    /// Boundary of the octahedron, vertices `0..6` with `i` opposite `i+3`.
    pub fn octahedron() -> Self {
        let mut facets = Vec::new();
        for a in [0, 3] {
            for b in [1, 4] {
                for c in [2, 5] {
                    facets.push(vec![a, b, c]);
                }
            }
        }
        Self::from_facets(&facets).expect("valid facets")
    }
}

/// `N = {sigma : the K_i, i in sigma, have a common simplex}` on the index
/// set `0..pieces.len()`.
pub fn nerve_complex(pieces: &[SimplicialComplex]) -> Result<SimplicialComplex> {
    let mut vertices: Vec<u32> = pieces.iter().flat_map(|p| p.vertices().iter().copied()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let mut facets: Vec<Vec<u32>> = vertices
        .iter()
        .map(|&x| (0..pieces.len() as u32).filter(|&i| pieces[i as usize].contains(&[x])).collect())
        .collect();
    facets.sort();
    facets.dedup();
    SimplicialComplex::from_facets(&facets)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalNerveReport {
    pub verdict: Verdict,
    pub l: i64,
    pub nerve_simplices: Vec<Vec<u32>>,
    pub complex_groups: Vec<AbelianGroup>,
    pub nerve_groups: Vec<AbelianGroup>,
}

/// Checks that every nonempty intersection of `t` pieces is
/// `(l-t+1)`-acyclic, builds the nerve, and compares `H_k(K)` with `H_k(N)`
/// for `k <= l`.
pub fn classical_nerve(
    complex: &SimplicialComplex,
    pieces: &[SimplicialComplex],
    l: i64,
    budget: &Budget,
) -> Result<ClassicalNerveReport> {
    let nerve = nerve_complex(pieces)?;
    let mut report = ClassicalNerveReport {
        verdict: Verdict::pass(CLASSICAL_CHECK),
        l,
        nerve_simplices: nerve.simplices().to_vec(),
        complex_groups: Vec::new(),
        nerve_groups: Vec::new(),
    };
    match classical_body(complex, pieces, &nerve, l, budget, &mut report) {
        Ok(v) => report.verdict = v,
        Err(Error::BudgetExceeded(msg)) => report.verdict = Verdict::inconclusive(CLASSICAL_CHECK, msg),
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn classical_body(
    complex: &SimplicialComplex,
    pieces: &[SimplicialComplex],
    nerve: &SimplicialComplex,
    l: i64,
    budget: &Budget,
    report: &mut ClassicalNerveReport,
) -> Result<Verdict> {
    if let Some(i) = pieces.iter().position(|p| !p.is_subcomplex_of(complex)) {
        return Ok(Verdict::violation(CLASSICAL_CHECK, format!("piece {i} is not a subcomplex of K")));
    }
    if let Some(s) = complex.simplices().iter().find(|s| !pieces.iter().any(|p| p.contains(s))) {
        return Ok(Verdict::violation(CLASSICAL_CHECK, format!("simplex {s:?} of K lies in no piece")));
    }
    // only intersections of at most l + 2 pieces carry a condition
    let max_t = (l + 2).max(0) as usize;
    let sigmas: Vec<&Vec<u32>> = nerve.simplices().iter().filter(|s| s.len() <= max_t).collect();
    let results: Vec<Result<bool>> = sigmas
        .iter()
        .map(|s| {
            let mut inter = pieces[s[0] as usize].clone();
            for &i in &s[1..] {
                inter = inter.intersection(&pieces[i as usize]);
            }
            sequence_acyclic_through(inter.as_sequences(), l - s.len() as i64 + 1, budget)
        })
        .collect();
    if let Some(i) = first_false(results)? {
        let s = sigmas[i];
        return Ok(Verdict::violation(
            CLASSICAL_CHECK,
            format!("intersection of pieces {s:?} is not {}-acyclic", l - s.len() as i64 + 1),
        ));
    }
    let hk = complex.homology_through(l, budget)?;
    let hn = nerve.homology_through(l, budget)?;
    report.complex_groups = hk.clone();
    report.nerve_groups = hn.clone();
    let mut v = Verdict::pass(CLASSICAL_CHECK).note(format!("nerve has {} simplices", nerve.len()));
    if hk != hn {
        v.outcome = Outcome::Fail;
        v = v.note("homology of K and of its nerve differ");
    }
    Ok(v)
}

/// The same cover as a poset cover: `F` is the nerve, `X` the simplices of
/// `K`, and `X_sigma` the simplices common to the pieces in `sigma`.
pub fn as_poset_cover(pieces: &[SimplicialComplex], l: i64) -> Result<PosetCover<u32, u32>> {
    let nerve = nerve_complex(pieces)?;
    let parts = nerve
        .simplices()
        .iter()
        .map(|s| {
            let mut inter = pieces[s[0] as usize].clone();
            for &i in &s[1..] {
                inter = inter.intersection(&pieces[i as usize]);
            }
            inter.simplices().to_vec()
        })
        .collect();
    PosetCover::new(nerve.as_sequences().clone(), parts, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon_arcs() -> (SimplicialComplex, Vec<SimplicialComplex>) {
        let edges: Vec<Vec<u32>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        let k = SimplicialComplex::from_facets(&edges).unwrap();
        let a = SimplicialComplex::from_facets(&edges[0..3]).unwrap();
        let b = SimplicialComplex::from_facets(&edges[3..6]).unwrap();
        (k, vec![a, b])
    }

    #[test]
    fn octahedron_by_faces() {
        let k = SimplicialComplex::octahedron();
        let pieces: Vec<SimplicialComplex> = k
            .simplices()
            .iter()
            .filter(|s| s.len() == 3)
            .map(|s| SimplicialComplex::from_facets(&[s.clone()]).unwrap())
            .collect();
        assert_eq!(pieces.len(), 8);
        let r = classical_nerve(&k, &pieces, 1, &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Pass, "{:?}", r.verdict);
        assert_eq!(r.complex_groups, vec![AbelianGroup::free(1), AbelianGroup::default()]);
        // the nerve is again a 2-sphere up to homotopy
        let n = SimplicialComplex::from_facets(&r.nerve_simplices).unwrap();
        assert_eq!(n.homology_through(2, &Budget::default()).unwrap()[2], AbelianGroup::free(1));
    }

    #[test]
    fn hexagon_by_two_arcs() {
        let (k, pieces) = hexagon_arcs();
        let r = classical_nerve(&k, &pieces, 0, &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Pass);
        assert_eq!(r.nerve_simplices, vec![vec![0], vec![1], vec![0, 1]]);
        let bad = classical_nerve(&k, &pieces, 1, &Budget::default()).unwrap();
        assert_eq!(bad.verdict.outcome, Outcome::HypothesisViolation);
    }

    #[test]
    fn cone_by_two_pieces() {
        // cone on a path 1-2-3 with apex 0, split along the edge {0, 2}
        let k = SimplicialComplex::from_facets(&[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        let a = SimplicialComplex::from_facets(&[vec![0, 1, 2]]).unwrap();
        let b = SimplicialComplex::from_facets(&[vec![0, 2, 3]]).unwrap();
        let r = classical_nerve(&k, &[a, b], 1, &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Pass);
        assert_eq!(r.nerve_groups, vec![AbelianGroup::free(1), AbelianGroup::default()]);
    }

    #[test]
    fn piece_outside_k_is_rejected() {
        let (k, mut pieces) = hexagon_arcs();
        pieces.push(SimplicialComplex::from_facets(&[vec![0, 3]]).unwrap());
        let r = classical_nerve(&k, &pieces, 0, &Budget::default()).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::HypothesisViolation);
    }
}
