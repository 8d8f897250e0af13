//! Small covers with known answers, used as positive and negative controls.

use super::classical::SimplicialComplex;
use super::cover::PosetCover;
use crate::error::Result;
use crate::poset::SequencePoset;

/// The octahedron covered by its eight triangles.
pub fn octahedron_by_faces() -> (SimplicialComplex, Vec<SimplicialComplex>) {
    let k = SimplicialComplex::octahedron();
    let pieces = k
        .simplices()
        .iter()
        .filter(|s| s.len() == 3)
        .map(|s| SimplicialComplex::from_facets(&[s.clone()]).expect("a triangle"))
        .collect();
    (k, pieces)
}

/// A hexagon covered by two arcs of three edges; they meet in two points.
pub fn hexagon_by_arcs() -> (SimplicialComplex, Vec<SimplicialComplex>) {
    let edges: Vec<Vec<u32>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
    let k = SimplicialComplex::from_facets(&edges).expect("edges");
    let a = SimplicialComplex::from_facets(&edges[0..3]).expect("arc");
    let b = SimplicialComplex::from_facets(&edges[3..6]).expect("arc");
    (k, vec![a, b])
}

/// The hexagon face poset indexed by `F = O({1, 2})`: `X_1` and `X_2` are
/// the two arcs and `X_{12}` their two common vertices.
pub fn circle_arc_cover(l: i64) -> Result<PosetCover<u32, u32>> {
    let f = SequencePoset::new(vec![1, 2], vec![vec![1], vec![2], vec![1, 2]])?;
    let arc = |a: u32| -> Vec<Vec<u32>> {
        let mut m: Vec<Vec<u32>> = (a..a + 4).map(|i| vec![i % 6]).collect();
        m.extend((a..a + 3).map(|i| vec![i % 6, (i + 1) % 6]));
        m
    };
    let (a, b) = (arc(0), arc(3));
    let common: Vec<Vec<u32>> = a.iter().filter(|m| b.contains(m)).cloned().collect();
    PosetCover::new(f, vec![a, b, common], l)
}
