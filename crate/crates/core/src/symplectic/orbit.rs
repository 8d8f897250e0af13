//! Orbits of the elementary symplectic group on frames.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::enumerate::{enumerate_hyperbolic, enumerate_isotropic};
use super::{FrameMode, SymplecticSpace};
use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::ring::stable_rank;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitSeed {
    /// An isotropic frame `(x_1, ..., x_k)`.
    Isotropic(Vec<Vec<u64>>),
    /// A hyperbolic frame `((x_1, y_1), ..., (x_k, y_k))`.
    Hyperbolic(Vec<(Vec<u64>, Vec<u64>)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub seed: Vec<Vec<u64>>,
    pub kind: &'static str,
    pub k: usize,
    pub orbit_size: usize,
    /// Whether the search closed before hitting the element budget.
    pub complete: bool,
    pub level_size: Option<usize>,
    /// Orbit equals the whole level; only decided when `n >= sr(R) + k`.
    pub transitive: Option<bool>,
    /// Every generator maps the orbit into itself.
    pub closed: bool,
}

/// Closure of `seed` under every `E_{i,j}(r)`, compared with the full
/// level of `IU` or `HU` when `n >= sr(R) + k`.
pub fn esp_orbit(space: &SymplecticSpace, seed: &OrbitSeed, budget: &Budget) -> Result<OrbitReport> {
    let (flat, kind, k): (Vec<Vec<u64>>, &'static str, usize) = match seed {
        OrbitSeed::Isotropic(xs) => {
            if !space.is_frame(xs, FrameMode::Isotropic) {
                return invalid("seed is not an isotropic frame");
            }
            (xs.clone(), "isotropic", xs.len())
        }
        OrbitSeed::Hyperbolic(pairs) => {
            let xs: Vec<Vec<u64>> = pairs.iter().map(|p| p.0.clone()).collect();
            let ys: Vec<Vec<u64>> = pairs.iter().map(|p| p.1.clone()).collect();
            let dual = xs.iter().enumerate().all(|(i, x)| {
                ys.iter().enumerate().all(|(j, y)| space.form(x, y).map_or(false, |v| v == u64::from(i == j)))
            });
            if pairs.is_empty()
                || !dual
                || !space.is_frame(&xs, FrameMode::Isotropic)
                || !space.is_frame(&ys, FrameMode::Isotropic)
            {
                return invalid("seed is not a hyperbolic frame");
            }
            (pairs.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect(), "hyperbolic", pairs.len())
        }
    };
    let total = space.vector_count().unwrap_or(u64::MAX);
    budget.check_elements(total, "vectors")?;
    let gens = space.elementary_generators()?;
    let tables: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| (0..total as u32).map(|c| space.encode(&g.apply(&space.decode(c)))).collect())
        .collect();
    let start: Vec<u32> = flat.iter().map(|v| space.encode(v)).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    let mut complete = true;
    'bfs: while let Some(s) = queue.pop_front() {
        for t in &tables {
            let image: Vec<u32> = s.iter().map(|&c| t[c as usize]).collect();
            if seen.insert(image.clone()) {
                if seen.len() as u64 > budget.elements {
                    complete = false;
                    break 'bfs;
                }
                order.push(image.clone());
                queue.push_back(image);
            }
        }
        budget.check_time()?;
    }
    let closed = complete && order.iter().all(|s| tables.iter().all(|t| seen.contains(&s.iter().map(|&c| t[c as usize]).collect::<Vec<_>>())));
    let sr = stable_rank(space.ring(), budget)? as usize;
    let mut report = OrbitReport {
        seed: flat,
        kind,
        k,
        orbit_size: seen.len(),
        complete,
        level_size: None,
        transitive: None,
        closed,
    };
    if !complete {
        return Ok(report);
    }
    let level: HashSet<Vec<u32>> = match seed {
        OrbitSeed::Isotropic(_) => {
            let iu = enumerate_isotropic(space, k, budget)?;
            iu.members()[iu.length_range(k)].iter().cloned().collect()
        }
        OrbitSeed::Hyperbolic(_) => {
            let hu = enumerate_hyperbolic(space, k, budget)?;
            hu.members()[hu.length_range(k)].iter().map(|m| m.iter().flat_map(|&(x, y)| [x, y]).collect()).collect()
        }
    };
    report.level_size = Some(level.len());
    if space.n() >= sr + k {
        report.transitive = Some(seen.is_subset(&level) && seen.len() == level.len());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ModulusRing;

    #[test]
    fn vector_orbit_over_z2() {
        let s = SymplecticSpace::new(ModulusRing::new(2).unwrap(), 2).unwrap();
        let r = esp_orbit(&s, &OrbitSeed::Isotropic(vec![s.e(1)]), &Budget::default()).unwrap();
        assert_eq!((r.orbit_size, r.level_size, r.transitive, r.closed), (15, Some(15), Some(true), true));
    }

    #[test]
    fn rejects_non_frames() {
        let s = SymplecticSpace::new(ModulusRing::new(2).unwrap(), 2).unwrap();
        assert!(esp_orbit(&s, &OrbitSeed::Isotropic(vec![s.e(1), s.e(2)]), &Budget::default()).is_err());
        assert!(esp_orbit(&s, &OrbitSeed::Hyperbolic(vec![(s.e(1), s.e(3))]), &Budget::default()).is_err());
    }
}
