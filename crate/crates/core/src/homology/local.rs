use std::collections::VecDeque;

use serde::Serialize;

use super::report::functor_homology;
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dense_smith, invariant_factors, AbelianGroup, IntMatrix, SparseIntMatrix};
use crate::poset::{FinitePoset, LocalSystem};

fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let s = dense_smith(m, true, &Budget::default())?;
    if s.diag.len() != m.rows() || s.diag.iter().any(|&d| d != 1) {
        return Err(Error::InvalidInput("structure map is not invertible over Z".into()));
    }
    // U M V = I, so M^{-1} = V U
    s.v.expect("tracked").mul(&s.u.expect("tracked"))
}

/// Loop monodromies at a basepoint: one per cover edge off a spanning tree of
/// the Hasse diagram.
pub struct Monodromy {
    pub basepoint: usize,
    pub loops: Vec<((usize, usize), IntMatrix)>,
}

pub fn monodromy(poset: &FinitePoset, system: &LocalSystem, basepoint: usize) -> Result<Monodromy> {
    let n = poset.len();
    if basepoint >= n {
        return invalid("basepoint not in poset");
    }
    if !poset.is_connected() {
        return invalid("poset is not connected");
    }
    let f = system.functor();
    // transport[x]: L(x) -> L(base) along the tree path
    let mut transport: Vec<Option<IntMatrix>> = vec![None; n];
    let mut tree_edge = std::collections::HashSet::new();
    transport[basepoint] = Some(IntMatrix::identity(f.rank(basepoint)));
    let mut queue = VecDeque::from([basepoint]);
    while let Some(x) = queue.pop_front() {
        let tx = transport[x].clone().expect("visited");
        for &y in poset.covers_up(x) {
            let y = y as usize;
            if transport[y].is_none() {
                // L(x) -> L(y) is m; T_y = T_x m^{-1}
                let m = f.cover_map(x, y).expect("cover");
                transport[y] = Some(tx.mul(&unimodular_inverse(m)?)?);
                tree_edge.insert((x, y));
                queue.push_back(y);
            }
        }
        for &y in poset.covers_down(x) {
            let y = y as usize;
            if transport[y].is_none() {
                let m = f.cover_map(y, x).expect("cover");
                transport[y] = Some(tx.mul(m)?);
                tree_edge.insert((y, x));
                queue.push_back(y);
            }
        }
    }
    let mut loops = Vec::new();
    for (a, b) in poset.cover_pairs() {
        if tree_edge.contains(&(a, b)) {
            continue;
        }
        let ta = transport[a].as_ref().expect("connected");
        let tb = transport[b].as_ref().expect("connected");
        // base -> a -> b -> base
        let beta = tb.mul(f.cover_map(a, b).expect("cover"))?.mul(&unimodular_inverse(ta)?)?;
        loops.push(((a, b), beta));
    }
    Ok(Monodromy { basepoint, loops })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoinvariantReport {
    pub coinvariants: AbelianGroup,
    pub functor_h0: AbelianGroup,
    pub agrees: bool,
    pub loop_count: usize,
}

/// `L(x) / <a - beta a>` over loop generators `beta`, compared against
/// `H_0(X, L)` from the functor complex.
pub fn h0_coinvariants(poset: &FinitePoset, system: &LocalSystem, basepoint: usize, budget: &Budget) -> Result<CoinvariantReport> {
    let mono = monodromy(poset, system, basepoint)?;
    let r = system.functor().rank(basepoint);
    let mut triplets = Vec::new();
    for (j, (_, beta)) in mono.loops.iter().enumerate() {
        for row in 0..r {
            for col in 0..r {
                let v = i64::from(row == col) - beta.get(row, col);
                if v != 0 {
                    triplets.push((row, j * r + col, v));
                }
            }
        }
    }
    let g = SparseIntMatrix::from_triplets(r, mono.loops.len() * r, triplets)?;
    let coinvariants = AbelianGroup::cokernel(r, &invariant_factors(&g, budget)?);
    let h = functor_homology(system.functor(), "local-system", 0, budget)?;
    let functor_h0 = h.group(0).unwrap_or_default();
    Ok(CoinvariantReport { agrees: coinvariants == functor_h0, coinvariants, functor_h0, loop_count: mono.loops.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constancy {
    Constant,
    Nonconstant,
}

/// Constant iff every loop generator acts trivially.
pub fn local_system_constancy(poset: &FinitePoset, system: &LocalSystem) -> Result<Constancy> {
    if poset.is_empty() {
        return invalid("poset is empty");
    }
    let mono = monodromy(poset, system, 0)?;
    Ok(if mono.loops.iter().all(|(_, b)| b.is_identity()) { Constancy::Constant } else { Constancy::Nonconstant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn hexagon_with_sign_flip() {
        let hex = Arc::new(FinitePoset::crown(3));
        let (a, b) = hex.cover_pairs().next().unwrap();
        let twisted = LocalSystem::signed(hex.clone(), &[(a, b)]).unwrap();
        let r = h0_coinvariants(&hex, &twisted, 0, &Budget::default()).unwrap();
        assert_eq!(r.coinvariants.torsion, vec![2]);
        assert!(r.agrees);
        assert_eq!(local_system_constancy(&hex, &twisted).unwrap(), Constancy::Nonconstant);
        let trivial = LocalSystem::signed(hex.clone(), &[]).unwrap();
        let r = h0_coinvariants(&hex, &trivial, 0, &Budget::default()).unwrap();
        assert_eq!(r.coinvariants, AbelianGroup::free(1));
        assert_eq!(local_system_constancy(&hex, &trivial).unwrap(), Constancy::Constant);
    }

    #[test]
    fn disconnected_is_rejected() {
        let p = Arc::new(FinitePoset::antichain(2));
        let l = LocalSystem::signed(p.clone(), &[]).unwrap();
        assert!(h0_coinvariants(&p, &l, 0, &Budget::default()).is_err());
    }
}
