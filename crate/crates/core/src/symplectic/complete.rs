//! Completion of a unimodular frame to an adapted hyperbolic basis.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FrameMode, SymplecticMatrix, SymplecticSpace};
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::ring::{rows_unimodular, stable_rank};

#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicBasis {
    /// `x_1, y_1, ..., x_n, y_n`.
    pub basis: Vec<Vec<u64>>,
    /// Coordinates of the input vectors in this basis; all vanish past
    /// position `2k - 1`.
    pub coordinates: Vec<Vec<u64>>,
}

impl HyperbolicBasis {
    pub fn x(&self, i: usize) -> &[u64] {
        &self.basis[2 * (i - 1)]
    }

    pub fn y(&self, i: usize) -> &[u64] {
        &self.basis[2 * i - 1]
    }
}

/// A product of elementary generators sending `v` to `e_1`.
fn path_to_e1(space: &SymplecticSpace, v: &[u64], budget: &Budget) -> Result<SymplecticMatrix> {
    let total = space.vector_count().unwrap_or(u64::MAX);
    budget.check_elements(total, "vectors")?;
    let gens = space.elementary_generators()?;
    let start = space.encode(v);
    let target = space.encode(&space.e(1));
    let mut parent: Vec<Option<(u32, usize)>> = vec![None; total as usize];
    let mut seen = vec![false; total as usize];
    seen[start as usize] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        if c == target {
            break;
        }
        let x = space.decode(c);
        for (gi, g) in gens.iter().enumerate() {
            let d = space.encode(&g.apply(&x));
            if !seen[d as usize] {
                seen[d as usize] = true;
                parent[d as usize] = Some((c, gi));
                queue.push_back(d);
            }
        }
    }
    if !seen[target as usize] {
        return Err(Error::BudgetExceeded("e_1 is not in the elementary orbit of v_1".into()));
    }
    let mut m = SymplecticMatrix::identity(space.ring().modulus(), space.dim());
    let mut c = target;
    while let Some((prev, gi)) = parent[c as usize] {
        m = m.mul(&gens[gi]);
        c = prev;
    }
    Ok(m)
}

/// A symplectic `M` with `M w_i` in `<e_1, ..., e_{2k-1}>` for every row.
fn reduce(space: &SymplecticSpace, w: &[Vec<u64>], budget: &Budget) -> Result<SymplecticMatrix> {
    let ring = space.ring();
    let d = space.dim();
    if w.is_empty() {
        return Ok(SymplecticMatrix::identity(ring.modulus(), d));
    }
    let g = path_to_e1(space, &w[0], budget)?;
    let u: Vec<Vec<u64>> = w.iter().map(|x| g.apply(x)).collect();
    if u[0] != space.e(1) {
        return Err(Error::Internal("elementary path does not reach e_1".into()));
    }
    if w.len() == 1 {
        return Ok(g);
    }
    // s = (s_3, ..., s_{2n}) making the shifted tail of rows 2..k unimodular
    let count = ring.count(d - 2).ok_or(Error::Overflow("search space"))?;
    budget.check_elements(count, "stable range search")?;
    let mut order: Vec<u64> = (0..count).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed_0000 + d as u64));
    let shifted = |s: &[u64]| -> Vec<Vec<u64>> {
        u[1..].iter().map(|row| (2..d).map(|j| ring.add(row[j], ring.mul(s[j - 2], row[1]))).collect()).collect()
    };
    let s = order
        .into_iter()
        .map(|i| ring.decode(i, d - 2))
        .find(|s| rows_unimodular(ring, &shifted(s)))
        .ok_or_else(|| Error::BudgetExceeded("no stable range vector found".into()))?;
    let c = shifted(&s);
    let mut e = SymplecticMatrix::identity(ring.modulus(), d);
    for i in 3..=d {
        e = e.mul(&space.elementary_generator(2, i, s[i - 3])?);
    }
    let et = e.transpose();
    let moved: Vec<Vec<u64>> = u.iter().map(|x| et.apply(x)).collect();
    if moved[0] != space.e(1) || moved[1..].iter().zip(&c).any(|(m, row)| m[2..] != row[..]) {
        return Err(Error::Internal("column operation did not produce the expected tail".into()));
    }
    let small = SymplecticSpace::new(ring.clone(), space.n() - 1)?;
    let inner = reduce(&small, &c, budget)?;
    let mut lifted = SymplecticMatrix::identity(ring.modulus(), d);
    for r in 0..d - 2 {
        for col in 0..d - 2 {
            lifted.set(r + 2, col + 2, inner.get(r, col));
        }
    }
    Ok(lifted.mul(&et).mul(&g))
}

/// A hyperbolic basis `x_1, y_1, ..., x_n, y_n` with every `v_i` in
/// `<x_1, y_1, ..., x_{k-1}, y_{k-1}, x_k>`. Needs `n >= sr(R) + k`.
/// Postconditions are re-verified; search failures are budget errors.
pub fn complete_to_hyperbolic(space: &SymplecticSpace, v: &[Vec<u64>], budget: &Budget) -> Result<HyperbolicBasis> {
    let k = v.len();
    if !space.is_frame(v, FrameMode::Unimodular) {
        return invalid("input is not a unimodular frame");
    }
    let sr = stable_rank(space.ring(), budget)? as usize;
    if space.n() < sr + k {
        return invalid(format!("need n >= sr(R) + k = {}", sr + k));
    }
    let m = reduce(space, v, budget)?;
    let p = m.symplectic_inverse(space)?;
    let basis: Vec<Vec<u64>> = (0..space.dim()).map(|c| p.column(c)).collect();
    let coordinates: Vec<Vec<u64>> = v.iter().map(|x| m.apply(x)).collect();

    // postconditions
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let want = match (i % 2, j % 2) {
                (0, 1) if i / 2 == j / 2 => 1,
                (1, 0) if i / 2 == j / 2 => space.ring().neg(1),
                _ => 0,
            };
            if space.form_unchecked(a, b) != want {
                return Err(Error::Internal(format!("basis vectors {i} and {j} violate the hyperbolic relations")));
            }
        }
    }
    if !m.mul(&p).is_identity() || !space.is_frame(&basis, FrameMode::Unimodular) {
        return Err(Error::Internal("basis does not span".into()));
    }
    for (x, coords) in v.iter().zip(&coordinates) {
        if coords[2 * k - 1..].iter().any(|&c| c != 0) {
            return Err(Error::Internal("frame vector outside the required span".into()));
        }
        let back = p.apply(coords);
        if &back != x {
            return Err(Error::Internal("coordinates do not reproduce the vector".into()));
        }
    }
    Ok(HyperbolicBasis { basis, coordinates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ModulusRing;

    #[test]
    fn standard_vector_gives_standard_basis() {
        let s = SymplecticSpace::new(ModulusRing::new(2).unwrap(), 2).unwrap();
        let b = complete_to_hyperbolic(&s, &[s.e(1)], &Budget::default()).unwrap();
        assert_eq!(b.basis, vec![s.e(1), s.e(2), s.e(3), s.e(4)]);
    }

    #[test]
    fn two_frame_in_rank_three() {
        let s = SymplecticSpace::new(ModulusRing::new(2).unwrap(), 3).unwrap();
        let v = vec![vec![1, 1, 0, 1, 0, 0], vec![0, 1, 1, 0, 1, 1]];
        let b = complete_to_hyperbolic(&s, &v, &Budget::default()).unwrap();
        assert!(b.coordinates.iter().all(|c| c[3..].iter().all(|&x| x == 0)));
    }

    #[test]
    fn rejects_too_long_frames() {
        let s = SymplecticSpace::new(ModulusRing::new(2).unwrap(), 2).unwrap();
        assert!(complete_to_hyperbolic(&s, &[s.e(1), s.e(3)], &Budget::default()).is_err());
    }
}
