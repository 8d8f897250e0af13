use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::finite::FinitePoset;
use super::map::PosetMap;
use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dense_smith, IntMatrix};

/// A functor from a finite poset to free abelian groups: `F(x) = Z^{rank(x)}`
/// and an integer matrix `F(x <= y)` of shape `rank(y) x rank(x)` for each
/// cover. Maps along longer relations are composed on demand and cached.
#[derive(Debug)]
pub struct CoefficientFunctor {
    poset: Arc<FinitePoset>,
    ranks: Vec<usize>,
    covers: HashMap<(u32, u32), IntMatrix>,
    cache: Mutex<HashMap<(u32, u32), IntMatrix>>,
}

impl Clone for CoefficientFunctor {
    fn clone(&self) -> Self {
        CoefficientFunctor {
            poset: self.poset.clone(),
            ranks: self.ranks.clone(),
            covers: self.covers.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl CoefficientFunctor {
    /// Checks shapes and functoriality (every square of covers commutes).
    pub fn new(poset: Arc<FinitePoset>, ranks: Vec<usize>, covers: HashMap<(usize, usize), IntMatrix>) -> Result<Self> {
        if ranks.len() != poset.len() {
            return invalid("one rank per element required");
        }
        let mut stored = HashMap::new();
        for (x, y) in poset.cover_pairs() {
            let m = match covers.get(&(x, y)) {
                Some(m) => m.clone(),
                None if ranks[x] == 0 || ranks[y] == 0 => IntMatrix::zeros(ranks[y], ranks[x]),
                None => {
                    return invalid(format!("missing structure map for {} < {}", poset.label(x), poset.label(y)));
                }
            };
            if (m.rows(), m.cols()) != (ranks[y], ranks[x]) {
                return invalid(format!(
                    "structure map {} < {} has shape {}x{}, expected {}x{}",
                    poset.label(x),
                    poset.label(y),
                    m.rows(),
                    m.cols(),
                    ranks[y],
                    ranks[x]
                ));
            }
            stored.insert((x as u32, y as u32), m);
        }
        if let Some(&(x, y)) = covers.keys().find(|&&(x, y)| !poset.covers_up(x).contains(&(y as u32))) {
            return invalid(format!("({x}, {y}) is not a cover relation"));
        }
        let f = CoefficientFunctor { poset, ranks, covers: stored, cache: Mutex::new(HashMap::new()) };
        f.check_functoriality()?;
        Ok(f)
    }

    pub fn constant(poset: Arc<FinitePoset>, rank: usize) -> Self {
        let covers = poset.cover_pairs().map(|(x, y)| ((x as u32, y as u32), IntMatrix::identity(rank))).collect();
        let ranks = vec![rank; poset.len()];
        CoefficientFunctor { poset, ranks, covers, cache: Mutex::new(HashMap::new()) }
    }

    pub fn zero(poset: Arc<FinitePoset>) -> Self {
        Self::constant(poset, 0)
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn rank(&self, x: usize) -> usize {
        self.ranks[x]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn cover_map(&self, x: usize, y: usize) -> Option<&IntMatrix> {
        self.covers.get(&(x as u32, y as u32))
    }

    /// `F(x <= y)`; `None` unless `x <= y`.
    pub fn map(&self, x: usize, y: usize) -> Option<IntMatrix> {
        if x == y {
            return Some(IntMatrix::identity(self.ranks[x]));
        }
        if !self.poset.less(x, y) {
            return None;
        }
        if let Some(m) = self.covers.get(&(x as u32, y as u32)) {
            return Some(m.clone());
        }
        if let Some(m) = self.cache.lock().expect("cache lock").get(&(x as u32, y as u32)) {
            return Some(m.clone());
        }
        let c = *self.poset.covers_up(x).iter().find(|&&c| self.poset.leq(c as usize, y))?;
        let m = self.map(c as usize, y)?.mul(&self.covers[&(x as u32, c)]).ok()?;
        self.cache.lock().expect("cache lock").insert((x as u32, y as u32), m.clone());
        Some(m)
    }

    /// Every pair of cover paths between the same endpoints agrees.
    pub fn check_functoriality(&self) -> Result<()> {
        for x in 0..self.poset.len() {
            let ups = self.poset.covers_up(x);
            if ups.len() < 2 {
                continue;
            }
            for &y in self.poset.above(x) {
                let mut reference: Option<(u32, IntMatrix)> = None;
                for &c in ups.iter().filter(|&&c| self.poset.leq(c as usize, y as usize)) {
                    let m = self
                        .map(c as usize, y as usize)
                        .ok_or_else(|| Error::Internal("missing composite".into()))?
                        .mul(&self.covers[&(x as u32, c)])?;
                    match &reference {
                        None => reference = Some((c, m)),
                        Some((c0, m0)) if *m0 != m => {
                            return invalid(format!(
                                "functoriality fails: {} < {} < {} and {} < {} < {} give different maps",
                                self.poset.label(x),
                                self.poset.label(*c0 as usize),
                                self.poset.label(y as usize),
                                self.poset.label(x),
                                self.poset.label(c as usize),
                                self.poset.label(y as usize)
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    /// `F o f` on the source of `f`.
    pub fn pullback(&self, f: &PosetMap) -> Result<CoefficientFunctor> {
        let src = f.source().clone();
        let ranks = (0..src.len()).map(|x| self.ranks[f.apply(x)]).collect();
        let covers = src
            .cover_pairs()
            .map(|(x, y)| {
                let m = self.map(f.apply(x), f.apply(y)).expect("order-preserving");
                ((x, y), m)
            })
            .collect();
        CoefficientFunctor::new(src, ranks, covers)
    }

    /// Restriction to an induced subposet given by original indices.
    pub fn restrict(&self, sub: Arc<FinitePoset>, indices: &[usize]) -> Result<CoefficientFunctor> {
        let inc = PosetMap::inclusion(sub, self.poset.clone(), indices)?;
        self.pullback(&inc)
    }

    /// Same values, but zero on every element with `keep(x) == false`. Valid
    /// when the kept set is down-closed or up-closed as appropriate; checked.
    pub fn masked<P: Fn(usize) -> bool>(&self, keep: P) -> Result<CoefficientFunctor> {
        let ranks: Vec<usize> = (0..self.poset.len()).map(|x| if keep(x) { self.ranks[x] } else { 0 }).collect();
        let covers = self
            .poset
            .cover_pairs()
            .map(|(x, y)| {
                let m = if ranks[x] > 0 && ranks[y] > 0 {
                    self.covers[&(x as u32, y as u32)].clone()
                } else {
                    IntMatrix::zeros(ranks[y], ranks[x])
                };
                ((x, y), m)
            })
            .collect();
        CoefficientFunctor::new(self.poset.clone(), ranks, covers)
    }
}

/// A functor all of whose structure maps are invertible over the integers.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    functor: CoefficientFunctor,
}

impl LocalSystem {
    pub fn new(functor: CoefficientFunctor) -> Result<Self> {
        let p = functor.poset().clone();
        for (x, y) in p.cover_pairs() {
            let m = functor.cover_map(x, y).expect("stored");
            if m.rows() != m.cols() {
                return invalid(format!("{} < {} is not square", p.label(x), p.label(y)));
            }
            let s = dense_smith(m, false, &Budget::default())?;
            if s.diag.len() != m.rows() || s.diag.iter().any(|&d| d != 1) {
                return invalid(format!("{} < {} is not invertible over Z", p.label(x), p.label(y)));
            }
        }
        Ok(LocalSystem { functor })
    }

    /// Rank-1 system with the given sign on each cover (`true` means `-1`).
    pub fn signed(poset: Arc<FinitePoset>, negative: &[(usize, usize)]) -> Result<Self> {
        let covers = poset
            .cover_pairs()
            .map(|(x, y)| {
                let s = if negative.contains(&(x, y)) { -1 } else { 1 };
                ((x, y), IntMatrix::from_rows(&[vec![s]]))
            })
            .collect();
        let n = poset.len();
        Self::new(CoefficientFunctor::new(poset, vec![1; n], covers)?)
    }

    pub fn functor(&self) -> &CoefficientFunctor {
        &self.functor
    }

    pub fn rank(&self) -> usize {
        self.functor.ranks().first().copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Arc<FinitePoset> {
        // 0 < 1, 0 < 2, 1 < 3, 2 < 3
        Arc::new(FinitePoset::new((0..4).map(|i| i.to_string()).collect(), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap())
    }

    #[test]
    fn detects_non_commuting_square() {
        let p = square();
        let one = IntMatrix::from_rows(&[vec![1]]);
        let two = IntMatrix::from_rows(&[vec![2]]);
        let mut covers = HashMap::new();
        covers.insert((0, 1), one.clone());
        covers.insert((0, 2), one.clone());
        covers.insert((1, 3), one.clone());
        covers.insert((2, 3), two.clone());
        let err = CoefficientFunctor::new(p.clone(), vec![1; 4], covers.clone()).unwrap_err();
        assert!(err.to_string().contains("functoriality"));
        covers.insert((1, 3), two);
        let f = CoefficientFunctor::new(p, vec![1; 4], covers).unwrap();
        assert_eq!(f.map(0, 3).unwrap().get(0, 0), 2);
    }

    #[test]
    fn local_system_requires_units() {
        let p = Arc::new(FinitePoset::chain(2));
        let mut covers = HashMap::new();
        covers.insert((0, 1), IntMatrix::from_rows(&[vec![2]]));
        let f = CoefficientFunctor::new(p.clone(), vec![1, 1], covers).unwrap();
        assert!(LocalSystem::new(f).is_err());
        assert!(LocalSystem::signed(p, &[(0, 1)]).is_ok());
    }

    #[test]
    fn pullback_of_constant_is_constant() {
        let p = square();
        let c = CoefficientFunctor::constant(p.clone(), 2);
        let f = PosetMap::identity(p);
        let g = c.pullback(&f).unwrap();
        assert_eq!(g.map(0, 3).unwrap(), IntMatrix::identity(2));
    }
}
