use std::sync::Arc;

use super::finite::FinitePoset;
use crate::error::{invalid, Result};

/// An order-preserving map between finite posets.
#[derive(Clone, Debug)]
pub struct PosetMap {
    source: Arc<FinitePoset>,
    target: Arc<FinitePoset>,
    assignment: Vec<u32>,
}

impl PosetMap {
    pub fn new(source: Arc<FinitePoset>, target: Arc<FinitePoset>, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return invalid(format!(
                "assignment has {} entries for {} source elements",
                assignment.len(),
                source.len()
            ));
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= target.len()) {
            return invalid(format!("image {y} not in target"));
        }
        // checking covers suffices for order preservation
        for (x, x2) in source.cover_pairs() {
            if !target.leq(assignment[x], assignment[x2]) {
                return invalid(format!(
                    "not order-preserving: {} <= {} but f({}) !<= f({})",
                    source.label(x),
                    source.label(x2),
                    source.label(x),
                    source.label(x2)
                ));
            }
        }
        let assignment = assignment.into_iter().map(|y| y as u32).collect();
        Ok(PosetMap { source, target, assignment })
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let assignment = (0..p.len() as u32).collect();
        PosetMap { source: p.clone(), target: p, assignment }
    }

    pub fn constant(source: Arc<FinitePoset>, target: Arc<FinitePoset>, y: usize) -> Result<Self> {
        let n = source.len();
        Self::new(source, target, vec![y; n])
    }

    /// Inclusion of an induced subposet given by original indices.
    pub fn inclusion(sub: Arc<FinitePoset>, ambient: Arc<FinitePoset>, indices: &[usize]) -> Result<Self> {
        Self::new(sub, ambient, indices.to_vec())
    }

    pub fn source(&self) -> &Arc<FinitePoset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x] as usize
    }

    pub fn assignment(&self) -> Vec<usize> {
        self.assignment.iter().map(|&y| y as usize).collect()
    }

    pub fn compose(&self, then: &PosetMap) -> Result<PosetMap> {
        if !Arc::ptr_eq(&self.target, &then.source) && *self.target != *then.source {
            return invalid("maps are not composable");
        }
        let assignment = self.assignment.iter().map(|&y| then.apply(y as usize)).collect();
        PosetMap::new(self.source.clone(), then.target.clone(), assignment)
    }

    /// `f/y = {x : f(x) <= y}` with the original indices of its elements.
    pub fn fiber_under(&self, y: usize) -> Result<(FinitePoset, Vec<usize>)> {
        if y >= self.target.len() {
            return invalid(format!("{y} is not an element of the target"));
        }
        let members: Vec<usize> = (0..self.source.len()).filter(|&x| self.target.leq(self.apply(x), y)).collect();
        Ok((self.source.induced(&members), members))
    }

    /// `y\f = {x : f(x) >= y}` with the original indices of its elements.
    pub fn fiber_over(&self, y: usize) -> Result<(FinitePoset, Vec<usize>)> {
        if y >= self.target.len() {
            return invalid(format!("{y} is not an element of the target"));
        }
        let members: Vec<usize> = (0..self.source.len()).filter(|&x| self.target.leq(y, self.apply(x))).collect();
        Ok((self.source.induced(&members), members))
    }

    pub fn opposite(&self) -> PosetMap {
        PosetMap {
            source: Arc::new(self.source.opposite()),
            target: Arc::new(self.target.opposite()),
            assignment: self.assignment.clone(),
        }
    }

    /// True if `f(x) <= g(x)` for all `x`.
    pub fn pointwise_leq(&self, other: &PosetMap) -> bool {
        self.assignment.len() == other.assignment.len()
            && (0..self.assignment.len()).all(|x| self.target.leq(self.apply(x), other.apply(x)))
    }
}

/// A strictly increasing map to the non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    values: Vec<u32>,
}

impl HeightFunction {
    pub fn new(poset: &FinitePoset, values: Vec<u32>) -> Result<Self> {
        if values.len() != poset.len() {
            return invalid("height function length mismatch");
        }
        for (x, y) in poset.cover_pairs() {
            if values[x] >= values[y] {
                return invalid(format!(
                    "height not strictly increasing on {} < {}",
                    poset.label(x),
                    poset.label(y)
                ));
            }
        }
        Ok(HeightFunction { values })
    }

    /// `ht(x) = 1 + dim Link^-(x)`.
    pub fn standard(poset: &FinitePoset) -> Self {
        HeightFunction { values: poset.standard_heights() }
    }

    pub fn get(&self, x: usize) -> u32 {
        self.values[x]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibers() {
        let x = Arc::new(FinitePoset::chain(2));
        let y = Arc::new(FinitePoset::chain(2));
        let f = PosetMap::new(x.clone(), y.clone(), vec![0, 1]).unwrap();
        let (fib, idx) = f.fiber_under(0).unwrap();
        assert_eq!((fib.len(), idx), (1, vec![0]));
        assert!(f.fiber_under(5).is_err());
        let c = PosetMap::constant(x.clone(), Arc::new(FinitePoset::chain(1)), 0).unwrap();
        assert_eq!(c.fiber_under(0).unwrap().0.len(), 2);
        // id/y = Y_{<=y}
        let s = Arc::new(FinitePoset::simplex_boundary(2));
        let id = PosetMap::identity(s.clone());
        for y in 0..s.len() {
            let (fib, idx) = id.fiber_under(y).unwrap();
            assert_eq!(idx.len(), s.below(y).len() + 1);
            assert!(fib.maximum().is_some());
        }
    }

    #[test]
    fn rejects_non_monotone() {
        let x = Arc::new(FinitePoset::chain(2));
        assert!(PosetMap::new(x.clone(), x.clone(), vec![1, 0]).is_err());
        assert!(PosetMap::new(x.clone(), x, vec![0]).is_err());
    }

    #[test]
    fn heights() {
        let p = FinitePoset::simplex_boundary(2);
        let h = HeightFunction::standard(&p);
        assert!(HeightFunction::new(&p, h.values().to_vec()).is_ok());
        assert!(HeightFunction::new(&p, vec![0; 6]).is_err());
    }
}
