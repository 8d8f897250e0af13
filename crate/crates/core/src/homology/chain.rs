use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{invariant_factors, rank_mod_prime, AbelianGroup, SparseIntMatrix};

/// A finite free chain complex `C_lo <- ... <- C_hi` with sparse boundaries.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    lo: i64,
    dims: Vec<usize>,
    /// `boundaries[i]` maps `C_{lo+i}` to `C_{lo+i-1}`; `boundaries[0]` is
    /// the zero map out of the lowest group.
    boundaries: Vec<SparseIntMatrix>,
    /// Degrees whose homology is fully determined by the stored groups.
    hi_exact: i64,
    /// Every differential of degree one (`d_1`) has columns `e_a - e_b`.
    simplicial: bool,
}

/// Homology group of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeGroup {
    pub degree: i64,
    pub group: AbelianGroup,
}

/// Per-prime Betti numbers when integer reduction was over budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeScreen {
    pub prime: u64,
    pub betti: Vec<(i64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomologyOutcome {
    Exact(Vec<DegreeGroup>),
    Screen(Vec<PrimeScreen>),
}

impl ChainComplex {
    /// `dims[i]` is the rank of `C_{lo+i}`; `boundaries[i]` for `i >= 1` maps
    /// `C_{lo+i}` to `C_{lo+i-1}`. Homology is exact through `hi_exact`.
    pub fn new(lo: i64, dims: Vec<usize>, boundaries: Vec<SparseIntMatrix>, hi_exact: i64, simplicial: bool) -> Result<Self> {
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::Internal("one boundary per adjacent pair of groups".into()));
        }
        let mut all = Vec::with_capacity(dims.len());
        all.push(SparseIntMatrix::zeros(0, dims.first().copied().unwrap_or(0)));
        for (i, b) in boundaries.into_iter().enumerate() {
            if b.rows() != dims[i] || b.cols() != dims[i + 1] {
                return Err(Error::Internal(format!(
                    "boundary into degree {} has shape {}x{}, expected {}x{}",
                    lo + i as i64,
                    b.rows(),
                    b.cols(),
                    dims[i],
                    dims[i + 1]
                )));
            }
            all.push(b);
        }
        let c = ChainComplex { lo, dims, boundaries: all, hi_exact, simplicial };
        c.check_square_zero()?;
        Ok(c)
    }

    fn check_square_zero(&self) -> Result<()> {
        let bad = (1..self.boundaries.len().saturating_sub(1)).into_par_iter().find_any(|&i| {
            let prod = self.boundaries[i].mul(&self.boundaries[i + 1]);
            !matches!(prod, Ok(p) if p.is_zero())
        });
        match bad {
            Some(i) => Err(Error::Internal(format!("boundary squares to nonzero at degree {}", self.lo + i as i64))),
            None => Ok(()),
        }
    }

    pub fn lowest_degree(&self) -> i64 {
        self.lo
    }

    /// Highest degree whose homology the complex determines.
    pub fn highest_exact_degree(&self) -> i64 {
        self.hi_exact
    }

    pub fn is_simplicial(&self) -> bool {
        self.simplicial
    }

    pub fn rank(&self, degree: i64) -> usize {
        let i = degree - self.lo;
        if i < 0 {
            return 0;
        }
        self.dims.get(i as usize).copied().unwrap_or(0)
    }

    /// `d_k: C_k -> C_{k-1}`.
    pub fn boundary(&self, degree: i64) -> SparseIntMatrix {
        let i = degree - self.lo;
        if i <= 0 || i as usize >= self.boundaries.len() {
            return SparseIntMatrix::zeros(self.rank(degree - 1), self.rank(degree));
        }
        self.boundaries[i as usize].clone()
    }

    pub(crate) fn boundary_ref(&self, degree: i64) -> Option<&SparseIntMatrix> {
        let i = degree - self.lo;
        if i <= 0 || i as usize >= self.boundaries.len() {
            return None;
        }
        Some(&self.boundaries[i as usize])
    }

    /// Exact integer homology in degrees `lo..=hi_exact`.
    pub fn homology(&self, budget: &Budget) -> Result<Vec<DegreeGroup>> {
        let degrees: Vec<i64> = (self.lo..=self.hi_exact).collect();
        // invariant factors of d_k for k in lo..=hi+1
        let factors: Vec<Result<Vec<u64>>> = (self.lo..=self.hi_exact + 1)
            .into_par_iter()
            .map(|k| match self.boundary_ref(k) {
                Some(b) => invariant_factors(b, budget),
                None => Ok(Vec::new()),
            })
            .collect();
        let factors = factors.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(degrees
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let rk = factors[i].len();
                let rk1 = factors[i + 1].len();
                let torsion: Vec<u64> = factors[i + 1].iter().copied().filter(|&d| d > 1).collect();
                DegreeGroup { degree: k, group: AbelianGroup { free_rank: self.rank(k) - rk - rk1, torsion } }
            })
            .collect())
    }

    /// Betti numbers over `F_p` for each prime, in degrees `lo..=hi_exact`.
    pub fn screen(&self, primes: &[u64]) -> Result<Vec<PrimeScreen>> {
        primes
            .iter()
            .map(|&p| {
                let ranks: Vec<usize> = (self.lo..=self.hi_exact + 1)
                    .into_par_iter()
                    .map(|k| match self.boundary_ref(k) {
                        Some(b) => rank_mod_prime(b, p),
                        None => Ok(0),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let betti = (self.lo..=self.hi_exact)
                    .enumerate()
                    .map(|(i, k)| (k, self.rank(k) - ranks[i] - ranks[i + 1]))
                    .collect();
                Ok(PrimeScreen { prime: p, betti })
            })
            .collect()
    }

    /// Integer homology, falling back to a prime screen when the integer
    /// reduction is over budget and `primes` is nonempty.
    pub fn homology_or_screen(&self, budget: &Budget, primes: &[u64]) -> Result<HomologyOutcome> {
        match self.homology(budget) {
            Ok(g) => Ok(HomologyOutcome::Exact(g)),
            Err(Error::BudgetExceeded(_)) if !primes.is_empty() => Ok(HomologyOutcome::Screen(self.screen(primes)?)),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntMatrix;

    #[test]
    fn rejects_nonzero_square() {
        let d1 = SparseIntMatrix::from_dense(&IntMatrix::from_rows(&[vec![1], vec![0]]));
        let d2 = SparseIntMatrix::from_dense(&IntMatrix::from_rows(&[vec![1]]));
        assert!(ChainComplex::new(0, vec![2, 1, 1], vec![d1, d2], 1, false).is_err());
    }

    #[test]
    fn circle_homology() {
        // two vertices, two edges a->b, b->a
        let d1 = SparseIntMatrix::from_dense(&IntMatrix::from_rows(&[vec![-1, 1], vec![1, -1]]));
        let c = ChainComplex::new(0, vec![2, 2], vec![d1], 1, true).unwrap();
        let h = c.homology(&Budget::default()).unwrap();
        assert_eq!(h[0].group, AbelianGroup::free(1));
        assert_eq!(h[1].group, AbelianGroup::free(1));
        let s = c.screen(&[2, 3]).unwrap();
        assert_eq!(s[0].betti, vec![(0, 1), (1, 1)]);
    }
}
