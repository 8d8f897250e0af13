use std::fmt;

use serde::{Deserialize, Serialize};

/// Finitely generated abelian group `Z^r + Z/d_1 + ... + Z/d_s` with
/// `1 < d_1 | d_2 | ... | d_s`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    /// Cokernel of a map into `Z^ambient` whose Smith diagonal is `diagonal`.
    pub fn cokernel(ambient: usize, diagonal: &[u64]) -> Self {
        AbelianGroup {
            free_rank: ambient - diagonal.len(),
            torsion: diagonal.iter().copied().filter(|&d| d > 1).collect(),
        }
    }

    /// Normalizes an arbitrary list of cyclic orders into invariant factors.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[u64]) -> Self {
        use std::collections::BTreeMap;
        // split into prime powers, then regroup
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &d in orders.iter().filter(|&&d| d > 1) {
            for (p, e) in crate::ring::factorize(d) {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable();
            let offset = len - powers.len();
            for (i, q) in powers.iter().enumerate() {
                factors[offset + i] *= q;
            }
        }
        AbelianGroup { free_rank, torsion: factors }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let orders: Vec<u64> = self.torsion.iter().chain(&other.torsion).copied().collect();
        AbelianGroup::from_cyclic_orders(self.free_rank + other.free_rank, &orders)
    }

    pub fn power(&self, n: usize) -> AbelianGroup {
        (0..n).fold(AbelianGroup::trivial(), |acc, _| acc.direct_sum(self))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factor_normalization() {
        let g = AbelianGroup::from_cyclic_orders(1, &[2, 3, 4, 1]);
        assert_eq!(g.torsion, vec![2, 12]);
        assert_eq!(g.to_string(), "Z + Z/2 + Z/12");
        let h = AbelianGroup::from_cyclic_orders(0, &[6, 10]);
        assert_eq!(h.torsion, vec![2, 30]);
    }

    #[test]
    fn sums_and_powers() {
        let z2 = AbelianGroup::from_cyclic_orders(0, &[2]);
        assert_eq!(z2.power(3).torsion, vec![2, 2, 2]);
        assert_eq!(AbelianGroup::free(2).direct_sum(&z2).to_string(), "Z^2 + Z/2");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
    }
}
