use std::sync::Arc;

use super::builders::{order_complex, ChainTable};
use super::chain::ChainComplex;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{dense_smith_tracking, invariant_factors, AbelianGroup, IntMatrix, SparseIntMatrix};
use crate::poset::{FinitePoset, PosetMap};

#[derive(Clone, Debug)]
enum Kind {
    /// Degree 0 of a simplicial complex: classes are connected components.
    Components { comp_of: Vec<u32>, count: usize, reduced: bool },
    Snf {
        n: usize,
        /// rows `r..` of `V^{-1}` from the reduction of `d_k`
        v_inv_tail: IntMatrix,
        /// left transform of the reduction of the image in kernel coordinates
        u2: IntMatrix,
        diag2: Vec<u64>,
    },
}

/// Generators of `H_k` and a coordinate map from cycles to classes.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    degree: i64,
    kind: Kind,
    /// index into the internal class vector and its order (`0` = infinite)
    keep: Vec<(usize, u64)>,
    generators: Vec<Vec<i64>>,
}

fn union_find_components(n: usize, d1: Option<&SparseIntMatrix>) -> (Vec<u32>, usize) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    if let Some(d1) = d1 {
        for col in d1.columns() {
            if let [(a, _), (b, _)] = col[..] {
                let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut label = vec![u32::MAX; n];
    let mut comp_of = vec![0u32; n];
    let mut count = 0;
    for x in 0..n {
        let r = find(&mut parent, x);
        if label[r] == u32::MAX {
            label[r] = count as u32;
            count += 1;
        }
        comp_of[x] = label[r];
    }
    (comp_of, count)
}

impl HomologyBasis {
    pub fn new(complex: &ChainComplex, degree: i64, budget: &Budget) -> Result<Self> {
        if degree > complex.highest_exact_degree() {
            return Err(Error::InvalidInput(format!("degree {degree} is beyond the computed range")));
        }
        let n = complex.rank(degree);
        if degree == 0 && complex.is_simplicial() {
            let reduced = complex.lowest_degree() == -1;
            let d1 = complex.boundary_ref(1);
            let (comp_of, count) = union_find_components(n, d1);
            let first = if reduced { 1 } else { 0 };
            let keep: Vec<(usize, u64)> = (first..count).map(|c| (c, 0)).collect();
            let mut rep = vec![usize::MAX; count];
            for (x, &c) in comp_of.iter().enumerate() {
                if rep[c as usize] == usize::MAX {
                    rep[c as usize] = x;
                }
            }
            let generators = keep
                .iter()
                .map(|&(c, _)| {
                    let mut z = vec![0i64; n];
                    z[rep[c]] += 1;
                    if reduced {
                        z[rep[0]] -= 1;
                    }
                    z
                })
                .collect();
            return Ok(HomologyBasis { degree, kind: Kind::Components { comp_of, count, reduced }, keep, generators });
        }
        let dk = complex.boundary(degree).to_dense();
        let s = dense_smith_tracking(&dk, false, true, budget)?;
        let r = s.diag.len();
        let v = s.v.expect("tracked");
        let v_inv = s.v_inv.expect("tracked");
        let v_inv_tail = v_inv.row_range(r..n);
        let kernel = v.columns(r..n);
        let dk1 = complex.boundary(degree + 1).to_dense();
        let m = v_inv_tail.mul(&dk1)?;
        let s2 = dense_smith_tracking(&m, true, false, budget)?;
        let u2 = s2.u.expect("tracked");
        let u2_inv = s2.u_inv.expect("tracked");
        let diag2 = s2.diag;
        let kdim = n - r;
        let keep: Vec<(usize, u64)> = (0..kdim)
            .filter_map(|i| match diag2.get(i) {
                Some(&1) => None,
                Some(&d) => Some((i, d)),
                None => Some((i, 0)),
            })
            .collect();
        let generators = keep
            .iter()
            .map(|&(i, _)| kernel.mul_vec(&u2_inv.column(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HomologyBasis { degree, kind: Kind::Snf { n, v_inv_tail, u2, diag2 }, keep, generators })
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn group(&self) -> AbelianGroup {
        let free = self.keep.iter().filter(|k| k.1 == 0).count();
        let torsion = self.keep.iter().filter(|k| k.1 != 0).map(|k| k.1).collect();
        AbelianGroup { free_rank: free, torsion }
    }

    /// Order of each generator, `0` for infinite order.
    pub fn orders(&self) -> Vec<u64> {
        self.keep.iter().map(|k| k.1).collect()
    }

    /// Cycle representatives, one per generator.
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Class of a cycle in generator coordinates (torsion coordinates reduced).
    pub fn coordinates(&self, z: &[i64]) -> Result<Vec<i64>> {
        match &self.kind {
            Kind::Components { comp_of, count, .. } => {
                let mut sums = vec![0i64; *count];
                for (x, &c) in z.iter().zip(comp_of) {
                    sums[c as usize] += x;
                }
                Ok(self.keep.iter().map(|&(c, _)| sums[c]).collect())
            }
            Kind::Snf { n, v_inv_tail, u2, .. } => {
                if z.len() != *n {
                    return Err(Error::InvalidInput("cycle has the wrong length".into()));
                }
                let y = u2.mul_vec(&v_inv_tail.mul_vec(z)?)?;
                Ok(self.keep.iter().map(|&(i, d)| if d == 0 { y[i] } else { y[i].rem_euclid(d as i64) }).collect())
            }
        }
    }

    pub fn is_cycle_class_zero(&self, z: &[i64]) -> Result<bool> {
        Ok(self.coordinates(z)?.iter().all(|&c| c == 0))
    }

    #[allow(dead_code)]
    pub(crate) fn kernel_dim(&self) -> usize {
        match &self.kind {
            Kind::Components { count, reduced, .. } => count - usize::from(*reduced),
            Kind::Snf { v_inv_tail, diag2, .. } => v_inv_tail.rows() - diag2.iter().filter(|&&d| d == 1).count(),
        }
    }
}

/// A homomorphism between computed homology groups, as a matrix from source
/// generators to target generator coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMap {
    pub degree: i64,
    pub source: AbelianGroup,
    pub target: AbelianGroup,
    pub target_orders: Vec<u64>,
    pub matrix: IntMatrix,
}

impl InducedMap {
    pub fn is_surjective(&self) -> Result<bool> {
        jointly_surjective(std::slice::from_ref(self))
    }

    /// Groups are isomorphic and the map is onto; finitely generated abelian
    /// groups are Hopfian, so this is an isomorphism.
    pub fn is_isomorphism(&self) -> Result<bool> {
        Ok(self.source == self.target && self.is_surjective()?)
    }
}

/// The sum of the maps (all with a common target) is surjective.
pub fn jointly_surjective(maps: &[InducedMap]) -> Result<bool> {
    let Some(first) = maps.first() else { return Ok(false) };
    let m = first.target_orders.len();
    if m == 0 {
        return Ok(true);
    }
    let mut triplets = Vec::new();
    let mut col = 0;
    for f in maps {
        if f.target_orders != first.target_orders {
            return Err(Error::InvalidInput("maps have different targets".into()));
        }
        for c in 0..f.matrix.cols() {
            for r in 0..m {
                let v = f.matrix.get(r, c);
                if v != 0 {
                    triplets.push((r, col, v));
                }
            }
            col += 1;
        }
    }
    for (r, &d) in first.target_orders.iter().enumerate() {
        if d != 0 {
            triplets.push((r, col, d as i64));
            col += 1;
        }
    }
    let a = SparseIntMatrix::from_triplets(m, col, triplets)?;
    let f = invariant_factors(&a, &Budget::default())?;
    Ok(f.len() == m && f.iter().all(|&d| d == 1))
}

/// Homology basis of a poset in one degree together with its chain tables.
pub struct PosetHomology {
    pub complex: ChainComplex,
    pub tables: Vec<ChainTable>,
    pub basis: HomologyBasis,
}

impl PosetHomology {
    pub fn new(poset: &FinitePoset, degree: i64, reduced: bool, budget: &Budget) -> Result<Self> {
        let (complex, tables) = order_complex(poset, degree, reduced, budget)?;
        let basis = HomologyBasis::new(&complex, degree, budget)?;
        Ok(PosetHomology { complex, tables, basis })
    }

    /// Position of a `degree`-chain's coefficient in the chain group (the
    /// reduced complex has its degree `-1` cell first, but chain groups of
    /// nonnegative degree are indexed by the chain tables either way).
    fn table(&self, degree: i64) -> &ChainTable {
        &self.tables[degree as usize]
    }
}

/// The map `f_*: H_k(source) -> H_k(target)` induced by the simplicial map
/// sending `x_0 < ... < x_k` to `f(x_0) <= ... <= f(x_k)`, or zero when two
/// entries collide.
pub fn induced_map(f: &PosetMap, degree: i64, reduced: bool, budget: &Budget) -> Result<InducedMap> {
    let src = PosetHomology::new(f.source(), degree, reduced, budget)?;
    let tgt = PosetHomology::new(f.target(), degree, reduced, budget)?;
    induced_between(f, &src, &tgt, degree)
}

pub(crate) fn induced_between(f: &PosetMap, src: &PosetHomology, tgt: &PosetHomology, degree: i64) -> Result<InducedMap> {
    let tgt_orders = tgt.basis.orders();
    let mut matrix = IntMatrix::zeros(tgt_orders.len(), src.basis.generators().len());
    for (j, z) in src.basis.generators().iter().enumerate() {
        let image = if degree < 0 {
            z.clone()
        } else {
            let st = src.table(degree);
            let tt = tgt.table(degree);
            let mut w = vec![0i64; tt.len()];
            for (i, &c) in z.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mapped: Vec<u32> = st.get(i).iter().map(|&x| f.apply(x as usize) as u32).collect();
                if mapped.windows(2).all(|p| p[0] != p[1]) {
                    let pos = tt.find(&mapped).ok_or_else(|| Error::Internal("image chain missing".into()))?;
                    w[pos] += c;
                }
            }
            w
        };
        for (r, v) in tgt.basis.coordinates(&image)?.into_iter().enumerate() {
            matrix.set(r, j, v);
        }
    }
    Ok(InducedMap {
        degree,
        source: src.basis.group(),
        target: tgt.basis.group(),
        target_orders: tgt_orders,
        matrix,
    })
}

/// Induced maps of several inclusions into one target, sharing the target
/// basis.
pub fn induced_maps_into(
    maps: &[PosetMap],
    target: &Arc<FinitePoset>,
    degree: i64,
    reduced: bool,
    budget: &Budget,
) -> Result<Vec<InducedMap>> {
    let tgt = PosetHomology::new(target, degree, reduced, budget)?;
    maps.iter()
        .map(|f| {
            let src = PosetHomology::new(f.source(), degree, reduced, budget)?;
            induced_between(f, &src, &tgt, degree)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_induces_identity() {
        let s = Arc::new(FinitePoset::simplex_boundary(2));
        let id = PosetMap::identity(s);
        for k in 0..=1 {
            let m = induced_map(&id, k, false, &Budget::default()).unwrap();
            assert!(m.matrix.is_identity(), "degree {k}");
            assert!(m.is_isomorphism().unwrap());
        }
    }

    #[test]
    fn point_into_contractible_is_h0_iso() {
        let c = Arc::new(FinitePoset::chain(3));
        let pt = Arc::new(FinitePoset::chain(1));
        let inc = PosetMap::new(pt, c, vec![2]).unwrap();
        assert!(induced_map(&inc, 0, false, &Budget::default()).unwrap().is_isomorphism().unwrap());
    }

    #[test]
    fn torsion_coordinates() {
        // RP^2-like complex: one vertex, one edge loop, one 2-cell attached twice
        let d1 = SparseIntMatrix::zeros(1, 1);
        let d2 = SparseIntMatrix::from_triplets(1, 1, vec![(0, 0, 2)]).unwrap();
        let c = ChainComplex::new(0, vec![1, 1, 1], vec![d1, d2], 1, false).unwrap();
        let b = HomologyBasis::new(&c, 1, &Budget::default()).unwrap();
        assert_eq!(b.group().torsion, vec![2]);
        assert_eq!(b.coordinates(&[3]).unwrap(), vec![1]);
        assert!(b.is_cycle_class_zero(&[4]).unwrap());
    }
}
