//! The symplectic space `R^{2n}` over `Z/m`, its elementary group and frame
//! posets.

mod complete;
mod enumerate;
mod orbit;

pub use complete::{complete_to_hyperbolic, HyperbolicBasis};
pub use enumerate::{
    enumerate_hyperbolic, enumerate_isotropic, enumerate_mixed, enumerate_poset, enumerate_relative, enumerate_u_prime,
    enumerate_unimodular, Family, FramePoset, Pair,
};
pub use orbit::{esp_orbit, OrbitReport, OrbitSeed};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{inverse_mod_m, kernel_mod_m};
use crate::ring::{rows_unimodular, ModulusRing};

/// `R^{2n}` with `h(x, y) = sum_i (x_{2i-1} y_{2i} - y_{2i-1} x_{2i})`.
#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    ring: ModulusRing,
    n: usize,
}

/// `sigma(2i) = 2i - 1`, `sigma(2i - 1) = 2i` on `1..=2n`.
pub fn sigma(i: usize) -> usize {
    if i % 2 == 0 {
        i - 1
    } else {
        i + 1
    }
}

impl SymplecticSpace {
    pub fn new(ring: ModulusRing, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("n must be positive");
        }
        Ok(SymplecticSpace { ring, n })
    }

    pub fn ring(&self) -> &ModulusRing {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Number of vectors in `R^{2n}`.
    pub fn vector_count(&self) -> Option<u64> {
        self.ring.count(self.dim())
    }

    pub fn decode(&self, code: u32) -> Vec<u64> {
        self.ring.decode(code as u64, self.dim())
    }

    pub fn encode(&self, v: &[u64]) -> u32 {
        self.ring.encode(v) as u32
    }

    /// The standard basis vector `e_i`, `1 <= i <= 2n`.
    pub fn e(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i - 1] = 1;
        v
    }

    pub fn form_matrix(&self) -> SymplecticMatrix {
        let d = self.dim();
        let mut q = SymplecticMatrix::zeros(self.ring.modulus(), d);
        for i in 0..self.n {
            q.set(2 * i, 2 * i + 1, 1);
            q.set(2 * i + 1, 2 * i, self.ring.neg(1));
        }
        q
    }

    pub fn form(&self, x: &[u64], y: &[u64]) -> Result<u64> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return invalid(format!("vectors must have length {}", self.dim()));
        }
        Ok(self.form_unchecked(x, y))
    }

    pub(crate) fn form_unchecked(&self, x: &[u64], y: &[u64]) -> u64 {
        let r = &self.ring;
        let mut acc = 0;
        for i in 0..self.n {
            acc = r.add(acc, r.mul(x[2 * i], y[2 * i + 1]));
            acc = r.sub(acc, r.mul(y[2 * i], x[2 * i + 1]));
        }
        acc
    }

    /// Unimodular mode: the frame matrix has a right inverse. Isotropic mode
    /// additionally needs `h(v_i, v_j) = 0`.
    pub fn is_frame(&self, vectors: &[Vec<u64>], mode: FrameMode) -> bool {
        if vectors.is_empty() || vectors.iter().any(|v| v.len() != self.dim()) {
            return false;
        }
        let reduced: Vec<Vec<u64>> =
            vectors.iter().map(|v| v.iter().map(|&c| c % self.ring.modulus()).collect()).collect();
        if !rows_unimodular(&self.ring, &reduced) {
            return false;
        }
        match mode {
            FrameMode::Unimodular => true,
            FrameMode::Isotropic => reduced
                .iter()
                .enumerate()
                .all(|(i, a)| reduced[i + 1..].iter().all(|b| self.form_unchecked(a, b) == 0)),
        }
    }

    /// Generators of `<S>^perp`, the kernel of `x -> (h(s, x))_{s in S}`.
    pub fn perp(&self, s: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
        if s.is_empty() {
            return Ok((1..=self.dim()).map(|i| self.e(i)).collect());
        }
        let q = self.form_matrix();
        let rows: Vec<Vec<u64>> = s
            .iter()
            .map(|v| {
                if v.len() != self.dim() {
                    return invalid(format!("vectors must have length {}", self.dim()));
                }
                Ok(q.row_times(v))
            })
            .collect::<Result<_>>()?;
        kernel_mod_m(&rows, self.dim(), &self.ring)
    }

    /// Codes of all elements of `<S>^perp`.
    pub fn perp_codes(&self, s: &[Vec<u64>]) -> Vec<u32> {
        let total = self.vector_count().unwrap_or(0) as u32;
        (0..total).filter(|&c| { let x = self.decode(c); s.iter().all(|v| self.form_unchecked(v, &x) == 0) }).collect()
    }

    /// The basis `c` with `h(b_i, c_j) = delta_{ij}`.
    pub fn dual_basis(&self, b: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
        let d = self.dim();
        if b.len() != d || b.iter().any(|v| v.len() != d) {
            return invalid(format!("a basis of R^{d} needs {d} vectors of length {d}"));
        }
        let q = self.form_matrix();
        let bq: Vec<Vec<u64>> = b.iter().map(|v| q.row_times(v)).collect();
        let inv = inverse_mod_m(&bq, &self.ring).ok_or_else(|| Error::InvalidInput("vectors do not form a basis".into()))?;
        let c: Vec<Vec<u64>> = (0..d).map(|j| (0..d).map(|i| inv[i][j]).collect()).collect();
        for (i, bi) in b.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if self.form_unchecked(bi, cj) != u64::from(i == j) {
                    return Err(Error::Internal("dual basis check failed".into()));
                }
            }
        }
        Ok(c)
    }

    /// `E_{i,j}(r)` for `1 <= i != j <= 2n`: `I + r e_{ij}` when `i = sigma(j)`,
    /// otherwise `I + r e_{ij} - (-1)^{i+j} r e_{sigma(j), sigma(i)}`.
    pub fn elementary_generator(&self, i: usize, j: usize, r: u64) -> Result<SymplecticMatrix> {
        let d = self.dim();
        if i == 0 || j == 0 || i > d || j > d || i == j {
            return invalid(format!("need 1 <= i != j <= {d}, got ({i}, {j})"));
        }
        let ring = &self.ring;
        let r = r % ring.modulus();
        let mut e = SymplecticMatrix::identity(ring.modulus(), d);
        e.set(i - 1, j - 1, r);
        if i != sigma(j) {
            let c = if (i + j) % 2 == 0 { ring.neg(r) } else { r };
            let (a, b) = (sigma(j) - 1, sigma(i) - 1);
            e.set(a, b, ring.add(e.get(a, b), c));
        }
        if !e.is_symplectic(self) {
            return Err(Error::Internal(format!("E_{{{i},{j}}}({r}) is not symplectic")));
        }
        Ok(e)
    }

    /// All `E_{i,j}(r)` with `r != 0`.
    pub fn elementary_generators(&self) -> Result<Vec<SymplecticMatrix>> {
        let d = self.dim();
        let mut out = Vec::new();
        for i in 1..=d {
            for j in 1..=d {
                if i != j {
                    for r in 1..self.ring.modulus() {
                        out.push(self.elementary_generator(i, j, r)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `psi(A) = diag(A, I_2)` in the space of rank `n + 1`.
    pub fn stabilization(&self, a: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if a.dim() != self.dim() || !a.is_symplectic(self) {
            return invalid("stabilization needs a symplectic matrix of this space");
        }
        let big = SymplecticSpace::new(self.ring.clone(), self.n + 1)?;
        let mut out = SymplecticMatrix::identity(self.ring.modulus(), big.dim());
        for r in 0..a.dim() {
            for c in 0..a.dim() {
                out.set(r, c, a.get(r, c));
            }
        }
        if !out.is_symplectic(&big) {
            return Err(Error::Internal("stabilized matrix is not symplectic".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMode {
    Unimodular,
    Isotropic,
}

/// A square matrix over `Z/m`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymplecticMatrix {
    modulus: u64,
    dim: usize,
    entries: Vec<u64>,
}

impl std::fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.dim {
            writeln!(f, "{:?}", &self.entries[r * self.dim..(r + 1) * self.dim])?;
        }
        Ok(())
    }
}

impl SymplecticMatrix {
    pub fn zeros(modulus: u64, dim: usize) -> Self {
        SymplecticMatrix { modulus, dim, entries: vec![0; dim * dim] }
    }

    pub fn identity(modulus: u64, dim: usize) -> Self {
        let mut m = Self::zeros(modulus, dim);
        for i in 0..dim {
            m.set(i, i, 1 % modulus);
        }
        m
    }

    pub fn from_rows(modulus: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("matrix must be square");
        }
        Ok(SymplecticMatrix { modulus, dim, entries: rows.iter().flatten().map(|&c| c % modulus).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.dim + c] = v % self.modulus;
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.dim).map(|r| self.get(r, c)).collect()
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let m = self.modulus as u128;
        let d = self.dim;
        let mut out = Self::zeros(self.modulus, d);
        for i in 0..d {
            for j in 0..d {
                let s: u128 = (0..d).map(|k| self.get(i, k) as u128 * other.get(k, j) as u128).sum();
                out.entries[i * d + j] = (s % m) as u64;
            }
        }
        out
    }

    /// `A x` for a column vector `x`.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        (0..self.dim)
            .map(|i| ((0..self.dim).map(|k| self.get(i, k) as u128 * x[k] as u128).sum::<u128>() % m) as u64)
            .collect()
    }

    /// `x^t A` for a row vector `x`.
    pub fn row_times(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        (0..self.dim)
            .map(|j| ((0..self.dim).map(|k| x[k] as u128 * self.get(k, j) as u128).sum::<u128>() % m) as u64)
            .collect()
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        let mut t = Self::zeros(self.modulus, self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus, self.dim)
    }

    /// `A^t Q A = Q`.
    pub fn is_symplectic(&self, space: &SymplecticSpace) -> bool {
        if self.dim != space.dim() || self.modulus != space.ring.modulus() {
            return false;
        }
        let q = space.form_matrix();
        self.transpose().mul(&q).mul(self) == q
    }

    /// Inverse of a symplectic matrix: `A^{-1} = -Q A^t Q`.
    pub fn symplectic_inverse(&self, space: &SymplecticSpace) -> Result<SymplecticMatrix> {
        if !self.is_symplectic(space) {
            return invalid("matrix is not symplectic");
        }
        let q = space.form_matrix();
        let mut inv = q.mul(&self.transpose()).mul(&q);
        for e in inv.entries.iter_mut() {
            *e = (self.modulus - *e) % self.modulus;
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(m: u64, n: usize) -> SymplecticSpace {
        SymplecticSpace::new(ModulusRing::new(m).unwrap(), n).unwrap()
    }

    #[test]
    fn form_examples() {
        let s = space(5, 2);
        assert_eq!(s.form(&s.e(1), &s.e(2)).unwrap(), 1);
        assert_eq!(s.form(&s.e(2), &s.e(1)).unwrap(), 4);
        assert_eq!(s.form(&s.e(1), &s.e(3)).unwrap(), 0);
        assert!(s.form(&s.e(1), &[1, 0]).is_err());
        let q = s.form_matrix();
        for a in [vec![1, 2, 3, 4], vec![0, 3, 1, 1]] {
            for b in [vec![2, 2, 0, 1], vec![4, 0, 0, 3]] {
                assert_eq!(s.form(&a, &b).unwrap(), q.row_times(&a).iter().zip(&b).map(|(x, y)| x * y).sum::<u64>() % 5);
            }
        }
    }

    #[test]
    fn frame_examples() {
        let s = space(4, 2);
        assert!(s.is_frame(&[s.e(1), s.e(3)], FrameMode::Isotropic));
        assert!(!s.is_frame(&[s.e(1), s.e(2)], FrameMode::Isotropic));
        assert!(s.is_frame(&[s.e(1), s.e(2)], FrameMode::Unimodular));
        assert!(!s.is_frame(&[s.e(1), vec![0, 0, 2, 0]], FrameMode::Unimodular));
    }

    #[test]
    fn generators_case_split() {
        let s = space(5, 2);
        let e12 = s.elementary_generator(1, 2, 3).unwrap();
        let mut expect = SymplecticMatrix::identity(5, 4);
        expect.set(0, 1, 3);
        assert_eq!(e12, expect);
        let e13 = s.elementary_generator(1, 3, 1).unwrap();
        let mut expect = SymplecticMatrix::identity(5, 4);
        expect.set(0, 2, 1);
        expect.set(3, 1, 4);
        assert_eq!(e13, expect);
        assert!(s.elementary_generator(2, 2, 1).is_err());
        assert!(s.elementary_generator(0, 2, 1).is_err());
    }

    #[test]
    fn subscript_order_in_second_term_matters() {
        // I + e_{13} - e_{24}: h(Ee_3, Ee_4) = 1 - r^2, so it leaves Sp at r = 1
        let s = space(3, 2);
        let mut m = SymplecticMatrix::identity(3, 4);
        m.set(0, 2, 1);
        m.set(1, 3, 2);
        assert!(!m.is_symplectic(&s));
        let x = m.column(2);
        let y = m.column(3);
        assert_eq!(s.form(&x, &y).unwrap(), 0);
    }

    #[test]
    fn all_generators_symplectic_over_z3() {
        let s = space(3, 2);
        let g = s.elementary_generators().unwrap();
        assert_eq!(g.len(), 4 * 3 * 2);
        assert!(g.iter().all(|e| e.is_symplectic(&s)));
        let inv = g[5].symplectic_inverse(&s).unwrap();
        assert!(inv.mul(&g[5]).is_identity());
    }

    #[test]
    fn perp_examples() {
        let s = space(2, 2);
        let gens = s.perp(&[s.e(1)]).unwrap();
        let codes = s.perp_codes(&[s.e(1)]);
        assert_eq!(codes.len(), 8);
        assert!(codes.iter().all(|&c| s.decode(c)[1] == 0));
        assert!(gens.iter().all(|g| s.form(&s.e(1), g).unwrap() == 0));
        assert_eq!(s.perp(&[]).unwrap().len(), 4);
        let s6 = space(2, 3);
        assert_eq!(s6.perp_codes(&[s6.e(1), s6.e(3)]).len(), 16);
    }

    #[test]
    fn dual_of_standard_basis() {
        let s = space(7, 1);
        let c = s.dual_basis(&[s.e(1), s.e(2)]).unwrap();
        assert_eq!(c, vec![vec![0, 1], vec![6, 0]]);
        assert!(s.dual_basis(&[s.e(1), s.e(1)]).is_err());
    }

    #[test]
    fn stabilization_block_form() {
        let s = space(3, 1);
        let big = space(3, 2);
        let id = SymplecticMatrix::identity(3, 2);
        assert!(s.stabilization(&id).unwrap().is_identity());
        let e = s.elementary_generator(1, 2, 2).unwrap();
        assert_eq!(s.stabilization(&e).unwrap(), big.elementary_generator(1, 2, 2).unwrap());
    }
}
