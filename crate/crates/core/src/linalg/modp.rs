//! Linear algebra over `F_p` and `Z/m`.

use super::dense::IntMatrix;
use super::snf::dense_smith;
use super::sparse::SparseIntMatrix;
use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::ring::{is_prime, ModulusRing};

fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = crate::ring::ext_gcd(a as i64, p as i64);
    debug_assert_eq!(g, 1);
    x.rem_euclid(p as i64) as u64
}

/// Rank of a small dense matrix over `F_p` (entries are reduced first).
pub fn rank_mod_p_rows(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for k in c..cols {
                    m[r][k] = (m[r][k] + (p - f) * m[rank][k]) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Rank over `F_p` by sparse column reduction.
pub fn rank_mod_prime(a: &SparseIntMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let mut pivot_of_row: Vec<Option<Vec<(u32, u64)>>> = vec![None; a.rows()];
    let mut rank = 0;
    for col in a.columns() {
        let mut col: Vec<(u32, u64)> = col
            .into_iter()
            .map(|(r, v)| (r, v.rem_euclid(p as i64) as u64))
            .filter(|&(_, v)| v != 0)
            .collect();
        while let Some(&(low, val)) = col.last() {
            match &pivot_of_row[low as usize] {
                Some(pc) => {
                    // pivot columns are normalized to low value 1
                    col = axpy_mod(&col, p - val, pc, p);
                }
                None => {
                    let inv = inv_mod(val, p);
                    for e in col.iter_mut() {
                        e.1 = e.1 * inv % p;
                    }
                    pivot_of_row[low as usize] = Some(col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    Ok(rank)
}

fn axpy_mod(t: &[(u32, u64)], q: u64, s: &[(u32, u64)], p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(t.len() + s.len());
    let (mut i, mut j) = (0, 0);
    while i < t.len() || j < s.len() {
        let ti = t.get(i).map(|e| e.0);
        let sj = s.get(j).map(|e| e.0);
        match (ti, sj) {
            (Some(a), Some(b)) if a == b => {
                let v = (t[i].1 + q * s[j].1) % p;
                if v != 0 {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(t[i]);
                i += 1;
            }
            (Some(_), None) => {
                out.push(t[i]);
                i += 1;
            }
            _ => {
                out.push((s[j].0, q * s[j].1 % p));
                j += 1;
            }
        }
    }
    out
}

/// A `k x n` matrix over `Z/m` has a right inverse iff it has rank `k`
/// modulo every prime divisor of `m`.
pub fn has_right_inverse_mod_m(a: &SparseIntMatrix, ring: &ModulusRing) -> Result<bool> {
    if a.rows() > a.cols() {
        return invalid(format!("shape {}x{} has more rows than columns", a.rows(), a.cols()));
    }
    for p in ring.primes() {
        if rank_mod_prime(a, p)? != a.rows() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inverse of a square matrix over `Z/m`, if it exists.
pub fn inverse_mod_m(rows: &[Vec<u64>], ring: &ModulusRing) -> Option<Vec<Vec<u64>>> {
    let n = rows.len();
    let m = ring.modulus();
    // Gauss-Jordan over Z/m using gcd-style row operations on the augmented matrix
    let mut a: Vec<Vec<i64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<i64> = r.iter().map(|&x| (x % m) as i64).collect();
            row.extend((0..n).map(|j| i64::from(i == j)));
            row
        })
        .collect();
    let mi = m as i64;
    for c in 0..n {
        // Euclid down column c on rows c.. until a unit sits at (c, c)
        loop {
            let mut best: Option<usize> = None;
            for r in c..n {
                let v = a[r][c].rem_euclid(mi);
                a[r][c] = v;
                if v != 0 && best.map_or(true, |b| v < a[b][c]) {
                    best = Some(r);
                }
            }
            let b = best?;
            a.swap(c, b);
            let mut done = true;
            for r in c + 1..n {
                let q = a[r][c] / a[c][c];
                if q != 0 {
                    for k in 0..2 * n {
                        a[r][k] = (a[r][k] - q * a[c][k]).rem_euclid(mi);
                    }
                }
                if a[r][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        let inv = ring.inv(a[c][c] as u64)? as i64;
        for k in 0..2 * n {
            a[c][k] = (a[c][k] * inv).rem_euclid(mi);
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for k in 0..2 * n {
                    a[r][k] = (a[r][k] - f * a[c][k]).rem_euclid(mi);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].iter().map(|&x| x as u64).collect()).collect())
}

/// Generators of `{x in (Z/m)^cols : A x = 0}`.
pub fn kernel_mod_m(rows: &[Vec<u64>], cols: usize, ring: &ModulusRing) -> Result<Vec<Vec<u64>>> {
    let m = ring.modulus();
    let a = IntMatrix::from_rows(
        &rows.iter().map(|r| r.iter().map(|&x| (x % m) as i64).collect()).collect::<Vec<_>>(),
    );
    let a = if rows.is_empty() { IntMatrix::zeros(0, cols) } else { a };
    // U A V = D, so A x = 0 mod m iff D y = 0 mod m with x = V y
    let s = dense_smith(&a, true, &Budget::default())?;
    let v = s.v.expect("tracked");
    let mut gens = Vec::new();
    for j in 0..cols {
        let d = s.diag.get(j).copied().unwrap_or(0) % m;
        let step = m / crate::ring::gcd(d, m);
        if step == m {
            continue;
        }
        let g: Vec<u64> = (0..cols)
            .map(|r| ((v.get(r, j) as i128 * step as i128).rem_euclid(m as i128)) as u64)
            .collect();
        if g.iter().any(|&x| x != 0) {
            gens.push(g);
        }
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(rows: &[Vec<i64>]) -> SparseIntMatrix {
        SparseIntMatrix::from_dense(&IntMatrix::from_rows(rows))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_mod_prime(&SparseIntMatrix::identity(3), 2).unwrap(), 3);
        let a = sp(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_prime(&a, 2).unwrap(), 1);
        assert_eq!(rank_mod_prime(&a, 5).unwrap(), 2);
        assert!(rank_mod_prime(&a, 4).is_err());
        assert_eq!(rank_mod_p_rows(&[vec![2, 0], vec![0, 3]], 3), 1);
    }

    fn brute_right_inverse(rows: &[Vec<u64>], m: u64) -> bool {
        let k = rows.len();
        let n = rows[0].len();
        // search column by column: need x with A x = e_j
        (0..k).all(|j| {
            let total = m.pow(n as u32);
            (0..total).any(|mut idx| {
                let x: Vec<u64> = (0..n)
                    .map(|_| {
                        let d = idx % m;
                        idx /= m;
                        d
                    })
                    .collect();
                (0..k).all(|i| {
                    let s: u64 = rows[i].iter().zip(&x).map(|(a, b)| a * b).sum();
                    s % m == u64::from(i == j)
                })
            })
        })
    }

    #[test]
    fn right_inverse_examples() {
        let z4 = ModulusRing::new(4).unwrap();
        let z6 = ModulusRing::new(6).unwrap();
        assert!(has_right_inverse_mod_m(&SparseIntMatrix::identity(2), &z4).unwrap());
        assert!(!has_right_inverse_mod_m(&sp(&[vec![2, 2]]), &z4).unwrap());
        let rows = vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]];
        assert!(brute_right_inverse(&rows, 6));
        let a = sp(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]);
        assert!(has_right_inverse_mod_m(&a, &z6).unwrap());
        assert!(has_right_inverse_mod_m(&sp(&[vec![1, 0], vec![0, 1], vec![1, 1]]), &z6).is_err());
    }

    #[test]
    fn right_inverse_matches_brute_force_small() {
        for m in [2u64, 3, 4] {
            let ring = ModulusRing::new(m).unwrap();
            for idx in 0..m.pow(6) {
                let c = ring.decode(idx, 6);
                let rows = vec![c[..3].to_vec(), c[3..].to_vec()];
                let a = sp(&rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect::<Vec<_>>());
                assert_eq!(has_right_inverse_mod_m(&a, &ring).unwrap(), brute_right_inverse(&rows, m), "{rows:?} mod {m}");
            }
        }
    }

    #[test]
    fn inverse_and_kernel_mod_m() {
        let z6 = ModulusRing::new(6).unwrap();
        let a = vec![vec![1, 2], vec![3, 1]];
        let inv = inverse_mod_m(&a, &z6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s: u64 = (0..2).map(|k| a[i][k] * inv[k][j]).sum();
                assert_eq!(s % 6, u64::from(i == j));
            }
        }
        assert!(inverse_mod_m(&[vec![2, 0], vec![0, 1]], &z6).is_none());
        let z4 = ModulusRing::new(4).unwrap();
        let ker = kernel_mod_m(&[vec![2, 0, 1]], 3, &z4).unwrap();
        // brute-force kernel size
        let size = (0..64u64)
            .filter(|&i| {
                let x = z4.decode(i, 3);
                (2 * x[0] + x[2]) % 4 == 0
            })
            .count();
        let mut span = std::collections::HashSet::new();
        span.insert(vec![0u64; 3]);
        loop {
            let before = span.len();
            let cur: Vec<Vec<u64>> = span.iter().cloned().collect();
            for v in &cur {
                for g in &ker {
                    span.insert(v.iter().zip(g).map(|(a, b)| (a + b) % 4).collect());
                }
            }
            if span.len() == before {
                break;
            }
        }
        assert_eq!(span.len(), size);
    }
}
