use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::homology::{pi1_presentation_sequences, sequence_components, sequence_homology, triviality, HomologyRequest, Triviality};
use crate::poset::{Entry, SequencePoset};
use crate::ring::{stable_rank, ModulusRing};
use crate::symplectic::{enumerate_hyperbolic, enumerate_isotropic, enumerate_relative, enumerate_unimodular, SymplecticSpace};
use crate::verdict::Outcome;

/// Connectivity statements with an explicit bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundTheorem {
    /// `IU(R^{2n})` is `floor((n - sr - 2) / 2)`-connected.
    #[serde(rename = "b-w1")]
    Bw1,
    /// `HU(R^{2n})` is `floor((n - sr - 3) / 2)`-connected.
    #[serde(rename = "b-w2")]
    Bw2,
    /// `O(R^n) ∩ U(R^m)` is `(n - sr - 1)`-connected.
    #[serde(rename = "kal5")]
    Kal5,
    /// `U(R^{2n})_v ∩ O(<v>^perp)` is `(2n - sr - 2k - 1)`-connected.
    #[serde(rename = "u-i")]
    Ui,
}

impl FromStr for BoundTheorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b-w1" => Ok(BoundTheorem::Bw1),
            "b-w2" => Ok(BoundTheorem::Bw2),
            "kal5" => Ok(BoundTheorem::Kal5),
            "u-i" => Ok(BoundTheorem::Ui),
            other => invalid(format!("{other:?} has no connectivity bound table")),
        }
    }
}

impl std::fmt::Display for BoundTheorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundTheorem::Bw1 => "b-w1",
            BoundTheorem::Bw2 => "b-w2",
            BoundTheorem::Kal5 => "kal5",
            BoundTheorem::Ui => "u-i",
        })
    }
}

impl BoundTheorem {
    /// The bound; `k` is `|v|` for u-i and ignored otherwise.
    pub fn bound(self, sr: u32, n: usize, k: usize) -> i64 {
        let (sr, n, k) = (sr as i64, n as i64, k as i64);
        match self {
            BoundTheorem::Bw1 => (n - sr - 2).div_euclid(2),
            BoundTheorem::Bw2 => (n - sr - 3).div_euclid(2),
            BoundTheorem::Kal5 => n - sr - 1,
            BoundTheorem::Ui => 2 * n - sr - 2 * k - 1,
        }
    }
}

/// One row of a bound table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub theorem: BoundTheorem,
    pub family: String,
    pub ring: u64,
    pub n: usize,
    pub k: usize,
    pub bound: i64,
    /// highest degree through which reduced homology was shown to vanish
    /// (`-1`: nonempty only, `-2`: nothing certified)
    pub verified_through: i64,
    pub method: String,
    pub elements: usize,
    pub max_length: usize,
    pub pi1: Option<Triviality>,
    pub outcome: Outcome,
    pub notes: Vec<String>,
    /// wall time, filled in only on request since it varies between runs
    pub runtime_ms: Option<u64>,
}

/// Parameters of one row.
#[derive(Clone, Debug)]
pub struct BoundRequest {
    pub theorem: BoundTheorem,
    pub ring: ModulusRing,
    pub n: usize,
    /// `|v|` for u-i, `m` for kal5 (`0` means `m = n`), unused otherwise
    pub k: usize,
    /// cap on the degrees checked
    pub max_degree: Option<i64>,
    pub screen_primes: Vec<u64>,
    pub record_runtime: bool,
}

impl BoundRequest {
    pub fn new(theorem: BoundTheorem, ring: ModulusRing, n: usize, k: usize) -> Self {
        BoundRequest { theorem, ring, n, k, max_degree: None, screen_primes: Vec::new(), record_runtime: false }
    }
}

/// Computes the bound, enumerates the poset through the length needed and
/// certifies: nonempty when `bound >= -1`, reduced `H_k = 0` through the
/// (capped) bound, and `pi_1` triviality when the bound is at least one.
pub fn verify_bound(req: &BoundRequest, budget: &Budget) -> Result<BoundRow> {
    let start = Instant::now();
    let sr = stable_rank(&req.ring, budget)?;
    let k_eff = match req.theorem {
        BoundTheorem::Kal5 if req.k == 0 => req.n,
        BoundTheorem::Ui if req.k == 0 => 1,
        _ => req.k,
    };
    let bound = req.theorem.bound(sr, req.n, k_eff);
    let target = req.max_degree.map_or(bound, |d| d.min(bound));
    let len = if bound >= 1 && target >= 0 { (target + 2).max(3) } else { (target + 2).max(1) } as usize;
    let (family, k_col) = match req.theorem {
        BoundTheorem::Bw1 => ("IU".to_string(), 0),
        BoundTheorem::Bw2 => ("HU".to_string(), 0),
        BoundTheorem::Kal5 if k_eff == req.n => ("U".to_string(), k_eff),
        BoundTheorem::Kal5 => (format!("O(R^{})∩U(R^{})", req.n, k_eff), k_eff),
        BoundTheorem::Ui => ("U_v∩O(v^perp)".to_string(), k_eff),
    };
    let mut row = BoundRow {
        theorem: req.theorem,
        family,
        ring: req.ring.modulus(),
        n: req.n,
        k: k_col,
        bound,
        verified_through: -2,
        method: "enumeration".into(),
        elements: 0,
        max_length: len,
        pi1: None,
        outcome: Outcome::Pass,
        notes: Vec::new(),
        runtime_ms: None,
    };
    let result = match req.theorem {
        BoundTheorem::Bw1 => {
            let space = SymplecticSpace::new(req.ring.clone(), req.n)?;
            enumerate_isotropic(&space, len, budget).and_then(|p| certify(&p, bound, target, req, budget, &mut row))
        }
        BoundTheorem::Bw2 => {
            let space = SymplecticSpace::new(req.ring.clone(), req.n)?;
            enumerate_hyperbolic(&space, len, budget).and_then(|p| certify(&p, bound, target, req, budget, &mut row))
        }
        BoundTheorem::Kal5 => {
            if k_eff < req.n {
                return invalid("kal5 needs n <= m");
            }
            enumerate_unimodular(&req.ring, k_eff, len, Some(req.n), budget)
                .and_then(|p| certify(&p, bound, target, req, budget, &mut row))
        }
        BoundTheorem::Ui => {
            let space = SymplecticSpace::new(req.ring.clone(), req.n)?;
            if k_eff > space.dim() {
                return invalid("k exceeds the dimension");
            }
            let v: Vec<Vec<u64>> = (1..=k_eff).map(|i| space.e(i)).collect();
            row.notes.push(format!("v = (e_1, ..., e_{k_eff})"));
            enumerate_relative(&space, &v, len, false, budget)
                .and_then(|p| certify(&p, bound, target, req, budget, &mut row))
        }
    };
    match result {
        Ok(()) => {}
        Err(Error::BudgetExceeded(msg)) => {
            row.outcome = Outcome::Inconclusive;
            row.notes.push(format!("budget: {msg}"));
        }
        Err(e) => return Err(e),
    }
    if req.record_runtime {
        row.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(row)
}

fn certify<T: Entry>(
    p: &SequencePoset<T>,
    bound: i64,
    target: i64,
    req: &BoundRequest,
    budget: &Budget,
    row: &mut BoundRow,
) -> Result<()> {
    row.elements = p.len();
    row.notes.push(format!("members by length: {:?}", p.count_by_length()));
    if bound < -1 {
        row.notes.push("bound below -1: nothing to certify".into());
        return Ok(());
    }
    if p.is_empty() {
        row.outcome = Outcome::Fail;
        row.notes.push("poset is empty".into());
        return Ok(());
    }
    row.verified_through = -1;
    if target < 0 {
        return Ok(());
    }
    if sequence_components(p) != 1 {
        row.outcome = Outcome::Fail;
        row.method = "components".into();
        row.notes.push(format!("{} components", sequence_components(p)));
        return Ok(());
    }
    row.verified_through = 0;
    row.method = "components".into();
    if target >= 1 {
        let hr = HomologyRequest::reduced(target).with_screen(&req.screen_primes);
        let r = sequence_homology(p, &row.family, &hr, budget)?;
        row.method = r.method.clone();
        let through = r.acyclic_through().min(target);
        if through < target {
            row.outcome = Outcome::Fail;
            row.notes.push(format!("reduced H_{} = {}", through + 1, r.group(through + 1).unwrap_or_default()));
        }
        row.verified_through = through;
        if !r.is_exact() {
            row.notes.push(format!("degrees checked over F_p for p in {:?} only", r.primes_checked));
        }
    }
    if bound >= 1 && row.outcome == Outcome::Pass {
        let pres = pi1_presentation_sequences(p, 0)?;
        let t = triviality(&pres, budget)?;
        row.method.push_str("+pi1");
        row.pi1 = Some(t.verdict);
        if let Some(c) = &t.certificate {
            row.notes.push(format!("pi1: {c}"));
        }
        if t.verdict == Triviality::Nontrivial {
            row.outcome = Outcome::Fail;
        }
    }
    Ok(())
}

pub const TSV_HEADER: &str = "family\tring\tn\tk\tbound\tverified_through\tmethod\truntime_ms";

/// Rows as tab-separated values under [`TSV_HEADER`].
pub fn rows_to_tsv(rows: &[BoundRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = r.runtime_ms.map_or_else(|| "-".to_string(), |t| t.to_string());
        let _ = writeln!(
            out,
            "{}\tZ/{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.family, r.ring, r.n, r.k, r.bound, r.verified_through, r.method, runtime
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> ModulusRing {
        ModulusRing::new(2).unwrap()
    }

    #[test]
    fn bounds_match_the_formulas() {
        assert_eq!(BoundTheorem::Bw1.bound(1, 2, 0), -1);
        assert_eq!(BoundTheorem::Bw1.bound(1, 3, 0), 0);
        assert_eq!(BoundTheorem::Bw2.bound(1, 2, 0), -1);
        assert_eq!(BoundTheorem::Bw2.bound(1, 3, 0), -1);
        assert_eq!(BoundTheorem::Bw2.bound(1, 1, 0), -2);
        assert_eq!(BoundTheorem::Kal5.bound(1, 3, 3), 1);
        assert_eq!(BoundTheorem::Ui.bound(1, 2, 1), 0);
    }

    #[test]
    fn iu4_is_nonempty() {
        let row = verify_bound(&BoundRequest::new(BoundTheorem::Bw1, z2(), 2, 0), &Budget::default()).unwrap();
        assert_eq!(row.outcome, Outcome::Pass);
        assert_eq!(row.bound, -1);
        assert_eq!(row.verified_through, -1);
        assert_eq!(row.elements, 15);
    }

    #[test]
    fn u3_is_simply_connected() {
        let row = verify_bound(&BoundRequest::new(BoundTheorem::Kal5, z2(), 3, 3), &Budget::default()).unwrap();
        assert_eq!(row.outcome, Outcome::Pass, "{row:?}");
        assert_eq!(row.verified_through, 1);
        assert_eq!(row.pi1, Some(Triviality::Trivial));
        assert_eq!(row.elements, 217);
    }

    #[test]
    fn relative_poset_is_connected() {
        let row = verify_bound(&BoundRequest::new(BoundTheorem::Ui, z2(), 2, 1), &Budget::default()).unwrap();
        assert_eq!(row.outcome, Outcome::Pass, "{row:?}");
        assert_eq!(row.verified_through, 0);
    }

    #[test]
    fn tsv_layout() {
        let row = verify_bound(&BoundRequest::new(BoundTheorem::Bw2, z2(), 2, 0), &Budget::default()).unwrap();
        let tsv = rows_to_tsv(&[row]);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0].split('\t').count(), 8);
        assert_eq!(lines[1], "HU\tZ/2\t2\t0\t-1\t-1\tenumeration\t-");
    }

    #[test]
    fn enumeration_budget_is_inconclusive() {
        let b = Budget { elements: 100, ..Budget::default() };
        let row = verify_bound(&BoundRequest::new(BoundTheorem::Kal5, z2(), 3, 3), &b).unwrap();
        assert_eq!(row.outcome, Outcome::Inconclusive);
    }
}
