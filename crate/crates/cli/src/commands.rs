use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use framecomplex::checks::{charn_check, gz_check, h0_check, vas0_check, vas3_check, wh1_check};
use framecomplex::homology::{
    char_vanishing_check, quillen_criterion_check, sequence_homology, HomologyReport, HomologyRequest,
};
use framecomplex::nerve::{
    bw1_cover, bw2_cover, circle_arc_cover, classical_nerve, hexagon_by_arcs, octahedron_by_faces, rows_to_tsv,
    verify_bound, verify_link_spheres, verify_maazen5, verify_poset_nerve, verify_surjectivity, BoundRequest,
    BoundRow, BoundTheorem,
};
use framecomplex::poset::{CoefficientFunctor, Entry, FinitePoset, HeightFunction, LocalSystem, PosetMap, SequencePoset};
use framecomplex::random::{random_frames, random_interval_functor, random_local_system, random_poset_map, random_sequence_poset, rng};
use framecomplex::ring::{check_matrix_stable_range, check_stable_range, stable_rank, StableRangeReport};
use framecomplex::suites::{run_suite, Suite, SuiteReport};
use framecomplex::symplectic::{
    complete_to_hyperbolic, enumerate_isotropic, enumerate_poset, enumerate_unimodular, esp_orbit, Family, FramePoset,
    OrbitSeed, SymplecticSpace,
};
use framecomplex::{Budget, Error, Outcome, Result, Verdict};

use crate::config::RunConfig;

/// What a command produced: its outcome, a JSON body and a TSV rendering.
pub struct Output {
    pub outcome: Outcome,
    pub body: Value,
    pub tsv: String,
    pub steps: Vec<(String, u64)>,
}

impl Output {
    fn new(outcome: Outcome, body: impl Serialize, tsv: String) -> Result<Self> {
        let body = serde_json::to_value(body).map_err(|e| Error::Internal(e.to_string()))?;
        Ok(Output { outcome, body, tsv, steps: Vec::new() })
    }

    fn verdicts(verdicts: &[Verdict]) -> Result<Self> {
        let outcome = verdicts.iter().map(|v| v.outcome).fold(Outcome::Pass, Outcome::combine);
        let mut tsv = String::from("check\toutcome\tdetail\n");
        for v in verdicts {
            let detail = v.details.join("; ");
            let _ = writeln!(tsv, "{}\t{}\t{}", v.check, v.outcome, detail);
        }
        Output::new(outcome, verdicts, tsv)
    }
}

fn coords(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn space(cfg: &RunConfig) -> Result<SymplecticSpace> {
    SymplecticSpace::new(cfg.ring()?, cfg.require_n()?)
}

/// Module rank of a family over `--n`.
fn module_rank(family: Family, n: usize) -> usize {
    if family == Family::U {
        n
    } else {
        2 * n
    }
}

pub fn enumerate(cfg: &RunConfig, budget: &Budget) -> Result<Output> {
    let family = cfg.family_or(Family::IU)?;
    let n = cfg.require_n()?;
    let dim = module_rank(family, n);
    let ring = cfg.ring()?;
    let max_len = cfg.k.unwrap_or(if family == Family::U { n } else { n.max(1) });
    let poset = enumerate_poset(&ring, dim, family, max_len, None, budget)?;
    let render_single = |c: &u32| coords(&ring.decode(*c as u64, dim));
    let members: Vec<Vec<String>> = match &poset {
        FramePoset::Single(p) => p.members().iter().map(|m| m.iter().map(render_single).collect()).collect(),
        FramePoset::Paired(p) => p
            .members()
            .iter()
            .map(|m| m.iter().map(|(x, y)| format!("{}|{}", render_single(x), render_single(y))).collect())
            .collect(),
    };
    let counts = match &poset {
        FramePoset::Single(p) => p.count_by_length(),
        FramePoset::Paired(p) => p.count_by_length(),
    };
    let chain_condition = match &poset {
        FramePoset::Single(p) => p.check_chain_condition(),
        FramePoset::Paired(p) => p.check_chain_condition(),
    };
    let mut tsv = String::from("length\tframe\n");
    for m in &members {
        let _ = writeln!(tsv, "{}\t{}", m.len(), m.join(" "));
    }
    let body = json!({
        "family": family.to_string(),
        "ring": ring.modulus(),
        "module_rank": dim,
        "max_length": max_len,
        "elements": members.len(),
        "count_by_length": counts,
        "chain_condition": chain_condition,
        "members": members,
    });
    Output::new(Outcome::Pass, body, tsv)
}

fn homology_tsv(r: &HomologyReport) -> String {
    let mut tsv = String::from("degree\tfree_rank\ttorsion\tmethod\n");
    for g in &r.groups {
        let t: Vec<String> = g.torsion.iter().map(u64::to_string).collect();
        let _ = writeln!(tsv, "{}\t{}\t{}\t{}", g.degree, g.free_rank, t.join(","), r.method);
    }
    tsv
}

fn frame_homology<T: Entry>(p: &SequencePoset<T>, id: &str, req: &HomologyRequest, budget: &Budget) -> Result<HomologyReport> {
    sequence_homology(p, id, req, budget)
}

pub fn homology(cfg: &RunConfig, budget: &Budget) -> Result<Output> {
    let family = cfg.family_or(Family::IU)?;
    let n = cfg.require_n()?;
    let dim = module_rank(family, n);
    let ring = cfg.ring()?;
    let top = cfg.max_degree.unwrap_or(1);
    if top < -1 {
        return Err(Error::InvalidInput("--max-degree must be at least -1".into()));
    }
    let poset = enumerate_poset(&ring, dim, family, (top + 2).max(1) as usize, None, budget)?;
    let id = format!("{family}(Z/{}^{dim})", ring.modulus());
    let req = HomologyRequest::reduced(top).with_screen(&cfg.primes);
    let report = match &poset {
        FramePoset::Single(p) => frame_homology(p, &id, &req, budget)?,
        FramePoset::Paired(p) => frame_homology(p, &id, &req, budget)?,
    };
    let tsv = homology_tsv(&report);
    Output::new(Outcome::Pass, report, tsv)
}

fn range_tsv(reports: &[StableRangeReport]) -> String {
    let mut tsv = String::from("ring\tcondition\tholds\tenumerated\n");
    for r in reports {
        let holds = r.holds.map_or("unknown".to_string(), |h| h.to_string());
        let _ = writeln!(tsv, "{}\t{}\t{}\t{}", r.ring, r.condition, holds, r.enumerated_count);
    }
    tsv
}

pub fn stable_range(cfg: &RunConfig, budget: &Budget) -> Result<Output> {
    let ring = cfg.ring()?;
    if let (Some(n), Some(k)) = (cfg.n, cfg.k) {
        if n == 0 || k == 0 {
            return Err(Error::InvalidInput("--n and --k must be positive".into()));
        }
        let r = check_matrix_stable_range(&ring, n, k, budget);
        let outcome = if r.holds.is_some() { Outcome::Pass } else { Outcome::Inconclusive };
        let tsv = range_tsv(std::slice::from_ref(&r));
        return Output::new(outcome, r, tsv);
    }
    let limit = cfg.k.unwrap_or(4).max(1);
    let mut reports = Vec::new();
    let mut rank = None;
    for m in 1..=limit {
        let r = check_stable_range(&ring, m, budget);
        let holds = r.holds;
        reports.push(r);
        match holds {
            Some(true) => {
                rank = Some(m);
                break;
            }
            Some(false) => continue,
            None => break,
        }
    }
    let outcome = if rank.is_some() { Outcome::Pass } else { Outcome::Inconclusive };
    let tsv = range_tsv(&reports);
    Output::new(outcome, json!({ "stable_rank": rank, "reports": reports }), tsv)
}

pub fn orbit(cfg: &RunConfig, budget: &Budget) -> Result<Output> {
    let s = space(cfg)?;
    let family = cfg.family_or(Family::IU)?;
    let k = cfg.k.unwrap_or(1);
    if k == 0 || k > s.n() {
        return Err(Error::InvalidInput(format!("--k must be in 1..={}", s.n())));
    }
    let seed = match family {
        Family::IU => OrbitSeed::Isotropic(framecomplex::checks::standard_isotropic(&s, k)),
        Family::HU => OrbitSeed::Hyperbolic(framecomplex::checks::standard_hyperbolic(&s, k)),
        other => return Err(Error::InvalidInput(format!("orbits are computed for IU or HU, not {other}"))),
    };
    let r = esp_orbit(&s, &seed, budget)?;
    let outcome = if r.complete { Outcome::Pass } else { Outcome::Inconclusive };
    let level = r.level_size.map_or("-".to_string(), |l| l.to_string());
    let transitive = r.transitive.map_or("-".to_string(), |t| t.to_string());
    let tsv = format!(
        "kind\tk\torbit_size\tlevel_size\ttransitive\tclosed\n{}\t{}\t{}\t{level}\t{transitive}\t{}\n",
        r.kind, r.k, r.orbit_size, r.closed
    );
    Output::new(outcome, r, tsv)
}

/// Parses `1,0,0,1;0,1,1,0` into vectors.
fn parse_frame(text: &str, dim: usize, modulus: u64) -> Result<Vec<Vec<u64>>> {
    text.split(';')
        .map(|v| {
            let c: Vec<u64> = v
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| Error::InvalidInput(format!("bad coordinate {x:?}"))))
                .collect::<Result<_>>()?;
            if c.len() != dim {
                return Err(Error::InvalidInput(format!("vector {v:?} needs {dim} coordinates")));
            }
            Ok(c.into_iter().map(|x| x % modulus).collect())
        })
        .collect()
}

pub fn complete_basis(cfg: &RunConfig, frame: Option<&str>, budget: &Budget) -> Result<Output> {
    let s = space(cfg)?;
    let v = match frame {
        Some(text) => parse_frame(text, s.dim(), s.ring().modulus())?,
        None => {
            let k = cfg.k.unwrap_or(1);
            if k == 0 || k > s.dim() {
                return Err(Error::InvalidInput(format!("--k must be in 1..={}", s.dim())));
            }
            budget.check_elements(s.vector_count().unwrap_or(u64::MAX), "vectors")?;
            random_frames(&mut rng(cfg.seed), &s, k, 1).remove(0)
        }
    };
    let b = complete_to_hyperbolic(&s, &v, budget)?;
    let mut tsv = String::from("role\tindex\tvector\tcoordinates\n");
    for (i, (x, c)) in v.iter().zip(&b.coordinates).enumerate() {
        let _ = writeln!(tsv, "input\t{}\t{}\t{}", i + 1, coords(x), coords(c));
    }
    for (i, x) in b.basis.iter().enumerate() {
        let role = if i % 2 == 0 { "x" } else { "y" };
        let _ = writeln!(tsv, "{role}\t{}\t{}\t-", i / 2 + 1, coords(x));
    }
    Output::new(Outcome::Pass, json!({ "frame": v, "basis": b }), tsv)
}

fn bound_output(row: BoundRow) -> Result<Output> {
    let tsv = rows_to_tsv(std::slice::from_ref(&row));
    Output::new(row.outcome, row, tsv)
}

fn theorem_bound(cfg: &RunConfig, theorem: BoundTheorem, budget: &Budget) -> Result<Output> {
    let mut req = BoundRequest::new(theorem, cfg.ring()?, cfg.require_n()?, cfg.k.unwrap_or(0));
    req.max_degree = cfg.max_degree;
    req.screen_primes = cfg.primes.clone();
    req.record_runtime = cfg.timings;
    bound_output(verify_bound(&req, budget)?)
}

fn level(cfg: &RunConfig, default: i64) -> i64 {
    cfg.max_degree.unwrap_or(default)
}

fn instance<'a>(name: Option<&'a str>, default: &'a str, allowed: &[&str]) -> Result<&'a str> {
    let name = name.unwrap_or(default);
    if allowed.contains(&name) {
        Ok(name)
    } else {
        Err(Error::InvalidInput(format!("unknown instance {name:?}; expected one of {}", allowed.join(", "))))
    }
}

pub const THEOREMS: [&str; 17] = [
    "b-w1", "b-w2", "kal5", "u-i", "vas0", "vas3", "p-n-t", "h-n", "surj", "maazen5", "maazen1", "char", "quil", "g-z",
    "wh1", "h0", "charn",
];

pub fn verify(cfg: &RunConfig, theorem: &str, inst: Option<&str>, budget: &Budget) -> Result<Output> {
    match theorem {
        "b-w1" => theorem_bound(cfg, BoundTheorem::Bw1, budget),
        "b-w2" => theorem_bound(cfg, BoundTheorem::Bw2, budget),
        "kal5" => theorem_bound(cfg, BoundTheorem::Kal5, budget),
        "u-i" => theorem_bound(cfg, BoundTheorem::Ui, budget),
        "vas0" => {
            let v = vas0_check(&space(cfg)?, cfg.family_or(Family::IU)?, cfg.k.unwrap_or(1), budget)?;
            Output::verdicts(&[v])
        }
        "vas3" => {
            let v = vas3_check(&cfg.ring()?, cfg.require_n()?, cfg.k.unwrap_or(1), budget)?;
            Output::verdicts(&[v])
        }
        "p-n-t" => verify_nerve(cfg, inst, budget),
        "h-n" => {
            let (k, pieces) = match instance(inst, "octahedron", &["octahedron", "hexagon"])? {
                "octahedron" => octahedron_by_faces(),
                _ => hexagon_by_arcs(),
            };
            let r = classical_nerve(&k, &pieces, level(cfg, 1), budget)?;
            let tsv = Output::verdicts(std::slice::from_ref(&r.verdict))?.tsv;
            Output::new(r.verdict.outcome, r, tsv)
        }
        "surj" => {
            let v = match instance(inst, "b-w2", &["b-w2", "circle"])? {
                "circle" => verify_surjectivity(&circle_arc_cover(level(cfg, 1))?, None, budget)?,
                _ => {
                    let s = space(cfg)?;
                    let sr = stable_rank(s.ring(), budget)?;
                    let l = level(cfg, BoundTheorem::Bw2.bound(sr, s.n(), 0));
                    verify_surjectivity(&bw2_cover(&s, l, budget)?, None, budget)?
                }
            };
            Output::verdicts(&[v])
        }
        "maazen5" => {
            let s = space(cfg)?;
            let n = level(cfg, 0);
            let f = enumerate_isotropic(&s, (n + 2).max(1) as usize, budget)?;
            let set: Vec<u32> = (0..cfg.k.unwrap_or(2).max(1) as u32).collect();
            Output::verdicts(&[verify_maazen5(&f, &set, &0, n, budget)?])
        }
        "maazen1" => {
            let family = cfg.family_or(Family::IU)?;
            let n = cfg.require_n()?;
            let v = match family {
                Family::U => verify_link_spheres(&enumerate_unimodular(&cfg.ring()?, n, n, None, budget)?, budget)?,
                Family::IU => verify_link_spheres(&enumerate_isotropic(&space(cfg)?, n, budget)?, budget)?,
                other => return Err(Error::InvalidInput(format!("maazen1 is checked on U or IU, not {other}"))),
            };
            Output::verdicts(&[v])
        }
        "char" => {
            let n = cfg.require_n()?;
            let f = enumerate_unimodular(&cfg.ring()?, n, n, None, budget)?;
            let x = Arc::new(f.to_finite());
            let heights: Vec<u32> = f.members().iter().map(|m| m.len() as u32 - 1).collect();
            let ht = HeightFunction::new(&x, heights.clone())?;
            let m = cfg.k.unwrap_or(1) as u32;
            let functor = CoefficientFunctor::constant(x.clone(), 1).masked(|i| heights[i] < m)?;
            Output::verdicts(&[char_vanishing_check(&x, &ht, &functor, level(cfg, 1), m, budget)?])
        }
        "quil" => {
            let s = space(cfg)?;
            let n = level(cfg, 1);
            let base = enumerate_isotropic(&s, (n + 1).max(1) as usize, budget)?;
            let set: Vec<u32> = (0..cfg.k.unwrap_or(2).max(1) as u32).collect();
            let tensor = base.tensor_with_set(&set)?;
            let proj = tensor.projection_indices(&base)?;
            let y = Arc::new(base.to_finite());
            let f = PosetMap::new(Arc::new(tensor.to_finite()), y.clone(), proj)?;
            let ht = HeightFunction::new(&y, base.members().iter().map(|m| m.len() as u32 - 1).collect())?;
            Output::verdicts(&[quillen_criterion_check(&f, &ht, n, budget)?])
        }
        "g-z" => {
            let mut r = rng(cfg.seed);
            let f = random_poset_map(&mut r, cfg.n.unwrap_or(12), cfg.k.unwrap_or(6), 0.25);
            let top = level(cfg, f.source().dimension() + f.target().dimension() + 1);
            Output::verdicts(&[gz_check(&f, top, budget)?])
        }
        "wh1" => {
            let v = match instance(inst, "hexagon", &["hexagon", "random"])? {
                "hexagon" => {
                    let p = Arc::new(FinitePoset::crown(3));
                    let first = p.cover_pairs().next().expect("a cover");
                    wh1_check(&p, &LocalSystem::signed(p.clone(), &[first])?, 0, budget)?
                }
                _ => {
                    let (p, l) = random_local_system(&mut rng(cfg.seed), 3, 3, cfg.k.unwrap_or(2).max(1))?;
                    wh1_check(&p, &l, 0, budget)?
                }
            };
            Output::verdicts(&[v])
        }
        "h0" => {
            let mut r = rng(cfg.seed);
            let f = random_sequence_poset(&mut r, cfg.n.unwrap_or(6) as u32, 5, 3);
            let op = Arc::new(f.to_finite().opposite());
            let g = random_interval_functor(&mut r, op, cfg.k.unwrap_or(3))?;
            Output::verdicts(&[h0_check(&f, &g, budget)?])
        }
        "charn" => {
            let v = charn_check(&cfg.ring()?, cfg.require_n()?, cfg.k.unwrap_or(1), level(cfg, 1), budget)?;
            Output::verdicts(&[v])
        }
        other => Err(Error::InvalidInput(format!("unknown theorem {other:?}; expected one of {}", THEOREMS.join(", ")))),
    }
}

fn verify_nerve(cfg: &RunConfig, inst: Option<&str>, budget: &Budget) -> Result<Output> {
    let r = match instance(inst, "b-w1", &["b-w1", "circle"])? {
        "circle" => verify_poset_nerve(&circle_arc_cover(level(cfg, 0))?, budget)?,
        _ => {
            let s = space(cfg)?;
            let sr = stable_rank(s.ring(), budget)?;
            let l = level(cfg, BoundTheorem::Bw1.bound(sr, s.n(), 0).max(0));
            verify_poset_nerve(&bw1_cover(&s, l, budget)?, budget)?
        }
    };
    let tsv = Output::verdicts(std::slice::from_ref(&r.verdict))?.tsv;
    Output::new(r.verdict.outcome, r, tsv)
}

pub fn report(cfg: &RunConfig, suite: &str) -> Result<Output> {
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let mut reports: Vec<SuiteReport> = Vec::new();
    let mut steps = Vec::new();
    for s in suites {
        let start = std::time::Instant::now();
        reports.push(run_suite(s, cfg.seed, &cfg.budget()));
        steps.push((s.to_string(), start.elapsed().as_millis() as u64));
    }
    let outcome = reports.iter().map(|r| r.outcome).fold(Outcome::Pass, Outcome::combine);
    let mut tsv = String::from("suite\tcheck\texpected\toutcome\n");
    for r in &reports {
        for c in &r.checks {
            let _ = writeln!(tsv, "{}\t{}\t{}\t{}", r.suite, c.verdict.check, c.expected, c.outcome);
        }
    }
    let mut out = Output::new(outcome, &reports, tsv)?;
    out.steps = steps;
    Ok(out)
}
