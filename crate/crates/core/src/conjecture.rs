//! Exact per-instance search for a two-interval circle partition.
//!
//! Given measures on the circle and demands summing to 1, look for a
//! nonempty proper subset `P` of the agents (with complement `Q`) and an arc
//! `X` such that `min_{i∈P} μᵢ(X) = Σ_P α` and `min_{j∈Q} μⱼ(Xᶜ) = Σ_Q α`.
//!
//! The arc is parametrized by its endpoints `(a,b) ∈ [0,1]²`: for `a ≤ b` it
//! is `[a,b]` with mass `F(b) − F(a)`, for `a ≥ b` it wraps and has mass
//! `1 − F(a) + F(b)`. On every cell of the grid spanned by all breakpoints
//! (diagonal cells split into those two triangles) each mass is affine in
//! `(a,b)`, so for a fixed `P` and attaining pair `(i*, j*)` the feasible set
//! in a cell is a convex polygon. Its lexicographically smallest point is a
//! vertex, found by intersecting constraint lines. The search is therefore
//! exhaustive, and `CERTIFIED_NONE` means no witness exists at all.

use std::cmp::Ordering;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::division::Instance;
use crate::error::{Error, Result};
use crate::instances::random_instance;
use crate::measure::{CircleArc, Measure};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureWitness {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    /// `i* ∈ P` and `j* ∈ Q` attaining the two minima
    pub attaining: [usize; 2],
    /// endpoint parameters; `wraps` selects the `a ≥ b` branch
    pub a: Rational,
    pub b: Rational,
    pub wraps: bool,
    pub arc: CircleArc,
    pub sigma_p: Rational,
    pub sigma_q: Rational,
    /// `min_P μᵢ(X) − Σ_P α` and `min_Q μⱼ(Xᶜ) − Σ_Q α`, recomputed from the arc
    pub residuals: [Rational; 2],
    /// the arc is empty or the whole circle
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum SearchOutcome {
    #[serde(rename = "witness")]
    Witness { witness: Box<ConjectureWitness> },
    #[serde(rename = "CERTIFIED_NONE")]
    CertifiedNone,
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&ConjectureWitness> {
        match self {
            SearchOutcome::Witness { witness } => Some(witness),
            SearchOutcome::CertifiedNone => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    pub refine: usize,
    /// cells, counting each diagonal triangle separately
    pub cells: usize,
    /// (P, attaining pair, cell) combinations examined
    pub examined: u64,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// each breakpoint gap is split into this many equal parts
    pub refine: usize,
    /// upper limit on (P, attaining pair, cell) combinations
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            refine: 1,
            budget: 20_000_000,
        }
    }
}

/// `[min_P μᵢ(X) − Σ_P α, min_Q μⱼ(Xᶜ) − Σ_Q α]`.
pub fn witness_residuals(inst: &Instance, p: &[usize], arc: &CircleArc) -> Result<[Rational; 2]> {
    let n = inst.n();
    if p.is_empty() || p.len() >= n || p.iter().any(|&i| i >= n) {
        return Err(Error::Precondition("P must be a nonempty proper subset of the agents".into()));
    }
    let q: Vec<usize> = (0..n).filter(|i| !p.contains(i)).collect();
    let comp = arc.complement();
    let min_p = p.iter().map(|&i| inst.measures[i].arc_mass(arc)).min().expect("P nonempty");
    let min_q = q.iter().map(|&j| inst.measures[j].arc_mass(&comp)).min().expect("Q nonempty");
    let sigma_p: Rational = p.iter().map(|&i| &inst.demands[i]).sum();
    let sigma_q: Rational = q.iter().map(|&j| &inst.demands[j]).sum();
    Ok([min_p - sigma_p, min_q - sigma_q])
}

/// Nonempty proper subsets of `0..n`, by size and then lexicographically.
fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == n - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for j in pos..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// `F(θ) = intercept + density · θ` on one grid interval.
#[derive(Clone)]
struct Affine {
    density: Rational,
    intercept: Rational,
}

/// `A·a + B·b + C`, constrained to `= 0` or `≥ 0`.
#[derive(Clone)]
struct Line {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl Line {
    fn eval(&self, a: &Rational, b: &Rational) -> Rational {
        &self.a * a + &self.b * b + &self.c
    }

    fn trivial(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn meet(&self, other: &Line) -> Option<(Rational, Rational)> {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return None;
        }
        let a = (&self.b * &other.c - &self.c * &other.b) / &det;
        let b = (&self.c * &other.a - &self.a * &other.c) / &det;
        Some((a, b))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Piece {
    Plain,
    Wrap,
}

struct Cell {
    ka: usize,
    kb: usize,
    piece: Piece,
}

struct Grid {
    points: Vec<Rational>,
    /// `cdf[i][k]`: affine form of `Fᵢ` on `[points[k], points[k+1]]`
    forms: Vec<Vec<Affine>>,
    cells: Vec<Cell>,
}

impl Grid {
    fn new(measures: &[Measure], refine: usize) -> Grid {
        let mut base: Vec<Rational> = measures.iter().flat_map(|m| m.breakpoints().iter().cloned()).collect();
        base.sort();
        base.dedup();
        let mut points = Vec::new();
        for w in base.windows(2) {
            let width = &w[1] - &w[0];
            for k in 0..refine as i64 {
                points.push(&w[0] + &width * Rational::new(k, refine as i64));
            }
        }
        points.push(Rational::one());
        let forms = measures
            .iter()
            .map(|m| {
                points
                    .windows(2)
                    .map(|w| {
                        let lo = m.cdf_at(&w[0]);
                        let hi = m.cdf_at(&w[1]);
                        let density = (&hi - &lo) / (&w[1] - &w[0]);
                        let intercept = lo - &density * &w[0];
                        Affine { density, intercept }
                    })
                    .collect()
            })
            .collect();
        let m = points.len() - 1;
        let mut cells = Vec::new();
        for ka in 0..m {
            for kb in 0..m {
                match ka.cmp(&kb) {
                    Ordering::Less => cells.push(Cell { ka, kb, piece: Piece::Plain }),
                    Ordering::Greater => cells.push(Cell { ka, kb, piece: Piece::Wrap }),
                    Ordering::Equal => {
                        cells.push(Cell { ka, kb, piece: Piece::Plain });
                        cells.push(Cell { ka, kb, piece: Piece::Wrap });
                    }
                }
            }
        }
        Grid { points, forms, cells }
    }

    /// `μᵢ(X) − σ` as a line over the cell.
    fn mass_minus(&self, i: usize, cell: &Cell, sigma: &Rational) -> Line {
        let fa = &self.forms[i][cell.ka];
        let fb = &self.forms[i][cell.kb];
        let mut c = &fb.intercept - &fa.intercept - sigma;
        if cell.piece == Piece::Wrap {
            c += Rational::one();
        }
        Line {
            a: -fa.density.clone(),
            b: fb.density.clone(),
            c,
        }
    }

    fn bounds(&self, cell: &Cell) -> Vec<Line> {
        let (a0, a1) = (&self.points[cell.ka], &self.points[cell.ka + 1]);
        let (b0, b1) = (&self.points[cell.kb], &self.points[cell.kb + 1]);
        let one = Rational::one;
        let zero = Rational::zero;
        let mut out = vec![
            Line { a: one(), b: zero(), c: -a0.clone() },
            Line { a: -one(), b: zero(), c: a1.clone() },
            Line { a: zero(), b: one(), c: -b0.clone() },
            Line { a: zero(), b: -one(), c: b1.clone() },
        ];
        if cell.ka == cell.kb {
            let diag = Line { a: -one(), b: one(), c: zero() };
            out.push(match cell.piece {
                Piece::Plain => diag,
                Piece::Wrap => Line { a: one(), b: -one(), c: zero() },
            });
        }
        out
    }
}

/// Lexicographically smallest `(a,b)` with every `eq` line zero and every
/// `ge` line non-negative, if any.
fn lexmin(eq: &[Line], ge: &[Line]) -> Option<(Rational, Rational)> {
    let mut pivots = Vec::new();
    for l in eq {
        if l.trivial() {
            if !l.c.is_zero() {
                return None;
            }
        } else {
            pivots.push(l);
        }
    }
    let feasible = |a: &Rational, b: &Rational| {
        eq.iter().all(|l| l.eval(a, b).is_zero()) && ge.iter().all(|l| !l.eval(a, b).is_negative())
    };
    let mut best: Option<(Rational, Rational)> = None;
    let mut consider = |pt: (Rational, Rational)| {
        if feasible(&pt.0, &pt.1) && best.as_ref().is_none_or(|b| pt < *b) {
            best = Some(pt);
        }
    };
    match pivots.first() {
        Some(first) => {
            for other in pivots.iter().skip(1).copied().chain(ge.iter()) {
                if let Some(pt) = first.meet(other) {
                    consider(pt);
                }
            }
        }
        None => {
            let lines: Vec<&Line> = ge.iter().filter(|l| !l.trivial()).collect();
            for (k, l1) in lines.iter().enumerate() {
                for l2 in &lines[k + 1..] {
                    if let Some(pt) = l1.meet(l2) {
                        consider(pt);
                    }
                }
            }
        }
    }
    best
}

/// Number of (P, attaining pair, cell) combinations a full search visits.
pub fn search_size(inst: &Instance, refine: usize) -> u64 {
    let cells = Grid::new(&inst.measures, refine.max(1)).cells.len() as u64;
    subsets(inst.n())
        .iter()
        .map(|p| (p.len() * (inst.n() - p.len())) as u64 * cells)
        .sum()
}

/// First witness in the order: `P` by size then lexicographically, attaining
/// pairs `(i*, j*)` lexicographically, and within those the
/// lexicographically smallest `(a, b, wraps)` over all cells. Agents are
/// 0-based.
pub fn search_witness(inst: &Instance, opts: &SearchOptions) -> Result<SearchResult> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::Precondition(format!("need at least 2 agents, got {n}")));
    }
    if inst.demand_sum() != Rational::one() {
        return Err(Error::Precondition(format!("demands sum to {}, expected 1", inst.demand_sum())));
    }
    if opts.refine == 0 {
        return Err(Error::validation("refine", "must be at least 1"));
    }
    let total = search_size(inst, opts.refine);
    if total > opts.budget {
        return Err(Error::Budget {
            what: format!("conjecture search over {total} (P, pair, cell) combinations"),
            budget: opts.budget,
        });
    }
    let grid = Grid::new(&inst.measures, opts.refine);
    let mut examined = 0u64;
    for p in subsets(n) {
        let q: Vec<usize> = (0..n).filter(|i| !p.contains(i)).collect();
        let sigma_p: Rational = p.iter().map(|&i| &inst.demands[i]).sum();
        for &i_star in &p {
            for &j_star in &q {
                let mut best: Option<(Rational, Rational, Piece)> = None;
                for cell in &grid.cells {
                    examined += 1;
                    let eq = [
                        grid.mass_minus(i_star, cell, &sigma_p),
                        grid.mass_minus(j_star, cell, &sigma_p),
                    ];
                    let mut ge = grid.bounds(cell);
                    for &i in &p {
                        ge.push(grid.mass_minus(i, cell, &sigma_p));
                    }
                    for &j in &q {
                        let l = grid.mass_minus(j, cell, &sigma_p);
                        ge.push(Line { a: -l.a, b: -l.b, c: -l.c });
                    }
                    if let Some((a, b)) = lexmin(&eq, &ge) {
                        let better = match &best {
                            None => true,
                            Some((ba, bb, bp)) => {
                                (&a, &b, cell.piece == Piece::Wrap) < (ba, bb, *bp == Piece::Wrap)
                            }
                        };
                        if better {
                            best = Some((a, b, cell.piece));
                        }
                    }
                }
                if let Some((a, b, piece)) = best {
                    let witness = build_witness(inst, &p, &q, [i_star, j_star], a, b, piece)?;
                    return Ok(SearchResult {
                        outcome: SearchOutcome::Witness { witness: Box::new(witness) },
                        refine: opts.refine,
                        cells: grid.cells.len(),
                        examined,
                    });
                }
            }
        }
    }
    Ok(SearchResult {
        outcome: SearchOutcome::CertifiedNone,
        refine: opts.refine,
        cells: grid.cells.len(),
        examined,
    })
}

fn build_witness(
    inst: &Instance,
    p: &[usize],
    q: &[usize],
    attaining: [usize; 2],
    a: Rational,
    b: Rational,
    piece: Piece,
) -> Result<ConjectureWitness> {
    let length = match piece {
        Piece::Plain => &b - &a,
        Piece::Wrap => Rational::one() - &a + &b,
    };
    let arc = CircleArc::new(a.fract_mod1(), length)?;
    let residuals = witness_residuals(inst, p, &arc)?;
    if !residuals[0].is_zero() || !residuals[1].is_zero() {
        return Err(Error::Internal(format!(
            "witness arc {arc:?} has residuals ({}, {})",
            residuals[0], residuals[1]
        )));
    }
    let sigma_p: Rational = p.iter().map(|&i| &inst.demands[i]).sum();
    Ok(ConjectureWitness {
        p: p.to_vec(),
        q: q.to_vec(),
        attaining,
        degenerate: arc.is_degenerate(),
        a,
        b,
        wraps: piece == Piece::Wrap,
        arc,
        sigma_q: Rational::one() - &sigma_p,
        sigma_p,
        residuals,
    })
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub max_segments: usize,
    pub search: SearchOptions,
    /// worker threads; the report does not depend on it
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignRecord {
    pub index: usize,
    pub instance_seed: u64,
    /// `witness`, `CERTIFIED_NONE` or `budget-exceeded`
    pub outcome: String,
    pub witness: Option<ConjectureWitness>,
    pub examined: u64,
    /// the full instance, kept for `CERTIFIED_NONE` only
    pub instance: Option<Instance>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignReport {
    pub n: usize,
    pub seed: u64,
    pub records: Vec<CampaignRecord>,
    pub witnesses: usize,
    pub certified_none: usize,
    pub budget_exceeded: usize,
}

impl CampaignReport {
    /// One compact JSON object per record, keys sorted.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let v = serde_json::to_value(r).expect("records serialize");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

fn run_record(cfg: &CampaignConfig, index: usize, instance_seed: u64) -> CampaignRecord {
    let mut record = CampaignRecord {
        index,
        instance_seed,
        outcome: String::new(),
        witness: None,
        examined: 0,
        instance: None,
        error: None,
    };
    let inst = match random_instance(cfg.n, cfg.max_segments, instance_seed) {
        Ok(i) => i,
        Err(e) => {
            record.outcome = "error".into();
            record.error = Some(e.to_string());
            return record;
        }
    };
    match search_witness(&inst, &cfg.search) {
        Ok(res) => {
            record.examined = res.examined;
            match res.outcome {
                SearchOutcome::Witness { witness } => {
                    record.outcome = "witness".into();
                    record.witness = Some(*witness);
                }
                SearchOutcome::CertifiedNone => {
                    record.outcome = "CERTIFIED_NONE".into();
                    record.instance = Some(inst);
                }
            }
        }
        Err(Error::Budget { what, .. }) => {
            record.outcome = "budget-exceeded".into();
            record.error = Some(what);
        }
        Err(e) => {
            record.outcome = "error".into();
            record.error = Some(e.to_string());
        }
    }
    record
}

/// Searches `count` seeded random instances. Budget exhaustion is recorded
/// per instance and the campaign continues.
pub fn stress_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    if cfg.n < 2 {
        return Err(Error::validation("n", format!("need n ≥ 2, got {}", cfg.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.count).map(|_| rng.next_u64()).collect();
    let jobs = cfg.jobs.max(1).min(cfg.count.max(1));
    let mut records: Vec<CampaignRecord> = Vec::with_capacity(cfg.count);
    if jobs == 1 {
        records.extend(seeds.iter().enumerate().map(|(k, &s)| run_record(cfg, k, s)));
    } else {
        let chunk = cfg.count.div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .chunks(chunk)
                .enumerate()
                .map(|(c, part)| {
                    scope.spawn(move || {
                        part.iter()
                            .enumerate()
                            .map(|(k, &s)| run_record(cfg, c * chunk + k, s))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                records.extend(h.join().expect("campaign worker panicked"));
            }
        });
    }
    let count = |tag: &str| records.iter().filter(|r| r.outcome == tag).count();
    Ok(CampaignReport {
        n: cfg.n,
        seed: cfg.seed,
        witnesses: count("witness"),
        certified_none: count("CERTIFIED_NONE"),
        budget_exceeded: count("budget-exceeded"),
        records,
    })
}
