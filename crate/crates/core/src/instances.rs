//! Instance generators and a brute-force minimal-cut oracle.
//!
//! The lower-bound family gives one agent almost everything of the uniform
//! measure and spreads a tiny total demand over agents whose measures live
//! on short disjoint intervals. Every valid division then needs two cut
//! positions around each tiny support, so `2n − 2` cuts in total.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::division::{verify, Division, Instance};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::rational::Rational;

/// Parameters of the lower-bound family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundParams {
    n: usize,
    eps: Rational,
    delta: Rational,
}

impl LowerBoundParams {
    /// `n ≥ 2` agents, support half-width `0 < ε < 1/(2n)` and slack
    /// `0 < δ < ε`.
    pub fn new(n: usize, eps: Rational, delta: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("n", format!("need n ≥ 2, got {n}")));
        }
        let limit = Rational::new(1, 2 * n as i64);
        if !eps.is_positive() || eps >= limit {
            return Err(Error::validation("eps", format!("need 0 < ε < {limit}, got {eps}")));
        }
        if !delta.is_positive() || delta >= eps {
            return Err(Error::validation("delta", format!("need 0 < δ < ε = {eps}, got {delta}")));
        }
        Ok(LowerBoundParams { n, eps, delta })
    }

    /// `ε = 1/(10n²)`, `δ = ε²`.
    pub fn practical(n: usize) -> Result<Self> {
        let eps = Rational::new(1, 10 * (n * n) as i64);
        let delta = &eps * &eps;
        Self::new(n, eps, delta)
    }

    /// `ε = 1/(100n)¹⁰`, `δ = ε¹⁰`. Exact, but far too small to look at.
    pub fn astronomical(n: usize) -> Result<Self> {
        let eps = Rational::new(1, 100 * n as i64).pow(10);
        let delta = eps.pow(10);
        Self::new(n, eps, delta)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// Support `[i/n − ε, i/n + ε]` of tiny agent `i` (1-based, `1 ≤ i < n`).
    pub fn support(&self, i: usize) -> (Rational, Rational) {
        let c = Rational::new(i as i64, self.n as i64);
        (&c - &self.eps, &c + &self.eps)
    }
}

/// Agent 0 is uniform on `[0,1]` with demand `1 − δ`; agent `i ≥ 1` is
/// uniform on `[i/n − ε, i/n + ε]` with demand `δ/(n−1)`.
pub fn lower_bound_instance(params: &LowerBoundParams) -> Result<Instance> {
    let n = params.n;
    let mut measures = vec![Measure::uniform()];
    for i in 1..n {
        let (a, b) = params.support(i);
        measures.push(Measure::uniform_on(&a, &b)?);
    }
    let tiny = &params.delta / Rational::from_int(n as i64 - 1);
    let mut demands = vec![Rational::one() - &params.delta];
    demands.extend(std::iter::repeat_n(tiny, n - 1));
    Instance::new_strict(measures, demands)
}

/// For each tiny agent, the number of cut positions of `div` (endpoints 0
/// and 1 included) inside `[i/n − ε − δ, i/n + ε + δ]`.
pub fn count_support_cuts(params: &LowerBoundParams, div: &Division) -> Vec<usize> {
    let div = div.canonical();
    let mut positions = vec![Rational::zero()];
    positions.extend(div.cuts.iter().cloned());
    positions.push(Rational::one());
    (1..params.n)
        .map(|i| {
            let (a, b) = params.support(i);
            let lo = &a - &params.delta;
            let hi = &b + &params.delta;
            positions.iter().filter(|c| **c >= lo && **c <= hi).count()
        })
        .collect()
}

/// Seeded random instance with demands summing to 1.
///
/// Each measure has up to `max_segments` segments on random rational
/// breakpoints with small integer densities (zeros included, so plateaus
/// occur), normalized exactly. About one measure in eight repeats an
/// earlier one, and about one demand in ten is zero.
pub fn random_instance(n: usize, max_segments: usize, seed: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::validation("n", "need at least one agent"));
    }
    if max_segments == 0 {
        return Err(Error::validation("max_segments", "need at least one segment"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut measures: Vec<Measure> = Vec::with_capacity(n);
    for _ in 0..n {
        if !measures.is_empty() && rng.random_range(0..8) == 0 {
            let k = rng.random_range(0..measures.len());
            measures.push(measures[k].clone());
            continue;
        }
        measures.push(random_measure(&mut rng, max_segments)?);
    }
    let mut weights: Vec<i64> = (0..n)
        .map(|_| if rng.random_range(0..10) == 0 { 0 } else { rng.random_range(1..=20) })
        .collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let demands = weights.iter().map(|&w| Rational::new(w, total)).collect();
    Instance::new_strict(measures, demands)
}

fn random_measure(rng: &mut ChaCha8Rng, max_segments: usize) -> Result<Measure> {
    let segments = rng.random_range(1..=max_segments);
    let mut inner: Vec<Rational> = Vec::new();
    while inner.len() < segments - 1 {
        let d = rng.random_range(2..=24i64);
        let p = Rational::new(rng.random_range(1..d), d);
        if !inner.contains(&p) {
            inner.push(p);
        }
    }
    inner.sort();
    let mut breakpoints = vec![Rational::zero()];
    breakpoints.extend(inner);
    breakpoints.push(Rational::one());
    let mut densities: Vec<Rational> = (0..segments).map(|_| Rational::from_int(rng.random_range(0..10))).collect();
    if densities.iter().all(|d| d.is_zero()) {
        let k = rng.random_range(0..segments);
        densities[k] = Rational::one();
    }
    Measure::normalized(breakpoints, densities)
}

/// Smallest cut count found by [`oracle_min_cuts`], or none on the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BestCuts {
    Cuts(usize),
    InfeasibleOnGrid,
}

impl Serialize for BestCuts {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BestCuts::Cuts(k) => s.serialize_u64(*k as u64),
            BestCuts::InfeasibleOnGrid => s.serialize_str("infeasible-on-grid"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub grid_refine: usize,
    /// interior grid points cuts were drawn from
    pub grid_points: usize,
    pub max_cuts: usize,
    pub best_cuts: BestCuts,
    pub witness: Option<Division>,
    /// An infeasible result only rules out cuts on the grid.
    pub evidence_only: bool,
    /// (cut tuple, owner sequence) pairs examined
    pub examined: u64,
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub max_cuts: usize,
    /// Each grid cell is also split into `m` equal parts for every
    /// `2 ≤ m ≤ grid_refine`, so a finer setting always contains a coarser one.
    pub grid_refine: usize,
    /// Upper limit on (cut tuple, owner sequence) pairs.
    pub budget: u64,
    /// Extra candidate cut positions (for example a solver's cuts).
    pub extra_points: Vec<Rational>,
}

impl OracleOptions {
    pub fn new(max_cuts: usize, grid_refine: usize) -> Self {
        OracleOptions {
            max_cuts,
            grid_refine,
            budget: 50_000_000,
            extra_points: Vec::new(),
        }
    }
}

pub fn oracle_min_cuts(inst: &Instance, max_cuts: usize, grid_refine: usize) -> Result<OracleResult> {
    oracle_min_cuts_with(inst, &OracleOptions::new(max_cuts, grid_refine))
}

/// Candidate cut positions: breakpoints, the `αⱼ`- and `(1 − αⱼ)`-quantiles of
/// every measure, extra points, and the refinement of each resulting cell.
pub fn oracle_grid(inst: &Instance, grid_refine: usize, extra: &[Rational]) -> Vec<Rational> {
    let mut base: Vec<Rational> = vec![Rational::zero(), Rational::one()];
    for m in &inst.measures {
        base.extend(m.breakpoints().iter().cloned());
        for a in &inst.demands {
            base.push(m.quantile_at(a));
            base.push(m.quantile_at(&(Rational::one() - a)));
        }
    }
    base.extend(extra.iter().filter(|p| p.in_unit_interval()).cloned());
    base.sort();
    base.dedup();
    let mut grid = base.clone();
    for w in base.windows(2) {
        let width = &w[1] - &w[0];
        for m in 2..=grid_refine as i64 {
            for k in 1..m {
                grid.push(&w[0] + &width * Rational::new(k, m));
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid.into_iter().filter(|p| p.is_positive() && *p < Rational::one()).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exhaustive search over cuts from [`oracle_grid`] and all owner sequences
/// with distinct neighbours, by increasing cut count. Fails with a budget
/// error before searching if the full enumeration would exceed the budget.
pub fn oracle_min_cuts_with(inst: &Instance, opts: &OracleOptions) -> Result<OracleResult> {
    inst.require_unit_sum()?;
    let n = inst.n();
    let grid = oracle_grid(inst, opts.grid_refine, &opts.extra_points);
    let g = grid.len();

    let mut total: u128 = 0;
    for k in 0..=opts.max_cuts {
        let owners = (n as u128).saturating_mul((n as u128 - 1).saturating_pow(k as u32));
        total = total.saturating_add(binomial(g, k).saturating_mul(owners));
    }
    if total > opts.budget as u128 {
        return Err(Error::Budget {
            what: format!("oracle enumeration of {total} (cut tuple, owner) pairs on {g} grid points"),
            budget: opts.budget,
        });
    }

    // cdf[i][j] at positions 0, grid…, 1
    let mut positions = vec![Rational::zero()];
    positions.extend(grid.iter().cloned());
    positions.push(Rational::one());
    let cdf: Vec<Vec<Rational>> = inst
        .measures
        .iter()
        .map(|m| positions.iter().map(|p| m.cdf_at(p)).collect())
        .collect();

    let mut search = Search {
        inst,
        cdf: &cdf,
        examined: 0,
    };
    for k in 0..=opts.max_cuts.min(g) {
        let mut idx: Vec<usize> = (1..=k).collect();
        loop {
            let mut bounds = vec![0];
            bounds.extend(idx.iter().copied());
            bounds.push(positions.len() - 1);
            if let Some(owners) = search.assign(&bounds) {
                let cuts = idx.iter().map(|&j| positions[j].clone()).collect();
                let division = Division::new(cuts, owners)?;
                if !verify(inst, &division)?.valid {
                    return Err(Error::Internal("oracle witness failed exact verification".into()));
                }
                return Ok(OracleResult {
                    grid_refine: opts.grid_refine,
                    grid_points: g,
                    max_cuts: opts.max_cuts,
                    best_cuts: BestCuts::Cuts(k),
                    witness: Some(division),
                    evidence_only: false,
                    examined: search.examined,
                });
            }
            if !next_combination(&mut idx, g) {
                break;
            }
        }
    }
    Ok(OracleResult {
        grid_refine: opts.grid_refine,
        grid_points: g,
        max_cuts: opts.max_cuts,
        best_cuts: BestCuts::InfeasibleOnGrid,
        witness: None,
        evidence_only: true,
        examined: search.examined,
    })
}

/// Advances a strictly increasing tuple over `1..=g`; false when exhausted.
fn next_combination(idx: &mut [usize], g: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < g - (k - 1 - pos) {
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

struct Search<'a> {
    inst: &'a Instance,
    cdf: &'a [Vec<Rational>],
    examined: u64,
}

impl Search<'_> {
    /// First owner sequence (lexicographic) meeting every demand.
    fn assign(&mut self, bounds: &[usize]) -> Option<Vec<usize>> {
        let n = self.inst.n();
        let pieces = bounds.len() - 1;
        let mass: Vec<Vec<Rational>> = (0..pieces)
            .map(|p| (0..n).map(|i| &self.cdf[i][bounds[p + 1]] - &self.cdf[i][bounds[p]]).collect())
            .collect();
        let mut owners = Vec::with_capacity(pieces);
        let mut got = vec![Rational::zero(); n];
        self.dfs(&mass, &mut owners, &mut got).then_some(owners)
    }

    fn dfs(&mut self, mass: &[Vec<Rational>], owners: &mut Vec<usize>, got: &mut [Rational]) -> bool {
        let p = owners.len();
        if p == mass.len() {
            self.examined += 1;
            return got.iter().zip(&self.inst.demands).all(|(g, a)| g >= a);
        }
        for i in 0..self.inst.n() {
            if owners.last() == Some(&i) {
                continue;
            }
            owners.push(i);
            got[i] += &mass[p][i];
            if self.dfs(mass, owners, got) {
                return true;
            }
            got[i] -= &mass[p][i];
            owners.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::division::cut_count_bound;
    use crate::rational::q;
    use crate::solver::solve;

    #[test]
    fn two_agent_lower_bound_instance() {
        let p = LowerBoundParams::new(2, q(1, 100), q(1, 1_000_000)).unwrap();
        let inst = lower_bound_instance(&p).unwrap();
        assert_eq!(inst.measures[1].breakpoints(), &[q(0, 1), q(49, 100), q(51, 100), q(1, 1)]);
        assert_eq!(inst.measures[1].densities()[1], q(50, 1));
        assert_eq!(inst.demands, vec![q(999_999, 1_000_000), q(1, 1_000_000)]);
        for m in &inst.measures {
            assert_eq!(m.cdf(&q(1, 1)).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn three_agent_supports_are_disjoint() {
        let eps = q(1, 1000);
        let p = LowerBoundParams::new(3, eps.clone(), &eps * &eps).unwrap();
        let inst = lower_bound_instance(&p).unwrap();
        assert_eq!(inst.n(), 3);
        let (_, b1) = p.support(1);
        let (a2, _) = p.support(2);
        assert!(b1 < a2);
        assert_eq!(p.support(1).0, q(1, 3) - q(1, 1000));
    }

    #[test]
    fn parameter_errors() {
        assert!(LowerBoundParams::new(2, q(1, 4), q(1, 100)).is_err());
        assert!(LowerBoundParams::new(3, q(1, 100), q(1, 100)).is_err());
        assert!(LowerBoundParams::new(1, q(1, 100), q(1, 1000)).is_err());
        assert!(LowerBoundParams::new(2, q(0, 1), q(0, 1)).is_err());
    }

    #[test]
    fn astronomical_parameters_are_exact() {
        let p = LowerBoundParams::astronomical(3).unwrap();
        assert_eq!(p.eps(), &q(1, 300).pow(10));
        let inst = lower_bound_instance(&p).unwrap();
        assert_eq!(inst.demand_sum(), q(1, 1));
    }

    #[test]
    fn solver_puts_two_cut_positions_around_each_tiny_support() {
        for n in 2..=5 {
            let p = LowerBoundParams::practical(n).unwrap();
            let inst = lower_bound_instance(&p).unwrap();
            let sol = solve(&inst).unwrap();
            assert!(verify(&inst, &sol.division).unwrap().valid);
            let cuts = sol.division.cut_count();
            assert!(cuts >= 2 * n - 2 && cuts <= cut_count_bound(n).unwrap(), "n={n}: {cuts}");
            assert!(count_support_cuts(&p, &sol.division).iter().all(|&c| c >= 2));
        }
    }

    #[test]
    fn invalid_single_cut_may_miss_the_support() {
        let p = LowerBoundParams::new(2, q(1, 100), q(1, 1_000_000)).unwrap();
        let div = Division::new(vec![q(1, 2)], vec![0, 1]).unwrap();
        assert_eq!(count_support_cuts(&p, &div), vec![1]);
    }

    #[test]
    fn random_instances_are_seeded() {
        let a = random_instance(5, 6, 11).unwrap();
        let b = random_instance(5, 6, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_instance(5, 6, 12).unwrap());
        assert_eq!(a.demand_sum(), q(1, 1));
        assert!(a.measures.iter().all(|m| m.segment_count() <= 6));
        let one = random_instance(1, 3, 5).unwrap();
        assert_eq!(one.demands, vec![q(1, 1)]);
    }

    #[test]
    fn oracle_halves_two_uniform_agents() {
        let inst = Instance::new_strict(vec![Measure::uniform(); 2], vec![q(1, 2), q(1, 2)]).unwrap();
        let r = oracle_min_cuts(&inst, 2, 1).unwrap();
        assert_eq!(r.best_cuts, BestCuts::Cuts(1));
        assert_eq!(r.witness.unwrap().cuts, vec![q(1, 2)]);
    }

    #[test]
    fn oracle_on_two_agent_lower_bound() {
        let p = LowerBoundParams::new(2, q(1, 100), q(1, 1_000_000)).unwrap();
        let inst = lower_bound_instance(&p).unwrap();
        let one = oracle_min_cuts(&inst, 1, 2).unwrap();
        assert_eq!(one.best_cuts, BestCuts::InfeasibleOnGrid);
        assert!(one.evidence_only);
        let two = oracle_min_cuts(&inst, 2, 2).unwrap();
        assert_eq!(two.best_cuts, BestCuts::Cuts(2));
        let w = two.witness.unwrap();
        let (a, b) = p.support(1);
        assert!(w.cuts.iter().all(|c| *c >= a && *c <= b), "{w:?}");
    }

    #[test]
    fn oracle_budget_is_reported() {
        let inst = random_instance(3, 4, 1).unwrap();
        let mut opts = OracleOptions::new(4, 3);
        opts.budget = 10;
        assert!(matches!(oracle_min_cuts_with(&inst, &opts), Err(Error::Budget { .. })));
    }

    #[test]
    fn oracle_never_beats_itself_with_a_coarser_grid() {
        for seed in 0..6 {
            let inst = random_instance(2, 3, seed).unwrap();
            let mut last = usize::MAX;
            for refine in 1..=3 {
                let r = oracle_min_cuts(&inst, 2, refine).unwrap();
                let k = match r.best_cuts {
                    BestCuts::Cuts(k) => k,
                    BestCuts::InfeasibleOnGrid => usize::MAX,
                };
                assert!(k <= last);
                last = k;
            }
        }
    }

    #[test]
    fn oracle_with_solver_cuts_is_no_worse_than_the_solver() {
        for seed in 0..8 {
            let inst = random_instance(3, 3, 100 + seed).unwrap();
            let sol = solve(&inst).unwrap();
            let mut opts = OracleOptions::new(sol.division.cut_count(), 1);
            opts.extra_points = sol.division.cuts.clone();
            let r = oracle_min_cuts_with(&inst, &opts).unwrap();
            match r.best_cuts {
                BestCuts::Cuts(k) => assert!(k <= sol.division.cut_count()),
                BestCuts::InfeasibleOnGrid => panic!("seed {seed}: solver cuts are on the grid"),
            }
        }
    }
}
