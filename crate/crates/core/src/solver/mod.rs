//! Recursive disproportionate division with at most `3n − 4` cuts.
//!
//! Every node of the recursion receives a set of agents with demands summing
//! to at most 1, drops zero demands, scales the rest up to sum to exactly 1
//! (a larger demand is only harder to meet), and then either hands the node
//! to a base case (one agent, or the two-agent circle lemma) or applies one
//! level of the case analysis in [`cases`]. Each case makes one cut and
//! produces at most two subproblems whose sizes `k` and `n + 1 − k` give the
//! recurrence `f(n) ≤ max{1 + f(n−1), 1 + f(k) + f(n+1−k)}` and hence
//! `f(n) ≤ 3n − 4`.
//!
//! Subproblems are rescaled to fresh `[0,1]` instances: each agent's measure
//! is restricted to the child interval and renormalized by its mass there,
//! and its demand is divided by that same mass.

mod cases;
mod check;
mod sweep;
mod trace;

pub use cases::{plan_case, CasePlan, Part};
pub use check::{check_trace, trace_is_valid, TraceViolation};
pub use sweep::{crossing_set, find_sweep, SweepResult};
pub use trace::{CaseStep, PieceTrace, SweepWitness, Trace, TraceNode};

use crate::division::{Division, Instance};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::pair::solve_pair_explained;
use crate::rational::Rational;

/// A division together with the recursion trace that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub division: Division,
    pub trace: Trace,
}

/// Solves `inst` (demands summing to at most 1).
pub fn solve(inst: &Instance) -> Result<Solution> {
    let agents: Vec<usize> = (0..inst.n()).collect();
    let (division, root) = solve_node(&agents, &inst.measures, &inst.demands)?;
    Ok(Solution {
        division,
        trace: Trace { root },
    })
}

/// Agents with positive demand and their demands scaled to sum to 1.
pub(crate) fn normalize(agents: &[usize], demands: &[Rational]) -> (Vec<usize>, Vec<usize>, Vec<Rational>) {
    let positions: Vec<usize> = (0..agents.len()).filter(|&k| demands[k].is_positive()).collect();
    let total: Rational = positions.iter().map(|&k| &demands[k]).sum();
    let normalized = positions
        .iter()
        .map(|&k| {
            if total < Rational::one() {
                &demands[k] / &total
            } else {
                demands[k].clone()
            }
        })
        .collect();
    let active = positions.iter().map(|&k| agents[k]).collect();
    (positions, active, normalized)
}

/// Restriction of each listed measure to `[lo,hi]`, with demands rescaled by
/// the restricted mass.
pub(crate) fn rescale_child(
    measures: &[&Measure],
    demands: &[Rational],
    lo: &Rational,
    hi: &Rational,
) -> Result<(Vec<Measure>, Vec<Rational>)> {
    let mut out_m = Vec::with_capacity(measures.len());
    let mut out_d = Vec::with_capacity(measures.len());
    for (m, d) in measures.iter().zip(demands) {
        let (restricted, mass) = m.restrict(lo, hi).map_err(|e| {
            Error::Internal(format!("child on [{lo}, {hi}] cannot be renormalized: {e}"))
        })?;
        out_d.push(d / &mass);
        out_m.push(restricted);
    }
    Ok((out_m, out_d))
}

fn solve_node(agents: &[usize], measures: &[Measure], demands: &[Rational]) -> Result<(Division, TraceNode)> {
    let (positions, active, normalized) = normalize(agents, demands);
    let node = |step: CaseStep, cuts: usize, pieces: Vec<PieceTrace>| TraceNode {
        agents: agents.to_vec(),
        demands: demands.to_vec(),
        active: active.clone(),
        normalized: normalized.clone(),
        step,
        cuts,
        pieces,
    };

    if active.len() <= 1 {
        let owner = active.first().copied().unwrap_or(agents[0]);
        let pieces = vec![PieceTrace::Assigned {
            lo: Rational::zero(),
            hi: Rational::one(),
            agent: owner,
        }];
        return Ok((Division::single(owner), node(CaseStep::BaseSingle, 0, pieces)));
    }

    let local = Instance::new(
        positions.iter().map(|&k| measures[k].clone()).collect(),
        normalized.clone(),
    )?;

    if active.len() == 2 {
        let sol = solve_pair_explained(&local)?;
        let division = Division::from_pieces(sol.division.embed(&Rational::zero(), &Rational::one(), |o| active[o]))?;
        let pieces = division
            .pieces()
            .map(|(lo, hi, agent)| PieceTrace::Assigned { lo, hi, agent })
            .collect();
        let cuts = division.cut_count();
        return Ok((division, node(CaseStep::BasePair { lemma: sol.lemma }, cuts, pieces)));
    }

    let plan = cases::plan_with_ids(&local, &active)?;
    let mut out_pieces: Vec<(Rational, usize)> = Vec::new();
    let mut traces = Vec::with_capacity(plan.parts.len());
    for part in plan.parts {
        match part {
            Part::Assign { lo, hi, agent } => {
                out_pieces.push((hi.clone(), active[agent]));
                traces.push(PieceTrace::Assigned { lo, hi, agent: active[agent] });
            }
            Part::Child { lo, hi, agents: members, demands: child_demands } => {
                let member_measures: Vec<&Measure> = members.iter().map(|&i| &local.measures[i]).collect();
                let (cm, cd) = rescale_child(&member_measures, &child_demands, &lo, &hi)?;
                let ids: Vec<usize> = members.iter().map(|&i| active[i]).collect();
                let (sub, sub_trace) = solve_node(&ids, &cm, &cd)?;
                out_pieces.extend(sub.embed(&lo, &hi, |o| o));
                traces.push(PieceTrace::Child {
                    lo,
                    hi,
                    agents: ids,
                    demands: child_demands,
                    node: Box::new(sub_trace),
                });
            }
        }
    }
    let division = Division::from_pieces(out_pieces)?;
    let cuts = division.cut_count();
    Ok((division, node(plan.step, cuts, traces)))
}
