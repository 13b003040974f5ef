//! Independent replay of a solver trace.
//!
//! Every node is re-derived from the root instance alone: the child
//! instances are rebuilt from the recorded intervals and demands, and every
//! witness is re-checked against its defining property (half-mass
//! conditions, minimality of `x`, `t` and `y`, maximality of `z`, sign of
//! the derived demands, rescaled demand sums) together with the cut
//! accounting `cuts ≤ (#pieces − 1) + Σ f(child) ≤ f(n)`.

use crate::division::{cut_count_bound, Instance};
use crate::measure::{crossings, Crossing, Measure};
use crate::rational::Rational;

use super::sweep::crossing_set;
use super::trace::{CaseStep, PieceTrace, SweepWitness, Trace, TraceNode};
use super::{normalize, rescale_child};

/// First failed check, with the path of the offending node.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace check failed at {path}: {reason}")]
pub struct TraceViolation {
    pub path: String,
    pub reason: String,
}

/// Replays `trace` against `inst`.
pub fn check_trace(inst: &Instance, trace: &Trace) -> Result<(), TraceViolation> {
    let agents: Vec<usize> = (0..inst.n()).collect();
    let root = &trace.root;
    let path = "root".to_string();
    if root.agents != agents || root.demands != inst.demands {
        return Err(TraceViolation {
            path,
            reason: "root agents/demands differ from the instance".into(),
        });
    }
    check_node(&path, &inst.measures, root)
}

pub fn trace_is_valid(inst: &Instance, trace: &Trace) -> bool {
    check_trace(inst, trace).is_ok()
}

/// Expected piece, agents named globally.
#[derive(Debug, PartialEq, Eq)]
enum Expected {
    Assign(Rational, Rational, usize),
    Child(Rational, Rational, Vec<usize>, Vec<Rational>),
}

impl Expected {
    fn reflect(self) -> Expected {
        let one = Rational::one();
        match self {
            Expected::Assign(lo, hi, a) => Expected::Assign(&one - hi, &one - lo, a),
            Expected::Child(lo, hi, ag, d) => Expected::Child(&one - hi, &one - lo, ag, d),
        }
    }

    fn matches(&self, piece: &PieceTrace) -> bool {
        match (self, piece) {
            (Expected::Assign(lo, hi, a), PieceTrace::Assigned { lo: l, hi: h, agent }) => {
                lo == l && hi == h && a == agent
            }
            (Expected::Child(lo, hi, ag, d), PieceTrace::Child { lo: l, hi: h, agents, demands, .. }) => {
                lo == l && hi == h && ag == agents && d == demands
            }
            _ => false,
        }
    }
}

struct NodeView<'a> {
    path: &'a str,
    /// active agents (global ids), ascending
    active: &'a [usize],
    inst: Instance,
}

impl NodeView<'_> {
    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, TraceViolation> {
        Err(TraceViolation {
            path: self.path.to_string(),
            reason: reason.into(),
        })
    }

    fn ensure(&self, cond: bool, reason: impl FnOnce() -> String) -> Result<(), TraceViolation> {
        if cond {
            Ok(())
        } else {
            self.fail(reason())
        }
    }

    fn local(&self, global: usize) -> Result<usize, TraceViolation> {
        match self.active.iter().position(|&a| a == global) {
            Some(k) => Ok(k),
            None => self.fail(format!("agent {global} is not active at this node")),
        }
    }

    fn locals(&self, globals: &[usize]) -> Result<Vec<usize>, TraceViolation> {
        globals.iter().map(|&g| self.local(g)).collect()
    }

    fn demand_sum(&self, inst: &Instance, set: &[usize]) -> Rational {
        set.iter().map(|&i| &inst.demands[i]).sum()
    }

    /// Child with `others` keeping their demands and `t` receiving `t_demand`.
    fn child(&self, inst: &Instance, lo: Rational, hi: Rational, others: &[usize], t: Option<(usize, Rational)>) -> Expected {
        let mut members: Vec<usize> = others.to_vec();
        if let Some((t, _)) = &t {
            members.push(*t);
        }
        members.sort_unstable();
        let demands = members
            .iter()
            .map(|&i| match &t {
                Some((tt, d)) if *tt == i => d.clone(),
                _ => inst.demands[i].clone(),
            })
            .collect();
        Expected::Child(lo, hi, members.iter().map(|&i| self.active[i]).collect(), demands)
    }
}

fn check_node(path: &str, measures: &[Measure], node: &TraceNode) -> Result<(), TraceViolation> {
    let fail = |reason: String| {
        Err(TraceViolation {
            path: path.to_string(),
            reason,
        })
    };
    if node.agents.len() != measures.len() || node.demands.len() != measures.len() {
        return fail("agent, measure and demand counts differ".into());
    }
    if node.demands.iter().any(|d| d.is_negative()) {
        return fail("negative demand".into());
    }
    let total: Rational = node.demands.iter().sum();
    if total > Rational::one() {
        return fail(format!("demands sum to {total} > 1"));
    }
    let (positions, active, normalized) = normalize(&node.agents, &node.demands);
    if active != node.active || normalized != node.normalized {
        return fail("active agents or normalized demands do not match the node demands".into());
    }
    let n = active.len();
    let bound = cut_count_bound(n.max(1)).expect("n ≥ 1");
    if node.cuts > bound {
        return fail(format!("{} cuts exceed the bound {bound} for {n} agents", node.cuts));
    }

    // pieces tile [0,1]
    if node.pieces.is_empty() {
        return fail("no pieces".into());
    }
    let mut at = Rational::zero();
    for (k, piece) in node.pieces.iter().enumerate() {
        let (lo, hi) = piece.bounds();
        if *lo != at || lo >= hi {
            return fail(format!("piece {k} = [{lo}, {hi}] does not continue the tiling at {at}"));
        }
        at = hi.clone();
    }
    if at != Rational::one() {
        return fail(format!("pieces end at {at}, not at 1"));
    }

    let view = NodeView {
        path,
        active: &node.active,
        inst: Instance {
            measures: positions.iter().map(|&k| measures[k].clone()).collect(),
            demands: normalized.clone(),
        },
    };

    match &node.step {
        CaseStep::BaseSingle => {
            view.ensure(n <= 1, || format!("BASE_SINGLE with {n} active agents"))?;
            let owner = active.first().copied().unwrap_or(node.agents[0]);
            let ok = matches!(node.pieces.as_slice(), [PieceTrace::Assigned { agent, .. }] if *agent == owner);
            view.ensure(ok, || "BASE_SINGLE must assign [0,1] to its agent".into())?;
        }
        CaseStep::BasePair { lemma } => {
            view.ensure(n == 2, || format!("BASE_PAIR with {n} active agents"))?;
            view.ensure(node.pieces.len() <= 3, || "BASE_PAIR uses more than two cuts".into())?;
            let mut got = [Rational::zero(), Rational::zero()];
            for piece in &node.pieces {
                let PieceTrace::Assigned { lo, hi, agent } = piece else {
                    return view.fail("BASE_PAIR pieces must be assigned directly");
                };
                let k = view.local(*agent)?;
                got[k] += view.inst.measures[k].interval_mass_at(lo, hi);
            }
            for k in 0..2 {
                view.ensure(got[k] >= view.inst.demands[k], || {
                    format!("agent {} receives {} < {}", active[k], got[k], view.inst.demands[k])
                })?;
            }
            if let Some(l) = lemma {
                let alpha = Rational::one() - &view.inst.demands[1];
                view.ensure(Rational::from_bigints(l.p.clone(), l.q.clone()) == alpha, || {
                    format!("lemma fraction {}/{} differs from α = {alpha}", l.p, l.q)
                })?;
                view.ensure(view.inst.measures[1].arc_mass(&l.arc) == alpha, || "lemma arc misses α exactly".into())?;
                view.ensure(view.inst.measures[0].arc_mass(&l.arc) >= alpha, || "lemma arc is short for agent 0".into())?;
                view.ensure(l.candidate_mass_sum == Rational::from_bigint(l.p.clone()), || {
                    format!("pigeonhole sum {} ≠ p = {}", l.candidate_mass_sum, l.p)
                })?;
            }
        }
        step => {
            view.ensure(n >= 3, || format!("{} with only {n} active agents", step.tag()))?;
            let sweep = step.sweep().expect("sweep case");
            let expected = check_sweep_case(&view, step, sweep)?;
            view.ensure(expected.len() == node.pieces.len(), || {
                format!("expected {} pieces, trace has {}", expected.len(), node.pieces.len())
            })?;
            for (k, (e, p)) in expected.iter().zip(&node.pieces).enumerate() {
                view.ensure(e.matches(p), || format!("piece {k} differs from the replayed case: expected {e:?}"))?;
            }
            for piece in &node.pieces {
                if let PieceTrace::Assigned { lo, hi, agent } = piece {
                    let k = view.local(*agent)?;
                    let mass = view.inst.measures[k].interval_mass_at(lo, hi);
                    view.ensure(mass >= view.inst.demands[k], || {
                        format!("assigned piece gives agent {agent} only {mass}")
                    })?;
                }
            }
        }
    }

    // children and the recurrence
    let children: Vec<(usize, &PieceTrace)> = node
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, PieceTrace::Child { .. }))
        .collect();
    let mut rhs = node.pieces.len() - 1;
    let mut sizes = 0;
    for (k, piece) in &children {
        let PieceTrace::Child { lo, hi, agents, demands, node: sub } = piece else { unreachable!() };
        view.ensure(agents.len() == demands.len(), || "child agents/demands length mismatch".into())?;
        view.ensure(n < 3 || agents.len() < n, || format!("child {k} is not smaller than its parent"))?;
        let locals = view.locals(agents)?;
        let ms: Vec<&Measure> = locals.iter().map(|&i| &view.inst.measures[i]).collect();
        let (cm, cd) = match rescale_child(&ms, demands, lo, hi) {
            Ok(v) => v,
            Err(e) => return view.fail(e.to_string()),
        };
        let child_sum: Rational = cd.iter().sum();
        view.ensure(child_sum <= Rational::one(), || {
            format!("child {k} has rescaled demand sum {child_sum} > 1")
        })?;
        view.ensure(sub.agents == *agents && sub.demands == cd, || {
            format!("child {k} node does not hold the rescaled subproblem")
        })?;
        check_node(&format!("{path}/pieces[{k}]"), &cm, sub)?;
        rhs += cut_count_bound(agents.len().max(1)).expect("n ≥ 1");
        sizes += agents.len();
    }
    if children.len() == 2 {
        view.ensure(sizes <= n + 1, || format!("children sizes sum to {sizes} > n + 1 = {}", n + 1))?;
    }
    if !children.is_empty() {
        let child_cuts: usize = children
            .iter()
            .map(|(_, p)| match p {
                PieceTrace::Child { node, .. } => node.cuts,
                _ => 0,
            })
            .sum();
        view.ensure(node.cuts <= node.pieces.len() - 1 + child_cuts, || {
            format!("{} cuts exceed pieces − 1 + child cuts", node.cuts)
        })?;
        view.ensure(node.cuts <= rhs && rhs <= bound, || {
            format!("recurrence violated: cuts {} ≤ {rhs} ≤ f({n}) = {bound} fails", node.cuts)
        })?;
    }
    Ok(())
}

/// Re-derives the sweep witnesses and the case-specific witnesses, returning
/// the pieces the case must produce.
fn check_sweep_case(view: &NodeView<'_>, step: &CaseStep, sw: &SweepWitness) -> Result<Vec<Expected>, TraceViolation> {
    let inst = &view.inst;
    let n = inst.n();
    let half = Rational::half();
    let one = Rational::one();
    let x = &sw.x;
    let t = view.local(sw.t)?;
    let p = view.locals(&sw.p)?;
    let q = view.locals(&sw.q)?;

    let mut all: Vec<usize> = p.iter().chain(&q).copied().chain([t]).collect();
    all.sort_unstable();
    view.ensure(all == (0..n).collect::<Vec<_>>(), || "P, Q and t do not partition the agents".into())?;
    view.ensure(x.is_positive() && *x < one, || format!("x = {x} not inside (0,1)"))?;

    let values: Vec<Rational> = inst.measures.iter().map(|m| m.cdf_at(x)).collect();
    view.ensure(values[t] == half, || format!("μ_t([0,x]) = {} ≠ 1/2", values[t]))?;
    for &i in &p {
        view.ensure(values[i] >= half, || format!("P-agent {} has {} < 1/2", view.active[i], values[i]))?;
    }
    for &i in &q {
        view.ensure(values[i] <= half, || format!("Q-agent {} has {} > 1/2", view.active[i], values[i]))?;
    }
    let s = crossing_set(&values, t);
    let mut pt: Vec<usize> = p.iter().copied().chain([t]).collect();
    pt.sort_unstable();
    view.ensure(s == pt, || "P ∪ {t} is not S(x,t)".into())?;
    let sum_s = view.demand_sum(inst, &s);
    let sum_p = view.demand_sum(inst, &p);
    let sum_q = view.demand_sum(inst, &q);
    view.ensure(sum_s >= half, || format!("Σ_S α = {sum_s} < 1/2"))?;
    view.ensure(sum_p <= half && sum_q <= half, || format!("Σ_P = {sum_p}, Σ_Q = {sum_q} exceed 1/2"))?;
    // minimality of x: strictly before x only agents whose half-quantile is
    // below x count, and they must not reach half the demand
    let before: Rational = (0..n)
        .filter(|&i| inst.measures[i].quantile_at(&half) < *x)
        .map(|i| &inst.demands[i])
        .sum();
    view.ensure(before < half, || format!("x is not minimal: Σ α over earlier agents = {before}"))?;
    if t > 0 {
        let prev = view.demand_sum(inst, &crossing_set(&values, t - 1));
        view.ensure(prev < half, || "t is not minimal".into())?;
    }

    let alpha_t = inst.demands[t].clone();
    let zero = Rational::zero();
    match step {
        CaseStep::PqSplit { alpha_left, alpha_right, .. } => {
            view.ensure(!p.is_empty() && !q.is_empty(), || "PQ_SPLIT needs P and Q non-empty".into())?;
            view.ensure(*alpha_left == &half - &sum_p && *alpha_right == &half - &sum_q, || {
                "α′/α″ differ from 1/2 − Σ".into()
            })?;
            view.ensure(!alpha_left.is_negative() && !alpha_right.is_negative(), || "negative α′ or α″".into())?;
            view.ensure(alpha_left + alpha_right == alpha_t, || "α′ + α″ ≠ α_t".into())?;
            Ok(vec![
                view.child(inst, zero, x.clone(), &p, Some((t, alpha_left.clone()))),
                view.child(inst, x.clone(), one, &q, Some((t, alpha_right.clone()))),
            ])
        }
        CaseStep::HalfAssign { .. } => {
            view.ensure(p.is_empty() || q.is_empty(), || "HALF_ASSIGN needs P or Q empty".into())?;
            view.ensure(alpha_t == half, || format!("HALF_ASSIGN with α_t = {alpha_t}"))?;
            Ok(if p.is_empty() {
                vec![
                    Expected::Assign(zero, x.clone(), view.active[t]),
                    view.child(inst, x.clone(), one, &q, None),
                ]
            } else {
                vec![
                    view.child(inst, zero, x.clone(), &p, None),
                    Expected::Assign(x.clone(), one, view.active[t]),
                ]
            })
        }
        CaseStep::TAssignAtY { mirrored, y, .. }
        | CaseStep::UvSplit { mirrored, y, .. }
        | CaseStep::ZSplit { mirrored, y, .. } => {
            view.ensure(p.is_empty() || q.is_empty(), || format!("{} needs P or Q empty", step.tag()))?;
            view.ensure(*mirrored == !p.is_empty(), || "mirror flag does not match the empty side".into())?;
            view.ensure(alpha_t > half, || format!("{} with α_t = {alpha_t} ≤ 1/2", step.tag()))?;
            let frame = if *mirrored { inst.reflect() } else { inst.clone() };
            let fx = if *mirrored { &one - x } else { x.clone() };
            let mt = &frame.measures[t];
            view.ensure(*y > fx && mt.cdf_at(y) == alpha_t, || format!("y = {y} does not reach α_t past x"))?;
            view.ensure(*y == mt.quantile_at(&alpha_t), || "y is not minimal".into())?;
            let others: Vec<usize> = (0..n).filter(|&i| i != t).collect();
            let (u, v): (Vec<usize>, Vec<usize>) =
                others.iter().partition(|&&i| frame.measures[i].cdf_at(y) >= alpha_t);
            let names = |set: &[usize]| set.iter().map(|&i| view.active[i]).collect::<Vec<_>>();

            let parts = match step {
                CaseStep::TAssignAtY { .. } => {
                    view.ensure(u.is_empty(), || "T_ASSIGN_AT_Y with U non-empty".into())?;
                    vec![
                        Expected::Assign(zero, y.clone(), view.active[t]),
                        view.child(&frame, y.clone(), one, &others, None),
                    ]
                }
                CaseStep::UvSplit { u: ru, v: rv, .. } => {
                    view.ensure(*ru == names(&u) && *rv == names(&v), || "U/V do not match μᵢ([0,y]) ≥ α_t".into())?;
                    view.ensure(!u.is_empty() && !v.is_empty(), || "UV_SPLIT needs U and V non-empty".into())?;
                    let left_t = &alpha_t - view.demand_sum(&frame, &u);
                    let right_t = &one - &alpha_t - view.demand_sum(&frame, &v);
                    view.ensure(!left_t.is_negative() && !right_t.is_negative(), || "negative t-demand".into())?;
                    vec![
                        view.child(&frame, zero, y.clone(), &u, Some((t, left_t))),
                        view.child(&frame, y.clone(), one, &v, Some((t, right_t))),
                    ]
                }
                CaseStep::ZSplit { u: ru, z, s, beta, .. } => {
                    view.ensure(*ru == names(&u) && v.is_empty(), || "Z_SPLIT needs U = all other agents".into())?;
                    let s = view.local(*s)?;
                    view.ensure(u.contains(&s), || "s is not in U".into())?;
                    view.ensure(fx <= *z && z <= y, || format!("z = {z} outside [x, y]"))?;
                    view.ensure(mt.cdf_at(z) == *beta && frame.measures[s].cdf_at(z) == *beta, || {
                        format!("β = {beta} is not μ_s([0,z]) = μ_t([0,z])")
                    })?;
                    view.ensure(*beta >= half, || format!("β = {beta} < 1/2"))?;
                    for &i in &u {
                        let mi = &frame.measures[i];
                        view.ensure(mi.cdf_at(z) >= *beta, || format!("U-agent {} below β at z", view.active[i]))?;
                        let after = crossings(mi, mt, z, y).map_err(|e| TraceViolation {
                            path: view.path.to_string(),
                            reason: e.to_string(),
                        })?;
                        view.ensure(after.iter().all(|c| *c == Crossing::Point(z.clone())), || {
                            format!("z is not maximal: agent {} meets t again after z", view.active[i])
                        })?;
                    }
                    let rest: Vec<usize> = u.iter().copied().filter(|&i| i != s).collect();
                    let left_t = beta - view.demand_sum(&frame, &rest);
                    let right_t = &one - &frame.demands[s] - beta;
                    view.ensure(!left_t.is_negative() && !right_t.is_negative(), || "negative t-demand".into())?;
                    vec![
                        view.child(&frame, zero, z.clone(), &rest, Some((t, left_t))),
                        view.child(&frame, z.clone(), one, &[s], Some((t, right_t))),
                    ]
                }
                _ => unreachable!(),
            };
            Ok(if *mirrored {
                parts.into_iter().rev().map(Expected::reflect).collect()
            } else {
                parts
            })
        }
        CaseStep::BaseSingle | CaseStep::BasePair { .. } => unreachable!("base cases carry no sweep"),
    }
}
