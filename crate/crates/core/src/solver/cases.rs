//! One level of the case analysis: from a node instance (demands summing to
//! exactly 1, at least two agents) to a cut and the subproblems on each side.

use crate::division::Instance;
use crate::error::{Error, Result};
use crate::measure::crossings;
use crate::rational::Rational;

use super::sweep::{find_sweep, SweepResult};
use super::trace::{CaseStep, SweepWitness};

/// A consecutive part of the node interval, agents local to the node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Part {
    Assign {
        lo: Rational,
        hi: Rational,
        agent: usize,
    },
    /// Subproblem on `[lo,hi]`; demands are in the node's units.
    Child {
        lo: Rational,
        hi: Rational,
        agents: Vec<usize>,
        demands: Vec<Rational>,
    },
}

impl Part {
    fn reflect(self) -> Part {
        let flip = |lo: Rational, hi: Rational| (Rational::one() - hi, Rational::one() - lo);
        match self {
            Part::Assign { lo, hi, agent } => {
                let (lo, hi) = flip(lo, hi);
                Part::Assign { lo, hi, agent }
            }
            Part::Child { lo, hi, agents, demands } => {
                let (lo, hi) = flip(lo, hi);
                Part::Child { lo, hi, agents, demands }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CasePlan {
    /// Witnesses, with agents named through the id map passed to the planner.
    pub step: CaseStep,
    /// Parts in left-to-right order, covering `[0,1]`.
    pub parts: Vec<Part>,
}

/// Applies the case analysis once to `inst`, naming agents by their index.
///
/// Requires at least two agents and demands summing to exactly 1.
pub fn plan_case(inst: &Instance) -> Result<CasePlan> {
    let ids: Vec<usize> = (0..inst.n()).collect();
    plan_with_ids(inst, &ids)
}

/// Child demands for `members` (ascending), where `t` gets `t_demand`.
fn child(
    inst: &Instance,
    lo: Rational,
    hi: Rational,
    others: &[usize],
    t: usize,
    t_demand: Rational,
) -> Part {
    let mut agents: Vec<usize> = others.to_vec();
    agents.push(t);
    agents.sort_unstable();
    let demands = agents
        .iter()
        .map(|&i| if i == t { t_demand.clone() } else { inst.demands[i].clone() })
        .collect();
    Part::Child { lo, hi, agents, demands }
}

fn others_child(inst: &Instance, lo: Rational, hi: Rational, others: &[usize]) -> Part {
    Part::Child {
        lo,
        hi,
        agents: others.to_vec(),
        demands: others.iter().map(|&i| inst.demands[i].clone()).collect(),
    }
}

fn sum_of(inst: &Instance, set: &[usize]) -> Rational {
    set.iter().map(|&i| &inst.demands[i]).sum()
}

pub(crate) fn plan_with_ids(inst: &Instance, ids: &[usize]) -> Result<CasePlan> {
    if inst.n() < 2 {
        return Err(Error::Precondition("case analysis needs at least 2 agents".into()));
    }
    inst.require_unit_sum()
        .map_err(|e| Error::Precondition(format!("case analysis needs unit demand sum: {e}")))?;
    let half = Rational::half();
    let one = Rational::one();
    let sw = find_sweep(inst)?;
    let name = |v: &[usize]| v.iter().map(|&i| ids[i]).collect::<Vec<_>>();
    let witness = SweepWitness {
        x: sw.x.clone(),
        t: ids[sw.t],
        p: name(&sw.p),
        q: name(&sw.q),
    };
    let SweepResult { x, t, p, q, .. } = sw;
    let alpha_t = inst.demands[t].clone();

    if !p.is_empty() && !q.is_empty() {
        let alpha_left = &half - sum_of(inst, &p);
        let alpha_right = &half - sum_of(inst, &q);
        let parts = vec![
            child(inst, Rational::zero(), x.clone(), &p, t, alpha_left.clone()),
            child(inst, x.clone(), one.clone(), &q, t, alpha_right.clone()),
        ];
        return Ok(CasePlan {
            step: CaseStep::PqSplit {
                sweep: witness,
                alpha_left,
                alpha_right,
            },
            parts,
        });
    }

    if alpha_t < half {
        return Err(Error::Internal(format!(
            "one of P, Q is empty but α_t = {alpha_t} < 1/2"
        )));
    }

    if alpha_t == half {
        let parts = if p.is_empty() {
            vec![
                Part::Assign { lo: Rational::zero(), hi: x.clone(), agent: t },
                others_child(inst, x.clone(), one.clone(), &q),
            ]
        } else {
            vec![
                others_child(inst, Rational::zero(), x.clone(), &p),
                Part::Assign { lo: x.clone(), hi: one.clone(), agent: t },
            ]
        };
        return Ok(CasePlan {
            step: CaseStep::HalfAssign { sweep: witness },
            parts,
        });
    }

    // α_t > 1/2. Work in a frame where P is empty: the instance itself, or
    // its reflection when Q is the empty side.
    let mirrored = !p.is_empty();
    let frame_owned;
    let frame = if mirrored {
        frame_owned = inst.reflect();
        &frame_owned
    } else {
        inst
    };
    let frame_x = if mirrored { &one - &x } else { x.clone() };
    let others: Vec<usize> = (0..inst.n()).filter(|&i| i != t).collect();
    let (step, parts) = beyond_half(frame, &frame_x, t, &others, witness, mirrored, &name)?;
    let parts = if mirrored {
        parts.into_iter().rev().map(Part::reflect).collect()
    } else {
        parts
    };
    Ok(CasePlan { step, parts })
}

/// The `α_t > 1/2, P = ∅` branch on `frame`, where `μ_t([0,x]) = 1/2` and
/// every other agent has at most half its mass on `[0,x]`.
fn beyond_half(
    frame: &Instance,
    x: &Rational,
    t: usize,
    others: &[usize],
    sweep: SweepWitness,
    mirrored: bool,
    name: &dyn Fn(&[usize]) -> Vec<usize>,
) -> Result<(CaseStep, Vec<Part>)> {
    let one = Rational::one();
    let alpha_t = frame.demands[t].clone();
    let mt = &frame.measures[t];
    let y = mt.quantile_at(&alpha_t);
    let (u, v): (Vec<usize>, Vec<usize>) = others
        .iter()
        .partition(|&&i| frame.measures[i].cdf_at(&y) >= alpha_t);

    if u.is_empty() {
        let parts = vec![
            Part::Assign { lo: Rational::zero(), hi: y.clone(), agent: t },
            others_child(frame, y.clone(), one.clone(), others),
        ];
        return Ok((CaseStep::TAssignAtY { sweep, mirrored, y }, parts));
    }

    if !v.is_empty() {
        let left_t = &alpha_t - sum_of(frame, &u);
        let right_t = &one - &alpha_t - sum_of(frame, &v);
        let parts = vec![
            child(frame, Rational::zero(), y.clone(), &u, t, left_t),
            child(frame, y.clone(), one.clone(), &v, t, right_t),
        ];
        let step = CaseStep::UvSplit {
            sweep,
            mirrored,
            y,
            u: name(&u),
            v: name(&v),
        };
        return Ok((step, parts));
    }

    // V = ∅: the last point of [x,y] where some s ∈ U meets t
    let mut best: Option<(Rational, usize)> = None;
    for &s in &u {
        let cr = crossings(&frame.measures[s], mt, x, &y)?;
        let Some(last) = cr.last() else {
            return Err(Error::Internal(format!("agent {s} never meets t on [{x}, {y}]")));
        };
        let z = last.upper().clone();
        if best.as_ref().is_none_or(|(bz, _)| z > *bz) {
            best = Some((z, s));
        }
    }
    let (z, s) = best.expect("U is non-empty");
    let beta = mt.cdf_at(&z);
    let u_rest: Vec<usize> = u.iter().copied().filter(|&i| i != s).collect();
    let left_t = &beta - sum_of(frame, &u_rest);
    let right_t = &one - &frame.demands[s] - &beta;
    let mut right_agents = vec![s, t];
    right_agents.sort_unstable();
    let parts = vec![
        child(frame, Rational::zero(), z.clone(), &u_rest, t, left_t),
        Part::Child {
            lo: z.clone(),
            hi: one.clone(),
            demands: right_agents
                .iter()
                .map(|&i| if i == t { right_t.clone() } else { frame.demands[s].clone() })
                .collect(),
            agents: right_agents,
        },
    ];
    let step = CaseStep::ZSplit {
        sweep,
        mirrored,
        y,
        u: name(&u),
        z,
        s: name(&[s])[0],
        beta,
    };
    Ok((step, parts))
}
