//! Classical reference procedures: the moving knife for equal demands and
//! the common-denominator reduction for rational demands.
//!
//! Neither is competitive with [`crate::solver`] on cut count for unequal
//! demands; they serve as baselines and as independent test oracles.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::division::{Division, Instance};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Moving knife with an explicit per-agent stopping share.
///
/// The knife starts at 0; at each stage every remaining agent `i` would stop
/// it at the minimal `x` with `μᵢ([prev, x]) = share(i)`. The earliest stop
/// wins (ties to the lowest index), that agent takes `[prev, x)`, and the
/// last remaining agent takes the rest.
fn run_knife(inst: &Instance, agents: &[usize], share: impl Fn(usize) -> Rational) -> Result<Division> {
    let mut remaining: Vec<usize> = agents.to_vec();
    let mut pieces: Vec<(Rational, usize)> = Vec::with_capacity(agents.len());
    let mut prev = Rational::zero();
    while remaining.len() > 1 {
        let mut best: Option<(Rational, usize)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let m = &inst.measures[i];
            let level = m.cdf_at(&prev) + share(i);
            // an agent whose remaining mass is short never stops the knife
            if level > Rational::one() {
                continue;
            }
            let x = m.quantile_at(&level);
            if best.as_ref().is_none_or(|(bx, _)| x < *bx) {
                best = Some((x, pos));
            }
        }
        let Some((x, pos)) = best else {
            break;
        };
        let agent = remaining.remove(pos);
        pieces.push((x.clone(), agent));
        prev = x;
    }
    let last = remaining.first().copied().unwrap_or(agents[agents.len() - 1]);
    pieces.push((Rational::one(), last));
    Division::from_pieces(pieces)
}

/// Fair division by the moving knife: exactly `n − 1` cuts when every demand
/// is `1/n`.
pub fn sliding_knife_equal(inst: &Instance) -> Result<Division> {
    let n = inst.n();
    let share = Rational::new(1, n as i64);
    if let Some(i) = inst.demands.iter().position(|d| *d != share) {
        return Err(Error::Precondition(format!(
            "moving knife needs equal demands 1/{n}; agent {i} demands {}",
            inst.demands[i]
        )));
    }
    let agents: Vec<usize> = (0..n).collect();
    run_knife(inst, &agents, |_| share.clone())
}

/// The moving-knife stopping rule applied verbatim to arbitrary demands:
/// agent `i` stops the knife once its piece reaches `αᵢ`.
///
/// This is NOT a correct procedure for unequal demands; the agent left with
/// the tail may be short-changed. It is exposed so that the failure can be
/// demonstrated and regression-tested.
pub fn sliding_knife_stopping_rule(inst: &Instance) -> Result<Division> {
    let agents: Vec<usize> = (0..inst.n()).collect();
    run_knife(inst, &agents, |i| inst.demands[i].clone())
}

/// Least common denominator `D` of the demands.
pub fn common_denominator_of(inst: &Instance) -> BigInt {
    Rational::lcm_denominators(&inst.demands)
}

/// Virtual agents for the common-denominator reduction: agent `i` appears
/// `αᵢ·D` times, copies dealt round-robin over the real agents.
pub fn virtual_agents(inst: &Instance) -> Result<Vec<usize>> {
    let d = Rational::from_bigint(common_denominator_of(inst));
    let copies: Vec<usize> = inst
        .demands
        .iter()
        .map(|a| {
            (a * &d)
                .numer()
                .to_usize()
                .ok_or_else(|| Error::Precondition("common denominator too large".into()))
        })
        .collect::<Result<_>>()?;
    let rounds = copies.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(copies.iter().sum());
    for r in 0..rounds {
        out.extend((0..inst.n()).filter(|&i| copies[i] > r));
    }
    Ok(out)
}

/// Rational demands reduced to a fair division among `D` virtual agents.
///
/// Uses at most `D − 1` cuts (fewer after merging neighbouring pieces of one
/// real agent). The cost grows quadratically in `D`.
pub fn common_denominator(inst: &Instance) -> Result<Division> {
    let total = inst.demand_sum();
    if total != Rational::one() {
        return Err(Error::Precondition(format!("demands sum to {total}, expected 1")));
    }
    let virtuals = virtual_agents(inst)?;
    let share = Rational::new(1, virtuals.len() as i64);
    // knife over virtual indices; map owners back to real agents afterwards
    let virt_inst = Instance {
        measures: virtuals.iter().map(|&i| inst.measures[i].clone()).collect(),
        demands: vec![share.clone(); virtuals.len()],
    };
    let idx: Vec<usize> = (0..virtuals.len()).collect();
    let div = run_knife(&virt_inst, &idx, |_| share.clone())?;
    Division::from_pieces(div.pieces().map(|(_, hi, o)| (hi, virtuals[o])))
}
