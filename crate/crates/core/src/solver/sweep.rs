//! The half-mass sweep: minimal `x` and tie-break index `t`.

use crate::division::Instance;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Result of the sweep, with agents as indices into the swept instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepResult {
    pub x: Rational,
    pub t: usize,
    /// `S(x,t)`, ascending.
    pub s: Vec<usize>,
    /// `S(x,t) ∖ {t}`
    pub p: Vec<usize>,
    /// complement of `S(x,t)`
    pub q: Vec<usize>,
}

/// `S(θ,k) = {i : μᵢ([0,θ]) > 1/2} ∪ {i : μᵢ([0,θ]) = 1/2, i ≤ k}`, given
/// the CDF values at θ.
pub fn crossing_set(values: &[Rational], k: usize) -> Vec<usize> {
    let half = Rational::half();
    values
        .iter()
        .enumerate()
        .filter(|(i, v)| **v > half || (**v == half && *i <= k))
        .map(|(i, _)| i)
        .collect()
}

fn demand_of(inst: &Instance, set: &[usize]) -> Rational {
    set.iter().map(|&i| &inst.demands[i]).sum()
}

/// Minimal `x ∈ [0,1]` such that `Σ_{S(x,k)} α ≥ 1/2` for some `k`, then the
/// minimal such `k`.
///
/// `{θ : μᵢ([0,θ]) ≥ 1/2}` is the ray starting at the half-quantile of `μᵢ`,
/// so the weight of `S(θ, n−1)` is a step function of θ that only moves at
/// half-quantiles. Testing those (and, for good measure, every breakpoint) in
/// increasing order therefore finds the minimal `x` exactly.
pub fn find_sweep(inst: &Instance) -> Result<SweepResult> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::Precondition(format!("sweep needs at least 2 agents, got {n}")));
    }
    let half = Rational::half();
    let mut candidates: Vec<Rational> = inst
        .measures
        .iter()
        .map(|m| m.quantile_at(&half))
        .chain(inst.measures.iter().flat_map(|m| m.breakpoints().iter().cloned()))
        .collect();
    candidates.sort();
    candidates.dedup();

    for x in candidates {
        let values: Vec<Rational> = inst.measures.iter().map(|m| m.cdf_at(&x)).collect();
        if demand_of(inst, &crossing_set(&values, n - 1)) < half {
            continue;
        }
        let t = (0..n)
            .find(|&k| demand_of(inst, &crossing_set(&values, k)) >= half)
            .expect("k = n−1 qualifies");
        if values[t] != half {
            return Err(Error::Internal(format!(
                "sweep agent {t} has mass {} at x = {x}, expected 1/2",
                values[t]
            )));
        }
        let s = crossing_set(&values, t);
        let p: Vec<usize> = s.iter().copied().filter(|&i| i != t).collect();
        let q: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
        return Ok(SweepResult { x, t, s, p, q });
    }
    Err(Error::Precondition(format!(
        "demands sum to {} < 1/2; no sweep point exists",
        inst.demand_sum()
    )))
}
