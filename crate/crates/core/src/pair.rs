//! Two agents: the circle lemma and the resulting two-cut division.
//!
//! Circle lemma: for measures `μ` (the *equality* measure) and `μ′` (the
//! *bound* measure) on the circle and rational `α = p/q` in lowest terms,
//! cut the circle into `q` consecutive blocks of `μ`-mass `1/q` starting at
//! 0, and let `Xᵢ` be the arc covering blocks `i, …, i+p−1` (cyclically).
//! Every point lies in exactly `p` of the `q` arcs, so `Σᵢ μ′(Xᵢ) = p` and
//! some arc has `μ′(Xᵢ) ≥ p/q = α`, while `μ(Xᵢ) = α` for all of them.
//!
//! Enumerating all `q` arcs is linear in the denominator, which is hopeless
//! for the denominators produced by the recursive solver. [`circle_lemma`]
//! instead parametrizes the arcs continuously by their starting level
//! `s ∈ [0,1)`: between finitely many critical levels the `μ′`-mass of the
//! arc is affine in `s`, so both the lowest qualifying index and the sum
//! over all `q` candidates are obtained exactly with a handful of
//! evaluations per affine piece. [`candidate_arcs`] is the literal
//! enumeration, kept for small `q` and as a cross-check.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::division::{Division, Instance};
use crate::error::{Error, Result};
use crate::measure::{CircleArc, Measure};
use crate::rational::Rational;

/// Outcome of the circle lemma together with its pigeonhole certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleLemma {
    pub arc: CircleArc,
    /// Zero-based index of the chosen candidate (the lowest qualifying one).
    #[serde(with = "crate::rational::bigint_string")]
    pub index: BigInt,
    #[serde(with = "crate::rational::bigint_string")]
    pub p: BigInt,
    #[serde(with = "crate::rational::bigint_string")]
    pub q: BigInt,
    /// `Σᵢ μ′(Xᵢ)` over all `q` candidates; always equals `p`.
    pub candidate_mass_sum: Rational,
}

/// Candidate arcs parametrized by the `μ`-level `s` of their start.
struct ArcFamily<'a> {
    eq: &'a Measure,
    ge: &'a Measure,
    alpha: &'a Rational,
}

impl ArcFamily<'_> {
    fn arc(&self, s: &Rational) -> CircleArc {
        let start = self.eq.quantile_at(s);
        let u = s + self.alpha;
        let one = Rational::one();
        let length = if u < one {
            self.eq.quantile_at(&u) - &start
        } else if u == one {
            &one - &start
        } else {
            &one - &start + self.eq.quantile_at(&(u - &one))
        };
        CircleArc { start, length }
    }

    fn bound_mass(&self, s: &Rational) -> Rational {
        self.ge.arc_mass(&self.arc(s))
    }

    /// Levels at which the start or end of the arc changes formula.
    fn critical_levels(&self) -> Vec<Rational> {
        let one = Rational::one();
        let levels: Vec<Rational> = self
            .eq
            .breakpoints()
            .iter()
            .chain(self.ge.breakpoints())
            .map(|b| self.eq.cdf_at(b))
            .collect();
        let mut out: Vec<Rational> = vec![Rational::zero(), one.clone(), &one - self.alpha];
        for l in &levels {
            for shifted in [l.clone(), l - self.alpha, l + &one - self.alpha] {
                if shifted.in_unit_interval() {
                    out.push(shifted);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

fn split_alpha(alpha: &Rational) -> (BigInt, BigInt) {
    (alpha.numer().clone(), alpha.denom().clone())
}

/// An arc `X` with `μ_eq(X) = α` exactly and `μ_ge(X) ≥ α`: the lowest-index
/// candidate of the pigeonhole cover that qualifies.
pub fn circle_lemma(m_eq: &Measure, m_ge: &Measure, alpha: &Rational) -> Result<CircleLemma> {
    if !alpha.in_unit_interval() {
        return Err(Error::Domain(format!("α = {alpha} outside [0,1]")));
    }
    let (p, q) = split_alpha(alpha);
    let qr = Rational::from_bigint(q.clone());
    let family = ArcFamily { eq: m_eq, ge: m_ge, alpha };
    let crit = family.critical_levels();

    let mut sum = Rational::zero();
    let mut first: Option<BigInt> = None;
    for k in 0..crit.len() - 1 {
        let (lo, hi) = (&crit[k], &crit[k + 1]);

        // the critical level itself, when it is a candidate start j/q
        let at = lo * &qr;
        if at.is_integer() {
            let mass = family.bound_mass(lo);
            if first.is_none() && mass >= *alpha {
                first = Some(at.numer().clone());
            }
            sum += mass;
        }

        // candidate starts strictly inside (lo, hi): the mass is affine there
        let i_lo: BigInt = at.floor() + BigInt::one();
        let i_hi: BigInt = (hi * &qr).ceil() - BigInt::one();
        if i_lo > i_hi {
            continue;
        }
        let width = hi - lo;
        let u1 = lo + &width / Rational::from_int(3);
        let u2 = lo + &width * Rational::new(2, 3);
        let (f1, f2) = (family.bound_mass(&u1), family.bound_mass(&u2));
        let slope = (&f2 - &f1) / (&u2 - &u1);
        let intercept = &f1 - &slope * &u1;
        let mass_at = |i: &BigInt| &intercept + &slope * Rational::from_bigint(i.clone()) / &qr;

        let count = Rational::from_bigint(&i_hi - &i_lo + BigInt::one());
        let index_sum = &count * Rational::from_bigint(&i_lo + &i_hi) / Rational::from_int(2);
        sum += &count * &intercept + &slope * index_sum / &qr;

        if first.is_none() {
            let hit = if slope.is_zero() {
                (intercept >= *alpha).then(|| i_lo.clone())
            } else if slope.is_positive() {
                // smallest i with intercept + slope·i/q ≥ α
                let bound = ((alpha - &intercept) * &qr / &slope).ceil();
                let i = if bound > i_lo { bound } else { i_lo.clone() };
                (i <= i_hi).then_some(i)
            } else {
                (mass_at(&i_lo) >= *alpha).then(|| i_lo.clone())
            };
            if let Some(i) = hit {
                debug_assert!(mass_at(&i) >= *alpha);
                first = Some(i);
            }
        }
    }

    if sum != Rational::from_bigint(p.clone()) {
        return Err(Error::Internal(format!(
            "pigeonhole certificate failed: candidate masses sum to {sum}, expected {p}"
        )));
    }
    let index = first.ok_or_else(|| {
        Error::Internal("no candidate arc reaches α although the masses sum to p".into())
    })?;
    let s = Rational::from_bigint(index.clone()) / &qr;
    let arc = family.arc(&s);
    let eq_mass = m_eq.arc_mass(&arc);
    let ge_mass = m_ge.arc_mass(&arc);
    if eq_mass != *alpha || ge_mass < *alpha {
        return Err(Error::Internal(format!(
            "chosen arc has masses ({eq_mass}, {ge_mass}) for α = {alpha}"
        )));
    }
    Ok(CircleLemma {
        arc,
        index,
        p,
        q,
        candidate_mass_sum: sum,
    })
}

/// All `q` candidate arcs of the pigeonhole cover, in index order.
///
/// Linear in `q`; intended for small denominators and for explaining a run.
pub fn candidate_arcs(m_eq: &Measure, alpha: &Rational) -> Result<Vec<CircleArc>> {
    if !alpha.in_unit_interval() {
        return Err(Error::Domain(format!("α = {alpha} outside [0,1]")));
    }
    let (p, q) = split_alpha(alpha);
    let q = q
        .to_usize()
        .ok_or_else(|| Error::Domain(format!("denominator of {alpha} too large to enumerate")))?;
    let p = p.to_usize().unwrap_or(0);
    // block boundaries; t[q] is the point 1 ≡ 0
    let mut t: Vec<Rational> = (0..q).map(|j| m_eq.quantile_at(&Rational::new(j as i64, q as i64))).collect();
    t.push(Rational::one());
    Ok((0..q)
        .map(|k| {
            let e = k + p;
            let length = if e <= q {
                &t[e] - &t[k]
            } else {
                Rational::one() - &t[k] + &t[e - q]
            };
            CircleArc {
                start: t[k].clone(),
                length,
            }
        })
        .collect())
}

/// Division for two agents with at most two cuts, plus the lemma that
/// produced it (absent when a zero demand makes the lemma unnecessary).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSolution {
    pub division: Division,
    pub lemma: Option<CircleLemma>,
}

/// Two-agent division: agent 0 receives an arc `X` with `μ₁(X) = 1 − α₁`
/// and `μ₀(X) ≥ 1 − α₁ ≥ α₀`; agent 1 receives the complement.
pub fn solve_pair_explained(inst: &Instance) -> Result<PairSolution> {
    if inst.n() != 2 {
        return Err(Error::Precondition(format!("pair solver needs 2 agents, got {}", inst.n())));
    }
    let (a0, a1) = (&inst.demands[0], &inst.demands[1]);
    if a1.is_zero() || a0.is_zero() {
        let owner = if a1.is_zero() { 0 } else { 1 };
        return Ok(PairSolution {
            division: Division::single(owner),
            lemma: None,
        });
    }
    let alpha = Rational::one() - a1;
    let lemma = circle_lemma(&inst.measures[1], &inst.measures[0], &alpha)?;
    let division = arc_division(&lemma.arc, 0, 1)?;
    Ok(PairSolution {
        division,
        lemma: Some(lemma),
    })
}

pub fn solve_pair(inst: &Instance) -> Result<Division> {
    solve_pair_explained(inst).map(|s| s.division)
}

/// Cuts the circle at 0: `inside` owns the arc, `outside` the rest.
pub fn arc_division(arc: &CircleArc, inside: usize, outside: usize) -> Result<Division> {
    if arc.length == Rational::one() {
        return Ok(Division::single(inside));
    }
    let end = arc.end();
    if end <= Rational::one() {
        Division::from_pieces(vec![
            (arc.start.clone(), outside),
            (end, inside),
            (Rational::one(), outside),
        ])
    } else {
        Division::from_pieces(vec![
            (end - Rational::one(), inside),
            (arc.start.clone(), outside),
            (Rational::one(), inside),
        ])
    }
}

/// The literal pigeonhole scan over [`candidate_arcs`]; agrees with
/// [`circle_lemma`] whenever `q` is small enough to enumerate.
pub fn circle_lemma_by_enumeration(m_eq: &Measure, m_ge: &Measure, alpha: &Rational) -> Result<CircleLemma> {
    let arcs = candidate_arcs(m_eq, alpha)?;
    let masses: Vec<Rational> = arcs.iter().map(|a| m_ge.arc_mass(a)).collect();
    let sum: Rational = masses.iter().sum();
    let k = masses
        .iter()
        .position(|m| m >= alpha)
        .ok_or_else(|| Error::Internal("pigeonhole failed".into()))?;
    let (p, q) = split_alpha(alpha);
    Ok(CircleLemma {
        arc: arcs[k].clone(),
        index: BigInt::from(k),
        p,
        q,
        candidate_mass_sum: sum,
    })
}

impl CircleLemma {
    pub fn is_trivial(&self) -> bool {
        self.p.is_zero() || self.p == self.q
    }
}
