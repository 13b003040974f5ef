//! Non-atomic probability measures on `[0,1]` (and on the circle `[0,1)`
//! with endpoints identified), given by piecewise-constant densities.
//!
//! The CDF of such a measure is continuous and piecewise linear, so every
//! query here (CDF, minimal quantile, interval and arc masses, equality sets
//! of two CDFs) is answered exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A probability measure with piecewise-constant density.
///
/// Invariants: breakpoints start at 0, end at 1 and strictly increase;
/// densities are non-negative, one per segment, and adjacent segments never
/// share a density; total mass is exactly 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    breakpoints: Vec<Rational>,
    densities: Vec<Rational>,
    /// `cumulative[j]` is the mass of `[0, breakpoints[j]]`.
    cumulative: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    breakpoints: Vec<Rational>,
    densities: Vec<Rational>,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = Error;

    fn try_from(repr: MeasureRepr) -> Result<Self> {
        Measure::new(repr.breakpoints, repr.densities)
    }
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            breakpoints: m.breakpoints,
            densities: m.densities,
        }
    }
}

impl std::fmt::Debug for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Measure[")?;
        for (j, d) in self.densities.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}..{}: {}", self.breakpoints[j], self.breakpoints[j + 1], d)?;
        }
        write!(f, "]")
    }
}

impl Measure {
    /// Validates and canonicalizes (merging equal-density neighbours).
    pub fn new(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        let m = Self::from_parts_unnormalized(breakpoints, densities)?;
        let total = m.cumulative.last().cloned().unwrap_or_default();
        if total != Rational::one() {
            return Err(Error::validation(
                "densities",
                format!("total mass is {total}, expected 1"),
            ));
        }
        Ok(m)
    }

    /// Like [`Measure::new`] but rescales the densities so the total mass is 1.
    /// Fails if the given densities carry no mass.
    pub fn normalized(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        let m = Self::from_parts_unnormalized(breakpoints, densities)?;
        let total = m.cumulative.last().cloned().unwrap_or_default();
        if !total.is_positive() {
            return Err(Error::validation("densities", "total mass is zero"));
        }
        let densities = m.densities.iter().map(|d| d / &total).collect();
        Self::new(m.breakpoints, densities)
    }

    fn from_parts_unnormalized(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::validation("breakpoints", "need at least two breakpoints"));
        }
        if densities.len() + 1 != breakpoints.len() {
            return Err(Error::validation(
                "densities",
                format!(
                    "expected {} densities for {} breakpoints, got {}",
                    breakpoints.len() - 1,
                    breakpoints.len(),
                    densities.len()
                ),
            ));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::validation("breakpoints", "first breakpoint must be 0"));
        }
        if *breakpoints.last().unwrap() != Rational::one() {
            return Err(Error::validation("breakpoints", "last breakpoint must be 1"));
        }
        if let Some(j) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                format!("breakpoints[{}]", j + 1),
                "breakpoints must be strictly increasing",
            ));
        }
        if let Some(j) = densities.iter().position(|d| d.is_negative()) {
            return Err(Error::validation(format!("densities[{j}]"), "density must be non-negative"));
        }

        let mut bps = vec![breakpoints[0].clone()];
        let mut ds: Vec<Rational> = Vec::with_capacity(densities.len());
        for (j, d) in densities.into_iter().enumerate() {
            if ds.last() == Some(&d) {
                *bps.last_mut().unwrap() = breakpoints[j + 1].clone();
            } else {
                ds.push(d);
                bps.push(breakpoints[j + 1].clone());
            }
        }
        let mut cumulative = Vec::with_capacity(bps.len());
        cumulative.push(Rational::zero());
        for (j, d) in ds.iter().enumerate() {
            let next = cumulative[j].clone() + d * (&bps[j + 1] - &bps[j]);
            cumulative.push(next);
        }
        Ok(Measure {
            breakpoints: bps,
            densities: ds,
            cumulative,
        })
    }

    /// Lebesgue measure on `[0,1]`.
    pub fn uniform() -> Self {
        Measure::new(vec![Rational::zero(), Rational::one()], vec![Rational::one()]).unwrap()
    }

    /// Uniform measure supported on `[a,b] ⊆ [0,1]`, `a < b`.
    pub fn uniform_on(a: &Rational, b: &Rational) -> Result<Self> {
        if !(a.in_unit_interval() && b.in_unit_interval() && a < b) {
            return Err(Error::Domain(format!("support [{a}, {b}] is not a subinterval of [0,1]")));
        }
        let density = (b - a).recip();
        let mut bps = Vec::new();
        let mut ds = Vec::new();
        bps.push(Rational::zero());
        if a.is_positive() {
            ds.push(Rational::zero());
            bps.push(a.clone());
        }
        ds.push(density);
        bps.push(b.clone());
        if *b < Rational::one() {
            ds.push(Rational::zero());
            bps.push(Rational::one());
        }
        Measure::new(bps, ds)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Rational] {
        &self.densities
    }

    pub fn segment_count(&self) -> usize {
        self.densities.len()
    }

    /// Index of the segment containing θ (the last one for θ = 1).
    fn segment_of(&self, theta: &Rational) -> usize {
        // first breakpoint strictly greater than θ, minus one
        let idx = self.breakpoints.partition_point(|b| b <= theta);
        idx.saturating_sub(1).min(self.densities.len() - 1)
    }

    /// `μ([0,θ])`, for θ already known to lie in `[0,1]`.
    pub(crate) fn cdf_at(&self, theta: &Rational) -> Rational {
        debug_assert!(theta.in_unit_interval());
        let j = self.segment_of(theta);
        &self.cumulative[j] + &self.densities[j] * (theta - &self.breakpoints[j])
    }

    /// Exact mass of `[0,θ]`.
    pub fn cdf(&self, theta: &Rational) -> Result<Rational> {
        if !theta.in_unit_interval() {
            return Err(Error::Domain(format!("θ = {theta} outside [0,1]")));
        }
        Ok(self.cdf_at(theta))
    }

    /// Minimal θ with `μ([0,θ]) = p`, for p already known to lie in `[0,1]`.
    pub(crate) fn quantile_at(&self, p: &Rational) -> Rational {
        debug_assert!(p.in_unit_interval());
        if p.is_zero() {
            return Rational::zero();
        }
        // first segment whose right end reaches p; its left end is below p,
        // so it has positive density
        let j = self.cumulative.partition_point(|c| c < p) - 1;
        &self.breakpoints[j] + (p - &self.cumulative[j]) / &self.densities[j]
    }

    /// Minimal θ with `μ([0,θ]) = p` (the left end of any plateau at level p).
    pub fn quantile(&self, p: &Rational) -> Result<Rational> {
        if !p.in_unit_interval() {
            return Err(Error::Domain(format!("p = {p} outside [0,1]")));
        }
        Ok(self.quantile_at(p))
    }

    /// Mass of the interval between `a` and `b`; endpoint openness is immaterial.
    pub fn interval_mass(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        if a > b {
            return Err(Error::Domain(format!("interval ({a}, {b}) has a > b")));
        }
        Ok(self.cdf(b)? - self.cdf(a)?)
    }

    pub(crate) fn interval_mass_at(&self, a: &Rational, b: &Rational) -> Rational {
        self.cdf_at(b) - self.cdf_at(a)
    }

    /// Mass of an arc of the circle `[0,1)/0~1`.
    pub fn arc_mass(&self, arc: &CircleArc) -> Rational {
        if arc.length == Rational::one() {
            return Rational::one();
        }
        let end = &arc.start + &arc.length;
        if end <= Rational::one() {
            self.interval_mass_at(&arc.start, &end)
        } else {
            let wrapped = end - Rational::one();
            self.interval_mass_at(&arc.start, &Rational::one()) + self.cdf_at(&wrapped)
        }
    }

    /// The measure restricted to `[a,b]`, reparametrized affinely onto `[0,1]`
    /// and renormalized to total mass 1. Returns the restricted measure and the
    /// original mass of `[a,b]`.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Result<(Measure, Rational)> {
        if !(a.in_unit_interval() && b.in_unit_interval() && a < b) {
            return Err(Error::Domain(format!("cannot restrict to [{a}, {b}]")));
        }
        let mass = self.interval_mass_at(a, b);
        if !mass.is_positive() {
            return Err(Error::Domain(format!("measure has no mass on [{a}, {b}]")));
        }
        let width = b - a;
        let to_unit = |x: &Rational| (x - a) / &width;
        let mut bps = vec![Rational::zero()];
        let mut ds = Vec::new();
        let first = self.segment_of(a);
        for j in first..self.densities.len() {
            let right = &self.breakpoints[j + 1];
            ds.push(&self.densities[j] * &width / &mass);
            if right >= b {
                bps.push(Rational::one());
                break;
            }
            bps.push(to_unit(right));
        }
        let restricted = Measure::new(bps, ds)
            .map_err(|e| Error::Internal(format!("restriction produced an invalid measure: {e}")))?;
        Ok((restricted, mass))
    }

    /// Image under θ ↦ 1 − θ.
    pub fn reflect(&self) -> Measure {
        let bps = self.breakpoints.iter().rev().map(|b| Rational::one() - b).collect();
        let ds = self.densities.iter().rev().cloned().collect();
        Measure::new(bps, ds).expect("reflection preserves validity")
    }

    /// Image under the circle rotation θ ↦ θ + ρ (mod 1).
    pub fn rotate(&self, rho: &Rational) -> Measure {
        let rho = rho.fract_mod1();
        if rho.is_zero() {
            return self.clone();
        }
        // the point 1 − ρ of the original lands on 0
        let cut = Rational::one() - &rho;
        let mut pieces: Vec<(Rational, Rational, Rational)> = Vec::new();
        for (j, d) in self.densities.iter().enumerate() {
            let (lo, hi) = (&self.breakpoints[j], &self.breakpoints[j + 1]);
            if *hi <= cut {
                pieces.push((lo + &rho, hi + &rho, d.clone()));
            } else if *lo >= cut {
                pieces.push((lo - &cut, hi - &cut, d.clone()));
            } else {
                pieces.push((lo + &rho, Rational::one(), d.clone()));
                pieces.push((Rational::zero(), hi - &cut, d.clone()));
            }
        }
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let mut bps = vec![Rational::zero()];
        let mut ds = Vec::new();
        for (_, hi, d) in pieces {
            bps.push(hi);
            ds.push(d);
        }
        Measure::new(bps, ds).expect("rotation preserves validity")
    }
}

/// An arc `{start + u mod 1 : 0 ≤ u ≤ length}` of the unit circle.
/// `length = 1` is the whole circle, `length = 0` the empty arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircleArc {
    pub start: Rational,
    pub length: Rational,
}

impl CircleArc {
    pub fn new(start: Rational, length: Rational) -> Result<Self> {
        if start.is_negative() || start >= Rational::one() {
            return Err(Error::Domain(format!("arc start {start} outside [0,1)")));
        }
        if !length.in_unit_interval() {
            return Err(Error::Domain(format!("arc length {length} outside [0,1]")));
        }
        Ok(CircleArc { start, length })
    }

    /// Arc from `a` counter-clockwise to `b`, both taken mod 1. For `a ≡ b`
    /// this is the empty arc.
    pub fn between(a: &Rational, b: &Rational) -> Self {
        let start = a.fract_mod1();
        let length = (b - a).fract_mod1();
        CircleArc { start, length }
    }

    pub fn full() -> Self {
        CircleArc {
            start: Rational::zero(),
            length: Rational::one(),
        }
    }

    pub fn end(&self) -> Rational {
        &self.start + &self.length
    }

    pub fn wraps(&self) -> bool {
        self.end() > Rational::one()
    }

    pub fn complement(&self) -> CircleArc {
        CircleArc {
            start: self.end().fract_mod1(),
            length: Rational::one() - &self.length,
        }
    }

    pub fn rotate(&self, rho: &Rational) -> CircleArc {
        CircleArc {
            start: (&self.start + rho).fract_mod1(),
            length: self.length.clone(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.length.is_zero() || self.length == Rational::one()
    }
}

/// One connected component of the set where two CDFs agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    Point(Rational),
    Interval(Rational, Rational),
}

impl Crossing {
    pub fn lower(&self) -> &Rational {
        match self {
            Crossing::Point(p) => p,
            Crossing::Interval(lo, _) => lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            Crossing::Point(p) => p,
            Crossing::Interval(_, hi) => hi,
        }
    }

    pub fn contains(&self, theta: &Rational) -> bool {
        self.lower() <= theta && theta <= self.upper()
    }
}

/// All θ ∈ `[a,b]` with `μ₁([0,θ]) = μ₂([0,θ])`, as sorted, disjoint points
/// and closed coincidence intervals.
pub fn crossings(m1: &Measure, m2: &Measure, a: &Rational, b: &Rational) -> Result<Vec<Crossing>> {
    if a > b {
        return Err(Error::Domain(format!("crossing window [{a}, {b}] has a > b")));
    }
    if !(a.in_unit_interval() && b.in_unit_interval()) {
        return Err(Error::Domain(format!("crossing window [{a}, {b}] outside [0,1]")));
    }
    let diff = |t: &Rational| m1.cdf_at(t) - m2.cdf_at(t);
    zero_set(diff, m1.breakpoints().iter().chain(m2.breakpoints()), a, b)
}

/// Zero set on `[a,b]` of a continuous function that is affine between
/// consecutive `knots`.
pub(crate) fn zero_set<'a, F>(
    f: F,
    knots: impl Iterator<Item = &'a Rational>,
    a: &Rational,
    b: &Rational,
) -> Result<Vec<Crossing>>
where
    F: Fn(&Rational) -> Rational,
{
    let mut pts: Vec<Rational> = knots.filter(|k| *k > a && *k < b).cloned().collect();
    pts.push(a.clone());
    pts.push(b.clone());
    pts.sort();
    pts.dedup();
    let vals: Vec<Rational> = pts.iter().map(&f).collect();

    let mut out: Vec<Crossing> = Vec::new();
    let mut push = |c: Crossing| {
        if let Some(last) = out.last_mut() {
            if last.upper() >= c.lower() {
                let lo = last.lower().clone();
                let hi = last.upper().clone().max(c.upper().clone());
                *last = if lo == hi { Crossing::Point(lo) } else { Crossing::Interval(lo, hi) };
                return;
            }
        }
        out.push(c);
    };
    if pts.len() == 1 {
        if vals[0].is_zero() {
            push(Crossing::Point(pts[0].clone()));
        }
        return Ok(out);
    }
    for j in 0..pts.len() - 1 {
        let (u, v) = (&pts[j], &pts[j + 1]);
        let (fu, fv) = (&vals[j], &vals[j + 1]);
        match (fu.is_zero(), fv.is_zero()) {
            (true, true) => push(Crossing::Interval(u.clone(), v.clone())),
            (true, false) => push(Crossing::Point(u.clone())),
            (false, true) => push(Crossing::Point(v.clone())),
            (false, false) => {
                if fu.signum() != fv.signum() {
                    let root = u + fu * (v - u) / (fu - fv);
                    push(Crossing::Point(root));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn step(bps: &[Rational], ds: &[Rational]) -> Measure {
        Measure::new(bps.to_vec(), ds.to_vec()).unwrap()
    }

    fn left_heavy() -> Measure {
        // density 2 on [0,1/2], 0 on [1/2,1]
        step(&[q(0, 1), q(1, 2), q(1, 1)], &[q(2, 1), q(0, 1)])
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(Measure::uniform().cdf(&q(1, 3)).unwrap(), q(1, 3));
        assert_eq!(left_heavy().cdf(&q(1, 4)).unwrap(), q(1, 2));
        assert_eq!(left_heavy().cdf(&q(3, 4)).unwrap(), q(1, 1));
        assert!(matches!(Measure::uniform().cdf(&q(3, 2)), Err(Error::Domain(_))));
        assert!(matches!(Measure::uniform().cdf(&q(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(Measure::uniform().quantile(&q(1, 2)).unwrap(), q(1, 2));
        let twin = step(
            &[q(0, 1), q(1, 4), q(3, 4), q(1, 1)],
            &[q(2, 1), q(0, 1), q(2, 1)],
        );
        assert_eq!(twin.quantile(&q(1, 2)).unwrap(), q(1, 4));
        assert_eq!(twin.quantile(&q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(left_heavy().quantile(&q(1, 1)).unwrap(), q(1, 2));
        assert!(twin.quantile(&q(2, 1)).is_err());
    }

    #[test]
    fn interval_mass_examples() {
        let u = Measure::uniform();
        assert_eq!(u.interval_mass(&q(1, 4), &q(1, 2)).unwrap(), q(1, 4));
        assert_eq!(left_heavy().interval_mass(&q(1, 3), &q(1, 3)).unwrap(), q(0, 1));
        let right_heavy = step(&[q(0, 1), q(1, 2), q(1, 1)], &[q(0, 1), q(2, 1)]);
        assert_eq!(right_heavy.interval_mass(&q(0, 1), &q(3, 4)).unwrap(), q(1, 2));
        assert!(u.interval_mass(&q(1, 2), &q(1, 4)).is_err());
    }

    #[test]
    fn arc_mass_examples() {
        let u = Measure::uniform();
        let wrap = CircleArc::new(q(3, 4), q(1, 2)).unwrap();
        assert!(wrap.wraps());
        assert_eq!(u.arc_mass(&wrap), q(1, 2));
        assert_eq!(left_heavy().arc_mass(&CircleArc::new(q(2, 5), q(1, 1)).unwrap()), q(1, 1));
        let mid = CircleArc::new(q(1, 4), q(1, 2)).unwrap();
        assert_eq!(left_heavy().arc_mass(&mid), q(1, 2));
    }

    /// Riemann-sum oracle for an arc mass, independent of the CDF table.
    fn riemann_arc_mass(m: &Measure, arc: &CircleArc, cells: i64) -> Rational {
        let density_at = |x: &Rational| -> Rational {
            let j = m.breakpoints().iter().rposition(|b| b <= x).unwrap().min(m.segment_count() - 1);
            m.densities()[j].clone()
        };
        let step = &arc.length / Rational::from_int(cells);
        (0..cells)
            .map(|k| {
                let mid = (&arc.start + &step * (Rational::from_int(k) + q(1, 2))).fract_mod1();
                density_at(&mid) * &step
            })
            .sum()
    }

    #[test]
    fn arc_mass_matches_riemann_oracle() {
        let mid = CircleArc::new(q(1, 4), q(1, 2)).unwrap();
        // density breakpoints align with the midpoint grid, so the sum is exact
        assert_eq!(riemann_arc_mass(&left_heavy(), &mid, 64), q(1, 2));
        let wrap = CircleArc::new(q(5, 8), q(3, 4)).unwrap();
        assert_eq!(riemann_arc_mass(&left_heavy(), &wrap, 96), left_heavy().arc_mass(&wrap));
    }

    #[test]
    fn crossings_examples() {
        let u = Measure::uniform();
        assert_eq!(
            crossings(&u, &u, &q(0, 1), &q(1, 1)).unwrap(),
            vec![Crossing::Interval(q(0, 1), q(1, 1))]
        );
        let spike = step(
            &[q(0, 1), q(1, 2), q(3, 4), q(1, 1)],
            &[q(0, 1), q(4, 1), q(0, 1)],
        );
        let c = crossings(&u, &spike, &q(1, 2), &q(3, 4)).unwrap();
        assert_eq!(c, vec![Crossing::Point(q(2, 3))]);
        // substitution check
        assert_eq!(u.cdf_at(&q(2, 3)), spike.cdf_at(&q(2, 3)));

        let c = crossings(&u, &left_heavy(), &q(1, 4), &q(1, 1)).unwrap();
        assert_eq!(c, vec![Crossing::Point(q(1, 1))]);
    }

    #[test]
    fn crossings_merges_touching_components() {
        let u = Measure::uniform();
        // agrees with uniform on [0,1/4] and [3/4,1], crosses once in between
        let m = step(
            &[q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(1, 1)],
            &[q(1, 1), q(3, 2), q(1, 2), q(1, 1)],
        );
        let c = crossings(&u, &m, &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(
            c,
            vec![Crossing::Interval(q(0, 1), q(1, 4)), Crossing::Interval(q(3, 4), q(1, 1))]
        );
        let single = crossings(&u, &m, &q(1, 8), &q(1, 8)).unwrap();
        assert_eq!(single, vec![Crossing::Point(q(1, 8))]);
    }

    #[test]
    fn canonicalization_merges_equal_neighbours() {
        let m = step(&[q(0, 1), q(1, 3), q(1, 1)], &[q(1, 1), q(1, 1)]);
        assert_eq!(m, Measure::uniform());
        assert_eq!(m.segment_count(), 1);
    }

    #[test]
    fn validation_errors_name_the_problem() {
        let err = Measure::new(vec![q(0, 1), q(1, 2)], vec![q(2, 1)]).unwrap_err();
        assert!(err.to_string().contains("last breakpoint"));
        let err = Measure::new(vec![q(0, 1), q(1, 1)], vec![q(1, 2)]).unwrap_err();
        assert!(err.to_string().contains("total mass"));
        let err = Measure::new(vec![q(0, 1), q(1, 2), q(1, 2), q(1, 1)], vec![q(1, 1); 3]).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"));
        let err = Measure::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![q(3, 1), q(-1, 1)]).unwrap_err();
        assert!(err.to_string().contains("densities[1]"));
    }

    #[test]
    fn restrict_rescales_and_renormalizes() {
        let m = step(&[q(0, 1), q(1, 4), q(1, 1)], &[q(2, 1), q(2, 3)]);
        let (r, mass) = m.restrict(&q(1, 8), &q(1, 2)).unwrap();
        assert_eq!(mass, q(1, 4) + q(1, 6));
        // the original breakpoint 1/4 maps to (1/4 − 1/8)/(3/8) = 1/3
        assert_eq!(r.breakpoints(), &[q(0, 1), q(1, 3), q(1, 1)]);
        assert_eq!(r.cdf_at(&q(1, 3)), q(1, 4) / &mass);
        assert!(left_heavy().restrict(&q(1, 2), &q(1, 1)).is_err());
    }

    #[test]
    fn reflect_and_rotate() {
        let r = left_heavy().reflect();
        assert_eq!(r.cdf_at(&q(1, 2)), q(0, 1));
        let rot = left_heavy().rotate(&q(1, 4));
        // support [0,1/2] moves to [1/4,3/4]
        assert_eq!(rot.interval_mass_at(&q(1, 4), &q(3, 4)), q(1, 1));
        let arc = CircleArc::new(q(7, 8), q(1, 4)).unwrap();
        assert_eq!(left_heavy().arc_mass(&arc), rot.arc_mass(&arc.rotate(&q(1, 4))));
    }

    #[test]
    fn uniform_on_support() {
        let m = Measure::uniform_on(&q(49, 100), &q(51, 100)).unwrap();
        assert_eq!(m.densities(), &[q(0, 1), q(50, 1), q(0, 1)]);
        assert!(Measure::uniform_on(&q(1, 2), &q(1, 2)).is_err());
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let json = r#"{"breakpoints":["0","1/2","1"],"densities":["2","0"]}"#;
        let m: Measure = serde_json::from_str(json).unwrap();
        assert_eq!(m, left_heavy());
        assert_eq!(serde_json::to_string(&m).unwrap(), json);
        let bad = r#"{"breakpoints":["0","1"],"densities":["2"]}"#;
        assert!(serde_json::from_str::<Measure>(bad).is_err());
    }
}
