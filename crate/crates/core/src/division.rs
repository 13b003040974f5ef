//! Instances, divisions, exact verification and the JSON file formats.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::rational::Rational;

/// `n` agents, each with a measure and a non-negative demand.
///
/// User-facing instances have demands summing to exactly 1; the solver's
/// internal subproblems only guarantee a sum of at most 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub measures: Vec<Measure>,
    pub demands: Vec<Rational>,
}

impl Instance {
    /// Validates an instance whose demands sum to at most 1.
    pub fn new(measures: Vec<Measure>, demands: Vec<Rational>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::validation("measures", "need at least one agent"));
        }
        if measures.len() != demands.len() {
            return Err(Error::validation(
                "demands",
                format!("{} demands for {} measures", demands.len(), measures.len()),
            ));
        }
        if let Some(i) = demands.iter().position(|d| d.is_negative()) {
            return Err(Error::validation(format!("demands[{i}]"), "demand must be non-negative"));
        }
        let total = demands.iter().sum::<Rational>();
        if total > Rational::one() {
            return Err(Error::validation("demands", format!("demands sum to {total} > 1")));
        }
        Ok(Instance { measures, demands })
    }

    /// Validates a top-level instance: demands must sum to exactly 1.
    pub fn new_strict(measures: Vec<Measure>, demands: Vec<Rational>) -> Result<Self> {
        let inst = Self::new(measures, demands)?;
        inst.require_unit_sum()?;
        Ok(inst)
    }

    pub fn require_unit_sum(&self) -> Result<()> {
        let total = self.demand_sum();
        if total != Rational::one() {
            return Err(Error::validation("demands", format!("demands sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.measures.len()
    }

    pub fn demand_sum(&self) -> Rational {
        self.demands.iter().sum()
    }

    /// Every measure reflected through θ ↦ 1 − θ.
    pub fn reflect(&self) -> Instance {
        Instance {
            measures: self.measures.iter().map(Measure::reflect).collect(),
            demands: self.demands.clone(),
        }
    }
}

/// A partition of `[0,1]` into consecutive pieces, each owned by one agent.
///
/// Piece `j` is `[cuts[j-1], cuts[j])` (with `cuts[-1] = 0`), the last piece
/// is closed at 1. Because every measure is non-atomic the endpoint
/// convention never changes a mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Division {
    pub cuts: Vec<Rational>,
    pub owners: Vec<usize>,
}

impl Division {
    pub fn new(cuts: Vec<Rational>, owners: Vec<usize>) -> Result<Self> {
        if owners.len() != cuts.len() + 1 {
            return Err(Error::validation(
                "owners",
                format!("{} owners for {} cuts (need cuts + 1)", owners.len(), cuts.len()),
            ));
        }
        for (j, c) in cuts.iter().enumerate() {
            if !(c.is_positive() && *c < Rational::one()) {
                return Err(Error::validation(format!("cuts[{j}]"), format!("cut {c} not inside (0,1)")));
            }
        }
        if let Some(j) = cuts.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                format!("cuts[{}]", j + 1),
                "cuts must be strictly increasing",
            ));
        }
        Ok(Division { cuts, owners })
    }

    /// The whole cake to one agent.
    pub fn single(owner: usize) -> Self {
        Division {
            cuts: Vec::new(),
            owners: vec![owner],
        }
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.len()
    }

    /// `(lo, hi, owner)` for every piece in order.
    pub fn pieces(&self) -> impl Iterator<Item = (Rational, Rational, usize)> + '_ {
        (0..self.owners.len()).map(move |j| {
            let lo = if j == 0 { Rational::zero() } else { self.cuts[j - 1].clone() };
            let hi = self.cuts.get(j).cloned().unwrap_or_else(Rational::one);
            (lo, hi, self.owners[j])
        })
    }

    /// Merges adjacent pieces with the same owner.
    pub fn canonical(&self) -> Division {
        let mut cuts = Vec::with_capacity(self.cuts.len());
        let mut owners = vec![self.owners[0]];
        for (c, &o) in self.cuts.iter().zip(&self.owners[1..]) {
            if *owners.last().unwrap() != o {
                cuts.push(c.clone());
                owners.push(o);
            }
        }
        Division { cuts, owners }
    }

    /// Builds a division from consecutive `(end, owner)` pieces; the last end
    /// must be 1. Zero-length pieces are dropped and the result is canonical.
    pub fn from_pieces(pieces: impl IntoIterator<Item = (Rational, usize)>) -> Result<Division> {
        let mut cuts = Vec::new();
        let mut owners = Vec::new();
        let mut start = Rational::zero();
        for (end, owner) in pieces {
            if end < start {
                return Err(Error::Internal(format!("piece end {end} precedes its start {start}")));
            }
            if end == start {
                continue;
            }
            if !owners.is_empty() {
                cuts.push(start.clone());
            }
            owners.push(owner);
            start = end;
        }
        if start != Rational::one() || owners.is_empty() {
            return Err(Error::Internal(format!("pieces end at {start}, not at 1")));
        }
        Ok(Division { cuts, owners }.canonical())
    }

    /// Maps every piece through the affine map `[0,1] → [a,b]` and relabels
    /// owners, yielding `(end, owner)` pieces ready for [`Division::from_pieces`].
    pub fn embed(&self, a: &Rational, b: &Rational, relabel: impl Fn(usize) -> usize) -> Vec<(Rational, usize)> {
        let width = b - a;
        self.pieces()
            .map(|(_, hi, o)| (a + &width * &hi, relabel(o)))
            .collect()
    }

    /// Image under θ ↦ 1 − θ.
    pub fn reflect(&self) -> Division {
        Division {
            cuts: self.cuts.iter().rev().map(|c| Rational::one() - c).collect(),
            owners: self.owners.iter().rev().copied().collect(),
        }
    }
}

/// Exact per-agent outcome of a division.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `μᵢ(Xᵢ)`
    pub received: Vec<Rational>,
    /// `μᵢ(Xᵢ) − αᵢ`
    pub surplus: Vec<Rational>,
    pub cut_count: usize,
    pub valid: bool,
}

/// Checks `μᵢ(Xᵢ) ≥ αᵢ` for every agent, exactly.
pub fn verify(inst: &Instance, div: &Division) -> Result<VerificationReport> {
    let n = inst.n();
    if div.owners.len() != div.cuts.len() + 1 {
        return Err(Error::Structural(format!(
            "{} owners for {} cuts",
            div.owners.len(),
            div.cuts.len()
        )));
    }
    if let Some(&o) = div.owners.iter().find(|&&o| o >= n) {
        return Err(Error::Structural(format!("owner {o} out of range for {n} agents")));
    }
    let div = div.canonical();
    let mut received = vec![Rational::zero(); n];
    for (lo, hi, o) in div.pieces() {
        received[o] += inst.measures[o].interval_mass(&lo, &hi)?;
    }
    let surplus: Vec<Rational> = received.iter().zip(&inst.demands).map(|(r, d)| r - d).collect();
    let valid = surplus.iter().all(|s| !s.is_negative());
    Ok(VerificationReport {
        received,
        surplus,
        cut_count: div.cut_count(),
        valid,
    })
}

/// Worst-case number of cuts guaranteed by the recursive solver: 0 for one
/// agent and `3n − 4` otherwise.
pub fn cut_count_bound(n: usize) -> Result<usize> {
    match n {
        0 => Err(Error::Domain("cut bound needs at least one agent".into())),
        1 => Ok(0),
        n => Ok(3 * n - 4),
    }
}

// ---------------------------------------------------------------------------
// JSON

/// Pretty JSON with lexicographically sorted keys and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default Map is a BTreeMap, so going through Value sorts keys
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::validation("json", e.to_string()))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| Error::validation(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| Error::validation(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::validation(path, "expected an array"))
}

fn rational_list(v: &Value, path: &str) -> Result<Vec<Rational>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, item)| {
            let p = format!("{path}[{k}]");
            let s = item
                .as_str()
                .ok_or_else(|| Error::validation(&p, "rationals must be strings like \"p/q\""))?;
            s.parse::<Rational>().map_err(|e| Error::validation(&p, e.to_string()))
        })
        .collect()
}

/// Reads a measure object, prefixing validation errors with `path`.
pub fn read_measure_value(v: &Value, path: &str) -> Result<Measure> {
    let bps = rational_list(field(v, "breakpoints", path)?, &join(path, "breakpoints"))?;
    let ds = rational_list(field(v, "densities", path)?, &join(path, "densities"))?;
    Measure::new(bps, ds).map_err(|e| match e {
        Error::Validation { field, message } => Error::validation(join(path, &field), message),
        other => other,
    })
}

/// Parses an instance. With `strict`, demands must sum to exactly 1.
pub fn read_instance(text: &str, strict: bool) -> Result<Instance> {
    let root = parse_json(text)?;
    let measures = array(field(&root, "measures", "")?, "measures")?
        .iter()
        .enumerate()
        .map(|(k, m)| read_measure_value(m, &format!("measures[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let demands = rational_list(field(&root, "demands", "")?, "demands")?;
    if strict {
        Instance::new_strict(measures, demands)
    } else {
        Instance::new(measures, demands)
    }
}

pub fn write_instance(inst: &Instance) -> String {
    canonical_json(inst)
}

pub fn read_division(text: &str) -> Result<Division> {
    let root = parse_json(text)?;
    let cuts = rational_list(field(&root, "cuts", "")?, "cuts")?;
    let owners = array(field(&root, "owners", "")?, "owners")?
        .iter()
        .enumerate()
        .map(|(k, o)| {
            o.as_u64()
                .map(|o| o as usize)
                .ok_or_else(|| Error::validation(format!("owners[{k}]"), "expected a non-negative integer"))
        })
        .collect::<Result<Vec<_>>>()?;
    Division::new(cuts, owners)
}

/// Writes the canonical (merged) form of a division.
pub fn write_division(div: &Division) -> String {
    canonical_json(&div.canonical())
}
