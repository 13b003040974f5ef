use serde::{Deserialize, Serialize};

use crate::pair::CircleLemma;
use crate::rational::Rational;

/// Sweep witnesses of one recursion node, with agents named by their index
/// in the top-level instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepWitness {
    pub x: Rational,
    pub t: usize,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

/// Which branch of the case analysis fired at a node, with its witnesses.
///
/// For the three `α_t > 1/2` cases, `mirrored = true` means the branch was
/// taken on the reflected node instance (θ ↦ 1 − θ) because `Q` rather than
/// `P` was empty; `y`, `z` and `β` are then reflected-frame values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseStep {
    BaseSingle,
    BasePair {
        lemma: Option<CircleLemma>,
    },
    PqSplit {
        sweep: SweepWitness,
        /// `1/2 − Σ_P α`, the demand of `t` on `[0,x]`
        alpha_left: Rational,
        /// `1/2 − Σ_Q α`, the demand of `t` on `[x,1]`
        alpha_right: Rational,
    },
    HalfAssign {
        sweep: SweepWitness,
    },
    TAssignAtY {
        sweep: SweepWitness,
        mirrored: bool,
        y: Rational,
    },
    UvSplit {
        sweep: SweepWitness,
        mirrored: bool,
        y: Rational,
        u: Vec<usize>,
        v: Vec<usize>,
    },
    ZSplit {
        sweep: SweepWitness,
        mirrored: bool,
        y: Rational,
        u: Vec<usize>,
        z: Rational,
        s: usize,
        beta: Rational,
    },
}

impl CaseStep {
    pub fn tag(&self) -> &'static str {
        match self {
            CaseStep::BaseSingle => "BASE_SINGLE",
            CaseStep::BasePair { .. } => "BASE_PAIR",
            CaseStep::PqSplit { .. } => "PQ_SPLIT",
            CaseStep::HalfAssign { .. } => "HALF_ASSIGN",
            CaseStep::TAssignAtY { .. } => "T_ASSIGN_AT_Y",
            CaseStep::UvSplit { .. } => "UV_SPLIT",
            CaseStep::ZSplit { .. } => "Z_SPLIT",
        }
    }

    pub fn sweep(&self) -> Option<&SweepWitness> {
        match self {
            CaseStep::BaseSingle | CaseStep::BasePair { .. } => None,
            CaseStep::PqSplit { sweep, .. }
            | CaseStep::HalfAssign { sweep }
            | CaseStep::TAssignAtY { sweep, .. }
            | CaseStep::UvSplit { sweep, .. }
            | CaseStep::ZSplit { sweep, .. } => Some(sweep),
        }
    }
}

/// A consecutive piece of a node's interval `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceTrace {
    /// Handed directly to one agent.
    Assigned { lo: Rational, hi: Rational, agent: usize },
    /// Solved recursively. `demands` are in the parent's units (before the
    /// child is rescaled to `[0,1]`).
    Child {
        lo: Rational,
        hi: Rational,
        agents: Vec<usize>,
        demands: Vec<Rational>,
        node: Box<TraceNode>,
    },
}

impl PieceTrace {
    pub fn bounds(&self) -> (&Rational, &Rational) {
        match self {
            PieceTrace::Assigned { lo, hi, .. } | PieceTrace::Child { lo, hi, .. } => (lo, hi),
        }
    }
}

/// One recursion level. Coordinates are the node's own `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    /// Agents handed to this node and their (rescaled) demands.
    pub agents: Vec<usize>,
    pub demands: Vec<Rational>,
    /// Agents left after dropping zero demands, and their demands scaled up
    /// to sum to exactly 1.
    pub active: Vec<usize>,
    pub normalized: Vec<Rational>,
    pub step: CaseStep,
    /// Cuts in this node's division of its interval.
    pub cuts: usize,
    pub pieces: Vec<PieceTrace>,
}

impl TraceNode {
    /// Pre-order walk over all nodes.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a TraceNode)) {
        f(self);
        for piece in &self.pieces {
            if let PieceTrace::Child { node, .. } = piece {
                node.walk(f);
            }
        }
    }

    pub fn depth(&self) -> usize {
        1 + self
            .pieces
            .iter()
            .filter_map(|p| match p {
                PieceTrace::Child { node, .. } => Some(node.depth()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// The full recursion tree of one solver run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub root: TraceNode,
}

impl Trace {
    /// Number of nodes per case tag, in tag order of first appearance.
    pub fn case_counts(&self) -> Vec<(&'static str, usize)> {
        let mut counts: Vec<(&'static str, usize)> = Vec::new();
        self.root.walk(&mut |n| {
            let tag = n.step.tag();
            match counts.iter_mut().find(|(t, _)| *t == tag) {
                Some((_, c)) => *c += 1,
                None => counts.push((tag, 1)),
            }
        });
        counts
    }
}
