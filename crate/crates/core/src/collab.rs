//! Collaboration-square evaluation over the B2B, B2C, C2B and C2C subsystems.
//!
//! The consolidation-centre (CC) vector aggregates B2B with C2C and the
//! social-network (SN) vector aggregates C2B with B2C. Each dimension's
//! contribution carries the sign of its column block: `+` collaborate,
//! `-` compete, `0` undecided.

use std::cmp::Ordering;
use std::str::FromStr;

use num_traits::Zero;

use crate::complexity::{default_hlt_eps, ComplexityError, UncertaintyValue};
use crate::num::{int, Rational};
use crate::scenario::{CollaborationBlocks, Sign, SignAssignment};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollabError {
    #[error("dimension mismatch: blocks have {blocks} entries, signs have {b}/{c}")]
    DimensionMismatch { blocks: usize, b: usize, c: usize },
    #[error("no cases to rank")]
    EmptyInput,
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollaborationOutcome {
    pub sn: Vec<Rational>,
    pub cc: Vec<Rational>,
    pub sn_weight: Rational,
    pub cc_weight: Rational,
}

impl CollaborationOutcome {
    fn from_vectors(sn: Vec<Rational>, cc: Vec<Rational>) -> Self {
        let sn_weight = sn.iter().sum();
        let cc_weight = cc.iter().sum();
        Self { sn, cc, sn_weight, cc_weight }
    }
}

pub fn eval_scs(blocks: &CollaborationBlocks, signs: &SignAssignment) -> Result<CollaborationOutcome, CollabError> {
    let n = blocks.dims();
    if signs.b.len() != n || signs.c.len() != n {
        return Err(CollabError::DimensionMismatch { blocks: n, b: signs.b.len(), c: signs.c.len() });
    }
    let mut sn = Vec::with_capacity(n);
    let mut cc = Vec::with_capacity(n);
    for d in 0..n {
        let b = int(signs.b[d].value());
        let c = int(signs.c[d].value());
        sn.push(b * blocks.c2b[d] + c * blocks.b2c[d]);
        cc.push(b * blocks.b2b[d] + c * blocks.c2c[d]);
    }
    Ok(CollaborationOutcome::from_vectors(sn, cc))
}

/// Which weighted intent drives case selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Target {
    Sn,
    Cc,
    /// Lexicographic on `(min(sn, cc), sn + cc)`.
    #[default]
    Both,
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sn" => Ok(Target::Sn),
            "cc" => Ok(Target::Cc),
            "both" => Ok(Target::Both),
            other => Err(format!("unknown target `{other}` (expected sn, cc or both)")),
        }
    }
}

impl Target {
    /// Orders outcomes so that the better case compares greater.
    pub fn compare(self, a: &CollaborationOutcome, b: &CollaborationOutcome) -> Ordering {
        match self {
            Target::Sn => a.sn_weight.cmp(&b.sn_weight),
            Target::Cc => a.cc_weight.cmp(&b.cc_weight),
            Target::Both => {
                let key = |o: &CollaborationOutcome| (o.sn_weight.min(o.cc_weight), o.sn_weight + o.cc_weight);
                key(a).cmp(&key(b))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedCase {
    /// 1-based position in enumeration order.
    pub case_id: usize,
    pub signs: SignAssignment,
    pub outcome: CollaborationOutcome,
}

/// All `±` assignments for `n` dimensions, in binary order with `+` first.
fn binary_signs(n: usize) -> Vec<Vec<Sign>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|d| if mask >> (n - 1 - d) & 1 == 0 { Sign::Plus } else { Sign::Minus })
                .collect()
        })
        .collect()
}

/// Evaluates all `2^n × 2^n` binary sign cases and ranks them best first.
/// Ties keep enumeration order.
pub fn enumerate_sign_cases(blocks: &CollaborationBlocks, target: Target) -> Vec<RankedCase> {
    let all = binary_signs(blocks.dims());
    let mut cases = Vec::with_capacity(all.len() * all.len());
    for b in &all {
        for c in &all {
            let signs = SignAssignment::new(b.clone(), c.clone());
            let outcome = eval_scs(blocks, &signs).expect("enumerated signs match block dimensions");
            cases.push(RankedCase { case_id: cases.len() + 1, signs, outcome });
        }
    }
    cases.sort_by(|x, y| target.compare(&y.outcome, &x.outcome));
    cases
}

/// Picks the best of the supplied cases. Returns its index in `cases` with
/// its outcome; the earliest case wins ties.
pub fn rank_sampled_cases(
    cases: &[SignAssignment],
    blocks: &CollaborationBlocks,
    target: Target,
) -> Result<(usize, CollaborationOutcome), CollabError> {
    let mut best: Option<(usize, CollaborationOutcome)> = None;
    for (i, signs) in cases.iter().enumerate() {
        let outcome = eval_scs(blocks, signs)?;
        let better = match &best {
            None => true,
            Some((_, b)) => target.compare(&outcome, b) == Ordering::Greater,
        };
        if better {
            best = Some((i, outcome));
        }
    }
    best.ok_or(CollabError::EmptyInput)
}

/// Inputs of the uncertainty-aware reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcsContext {
    pub k: UncertaintyValue,
    pub d_a: Rational,
    pub d_e: Rational,
}

impl AcsContext {
    /// Levity presumptions: `k_o = 1 + eps`, `ΔA = 0`, `ΔE = 1`.
    pub fn levity(eps: Rational) -> Result<Self, CollabError> {
        Ok(Self { k: UncertaintyValue::near_neutral(eps)?, d_a: Rational::zero(), d_e: int(1) })
    }

    pub fn levity_default() -> Self {
        Self::levity(default_hlt_eps()).expect("default eps is valid")
    }

    pub fn denominator(&self) -> Rational {
        self.k.value() * self.d_a.max(self.d_e)
    }
}

/// Returns `(ΔS_cc, ΔS_SN)`, the weights divided by `k_o × (ΔA ∪ ΔE)`.
pub fn acs_reduce(outcome: &CollaborationOutcome, ctx: &AcsContext) -> Result<(Rational, Rational), CollabError> {
    let denom = ctx.denominator();
    if denom.is_zero() {
        return Err(ComplexityError::SingularState("k_o x (dA u dE) is zero").into());
    }
    Ok((outcome.cc_weight / denom, outcome.sn_weight / denom))
}
