//! Graded actual causation over a story.
//!
//! Every definition reports a strength in `[0, 1]`; an atom is a cause when
//! its strength is positive.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::engine;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::prob::Prob;
use crate::theory::{Atom, Branch, CPTheory};
use crate::transform::{self, check_branch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefinitionKind {
    /// Counterfactual dependence in T*.
    Working,
    /// The normality-restricted definition; needs non-strict norms.
    Hh,
    /// Normal-refined counterfactual times the normal probability of ¬C.
    Intermediate,
    /// Norm-refined counterfactual times the normative probability of ¬C.
    Final,
}

impl DefinitionKind {
    pub const ALL: [DefinitionKind; 4] = [
        DefinitionKind::Working,
        DefinitionKind::Hh,
        DefinitionKind::Intermediate,
        DefinitionKind::Final,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefinitionKind::Working => "working",
            DefinitionKind::Hh => "hh",
            DefinitionKind::Intermediate => "intermediate",
            DefinitionKind::Final => "final",
        }
    }
}

impl fmt::Display for DefinitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefinitionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        DefinitionKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            format!(
                "unknown definition `{}` (expected working, hh, intermediate or final)",
                s
            )
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauseVerdict {
    pub cause: Atom,
    pub effect: Atom,
    pub definition: DefinitionKind,
    pub strength: Prob,
    pub is_cause: bool,
    /// The two factors of the product definitions.
    pub factors: Option<(Prob, Prob)>,
}

impl CauseVerdict {
    fn new(c: &Atom, e: &Atom, definition: DefinitionKind, strength: Prob, factors: Option<(Prob, Prob)>) -> Self {
        CauseVerdict {
            cause: c.clone(),
            effect: e.clone(),
            definition,
            is_cause: strength > Prob::zero(),
            strength,
            factors,
        }
    }
}

fn prepare(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<()> {
    check_branch(theory, b)?;
    for a in [c, e] {
        if !b.leaf().holds(a) {
            return Err(Error::CEnotInLeaf { atom: a.clone() });
        }
    }
    Ok(())
}

fn not(a: &Atom) -> Formula {
    Formula::neg_atom(a.clone())
}

/// P(¬E) after do(¬C).
fn counterfactual(theory: &CPTheory, c: &Atom, e: &Atom) -> Prob {
    engine::prob(&transform::intervene_neg(theory, c), &not(e))
}

/// P_{T*}(¬E | do(¬C)).
pub fn cause_working(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CauseVerdict> {
    prepare(theory, b, c, e)?;
    let star = transform::t_star(theory, b, c, e)?;
    Ok(CauseVerdict::new(
        c,
        e,
        DefinitionKind::Working,
        counterfactual(&star, c, e),
        None,
    ))
}

/// Fails on the first norm equal to 0 or 1.
pub fn forbid_strict_norms(theory: &CPTheory) -> Result<()> {
    for (law, l) in theory.laws().iter().enumerate() {
        for d in &l.head {
            if let Some(n) = &d.norm {
                if n.is_zero() || n.is_one() {
                    return Err(Error::StrictNormForbidden {
                        law,
                        atom: d.atom.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn hh_strength(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<Prob> {
    let refined = transform::normal_refine_star(theory, b, c, e)?;
    Ok(engine::prob(&refined, &Formula::and([not(e), not(c)])))
}

/// P_{T^{Normal(b)*}}(¬E ∧ ¬C). With a norm `p` on C's disjunct and the
/// empty disjunct surviving, this is `1 - p` on the pen story.
pub fn cause_hh(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CauseVerdict> {
    prepare(theory, b, c, e)?;
    forbid_strict_norms(theory)?;
    transform::law_for(theory, c)?;
    Ok(CauseVerdict::new(
        c,
        e,
        DefinitionKind::Hh,
        hh_strength(theory, b, c, e)?,
        None,
    ))
}

fn intermediate_factors(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<(Prob, Prob)> {
    let first = counterfactual(&transform::t_star_normal(theory, b, c, e)?, c, e);
    let second = engine::prob(&transform::normal_refine(theory, b)?, &not(c));
    Ok((first, second))
}

/// P_{(T*)^{Normal(b)}}(¬E | do(¬C)) · P_{T^{Normal(b)}}(¬C).
pub fn cause_intermediate(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CauseVerdict> {
    prepare(theory, b, c, e)?;
    let (first, second) = intermediate_factors(theory, b, c, e)?;
    Ok(CauseVerdict::new(
        c,
        e,
        DefinitionKind::Intermediate,
        &first * &second,
        Some((first, second)),
    ))
}

/// P_{(T*)^{NN}}(¬E | do(¬C)) · P_{T^{NN}}(¬C). Strict norms are allowed.
pub fn cause_final(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CauseVerdict> {
    prepare(theory, b, c, e)?;
    let first = counterfactual(&transform::t_star_nn(theory, b, c, e)?, c, e);
    let second = engine::prob(&transform::nn_refine(theory)?, &not(c));
    Ok(CauseVerdict::new(
        c,
        e,
        DefinitionKind::Final,
        &first * &second,
        Some((first, second)),
    ))
}

pub fn cause(kind: DefinitionKind, theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CauseVerdict> {
    match kind {
        DefinitionKind::Working => cause_working(theory, b, c, e),
        DefinitionKind::Hh => cause_hh(theory, b, c, e),
        DefinitionKind::Intermediate => cause_intermediate(theory, b, c, e),
        DefinitionKind::Final => cause_final(theory, b, c, e),
    }
}

/// One row of a ranking: a candidate cause and its verdict or the error it
/// raised.
#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry {
    pub cause: Atom,
    pub verdict: Result<CauseVerdict>,
}

/// Judges every atom of the leaf other than `e`. Verdicts come first by
/// decreasing strength, then failed candidates; ties go by atom name.
pub fn rank_causes(theory: &CPTheory, b: &Branch, e: &Atom, kind: DefinitionKind) -> Result<Vec<RankEntry>> {
    check_branch(theory, b)?;
    if !b.leaf().holds(e) {
        return Err(Error::CEnotInLeaf { atom: e.clone() });
    }
    let mut entries: Vec<RankEntry> = b
        .leaf()
        .iter()
        .filter(|a| *a != e)
        .map(|c| RankEntry {
            cause: c.clone(),
            verdict: cause(kind, theory, b, c, e),
        })
        .collect();
    entries.sort_by(|x, y| match (&x.verdict, &y.verdict) {
        (Ok(a), Ok(b)) => b.strength.cmp(&a.strength).then_with(|| x.cause.cmp(&y.cause)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => x.cause.cmp(&y.cause),
    });
    Ok(entries)
}

/// Both sides of the identity between the normality-restricted joint
/// probability and the intermediate product.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Report {
    /// r(C) is non-deterministic or P_{T^{Normal(b)}}(¬C) = 0.
    pub hypothesis: bool,
    /// r(C) has an empty body and a single head atom.
    pub vacuous_single: bool,
    pub lhs: Prob,
    pub rhs: Prob,
    pub equal: bool,
}

pub fn check_theorem2(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<Theorem2Report> {
    prepare(theory, b, c, e)?;
    let rc = transform::law_for(theory, c)?;
    let law = &theory.laws()[rc];
    let lhs = hh_strength(theory, b, c, e)?;
    let (first, second) = intermediate_factors(theory, b, c, e)?;
    let hypothesis = !law.is_deterministic() || second.is_zero();
    let rhs = first * second;
    Ok(Theorem2Report {
        hypothesis,
        vacuous_single: law.is_vacuous() && law.head.len() == 1,
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}
