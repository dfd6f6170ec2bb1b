//! Syntactic theory transformations: determinizing along a story,
//! interventions, the probabilistic/normative/normal refinements, and the
//! story-adjusted theories used by the causation definitions.
//!
//! Every transformation works law by law. The staged helpers keep the laws
//! aligned with the original ids so that refinements along a story can be
//! composed; laws left with an empty head are dropped only when the final
//! theory is assembled.

use std::cell::Cell;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::engine::{self, Compiled, OrderPolicy};
use crate::error::{Error, MassKind, Result};
use crate::prob::{self, Prob};
use crate::story;
use crate::theory::{Atom, Body, Branch, CPLaw, CPTheory, Disjunct, LawId, Outcome, State};

/// Builds a theory from staged laws, dropping no-op laws with empty heads.
pub(crate) fn assemble(laws: Vec<CPLaw>) -> Result<CPTheory> {
    CPTheory::new(laws.into_iter().filter(|l| !l.head.is_empty()).collect())
}

/// Fails unless `b` replays in `theory` to the same leaf.
pub(crate) fn check_branch(theory: &CPTheory, b: &Branch) -> Result<()> {
    match story::replay(theory, b.steps()) {
        Ok(r) if r.leaf() == b.leaf() => Ok(()),
        Ok(_) => Err(Error::InvalidBranch {
            reason: "leaf does not match the replayed steps".into(),
        }),
        Err(e) => Err(Error::InvalidBranch { reason: e.to_string() }),
    }
}

fn require_in_leaf(b: &Branch, atoms: &[&Atom]) -> Result<()> {
    for a in atoms {
        if !b.leaf().holds(a) {
            return Err(Error::CEnotInLeaf { atom: (*a).clone() });
        }
    }
    Ok(())
}

/// The law with only `outcome` left, at probability 1. An empty outcome
/// leaves an empty head.
pub fn determinize_law(law: &CPLaw, outcome: &Outcome) -> CPLaw {
    let head = match outcome {
        Outcome::Atom(a) => vec![Disjunct::new(a.clone(), prob::one())],
        Outcome::Empty => Vec::new(),
    };
    CPLaw::new(head, law.body.clone())
}

/// T^b: every law applied in `b` keeps only the disjunct `b` chose.
pub fn determinize(theory: &CPTheory, b: &Branch) -> Result<CPTheory> {
    check_branch(theory, b)?;
    assemble(determinized_laws(theory, b))
}

fn determinized_laws(theory: &CPTheory, b: &Branch) -> Vec<CPLaw> {
    theory
        .laws()
        .iter()
        .enumerate()
        .map(|(id, law)| match b.outcome_of(id) {
            Some(o) => determinize_law(law, o),
            None => law.clone(),
        })
        .collect()
}

fn intervene_neg_law(law: &CPLaw, c: &Atom) -> CPLaw {
    if !law.in_head(c) {
        return law.clone();
    }
    CPLaw::new(
        law.head.iter().filter(|d| &d.atom != c).cloned().collect(),
        law.body.clone(),
    )
}

/// do(¬C): `c` leaves every head; its mass moves to the empty disjunct.
pub fn intervene_neg(theory: &CPTheory, c: &Atom) -> CPTheory {
    assemble(theory.laws().iter().map(|l| intervene_neg_law(l, c)).collect())
        .expect("removing a disjunct keeps a theory valid")
}

/// do(C): appends the law `c <- .`.
pub fn intervene_pos(theory: &CPTheory, c: &Atom) -> CPTheory {
    let mut laws = theory.laws().to_vec();
    laws.push(CPLaw::deterministic(c.clone(), Body::truth()));
    CPTheory::new(laws).expect("a deterministic vacuous law is valid")
}

/// Probabilistic normalization of one law.
///
/// Applied laws (`chosen` is the story's outcome) lose every outcome, the
/// empty one included, whose mass is strictly below the chosen one. Unapplied
/// laws lose the disjuncts below 1/2 whose atom is false in `leaf`. Survivors
/// are renormalized. A law that changes drops its norm annotations.
pub fn pn_law(law: &CPLaw, chosen: Option<&Outcome>, leaf: &State) -> CPLaw {
    match chosen {
        Some(outcome) => {
            let threshold = law.mass_of(outcome);
            let empty = law.empty_mass();
            let kept: Vec<&Disjunct> = law.head.iter().filter(|d| d.prob >= threshold).collect();
            let keep_empty = empty > Prob::zero() && empty >= threshold;
            if kept.len() == law.head.len() && (keep_empty || empty.is_zero()) {
                return law.clone();
            }
            let mut total: Prob = kept.iter().map(|d| &d.prob).sum();
            if keep_empty {
                total += &empty;
            }
            rescaled(law, kept, &total)
        }
        None => {
            let half = prob::half();
            let (removed, kept): (Vec<&Disjunct>, Vec<&Disjunct>) =
                law.head.iter().partition(|d| d.prob < half && !leaf.holds(&d.atom));
            if removed.is_empty() {
                return law.clone();
            }
            let removed_mass: Prob = removed.iter().map(|d| &d.prob).sum();
            if removed_mass.is_one() {
                return CPLaw::new(Vec::new(), law.body.clone());
            }
            rescaled(law, kept, &(prob::one() - removed_mass))
        }
    }
}

fn rescaled(law: &CPLaw, kept: Vec<&Disjunct>, total: &Prob) -> CPLaw {
    let head = kept
        .into_iter()
        .map(|d| Disjunct::new(d.atom.clone(), &d.prob / total))
        .collect();
    CPLaw::new(head, law.body.clone())
}

/// T^{PN(b)}.
pub fn pn_refine(theory: &CPTheory, b: &Branch) -> Result<CPTheory> {
    check_branch(theory, b)?;
    assemble(
        theory
            .laws()
            .iter()
            .enumerate()
            .map(|(id, law)| pn_law(law, b.outcome_of(id), b.leaf()))
            .collect(),
    )
}

/// Normative normalization of one law: norms replace the statistical
/// probabilities and disjuncts left at zero disappear.
pub fn nn_law(law: &CPLaw, id: LawId) -> Result<CPLaw> {
    if !law.has_norms() {
        return Ok(law.clone());
    }
    let head: Vec<Disjunct> = law
        .head
        .iter()
        .map(|d| Disjunct::new(d.atom.clone(), d.normative().clone()))
        .filter(|d| d.prob > Prob::zero())
        .collect();
    let mass: Prob = head.iter().map(|d| &d.prob).sum();
    if mass > Prob::one() {
        return Err(Error::ProbabilitySum {
            law: id,
            kind: MassKind::Normative,
            span: None,
        });
    }
    Ok(CPLaw::new(head, law.body.clone()))
}

/// T^{NN}.
pub fn nn_refine(theory: &CPTheory) -> Result<CPTheory> {
    assemble(nn_laws(theory.laws())?)
}

fn nn_laws(laws: &[CPLaw]) -> Result<Vec<CPLaw>> {
    laws.iter().enumerate().map(|(id, l)| nn_law(l, id)).collect()
}

/// Normal refinement of one law: normative, then probabilistic.
pub fn normal_law(law: &CPLaw, id: LawId, chosen: Option<&Outcome>, leaf: &State) -> Result<CPLaw> {
    Ok(pn_law(&nn_law(law, id)?, chosen, leaf))
}

/// T^{Normal(b)} = (T^{NN})^{PN(b)}, comparing post-norm probabilities.
pub fn normal_refine(theory: &CPTheory, b: &Branch) -> Result<CPTheory> {
    check_branch(theory, b)?;
    assemble(normal_laws(theory.laws(), b, None)?)
}

fn normal_laws(laws: &[CPLaw], b: &Branch, skip: Option<LawId>) -> Result<Vec<CPLaw>> {
    laws.iter()
        .enumerate()
        .map(|(id, law)| {
            if Some(id) == skip {
                Ok(law.clone())
            } else {
                normal_law(law, id, b.outcome_of(id), b.leaf())
            }
        })
        .collect()
}

/// Steps of `b` whose chosen disjunct a strict norm rules out.
pub fn excluded_by_norms(theory: &CPTheory, b: &Branch) -> Vec<LawId> {
    b.steps()
        .iter()
        .filter(|step| match (&step.outcome, theory.law(step.law)) {
            (Outcome::Atom(a), Some(law)) => law.head.iter().any(|d| &d.atom == a && d.normative().is_zero()),
            (Outcome::Empty, Some(law)) => law.has_norms() && law.norm_mass().is_one(),
            _ => false,
        })
        .map(|s| s.law)
        .collect()
}

/// Int: the non-deterministic laws applied in `b` none of whose alternative
/// outcomes leads to a leaf `d` with `{c, e} ⊆ Leaf_d ⊆ Leaf_b`. Nodes on `b`
/// follow `b`'s order; off it, the canonical order.
pub fn intrinsic_laws(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<BTreeSet<LawId>> {
    intrinsic_laws_with(theory, b, c, e, &OrderPolicy::Canonical)
}

/// [`intrinsic_laws`] with a chosen order for the off-branch subtrees.
pub fn intrinsic_laws_with(
    theory: &CPTheory,
    b: &Branch,
    c: &Atom,
    e: &Atom,
    off_branch: &OrderPolicy,
) -> Result<BTreeSet<LawId>> {
    check_branch(theory, b)?;
    require_in_leaf(b, &[c, e])?;
    let comp = Compiled::new(theory);
    let leaf_bits = comp.node_from(b.leaf(), &[]).state;
    let (ci, ei) = (comp.atom_index(c), comp.atom_index(e));
    let mut node = comp.root();
    let mut intrinsic = BTreeSet::new();
    for step in b.steps() {
        let chosen = comp.outcome_index(step.law, &step.outcome).expect("checked branch");
        if comp.laws[step.law].outcomes.len() > 1 {
            let found = Cell::new(false);
            for alt in 0..comp.laws[step.law].outcomes.len() {
                if alt == chosen || found.get() {
                    continue;
                }
                let sibling = comp.apply(&node, step.law, alt);
                engine::walk(
                    &comp,
                    &sibling,
                    &mut Vec::new(),
                    &prob::one(),
                    off_branch,
                    &|n| found.get() || n.state.iter().zip(&leaf_bits).any(|(s, l)| *s && !*l),
                    &mut |leaf, _, _| {
                        let has = |i: Option<usize>| i.is_some_and(|i| leaf.state[i]);
                        if has(ci) && has(ei) {
                            found.set(true);
                        }
                    },
                );
            }
            if !found.get() {
                intrinsic.insert(step.law);
            }
        }
        node = comp.apply(&node, step.law, chosen);
    }
    Ok(intrinsic)
}

/// Recomputes Int with reversed off-branch order. Returns both sets when
/// they disagree.
pub fn intrinsic_order_diagnostic(
    theory: &CPTheory,
    b: &Branch,
    c: &Atom,
    e: &Atom,
) -> Result<Option<(BTreeSet<LawId>, BTreeSet<LawId>)>> {
    let canonical = intrinsic_laws_with(theory, b, c, e, &OrderPolicy::Canonical)?;
    let reversed = intrinsic_laws_with(theory, b, c, e, &OrderPolicy::Reverse)?;
    Ok((canonical != reversed).then_some((canonical, reversed)))
}

pub(crate) fn t_star_laws(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<Vec<CPLaw>> {
    let int = intrinsic_laws(theory, b, c, e)?;
    Ok(theory
        .laws()
        .iter()
        .enumerate()
        .map(|(id, law)| match (int.contains(&id), b.outcome_of(id)) {
            (true, Some(o)) => determinize_law(law, o),
            _ => law.clone(),
        })
        .collect())
}

/// T* = T \ Int ∪ Int^b (no law is irrelevant).
pub fn t_star(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CPTheory> {
    assemble(t_star_laws(theory, b, c, e)?)
}

/// r(C): the unique law with `c` in its head.
pub fn law_for(theory: &CPTheory, c: &Atom) -> Result<LawId> {
    let laws = theory.laws_with_head(c);
    match laws.as_slice() {
        [] => Err(Error::NoLawForC { atom: c.clone() }),
        [one] => Ok(*one),
        _ => Err(Error::MultipleLawsForC { atom: c.clone(), laws }),
    }
}

fn t_star_star_laws(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<(Vec<CPLaw>, LawId)> {
    let rc = law_for(theory, c)?;
    let mut laws = t_star_laws(theory, b, c, e)?;
    laws[rc] = normal_law(&theory.laws()[rc], rc, b.outcome_of(rc), b.leaf())?;
    Ok((laws, rc))
}

/// T**: T* with r(C) replaced by its normal refinement.
pub fn t_star_star(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CPTheory> {
    assemble(t_star_star_laws(theory, b, c, e)?.0)
}

/// T^{Normal(b)*} = (T**)^{Normal(b)}; r(C) is already its own normal
/// refinement and is left as is.
pub fn normal_refine_star(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CPTheory> {
    let (laws, rc) = t_star_star_laws(theory, b, c, e)?;
    assemble(normal_laws(&laws, b, Some(rc))?)
}

/// (T*)^{Normal(b)}.
pub fn t_star_normal(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CPTheory> {
    assemble(normal_laws(&t_star_laws(theory, b, c, e)?, b, None)?)
}

/// (T*)^{NN}.
pub fn t_star_nn(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Result<CPTheory> {
    assemble(nn_laws(&t_star_laws(theory, b, c, e)?)?)
}
