//! Stories: replaying explicit law applications, and recovering a story
//! from its leaf.

use crate::engine::{self, Compiled, OrderPolicy};
use crate::error::{Error, Result};
use crate::theory::{Atom, Branch, CPTheory, Choice, Outcome, State};

/// Replays `steps` from the all-false root. Choosing an atom that is already
/// true changes nothing but is still recorded.
pub fn replay(theory: &CPTheory, steps: &[Choice]) -> Result<Branch> {
    let c = Compiled::new(theory);
    let mut node = c.root();
    for (index, step) in steps.iter().enumerate() {
        let illegal = |reason: String| Error::IllegalStep {
            index,
            law: step.law,
            reason,
        };
        let Some(law) = theory.law(step.law) else {
            return Err(illegal(format!("theory has only {} laws", theory.len())));
        };
        if node.applied[step.law] {
            return Err(illegal("law applied twice".into()));
        }
        let possible = c.possible(&node);
        if !c.definitely_satisfied(step.law, &node, &possible) {
            let reason = if c.possibly_satisfied(step.law, &node, &possible) {
                "body is not yet permanently satisfied"
            } else {
                "body is not satisfied"
            };
            return Err(illegal(reason.into()));
        }
        let Some(outcome) = c.outcome_index(step.law, &step.outcome) else {
            let reason = match &step.outcome {
                Outcome::Atom(a) if !law.in_head(a) => format!("`{}` is not in the head", a),
                Outcome::Atom(a) => format!("`{}` has zero probability", a),
                Outcome::Empty => "the head leaves no mass for the empty disjunct".into(),
            };
            return Err(illegal(reason));
        };
        node = c.apply(&node, step.law, outcome);
    }
    let pending = c.applicable(&node);
    if !pending.is_empty() {
        return Err(Error::IncompleteStory { applicable: pending });
    }
    Ok(Branch::from_parts(steps.to_vec(), c.state_of(&node.state)))
}

/// The story (in canonical order) whose leaf is exactly `leaf_atoms`.
pub fn branch_from_leaf(theory: &CPTheory, leaf_atoms: &State) -> Result<Branch> {
    let mut found: Vec<Branch> = engine::branches_within(theory, &OrderPolicy::Canonical, Some(leaf_atoms))
        .into_iter()
        .map(|(b, _)| b)
        .filter(|b| b.leaf() == leaf_atoms)
        .collect();
    let leaf: Vec<Atom> = leaf_atoms.iter().cloned().collect();
    match found.len() {
        0 => Err(Error::NoSuchBranch { leaf }),
        1 => Ok(found.remove(0)),
        count => Err(Error::AmbiguousBranch { leaf, count }),
    }
}
