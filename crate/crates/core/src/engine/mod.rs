//! Probability-tree semantics: well-founded applicability, tree and
//! distribution construction, queries and sampling.

mod compiled;
mod policy;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::prob::{self, Prob};
use crate::theory::{Atom, Branch, CPTheory, Choice, LawId, State};

pub(crate) use compiled::{Compiled, Node};
pub use policy::OrderPolicy;

/// Atoms that can still become true from `(state, applied)`. An atom outside
/// the result is impossible.
pub fn possible_atoms(theory: &CPTheory, state: &State, applied: &BTreeSet<LawId>) -> BTreeSet<Atom> {
    let c = Compiled::new(theory);
    let node = c.node_from(state, &applied.iter().copied().collect::<Vec<_>>());
    c.state_of(&c.possible(&node)).true_atoms().clone()
}

/// Whether `law` may fire at `(state, applied)`: unapplied, with a body that
/// is satisfied now and will stay satisfied.
pub fn applicable(theory: &CPTheory, law: LawId, state: &State, applied: &BTreeSet<LawId>) -> bool {
    if law >= theory.len() || applied.contains(&law) {
        return false;
    }
    let c = Compiled::new(theory);
    let node = c.node_from(state, &applied.iter().copied().collect::<Vec<_>>());
    let possible = c.possible(&node);
    c.definitely_satisfied(law, &node, &possible)
}

/// Depth-first walk below `node`. `prune` cuts a subtree before it is
/// expanded; `visit` sees every remaining leaf with its path and probability.
pub(crate) fn walk(
    c: &Compiled,
    node: &Node,
    path: &mut Vec<Choice>,
    weight: &Prob,
    policy: &OrderPolicy,
    prune: &dyn Fn(&Node) -> bool,
    visit: &mut dyn FnMut(&Node, &[Choice], &Prob),
) {
    if prune(node) {
        return;
    }
    let applicable = c.applicable(node);
    if applicable.is_empty() {
        visit(node, path, weight);
        return;
    }
    let law = policy.select(&applicable, path, &node.state, &node.applied);
    for (i, (_, _, p)) in c.laws[law].outcomes.iter().enumerate() {
        let child = c.apply(node, law, i);
        path.push(c.choice(law, i));
        walk(c, &child, path, &(weight * p), policy, prune, visit);
        path.pop();
    }
}

/// A node of a probability tree.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub state: State,
    pub applied: BTreeSet<LawId>,
    /// The law expanded at this node; `None` at leaves.
    pub applied_law: Option<LawId>,
    pub children: Vec<(Choice, Prob, TreeNode)>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|(_, _, n)| n.node_count()).sum::<usize>()
    }

    /// Every root-to-leaf path with its leaf state and probability.
    pub fn leaves(&self) -> Vec<(Vec<Choice>, State, Prob)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_leaves(&mut path, &prob::one(), &mut out);
        out
    }

    fn collect_leaves(&self, path: &mut Vec<Choice>, w: &Prob, out: &mut Vec<(Vec<Choice>, State, Prob)>) {
        if self.is_leaf() {
            out.push((path.clone(), self.state.clone(), w.clone()));
            return;
        }
        for (choice, p, child) in &self.children {
            path.push(choice.clone());
            child.collect_leaves(path, &(w * p), out);
            path.pop();
        }
    }
}

pub fn build_tree(theory: &CPTheory, policy: &OrderPolicy) -> TreeNode {
    let c = Compiled::new(theory);
    let mut path = Vec::new();
    expand(&c, &c.root(), &mut path, policy)
}

fn expand(c: &Compiled, node: &Node, path: &mut Vec<Choice>, policy: &OrderPolicy) -> TreeNode {
    let applicable = c.applicable(node);
    let state = c.state_of(&node.state);
    let applied = node
        .applied
        .iter()
        .enumerate()
        .filter(|(_, a)| **a)
        .map(|(i, _)| i)
        .collect();
    if applicable.is_empty() {
        return TreeNode {
            state,
            applied,
            applied_law: None,
            children: Vec::new(),
        };
    }
    let law = policy.select(&applicable, path, &node.state, &node.applied);
    let children = c.laws[law]
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, (_, _, p))| {
            let choice = c.choice(law, i);
            path.push(choice.clone());
            let child = expand(c, &c.apply(node, law, i), path, policy);
            path.pop();
            (choice, p.clone(), child)
        })
        .collect();
    TreeNode {
        state,
        applied,
        applied_law: Some(law),
        children,
    }
}

/// Exact distribution over leaf states; branches reaching the same leaf are
/// merged.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Distribution {
    entries: BTreeMap<State, Prob>,
}

impl Distribution {
    pub fn entries(&self) -> &BTreeMap<State, Prob> {
        &self.entries
    }

    pub fn get(&self, leaf: &State) -> Prob {
        self.entries.get(leaf).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn contains(&self, leaf: &State) -> bool {
        self.entries.contains_key(leaf)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &State> {
        self.entries.keys()
    }

    pub fn total(&self) -> Prob {
        self.entries.values().sum()
    }

    pub fn prob(&self, phi: &Formula) -> Prob {
        self.entries.iter().filter(|(s, _)| phi.eval(s)).map(|(_, p)| p).sum()
    }

    pub fn cond_prob(&self, phi: &Formula, given: &Formula) -> Result<Prob> {
        let denom = self.prob(given);
        if denom.is_zero() {
            return Err(Error::ConditionImpossible);
        }
        let joint = Formula::and([phi.clone(), given.clone()]);
        Ok(self.prob(&joint) / denom)
    }

    fn add(&mut self, leaf: State, p: Prob) {
        *self.entries.entry(leaf).or_insert_with(Prob::zero) += p;
    }
}

pub fn exact_distribution(theory: &CPTheory) -> Distribution {
    distribution_with(theory, &OrderPolicy::Canonical)
}

pub fn distribution_with(theory: &CPTheory, policy: &OrderPolicy) -> Distribution {
    let c = Compiled::new(theory);
    let mut dist = Distribution::default();
    walk(
        &c,
        &c.root(),
        &mut Vec::new(),
        &prob::one(),
        policy,
        &|_| false,
        &mut |node, _, p| dist.add(c.state_of(&node.state), p.clone()),
    );
    dist
}

/// Every branch of the tree under `policy`, with its probability.
pub fn branches(theory: &CPTheory, policy: &OrderPolicy) -> Vec<(Branch, Prob)> {
    branches_within(theory, policy, None)
}

/// Branches whose leaf lies inside `bound` (all branches when `None`).
pub(crate) fn branches_within(theory: &CPTheory, policy: &OrderPolicy, bound: Option<&State>) -> Vec<(Branch, Prob)> {
    let c = Compiled::new(theory);
    let bound_bits = bound.map(|b| c.node_from(b, &[]).state);
    let prune = |n: &Node| match &bound_bits {
        Some(bits) => n.state.iter().zip(bits).any(|(s, b)| *s && !*b),
        None => false,
    };
    let mut out = Vec::new();
    walk(
        &c,
        &c.root(),
        &mut Vec::new(),
        &prob::one(),
        policy,
        &prune,
        &mut |node, path, p| {
            out.push((Branch::from_parts(path.to_vec(), c.state_of(&node.state)), p.clone()));
        },
    );
    out
}

pub fn prob(theory: &CPTheory, phi: &Formula) -> Prob {
    exact_distribution(theory).prob(phi)
}

pub fn cond_prob(theory: &CPTheory, phi: &Formula, given: &Formula) -> Result<Prob> {
    exact_distribution(theory).cond_prob(phi, given)
}

/// A leaf where some law stays neither applicable nor impossible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonStratifiedWarning {
    pub leaf: State,
    pub laws: Vec<LawId>,
}

impl std::fmt::Display for NonStratifiedWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "NonStratifiedWarning: at leaf {} law(s) {:?} are neither applicable nor impossible",
            self.leaf, self.laws
        )
    }
}

pub fn nonstratified_warnings(theory: &CPTheory) -> Vec<NonStratifiedWarning> {
    let c = Compiled::new(theory);
    let mut out = Vec::new();
    walk(
        &c,
        &c.root(),
        &mut Vec::new(),
        &prob::one(),
        &OrderPolicy::Canonical,
        &|_| false,
        &mut |node, _, _| {
            let laws = c.undecided(node);
            if !laws.is_empty() {
                out.push(NonStratifiedWarning {
                    leaf: c.state_of(&node.state),
                    laws,
                });
            }
        },
    );
    out
}

/// Draws stories under the canonical order. The same seed always yields the
/// same sequence.
pub struct StorySampler {
    compiled: Compiled,
    weights: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl StorySampler {
    pub fn new(theory: &CPTheory, seed: u64) -> Self {
        let compiled = Compiled::new(theory);
        let weights = compiled
            .laws
            .iter()
            .map(|l| l.outcomes.iter().map(|(_, _, p)| prob::to_f64(p)).collect())
            .collect();
        StorySampler {
            compiled,
            weights,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn sample(&mut self) -> Branch {
        let c = &self.compiled;
        let mut node = c.root();
        let mut steps = Vec::new();
        loop {
            let applicable = c.applicable(&node);
            let Some(&law) = applicable.first() else {
                break;
            };
            let weights = &self.weights[law];
            let u: f64 = self.rng.random();
            let mut acc = 0.0;
            let mut pick = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            steps.push(c.choice(law, pick));
            node = c.apply(&node, law, pick);
        }
        Branch::from_parts(steps, c.state_of(&node.state))
    }
}

pub fn sample_story(theory: &CPTheory, seed: u64) -> Branch {
    StorySampler::new(theory, seed).sample()
}

/// Empirical leaf frequencies over `n` seeded samples.
pub fn sample_leaf_frequencies(theory: &CPTheory, seed: u64, n: usize) -> BTreeMap<State, usize> {
    let mut sampler = StorySampler::new(theory, seed);
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        *counts.entry(sampler.sample().leaf().clone()).or_insert(0) += 1;
    }
    counts
}

/// Total-variation distance between an exact distribution and empirical
/// counts.
pub fn total_variation(exact: &Distribution, counts: &BTreeMap<State, usize>) -> f64 {
    let n: usize = counts.values().sum();
    let mut keys: BTreeSet<&State> = exact.support().collect();
    keys.extend(counts.keys());
    keys.into_iter()
        .map(|s| {
            let p = prob::to_f64(&exact.get(s));
            let q = counts.get(s).copied().unwrap_or(0) as f64 / n.max(1) as f64;
            (p - q).abs()
        })
        .sum::<f64>()
        / 2.0
}
