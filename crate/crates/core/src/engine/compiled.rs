//! Index-based form of a theory used by the tree walkers.

use std::collections::HashMap;

use crate::prob::Prob;
use crate::theory::{Atom, CPTheory, Choice, LawId, Outcome, State};

pub(crate) struct CLaw {
    /// Positive-mass outcomes, with the atom index of each non-empty one.
    pub outcomes: Vec<(Outcome, Option<usize>, Prob)>,
    pub body: Vec<Vec<(usize, bool)>>,
    pub head: Vec<usize>,
}

pub(crate) struct Compiled {
    pub atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
    pub laws: Vec<CLaw>,
}

/// A tree node: which atoms are true and which laws were applied.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Node {
    pub state: Vec<bool>,
    pub applied: Vec<bool>,
}

impl Compiled {
    pub fn new(theory: &CPTheory) -> Self {
        let atoms: Vec<Atom> = theory.atoms().iter().cloned().collect();
        let index: HashMap<Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let laws = theory
            .laws()
            .iter()
            .map(|law| CLaw {
                outcomes: law
                    .outcomes()
                    .into_iter()
                    .map(|(o, p)| {
                        let idx = o.atom().map(|a| index[a]);
                        (o, idx, p)
                    })
                    .collect(),
                body: law
                    .body
                    .clauses
                    .iter()
                    .map(|c| c.iter().map(|l| (index[&l.atom], l.positive)).collect())
                    .collect(),
                head: law.head.iter().map(|d| index[&d.atom]).collect(),
            })
            .collect();
        Compiled { atoms, index, laws }
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn root(&self) -> Node {
        Node {
            state: vec![false; self.atoms.len()],
            applied: vec![false; self.laws.len()],
        }
    }

    /// Node for a public `(state, applied)` pair. Unknown atoms and law ids
    /// are ignored.
    pub fn node_from(&self, state: &State, applied: &[LawId]) -> Node {
        let mut node = self.root();
        for a in state.iter() {
            if let Some(i) = self.atom_index(a) {
                node.state[i] = true;
            }
        }
        for &l in applied {
            if l < node.applied.len() {
                node.applied[l] = true;
            }
        }
        node
    }

    pub fn state_of(&self, bits: &[bool]) -> State {
        bits.iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| self.atoms[i].clone())
            .collect()
    }

    /// Least fixpoint of atoms that may still become true: the true atoms,
    /// closed under the heads of unapplied laws whose body is possibly
    /// satisfiable. A negative literal is possibly satisfied while its atom is
    /// currently false.
    pub fn possible(&self, node: &Node) -> Vec<bool> {
        let mut possible = node.state.clone();
        let mut fired = node.applied.clone();
        loop {
            let mut changed = false;
            for (id, law) in self.laws.iter().enumerate() {
                if fired[id] {
                    continue;
                }
                let ok = law.body.iter().all(|clause| {
                    clause
                        .iter()
                        .any(|&(a, pos)| if pos { possible[a] } else { !node.state[a] })
                });
                if ok {
                    fired[id] = true;
                    for &h in &law.head {
                        if !possible[h] {
                            possible[h] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return possible;
            }
        }
    }

    /// Every clause has a true positive literal or a negative literal whose
    /// atom can no longer become true.
    pub fn definitely_satisfied(&self, law: LawId, node: &Node, possible: &[bool]) -> bool {
        self.laws[law].body.iter().all(|clause| {
            clause
                .iter()
                .any(|&(a, pos)| if pos { node.state[a] } else { !possible[a] })
        })
    }

    pub fn possibly_satisfied(&self, law: LawId, node: &Node, possible: &[bool]) -> bool {
        self.laws[law].body.iter().all(|clause| {
            clause
                .iter()
                .any(|&(a, pos)| if pos { possible[a] } else { !node.state[a] })
        })
    }

    pub fn applicable(&self, node: &Node) -> Vec<LawId> {
        let possible = self.possible(node);
        self.applicable_given(node, &possible)
    }

    pub fn applicable_given(&self, node: &Node, possible: &[bool]) -> Vec<LawId> {
        (0..self.laws.len())
            .filter(|&l| !node.applied[l] && self.definitely_satisfied(l, node, possible))
            .collect()
    }

    /// Laws that are neither applicable nor impossible at a node with no
    /// applicable law. Empty for stratified theories.
    pub fn undecided(&self, node: &Node) -> Vec<LawId> {
        let possible = self.possible(node);
        (0..self.laws.len())
            .filter(|&l| {
                !node.applied[l]
                    && self.possibly_satisfied(l, node, &possible)
                    && !self.definitely_satisfied(l, node, &possible)
            })
            .collect()
    }

    pub fn apply(&self, node: &Node, law: LawId, outcome: usize) -> Node {
        let mut next = node.clone();
        next.applied[law] = true;
        if let Some(a) = self.laws[law].outcomes[outcome].1 {
            next.state[a] = true;
        }
        next
    }

    pub fn choice(&self, law: LawId, outcome: usize) -> Choice {
        Choice::new(law, self.laws[law].outcomes[outcome].0.clone())
    }

    /// Index of `outcome` among the positive-mass outcomes of `law`.
    pub fn outcome_index(&self, law: LawId, outcome: &Outcome) -> Option<usize> {
        self.laws[law].outcomes.iter().position(|(o, _, _)| o == outcome)
    }
}
