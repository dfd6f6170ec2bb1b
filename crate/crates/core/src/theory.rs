//! CP-theories: laws with probabilistic heads and CNF bodies, plus the
//! states, choices and branches their probability trees are made of.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, MassKind, Result};
use crate::prob::{one, Prob};

/// A ground atom, kept as opaque text (`prof`, `throw(1,1)`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom(String);

impl Atom {
    /// Panics on an empty name.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "atom names are nonempty");
        Atom(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::new(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<Atom>) -> Self {
        Literal {
            atom: atom.into(),
            positive: true,
        }
    }

    pub fn neg(atom: impl Into<Atom>) -> Self {
        Literal {
            atom: atom.into(),
            positive: false,
        }
    }
}

/// A conjunction of clauses, each clause a disjunction of literals.
/// No clauses means the body is trivially true.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Body {
    pub clauses: Vec<Vec<Literal>>,
}

impl Body {
    pub fn truth() -> Self {
        Body::default()
    }

    /// A body of unit clauses, one per literal.
    pub fn conj(literals: impl IntoIterator<Item = Literal>) -> Self {
        Body {
            clauses: literals.into_iter().map(|l| vec![l]).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.clauses.iter().flatten()
    }

    pub fn holds_in(&self, state: &State) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| state.holds(&l.atom) == l.positive))
    }
}

/// One head alternative: an atom with its statistical probability and an
/// optional normative probability.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Disjunct {
    pub atom: Atom,
    pub prob: Prob,
    pub norm: Option<Prob>,
}

impl Disjunct {
    pub fn new(atom: impl Into<Atom>, prob: Prob) -> Self {
        Disjunct {
            atom: atom.into(),
            prob,
            norm: None,
        }
    }

    pub fn with_norm(mut self, norm: Prob) -> Self {
        self.norm = Some(norm);
        self
    }

    /// The probability the norms prescribe: the norm when present, else the
    /// statistical probability.
    pub fn normative(&self) -> &Prob {
        self.norm.as_ref().unwrap_or(&self.prob)
    }
}

pub type LawId = usize;

/// What a law application chose: one of its head atoms, or nothing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Outcome {
    Atom(Atom),
    Empty,
}

impl Outcome {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Outcome::Atom(a) => Some(a),
            Outcome::Empty => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Atom(a) => write!(f, "{}", a),
            Outcome::Empty => f.write_str("_"),
        }
    }
}

/// A causal law `head <- body`. Head mass below 1 leaves an implicit empty
/// disjunct carrying the remainder.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CPLaw {
    pub head: Vec<Disjunct>,
    pub body: Body,
}

impl CPLaw {
    pub fn new(head: Vec<Disjunct>, body: Body) -> Self {
        CPLaw { head, body }
    }

    /// `atom <- body` with probability 1.
    pub fn deterministic(atom: impl Into<Atom>, body: Body) -> Self {
        CPLaw::new(vec![Disjunct::new(atom, one())], body)
    }

    pub fn stat_mass(&self) -> Prob {
        self.head.iter().map(|d| &d.prob).sum()
    }

    pub fn norm_mass(&self) -> Prob {
        self.head.iter().map(|d| d.normative()).sum()
    }

    /// Statistical mass of the implicit empty disjunct.
    pub fn empty_mass(&self) -> Prob {
        one() - self.stat_mass()
    }

    pub fn has_norms(&self) -> bool {
        self.head.iter().any(|d| d.norm.is_some())
    }

    pub fn is_vacuous(&self) -> bool {
        self.body.is_empty()
    }

    pub fn head_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().map(|d| &d.atom)
    }

    pub fn in_head(&self, atom: &Atom) -> bool {
        self.head.iter().any(|d| &d.atom == atom)
    }

    /// Every outcome with positive statistical mass, head order first and the
    /// empty disjunct last.
    pub fn outcomes(&self) -> Vec<(Outcome, Prob)> {
        let mut out: Vec<(Outcome, Prob)> = self
            .head
            .iter()
            .filter(|d| d.prob > Prob::zero())
            .map(|d| (Outcome::Atom(d.atom.clone()), d.prob.clone()))
            .collect();
        let empty = self.empty_mass();
        if empty > Prob::zero() {
            out.push((Outcome::Empty, empty));
        }
        out
    }

    /// Statistical mass of an outcome; zero when absent.
    pub fn mass_of(&self, outcome: &Outcome) -> Prob {
        match outcome {
            Outcome::Atom(a) => self
                .head
                .iter()
                .find(|d| &d.atom == a)
                .map(|d| d.prob.clone())
                .unwrap_or_else(Prob::zero),
            Outcome::Empty => self.empty_mass(),
        }
    }

    /// A law with at most one possible outcome.
    pub fn is_deterministic(&self) -> bool {
        self.outcomes().len() <= 1
    }

    pub(crate) fn validate(&self, id: LawId) -> Result<()> {
        if self.head.is_empty() {
            return Err(Error::EmptyHead { law: id });
        }
        for (i, d) in self.head.iter().enumerate() {
            if self.head[..i].iter().any(|e| e.atom == d.atom) {
                return Err(Error::DuplicateHeadAtom {
                    law: id,
                    atom: d.atom.clone(),
                    span: None,
                });
            }
            if d.prob <= Prob::zero() || d.prob > Prob::one() {
                return Err(Error::ProbabilityRange {
                    law: id,
                    atom: d.atom.clone(),
                    value: crate::prob::render_exact(&d.prob),
                    span: None,
                });
            }
            if let Some(n) = &d.norm {
                if *n < Prob::zero() || *n > Prob::one() {
                    return Err(Error::ProbabilityRange {
                        law: id,
                        atom: d.atom.clone(),
                        value: crate::prob::render_exact(n),
                        span: None,
                    });
                }
            }
        }
        if self.stat_mass() > Prob::one() {
            return Err(Error::ProbabilitySum {
                law: id,
                kind: MassKind::Statistical,
                span: None,
            });
        }
        if self.has_norms() && self.norm_mass() > Prob::one() {
            return Err(Error::ProbabilitySum {
                law: id,
                kind: MassKind::Normative,
                span: None,
            });
        }
        Ok(())
    }
}

/// An ordered, validated list of laws. A law's id is its position.
#[derive(Clone, Debug)]
pub struct CPTheory {
    laws: Vec<CPLaw>,
    atoms: BTreeSet<Atom>,
}

impl PartialEq for CPTheory {
    fn eq(&self, other: &Self) -> bool {
        self.laws == other.laws
    }
}

impl Eq for CPTheory {}

impl CPTheory {
    pub fn new(laws: Vec<CPLaw>) -> Result<Self> {
        for (id, law) in laws.iter().enumerate() {
            law.validate(id)?;
        }
        let atoms = laws
            .iter()
            .flat_map(|l| l.head_atoms().chain(l.body.literals().map(|lit| &lit.atom)))
            .cloned()
            .collect();
        Ok(CPTheory { laws, atoms })
    }

    pub fn empty() -> Self {
        CPTheory {
            laws: Vec::new(),
            atoms: BTreeSet::new(),
        }
    }

    pub fn laws(&self) -> &[CPLaw] {
        &self.laws
    }

    pub fn law(&self, id: LawId) -> Option<&CPLaw> {
        self.laws.get(id)
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    /// Every atom occurring in a head or a body, sorted by name.
    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn into_laws(self) -> Vec<CPLaw> {
        self.laws
    }

    /// Ids of the laws with `atom` in their head.
    pub fn laws_with_head(&self, atom: &Atom) -> Vec<LawId> {
        self.laws
            .iter()
            .enumerate()
            .filter(|(_, l)| l.in_head(atom))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_norms(&self) -> bool {
        self.laws.iter().any(CPLaw::has_norms)
    }

    pub fn has_negation(&self) -> bool {
        self.laws.iter().any(|l| l.body.literals().any(|lit| !lit.positive))
    }
}

/// The set of atoms that are true; all others are false.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct State(BTreeSet<Atom>);

impl State {
    pub fn new(true_atoms: BTreeSet<Atom>) -> Self {
        State(true_atoms)
    }

    pub fn holds(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn true_atoms(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl<A: Into<Atom>> FromIterator<A> for State {
    fn from_iter<I: IntoIterator<Item = A>>(iter: I) -> Self {
        State(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", a)?;
        }
        f.write_str("}")
    }
}

/// One law application in a story.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Choice {
    pub law: LawId,
    pub outcome: Outcome,
}

impl Choice {
    pub fn new(law: LawId, outcome: Outcome) -> Self {
        Choice { law, outcome }
    }

    pub fn atom(law: LawId, atom: impl Into<Atom>) -> Self {
        Choice::new(law, Outcome::Atom(atom.into()))
    }

    pub fn empty(law: LawId) -> Self {
        Choice::new(law, Outcome::Empty)
    }
}

/// A complete story: the ordered law applications and the leaf they reach.
/// Only [`crate::story::replay`] builds these, so the steps are always legal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Branch {
    steps: Vec<Choice>,
    leaf: State,
}

impl Branch {
    pub(crate) fn from_parts(steps: Vec<Choice>, leaf: State) -> Self {
        Branch { steps, leaf }
    }

    pub fn steps(&self) -> &[Choice] {
        &self.steps
    }

    pub fn leaf(&self) -> &State {
        &self.leaf
    }

    /// The outcome this story chose for `law`, if the law was applied.
    pub fn outcome_of(&self, law: LawId) -> Option<&Outcome> {
        self.steps.iter().find(|c| c.law == law).map(|c| &c.outcome)
    }

    /// Product of the statistical masses of the chosen outcomes.
    pub fn probability(&self, theory: &CPTheory) -> Prob {
        self.steps
            .iter()
            .map(|c| {
                theory
                    .law(c.law)
                    .map(|l| l.mass_of(&c.outcome))
                    .unwrap_or_else(Prob::zero)
            })
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ratio;

    #[test]
    fn implicit_empty_disjunct() {
        let law = CPLaw::new(vec![Disjunct::new("prof", ratio(7, 10))], Body::truth());
        assert_eq!(law.empty_mass(), ratio(3, 10));
        assert_eq!(
            law.outcomes(),
            vec![
                (Outcome::Atom("prof".into()), ratio(7, 10)),
                (Outcome::Empty, ratio(3, 10))
            ]
        );
        assert!(!law.is_deterministic());
        assert!(CPLaw::deterministic("a", Body::truth()).is_deterministic());
    }

    #[test]
    fn validation_rejects_overfull_heads() {
        let over = CPLaw::new(
            vec![Disjunct::new("a", ratio(6, 10)), Disjunct::new("b", ratio(7, 10))],
            Body::truth(),
        );
        assert!(matches!(
            CPTheory::new(vec![over]),
            Err(Error::ProbabilitySum {
                kind: MassKind::Statistical,
                ..
            })
        ));
        let norm_over = CPLaw::new(
            vec![
                Disjunct::new("a", ratio(1, 10)).with_norm(ratio(9, 10)),
                Disjunct::new("b", ratio(2, 10)),
            ],
            Body::truth(),
        );
        assert!(matches!(
            CPTheory::new(vec![norm_over]),
            Err(Error::ProbabilitySum {
                kind: MassKind::Normative,
                ..
            })
        ));
        let dup = CPLaw::new(
            vec![Disjunct::new("a", ratio(1, 10)), Disjunct::new("a", ratio(2, 10))],
            Body::truth(),
        );
        assert!(matches!(CPTheory::new(vec![dup]), Err(Error::DuplicateHeadAtom { .. })));
    }

    #[test]
    fn atoms_collects_heads_and_bodies() {
        let t = CPTheory::new(vec![CPLaw::deterministic(
            "e",
            Body::conj([Literal::pos("c"), Literal::neg("a")]),
        )])
        .unwrap();
        let names: Vec<_> = t.atoms().iter().map(Atom::as_str).collect();
        assert_eq!(names, ["a", "c", "e"]);
    }
}
