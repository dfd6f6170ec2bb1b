//! Extended structural models with a typicality-based normality preorder,
//! their translation to CP-theories, and executable checks relating the two
//! sides.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::causation;
use crate::engine::{self, OrderPolicy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::prob::{self, Prob};
use crate::story;
use crate::theory::{Atom, Body, Branch, CPLaw, CPTheory, Choice, Disjunct, State};
use crate::transform;

/// A variable set directly by the context, with a statistical and an
/// optional normative probability of being true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnateVar {
    pub name: Atom,
    pub prob: Prob,
    pub norm: Option<Prob>,
}

/// A variable given by an equation over other variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedVar {
    pub name: Atom,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralModel {
    innate: Vec<InnateVar>,
    /// In dependency order.
    derived: Vec<DerivedVar>,
}

/// A total assignment to every variable of a model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World(BTreeMap<Atom, bool>);

/// A total assignment to the innate variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context(BTreeMap<Atom, bool>);

/// A parsed model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmFile {
    pub model: StructuralModel,
    pub contexts: Vec<Context>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalityVerdict {
    More,
    Less,
    Equal,
    Incomparable,
}

impl NormalityVerdict {
    /// At least as normal.
    pub fn is_ge(self) -> bool {
        matches!(self, NormalityVerdict::More | NormalityVerdict::Equal)
    }
}

/// How innate variables get their typical value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Typicality {
    /// A norm, when present, decides; otherwise the statistical probability.
    #[default]
    NormOverrides,
    StatisticalOnly,
}

/// Which counterfactual worlds may serve as witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    /// Only worlds at least as normal as the actual one.
    Strict,
    /// Every world with ¬C and ¬E.
    Relaxed,
}

impl StructuralModel {
    /// Checks names and orders the derived variables by dependency.
    pub fn new(innate: Vec<InnateVar>, derived: Vec<DerivedVar>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for name in innate.iter().map(|v| &v.name).chain(derived.iter().map(|v| &v.name)) {
            if !names.insert(name.clone()) {
                return Err(Error::DuplicateVariable {
                    variable: name.clone(),
                    span: None,
                });
            }
        }
        for (i, v) in innate.iter().enumerate() {
            for p in std::iter::once(&v.prob).chain(v.norm.as_ref()) {
                if *p <= Prob::zero() || *p >= prob::one() {
                    return Err(Error::ProbabilityRange {
                        law: i,
                        atom: v.name.clone(),
                        value: prob::render_exact(p),
                        span: None,
                    });
                }
            }
        }
        for v in &derived {
            if let Some(unknown) = v.formula.atoms().into_iter().find(|a| !names.contains(a)) {
                return Err(Error::UnknownVariable {
                    variable: unknown,
                    span: None,
                });
            }
        }
        let derived = topo_sort(derived)?;
        Ok(StructuralModel { innate, derived })
    }

    pub fn innate(&self) -> &[InnateVar] {
        &self.innate
    }

    pub fn derived(&self) -> &[DerivedVar] {
        &self.derived
    }

    pub fn is_innate(&self, name: &Atom) -> bool {
        self.innate.iter().any(|v| &v.name == name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &Atom> {
        self.innate
            .iter()
            .map(|v| &v.name)
            .chain(self.derived.iter().map(|v| &v.name))
    }

    fn derived_var(&self, name: &Atom) -> Option<&DerivedVar> {
        self.derived.iter().find(|v| &v.name == name)
    }

    /// Every context, in binary counting order over the innate variables.
    pub fn contexts(&self) -> Vec<Context> {
        let n = self.innate.len();
        (0..1u64 << n)
            .map(|bits| {
                Context(
                    self.innate
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v.name.clone(), bits >> (n - 1 - i) & 1 == 1))
                        .collect(),
                )
            })
            .collect()
    }

    /// The worlds satisfying every equation.
    pub fn lawful_worlds(&self) -> Vec<World> {
        self.contexts().iter().map(|u| world_for_context(self, u)).collect()
    }
}

fn topo_sort(derived: Vec<DerivedVar>) -> Result<Vec<DerivedVar>> {
    let names: BTreeSet<Atom> = derived.iter().map(|v| v.name.clone()).collect();
    let mut done: BTreeSet<Atom> = BTreeSet::new();
    let mut pending = derived;
    let mut out = Vec::new();
    while !pending.is_empty() {
        let ready = pending
            .iter()
            .position(|v| v.formula.atoms().iter().all(|a| !names.contains(a) || done.contains(a)));
        match ready {
            Some(i) => {
                let v = pending.remove(i);
                done.insert(v.name.clone());
                out.push(v);
            }
            None => {
                return Err(Error::CyclicDependency {
                    variable: pending[0].name.clone(),
                })
            }
        }
    }
    Ok(out)
}

impl Context {
    pub fn new(model: &StructuralModel, values: BTreeMap<Atom, bool>) -> Result<Self> {
        if let Some(v) = values.keys().find(|k| !model.is_innate(k)) {
            return Err(Error::UnknownVariable {
                variable: v.clone(),
                span: None,
            });
        }
        if let Some(v) = model.innate.iter().find(|v| !values.contains_key(&v.name)) {
            return Err(Error::IncompleteContext {
                variable: v.name.clone(),
            });
        }
        Ok(Context(values))
    }

    pub fn values(&self) -> &BTreeMap<Atom, bool> {
        &self.0
    }
}

impl World {
    pub fn values(&self) -> &BTreeMap<Atom, bool> {
        &self.0
    }

    pub fn get(&self, v: &Atom) -> bool {
        self.0.get(v).copied().unwrap_or(false)
    }

    /// The world whose true variables are the atoms of `state`.
    pub fn from_state(model: &StructuralModel, state: &State) -> Self {
        World(model.variables().map(|v| (v.clone(), state.holds(v))).collect())
    }

    pub fn to_state(&self) -> State {
        self.0.iter().filter(|(_, v)| **v).map(|(k, _)| k.clone()).collect()
    }

    fn true_atoms(&self) -> Vec<&Atom> {
        self.0.iter().filter(|(_, v)| **v).map(|(k, _)| k).collect()
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if !v {
                f.write_str("~")?;
            }
            write!(f, "{}", k)?;
        }
        f.write_str("}")
    }
}

/// s_u: innate variables from `u`, derived ones by their equations.
pub fn world_for_context(model: &StructuralModel, u: &Context) -> World {
    let mut values = u.0.clone();
    for v in &model.derived {
        let value = v.formula.eval_with(&|a| values.get(a).copied().unwrap_or(false));
        values.insert(v.name.clone(), value);
    }
    World(values)
}

fn typical(model: &StructuralModel, v: &Atom, w: &World, mode: Typicality) -> Result<bool> {
    if let Some(d) = model.derived_var(v) {
        return Ok(d.formula.eval_with(&|a| w.get(a)));
    }
    let var = model
        .innate
        .iter()
        .find(|x| &x.name == v)
        .ok_or_else(|| Error::UnknownVariable {
            variable: v.clone(),
            span: None,
        })?;
    let governing = match (mode, &var.norm) {
        (Typicality::NormOverrides, Some(n)) => n,
        _ => &var.prob,
    };
    let half = prob::half();
    if *governing == half {
        return Err(Error::AmbiguousTypicality { variable: v.clone() });
    }
    Ok(*governing > half)
}

/// Compares `w1` with `w2`: more normal when some variable is typical in
/// `w1` and not in `w2` and none the other way round.
pub fn normality_compare(model: &StructuralModel, w1: &World, w2: &World) -> Result<NormalityVerdict> {
    normality_compare_with(model, w1, w2, Typicality::NormOverrides)
}

pub fn normality_compare_with(
    model: &StructuralModel,
    w1: &World,
    w2: &World,
    mode: Typicality,
) -> Result<NormalityVerdict> {
    let (mut more, mut less) = (false, false);
    for v in model.variables() {
        let t1 = w1.get(v) == typical(model, v, w1, mode)?;
        let t2 = w2.get(v) == typical(model, v, w2, mode)?;
        more |= t1 && !t2;
        less |= t2 && !t1;
    }
    Ok(match (more, less) {
        (true, false) => NormalityVerdict::More,
        (false, true) => NormalityVerdict::Less,
        (false, false) => NormalityVerdict::Equal,
        (true, true) => NormalityVerdict::Incomparable,
    })
}

/// Innate variables become vacuous laws `v:p {q} <- .`, derived ones
/// deterministic laws with the CNF of their equation as body. Innate laws
/// come first, then derived laws in dependency order.
pub fn translate(model: &StructuralModel) -> CPTheory {
    let mut laws = Vec::new();
    for v in &model.innate {
        let mut d = Disjunct::new(v.name.clone(), v.prob.clone());
        d.norm = v.norm.clone();
        laws.push(CPLaw::new(vec![d], Body::truth()));
    }
    for v in &model.derived {
        let body = Body {
            clauses: v.formula.to_cnf(),
        };
        laws.push(CPLaw::deterministic(v.name.clone(), body));
    }
    CPTheory::new(laws).expect("model probabilities lie in (0,1)")
}

/// The story of `translate(model)` realizing `u`: innate laws choose per
/// `u`, then derived laws whose variable is true fire in order.
pub fn story_for_context(model: &StructuralModel, u: &Context) -> Branch {
    let theory = translate(model);
    let world = world_for_context(model, u);
    let mut steps = Vec::new();
    for (i, v) in model.innate.iter().enumerate() {
        steps.push(if world.get(&v.name) {
            Choice::atom(i, v.name.clone())
        } else {
            Choice::empty(i)
        });
    }
    let offset = model.innate.len();
    for (j, v) in model.derived.iter().enumerate() {
        if world.get(&v.name) {
            steps.push(Choice::atom(offset + j, v.name.clone()));
        }
    }
    story::replay(&theory, &steps).expect("context story replays")
}

fn actual_pair(model: &StructuralModel, u: &Context, c: &Atom, e: &Atom) -> Result<(CPTheory, Branch, World)> {
    let actual = world_for_context(model, u);
    for a in [c, e] {
        if !actual.get(a) {
            return Err(Error::CEnotInWorld { atom: a.clone() });
        }
    }
    Ok((translate(model), story_for_context(model, u), actual))
}

/// Witness worlds: ¬C ∧ ¬E leaves of T*|do(¬C) at least as normal as s_u.
pub fn witnesses(model: &StructuralModel, u: &Context, c: &Atom, e: &Atom) -> Result<Vec<World>> {
    let (theory, b, actual) = actual_pair(model, u, c, e)?;
    let star = transform::t_star(&theory, &b, c, e)?;
    let dist = engine::exact_distribution(&transform::intervene_neg(&star, c));
    let mut out = Vec::new();
    for leaf in dist.support() {
        if leaf.holds(c) || leaf.holds(e) {
            continue;
        }
        let w = World::from_state(model, leaf);
        if normality_compare(model, &w, &actual)?.is_ge() {
            out.push(w);
        }
    }
    Ok(out)
}

/// Whether C is an actual cause of E in `(model, u)` under the
/// normality-restricted counterfactual test.
pub fn hh_actual_cause(model: &StructuralModel, u: &Context, c: &Atom, e: &Atom) -> Result<bool> {
    Ok(!witnesses(model, u, c, e)?.is_empty())
}

/// Probability of the story reaching `w` in the translated theory.
pub fn world_probability(model: &StructuralModel, w: &World) -> Prob {
    let theory = translate(model);
    match story::branch_from_leaf(&theory, &w.to_state()) {
        Ok(b) => b.probability(&theory),
        Err(_) => Prob::zero(),
    }
}

/// A most normal witness with its story probability. Among maximal
/// witnesses the most probable wins, then the lexicographically smallest
/// set of true variables. `Relaxed` admits every lawful ¬C ∧ ¬E world.
pub fn best_witness(
    model: &StructuralModel,
    u: &Context,
    c: &Atom,
    e: &Atom,
    mode: WitnessMode,
) -> Result<Option<(World, Prob)>> {
    let candidates = match mode {
        WitnessMode::Strict => witnesses(model, u, c, e)?,
        WitnessMode::Relaxed => {
            actual_pair(model, u, c, e)?;
            model
                .lawful_worlds()
                .into_iter()
                .filter(|w| !w.get(c) && !w.get(e))
                .collect()
        }
    };
    let mut maximal = Vec::new();
    for w in &candidates {
        let mut dominated = false;
        for other in &candidates {
            if normality_compare(model, other, w)? == NormalityVerdict::More {
                dominated = true;
                break;
            }
        }
        if !dominated {
            maximal.push((w.clone(), world_probability(model, w)));
        }
    }
    maximal.sort_by(|(w1, p1), (w2, p2)| p2.cmp(p1).then_with(|| w1.true_atoms().cmp(&w2.true_atoms())));
    Ok(maximal.into_iter().next())
}

/// The most probable branch of `theory` with ¬C ∧ ¬E in its leaf. `Strict`
/// only admits leaves reachable in T^{Normal(b)}. Ties go to the
/// lexicographically smallest leaf.
pub fn theory_best_witness(
    theory: &CPTheory,
    b: &Branch,
    c: &Atom,
    e: &Atom,
    mode: WitnessMode,
) -> Result<Option<(Branch, Prob)>> {
    transform::check_branch(theory, b)?;
    for a in [c, e] {
        if !b.leaf().holds(a) {
            return Err(Error::CEnotInLeaf { atom: a.clone() });
        }
    }
    let normal = match mode {
        WitnessMode::Strict => Some(engine::exact_distribution(&transform::normal_refine(theory, b)?)),
        WitnessMode::Relaxed => None,
    };
    let best = engine::branches(theory, &OrderPolicy::Canonical)
        .into_iter()
        .filter(|(d, _)| !d.leaf().holds(c) && !d.leaf().holds(e))
        .filter(|(d, _)| normal.as_ref().is_none_or(|n| n.contains(d.leaf())))
        .min_by(|(d1, p1), (d2, p2)| p2.cmp(p1).then_with(|| d1.leaf().cmp(d2.leaf())));
    Ok(best)
}

/// Lemma check: over lawful worlds, `w ⪰ s_u` iff `w` is a leaf of
/// T^{Normal(b)}.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2Report {
    pub worlds: usize,
    /// `(world, at least as normal, reachable)` for every disagreement.
    pub counterexamples: Vec<(World, bool, bool)>,
}

impl Lemma2Report {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

pub fn check_lemma2(model: &StructuralModel, u: &Context) -> Result<Lemma2Report> {
    let theory = translate(model);
    let b = story_for_context(model, u);
    let actual = world_for_context(model, u);
    let normal = engine::exact_distribution(&transform::normal_refine(&theory, &b)?);
    let worlds = model.lawful_worlds();
    let mut counterexamples = Vec::new();
    for w in &worlds {
        let ge = normality_compare(model, w, &actual)?.is_ge();
        let reachable = normal.contains(&w.to_state());
        if ge != reachable {
            counterexamples.push((w.clone(), ge, reachable));
        }
    }
    Ok(Lemma2Report {
        worlds: worlds.len(),
        counterexamples,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub structural: bool,
    pub theory: bool,
}

impl Theorem1Report {
    pub fn agrees(&self) -> bool {
        self.structural == self.theory
    }
}

/// Compares the structural verdict with the hh definition on the
/// translated theory and story.
pub fn check_theorem1(model: &StructuralModel, u: &Context, c: &Atom, e: &Atom) -> Result<Theorem1Report> {
    let structural = hh_actual_cause(model, u, c, e)?;
    let (theory, b, _) = actual_pair(model, u, c, e)?;
    let verdict = causation::cause_hh(&theory, &b, c, e)?;
    Ok(Theorem1Report {
        structural,
        theory: verdict.is_cause,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::{parse_model, serialize_theory};
    use crate::prob::ratio;

    fn a(s: &str) -> Atom {
        Atom::new(s)
    }

    fn world(model: &StructuralModel, trues: &[&str]) -> World {
        World::from_state(model, &trues.iter().copied().collect())
    }

    fn ctx(model: &StructuralModel, trues: &[&str]) -> Context {
        let values = model
            .innate()
            .iter()
            .map(|v| (v.name.clone(), trues.contains(&v.name.as_str())))
            .collect();
        Context::new(model, values).unwrap()
    }

    #[test]
    fn pen_worlds() {
        let f = corpus::pen_model();
        let m = &f.model;
        assert_eq!(
            world_for_context(m, &f.contexts[0]),
            world(m, &["prof", "assistant", "nopens"])
        );
        assert_eq!(world_for_context(m, &ctx(m, &[])), world(m, &[]));
        assert!(!world_for_context(m, &ctx(m, &["prof"])).get(&a("nopens")));
    }

    #[test]
    fn pen_normality_ranking() {
        let m = corpus::pen_model().model;
        let top = world(&m, &["assistant"]);
        let actual = world(&m, &["prof", "assistant", "nopens"]);
        let low = world(&m, &["prof"]);
        assert_eq!(normality_compare(&m, &top, &actual).unwrap(), NormalityVerdict::More);
        assert_eq!(normality_compare(&m, &actual, &low).unwrap(), NormalityVerdict::More);
        assert_eq!(normality_compare(&m, &low, &top).unwrap(), NormalityVerdict::Less);
        assert_eq!(
            normality_compare(&m, &actual, &actual).unwrap(),
            NormalityVerdict::Equal
        );
        // ~prof is more typical, ~assistant less typical
        assert_eq!(
            normality_compare(&m, &world(&m, &[]), &actual).unwrap(),
            NormalityVerdict::Incomparable
        );
        // statistically prof is typical, so the order flips
        assert_eq!(
            normality_compare_with(&m, &top, &actual, Typicality::StatisticalOnly).unwrap(),
            NormalityVerdict::Less
        );
    }

    #[test]
    fn half_probability_has_no_typical_value() {
        let m = parse_model("innate x : 1/2\nderived y = x").unwrap().model;
        assert!(matches!(
            normality_compare(&m, &world(&m, &[]), &world(&m, &["x", "y"])),
            Err(Error::AmbiguousTypicality { .. })
        ));
    }

    #[test]
    fn translation_of_pens() {
        let m = corpus::pen_model().model;
        assert_eq!(
            serialize_theory(&translate(&m)),
            "prof:0.7 {0.01} <- .\nassistant:0.8 <- .\nnopens <- prof, assistant.\n"
        );
        let (t, b) = corpus::pens_story();
        assert_eq!(translate(&m), t);
        assert_eq!(story_for_context(&m, &corpus::pen_model().contexts[0]), b);
    }

    #[test]
    fn negated_dependency_fires_after_empty_choice() {
        let m = parse_model("innate x : 0.3\nderived y = ~x").unwrap().model;
        assert_eq!(serialize_theory(&translate(&m)), "x:0.3 <- .\ny <- ~x.\n");
        let b = story_for_context(&m, &ctx(&m, &[]));
        assert_eq!(b.steps(), &[Choice::empty(0), Choice::atom(1, "y")]);
    }

    #[test]
    fn stories_reach_their_worlds() {
        let m = corpus::dice5_model().model;
        for u in m.contexts() {
            assert_eq!(story_for_context(&m, &u).leaf(), &world_for_context(&m, &u).to_state());
        }
    }

    #[test]
    fn pen_causes() {
        let f = corpus::pen_model();
        let (m, u) = (&f.model, &f.contexts[0]);
        let e = a("nopens");
        assert!(hh_actual_cause(m, u, &a("prof"), &e).unwrap());
        assert!(!hh_actual_cause(m, u, &a("assistant"), &e).unwrap());
        let (w, p) = best_witness(m, u, &a("prof"), &e, WitnessMode::Strict)
            .unwrap()
            .unwrap();
        assert_eq!(w, world(m, &["assistant"]));
        assert_eq!(p, ratio(3, 10) * ratio(4, 5));
        assert!(best_witness(m, u, &a("assistant"), &e, WitnessMode::Strict)
            .unwrap()
            .is_none());
        assert!(matches!(
            hh_actual_cause(m, &ctx(m, &["prof"]), &a("prof"), &e),
            Err(Error::CEnotInWorld { .. })
        ));
    }

    #[test]
    fn dice_model_causes() {
        let f = corpus::dice5_model();
        let (m, u) = (&f.model, &f.contexts[0]);
        let (c, e) = (a("t1"), a("wincar"));
        assert!(!hh_actual_cause(m, u, &c, &e).unwrap());
        let (w, p) = best_witness(m, u, &c, &e, WitnessMode::Relaxed).unwrap().unwrap();
        assert_eq!(w, world(m, &["t2"]));
        assert_eq!(p, ratio(1, 10) * prob::pow(&ratio(9, 10), 4));
    }

    #[test]
    fn dice_theory_witness() {
        let (t, b) = corpus::dice();
        let (c, e) = (a("throw(1,1)"), a("wincar"));
        let (w, p) = theory_best_witness(&t, &b, &c, &e, WitnessMode::Relaxed)
            .unwrap()
            .unwrap();
        assert_eq!(p, ratio(9, 100));
        assert_eq!(w.leaf(), &State::from_iter(["throw(2,1)"]));
        assert!(theory_best_witness(&t, &b, &c, &e, WitnessMode::Strict)
            .unwrap()
            .is_none());
    }

    #[test]
    fn pen_lemma_and_theorem() {
        let f = corpus::pen_model();
        let (m, u) = (&f.model, &f.contexts[0]);
        let r = check_lemma2(m, u).unwrap();
        assert_eq!(r.worlds, 4);
        assert!(r.holds(), "{:?}", r.counterexamples);
        for c in ["prof", "assistant"] {
            assert!(check_theorem1(m, u, &a(c), &a("nopens")).unwrap().agrees());
        }
    }

    #[test]
    fn model_validation() {
        let bad = StructuralModel::new(
            vec![InnateVar {
                name: a("x"),
                prob: prob::one(),
                norm: None,
            }],
            vec![],
        );
        assert!(matches!(bad, Err(Error::ProbabilityRange { .. })));
        let dup = parse_model("innate x : 0.3\nderived x = x");
        assert!(matches!(dup, Err(Error::DuplicateVariable { .. })));
        let m = parse_model("innate x : 0.3\nderived z = y\nderived y = x")
            .unwrap()
            .model;
        let order: Vec<&str> = m.derived().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(order, ["y", "z"]);
        assert!(matches!(
            Context::new(&m, BTreeMap::new()),
            Err(Error::IncompleteContext { .. })
        ));
    }
}
