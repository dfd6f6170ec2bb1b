//! Seeded generators of small random instances for property sweeps.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bridge::{self, Context, DerivedVar, InnateVar, StructuralModel};
use crate::causation;
use crate::formula::Formula;
use crate::prob::{ratio, Prob};
use crate::theory::{Atom, Body, Branch, CPLaw, CPTheory, Disjunct, Literal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for [`random_theory`].
#[derive(Clone, Copy, Debug)]
pub struct TheoryShape {
    pub max_laws: usize,
    pub max_atoms: usize,
    pub max_head: usize,
    pub max_body: usize,
    pub norm_rate: f64,
}

impl Default for TheoryShape {
    fn default() -> Self {
        TheoryShape {
            max_laws: 6,
            max_atoms: 6,
            max_head: 2,
            max_body: 2,
            norm_rate: 0.25,
        }
    }
}

fn atom(i: usize) -> Atom {
    Atom::new(format!("a{}", i))
}

/// `n` positive tenths summing to at most one.
fn tenths(rng: &mut impl Rng, n: usize) -> Vec<Prob> {
    let total = rng.random_range(n as i64..=10);
    let mut cuts: Vec<i64> = (1..total)
        .collect::<Vec<_>>()
        .choose_multiple(rng, n - 1)
        .copied()
        .collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(n);
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(ratio(c - prev, 10));
        prev = c;
    }
    out
}

/// A theory whose negation is stratified: a law's body only mentions atoms
/// with index at most its lowest head atom, negated ones strictly below.
pub fn random_theory(rng: &mut impl Rng, shape: &TheoryShape) -> CPTheory {
    let n_atoms = rng.random_range(1..=shape.max_atoms);
    let n_laws = rng.random_range(1..=shape.max_laws);
    let mut laws = Vec::with_capacity(n_laws);
    for _ in 0..n_laws {
        let head_len = rng.random_range(1..=shape.max_head.min(n_atoms));
        let mut head_atoms: Vec<usize> = (0..n_atoms)
            .collect::<Vec<_>>()
            .choose_multiple(rng, head_len)
            .copied()
            .collect();
        head_atoms.sort_unstable();
        let probs = tenths(rng, head_len);
        let norms = rng.random_bool(shape.norm_rate).then(|| tenths(rng, head_len));
        let head = head_atoms
            .iter()
            .zip(probs)
            .enumerate()
            .map(|(k, (&i, p))| {
                let d = Disjunct::new(atom(i), p);
                match &norms {
                    Some(ns) => d.with_norm(ns[k].clone()),
                    None => d,
                }
            })
            .collect();
        let low = head_atoms[0];
        let mut literals = Vec::new();
        for _ in 0..rng.random_range(0..=shape.max_body) {
            let i = rng.random_range(0..=low);
            let negative = i < low && rng.random_bool(0.4);
            let lit = if negative {
                Literal::neg(atom(i))
            } else {
                Literal::pos(atom(i))
            };
            if !literals.contains(&lit) {
                literals.push(lit);
            }
        }
        laws.push(CPLaw::new(head, Body::conj(literals)));
    }
    CPTheory::new(laws).expect("generated masses are valid")
}

/// Probabilities in tenths, never one half.
fn skewed(rng: &mut impl Rng) -> Prob {
    let k = *[1, 2, 3, 4, 6, 7, 8, 9].choose(rng).expect("nonempty");
    ratio(k, 10)
}

fn random_formula(rng: &mut impl Rng, vars: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.35) {
        let v = vars.choose(rng).expect("variables exist").clone();
        return if rng.random_bool(0.3) {
            Formula::neg_atom(v)
        } else {
            Formula::atom(v)
        };
    }
    let parts = [
        random_formula(rng, vars, depth - 1),
        random_formula(rng, vars, depth - 1),
    ];
    let f = if rng.random_bool(0.5) {
        Formula::and(parts)
    } else {
        Formula::or(parts)
    };
    if rng.random_bool(0.15) {
        Formula::not(f)
    } else {
        f
    }
}

/// A model with 1..=`max_innate` innate and 0..=`max_derived` derived
/// variables; norms, when present, lie in (0,1) and avoid one half.
pub fn random_model(rng: &mut impl Rng, max_innate: usize, max_derived: usize) -> StructuralModel {
    let n_innate = rng.random_range(1..=max_innate);
    let n_derived = rng.random_range(0..=max_derived);
    let innate: Vec<InnateVar> = (0..n_innate)
        .map(|i| InnateVar {
            name: Atom::new(format!("x{}", i)),
            prob: skewed(rng),
            norm: rng.random_bool(0.4).then(|| skewed(rng)),
        })
        .collect();
    let mut vars: Vec<Atom> = innate.iter().map(|v| v.name.clone()).collect();
    let mut derived = Vec::new();
    for j in 0..n_derived {
        let formula = random_formula(rng, &vars, 2);
        let name = Atom::new(format!("y{}", j));
        vars.push(name.clone());
        derived.push(DerivedVar { name, formula });
    }
    StructuralModel::new(innate, derived).expect("generated model is valid")
}

pub fn random_context(rng: &mut impl Rng, model: &StructuralModel) -> Context {
    model.contexts().choose(rng).expect("at least one context").clone()
}

/// A story together with a cause and an effect true in its leaf.
#[derive(Clone, Debug)]
pub struct CauseInstance {
    pub theory: CPTheory,
    pub story: Branch,
    pub cause: Atom,
    pub effect: Atom,
}

/// A translated model, context story and cause/effect pair for which the
/// hypothesis of the product identity holds.
pub fn theorem2_instance(rng: &mut impl Rng) -> CauseInstance {
    loop {
        let model = random_model(rng, 4, 3);
        let u = random_context(rng, &model);
        let story = bridge::story_for_context(&model, &u);
        let trues: Vec<Atom> = story.leaf().iter().cloned().collect();
        if trues.len() < 2 {
            continue;
        }
        let pair: Vec<&Atom> = trues.choose_multiple(rng, 2).collect();
        let theory = bridge::translate(&model);
        let (cause, effect) = (pair[0].clone(), pair[1].clone());
        match causation::check_theorem2(&theory, &story, &cause, &effect) {
            Ok(r) if r.hypothesis => {
                return CauseInstance {
                    theory,
                    story,
                    cause,
                    effect,
                }
            }
            _ => continue,
        }
    }
}
