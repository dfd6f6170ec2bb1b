use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cpcause::bridge::{self, NormalityVerdict};
use cpcause::causation::{self, DefinitionKind};
use cpcause::generate::{self, TheoryShape};
use cpcause::parser::{parse_formula, parse_story, parse_theory, serialize_theory};
use cpcause::prob::{self, ratio};
use cpcause::{corpus, engine, transform};
use cpcause::{Atom, CPTheory, Formula, Literal, Outcome, Prob, State};

/// Leaf distribution by summing over independent outcome selections, each
/// evaluated under the well-founded model of the selected normal program.
fn selection_oracle(theory: &CPTheory) -> BTreeMap<State, Prob> {
    let laws = theory.laws();
    let options: Vec<Vec<(Outcome, Prob)>> = laws.iter().map(|l| l.outcomes()).collect();
    let mut out: BTreeMap<State, Prob> = BTreeMap::new();
    let mut pick = vec![0usize; laws.len()];
    loop {
        let mut weight = prob::one();
        let mut rules: Vec<(Atom, &Vec<Vec<Literal>>)> = Vec::new();
        for (i, law) in laws.iter().enumerate() {
            let (o, p) = &options[i][pick[i]];
            weight *= p;
            if let Outcome::Atom(a) = o {
                rules.push((a.clone(), &law.body.clauses));
            }
        }
        let model = well_founded(&rules);
        *out.entry(model).or_insert_with(prob::zero) += weight;
        let mut k = 0;
        loop {
            if k == laws.len() {
                return out;
            }
            pick[k] += 1;
            if pick[k] < options[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Least model of the program with negation read against `assumed`.
fn reduct_lfp(rules: &[(Atom, &Vec<Vec<Literal>>)], assumed: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let mut m = BTreeSet::new();
    loop {
        let before = m.len();
        for (head, body) in rules {
            let holds = body.iter().all(|clause| {
                clause.iter().any(|l| {
                    if l.positive {
                        m.contains(&l.atom)
                    } else {
                        !assumed.contains(&l.atom)
                    }
                })
            });
            if holds {
                m.insert(head.clone());
            }
        }
        if m.len() == before {
            return m;
        }
    }
}

/// Alternating fixpoint; total for stratified programs.
fn well_founded(rules: &[(Atom, &Vec<Vec<Literal>>)]) -> State {
    let mut truth = BTreeSet::new();
    loop {
        let possible = reduct_lfp(rules, &truth);
        let next = reduct_lfp(rules, &possible);
        if next == truth {
            assert_eq!(possible, truth, "stratified programs have a total model");
            return State::new(truth);
        }
        truth = next;
    }
}

#[test]
fn engine_matches_selection_oracle_on_corpus() {
    for t in [corpus::pens(), corpus::ex5().0] {
        let dist = engine::exact_distribution(&t);
        assert_eq!(dist.entries(), &selection_oracle(&t));
    }
}

#[test]
fn engine_matches_selection_oracle_on_generated_theories() {
    let mut rng = generate::rng(11);
    let shape = TheoryShape::default();
    for _ in 0..300 {
        let t = generate::random_theory(&mut rng, &shape);
        assert_eq!(
            engine::exact_distribution(&t).entries(),
            &selection_oracle(&t),
            "{}",
            serialize_theory(&t)
        );
    }
}

#[test]
fn pen_queries() {
    let t = corpus::pens();
    let f = |s: &str| parse_formula(s).unwrap();
    assert_eq!(engine::prob(&t, &f("nopens")), ratio(14, 25));
    assert_eq!(engine::cond_prob(&t, &f("nopens"), &f("prof")).unwrap(), ratio(4, 5));
    assert_eq!(
        engine::prob(&transform::intervene_neg(&t, &Atom::new("prof")), &f("nopens")),
        prob::zero()
    );
    assert!(engine::cond_prob(&t, &f("nopens"), &f("prof & ~prof")).is_err());
}

#[test]
fn dice_distribution_has_101_leaves() {
    let (t, _) = corpus::dice();
    let d = engine::exact_distribution(&t);
    assert_eq!(d.len(), 101);
    assert_eq!(d.total(), prob::one());
}

/// The working definition on a translated model, computed over contexts:
/// laws of innate variables whose flip admits no world between {C, E} and
/// the actual one stay fixed, the others range freely, and C is forced false.
fn working_oracle(model: &bridge::StructuralModel, u: &bridge::Context, c: &Atom, e: &Atom) -> Prob {
    let actual = bridge::world_for_context(model, u);
    let leaf = actual.to_state();
    let innate: Vec<Atom> = model.innate().iter().map(|v| v.name.clone()).collect();
    let contexts = model.contexts();
    let mut fixed = BTreeSet::new();
    for (i, v) in innate.iter().enumerate() {
        let reaches = contexts.iter().any(|u2| {
            let agrees = innate[..i].iter().all(|x| u2.values()[x] == u.values()[x]);
            let flipped = u2.values()[v] != u.values()[v];
            let w = bridge::world_for_context(model, u2).to_state();
            agrees && flipped && w.holds(c) && w.holds(e) && w.is_subset(&leaf)
        });
        if !reaches {
            fixed.insert(v.clone());
        }
    }
    let mut total = prob::zero();
    for u2 in &contexts {
        if fixed.iter().any(|v| u2.values()[v] != u.values()[v]) {
            continue;
        }
        let mut values: BTreeMap<Atom, bool> = u2.values().clone();
        let mut weight = prob::one();
        for var in model.innate() {
            if fixed.contains(&var.name) {
                continue;
            }
            weight *= if values[&var.name] {
                var.prob.clone()
            } else {
                prob::one() - &var.prob
            };
        }
        if let Some(var) = model.innate().iter().find(|v| &v.name == c) {
            // the intervention empties C's law, so its choice carries no weight
            if !fixed.contains(c) {
                if values[c] {
                    continue;
                }
                weight /= prob::one() - &var.prob;
            }
            values.insert(c.clone(), false);
        }
        for d in model.derived() {
            let value = &d.name != c && d.formula.eval_with(&|a| values.get(a).copied().unwrap_or(false));
            values.insert(d.name.clone(), value);
        }
        if !values[e] {
            total += weight;
        }
    }
    total
}

#[test]
fn working_definition_matches_context_oracle() {
    let mut rng = generate::rng(21);
    let mut compared = 0;
    for _ in 0..150 {
        let model = generate::random_model(&mut rng, 4, 3);
        let theory = bridge::translate(&model);
        for u in model.contexts() {
            let b = bridge::story_for_context(&model, &u);
            let trues: Vec<Atom> = b.leaf().iter().cloned().collect();
            for c in &trues {
                for e in trues.iter().filter(|e| *e != c) {
                    let v = causation::cause_working(&theory, &b, c, e).unwrap();
                    assert_eq!(
                        v.strength,
                        working_oracle(&model, &u, c, e),
                        "C={} E={}\n{}",
                        c,
                        e,
                        serialize_theory(&theory)
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 500);
}

#[test]
fn product_identity_holds_for_vacuous_single_atom_laws() {
    let mut rng = generate::rng(31);
    let shape = TheoryShape {
        max_head: 1,
        ..TheoryShape::default()
    };
    let mut checked = 0;
    for i in 0..3000u64 {
        let t = generate::random_theory(&mut rng, &shape);
        let b = engine::sample_story(&t, i);
        let trues: Vec<Atom> = b.leaf().iter().cloned().collect();
        for c in &trues {
            for e in trues.iter().filter(|e| *e != c) {
                let Ok(r) = causation::check_theorem2(&t, &b, c, e) else {
                    continue;
                };
                if r.hypothesis && r.vacuous_single {
                    assert!(r.equal, "C={} E={}\n{}", c, e, serialize_theory(&t));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100, "{}", checked);
}

#[test]
fn product_identity_fails_when_the_cause_law_has_a_second_head_atom() {
    let t = parse_theory("a1:0.3; a2:0.7 <- . a2:0.9 <- ~a0, a1.").unwrap();
    let b = parse_story("apply 0 -> a1\napply 1 -> a2", &t).unwrap();
    let r = causation::check_theorem2(&t, &b, &Atom::new("a1"), &Atom::new("a2")).unwrap();
    assert!(r.hypothesis && !r.vacuous_single);
    assert_eq!((r.lhs, r.rhs), (prob::zero(), ratio(7, 10)));
}

#[test]
fn normal_refinement_keeps_the_story() {
    let mut rng = generate::rng(41);
    let shape = TheoryShape {
        norm_rate: 0.5,
        ..TheoryShape::default()
    };
    for i in 0..300u64 {
        let t = generate::random_theory(&mut rng, &shape);
        if causation::forbid_strict_norms(&t).is_err() {
            continue;
        }
        let b = engine::sample_story(&t, i);
        if !transform::excluded_by_norms(&t, &b).is_empty() {
            continue;
        }
        let Ok(normal) = transform::normal_refine(&t, &b) else {
            continue;
        };
        assert!(
            engine::exact_distribution(&normal).contains(b.leaf()),
            "{}",
            serialize_theory(&t)
        );
    }
}

#[test]
fn strengths_are_probabilities() {
    let mut rng = generate::rng(51);
    let shape = TheoryShape::default();
    for i in 0..200u64 {
        let t = generate::random_theory(&mut rng, &shape);
        let b = engine::sample_story(&t, i);
        let trues: Vec<Atom> = b.leaf().iter().cloned().collect();
        for e in &trues {
            for kind in DefinitionKind::ALL {
                for entry in causation::rank_causes(&t, &b, e, kind).unwrap() {
                    if let Ok(v) = entry.verdict {
                        assert!(v.strength >= prob::zero() && v.strength <= prob::one());
                        assert_eq!(v.is_cause, v.strength > prob::zero());
                    }
                }
            }
        }
    }
}

#[test]
fn normality_is_a_preorder() {
    let mut rng = generate::rng(61);
    for _ in 0..40 {
        let m = generate::random_model(&mut rng, 3, 3);
        let worlds: Vec<bridge::World> = (0..1u32 << (m.innate().len() + m.derived().len()))
            .map(|bits| {
                let vars: Vec<Atom> = m.variables().cloned().collect();
                let state: State = vars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, v)| v.clone())
                    .collect();
                bridge::World::from_state(&m, &state)
            })
            .collect();
        let ge = |x: &bridge::World, y: &bridge::World| bridge::normality_compare(&m, x, y).unwrap().is_ge();
        for x in &worlds {
            assert_eq!(bridge::normality_compare(&m, x, x).unwrap(), NormalityVerdict::Equal);
            for y in &worlds {
                let xy = bridge::normality_compare(&m, x, y).unwrap();
                let yx = bridge::normality_compare(&m, y, x).unwrap();
                let flipped = match xy {
                    NormalityVerdict::More => NormalityVerdict::Less,
                    NormalityVerdict::Less => NormalityVerdict::More,
                    other => other,
                };
                assert_eq!(yx, flipped);
                if !ge(x, y) {
                    continue;
                }
                for z in &worlds {
                    if ge(y, z) {
                        assert!(ge(x, z));
                    }
                }
            }
        }
    }
}

#[test]
fn translation_preserves_innate_marginals() {
    let mut rng = generate::rng(71);
    for _ in 0..60 {
        let m = generate::random_model(&mut rng, 4, 3);
        let dist = engine::exact_distribution(&bridge::translate(&m));
        for u in m.contexts() {
            let expected: Prob = m
                .innate()
                .iter()
                .map(|v| {
                    if u.values()[&v.name] {
                        v.prob.clone()
                    } else {
                        prob::one() - &v.prob
                    }
                })
                .product();
            let event = Formula::and(u.values().iter().map(|(k, v)| {
                if *v {
                    Formula::atom(k.clone())
                } else {
                    Formula::neg_atom(k.clone())
                }
            }));
            assert_eq!(dist.prob(&event), expected);
        }
    }
}

#[test]
fn monte_carlo_tracks_exact_distribution_on_dice_variant() {
    let t = parse_theory("a:0.3; b:0.3 <- . c:0.5 <- a. d <- ~c, b.").unwrap();
    let exact = engine::exact_distribution(&t);
    let counts = engine::sample_leaf_frequencies(&t, 99, 50_000);
    assert!(engine::total_variation(&exact, &counts) < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_theories_round_trip(seed in any::<u64>()) {
        let t = generate::random_theory(&mut generate::rng(seed), &TheoryShape::default());
        let text = serialize_theory(&t);
        prop_assert_eq!(parse_theory(&text).unwrap(), t);
    }

    #[test]
    fn cnf_is_equivalent(seed in any::<u64>(), bits in any::<u8>()) {
        let m = generate::random_model(&mut generate::rng(seed), 4, 3);
        for d in m.derived() {
            let clauses = d.formula.to_cnf();
            let value = |a: &Atom| {
                let i: u32 = a.as_str()[1..].parse().unwrap();
                let offset = if a.as_str().starts_with('y') { 4 } else { 0 };
                bits >> ((i + offset) % 8) & 1 == 1
            };
            let cnf = clauses.iter().all(|c| c.iter().any(|l| value(&l.atom) == l.positive));
            prop_assert_eq!(cnf, d.formula.eval_with(&value));
            let reparsed = parse_formula(&d.formula.to_string()).unwrap();
            prop_assert_eq!(reparsed.eval_with(&value), d.formula.eval_with(&value));
        }
    }

    #[test]
    fn exact_rendering_round_trips(n in 0i64..=1000, d in 1i64..=1000) {
        prop_assume!(n <= d);
        let p = ratio(n, d);
        prop_assert_eq!(prob::parse_prob(&prob::render_exact(&p)), Some(p));
    }

    #[test]
    fn final_strength_grows_as_the_norm_drops(k in 1i64..99, j in 1i64..99) {
        let (lo, hi) = (k.min(j), k.max(j));
        let strength = |norm: i64| {
            let text = format!("prof:0.7 {{{}/100}} <- . assistant:0.8 <- . nopens <- prof, assistant.", norm);
            let t = parse_theory(&text).unwrap();
            let (_, b) = corpus::pens_story();
            causation::cause_final(&t, &b, &Atom::new("prof"), &Atom::new("nopens")).unwrap().strength
        };
        prop_assert!(strength(lo) >= strength(hi));
    }
}
