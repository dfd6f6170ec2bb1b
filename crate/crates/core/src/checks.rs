//! Generated-instance sweeps backing the property suites and `check` verb.

use std::fmt;

use rand::Rng;

use crate::bridge::{self, StructuralModel};
use crate::causation;
use crate::engine::{self, OrderPolicy};
use crate::error::Result;
use crate::generate::{self, TheoryShape};
use crate::parser::{serialize_model, serialize_story, serialize_theory};
use crate::theory::{Atom, Branch, CPTheory};

/// One failing instance, printable as input files.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub theory: String,
    pub story: Option<String>,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.detail)?;
        writeln!(f, "--- theory")?;
        write!(f, "{}", self.theory)?;
        if let Some(s) = &self.story {
            writeln!(f, "--- story")?;
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Drops laws one at a time while `fails` keeps holding.
pub fn minimize(theory: &CPTheory, fails: impl Fn(&CPTheory) -> bool) -> CPTheory {
    let mut laws = theory.laws().to_vec();
    let mut i = 0;
    while i < laws.len() {
        let mut fewer = laws.clone();
        fewer.remove(i);
        match CPTheory::new(fewer) {
            Ok(t) if fails(&t) => laws = t.into_laws(),
            _ => i += 1,
        }
    }
    CPTheory::new(laws).expect("subset of a valid theory")
}

fn policies(rng: &mut impl Rng, theory: &CPTheory) -> Vec<OrderPolicy> {
    let story = engine::sample_story(theory, rng.random());
    vec![
        OrderPolicy::Canonical,
        OrderPolicy::Reverse,
        OrderPolicy::Seeded(rng.random()),
        OrderPolicy::Seeded(rng.random()),
        OrderPolicy::StoryConsistent {
            story: story.steps().to_vec(),
            reverse_off_branch: true,
        },
    ]
}

/// Policies on which the leaf distribution differs from the canonical one.
fn order_failures(theory: &CPTheory, policies: &[OrderPolicy]) -> Vec<OrderPolicy> {
    let reference = engine::distribution_with(theory, &OrderPolicy::Canonical);
    policies
        .iter()
        .filter(|p| engine::distribution_with(theory, p) != reference)
        .cloned()
        .collect()
}

/// Exact leaf distributions agree across evaluation orders.
pub fn order_invariance(seed: u64, count: usize) -> SweepReport {
    let mut rng = generate::rng(seed);
    let shape = TheoryShape::default();
    let mut report = SweepReport::default();
    for _ in 0..count {
        let theory = generate::random_theory(&mut rng, &shape);
        let ps = policies(&mut rng, &theory);
        let bad = order_failures(&theory, &ps);
        report.checked += 1;
        if !bad.is_empty() {
            let small = minimize(&theory, |t| !order_failures(t, &[bad[0].clone()]).is_empty());
            report.counterexamples.push(Counterexample {
                theory: serialize_theory(&small),
                story: None,
                detail: format!("distribution differs under {:?}", bad[0]),
            });
        }
    }
    report
}

fn story_text(b: &Branch) -> String {
    serialize_story(b.steps())
}

/// Both sides of the product identity agree whenever its hypothesis holds.
pub fn theorem2(seed: u64, count: usize) -> Result<SweepReport> {
    let mut rng = generate::rng(seed);
    let mut report = SweepReport::default();
    for _ in 0..count {
        let inst = generate::theorem2_instance(&mut rng);
        let r = causation::check_theorem2(&inst.theory, &inst.story, &inst.cause, &inst.effect)?;
        report.checked += 1;
        if !r.equal {
            report.counterexamples.push(Counterexample {
                theory: serialize_theory(&inst.theory),
                story: Some(story_text(&inst.story)),
                detail: format!(
                    "C={} E={}: joint {} vs product {}",
                    inst.cause, inst.effect, r.lhs, r.rhs
                ),
            });
        }
    }
    Ok(report)
}

fn model_counterexample(model: &StructuralModel, detail: String) -> Counterexample {
    Counterexample {
        theory: serialize_model(model, &[]),
        story: None,
        detail,
    }
}

/// Over every context of each model: at least as normal as the actual
/// world iff reachable in the normal refinement.
pub fn lemma2(seed: u64, count: usize) -> Result<SweepReport> {
    let mut rng = generate::rng(seed);
    let mut report = SweepReport::default();
    for _ in 0..count {
        let model = generate::random_model(&mut rng, 4, 3);
        for u in model.contexts() {
            let r = bridge::check_lemma2(&model, &u)?;
            report.checked += 1;
            if let Some((w, ge, reachable)) = r.counterexamples.first() {
                report.counterexamples.push(model_counterexample(
                    &model,
                    format!(
                        "context {}: world {} at least as normal = {}, reachable = {}",
                        bridge::world_for_context(&model, &u),
                        w,
                        ge,
                        reachable
                    ),
                ));
            }
        }
    }
    Ok(report)
}

/// The structural and theory-side verdicts agree for every context and
/// every pair of distinct true variables.
pub fn theorem1(seed: u64, count: usize) -> Result<SweepReport> {
    let mut rng = generate::rng(seed);
    let mut report = SweepReport::default();
    for _ in 0..count {
        let model = generate::random_model(&mut rng, 4, 3);
        for u in model.contexts() {
            let world = bridge::world_for_context(&model, &u);
            let trues: Vec<Atom> = world.to_state().iter().cloned().collect();
            for c in &trues {
                for e in trues.iter().filter(|e| *e != c) {
                    let r = bridge::check_theorem1(&model, &u, c, e)?;
                    report.checked += 1;
                    if !r.agrees() {
                        let b = bridge::story_for_context(&model, &u);
                        report.counterexamples.push(Counterexample {
                            theory: serialize_theory(&bridge::translate(&model)),
                            story: Some(story_text(&b)),
                            detail: format!("C={} E={}: structural {} vs theory {}", c, e, r.structural, r.theory),
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_theory;

    #[test]
    fn small_sweeps_pass() {
        assert!(order_invariance(1, 20).passed());
        assert!(theorem2(1, 10).unwrap().passed());
        assert!(lemma2(1, 5).unwrap().passed());
        assert!(theorem1(1, 5).unwrap().passed());
    }

    #[test]
    fn minimize_keeps_failure() {
        let t = parse_theory("a:0.5 <- . b <- a. c <- . d <- c.").unwrap();
        let m = minimize(&t, |t| t.atoms().contains(&Atom::new("b")));
        assert_eq!(m, parse_theory("b <- a.").unwrap());
    }
}
