//! Propositional query formulas.

use std::collections::BTreeSet;
use std::fmt;

use crate::theory::{Atom, Literal, State};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Const(bool),
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn atom(a: impl Into<Atom>) -> Self {
        Formula::Atom(a.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn neg_atom(a: impl Into<Atom>) -> Self {
        Formula::not(Formula::atom(a))
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Or(parts.into_iter().collect())
    }

    /// Atoms absent from `state` are false.
    pub fn eval(&self, state: &State) -> bool {
        self.eval_with(&|a| state.holds(a))
    }

    pub fn eval_with(&self, value: &dyn Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Atom(a) => value(a),
            Formula::Not(f) => !f.eval_with(value),
            Formula::And(fs) => fs.iter().all(|f| f.eval_with(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval_with(value)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
        }
    }

    /// Conjunctive normal form as a list of clauses. Tautological clauses are
    /// kept; `Const(true)` yields no clauses and `Const(false)` an empty one.
    pub fn to_cnf(&self) -> Vec<Vec<Literal>> {
        let mut clauses = cnf(&self.nnf(true));
        for c in &mut clauses {
            let mut seen = Vec::new();
            c.retain(|l| {
                if seen.contains(l) {
                    false
                } else {
                    seen.push(l.clone());
                    true
                }
            });
        }
        let mut out: Vec<Vec<Literal>> = Vec::new();
        for c in clauses {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Negation normal form; `positive = false` pushes a negation in.
    fn nnf(&self, positive: bool) -> Nnf {
        match (self, positive) {
            (Formula::Const(b), p) => Nnf::Const(*b == p),
            (Formula::Atom(a), p) => Nnf::Lit(Literal {
                atom: a.clone(),
                positive: p,
            }),
            (Formula::Not(f), p) => f.nnf(!p),
            (Formula::And(fs), true) | (Formula::Or(fs), false) => {
                Nnf::And(fs.iter().map(|f| f.nnf(positive)).collect())
            }
            (Formula::Or(fs), true) | (Formula::And(fs), false) => {
                Nnf::Or(fs.iter().map(|f| f.nnf(positive)).collect())
            }
        }
    }
}

enum Nnf {
    Const(bool),
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn cnf(f: &Nnf) -> Vec<Vec<Literal>> {
    match f {
        Nnf::Const(true) => vec![],
        Nnf::Const(false) => vec![vec![]],
        Nnf::Lit(l) => vec![vec![l.clone()]],
        Nnf::And(fs) => fs.iter().flat_map(cnf).collect(),
        Nnf::Or(fs) => {
            // distribute, starting from the empty clause (false)
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for g in fs {
                let gc = cnf(g);
                let mut next = Vec::with_capacity(acc.len() * gc.len());
                for a in &acc {
                    for b in &gc {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(f: &Formula) -> u8 {
            match f {
                Formula::Or(_) => 1,
                Formula::And(_) => 2,
                _ => 3,
            }
        }
        fn write_part(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
            if prec(f) < min {
                write!(out, "({})", f)
            } else {
                write!(out, "{}", f)
            }
        }
        match self {
            Formula::Const(true) => f.write_str("true"),
            Formula::Const(false) => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{}", a),
            Formula::Not(g) => {
                f.write_str("~")?;
                write_part(f, g, 3)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let (sep, p, unit) = match self {
                    Formula::And(_) => (" & ", 2, "true"),
                    _ => (" | ", 1, "false"),
                };
                if gs.is_empty() {
                    return f.write_str(unit);
                }
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write_part(f, g, p + 1)?;
                }
                Ok(())
            }
        }
    }
}
