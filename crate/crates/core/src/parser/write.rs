use std::fmt::Write;

use num_traits::One;

use crate::bridge::{Context, StructuralModel};
use crate::prob::render_exact;
use crate::theory::{CPLaw, CPTheory, Choice, Literal};

/// One law per line, in a form `parse_theory` reads back to an equal theory.
pub fn serialize_theory(theory: &CPTheory) -> String {
    let mut out = String::new();
    for law in theory.laws() {
        write_law(&mut out, law);
        out.push('\n');
    }
    out
}

fn write_law(out: &mut String, law: &CPLaw) {
    let sole_certain = law.head.len() == 1 && law.head[0].prob.is_one();
    for (i, d) in law.head.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(d.atom.as_str());
        if !sole_certain {
            let _ = write!(out, ":{}", render_exact(&d.prob));
        }
        if let Some(n) = &d.norm {
            let _ = write!(out, " {{{}}}", render_exact(n));
        }
    }
    out.push_str(" <-");
    for (i, clause) in law.body.clauses.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        if clause.len() == 1 {
            write_literal(out, &clause[0]);
        } else {
            out.push('(');
            for (j, lit) in clause.iter().enumerate() {
                if j > 0 {
                    out.push_str(" | ");
                }
                write_literal(out, lit);
            }
            out.push(')');
        }
    }
    if law.body.is_empty() {
        out.push_str(" .");
    } else {
        out.push('.');
    }
}

fn write_literal(out: &mut String, lit: &Literal) {
    if !lit.positive {
        out.push('~');
    }
    out.push_str(lit.atom.as_str());
}

pub fn serialize_story(steps: &[Choice]) -> String {
    steps
        .iter()
        .map(|c| format!("apply {} -> {}\n", c.law, c.outcome))
        .collect()
}

pub fn serialize_model(model: &StructuralModel, contexts: &[Context]) -> String {
    let mut out = String::new();
    for v in model.innate() {
        let _ = write!(out, "innate {} : {}", v.name, render_exact(&v.prob));
        if let Some(n) = &v.norm {
            let _ = write!(out, " {{{}}}", render_exact(n));
        }
        out.push('\n');
    }
    for v in model.derived() {
        let _ = writeln!(out, "derived {} = {}", v.name, v.formula);
    }
    for ctx in contexts {
        let parts: Vec<String> = ctx
            .values()
            .iter()
            .map(|(k, v)| format!("{}={}", k, u8::from(*v)))
            .collect();
        let _ = writeln!(out, "context {}", parts.join(", "));
    }
    out
}
