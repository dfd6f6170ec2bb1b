//! Text formats: theories, stories, query formulas and structural models.
//!
//! Theory grammar (`%` starts a line comment):
//!
//! ```text
//! theory   := (law ".")*
//! law      := head "<-" [body]
//! head     := disjunct (";" disjunct)*
//! disjunct := atom [":" prob] ["{" prob "}"]
//! body     := clause ("," clause)*
//! clause   := lit | "(" lit ("|" lit)* ")"
//! lit      := ["~"] atom
//! ```
//!
//! Stories are lines `apply <law-id> -> <atom>` or `apply <law-id> -> _`.

mod lexer;
mod write;

use std::collections::BTreeMap;

use crate::bridge::{Context, DerivedVar, InnateVar, SmFile, StructuralModel};
use crate::error::{Error, Result, SourceSpan};
use crate::formula::Formula;
use crate::prob::{self, Prob};
use crate::story;
use crate::theory::{Atom, Body, Branch, CPLaw, CPTheory, Choice, Disjunct, Literal, Outcome};

use lexer::{Cursor, Tok};

pub use crate::story::branch_from_leaf;
pub use write::{serialize_model, serialize_story, serialize_theory};

pub fn parse_theory(text: &str) -> Result<CPTheory> {
    let mut cur = Cursor::new(text)?;
    let mut laws = Vec::new();
    let mut spans = Vec::new();
    while !cur.at_eof() {
        spans.push(cur.span());
        laws.push(parse_law(&mut cur)?);
        cur.expect(&Tok::Dot)?;
    }
    CPTheory::new(laws).map_err(|e| match &e {
        Error::ProbabilitySum { law, .. }
        | Error::ProbabilityRange { law, .. }
        | Error::DuplicateHeadAtom { law, .. } => {
            let span = spans[*law].clone();
            e.attach_span(span)
        }
        _ => e,
    })
}

/// Like [`parse_theory`], with `file` recorded in error spans.
pub fn parse_theory_file(text: &str, file: &str) -> Result<CPTheory> {
    parse_theory(text).map_err(|e| e.with_file(file))
}

fn parse_law(cur: &mut Cursor) -> Result<CPLaw> {
    let mut head = Vec::new();
    let mut bare = None;
    loop {
        let span = cur.span();
        let atom = parse_atom(cur)?;
        let prob = if cur.eat(&Tok::Colon) {
            parse_prob(cur)?
        } else {
            bare.get_or_insert(span);
            prob::one()
        };
        let norm = if cur.eat(&Tok::LBrace) {
            let n = parse_prob(cur)?;
            cur.expect(&Tok::RBrace)?;
            Some(n)
        } else {
            None
        };
        head.push(Disjunct { atom, prob, norm });
        if !cur.eat(&Tok::Semi) {
            break;
        }
    }
    if let (Some(span), true) = (bare, head.len() > 1) {
        return Err(Error::syntax(
            span,
            "a disjunct without a probability must be the only one in its head",
        ));
    }
    cur.expect(&Tok::Larrow)?;
    let mut body = Body::truth();
    if *cur.peek() != Tok::Dot {
        loop {
            body.clauses.push(parse_clause(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    Ok(CPLaw::new(head, body))
}

fn parse_clause(cur: &mut Cursor) -> Result<Vec<Literal>> {
    if cur.eat(&Tok::LParen) {
        let mut lits = vec![parse_literal(cur)?];
        while cur.eat(&Tok::Bar) {
            lits.push(parse_literal(cur)?);
        }
        cur.expect(&Tok::RParen)?;
        Ok(lits)
    } else {
        Ok(vec![parse_literal(cur)?])
    }
}

fn parse_literal(cur: &mut Cursor) -> Result<Literal> {
    let positive = !cur.eat(&Tok::Tilde);
    Ok(Literal {
        atom: parse_atom(cur)?,
        positive,
    })
}

fn parse_atom(cur: &mut Cursor) -> Result<Atom> {
    match cur.peek().clone() {
        Tok::Ident(name) => {
            cur.next();
            Ok(Atom::new(name))
        }
        _ => Err(cur.unexpected("an atom")),
    }
}

fn parse_prob(cur: &mut Cursor) -> Result<Prob> {
    match cur.peek().clone() {
        Tok::Number(text) => {
            let span = cur.span();
            cur.next();
            prob::parse_prob(&text).ok_or_else(|| Error::syntax(span, format!("malformed probability `{}`", text)))
        }
        _ => Err(cur.unexpected("a probability")),
    }
}

/// Parses the step list of a story and replays it against `theory`.
pub fn parse_story(text: &str, theory: &CPTheory) -> Result<Branch> {
    story::replay(theory, &parse_steps(text)?)
}

/// Parses story steps without replaying them.
pub fn parse_steps(text: &str) -> Result<Vec<Choice>> {
    let mut cur = Cursor::new(text)?;
    let mut steps = Vec::new();
    while !cur.at_eof() {
        match cur.peek() {
            Tok::Ident(k) if k == "apply" => {
                cur.next();
            }
            _ => return Err(cur.unexpected("`apply`")),
        }
        let law = match cur.next() {
            (Tok::Number(n), span) => n
                .parse::<usize>()
                .map_err(|_| Error::syntax(span, format!("`{}` is not a law id", n)))?,
            (tok, span) => {
                return Err(Error::syntax(
                    span,
                    format!("expected a law id, found {}", tok.describe()),
                ))
            }
        };
        cur.expect(&Tok::Rarrow)?;
        let outcome = if cur.eat(&Tok::Underscore) {
            Outcome::Empty
        } else {
            Outcome::Atom(parse_atom(&mut cur)?)
        };
        steps.push(Choice::new(law, outcome));
    }
    Ok(steps)
}

/// Formulas use `~`, `&`, `|` and parentheses; `&` binds tighter than `|`.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut cur = Cursor::new(text)?;
    let f = parse_or(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of formula"));
    }
    Ok(f)
}

fn parse_or(cur: &mut Cursor) -> Result<Formula> {
    let mut parts = vec![parse_and(cur)?];
    while cur.eat(&Tok::Bar) {
        parts.push(parse_and(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::Or(parts)
    })
}

fn parse_and(cur: &mut Cursor) -> Result<Formula> {
    let mut parts = vec![parse_unary(cur)?];
    while cur.eat(&Tok::Amp) {
        parts.push(parse_unary(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::And(parts)
    })
}

fn parse_unary(cur: &mut Cursor) -> Result<Formula> {
    if cur.eat(&Tok::Tilde) {
        return Ok(Formula::not(parse_unary(cur)?));
    }
    if cur.eat(&Tok::LParen) {
        let f = parse_or(cur)?;
        cur.expect(&Tok::RParen)?;
        return Ok(f);
    }
    Ok(Formula::Atom(parse_atom(cur)?))
}

/// Structural-model files:
///
/// ```text
/// innate <name> : <prob> [{<prob>}]
/// derived <name> = <expr over ~ & | ( )>
/// context <name>=<0|1> (, <name>=<0|1>)*
/// ```
pub fn parse_model(text: &str) -> Result<SmFile> {
    let mut cur = Cursor::new(text)?;
    let mut innate = Vec::new();
    let mut derived = Vec::new();
    let mut raw_contexts = Vec::new();
    let mut spans: BTreeMap<Atom, SourceSpan> = BTreeMap::new();
    while !cur.at_eof() {
        let keyword = match cur.peek() {
            Tok::Ident(k) if matches!(k.as_str(), "innate" | "derived" | "context") => k.clone(),
            _ => return Err(cur.unexpected("`innate`, `derived` or `context`")),
        };
        cur.next();
        match keyword.as_str() {
            "innate" => {
                let span = cur.span();
                let name = parse_atom(&mut cur)?;
                cur.expect(&Tok::Colon)?;
                let prob = parse_prob(&mut cur)?;
                let norm = if cur.eat(&Tok::LBrace) {
                    let n = parse_prob(&mut cur)?;
                    cur.expect(&Tok::RBrace)?;
                    Some(n)
                } else {
                    None
                };
                spans.entry(name.clone()).or_insert(span);
                innate.push(InnateVar { name, prob, norm });
            }
            "derived" => {
                let span = cur.span();
                let name = parse_atom(&mut cur)?;
                cur.expect(&Tok::Eq)?;
                let formula = parse_or(&mut cur)?;
                spans.entry(name.clone()).or_insert(span);
                derived.push(DerivedVar { name, formula });
            }
            _ => {
                let mut assignment = Vec::new();
                loop {
                    let span = cur.span();
                    let name = parse_atom(&mut cur)?;
                    cur.expect(&Tok::Eq)?;
                    let value = match cur.next() {
                        (Tok::Number(n), _) if n == "0" => false,
                        (Tok::Number(n), _) if n == "1" => true,
                        (tok, span) => {
                            return Err(Error::syntax(
                                span,
                                format!("expected 0 or 1, found {}", tok.describe()),
                            ))
                        }
                    };
                    assignment.push((name, value, span));
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                raw_contexts.push(assignment);
            }
        }
    }
    let model = StructuralModel::new(innate, derived).map_err(|e| match e {
        Error::UnknownVariable { variable, .. } => Error::UnknownVariable {
            span: spans.get(&variable).cloned(),
            variable,
        },
        Error::DuplicateVariable { variable, .. } => Error::DuplicateVariable {
            span: spans.get(&variable).cloned(),
            variable,
        },
        other => other,
    })?;
    let mut contexts = Vec::new();
    for raw in raw_contexts {
        let mut values = BTreeMap::new();
        for (name, value, span) in raw {
            if !model.is_innate(&name) {
                return Err(Error::UnknownVariable {
                    variable: name,
                    span: Some(span),
                });
            }
            values.insert(name, value);
        }
        contexts.push(Context::new(&model, values)?);
    }
    Ok(SmFile { model, contexts })
}
