use clap::ValueEnum;
use serde_json::{json, Value};

use cpcause::causation::{CauseVerdict, RankEntry};
use cpcause::prob::{render_decimal, render_fraction};
use cpcause::{Atom, DefinitionKind, Distribution, Prob};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn exact_and_decimal(p: &Prob) -> String {
    let exact = render_fraction(p);
    let decimal = render_decimal(p);
    if exact == decimal {
        exact
    } else {
        format!("{} ({})", exact, decimal)
    }
}

fn number(p: &Prob) -> Value {
    json!({ "rational": render_fraction(p), "decimal": render_decimal(p) })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

pub fn value(label: &str, p: &Prob, format: Format) {
    match format {
        Format::Text => println!("{} = {}", label, exact_and_decimal(p)),
        Format::Json => print_json(&json!({
            "query": label,
            "rational": render_fraction(p),
            "decimal": render_decimal(p),
        })),
    }
}

pub fn distribution(d: &Distribution, format: Format) {
    match format {
        Format::Text => {
            for (leaf, p) in d.entries() {
                println!("{}\t{}", leaf, exact_and_decimal(p));
            }
            println!("% {} leaves, total {}", d.len(), exact_and_decimal(&d.total()));
        }
        Format::Json => {
            let leaves: Vec<Value> = d
                .entries()
                .iter()
                .map(|(leaf, p)| {
                    json!({
                        "leaf": leaf.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
                        "rational": render_fraction(p),
                        "decimal": render_decimal(p),
                    })
                })
                .collect();
            print_json(&json!({ "leaves": leaves, "total": render_fraction(&d.total()) }));
        }
    }
}

fn verdict_json(v: &CauseVerdict, diagnostics: &[String]) -> Value {
    json!({
        "cause": v.cause.as_str(),
        "effect": v.effect.as_str(),
        "definition": v.definition.name(),
        "strength_rational": render_fraction(&v.strength),
        "strength_decimal": render_decimal(&v.strength),
        "is_cause": v.is_cause,
        "factors": v.factors.as_ref().map(|(a, b)| vec![number(a), number(b)]),
        "diagnostics": diagnostics,
    })
}

pub fn verdict(v: &CauseVerdict, diagnostics: &[String], format: Format) {
    match format {
        Format::Json => print_json(&verdict_json(v, diagnostics)),
        Format::Text => {
            println!("cause:      {}", v.cause);
            println!("effect:     {}", v.effect);
            println!("definition: {}", v.definition);
            println!("strength:   {}", exact_and_decimal(&v.strength));
            if let Some((a, b)) = &v.factors {
                println!("factors:    {} * {}", exact_and_decimal(a), exact_and_decimal(b));
            }
            println!("verdict:    {}", if v.is_cause { "cause" } else { "not a cause" });
            for d in diagnostics {
                println!("note:       {}", d);
            }
        }
    }
}

pub fn ranking(entries: &[RankEntry], effect: &Atom, kind: DefinitionKind, format: Format) {
    match format {
        Format::Json => {
            let rows: Vec<Value> = entries
                .iter()
                .map(|entry| match &entry.verdict {
                    Ok(v) => verdict_json(v, &[]),
                    Err(e) => json!({
                        "cause": entry.cause.as_str(),
                        "effect": effect.as_str(),
                        "definition": kind.name(),
                        "strength_rational": null,
                        "strength_decimal": null,
                        "is_cause": null,
                        "factors": null,
                        "diagnostics": [format!("{}: {}", e.name(), e)],
                    }),
                })
                .collect();
            print_json(&Value::Array(rows));
        }
        Format::Text => {
            let width = entries.iter().map(|e| e.cause.as_str().len()).max().unwrap_or(5).max(5);
            println!(
                "{:>4}  {:<width$}  {:<10}  {:<11}  exact",
                "rank", "cause", "strength", "verdict"
            );
            for (i, entry) in entries.iter().enumerate() {
                match &entry.verdict {
                    Ok(v) => println!(
                        "{:>4}  {:<width$}  {:<10}  {:<11}  {}",
                        i + 1,
                        entry.cause.as_str(),
                        render_decimal(&v.strength),
                        if v.is_cause { "cause" } else { "not a cause" },
                        render_fraction(&v.strength)
                    ),
                    Err(e) => println!(
                        "{:>4}  {:<width$}  error[{}]: {}",
                        "-",
                        entry.cause.as_str(),
                        e.name(),
                        e
                    ),
                }
            }
        }
    }
}
