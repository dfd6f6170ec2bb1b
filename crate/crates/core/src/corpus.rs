//! The bundled example theories, stories and models.

use crate::bridge::SmFile;
use crate::parser;
use crate::theory::{Branch, CPTheory};

pub const PENS_CP: &str = include_str!("../../../corpus/pens.cp");
pub const PENS_STORY: &str = include_str!("../../../corpus/pens.story");
pub const EX5_CP: &str = include_str!("../../../corpus/ex5.cp");
pub const EX5_STORY: &str = include_str!("../../../corpus/ex5.story");
pub const DICE_CP: &str = include_str!("../../../corpus/dice.cp");
pub const DICE_STORY: &str = include_str!("../../../corpus/dice.story");
pub const DICE6_CP: &str = include_str!("../../../corpus/dice6.cp");
pub const DICE6_STORY: &str = include_str!("../../../corpus/dice6.story");
pub const PEN_SM: &str = include_str!("../../../corpus/pen.sm");
pub const DICE5_SM: &str = include_str!("../../../corpus/dice5.sm");

/// `(name, text)` of every bundled theory.
pub const THEORIES: &[(&str, &str)] = &[
    ("pens.cp", PENS_CP),
    ("ex5.cp", EX5_CP),
    ("dice.cp", DICE_CP),
    ("dice6.cp", DICE6_CP),
];

fn load(text: &str) -> CPTheory {
    parser::parse_theory(text).expect("bundled theory parses")
}

fn story(text: &str, theory: &CPTheory) -> Branch {
    parser::parse_story(text, theory).expect("bundled story replays")
}

pub fn pens() -> CPTheory {
    load(PENS_CP)
}

pub fn pens_story() -> (CPTheory, Branch) {
    let t = pens();
    let b = story(PENS_STORY, &t);
    (t, b)
}

pub fn ex5() -> (CPTheory, Branch) {
    let t = load(EX5_CP);
    let b = story(EX5_STORY, &t);
    (t, b)
}

pub fn dice() -> (CPTheory, Branch) {
    let t = load(DICE_CP);
    let b = story(DICE_STORY, &t);
    (t, b)
}

pub fn dice6() -> (CPTheory, Branch) {
    let t = load(DICE6_CP);
    let b = story(DICE6_STORY, &t);
    (t, b)
}

pub fn pen_model() -> SmFile {
    parser::parse_model(PEN_SM).expect("bundled model parses")
}

pub fn dice5_model() -> SmFile {
    parser::parse_model(DICE5_SM).expect("bundled model parses")
}
