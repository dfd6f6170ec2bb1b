//! Fixtures shared by the criterion benches.

use cpcause::corpus;
use cpcause::{Atom, Branch, CPTheory};

/// A bundled theory with its story and the cause/effect pair it is about.
pub struct Scenario {
    pub name: &'static str,
    pub theory: CPTheory,
    pub story: Branch,
    pub cause: Atom,
    pub effect: Atom,
}

fn scenario(name: &'static str, (theory, story): (CPTheory, Branch), cause: &str, effect: &str) -> Scenario {
    Scenario {
        name,
        theory,
        story,
        cause: Atom::new(cause),
        effect: Atom::new(effect),
    }
}

pub fn scenarios() -> Vec<Scenario> {
    vec![
        scenario("pens", corpus::pens_story(), "prof", "nopens"),
        scenario("ex5", corpus::ex5(), "c", "e"),
        scenario("dice", corpus::dice(), "throw(1,1)", "wincar"),
        scenario("dice6", corpus::dice6(), "throw(1,6)", "wincar"),
    ]
}
