//! Causal probabilistic logic with norms, and graded actual causation.
//!
//! A [`CPTheory`] is a set of causal laws `head <- body` whose heads are
//! probability-annotated disjunctions, optionally carrying normative
//! probabilities in braces. The [`engine`] evaluates theories exactly over
//! rationals, [`transform`] implements the story-relative refinements, and
//! [`causation`] grades how strongly one event caused another. The
//! [`bridge`] module relates theories to extended structural models.
//!
//! ```
//! use cpcause::{corpus, causation, Atom};
//!
//! let (theory, story) = corpus::pens_story();
//! let v = causation::cause_final(&theory, &story, &Atom::new("prof"), &Atom::new("nopens")).unwrap();
//! assert_eq!(v.strength, cpcause::prob::ratio(99, 100));
//! ```

pub mod bridge;
pub mod causation;
pub mod checks;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod formula;
pub mod generate;
pub mod parser;
pub mod prob;
pub mod story;
pub mod theory;
pub mod transform;

pub use causation::{CauseVerdict, DefinitionKind};
pub use engine::{Distribution, OrderPolicy};
pub use error::{Error, Result, SourceSpan};
pub use formula::Formula;
pub use prob::Prob;
pub use theory::{Atom, Body, Branch, CPLaw, CPTheory, Choice, Disjunct, LawId, Literal, Outcome, State};
