//! `cpcause`: exact queries and causal judgments over CP-logic theories.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cpcause::bridge;
use cpcause::causation::{self, DefinitionKind};
use cpcause::checks::{self, SweepReport};
use cpcause::engine;
use cpcause::parser::{self, serialize_story, serialize_theory};
use cpcause::transform;
use cpcause::{Atom, Branch, CPTheory, Error, Formula, State};

use render::Format;

#[derive(Parser)]
#[command(
    name = "cpcause",
    version,
    about = "Exact CP-logic inference with norms and graded actual causation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a theory, and optionally a story against it.
    Validate {
        theory: PathBuf,
        #[arg(long)]
        story: Option<PathBuf>,
    },
    /// Probability queries, optionally under interventions.
    Query(QueryArgs),
    /// Judge whether and how strongly C caused E in a story.
    Cause {
        #[command(flatten)]
        input: StoryInput,
        #[arg(long = "cause")]
        cause: String,
        #[arg(long)]
        effect: String,
        #[arg(long, default_value = "final")]
        definition: DefinitionKind,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rank every true atom of the story as a cause of E.
    Rank {
        #[command(flatten)]
        input: StoryInput,
        #[arg(long)]
        effect: String,
        #[arg(long, default_value = "final")]
        definition: DefinitionKind,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Translate a structural model into a theory and one story per context.
    Translate {
        model: PathBuf,
        /// Write `<stem>.cp` and `<stem>.<n>.story` here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a generated-instance sweep.
    Check {
        #[arg(long, value_enum)]
        theorem: Sweep,
        /// Overridden by CPCAUSE_SEED when set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Args)]
struct StoryInput {
    theory: PathBuf,
    /// Story file with `apply <law> -> <atom|_>` lines.
    story: Option<PathBuf>,
    /// Identify the story by its leaf instead, e.g. `prof,assistant,nopens`.
    #[arg(long, conflicts_with = "story", value_delimiter = ',')]
    leaf: Option<Vec<String>>,
}

#[derive(Args)]
struct QueryArgs {
    theory: PathBuf,
    #[arg(long, group = "what")]
    prob: Option<String>,
    /// `--cond PHI PSI` gives P(PHI | PSI).
    #[arg(long, num_args = 2, value_names = ["PHI", "PSI"], group = "what")]
    cond: Option<Vec<String>>,
    #[arg(long, group = "what")]
    dist: bool,
    /// Intervention `~atom` (make false) or `atom` (make true); repeatable.
    #[arg(long = "do", allow_hyphen_values = true)]
    interventions: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sweep {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "lemma2")]
    Lemma2,
    #[value(name = "order-invariance")]
    OrderInvariance,
}

/// Failure of a command, mapped to its exit status.
enum Failure {
    Model(Error),
    Io(PathBuf, std::io::Error),
    Counterexamples(SweepReport),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IllegalStep { .. }
        | Error::IncompleteStory { .. }
        | Error::NoSuchBranch { .. }
        | Error::AmbiguousBranch { .. }
        | Error::InvalidBranch { .. } => 3,
        Error::ConditionImpossible => 4,
        Error::CEnotInLeaf { .. }
        | Error::CEnotInWorld { .. }
        | Error::NoLawForC { .. }
        | Error::MultipleLawsForC { .. }
        | Error::StrictNormForbidden { .. }
        | Error::AmbiguousTypicality { .. } => 5,
        _ => 2,
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_theory(path: &Path) -> Result<CPTheory, Failure> {
    Ok(parser::parse_theory_file(&read(path)?, &path.display().to_string())?)
}

fn load_story(input: &StoryInput) -> Result<(CPTheory, Branch), Failure> {
    let theory = load_theory(&input.theory)?;
    let branch = match (&input.story, &input.leaf) {
        (Some(path), _) => parser::parse_story(&read(path)?, &theory)?,
        (None, Some(atoms)) => {
            let leaf: State = atoms.iter().map(|a| a.trim()).filter(|a| !a.is_empty()).collect();
            parser::branch_from_leaf(&theory, &leaf)?
        }
        (None, None) => {
            return Err(Failure::Model(Error::InvalidBranch {
                reason: "give a story file or --leaf".into(),
            }))
        }
    };
    Ok((theory, branch))
}

fn warn_nonstratified(theory: &CPTheory) {
    for w in engine::nonstratified_warnings(theory) {
        eprintln!("warning: {}", w);
    }
}

fn validate(theory_path: &Path, story: Option<&Path>) -> Outcome {
    let theory = load_theory(theory_path)?;
    warn_nonstratified(&theory);
    println!("theory OK: {} laws over {} atoms", theory.len(), theory.atoms().len());
    if let Some(path) = story {
        let b = parser::parse_story(&read(path)?, &theory)?;
        let p = b.probability(&theory);
        println!(
            "story OK: {} steps, leaf {}, probability {}",
            b.steps().len(),
            b.leaf(),
            render::exact_and_decimal(&p)
        );
    }
    Ok(())
}

fn intervene(mut theory: CPTheory, specs: &[String]) -> Result<CPTheory, Failure> {
    for spec in specs {
        let (negative, name) = match spec.strip_prefix(['~', '-']) {
            Some(rest) => (true, rest),
            None => (false, spec.strip_prefix('+').unwrap_or(spec)),
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(Failure::Model(Error::Syntax {
                span: cpcause::SourceSpan::new(1, 1),
                message: format!("`--do {}` names no atom", spec),
            }));
        }
        let atom = Atom::new(name);
        theory = if negative {
            transform::intervene_neg(&theory, &atom)
        } else {
            transform::intervene_pos(&theory, &atom)
        };
    }
    Ok(theory)
}

fn query(args: &QueryArgs) -> Outcome {
    let theory = intervene(load_theory(&args.theory)?, &args.interventions)?;
    warn_nonstratified(&theory);
    if args.dist {
        render::distribution(&engine::exact_distribution(&theory), args.format);
        return Ok(());
    }
    let (label, value) = match (&args.prob, &args.cond) {
        (Some(phi), _) => {
            let f: Formula = parser::parse_formula(phi)?;
            (format!("P({})", f), engine::prob(&theory, &f))
        }
        (None, Some(pair)) => {
            let f = parser::parse_formula(&pair[0])?;
            let g = parser::parse_formula(&pair[1])?;
            (format!("P({} | {})", f, g), engine::cond_prob(&theory, &f, &g)?)
        }
        (None, None) => ("P(true)".to_string(), engine::exact_distribution(&theory).total()),
    };
    render::value(&label, &value, args.format);
    Ok(())
}

fn diagnostics(theory: &CPTheory, b: &Branch, c: &Atom, e: &Atom) -> Vec<String> {
    let mut out: Vec<String> = engine::nonstratified_warnings(theory)
        .iter()
        .map(|w| w.to_string())
        .collect();
    if let Ok(Some((canonical, reversed))) = transform::intrinsic_order_diagnostic(theory, b, c, e) {
        out.push(format!(
            "intrinsic laws depend on the off-story order: {:?} canonical, {:?} reversed",
            canonical, reversed
        ));
    }
    let excluded = transform::excluded_by_norms(theory, b);
    if !excluded.is_empty() {
        out.push(format!("story choices of law(s) {:?} violate a strict norm", excluded));
    }
    out
}

fn cause(input: &StoryInput, c: &str, e: &str, kind: DefinitionKind, format: Format) -> Outcome {
    let (theory, b) = load_story(input)?;
    let (c, e) = (Atom::new(c), Atom::new(e));
    let verdict = causation::cause(kind, &theory, &b, &c, &e)?;
    render::verdict(&verdict, &diagnostics(&theory, &b, &c, &e), format);
    Ok(())
}

fn rank(input: &StoryInput, e: &str, kind: DefinitionKind, format: Format) -> Outcome {
    let (theory, b) = load_story(input)?;
    let e = Atom::new(e);
    let entries = causation::rank_causes(&theory, &b, &e, kind)?;
    render::ranking(&entries, &e, kind, format);
    Ok(())
}

fn translate(path: &Path, out_dir: Option<&Path>) -> Outcome {
    let file = parser::parse_model(&read(path)?)?;
    let theory = bridge::translate(&file.model);
    let stories: Vec<(String, String)> = file
        .contexts
        .iter()
        .map(|u| {
            let label: Vec<String> = u
                .values()
                .iter()
                .map(|(k, v)| format!("{}={}", k, u8::from(*v)))
                .collect();
            (
                label.join(", "),
                serialize_story(bridge::story_for_context(&file.model, u).steps()),
            )
        })
        .collect();
    match out_dir {
        None => {
            print!("{}", serialize_theory(&theory));
            for (label, story) in &stories {
                println!("% story for context {}", label);
                print!("{}", story);
            }
        }
        Some(dir) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
            let write = |name: String, text: &str| -> Outcome {
                let target = dir.join(name);
                fs::write(&target, text).map_err(|e| Failure::Io(target.clone(), e))?;
                println!("wrote {}", target.display());
                Ok(())
            };
            fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
            write(format!("{}.cp", stem), &serialize_theory(&theory))?;
            for (i, (_, story)) in stories.iter().enumerate() {
                write(format!("{}.{}.story", stem, i), story)?;
            }
        }
    }
    Ok(())
}

fn seed_from_env(flag: u64) -> Result<u64, Failure> {
    match std::env::var("CPCAUSE_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Failure::Model(Error::Syntax {
                span: cpcause::SourceSpan::new(1, 1),
                message: format!("CPCAUSE_SEED `{}` is not an unsigned integer", text),
            })
        }),
        Err(_) => Ok(flag),
    }
}

fn check(sweep: Sweep, seed: u64, count: Option<usize>) -> Outcome {
    let seed = seed_from_env(seed)?;
    let (name, report) = match sweep {
        Sweep::One => ("theorem 1", checks::theorem1(seed, count.unwrap_or(100))?),
        Sweep::Two => ("theorem 2", checks::theorem2(seed, count.unwrap_or(200))?),
        Sweep::Lemma2 => ("lemma 2", checks::lemma2(seed, count.unwrap_or(100))?),
        Sweep::OrderInvariance => ("order invariance", checks::order_invariance(seed, count.unwrap_or(500))),
    };
    println!(
        "{} (seed {}): {} instances, {} counterexamples",
        name,
        seed,
        report.checked,
        report.counterexamples.len()
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Counterexamples(report))
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { theory, story } => validate(&theory, story.as_deref()),
        Command::Query(args) => query(&args),
        Command::Cause {
            input,
            cause: c,
            effect,
            definition,
            format,
        } => cause(&input, &c, &effect, definition, format),
        Command::Rank {
            input,
            effect,
            definition,
            format,
        } => rank(&input, &effect, definition, format),
        Command::Translate { model, out_dir } => translate(&model, out_dir.as_deref()),
        Command::Check { theorem, seed, count } => check(theorem, seed, count),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("error[{}]: {}", e.name(), e);
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            ExitCode::from(2)
        }
        Err(Failure::Counterexamples(report)) => {
            if let Some(first) = report.counterexamples.first() {
                eprintln!("first counterexample:\n{}", first);
            }
            ExitCode::from(6)
        }
    }
}
