//! `quizbn` subcommands: `simulate`, `validate` and `ask`.
//!
//! Every command is a plain function over paths or generic readers and
//! writers so that tests can drive it without a terminal.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use quizbn_core::adaptive::{explain, grade, marginal_risks, pick_question, posterior_entropy};
use quizbn_core::bn::validate_network;
use quizbn_core::model_io::{parse_questionnaire, Diagnostics};
use quizbn_core::simulate::{run_batch, run_generated_batch, BatchReport, GeneratorConfig, PolicySpec};
use quizbn_core::{Error, Execution, QuestionnaireModel, Session};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid questionnaire:\n{0}")]
    Document(Diagnostics),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("terminal i/o failed: {0}")]
    Terminal(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "quizbn", version, about = "Adaptive questionnaires over discrete Bayesian networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run synthetic takers through one or more selection policies.
    Simulate(SimulateArgs),
    /// Parse a questionnaire document and check its network.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Take a questionnaire interactively, answering by option number.
    Ask {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Questionnaire document to simulate.
    #[arg(
        long,
        required_unless_present = "generate",
        conflicts_with_all = ["generate", "skills", "questions", "stop_threshold"]
    )]
    pub model: Option<PathBuf>,

    /// Draw a fresh random questionnaire for every run instead of using `--model`.
    #[arg(long)]
    pub generate: bool,

    /// Skills per generated questionnaire [default: 2].
    #[arg(long)]
    pub skills: Option<usize>,

    /// Questions per generated questionnaire [default: 12].
    #[arg(long)]
    pub questions: Option<usize>,

    /// Stop threshold (bits) of generated questionnaires [default: 1].
    #[arg(long)]
    pub stop_threshold: Option<f64>,

    #[arg(long, default_value_t = 1000)]
    pub runs: usize,

    /// Comma-separated policies: ig, random[:SEED], fixed.
    #[arg(long, default_value = "ig,random,fixed")]
    pub policies: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_model(path: &Path) -> Result<QuestionnaireModel, CliError> {
    parse_questionnaire(&read(path)?).map_err(CliError::Document)
}

/// One line per problem, or a short description of a valid model.
pub fn validate(path: &Path) -> Result<String, CliError> {
    let model = load_model(path)?;
    let report = validate_network(model.network());
    if !report.is_valid() {
        return Err(CliError::Core(Error::InvalidNetwork(report)));
    }
    let m = model.metadata();
    Ok(format!(
        "ok: {} ({} skills, {} questions, {} joint skill states, stop threshold {} bits)",
        if m.title.is_empty() { "untitled" } else { &m.title },
        model.skills().len(),
        model.pool().len(),
        model.joint_skill_states(),
        model.stop_threshold()
    ))
}

pub fn simulate(args: &SimulateArgs) -> Result<BatchReport, CliError> {
    let policies = PolicySpec::parse_list(&args.policies)?;
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    if args.generate {
        let d = GeneratorConfig::default();
        let config = GeneratorConfig {
            skills: args.skills.unwrap_or(d.skills),
            questions: args.questions.unwrap_or(d.questions),
            stop_threshold: args.stop_threshold.unwrap_or(d.stop_threshold),
            ..d
        };
        return Ok(run_generated_batch(&config, args.runs, &policies, args.seed, exec)?);
    }
    let path = args.model.as_deref().expect("clap requires --model without --generate");
    let model = load_model(path)?;
    Ok(run_batch(&model, args.runs, &policies, args.seed, exec)?)
}

/// Runs `simulate` and writes the JSON report to `--out` or `stdout`.
pub fn simulate_to(args: &SimulateArgs, stdout: &mut impl Write) -> Result<BatchReport, CliError> {
    let report = simulate(args)?;
    let json = report.to_json();
    match &args.out {
        Some(p) => std::fs::write(p, json).map_err(|source| CliError::Io { path: p.clone(), source })?,
        None => stdout.write_all(json.as_bytes())?,
    }
    Ok(report)
}

/// Human-readable digest of a report.
pub fn summary_table(report: &BatchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} runs, seed {} ({})", report.runs, report.seed, report.rng);
    let _ = writeln!(
        s,
        "{:<18} {:>8} {:>8} {:>10} {:>10}",
        "policy", "mean q", "median", "grade err", "recovery"
    );
    for p in &report.summaries {
        let _ = writeln!(
            s,
            "{:<18} {:>8.3} {:>8.1} {:>10.4} {:>10.4}",
            p.policy, p.mean_questions, p.median_questions, p.mean_abs_grade_error, p.skill_recovery_rate
        );
    }
    for c in &report.comparisons {
        let _ = writeln!(
            s,
            "{} vs {}: mean difference {:.4} questions, p = {:.3e}{}",
            c.policy,
            c.baseline,
            c.mean_difference,
            c.p_value,
            if c.baseline_fewer_at_95 { " (information gain fewer at 95%)" } else { "" }
        );
    }
    s
}

/// Interactive session over `input`/`output`. Typing `q` or closing the
/// input ends the session early; the returned session is then still active.
pub fn ask<R: BufRead, W: Write>(model: &QuestionnaireModel, mut input: R, mut out: W) -> Result<Session, CliError> {
    let mut session = Session::start(model)?;
    let title = &model.metadata().title;
    if !title.is_empty() {
        writeln!(out, "{title}")?;
    }
    while session.is_active() {
        let Some(qid) = pick_question(model, &session)? else { break };
        let item = model.question(&qid).expect("picked from the pool");
        let entropy = posterior_entropy(model, session.evidence())?;
        writeln!(out)?;
        if model.metadata().explain_panel {
            for m in explain(model, &session)?.skill_posteriors {
                let states: Vec<String> =
                    m.states.iter().zip(&m.probabilities).map(|(s, p)| format!("{s} {p:.3}")).collect();
                writeln!(out, "  P({}): {}", m.skill, states.join(", "))?;
            }
        }
        writeln!(out, "Question {}: {}", session.transcript().len() + 1, item.text)?;
        for (i, o) in item.options.iter().enumerate() {
            writeln!(out, "  [{i}] {o}")?;
        }
        writeln!(out, "(entropy {entropy:.4} bits; type an option number, or q to quit)")?;
        loop {
            write!(out, "> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 || line.trim() == "q" {
                writeln!(out, "\nStopped early after {} answer(s).", session.transcript().len())?;
                return Ok(session);
            }
            let choice = match line.trim().parse::<usize>() {
                Ok(c) if c < item.options.len() => c,
                _ => {
                    writeln!(out, "Please type a number from 0 to {}.", item.options.len() - 1)?;
                    continue;
                }
            };
            match session.answer(model, &qid, choice) {
                Ok(_) => break,
                Err(Error::InconsistentEvidence) => {
                    writeln!(out, "That answer is impossible given your previous answers.")?;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let e = session.evidence();
    writeln!(out)?;
    writeln!(out, "Finished ({}) after {} question(s).", session.status().as_str(), session.transcript().len())?;
    writeln!(out, "Grade: {:.4}", grade(model, e)?)?;
    for (name, p) in marginal_risks(model, e, model.risks())? {
        writeln!(out, "  {name}: {p:.4}")?;
    }
    Ok(session)
}

