//! `bccsp`: command-line front end.
//!
//! Exit codes: 0 when the property holds, 1 when it is refuted, 2 on usage
//! or internal errors.

use std::process::ExitCode;

use bccsp::axioms::{build_system, check_fixture, check_proof, default_scheme, saturate, soundness_sweep, Equation, ProofScript, Verdict};
use bccsp::eliminate::eliminate_in;
use bccsp::equivalences::{Checker, Refutation, Relation};
use bccsp::models::{goal_equation, independence_report, search_model, FiniteModel, SearchOutcome};
use bccsp::semantics::build_lts;
use bccsp::syntax::parse;
use bccsp::witness::{negative_evidence_report_in, FamilyKind};
use bccsp::{Alphabet, Lang, Mode, Term};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bccsp", version, about = "BCCSP with parallel composition: semantics, equivalences, axioms and models")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Actions, comma separated. Without it the alphabet is {a, b} plus any
    /// other action names the closed terms on the command line use.
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// Synchronising semantics: each action gets a complement `a'`, and `tau` is available.
    #[arg(long, global = true)]
    sync: bool,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print it in canonical form.
    Parse { term: String },
    /// Print the transition system of a closed term.
    Lts {
        term: String,
        #[arg(long)]
        dot: bool,
    },
    /// Size, depth and norm.
    Metrics { term: String },
    /// Decide `p ~rel q` for closed terms.
    Equiv { relation: String, p: String, q: String },
    /// Every relation of the spectrum on one pair.
    Spectrum {
        p: String,
        q: String,
        #[arg(long, default_value_t = 2)]
        max_n: u32,
    },
    /// Remove parallel composition from a closed term.
    Eliminate {
        #[arg(long)]
        system: String,
        term: String,
        /// Also print a proof script of the elimination.
        #[arg(long)]
        proof: bool,
    },
    /// List the instantiated axioms of a system.
    Axioms {
        system: String,
        /// Close under substituting 0 for variables.
        #[arg(long)]
        saturate: bool,
    },
    /// Look for closed counterexamples to the axioms of a system, or to one equation.
    Soundness {
        system: Option<String>,
        #[arg(long, requires_all = ["lhs", "rhs"])]
        relation: Option<String>,
        #[arg(long)]
        lhs: Option<String>,
        #[arg(long)]
        rhs: Option<String>,
    },
    /// Check proof scripts from a file or a shipped fixture.
    ProveCheck {
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        fixture: Option<String>,
    },
    /// Finite models.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Check the equation families behind the negative results.
    Witness {
        #[arg(long, default_value = "interleaving")]
        kind: String,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Check that a model satisfies a system and refutes a goal.
    Check {
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, conflicts_with = "fixture")]
        file: Option<String>,
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        goal: String,
    },
    /// Search for such a model with exactly `carrier` elements.
    Search {
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 3)]
        carrier: usize,
        #[arg(long, default_value_t = 5_000_000)]
        budget: u64,
    },
}

type Res<T> = Result<T, String>;

/// Writes to stdout. A closed pipe (`bccsp ... | head`) ends the process quietly.
macro_rules! out {
    ($w:ident $($rest:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = $w!(std::io::stdout() $($rest)*) {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
            std::process::exit(0);
        }
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Identifiers in term text, with complement marks removed.
fn idents(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            cur.push(ch);
        } else {
            if cur.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') && cur != "tau" {
                out.push(std::mem::take(&mut cur));
            }
            cur.clear();
        }
    }
    out
}

impl Global {
    /// The language for a command. `closed` lists term arguments that must be
    /// closed, whose identifiers therefore all name actions.
    fn lang(&self, closed: &[&str]) -> Res<Lang> {
        let mut names: Vec<String> = match &self.alphabet {
            Some(s) => s.split(',').map(|a| a.trim().to_string()).filter(|a| !a.is_empty()).collect(),
            None => vec!["a".into(), "b".into()],
        };
        if self.alphabet.is_none() {
            for t in closed {
                for x in idents(t) {
                    if !names.contains(&x) {
                        names.push(x);
                    }
                }
            }
        }
        if self.sync {
            let alphabet = Alphabet::sync(&names).map_err(|e| e.to_string())?;
            Lang::new(alphabet, Mode::CcsSync).map_err(|e| e.to_string())
        } else {
            Ok(Lang::interleaving(Alphabet::new(&names).map_err(|e| e.to_string())?))
        }
    }

    fn json(&self) -> bool {
        self.emit == Emit::Json
    }

    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn term(text: &str, lang: &Lang) -> Res<Term> {
    parse(text, lang.alphabet()).map_err(|e| format!("`{text}`: {e}"))
}

fn err(e: bccsp::Error) -> String {
    e.to_string()
}

fn print_json(v: &Value) {
    out!(writeln, "{}", serde_json::to_string_pretty(v).expect("json renders"));
}

fn run(cli: &Cli) -> Res<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Parse { term: text } => {
            let lang = g.lang(&[])?;
            let t = term(text, &lang)?;
            if g.json() {
                let vars: Vec<String> = t.vars().iter().map(|x| x.to_string()).collect();
                print_json(&json!({ "term": t.to_string(), "closed": t.is_closed(), "vars": vars }));
            } else {
                out!(writeln, "{t}");
            }
            Ok(true)
        }
        Command::Lts { term: text, dot } => {
            let lang = g.lang(&[text])?;
            let lts = build_lts(&term(text, &lang)?, &lang).map_err(err)?;
            if g.json() {
                print_json(&lts.to_json());
            } else if *dot {
                out!(write, "{}", lts.to_dot());
            } else {
                out!(writeln, "{} states, {} transitions", lts.states.len(), lts.transitions.len());
                for (s, a, d) in &lts.transitions {
                    out!(writeln, "  {}  --{a}->  {}", lts.states[*s], lts.states[*d]);
                }
            }
            Ok(true)
        }
        Command::Metrics { term: text } => {
            let lang = g.lang(&[])?;
            let m = term(text, &lang)?.metrics();
            if g.json() {
                print_json(&json!({ "size": m.size, "depth": m.depth, "norm": m.norm }));
            } else {
                out!(writeln, "size {}  depth {}  norm {}", m.size, m.depth, m.norm);
            }
            Ok(true)
        }
        Command::Equiv { relation, p, q } => {
            let rel: Relation = relation.parse().map_err(err)?;
            let lang = g.lang(&[p, q])?;
            let (p, q) = (term(p, &lang)?, term(q, &lang)?);
            let eq = Checker::new(&lang).equivalent(&p, &q, rel).map_err(err)?;
            if g.json() {
                print_json(&json!({ "relation": rel.to_string(), "p": p.to_string(), "q": q.to_string(), "equivalent": eq }));
            } else {
                out!(writeln, "{p}  {}~{rel}  {q}", if eq { "" } else { "!" });
            }
            Ok(eq)
        }
        Command::Spectrum { p, q, max_n } => {
            let lang = g.lang(&[p, q])?;
            let (p, q) = (term(p, &lang)?, term(q, &lang)?);
            let v = Checker::new(&lang).spectrum_vector(&p, &q, *max_n).map_err(err)?;
            if g.json() {
                let entries: serde_json::Map<String, Value> =
                    v.entries.iter().map(|(r, b)| (r.to_string(), Value::Bool(*b))).collect();
                print_json(&json!({ "p": p.to_string(), "q": q.to_string(), "relations": entries }));
            } else {
                for (r, b) in &v.entries {
                    out!(writeln, "{:>4}  {}", r.to_string(), if *b { "yes" } else { "no" });
                }
            }
            Ok(true)
        }
        Command::Eliminate { system, term: text, proof } => {
            let lang = g.lang(&[text])?;
            let e = eliminate_in(&term(text, &lang)?, system, &lang, *proof).map_err(err)?;
            if g.json() {
                print_json(&json!({
                    "result": e.result.to_string(),
                    "rules": e.rules(),
                    "proof": e.proof.as_ref().map(ProofScript::to_json),
                }));
            } else {
                out!(writeln, "{}", e.result);
                if let Some(ps) = &e.proof {
                    print_json(&ps.to_json());
                }
            }
            Ok(true)
        }
        Command::Axioms { system, saturate: sat } => {
            let lang = g.lang(&[])?;
            let mut sys = build_system(system, &lang).map_err(err)?;
            if *sat {
                sys = saturate(&sys);
            }
            if g.json() {
                print_json(&sys.to_json());
            } else {
                out!(writeln, "{} ({} equations, sound for {})", sys.name, sys.len(), sys.relation);
                for e in &sys.equations {
                    out!(writeln, "  {e}");
                }
            }
            Ok(true)
        }
        Command::Soundness { system, relation, lhs, rhs } => soundness(g, system.as_deref(), relation.as_deref(), lhs.as_deref(), rhs.as_deref()),
        Command::ProveCheck { file, fixture } => prove_check(g, file.as_deref(), fixture.as_deref()),
        Command::Model(m) => model(g, m),
        Command::Witness { kind, max_n } => {
            let kind: FamilyKind = kind.parse().map_err(err)?;
            let lang = match (&g.alphabet, kind) {
                (None, FamilyKind::Sync) => Lang::sync_a(),
                (None, FamilyKind::Interleaving) => Lang::ab(),
                _ => g.lang(&[])?,
            };
            let r = negative_evidence_report_in(kind, *max_n, &lang).map_err(err)?;
            if g.json() {
                print_json(&serde_json::to_value(&r).expect("report serialises"));
            } else {
                for row in &r.rows {
                    out!(writeln, "N={}  {}", row.n, row.equation);
                    for c in &row.checks {
                        out!(writeln, "  {:<17} {}  {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail);
                    }
                }
                match r.failure() {
                    None => out!(writeln, "all checks pass for N = 1..{}", r.max_n),
                    Some((n, c)) => out!(writeln, "failed at N={n}: {}", c.name),
                }
            }
            Ok(r.passed())
        }
    }
}

fn soundness(g: &Global, system: Option<&str>, relation: Option<&str>, lhs: Option<&str>, rhs: Option<&str>) -> Res<bool> {
    let lang = g.lang(&[])?;
    let scheme = default_scheme(&lang);
    let results: Vec<(String, Refutation)> = match (system, relation, lhs, rhs) {
        (Some(s), None, None, None) => {
            let sys = build_system(s, &lang).map_err(err)?;
            soundness_sweep(&sys, &scheme, g.jobs()).map_err(err)?
        }
        (None, Some(r), Some(l), Some(rh)) => {
            let rel: Relation = r.parse().map_err(err)?;
            let e = Equation::new("equation", term(l, &lang)?, term(rh, &lang)?);
            let out = bccsp::axioms::check_sound(&e, rel, &scheme, &mut Checker::new(&lang)).map_err(err)?;
            vec![(format!("{e}"), out)]
        }
        _ => return Err("give a system, or --relation with --lhs and --rhs".into()),
    };
    let refuted: Vec<&(String, Refutation)> = results.iter().filter(|(_, r)| r.is_refuted()).collect();
    let show = |r: &Refutation| match r {
        Refutation::Refuted(s) => s.iter().map(|(x, t)| format!("{x} := {t}")).collect::<Vec<_>>().join(", "),
        Refutation::NotRefuted { tried } => format!("no counterexample in {tried} substitutions"),
    };
    if g.json() {
        let rows: Vec<Value> = results
            .iter()
            .map(|(id, r)| json!({ "id": id, "refuted": r.is_refuted(), "detail": show(r) }))
            .collect();
        print_json(&json!({ "checked": results.len(), "refuted": refuted.len(), "results": rows }));
    } else {
        for (id, r) in &refuted {
            out!(writeln, "REFUTED {id}: {}", show(r));
        }
        if results.len() == 1 && refuted.is_empty() {
            out!(writeln, "{}: {}", results[0].0, show(&results[0].1));
        }
        out!(writeln, "{} checked, {} refuted", results.len(), refuted.len());
    }
    Ok(refuted.is_empty())
}

fn prove_check(g: &Global, file: Option<&str>, fixture: Option<&str>) -> Res<bool> {
    let verdicts: Vec<(String, Verdict)> = match (file, fixture) {
        (_, Some(name)) => check_fixture(name).map_err(err)?,
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
            let items = match v {
                Value::Array(items) => items,
                one => vec![one],
            };
            let mut out = Vec::new();
            for item in &items {
                let ps = ProofScript::from_json(item).map_err(err)?;
                let sys = build_system(&ps.system, &ps.lang).map_err(err)?;
                out.push((ps.goal_equation().to_string(), check_proof(&ps, &sys)));
            }
            out
        }
        (None, None) => return Err("give a script file or --fixture NAME".into()),
    };
    let ok = verdicts.iter().all(|(_, v)| v.is_accepted());
    if g.json() {
        let rows: Vec<Value> = verdicts
            .iter()
            .map(|(goal, v)| match v {
                Verdict::Accepted => json!({ "goal": goal, "accepted": true }),
                Verdict::Rejected { step, reason } => json!({ "goal": goal, "accepted": false, "step": step, "reason": reason }),
            })
            .collect();
        print_json(&json!({ "accepted": ok, "scripts": rows }));
    } else {
        for (goal, v) in &verdicts {
            match v {
                Verdict::Accepted => out!(writeln, "accepted  {goal}"),
                Verdict::Rejected { step, reason } => out!(writeln, "REJECTED  {goal}  (step {step}: {reason})"),
            }
        }
    }
    Ok(ok)
}

fn model(g: &Global, m: &ModelCommand) -> Res<bool> {
    let lang = g.lang(&[])?;
    match m {
        ModelCommand::Check { fixture, file, axioms, goal } => {
            let model = match (fixture, file) {
                (Some(name), _) => FiniteModel::fixture(name).map_err(err)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
                    FiniteModel::from_json(&v).map_err(err)?
                }
                (None, None) => return Err("give --fixture NAME or --file PATH".into()),
            };
            let sys = build_system(axioms, &lang).map_err(err)?;
            let goal = goal_equation(goal, &lang).map_err(err)?;
            let r = independence_report(&model, &sys, &goal).map_err(err)?;
            if g.json() {
                print_json(&serde_json::to_value(&r).expect("report serialises"));
            } else {
                out!(writeln, "{} axioms of {}: {} fail", r.axioms.len(), r.system, r.failed_axioms().len());
                for id in r.failed_axioms() {
                    out!(writeln, "  fails: {id}");
                }
                out!(writeln, "goal {}: {} falsifying valuations", r.goal, r.goal_failures);
                for v in model.failing_valuations(&goal).map_err(err)?.iter().take(20) {
                    let shown: Vec<String> = v.iter().map(|(x, k)| format!("{x}={k}")).collect();
                    out!(writeln, "  falsified at {}", shown.join(", "));
                }
            }
            Ok(r.separates())
        }
        ModelCommand::Search { axioms, goal, carrier, budget } => {
            let sys = build_system(axioms, &lang).map_err(err)?;
            let goal = goal_equation(goal, &lang).map_err(err)?;
            let out = search_model(&lang, *carrier, &sys, &goal, *budget).map_err(err)?;
            let (status, nodes) = match &out {
                SearchOutcome::Found { nodes, .. } => ("found", nodes),
                SearchOutcome::NoModel { nodes } => ("no model", nodes),
                SearchOutcome::BudgetExhausted { nodes } => ("budget exhausted", nodes),
            };
            if g.json() {
                print_json(&json!({
                    "status": status,
                    "decisions": nodes,
                    "model": out.model().map(FiniteModel::to_json),
                }));
            } else {
                match out.model() {
                    Some(m) => {
                        out!(writeln, "found a model with {carrier} elements after {nodes} decisions");
                        print_json(&m.to_json());
                    }
                    None if status == "no model" => out!(writeln, "no model with {carrier} elements ({nodes} decisions)"),
                    None => out!(writeln, "budget exhausted after {nodes} decisions"),
                }
            }
            Ok(out.model().is_some())
        }
    }
}
