//! Proof scripts in equational logic and their mechanical checker.
//!
//! Each step concludes one equation. Steps refer to earlier steps by index.
//! The rules are reflexivity, symmetry, transitivity, substitution, one
//! congruence rule per operator, and axiom instances, which may be placed
//! inside a context at a root-relative child path. Table-style presentations
//! of equational logic number these rules with a gap where a seventh rule
//! would be; nothing is missing here.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::alphabet::{Action, Alphabet, Lang, Mode};
use crate::error::{Error, Result};
use crate::syntax::parse;
use crate::term::{Substitution, Term, Var};

use super::{AxiomSystem, Equation};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    Refl { term: Term },
    Sym { of: usize },
    Trans { left: usize, right: usize },
    Subst { of: usize, subst: Substitution },
    CongPrefix { action: Action, of: usize },
    CongSum { left: usize, right: usize },
    CongPar { left: usize, right: usize },
    /// `C[σ(l)] ≈ C[σ(r)]` for the axiom `l ≈ r`, or the reverse when `reversed`.
    /// Without a context the instance is concluded at the root.
    Axiom { id: String, subst: Substitution, context: Option<Term>, path: Vec<usize>, reversed: bool },
}

/// A goal, the system it is proved in, and the steps.
#[derive(Clone, Debug)]
pub struct ProofScript {
    pub system: String,
    pub lang: Lang,
    pub goal: (Term, Term),
    pub steps: Vec<Step>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Accepted,
    Rejected { step: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        *self == Verdict::Accepted
    }
}

fn get(concls: &[(Term, Term)], i: usize, here: usize) -> std::result::Result<&(Term, Term), String> {
    if i >= here {
        return Err(format!("refers to step {i}, which does not precede it"));
    }
    Ok(&concls[i])
}

/// The equation concluded by `step`, given the conclusions of all earlier steps.
pub fn conclude(step: &Step, concls: &[(Term, Term)], system: &AxiomSystem) -> std::result::Result<(Term, Term), String> {
    let here = concls.len();
    Ok(match step {
        Step::Refl { term } => (term.clone(), term.clone()),
        Step::Sym { of } => {
            let (l, r) = get(concls, *of, here)?;
            (r.clone(), l.clone())
        }
        Step::Trans { left, right } => {
            let (a, b) = get(concls, *left, here)?;
            let (c, d) = get(concls, *right, here)?;
            if b != c {
                return Err(format!("transitivity mismatch: `{b}` is not `{c}`"));
            }
            (a.clone(), d.clone())
        }
        Step::Subst { of, subst } => {
            let (l, r) = get(concls, *of, here)?;
            (l.substitute(subst), r.substitute(subst))
        }
        Step::CongPrefix { action, of } => {
            if !system.lang.alphabet().admits(action) {
                return Err(format!("action `{action}` is not in the alphabet"));
            }
            let (l, r) = get(concls, *of, here)?;
            (Term::prefix(action.clone(), l.clone()), Term::prefix(action.clone(), r.clone()))
        }
        Step::CongSum { left, right } | Step::CongPar { left, right } => {
            let (a, b) = get(concls, *left, here)?;
            let (c, d) = get(concls, *right, here)?;
            if matches!(step, Step::CongSum { .. }) {
                (Term::sum(a.clone(), c.clone()), Term::sum(b.clone(), d.clone()))
            } else {
                (Term::par(a.clone(), c.clone()), Term::par(b.clone(), d.clone()))
            }
        }
        Step::Axiom { id, subst, context, path, reversed } => {
            let e = system.get(id).ok_or_else(|| format!("`{id}` is not an axiom of {}", system.name))?;
            let (mut l, mut r) = (e.lhs.substitute(subst), e.rhs.substitute(subst));
            if *reversed {
                std::mem::swap(&mut l, &mut r);
            }
            match context {
                None if path.is_empty() => (l, r),
                None => return Err("a path needs a context".into()),
                Some(c) => {
                    let place = |t: Term| c.replace_at(path, t).ok_or_else(|| format!("path {path:?} leaves the context"));
                    (place(l)?, place(r)?)
                }
            }
        }
    })
}

/// Checks every step and that the last conclusion is the goal.
pub fn check_proof(ps: &ProofScript, system: &AxiomSystem) -> Verdict {
    let mut concls: Vec<(Term, Term)> = Vec::with_capacity(ps.steps.len());
    for (i, step) in ps.steps.iter().enumerate() {
        match conclude(step, &concls, system) {
            Ok(c) => concls.push(c),
            Err(reason) => return Verdict::Rejected { step: i, reason },
        }
    }
    match concls.last() {
        None => Verdict::Rejected { step: 0, reason: "empty proof".into() },
        Some(last) if *last == ps.goal => Verdict::Accepted,
        Some((l, r)) => Verdict::Rejected {
            step: concls.len() - 1,
            reason: format!("concludes `{l} ≈ {r}`, not the goal `{} ≈ {}`", ps.goal.0, ps.goal.1),
        },
    }
}

#[derive(Serialize, Deserialize)]
struct ScriptJson {
    system: String,
    alphabet: Vec<String>,
    #[serde(default)]
    sync: bool,
    goal: GoalJson,
    steps: Vec<StepJson>,
}

#[derive(Serialize, Deserialize)]
struct GoalJson {
    lhs: String,
    rhs: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
enum StepJson {
    Refl {
        term: String,
    },
    Sym {
        of: usize,
    },
    Trans {
        left: usize,
        right: usize,
    },
    Subst {
        of: usize,
        subst: BTreeMap<String, String>,
    },
    CongPrefix {
        action: String,
        of: usize,
    },
    CongSum {
        left: usize,
        right: usize,
    },
    CongPar {
        left: usize,
        right: usize,
    },
    Axiom {
        id: String,
        #[serde(default)]
        subst: BTreeMap<String, String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        context: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        path: Vec<usize>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        reversed: bool,
    },
}

fn subst_to_json(s: &Substitution) -> BTreeMap<String, String> {
    s.iter().map(|(x, t)| (x.to_string(), t.to_string())).collect()
}

impl ProofScript {
    pub fn goal_equation(&self) -> Equation {
        Equation::new("goal", self.goal.0.clone(), self.goal.1.clone())
    }

    pub fn to_json(&self) -> Value {
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Refl { term } => StepJson::Refl { term: term.to_string() },
                Step::Sym { of } => StepJson::Sym { of: *of },
                Step::Trans { left, right } => StepJson::Trans { left: *left, right: *right },
                Step::Subst { of, subst } => StepJson::Subst { of: *of, subst: subst_to_json(subst) },
                Step::CongPrefix { action, of } => StepJson::CongPrefix { action: action.to_string(), of: *of },
                Step::CongSum { left, right } => StepJson::CongSum { left: *left, right: *right },
                Step::CongPar { left, right } => StepJson::CongPar { left: *left, right: *right },
                Step::Axiom { id, subst, context, path, reversed } => StepJson::Axiom {
                    id: id.clone(),
                    subst: subst_to_json(subst),
                    context: context.as_ref().map(Term::to_string),
                    path: path.clone(),
                    reversed: *reversed,
                },
            })
            .collect();
        let alphabet = self.lang.alphabet();
        // Synchronising alphabets are written by their base names.
        let names: Vec<String> = if alphabet.is_sync() {
            alphabet.actions().iter().filter(|a| !a.name().ends_with('\'')).map(|a| a.name().to_string()).collect()
        } else {
            alphabet.actions().iter().map(|a| a.name().to_string()).collect()
        };
        serde_json::to_value(ScriptJson {
            system: self.system.clone(),
            alphabet: names,
            sync: self.lang.is_sync(),
            goal: GoalJson { lhs: self.goal.0.to_string(), rhs: self.goal.1.to_string() },
            steps,
        })
        .expect("plain data serialises")
    }

    pub fn from_json(v: &Value) -> Result<ProofScript> {
        let raw: ScriptJson = serde_json::from_value(v.clone()).map_err(|e| Error::Script(e.to_string()))?;
        let lang = if raw.sync {
            Lang::new(Alphabet::sync(&raw.alphabet)?, Mode::CcsSync)?
        } else {
            Lang::interleaving(Alphabet::new(&raw.alphabet)?)
        };
        let al = lang.alphabet().clone();
        let term = |s: &str| parse(s, &al);
        let subst = |m: &BTreeMap<String, String>| -> Result<Substitution> {
            m.iter().map(|(x, t)| Ok((Var::from(x.as_str()), term(t)?))).collect()
        };
        let steps = raw
            .steps
            .iter()
            .map(|s| {
                Ok(match s {
                    StepJson::Refl { term: t } => Step::Refl { term: term(t)? },
                    StepJson::Sym { of } => Step::Sym { of: *of },
                    StepJson::Trans { left, right } => Step::Trans { left: *left, right: *right },
                    StepJson::Subst { of, subst: m } => Step::Subst { of: *of, subst: subst(m)? },
                    StepJson::CongPrefix { action, of } => Step::CongPrefix { action: Action::new(action), of: *of },
                    StepJson::CongSum { left, right } => Step::CongSum { left: *left, right: *right },
                    StepJson::CongPar { left, right } => Step::CongPar { left: *left, right: *right },
                    StepJson::Axiom { id, subst: m, context, path, reversed } => Step::Axiom {
                        id: id.clone(),
                        subst: subst(m)?,
                        context: context.as_deref().map(term).transpose()?,
                        path: path.clone(),
                        reversed: *reversed,
                    },
                })
            })
            .collect::<Result<Vec<Step>>>()?;
        Ok(ProofScript { system: raw.system, lang, goal: (term(&raw.goal.lhs)?, term(&raw.goal.rhs)?), steps })
    }
}
