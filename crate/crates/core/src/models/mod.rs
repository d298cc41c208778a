//! Finite algebras over `0`, the action prefixes, `+` and `||`.
//!
//! A model is a carrier `{0, .., n-1}` with one table per operation. Laws are
//! never assumed of a model: [`FiniteModel::holds`] checks an equation under
//! every valuation of its variables.

mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::alphabet::{Action, Lang};
use crate::axioms::{AxiomSystem, Equation, Schema};
use crate::error::{Error, Result};
use crate::term::{Term, Var};

pub use search::{search_model, SearchOutcome};

pub type Valuation = BTreeMap<Var, usize>;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FiniteModel {
    pub carrier: usize,
    pub zero: usize,
    pub prefix: BTreeMap<String, Vec<usize>>,
    pub plus: Vec<Vec<usize>>,
    pub par: Vec<Vec<usize>>,
}

const TABLE6: &str = include_str!("../../data/models/table6.json");
const TABLE7: &str = include_str!("../../data/models/table7.json");

/// Names of the shipped models.
pub const FIXTURES: [&str; 2] = ["table6", "table7"];

impl FiniteModel {
    /// A shipped model: `table6` (for E_CS and E_CT) or `table7` (for E_RT and E_CT).
    pub fn fixture(name: &str) -> Result<FiniteModel> {
        let text = match name {
            "table6" => TABLE6,
            "table7" => TABLE7,
            _ => return Err(Error::Model(format!("no model fixture named `{name}` (have {})", FIXTURES.join(", ")))),
        };
        FiniteModel::from_json(&serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?)
    }

    pub fn from_json(v: &Value) -> Result<FiniteModel> {
        let m: FiniteModel = serde_json::from_value(v.clone()).map_err(|e| Error::Model(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data serialises")
    }

    /// Table shapes and entry ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.carrier;
        let bad = |what: String| Err(Error::Model(what));
        if n == 0 {
            return bad("empty carrier".into());
        }
        if self.zero >= n {
            return bad(format!("zero {} outside the carrier", self.zero));
        }
        for (a, row) in &self.prefix {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return bad(format!("prefix table `{a}` is not a map on {n} elements"));
            }
        }
        for (name, t) in [("plus", &self.plus), ("par", &self.par)] {
            if t.len() != n || t.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
                return bad(format!("`{name}` is not an {n}x{n} table over the carrier"));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: &Term, val: &Valuation) -> Result<usize> {
        Ok(match t {
            Term::Nil => self.zero,
            Term::Var(x) => *val.get(x).ok_or_else(|| Error::Model(format!("variable `{x}` has no value")))?,
            Term::Prefix(a, body) => {
                let row = self.row(a)?;
                row[self.eval(body, val)?]
            }
            Term::Sum(l, r) => self.plus[self.eval(l, val)?][self.eval(r, val)?],
            Term::Par(l, r) => self.par[self.eval(l, val)?][self.eval(r, val)?],
        })
    }

    fn row(&self, a: &Action) -> Result<&Vec<usize>> {
        self.prefix.get(a.name()).ok_or_else(|| Error::Model(format!("no prefix table for `{a}`")))
    }

    /// Calls `f` on every valuation of `vars` in lexicographic order until it
    /// returns `false`.
    fn each_valuation(&self, vars: &[Var], mut f: impl FnMut(&Valuation) -> Result<bool>) -> Result<()> {
        let mut idx = vec![0usize; vars.len()];
        loop {
            let val: Valuation = vars.iter().cloned().zip(idx.iter().copied()).collect();
            if !f(&val)? {
                return Ok(());
            }
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.carrier {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn satisfied(&self, e: &Equation, val: &Valuation) -> Result<bool> {
        Ok(self.eval(&e.lhs, val)? == self.eval(&e.rhs, val)?)
    }

    pub fn holds(&self, e: &Equation) -> Result<bool> {
        Ok(self.counter_valuation(e)?.is_none())
    }

    /// The first valuation, in lexicographic order, falsifying `e`.
    pub fn counter_valuation(&self, e: &Equation) -> Result<Option<Valuation>> {
        let vars: Vec<Var> = e.vars().into_iter().collect();
        let mut found = None;
        self.each_valuation(&vars, |v| {
            if self.satisfied(e, v)? {
                Ok(true)
            } else {
                found = Some(v.clone());
                Ok(false)
            }
        })?;
        Ok(found)
    }

    pub fn failing_valuations(&self, e: &Equation) -> Result<Vec<Valuation>> {
        let vars: Vec<Var> = e.vars().into_iter().collect();
        let mut out = Vec::new();
        self.each_valuation(&vars, |v| {
            if !self.satisfied(e, v)? {
                out.push(v.clone());
            }
            Ok(true)
        })?;
        Ok(out)
    }
}

/// One row of an [`IndependenceReport`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AxiomCheck {
    pub id: String,
    pub valuations: usize,
    pub failures: usize,
}

/// Evidence that `goal` is not derivable from a system: the model satisfies
/// every axiom and falsifies the goal.
#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub system: String,
    pub goal: String,
    pub axioms: Vec<AxiomCheck>,
    pub goal_failures: usize,
    pub counterexample: Option<BTreeMap<String, usize>>,
}

impl IndependenceReport {
    pub fn failed_axioms(&self) -> Vec<&str> {
        self.axioms.iter().filter(|a| a.failures > 0).map(|a| a.id.as_str()).collect()
    }

    /// All axioms hold and the goal fails somewhere.
    pub fn separates(&self) -> bool {
        self.failed_axioms().is_empty() && self.counterexample.is_some()
    }
}

pub fn independence_report(m: &FiniteModel, system: &AxiomSystem, goal: &Equation) -> Result<IndependenceReport> {
    let count = |e: &Equation| m.carrier.pow(e.vars().len() as u32);
    let axioms = system
        .equations
        .iter()
        .map(|e| Ok(AxiomCheck { id: e.id.clone(), valuations: count(e), failures: m.failing_valuations(e)?.len() }))
        .collect::<Result<Vec<_>>>()?;
    let fails = m.failing_valuations(goal)?;
    Ok(IndependenceReport {
        system: system.name.clone(),
        goal: goal.to_string(),
        axioms,
        goal_failures: fails.len(),
        counterexample: fails.first().map(|v| v.iter().map(|(x, k)| (x.to_string(), *k)).collect()),
    })
}

/// Goals by name. `EL2`, `RSP2` and `CSP2` are the four-variable instances
/// over the first two actions used with the shipped models; any other name is
/// an instance id such as `RSP2[a|b]`, or a schema with a single instance.
pub fn goal_equation(name: &str, lang: &Lang) -> Result<Equation> {
    let acts = lang.alphabet().actions();
    let (a, b) = match acts {
        [a, b, ..] => (a.name(), b.name()),
        [a] => (a.name(), a.name()),
        [] => return Err(Error::AlphabetTooSmall("empty alphabet".into())),
    };
    let rename = |e: Equation, pairs: &[(&str, &str)]| {
        let s = pairs.iter().map(|(x, y)| (Var::from(*x), Term::var(y))).collect();
        Equation { id: name.to_string(), ..e.substitute(&s) }
    };
    let find = |id: &str| -> Result<Equation> {
        let schema: Schema = id.split('[').next().unwrap_or(id).parse()?;
        let all = schema.instances(lang);
        if !id.contains('[') && all.len() == 1 {
            return Ok(all[0].clone());
        }
        all.into_iter().find(|e| e.id == id).ok_or_else(|| Error::Model(format!("no goal named `{id}` over {}", lang.alphabet().describe())))
    };
    let el2 = if lang.is_sync() { "ELC2" } else { "EL2" };
    Ok(match name {
        "EL2" => rename(find(&format!("{el2}[{a},{b}|{a},{b}]"))?, &[("x1", "x"), ("x2", "y"), ("y1", "z"), ("y2", "w")]),
        "RSP2" => rename(find(&format!("RSP2[{a}|{a}]"))?, &[("x1", "x")]),
        "CSP2" => rename(find(&format!("CSP2[{a},{a},{a}]"))?, &[]),
        other => find(other)?,
    })
}
