//! Equations, the axiom systems built from the schemas, bounded soundness
//! checks, proof scripts and saturation.

mod builder;
mod derive;
mod fixtures;
mod proof;
mod schemas;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::alphabet::Lang;
use crate::equivalences::{Checker, Refutation, Relation, SubstitutionScheme};
use crate::error::{Error, Result};
use crate::term::{Substitution, Term, Var};

pub use builder::{e1_normal_form, ProofBuilder};
pub use derive::{derivation, derivation_targets, Derived};
pub use fixtures::{check_fixture, proof_fixture, PROOF_FIXTURES};
pub use proof::{check_proof, conclude, ProofScript, Step, Verdict};
pub use schemas::Schema;

/// `lhs ≈ rhs`, named by schema and instance arguments.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Equation {
    pub id: String,
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(id: &str, lhs: Term, rhs: Term) -> Equation {
        Equation { id: id.to_string(), lhs, rhs }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn substitute(&self, s: &Substitution) -> Equation {
        Equation { id: self.id.clone(), lhs: self.lhs.substitute(s), rhs: self.rhs.substitute(s) }
    }

    /// The schema part of the id: `CSP1` for `CSP1[a,b,a,b]`.
    pub fn schema_name(&self) -> &str {
        self.id.split('[').next().unwrap_or(&self.id)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {} ≈ {}", self.id, self.lhs, self.rhs)
    }
}

/// Which family of systems a name belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SystemName {
    E0,
    E1,
    /// `E_X` for the relation `X`.
    For(Relation),
}

impl SystemName {
    pub const ALL: [SystemName; 11] = [
        SystemName::E0,
        SystemName::E1,
        SystemName::For(Relation::RS),
        SystemName::For(Relation::CS),
        SystemName::For(Relation::S),
        SystemName::For(Relation::RT),
        SystemName::For(Relation::FT),
        SystemName::For(Relation::R),
        SystemName::For(Relation::F),
        SystemName::For(Relation::CT),
        SystemName::For(Relation::T),
    ];

    /// Systems for which parallel composition can be eliminated.
    pub const ELIMINATING: [SystemName; 9] = [
        SystemName::For(Relation::RS),
        SystemName::For(Relation::CS),
        SystemName::For(Relation::S),
        SystemName::For(Relation::RT),
        SystemName::For(Relation::FT),
        SystemName::For(Relation::R),
        SystemName::For(Relation::F),
        SystemName::For(Relation::CT),
        SystemName::For(Relation::T),
    ];

    /// Accepts `E0`, `E1`, `E_RS`, and the synchronising spellings `Ec_RS` / `E^c_RS`.
    /// The second component tells whether a synchronising variant was named.
    pub fn parse(s: &str) -> Result<(SystemName, bool)> {
        let bad = || Error::UnknownSystem(s.to_string());
        match s {
            "E0" => return Ok((SystemName::E0, false)),
            "E1" => return Ok((SystemName::E1, false)),
            _ => {}
        }
        let (rest, sync) = if let Some(r) = s.strip_prefix("Ec_").or_else(|| s.strip_prefix("E^c_")) {
            (r, true)
        } else if let Some(r) = s.strip_prefix("E_") {
            (r, false)
        } else {
            return Err(bad());
        };
        let rel: Relation = rest.parse().map_err(|_| bad())?;
        if !Relation::AXIOMATISED.contains(&rel) {
            return Err(bad());
        }
        Ok((SystemName::For(rel), sync))
    }

    /// The relation the system is meant to be sound for. `E0` and `E1` are
    /// sound modulo bisimilarity.
    pub fn relation(self) -> Relation {
        match self {
            SystemName::E0 | SystemName::E1 => Relation::B,
            SystemName::For(r) => r,
        }
    }

    pub fn display(self, sync: bool) -> String {
        match self {
            SystemName::E0 => "E0".into(),
            SystemName::E1 => "E1".into(),
            SystemName::For(r) if sync => format!("Ec_{r}"),
            SystemName::For(r) => format!("E_{r}"),
        }
    }

    /// Schemas of the system, with the expansion laws already swapped for
    /// their synchronising versions when `sync` is set.
    pub fn schemas(self, sync: bool) -> Vec<Schema> {
        use Schema::*;
        let mut v = vec![A0, A1, A2, A3];
        if self == SystemName::E0 {
            return v;
        }
        v.extend([P0, P1]);
        let extra: &[Schema] = match self {
            SystemName::E0 | SystemName::E1 => &[],
            SystemName::For(r) => match r {
                Relation::RS => &[RS, RSP1, RSP2, EL2],
                Relation::CS => &[CS, CSP1, CSP2, EL1],
                Relation::S => &[S, SP1, SP2, EL1],
                Relation::RT => &[RT, FP, EL2],
                Relation::FT => &[FT, RS, FP, EL2],
                Relation::R => &[R, FP, EL2],
                Relation::F => &[F, R, FP, EL2],
                Relation::CT => &[CT, CTP, EL1],
                Relation::T => &[T, TP, EL1],
                _ => &[],
            },
        };
        for &s in extra {
            match (s, sync) {
                (EL1, true) => v.extend([ELC1, ELC1t]),
                (EL2, true) => v.push(ELC2),
                _ => v.push(s),
            }
        }
        v
    }
}

/// A named, fully instantiated, finite set of equations.
#[derive(Clone, Debug)]
pub struct AxiomSystem {
    pub name: String,
    pub system: Option<SystemName>,
    pub lang: Lang,
    pub relation: Relation,
    pub equations: Vec<Equation>,
    index: HashMap<String, usize>,
}

impl AxiomSystem {
    /// A system from explicit equations; ids must be distinct.
    pub fn from_equations(name: &str, lang: &Lang, relation: Relation, equations: Vec<Equation>) -> AxiomSystem {
        let index = equations.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        AxiomSystem { name: name.to_string(), system: None, lang: lang.clone(), relation, equations, index }
    }

    pub fn get(&self, id: &str) -> Option<&Equation> {
        self.index.get(id).map(|&i| &self.equations[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Number of instances of a schema.
    pub fn count(&self, schema: &str) -> usize {
        self.equations.iter().filter(|e| e.schema_name() == schema).count()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "system": self.name,
            "alphabet": self.lang.alphabet().actions().iter().map(|a| a.name()).collect::<Vec<_>>(),
            "sync": self.lang.is_sync(),
            "relation": self.relation.to_string(),
            "equations": self.equations.iter().map(|e| json!({
                "id": e.id, "lhs": e.lhs.to_string(), "rhs": e.rhs.to_string()
            })).collect::<Vec<_>>(),
        })
    }
}

/// Instantiates every schema of the named system over the labels of `lang`.
pub fn build_system(name: &str, lang: &Lang) -> Result<AxiomSystem> {
    let (sys, sync) = SystemName::parse(name)?;
    if sync != lang.is_sync() && sys != SystemName::E0 && sys != SystemName::E1 {
        return Err(Error::SyncMismatch(if sync {
            format!("{name} needs a synchronising alphabet (--sync)")
        } else {
            format!("{name} is an interleaving system; use Ec_{} with --sync", sys.relation())
        }));
    }
    Ok(build(sys, lang))
}

/// Like [`build_system`], choosing the synchronising variant from `lang`.
pub fn build(sys: SystemName, lang: &Lang) -> AxiomSystem {
    let equations: Vec<Equation> = sys.schemas(lang.is_sync()).into_iter().flat_map(|s| s.instances(lang)).collect();
    let mut out = AxiomSystem::from_equations(&sys.display(lang.is_sync()), lang, sys.relation(), equations);
    out.system = Some(sys);
    out
}

/// The default bounded scheme for soundness checks over `lang`.
pub fn default_scheme(lang: &Lang) -> SubstitutionScheme {
    SubstitutionScheme::standard(lang)
}

/// Searches for a closed substitution refuting `e` modulo `rel`. A
/// `NotRefuted` answer means sound up to the bound of the scheme.
pub fn check_sound(e: &Equation, rel: Relation, scheme: &SubstitutionScheme, checker: &mut Checker) -> Result<Refutation> {
    checker.refute(&e.lhs, &e.rhs, rel, scheme)
}

/// Checks every equation of `system` modulo its relation, splitting the
/// equations over `jobs` worker threads.
pub fn soundness_sweep(system: &AxiomSystem, scheme: &SubstitutionScheme, jobs: usize) -> Result<Vec<(String, Refutation)>> {
    let jobs = jobs.max(1).min(system.equations.len().max(1));
    let chunks: Vec<Vec<&Equation>> = (0..jobs)
        .map(|k| system.equations.iter().skip(k).step_by(jobs).collect())
        .collect();
    let results: Vec<Result<Vec<(String, Refutation)>>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                s.spawn(move || {
                    let mut c = Checker::new(&system.lang);
                    chunk
                        .into_iter()
                        .map(|e| Ok((e.id.clone(), check_sound(e, system.relation, scheme, &mut c)?)))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("soundness worker panicked")).collect()
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    let order: HashMap<&str, usize> = system.equations.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    all.sort_by_key(|(id, _)| order[id.as_str()]);
    Ok(all)
}

/// `cl(E)`: adds `σ(t)/0 ≈ σ(u)/0` for every equation and every substitution
/// mapping some of its variables to `0`. Structural duplicates are dropped.
pub fn saturate(system: &AxiomSystem) -> AxiomSystem {
    let mut seen: BTreeSet<(Term, Term)> = BTreeSet::new();
    let mut out = Vec::new();
    for e in &system.equations {
        if seen.insert((e.lhs.clone(), e.rhs.clone())) {
            out.push(e.clone());
        }
    }
    for e in &system.equations {
        let vars: Vec<Var> = e.vars().into_iter().collect();
        for mask in 0..1usize << vars.len() {
            let sigma: Substitution =
                vars.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, x)| (x.clone(), Term::Nil)).collect();
            let lhs = e.lhs.substitute(&sigma).strip_nil();
            let rhs = e.rhs.substitute(&sigma).strip_nil();
            if seen.insert((lhs.clone(), rhs.clone())) {
                let zeroed: Vec<&str> = sigma.keys().map(|x| &**x).collect();
                let id = format!("{}/0{{{}}}", e.id, zeroed.join(","));
                out.push(Equation { id: unique_id(&out, id), lhs, rhs });
            }
        }
    }
    let mut sat = AxiomSystem::from_equations(&format!("cl({})", system.name), &system.lang, system.relation, out);
    sat.system = system.system;
    sat
}

fn unique_id(existing: &[Equation], id: String) -> String {
    if !existing.iter().any(|e| e.id == id) {
        return id;
    }
    (2..).map(|k| format!("{id}#{k}")).find(|c| !existing.iter().any(|e| &e.id == c)).expect("unbounded")
}
