//! Decision procedures for the linear time–branching time spectrum.

mod checker;
mod refute;

use std::fmt;
use std::str::FromStr;

pub use checker::Checker;
pub use refute::{refute_open, Refutation, SubstitutionScheme};

use crate::alphabet::Lang;
use crate::error::{Error, Result};
use crate::term::Term;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Relation {
    T,
    CT,
    F,
    R,
    FT,
    RT,
    S,
    CS,
    RS,
    PF,
    B,
    NestedT(u32),
    NestedS(u32),
}

/// Side conditions of the simulation family. `Nested(n)` is the `n`-nested
/// simulation preorder and `FS` the failure-simulation preorder.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SimFlavor {
    S,
    CS,
    RS,
    FS,
    Nested(u32),
}

impl Relation {
    /// The relations drawn in the spectrum figure.
    pub const FIGURE: [Relation; 12] = [
        Relation::B,
        Relation::NestedS(2),
        Relation::RS,
        Relation::RT,
        Relation::FT,
        Relation::R,
        Relation::F,
        Relation::CT,
        Relation::T,
        Relation::CS,
        Relation::S,
        Relation::PF,
    ];

    /// Relations for which a finite axiom system is built.
    pub const AXIOMATISED: [Relation; 9] = [
        Relation::RS,
        Relation::CS,
        Relation::S,
        Relation::RT,
        Relation::FT,
        Relation::R,
        Relation::F,
        Relation::CT,
        Relation::T,
    ];
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::NestedT(n) => write!(f, "{n}T"),
            Relation::NestedS(n) => write!(f, "{n}S"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Relation> {
        let bad = || Error::UnknownRelation(s.to_string());
        Ok(match s {
            "T" => Relation::T,
            "CT" => Relation::CT,
            "F" => Relation::F,
            "R" => Relation::R,
            "FT" => Relation::FT,
            "RT" => Relation::RT,
            "S" => Relation::S,
            "CS" => Relation::CS,
            "RS" | "FS" => Relation::RS,
            "PF" => Relation::PF,
            "B" => Relation::B,
            _ => {
                let (num, kind) = if let Some(inner) = s.strip_prefix("NestedT(").and_then(|r| r.strip_suffix(')')) {
                    (inner, 'T')
                } else if let Some(inner) = s.strip_prefix("NestedS(").and_then(|r| r.strip_suffix(')')) {
                    (inner, 'S')
                } else if s.len() > 1 && (s.ends_with('T') || s.ends_with('S')) {
                    (&s[..s.len() - 1], s.chars().last().expect("non-empty"))
                } else {
                    return Err(bad());
                };
                let n: u32 = num.parse().map_err(|_| bad())?;
                if kind == 'T' {
                    Relation::NestedT(n)
                } else {
                    Relation::NestedS(n)
                }
            }
        })
    }
}

/// Implication edges `finer ⇒ coarser` between relations, up to nesting depth `max_n`.
pub fn arrows(max_n: u32) -> Vec<(Relation, Relation)> {
    use Relation::*;
    let mut v = vec![
        (B, NestedS(2)),
        (NestedS(2), RS),
        (RS, RT),
        (RT, FT),
        (RT, R),
        (FT, F),
        (R, F),
        (F, CT),
        (CT, T),
        (RS, CS),
        (CS, S),
        (CS, CT),
        (S, T),
        (NestedS(2), PF),
        (PF, R),
    ];
    for n in 1..=max_n {
        v.push((B, NestedS(n)));
        v.push((B, NestedT(n)));
        v.push((NestedS(n), NestedT(n)));
        if n > 1 {
            v.push((NestedS(n), NestedS(n - 1)));
            v.push((NestedT(n), NestedT(n - 1)));
        }
    }
    v.push((NestedS(1), S));
    v.push((S, NestedS(1)));
    v.push((NestedT(1), T));
    v.push((T, NestedT(1)));
    if max_n >= 2 {
        v.push((NestedT(2), PF));
        v.push((PF, NestedT(2)));
    }
    v.retain(|(a, b)| within(*a, max_n) && within(*b, max_n));
    v
}

fn within(r: Relation, max_n: u32) -> bool {
    match r {
        Relation::NestedS(n) | Relation::NestedT(n) => n <= max_n.max(2),
        _ => true,
    }
}

/// Verdicts of every spectrum relation on one pair of terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectrumVector {
    pub entries: Vec<(Relation, bool)>,
}

impl SpectrumVector {
    pub fn get(&self, r: Relation) -> Option<bool> {
        self.entries.iter().find(|(s, _)| *s == r).map(|(_, b)| *b)
    }

    /// Arrows whose source holds but whose target fails.
    pub fn violations(&self, max_n: u32) -> Vec<(Relation, Relation)> {
        arrows(max_n)
            .into_iter()
            .filter(|&(a, b)| self.get(a) == Some(true) && self.get(b) == Some(false))
            .collect()
    }
}

/// Relations evaluated by [`spectrum_vector`].
pub fn spectrum_relations(max_n: u32) -> Vec<Relation> {
    let mut v = vec![
        Relation::T,
        Relation::CT,
        Relation::F,
        Relation::R,
        Relation::FT,
        Relation::RT,
        Relation::S,
        Relation::CS,
        Relation::RS,
        Relation::PF,
        Relation::B,
    ];
    for n in 1..=max_n.max(2) {
        v.push(Relation::NestedT(n));
        v.push(Relation::NestedS(n));
    }
    v
}

impl Checker {
    /// Evaluates every relation independently and checks the implication arrows.
    pub fn spectrum_vector(&mut self, p: &Term, q: &Term, max_n: u32) -> Result<SpectrumVector> {
        let (a, b) = (self.class_of(p)?, self.class_of(q)?);
        let entries =
            spectrum_relations(max_n).into_iter().map(|r| (r, self.equivalent_classes(a, b, r))).collect();
        let v = SpectrumVector { entries };
        let bad = v.violations(max_n);
        if !bad.is_empty() {
            return Err(Error::Internal(format!("spectrum arrows violated for {p} vs {q}: {bad:?}")));
        }
        Ok(v)
    }
}

/// `p ~rel q` for a decorated-trace relation (or any other relation).
pub fn decorated_eq(p: &Term, q: &Term, rel: Relation, lang: &Lang) -> Result<bool> {
    Checker::new(lang).equivalent(p, q, rel)
}

pub fn simulation_preorder(p: &Term, q: &Term, flavor: SimFlavor, lang: &Lang) -> Result<bool> {
    Checker::new(lang).preorder(p, q, flavor)
}

pub fn sim_eq(p: &Term, q: &Term, flavor: SimFlavor, lang: &Lang) -> Result<bool> {
    let mut c = Checker::new(lang);
    Ok(c.preorder(p, q, flavor)? && c.preorder(q, p, flavor)?)
}

pub fn bisimilar(p: &Term, q: &Term, lang: &Lang) -> Result<bool> {
    Checker::new(lang).equivalent(p, q, Relation::B)
}

pub fn nested_trace_eq(p: &Term, q: &Term, n: u32, lang: &Lang) -> Result<bool> {
    Checker::new(lang).equivalent(p, q, Relation::NestedT(n))
}

pub fn nested_sim_preorder(p: &Term, q: &Term, n: u32, lang: &Lang) -> Result<bool> {
    Checker::new(lang).preorder(p, q, SimFlavor::Nested(n))
}

pub fn spectrum_vector(p: &Term, q: &Term, lang: &Lang, max_n: u32) -> Result<SpectrumVector> {
    Checker::new(lang).spectrum_vector(p, q, max_n)
}

#[cfg(test)]
mod tests;
