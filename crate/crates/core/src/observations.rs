//! Decorated-trace observations, enumerated explicitly over the raw LTS.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::semantics::{build_lts, show_trace, Lts, Trace};
use crate::term::Term;

pub type ActionSet = BTreeSet<Action>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ObsKind {
    F,
    R,
    FT,
    RT,
    PF,
}

impl FromStr for ObsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ObsKind> {
        Ok(match s {
            "F" => ObsKind::F,
            "R" => ObsKind::R,
            "FT" => ObsKind::FT,
            "RT" => ObsKind::RT,
            "PF" => ObsKind::PF,
            _ => return Err(Error::UnknownRelation(s.to_string())),
        })
    }
}

impl fmt::Display for ObsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Observation {
    /// A failure or ready pair `(α, X)`.
    Pair(Trace, ActionSet),
    /// `X0 a1 X1 … an Xn`, stored as the sets and the actions separately.
    Alternating(Vec<ActionSet>, Trace),
    /// A possible future `(α, T(p'))`.
    Future(Trace, BTreeSet<Trace>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObservationSet {
    pub kind: ObsKind,
    pub elements: BTreeSet<Observation>,
}

fn show_set(s: &ActionSet) -> String {
    let names: Vec<&str> = s.iter().map(Action::name).collect();
    format!("{{{}}}", names.join(","))
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Pair(t, x) => write!(f, "({}, {})", show_trace(t), show_set(x)),
            Observation::Alternating(sets, acts) => {
                let mut parts = vec![show_set(&sets[0])];
                for (a, x) in acts.iter().zip(&sets[1..]) {
                    parts.push(a.to_string());
                    parts.push(show_set(x));
                }
                f.write_str(&parts.join(" "))
            }
            Observation::Future(t, fut) => {
                let inner: Vec<String> = fut.iter().map(|t| show_trace(t)).collect();
                write!(f, "({}, {{{}}})", show_trace(t), inner.join(","))
            }
        }
    }
}

impl ObservationSet {
    pub fn to_json(&self) -> Value {
        let elements: Vec<Value> = self
            .elements
            .iter()
            .map(|o| match o {
                Observation::Pair(t, x) => json!({
                    "trace": show_trace(t),
                    "set": x.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                }),
                Observation::Alternating(sets, acts) => json!({
                    "sets": sets.iter().map(|x| x.iter().map(|a| a.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "actions": acts.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                }),
                Observation::Future(t, fut) => json!({
                    "trace": show_trace(t),
                    "futures": fut.iter().map(|t| show_trace(t)).collect::<Vec<_>>(),
                }),
            })
            .collect();
        json!({ "kind": self.kind.to_string(), "elements": elements })
    }
}

struct View {
    lts: Lts,
    labels: Vec<Action>,
    succ: Vec<Vec<(Action, usize)>>,
    init: Vec<ActionSet>,
}

impl View {
    fn new(p: &Term, lang: &Lang) -> Result<View> {
        let lts = build_lts(p, lang)?;
        let n = lts.states.len();
        let mut succ = vec![Vec::new(); n];
        for (s, a, d) in &lts.transitions {
            succ[*s].push((a.clone(), *d));
        }
        let init = succ.iter().map(|v| v.iter().map(|(a, _)| a.clone()).collect()).collect();
        Ok(View { lts, labels: lang.labels(), succ, init })
    }

    /// Every `(α, state)` with `root −α→ state`.
    fn derivatives(&self) -> BTreeSet<(Trace, usize)> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(Vec::new(), self.lts.root)];
        while let Some((t, s)) = stack.pop() {
            if !out.insert((t.clone(), s)) {
                continue;
            }
            for (a, d) in &self.succ[s] {
                let mut t2 = t.clone();
                t2.push(a.clone());
                stack.push((t2, *d));
            }
        }
        out
    }

    /// Subsets of the labels disjoint from `I(s)`.
    fn refusals(&self, s: usize) -> Vec<ActionSet> {
        let free: Vec<&Action> = self.labels.iter().filter(|a| !self.init[s].contains(*a)).collect();
        (0u32..(1 << free.len()))
            .map(|m| free.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, a)| (*a).clone()).collect())
            .collect()
    }

    fn traces_from(&self, s: usize, memo: &mut BTreeMap<usize, BTreeSet<Trace>>) -> BTreeSet<Trace> {
        if let Some(t) = memo.get(&s) {
            return t.clone();
        }
        let mut out = BTreeSet::from([Vec::new()]);
        for (a, d) in &self.succ[s] {
            for t in self.traces_from(*d, memo) {
                let mut v = vec![a.clone()];
                v.extend(t);
                out.insert(v);
            }
        }
        memo.insert(s, out.clone());
        out
    }

    fn decorated_traces(&self, s: usize, ready: bool) -> BTreeSet<(Vec<ActionSet>, Trace)> {
        let here = if ready { vec![self.init[s].clone()] } else { self.refusals(s) };
        let mut out = BTreeSet::new();
        for x in &here {
            out.insert((vec![x.clone()], Vec::new()));
        }
        for (a, d) in &self.succ[s] {
            let tails = self.decorated_traces(*d, ready);
            for x in &here {
                for (sets, acts) in &tails {
                    let mut s2 = vec![x.clone()];
                    s2.extend(sets.iter().cloned());
                    let mut a2 = vec![a.clone()];
                    a2.extend(acts.iter().cloned());
                    out.insert((s2, a2));
                }
            }
        }
        out
    }
}

/// `F(p)`, with refusal sets ranging over every subset of the labels.
pub fn failure_pairs(p: &Term, lang: &Lang) -> Result<ObservationSet> {
    let v = View::new(p, lang)?;
    let elements = v
        .derivatives()
        .into_iter()
        .flat_map(|(t, s)| v.refusals(s).into_iter().map(move |x| Observation::Pair(t.clone(), x)))
        .collect();
    Ok(ObservationSet { kind: ObsKind::F, elements })
}

/// `R(p)`
pub fn ready_pairs(p: &Term, lang: &Lang) -> Result<ObservationSet> {
    let v = View::new(p, lang)?;
    let elements = v.derivatives().into_iter().map(|(t, s)| Observation::Pair(t, v.init[s].clone())).collect();
    Ok(ObservationSet { kind: ObsKind::R, elements })
}

/// `FT(p)`
pub fn failure_traces(p: &Term, lang: &Lang) -> Result<ObservationSet> {
    let v = View::new(p, lang)?;
    let elements =
        v.decorated_traces(v.lts.root, false).into_iter().map(|(s, a)| Observation::Alternating(s, a)).collect();
    Ok(ObservationSet { kind: ObsKind::FT, elements })
}

/// `RT(p)`
pub fn ready_traces(p: &Term, lang: &Lang) -> Result<ObservationSet> {
    let v = View::new(p, lang)?;
    let elements =
        v.decorated_traces(v.lts.root, true).into_iter().map(|(s, a)| Observation::Alternating(s, a)).collect();
    Ok(ObservationSet { kind: ObsKind::RT, elements })
}

/// `PF(p)`
pub fn possible_futures(p: &Term, lang: &Lang) -> Result<ObservationSet> {
    let v = View::new(p, lang)?;
    let mut memo = BTreeMap::new();
    let elements = v
        .derivatives()
        .into_iter()
        .map(|(t, s)| Observation::Future(t, v.traces_from(s, &mut memo)))
        .collect();
    Ok(ObservationSet { kind: ObsKind::PF, elements })
}

pub fn observations(kind: ObsKind, p: &Term, lang: &Lang) -> Result<ObservationSet> {
    match kind {
        ObsKind::F => failure_pairs(p, lang),
        ObsKind::R => ready_pairs(p, lang),
        ObsKind::FT => failure_traces(p, lang),
        ObsKind::RT => ready_traces(p, lang),
        ObsKind::PF => possible_futures(p, lang),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::syntax::{parse, parse_ab as p};

    fn abc() -> Lang {
        Lang::interleaving(Alphabet::new(&["a", "b", "c"]).unwrap())
    }

    fn t(s: &str) -> Trace {
        s.chars().map(|c| Action::new(&c.to_string())).collect()
    }

    fn set(s: &str) -> ActionSet {
        s.chars().map(|c| Action::new(&c.to_string())).collect()
    }

    #[test]
    fn ready_pairs_of_prefix() {
        let r = ready_pairs(&p("a.0"), &Lang::ab()).unwrap();
        let want = BTreeSet::from([Observation::Pair(t(""), set("a")), Observation::Pair(t("a"), set(""))]);
        assert_eq!(r.elements, want);
    }

    #[test]
    fn failure_pair_examples() {
        let l = abc();
        let q = parse("a.b.0 + a.c.0", l.alphabet()).unwrap();
        let f = failure_pairs(&q, &l).unwrap();
        assert!(f.elements.contains(&Observation::Pair(t("a"), set("b"))));
        assert!(f.elements.contains(&Observation::Pair(t("a"), set("c"))));
        let q = parse("a.(b.0 + c.0)", l.alphabet()).unwrap();
        let f = failure_pairs(&q, &l).unwrap();
        assert!(!f.elements.contains(&Observation::Pair(t("a"), set("b"))));
    }

    #[test]
    fn ready_trace_examples() {
        let r = ready_traces(&p("a.0"), &Lang::ab()).unwrap();
        let want = BTreeSet::from([
            Observation::Alternating(vec![set("a")], t("")),
            Observation::Alternating(vec![set("a"), set("")], t("a")),
        ]);
        assert_eq!(r.elements, want);
        let l = abc();
        let x = ready_traces(&parse("a.b.0 + a.c.0", l.alphabet()).unwrap(), &l).unwrap();
        let y = ready_traces(&parse("a.(b.0 + c.0)", l.alphabet()).unwrap(), &l).unwrap();
        assert_ne!(x, y);
    }

    #[test]
    fn failure_traces_of_nil() {
        let f = failure_traces(&Term::Nil, &Lang::ab()).unwrap();
        let want: BTreeSet<Observation> =
            ["", "a", "b", "ab"].iter().map(|s| Observation::Alternating(vec![set(s)], t(""))).collect();
        assert_eq!(f.elements, want);
    }

    #[test]
    fn possible_futures_examples() {
        let pf = possible_futures(&p("b.a.0"), &Lang::ab()).unwrap();
        let fut = |v: &[&str]| v.iter().map(|s| t(s)).collect::<BTreeSet<_>>();
        let want = BTreeSet::from([
            Observation::Future(t(""), fut(&["", "b", "ba"])),
            Observation::Future(t("b"), fut(&["", "a"])),
            Observation::Future(t("ba"), fut(&[""])),
        ]);
        assert_eq!(pf.elements, want);
        let pf0 = possible_futures(&Term::Nil, &Lang::ab()).unwrap();
        assert_eq!(pf0.elements, BTreeSet::from([Observation::Future(t(""), fut(&[""]))]));
        let l = abc();
        let pf = possible_futures(&parse("a.b.0 + a.c.0", l.alphabet()).unwrap(), &l).unwrap();
        let with_a = pf.elements.iter().filter(|o| matches!(o, Observation::Future(tr, _) if *tr == t("a"))).count();
        assert_eq!(with_a, 2);
    }

    #[test]
    fn display_and_json() {
        let r = ready_traces(&p("a.0"), &Lang::ab()).unwrap();
        let shown: Vec<String> = r.elements.iter().map(|o| o.to_string()).collect();
        assert_eq!(shown, ["{a}", "{a} a {}"]);
        assert_eq!(r.to_json()["kind"], "RT");
    }
}
