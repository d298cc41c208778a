//! Structural operational semantics over raw terms.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::term::{Term, Var};

/// A finite trace.
pub type Trace = Vec<Action>;

/// One-step derivatives of `t`. Variables and `0` have none.
pub fn transitions(t: &Term, lang: &Lang) -> BTreeSet<(Action, Term)> {
    let mut out = BTreeSet::new();
    collect(t, lang, &mut out);
    out
}

fn collect(t: &Term, lang: &Lang, out: &mut BTreeSet<(Action, Term)>) {
    match t {
        Term::Nil | Term::Var(_) => {}
        Term::Prefix(a, body) => {
            out.insert((a.clone(), (**body).clone()));
        }
        Term::Sum(l, r) => {
            collect(l, lang, out);
            collect(r, lang, out);
        }
        Term::Par(l, r) => {
            let left = transitions(l, lang);
            let right = transitions(r, lang);
            for (a, l2) in &left {
                out.insert((a.clone(), Term::par(l2.clone(), (**r).clone())));
            }
            for (a, r2) in &right {
                out.insert((a.clone(), Term::par((**l).clone(), r2.clone())));
            }
            if lang.is_sync() {
                for (a, l2) in &left {
                    for (b, r2) in &right {
                        if lang.synchronises(a, b) {
                            out.insert((Action::tau(), Term::par(l2.clone(), r2.clone())));
                        }
                    }
                }
            }
        }
    }
}

/// The initial actions `I(t)`.
pub fn initials(t: &Term, lang: &Lang) -> BTreeSet<Action> {
    transitions(t, lang).into_iter().map(|(a, _)| a).collect()
}

fn require_closed(t: &Term) -> Result<()> {
    match t.first_var() {
        Some(x) => Err(Error::OpenTerm(x.to_string())),
        None => Ok(()),
    }
}

/// The reachable transition system of a closed term. States are raw terms.
#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<Term>,
    pub transitions: Vec<(usize, Action, usize)>,
    pub root: usize,
}

#[derive(Serialize)]
struct LtsJson {
    root: String,
    states: Vec<String>,
    transitions: Vec<[String; 3]>,
}

impl Lts {
    pub fn successors(&self, s: usize) -> impl Iterator<Item = (&Action, usize)> + '_ {
        self.transitions.iter().filter(move |t| t.0 == s).map(|t| (&t.1, t.2))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let render = |i: usize| self.states[i].to_string();
        serde_json::to_value(LtsJson {
            root: render(self.root),
            states: (0..self.states.len()).map(render).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(s, a, d)| [render(*s), a.to_string(), render(*d)])
                .collect(),
        })
        .expect("plain data serialises")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=TB;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == self.root { "doublecircle" } else { "ellipse" };
            let _ = writeln!(out, "  s{i} [label=\"{}\", shape={shape}];", s.to_string().replace('"', "\\\""));
        }
        for (s, a, d) in &self.transitions {
            let _ = writeln!(out, "  s{s} -> s{d} [label=\"{a}\"];");
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_lts(p: &Term, lang: &Lang) -> Result<Lts> {
    require_closed(p)?;
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut states = vec![p.clone()];
    let mut edges = Vec::new();
    index.insert(p.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for (a, d) in transitions(&states[s].clone(), lang) {
            let j = match index.get(&d) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(d.clone(), j);
                    states.push(d);
                    queue.push_back(j);
                    j
                }
            };
            edges.push((s, a, j));
        }
    }
    Ok(Lts { states, transitions: edges, root: 0 })
}

fn trace_sets(lts: &Lts, completed: bool) -> Vec<BTreeSet<Trace>> {
    // States of a finite-term LTS are acyclic; resolve in reverse topological order.
    let n = lts.states.len();
    let mut succ: Vec<Vec<(Action, usize)>> = vec![Vec::new(); n];
    for (s, a, d) in &lts.transitions {
        succ[*s].push((a.clone(), *d));
    }
    let mut memo: Vec<Option<BTreeSet<Trace>>> = vec![None; n];
    fn go(
        s: usize,
        succ: &[Vec<(Action, usize)>],
        completed: bool,
        memo: &mut Vec<Option<BTreeSet<Trace>>>,
    ) {
        if memo[s].is_some() {
            return;
        }
        let mut set = BTreeSet::new();
        if !completed || succ[s].is_empty() {
            set.insert(Vec::new());
        }
        for (a, d) in &succ[s] {
            go(*d, succ, completed, memo);
            for tr in memo[*d].as_ref().expect("resolved") {
                let mut v = Vec::with_capacity(tr.len() + 1);
                v.push(a.clone());
                v.extend(tr.iter().cloned());
                set.insert(v);
            }
        }
        memo[s] = Some(set);
    }
    for s in 0..n {
        go(s, &succ, completed, &mut memo);
    }
    memo.into_iter().map(|m| m.expect("resolved")).collect()
}

/// `T(p)`
pub fn traces(p: &Term, lang: &Lang) -> Result<BTreeSet<Trace>> {
    let lts = build_lts(p, lang)?;
    Ok(trace_sets(&lts, false).swap_remove(lts.root))
}

/// `CT(p)`: traces ending in a state without initials.
pub fn completed_traces(p: &Term, lang: &Lang) -> Result<BTreeSet<Trace>> {
    let lts = build_lts(p, lang)?;
    Ok(trace_sets(&lts, true).swap_remove(lts.root))
}

/// Variables of the derivatives reached from `t` in exactly `k` steps of the
/// open-term transition relation. The term itself is its own 0-step derivative.
pub fn vars_at_distance(t: &Term, k: usize, lang: &Lang) -> BTreeSet<Var> {
    let mut frontier = BTreeSet::from([t.clone()]);
    for _ in 0..k {
        frontier = frontier.iter().flat_map(|s| transitions(s, lang).into_iter().map(|(_, d)| d)).collect();
    }
    frontier.iter().flat_map(Term::vars).collect()
}

/// Renders a trace; the empty trace is `ε`.
pub fn show_trace(t: &[Action]) -> String {
    if t.is_empty() {
        "ε".to_string()
    } else {
        t.iter().map(Action::name).collect::<Vec<_>>().join("")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::syntax::{parse, parse_ab as p};

    fn ab() -> Lang {
        Lang::ab()
    }

    fn tr(s: &str) -> Trace {
        s.chars().map(|c| Action::new(&c.to_string())).collect()
    }

    #[test]
    fn interleaving_transitions() {
        let got = transitions(&p("a.0 || b.0"), &ab());
        let want = BTreeSet::from([
            (Action::new("a"), p("0 || b.0")),
            (Action::new("b"), p("a.0 || 0")),
        ]);
        assert_eq!(got, want);
        assert!(transitions(&p("x + 0"), &ab()).is_empty());
    }

    #[test]
    fn synchronisation_yields_tau() {
        let l = Lang::sync_a();
        let t = parse("a.0 || a'.0", l.alphabet()).unwrap();
        let got = transitions(&t, &l);
        assert!(got.contains(&(Action::tau(), Term::par(Term::Nil, Term::Nil))));
        assert_eq!(got.len(), 3);
        let t = parse("tau.0 || tau.0", l.alphabet()).unwrap();
        assert_eq!(transitions(&t, &l).len(), 2);
    }

    #[test]
    fn initial_sets() {
        let al = Alphabet::new(&["a", "b", "c"]).unwrap();
        let l = Lang::interleaving(al.clone());
        let t = parse("a.0 + b.c.0", &al).unwrap();
        assert_eq!(initials(&t, &l), BTreeSet::from([Action::new("a"), Action::new("b")]));
        assert!(initials(&Term::Nil, &l).is_empty());
        let pn = p("b.a.0 + b.b.a.0 + b.b.b.a.0");
        assert_eq!(initials(&pn, &ab()), BTreeSet::from([Action::new("b")]));
    }

    #[test]
    fn lts_shapes() {
        let l = build_lts(&p("a.0"), &ab()).unwrap();
        assert_eq!((l.states.len(), l.transitions.len()), (2, 1));
        let l = build_lts(&p("a.0 || b.0"), &ab()).unwrap();
        assert_eq!((l.states.len(), l.transitions.len()), (4, 4));
        // p_2 = b.a.0 + b.b.a.0 reaches a.0, b.a.0 and 0.
        let l = build_lts(&p("b.a.0 + b.b.a.0"), &ab()).unwrap();
        assert_eq!(l.states.len(), 4);
        assert!(matches!(build_lts(&p("a.x"), &ab()), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn lts_export() {
        let l = build_lts(&p("a.0"), &ab()).unwrap();
        let j = l.to_json();
        assert_eq!(j["root"], "a.0");
        assert_eq!(j["transitions"][0], serde_json::json!(["a.0", "a", "0"]));
        assert!(l.to_dot().contains("s0 -> s1 [label=\"a\"]"));
    }

    #[test]
    fn trace_examples() {
        let p2 = p("b.a.0 + b.b.a.0");
        let t = traces(&p2, &ab()).unwrap();
        assert_eq!(t, ["", "b", "ba", "bb", "bba"].iter().map(|s| tr(s)).collect());
        let ct = completed_traces(&p2, &ab()).unwrap();
        assert_eq!(ct, ["ba", "bba"].iter().map(|s| tr(s)).collect());
        assert_eq!(completed_traces(&Term::Nil, &ab()).unwrap(), BTreeSet::from([vec![]]));
        let t = traces(&p("a.0 || b.0"), &ab()).unwrap();
        assert_eq!(t, ["", "a", "b", "ab", "ba"].iter().map(|s| tr(s)).collect());
    }

    #[test]
    fn vars_at_distance_examples() {
        let al = Alphabet::new(&["a", "b", "c"]).unwrap();
        let l = Lang::interleaving(al.clone());
        let set = |v: &[&str]| v.iter().map(|s| Var::from(*s)).collect::<BTreeSet<_>>();
        assert_eq!(vars_at_distance(&p("a.x"), 1, &l), set(&["x"]));
        assert_eq!(vars_at_distance(&p("a.x"), 2, &l), set(&[]));
        let t = parse("a.x + b.(y || c.z)", &al).unwrap();
        assert_eq!(vars_at_distance(&t, 1, &l), set(&["x", "y", "z"]));
        assert_eq!(vars_at_distance(&p("x"), 0, &l), set(&["x"]));
    }
}
