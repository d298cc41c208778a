//! Derivations of schemas that a system does not contain as axioms but
//! proves: the congruence laws of complete simulation from those of
//! simulation, the complete trace laws from the trace laws, ready simulation
//! and possible-futures style laws from the readiness and failure laws, and
//! the ready trace law from readiness or from failure traces.

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::term::{subst, Term};

use super::builder::{Chain, ProofBuilder};
use super::proof::ProofScript;
use super::{AxiomSystem, Equation, Schema};

/// A target equation with a proof of it in some system.
#[derive(Clone, Debug)]
pub struct Derived {
    pub target: Equation,
    pub script: ProofScript,
}

const DERIVABLE: [Schema; 8] =
    [Schema::CS, Schema::CSP1, Schema::CSP2, Schema::CT, Schema::CTP, Schema::FT, Schema::RS, Schema::RT];

fn present(system: &AxiomSystem, s: Schema) -> bool {
    system.count(s.name()) > 0
}

/// Whether the system has `s` as an axiom or can derive it here.
fn available(system: &AxiomSystem, s: Schema) -> bool {
    present(system, s)
        || match s {
            Schema::CS => present(system, Schema::S),
            Schema::CSP1 => present(system, Schema::SP1),
            Schema::CSP2 => present(system, Schema::SP2),
            Schema::CT => present(system, Schema::T),
            Schema::CTP => present(system, Schema::TP),
            Schema::FT => present(system, Schema::F),
            Schema::RS => present(system, Schema::R),
            Schema::RT => {
                present(system, Schema::R) || (available(system, Schema::RS) && available(system, Schema::FT))
            }
            _ => false,
        }
}

/// Instances of schemas the system lacks but derives.
pub fn derivation_targets(system: &AxiomSystem) -> Vec<Equation> {
    DERIVABLE
        .into_iter()
        .filter(|&s| !present(system, s) && available(system, s))
        .flat_map(|s| s.instances(&system.lang))
        .collect()
}

/// A proof of `target` in `system`.
pub fn derivation(target: &Equation, system: &AxiomSystem) -> Result<Derived> {
    let mut b = ProofBuilder::new(system);
    let last = derive_in(&mut b, target)?;
    Ok(Derived { target: target.clone(), script: b.finish(last)? })
}

fn instance(lang: &Lang, s: Schema, args: &[&Action]) -> Result<Equation> {
    let names: Vec<&str> = args.iter().map(|a| a.name()).collect();
    let id = if args.is_empty() { s.name().to_string() } else { format!("{}[{}]", s.name(), names.join(",")) };
    s.instances(lang)
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Internal(format!("no instance {id}")))
}

fn args(target: &Equation) -> Vec<Action> {
    match target.id.split_once('[') {
        None => Vec::new(),
        Some((_, rest)) => rest
            .trim_end_matches(']')
            .split([',', '|'])
            .filter(|s| !s.is_empty())
            .map(Action::new)
            .collect(),
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn pre(a: &Action, t: Term) -> Term {
    Term::prefix(a.clone(), t)
}

/// Proves `target` inside `b`, returning the step that concludes it exactly.
pub(crate) fn derive_in(b: &mut ProofBuilder, target: &Equation) -> Result<usize> {
    let system = b.system();
    if system.get(&target.id) == Some(target) {
        return b.axiom(&target.id, Default::default(), false);
    }
    let schema: Schema = target.schema_name().parse()?;
    if !available(system, schema) {
        return Err(Error::Internal(format!("{} does not derive {}", system.name, target.id)));
    }
    let lang = system.lang.clone();
    let ac = args(target);
    let a = |k: usize| -> Result<&Action> {
        ac.get(k).ok_or_else(|| Error::Internal(format!("malformed instance id {}", target.id)))
    };
    let plus = |l: Term, r: Term| Term::sum(l, r);
    // Single rewrite by a more general law, bridged by the basic axioms.
    let simple = |b: &mut ProofBuilder, e: Equation, s| -> Result<usize> {
        let mut c = Chain::new(&target.lhs);
        c.rewrite(b, &e, s, false)?;
        c.to(b, &target.rhs)?;
        c.finish(b)
    };
    match schema {
        Schema::CS => {
            let (x0, x1) = (a(0)?, a(1)?);
            let e = instance(&lang, Schema::S, &[x0])?;
            simple(b, e, subst([("x", plus(pre(x1, v("x")), v("z"))), ("y", v("y"))]))
        }
        Schema::CSP1 => {
            let (p, q, r, s) = (a(0)?, a(1)?, a(2)?, a(3)?);
            let e = instance(&lang, Schema::SP1, &[])?;
            simple(
                b,
                e,
                subst([
                    ("x", plus(pre(p, v("x")), v("u"))),
                    ("y", plus(pre(q, v("y")), v("u"))),
                    ("z", plus(pre(r, v("z")), v("v"))),
                    ("w", plus(pre(s, v("w")), v("v"))),
                ]),
            )
        }
        Schema::CSP2 => {
            let (p, q, r) = (a(0)?, a(1)?, a(2)?);
            let e = instance(&lang, Schema::SP2, &[p])?;
            simple(
                b,
                e,
                subst([
                    ("x", v("x")),
                    ("y", plus(pre(q, v("y")), v("w"))),
                    ("z", plus(pre(r, v("z")), v("w"))),
                ]),
            )
        }
        Schema::CT => {
            let (p, q, r) = (a(0)?, a(1)?, a(2)?);
            let e = instance(&lang, Schema::T, &[p])?;
            simple(b, e, subst([("x", plus(pre(q, v("x")), v("z"))), ("y", plus(pre(r, v("y")), v("w")))]))
        }
        Schema::CTP => {
            let (p, q) = (a(0)?, a(1)?);
            let e = instance(&lang, Schema::TP, &[])?;
            simple(
                b,
                e,
                subst([("x", plus(pre(p, v("x")), v("w"))), ("y", plus(pre(q, v("y")), v("w"))), ("z", v("z"))]),
            )
        }
        Schema::FT => {
            let e = instance(&lang, Schema::F, &[a(0)?])?;
            simple(b, e, subst([("x", v("x")), ("y", v("y")), ("z", Term::Nil)]))
        }
        Schema::RS => {
            // From the right: a(bx+z) + a(by + (bx+z)) is an instance of the
            // readiness law whose right side collapses to the left of RS.
            let (p, q) = (a(0)?, a(1)?);
            let e = instance(&lang, Schema::R, &[p, q])?;
            let mut c = Chain::new(&target.rhs);
            let w = plus(pre(q, v("x")), v("z"));
            c.rewrite(b, &e, subst([("x", v("x")), ("y", v("y")), ("z", v("z")), ("w", w)]), false)?;
            c.to(b, &target.lhs)?;
            let back = c.finish(b)?;
            b.sym(back)
        }
        Schema::RT => {
            let p = a(0)?.clone();
            let labels = lang.labels();
            let xs: Vec<Term> = (1..=labels.len()).map(|k| v(&format!("x{k}"))).collect();
            let ys: Vec<Term> = (1..=labels.len()).map(|k| v(&format!("y{k}"))).collect();
            let back = if present(system, Schema::R) {
                rt_by_readiness(b, target, &lang, &p, &labels, &xs, &ys)?
            } else {
                rt_by_failure_traces(b, target, &lang, &p, &labels, &xs, &ys)?
            };
            b.sym(back)
        }
        _ => Err(Error::Internal(format!("no derivation for {}", target.id))),
    }
}

fn without(items: &[Term], drop: &[&Term]) -> Term {
    Term::sum_all(items.iter().filter(|t| !drop.contains(t)).cloned())
}

/// With the current term equal to `a(Σ first) + a(Σ second)` modulo the basic
/// axioms, where `first` holds `b p` and `second` holds `b q` for every
/// `(b, p, q)` in `pairs`, adds each `b q` to the first body by readiness.
fn absorb(
    b: &mut ProofBuilder,
    c: &mut Chain,
    lang: &Lang,
    a: &Action,
    pairs: &[(Action, Term, Term)],
    mut first: Vec<Term>,
    second: Vec<Term>,
) -> Result<Vec<Term>> {
    for (lab, p, q) in pairs {
        let (bp, bq) = (pre(lab, p.clone()), pre(lab, q.clone()));
        let e = instance(lang, Schema::R, &[a, lab])?;
        let s = subst([
            ("x", p.clone()),
            ("y", q.clone()),
            ("z", without(&first, &[&bp])),
            ("w", without(&second, &[&bq])),
        ]);
        c.rewrite(b, &e, s, false)?;
        first.push(bq);
    }
    Ok(first)
}

/// Proves `rhs ≈ lhs` of the ready trace law with the readiness law.
fn rt_by_readiness(
    b: &mut ProofBuilder,
    target: &Equation,
    lang: &Lang,
    a: &Action,
    labels: &[Action],
    xs: &[Term],
    ys: &[Term],
) -> Result<usize> {
    let z = v("z");
    let bx: Vec<Term> = labels.iter().zip(xs).map(|(l, x)| pre(l, x.clone())).chain([z.clone()]).collect();
    let by: Vec<Term> = labels.iter().zip(ys).map(|(l, y)| pre(l, y.clone())).chain([z.clone()]).collect();
    let mut c = Chain::new(&target.rhs);
    let forward: Vec<(Action, Term, Term)> =
        labels.iter().zip(xs.iter().zip(ys)).map(|(l, (x, y))| (l.clone(), x.clone(), y.clone())).collect();
    // a(X+z) + a(Y+z) ≈ a(X+Y+z) + a(Y+z)
    let both = absorb(b, &mut c, lang, a, &forward, bx, by.clone())?;
    // a(Y+z) + a(X+Y+z) ≈ a(Y+X+z) + a(X+Y+z), which is a(X+Y+z) twice.
    let backward: Vec<(Action, Term, Term)> =
        forward.iter().map(|(l, x, y)| (l.clone(), y.clone(), x.clone())).collect();
    absorb(b, &mut c, lang, a, &backward, by, both)?;
    c.to(b, &target.lhs)?;
    c.finish(b)
}

/// `a(Σ items) ≈ a(Σ items) + a(Σ kept)` where `kept` drops `b d` for every
/// `(b, k, d)` in `pairs`, by repeated use of the ready simulation law.
fn split_off(
    b: &mut ProofBuilder,
    lang: &Lang,
    a: &Action,
    items: &[Term],
    pairs: &[(Action, Term, Term)],
) -> Result<usize> {
    let top = pre(a, Term::sum_all(items.iter().cloned()));
    let mut ih: Option<usize> = None;
    let mut cur: Vec<Term> = items.to_vec();
    for (lab, keep, drop) in pairs {
        let (bk, bd) = (pre(lab, keep.clone()), pre(lab, drop.clone()));
        let e = instance(lang, Schema::RS, &[a, lab])?;
        let s = subst([("x", keep.clone()), ("y", drop.clone()), ("z", without(&cur, &[&bk, &bd]))]);
        let from = pre(a, Term::sum_all(cur.iter().cloned()));
        let rs = b.rewrite(&from, &e, s, false)?;
        cur.retain(|t| *t != bd);
        ih = Some(match ih {
            None => rs,
            Some(prev) => {
                // top ≈ top + T_j ≈ top + (T_j + T_j+1) ≈ (top + T_j) + T_j+1 ≈ top + T_j+1
                let mut c = Chain::new(&top);
                c.push(b, prev)?;
                let ctx = Term::sum(top.clone(), b.lhs(rs).clone());
                c.apply_in(b, rs, &ctx, &[1])?;
                let back = b.sym(prev)?;
                let next = b.rhs(rs).at(&[1]).expect("two summands").clone();
                let ctx = Term::sum(b.lhs(back).clone(), next);
                c.apply_in(b, back, &ctx, &[0])?;
                c.finish(b)?
            }
        });
    }
    ih.ok_or_else(|| Error::Internal("nothing to split".into()))
}

/// Proves `rhs ≈ lhs` of the ready trace law with the failure trace law and
/// the ready simulation law.
fn rt_by_failure_traces(
    b: &mut ProofBuilder,
    target: &Equation,
    lang: &Lang,
    a: &Action,
    labels: &[Action],
    xs: &[Term],
    ys: &[Term],
) -> Result<usize> {
    let z = v("z");
    let mut items = Vec::new();
    for (l, (x, y)) in labels.iter().zip(xs.iter().zip(ys)) {
        items.push(pre(l, x.clone()));
        items.push(pre(l, y.clone()));
    }
    items.push(z.clone());
    let keep_x: Vec<(Action, Term, Term)> =
        labels.iter().zip(xs.iter().zip(ys)).map(|(l, (x, y))| (l.clone(), x.clone(), y.clone())).collect();
    let keep_y: Vec<(Action, Term, Term)> =
        keep_x.iter().map(|(l, x, y)| (l.clone(), y.clone(), x.clone())).collect();
    let hx = split_off(b, lang, a, &items, &keep_x)?;
    let hy = split_off(b, lang, a, &items, &keep_y)?;
    // lhs ≈ lhs + a(X+z) + a(Y+z)
    let mut up = Chain::new(&target.lhs);
    let top = b.lhs(hx).clone();
    up.to(b, &top)?;
    up.push(b, hx)?;
    let ctx = Term::sum(b.lhs(hy).clone(), b.rhs(hx).at(&[1]).expect("two summands").clone());
    up.apply_in(b, hy, &ctx, &[0])?;
    let up = up.finish(b)?;
    // rhs ≈ rhs + a((X+z)+(Y+z)) ≈ lhs + rhs ≈ lhs
    let xz = Term::sum_all(labels.iter().zip(xs).map(|(l, x)| pre(l, x.clone())).chain([z.clone()]));
    let yz = Term::sum_all(labels.iter().zip(ys).map(|(l, y)| pre(l, y.clone())).chain([z]));
    let ft = instance(lang, Schema::FT, &[a])?;
    let mut c = Chain::new(&target.rhs);
    c.rewrite(b, &ft, subst([("x", xz), ("y", yz)]), false)?;
    let down = b.sym(up)?;
    let q = b.lhs(down).clone();
    c.to(b, &q)?;
    c.push(b, down)?;
    c.finish(b)
}
