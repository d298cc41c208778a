//! Removal of parallel composition from closed terms, following the case
//! analyses of the ground-completeness arguments. Each step rewrites one
//! `p || q` with `p` and `q` already parallel-free, and recurses on strictly
//! smaller arguments.

use std::collections::HashMap;

use crate::alphabet::{Action, Lang};
use crate::axioms::{build_system, e1_normal_form, AxiomSystem, Equation, ProofBuilder, ProofScript, Schema, SystemName};
use crate::equivalences::Relation;
use crate::error::{Error, Result};
use crate::term::{Substitution, Term, Var};

/// Which case analysis a system uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// RSP1 / RSP2 / EL2
    ReadySimulation,
    /// CSP1 / CSP2 / EL1
    CompleteSimulation,
    /// FP / EL2
    ReadyTrace,
    /// CTP / EL1
    CompleteTrace,
}

impl Family {
    pub fn of(sys: SystemName) -> Option<Family> {
        let SystemName::For(r) = sys else { return None };
        Some(match r {
            Relation::RS => Family::ReadySimulation,
            Relation::CS | Relation::S => Family::CompleteSimulation,
            Relation::RT | Relation::FT | Relation::R | Relation::F => Family::ReadyTrace,
            Relation::CT | Relation::T => Family::CompleteTrace,
            _ => return None,
        })
    }
}

/// One rewrite of a parallel composition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CaseStep {
    /// Schema of the law applied: `P0`, `P1`, `EL2`, `RSP1`, ...
    pub rule: String,
    /// `size(p) + size(q)` of the composition being rewritten.
    pub measure: usize,
    /// Measure of the enclosing rewrite, if any.
    pub parent: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pub result: Term,
    pub proof: Option<ProofScript>,
    pub trace: Vec<CaseStep>,
}

impl Elimination {
    pub fn rules(&self) -> Vec<&str> {
        self.trace.iter().map(|c| c.rule.as_str()).collect()
    }
}

/// Eliminates `||` from `p` in the named system.
pub fn eliminate_in(p: &Term, system_name: &str, lang: &Lang, with_proof: bool) -> Result<Elimination> {
    let system = build_system(system_name, lang)?;
    eliminate(p, &system, with_proof)
}

/// Eliminates `||` from a closed term. The result is parallel-free and in
/// normal form modulo the basic axioms; with `with_proof` a script deriving
/// `p ≈ result` in `system` is attached.
pub fn eliminate(p: &Term, system: &AxiomSystem, with_proof: bool) -> Result<Elimination> {
    if let Some(x) = p.first_var() {
        return Err(Error::OpenTerm(x.to_string()));
    }
    let family = system
        .system
        .and_then(Family::of)
        .ok_or_else(|| Error::UnknownSystem(format!("{} has no elimination procedure", system.name)))?;
    let mut e = Eliminator {
        b: with_proof.then(|| ProofBuilder::new(system)),
        system,
        lang: system.lang.clone(),
        family,
        cache: HashMap::new(),
        trace: Vec::new(),
        stack: Vec::new(),
    };
    let (result, step) = e.elim(p)?;
    let proof = match e.b {
        None => None,
        Some(mut b) => {
            let last = match step {
                Some(s) => s,
                None => b.refl(p)?,
            };
            Some(b.finish(last)?)
        }
    };
    Ok(Elimination { result, proof, trace: e.trace })
}

enum Case {
    Apply(Equation, Substitution),
    Swap,
}

struct Eliminator<'s> {
    b: Option<ProofBuilder<'s>>,
    system: &'s AxiomSystem,
    lang: Lang,
    family: Family,
    cache: HashMap<String, Equation>,
    trace: Vec<CaseStep>,
    stack: Vec<usize>,
}

type Head = (Action, Term);

fn heads(t: &Term) -> Vec<Head> {
    t.sum_operands()
        .into_iter()
        .map(|s| match s {
            Term::Prefix(a, body) => (a, (*body).clone()),
            other => unreachable!("parallel-free normal forms are sums of prefixes, got {other}"),
        })
        .collect()
}

/// The least `(i, j)`, `i < j`, with equal head actions.
fn dup_pair(hs: &[Head]) -> Option<(usize, usize)> {
    (0..hs.len()).flat_map(|i| (i + 1..hs.len()).map(move |j| (i, j))).find(|&(i, j)| hs[i].0 == hs[j].0)
}

fn rest(hs: &[Head], skip: &[usize]) -> Term {
    Term::sum_all(
        hs.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, (a, t))| Term::prefix(a.clone(), t.clone())),
    )
}

fn sigma(pairs: Vec<(String, Term)>) -> Substitution {
    pairs.into_iter().map(|(x, t)| (Var::from(x.as_str()), t)).collect()
}

fn names(acts: &[&Action]) -> String {
    acts.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
}

impl Eliminator<'_> {
    fn equation(&mut self, schema: Schema, id: String) -> Result<Equation> {
        if let Some(e) = self.system.get(&id) {
            return Ok(e.clone());
        }
        if !self.cache.contains_key(&id) {
            for e in schema.instances(&self.lang) {
                self.cache.insert(e.id.clone(), e);
            }
        }
        self.cache.get(&id).cloned().ok_or_else(|| Error::Internal(format!("no instance {id}")))
    }

    fn join(&mut self, a: Option<usize>, b: Option<usize>) -> Result<Option<usize>> {
        Ok(match (a, b, self.b.as_mut()) {
            (Some(x), Some(y), Some(b)) => Some(b.trans(x, y)?),
            (x, y, _) => x.or(y),
        })
    }

    fn elim(&mut self, t: &Term) -> Result<(Term, Option<usize>)> {
        match t {
            Term::Nil => Ok((Term::Nil, None)),
            Term::Var(x) => Err(Error::OpenTerm(x.to_string())),
            Term::Prefix(a, body) => {
                let (r, s) = self.elim(body)?;
                let step = match (s, self.b.as_mut()) {
                    (Some(s), Some(b)) => Some(b.cong_prefix(a, s)?),
                    _ => None,
                };
                Ok((Term::prefix(a.clone(), r), step))
            }
            Term::Sum(l, r) => {
                let (el, sl) = self.elim(l)?;
                let (er, sr) = self.elim(r)?;
                let joined = Term::sum(el, er);
                match self.b.as_mut() {
                    None => Ok((e1_normal_form(&joined), None)),
                    Some(b) => {
                        let s1 = b.cong2(true, l, r, sl, sr)?;
                        let (nf, s2) = b.normalize(&joined)?;
                        Ok((nf, self.join(s1, s2)?))
                    }
                }
            }
            Term::Par(l, r) => {
                let (el, sl) = self.elim(l)?;
                let (er, sr) = self.elim(r)?;
                let s1 = match self.b.as_mut() {
                    Some(b) => b.cong2(false, l, r, sl, sr)?,
                    None => None,
                };
                let (res, s2) = self.par(el, er)?;
                Ok((res, self.join(s1, s2)?))
            }
        }
    }

    fn record(&mut self, rule: &str, measure: usize) {
        self.trace.push(CaseStep { rule: rule.to_string(), measure, parent: self.stack.last().copied() });
    }

    /// `p || q ≈ r` for parallel-free normal forms `p` and `q`.
    fn par(&mut self, p: Term, q: Term) -> Result<(Term, Option<usize>)> {
        let measure = p.size() + q.size();
        if q.is_nil() {
            self.record("P0", measure);
            let s = match self.b.as_mut() {
                Some(b) => Some(b.axiom("P0", sigma(vec![("x".into(), p.clone())]), false)?),
                None => None,
            };
            return Ok((p, s));
        }
        let (mut p, mut q) = (p, q);
        let mut acc = None;
        let mut case = self.case(&p, &q)?;
        if p.is_nil() || matches!(case, Case::Swap) {
            self.record("P1", measure);
            if let Some(b) = self.b.as_mut() {
                acc = Some(b.axiom("P1", sigma(vec![("x".into(), p.clone()), ("y".into(), q.clone())]), false)?);
            }
            std::mem::swap(&mut p, &mut q);
            if q.is_nil() {
                let (r, s) = self.par(p, q)?;
                return Ok((r, self.join(acc, s)?));
            }
            case = self.case(&p, &q)?;
        }
        let Case::Apply(eq, s) = case else {
            return Err(Error::Internal(format!("case analysis swapped twice on {p} || {q}")));
        };
        self.record(eq.schema_name(), measure);
        let rhs = eq.rhs.substitute(&s);
        if let Some(b) = self.b.as_mut() {
            let step = b.rewrite(&Term::par(p, q), &eq, s, false)?;
            acc = Some(b.then(acc, step)?);
        }
        self.stack.push(measure);
        let out = self.elim(&rhs);
        self.stack.pop();
        let (res, s2) = out?;
        Ok((res, self.join(acc, s2)?))
    }

    fn case(&mut self, p: &Term, q: &Term) -> Result<Case> {
        if p.is_nil() {
            return Ok(Case::Swap);
        }
        let (hp, hq) = (heads(p), heads(q));
        let v = |s: &str, t: &Term| (s.to_string(), t.clone());
        match self.family {
            Family::ReadySimulation => match (dup_pair(&hp), dup_pair(&hq)) {
                (Some((i0, i1)), Some((j0, j1))) => {
                    let e = self.equation(Schema::RSP1, format!("RSP1[{}]", names(&[&hp[i0].0, &hq[j0].0])))?;
                    Ok(Case::Apply(
                        e,
                        sigma(vec![
                            v("x", &hp[i0].1),
                            v("y", &hp[i1].1),
                            v("u", &rest(&hp, &[i0, i1])),
                            v("z", &hq[j0].1),
                            v("w", &hq[j1].1),
                            v("v", &rest(&hq, &[j0, j1])),
                        ]),
                    ))
                }
                (None, Some((j0, j1))) => {
                    let (acts, mut s) = self.distinct(&hp, "x");
                    let id = format!("RSP2[{}|{}]", names(&acts.iter().collect::<Vec<_>>()), hq[j0].0);
                    let e = self.equation(Schema::RSP2, id)?;
                    s.extend(sigma(vec![v("y", &hq[j0].1), v("z", &hq[j1].1), v("w", &rest(&hq, &[j0, j1]))]));
                    Ok(Case::Apply(e, s))
                }
                (Some(_), None) => Ok(Case::Swap),
                (None, None) => self.el2(&hp, &hq),
            },
            Family::CompleteSimulation => match (hp.len(), hq.len()) {
                (1, 1) => self.el1(&hp[0], &hq[0]),
                (1, _) => {
                    let e = self.equation(Schema::CSP2, format!("CSP2[{}]", names(&[&hp[0].0, &hq[0].0, &hq[1].0])))?;
                    Ok(Case::Apply(
                        e,
                        sigma(vec![v("x", &hp[0].1), v("y", &hq[0].1), v("z", &hq[1].1), v("w", &rest(&hq, &[0, 1]))]),
                    ))
                }
                (_, 1) => Ok(Case::Swap),
                _ => {
                    let id = format!("CSP1[{}]", names(&[&hp[0].0, &hp[1].0, &hq[0].0, &hq[1].0]));
                    let e = self.equation(Schema::CSP1, id)?;
                    Ok(Case::Apply(
                        e,
                        sigma(vec![
                            v("x", &hp[0].1),
                            v("y", &hp[1].1),
                            v("u", &rest(&hp, &[0, 1])),
                            v("z", &hq[0].1),
                            v("w", &hq[1].1),
                            v("v", &rest(&hq, &[0, 1])),
                        ]),
                    ))
                }
            },
            Family::ReadyTrace => match (dup_pair(&hp), dup_pair(&hq)) {
                (Some((i0, i1)), _) => {
                    let e = self.equation(Schema::FP, format!("FP[{}]", hp[i0].0))?;
                    Ok(Case::Apply(
                        e,
                        sigma(vec![v("x", &hp[i0].1), v("y", &hp[i1].1), v("w", &rest(&hp, &[i0, i1])), v("z", q)]),
                    ))
                }
                (None, Some(_)) => Ok(Case::Swap),
                (None, None) => self.el2(&hp, &hq),
            },
            Family::CompleteTrace => match (hp.len(), hq.len()) {
                (1, 1) => self.el1(&hp[0], &hq[0]),
                (1, _) => Ok(Case::Swap),
                _ => {
                    let e = self.equation(Schema::CTP, format!("CTP[{}]", names(&[&hp[0].0, &hp[1].0])))?;
                    Ok(Case::Apply(
                        e,
                        sigma(vec![v("x", &hp[0].1), v("y", &hp[1].1), v("w", &rest(&hp, &[0, 1])), v("z", q)]),
                    ))
                }
            },
        }
    }

    /// Head actions of a summand list without duplicates, in label order,
    /// with the bodies bound to `x1, x2, ...`.
    fn distinct(&self, hs: &[Head], var: &str) -> (Vec<Action>, Substitution) {
        let mut acts = Vec::new();
        let mut s = Substitution::new();
        for l in self.lang.labels() {
            if let Some((_, body)) = hs.iter().find(|(a, _)| *a == l) {
                acts.push(l);
                s.insert(Var::from(format!("{var}{}", acts.len()).as_str()), body.clone());
            }
        }
        (acts, s)
    }

    fn el2(&mut self, hp: &[Head], hq: &[Head]) -> Result<Case> {
        let (i, mut s) = self.distinct(hp, "x");
        let (j, sy) = self.distinct(hq, "y");
        s.extend(sy);
        let (schema, name) = if self.lang.is_sync() { (Schema::ELC2, "ELC2") } else { (Schema::EL2, "EL2") };
        let id = format!("{name}[{}|{}]", names(&i.iter().collect::<Vec<_>>()), names(&j.iter().collect::<Vec<_>>()));
        Ok(Case::Apply(self.equation(schema, id)?, s))
    }

    fn el1(&mut self, p: &Head, q: &Head) -> Result<Case> {
        let (schema, name) = if !self.lang.is_sync() {
            (Schema::EL1, "EL1")
        } else if self.lang.synchronises(&p.0, &q.0) {
            (Schema::ELC1t, "ELC1t")
        } else {
            (Schema::ELC1, "ELC1")
        };
        let e = self.equation(schema, format!("{name}[{}]", names(&[&p.0, &q.0])))?;
        Ok(Case::Apply(e, sigma(vec![("x".into(), p.1.clone()), ("y".into(), q.1.clone())])))
    }
}
