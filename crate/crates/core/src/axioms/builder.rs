//! Incremental construction of proof scripts, including a normaliser for the
//! basic axioms that serves as the glue between named rewrite steps.

use std::collections::HashMap;

use crate::alphabet::Action;
use crate::error::{Error, Result};
use crate::term::{subst, Substitution, Term};

use super::proof::{conclude, ProofScript, Step};
use super::{derive, AxiomSystem, Equation};

pub struct ProofBuilder<'s> {
    system: &'s AxiomSystem,
    steps: Vec<Step>,
    concls: Vec<(Term, Term)>,
    derived: HashMap<String, usize>,
}

impl<'s> ProofBuilder<'s> {
    pub fn new(system: &'s AxiomSystem) -> ProofBuilder<'s> {
        ProofBuilder { system, steps: Vec::new(), concls: Vec::new(), derived: HashMap::new() }
    }

    pub fn system(&self) -> &'s AxiomSystem {
        self.system
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn concl(&self, i: usize) -> &(Term, Term) {
        &self.concls[i]
    }

    pub fn lhs(&self, i: usize) -> &Term {
        &self.concls[i].0
    }

    pub fn rhs(&self, i: usize) -> &Term {
        &self.concls[i].1
    }

    /// Appends a step, checking it immediately.
    pub fn push(&mut self, step: Step) -> Result<usize> {
        let c = conclude(&step, &self.concls, self.system)
            .map_err(|e| Error::Internal(format!("proof construction, step {}: {e}", self.steps.len())))?;
        self.steps.push(step);
        self.concls.push(c);
        Ok(self.steps.len() - 1)
    }

    /// Finishes with a proof whose last step concludes `concl(last)`.
    pub fn finish(self, last: usize) -> Result<ProofScript> {
        if last + 1 != self.steps.len() {
            return Err(Error::Internal("the final step must be the last one pushed".into()));
        }
        Ok(ProofScript {
            system: self.system.name.clone(),
            lang: self.system.lang.clone(),
            goal: self.concls[last].clone(),
            steps: self.steps,
        })
    }

    pub fn refl(&mut self, t: &Term) -> Result<usize> {
        self.push(Step::Refl { term: t.clone() })
    }

    pub fn sym(&mut self, of: usize) -> Result<usize> {
        self.push(Step::Sym { of })
    }

    pub fn trans(&mut self, left: usize, right: usize) -> Result<usize> {
        self.push(Step::Trans { left, right })
    }

    pub fn subst(&mut self, of: usize, s: Substitution) -> Result<usize> {
        self.push(Step::Subst { of, subst: s })
    }

    /// Chains an optional accumulated step with `next`.
    pub fn then(&mut self, acc: Option<usize>, next: usize) -> Result<usize> {
        match acc {
            None => Ok(next),
            Some(a) => self.trans(a, next),
        }
    }

    fn then_opt(&mut self, acc: Option<usize>, next: Option<usize>) -> Result<Option<usize>> {
        Ok(match (acc, next) {
            (a, None) => a,
            (None, n) => n,
            (Some(a), Some(n)) => Some(self.trans(a, n)?),
        })
    }

    /// The instance `σ(l) ≈ σ(r)` of an axiom, or its reverse.
    pub fn axiom(&mut self, id: &str, s: Substitution, reversed: bool) -> Result<usize> {
        self.push(Step::Axiom { id: id.to_string(), subst: s, context: None, path: vec![], reversed })
    }

    /// An axiom instance applied inside `ctx` at `path`.
    pub fn axiom_in(&mut self, ctx: &Term, path: &[usize], id: &str, s: Substitution, reversed: bool) -> Result<usize> {
        if path.is_empty() {
            return self.axiom(id, s, reversed);
        }
        self.push(Step::Axiom { id: id.to_string(), subst: s, context: Some(ctx.clone()), path: path.to_vec(), reversed })
    }

    /// Lifts `l ≈ r` (step `i`) to `ctx ≈ ctx[path := r]`, where `ctx` has `l` at `path`.
    pub fn lift(&mut self, i: usize, ctx: &Term, path: &[usize]) -> Result<usize> {
        let Some((&k, rest)) = path.split_first() else {
            return Ok(i);
        };
        match (ctx, k) {
            (Term::Prefix(a, body), 0) => {
                let inner = self.lift(i, body, rest)?;
                self.push(Step::CongPrefix { action: a.clone(), of: inner })
            }
            (Term::Sum(l, r) | Term::Par(l, r), _) => {
                let (left, right) = if k == 0 {
                    (self.lift(i, l, rest)?, self.refl(r)?)
                } else {
                    (self.refl(l)?, self.lift(i, r, rest)?)
                };
                if matches!(ctx, Term::Sum(..)) {
                    self.push(Step::CongSum { left, right })
                } else {
                    self.push(Step::CongPar { left, right })
                }
            }
            _ => Err(Error::Internal(format!("path {path:?} leaves `{ctx}`"))),
        }
    }

    /// Uses an axiom or, when the system lacks it, a derivation of it from the
    /// system's axioms. Derivations are built once with their own variables
    /// and reused through a substitution step.
    pub fn use_equation(&mut self, target: &Equation, s: Substitution, reversed: bool) -> Result<usize> {
        if self.system.get(&target.id).is_some_and(|e| e == target) {
            return self.axiom(&target.id, s, reversed);
        }
        let generic = match self.derived.get(&target.id) {
            Some(&i) => i,
            None => {
                let i = derive::derive_in(self, target)?;
                self.derived.insert(target.id.clone(), i);
                i
            }
        };
        let inst = self.subst(generic, s)?;
        if reversed {
            self.sym(inst)
        } else {
            Ok(inst)
        }
    }

    /// Proves `t ≈ nf(t)`; `None` when `t` is already in normal form.
    pub fn normalize(&mut self, t: &Term) -> Result<(Term, Option<usize>)> {
        match t {
            Term::Nil | Term::Var(_) => Ok((t.clone(), None)),
            Term::Prefix(a, body) => {
                let (nb, sb) = self.normalize(body)?;
                let Some(sb) = sb else { return Ok((t.clone(), None)) };
                let step = self.push(Step::CongPrefix { action: a.clone(), of: sb })?;
                Ok((Term::prefix(a.clone(), nb), Some(step)))
            }
            Term::Par(l, r) => {
                let (nl, sl) = self.normalize(l)?;
                let (nr, sr) = self.normalize(r)?;
                let mut acc = self.cong2(false, l, r, sl, sr)?;
                let cur = Term::par(nl.clone(), nr.clone());
                let xy = |x: &Term, y: &Term| subst([("x", x.clone()), ("y", y.clone())]);
                let out = if nr.is_nil() {
                    let s = self.axiom("P0", subst([("x", nl.clone())]), false)?;
                    acc = Some(self.then(acc, s)?);
                    nl
                } else if nl.is_nil() {
                    let s = self.axiom("P1", xy(&nl, &nr), false)?;
                    acc = Some(self.then(acc, s)?);
                    let s = self.axiom("P0", subst([("x", nr.clone())]), false)?;
                    acc = Some(self.then(acc, s)?);
                    nr
                } else if nr < nl {
                    let s = self.axiom("P1", xy(&nl, &nr), false)?;
                    acc = Some(self.then(acc, s)?);
                    Term::par(nr, nl)
                } else {
                    cur
                };
                Ok((out, acc))
            }
            Term::Sum(l, r) => {
                let (nl, sl) = self.normalize(l)?;
                let (nr, sr) = self.normalize(r)?;
                let acc = self.cong2(true, l, r, sl, sr)?;
                let (out, m) = self.merge(&nl, &nr)?;
                Ok((out, self.then_opt(acc, m)?))
            }
        }
    }

    pub(crate) fn cong2(&mut self, sum: bool, l: &Term, r: &Term, sl: Option<usize>, sr: Option<usize>) -> Result<Option<usize>> {
        if sl.is_none() && sr.is_none() {
            return Ok(None);
        }
        let left = match sl {
            Some(s) => s,
            None => self.refl(l)?,
        };
        let right = match sr {
            Some(s) => s,
            None => self.refl(r)?,
        };
        Ok(Some(if sum { self.push(Step::CongSum { left, right })? } else { self.push(Step::CongPar { left, right })? }))
    }

    /// `L + R ≈ canon(L ∪ R)` for canonical sums `L` and `R`.
    fn merge(&mut self, l: &Term, r: &Term) -> Result<(Term, Option<usize>)> {
        match r {
            Term::Nil => {
                let s = self.axiom("A0", subst([("x", l.clone())]), false)?;
                Ok((l.clone(), Some(s)))
            }
            Term::Sum(r1, rm) => {
                let start = Term::sum(l.clone(), r.clone());
                let s0 = self.axiom("A2", subst([("x", l.clone()), ("y", (**r1).clone()), ("z", (**rm).clone())]), true)?;
                let mid = Term::sum(Term::sum(l.clone(), (**r1).clone()), (**rm).clone());
                let (m, sm) = self.merge(l, r1)?;
                let mut acc = Some(s0);
                if let Some(sm) = sm {
                    let lifted = self.lift(sm, &mid, &[0])?;
                    acc = Some(self.then(acc, lifted)?);
                }
                let (out, si) = self.insert(&m, rm)?;
                debug_assert!(start != out);
                Ok((out, self.then_opt(acc, si)?))
            }
            e => self.insert(l, e),
        }
    }

    /// `C + e ≈ canon(C ∪ {e})` for a canonical sum `C` and a normal non-sum `e`.
    fn insert(&mut self, c: &Term, e: &Term) -> Result<(Term, Option<usize>)> {
        let cur = Term::sum(c.clone(), e.clone());
        match c {
            Term::Nil => {
                let s1 = self.axiom("A1", subst([("x", Term::Nil), ("y", e.clone())]), false)?;
                let s2 = self.axiom("A0", subst([("x", e.clone())]), false)?;
                Ok((e.clone(), Some(self.trans(s1, s2)?)))
            }
            Term::Sum(rest, last) => {
                let (rest, last) = ((**rest).clone(), (**last).clone());
                if *e > last {
                    return Ok((cur, None));
                }
                let a2 = self.axiom("A2", subst([("x", rest.clone()), ("y", last.clone()), ("z", e.clone())]), false)?;
                let after = Term::sum(rest.clone(), Term::sum(last.clone(), e.clone()));
                if *e == last {
                    let s = self.axiom_in(&after, &[1], "A3", subst([("x", last.clone())]), false)?;
                    return Ok((c.clone(), Some(self.trans(a2, s)?)));
                }
                let s1 = self.axiom_in(&after, &[1], "A1", subst([("x", last.clone()), ("y", e.clone())]), false)?;
                let s2 = self.axiom(
                    "A2",
                    subst([("x", rest.clone()), ("y", e.clone()), ("z", last.clone())]),
                    true,
                )?;
                let mut acc = self.trans(a2, s1)?;
                acc = self.trans(acc, s2)?;
                let (m, si) = self.insert(&rest, e)?;
                if let Some(si) = si {
                    let ctx = Term::sum(Term::sum(rest, e.clone()), last.clone());
                    let lifted = self.lift(si, &ctx, &[0])?;
                    acc = self.trans(acc, lifted)?;
                }
                Ok((Term::sum(m, last), Some(acc)))
            }
            single => {
                if e > single {
                    Ok((cur, None))
                } else if e == single {
                    let s = self.axiom("A3", subst([("x", e.clone())]), false)?;
                    Ok((e.clone(), Some(s)))
                } else {
                    let s = self.axiom("A1", subst([("x", single.clone()), ("y", e.clone())]), false)?;
                    Ok((Term::sum(e.clone(), single.clone()), Some(s)))
                }
            }
        }
    }

    /// Proves `t ≈ u` from the basic axioms when both have the same normal form.
    pub fn e1_eq(&mut self, t: &Term, u: &Term) -> Result<usize> {
        let (nt, st) = self.normalize(t)?;
        let (nu, su) = self.normalize(u)?;
        if nt != nu {
            return Err(Error::Internal(format!("`{t}` and `{u}` differ modulo the basic axioms")));
        }
        match (st, su) {
            (None, None) => self.refl(t),
            (Some(a), None) => Ok(a),
            (None, Some(b)) => self.sym(b),
            (Some(a), Some(b)) => {
                let back = self.sym(b)?;
                self.trans(a, back)
            }
        }
    }

    /// Proves `from ≈ σ(lhs) ≈ σ(rhs)` (or the reverse direction of `target`),
    /// bridging with the basic axioms, and returns the step with its right side.
    pub fn rewrite(&mut self, from: &Term, target: &Equation, s: Substitution, reversed: bool) -> Result<usize> {
        let inst = self.use_equation(target, s, reversed)?;
        let lhs = self.lhs(inst).clone();
        let bridge = self.e1_eq(from, &lhs)?;
        self.trans(bridge, inst)
    }

    /// Congruence under a prefix.
    pub fn cong_prefix(&mut self, a: &Action, of: usize) -> Result<usize> {
        self.push(Step::CongPrefix { action: a.clone(), of })
    }

    pub fn cong_sum(&mut self, left: usize, right: usize) -> Result<usize> {
        self.push(Step::CongSum { left, right })
    }

    pub fn cong_par(&mut self, left: usize, right: usize) -> Result<usize> {
        self.push(Step::CongPar { left, right })
    }
}

/// Normal form modulo the basic axioms, computed without a proof: sums are
/// flattened, stripped of `0`, sorted and deduplicated; `||` drops `0`
/// arguments and orders its two arguments.
pub fn e1_normal_form(t: &Term) -> Term {
    match t {
        Term::Nil | Term::Var(_) => t.clone(),
        Term::Prefix(a, b) => Term::prefix(a.clone(), e1_normal_form(b)),
        Term::Par(l, r) => {
            let (l, r) = (e1_normal_form(l), e1_normal_form(r));
            if r.is_nil() {
                l
            } else if l.is_nil() {
                r
            } else if r < l {
                Term::par(r, l)
            } else {
                Term::par(l, r)
            }
        }
        Term::Sum(..) => {
            let mut items: Vec<Term> = t.sum_operands().iter().map(e1_normal_form).flat_map(|n| n.sum_operands()).collect();
            items.sort();
            items.dedup();
            Term::sum_all(items)
        }
    }
}

/// A running proof of `start ≈ cur`, extended one step at a time.
pub(crate) struct Chain {
    start: Term,
    cur: Term,
    acc: Option<usize>,
}

impl Chain {
    pub(crate) fn new(start: &Term) -> Chain {
        Chain { start: start.clone(), cur: start.clone(), acc: None }
    }

    /// Appends a step whose left side must be the current term.
    pub(crate) fn push(&mut self, b: &mut ProofBuilder, s: usize) -> Result<()> {
        if *b.lhs(s) != self.cur {
            return Err(Error::Internal(format!("chain at `{}` cannot continue with `{}`", self.cur, b.lhs(s))));
        }
        self.acc = Some(b.then(self.acc, s)?);
        self.cur = b.rhs(s).clone();
        Ok(())
    }

    /// Moves to `t` using the basic axioms only.
    pub(crate) fn to(&mut self, b: &mut ProofBuilder, t: &Term) -> Result<()> {
        if self.cur == *t {
            return Ok(());
        }
        let s = b.e1_eq(&self.cur.clone(), t)?;
        self.push(b, s)
    }

    /// Applies an equation at the root, after matching its left side modulo
    /// the basic axioms.
    pub(crate) fn rewrite(&mut self, b: &mut ProofBuilder, e: &Equation, s: Substitution, reversed: bool) -> Result<()> {
        let step = b.rewrite(&self.cur.clone(), e, s, reversed)?;
        self.push(b, step)
    }

    /// Moves to `ctx` and applies step `s` at `path` inside it.
    pub(crate) fn apply_in(&mut self, b: &mut ProofBuilder, s: usize, ctx: &Term, path: &[usize]) -> Result<()> {
        self.to(b, ctx)?;
        let lifted = b.lift(s, ctx, path)?;
        self.push(b, lifted)
    }

    pub(crate) fn finish(self, b: &mut ProofBuilder) -> Result<usize> {
        match self.acc {
            Some(a) => Ok(a),
            None => b.refl(&self.start),
        }
    }
}
