use std::sync::Arc;

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::space::{Class, Label, Space};
use crate::term::{Substitution, Term, Var};

use super::{Checker, Relation};

/// The closed substitutions tried by [`refute_open`]. Every variable ranges
/// over `pool`, and when `deep_tags` is set the `i`-th variable additionally
/// receives `a^(D+i).0`, where `D` is one more than the larger depth of the
/// two sides. The full product is enumerated in lexicographic order.
#[derive(Clone, Debug)]
pub struct SubstitutionScheme {
    pub pool: Vec<Term>,
    pub deep_tags: bool,
    /// Stop after this many substitutions.
    pub limit: Option<usize>,
}

impl SubstitutionScheme {
    /// `{0, a.0, b.0, a.a.0, a.0+b.0, b.(a.0+b.0)}` with deep tags, where `a`
    /// and `b` are the first two actions of the alphabet.
    pub fn standard(lang: &Lang) -> SubstitutionScheme {
        let acts = lang.alphabet().actions();
        let a = acts[0].clone();
        let mut pool = vec![Term::Nil, Term::prefix(a.clone(), Term::Nil)];
        if let Some(b) = acts.get(1) {
            let ab = Term::sum(Term::prefix(a.clone(), Term::Nil), Term::prefix(b.clone(), Term::Nil));
            pool.push(Term::prefix(b.clone(), Term::Nil));
            pool.push(Term::repeat(&a, 2, Term::Nil));
            pool.push(ab.clone());
            pool.push(Term::prefix(b.clone(), ab));
        } else {
            pool.push(Term::repeat(&a, 2, Term::Nil));
        }
        SubstitutionScheme { pool, deep_tags: true, limit: None }
    }

    /// Candidate images per variable of `t` and `u`, variables in sorted order.
    pub fn domains(&self, lang: &Lang, t: &Term, u: &Term) -> Vec<(Var, Vec<Term>)> {
        let mut vars = t.vars();
        vars.extend(u.vars());
        let a = lang.alphabet().actions()[0].clone();
        let d = 1 + t.depth().max(u.depth());
        vars.into_iter()
            .enumerate()
            .map(|(i, x)| {
                let mut dom = self.pool.clone();
                if self.deep_tags {
                    dom.push(Term::repeat(&a, d + i + 1, Term::Nil));
                }
                (x, dom)
            })
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Refutation {
    /// A closed substitution under which the two sides are not related.
    Refuted(Substitution),
    /// No witness among `tried` substitutions. Not a proof of soundness.
    NotRefuted { tried: usize },
}

impl Refutation {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Refutation::Refuted(_))
    }
}

/// Terms with variables resolved to slots, evaluated straight into classes.
pub(crate) enum Compiled {
    Nil,
    Slot(usize),
    Prefix(Label, Box<Compiled>),
    Sum(Box<Compiled>, Box<Compiled>),
    Par(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn new(t: &Term, vars: &[Var], space: &Space) -> Result<Compiled> {
        Ok(match t {
            Term::Nil => Compiled::Nil,
            Term::Var(x) => Compiled::Slot(
                vars.iter().position(|y| y == x).ok_or_else(|| Error::OpenTerm(x.to_string()))?,
            ),
            Term::Prefix(a, body) => {
                let l = space.label_of(a).ok_or_else(|| unknown_label(a, space))?;
                Compiled::Prefix(l, Box::new(Compiled::new(body, vars, space)?))
            }
            Term::Sum(l, r) => {
                Compiled::Sum(Box::new(Compiled::new(l, vars, space)?), Box::new(Compiled::new(r, vars, space)?))
            }
            Term::Par(l, r) => {
                Compiled::Par(Box::new(Compiled::new(l, vars, space)?), Box::new(Compiled::new(r, vars, space)?))
            }
        })
    }

    pub(crate) fn eval(&self, space: &mut Space, val: &[Class]) -> Class {
        match self {
            Compiled::Nil => crate::space::NIL,
            Compiled::Slot(i) => val[*i],
            Compiled::Prefix(l, b) => {
                let c = b.eval(space, val);
                space.prefix(*l, c)
            }
            Compiled::Sum(l, r) => {
                let (a, b) = (l.eval(space, val), r.eval(space, val));
                space.sum(a, b)
            }
            Compiled::Par(l, r) => {
                let (a, b) = (l.eval(space, val), r.eval(space, val));
                space.par(a, b)
            }
        }
    }
}

fn unknown_label(a: &Action, space: &Space) -> Error {
    Error::SyncMismatch(format!("action `{a}` is not a label of {}", space.lang().alphabet().describe()))
}

impl Checker {
    /// Searches the scheme for a closed substitution separating `t` and `u`.
    pub fn refute(&mut self, t: &Term, u: &Term, rel: Relation, scheme: &SubstitutionScheme) -> Result<Refutation> {
        let domains = scheme.domains(self.lang(), t, u);
        let vars: Vec<Var> = domains.iter().map(|(x, _)| x.clone()).collect();
        let ct = Compiled::new(t, &vars, self.space())?;
        let cu = Compiled::new(u, &vars, self.space())?;
        let mut classes: Vec<Vec<Class>> = Vec::with_capacity(domains.len());
        for (_, dom) in &domains {
            classes.push(dom.iter().map(|d| self.class_of(d)).collect::<Result<_>>()?);
        }
        let mut idx = vec![0usize; domains.len()];
        let mut val: Vec<Class> = classes.iter().map(|c| c[0]).collect();
        let mut tried = 0usize;
        loop {
            if scheme.limit.is_some_and(|l| tried >= l) {
                break;
            }
            tried += 1;
            let a = ct.eval(self.space_mut(), &val);
            let b = cu.eval(self.space_mut(), &val);
            if !self.equivalent_classes(a, b, rel) {
                let sigma = domains.iter().zip(&idx).map(|((x, dom), &i)| (Arc::clone(x), dom[i].clone())).collect();
                return Ok(Refutation::Refuted(sigma));
            }
            // Odometer, last variable fastest.
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return Ok(Refutation::NotRefuted { tried });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < classes[k].len() {
                    val[k] = classes[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                val[k] = classes[k][0];
            }
        }
        Ok(Refutation::NotRefuted { tried })
    }
}

/// Looks for a closed substitution σ with `σ(t)` and `σ(u)` unrelated by `rel`.
pub fn refute_open(t: &Term, u: &Term, rel: Relation, scheme: &SubstitutionScheme, lang: &Lang) -> Result<Refutation> {
    Checker::new(lang).refute(t, u, rel, scheme)
}
