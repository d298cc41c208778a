//! Abstract syntax of BCCSP terms with parallel composition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::alphabet::Action;

/// Variable names.
pub type Var = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Nil,
    Var(Var),
    Prefix(Action, Arc<Term>),
    Sum(Arc<Term>, Arc<Term>),
    Par(Arc<Term>, Arc<Term>),
}

/// Simultaneous replacement of variables by terms.
pub type Substitution = BTreeMap<Var, Term>;

/// Structural metrics of a term.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Metrics {
    pub size: usize,
    pub depth: usize,
    pub norm: usize,
}

impl Term {
    pub fn nil() -> Term {
        Term::Nil
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn prefix(a: impl Into<Action>, t: Term) -> Term {
        Term::Prefix(a.into(), Arc::new(t))
    }

    pub fn sum(l: Term, r: Term) -> Term {
        Term::Sum(Arc::new(l), Arc::new(r))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Arc::new(l), Arc::new(r))
    }

    /// Left-associated sum; the empty sum is `0`.
    pub fn sum_all<I: IntoIterator<Item = Term>>(items: I) -> Term {
        items.into_iter().reduce(Term::sum).unwrap_or(Term::Nil)
    }

    /// `a^n.t`
    pub fn repeat(a: &Action, n: usize, t: Term) -> Term {
        (0..n).fold(t, |acc, _| Term::prefix(a.clone(), acc))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Nil)
    }

    /// Immediate subterms, in path order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Nil | Term::Var(_) => vec![],
            Term::Prefix(_, t) => vec![t],
            Term::Sum(l, r) | Term::Par(l, r) => vec![l, r],
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Nil | Term::Var(_) => 1,
            Term::Prefix(_, t) => 1 + t.size(),
            Term::Sum(l, r) | Term::Par(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Nil | Term::Var(_) => 0,
            Term::Prefix(_, t) => 1 + t.depth(),
            Term::Sum(l, r) => l.depth().max(r.depth()),
            Term::Par(l, r) => l.depth() + r.depth(),
        }
    }

    pub fn norm(&self) -> usize {
        match self {
            Term::Nil | Term::Var(_) => 0,
            Term::Prefix(_, t) => 1 + t.norm(),
            Term::Sum(l, r) => l.norm().min(r.norm()),
            Term::Par(l, r) => l.norm() + r.norm(),
        }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics { size: self.size(), depth: self.depth(), norm: self.norm() }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Nil => {}
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Prefix(_, t) => t.collect_vars(out),
            Term::Sum(l, r) | Term::Par(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Nil => true,
            Term::Var(_) => false,
            Term::Prefix(_, t) => t.is_closed(),
            Term::Sum(l, r) | Term::Par(l, r) => l.is_closed() && r.is_closed(),
        }
    }

    /// The first variable in left-to-right order, if any.
    pub fn first_var(&self) -> Option<Var> {
        match self {
            Term::Nil => None,
            Term::Var(x) => Some(x.clone()),
            Term::Prefix(_, t) => t.first_var(),
            Term::Sum(l, r) | Term::Par(l, r) => l.first_var().or_else(|| r.first_var()),
        }
    }

    pub fn is_par_free(&self) -> bool {
        match self {
            Term::Nil | Term::Var(_) => true,
            Term::Prefix(_, t) => t.is_par_free(),
            Term::Sum(l, r) => l.is_par_free() && r.is_par_free(),
            Term::Par(..) => false,
        }
    }

    /// Actions occurring in prefixes.
    pub fn actions(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<Action>) {
        match self {
            Term::Nil | Term::Var(_) => {}
            Term::Prefix(a, t) => {
                out.insert(a.clone());
                t.collect_actions(out);
            }
            Term::Sum(l, r) | Term::Par(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Term {
        match self {
            Term::Nil => Term::Nil,
            Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Prefix(a, t) => Term::Prefix(a.clone(), Arc::new(t.substitute(s))),
            Term::Sum(l, r) => Term::sum(l.substitute(s), r.substitute(s)),
            Term::Par(l, r) => Term::par(l.substitute(s), r.substitute(s)),
        }
    }

    /// The subterm reached by following child indices from the root.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `path`; `None` if the path leaves the term.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        Some(match (self, i) {
            (Term::Prefix(a, t), 0) => Term::prefix(a.clone(), t.replace_at(rest, new)?),
            (Term::Sum(l, r), 0) => Term::sum(l.replace_at(rest, new)?, (**r).clone()),
            (Term::Sum(l, r), 1) => Term::sum((**l).clone(), r.replace_at(rest, new)?),
            (Term::Par(l, r), 0) => Term::par(l.replace_at(rest, new)?, (**r).clone()),
            (Term::Par(l, r), 1) => Term::par((**l).clone(), r.replace_at(rest, new)?),
            _ => return None,
        })
    }

    /// Membership in the grammar `t ::= 0 | t + t | t || t`.
    pub fn in_nil(&self) -> bool {
        match self {
            Term::Nil => true,
            Term::Sum(l, r) | Term::Par(l, r) => l.in_nil() && r.in_nil(),
            Term::Var(_) | Term::Prefix(..) => false,
        }
    }

    /// Operands of the top-level `+` tree, left to right, with every
    /// syntactic `0` leaf dropped.
    pub fn sum_operands(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.push_operands(&mut out);
        out
    }

    fn push_operands(&self, out: &mut Vec<Term>) {
        match self {
            Term::Sum(l, r) => {
                l.push_operands(out);
                r.push_operands(out);
            }
            Term::Nil => {}
            t => out.push(t.clone()),
        }
    }

    /// Summands in canonical order (lexicographic on the rendered string).
    pub fn summands(&self) -> Vec<Term> {
        let mut keyed: Vec<(String, Term)> =
            self.sum_operands().into_iter().map(|t| (t.to_string(), t)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.into_iter().map(|(_, t)| t).collect()
    }

    /// Removes `0` summands and factors (the `t/0` operation).
    pub fn strip_nil(&self) -> Term {
        match self {
            Term::Nil => Term::Nil,
            Term::Var(_) => self.clone(),
            Term::Prefix(a, t) => Term::prefix(a.clone(), t.strip_nil()),
            Term::Sum(l, r) => {
                if l.in_nil() {
                    r.strip_nil()
                } else if r.in_nil() {
                    l.strip_nil()
                } else {
                    Term::sum(l.strip_nil(), r.strip_nil())
                }
            }
            Term::Par(l, r) => {
                if l.in_nil() {
                    r.strip_nil()
                } else if r.in_nil() {
                    l.strip_nil()
                } else {
                    Term::par(l.strip_nil(), r.strip_nil())
                }
            }
        }
    }

    /// True when no `+` or `||` node anywhere has an operand in NIL.
    pub fn is_nil_clean(&self) -> bool {
        match self {
            Term::Nil | Term::Var(_) => true,
            Term::Prefix(_, t) => t.is_nil_clean(),
            Term::Sum(l, r) | Term::Par(l, r) => {
                !l.in_nil() && !r.in_nil() && l.is_nil_clean() && r.is_nil_clean()
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::render(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", crate::syntax::render(self))
    }
}

/// Builds a substitution from `(variable, term)` pairs.
pub fn subst<'a, I: IntoIterator<Item = (&'a str, Term)>>(pairs: I) -> Substitution {
    pairs.into_iter().map(|(x, t)| (Var::from(x), t)).collect()
}

/// Whether every non-identity image of `s` is `0`.
pub fn is_zero_substitution(s: &Substitution) -> bool {
    s.iter().all(|(x, t)| t.is_nil() || matches!(t, Term::Var(y) if y == x))
}

/// Every closed term of exactly `size` nodes over `actions`, in a fixed order.
pub fn closed_terms_of_size(actions: &[Action], size: usize) -> Vec<Term> {
    let mut table: Vec<Vec<Term>> = vec![Vec::new(); size + 1];
    for n in 1..=size {
        let mut level = Vec::new();
        if n == 1 {
            level.push(Term::Nil);
        } else {
            for a in actions {
                for t in &table[n - 1] {
                    level.push(Term::prefix(a.clone(), t.clone()));
                }
            }
            for k in 1..n - 1 {
                for l in &table[k] {
                    for r in &table[n - 1 - k] {
                        level.push(Term::sum(l.clone(), r.clone()));
                        level.push(Term::par(l.clone(), r.clone()));
                    }
                }
            }
        }
        table[n] = level;
    }
    std::mem::take(&mut table[size])
}

/// Every closed term with at most `max_size` nodes.
pub fn closed_terms_up_to(actions: &[Action], max_size: usize) -> Vec<Term> {
    (1..=max_size).flat_map(|n| closed_terms_of_size(actions, n)).collect()
}
