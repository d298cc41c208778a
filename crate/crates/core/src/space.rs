//! Hash-consed process graphs modulo bisimilarity.
//!
//! Every closed term is mapped to a class id whose successor list is the
//! sorted set of `(label, class)` pairs. Because bisimilarity is a congruence
//! for every operator, classes are built compositionally and each distinct
//! behaviour is stored once. All spectrum relations are coarser than
//! bisimilarity, so deciding them on classes gives the same answers as on
//! raw terms.

use std::collections::HashMap;

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::term::Term;

pub type Class = u32;
pub type Label = u16;

/// The class of `0`.
pub const NIL: Class = 0;

pub struct Space {
    lang: Lang,
    labels: Vec<Action>,
    complement: Vec<Option<Label>>,
    tau: Option<Label>,
    succ: Vec<Box<[(Label, Class)]>>,
    init: Vec<u32>,
    index: HashMap<Box<[(Label, Class)]>, Class>,
    par_memo: HashMap<(Class, Class), Class>,
}

impl Space {
    pub fn new(lang: &Lang) -> Space {
        let labels = lang.labels();
        assert!(labels.len() <= 32, "initial sets are stored as 32-bit masks");
        let find = |a: &Action| labels.iter().position(|b| b == a).map(|i| i as Label);
        let complement = labels
            .iter()
            .map(|a| if lang.is_sync() { lang.alphabet().complement(a).and_then(|c| find(&c)) } else { None })
            .collect();
        let tau = if lang.is_sync() { find(&Action::tau()) } else { None };
        let mut s = Space {
            lang: lang.clone(),
            labels,
            complement,
            tau,
            succ: Vec::new(),
            init: Vec::new(),
            index: HashMap::new(),
            par_memo: HashMap::new(),
        };
        let nil = s.intern(Vec::new());
        debug_assert_eq!(nil, NIL);
        s
    }

    pub fn lang(&self) -> &Lang {
        &self.lang
    }

    pub fn labels(&self) -> &[Action] {
        &self.labels
    }

    pub fn label(&self, l: Label) -> &Action {
        &self.labels[l as usize]
    }

    pub fn label_of(&self, a: &Action) -> Option<Label> {
        self.labels.iter().position(|b| b == a).map(|i| i as Label)
    }

    /// Bit mask with one bit per label.
    pub fn full_mask(&self) -> u32 {
        if self.labels.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.labels.len()) - 1
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn succ(&self, c: Class) -> &[(Label, Class)] {
        &self.succ[c as usize]
    }

    /// Initial labels of `c` as a bit mask.
    pub fn init(&self, c: Class) -> u32 {
        self.init[c as usize]
    }

    fn intern(&mut self, mut succ: Vec<(Label, Class)>) -> Class {
        succ.sort_unstable();
        succ.dedup();
        if let Some(&c) = self.index.get(succ.as_slice()) {
            return c;
        }
        let c = self.succ.len() as Class;
        let init = succ.iter().fold(0u32, |m, (l, _)| m | (1 << l));
        let key: Box<[(Label, Class)]> = succ.into_boxed_slice();
        self.index.insert(key.clone(), c);
        self.succ.push(key);
        self.init.push(init);
        c
    }

    pub fn prefix(&mut self, l: Label, c: Class) -> Class {
        self.intern(vec![(l, c)])
    }

    pub fn sum(&mut self, a: Class, b: Class) -> Class {
        if a == b || b == NIL {
            return a;
        }
        if a == NIL {
            return b;
        }
        let mut v = self.succ(a).to_vec();
        v.extend_from_slice(self.succ(b));
        self.intern(v)
    }

    pub fn par(&mut self, a: Class, b: Class) -> Class {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&c) = self.par_memo.get(&key) {
            return c;
        }
        let left = self.succ(a).to_vec();
        let right = self.succ(b).to_vec();
        let mut v = Vec::with_capacity(left.len() + right.len());
        for &(l, a2) in &left {
            let d = self.par(a2, b);
            v.push((l, d));
        }
        for &(l, b2) in &right {
            let d = self.par(a, b2);
            v.push((l, d));
        }
        if let Some(tau) = self.tau {
            for &(l, a2) in &left {
                for &(m, b2) in &right {
                    if self.complement[l as usize] == Some(m) {
                        let d = self.par(a2, b2);
                        v.push((tau, d));
                    }
                }
            }
        }
        let c = self.intern(v);
        self.par_memo.insert(key, c);
        c
    }

    /// The class of a closed term.
    pub fn class_of(&mut self, t: &Term) -> Result<Class> {
        Ok(match t {
            Term::Nil => NIL,
            Term::Var(x) => return Err(Error::OpenTerm(x.to_string())),
            Term::Prefix(a, body) => {
                let l = self.label_of(a).ok_or_else(|| {
                    Error::SyncMismatch(format!("action `{a}` is not a label of {}", self.lang.alphabet().describe()))
                })?;
                let c = self.class_of(body)?;
                self.prefix(l, c)
            }
            Term::Sum(l, r) => {
                let (a, b) = (self.class_of(l)?, self.class_of(r)?);
                self.sum(a, b)
            }
            Term::Par(l, r) => {
                let (a, b) = (self.class_of(l)?, self.class_of(r)?);
                self.par(a, b)
            }
        })
    }

    /// Successor classes of a set of classes under label `l`, sorted and deduplicated.
    pub fn step_set(&self, set: &[Class], l: Label) -> Vec<Class> {
        let mut out: Vec<Class> = set
            .iter()
            .flat_map(|&c| self.succ(c).iter().filter(move |(m, _)| *m == l).map(|&(_, d)| d))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Length of a longest path from `c`.
    pub fn depth(&self, c: Class) -> usize {
        fn go(s: &Space, c: Class, memo: &mut HashMap<Class, usize>) -> usize {
            if let Some(&d) = memo.get(&c) {
                return d;
            }
            let d = s.succ(c).iter().map(|&(_, d)| 1 + go(s, d, memo)).max().unwrap_or(0);
            memo.insert(c, d);
            d
        }
        go(self, c, &mut HashMap::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_ab as p;

    #[test]
    fn bisimilar_terms_share_a_class() {
        let mut s = Space::new(&Lang::ab());
        let a = s.class_of(&p("a.0 || b.0")).unwrap();
        let b = s.class_of(&p("a.b.0 + b.a.0")).unwrap();
        assert_eq!(a, b);
        let c = s.class_of(&p("a.b.0 + a.0")).unwrap();
        let d = s.class_of(&p("a.(b.0 + 0) + a.0 + a.0")).unwrap();
        assert_eq!(c, d);
        let e = s.class_of(&p("a.(b.0 + a.0)")).unwrap();
        assert_ne!(c, e);
    }

    #[test]
    fn chains_collapse_under_interleaving() {
        let mut s = Space::new(&Lang::ab());
        let a = s.class_of(&p("a.a.a.0 || a.a.0")).unwrap();
        let b = s.class_of(&p("a.a.a.a.a.0")).unwrap();
        assert_eq!(a, b);
        assert_eq!(s.depth(a), 5);
    }

    #[test]
    fn open_terms_are_rejected() {
        let mut s = Space::new(&Lang::ab());
        assert!(matches!(s.class_of(&p("a.x")), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn sync_adds_tau() {
        let l = Lang::sync_a();
        let mut s = Space::new(&l);
        let t = crate::syntax::parse("a.0 || a'.0", l.alphabet()).unwrap();
        let c = s.class_of(&t).unwrap();
        let tau = s.label_of(&Action::tau()).unwrap();
        assert!(s.succ(c).iter().any(|&(m, d)| m == tau && d == NIL));
    }
}
