use std::collections::{BTreeMap, HashMap, HashSet};

use crate::alphabet::Lang;
use crate::error::Result;
use crate::space::{Class, Label, Space};
use crate::term::Term;

use super::{Relation, SimFlavor};

/// Canonical ids for decorated semantics are computed by determinising the
/// class graph: a set of classes reached by the same observation is labelled
/// with what the semantics records about it, and hash-consing the resulting
/// tree makes equal observation sets share an id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Det {
    T,
    CT,
    F,
    R,
    RtBody,
    FtBody,
    RtRoot,
    FtRoot,
    PF,
}

type DetNode = (Det, Vec<u32>, Vec<(Label, u32, u32)>);

/// Decides spectrum relations between closed terms. Memo tables persist for
/// the lifetime of the checker, so batches of related checks share work.
pub struct Checker {
    space: Space,
    det_memo: HashMap<(Det, Vec<Class>), u32>,
    det_index: HashMap<DetNode, u32>,
    sim_memo: HashMap<(SimFlavor, Class, Class), bool>,
    nt_memo: HashMap<(u32, Class, Class), bool>,
}

impl Checker {
    pub fn new(lang: &Lang) -> Checker {
        Checker {
            space: Space::new(lang),
            det_memo: HashMap::new(),
            det_index: HashMap::new(),
            sim_memo: HashMap::new(),
            nt_memo: HashMap::new(),
        }
    }

    pub fn lang(&self) -> &Lang {
        self.space.lang()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn space_mut(&mut self) -> &mut Space {
        &mut self.space
    }

    pub fn class_of(&mut self, t: &Term) -> Result<Class> {
        self.space.class_of(t)
    }

    /// `p ~rel q` for closed terms.
    pub fn equivalent(&mut self, p: &Term, q: &Term, rel: Relation) -> Result<bool> {
        let (a, b) = (self.class_of(p)?, self.class_of(q)?);
        Ok(self.equivalent_classes(a, b, rel))
    }

    pub fn preorder(&mut self, p: &Term, q: &Term, flavor: SimFlavor) -> Result<bool> {
        let (a, b) = (self.class_of(p)?, self.class_of(q)?);
        Ok(self.sim(flavor, a, b))
    }

    pub fn equivalent_classes(&mut self, p: Class, q: Class, rel: Relation) -> bool {
        if p == q {
            return true;
        }
        match rel {
            Relation::B => false,
            Relation::T => self.same(Det::T, p, q),
            Relation::CT => self.same(Det::CT, p, q),
            Relation::F => self.same(Det::F, p, q),
            Relation::R => self.same(Det::R, p, q),
            Relation::RT => self.same(Det::RtRoot, p, q),
            Relation::FT => self.same(Det::FtRoot, p, q),
            Relation::PF => self.same(Det::PF, p, q),
            Relation::S => self.sim_eq(SimFlavor::S, p, q),
            Relation::CS => self.sim_eq(SimFlavor::CS, p, q),
            Relation::RS => self.sim_eq(SimFlavor::RS, p, q),
            Relation::NestedS(n) => self.sim_eq(SimFlavor::Nested(n), p, q),
            Relation::NestedT(n) => self.nested_trace(n, p, q),
        }
    }

    fn sim_eq(&mut self, f: SimFlavor, p: Class, q: Class) -> bool {
        self.sim(f, p, q) && self.sim(f, q, p)
    }

    fn same(&mut self, kind: Det, p: Class, q: Class) -> bool {
        self.det_root(kind, p) == self.det_root(kind, q)
    }

    fn det_root(&mut self, kind: Det, p: Class) -> u32 {
        match kind {
            Det::RtRoot | Det::FtRoot => {
                let body = if kind == Det::RtRoot { Det::RtBody } else { Det::FtBody };
                let b = self.det(body, vec![p]);
                let init = self.space.init(p);
                self.det_intern((kind, vec![init], vec![(0, 0, b)]))
            }
            _ => self.det(kind, vec![p]),
        }
    }

    fn det_intern(&mut self, node: DetNode) -> u32 {
        let next = self.det_index.len() as u32;
        *self.det_index.entry(node).or_insert(next)
    }

    fn det(&mut self, kind: Det, set: Vec<Class>) -> u32 {
        if let Some(&id) = self.det_memo.get(&(kind, set.clone())) {
            return id;
        }
        let label: Vec<u32> = match kind {
            Det::T | Det::RtBody | Det::FtBody | Det::RtRoot | Det::FtRoot => vec![],
            Det::CT => vec![set.iter().any(|&c| self.space.init(c) == 0) as u32],
            Det::R => {
                let mut v: Vec<u32> = set.iter().map(|&c| self.space.init(c)).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Det::F => {
                let mut v: Vec<u32> = set.iter().map(|&c| self.space.init(c)).collect();
                v.sort_unstable();
                v.dedup();
                let minimal: Vec<u32> =
                    v.iter().copied().filter(|&m| !v.iter().any(|&k| k != m && k & m == k)).collect();
                minimal
            }
            Det::PF => {
                let mut v: Vec<u32> = set.iter().map(|&c| self.det(Det::T, vec![c])).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        let full = self.space.full_mask();
        let mut groups: BTreeMap<(Label, u32), Vec<Class>> = BTreeMap::new();
        for &c in &set {
            for &(l, d) in self.space.succ(c) {
                match kind {
                    Det::RtBody => groups.entry((l, self.space.init(d))).or_default().push(d),
                    Det::FtBody => {
                        let free = full & !self.space.init(d);
                        let mut sub = free;
                        loop {
                            groups.entry((l, sub)).or_default().push(d);
                            if sub == 0 {
                                break;
                            }
                            sub = (sub - 1) & free;
                        }
                    }
                    _ => groups.entry((l, 0)).or_default().push(d),
                }
            }
        }
        let mut children = Vec::with_capacity(groups.len());
        for ((l, extra), mut targets) in groups {
            targets.sort_unstable();
            targets.dedup();
            let id = self.det(kind, targets);
            children.push((l, extra, id));
        }
        let id = self.det_intern((kind, label, children));
        self.det_memo.insert((kind, set), id);
        id
    }

    /// The simulation preorder of the given flavour, by well-founded
    /// recursion on the (acyclic) class graph.
    pub fn sim(&mut self, f: SimFlavor, p: Class, q: Class) -> bool {
        if p == q || f == SimFlavor::Nested(0) {
            return true;
        }
        if let Some(&b) = self.sim_memo.get(&(f, p, q)) {
            return b;
        }
        let (ip, iq) = (self.space.init(p), self.space.init(q));
        let side = match f {
            SimFlavor::S => true,
            SimFlavor::CS => ip != 0 || iq == 0,
            SimFlavor::RS => ip == iq,
            SimFlavor::FS => iq & !ip == 0,
            SimFlavor::Nested(n) => self.sim(SimFlavor::Nested(n - 1), q, p),
        };
        let ok = side && {
            let ps = self.space.succ(p).to_vec();
            let qs = self.space.succ(q).to_vec();
            ps.iter().all(|&(a, p2)| qs.iter().any(|&(b, q2)| a == b && self.sim(f, p2, q2)))
        };
        self.sim_memo.insert((f, p, q), ok);
        ok
    }

    /// `n`-nested trace equivalence straight from its inductive definition:
    /// for every trace α, each α-derivative on one side is matched by an
    /// α-derivative on the other side that is `(n-1)`-nested trace equivalent.
    pub fn nested_trace(&mut self, n: u32, p: Class, q: Class) -> bool {
        if n == 0 || p == q {
            return true;
        }
        let key = (n, p.min(q), p.max(q));
        if let Some(&b) = self.nt_memo.get(&key) {
            return b;
        }
        let labels = self.space.labels().len() as Label;
        let mut seen: HashSet<(Vec<Class>, Vec<Class>)> = HashSet::new();
        let mut stack = vec![(vec![p], vec![q])];
        let mut ok = true;
        'outer: while let Some((s, t)) = stack.pop() {
            if !seen.insert((s.clone(), t.clone())) {
                continue;
            }
            if n > 1 {
                let covers = |me: &mut Checker, xs: &[Class], ys: &[Class]| {
                    xs.iter().all(|&x| ys.iter().any(|&y| me.nested_trace(n - 1, x, y)))
                };
                if !covers(self, &s, &t) || !covers(self, &t, &s) {
                    ok = false;
                    break 'outer;
                }
            }
            for l in 0..labels {
                let (s2, t2) = (self.space.step_set(&s, l), self.space.step_set(&t, l));
                if s2.is_empty() != t2.is_empty() {
                    ok = false;
                    break 'outer;
                }
                if !s2.is_empty() {
                    stack.push((s2, t2));
                }
            }
        }
        self.nt_memo.insert(key, ok);
        ok
    }
}
