//! Backtracking search for a finite model of a system that falsifies a goal.
//!
//! Every axiom is grounded over all valuations of its variables, and the
//! ground subterms are hash-consed into one network, so a subterm shared by
//! many instances is evaluated once. Sums are flattened, sorted and
//! deduplicated when the system has the laws that justify it; this merges
//! most instances. A subterm whose arguments are known waits on the table
//! cell it reads; assigning the cell values every waiter and walks up to the
//! parents and to the instances they close. An instance with
//! one side known and the other waiting on a cell forces that cell.
//!
//! Cells also keep a set of values still open to them. The negated goal
//! removes the value its known side already has from the cell its other
//! side waits on, and an instance whose open side is one operation away from
//! a waiting cell prunes that cell's values that would break it. Among the
//! remaining cells the goal's own come first, then the one with the fewest
//! values left. Element symmetry is broken by the least number heuristic: a
//! cell may only take a value already mentioned or the least unmentioned one.
//!
//! The goal is negated at one valuation at a time, taken up to renaming of
//! the non-zero elements. Each valuation gets its own search, and they take
//! turns in slices of decisions so that an easy valuation late in the list
//! is not starved by hard ones before it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::mpsc;

use crate::alphabet::Lang;
use crate::axioms::{AxiomSystem, Equation};
use crate::error::{Error, Result};
use crate::term::{Term, Var};

use super::FiniteModel;

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found { model: FiniteModel, nodes: u64 },
    /// No model of this carrier size exists.
    NoModel { nodes: u64 },
    /// The node budget ran out first.
    BudgetExhausted { nodes: u64 },
}

impl SearchOutcome {
    pub fn model(&self) -> Option<&FiniteModel> {
        match self {
            SearchOutcome::Found { model, .. } => Some(model),
            _ => None,
        }
    }
}

/// Searches models with exactly `carrier` elements, spending at most
/// `budget` decisions.
pub fn search_model(
    lang: &Lang,
    carrier: usize,
    system: &AxiomSystem,
    goal: &Equation,
    budget: u64,
) -> Result<SearchOutcome> {
    if !(1..=8).contains(&carrier) {
        return Err(Error::Model(format!("carrier {carrier} is outside 1..=8")));
    }
    let net = Net::build(lang, carrier, system, goal)?;
    Ok(std::thread::scope(|scope| {
        let mut live: Vec<Worker> = (0..net.goals.len())
            .map(|g| {
                let (grant, grants) = mpsc::channel();
                let (report, reports) = mpsc::channel();
                let net = &net;
                scope.spawn(move || work(net, g, Gate { grants, report }));
                Worker { grant, reports, used: 0 }
            })
            .collect();
        let mut total = 0;
        while !live.is_empty() {
            let mut i = 0;
            while i < live.len() {
                if total >= budget {
                    return SearchOutcome::BudgetExhausted { nodes: total };
                }
                let w = &mut live[i];
                let _ = w.grant.send(w.used + SLICE.min(budget - total));
                let Ok(report) = w.reports.recv() else {
                    unreachable!("a search worker stopped without reporting")
                };
                let (nodes, done) = match report {
                    Report::Paused(nodes) => (nodes, None),
                    Report::Done(nodes, model) => (nodes, Some(model)),
                };
                total += nodes - w.used;
                w.used = nodes;
                match done {
                    None => i += 1,
                    Some(Some(model)) => return SearchOutcome::Found { model, nodes: total },
                    Some(None) => {
                        live.remove(i);
                    }
                }
            }
        }
        SearchOutcome::NoModel { nodes: total }
    }))
}

/// Decisions a goal may spend before the next goal gets its turn.
const SLICE: u64 = 1000;

struct Worker {
    grant: mpsc::Sender<u64>,
    reports: mpsc::Receiver<Report>,
    used: u64,
}

enum Report {
    Paused(u64),
    /// Decisions spent, and the model if one was found.
    Done(u64, Option<FiniteModel>),
}

/// The worker's side of the turn taking: it reports, then waits for a new
/// decision limit. A closed channel means stop.
struct Gate {
    grants: mpsc::Receiver<u64>,
    report: mpsc::Sender<Report>,
}

/// Searches under one negated goal instance, one slice at a time.
fn work(net: &Net, g: usize, gate: Gate) {
    let Ok(limit) = gate.grants.recv() else { return };
    let mut s = State::new(net, g, limit, gate);
    let outcome = if s.start() { s.dfs(0, s.mentioned(0).max(net.goals[g].1)) } else { Outcome::Exhausted };
    let model = matches!(outcome, Outcome::Found).then(|| s.model());
    if !matches!(outcome, Outcome::Budget) {
        let _ = s.gate.report.send(Report::Done(s.nodes, model));
    }
}

/// Valuations in which each value is at most one more than every earlier value.
fn canonical_valuations(k: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, n: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let top = cur.iter().copied().max().map_or(1, |m| m as usize + 1).min(n - 1);
        for v in 0..=top {
            cur.push(v as u8);
            go(k, n, cur, out);
            cur.pop();
        }
    }
    go(k, n, &mut cur, &mut out);
    out
}

const UNSET: u8 = u8::MAX;
const NONE: u32 = u32::MAX;

/// A ground subterm: an element, or an operation applied to other nodes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    /// Prefix labels are `0..nl`, then `+` and `||`; `CONST` for elements.
    op: u8,
    a: u32,
    b: u32,
}

const CONST: u8 = u8::MAX;

const SUM_LAWS: [&str; 4] = ["A0", "A1", "A2", "A3"];

/// The ground instances of a system at one carrier size, plus one negated
/// goal instance per canonical valuation.
struct Net {
    n: usize,
    labels: Vec<String>,
    nodes: Vec<Node>,
    /// Parents and instances of each node, as offsets into flat lists.
    up_off: Vec<u32>,
    up: Vec<u32>,
    inst_off: Vec<u32>,
    inst_of: Vec<u32>,
    /// Sides of each instance; goals come after the axioms.
    insts: Vec<(u32, u32)>,
    /// Instance id of each goal and the largest element in its valuation.
    goals: Vec<(u32, usize)>,
    canon: Vec<usize>,
    mirror: Vec<Option<usize>>,
    max_arg: Vec<usize>,
    fixed: Vec<(usize, u8)>,
    order: Vec<usize>,
}

struct Builder {
    nl: usize,
    /// Which of A0, A1 with A2, and A3 may be used to normalise sums. Off
    /// while grounding those laws themselves, which must still be enforced.
    normalise: bool,
    unit: bool,
    ac: bool,
    idem: bool,
    comm_plus: bool,
    comm_par: bool,
    index: HashMap<Node, u32>,
    nodes: Vec<Node>,
}

impl Builder {
    fn node(&mut self, mut k: Node) -> u32 {
        let comm = (k.op as usize == self.nl && self.comm_plus) || (k.op as usize == self.nl + 1 && self.comm_par);
        if comm && k.a > k.b {
            std::mem::swap(&mut k.a, &mut k.b);
        }
        if let Some(&id) = self.index.get(&k) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(k);
        self.index.insert(k, id);
        id
    }

    fn ground(&mut self, t: &Term, val: &HashMap<&Var, u8>, labels: &[String]) -> Result<u32> {
        let op = |a: u8, x: u32, y: u32| Node { op: a, a: x, b: y };
        Ok(match t {
            Term::Nil => 0,
            Term::Var(x) => val[x] as u32,
            Term::Prefix(a, body) => {
                let l = labels
                    .iter()
                    .position(|l| l == a.name())
                    .ok_or_else(|| Error::Model(format!("no prefix table for `{a}`")))?;
                let c = self.ground(body, val, labels)?;
                self.node(op(l as u8, c, NONE))
            }
            Term::Sum(l, r) if self.normalise && self.ac => {
                let mut parts = Vec::new();
                self.summands(l, val, labels, &mut parts)?;
                self.summands(r, val, labels, &mut parts)?;
                if self.unit {
                    parts.retain(|&k| k != 0);
                }
                parts.sort_unstable();
                if self.idem {
                    parts.dedup();
                }
                let Some((&first, rest)) = parts.split_first() else { return Ok(0) };
                rest.iter().fold(first, |acc, &k| self.node(op(self.nl as u8, acc, k)))
            }
            Term::Sum(l, r) => {
                let (x, y) = (self.ground(l, val, labels)?, self.ground(r, val, labels)?);
                self.node(op(self.nl as u8, x, y))
            }
            Term::Par(l, r) => {
                let (x, y) = (self.ground(l, val, labels)?, self.ground(r, val, labels)?);
                self.node(op(self.nl as u8 + 1, x, y))
            }
        })
    }
}

impl Builder {
    fn summands(&mut self, t: &Term, val: &HashMap<&Var, u8>, labels: &[String], out: &mut Vec<u32>) -> Result<()> {
        match t {
            Term::Sum(l, r) => {
                self.summands(l, val, labels, out)?;
                self.summands(r, val, labels, out)
            }
            _ => {
                out.push(self.ground(t, val, labels)?);
                Ok(())
            }
        }
    }
}

/// Flattens per-node adjacency into offsets and one list, dropping repeats.
fn flatten(mut adj: Vec<Vec<u32>>) -> (Vec<u32>, Vec<u32>) {
    let mut off = Vec::with_capacity(adj.len() + 1);
    let mut flat = Vec::new();
    off.push(0);
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
        flat.extend_from_slice(l);
        off.push(flat.len() as u32);
    }
    (off, flat)
}

impl Net {
    fn build(lang: &Lang, n: usize, system: &AxiomSystem, goal: &Equation) -> Result<Net> {
        let labels: Vec<String> = lang.labels().iter().map(|a| a.name().to_string()).collect();
        let nl = labels.len();
        let (pb, qb) = (nl * n, nl * n + n * n);
        let total = qb + n * n;
        let has = |id: &str| system.contains(id);
        let mut canon: Vec<usize> = (0..total).collect();
        let mut mirror = vec![None; total];
        for (base, comm) in [(pb, has("A1")), (qb, has("P1"))] {
            if comm {
                for i in 0..n {
                    for j in 0..n {
                        canon[base + i * n + j] = base + i.min(j) * n + i.max(j);
                        if i != j {
                            mirror[base + i * n + j] = Some(base + j * n + i);
                        }
                    }
                }
            }
        }
        let mut max_arg = vec![0; total];
        for l in 0..nl {
            for e in 0..n {
                max_arg[l * n + e] = e;
            }
        }
        for base in [pb, qb] {
            for i in 0..n {
                for j in 0..n {
                    max_arg[base + i * n + j] = i.max(j);
                }
            }
        }
        let mut fixed = Vec::new();
        for i in 0..n {
            if has("A0") {
                fixed.push((canon[pb + i * n], i as u8));
            }
            if has("A3") {
                fixed.push((canon[pb + i * n + i], i as u8));
            }
            if has("P0") {
                fixed.push((canon[qb + i * n], i as u8));
            }
        }
        let mut order: Vec<usize> =
            (0..total).filter(|&c| canon[c] == c && !fixed.iter().any(|&(f, _)| f == c)).collect();
        // Sums first: with the sum laws they are the most constrained tables.
        let rank = |c: usize| if c >= pb && c < qb { 0 } else if c < pb { 1 } else { 2 };
        order.sort_by_key(|&c| (rank(c), max_arg[c], c));

        let mut b = Builder {
            nl,
            normalise: true,
            unit: has("A0"),
            ac: has("A1") && has("A2"),
            idem: has("A3"),
            comm_plus: has("A1"), comm_par: has("P1"), index: HashMap::new(), nodes: Vec::new() };
        for e in 0..n {
            b.node(Node { op: CONST, a: e as u32, b: NONE });
        }
        let mut insts = Vec::new();
        let mut seen = HashSet::new();
        for e in &system.equations {
            b.normalise = !SUM_LAWS.contains(&e.id.as_str());
            let vars: Vec<Var> = e.vars().into_iter().collect();
            let mut idx = vec![0u8; vars.len()];
            loop {
                let val: HashMap<&Var, u8> = vars.iter().zip(idx.iter().copied()).collect();
                let l = b.ground(&e.lhs, &val, &labels)?;
                let r = b.ground(&e.rhs, &val, &labels)?;
                let key = (l.min(r), l.max(r));
                if l != r && seen.insert(key) {
                    insts.push(key);
                }
                if !bump(&mut idx, n) {
                    break;
                }
            }
        }
        b.normalise = true;
        let vars: Vec<Var> = goal.vars().into_iter().collect();
        let mut goals = Vec::new();
        for idx in canonical_valuations(vars.len(), n) {
            let val: HashMap<&Var, u8> = vars.iter().zip(idx.iter().copied()).collect();
            let l = b.ground(&goal.lhs, &val, &labels)?;
            let r = b.ground(&goal.rhs, &val, &labels)?;
            goals.push((insts.len() as u32, idx.iter().copied().max().unwrap_or(0) as usize));
            insts.push((l, r));
        }

        let mut up = vec![Vec::new(); b.nodes.len()];
        for (id, k) in b.nodes.iter().enumerate() {
            if k.op != CONST {
                up[k.a as usize].push(id as u32);
                if k.b != NONE {
                    up[k.b as usize].push(id as u32);
                }
            }
        }
        let mut of = vec![Vec::new(); b.nodes.len()];
        for (i, &(l, r)) in insts.iter().enumerate() {
            of[l as usize].push(i as u32);
            of[r as usize].push(i as u32);
        }
        let (up_off, up) = flatten(up);
        let (inst_off, inst_of) = flatten(of);
        Ok(Net {
            n,
            labels,
            nodes: b.nodes,
            up_off,
            up,
            inst_off,
            inst_of,
            insts,
            goals,
            canon,
            mirror,
            max_arg,
            fixed,
            order,
        })
    }

    fn parents(&self, k: u32) -> &[u32] {
        &self.up[self.up_off[k as usize] as usize..self.up_off[k as usize + 1] as usize]
    }

    fn instances(&self, k: u32) -> &[u32] {
        &self.inst_of[self.inst_off[k as usize] as usize..self.inst_off[k as usize + 1] as usize]
    }
}

enum Outcome {
    Found,
    Exhausted,
    Budget,
}

#[derive(Clone, Copy)]
enum Undo {
    Cell(usize),
    Value(u32),
    Wait(usize),
    Dom(usize, u8),
}

enum Event {
    Assign(usize, u8),
    Value(u32, u8),
}

struct State<'n> {
    net: &'n Net,
    goal: u32,
    vals: Vec<u8>,
    cells: Vec<u8>,
    waiting: Vec<Vec<u32>>,
    /// Values still open to each cell.
    dom: Vec<u8>,
    trail: Vec<Undo>,
    events: Vec<Event>,
    nodes: u64,
    limit: u64,
    gate: Gate,
}

impl<'n> State<'n> {
    fn new(net: &'n Net, goal: usize, limit: u64, gate: Gate) -> State<'n> {
        State {
            net,
            goal: net.goals[goal].0,
            vals: vec![UNSET; net.nodes.len()],
            cells: vec![UNSET; net.canon.len()],
            waiting: vec![Vec::new(); net.canon.len()],
            dom: vec![((1u16 << net.n) - 1) as u8; net.canon.len()],
            trail: Vec::new(),
            events: Vec::new(),
            nodes: 0,
            limit,
            gate,
        }
    }

    /// Values the elements and the cells fixed by the basic laws; false when
    /// the axioms and the goal already clash.
    fn start(&mut self) -> bool {
        for &(c, v) in &self.net.fixed {
            self.events.push(Event::Assign(c, v));
        }
        for e in 0..self.net.n {
            self.events.push(Event::Value(e as u32, e as u8));
        }
        self.run()
    }

    /// The canonical cell a node reads, once its arguments are known.
    fn cell(&self, k: u32) -> Option<usize> {
        let node = self.net.nodes[k as usize];
        let n = self.net.n;
        let nl = self.net.labels.len();
        let a = self.vals[node.a as usize];
        if a == UNSET {
            return None;
        }
        let c = if (node.op as usize) < nl {
            node.op as usize * n + a as usize
        } else {
            let b = self.vals[node.b as usize];
            if b == UNSET {
                return None;
            }
            let base = nl * n + if node.op as usize == nl { 0 } else { n * n };
            base + a as usize * n + b as usize
        };
        Some(self.net.canon[c])
    }

    fn set_cell(&mut self, c: usize, v: u8) {
        self.cells[c] = v;
        if let Some(m) = self.net.mirror[c] {
            self.cells[m] = v;
        }
    }

    /// Re-examines an instance after one of its sides changed.
    fn check(&mut self, i: u32) -> bool {
        let goal = i >= self.net.goals[0].0;
        if goal && i != self.goal {
            return true;
        }
        let (l, r) = self.net.insts[i as usize];
        let (lv, rv) = (self.vals[l as usize], self.vals[r as usize]);
        match (lv, rv) {
            (UNSET, UNSET) => {
                let (cl, cr) = (self.cell(l), self.cell(r));
                if goal {
                    return !(cl.is_some() && cl == cr);
                }
                match (cl, cr) {
                    (Some(c), Some(d)) if c != d => {
                        let (mc, md) = (self.dom[c], self.dom[d]);
                        self.restrict(c, md) && self.restrict(d, mc)
                    }
                    _ => true,
                }
            }
            (UNSET, v) | (v, UNSET) => {
                let open = if lv == UNSET { l } else { r };
                if let Some(c) = self.cell(open) {
                    if !goal {
                        self.events.push(Event::Assign(c, v));
                        return true;
                    }
                    return self.restrict(c, !(1u8 << v));
                }
                // One level further out: rule out the values of the cell
                // below that would settle the instance the wrong way.
                let Some((d, targets)) = self.near(open) else { return true };
                let mut keep = 0u8;
                for u in 0..self.net.n {
                    if self.dom[d] & (1 << u) == 0 {
                        continue;
                    }
                    let t = targets[u];
                    let ok = if goal {
                        self.cells[t] != v
                    } else {
                        match self.cells[t] {
                            UNSET => self.dom[t] & (1 << v) != 0,
                            w => w == v,
                        }
                    };
                    if ok {
                        keep |= 1 << u;
                    }
                }
                self.restrict(d, keep)
            }
            (a, b) => (a == b) != goal,
        }
    }

    /// For a node one step from readiness: the cell its unknown argument
    /// waits on, and the cell the node would read for each value of it.
    fn near(&self, k: u32) -> Option<(usize, [usize; 8])> {
        let node = self.net.nodes[k as usize];
        let n = self.net.n;
        let nl = self.net.labels.len();
        let (a, b) = (self.vals[node.a as usize], if node.b == NONE { 0 } else { self.vals[node.b as usize] });
        let (child, known, first) = match (a, b) {
            (UNSET, UNSET) => return None,
            (UNSET, w) => (node.a, w, true),
            (w, UNSET) => (node.b, w, false),
            _ => return None,
        };
        let d = self.cell(child)?;
        let mut t = [0; 8];
        for (u, slot) in t.iter_mut().enumerate().take(n) {
            let c = if (node.op as usize) < nl {
                node.op as usize * n + u
            } else {
                let base = nl * n + if node.op as usize == nl { 0 } else { n * n };
                let (x, y) = if first { (u, known as usize) } else { (known as usize, u) };
                base + x * n + y
            };
            *slot = self.net.canon[c];
        }
        Some((d, t))
    }

    /// Narrows the values left for `c`; false when none remain.
    fn restrict(&mut self, c: usize, mask: u8) -> bool {
        let old = self.dom[c];
        let new = old & mask;
        if new == old {
            return true;
        }
        self.trail.push(Undo::Dom(c, old));
        self.dom[c] = new;
        match self.cells[c] {
            UNSET => match new.count_ones() {
                0 => false,
                1 => {
                    self.events.push(Event::Assign(c, new.trailing_zeros() as u8));
                    true
                }
                _ => true,
            },
            v => new & (1 << v) != 0,
        }
    }

    /// Drains the event stack; false on a violated instance.
    fn run(&mut self) -> bool {
        let net = self.net;
        while let Some(ev) = self.events.pop() {
            match ev {
                Event::Assign(c, v) => {
                    match self.cells[c] {
                        UNSET if self.dom[c] & (1 << v) != 0 => {}
                        w if w == v => continue,
                        _ => return self.fail(),
                    }
                    self.set_cell(c, v);
                    self.trail.push(Undo::Cell(c));
                    for k in 0..self.waiting[c].len() {
                        self.events.push(Event::Value(self.waiting[c][k], v));
                    }
                }
                Event::Value(k, v) => {
                    if self.vals[k as usize] != UNSET {
                        continue;
                    }
                    self.vals[k as usize] = v;
                    self.trail.push(Undo::Value(k));
                    for &p in net.parents(k) {
                        if self.vals[p as usize] != UNSET {
                            continue;
                        }
                        let Some(c) = self.cell(p) else { continue };
                        match self.cells[c] {
                            UNSET => {
                                self.waiting[c].push(p);
                                self.trail.push(Undo::Wait(c));
                                for &i in net.instances(p) {
                                    if !self.check(i) {
                                        return self.fail();
                                    }
                                }
                                for &q in net.parents(p) {
                                    if self.vals[q as usize] == UNSET {
                                        for &i in net.instances(q) {
                                            if !self.check(i) {
                                                return self.fail();
                                            }
                                        }
                                    }
                                }
                            }
                            w => self.events.push(Event::Value(p, w)),
                        }
                    }
                    for &i in net.instances(k) {
                        if !self.check(i) {
                            return self.fail();
                        }
                    }
                }
            }
        }
        true
    }

    fn fail(&mut self) -> bool {
        self.events.clear();
        false
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            match self.trail.pop().expect("non-empty trail") {
                Undo::Cell(c) => {
                    self.cells[c] = UNSET;
                    if let Some(m) = self.net.mirror[c] {
                        self.cells[m] = UNSET;
                    }
                }
                Undo::Value(k) => self.vals[k as usize] = UNSET,
                Undo::Wait(c) => {
                    self.waiting[c].pop();
                }
                Undo::Dom(c, m) => self.dom[c] = m,
            }
        }
    }

    /// Largest element mentioned by the cells assigned from trail position `from` on.
    fn mentioned(&self, from: usize) -> usize {
        self.trail[from..]
            .iter()
            .filter_map(|u| match *u {
                Undo::Cell(c) => Some(self.net.max_arg[c].max(self.cells[c] as usize)),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// A cell the goal instance is blocked on, if its sides are not yet known.
    fn goal_cell(&self) -> Option<usize> {
        let (l, r) = self.net.insts[self.goal as usize];
        let mut stack = vec![l, r];
        while let Some(k) = stack.pop() {
            if self.vals[k as usize] != UNSET {
                continue;
            }
            if let Some(c) = self.cell(k) {
                return Some(c);
            }
            let node = self.net.nodes[k as usize];
            stack.push(node.a);
            if node.b != NONE {
                stack.push(node.b);
            }
        }
        None
    }

    fn dfs(&mut self, mut pos: usize, mdn: usize) -> Outcome {
        let order = &self.net.order;
        while pos < order.len() && self.cells[order[pos]] != UNSET {
            pos += 1;
        }
        let Some(&next) = order.get(pos) else {
            return Outcome::Found;
        };
        let mut c = self.goal_cell().unwrap_or(next);
        if c == next {
            let mut best = self.dom[c].count_ones();
            for &d in &order[pos..] {
                if self.cells[d] == UNSET && self.dom[d].count_ones() < best {
                    best = self.dom[d].count_ones();
                    c = d;
                }
            }
        }
        let top = mdn.max(self.net.max_arg[c]);
        let limit = (top + 1).min(self.net.n - 1);
        for v in 0..=limit {
            if self.dom[c] & (1 << v) == 0 {
                continue;
            }
            if self.nodes >= self.limit && !self.pause() {
                return Outcome::Budget;
            }
            self.nodes += 1;
            let start = self.trail.len();
            self.events.push(Event::Assign(c, v as u8));
            if self.run() {
                match self.dfs(pos + (c == next) as usize, top.max(self.mentioned(start))) {
                    Outcome::Exhausted => {}
                    done => return done,
                }
            }
            self.undo_to(start);
        }
        Outcome::Exhausted
    }

    /// Hands the turn back; false when told to stop.
    fn pause(&mut self) -> bool {
        if self.gate.report.send(Report::Paused(self.nodes)).is_err() {
            return false;
        }
        match self.gate.grants.recv() {
            Ok(limit) => {
                self.limit = limit;
                true
            }
            Err(_) => false,
        }
    }

    fn model(&self) -> FiniteModel {
        let n = self.net.n;
        let at = |c: usize| self.cells[c] as usize;
        let pb = self.net.labels.len() * n;
        let table = |base: usize| (0..n).map(|i| (0..n).map(|j| at(base + i * n + j)).collect()).collect();
        FiniteModel {
            carrier: n,
            zero: 0,
            prefix: self
                .net
                .labels
                .iter()
                .enumerate()
                .map(|(l, a)| (a.clone(), (0..n).map(|e| at(l * n + e)).collect()))
                .collect::<BTreeMap<_, _>>(),
            plus: table(pb),
            par: table(pb + n * n),
        }
    }
}

/// Advances an odometer, last position fastest; false after the last valuation.
fn bump(idx: &mut [u8], n: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if (idx[k] as usize) < n {
            return true;
        }
        idx[k] = 0;
    }
    false
}

