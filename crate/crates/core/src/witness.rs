//! The equation families behind the negative results, and checks of the
//! properties that make them work.
//!
//! For the interleaving family, `p_N = b.a + b.b.a + ... + b^N.a` and
//!
//! ```text
//! e_N:  a || p_N  =  a.p_N + b.(a || a) + b.(a || b.a) + ... + b.(a || b^(N-1).a)
//! ```
//!
//! The synchronising family is the same with `tau` in place of `b`. Both sides
//! of `e_N` are bisimilar, but only the left one has a summand possible
//! futures equivalent to `a || p_N`; that asymmetry is the witness property.
//! With one visible action the interleaving family cannot be built, and
//! whether possible futures is finitely based there is left alone.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::alphabet::{Action, Lang};
use crate::axioms::{conclude, AxiomSystem, Equation, ProofScript};
use crate::equivalences::{Checker, Relation};
use crate::error::{Error, Result};
use crate::semantics::build_lts;
use crate::term::Term;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum FamilyKind {
    Interleaving,
    Sync,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyKind> {
        match s.to_ascii_lowercase().as_str() {
            "interleaving" | "i" => Ok(FamilyKind::Interleaving),
            "sync" | "s" => Ok(FamilyKind::Sync),
            _ => Err(Error::Script(format!("unknown family `{s}` (interleaving or sync)"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Interleaving => "interleaving",
            FamilyKind::Sync => "sync",
        })
    }
}

#[derive(Clone, Debug)]
pub struct WitnessFamily {
    pub kind: FamilyKind,
    pub n: usize,
    pub lang: Lang,
    pub a: Action,
    /// `b`, or `tau` for the synchronising family.
    pub b: Action,
    /// `p_N` (written `q_N` for the synchronising family).
    pub p: Term,
    pub equation: Equation,
}

impl WitnessFamily {
    /// `b^i.a`
    pub fn tower(&self, i: usize) -> Term {
        Term::repeat(&self.b, i, Term::prefix(self.a.clone(), Term::Nil))
    }

    /// `a || p_N`, the term whose summands are tracked.
    pub fn target(&self) -> Term {
        Term::par(Term::prefix(self.a.clone(), Term::Nil), self.p.clone())
    }
}

/// Builds `p_N` and `e_N`. The interleaving family takes the first two
/// actions of an interleaving alphabet; the synchronising one takes the first
/// visible action and `tau`.
pub fn make_family(kind: FamilyKind, n: usize, lang: &Lang) -> Result<WitnessFamily> {
    if n == 0 {
        return Err(Error::Script("the family is indexed from 1".into()));
    }
    let acts = lang.alphabet().actions();
    let (a, b) = match kind {
        FamilyKind::Interleaving => {
            if lang.is_sync() {
                return Err(Error::SyncMismatch("the interleaving family needs interleaving semantics".into()));
            }
            match acts {
                [a, b, ..] => (a.clone(), b.clone()),
                _ => {
                    return Err(Error::AlphabetTooSmall(format!(
                        "the interleaving family needs two actions, {} has {}",
                        lang.alphabet().describe(),
                        acts.len()
                    )))
                }
            }
        }
        FamilyKind::Sync => {
            if !lang.is_sync() {
                return Err(Error::SyncMismatch("the synchronising family needs a synchronising alphabet".into()));
            }
            let a = acts.first().ok_or_else(|| Error::AlphabetTooSmall("no visible action".into()))?;
            (a.clone(), Action::tau())
        }
    };
    let a0 = Term::prefix(a.clone(), Term::Nil);
    let tower = |i: usize| Term::repeat(&b, i, a0.clone());
    let p = Term::sum_all((1..=n).map(tower));
    let lhs = Term::par(a0.clone(), p.clone());
    let rhs = Term::sum_all(
        std::iter::once(Term::prefix(a.clone(), p.clone()))
            .chain((1..=n).map(|i| Term::prefix(b.clone(), Term::par(a0.clone(), tower(i - 1))))),
    );
    let id = match kind {
        FamilyKind::Interleaving => format!("e_{n}"),
        FamilyKind::Sync => format!("ec_{n}"),
    };
    Ok(WitnessFamily { kind, n, lang: lang.clone(), a, b, p, equation: Equation::new(&id, lhs, rhs) })
}

/// Whether some summand of `p`, after removing `0` summands and factors, is
/// `rel`-equivalent to `target`. A term that is not a sum is its own summand.
pub fn has_summand_equiv(p: &Term, target: &Term, rel: Relation, lang: &Lang) -> Result<bool> {
    summand_equiv(&mut Checker::new(lang), p, target, rel)
}

fn summand_equiv(c: &mut Checker, p: &Term, target: &Term, rel: Relation) -> Result<bool> {
    for t in [p, target] {
        if let Some(x) = t.first_var() {
            return Err(Error::OpenTerm(x.to_string()));
        }
    }
    for s in p.strip_nil().summands() {
        if c.equivalent(&s, target, rel)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The summand form of `q ~PF p_N`: every summand of `q` is equivalent to
/// some `b^i.a` with `1 <= i <= N`, and every such tower to some summand.
fn matches_towers(c: &mut Checker, q: &Term, fam: &WitnessFamily) -> Result<bool> {
    let qs = q.strip_nil().summands();
    let towers: Vec<Term> = (1..=fam.n).map(|i| fam.tower(i)).collect();
    let mut hit = vec![false; towers.len()];
    for s in &qs {
        let mut any = false;
        for (i, t) in towers.iter().enumerate() {
            if c.equivalent(s, t, Relation::PF)? {
                hit[i] = true;
                any = true;
            }
        }
        if !any {
            return Ok(false);
        }
    }
    Ok(hit.iter().all(|&h| h))
}

/// Terms near `p_N`, some possible futures equivalent to it and some not.
fn neighbours(fam: &WitnessFamily) -> Vec<Term> {
    let n = fam.n;
    let b = |t: Term| Term::prefix(fam.b.clone(), t);
    let towers: Vec<Term> = (1..=n).map(|i| fam.tower(i)).collect();
    let mut out = vec![
        fam.p.clone(),
        Term::sum(fam.p.clone(), fam.tower(1)),
        Term::sum_all(towers.iter().rev().cloned()),
        Term::sum(Term::Nil, fam.p.clone()),
        Term::sum_all((1..=n + 1).map(|i| fam.tower(i))),
        Term::sum(fam.p.clone(), b(Term::Nil)),
        Term::sum(fam.p.clone(), Term::par(Term::prefix(fam.a.clone(), Term::Nil), b(Term::Nil))),
    ];
    // b.(b^(i-1).a + b^(i-1).a) splits nothing, b.(b^(i-1).a + b.0) does.
    let mut doubled = towers.clone();
    doubled[n - 1] = b(Term::sum(fam.tower(n - 1), fam.tower(n - 1)));
    out.push(Term::sum_all(doubled));
    let mut broken = towers.clone();
    broken[n - 1] = b(Term::sum(fam.tower(n - 1), b(Term::Nil)));
    out.push(Term::sum_all(broken));
    if n > 1 {
        out.push(Term::sum_all(towers[1..].iter().cloned()));
        out.push(Term::sum_all(towers[..n - 1].iter().cloned()));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceRow {
    pub n: usize,
    pub equation: String,
    /// Checks in order, up to and including the first failure.
    pub checks: Vec<Check>,
}

impl EvidenceRow {
    pub fn failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub kind: FamilyKind,
    pub max_n: usize,
    /// One row per index, stopping at the first index with a failure.
    pub rows: Vec<EvidenceRow>,
}

impl EvidenceReport {
    pub fn passed(&self) -> bool {
        self.rows.len() == self.max_n && self.rows.iter().all(|r| r.failure().is_none())
    }

    /// The first failing index and check.
    pub fn failure(&self) -> Option<(usize, &Check)> {
        self.rows.iter().find_map(|r| r.failure().map(|c| (r.n, c)))
    }
}

/// The language each family is checked over: `{a, b}`, or `{a, a'}` with `tau`.
pub fn default_lang(kind: FamilyKind) -> Lang {
    match kind {
        FamilyKind::Interleaving => Lang::ab(),
        FamilyKind::Sync => Lang::sync_a(),
    }
}

/// Checks `e_1 .. e_max_n`, one thread per index.
pub fn negative_evidence_report(kind: FamilyKind, max_n: usize) -> Result<EvidenceReport> {
    negative_evidence_report_in(kind, max_n, &default_lang(kind))
}

pub fn negative_evidence_report_in(kind: FamilyKind, max_n: usize, lang: &Lang) -> Result<EvidenceReport> {
    if max_n == 0 {
        return Err(Error::Script("max_n must be at least 1".into()));
    }
    let families = (1..=max_n).map(|n| make_family(kind, n, lang)).collect::<Result<Vec<_>>>()?;
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> = families.iter().map(|f| s.spawn(move || evidence_row(f))).collect();
        handles.into_iter().map(|h| h.join().expect("evidence thread panicked")).collect::<Result<Vec<_>>>()
    })?;
    let cut = rows.iter().position(|r| r.failure().is_some()).map_or(rows.len(), |i| i + 1);
    Ok(EvidenceReport { kind, max_n, rows: rows.into_iter().take(cut).collect() })
}

fn evidence_row(fam: &WitnessFamily) -> Result<EvidenceRow> {
    let mut c = Checker::new(&fam.lang);
    let (lhs, rhs) = (&fam.equation.lhs, &fam.equation.rhs);
    let target = fam.target();
    let mut row = EvidenceRow { n: fam.n, equation: fam.equation.to_string(), checks: Vec::new() };
    let push = |row: &mut EvidenceRow, name, passed, detail: String| {
        row.checks.push(Check { name, passed, detail });
        passed
    };

    let bis = c.equivalent(lhs, rhs, Relation::B)?;
    if !push(&mut row, "bisimilar", bis, "lhs ~B rhs".into()) {
        return Ok(row);
    }
    let left = summand_equiv(&mut c, lhs, &target, Relation::PF)?;
    if !push(&mut row, "lhs summand", left, format!("lhs has a summand ~PF {target}")) {
        return Ok(row);
    }
    let right = summand_equiv(&mut c, rhs, &target, Relation::PF)?;
    if !push(&mut row, "rhs summands", !right, format!("no summand of rhs is ~PF {target}")) {
        return Ok(row);
    }
    let norm = target.norm();
    if !push(&mut row, "norm", norm == 3, format!("norm {norm}, expected 3")) {
        return Ok(row);
    }
    let depth = lhs.depth();
    if !push(&mut row, "depth", depth == fam.n + 2, format!("depth {depth}, expected {}", fam.n + 2)) {
        return Ok(row);
    }
    for q in neighbours(fam) {
        let pf = c.equivalent(&q, &fam.p, Relation::PF)?;
        let form = matches_towers(&mut c, &q, fam)?;
        if !push(&mut row, "characterisation", pf == form, format!("{q}: ~PF {pf}, summand form {form}")) {
            return Ok(row);
        }
    }
    if fam.kind == FamilyKind::Sync {
        for (side, t) in [("lhs", lhs), ("rhs", rhs)] {
            let lts = build_lts(t, &fam.lang)?;
            let taus = lts.transitions.iter().filter(|(_, a, _)| a.is_tau()).count();
            if !push(&mut row, "tau steps", taus > 0, format!("{side} has {taus} tau transitions")) {
                return Ok(row);
            }
        }
    }
    Ok(row)
}

/// One closed line of a proof and whether each side has a summand equivalent
/// to the tracked term.
#[derive(Clone, Debug, Serialize)]
pub struct WalkLine {
    pub step: usize,
    pub lhs: String,
    pub rhs: String,
    pub left: bool,
    pub right: bool,
}

impl WalkLine {
    pub fn preserved(&self) -> bool {
        self.left == self.right
    }
}

/// Walks a proof and, for every closed conclusion, strips `0` summands and
/// factors and compares the two sides on having a summand `rel`-equivalent to
/// `target`. This is evidence about the given proof only: a broken line means
/// some step separates the property, which a sound system for `rel` under
/// the right conditions cannot do.
pub fn walk_summand_property(ps: &ProofScript, system: &AxiomSystem, target: &Term, rel: Relation) -> Result<Vec<WalkLine>> {
    let mut c = Checker::new(&ps.lang);
    let mut concls: Vec<(Term, Term)> = Vec::with_capacity(ps.steps.len());
    let mut out = Vec::new();
    for (i, step) in ps.steps.iter().enumerate() {
        let (l, r) = conclude(step, &concls, system).map_err(|e| Error::Script(format!("step {i}: {e}")))?;
        if l.is_closed() && r.is_closed() {
            let (sl, sr) = (l.strip_nil(), r.strip_nil());
            out.push(WalkLine {
                step: i,
                left: summand_equiv(&mut c, &sl, target, rel)?,
                right: summand_equiv(&mut c, &sr, target, rel)?,
                lhs: sl.to_string(),
                rhs: sr.to_string(),
            });
        }
        concls.push((l, r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::syntax::parse;
    use crate::term::{closed_terms_up_to, Substitution, Var};

    fn ab(s: &str) -> Term {
        parse(s, Lang::ab().alphabet()).unwrap()
    }

    #[test]
    fn family_shapes() {
        let f = make_family(FamilyKind::Interleaving, 1, &Lang::ab()).unwrap();
        assert_eq!(f.equation.lhs, ab("a.0 || b.a.0"));
        assert_eq!(f.equation.rhs, ab("a.b.a.0 + b.(a.0 || a.0)"));
        for n in 1..=5 {
            let f = make_family(FamilyKind::Interleaving, n, &Lang::ab()).unwrap();
            assert_eq!(f.equation.lhs.depth(), n + 2);
            assert_eq!(f.target().norm(), 3);
        }
        let s = make_family(FamilyKind::Sync, 2, &Lang::sync_a()).unwrap();
        assert_eq!(s.p, parse("tau.a.0 + tau.tau.a.0", Lang::sync_a().alphabet()).unwrap());
    }

    #[test]
    fn family_needs_the_right_alphabet() {
        let one = Lang::interleaving(crate::Alphabet::new(&["a"]).unwrap());
        assert!(matches!(make_family(FamilyKind::Interleaving, 2, &one), Err(Error::AlphabetTooSmall(_))));
        assert!(matches!(make_family(FamilyKind::Sync, 2, &Lang::ab()), Err(Error::SyncMismatch(_))));
        assert!(make_family(FamilyKind::Interleaving, 0, &Lang::ab()).is_err());
    }

    #[test]
    fn summand_examples() {
        let lang = Lang::ab();
        let f = make_family(FamilyKind::Interleaving, 2, &lang).unwrap();
        let t = f.target();
        assert!(has_summand_equiv(&t, &t, Relation::PF, &lang).unwrap());
        assert!(!has_summand_equiv(&f.equation.rhs, &t, Relation::PF, &lang).unwrap());
        assert!(has_summand_equiv(&ab("a + b"), &ab("b"), Relation::PF, &lang).unwrap());
        assert!(has_summand_equiv(&ab("0 + (0 || b)"), &ab("b"), Relation::PF, &lang).unwrap());
        assert!(matches!(has_summand_equiv(&ab("x + b"), &ab("b"), Relation::PF, &lang), Err(Error::OpenTerm(_))));
    }

    #[test]
    fn reports_pass() {
        let r = negative_evidence_report(FamilyKind::Interleaving, 4).unwrap();
        assert!(r.passed(), "{:?}", r.failure());
        let r = negative_evidence_report(FamilyKind::Sync, 3).unwrap();
        assert!(r.passed(), "{:?}", r.failure());
        assert!(r.rows.iter().all(|row| row.checks.iter().any(|c| c.name == "tau steps")));
    }

    #[test]
    fn first_row_characterises_b_a() {
        let r = negative_evidence_report(FamilyKind::Interleaving, 1).unwrap();
        let chars: Vec<_> = r.rows[0].checks.iter().filter(|c| c.name == "characterisation").collect();
        assert!(chars.len() >= 5 && chars.iter().all(|c| c.passed));
        let mut c = Checker::new(&Lang::ab());
        assert!(c.equivalent(&ab("b.a + b.(a + a)"), &ab("b.a"), Relation::PF).unwrap());
        assert!(!c.equivalent(&ab("b.a + b"), &ab("b.a"), Relation::PF).unwrap());
    }

    // Closed analogue of the summand-variable lemma: a term headed by a
    // prefix or a parallel composition is never equivalent to a sum of two
    // or more distinct towers.
    #[test]
    fn prefix_or_par_is_never_a_sum_of_towers() {
        let lang = Lang::ab();
        let f = make_family(FamilyKind::Interleaving, 3, &lang).unwrap();
        let sums: Vec<Term> = [vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]
            .iter()
            .map(|is| Term::sum_all(is.iter().map(|&i| f.tower(i))))
            .collect();
        let mut c = Checker::new(&lang);
        let mut tried = 0;
        for t in closed_terms_up_to(lang.alphabet().actions(), 9) {
            if !matches!(t, Term::Prefix(..) | Term::Par(..)) || !t.is_nil_clean() {
                continue;
            }
            tried += 1;
            for s in &sums {
                assert!(!c.equivalent(&t, s, Relation::PF).unwrap(), "{t} ~PF {s}");
            }
        }
        assert!(tried > 1000, "{tried}");
    }

    // p || q ~PF a || p_2 splits into a and p_2, whichever way round.
    #[test]
    fn parallel_decomposition() {
        let lang = Lang::ab();
        let f = make_family(FamilyKind::Interleaving, 2, &lang).unwrap();
        let (a, target) = (ab("a"), f.target());
        let clean: Vec<Term> = closed_terms_up_to(lang.alphabet().actions(), 8)
            .into_iter()
            .filter(|t| !t.in_nil() && t.is_nil_clean())
            .collect();
        let mut c = Checker::new(&lang);
        let mut hits = 0;
        for p in clean.iter().filter(|t| t.size() <= 4) {
            for q in &clean {
                if p.depth() + q.depth() != 4 || p.norm() + q.norm() != 3 {
                    continue;
                }
                if c.equivalent(&Term::par(p.clone(), q.clone()), &target, Relation::PF).unwrap() {
                    hits += 1;
                    let split = |x: &Term, y: &Term, c: &mut Checker| {
                        c.equivalent(x, &a, Relation::PF).unwrap() && c.equivalent(y, &f.p, Relation::PF).unwrap()
                    };
                    assert!(split(p, q, &mut c) || split(q, p, &mut c), "{p} || {q}");
                }
            }
        }
        assert!(hits >= 2, "{hits}");
    }

    #[test]
    fn proof_walk_keeps_the_property() {
        let lang = Lang::ab();
        let sys = crate::axioms::build_system("E1", &lang).unwrap();
        let f = make_family(FamilyKind::Interleaving, 2, &lang).unwrap();
        let text = r#"{"system":"E1","alphabet":["a","b"],"goal":{"lhs":"(a || (b.a + b.b.a)) + 0","rhs":"(b.a + b.b.a) || a"},
            "steps":[{"rule":"axiom","id":"A0","subst":{"x":"a || (b.a + b.b.a)"}},
                     {"rule":"axiom","id":"P1","subst":{"x":"a","y":"b.a + b.b.a"}},
                     {"rule":"trans","left":0,"right":1}]}"#;
        let ps = ProofScript::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        let lines = walk_summand_property(&ps, &sys, &f.target(), Relation::PF).unwrap();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.preserved() && l.left));
    }

    fn arb_open() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![Just(Term::Nil), Just(Term::var("x")), Just(Term::var("y"))];
        leaf.prop_recursive(4, 20, 2, |inner| {
            prop_oneof![
                (prop_oneof![Just("a"), Just("b")], inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
            ]
        })
    }

    fn arb_closed() -> impl Strategy<Value = Term> {
        Just(Term::Nil).prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (prop_oneof![Just("a"), Just("b")], inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn depth_dominates_variables(t in arb_open(), px in arb_closed(), py in arb_closed()) {
            let s: Substitution = [(Var::from("x"), px), (Var::from("y"), py)].into_iter().collect();
            let whole = t.substitute(&s).depth();
            for x in t.vars() {
                prop_assert!(whole >= s[&x].depth());
            }
        }
    }
}
