use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::alphabet::{Action, Alphabet};
use crate::observations::{observations, ObsKind};
use crate::semantics::{build_lts, completed_traces, traces, Lts};
use crate::syntax::parse;
use crate::term::closed_terms_up_to;

fn abc() -> Lang {
    Lang::interleaving(Alphabet::new(&["a", "b", "c"]).unwrap())
}

fn p(lang: &Lang, s: &str) -> Term {
    parse(s, lang.alphabet()).unwrap()
}

/// Naive greatest fixpoint over the raw transition systems: start from every
/// pair passing `side`, then delete pairs whose moves cannot be matched.
fn gfp_sim(l1: &Lts, l2: &Lts, side: &dyn Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let (n, m) = (l1.states.len(), l2.states.len());
    let mut rel: Vec<Vec<bool>> = (0..n).map(|i| (0..m).map(|j| side(i, j)).collect()).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..m {
                if rel[i][j] {
                    let ok = l1.successors(i).all(|(a, i2)| l2.successors(j).any(|(b, j2)| a == b && rel[i2][j2]));
                    if !ok {
                        rel[i][j] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

fn initials(l: &Lts, s: usize) -> BTreeSet<Action> {
    l.successors(s).map(|(a, _)| a.clone()).collect()
}

fn oracle_sim(l1: &Lts, l2: &Lts, flavor: SimFlavor) -> Vec<Vec<bool>> {
    match flavor {
        SimFlavor::S => gfp_sim(l1, l2, &|_, _| true),
        SimFlavor::CS => gfp_sim(l1, l2, &|i, j| !initials(l1, i).is_empty() || initials(l2, j).is_empty()),
        SimFlavor::RS => gfp_sim(l1, l2, &|i, j| initials(l1, i) == initials(l2, j)),
        SimFlavor::FS => gfp_sim(l1, l2, &|i, j| initials(l2, j).is_subset(&initials(l1, i))),
        SimFlavor::Nested(0) => vec![vec![true; l2.states.len()]; l1.states.len()],
        SimFlavor::Nested(n) => {
            let back = oracle_sim(l2, l1, SimFlavor::Nested(n - 1));
            gfp_sim(l1, l2, &|i, j| back[j][i])
        }
    }
}

fn oracle_bisim(l1: &Lts, l2: &Lts) -> bool {
    let (n, m) = (l1.states.len(), l2.states.len());
    let mut rel = vec![vec![true; m]; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..m {
                if rel[i][j] {
                    let fwd = l1.successors(i).all(|(a, i2)| l2.successors(j).any(|(b, j2)| a == b && rel[i2][j2]));
                    let bwd = l2.successors(j).all(|(b, j2)| l1.successors(i).any(|(a, i2)| a == b && rel[i2][j2]));
                    if !(fwd && bwd) {
                        rel[i][j] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return rel[l1.root][l2.root];
        }
    }
}

/// Semantic fingerprints of one term, computed by explicit enumeration.
struct Explicit {
    lts: Lts,
    t: BTreeSet<Vec<Action>>,
    ct: BTreeSet<Vec<Action>>,
    obs: Vec<crate::observations::ObservationSet>,
}

impl Explicit {
    fn new(t: &Term, lang: &Lang) -> Explicit {
        Explicit {
            lts: build_lts(t, lang).unwrap(),
            t: traces(t, lang).unwrap(),
            ct: completed_traces(t, lang).unwrap(),
            obs: [ObsKind::F, ObsKind::R, ObsKind::FT, ObsKind::RT, ObsKind::PF]
                .iter()
                .map(|&k| observations(k, t, lang).unwrap())
                .collect(),
        }
    }

    fn related(&self, other: &Explicit, rel: Relation) -> bool {
        let sim = |f| {
            oracle_sim(&self.lts, &other.lts, f)[self.lts.root][other.lts.root]
                && oracle_sim(&other.lts, &self.lts, f)[other.lts.root][self.lts.root]
        };
        match rel {
            Relation::T => self.t == other.t,
            Relation::CT => self.t == other.t && self.ct == other.ct,
            Relation::F => self.obs[0] == other.obs[0],
            Relation::R => self.obs[1] == other.obs[1],
            Relation::FT => self.obs[2] == other.obs[2],
            Relation::RT => self.obs[3] == other.obs[3],
            Relation::PF => self.obs[4] == other.obs[4],
            Relation::S => sim(SimFlavor::S),
            Relation::CS => sim(SimFlavor::CS),
            Relation::RS => sim(SimFlavor::RS),
            Relation::NestedS(n) => sim(SimFlavor::Nested(n)),
            Relation::B => oracle_bisim(&self.lts, &other.lts),
            Relation::NestedT(_) => unreachable!("no explicit oracle"),
        }
    }
}

fn corpus(lang: &Lang, max: usize) -> Vec<Term> {
    closed_terms_up_to(lang.alphabet().actions(), max)
}

#[test]
fn checker_matches_explicit_oracles_exhaustively() {
    let lang = Lang::ab();
    let terms = corpus(&lang, 5);
    let ex: Vec<Explicit> = terms.iter().map(|t| Explicit::new(t, &lang)).collect();
    let mut c = Checker::new(&lang);
    let rels = [
        Relation::T,
        Relation::CT,
        Relation::F,
        Relation::R,
        Relation::FT,
        Relation::RT,
        Relation::PF,
        Relation::S,
        Relation::CS,
        Relation::RS,
        Relation::NestedS(2),
        Relation::B,
    ];
    // Every pair of the size <= 4 corpus, and each size-5 term against all smaller ones.
    let small = terms.iter().filter(|t| t.size() <= 4).count();
    for i in 0..terms.len() {
        for j in 0..small.min(i + 1) {
            for &r in &rels {
                let want = ex[i].related(&ex[j], r);
                let got = c.equivalent(&terms[i], &terms[j], r).unwrap();
                assert_eq!(got, want, "{r} on {} vs {}", terms[i], terms[j]);
            }
        }
    }
}

#[test]
fn preorders_match_naive_fixpoint() {
    let lang = Lang::ab();
    let terms = corpus(&lang, 4);
    let ltss: Vec<Lts> = terms.iter().map(|t| build_lts(t, &lang).unwrap()).collect();
    let mut c = Checker::new(&lang);
    for flavor in [SimFlavor::S, SimFlavor::CS, SimFlavor::RS, SimFlavor::FS, SimFlavor::Nested(2), SimFlavor::Nested(3)]
    {
        for i in 0..terms.len() {
            for j in 0..terms.len() {
                let want = oracle_sim(&ltss[i], &ltss[j], flavor)[0][0];
                assert_eq!(c.preorder(&terms[i], &terms[j], flavor).unwrap(), want, "{flavor:?} {} {}", terms[i], terms[j]);
            }
        }
    }
}

#[test]
fn failure_simulation_is_ready_simulation() {
    let lang = Lang::ab();
    let terms = corpus(&lang, 5);
    let mut c = Checker::new(&lang);
    for t in &terms {
        for u in terms.iter().take(40) {
            let fs = c.preorder(t, u, SimFlavor::FS).unwrap() && c.preorder(u, t, SimFlavor::FS).unwrap();
            assert_eq!(fs, c.equivalent(t, u, Relation::RS).unwrap(), "{t} vs {u}");
        }
    }
}

#[test]
fn nested_levels_coincide_with_named_relations() {
    let lang = Lang::ab();
    let terms = corpus(&lang, 5);
    let mut c = Checker::new(&lang);
    for t in &terms {
        for u in &terms {
            let get = |c: &mut Checker, r| c.equivalent(t, u, r).unwrap();
            assert!(get(&mut c, Relation::NestedT(0)));
            assert_eq!(get(&mut c, Relation::NestedT(1)), get(&mut c, Relation::T));
            assert_eq!(get(&mut c, Relation::NestedT(2)), get(&mut c, Relation::PF), "{t} {u}");
            assert_eq!(get(&mut c, Relation::NestedS(1)), get(&mut c, Relation::S));
        }
    }
}

#[test]
fn spectrum_examples() {
    let lang = abc();
    let v = spectrum_vector(&p(&lang, "a.(b+c)"), &p(&lang, "a.b+a.c"), &lang, 2).unwrap();
    assert_eq!(v.get(Relation::T), Some(true));
    assert_eq!(v.get(Relation::CT), Some(true));
    assert_eq!(v.get(Relation::S), Some(false));
    assert_eq!(v.get(Relation::F), Some(false));
    let t = p(&lang, "a.(b+c) || b.c + a");
    let v = spectrum_vector(&t, &t, &lang, 3).unwrap();
    assert!(v.entries.iter().all(|(_, b)| *b));

    let l = p(&lang, "a || (b+c)");
    let r = p(&lang, "a||b + a||c + a||(b+c)");
    assert!(sim_eq(&l, &r, SimFlavor::CS, &lang).unwrap());
    assert!(!sim_eq(&l, &r, SimFlavor::RS, &lang).unwrap());
    let v = spectrum_vector(&l, &r, &lang, 2).unwrap();
    assert_eq!((v.get(Relation::CS), v.get(Relation::RS)), (Some(true), Some(false)));
}

#[test]
fn simulation_examples() {
    let lang = abc();
    let l = p(&lang, "(a+a.a+b)||c");
    let r = p(&lang, "(a+b)||c + (a.a+b)||c");
    assert!(!simulation_preorder(&l, &r, SimFlavor::RS, &lang).unwrap());
    for t in corpus(&Lang::ab(), 4) {
        assert!(simulation_preorder(&Term::Nil, &t, SimFlavor::S, &Lang::ab()).unwrap());
    }
    assert!(bisimilar(&p(&lang, "a||b"), &p(&lang, "a.b+b.a"), &lang).unwrap());
    assert!(!bisimilar(&p(&lang, "a.b+a.c"), &p(&lang, "a.(b+c)"), &lang).unwrap());
    assert!(nested_trace_eq(&p(&lang, "a.b"), &p(&lang, "c"), 0, &lang).unwrap());
    assert!(nested_sim_preorder(&p(&lang, "a.b"), &p(&lang, "a.b+a"), 1, &lang).unwrap());
    assert!(nested_sim_preorder(&p(&lang, "a.b+a"), &p(&lang, "a.b"), 1, &lang).unwrap());
    assert!(!nested_sim_preorder(&p(&lang, "a.b+a"), &p(&lang, "a.b"), 2, &lang).unwrap());
    assert!(decorated_eq(&p(&lang, "a.b+a"), &p(&lang, "a.b"), Relation::T, &lang).unwrap());
}

#[test]
fn relation_names_round_trip() {
    for r in spectrum_relations(4) {
        assert_eq!(r.to_string().parse::<Relation>().unwrap(), r);
    }
    assert_eq!("NestedS(3)".parse::<Relation>().unwrap(), Relation::NestedS(3));
    assert!("Q".parse::<Relation>().is_err());
}

#[test]
fn refutation_examples() {
    let lang = Lang::ab();
    let scheme = SubstitutionScheme::standard(&lang);
    let t = |s: &str| p(&lang, s);
    let r = refute_open(&t("a.x || (y+z)"), &t("a.(x||(y+z)) + a.x||y + a.x||z"), Relation::RS, &scheme, &lang)
        .unwrap();
    let Refutation::Refuted(sigma) = r else { panic!("SP2 instance should be refuted modulo RS") };
    let l = t("a.x || (y+z)").substitute(&sigma);
    let rr = t("a.(x||(y+z)) + a.x||y + a.x||z").substitute(&sigma);
    assert!(!decorated_eq(&l, &rr, Relation::RS, &lang).unwrap());

    assert!(!refute_open(&t("x+x"), &t("x"), Relation::B, &scheme, &lang).unwrap().is_refuted());
    assert!(!refute_open(&t("x||y"), &t("y||x"), Relation::T, &scheme, &lang).unwrap().is_refuted());
    match refute_open(&t("a.x"), &t("a.x"), Relation::B, &scheme, &lang).unwrap() {
        Refutation::NotRefuted { tried } => assert_eq!(tried, 7),
        other => panic!("{other:?}"),
    }
    let closed = refute_open(&t("a"), &t("b"), Relation::T, &scheme, &lang).unwrap();
    assert_eq!(closed, Refutation::Refuted(Default::default()));
}

#[test]
fn sync_relations_see_tau() {
    let lang = Lang::sync_a();
    let l = p(&lang, "a || a'");
    let r = p(&lang, "a.a' + a'.a");
    assert!(!decorated_eq(&l, &r, Relation::T, &lang).unwrap());
    let r2 = p(&lang, "a.a' + a'.a + tau");
    assert!(bisimilar(&l, &r2, &lang).unwrap());
}

fn arb_closed() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::Nil), Just(Term::prefix("a", Term::Nil)), Just(Term::prefix("b", Term::Nil))];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (prop_oneof![Just("a"), Just("b")], inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
        ]
    })
}

fn all_relations() -> Vec<Relation> {
    spectrum_relations(3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relations_are_congruences(p1 in arb_closed(), q1 in arb_closed(), p2 in arb_closed(), q2 in arb_closed()) {
        let lang = Lang::ab();
        let mut c = Checker::new(&lang);
        for r in all_relations() {
            if c.equivalent(&p1, &p2, r).unwrap() && c.equivalent(&q1, &q2, r).unwrap() {
                let pre = |t: &Term| Term::prefix("a", t.clone());
                prop_assert!(c.equivalent(&pre(&p1), &pre(&p2), r).unwrap());
                prop_assert!(c.equivalent(&Term::sum(p1.clone(), q1.clone()), &Term::sum(p2.clone(), q2.clone()), r).unwrap());
                prop_assert!(c.equivalent(&Term::par(p1.clone(), q1.clone()), &Term::par(p2.clone(), q2.clone()), r).unwrap());
            }
        }
    }

    #[test]
    fn relations_are_equivalences(x in arb_closed(), y in arb_closed(), z in arb_closed()) {
        let lang = Lang::ab();
        let mut c = Checker::new(&lang);
        for r in all_relations() {
            prop_assert!(c.equivalent(&x, &x, r).unwrap());
            let xy = c.equivalent(&x, &y, r).unwrap();
            prop_assert_eq!(xy, c.equivalent(&y, &x, r).unwrap());
            if xy && c.equivalent(&y, &z, r).unwrap() {
                prop_assert!(c.equivalent(&x, &z, r).unwrap());
            }
        }
    }

    #[test]
    fn spectrum_arrows_hold(x in arb_closed(), y in arb_closed()) {
        let lang = Lang::ab();
        let v = spectrum_vector(&x, &y, &lang, 3);
        prop_assert!(v.is_ok(), "{:?}", v);
    }
}
