//! Acceptance suite. Runs every criterion in order and prints one
//! `PASS`/`FAIL` line each, with the time it took. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use bccsp::axioms::{
    build, build_system, check_fixture, check_proof, check_sound, default_scheme, saturate, soundness_sweep, Schema,
    SystemName, Verdict, PROOF_FIXTURES,
};
use bccsp::eliminate::eliminate;
use bccsp::equivalences::{spectrum_relations, Refutation};
use bccsp::models::{goal_equation, independence_report, search_model, FiniteModel, SearchOutcome, Valuation};
use bccsp::syntax::parse;
use bccsp::term::closed_terms_up_to;
use bccsp::witness::{negative_evidence_report, FamilyKind};
use bccsp::{Alphabet, Checker, Lang, Relation, Substitution, Term};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    ensure(took <= limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn instance_counts() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let rs = build_system("E_RS", &lang).map_err(|e| e.to_string())?;
    let cs = build_system("E_CS", &lang).map_err(|e| e.to_string())?;
    let got = [rs.count("EL2"), rs.count("RSP2"), cs.count("CS"), cs.count("CSP1"), cs.count("CSP2")];
    ensure(got == [16, 8, 4, 16, 8], || format!("EL2, RSP2, CS, CSP1, CSP2 = {got:?}"))?;
    within(started, Duration::from_secs(1))?;
    Ok("E_RS: 16 EL2, 8 RSP2; E_CS: 4 CS, 16 CSP1, 8 CSP2".into())
}

fn soundness() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let scheme = default_scheme(&lang);
    let mut equations = 0;
    for sys in SystemName::ALL {
        let system = build(sys, &lang);
        for (id, r) in soundness_sweep(&system, &scheme, 1).map_err(|e| e.to_string())? {
            ensure(!r.is_refuted(), || format!("{} refutes {id}: {r:?}", system.name))?;
            equations += 1;
        }
    }
    within(started, Duration::from_secs(300))?;
    Ok(format!("{equations} equations over {} systems, no refutation", SystemName::ALL.len()))
}

fn known_unsoundness() -> Outcome {
    let started = Instant::now();
    let lang = Lang::interleaving(Alphabet::new(&["a", "b", "c"]).map_err(|e| e.to_string())?);
    let scheme = default_scheme(&lang);
    let mut checker = Checker::new(&lang);
    let instance = |schema: Schema, id: &str| {
        schema.instances(&lang).into_iter().find(|e| e.id == id).ok_or_else(|| format!("no instance {id}"))
    };
    let term = |s: &str| parse(s, lang.alphabet()).map_err(|e| e.to_string());
    let sp2 = instance(Schema::SP2, "SP2[a]")?;
    let half = instance(Schema::RSP1Half, "RSP1half[a,c]")?;
    let mut found = Vec::new();
    for (e, witness) in [
        (&sp2, [("x", "0"), ("y", "b"), ("z", "c")].as_slice()),
        (&half, [("x", "0"), ("y", "a"), ("u", "b"), ("z", "0"), ("w", "0"), ("v", "0")].as_slice()),
    ] {
        let r = check_sound(e, Relation::RS, &scheme, &mut checker).map_err(|e| e.to_string())?;
        let Refutation::Refuted(sigma) = r else { return Err(format!("{} not refuted: {r:?}", e.id)) };
        let (l, r) = (e.lhs.substitute(&sigma), e.rhs.substitute(&sigma));
        ensure(!checker.equivalent(&l, &r, Relation::RS).map_err(|e| e.to_string())?, || {
            format!("{}: reported witness {l} = {r} is RS-equivalent", e.id)
        })?;
        let s: Substitution = witness.iter().map(|(x, t)| Ok(((*x).into(), term(t)?))).collect::<Result<_, String>>()?;
        let (l, r) = (e.lhs.substitute(&s).strip_nil(), e.rhs.substitute(&s).strip_nil());
        ensure(!checker.equivalent(&l, &r, Relation::RS).map_err(|e| e.to_string())?, || {
            format!("{}: {l} and {r} should differ under RS", e.id)
        })?;
        found.push(format!("{}: {l} vs {r}", e.id));
    }
    within(started, Duration::from_secs(30))?;
    Ok(found.join("; "))
}

fn elimination() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let terms = closed_terms_up_to(lang.alphabet().actions(), 7);
    let sample: Vec<&Term> = {
        let with_par: Vec<&Term> = terms.iter().filter(|t| !t.is_par_free()).collect();
        let step = (with_par.len() / 100).max(1);
        with_par.into_iter().step_by(step).take(100).collect()
    };
    let mut checker = Checker::new(&lang);
    let mut proofs = 0;
    for sys in SystemName::ELIMINATING {
        let system = build(sys, &lang);
        for t in &terms {
            let e = eliminate(t, &system, false).map_err(|e| format!("{} on {t}: {e}", system.name))?;
            ensure(e.result.is_par_free(), || format!("{}: {t} gave {}", system.name, e.result))?;
            let same = checker.equivalent(t, &e.result, system.relation).map_err(|e| e.to_string())?;
            ensure(same, || format!("{}: {t} is not equivalent to {}", system.name, e.result))?;
        }
        for t in &sample {
            let e = eliminate(t, &system, true).map_err(|e| format!("{} on {t}: {e}", system.name))?;
            let ps = e.proof.ok_or_else(|| format!("{}: no proof for {t}", system.name))?;
            let v = check_proof(&ps, &system);
            ensure(v == Verdict::Accepted, || format!("{}: proof for {t} rejected: {v:?}", system.name))?;
            proofs += 1;
        }
    }
    within(started, Duration::from_secs(600))?;
    Ok(format!("{} systems x {} terms, {proofs} proofs checked", SystemName::ELIMINATING.len(), terms.len()))
}

fn spectrum() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let terms = closed_terms_up_to(lang.alphabet().actions(), 5);
    let mut checker = Checker::new(&lang);
    let pick = |v: &bccsp::equivalences::SpectrumVector, r: Relation| v.get(r).ok_or(format!("no entry for {r}"));
    let mut pairs = 0;
    for (i, p) in terms.iter().enumerate() {
        for q in &terms[i..] {
            let v = checker.spectrum_vector(p, q, 2).map_err(|e| e.to_string())?;
            for (nested, direct) in [
                (Relation::NestedT(1), Relation::T),
                (Relation::NestedT(2), Relation::PF),
                (Relation::NestedS(1), Relation::S),
            ] {
                ensure(pick(&v, nested)? == pick(&v, direct)?, || format!("{nested} and {direct} disagree on {p}, {q}"))?;
            }
            pairs += 1;
        }
    }
    within(started, Duration::from_secs(600))?;
    Ok(format!("{pairs} pairs x {} relations, no violated arrow", spectrum_relations(2).len()))
}

fn valuation(pairs: &[(&str, usize)]) -> Valuation {
    pairs.iter().map(|(x, v)| ((*x).into(), *v)).collect()
}

fn counter_models() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let err = |e: bccsp::Error| e.to_string();
    let cases = [
        ("table6", &["E_CS", "E_CT"][..], &["EL2"][..], valuation(&[("x", 0), ("y", 0), ("z", 1), ("w", 1)])),
        ("table7", &["E_RT", "E_CT"][..], &["RSP2", "CSP2"][..], valuation(&[("x", 0), ("y", 0), ("z", 0), ("w", 1)])),
    ];
    for (name, systems, goals, failing) in cases {
        let m = FiniteModel::fixture(name).map_err(err)?;
        for goal in goals {
            let g = goal_equation(goal, &lang).map_err(err)?;
            for sys in systems {
                let r = independence_report(&m, &build_system(sys, &lang).map_err(err)?, &g).map_err(err)?;
                ensure(r.separates(), || format!("{name} vs {sys}/{goal}: failed {:?}", r.failed_axioms()))?;
            }
            let fails = m.failing_valuations(&g).map_err(err)?;
            ensure(fails.contains(&failing), || format!("{name}: {goal} holds at {failing:?}"))?;
        }
    }
    within(started, Duration::from_secs(60))?;
    Ok("table6 separates EL2 from E_CS and E_CT; table7 separates RSP2 and CSP2 from E_RT and E_CT".into())
}

fn model_search() -> Outcome {
    let started = Instant::now();
    let lang = Lang::ab();
    let err = |e: bccsp::Error| e.to_string();
    let mut found = Vec::new();
    for (sys, goal, carrier) in [("E_RT", "RSP2", 3), ("E_CS", "EL2", 5)] {
        let system = build_system(sys, &lang).map_err(err)?;
        let g = goal_equation(goal, &lang).map_err(err)?;
        let t = Instant::now();
        let out = search_model(&lang, carrier, &system, &g, u64::MAX).map_err(err)?;
        let SearchOutcome::Found { model, nodes } = out else { return Err(format!("{sys}/{goal}: {out:?}")) };
        let r = independence_report(&model, &system, &g).map_err(err)?;
        ensure(r.separates(), || format!("{sys}/{goal}: model fails {:?}", r.failed_axioms()))?;
        found.push(format!("{sys}/{goal} at {carrier} in {nodes} decisions ({:.1?})", t.elapsed()));
    }
    within(started, Duration::from_secs(600))?;
    Ok(found.join("; "))
}

fn negative_evidence() -> Outcome {
    let started = Instant::now();
    let mut rows = Vec::new();
    for (kind, n) in [(FamilyKind::Interleaving, 6), (FamilyKind::Sync, 4)] {
        let report = negative_evidence_report(kind, n).map_err(|e| e.to_string())?;
        if let Some((n, c)) = report.failure() {
            return Err(format!("{kind} N={n}: {} failed: {}", c.name, c.detail));
        }
        ensure(report.rows.len() == n, || format!("{kind}: only {} rows", report.rows.len()))?;
        rows.push(format!("{kind} N=1..{n}"));
    }
    within(started, Duration::from_secs(120))?;
    Ok(rows.join(", "))
}

fn fixtures() -> Outcome {
    let started = Instant::now();
    let mut scripts = 0;
    for name in PROOF_FIXTURES {
        for (goal, v) in check_fixture(name).map_err(|e| e.to_string())? {
            ensure(v == Verdict::Accepted, || format!("{name}: {goal}: {v:?}"))?;
            scripts += 1;
        }
    }
    within(started, Duration::from_secs(1))?;
    Ok(format!("{scripts} scripts in {} fixtures accepted", PROOF_FIXTURES.len()))
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::Nil), prop::sample::select(vec!["x", "y", "z", "u", "v", "w"]).prop_map(Term::var)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["a", "b"]), inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
        ]
    })
}

fn zero_subst() -> impl Strategy<Value = Substitution> {
    prop::collection::btree_set(prop::sample::select(vec!["x", "y", "z", "u", "v", "w"]), 0..4)
        .prop_map(|xs| xs.into_iter().map(|x| (x.into(), Term::Nil)).collect())
}

fn nil_laws() -> Outcome {
    let started = Instant::now();
    let mut runner = TestRunner::deterministic();
    let strategy = (arb_term(), zero_subst());
    let mut changed = 0;
    for _ in 0..10_000 {
        let (t, s) = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let c = t.strip_nil();
        ensure(c.strip_nil() == c, || format!("strip_nil not idempotent on {t}"))?;
        ensure(c.is_nil_clean() && (c.is_nil() || !c.in_nil()), || format!("{t} strips to unclean {c}"))?;
        ensure(c.substitute(&s).strip_nil() == t.substitute(&s).strip_nil(), || {
            format!("zero substitution {s:?} does not commute with stripping {t}")
        })?;
        changed += usize::from(t != c);
    }
    let lang = Lang::ab();
    let es = build_system("E_S", &lang).map_err(|e| e.to_string())?;
    let once = saturate(&es);
    let twice = saturate(&once);
    ensure(once.equations == twice.equations, || format!("saturate grew from {} to {}", once.len(), twice.len()))?;
    within(started, Duration::from_secs(60))?;
    Ok(format!("10000 terms, {changed} changed by stripping; saturated E_S ({} equations) is a fixed point", once.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("instantiation counts", instance_counts),
        ("axiom soundness sweep", soundness),
        ("known unsoundness", known_unsoundness),
        ("elimination totality and correctness", elimination),
        ("spectrum consistency", spectrum),
        ("counter-model reproduction", counter_models),
        ("model search", model_search),
        ("negative-result evidence", negative_evidence),
        ("derivability fixtures", fixtures),
        ("strip_nil and saturation properties", nil_laws),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let result = run();
        let took = started.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {n}: {name} ({took:.2?}) {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {name} ({took:.2?}) {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
