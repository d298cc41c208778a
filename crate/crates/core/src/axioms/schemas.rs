//! Axiom schemas and their instantiation over a finite set of labels.

use std::fmt;
use std::str::FromStr;

use crate::alphabet::{Action, Lang};
use crate::error::{Error, Result};
use crate::term::Term;

use super::Equation;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Schema {
    A0,
    A1,
    A2,
    A3,
    P0,
    P1,
    EL1,
    EL2,
    ELC1,
    ELC1t,
    ELC2,
    RS,
    RSP1,
    RSP2,
    CS,
    CSP1,
    CSP2,
    S,
    SP1,
    SP2,
    RT,
    FP,
    FT,
    R,
    F,
    CT,
    CTP,
    T,
    TP,
    /// RSP1 with only the left argument distributed. Not part of any system;
    /// kept as a known unsound variant.
    RSP1Half,
}

impl Schema {
    pub const ALL: [Schema; 30] = [
        Schema::A0,
        Schema::A1,
        Schema::A2,
        Schema::A3,
        Schema::P0,
        Schema::P1,
        Schema::EL1,
        Schema::EL2,
        Schema::ELC1,
        Schema::ELC1t,
        Schema::ELC2,
        Schema::RS,
        Schema::RSP1,
        Schema::RSP2,
        Schema::CS,
        Schema::CSP1,
        Schema::CSP2,
        Schema::S,
        Schema::SP1,
        Schema::SP2,
        Schema::RT,
        Schema::FP,
        Schema::FT,
        Schema::R,
        Schema::F,
        Schema::CT,
        Schema::CTP,
        Schema::T,
        Schema::TP,
        Schema::RSP1Half,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::A0 => "A0",
            Schema::A1 => "A1",
            Schema::A2 => "A2",
            Schema::A3 => "A3",
            Schema::P0 => "P0",
            Schema::P1 => "P1",
            Schema::EL1 => "EL1",
            Schema::EL2 => "EL2",
            Schema::ELC1 => "ELC1",
            Schema::ELC1t => "ELC1t",
            Schema::ELC2 => "ELC2",
            Schema::RS => "RS",
            Schema::RSP1 => "RSP1",
            Schema::RSP2 => "RSP2",
            Schema::CS => "CS",
            Schema::CSP1 => "CSP1",
            Schema::CSP2 => "CSP2",
            Schema::S => "S",
            Schema::SP1 => "SP1",
            Schema::SP2 => "SP2",
            Schema::RT => "RT",
            Schema::FP => "FP",
            Schema::FT => "FT",
            Schema::R => "R",
            Schema::F => "F",
            Schema::CT => "CT",
            Schema::CTP => "CTP",
            Schema::T => "T",
            Schema::TP => "TP",
            Schema::RSP1Half => "RSP1half",
        }
    }

    /// Every instance over `lang`. Action metavariables range over the
    /// transition labels, so `tau` is included in synchronising mode.
    pub fn instances(self, lang: &Lang) -> Vec<Equation> {
        let l = lang.labels();
        let mut out = Vec::new();
        let name = self.name();
        let id = |args: &[&Action]| -> String {
            let names: Vec<&str> = args.iter().map(|a| a.name()).collect();
            format!("{name}[{}]", names.join(","))
        };
        match self {
            Schema::A0 => out.push(eq(name, sum(&[x(), nil()]), x())),
            Schema::A1 => out.push(eq(name, sum(&[x(), y()]), sum(&[y(), x()]))),
            Schema::A2 => out.push(eq(name, sum(&[x(), y(), z()]), Term::sum(x(), sum(&[y(), z()])))),
            Schema::A3 => out.push(eq(name, sum(&[x(), x()]), x())),
            Schema::P0 => out.push(eq(name, par(x(), nil()), x())),
            Schema::P1 => out.push(eq(name, par(x(), y()), par(y(), x()))),
            Schema::SP1 => out.push(eq(
                name,
                par(sum(&[x(), y()]), sum(&[z(), w()])),
                sum(&[
                    par(x(), sum(&[z(), w()])),
                    par(y(), sum(&[z(), w()])),
                    par(sum(&[x(), y()]), z()),
                    par(sum(&[x(), y()]), w()),
                ]),
            )),
            Schema::TP => out.push(eq(name, par(sum(&[x(), y()]), z()), sum(&[par(x(), z()), par(y(), z())]))),
            Schema::EL1 => {
                for a in &l {
                    for b in &l {
                        out.push(eq(&id(&[a, b]), par(pre(a, x()), pre(b, y())), el1_rhs(a, b, false)));
                    }
                }
            }
            Schema::ELC1 | Schema::ELC1t => {
                for a in &l {
                    for b in &l {
                        let sync = lang.synchronises(a, b);
                        if sync == (self == Schema::ELC1t) {
                            out.push(eq(&id(&[a, b]), par(pre(a, x()), pre(b, y())), el1_rhs(a, b, sync)));
                        }
                    }
                }
            }
            Schema::EL2 | Schema::ELC2 => {
                let subsets = subsets(&l);
                for i in &subsets {
                    for j in &subsets {
                        let args = format!(
                            "{name}[{}|{}]",
                            i.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
                            j.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
                        );
                        out.push(el2(&args, i, j, if self == Schema::ELC2 { Some(lang) } else { None }));
                    }
                }
            }
            Schema::RS => {
                for a in &l {
                    for b in &l {
                        let lhs = pre(a, sum(&[pre(b, x()), pre(b, y()), z()]));
                        let rhs = sum(&[lhs.clone(), pre(a, sum(&[pre(b, x()), z()]))]);
                        out.push(eq(&id(&[a, b]), lhs, rhs));
                    }
                }
            }
            Schema::RSP1 | Schema::RSP1Half => {
                for a in &l {
                    for b in &l {
                        let p = sum(&[pre(a, x()), pre(a, y()), u()]);
                        let q = sum(&[pre(b, z()), pre(b, w()), v()]);
                        let mut rhs = vec![par(sum(&[pre(a, x()), u()]), q.clone()), par(sum(&[pre(a, y()), u()]), q.clone())];
                        if self == Schema::RSP1 {
                            rhs.push(par(p.clone(), sum(&[pre(b, z()), v()])));
                            rhs.push(par(p.clone(), sum(&[pre(b, w()), v()])));
                        }
                        out.push(eq(&id(&[a, b]), par(p, q), sum(&rhs)));
                    }
                }
            }
            Schema::RSP2 => {
                for i in subsets(&l) {
                    for b in &l {
                        let xs: Vec<Term> = (1..=i.len()).map(|k| Term::var(&format!("x{k}"))).collect();
                        let p = sum(&i.iter().zip(&xs).map(|(a, xk)| pre(a, xk.clone())).collect::<Vec<_>>());
                        let q = sum(&[pre(b, y()), pre(b, z()), w()]);
                        let mut rhs = vec![par(p.clone(), sum(&[pre(b, y()), w()])), par(p.clone(), sum(&[pre(b, z()), w()]))];
                        for (a, xk) in i.iter().zip(&xs) {
                            rhs.push(pre(a, par(xk.clone(), q.clone())));
                        }
                        let names: Vec<&str> = i.iter().map(|a| a.name()).collect();
                        out.push(eq(&format!("{name}[{}|{}]", names.join(","), b.name()), par(p, q), sum(&rhs)));
                    }
                }
            }
            Schema::CS => {
                for a in &l {
                    for b in &l {
                        let lhs = pre(a, sum(&[pre(b, x()), y(), z()]));
                        let rhs = sum(&[lhs.clone(), pre(a, sum(&[pre(b, x()), z()]))]);
                        out.push(eq(&id(&[a, b]), lhs, rhs));
                    }
                }
            }
            Schema::CSP1 => {
                for a in &l {
                    for b in &l {
                        for c in &l {
                            for d in &l {
                                let p = sum(&[pre(a, x()), pre(b, y()), u()]);
                                let q = sum(&[pre(c, z()), pre(d, w()), v()]);
                                let rhs = sum(&[
                                    par(sum(&[pre(a, x()), u()]), q.clone()),
                                    par(sum(&[pre(b, y()), u()]), q.clone()),
                                    par(p.clone(), sum(&[pre(c, z()), v()])),
                                    par(p.clone(), sum(&[pre(d, w()), v()])),
                                ]);
                                out.push(eq(&id(&[a, b, c, d]), par(p, q), rhs));
                            }
                        }
                    }
                }
            }
            Schema::CSP2 => {
                for a in &l {
                    for b in &l {
                        for c in &l {
                            let q = sum(&[pre(b, y()), pre(c, z()), w()]);
                            let rhs = sum(&[
                                pre(a, par(x(), q.clone())),
                                par(pre(a, x()), sum(&[pre(b, y()), w()])),
                                par(pre(a, x()), sum(&[pre(c, z()), w()])),
                            ]);
                            out.push(eq(&id(&[a, b, c]), par(pre(a, x()), q), rhs));
                        }
                    }
                }
            }
            Schema::S => {
                for a in &l {
                    let lhs = pre(a, sum(&[x(), y()]));
                    out.push(eq(&id(&[a]), lhs.clone(), sum(&[lhs, pre(a, x())])));
                }
            }
            Schema::SP2 => {
                for a in &l {
                    let rhs = sum(&[
                        pre(a, par(x(), sum(&[y(), z()]))),
                        par(pre(a, x()), y()),
                        par(pre(a, x()), z()),
                    ]);
                    out.push(eq(&id(&[a]), par(pre(a, x()), sum(&[y(), z()])), rhs));
                }
            }
            Schema::RT => {
                let xs: Vec<Term> = (1..=l.len()).map(|k| Term::var(&format!("x{k}"))).collect();
                let ys: Vec<Term> = (1..=l.len()).map(|k| Term::var(&format!("y{k}"))).collect();
                for a in &l {
                    let mut both = Vec::new();
                    for (k, b) in l.iter().enumerate() {
                        both.push(pre(b, xs[k].clone()));
                        both.push(pre(b, ys[k].clone()));
                    }
                    both.push(z());
                    let side = |vs: &[Term]| {
                        let mut s: Vec<Term> = l.iter().zip(vs).map(|(b, v)| pre(b, v.clone())).collect();
                        s.push(z());
                        pre(a, sum(&s))
                    };
                    out.push(eq(&id(&[a]), pre(a, sum(&both)), sum(&[side(&xs), side(&ys)])));
                }
            }
            Schema::FP => {
                for a in &l {
                    let lhs = par(sum(&[pre(a, x()), pre(a, y()), w()]), z());
                    let rhs = sum(&[par(sum(&[pre(a, x()), w()]), z()), par(sum(&[pre(a, y()), w()]), z())]);
                    out.push(eq(&id(&[a]), lhs, rhs));
                }
            }
            Schema::FT => {
                for a in &l {
                    let lhs = sum(&[pre(a, x()), pre(a, y())]);
                    let rhs = sum(&[pre(a, x()), pre(a, y()), pre(a, sum(&[x(), y()]))]);
                    out.push(eq(&id(&[a]), lhs, rhs));
                }
            }
            Schema::R => {
                for a in &l {
                    for b in &l {
                        let lhs = sum(&[pre(a, sum(&[pre(b, x()), z()])), pre(a, sum(&[pre(b, y()), w()]))]);
                        let rhs =
                            sum(&[pre(a, sum(&[pre(b, x()), pre(b, y()), z()])), pre(a, sum(&[pre(b, y()), w()]))]);
                        out.push(eq(&id(&[a, b]), lhs, rhs));
                    }
                }
            }
            Schema::F => {
                for a in &l {
                    let lhs = sum(&[pre(a, x()), pre(a, sum(&[y(), z()]))]);
                    let rhs = sum(&[pre(a, x()), pre(a, sum(&[x(), y()])), pre(a, sum(&[y(), z()]))]);
                    out.push(eq(&id(&[a]), lhs, rhs));
                }
            }
            Schema::CT => {
                for a in &l {
                    for b in &l {
                        for c in &l {
                            let lhs = sum(&[pre(a, sum(&[pre(b, x()), z()])), pre(a, sum(&[pre(c, y()), w()]))]);
                            let rhs = pre(a, sum(&[pre(b, x()), pre(c, y()), z(), w()]));
                            out.push(eq(&id(&[a, b, c]), lhs, rhs));
                        }
                    }
                }
            }
            Schema::CTP => {
                for a in &l {
                    for b in &l {
                        let lhs = par(sum(&[pre(a, x()), pre(b, y()), w()]), z());
                        let rhs = sum(&[par(sum(&[pre(a, x()), w()]), z()), par(sum(&[pre(b, y()), w()]), z())]);
                        out.push(eq(&id(&[a, b]), lhs, rhs));
                    }
                }
            }
            Schema::T => {
                for a in &l {
                    out.push(eq(&id(&[a]), sum(&[pre(a, x()), pre(a, y())]), pre(a, sum(&[x(), y()]))));
                }
            }
        }
        out
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = Error;
    fn from_str(s: &str) -> Result<Schema> {
        Schema::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownSystem(format!("no axiom schema named `{s}`")))
    }
}

fn eq(id: &str, lhs: Term, rhs: Term) -> Equation {
    Equation { id: id.to_string(), lhs, rhs }
}

fn nil() -> Term {
    Term::Nil
}
fn x() -> Term {
    Term::var("x")
}
fn y() -> Term {
    Term::var("y")
}
fn z() -> Term {
    Term::var("z")
}
fn u() -> Term {
    Term::var("u")
}
fn v() -> Term {
    Term::var("v")
}
fn w() -> Term {
    Term::var("w")
}

fn pre(a: &Action, t: Term) -> Term {
    Term::prefix(a.clone(), t)
}

fn par(l: Term, r: Term) -> Term {
    Term::par(l, r)
}

fn sum(ts: &[Term]) -> Term {
    Term::sum_all(ts.iter().cloned())
}

fn el1_rhs(a: &Action, b: &Action, sync: bool) -> Term {
    let mut s = vec![pre(a, par(x(), pre(b, y()))), pre(b, par(pre(a, x()), y()))];
    if sync {
        s.push(pre(&Action::tau(), par(x(), y())));
    }
    sum(&s)
}

/// Subsets of `l` in binary counting order, each listed in label order.
fn subsets(l: &[Action]) -> Vec<Vec<Action>> {
    (0..1usize << l.len())
        .map(|m| l.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, a)| a.clone()).collect())
        .collect()
}

/// `Σ a_i x_i || Σ b_j y_j` expanded, with communication terms when `sync` is given.
fn el2(id: &str, i: &[Action], j: &[Action], sync: Option<&Lang>) -> Equation {
    let xs: Vec<Term> = (1..=i.len()).map(|k| Term::var(&format!("x{k}"))).collect();
    let ys: Vec<Term> = (1..=j.len()).map(|k| Term::var(&format!("y{k}"))).collect();
    let p = sum(&i.iter().zip(&xs).map(|(a, t)| pre(a, t.clone())).collect::<Vec<_>>());
    let q = sum(&j.iter().zip(&ys).map(|(b, t)| pre(b, t.clone())).collect::<Vec<_>>());
    let mut rhs: Vec<Term> = i.iter().zip(&xs).map(|(a, xi)| pre(a, par(xi.clone(), q.clone()))).collect();
    rhs.extend(j.iter().zip(&ys).map(|(b, yj)| pre(b, par(p.clone(), yj.clone()))));
    if let Some(lang) = sync {
        for (a, xi) in i.iter().zip(&xs) {
            for (b, yj) in j.iter().zip(&ys) {
                if lang.synchronises(a, b) {
                    rhs.push(pre(&Action::tau(), par(xi.clone(), yj.clone())));
                }
            }
        }
    }
    eq(id, par(p, q), sum(&rhs))
}
