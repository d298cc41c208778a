//! ASCII concrete syntax.
//!
//! ```text
//! sum  ::= par ('+' par)*
//! par  ::= pre ('||' pre)*
//! pre  ::= ACTION '.' pre | atom
//! atom ::= '0' | IDENT | '(' sum ')'
//! ```
//!
//! A bare identifier that names an action abbreviates `a.0`; any other
//! identifier is a variable. Complements are written `a'` and the silent
//! action `tau`; both require a synchronising alphabet.

use crate::alphabet::{Action, Alphabet, TAU};
use crate::error::{Error, Result};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Zero,
    Ident(String),
    Dot,
    Plus,
    Bar,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        self.pos += 1;
        let tok = match c {
            b'.' => Tok::Dot,
            b'+' => Tok::Plus,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'|' if bytes.get(self.pos) == Some(&b'|') => {
                self.pos += 1;
                Tok::Bar
            }
            b'0' if !bytes.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') => {
                Tok::Zero
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                if bytes.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
            }
        };
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    alphabet: &'a Alphabet,
    look: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(usize, Tok)> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.look, next))
    }

    fn sum(&mut self) -> Result<Term> {
        let mut t = self.par()?;
        while self.look.1 == Tok::Plus {
            self.bump()?;
            t = Term::sum(t, self.par()?);
        }
        Ok(t)
    }

    fn par(&mut self) -> Result<Term> {
        let mut t = self.pre()?;
        while self.look.1 == Tok::Bar {
            self.bump()?;
            t = Term::par(t, self.pre()?);
        }
        Ok(t)
    }

    fn action(&self, pos: usize, name: &str) -> Result<Action> {
        let a = Action::new(name);
        if name == TAU {
            return if self.alphabet.is_sync() { Ok(a) } else { Err(Error::TauOutsideSync { pos }) };
        }
        if self.alphabet.contains(&a) {
            Ok(a)
        } else {
            Err(Error::UnknownAction { pos, name: name.to_string() })
        }
    }

    fn pre(&mut self) -> Result<Term> {
        let (pos, tok) = self.bump()?;
        match tok {
            Tok::Zero => Ok(Term::Nil),
            Tok::LParen => {
                let t = self.sum()?;
                match self.bump()? {
                    (_, Tok::RParen) => Ok(t),
                    (p, _) => Err(Error::Syntax { pos: p, msg: "expected `)`".into() }),
                }
            }
            Tok::Ident(name) => {
                if self.look.1 == Tok::Dot {
                    let a = self.action(pos, &name)?;
                    self.bump()?;
                    return Ok(Term::prefix(a, self.pre()?));
                }
                if name == TAU || name.ends_with('\'') || self.alphabet.contains(&Action::new(&name)) {
                    Ok(Term::prefix(self.action(pos, &name)?, Term::Nil))
                } else {
                    Ok(Term::var(&name))
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            other => Err(Error::Syntax { pos, msg: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Zero => "`0`",
        Tok::Ident(_) => "identifier",
        Tok::Dot => "`.`",
        Tok::Plus => "`+`",
        Tok::Bar => "`||`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

/// Parses a term; precedence is prefix > `||` > `+`, both binary operators
/// associating to the left.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Term> {
    let mut lexer = Lexer { src: text, pos: 0 };
    let look = lexer.next()?;
    let mut p = Parser { lexer, alphabet, look };
    let t = p.sum()?;
    match p.look {
        (_, Tok::End) => Ok(t),
        (pos, ref tok) => Err(Error::Syntax { pos, msg: format!("unexpected {}", describe(tok)) }),
    }
}

/// Parses over `{a, b}`, panicking on error. Intended for tests and examples.
#[doc(hidden)]
pub fn parse_ab(text: &str) -> Term {
    let al = Alphabet::new(&["a", "b"]).expect("static alphabet");
    parse(text, &al).unwrap_or_else(|e| panic!("{text}: {e}"))
}

const SUM: u8 = 0;
const PAR: u8 = 1;
const PRE: u8 = 2;

/// Canonical rendering with minimal parentheses and explicit `.0`.
pub fn render(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, SUM, false, &mut out);
    out
}

/// Like [`render`], but writes `a.0` as the shorthand `a`.
pub fn render_short(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, SUM, true, &mut out);
    out
}

fn write_term(t: &Term, ctx: u8, short: bool, out: &mut String) {
    let level = match t {
        Term::Sum(..) => SUM,
        Term::Par(..) => PAR,
        _ => PRE,
    };
    let paren = level < ctx;
    if paren {
        out.push('(');
    }
    match t {
        Term::Nil => out.push('0'),
        Term::Var(x) => out.push_str(x),
        Term::Prefix(a, body) => {
            out.push_str(a.name());
            if !(short && body.is_nil()) {
                out.push('.');
                write_term(body, PRE, short, out);
            }
        }
        Term::Sum(l, r) => {
            write_term(l, SUM, short, out);
            out.push_str(" + ");
            write_term(r, PAR, short, out);
        }
        Term::Par(l, r) => {
            write_term(l, PAR, short, out);
            out.push_str(" || ");
            write_term(r, PRE, short, out);
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(&["a", "b", "c"]).unwrap()
    }

    #[test]
    fn precedence_example() {
        let t = parse("a.x || b.y + c.0", &ab()).unwrap();
        let expected = Term::sum(
            Term::par(Term::prefix("a", Term::var("x")), Term::prefix("b", Term::var("y"))),
            Term::prefix("c", Term::Nil),
        );
        assert_eq!(t, expected);
        assert_eq!(parse("0", &ab()).unwrap(), Term::Nil);
    }

    #[test]
    fn associativity_is_left() {
        let t = parse("x + y + z", &ab()).unwrap();
        assert_eq!(t, Term::sum(Term::sum(Term::var("x"), Term::var("y")), Term::var("z")));
        let t = parse("x || y || z", &ab()).unwrap();
        assert_eq!(t, Term::par(Term::par(Term::var("x"), Term::var("y")), Term::var("z")));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Term::prefix("a", Term::Nil)), "a.0");
        assert_eq!(render(&Term::sum(Term::prefix("a", Term::Nil), Term::prefix("b", Term::Nil))), "a.0 + b.0");
        assert_eq!(render(&Term::par(Term::var("x"), Term::Nil)), "x || 0");
        let t = parse("a.(x + y) || (z || b.0 + c)", &ab()).unwrap();
        assert_eq!(render(&t), "a.(x + y) || (z || b.0 + c.0)");
        assert_eq!(render_short(&t), "a.(x + y) || (z || b + c)");
    }

    #[test]
    fn bare_actions_abbreviate_prefixes() {
        let t = parse("(a+a.a+b)||c", &ab()).unwrap();
        assert_eq!(render(&t), "(a.0 + a.a.0 + b.0) || c.0");
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("a.x + d.0", &ab()),
            Err(Error::UnknownAction { pos: 6, name: "d".into() })
        );
        assert_eq!(parse("tau.0", &ab()), Err(Error::TauOutsideSync { pos: 0 }));
        assert!(matches!(parse("a.(x + y", &ab()), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse("a. + x", &ab()), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse("x | y", &ab()), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("a'.0", &ab()), Err(Error::UnknownAction { .. })));
    }

    #[test]
    fn sync_syntax() {
        let al = Alphabet::sync(&["a"]).unwrap();
        let t = parse("a.0 || a'.0 + tau", &al).unwrap();
        assert_eq!(render(&t), "a.0 || a'.0 + tau.0");
    }

    pub(crate) fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Nil),
            prop::sample::select(vec!["x", "y", "z", "u", "v", "w"]).prop_map(Term::var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (prop::sample::select(vec!["a", "b"]), inner.clone()).prop_map(|(a, t)| Term::prefix(a, t)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sum(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Term::par(l, r)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn render_round_trips(t in arb_term()) {
            let al = Alphabet::new(&["a", "b"]).unwrap();
            prop_assert_eq!(parse(&render(&t), &al).unwrap(), t.clone());
            prop_assert_eq!(parse(&render_short(&t), &al).unwrap(), t);
        }
    }
}
