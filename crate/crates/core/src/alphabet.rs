use std::fmt;
use std::sync::Arc;

use crate::error::Error;

/// Name of the silent action produced by synchronisation.
pub const TAU: &str = "tau";

/// An action name. Complements carry a trailing apostrophe (`a'`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(Arc<str>);

impl Action {
    pub fn new(name: &str) -> Action {
        Action(Arc::from(name))
    }

    pub fn tau() -> Action {
        Action::new(TAU)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_tau(&self) -> bool {
        &*self.0 == TAU
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Action {
    fn from(s: &str) -> Action {
        Action::new(s)
    }
}

/// A finite, ordered action set. In synchronisation mode it also carries a
/// fixed-point-free complement involution and the extra label `tau`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    actions: Vec<Action>,
    complement: Option<Vec<usize>>,
}

impl Alphabet {
    /// A plain alphabet for interleaving semantics.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Alphabet, Error> {
        let actions: Vec<Action> = names.iter().map(|n| Action::new(n.as_ref())).collect();
        let alphabet = Alphabet { actions, complement: None };
        alphabet.validate()?;
        Ok(alphabet)
    }

    /// A synchronising alphabet: every base name `a` contributes `a` and `a'`.
    pub fn sync<S: AsRef<str>>(base: &[S]) -> Result<Alphabet, Error> {
        let mut actions = Vec::new();
        let mut complement = Vec::new();
        for (i, n) in base.iter().enumerate() {
            let n = n.as_ref();
            if n.ends_with('\'') {
                return Err(Error::InvalidAlphabet(format!(
                    "base action `{n}` must not carry an apostrophe"
                )));
            }
            actions.push(Action::new(n));
            actions.push(Action::new(&format!("{n}'")));
            complement.push(2 * i + 1);
            complement.push(2 * i);
        }
        let alphabet = Alphabet { actions, complement: Some(complement) };
        alphabet.validate()?;
        Ok(alphabet)
    }

    /// A synchronising alphabet with an explicit complement pairing.
    pub fn with_complement<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Alphabet, Error> {
        let actions: Vec<Action> = names.iter().map(|n| Action::new(n.as_ref())).collect();
        let find = |n: &str| {
            actions
                .iter()
                .position(|a| a.name() == n)
                .ok_or_else(|| Error::InvalidAlphabet(format!("complement mentions unknown action `{n}`")))
        };
        let mut complement = vec![usize::MAX; actions.len()];
        for (l, r) in pairs {
            let (i, j) = (find(l.as_ref())?, find(r.as_ref())?);
            for (k, v) in [(i, j), (j, i)] {
                if complement[k] != usize::MAX && complement[k] != v {
                    return Err(Error::InvalidAlphabet("complement is not a function".into()));
                }
                complement[k] = v;
            }
        }
        let alphabet = Alphabet { actions, complement: Some(complement) };
        alphabet.validate()?;
        Ok(alphabet)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.actions.is_empty() {
            return Err(Error::InvalidAlphabet("the action set is empty".into()));
        }
        for (i, a) in self.actions.iter().enumerate() {
            if a.name().is_empty() {
                return Err(Error::InvalidAlphabet("empty action name".into()));
            }
            if self.actions[..i].contains(a) {
                return Err(Error::InvalidAlphabet(format!("duplicate action `{a}`")));
            }
            if a.is_tau() {
                return Err(Error::InvalidAlphabet("`tau` is reserved and cannot be a visible action".into()));
            }
            if a.name() == "0" {
                return Err(Error::InvalidAlphabet("`0` cannot be an action".into()));
            }
        }
        if let Some(c) = &self.complement {
            for (i, &j) in c.iter().enumerate() {
                if j >= self.actions.len() {
                    return Err(Error::InvalidAlphabet(format!(
                        "complement undefined on `{}`",
                        self.actions[i]
                    )));
                }
                if j == i {
                    return Err(Error::InvalidAlphabet(format!(
                        "`{}` is its own complement",
                        self.actions[i]
                    )));
                }
                if c[j] != i {
                    return Err(Error::InvalidAlphabet("complement is not an involution".into()));
                }
            }
        }
        Ok(())
    }

    /// The visible actions, in declaration order.
    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn is_sync(&self) -> bool {
        self.complement.is_some()
    }

    /// Visible actions followed by `tau` when the alphabet synchronises.
    pub fn labels(&self) -> Vec<Action> {
        let mut out = self.actions.clone();
        if self.is_sync() {
            out.push(Action::tau());
        }
        out
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.actions.contains(a)
    }

    /// Whether `a` may label a prefix: a visible action, or `tau` in sync mode.
    pub fn admits(&self, a: &Action) -> bool {
        self.contains(a) || (self.is_sync() && a.is_tau())
    }

    pub fn complement(&self, a: &Action) -> Option<Action> {
        let c = self.complement.as_ref()?;
        let i = self.actions.iter().position(|b| b == a)?;
        Some(self.actions[c[i]].clone())
    }

    /// Base names used to describe the alphabet on the command line.
    pub fn describe(&self) -> String {
        let names: Vec<&str> = self.actions.iter().map(Action::name).collect();
        if self.is_sync() {
            format!("{{{}}} + tau", names.join(","))
        } else {
            format!("{{{}}}", names.join(","))
        }
    }
}

/// Parallel composition semantics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    Interleaving,
    CcsSync,
}

/// An alphabet paired with the semantics of `||` it is used under.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lang {
    alphabet: Alphabet,
    mode: Mode,
}

impl Lang {
    pub fn new(alphabet: Alphabet, mode: Mode) -> Result<Lang, Error> {
        if mode == Mode::CcsSync && !alphabet.is_sync() {
            return Err(Error::SyncMismatch(
                "synchronising semantics needs an alphabet with complements".into(),
            ));
        }
        Ok(Lang { alphabet, mode })
    }

    pub fn interleaving(alphabet: Alphabet) -> Lang {
        Lang { alphabet, mode: Mode::Interleaving }
    }

    /// The two-action interleaving setting `{a, b}` used throughout the tests.
    pub fn ab() -> Lang {
        Lang::interleaving(Alphabet::new(&["a", "b"]).expect("static alphabet"))
    }

    /// Synchronising setting over `{a, a'}` plus `tau`.
    pub fn sync_a() -> Lang {
        Lang { alphabet: Alphabet::sync(&["a"]).expect("static alphabet"), mode: Mode::CcsSync }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_sync(&self) -> bool {
        self.mode == Mode::CcsSync
    }

    /// Labels that may occur on transitions under this semantics.
    pub fn labels(&self) -> Vec<Action> {
        match self.mode {
            Mode::Interleaving => self.alphabet.actions().to_vec(),
            Mode::CcsSync => self.alphabet.labels(),
        }
    }

    /// Whether `a` and `b` synchronise into `tau`.
    pub fn synchronises(&self, a: &Action, b: &Action) -> bool {
        self.mode == Mode::CcsSync && self.alphabet.complement(a).as_ref() == Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sync_alphabet_pairs_complements() {
        let al = Alphabet::sync(&["a", "b"]).unwrap();
        let names: Vec<&str> = al.actions().iter().map(Action::name).collect();
        assert_eq!(names, ["a", "a'", "b", "b'"]);
        assert_eq!(al.complement(&"a'".into()), Some(Action::new("a")));
        assert_eq!(al.labels().last(), Some(&Action::tau()));
    }

    #[test]
    fn rejects_bad_alphabets() {
        assert!(Alphabet::new::<&str>(&[]).is_err());
        assert!(Alphabet::new(&["a", "a"]).is_err());
        assert!(Alphabet::new(&["tau"]).is_err());
        assert!(Alphabet::with_complement(&["a", "b"], &[("a", "a")]).is_err());
        assert!(Alphabet::with_complement(&["a", "b", "c"], &[("a", "b")]).is_err());
        assert!(Alphabet::with_complement(&["a", "b"], &[("a", "b")]).is_ok());
    }

    #[test]
    fn sync_mode_needs_complements() {
        assert!(Lang::new(Alphabet::new(&["a"]).unwrap(), Mode::CcsSync).is_err());
        let l = Lang::sync_a();
        assert!(l.synchronises(&"a".into(), &"a'".into()));
        assert!(!l.synchronises(&Action::tau(), &Action::tau()));
    }
}
