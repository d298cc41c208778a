//! Shipped proof scripts for the laws some systems derive rather than assume,
//! one file per system and law, each holding every instance over `{a, b}`.

use serde_json::Value;

use crate::error::{Error, Result};

use super::proof::{check_proof, ProofScript, Verdict};
use super::build_system;

macro_rules! fixtures {
    ($($name:literal),*) => {
        pub const PROOF_FIXTURES: &[&str] = &[$($name),*];
        fn text(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../../data/proofs/", $name, ".json"))),)*
                _ => None,
            }
        }
    };
}

fixtures!("E_S-CS", "E_S-CSP1", "E_S-CSP2", "E_FT-RT", "E_R-RT", "E_F-FT", "E_F-RS", "E_T-CT", "E_T-CTP");

/// The scripts of a fixture such as `E_S-CSP1`.
pub fn proof_fixture(name: &str) -> Result<Vec<ProofScript>> {
    let text = text(name)
        .ok_or_else(|| Error::Script(format!("no proof fixture named `{name}` (have {})", PROOF_FIXTURES.join(", "))))?;
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Script(format!("{name}: {e}")))?;
    let Value::Array(items) = v else {
        return Err(Error::Script(format!("{name}: expected a list of scripts")));
    };
    items.iter().map(ProofScript::from_json).collect()
}

/// Checks every script of a fixture in the system it names.
pub fn check_fixture(name: &str) -> Result<Vec<(String, Verdict)>> {
    proof_fixture(name)?
        .iter()
        .map(|ps| {
            let sys = build_system(&ps.system, &ps.lang)?;
            Ok((ps.goal_equation().to_string(), check_proof(ps, &sys)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_is_accepted() {
        for name in PROOF_FIXTURES {
            let verdicts = check_fixture(name).unwrap();
            assert!(!verdicts.is_empty());
            for (goal, v) in verdicts {
                assert_eq!(v, Verdict::Accepted, "{name}: {goal}");
            }
        }
        assert!(proof_fixture("E_S-XX").is_err());
    }

    #[test]
    fn closure_proves_the_same_goals() {
        for name in ["E_S-CS", "E_F-FT", "E_T-CTP"] {
            for ps in proof_fixture(name).unwrap() {
                let sys = build_system(&ps.system, &ps.lang).unwrap();
                assert!(check_proof(&ps, &super::super::saturate(&sys)).is_accepted(), "{name}");
            }
        }
    }
}
