use std::fmt;

use serde::{Deserialize, Serialize};

/// Special characters the legacy service insists on.
pub const LEGACY_SPECIALS: &str = "!@#$%^&*";

const LEGACY_MAX_LEN: usize = 32;

/// Password rules for the legacy store flow, plus the character set used when
/// enumerating the guess space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasswordPolicy {
    pub min_len: usize,
    pub max_len: usize,
    pub special_set: Vec<char>,
    pub require_special: bool,
    pub charset: Vec<char>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    TooShort { len: usize, min: usize },
    TooLong { len: usize, max: usize },
    MissingSpecial,
    IllegalCharacter { ch: char },
    LowEntropy { bits: f64, min_bits: f64 },
}

impl Eq for Violation {}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooShort { len, min } => write!(f, "too short ({len} < {min} characters)"),
            Violation::TooLong { len, max } => write!(f, "too long ({len} > {max} characters)"),
            Violation::MissingSpecial => write!(f, "missing a special character"),
            Violation::IllegalCharacter { ch } => write!(f, "illegal character {ch:?}"),
            Violation::LowEntropy { bits, min_bits } => {
                write!(f, "estimated entropy {bits:.1} bits is below {min_bits:.0}")
            }
        }
    }
}

pub(crate) fn describe(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// The 94 printable, non-space ASCII characters (0x21..=0x7E).
pub fn printable_ascii() -> Vec<char> {
    (0x21u8..=0x7e).map(char::from).collect()
}

impl PasswordPolicy {
    /// Builds a policy, checking that the bounds and sets are consistent.
    pub fn new(
        min_len: usize,
        special_set: Vec<char>,
        require_special: bool,
        charset: Vec<char>,
    ) -> Result<Self, String> {
        if min_len == 0 || min_len > LEGACY_MAX_LEN {
            return Err(format!("min_len must be in 1..={LEGACY_MAX_LEN}, got {min_len}"));
        }
        if let Some(c) = special_set.iter().find(|c| !charset.contains(c)) {
            return Err(format!("special character {c:?} is not in the charset"));
        }
        Ok(PasswordPolicy { min_len, max_len: LEGACY_MAX_LEN, special_set, require_special, charset })
    }

    /// The service as first analysed: 6 to 32 characters, one special.
    pub fn legacy() -> Self {
        Self::legacy_with_min(6)
    }

    /// The service after the minimum length was raised to 8.
    pub fn legacy_8() -> Self {
        Self::legacy_with_min(8)
    }

    fn legacy_with_min(min_len: usize) -> Self {
        Self::new(min_len, LEGACY_SPECIALS.chars().collect(), true, printable_ascii())
            .expect("legacy preset is consistent")
    }

    pub fn is_special(&self, c: char) -> bool {
        self.special_set.contains(&c)
    }
}

/// Checks `password` against `policy`, collecting every violation.
pub fn validate_password(password: &str, policy: &PasswordPolicy) -> Result<(), Vec<Violation>> {
    let len = password.chars().count();
    let mut violations = Vec::new();
    if len < policy.min_len {
        violations.push(Violation::TooShort { len, min: policy.min_len });
    }
    if len > policy.max_len {
        violations.push(Violation::TooLong { len, max: policy.max_len });
    }
    let mut seen_illegal = Vec::new();
    for c in password.chars() {
        if !policy.charset.contains(&c) && !seen_illegal.contains(&c) {
            seen_illegal.push(c);
            violations.push(Violation::IllegalCharacter { ch: c });
        }
    }
    if policy.require_special && !password.chars().any(|c| policy.is_special(c)) {
        violations.push(Violation::MissingSpecial);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_bangs_pass_legacy_policy() {
        assert_eq!(validate_password("!!!!!!", &PasswordPolicy::legacy()), Ok(()));
    }

    #[test]
    fn six_bangs_too_short_after_minimum_raised() {
        let err = validate_password("!!!!!!", &PasswordPolicy::legacy_8()).unwrap_err();
        assert_eq!(err, vec![Violation::TooShort { len: 6, min: 8 }]);
    }

    #[test]
    fn no_special_character() {
        let err = validate_password("abcdef", &PasswordPolicy::legacy()).unwrap_err();
        assert_eq!(err, vec![Violation::MissingSpecial]);
    }

    #[test]
    fn collects_multiple_violations() {
        let long: String = "a".repeat(33);
        let err = validate_password(&long, &PasswordPolicy::legacy()).unwrap_err();
        assert_eq!(err, vec![Violation::TooLong { len: 33, max: 32 }, Violation::MissingSpecial]);

        let err = validate_password("ab cd!é", &PasswordPolicy::legacy()).unwrap_err();
        assert_eq!(err, vec![Violation::IllegalCharacter { ch: ' ' }, Violation::IllegalCharacter { ch: 'é' }]);
    }

    #[test]
    fn legacy_sets_are_consistent() {
        let p = PasswordPolicy::legacy();
        assert_eq!(p.special_set.len(), 8);
        assert_eq!(p.charset.len(), 94);
        assert_eq!(p.max_len, 32);
        assert!(p.special_set.iter().all(|c| p.charset.contains(c)));
    }

    #[test]
    fn rejects_inconsistent_policy() {
        assert!(PasswordPolicy::new(0, vec![], false, vec!['a']).is_err());
        assert!(PasswordPolicy::new(4, vec!['!'], true, vec!['a']).is_err());
    }
}
