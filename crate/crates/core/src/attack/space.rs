//! Enumerable password spaces: every string over a charset with length in a
//! range, optionally restricted to strings containing at least one special
//! character.
//!
//! Enumeration walks a "raw" index space (all strings of each length, shortest
//! first, last position fastest) and skips strings lacking a required special
//! character. Partitions are contiguous slices of that raw index space.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{printable_ascii, PasswordPolicy, LEGACY_KEY_LEN, LEGACY_SPECIALS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("invalid password space: {0}")]
    Invalid(String),
    #[error("password space is too large to enumerate")]
    TooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasswordSpace {
    pub charset: Vec<char>,
    pub length_min: usize,
    pub length_max: usize,
    pub require_special: bool,
    pub special_set: Vec<char>,
}

/// Expands a `+`-separated list of named classes (`lower`, `upper`, `digit`,
/// `special`, `symbol`, `printable`) into a charset, de-duplicated in order.
pub fn parse_charset(spec: &str) -> Result<Vec<char>, SpaceError> {
    let mut out: Vec<char> = Vec::new();
    for part in spec.split('+').map(str::trim) {
        let chars: Vec<char> = match part {
            "lower" => ('a'..='z').collect(),
            "upper" => ('A'..='Z').collect(),
            "digit" | "digits" => ('0'..='9').collect(),
            "special" => LEGACY_SPECIALS.chars().collect(),
            "symbol" | "symbols" => printable_ascii().into_iter().filter(|c| !c.is_ascii_alphanumeric()).collect(),
            "printable" => printable_ascii(),
            other => return Err(SpaceError::Invalid(format!("unknown charset class {other:?}"))),
        };
        for c in chars {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

impl PasswordSpace {
    pub fn new(
        charset: Vec<char>,
        length_min: usize,
        length_max: usize,
        require_special: bool,
        special_set: Vec<char>,
    ) -> Result<Self, SpaceError> {
        let mut deduped: Vec<char> = Vec::with_capacity(charset.len());
        for c in charset {
            if !deduped.contains(&c) {
                deduped.push(c);
            }
        }
        if deduped.is_empty() {
            return Err(SpaceError::Invalid("empty charset".into()));
        }
        if length_min == 0 || length_min > length_max {
            return Err(SpaceError::Invalid(format!("bad length range {length_min}..={length_max}")));
        }
        if require_special && special_set.iter().any(|c| !deduped.contains(c)) {
            return Err(SpaceError::Invalid("special set is not a subset of the charset".into()));
        }
        Ok(PasswordSpace { charset: deduped, length_min, length_max, require_special, special_set })
    }

    /// Printable ASCII with at least one of the legacy specials.
    pub fn legacy(length_min: usize, length_max: usize) -> Self {
        Self::new(printable_ascii(), length_min, length_max, true, LEGACY_SPECIALS.chars().collect())
            .expect("legacy space is consistent")
    }

    /// The guess space a policy permits, restricted to a length range.
    pub fn from_policy(policy: &PasswordPolicy, length_min: usize, length_max: usize) -> Result<Self, SpaceError> {
        Self::new(policy.charset.clone(), length_min, length_max, policy.require_special, policy.special_set.clone())
    }

    /// Charset from [`parse_charset`], requiring a legacy special only if the
    /// charset contains any.
    pub fn from_spec(
        spec: &str,
        length_min: usize,
        length_max: usize,
        require_special: bool,
    ) -> Result<Self, SpaceError> {
        let charset = parse_charset(spec)?;
        let specials: Vec<char> = LEGACY_SPECIALS.chars().filter(|c| charset.contains(c)).collect();
        if require_special && specials.is_empty() {
            return Err(SpaceError::Invalid(format!("charset {spec:?} has no special characters")));
        }
        Self::new(charset, length_min, length_max, require_special, specials)
    }

    fn is_special(&self, c: char) -> bool {
        self.special_set.contains(&c)
    }

    fn plain_count(&self) -> usize {
        self.charset.iter().filter(|c| !self.is_special(**c)).count()
    }

    /// Exact size: Σ_L |charset|^L − |charset ∖ specials|^L when a special is
    /// required, Σ_L |charset|^L otherwise.
    pub fn size(&self) -> BigUint {
        let n = BigUint::from(self.charset.len());
        let m = BigUint::from(self.plain_count());
        let mut total = BigUint::zero();
        for len in self.length_min..=self.length_max {
            let all = n.pow(len as u32);
            total += if self.require_special { all - m.pow(len as u32) } else { all };
        }
        total
    }

    pub fn contains(&self, password: &str) -> bool {
        let len = password.chars().count();
        (self.length_min..=self.length_max).contains(&len)
            && password.chars().all(|c| self.charset.contains(&c))
            && (!self.require_special || password.chars().any(|c| self.is_special(c)))
    }

    pub fn describe(&self) -> String {
        let mut s = if self.charset == printable_ascii() {
            format!("printable ASCII (94 chars), length {}..={}", self.length_min, self.length_max)
        } else {
            let chars: String = self.charset.iter().collect();
            format!("{} chars [{}], length {}..={}", self.charset.len(), chars, self.length_min, self.length_max)
        };
        if self.require_special {
            s.push_str(&format!(", at least one of {} specials", self.special_set.len()));
        }
        s
    }

    fn raw_counts(&self) -> Result<Vec<u128>, SpaceError> {
        let n = self.charset.len() as u128;
        (self.length_min..=self.length_max).map(|len| n.checked_pow(len as u32).ok_or(SpaceError::TooLarge)).collect()
    }

    /// Number of raw indices, including strings that lack a special.
    pub fn raw_len(&self) -> Result<u128, SpaceError> {
        self.raw_counts()?.into_iter().try_fold(0u128, |acc, c| acc.checked_add(c).ok_or(SpaceError::TooLarge))
    }

    /// Slice `part_index` of `part_count` near-equal slices of the raw index space.
    pub fn partition_range(&self, part_index: u64, part_count: u64) -> Result<Range<u128>, SpaceError> {
        if part_count == 0 || part_index >= part_count {
            return Err(SpaceError::Invalid(format!("part {part_index} of {part_count}")));
        }
        let total = self.raw_len()?;
        let (k, i) = (u128::from(part_count), u128::from(part_index));
        let (q, r) = (total / k, total % k);
        let start = q * i + i.min(r);
        let end = start + q + u128::from(i < r);
        Ok(start..end)
    }
}

pub fn space_size(space: &PasswordSpace) -> BigUint {
    space.size()
}

/// Base-|charset| counter over the raw index space that also maintains the
/// zero-padded legacy key for the current string.
pub(crate) struct Odometer<'a> {
    space: &'a PasswordSpace,
    encoded: Vec<Vec<u8>>,
    special: Vec<bool>,
    ascii: bool,
    digits: Vec<usize>,
    specials: usize,
    key: [u8; LEGACY_KEY_LEN],
    key_fits: bool,
}

impl<'a> Odometer<'a> {
    pub(crate) fn at(space: &'a PasswordSpace, raw_index: u128) -> Result<Self, SpaceError> {
        let mut index = raw_index;
        let mut len = space.length_min;
        for count in space.raw_counts()? {
            if index < count {
                break;
            }
            index -= count;
            len += 1;
        }
        let n = space.charset.len() as u128;
        let mut digits = vec![0usize; len];
        for d in digits.iter_mut().rev() {
            *d = (index % n) as usize;
            index /= n;
        }
        let mut odo = Odometer {
            space,
            encoded: space.charset.iter().map(|c| c.to_string().into_bytes()).collect(),
            special: space.charset.iter().map(|&c| space.is_special(c)).collect(),
            ascii: space.charset.iter().all(char::is_ascii),
            digits,
            specials: 0,
            key: [0; LEGACY_KEY_LEN],
            key_fits: false,
        };
        odo.rebuild();
        Ok(odo)
    }

    fn rebuild(&mut self) {
        self.specials = self.digits.iter().filter(|&&d| self.special[d]).count();
        self.key = [0; LEGACY_KEY_LEN];
        let mut at = 0;
        self.key_fits = true;
        for &d in &self.digits {
            let bytes = &self.encoded[d];
            if at + bytes.len() > LEGACY_KEY_LEN {
                self.key_fits = false;
                return;
            }
            self.key[at..at + bytes.len()].copy_from_slice(bytes);
            at += bytes.len();
        }
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        let n = self.encoded.len();
        let mut p = self.digits.len();
        loop {
            if p == 0 {
                self.digits = vec![0; self.digits.len() + 1];
                self.rebuild();
                return;
            }
            p -= 1;
            let old = self.digits[p];
            let new = if old + 1 == n { 0 } else { old + 1 };
            self.digits[p] = new;
            self.specials = self.specials + usize::from(self.special[new]) - usize::from(self.special[old]);
            if self.ascii && p < LEGACY_KEY_LEN {
                self.key[p] = self.encoded[new][0];
            }
            if new != 0 {
                break;
            }
        }
        if !self.ascii {
            self.rebuild();
        }
    }

    #[inline]
    pub(crate) fn admissible(&self) -> bool {
        !self.space.require_special || self.specials > 0
    }

    /// The zero-padded key, or `None` if the string is longer than 32 bytes.
    #[inline]
    pub(crate) fn key(&self) -> Option<&[u8; LEGACY_KEY_LEN]> {
        self.key_fits.then_some(&self.key)
    }

    pub(crate) fn password(&self) -> String {
        self.digits.iter().map(|&d| self.space.charset[d]).collect()
    }
}

/// Passwords of one partition, in deterministic order.
pub struct Candidates<'a> {
    odo: Odometer<'a>,
    remaining: u128,
    primed: bool,
}

impl Iterator for Candidates<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        while self.remaining > 0 {
            if self.primed {
                self.odo.advance();
            }
            self.primed = true;
            self.remaining -= 1;
            if self.odo.admissible() {
                return Some(self.odo.password());
            }
        }
        None
    }
}

pub fn enumerate_range(space: &PasswordSpace, range: Range<u128>) -> Result<Candidates<'_>, SpaceError> {
    let remaining = range.end.saturating_sub(range.start);
    let odo = Odometer::at(space, if remaining == 0 { 0 } else { range.start })?;
    Ok(Candidates { odo, remaining, primed: false })
}

pub fn enumerate_partition(
    space: &PasswordSpace,
    part_index: u64,
    part_count: u64,
) -> Result<Candidates<'_>, SpaceError> {
    enumerate_range(space, space.partition_range(part_index, part_count)?)
}
