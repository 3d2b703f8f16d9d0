//! Directive words over `{1, 2}`.

use std::fmt;

use crate::error::{Error, Result};

/// A directive sequence selecting `C1`/`C2` (or `c1`/`c2`) at each step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DirectiveWord {
    /// A known finite prefix of an infinite word whose tail is not declared.
    Prefix(Vec<u8>),
    /// `pre · per^ω`, kept with minimal preperiod and period.
    Periodic { pre: Vec<u8>, per: Vec<u8> },
}

fn check_letters(w: &[u8]) -> Result<()> {
    match w.iter().find(|&&l| l != 1 && l != 2) {
        Some(l) => Err(Error::Domain(format!("directive letter {l} is not 1 or 2"))),
        None => Ok(()),
    }
}

fn digits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '1' => Ok(1),
            '2' => Ok(2),
            _ => Err(Error::Parse(format!("unexpected {c:?} in directive {s:?}"))),
        })
        .collect()
}

pub(crate) fn letters_to_string(w: &[u8]) -> String {
    w.iter().map(|&l| char::from(b'0' + l)).collect()
}

impl DirectiveWord {
    pub fn prefix(letters: Vec<u8>) -> Result<Self> {
        check_letters(&letters)?;
        Ok(DirectiveWord::Prefix(letters))
    }

    pub fn periodic(pre: Vec<u8>, per: Vec<u8>) -> Result<Self> {
        check_letters(&pre)?;
        check_letters(&per)?;
        if per.is_empty() {
            return Err(Error::Domain("period must be non-empty".into()));
        }
        let (pre, per) = normalize(pre, per);
        Ok(DirectiveWord::Periodic { pre, per })
    }

    /// Parses a literal prefix `"12121"`, `"(12)^w"`, `"1(2)^w"` or `"pre:121 per:12"`.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.starts_with("pre:") || s.starts_with("per:") {
            let mut pre = None;
            let mut per = None;
            for tok in s.split_whitespace() {
                if let Some(v) = tok.strip_prefix("pre:") {
                    pre = Some(digits(v)?);
                } else if let Some(v) = tok.strip_prefix("per:") {
                    per = Some(digits(v)?);
                } else {
                    return Err(Error::Parse(format!("unexpected token {tok:?} in {s:?}")));
                }
            }
            let per = per.ok_or_else(|| Error::Parse(format!("missing per: in {s:?}")))?;
            return Self::periodic(pre.unwrap_or_default(), per);
        }
        if let Some(open) = s.find('(') {
            let close = s.find(')').ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in {s:?}")))?;
            let rest = &s[close + 1..];
            if !matches!(rest, "^w" | "^ω" | "^omega") || close < open {
                return Err(Error::Parse(format!("expected X(Y)^w, got {s:?}")));
            }
            return Self::periodic(digits(&s[..open])?, digits(&s[open + 1..close])?);
        }
        Self::prefix(digits(s)?)
    }

    /// Letter at index `i`, if known.
    pub fn letter(&self, i: usize) -> Option<u8> {
        match self {
            DirectiveWord::Prefix(w) => w.get(i).copied(),
            DirectiveWord::Periodic { pre, per } => Some(if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] }),
        }
    }

    /// The first `n` letters, or fewer when the word is a shorter prefix.
    pub fn take(&self, n: usize) -> Vec<u8> {
        match self {
            DirectiveWord::Prefix(w) => w[..n.min(w.len())].to_vec(),
            DirectiveWord::Periodic { .. } => (0..n).map(|i| self.letter(i).expect("periodic")).collect(),
        }
    }

    /// Number of known letters; `None` for an infinite word.
    pub fn known_len(&self) -> Option<usize> {
        match self {
            DirectiveWord::Prefix(w) => Some(w.len()),
            DirectiveWord::Periodic { .. } => None,
        }
    }

    /// The repeated letter when the tail is `1^ω` or `2^ω`, with the tail's start.
    pub fn constant_tail(&self) -> Option<(u8, usize)> {
        match self {
            DirectiveWord::Periodic { pre, per } if per.len() == 1 => Some((per[0], pre.len())),
            _ => None,
        }
    }
}

fn normalize(mut pre: Vec<u8>, mut per: Vec<u8>) -> (Vec<u8>, Vec<u8>) {
    let n = per.len();
    if let Some(p) = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| per[i] == per[i - p])) {
        per.truncate(p);
    }
    while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
        if a != b {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    (pre, per)
}

impl fmt::Display for DirectiveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectiveWord::Prefix(w) => f.write_str(&letters_to_string(w)),
            DirectiveWord::Periodic { pre, per } => {
                write!(f, "{}({})^w", letters_to_string(pre), letters_to_string(per))
            }
        }
    }
}
