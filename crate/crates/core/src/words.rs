//! Limit words of directive sequences, letter and factor frequencies, balance.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::directive::DirectiveWord;
use crate::error::{Error, Result};
use crate::subst::{check_word, parse_word, word_to_string, Block, Substitution};

/// A finite prefix of a word over `{1,2,3}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WordPrefix(Vec<u8>);

impl WordPrefix {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        check_word(&letters)?;
        Ok(Self(letters))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(Self(parse_word(s)?))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn truncated(&self, n: usize) -> WordPrefix {
        WordPrefix(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.0
    }
}

impl fmt::Display for WordPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&word_to_string(&self.0))
    }
}

fn c_subs() -> [Substitution; 2] {
    [Substitution::builtin("c1").expect("builtin"), Substitution::builtin("c2").expect("builtin")]
}

/// First `target` letters of `σ_[0,m)(a)`, expanding only what is needed.
fn expand_prefix(subs: &[&Substitution], a: u8, target: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(target.min(1 << 20));
    let mut stack = vec![(subs.len(), a)];
    while let Some((level, l)) = stack.pop() {
        if out.len() >= target {
            break;
        }
        if level == 0 {
            out.push(l);
        } else {
            for &b in subs[level - 1].image(l).iter().rev() {
                stack.push((level - 1, b));
            }
        }
    }
    out
}

/// Lookahead cap for deciding that a first-letter map becomes constant.
const MAX_LOOKAHEAD: usize = 1 << 16;

/// Prefix of the limit word of an S-adic sequence in which first letters eventually synchronize.
///
/// If every `σ_[m,m')(a)` starts with the same letter `c`, then `σ_[0,m)(c)` is a
/// prefix of the limit word. The search takes the least `m` where that prefix
/// is long enough.
fn synchronized_prefix<'a, F>(get: F, target: usize) -> Result<Vec<u8>>
where
    F: Fn(usize) -> Option<&'a Substitution>,
{
    let mut lens: [u64; 3] = [1, 1, 1];
    let mut m = 0usize;
    loop {
        if lens.iter().any(|&l| l >= target as u64) {
            // first letter of σ_[m,j)(a) for every a
            let mut psi: [u8; 3] = [1, 2, 3];
            let mut j = m;
            let c = loop {
                if psi.iter().all(|&x| x == psi[0]) {
                    break Some(psi[0]);
                }
                if j - m > MAX_LOOKAHEAD {
                    break None;
                }
                let Some(s) = get(j) else { break None };
                let phi = s.first_letters();
                psi = phi.map(|x| psi[(x - 1) as usize]);
                j += 1;
            };
            let Some(c) = c else {
                return Err(Error::InsufficientDirective(format!(
                    "no synchronizing factor after position {m}; declare the tail if it is constant"
                )));
            };
            if lens[(c - 1) as usize] >= target as u64 {
                let subs: Vec<&Substitution> = (0..m).map(|i| get(i).expect("seen")).collect();
                return Ok(expand_prefix(&subs, c, target));
            }
        }
        let Some(s) = get(m) else {
            return Err(Error::InsufficientDirective(format!("directive ends after {m} letters")));
        };
        lens = s.images().clone().map(|im| im.iter().fold(0u64, |acc, &b| acc.saturating_add(lens[(b - 1) as usize])));
        m += 1;
    }
}

/// The first `target_len` letters of the limit word of a `{c1,c2}` directive.
///
/// A constant tail `1^ω` from index `N` gives `(σ_[0,N)(1))^ω`; a tail `2^ω`
/// gives `σ_[0,N)(1) σ_[0,N)(3)^ω`, with `N` minimal. Other directives use
/// synchronizing factors such as `c1 c2^k c1`; a finite prefix must contain
/// enough of them.
pub fn sadic_prefix(w: &DirectiveWord, target_len: usize) -> Result<WordPrefix> {
    if target_len == 0 {
        return Err(Error::Domain("target length must be at least 1".into()));
    }
    let subs = c_subs();
    if let Some((rep, n)) = w.constant_tail() {
        let head: Vec<&Substitution> = w.take(n).iter().map(|&l| &subs[(l - 1) as usize]).collect();
        let first = expand_prefix(&head, 1, target_len);
        let (mut out, unit) = if rep == 1 {
            (Vec::with_capacity(target_len), first)
        } else {
            (first, expand_prefix(&head, 3, target_len))
        };
        while out.len() < target_len {
            out.extend_from_slice(&unit);
        }
        out.truncate(target_len);
        return Ok(WordPrefix(out));
    }
    let get = |i: usize| w.letter(i).map(|l| &subs[(l - 1) as usize]);
    Ok(WordPrefix(synchronized_prefix(get, target_len)?))
}

/// The same limit word generated from a block sequence.
pub fn sadic_prefix_blocks(blocks: &[Block], target_len: usize) -> Result<WordPrefix> {
    if target_len == 0 {
        return Err(Error::Domain("target length must be at least 1".into()));
    }
    let subs: Vec<Substitution> = blocks.iter().map(|b| b.substitution()).collect();
    Ok(WordPrefix(synchronized_prefix(|i| subs.get(i), target_len)?))
}

/// Letter counts `(|w|_1, |w|_2, |w|_3)`.
pub fn abelianization(w: &[u8]) -> [u64; 3] {
    let mut c = [0u64; 3];
    for &l in w {
        c[(l - 1) as usize] += 1;
    }
    c
}

/// Letter frequencies of a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyVector(pub [f64; 3]);

pub fn letter_frequencies(p: &WordPrefix) -> Result<FrequencyVector> {
    if p.is_empty() {
        return Err(Error::Domain("frequencies need a non-empty prefix".into()));
    }
    let n = p.len() as f64;
    Ok(FrequencyVector(abelianization(p.letters()).map(|c| c as f64 / n)))
}

/// Occurrences of `u` in `p` divided by the number of positions `|p| - |u| + 1`.
pub fn word_frequency(p: &WordPrefix, u: &[u8]) -> Result<f64> {
    check_word(u)?;
    if u.len() > p.len() {
        return Err(Error::Domain(format!("factor length {} exceeds prefix length {}", u.len(), p.len())));
    }
    let positions = p.len() - u.len() + 1;
    let hits = if u.is_empty() { positions } else { p.letters().windows(u.len()).filter(|w| *w == u).count() };
    Ok(hits as f64 / positions as f64)
}

/// Largest spread of letter counts between equal-length windows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceProfile {
    /// Entry `n - 1` holds, per letter, max minus min count over windows of length `n`.
    pub by_window: Vec<[u64; 3]>,
    /// Maximum over all window lengths, per letter.
    pub max: [u64; 3],
}

pub fn balance_profile(p: &WordPrefix, max_window: usize) -> Result<BalanceProfile> {
    if max_window == 0 || max_window > p.len() {
        return Err(Error::Domain(format!("window bound {max_window} must lie in 1..={}", p.len())));
    }
    let w = p.letters();
    let mut sums = vec![[0u32; 3]; w.len() + 1];
    for (i, &l) in w.iter().enumerate() {
        sums[i + 1] = sums[i];
        sums[i + 1][(l - 1) as usize] += 1;
    }
    let by_window: Vec<[u64; 3]> = (1..=max_window)
        .into_par_iter()
        .map(|n| {
            let mut lo = [u32::MAX; 3];
            let mut hi = [0u32; 3];
            for k in 0..=(w.len() - n) {
                for i in 0..3 {
                    let c = sums[k + n][i] - sums[k][i];
                    lo[i] = lo[i].min(c);
                    hi[i] = hi[i].max(c);
                }
            }
            std::array::from_fn(|i| (hi[i] - lo[i]) as u64)
        })
        .collect();
    let mut max = [0u64; 3];
    for row in &by_window {
        for i in 0..3 {
            max[i] = max[i].max(row[i]);
        }
    }
    Ok(BalanceProfile { by_window, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subst::regroup;

    fn d(s: &str) -> DirectiveWord {
        DirectiveWord::parse(s).unwrap()
    }

    #[test]
    fn golden_prefix_of_periodic_word() {
        let w = sadic_prefix(&d("(12)^w"), 40).unwrap();
        assert_eq!(w.to_string(), "1321213121321312132121321312132121312132");
    }

    #[test]
    fn golden_prefix_of_one_e_pi() {
        let x = crate::point::Point::parse("1,e,pi", 256).unwrap();
        let dir = crate::mcfa::delta_directive(&x, 400).unwrap();
        let w = sadic_prefix(&dir, 40).unwrap();
        assert_eq!(w.to_string(), "2323213232323132323213232321323231323232");
    }

    #[test]
    fn constant_tails() {
        assert_eq!(sadic_prefix(&d("(1)^w"), 6).unwrap().to_string(), "111111");
        assert_eq!(sadic_prefix(&d("(2)^w"), 5).unwrap().to_string(), "13333");
        // c2(1) = 2, so the limit is 2^ω
        assert_eq!(sadic_prefix(&d("2(1)^w"), 4).unwrap().to_string(), "2222");
        assert_eq!(sadic_prefix(&d("1(2)^w"), 5).unwrap().to_string(), "12222");
    }

    #[test]
    fn finite_prefix_may_be_insufficient() {
        assert!(matches!(sadic_prefix(&d("1212"), 100), Err(Error::InsufficientDirective(_))));
        assert!(sadic_prefix(&d("1212"), 0).is_err());
        assert_eq!(sadic_prefix(&d("12121212121212"), 10).unwrap().to_string(), "1321213121");
    }

    #[test]
    fn block_route_matches() {
        let dir = d("(112212)^w");
        let (blocks, _) = regroup(&dir.take(300)).unwrap();
        assert_eq!(sadic_prefix(&dir, 500).unwrap(), sadic_prefix_blocks(&blocks, 500).unwrap());
    }

    #[test]
    fn frequencies_and_factors() {
        let p = WordPrefix::parse("1321213121").unwrap();
        assert_eq!(letter_frequencies(&p).unwrap().0, [0.5, 0.3, 0.2]);
        assert_eq!(word_frequency(&p, &[1, 3]).unwrap(), 2.0 / 9.0);
        assert_eq!(word_frequency(&p, p.letters()).unwrap(), 1.0);
        assert_eq!(letter_frequencies(&WordPrefix::parse("111").unwrap()).unwrap().0, [1.0, 0.0, 0.0]);
        assert!(letter_frequencies(&WordPrefix::parse("").unwrap()).is_err());
    }

    #[test]
    fn balance_examples() {
        let alt = WordPrefix::new((0..200).map(|i| if i % 2 == 0 { 1 } else { 3 }).collect()).unwrap();
        assert_eq!(balance_profile(&alt, 50).unwrap().max, [1, 0, 1]);
        let p = WordPrefix::parse("111222").unwrap();
        assert_eq!(balance_profile(&p, 3).unwrap().by_window[2][0], 3);
        assert!(balance_profile(&p, 7).is_err());
    }
}
