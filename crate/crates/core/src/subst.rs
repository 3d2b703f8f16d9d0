//! Substitutions over `{1, 2, 3}` and the regrouped block alphabet.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear::IntMatrix3;

/// A non-erasing morphism of `{1,2,3}^*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    images: [Vec<u8>; 3],
    name: Option<String>,
}

pub(crate) fn check_word(w: &[u8]) -> Result<()> {
    match w.iter().find(|&&l| !(1..=3).contains(&l)) {
        Some(l) => Err(Error::Domain(format!("letter {l} is outside the alphabet {{1,2,3}}"))),
        None => Ok(()),
    }
}

/// Digits `'1'..='3'` to letters.
pub fn parse_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '1'..='3' => Ok(c as u8 - b'0'),
            _ => Err(Error::Parse(format!("unexpected {c:?} in word {s:?}"))),
        })
        .collect()
}

pub fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|&l| char::from(b'0' + l)).collect()
}

/// Names accepted by [`Substitution::builtin`].
pub const BUILTIN_NAMES: [&str; 12] = ["c1", "c2", "c11", "c22", "c122", "c211", "c121", "c212", "s1", "s2", "zl", "zr"];

impl Substitution {
    pub fn new(images: [Vec<u8>; 3]) -> Result<Self> {
        for im in &images {
            if im.is_empty() {
                return Err(Error::Domain("substitution images must be non-empty".into()));
            }
            check_word(im)?;
        }
        Ok(Self { images, name: None })
    }

    pub fn from_strs(images: [&str; 3]) -> Result<Self> {
        Self::new([parse_word(images[0])?, parse_word(images[1])?, parse_word(images[2])?])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn identity() -> Self {
        Self { images: [vec![1], vec![2], vec![3]], name: Some("id".into()) }
    }

    /// Image of letter `a` in `1..=3`.
    pub fn image(&self, a: u8) -> &[u8] {
        &self.images[(a - 1) as usize]
    }

    pub fn images(&self) -> &[Vec<u8>; 3] {
        &self.images
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let im: [&str; 3] = match name {
            "c1" => ["1", "13", "2"],
            "c2" => ["2", "13", "3"],
            "c11" => ["1", "12", "13"],
            "c22" => ["13", "23", "3"],
            "c122" => ["12", "132", "2"],
            "c211" => ["2", "213", "23"],
            "c121" => ["13", "132", "12"],
            "c212" => ["23", "213", "13"],
            "s1" => ["2", "1", "31"],
            "s2" => ["3", "12", "1"],
            "zl" => ["12", "123", "13"],
            "zr" => ["21", "231", "31"],
            _ => return Err(Error::UnknownName(name.to_string())),
        };
        Ok(Self::from_strs(im)?.with_name(name))
    }

    pub fn apply(&self, w: &[u8]) -> Result<Vec<u8>> {
        check_word(w)?;
        Ok(w.iter().flat_map(|&a| self.image(a).iter().copied()).collect())
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &Substitution) -> Substitution {
        let images = inner.images.clone().map(|im| self.apply(&im).expect("images are valid words"));
        Substitution { images, name: None }
    }

    /// `σ_0 ∘ σ_1 ∘ ... ∘ σ_{n-1}`; the identity for an empty list.
    pub fn compose(list: &[Substitution]) -> Substitution {
        list.iter().rev().fold(Substitution::identity(), |acc, s| s.after(&acc))
    }

    /// Entry `(a, b)` counts the letter `a` in the image of `b`.
    pub fn incidence(&self) -> IntMatrix3 {
        let mut rows = [[0i64; 3]; 3];
        for (b, im) in self.images.iter().enumerate() {
            for &a in im {
                rows[(a - 1) as usize][b] += 1;
            }
        }
        IntMatrix3::from_rows(rows)
    }

    /// First letter of each image.
    pub fn first_letters(&self) -> [u8; 3] {
        self.images.clone().map(|im| im[0])
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, im) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", i + 1, word_to_string(im))?;
        }
        Ok(())
    }
}

/// The six regrouped blocks used for the factor-complexity analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    #[serde(rename = "c11")]
    C11,
    #[serde(rename = "c22")]
    C22,
    #[serde(rename = "c122")]
    C122,
    #[serde(rename = "c211")]
    C211,
    #[serde(rename = "c121")]
    C121,
    #[serde(rename = "c212")]
    C212,
}

impl Block {
    pub const ALL: [Block; 6] = [Block::C11, Block::C22, Block::C122, Block::C211, Block::C121, Block::C212];

    pub fn name(self) -> &'static str {
        match self {
            Block::C11 => "c11",
            Block::C22 => "c22",
            Block::C122 => "c122",
            Block::C211 => "c211",
            Block::C121 => "c121",
            Block::C212 => "c212",
        }
    }

    /// The `{1,2}` directive letters the block stands for.
    pub fn letters(self) -> &'static [u8] {
        match self {
            Block::C11 => &[1, 1],
            Block::C22 => &[2, 2],
            Block::C122 => &[1, 2, 2],
            Block::C211 => &[2, 1, 1],
            Block::C121 => &[1, 2, 1],
            Block::C212 => &[2, 1, 2],
        }
    }

    pub fn substitution(self) -> Substitution {
        Substitution::builtin(self.name()).expect("block names are builtins")
    }

    fn from_letters(w: &[u8]) -> Option<Block> {
        Block::ALL.into_iter().find(|b| b.letters() == w)
    }
}

impl FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Block::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cuts a `{1,2}` word into blocks, left to right: a repeated letter gives
/// `11`/`22`, otherwise the next three letters form one of `121, 122, 211, 212`.
///
/// Returns the blocks and how many letters they cover; at most two trailing
/// letters remain uncovered.
pub fn regroup(w: &[u8]) -> Result<(Vec<Block>, usize)> {
    if w.iter().any(|&l| l != 1 && l != 2) {
        return Err(Error::Domain("directive letters must be 1 or 2".into()));
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < w.len() {
        let len = if w[i] == w[i + 1] { 2 } else { 3 };
        if i + len > w.len() {
            break;
        }
        out.push(Block::from_letters(&w[i..i + len]).expect("every such block is in the list"));
        i += len;
    }
    Ok((out, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(im: [&str; 3]) -> Substitution {
        Substitution::from_strs(im).unwrap()
    }

    fn b(name: &str) -> Substitution {
        Substitution::builtin(name).unwrap()
    }

    #[test]
    fn compositions_from_examples() {
        let c12 = Substitution::compose(&[b("c1"), b("c2")]);
        assert_eq!(c12.images(), sub(["13", "12", "2"]).images());
        assert_eq!(c12.apply(&[1]).unwrap(), vec![1, 3]);
        let long = Substitution::compose(&[b("c2"), b("c1"), b("c2"), b("c1"), b("c1")]);
        assert_eq!(long.images(), sub(["23", "23213", "2313"]).images());
        assert_eq!(Substitution::compose(&[]).images(), Substitution::identity().images());
        assert_eq!(Substitution::identity().apply(&[3, 1, 2]).unwrap(), vec![3, 1, 2]);
    }

    #[test]
    fn builtins() {
        assert_eq!(b("c121").images(), sub(["13", "132", "12"]).images());
        assert_eq!(b("s1").images(), sub(["2", "1", "31"]).images());
        assert_eq!(b("zr").images(), sub(["21", "231", "31"]).images());
        assert!(matches!(Substitution::builtin("c3"), Err(Error::UnknownName(_))));
        assert_eq!(b("c1").incidence(), IntMatrix3::c1());
        assert_eq!(b("c2").incidence(), IntMatrix3::c2());
        for blk in Block::ALL {
            let cs: Vec<Substitution> = blk.letters().iter().map(|&l| b(&format!("c{l}"))).collect();
            assert_eq!(Substitution::compose(&cs).images(), blk.substitution().images(), "{blk}");
        }
    }

    #[test]
    fn conjugacy_identities() {
        let lhs = b("s1").after(&b("zl"));
        assert_eq!(lhs.images(), b("zr").after(&b("c1")).images());
        assert_eq!(lhs.images(), sub(["21", "2131", "231"]).images());
        let lhs = b("s2").after(&b("zr"));
        assert_eq!(lhs.images(), b("zl").after(&b("c2")).images());
        assert_eq!(lhs.images(), sub(["123", "1213", "13"]).images());
        let rho = sub(["1", "3", "2"]);
        assert_eq!(b("zl").images(), rho.after(&b("c121")).images());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Substitution::from_strs(["1", "", "2"]).is_err());
        assert!(b("c1").apply(&[4]).is_err());
        assert!(parse_word("14").is_err());
    }

    #[test]
    fn regrouping() {
        let (blocks, used) = regroup(&[1, 2, 1, 1, 2, 2, 2, 1, 2, 1]).unwrap();
        assert_eq!(blocks, vec![Block::C121, Block::C122, Block::C212]);
        assert_eq!(used, 9);
        let (blocks, used) = regroup(&[1, 1, 2, 2, 1, 1, 2, 2]).unwrap();
        assert_eq!(blocks, vec![Block::C11, Block::C22, Block::C11, Block::C22]);
        assert_eq!(used, 8);
    }
}
