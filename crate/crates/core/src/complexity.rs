//! Factor languages, extension tables, bispecial descendants and dendricity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use suffix::SuffixTable;

use crate::directive::DirectiveWord;
use crate::error::{Error, Result};
use crate::mcfa::{classify_directive, primitivity_scan, RationalDim};
use crate::subst::{check_word, regroup, word_to_string, Block};
use crate::words::{sadic_prefix, WordPrefix};

/// Bi-extension table: cell `(a, b)` is set when `a u b` is a factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtensionSet {
    /// Row `a - 1` holds a bitmask of right letters (`1 << (b - 1)`).
    rows: [u8; 3],
}

impl ExtensionSet {
    pub fn from_pairs(pairs: &[(u8, u8)]) -> Self {
        let mut e = Self::default();
        for &(a, b) in pairs {
            e.insert(a, b);
        }
        e
    }

    pub fn insert(&mut self, a: u8, b: u8) {
        self.rows[(a - 1) as usize] |= 1 << (b - 1);
    }

    pub fn contains(&self, a: u8, b: u8) -> bool {
        self.rows[(a - 1) as usize] & (1 << (b - 1)) != 0
    }

    pub fn pairs(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for a in 1..=3 {
            for b in 1..=3 {
                if self.contains(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows == [0; 3]
    }

    /// Left letters `E⁻`.
    pub fn left(&self) -> Vec<u8> {
        (1..=3).filter(|&a| self.rows[(a - 1) as usize] != 0).collect()
    }

    /// Right letters `E⁺`.
    pub fn right(&self) -> Vec<u8> {
        let any = self.rows[0] | self.rows[1] | self.rows[2];
        (1..=3).filter(|&b| any & (1 << (b - 1)) != 0).collect()
    }

    pub fn is_bispecial(&self) -> bool {
        self.left().len() > 1 && self.right().len() > 1
    }

    /// `#E - #E⁻ - #E⁺ + 1`.
    pub fn multiplicity(&self) -> i64 {
        self.len() as i64 - self.left().len() as i64 - self.right().len() as i64 + 1
    }

    /// Contained in one row plus one column that share a cell of the table.
    pub fn is_ordinary(&self) -> bool {
        self.pairs().into_iter().any(|(a, b)| self.pairs().iter().all(|&(x, y)| x == a || y == b))
    }

    /// The bipartite graph on `E⁻ ⊔ E⁺` with an edge per cell is a tree.
    pub fn is_dendric(&self) -> bool {
        let vertices = self.left().len() + self.right().len();
        if vertices == 0 || self.len() + 1 != vertices {
            return false;
        }
        // left letters are 0..3, right letters 3..6
        let mut parent: Vec<usize> = (0..6).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (a, b) in self.pairs() {
            let (x, y) = (find(&mut parent, (a - 1) as usize), find(&mut parent, (b + 2) as usize));
            if x == y {
                return false;
            }
            parent[x] = y;
        }
        true
    }

    /// Bit `3(a-1) + (b-1)` is set for each cell.
    pub fn mask(&self) -> u16 {
        (0..3).fold(0u16, |m, a| m | (u16::from(self.rows[a]) << (3 * a)))
    }

    pub fn from_mask(mask: u16) -> Self {
        Self { rows: std::array::from_fn(|a| ((mask >> (3 * a)) & 0b111) as u8) }
    }
}

impl fmt::Display for ExtensionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{{{}}}", cells.join(","))
    }
}

impl Serialize for ExtensionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u16(self.mask())
    }
}

/// Distinct factors of length `n`.
pub fn factor_set(p: &WordPrefix, n: usize) -> Result<BTreeSet<Vec<u8>>> {
    if n > p.len() {
        return Err(Error::Domain(format!("factor length {n} exceeds prefix length {}", p.len())));
    }
    if n == 0 {
        return Ok(BTreeSet::from([Vec::new()]));
    }
    Ok(p.letters().windows(n).map(<[u8]>::to_vec).collect())
}

/// Extension table of `u` from its occurrences with a letter on both sides.
pub fn extension_set_bruteforce(p: &WordPrefix, u: &[u8]) -> Result<ExtensionSet> {
    check_word(u)?;
    let w = p.letters();
    if u.len() + 2 > w.len() {
        return Err(Error::Domain(format!("factor length {} leaves no room for extensions in {} letters", u.len(), w.len())));
    }
    let mut e = ExtensionSet::default();
    for i in 1..(w.len() - u.len()) {
        if &w[i..i + u.len()] == u {
            e.insert(w[i - 1], w[i + u.len()]);
        }
    }
    if e.is_empty() {
        return Err(Error::NotAFactor(word_to_string(u)));
    }
    Ok(e)
}

/// Suffix array and LCP array of a word followed by a unique smallest terminator.
struct Language {
    text: Vec<u8>,
    sa: Vec<usize>,
    /// `lcp[i]` is the common prefix length of suffixes `sa[i-1]` and `sa[i]`.
    lcp: Vec<usize>,
}

impl Language {
    fn new(w: &[u8]) -> Self {
        let mut s = word_to_string(w);
        s.push('0');
        let table = SuffixTable::new(s.as_str());
        let sa: Vec<usize> = table.table().iter().map(|&i| i as usize).collect();
        let text: Vec<u8> = s.bytes().map(|c| c - b'0').collect();
        let lcp = kasai(&text, &sa);
        Self { text, sa, lcp }
    }

    /// Number of distinct factors of each length `0..=n_max` (terminator excluded).
    fn counts(&self, n_max: usize) -> Vec<u64> {
        let n = self.text.len();
        let mut diff = vec![0i64; n_max + 2];
        for i in 0..n {
            let len = n - 1 - self.sa[i];
            let lo = self.lcp[i] + 1;
            let hi = len.min(n_max);
            if lo <= hi {
                diff[lo] += 1;
                diff[hi + 1] -= 1;
            }
        }
        let mut out = vec![1u64; n_max + 1];
        let mut acc = 0i64;
        for (k, d) in diff.iter().enumerate().take(n_max + 1).skip(1) {
            acc += d;
            out[k] = acc as u64;
        }
        out
    }

    /// Extension tables of all right-branching factors of length `<= max_len`.
    ///
    /// Bottom-up traversal of the LCP intervals; a child interval contributes its
    /// left letters paired with the letter that follows the parent's factor.
    fn branching(&self, max_len: usize) -> BTreeMap<Vec<u8>, ExtensionSet> {
        struct Frame {
            lcp: usize,
            lb: usize,
            left: u8,
            ext: ExtensionSet,
            leaf: bool,
        }
        let text = &self.text;
        let sa = &self.sa;
        let n = text.len();
        let attach = |parent: &mut Frame, child: &Frame| {
            let b = text[sa[child.lb] + parent.lcp];
            if b != 0 {
                for a in 1..=3u8 {
                    if child.left & (1 << (a - 1)) != 0 {
                        parent.ext.insert(a, b);
                    }
                }
            }
            parent.left |= child.left;
        };
        let mut out = BTreeMap::new();
        let mut finish = |f: &Frame| {
            if !f.leaf && f.lcp <= max_len && !f.ext.is_empty() {
                let start = sa[f.lb];
                out.insert(text[start..start + f.lcp].to_vec(), f.ext);
            }
        };
        let mut stack = vec![Frame { lcp: 0, lb: 0, left: 0, ext: ExtensionSet::default(), leaf: false }];
        let close = |stack: &mut Vec<Frame>, h: usize, finish: &mut dyn FnMut(&Frame)| {
            while stack.last().expect("root stays").lcp > h {
                let f = stack.pop().expect("non-empty");
                finish(&f);
                let top = stack.last_mut().expect("root stays");
                if top.lcp >= h {
                    attach(top, &f);
                } else {
                    let mut g = Frame { lcp: h, lb: f.lb, left: 0, ext: ExtensionSet::default(), leaf: false };
                    attach(&mut g, &f);
                    stack.push(g);
                }
            }
        };
        for i in 0..n {
            close(&mut stack, self.lcp[i], &mut finish);
            let p = sa[i];
            let left = if p >= 1 { 1 << (text[p - 1] - 1) } else { 0 };
            stack.push(Frame { lcp: n - p, lb: i, left, ext: ExtensionSet::default(), leaf: true });
        }
        close(&mut stack, 0, &mut finish);
        let root = stack.pop().expect("root");
        finish(&root);
        out
    }
}

fn kasai(text: &[u8], sa: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut rank = vec![0usize; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p] = r;
    }
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for p in 0..n {
        if rank[p] > 0 {
            let q = sa[rank[p] - 1];
            while p + h < n && q + h < n && text[p + h] == text[q + h] {
                h += 1;
            }
            lcp[rank[p]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// `p(0..=n_max)`, accepted only if the first half of the prefix already shows every factor.
pub fn complexity_profile(p: &WordPrefix, n_max: usize) -> Result<Vec<u64>> {
    if n_max > p.len() / 2 {
        return Err(Error::InsufficientPrefix { n: p.len() / 2 + 1 });
    }
    let full = Language::new(p.letters()).counts(n_max);
    let half = Language::new(&p.letters()[..p.len() / 2]).counts(n_max);
    match (0..=n_max).find(|&n| full[n] != half[n]) {
        Some(n) => Err(Error::InsufficientPrefix { n }),
        None => Ok(full),
    }
}

/// Bispecial factors of length `<= max_len` with their extension tables.
pub fn bispecials_bruteforce(p: &WordPrefix, max_len: usize) -> BTreeMap<Vec<u8>, ExtensionSet> {
    Language::new(p.letters()).branching(max_len).into_iter().filter(|(_, e)| e.is_bispecial()).collect()
}

/// Largest prefix length tried when growing a word for brute-force extraction.
const MAX_PREFIX: usize = 1 << 24;

/// A prefix of the limit word whose length-`<= max_len + 1` language and bispecial tables
/// agree with those of the prefix twice as long.
pub fn stable_prefix(w: &DirectiveWord, max_len: usize) -> Result<(WordPrefix, BTreeMap<Vec<u8>, ExtensionSet>)> {
    let mut len = (32 * (max_len + 2)).max(1024);
    let mut word = sadic_prefix(w, 2 * len)?;
    loop {
        let small = word.truncated(len);
        let a = Language::new(small.letters());
        let b = Language::new(word.letters());
        let (ca, cb) = (a.counts(max_len + 1), b.counts(max_len + 1));
        let ba: BTreeMap<_, _> = a.branching(max_len).into_iter().filter(|(_, e)| e.is_bispecial()).collect();
        let bb: BTreeMap<_, _> = b.branching(max_len).into_iter().filter(|(_, e)| e.is_bispecial()).collect();
        if ca == cb && ba == bb {
            return Ok((small, ba));
        }
        if 2 * len >= MAX_PREFIX {
            let n = (0..=max_len + 1).find(|&n| ca[n] != cb[n]).unwrap_or(max_len);
            return Err(Error::InsufficientPrefix { n });
        }
        len *= 2;
        word = sadic_prefix(w, 2 * len)?;
    }
}

/// Letter on the proper side of a strongly proper block and which side it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Proper {
    Left(u8),
    Right(u8),
}

fn proper(b: Block) -> Proper {
    match b {
        Block::C11 => Proper::Left(1),
        Block::C22 => Proper::Right(3),
        Block::C122 => Proper::Right(2),
        Block::C211 => Proper::Left(2),
        Block::C121 => Proper::Left(1),
        Block::C212 => Proper::Right(3),
    }
}

/// Extension table of the empty word in a word whose first block is `b`.
pub fn empty_word_extensions(b: Block) -> ExtensionSet {
    let cells: &[(u8, u8)] = match b {
        Block::C11 => &[(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)],
        Block::C22 => &[(1, 3), (2, 3), (3, 1), (3, 2), (3, 3)],
        Block::C122 => &[(1, 2), (1, 3), (2, 1), (2, 2), (3, 2)],
        Block::C211 => &[(1, 3), (2, 1), (2, 2), (2, 3), (3, 2)],
        Block::C121 => &[(1, 2), (1, 3), (2, 1), (3, 1), (3, 2)],
        Block::C212 => &[(1, 3), (2, 1), (2, 3), (3, 1), (3, 2)],
    };
    ExtensionSet::from_pairs(cells)
}

/// The admissible `(s, p)` with `u = s σ(v) p` for a bispecial `u` with antecedent `v`.
pub fn antecedent_shape(b: Block) -> Vec<(Vec<u8>, Vec<u8>)> {
    let pairs: &[(&[u8], &[u8])] = match b {
        Block::C11 => &[(&[], &[1])],
        Block::C22 => &[(&[3], &[])],
        Block::C122 => &[(&[2], &[1]), (&[2], &[])],
        Block::C211 => &[(&[3], &[2]), (&[], &[2])],
        Block::C121 => &[(&[2], &[1]), (&[2], &[1, 3]), (&[], &[1]), (&[], &[1, 3])],
        Block::C212 => &[(&[3], &[2]), (&[3], &[]), (&[1, 3], &[2]), (&[1, 3], &[])],
    };
    pairs.iter().map(|(s, p)| (s.to_vec(), p.to_vec())).collect()
}

/// Extension table of `s σ(v) p` computed from the table of `v`.
///
/// Each extension `(a, b)` of `v` is relabelled by the images of `a` and `b`
/// (padded by the block's proper letter), trimmed by `s` and `p`, and reduced
/// to the letters adjacent to `u`.
pub fn extended_image_extension(e_v: &ExtensionSet, b: Block, s: &[u8], p: &[u8]) -> Result<ExtensionSet> {
    if !antecedent_shape(b).iter().any(|(x, y)| x == s && y == p) {
        return Err(Error::Domain(format!(
            "({}, {}) is not an admissible decoration for {b}",
            word_to_string(s),
            word_to_string(p)
        )));
    }
    let sub = b.substitution();
    let label = |a: u8, left: bool| -> Vec<u8> {
        let im = sub.image(a).to_vec();
        match (proper(b), left) {
            (Proper::Right(l), true) => std::iter::once(l).chain(im).collect(),
            (Proper::Left(l), false) => im.into_iter().chain(std::iter::once(l)).collect(),
            _ => im,
        }
    };
    let mut out = ExtensionSet::default();
    for (a, c) in e_v.pairs() {
        let ll = label(a, true);
        let rl = label(c, false);
        if ll.len() <= s.len() || !ll.ends_with(s) || rl.len() <= p.len() || !rl.starts_with(p) {
            continue;
        }
        out.insert(ll[ll.len() - s.len() - 1], rl[p.len()]);
    }
    Ok(out)
}

/// How a bispecial factor arises from the next level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decoration {
    pub s: String,
    pub block: Block,
    pub p: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BispecialRecord {
    pub word: String,
    pub extensions: ExtensionSet,
    pub antecedent: Option<String>,
    pub decoration: Option<Decoration>,
    pub ordinary: bool,
    pub dendric: bool,
}

fn record(word: &[u8], ext: ExtensionSet, parent: Option<(&[u8], Decoration)>) -> BispecialRecord {
    BispecialRecord {
        word: word_to_string(word),
        extensions: ext,
        antecedent: parent.as_ref().map(|(v, _)| word_to_string(v)),
        decoration: parent.map(|(_, d)| d),
        ordinary: ext.is_ordinary(),
        dendric: ext.is_dendric(),
    }
}

/// Number of leading blocks after which every further descendant of the empty word is longer than `max_len`.
pub fn descent_depth(blocks: &[Block], max_len: usize) -> Option<usize> {
    let mut lens: [u64; 3] = [1, 1, 1];
    for (m, b) in blocks.iter().enumerate() {
        if lens.iter().all(|&l| l > max_len as u64) {
            return Some(m + 1);
        }
        let sub = b.substitution();
        lens = sub.images().clone().map(|im| im.iter().fold(0u64, |acc, &c| acc.saturating_add(lens[(c - 1) as usize])));
    }
    lens.iter().all(|&l| l > max_len as u64).then_some(blocks.len() + 1).filter(|&d| d <= blocks.len())
}

/// Bispecial descendants of the empty word through `blocks[..depth]`, found symbolically.
///
/// Level `n` holds the bispecial factors of the word directed by `blocks[n..]`:
/// the empty word with its table from `blocks[n]`, and the admissible extended
/// images of the level `n + 1` factors. Records of length `<= max_len` are
/// returned sorted by length, then lexicographically.
pub fn descend_bispecials(blocks: &[Block], depth: usize, max_len: usize) -> Result<Vec<BispecialRecord>> {
    if depth > blocks.len() {
        return Err(Error::InsufficientDirective(format!("{depth} levels requested, {} blocks given", blocks.len())));
    }
    let mut cur: Vec<(Vec<u8>, BispecialRecord)> = Vec::new();
    for n in (0..depth).rev() {
        let b = blocks[n];
        let sub = b.substitution();
        let mut next = vec![(Vec::new(), record(&[], empty_word_extensions(b), None))];
        for (v, rec) in &cur {
            let image = sub.apply(v)?;
            for (s, p) in antecedent_shape(b) {
                let len = s.len() + image.len() + p.len();
                if len > max_len {
                    continue;
                }
                let e = extended_image_extension(&rec.extensions, b, &s, &p)?;
                if !e.is_bispecial() {
                    continue;
                }
                let u: Vec<u8> = s.iter().chain(&image).chain(&p).copied().collect();
                let deco = Decoration { s: word_to_string(&s), block: b, p: word_to_string(&p) };
                next.push((u.clone(), record(&u, e, Some((v, deco)))));
            }
        }
        cur = next;
    }
    let mut out: Vec<BispecialRecord> = cur.into_iter().map(|(_, r)| r).collect();
    out.sort_by(|x, y| (x.word.len(), &x.word).cmp(&(y.word.len(), &y.word)));
    Ok(out)
}

/// `p(0..=n_max)` from the bispecial tables, starting from `p(1) = 3`.
pub fn complexity_from_bispecials(records: &[BispecialRecord], n_max: usize) -> Vec<u64> {
    let mut mult = vec![0i64; n_max + 1];
    for r in records {
        if r.word.len() <= n_max {
            mult[r.word.len()] += r.extensions.multiplicity();
        }
    }
    let mut p = vec![1u64; n_max + 1];
    if n_max >= 1 {
        p[1] = 3;
    }
    let mut s = 2i64;
    for n in 1..n_max {
        s += mult[n];
        p[n + 1] = (p[n] as i64 + s) as u64;
    }
    p
}

/// Bispecial factors up to `max_len` of the word directed by `w`, via the block regrouping
/// and symbolic descent; returns the number of levels used as well.
pub fn symbolic_bispecials(w: &DirectiveWord, max_len: usize) -> Result<(usize, Vec<BispecialRecord>)> {
    let letters = match w {
        DirectiveWord::Prefix(l) => l.clone(),
        DirectiveWord::Periodic { .. } => w.take(4 * (max_len + 64)),
    };
    let (blocks, _) = regroup(&letters)?;
    let depth = descent_depth(&blocks, max_len)
        .ok_or_else(|| Error::InsufficientDirective(format!("{} blocks do not reach length {max_len}", blocks.len())))?;
    Ok((depth, descend_bispecials(&blocks, depth, max_len)?))
}

/// `p(0..=n_max)` for the word directed by `w`, growing the prefix until counts are stable.
pub fn directive_complexity(w: &DirectiveWord, n_max: usize) -> Result<Vec<u64>> {
    let mut len = (64 * (n_max + 1)).max(1024);
    loop {
        let p = sadic_prefix(w, len)?;
        match complexity_profile(&p, n_max) {
            Err(Error::InsufficientPrefix { .. }) if len < MAX_PREFIX => len *= 2,
            other => return other,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DendricReport {
    pub max_len: usize,
    pub prefix_len: usize,
    /// Levels used by the symbolic route; `None` when it was skipped.
    pub depth: Option<usize>,
    pub bispecial_count: usize,
    pub routes_agree: Option<bool>,
    pub all_dendric: bool,
    /// `p(0..=max_len)` from the brute-force route.
    pub complexity: Vec<u64>,
    pub is_2n_plus_1: bool,
    /// `k` with `p(n) = n + k` over the upper half of the range, if constant there.
    pub eventual_offset: Option<i64>,
    pub primitive: bool,
}

fn eventual_offset(p: &[u64]) -> Option<i64> {
    let start = p.len() / 2;
    let ks: BTreeSet<i64> = (start..p.len()).map(|n| p[n] as i64 - n as i64).collect();
    (ks.len() == 1).then(|| *ks.iter().next().expect("one value"))
}

fn is_primitive(w: &DirectiveWord) -> Result<bool> {
    match w {
        DirectiveWord::Periodic { .. } => Ok(classify_directive(w)? == RationalDim::Three),
        DirectiveWord::Prefix(l) => Ok(primitivity_scan(l)?.positive_window_found),
    }
}

/// Checks that every bispecial factor up to `max_len` has a tree extension graph,
/// comparing brute-force tables against the symbolic descent.
///
/// Non-primitive directives skip the symbolic route and report the complexity only.
pub fn verify_dendric(w: &DirectiveWord, max_len: usize) -> Result<DendricReport> {
    let primitive = is_primitive(w)?;
    let (prefix, brute) = stable_prefix(w, max_len)?;
    let complexity = Language::new(prefix.letters()).counts(max_len);
    let all_dendric = brute.values().all(ExtensionSet::is_dendric);
    let is_2n_plus_1 = complexity.iter().enumerate().all(|(n, &c)| c == 2 * n as u64 + 1);
    let mut report = DendricReport {
        max_len,
        prefix_len: prefix.len(),
        depth: None,
        bispecial_count: brute.len(),
        routes_agree: None,
        all_dendric,
        eventual_offset: eventual_offset(&complexity),
        complexity,
        is_2n_plus_1,
        primitive,
    };
    if !primitive {
        return Ok(report);
    }
    let (depth, records) = symbolic_bispecials(w, max_len)?;
    let symbolic: BTreeMap<String, ExtensionSet> = records.iter().map(|r| (r.word.clone(), r.extensions)).collect();
    let brute_s: BTreeMap<String, ExtensionSet> = brute.iter().map(|(k, v)| (word_to_string(k), *v)).collect();
    if symbolic != brute_s {
        let diff = brute_s
            .iter()
            .find(|(k, v)| symbolic.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .or_else(|| symbolic.keys().find(|k| !brute_s.contains_key(*k)).cloned())
            .unwrap_or_default();
        return Err(Error::Inconsistency(format!("bispecial tables differ first at {diff:?}")));
    }
    let via_bispecials = complexity_from_bispecials(&records, max_len);
    if via_bispecials != report.complexity {
        return Err(Error::Inconsistency("complexity from bispecials differs from factor counts".into()));
    }
    report.depth = Some(depth);
    report.routes_agree = Some(true);
    report.all_dendric = records.iter().all(|r| r.dendric);
    Ok(report)
}
