//! Free bases, freely reduced words and cyclic words.
//!
//! Words are written over single ASCII letters: `a`..`z` are the basis
//! elements, uppercase letters their inverses (`"bA"` is `b a^-1`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A free basis `{a_1, ..., a_k}` named by the first `k` lowercase letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    rank: usize,
}

impl Basis {
    pub const MAX_RANK: usize = 26;

    pub fn new(rank: usize) -> Result<Self> {
        if !(2..=Self::MAX_RANK).contains(&rank) {
            return Err(Error::InvalidRank(rank));
        }
        Ok(Basis { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The positive letters `a_1, ..., a_k`.
    pub fn generators(&self) -> impl Iterator<Item = Letter> {
        (1..=self.rank as i8).map(Letter)
    }

    /// All `2k` letters of `A^{±1}` in the canonical order `a < A < b < B < ...`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        self.generators().flat_map(|g| [g, g.inverse()])
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() <= self.rank
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::LetterOutOfBasis {
                letter: letter.to_char(),
                rank: self.rank,
            })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        word.letters().iter().try_for_each(|&l| self.check_letter(l))
    }

    pub fn ensure_rank(&self, needed: usize) -> Result<()> {
        if self.rank < needed {
            Err(Error::RankTooSmall {
                needed,
                got: self.rank,
            })
        } else {
            Ok(())
        }
    }

    /// Every freely reduced word of exactly `len` letters, in lexicographic order.
    pub fn reduced_words(&self, len: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * (2 * self.rank - 1));
            for prefix in &out {
                for l in self.letters() {
                    if prefix.last().is_some_and(|&p: &Letter| p == l.inverse()) {
                        continue;
                    }
                    let mut w = prefix.clone();
                    w.push(l);
                    next.push(w);
                }
            }
            out = next;
        }
        out.into_iter().map(Word).collect()
    }

    /// One representative per conjugacy class of non-proper-power elements with
    /// cyclic length in `1..=max_len`, taken up to inversion (the class of `w`
    /// and of `w^-1` share a representative, the smaller of the two).
    pub fn power_free_classes(&self, max_len: usize) -> Vec<CyclicWord> {
        let mut seen = std::collections::BTreeSet::new();
        for len in 1..=max_len {
            for w in self.reduced_words(len) {
                if w.first().inverse() == w.last() {
                    continue;
                }
                let c = CyclicWord::from_cyclically_reduced(w.0);
                if c.period() != c.len() {
                    continue;
                }
                let inv = c.inverse();
                seen.insert(std::cmp::min(c, inv));
            }
        }
        seen.into_iter().collect()
    }
}

/// A letter of `A^{±1}`: a nonzero signed generator index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i8);

impl Letter {
    /// The generator `a_index` (1-based).
    pub fn generator(index: usize) -> Self {
        assert!((1..=Basis::MAX_RANK).contains(&index), "generator index {index}");
        Letter(index as i8)
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Letter((c as u8 - b'a' + 1) as i8)),
            'A'..='Z' => Some(Letter(-((c as u8 - b'A' + 1) as i8))),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.0 > 0 { b'a' } else { b'A' };
        (base + self.0.unsigned_abs() - 1) as char
    }

    /// 1-based generator index.
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// The positive letter with the same index.
    pub fn positive(self) -> Self {
        Letter(self.0.abs())
    }

    fn rank_key(self) -> u8 {
        2 * (self.0.unsigned_abs() - 1) + u8::from(self.0 < 0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_key().cmp(&other.rank_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Appends `l` to a freely reduced buffer, cancelling against its last letter.
fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last().is_some_and(|&p| p == l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// Freely reduces an arbitrary letter sequence.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut buf = Vec::new();
    for l in raw {
        push_reduced(&mut buf, l);
    }
    Word(buf)
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Parses a word literal; whitespace is ignored and the result is freely reduced.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        for (pos, c) in s.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            match Letter::from_char(c) {
                Some(l) => letters.push(l),
                None => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("unexpected character `{c}` in word"),
                    })
                }
            }
        }
        Ok(free_reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    fn first(&self) -> Letter {
        self.0[0]
    }

    fn last(&self) -> Letter {
        self.0[self.0.len() - 1]
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut buf = self.0.clone();
        buf.reserve(other.len());
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Word::identity(), |acc, _| acc.concat(&base))
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    /// Splits `self = conjugator · core · conjugator^-1` with `core` cyclically
    /// reduced, then rotates `core` into canonical position (absorbing the
    /// rotation into the conjugator).
    pub fn cyclic_reduce(&self) -> Result<(CyclicWord, Word)> {
        if self.is_identity() {
            return Err(Error::IdentityElement);
        }
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == self.0[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let core = &self.0[lo..hi];
        let shift = least_rotation(core);
        let mut conj = self.0[..lo].to_vec();
        for &l in &core[..shift] {
            push_reduced(&mut conj, l);
        }
        let mut rotated = core[shift..].to_vec();
        rotated.extend_from_slice(&core[..shift]);
        Ok((CyclicWord(rotated), Word(conj)))
    }

    /// Cyclic length `||g||_A`: the length of the cyclically reduced form.
    pub fn cyclic_len(&self) -> usize {
        self.cyclic_reduce().map(|(c, _)| c.len()).unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "Word(1)")
        } else {
            write!(f, "Word({self})")
        }
    }
}

impl std::str::FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

/// Start index of the lexicographically least rotation (two-pointer scan).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0, 1, 0);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        match a.cmp(&b) {
            Ordering::Equal => {
                k += 1;
                continue;
            }
            Ordering::Greater => i += k + 1,
            Ordering::Less => j += k + 1,
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A cyclically reduced word read around a circle, stored in its least
/// rotation so that equality is equality of conjugacy classes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Canonicalises an already cyclically reduced, nonempty letter sequence.
    pub(crate) fn from_cyclically_reduced(mut letters: Vec<Letter>) -> Self {
        debug_assert!(!letters.is_empty());
        let shift = least_rotation(&letters);
        letters.rotate_left(shift);
        CyclicWord(letters)
    }

    /// The conjugacy class of `w`.
    pub fn of(w: &Word) -> Result<Self> {
        w.cyclic_reduce().map(|(c, _)| c)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::of(&Word::parse(s)?)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Number of vertices on the circle, `||w||_A`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The canonical linear representative.
    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn inverse(&self) -> Self {
        Self::from_cyclically_reduced(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Smallest `p` dividing the length with the word invariant under rotation by `p`.
    pub fn period(&self) -> usize {
        let n = self.0.len();
        let mut fail = vec![0usize; n];
        for i in 1..n {
            let mut k = fail[i - 1];
            while k > 0 && self.0[i] != self.0[k] {
                k = fail[k - 1];
            }
            if self.0[i] == self.0[k] {
                k += 1;
            }
            fail[i] = k;
        }
        let p = n - fail[n - 1];
        if n.is_multiple_of(p) {
            p
        } else {
            n
        }
    }

    /// `(root, m)` with `self = root^m` and `root` not a proper power.
    pub fn root(&self) -> (CyclicWord, usize) {
        let p = self.period();
        (CyclicWord(self.0[..p].to_vec()), self.0.len() / p)
    }

    pub fn pow(&self, m: usize) -> Self {
        assert!(m >= 1);
        CyclicWord(self.0.repeat(m))
    }

    /// Number of vertices from which `x` can be read clockwise. Reading may
    /// wrap around the circle more than once when `|x|` exceeds the length.
    pub fn count_forward(&self, x: &[Letter]) -> usize {
        let n = self.0.len();
        (0..n)
            .filter(|&start| x.iter().enumerate().all(|(j, &l)| self.0[(start + j) % n] == l))
            .count()
    }

    /// `(v; w)_A`: occurrences of `v` and of `v^-1`.
    pub fn occurrences(&self, v: &Word) -> usize {
        if v.is_identity() {
            return 0;
        }
        self.count_forward(v.letters()) + self.count_forward(v.inverse().letters())
    }

    /// Forward counts of every word of length `1..=max_len` read from some vertex.
    pub fn forward_profile(&self, max_len: usize) -> HashMap<Word, usize> {
        let n = self.0.len();
        let mut out = HashMap::new();
        for start in 0..n {
            let mut buf = Vec::with_capacity(max_len);
            for j in 0..max_len {
                buf.push(self.0[(start + j) % n]);
                *out.entry(Word(buf.clone())).or_insert(0) += 1;
            }
        }
        out
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// `(v; w)_A` as a free function.
pub fn occurrences(v: &Word, w: &CyclicWord) -> usize {
    w.occurrences(v)
}
