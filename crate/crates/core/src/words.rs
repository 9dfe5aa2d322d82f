//! Letters, reduced words and cyclic words over a free group of finite rank.
//!
//! Generators are numbered from 1. In text, `a` is generator 1, `b` is 2 and
//! so on up to `z`; an uppercase letter denotes the inverse generator.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("generator {generator} at position {pos} exceeds rank {rank}")]
    GeneratorOutOfRank { generator: u32, rank: u32, pos: usize },
    #[error("word reduces to the identity")]
    Identity,
    #[error("rank must be at least 1")]
    ZeroRank,
}

/// A generator or inverse generator.
///
/// Ordered by generator index first, then positive before inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i32", try_from = "i32")]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    /// Builds a letter from a signed generator index (`-2` is `b^-1`).
    pub fn from_signed(v: i32) -> Letter {
        assert!(v != 0, "zero is not a letter");
        Letter(v)
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i32 {
        self.0.signum()
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    fn key(self) -> (u32, bool) {
        (self.generator(), self.is_inverse())
    }

    /// Name of the generator in text form, `a`..`z`, or `x27` beyond that.
    pub fn generator_name(generator: u32) -> String {
        if (1..=26).contains(&generator) {
            ((b'a' + (generator - 1) as u8) as char).to_string()
        } else {
            format!("x{generator}")
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Letter> for i32 {
    fn from(l: Letter) -> i32 {
        l.0
    }
}

impl TryFrom<i32> for Letter {
    type Error = String;
    fn try_from(v: i32) -> Result<Self, Self::Error> {
        if v == 0 {
            Err("zero is not a letter".into())
        } else {
            Ok(Letter(v))
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = Letter::generator_name(self.generator());
        if self.is_inverse() {
            write!(f, "{name}^-1")
        } else {
            write!(f, "{name}")
        }
    }
}

/// Writes letters grouped into powers, e.g. `a^2 b^-1 a`.
fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    let mut i = 0;
    let mut first = true;
    while i < letters.len() {
        let mut j = i + 1;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        let exp = (j - i) as i64 * letters[i].sign() as i64;
        if !first {
            write!(f, " ")?;
        }
        first = false;
        let name = Letter::generator_name(letters[i].generator());
        if exp == 1 {
            write!(f, "{name}")?;
        } else {
            write!(f, "{name}^{exp}")?;
        }
        i = j;
    }
    Ok(())
}

/// A finite sequence of letters in the free group of the given rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    rank: u32,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(rank: u32, letters: Vec<Letter>) -> Result<Word, WordError> {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        if let Some((pos, l)) = letters.iter().enumerate().find(|(_, l)| l.generator() > rank) {
            return Err(WordError::GeneratorOutOfRank { generator: l.generator(), rank, pos });
        }
        Ok(Word { rank, letters })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { rank: self.rank, letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Free reduction: cancels adjacent inverse pairs.
    pub fn reduced(&self) -> Word {
        Word { rank: self.rank, letters: free_reduce(&self.letters) }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inverse())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

pub(crate) fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Index of the lexicographically least rotation.
pub(crate) fn least_rotation(letters: &[Letter]) -> usize {
    let n = letters.len();
    let mut best = 0;
    for start in 1..n {
        for k in 0..n {
            let a = letters[(start + k) % n];
            let b = letters[(best + k) % n];
            match a.cmp(&b) {
                Ordering::Less => {
                    best = start;
                    break;
                }
                Ordering::Greater => break,
                Ordering::Equal => {}
            }
        }
    }
    best
}

/// A nonempty cyclically reduced word stored in its least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "CyclicWordRepr", into = "CyclicWordRepr")]
pub struct CyclicWord {
    rank: u32,
    letters: Vec<Letter>,
}

#[derive(Serialize, Deserialize)]
struct CyclicWordRepr {
    rank: u32,
    word: String,
}

impl TryFrom<CyclicWordRepr> for CyclicWord {
    type Error = WordError;
    fn try_from(r: CyclicWordRepr) -> Result<Self, Self::Error> {
        parse_cyclic(&r.word, r.rank)
    }
}

impl From<CyclicWord> for CyclicWordRepr {
    fn from(w: CyclicWord) -> Self {
        CyclicWordRepr { rank: w.rank, word: w.to_string() }
    }
}

impl CyclicWord {
    /// Builds the canonical cyclic word from letters that are already
    /// cyclically reduced. Panics otherwise; use [`cyclic_reduce`] for
    /// arbitrary input.
    pub(crate) fn from_reduced(rank: u32, letters: Vec<Letter>) -> CyclicWord {
        debug_assert!(!letters.is_empty());
        debug_assert!(is_cyclically_reduced(&letters));
        let start = least_rotation(&letters);
        let mut rotated = Vec::with_capacity(letters.len());
        rotated.extend_from_slice(&letters[start..]);
        rotated.extend_from_slice(&letters[..start]);
        CyclicWord { rank, letters: rotated }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The letter at position `i` of `w^k` (any `i`, taken mod `|w|`).
    pub fn letter_at(&self, i: usize) -> Letter {
        self.letters[i % self.letters.len()]
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::from_reduced(self.rank, self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Least of the word and its inverse; the class up to rotation and inversion.
    pub fn unoriented(&self) -> CyclicWord {
        let inv = self.inverse();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    pub fn with_rank(&self, rank: u32) -> Result<CyclicWord, WordError> {
        Word::new(rank, self.letters.clone())?;
        Ok(CyclicWord { rank, letters: self.letters.clone() })
    }

    pub fn to_word(&self) -> Word {
        Word { rank: self.rank, letters: self.letters.clone() }
    }

    /// Generators that occur in the word.
    pub fn support(&self) -> Vec<u32> {
        let mut g: Vec<u32> = self.letters.iter().map(|l| l.generator()).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// True when every generator has only positive occurrences.
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| !l.is_inverse())
    }

    /// The rotation starting at position `start`, as a plain letter vector.
    pub fn rotation(&self, start: usize) -> Vec<Letter> {
        let n = self.len();
        (0..n).map(|k| self.letters[(start + k) % n]).collect()
    }

    pub fn syllables(&self) -> Syllables {
        syllable_decomposition(self)
    }

    pub fn primitive_root(&self) -> (CyclicWord, u32) {
        primitive_root(self)
    }

    pub fn is_proper_power(&self) -> bool {
        primitive_root(self).1 > 1
    }

    pub fn power(&self, k: usize) -> CyclicWord {
        assert!(k >= 1);
        let mut letters = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        CyclicWord { rank: self.rank, letters }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({self})")
    }
}

pub(crate) fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    let n = letters.len();
    n > 0 && (0..n).all(|i| letters[i] != letters[(i + 1) % n].inverse())
}

/// Conjugates `w` to a cyclically reduced word in canonical rotation.
pub fn cyclic_reduce(w: &Word) -> Result<CyclicWord, WordError> {
    let r = free_reduce(&w.letters);
    let mut lo = 0;
    let mut hi = r.len();
    while hi - lo >= 2 && r[lo] == r[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        return Err(WordError::Identity);
    }
    Ok(CyclicWord::from_reduced(w.rank, r[lo..hi].to_vec()))
}

/// One syllable `a_k^p` of a cyclic word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllable {
    pub generator: u32,
    pub exponent: i32,
}

/// Maximal runs of a single generator, read cyclically.
///
/// `start` is the position in the canonical rotation where the first syllable
/// begins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syllables {
    pub start: usize,
    pub syllables: Vec<Syllable>,
}

impl Syllables {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn expand(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for s in &self.syllables {
            let l = Letter::new(s.generator, s.exponent < 0);
            for _ in 0..s.exponent.unsigned_abs() {
                out.push(l);
            }
        }
        out
    }

    pub fn pairs(&self) -> Vec<(u32, i32)> {
        self.syllables.iter().map(|s| (s.generator, s.exponent)).collect()
    }
}

pub fn syllable_decomposition(w: &CyclicWord) -> Syllables {
    let n = w.len();
    let letters = w.letters();
    // A reduced cyclic word with one generator is a pure power.
    let start = (0..n).find(|&i| letters[(i + n - 1) % n].generator() != letters[i].generator());
    let Some(start) = start else {
        return Syllables {
            start: 0,
            syllables: vec![Syllable { generator: letters[0].generator(), exponent: n as i32 * letters[0].sign() }],
        };
    };
    let mut syllables = Vec::new();
    let mut k = 0;
    while k < n {
        let l = letters[(start + k) % n];
        let mut len = 1;
        while k + len < n && letters[(start + k + len) % n] == l {
            len += 1;
        }
        syllables.push(Syllable { generator: l.generator(), exponent: len as i32 * l.sign() });
        k += len;
    }
    Syllables { start, syllables }
}

/// The shortest root `u` with `w = u^k` cyclically, and the exponent `k`.
pub fn primitive_root(w: &CyclicWord) -> (CyclicWord, u32) {
    let n = w.len();
    let letters = w.letters();
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        if (0..n).all(|i| letters[i] == letters[(i + d) % n]) {
            let root = CyclicWord::from_reduced(w.rank(), letters[..d].to_vec());
            return (root, (n / d) as u32);
        }
    }
    unreachable!("d = n always divides")
}

/// Relabelings under which polygonality is invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relabeling {
    /// `perm[g-1]` is the image of generator `g`.
    Permute(Vec<u32>),
    /// Replace each listed generator by its inverse.
    InvertGenerators(Vec<u32>),
    /// Replace the word by its inverse.
    Inverse,
    /// Read the word starting at another position.
    Rotate(usize),
}

impl Relabeling {
    pub fn swap(g: u32, h: u32, rank: u32) -> Relabeling {
        let perm = (1..=rank)
            .map(|x| {
                if x == g {
                    h
                } else if x == h {
                    g
                } else {
                    x
                }
            })
            .collect();
        Relabeling::Permute(perm)
    }

    /// Image of a single letter under a letter-wise relabeling; `None` for
    /// `Inverse` and `Rotate`, which act on the whole word.
    pub fn map_letter(&self, l: Letter) -> Option<Letter> {
        match self {
            Relabeling::Permute(perm) => Some(Letter::new(perm[(l.generator() - 1) as usize], l.is_inverse())),
            Relabeling::InvertGenerators(gens) => Some(if gens.contains(&l.generator()) { l.inverse() } else { l }),
            Relabeling::Inverse | Relabeling::Rotate(_) => None,
        }
    }

    pub fn validate(&self, rank: u32) -> Result<(), WordError> {
        match self {
            Relabeling::Permute(perm) => {
                let mut seen = perm.clone();
                seen.sort_unstable();
                if seen != (1..=rank).collect::<Vec<_>>() {
                    return Err(WordError::Syntax {
                        pos: 0,
                        msg: format!("{perm:?} is not a permutation of 1..{rank}"),
                    });
                }
                Ok(())
            }
            Relabeling::InvertGenerators(gens) => match gens.iter().find(|&&g| g == 0 || g > rank) {
                Some(&g) => Err(WordError::GeneratorOutOfRank { generator: g, rank, pos: 0 }),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// The image of `w` under a relabeling, canonicalized.
pub fn transform(w: &CyclicWord, t: &Relabeling) -> CyclicWord {
    match t {
        Relabeling::Inverse => w.inverse(),
        Relabeling::Rotate(_) => w.clone(),
        _ => {
            let letters = w.letters().iter().map(|&l| t.map_letter(l).expect("letter-wise")).collect();
            CyclicWord::from_reduced(w.rank(), letters)
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: u32,
    max_generator: u32,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, WordError> {
        Err(WordError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn word(&mut self) -> Result<Vec<Letter>, WordError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => out.extend(self.term()?),
                _ => break,
            }
        }
        if out.is_empty() {
            return self.err("expected a letter or '('");
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Vec<Letter>, WordError> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                    let e = self.int()?;
                    base = power(&base, e);
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => {
                    let v = self.atom()?;
                    let mut conj: Vec<Letter> = v.iter().rev().map(|l| l.inverse()).collect();
                    conj.extend_from_slice(&base);
                    conj.extend_from_slice(&v);
                    base = conj;
                }
                _ => return self.err("expected an integer or an atom after '^'"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Vec<Letter>, WordError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                self.pos += 1;
                let generator = (c.to_ascii_lowercase() - b'a') as u32 + 1;
                if generator > self.rank {
                    return Err(WordError::GeneratorOutOfRank { generator, rank: self.rank, pos: start });
                }
                self.max_generator = self.max_generator.max(generator);
                Ok(vec![Letter::new(generator, c.is_ascii_uppercase())])
            }
            _ => self.err("expected a letter or '('"),
        }
    }

    fn int(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let v: i64 = text.parse().map_err(|_| WordError::Syntax { pos: start, msg: format!("bad integer {text}") })?;
        if v == 0 {
            return Err(WordError::Syntax { pos: start, msg: "exponent must be nonzero".into() });
        }
        if v.unsigned_abs() > 1_000_000 {
            return Err(WordError::Syntax { pos: start, msg: "exponent too large".into() });
        }
        Ok(v)
    }
}

fn power(base: &[Letter], e: i64) -> Vec<Letter> {
    let unit: Vec<Letter> = if e < 0 { base.iter().rev().map(|l| l.inverse()).collect() } else { base.to_vec() };
    let mut out = Vec::with_capacity(unit.len() * e.unsigned_abs() as usize);
    for _ in 0..e.unsigned_abs() {
        out.extend_from_slice(&unit);
    }
    out
}

/// Parses a word in the text grammar and freely reduces it.
///
/// `term := atom ("^" int | "^" atom)*`, where `u^v` means `v^-1 u v`.
pub fn parse_word(text: &str, rank: u32) -> Result<Word, WordError> {
    if rank == 0 {
        return Err(WordError::ZeroRank);
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, rank, max_generator: 0 };
    let letters = p.word()?;
    if p.peek().is_some() {
        return p.err(format!("unexpected character '{}'", p.src[p.pos] as char));
    }
    Ok(Word { rank, letters: free_reduce(&letters) })
}

/// Parses and cyclically reduces in one step.
pub fn parse_cyclic(text: &str, rank: u32) -> Result<CyclicWord, WordError> {
    cyclic_reduce(&parse_word(text, rank)?)
}

/// Smallest rank (at least 2) that covers every letter mentioned in `text`.
pub fn infer_rank(text: &str) -> u32 {
    text.bytes()
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| (c.to_ascii_lowercase() - b'a') as u32 + 1)
        .max()
        .unwrap_or(1)
        .max(2)
}
