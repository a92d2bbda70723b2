//! Finite words and eventually periodic digit sequences.
//!
//! An [`EpSeq`] is `preamble (period)^∞`, always stored in normal form: the
//! period is primitive and the preamble is as short as possible. Two sequences
//! are equal exactly when their normal forms coincide, so `Eq`/`Hash` are
//! structural and `Ord` is the lexicographic order of the infinite sequences.
//!
//! Textual syntax: `preamble(period)`, e.g. `11(10)` or `(01)`. When any digit
//! is 10 or larger the digits are comma separated: `1,12(3,0)`. A word without
//! parentheses is read as a finite sequence padded with `0^∞`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::Digit;

/// A finite word over the digits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Word {
        Word(digits)
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based position of the first occurrence of `needle`, if any.
    pub fn find(&self, needle: &Word) -> Option<usize> {
        if needle.is_empty() {
            return Some(0);
        }
        self.0
            .windows(needle.len())
            .position(|w| w == needle.digits())
    }

    pub fn max_digit(&self) -> Option<Digit> {
        self.0.iter().copied().max()
    }
}

impl From<Vec<Digit>> for Word {
    fn from(v: Vec<Digit>) -> Word {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&d| d >= 10);
        write_digits(f, &self.0, wide)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        parse_digits(s.trim(), s).map(Word)
    }
}

fn write_digits(f: &mut fmt::Formatter<'_>, digits: &[Digit], wide: bool) -> fmt::Result {
    for (i, d) in digits.iter().enumerate() {
        if wide && i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{d}")?;
    }
    Ok(())
}

fn parse_digits(s: &str, whole: &str) -> Result<Vec<Digit>> {
    let bad = |reason: &str| Error::Parse {
        input: whole.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        s.split(',')
            .map(|t| t.trim().parse::<Digit>().map_err(|_| bad("bad digit")))
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| bad("bad digit")))
            .collect()
    }
}

/// Eventually periodic sequence `preamble (period)^∞` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpSeq {
    preamble: Vec<Digit>,
    period: Vec<Digit>,
}

impl EpSeq {
    pub fn new(preamble: Vec<Digit>, period: Vec<Digit>) -> Result<EpSeq> {
        if period.is_empty() {
            return Err(Error::InvalidSequence("period must be nonempty".into()));
        }
        Ok(normalize(preamble, period))
    }

    /// `(period)^∞`.
    pub fn periodic(period: Vec<Digit>) -> Result<EpSeq> {
        EpSeq::new(Vec::new(), period)
    }

    /// `d^∞`.
    pub fn constant(d: Digit) -> EpSeq {
        EpSeq {
            preamble: Vec::new(),
            period: vec![d],
        }
    }

    /// `word 0^∞`.
    pub fn finite(word: Vec<Digit>) -> EpSeq {
        normalize(word, vec![0])
    }

    pub fn preamble(&self) -> &[Digit] {
        &self.preamble
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    /// 0-based digit access: `digit(0)` is `c_1`.
    pub fn digit(&self, i: usize) -> Digit {
        if i < self.preamble.len() {
            self.preamble[i]
        } else {
            self.period[(i - self.preamble.len()) % self.period.len()]
        }
    }

    /// The infinite digit stream.
    pub fn iter(&self) -> impl Iterator<Item = Digit> + '_ {
        self.preamble
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.iter().take(n).collect())
    }

    /// Ends in `0^∞`, i.e. has finitely many nonzero digits.
    pub fn is_finite(&self) -> bool {
        self.period == [0]
    }

    pub fn max_digit(&self) -> Digit {
        self.preamble
            .iter()
            .chain(self.period.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Number of distinct tails: `|preamble| + |period|`.
    pub fn tail_count(&self) -> usize {
        self.preamble.len() + self.period.len()
    }

    /// The sequence `i ↦ self[n + i]`.
    pub fn shift(&self, n: usize) -> EpSeq {
        let p = self.preamble.len();
        if n <= p {
            return EpSeq {
                preamble: self.preamble[n..].to_vec(),
                period: self.period.clone(),
            };
        }
        let mut period = self.period.clone();
        period.rotate_left((n - p) % self.period.len());
        EpSeq {
            preamble: Vec::new(),
            period,
        }
    }

    /// Digitwise `top − c_i`.
    pub fn conjugate(&self, top: Digit) -> Result<EpSeq> {
        let flip = |v: &[Digit]| -> Result<Vec<Digit>> {
            v.iter()
                .map(|&d| {
                    top.checked_sub(d)
                        .ok_or(Error::DigitOutOfRange { digit: d, top })
                })
                .collect()
        };
        // conjugation is a bijection on digits, so normal form is preserved
        Ok(EpSeq {
            preamble: flip(&self.preamble)?,
            period: flip(&self.period)?,
        })
    }

    /// Every distinct tail, keyed by its 1-based starting position:
    /// `(n, shift(n − 1))` for `n = 1 ..= |preamble| + |period|`.
    pub fn all_shift_starts(&self) -> Vec<(usize, EpSeq)> {
        (1..=self.tail_count())
            .map(|n| (n, self.shift(n - 1)))
            .collect()
    }

    /// `(n, c_n, c_{n+1} c_{n+2} …)` for every 1-based `n` up to the point
    /// where the pairs start repeating. Quantifying over these decides any
    /// condition of the form "for all n ≥ 1, P(c_n, tail after n)".
    pub fn conditioned_tails(&self) -> impl Iterator<Item = (usize, Digit, EpSeq)> + '_ {
        (1..=self.tail_count()).map(move |n| (n, self.digit(n - 1), self.shift(n)))
    }

    pub fn lex_compare(&self, other: &EpSeq) -> Ordering {
        let len = self.preamble.len().max(other.preamble.len())
            + self.period.len().lcm(&other.period.len());
        self.iter().take(len).cmp(other.iter().take(len))
    }

    /// Compares this sequence against a finite word over the word's length.
    /// `None` when the word is a prefix of the sequence.
    pub fn compare_prefix(&self, word: &[Digit]) -> Option<Ordering> {
        self.iter()
            .zip(word.iter())
            .find(|(a, b)| a != *b)
            .map(|(a, b)| a.cmp(b))
    }
}

fn normalize(mut preamble: Vec<Digit>, mut period: Vec<Digit>) -> EpSeq {
    let l = period.len();
    if let Some(p) =
        (1..l).find(|&p| l.is_multiple_of(p) && (p..l).all(|i| period[i] == period[i - p]))
    {
        period.truncate(p);
    }
    while let (Some(&a), Some(&b)) = (preamble.last(), period.last()) {
        if a != b {
            break;
        }
        preamble.pop();
        period.rotate_right(1);
    }
    EpSeq { preamble, period }
}

impl Ord for EpSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_compare(other)
    }
}

impl PartialOrd for EpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.max_digit() >= 10;
        write_digits(f, &self.preamble, wide)?;
        f.write_str("(")?;
        write_digits(f, &self.period, wide)?;
        f.write_str(")")
    }
}

impl FromStr for EpSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<EpSeq> {
        let t = s.trim();
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match t.find('(') {
            None => {
                if t.contains(')') {
                    return Err(bad("unbalanced parenthesis"));
                }
                Ok(EpSeq::finite(parse_digits(t, s)?))
            }
            Some(open) => {
                let rest = t[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| bad("period must end the literal with ')'"))?;
                if rest.contains(['(', ')']) {
                    return Err(bad("nested parenthesis"));
                }
                let pre = t[..open].trim().trim_end_matches(',');
                let preamble = parse_digits(pre, s)?;
                let period = parse_digits(rest.trim(), s)?;
                if period.is_empty() {
                    return Err(bad("empty period"));
                }
                EpSeq::new(preamble, period)
            }
        }
    }
}
