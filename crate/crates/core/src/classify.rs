//! Admissibility, uniqueness and closure classifiers.
//!
//! Every classifier quantifies "for all n ≥ 1" over the finitely many distinct
//! `(c_n, c_{n+1} c_{n+2} …)` pairs of an eventually periodic sequence, so the
//! answer is exact whenever the reference sequence (α or β) is known exactly.
//! For a non-integer rational base α(q) is never eventually periodic; it is then
//! supplied as a finite prefix and any comparison the prefix cannot settle
//! yields [`Verdict::UnknownAtDepth`].

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Base, Digit, PointInJ, Rational};
use crate::expand::{self, Mode};
use crate::sequences::{EpSeq, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Yes,
    No,
    UnknownAtDepth,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::UnknownAtDepth => "UnknownAtDepth",
        })
    }
}

/// The condition a `No` verdict violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    DigitOutOfRange,
    FiniteSequence,
    TailAboveAlpha,
    TailNotBelowAlpha,
    ConjugateTailNotBelowAlpha,
    ConjugateTailAboveAlpha,
    ConjugateTailAboveBeta,
    BelowTopThenTop,
    PositiveThenZero,
    InsideUnitInterval,
    OutOfRange,
    NotInDm,
    TwoFeasiblePrefixes,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::DigitOutOfRange => "digit-out-of-range",
            Condition::FiniteSequence => "finite-sequence",
            Condition::TailAboveAlpha => "tail-above-alpha",
            Condition::TailNotBelowAlpha => "tail-not-below-alpha",
            Condition::ConjugateTailNotBelowAlpha => "conjugate-tail-not-below-alpha",
            Condition::ConjugateTailAboveAlpha => "conjugate-tail-above-alpha",
            Condition::ConjugateTailAboveBeta => "conjugate-tail-above-beta",
            Condition::BelowTopThenTop => "below-top-then-top",
            Condition::PositiveThenZero => "positive-then-zero",
            Condition::InsideUnitInterval => "inside-unit-interval",
            Condition::OutOfRange => "out-of-range",
            Condition::NotInDm => "not-in-d-m",
            Condition::TwoFeasiblePrefixes => "two-feasible-prefixes",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `index` is the 1-based position `n` of the digit that triggers the violated condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub index: usize,
    pub condition: Condition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl Classification {
    pub fn yes() -> Self {
        Classification {
            verdict: Verdict::Yes,
            witness: None,
        }
    }

    pub fn no(index: usize, condition: Condition) -> Self {
        Classification {
            verdict: Verdict::No,
            witness: Some(Witness { index, condition }),
        }
    }

    pub fn unknown() -> Self {
        Classification {
            verdict: Verdict::UnknownAtDepth,
            witness: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }

    pub fn is_no(&self) -> bool {
        self.verdict == Verdict::No
    }

    pub fn is_decisive(&self) -> bool {
        self.verdict != Verdict::UnknownAtDepth
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if let Some(w) = &self.witness {
            write!(f, " n={} {}", w.index, w.condition)?;
        }
        Ok(())
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Classification", 3)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("witness_index", &self.witness.map(|w| w.index))?;
        st.serialize_field("condition", &self.witness.map(|w| w.condition.as_str()))?;
        st.end()
    }
}

/// Collects per-position outcomes: the first violation wins, an unsettled
/// comparison downgrades an otherwise clean run to unknown.
#[derive(Default)]
struct Scan {
    unsettled: bool,
}

impl Scan {
    fn finish(self) -> Classification {
        if self.unsettled {
            Classification::unknown()
        } else {
            Classification::yes()
        }
    }
}

/// A reference sequence (α or β) known either exactly or by a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    Exact(EpSeq),
    Prefix(Word),
}

impl Reference {
    pub fn first_digit(&self) -> Option<Digit> {
        match self {
            Reference::Exact(s) => Some(s.digit(0)),
            Reference::Prefix(w) => w.digits().first().copied(),
        }
    }

    /// Digit `i` (0-based), if known.
    pub fn digit(&self, i: usize) -> Option<Digit> {
        match self {
            Reference::Exact(s) => Some(s.digit(i)),
            Reference::Prefix(w) => w.digits().get(i).copied(),
        }
    }

    /// Order of `s` relative to the reference, if it can be settled.
    pub fn order_of(&self, s: &EpSeq) -> Option<Ordering> {
        match self {
            Reference::Exact(r) => Some(s.lex_compare(r)),
            Reference::Prefix(w) => s.compare_prefix(w.digits()),
        }
    }

    /// Order of a finite word, read as the first digits of some unknown
    /// sequence, relative to the reference. `None` when the known digits agree.
    pub fn order_of_word(&self, w: &[Digit]) -> Option<Ordering> {
        w.iter().enumerate().find_map(|(i, &d)| {
            let r = self.digit(i)?;
            (d != r).then(|| d.cmp(&r))
        })
    }

    fn top(&self) -> Result<Digit> {
        self.first_digit()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidAlpha("the first digit must be at least 1".into()))
    }

    /// Checks `σ^k(α) ≤ α` for all `k ≥ 1` and that `α` is infinite; for a
    /// prefix the shifted prefixes are compared over their common length.
    pub fn validate_alpha(&self) -> Result<()> {
        self.top()?;
        match self {
            Reference::Exact(s) => {
                if s.is_finite() {
                    return Err(Error::InvalidAlpha(format!("{s} is not infinite")));
                }
                validate_shifts(s)
            }
            Reference::Prefix(w) => {
                let d = w.digits();
                for k in 1..d.len() {
                    if d[k..] > d[..d.len() - k] {
                        return Err(Error::InvalidAlpha(format!(
                            "shift by {k} of {w} exceeds the prefix"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Like [`Reference::validate_alpha`] but finite sequences are allowed (β may be finite).
    pub fn validate_beta(&self) -> Result<()> {
        self.top()?;
        match self {
            Reference::Exact(s) => validate_shifts(s),
            Reference::Prefix(_) => self.validate_alpha(),
        }
    }
}

fn validate_shifts(s: &EpSeq) -> Result<()> {
    for (n, tail) in s.all_shift_starts().into_iter().skip(1) {
        if tail > *s {
            return Err(Error::InvalidAlpha(format!(
                "the tail of {s} starting at position {n} exceeds it"
            )));
        }
    }
    Ok(())
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Exact(s) => write!(f, "{s}"),
            Reference::Prefix(w) => write!(f, "{w}…"),
        }
    }
}

impl From<EpSeq> for Reference {
    fn from(s: EpSeq) -> Self {
        Reference::Exact(s)
    }
}

impl From<Word> for Reference {
    fn from(w: Word) -> Self {
        Reference::Prefix(w)
    }
}

/// α(q) as a reference: exact `(q−1)^∞` for an integer base, otherwise the
/// first `len` digits (only the certified ones for an approximate base).
pub fn alpha_reference(base: &Base, len: usize) -> Result<Reference> {
    if base.is_integer() {
        return Ok(Reference::Exact(EpSeq::constant(base.top_digit())));
    }
    if base.is_exact() {
        Ok(Reference::Prefix(expand::alpha_prefix(base, len)?))
    } else {
        Ok(Reference::Prefix(expand::alpha_prefix_certified(base, len)))
    }
}

fn check_digits(c: &EpSeq, top: Digit) -> Result<()> {
    let max = c.max_digit();
    if max > top {
        return Err(Error::DigitOutOfRange { digit: max, top });
    }
    Ok(())
}

fn first_out_of_range(c: &EpSeq, top: Digit) -> Option<usize> {
    (0..c.tail_count())
        .find(|&i| c.digit(i) > top)
        .map(|i| i + 1)
}

/// Quasi-greedy admissibility: `a` infinite, digits in `{0,…,α_1}`, and
/// `a_{n+1} a_{n+2} … ≤ α` whenever `a_n < α_1`.
pub fn is_quasi_greedy_admissible(a: &EpSeq, alpha: &Reference) -> Result<Classification> {
    alpha.validate_alpha()?;
    let top = alpha.top()?;
    if let Some(n) = first_out_of_range(a, top) {
        return Ok(Classification::no(n, Condition::DigitOutOfRange));
    }
    if a.is_finite() {
        return Ok(Classification::no(
            a.preamble().len() + 1,
            Condition::FiniteSequence,
        ));
    }
    let mut scan = Scan::default();
    for (n, d, tail) in a.conditioned_tails() {
        if d < top {
            match alpha.order_of(&tail) {
                Some(Ordering::Greater) => {
                    return Ok(Classification::no(n, Condition::TailAboveAlpha))
                }
                Some(_) => {}
                None => scan.unsettled = true,
            }
        }
    }
    Ok(scan.finish())
}

/// Greedy admissibility: digits in range and `b_{n+1} b_{n+2} … < α`
/// whenever `b_n < α_1`.
pub fn is_greedy_admissible(b: &EpSeq, alpha: &Reference) -> Result<Classification> {
    alpha.validate_alpha()?;
    let top = alpha.top()?;
    if let Some(n) = first_out_of_range(b, top) {
        return Ok(Classification::no(n, Condition::DigitOutOfRange));
    }
    let mut scan = Scan::default();
    for (n, d, tail) in b.conditioned_tails() {
        if d < top {
            match alpha.order_of(&tail) {
                Some(Ordering::Less) => {}
                Some(_) => return Ok(Classification::no(n, Condition::TailNotBelowAlpha)),
                None => scan.unsettled = true,
            }
        }
    }
    Ok(scan.finish())
}

/// Unique-expansion test: tails after digits below `α_1` are `< α` and
/// conjugated tails after positive digits are `< α`. The first condition is
/// checked at every position before the second.
pub fn is_unique_expansion(c: &EpSeq, alpha: &Reference) -> Result<Classification> {
    alpha.validate_alpha()?;
    let top = alpha.top()?;
    check_digits(c, top)?;
    let tails: Vec<_> = c.conditioned_tails().collect();
    let mut scan = Scan::default();
    for (n, d, tail) in &tails {
        if *d < top {
            match alpha.order_of(tail) {
                Some(Ordering::Less) => {}
                Some(_) => return Ok(Classification::no(*n, Condition::TailNotBelowAlpha)),
                None => scan.unsettled = true,
            }
        }
    }
    for (n, d, tail) in &tails {
        if *d > 0 {
            match alpha.order_of(&tail.conjugate(top)?) {
                Some(Ordering::Less) => {}
                Some(_) => {
                    return Ok(Classification::no(
                        *n,
                        Condition::ConjugateTailNotBelowAlpha,
                    ))
                }
                None => scan.unsettled = true,
            }
        }
    }
    Ok(scan.finish())
}

fn conjugate_condition(
    a: &EpSeq,
    reference: &Reference,
    top: Digit,
    condition: Condition,
) -> Result<Classification> {
    check_digits(a, top)?;
    let mut scan = Scan::default();
    for (n, d, tail) in a.conditioned_tails() {
        if d > 0 {
            match reference.order_of(&tail.conjugate(top)?) {
                Some(Ordering::Greater) => return Ok(Classification::no(n, condition)),
                Some(_) => {}
                None => scan.unsettled = true,
            }
        }
    }
    Ok(scan.finish())
}

/// The V-condition: `conj(a_{n+1} a_{n+2} …) ≤ α` whenever `a_n > 0`.
pub fn in_v(a: &EpSeq, alpha: &Reference) -> Result<Classification> {
    alpha.validate_alpha()?;
    conjugate_condition(a, alpha, alpha.top()?, Condition::ConjugateTailAboveAlpha)
}

/// The V-condition stated with β in place of α. Conjugates are taken with
/// respect to the largest digit, which is `β_1 − 1` when `β = β_1 0^∞`.
pub fn in_v_beta_form(a: &EpSeq, beta: &Reference) -> Result<Classification> {
    beta.validate_beta()?;
    let mut top = beta.top()?;
    if let Reference::Exact(s) = beta {
        if s.shift(1).lex_compare(&EpSeq::constant(0)).is_eq() {
            top -= 1;
        }
    }
    conjugate_condition(a, beta, top, Condition::ConjugateTailAboveBeta)
}

/// V-condition on a sequence known only through its first digits. Can
/// certify `No`; `Yes` only when α is the constant top sequence, since then
/// every conjugated tail is ≤ α whatever the unknown digits are.
pub fn in_v_prefix(a: &[Digit], alpha: &Reference) -> Result<Classification> {
    let top = alpha.top()?;
    if let Some(&d) = a.iter().find(|&&d| d > top) {
        return Err(Error::DigitOutOfRange { digit: d, top });
    }
    if *alpha == Reference::Exact(EpSeq::constant(top)) {
        return Ok(Classification::yes());
    }
    for n in 1..a.len() {
        if a[n - 1] > 0 {
            let conj: Vec<Digit> = a[n..].iter().map(|&d| top - d).collect();
            if alpha.order_of_word(&conj) == Some(Ordering::Greater) {
                return Ok(Classification::no(n, Condition::ConjugateTailAboveAlpha));
            }
        }
    }
    Ok(Classification::unknown())
}

/// Closure-of-U membership for a point of `J`, using α(q) to `depth` digits.
pub fn in_closure_u(p: &PointInJ, depth: usize) -> Result<Classification> {
    let alpha = alpha_reference(p.base(), depth)?;
    in_closure_u_with(p, depth, &alpha)
}

/// [`in_closure_u`] with a precomputed α reference (e.g. shared across a row of a scan).
pub fn in_closure_u_with(p: &PointInJ, depth: usize, alpha: &Reference) -> Result<Classification> {
    if p.base().is_exact() {
        if let Some(a) = expand::detect_period(p, Mode::QuasiGreedy, depth)? {
            return in_v(&a, alpha);
        }
        let prefix = expand::quasi_greedy_prefix(p, depth)?;
        return in_v_prefix(prefix.digits.digits(), alpha);
    }
    let mut it = expand::Digits::new(p, Mode::QuasiGreedy);
    let digits: Vec<Digit> = (0..depth).map_while(|_| it.next_digit().ok()).collect();
    in_v_prefix(&digits, alpha)
}

/// Membership of `c ∈ {0,…,m}^ℕ` in `D_m'`: `c_n < m ⟹ c_{n+1} < m` and
/// `c_n > 0 ⟹ c_{n+1} > 0` for every `n`.
pub fn d_m_membership(c: &EpSeq, m: Digit) -> Result<Classification> {
    if m == 0 {
        return Err(Error::InvalidSequence("m must be at least 1".into()));
    }
    check_digits(c, m)?;
    for (n, d, tail) in c.conditioned_tails() {
        let next = tail.digit(0);
        if d < m && next >= m {
            return Ok(Classification::no(n, Condition::BelowTopThenTop));
        }
        if d > 0 && next == 0 {
            return Ok(Classification::no(n, Condition::PositiveThenZero));
        }
    }
    Ok(Classification::yes())
}

/// Outcome of the search for `x ∈ D_m ∖ [0, 1]`, with the sequence found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmMembership {
    pub classification: Classification,
    pub sequence: Option<EpSeq>,
}

/// Decides whether `(x, m)` lies in the part of the closure of U outside `J`,
/// i.e. whether `x ∉ [0, 1]` and `x = Σ c_i m^{−i}` for some `c ∈ D_m'`.
/// The only other point of that set, `(0, 1)`, has base 1 and is not covered here.
pub fn closure_minus_j_member(x: &Rational, m: Digit, depth: usize) -> Result<DmMembership> {
    if m < 2 {
        return Err(Error::BaseOutOfRange(format!(
            "m = {m} must be an integer ≥ 2"
        )));
    }
    let no = |c| DmMembership {
        classification: Classification::no(0, c),
        sequence: None,
    };
    let mm = Rational::from_integer(BigInt::from(m));
    let max = &mm / (&mm - Rational::one());
    if x.is_negative() || *x > max {
        return Ok(no(Condition::OutOfRange));
    }
    if *x <= Rational::one() {
        return Ok(no(Condition::InsideUnitInterval));
    }
    match DmSearch::new(x, m, depth).run(x.numer().clone()) {
        Found::Sequence(c) => Ok(DmMembership {
            classification: Classification::yes(),
            sequence: Some(c),
        }),
        Found::Exhausted => Ok(no(Condition::NotInDm)),
        Found::CutOff => Ok(DmMembership {
            classification: Classification::unknown(),
            sequence: None,
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Last {
    Start,
    Zero,
    Middle,
    Top,
}

enum Found {
    Sequence(EpSeq),
    Exhausted,
    CutOff,
}

/// Depth-first search over `D_m'` with states `(last digit class, scaled
/// remainder numerator)`. In an integer base the remainder keeps the
/// denominator of `x`, so the state space is finite and a state repeated
/// along the current path closes a period.
struct DmSearch {
    m: Digit,
    denom: BigInt,
    depth: usize,
    dead: HashSet<(Last, BigInt)>,
    on_path: HashMap<(Last, BigInt), usize>,
    digits: Vec<Digit>,
    cut: bool,
}

impl DmSearch {
    fn new(x: &Rational, m: Digit, depth: usize) -> DmSearch {
        DmSearch {
            m,
            denom: x.denom().clone(),
            depth,
            dead: HashSet::new(),
            on_path: HashMap::new(),
            digits: Vec::new(),
            cut: false,
        }
    }

    fn run(mut self, start: BigInt) -> Found {
        match self.visit(Last::Start, start) {
            Some(c) => Found::Sequence(c),
            None if self.cut => Found::CutOff,
            None => Found::Exhausted,
        }
    }

    /// Values reachable from a state, scaled by the denominator of `x`.
    fn feasible(&self, last: Last, r: &BigInt) -> bool {
        let m = BigInt::from(self.m);
        let s = &self.denom;
        let m1 = &m - BigInt::one();
        // r/s must lie in [lo, hi]; bounds have denominator m−1
        let (lo_num, hi_num) = match last {
            Last::Start => (BigInt::zero(), m.clone()),
            Last::Zero => (BigInt::zero(), m1.clone()),
            Last::Middle => (BigInt::one(), m1.clone()),
            Last::Top => (BigInt::one(), m.clone()),
        };
        let scaled = r * &m1;
        scaled >= lo_num * s && scaled <= hi_num * s
    }

    fn allowed(&self, last: Last) -> std::ops::RangeInclusive<Digit> {
        let m = self.m;
        match last {
            Last::Start => 0..=m,
            Last::Zero => 0..=m - 1,
            Last::Middle => 1..=m - 1,
            Last::Top => 1..=m,
        }
    }

    fn visit(&mut self, last: Last, r: BigInt) -> Option<EpSeq> {
        let key = (last, r.clone());
        if let Some(&at) = self.on_path.get(&key) {
            let period = self.digits[at..].to_vec();
            let preamble = self.digits[..at].to_vec();
            return EpSeq::new(preamble, period).ok();
        }
        if self.dead.contains(&key) || !self.feasible(last, &r) {
            return None;
        }
        if self.digits.len() >= self.depth {
            self.cut = true;
            return None;
        }
        let cut_before = self.cut;
        self.cut = false;
        self.on_path.insert(key.clone(), self.digits.len());
        let m = BigInt::from(self.m);
        for d in self.allowed(last) {
            let next = &r * &m - BigInt::from(d) * &self.denom;
            if next.is_negative() {
                break;
            }
            let class = if d == 0 {
                Last::Zero
            } else if d == self.m {
                Last::Top
            } else {
                Last::Middle
            };
            self.digits.push(d);
            if let Some(found) = self.visit(class, next) {
                return Some(found);
            }
            self.digits.pop();
        }
        self.on_path.remove(&key);
        if !self.cut {
            self.dead.insert(key);
        }
        self.cut |= cut_before;
        None
    }
}

/// Semi-decides whether `v` occurs in the greedy expansion of `x`.
pub fn word_occurs(v: &Word, p: &PointInJ, depth: usize) -> Result<Classification> {
    if v.is_empty() {
        return Ok(Classification::yes());
    }
    let g = expand::greedy_prefix(p, depth)?;
    Ok(match g.digits.find(v) {
        Some(_) => Classification::yes(),
        None => Classification::unknown(),
    })
}

/// Re-derives a `No` verdict's witness by direct comparison; used to audit classifier output.
pub fn witness_holds(c: &EpSeq, reference: &Reference, w: &Witness) -> bool {
    let Some(top) = reference.first_digit() else {
        return false;
    };
    let n = w.index;
    if n == 0 {
        return false;
    }
    let d = c.digit(n - 1);
    let tail = c.shift(n);
    let conj = || tail.conjugate(top).ok();
    match w.condition {
        Condition::DigitOutOfRange => d > top,
        Condition::FiniteSequence => c.is_finite(),
        Condition::TailAboveAlpha => {
            d < top && reference.order_of(&tail) == Some(Ordering::Greater)
        }
        Condition::TailNotBelowAlpha => {
            d < top && matches!(reference.order_of(&tail), Some(o) if o != Ordering::Less)
        }
        Condition::ConjugateTailNotBelowAlpha => {
            d > 0
                && matches!(conj().and_then(|t| reference.order_of(&t)), Some(o) if o != Ordering::Less)
        }
        Condition::ConjugateTailAboveAlpha | Condition::ConjugateTailAboveBeta => {
            d > 0 && conj().and_then(|t| reference.order_of(&t)) == Some(Ordering::Greater)
        }
        _ => false,
    }
}
