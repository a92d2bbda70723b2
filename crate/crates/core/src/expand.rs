//! Greedy and quasi-greedy digit recursions, the α and β sequences of 1,
//! period detection and exact evaluation of digit sequences.
//!
//! For an exact base the recursions run on the scaled remainder
//! `r_n = q^n (x − Σ_{i≤n} d_i q^{−i})`: the greedy digit is the largest
//! `d ≤ q·r_{n−1}`, the quasi-greedy digit the largest `d < q·r_{n−1}`.
//! For an approximate base each digit is certified against both ends of the
//! base interval; a digit that depends on where the true base lies aborts with
//! [`Error::UndecidableAtPrecision`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{int, pow, Base, Digit, PointInJ, Rational};
use crate::sequences::{EpSeq, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Greedy,
    QuasiGreedy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Greedy => "greedy",
            Mode::QuasiGreedy => "quasi-greedy",
        })
    }
}

/// First `depth` digits of an expansion and the exact leftover
/// `x − Σ_{i≤depth} d_i q^{−i}` (at the centre value for an approximate base).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionPrefix {
    pub digits: Word,
    pub remainder: Rational,
    pub depth: usize,
}

/// Digit-by-digit recursion.
pub struct Digits {
    mode: Mode,
    top: Digit,
    x_is_zero: bool,
    state: State,
}

#[allow(clippy::large_enum_variant)]
enum State {
    // q = a/b and x = u/s in lowest terms; the scaled remainder is
    // r_n = num / scale with scale = s·b^n, kept unreduced so that no gcd is
    // needed per digit
    Exact {
        a: BigInt,
        b: BigInt,
        num: BigInt,
        scale: BigInt,
        steps: usize,
    },
    Interval {
        x: Rational,
        // inverse powers at the two ends and at the centre of the base interval
        lo: Partial,
        hi: Partial,
        mid: Partial,
    },
}

struct Partial {
    inv_q: Rational,
    scale: Rational,
    sum: Rational,
}

impl Partial {
    fn new(q: &Rational) -> Partial {
        Partial {
            inv_q: q.recip(),
            scale: Rational::one(),
            sum: Rational::zero(),
        }
    }

    fn advance(&mut self) {
        self.scale = &self.scale * &self.inv_q;
    }

    fn with(&self, d: Digit) -> Rational {
        &self.sum + &self.scale * int(d as i64)
    }
}

impl Digits {
    pub fn new(p: &PointInJ, mode: Mode) -> Digits {
        let base = p.base();
        let x = p.x().clone();
        let state = if base.is_exact() {
            State::Exact {
                a: base.q().numer().clone(),
                b: base.q().denom().clone(),
                num: x.numer().clone(),
                scale: x.denom().clone(),
                steps: 0,
            }
        } else {
            let (lo, hi) = base.bounds();
            State::Interval {
                lo: Partial::new(&lo),
                hi: Partial::new(&hi),
                mid: Partial::new(base.q()),
                x: x.clone(),
            }
        };
        Digits {
            mode,
            top: base.top_digit(),
            x_is_zero: x.is_zero(),
            state,
        }
    }

    /// Scaled remainder `q^n (x − Σ_{i≤n} d_i q^{−i})` after the digits
    /// produced so far (exact bases only).
    pub fn scaled_remainder(&self) -> Option<Rational> {
        match &self.state {
            State::Exact { num, scale, .. } => Some(Rational::new(num.clone(), scale.clone())),
            State::Interval { .. } => None,
        }
    }

    fn remainder_is_zero(&self) -> bool {
        matches!(&self.state, State::Exact { num, .. } if num.is_zero())
    }

    /// A value identifying the scaled remainder exactly without a gcd:
    /// `num / (s·b^n)` with the largest usable power of `b` cancelled.
    fn remainder_key(&self) -> Option<(BigInt, usize)> {
        let State::Exact { b, num, steps, .. } = &self.state else {
            return None;
        };
        let mut n = num.clone();
        let mut k = if b.is_one() { 0 } else { *steps };
        while k > 0 && !n.is_zero() {
            let (quot, rem) = n.div_rem(b);
            if !rem.is_zero() {
                break;
            }
            n = quot;
            k -= 1;
        }
        if n.is_zero() {
            k = 0;
        }
        Some((n, k))
    }

    pub fn next_digit(&mut self) -> Result<Digit> {
        if self.mode == Mode::QuasiGreedy && self.x_is_zero {
            return Ok(0);
        }
        let top = self.top;
        let mode = self.mode;
        match &mut self.state {
            State::Exact {
                a,
                b,
                num,
                scale,
                steps,
            } => {
                // q·r_{n−1} = a·num / (b·scale)
                let lifted = &*a * &*num;
                *scale = &*scale * &*b;
                *steps += 1;
                let (floor, rem) = lifted.div_rem(scale);
                let bound = match mode {
                    Mode::Greedy => floor,
                    Mode::QuasiGreedy if rem.is_zero() => floor - 1,
                    Mode::QuasiGreedy => floor,
                };
                let d = if bound.is_negative() {
                    0
                } else {
                    bound.to_u32().map_or(top, |v| v.min(top))
                };
                *num = lifted - &*scale * BigInt::from(d);
                Ok(d)
            }
            State::Interval { x, lo, hi, mid } => {
                lo.advance();
                hi.advance();
                mid.advance();
                // the partial sum decreases in q, so the low end of the base
                // gives its largest value and the high end its smallest
                let admissible = |s: &Rational| match mode {
                    Mode::Greedy => s <= &*x,
                    Mode::QuasiGreedy => s < &*x,
                };
                let mut d = top;
                loop {
                    let surely = admissible(&lo.with(d));
                    let possibly = admissible(&hi.with(d));
                    if surely {
                        break;
                    }
                    if possibly {
                        return Err(Error::UndecidableAtPrecision(format!(
                            "digit {d} is admissible for part of the base interval"
                        )));
                    }
                    if d == 0 {
                        return Err(Error::UndecidableAtPrecision(
                            "no digit admissible over the whole base interval".into(),
                        ));
                    }
                    d -= 1;
                }
                lo.sum = lo.with(d);
                hi.sum = hi.with(d);
                mid.sum = mid.with(d);
                Ok(d)
            }
        }
    }

    fn remainder(&self, depth: usize) -> Rational {
        match &self.state {
            State::Exact {
                a, b, num, scale, ..
            } => {
                // (num/scale)·q^{−n} = num·b^n / (scale·a^n)
                let bn = num_traits::pow(b.clone(), depth);
                let an = num_traits::pow(a.clone(), depth);
                Rational::new(num * bn, scale * an)
            }
            State::Interval { x, mid, .. } => x - &mid.sum,
        }
    }
}

pub fn expansion_prefix(p: &PointInJ, mode: Mode, depth: usize) -> Result<ExpansionPrefix> {
    let mut it = Digits::new(p, mode);
    let digits = (0..depth)
        .map(|_| it.next_digit())
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionPrefix {
        digits: Word(digits),
        remainder: it.remainder(depth),
        depth,
    })
}

pub fn greedy_prefix(p: &PointInJ, depth: usize) -> Result<ExpansionPrefix> {
    expansion_prefix(p, Mode::Greedy, depth)
}

pub fn quasi_greedy_prefix(p: &PointInJ, depth: usize) -> Result<ExpansionPrefix> {
    expansion_prefix(p, Mode::QuasiGreedy, depth)
}

fn one_in(base: &Base) -> PointInJ {
    // 1 ≤ top/(q−1) always, since q ≤ ⌈q⌉ = top + 1
    PointInJ::new(Rational::one(), base.clone()).expect("1 lies in J_q")
}

/// `α_1(q) … α_depth(q)`: the quasi-greedy expansion of 1.
pub fn alpha_prefix(base: &Base, depth: usize) -> Result<Word> {
    Ok(quasi_greedy_prefix(&one_in(base), depth)?.digits)
}

/// `β_1(q) … β_depth(q)`: the greedy expansion of 1.
pub fn beta_prefix(base: &Base, depth: usize) -> Result<Word> {
    Ok(greedy_prefix(&one_in(base), depth)?.digits)
}

/// As many α digits as the base precision certifies, up to `depth`.
pub fn alpha_prefix_certified(base: &Base, depth: usize) -> Word {
    let mut it = Digits::new(&one_in(base), Mode::QuasiGreedy);
    Word((0..depth).map_while(|_| it.next_digit().ok()).collect())
}

/// Position `n ≤ depth` at which the greedy remainder of `x` becomes exactly 0.
pub fn greedy_terminates(p: &PointInJ, depth: usize) -> Result<Option<usize>> {
    if !p.base().is_exact() {
        return Err(Error::UndecidableAtPrecision(
            "finiteness is not decidable for an approximate base".into(),
        ));
    }
    if p.x().is_zero() {
        return Ok(Some(0));
    }
    let mut it = Digits::new(p, Mode::Greedy);
    for n in 1..=depth {
        it.next_digit()?;
        if it.remainder_is_zero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// If `β(q)` ends within `depth` digits with last nonzero digit `β_n`, returns
/// `n` and the period `β_1 … β_{n−1} (β_n − 1)` of `α(q)`.
pub fn finite_beta(base: &Base, depth: usize) -> Result<Option<(usize, Word)>> {
    let Some(n) = greedy_terminates(&one_in(base), depth)? else {
        return Ok(None);
    };
    let mut period = beta_prefix(base, n)?.0;
    if let Some(last) = period.last_mut() {
        *last -= 1;
    }
    Ok(Some((n, Word(period))))
}

/// Exact value `Σ c_i q^{−i}` of a finite word.
pub fn eval_word(w: &[Digit], q: &Rational) -> Rational {
    // Horner from the right: (((c_n)/q + c_{n−1})/q + …)/q
    let inv = q.recip();
    w.iter()
        .rev()
        .fold(Rational::zero(), |acc, &d| (acc + int(d as i64)) * &inv)
}

/// Exact value of an eventually periodic sequence (centre value for an
/// approximate base).
pub fn eval_seq(s: &EpSeq, base: &Base) -> Result<Rational> {
    let top = base.top_digit();
    let max = s.max_digit();
    if max > top {
        return Err(Error::DigitOutOfRange { digit: max, top });
    }
    let q = base.q();
    let head = eval_word(s.preamble(), q);
    let cycle = eval_word(s.period(), q);
    let l = s.period().len();
    let tail = cycle / (Rational::one() - pow(&q.recip(), l));
    Ok(head + tail * pow(&q.recip(), s.preamble().len()))
}

/// Runs the recursion for up to `cap` digits watching the exact scaled
/// remainder; a repeated remainder pins down the whole expansion.
pub fn detect_period(p: &PointInJ, mode: Mode, cap: usize) -> Result<Option<EpSeq>> {
    if !p.base().is_exact() {
        return Err(Error::ExactBaseRequired);
    }
    if mode == Mode::QuasiGreedy && p.x().is_zero() {
        return Ok(Some(EpSeq::constant(0)));
    }
    let mut it = Digits::new(p, mode);
    let mut seen: HashMap<(BigInt, usize), usize> = HashMap::new();
    seen.insert(it.remainder_key().expect("exact base"), 0);
    let mut digits = Vec::new();
    for n in 1..=cap {
        digits.push(it.next_digit()?);
        let r = it.remainder_key().expect("exact base");
        if let Some(&m) = seen.get(&r) {
            let period = digits.split_off(m);
            return EpSeq::new(digits, period).map(Some);
        }
        seen.insert(r, n);
    }
    Ok(None)
}
