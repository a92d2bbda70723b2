//! Exact rational arithmetic and the validated base/point types.
//!
//! Every base and every point is an exact rational. An irrational base such as
//! the golden ratio enters only as a rational approximation `q` together with
//! an error bound `ε`; the true base is then known to lie in `[q - ε, q + ε]`
//! and consumers must return an undecided answer whenever that interval
//! straddles a decision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always in canonical form.
pub type Rational = BigRational;

/// A single digit of an expansion.
pub type Digit = u32;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, s: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(s))
}

/// `q^n` for a nonnegative exponent.
pub fn pow(q: &Rational, n: usize) -> Rational {
    num_traits::pow(q.clone(), n)
}

/// Best `f64` approximation of a rational (lossy; only used for reporting and logarithms).
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses a decimal literal (`1.5`, `-0.25`, `7`) or a fraction `p/s`.
pub fn rational_from_decimal(text: &str) -> Result<Rational> {
    let err = |reason: &str| Error::Parse {
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(err("empty literal"));
    }
    if let Some((p, s)) = t.split_once('/') {
        let p = parse_integer(p.trim()).ok_or_else(|| err("bad numerator"))?;
        let s = parse_integer(s.trim()).ok_or_else(|| err("bad denominator"))?;
        if s.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(p, s));
    }
    let (negative, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(err("no digits"));
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err("not a decimal number"));
    }
    let digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(&digits).map_err(|_| err("not a decimal number"))?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Formats a rational with a fixed number of decimals, rounding half away from zero.
pub fn to_fixed(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (r.abs() * Rational::from_integer(scale.clone()))
        .round()
        .to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let sign = if r.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = places
        )
    }
}

/// A validated base `q > 1` with its alphabet data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base {
    q: Rational,
    error: Option<Rational>,
    ceil_q: Digit,
    top_digit: Digit,
    j_max: Rational,
}

impl Base {
    /// Exact base.
    pub fn new(q: Rational) -> Result<Base> {
        if q <= Rational::one() {
            return Err(Error::BaseOutOfRange(format!("q = {q} must exceed 1")));
        }
        let ceil_q = ceil_digit(&q)?;
        Ok(Base::assemble(q, None, ceil_q))
    }

    /// Rational approximation of an irrational base: the true base lies in
    /// `[q - error, q + error]`. The whole interval must exceed 1 and share one
    /// alphabet, otherwise no digit could be certified.
    pub fn approximate(q: Rational, error: Rational) -> Result<Base> {
        if error.is_negative() {
            return Err(Error::BaseOutOfRange("negative error bound".into()));
        }
        if error.is_zero() {
            return Base::new(q);
        }
        let lo = &q - &error;
        let hi = &q + &error;
        if lo <= Rational::one() {
            return Err(Error::BaseOutOfRange(format!(
                "interval [{lo}, {hi}] reaches q <= 1"
            )));
        }
        let ceil_lo = ceil_digit(&lo)?;
        let ceil_hi = ceil_digit(&hi)?;
        if ceil_lo != ceil_hi || lo.is_integer() {
            return Err(Error::UndecidableAtPrecision(format!(
                "interval [{lo}, {hi}] spans two alphabets"
            )));
        }
        Ok(Base::assemble(q, Some(error), ceil_hi))
    }

    fn assemble(q: Rational, error: Option<Rational>, ceil_q: Digit) -> Base {
        let top_digit = ceil_q - 1;
        let j_max = Rational::from_integer(BigInt::from(top_digit)) / (&q - Rational::one());
        Base {
            q,
            error,
            ceil_q,
            top_digit,
            j_max,
        }
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn ceil_q(&self) -> Digit {
        self.ceil_q
    }

    /// Largest admissible digit, `⌈q⌉ − 1`.
    pub fn top_digit(&self) -> Digit {
        self.top_digit
    }

    /// Right endpoint of `J_q`; for an approximate base it is taken at the centre value.
    pub fn j_max(&self) -> &Rational {
        &self.j_max
    }

    pub fn is_exact(&self) -> bool {
        self.error.is_none()
    }

    pub fn error_bound(&self) -> Option<&Rational> {
        self.error.as_ref()
    }

    /// Exact integer base.
    pub fn is_integer(&self) -> bool {
        self.is_exact() && self.q.is_integer()
    }

    /// The interval known to contain the base.
    pub fn bounds(&self) -> (Rational, Rational) {
        match &self.error {
            None => (self.q.clone(), self.q.clone()),
            Some(e) => (&self.q - e, &self.q + e),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.error {
            None => write!(f, "{}", self.q),
            Some(e) => write!(f, "{}±{}", self.q, e),
        }
    }
}

fn ceil_digit(q: &Rational) -> Result<Digit> {
    q.ceil()
        .to_integer()
        .to_u32()
        .filter(|&c| c >= 2)
        .ok_or_else(|| Error::BaseOutOfRange(format!("q = {q} is too large for the digit type")))
}

/// Validating constructor, `make_base`.
pub fn make_base(q: Rational) -> Result<Base> {
    Base::new(q)
}

/// A point `(x, q)` of the set `J`: `0 ≤ x ≤ j_max(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointInJ {
    x: Rational,
    base: Base,
}

impl PointInJ {
    pub fn new(x: Rational, base: Base) -> Result<PointInJ> {
        let not_in_j = || Error::NotInJ {
            x: x.to_string(),
            j_max: base.j_max.to_string(),
        };
        if x.is_negative() {
            return Err(not_in_j());
        }
        let top = Rational::from_integer(BigInt::from(base.top_digit));
        let (lo, hi) = base.bounds();
        // j_max decreases in q: [top/(hi-1), top/(lo-1)] encloses it.
        let certain_max = &top / (&hi - Rational::one());
        let possible_max = &top / (&lo - Rational::one());
        if x > possible_max {
            return Err(not_in_j());
        }
        if x > certain_max {
            return Err(Error::UndecidableAtPrecision(format!(
                "x = {x} straddles the right end of J_q"
            )));
        }
        Ok(PointInJ { x, base })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn base(&self) -> &Base {
        &self.base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_base_examples() {
        let b = make_base(int(2)).unwrap();
        assert_eq!((b.ceil_q(), b.top_digit()), (2, 1));
        assert_eq!(b.j_max(), &int(1));

        let b = make_base(ratio(3, 2)).unwrap();
        assert_eq!((b.ceil_q(), b.top_digit()), (2, 1));
        assert_eq!(b.j_max(), &int(2));

        let b = make_base(ratio(5, 2)).unwrap();
        assert_eq!((b.ceil_q(), b.top_digit()), (3, 2));
        assert_eq!(b.j_max(), &ratio(4, 3));
    }

    #[test]
    fn make_base_rejects_small() {
        assert!(matches!(make_base(int(1)), Err(Error::BaseOutOfRange(_))));
        assert!(matches!(
            make_base(ratio(1, 2)),
            Err(Error::BaseOutOfRange(_))
        ));
        assert!(matches!(make_base(int(-3)), Err(Error::BaseOutOfRange(_))));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(rational_from_decimal("1.5").unwrap(), ratio(3, 2));
        assert_eq!(rational_from_decimal("19/10").unwrap(), ratio(19, 10));
        assert_eq!(rational_from_decimal("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(rational_from_decimal("7").unwrap(), int(7));
        assert_eq!(rational_from_decimal(".5").unwrap(), ratio(1, 2));
        assert_eq!(rational_from_decimal("4/6").unwrap(), ratio(2, 3));
        for bad in ["abc", "", "1/0", "1.2.3", "1/", "/3", "--1", "1e5", "+"] {
            assert!(
                matches!(rational_from_decimal(bad), Err(Error::Parse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(to_fixed(&ratio(2, 3), 4), "0.6667");
        assert_eq!(to_fixed(&ratio(-1, 8), 2), "-0.13");
        assert_eq!(to_fixed(&int(3), 0), "3");
        assert_eq!(to_fixed(&ratio(1, 1000), 2), "0.00");
    }

    #[test]
    fn approximate_base_interval() {
        // golden ratio to 10 digits
        let phi = rational_from_decimal("1.6180339887").unwrap();
        let b = Base::approximate(phi, ratio(1, 10_000_000_000)).unwrap();
        assert!(!b.is_exact());
        assert_eq!(b.top_digit(), 1);
        // an interval that contains 2 mixes the alphabets {0,1} and {0,1,2}
        assert!(Base::approximate(int(2), ratio(1, 100)).is_err());
        assert!(Base::approximate(ratio(101, 100), ratio(2, 100)).is_err());
    }

    #[test]
    fn point_in_j_bounds() {
        let b = make_base(ratio(3, 2)).unwrap();
        assert!(PointInJ::new(int(2), b.clone()).is_ok());
        assert!(PointInJ::new(int(0), b.clone()).is_ok());
        assert!(matches!(
            PointInJ::new(ratio(201, 100), b.clone()),
            Err(Error::NotInJ { .. })
        ));
        assert!(matches!(
            PointInJ::new(ratio(-1, 100), b),
            Err(Error::NotInJ { .. })
        ));
    }

    #[test]
    fn point_near_j_max_of_approximate_base() {
        let b = Base::approximate(ratio(3, 2), ratio(1, 1000)).unwrap();
        assert!(PointInJ::new(ratio(199, 100), b.clone()).is_ok());
        assert!(matches!(
            PointInJ::new(int(2), b),
            Err(Error::UndecidableAtPrecision(_))
        ));
    }
}
