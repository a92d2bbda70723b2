//! Hausdorff dimensions of self-similar digit sets via Moran equations.
//!
//! With `t = q^{−s}` every Moran equation used here becomes `P(t) = 1` for a
//! polynomial `P` with integer coefficients. The root is bracketed by exact
//! dyadic bisection; only the final conversion `s = −ln t / ln q` is done in
//! floating point, on both ends of the bracket.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{int, pow, to_f64, Base, Digit, Rational};
use crate::expand;
use crate::sequences::Word;

/// A closed bracket `[lo, hi]` around a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.mid())
    }
}

/// Bisects a sign change of `f` on `[lo, hi]`, where `below(lo)` holds and
/// `below(hi)` does not, until the width is at most `width`.
fn bisect(
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
    below: impl Fn(&Rational) -> bool,
) -> Bracket {
    let steps = bisection_steps(&(&hi - &lo), width);
    for _ in 0..steps {
        let mid = (&lo + &hi) / int(2);
        if below(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bracket { lo, hi }
}

/// `⌈log₂(span / width)⌉`, computed exactly.
fn bisection_steps(span: &Rational, width: &Rational) -> usize {
    let mut steps = 0;
    let mut w = span.clone();
    while w > *width {
        w /= int(2);
        steps += 1;
    }
    steps
}

fn positive_tolerance(tol: &Rational) -> Result<()> {
    if !tol.is_positive() {
        return Err(Error::InvalidConfig(format!(
            "tolerance {tol} must be positive"
        )));
    }
    Ok(())
}

/// A digit system `Σ w_i q^{−l_i s}`, optionally raised to the power `k` and
/// with a single term `q^{−L s}` subtracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IfsSystem {
    base: Base,
    pieces: Vec<(usize, BigUint)>,
    power: u32,
    subtract: Option<usize>,
    poly: Vec<BigInt>,
}

impl IfsSystem {
    pub fn new(base: Base, pieces: Vec<(usize, BigUint)>) -> Result<IfsSystem> {
        IfsSystem::with_correction(base, pieces, 1, None)
    }

    pub fn with_correction(
        base: Base,
        pieces: Vec<(usize, BigUint)>,
        power: u32,
        subtract: Option<usize>,
    ) -> Result<IfsSystem> {
        if pieces.is_empty() {
            return Err(Error::InvalidConfig(
                "an IFS needs at least one piece".into(),
            ));
        }
        if let Some((l, w)) = pieces.iter().find(|(l, w)| *l == 0 || w.is_zero()) {
            return Err(Error::InvalidConfig(format!(
                "piece (length {l}, weight {w}) must have positive length and weight"
            )));
        }
        if power == 0 || subtract == Some(0) {
            return Err(Error::InvalidConfig(
                "power and correction length must be positive".into(),
            ));
        }
        let degree = pieces.iter().map(|(l, _)| *l).max().unwrap_or(0);
        let mut single = vec![BigInt::zero(); degree + 1];
        for (l, w) in &pieces {
            single[*l] += BigInt::from(w.clone());
        }
        let mut poly = single.clone();
        for _ in 1..power {
            poly = poly_mul(&poly, &single);
        }
        if let Some(l) = subtract {
            if poly.len() <= l {
                poly.resize(l + 1, BigInt::zero());
            }
            poly[l] -= 1;
        }
        Ok(IfsSystem {
            base,
            pieces,
            power,
            subtract,
            poly,
        })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn pieces(&self) -> &[(usize, BigUint)] {
        &self.pieces
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn subtract(&self) -> Option<usize> {
        self.subtract
    }

    /// `P(t)` exactly.
    pub fn eval_t(&self, t: &Rational) -> Rational {
        self.poly.iter().rev().fold(Rational::zero(), |acc, c| {
            acc * t + Rational::from_integer(c.clone())
        })
    }

    /// `M(s) = P(q^{−s})` in floating point, at the centre of the base.
    pub fn moran_value(&self, s: f64) -> f64 {
        let t = to_f64(self.base.q()).powf(-s);
        self.poly
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    fn below_one(&self, t: &Rational) -> bool {
        self.eval_t(t) < Rational::one()
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Solution of a Moran equation: the bracket on `t = q^{−s}` and the
/// resulting enclosure of `s`, which also absorbs the base's error bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoranRoot {
    #[serde(skip)]
    pub t: Bracket,
    pub s: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl fmt::Display for MoranRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.s)
    }
}

fn ln(r: &Rational) -> f64 {
    to_f64(r).ln()
}

/// Solves `M(s) = 1` for `s ≥ 0`.
pub fn moran_solve(sys: &IfsSystem, tolerance: &Rational) -> Result<MoranRoot> {
    moran_solve_in(sys, &Rational::zero(), tolerance)
}

/// Solves `P(t) = 1` for `t ∈ [t_min, 1]`, where `P(t_min) < 1` is required.
pub fn moran_solve_in(
    sys: &IfsSystem,
    t_min: &Rational,
    tolerance: &Rational,
) -> Result<MoranRoot> {
    positive_tolerance(tolerance)?;
    let one = Rational::one();
    if !sys.below_one(t_min) {
        return Err(Error::NoRootInBracket(format!(
            "the Moran function is already ≥ 1 at t = {t_min}"
        )));
    }
    let at_one = sys.eval_t(&one);
    if at_one < one {
        return Err(Error::NoRootInBracket(
            "the Moran function stays below 1 for every s ≥ 0".into(),
        ));
    }
    let (q_lo, q_hi) = sys.base.bounds();
    let ln_q_lo = ln(&q_lo);
    if at_one == one {
        let t = Bracket {
            lo: one.clone(),
            hi: one,
        };
        return Ok(MoranRoot {
            t,
            s: 0.0,
            s_lo: 0.0,
            s_hi: 0.0,
        });
    }
    // first get a positive lower end, then size the bracket so that its
    // image under −ln t / ln q is within the tolerance
    let mut lo = t_min.clone();
    let mut hi = one;
    while lo.is_zero() {
        let mid = &hi / int(2);
        if sys.below_one(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tol = to_f64(tolerance);
    let target = tol * to_f64(&lo) * ln_q_lo;
    let target = Rational::from_float(target)
        .filter(|t| t.is_positive())
        .unwrap_or_else(|| Rational::new(BigInt::one(), BigInt::one() << 1100));
    let t = bisect(lo, hi, &target, |t| sys.below_one(t));
    let s_hi = -ln(&t.lo) / ln_q_lo;
    let s_lo = -ln(&t.hi) / ln(&q_hi);
    let s = -ln(&t.mid()) / ln(sys.base.q());
    Ok(MoranRoot { t, s, s_lo, s_hi })
}

/// The period `α_1 … α_n` of a periodic quasi-greedy expansion of 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaPeriod(Word);

impl AlphaPeriod {
    /// Requires `α_1 ≥ 1` and every cyclic shift of the word to be `≤` the word.
    pub fn new(word: Word) -> Result<AlphaPeriod> {
        let d = word.digits();
        if d.first().is_none_or(|&a| a == 0) {
            return Err(Error::InvalidAlphaPeriod(format!(
                "'{word}' must be nonempty and start with a positive digit"
            )));
        }
        let n = d.len();
        for k in 1..n {
            let rotated: Vec<Digit> = d[k..].iter().chain(&d[..k]).copied().collect();
            if rotated.as_slice() > d {
                return Err(Error::InvalidAlphaPeriod(format!(
                    "the rotation of '{word}' by {k} exceeds it"
                )));
            }
        }
        Ok(AlphaPeriod(word))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn digits(&self) -> &[Digit] {
        self.0.digits()
    }
}

impl std::str::FromStr for AlphaPeriod {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlphaPeriod> {
        AlphaPeriod::new(s.parse()?)
    }
}

/// Words `α_1 … α_{j−1} i` for `0 ≤ i < α_j`, followed by `α_1 … α_n`.
pub fn words_w(ap: &AlphaPeriod) -> Vec<Word> {
    let d = ap.digits();
    let mut out = Vec::new();
    for j in 0..d.len() {
        for i in 0..d[j] {
            let mut w = d[..j].to_vec();
            w.push(i);
            out.push(Word(w));
        }
    }
    out.push(ap.word().clone());
    out
}

fn w_pieces(ap: &AlphaPeriod) -> Vec<(usize, BigUint)> {
    let mut pieces: Vec<(usize, BigUint)> = ap
        .digits()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(j, &a)| (j + 1, BigUint::from(a)))
        .collect();
    pieces.push((ap.digits().len(), BigUint::one()));
    pieces
}

/// The base `r > 1` with `α_1/r + ⋯ + α_{n−1}/r^{n−1} + (α_n + 1)/r^n = 1`.
pub fn base_from_alpha_period(ap: &AlphaPeriod, tolerance: &Rational) -> Result<Bracket> {
    positive_tolerance(tolerance)?;
    let d = ap.digits();
    let n = d.len();
    // f(r) = Σ α̃_j r^{−j}, strictly decreasing for r > 0
    let f = |r: &Rational| {
        let inv = r.recip();
        let mut acc = Rational::zero();
        for j in (0..n).rev() {
            let a = d[j] + u32::from(j == n - 1);
            acc = (acc + int(a as i64)) * &inv;
        }
        acc
    };
    let one = Rational::one();
    let hi = int(d[0] as i64 + 1);
    if f(&hi) == one {
        return Ok(Bracket { lo: hi.clone(), hi });
    }
    // f > 1 means r is still below the root
    Ok(bisect(one.clone(), hi, tolerance, |r| f(r) > one))
}

/// `dim G_{r,q} = log r / log q` where `r` is the base whose α has period `ap`.
pub fn dim_g(ap: &AlphaPeriod, q: &Base, tolerance: &Rational) -> Result<MoranRoot> {
    positive_tolerance(tolerance)?;
    let r = base_from_alpha_period(ap, tolerance)?;
    let (q_lo, _) = q.bounds();
    if r.hi >= q_lo {
        return Err(Error::BaseOrderViolation {
            r: format!("{:.12}", r.approx()),
            q: q.to_string(),
        });
    }
    let sys = IfsSystem::new(q.clone(), w_pieces(ap))?;
    let root = moran_solve(&sys, tolerance)?;
    let closed = r.approx().ln() / to_f64(q.q()).ln();
    check_close(&root, closed, tolerance, "log r / log q")?;
    Ok(root)
}

fn check_close(root: &MoranRoot, closed: f64, tolerance: &Rational, what: &str) -> Result<()> {
    let slack = (10.0 * to_f64(tolerance)).max(1e-12) + (root.s_hi - root.s_lo);
    if (root.s - closed).abs() > slack {
        return Err(Error::Postcondition(format!(
            "Moran root {} differs from {what} = {closed}",
            root.s
        )));
    }
    Ok(())
}

/// The largest `N` with `1/q + ⋯ + 1/q^{2N−1} < 1`, for `q` between the
/// tribonacci constant and 2.
pub fn n_of_q(q: &Rational) -> Result<usize> {
    if *q >= int(2) {
        return Err(Error::BaseOutOfRange(format!("{q} must be below 2")));
    }
    let inv = q.recip();
    let partial = |terms: usize| {
        let mut sum = Rational::zero();
        let mut p = Rational::one();
        for _ in 0..terms {
            p *= &inv;
            sum += &p;
        }
        sum
    };
    let one = Rational::one();
    if partial(3) >= one {
        return Err(Error::BelowTribonacci(format!(
            "1/q + 1/q² + 1/q³ ≥ 1 for q = {q}"
        )));
    }
    let mut n = 2;
    // extend by two terms at a time; the full series sums to 1/(q−1) > 1
    let mut sum = partial(3);
    let mut p = pow(&inv, 3);
    loop {
        p *= &inv;
        sum += &p;
        p *= &inv;
        sum += &p;
        if sum >= one {
            return Ok(n);
        }
        n += 1;
    }
}

/// `dim I_q = log(2^N − 2) / (N log q)` with `N = N(q)`.
pub fn dim_i(q: &Rational, tolerance: &Rational) -> Result<(usize, MoranRoot)> {
    let n = n_of_q(q)?;
    let weight = (BigUint::one() << n) - BigUint::from(2u32);
    let sys = IfsSystem::new(Base::new(q.clone())?, vec![(n, weight)])?;
    let root = moran_solve(&sys, tolerance)?;
    let closed = ((2f64).powi(n as i32) - 2.0).ln() / (n as f64 * to_f64(q).ln());
    check_close(&root, closed, tolerance, "the closed form")?;
    Ok((n, root))
}

/// `α̃_1 … α̃_n`: the first `n` digits of α(q) with the last one increased by 1.
fn alpha_tilde(base: &Base, n: usize) -> Result<Vec<Digit>> {
    let mut a = expand::alpha_prefix(base, n)?.0;
    if let Some(last) = a.last_mut() {
        *last += 1;
    }
    Ok(a)
}

fn validate_blocks(base: &Base, k: usize, n: usize, blocks: &[usize]) -> Result<Vec<Digit>> {
    if k == 0 || blocks.len() != k {
        return Err(Error::InvalidBlock(format!(
            "expected {k} block lengths, got {}",
            blocks.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidBlock("n must be positive".into()));
    }
    let alpha = expand::alpha_prefix(base, n.max(*blocks.iter().max().unwrap_or(&1)))?;
    for &m in blocks {
        if m == 0 || m > n {
            return Err(Error::InvalidBlock(format!(
                "block length {m} must lie in 1..={n}"
            )));
        }
        if alpha.digits()[m - 1] == 0 {
            return Err(Error::InvalidBlock(format!(
                "α_{m} = 0 admits no block of length {m}"
            )));
        }
    }
    Ok(alpha.0)
}

/// The system behind `C(s) = (Σ_{j≤n} α̃_j q^{−js})^k − q^{−(m_1+⋯+m_k)s}`.
pub fn c_system(base: &Base, k: usize, n: usize, blocks: &[usize]) -> Result<IfsSystem> {
    validate_blocks(base, k, n, blocks)?;
    let pieces = alpha_tilde(base, n)?
        .into_iter()
        .enumerate()
        .filter(|(_, a)| *a > 0)
        .map(|(j, a)| (j + 1, BigUint::from(a)))
        .collect();
    let total: usize = blocks.iter().sum();
    let power =
        u32::try_from(k).map_err(|_| Error::InvalidBlock(format!("k = {k} is too large")))?;
    IfsSystem::with_correction(base.clone(), pieces, power, Some(total))
}

/// `C(t)` at `t = q^{−s}`, exactly.
pub fn c_of_t(base: &Base, k: usize, n: usize, blocks: &[usize], t: &Rational) -> Result<Rational> {
    Ok(c_system(base, k, n, blocks)?.eval_t(t))
}

/// `C(s)` for integer `s`, exactly.
pub fn c_of_s(base: &Base, k: usize, n: usize, blocks: &[usize], s: u32) -> Result<Rational> {
    c_of_t(base, k, n, blocks, &pow(&base.q().recip(), s as usize))
}

/// `(1 + q^{−n})^k < 1 + q^{−(m_1+⋯+m_k)}`.
pub fn eq24_holds(q: &Rational, k: usize, n: usize, blocks: &[usize]) -> bool {
    let inv = q.recip();
    let lhs = pow(&(Rational::one() + pow(&inv, n)), k);
    let rhs = Rational::one() + pow(&inv, blocks.iter().sum());
    lhs < rhs
}

/// Smallest `n ≥ max m_j` satisfying the growth condition, searched up to `n_cap`.
pub fn minimal_n(q: &Rational, blocks: &[usize], n_cap: usize) -> Result<usize> {
    let start = blocks.iter().copied().max().unwrap_or(1).max(1);
    (start..=n_cap)
        .find(|&n| eq24_holds(q, blocks.len(), n, blocks))
        .ok_or_else(|| {
            Error::GrowNRequired(format!("no n ≤ {n_cap} satisfies the growth condition"))
        })
}

/// Upper bound `s < 1` for the dimension of the set of `x` whose greedy
/// expansion avoids a word decomposing into blocks of lengths `m_1 … m_k`.
pub fn thm28_bound(
    base: &Base,
    k: usize,
    n: usize,
    blocks: &[usize],
    tolerance: &Rational,
) -> Result<MoranRoot> {
    if !base.is_exact() {
        return Err(Error::ExactBaseRequired);
    }
    let sys = c_system(base, k, n, blocks)?;
    if !eq24_holds(base.q(), k, n, blocks) {
        return Err(Error::GrowNRequired(format!(
            "(1 + q^-{n})^{k} ≥ 1 + q^-{}",
            blocks.iter().sum::<usize>()
        )));
    }
    let t_min = base.q().recip();
    let c1 = sys.eval_t(&t_min);
    if c1 >= Rational::one() {
        return Err(Error::Postcondition(format!("C(1) = {c1} is not below 1")));
    }
    let root = moran_solve_in(&sys, &t_min, tolerance)?;
    if root.s_hi >= 1.0 {
        return Err(Error::Postcondition(format!(
            "bound {} is not below 1",
            root.s
        )));
    }
    Ok(root)
}

/// A block `α_1 … α_{m−1} ℓ` with `ℓ < α_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub m: usize,
    pub l: Digit,
}

/// Parses `v` into blocks `α_1 … α_{m−1} ℓ` with `ℓ < α_m`, extending the last
/// block on the right when `v` ends inside a run of α digits.
pub fn decompose_greedy_word(v: &Word, alpha: &Word) -> Result<Vec<Block>> {
    let v = v.digits();
    let a = alpha.digits();
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let rest = &v[i..];
        let j = rest.iter().zip(a).take_while(|(x, y)| x == y).count();
        if j == rest.len() {
            // v ends while still matching α: continue with α until a positive
            // digit can be undercut by ℓ = 0
            let m = (j..a.len()).find(|&m| a[m] > 0).ok_or_else(|| {
                Error::NotDecomposable(format!(
                    "the α prefix is too short to close the block at position {}",
                    i + 1
                ))
            })?;
            out.push(Block { m: m + 1, l: 0 });
            break;
        }
        if j == a.len() {
            return Err(Error::NotDecomposable(format!(
                "the α prefix is too short to parse position {}",
                i + 1
            )));
        }
        let d = rest[j];
        if d > a[j] {
            return Err(Error::NotDecomposable(format!(
                "digit {d} at position {} exceeds α_{} = {}",
                i + j + 1,
                j + 1,
                a[j]
            )));
        }
        out.push(Block { m: j + 1, l: d });
        i += j + 1;
    }
    Ok(out)
}

/// `q_m ∈ (m, m+1)` with `m/q_m + 1/q_m² = 1`.
pub fn q_m_root(m: u32, tolerance: &Rational) -> Result<Bracket> {
    positive_tolerance(tolerance)?;
    if m == 0 {
        return Err(Error::BaseOutOfRange("m must be at least 1".into()));
    }
    let mm = int(m as i64);
    // q² − m q − 1 < 0 below the root
    Ok(bisect(mm.clone(), &mm + int(1), tolerance, |q| {
        q * q - &mm * q - int(1) < Rational::zero()
    }))
}
