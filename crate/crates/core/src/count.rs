//! Brute-force enumeration of all expansions of `x` to a fixed depth.
//!
//! A prefix `c_1 … c_n` extends to an expansion of `x` exactly when its
//! scaled remainder `q^n (x − Σ c_i q^{−i})` lies in `J_q`, so the search
//! never keeps a dead branch.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::classify::{self, Classification, Condition};
use crate::error::{Error, Result};
use crate::exactnum::{pow, Digit, PointInJ, Rational};
use crate::expand::{self, Mode};
use crate::sequences::Word;

/// Period search budget used when certifying a single surviving branch.
pub const PERIOD_CAP: usize = 1024;
/// Number of α digits used when certifying a single surviving branch.
pub const ALPHA_LEN: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchNode {
    pub prefix: Word,
    /// `x − Σ c_i q^{−i}` over the prefix.
    pub remainder: Rational,
    pub depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub prefixes: Vec<Word>,
    /// More than `cap` feasible prefixes exist; only the first `cap` are listed.
    pub overflow: bool,
}

/// Integer form of the search: with `q = a/b` and `x = u/s` the scaled
/// remainder after `n` digits is `num / (s·b^n)`.
struct Branching {
    a: BigInt,
    b: BigInt,
    a_minus_b: BigInt,
    top: Digit,
    top_b: BigInt,
}

impl Branching {
    fn new(p: &PointInJ) -> Result<(Branching, BigInt, BigInt)> {
        let base = p.base();
        if !base.is_exact() {
            return Err(Error::ExactBaseRequired);
        }
        let q = base.q();
        let a = q.numer().clone();
        let b = q.denom().clone();
        let top = base.top_digit();
        let br = Branching {
            a_minus_b: &a - &b,
            top_b: &b * BigInt::from(top),
            a,
            b,
            top,
        };
        Ok((br, p.x().numer().clone(), p.x().denom().clone()))
    }

    /// Feasible next digits and the successor numerators, in increasing digit
    /// order, for a node with numerator `num` whose children have scale `next_scale`.
    fn children(&self, num: &BigInt, next_scale: &BigInt) -> Vec<(Digit, BigInt)> {
        let lifted = &self.a * num;
        let hi = lifted.div_floor(next_scale);
        // need (lifted − d·S)(a−b) ≤ top·b·S
        let lo_num = &lifted * &self.a_minus_b - &self.top_b * next_scale;
        let lo = lo_num.div_ceil(&(&self.a_minus_b * next_scale));
        let lo = lo.max(BigInt::zero());
        let hi = hi.min(BigInt::from(self.top));
        let mut out = Vec::new();
        let (Some(lo), Some(hi)) = (lo.to_u32(), hi.to_u32()) else {
            return out;
        };
        for d in lo..=hi {
            out.push((d, &lifted - BigInt::from(d) * next_scale));
        }
        out
    }
}

/// All feasible branch nodes at `depth`, in lexicographic order of their
/// prefixes, stopping after `cap + 1` have been found.
pub fn enumerate_nodes(p: &PointInJ, depth: usize, cap: usize) -> Result<(Vec<BranchNode>, bool)> {
    let (br, num, scale) = Branching::new(p)?;
    let mut found = Vec::new();
    let mut prefix = Vec::with_capacity(depth);
    walk(&br, &num, &scale, depth, cap + 1, &mut prefix, &mut found);
    let overflow = found.len() > cap;
    found.truncate(cap);
    let q = p.base().q();
    let nodes = found
        .into_iter()
        .map(|(digits, num)| {
            let scale = &scale * num_traits::pow(br.b.clone(), depth);
            let scaled = Rational::new(num, scale);
            BranchNode {
                prefix: Word(digits),
                remainder: scaled / pow(q, depth),
                depth,
            }
        })
        .collect();
    Ok((nodes, overflow))
}

fn walk(
    br: &Branching,
    num: &BigInt,
    scale: &BigInt,
    left: usize,
    limit: usize,
    prefix: &mut Vec<Digit>,
    found: &mut Vec<(Vec<Digit>, BigInt)>,
) {
    if found.len() >= limit {
        return;
    }
    if left == 0 {
        found.push((prefix.clone(), num.clone()));
        return;
    }
    let next_scale = scale * &br.b;
    for (d, child) in br.children(num, &next_scale) {
        prefix.push(d);
        walk(br, &child, &next_scale, left - 1, limit, prefix, found);
        prefix.pop();
        if found.len() >= limit {
            return;
        }
    }
}

/// Feasible prefixes of length `depth` in lexicographic order, at most `cap` of them.
pub fn enumerate_prefixes(p: &PointInJ, depth: usize, cap: usize) -> Result<Enumeration> {
    let (nodes, overflow) = enumerate_nodes(p, depth, cap)?;
    Ok(Enumeration {
        prefixes: nodes.into_iter().map(|n| n.prefix).collect(),
        overflow,
    })
}

/// Number of feasible prefixes of length `depth`.
pub fn count_expansions(p: &PointInJ, depth: usize) -> Result<BigUint> {
    count_expansions_up_to(p, depth, None)
}

/// Like [`count_expansions`] but returns as soon as the count reaches `limit`.
/// Every feasible prefix has at least one feasible extension, so the running
/// total per level never decreases.
pub fn count_expansions_up_to(p: &PointInJ, depth: usize, limit: Option<u64>) -> Result<BigUint> {
    let (br, num, mut scale) = Branching::new(p)?;
    let limit = limit.map(BigUint::from);
    let mut level: BTreeMap<BigInt, BigUint> = BTreeMap::new();
    level.insert(num, BigUint::one());
    for _ in 0..depth {
        let next_scale = &scale * &br.b;
        let mut next: BTreeMap<BigInt, BigUint> = BTreeMap::new();
        for (num, mult) in &level {
            for (_, child) in br.children(num, &next_scale) {
                *next.entry(child).or_default() += mult;
            }
        }
        level = next;
        scale = next_scale;
        if let Some(limit) = &limit {
            let total: BigUint = level.values().sum();
            if total >= *limit {
                return Ok(limit.clone());
            }
        }
    }
    Ok(level.values().sum())
}

/// Uniqueness by brute force: two feasible prefixes prove `No`; a single one
/// is only promoted to `Yes` when its greedy expansion is eventually periodic
/// and passes the unique-expansion test.
pub fn is_unique_bruteforce(p: &PointInJ, depth: usize) -> Result<Classification> {
    let alpha = classify::alpha_reference(p.base(), ALPHA_LEN)?;
    is_unique_bruteforce_with(p, depth, &alpha, PERIOD_CAP)
}

/// [`is_unique_bruteforce`] with a caller-supplied α reference and period budget.
pub fn is_unique_bruteforce_with(
    p: &PointInJ,
    depth: usize,
    alpha: &classify::Reference,
    period_cap: usize,
) -> Result<Classification> {
    let e = enumerate_prefixes(p, depth, 2)?;
    match e.prefixes.as_slice() {
        [first, second, ..] => {
            let n = first
                .digits()
                .iter()
                .zip(second.digits())
                .position(|(a, b)| a != b)
                .map_or(depth, |i| i + 1);
            Ok(Classification::no(n, Condition::TwoFeasiblePrefixes))
        }
        [_] => match expand::detect_period(p, Mode::Greedy, period_cap)? {
            Some(c) => {
                let v = classify::is_unique_expansion(&c, alpha)?;
                Ok(if v.is_yes() {
                    v
                } else {
                    Classification::unknown()
                })
            }
            None => Ok(Classification::unknown()),
        },
        [] => Ok(Classification::unknown()),
    }
}
