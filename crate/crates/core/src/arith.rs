//! Number-theoretic primitives: modular inverses, weight residues, negative
//! (Hirzebruch–Jung) continued fractions and weight sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("weights {0}, {1}, {2} are not pairwise coprime")]
    NotPairwiseCoprime(u64, u64, u64),
    #[error("weight 1 gives fewer than three singular points: ({0}, {1}, {2})")]
    DegenerateWeight(u64, u64, u64),
    #[error("weights must be positive")]
    NonPositiveWeight,
    #[error("invalid fraction {0}/{1}: need p > q >= 1 coprime")]
    InvalidFraction(i64, i64),
    #[error("({0}, {1}) is not a coprime pair")]
    NotCoprime(i64, i64),
}

/// Inverse of `x` modulo `m` in `0..m`, or `None` when `gcd(x, m) != 1`.
pub fn mod_inverse(x: i64, m: i64) -> Option<i64> {
    if m <= 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let ext = (x.rem_euclid(m) as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as i64)
}

/// A pairwise coprime weight triple with its six residues.
///
/// `a_b` is the residue mod `a` with `a_b * b ≡ c`, `a_c * c ≡ b`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub a_b: u64,
    pub a_c: u64,
    pub b_a: u64,
    pub b_c: u64,
    pub c_a: u64,
    pub c_b: u64,
}

/// Residue `t` mod `m` with `t * x ≡ y (mod m)`.
fn solve_residue(m: u64, x: u64, y: u64) -> u64 {
    let inv = mod_inverse((x % m) as i64, m as i64).expect("coprime by construction") as u128;
    ((inv * (y % m) as u128) % m as u128) as u64
}

pub fn make_weight_triple(a: u64, b: u64, c: u64) -> Result<WeightTriple, ArithError> {
    if a == 0 || b == 0 || c == 0 {
        return Err(ArithError::NonPositiveWeight);
    }
    if a.gcd(&b) > 1 || a.gcd(&c) > 1 || b.gcd(&c) > 1 {
        return Err(ArithError::NotPairwiseCoprime(a, b, c));
    }
    if a == 1 || b == 1 || c == 1 {
        return Err(ArithError::DegenerateWeight(a, b, c));
    }
    Ok(WeightTriple {
        a,
        b,
        c,
        a_b: solve_residue(a, b, c),
        a_c: solve_residue(a, c, b),
        b_a: solve_residue(b, a, c),
        b_c: solve_residue(b, c, a),
        c_a: solve_residue(c, a, b),
        c_b: solve_residue(c, b, a),
    })
}

impl WeightTriple {
    pub fn weights(&self) -> [u64; 3] {
        [self.a, self.b, self.c]
    }

    /// True when every documented congruence holds.
    pub fn check_invariants(&self) -> bool {
        let ok = |m: u64, r1: u64, x1: u64, r2: u64, x2: u64| {
            let m128 = m as u128;
            0 < r1
                && r1 < m
                && 0 < r2
                && r2 < m
                && (r1 as u128 * x1 as u128) % m128 == (x2 as u128) % m128
                && (r2 as u128 * x2 as u128) % m128 == (x1 as u128) % m128
                && (r1 as u128 * r2 as u128) % m128 == 1
        };
        ok(self.a, self.a_b, self.b, self.a_c, self.c)
            && ok(self.b, self.b_c, self.c, self.b_a, self.a)
            && ok(self.c, self.c_a, self.a, self.c_b, self.b)
    }
}

/// A negative continued fraction `b_1 - 1/(b_2 - 1/(... - 1/b_k))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegCF {
    pub entries: Vec<i64>,
    pub p: i64,
    pub q: i64,
}

/// Hirzebruch–Jung expansion of `p/q`: all entries are at least 2.
pub fn neg_cf_expand(p: i64, q: i64) -> Result<NegCF, ArithError> {
    if !(p > q && q >= 1) || p.gcd(&q) != 1 {
        return Err(ArithError::InvalidFraction(p, q));
    }
    let mut entries = Vec::new();
    let (mut x, mut y) = (p as i128, q as i128);
    while y != 0 {
        let b = Integer::div_ceil(&x, &y);
        entries.push(b as i64);
        let next = b * y - x;
        x = y;
        y = next;
    }
    Ok(NegCF { entries, p, q })
}

/// Exact value of a continued fraction with arbitrary integer entries.
///
/// Returns `None` when some tail evaluates to zero, i.e. the expression
/// divides by zero.
pub fn neg_cf_value(entries: &[i64]) -> Option<BigRational> {
    let (last, rest) = entries.split_last()?;
    let mut acc = BigRational::from_integer(BigInt::from(*last));
    for b in rest.iter().rev() {
        if acc.is_zero() {
            return None;
        }
        acc = BigRational::from_integer(BigInt::from(*b)) - acc.recip();
    }
    Some(acc)
}

/// Numerator and denominator of the continued fraction, computed with the
/// three-term recurrence (no division). For entries all at least 2 this is
/// the reduced fraction.
pub fn neg_cf_fraction(entries: &[i64]) -> (BigInt, BigInt) {
    // x_{j} = b_j x_{j+1} - x_{j+2}, evaluated from the tail.
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for b in entries.iter().rev() {
        let next = BigInt::from(*b) * &num - &den;
        den = num;
        num = next;
    }
    (num, den)
}

/// The dual residue `q'` with `q q' ≡ 1 (mod p)`; its expansion is the
/// reversal of the expansion of `p/q`.
pub fn neg_cf_dual(p: i64, q: i64) -> Result<i64, ArithError> {
    if !(p > q && q >= 1) || p.gcd(&q) != 1 {
        return Err(ArithError::InvalidFraction(p, q));
    }
    Ok(mod_inverse(q, p).expect("coprime checked"))
}

/// Weight sequence of a coprime pair: side lengths of the square
/// decomposition of a `p × q` rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSeq {
    pub p: i64,
    pub q: i64,
    pub m: Vec<i64>,
}

impl WeightSeq {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// The intermediate pairs `(p_i, q_i)` visited by the recursion, one per
    /// entry of `m`.
    pub fn pairs(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.m.len());
        let (mut x, mut y) = (self.p, self.q);
        for _ in 0..self.m.len() {
            out.push((x, y));
            let (nx, ny) = ((x - y).abs(), x.min(y));
            x = nx;
            y = ny;
        }
        out
    }
}

pub fn weight_sequence(p: i64, q: i64) -> Result<WeightSeq, ArithError> {
    if p < 0 || q < 0 || (p == 0 && q == 0) || p.gcd(&q) != 1 {
        return Err(ArithError::NotCoprime(p, q));
    }
    let mut m = Vec::new();
    let (mut x, mut y) = (p, q);
    if x == 0 || y == 0 {
        // (0,1) and (1,0): nothing to resolve.
        return Ok(WeightSeq { p, q, m });
    }
    loop {
        m.push(x.min(y));
        if x == 1 && y == 1 {
            break;
        }
        let (nx, ny) = ((x - y).abs(), x.min(y));
        x = nx;
        y = ny;
    }
    Ok(WeightSeq { p, q, m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_golden() {
        let w = make_weight_triple(2, 3, 5).unwrap();
        assert_eq!((w.a_b, w.a_c, w.b_a, w.b_c, w.c_a, w.c_b), (1, 1, 1, 1, 4, 4));
        let w = make_weight_triple(11, 13, 14).unwrap();
        assert_eq!((w.a_b, w.b_c, w.c_a), (7, 11, 5));
        assert!(w.check_invariants());
        assert_eq!(
            make_weight_triple(2, 4, 5),
            Err(ArithError::NotPairwiseCoprime(2, 4, 5))
        );
        assert!(matches!(
            make_weight_triple(1, 1, 5),
            Err(ArithError::DegenerateWeight(..))
        ));
    }

    #[test]
    fn residues_brute_force() {
        for a in 2..20u64 {
            for b in 2..20u64 {
                for c in 2..20u64 {
                    let Ok(w) = make_weight_triple(a, b, c) else {
                        continue;
                    };
                    // independent oracle: smallest positive solution by search
                    let find = |m: u64, x: u64, y: u64| (1..m).find(|t| t * x % m == y % m).unwrap();
                    assert_eq!(w.a_b, find(a, b, c));
                    assert_eq!(w.a_c, find(a, c, b));
                    assert_eq!(w.b_a, find(b, a, c));
                    assert_eq!(w.b_c, find(b, c, a));
                    assert_eq!(w.c_a, find(c, a, b));
                    assert_eq!(w.c_b, find(c, b, a));
                }
            }
        }
    }

    #[test]
    fn expansions() {
        assert_eq!(neg_cf_expand(5, 4).unwrap().entries, vec![2, 2, 2, 2]);
        assert_eq!(neg_cf_expand(11, 7).unwrap().entries, vec![2, 3, 2, 2]);
        assert_eq!(neg_cf_expand(2, 1).unwrap().entries, vec![2]);
        assert!(neg_cf_expand(3, 3).is_err());
        assert!(neg_cf_expand(6, 4).is_err());
        assert_eq!(neg_cf_dual(5, 4).unwrap(), 4);
        assert_eq!(neg_cf_dual(7, 3).unwrap(), 5);
        assert_eq!(neg_cf_dual(2, 1).unwrap(), 1);
    }

    #[test]
    fn cf_value_matches_fraction() {
        let v = neg_cf_value(&[2, 2, 2, 2]).unwrap();
        assert_eq!(v, BigRational::new(5.into(), 4.into()));
        assert_eq!(neg_cf_fraction(&[3, 2, 2]), (BigInt::from(7), BigInt::from(3)));
        assert!(neg_cf_value(&[1, 1]).unwrap().is_zero());
        assert!(neg_cf_value(&[1, 1, 1]).is_none());
    }

    #[test]
    fn weight_sequences() {
        assert_eq!(weight_sequence(3, 2).unwrap().m, vec![2, 1, 1]);
        assert!(weight_sequence(0, 1).unwrap().m.is_empty());
        assert_eq!(weight_sequence(5, 3).unwrap().m, vec![3, 2, 1, 1]);
        assert_eq!(weight_sequence(2, 3).unwrap().m, vec![2, 1, 1]);
        assert_eq!(weight_sequence(1, 1).unwrap().m, vec![1]);
        assert!(weight_sequence(4, 2).is_err());
        assert_eq!(weight_sequence(3, 2).unwrap().pairs(), vec![(3, 2), (1, 2), (1, 1)]);
    }
}
