//! Independent oracles and property checks shared by the core integration
//! tests and the acceptance suite. Every check returns `Err` with a
//! counterexample instead of panicking.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use wpp_core::arith::{neg_cf_dual, neg_cf_expand, neg_cf_fraction, weight_sequence};
use wpp_core::homlat::{HClass, Lattice};
use wpp_core::strings::{
    adjacent_ones_check, blowdown_selfints, delta_sequence, is_negative_definite, negative_intersection_matrix,
    xi_invariant, BlowdownKind, DivisorConfig,
};

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

/// Determinant by Gaussian elimination over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn det_oracle(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k].clone();
        for i in k + 1..n {
            let f = a[i][k].clone() / a[k][k].clone();
            for j in k..n {
                let v = a[k][j].clone() * f.clone();
                a[i][j] -= v;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

fn leading_minor(m: &[Vec<i64>], l: usize) -> Vec<Vec<i64>> {
    m[..l].iter().map(|r| r[..l].to_vec()).collect()
}

fn string_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=-1, 1..=10)
}

/// A chain grown from a single exceptional sphere by random toric and
/// half-toric blowups, so every component carries an honest class.
pub fn grown_chain(ops: &[(bool, usize)]) -> DivisorConfig {
    let l = Lattice::cp2(1);
    let mut d = DivisorConfig::new(l, vec![HClass::new(vec![1, -1])], vec!["L".into()]);
    for &(toric, pick) in ops {
        let n = d.len();
        d = if toric && n >= 2 {
            let i = pick % (n - 1);
            d.toric_blowup(i, i + 1).unwrap().0
        } else {
            let end = if pick % 2 == 0 { 0 } else { n - 1 };
            d.half_toric_blowup(end).unwrap().0
        };
    }
    d
}

fn is_chain(d: &DivisorConfig) -> bool {
    let adj = d.adjacency();
    (0..d.len()).all(|i| (0..d.len()).all(|j| i == j || adj[i][j] == i64::from(i.abs_diff(j) == 1)))
}

/// Intersection data that does not depend on the basis.
fn invariants(d: &DivisorConfig) -> (Vec<Vec<i64>>, Vec<i64>) {
    (d.adjacency(), d.classes.iter().map(|c| d.lattice.k_dot(c)).collect())
}

/// Δ-sequence entries equal the leading principal minors of the negated
/// intersection matrix, and negative definiteness matches their signs.
pub fn delta_matches_minors(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&string_strategy(), |s| {
            let m = negative_intersection_matrix(&s);
            let delta = delta_sequence(&s);
            prop_assert_eq!(delta.get(1), &BigInt::one());
            for l in 1..=s.len() {
                prop_assert_eq!(delta.get(l + 1), &det_oracle(&leading_minor(&m, l)));
            }
            let all_positive = (1..=s.len() + 1).all(|l| delta.get(l) > &BigInt::zero());
            prop_assert_eq!(is_negative_definite(&s), all_positive);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Blowing down a unit entry keeps the determinant; Ξ is unchanged by a
/// toric blowdown and grows by one under a half-toric one.
pub fn blowdown_invariants(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&string_strategy(), |s| {
            let det = det_oracle(&negative_intersection_matrix(&s));
            for i in (0..s.len()).filter(|&i| s[i] == -1) {
                let (t, kind) = blowdown_selfints(&s, i).unwrap();
                match kind {
                    BlowdownKind::Toric => prop_assert_eq!(xi_invariant(&t), xi_invariant(&s)),
                    BlowdownKind::HalfToric => prop_assert_eq!(xi_invariant(&t), xi_invariant(&s) + 1),
                    BlowdownKind::Isolated => continue,
                }
                prop_assert_eq!(det_oracle(&negative_intersection_matrix(&t)), det.clone());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Blowing up a chain and then blowing down the new sphere returns the
/// original configuration.
pub fn blowup_then_blowdown(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec((any::<bool>(), 0usize..16), 0..9),
        any::<bool>(),
        0usize..16,
    );
    runner(cases)
        .run(&strategy, |(ops, toric, pick)| {
            let d = grown_chain(&ops);
            prop_assert!(is_chain(&d));
            let n = d.len();
            let (up, pos) = if toric && n >= 2 {
                let i = pick % (n - 1);
                d.toric_blowup(i, i + 1).unwrap()
            } else {
                d.half_toric_blowup(if pick % 2 == 0 { 0 } else { n - 1 }).unwrap()
            };
            prop_assert!(is_chain(&up));
            let (down, _) = up.blowdown(pos).unwrap();
            prop_assert_eq!(down, d);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Blowing down a unit sphere and blowing the same point back up restores
/// all intersection numbers.
pub fn blowdown_then_blowup(cases: u32) -> Result<(), String> {
    let strategy = prop::collection::vec((any::<bool>(), 0usize..16), 1..9);
    runner(cases)
        .run(&strategy, |ops| {
            let d = grown_chain(&ops);
            let sq = d.selfints();
            for i in (0..d.len()).filter(|&i| sq[i] == -1) {
                let Ok((down, kind)) = d.blowdown(i) else { continue };
                let back = match kind {
                    BlowdownKind::Toric => down.toric_blowup(i - 1, i).unwrap().0,
                    BlowdownKind::HalfToric if i == 0 => down.half_toric_blowup(0).unwrap().0,
                    BlowdownKind::HalfToric => down.half_toric_blowup(i - 1).unwrap().0,
                    BlowdownKind::Isolated => continue,
                };
                prop_assert_eq!(invariants(&back), invariants(&d));
                prop_assert_eq!(back.lattice.rank, d.lattice.rank);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every tuple of `len` entries from `lo..=hi`.
pub fn tuples(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (lo..=hi).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// A string with a unit endpoint and all other entries at most −2 is
/// negative definite; checked for every such string up to length 7.
pub fn unit_endpoint_strings() -> Result<(), String> {
    let mut count = 0;
    for len in 1..=7 {
        for tail in tuples(len - 1, -6, -2) {
            let mut s = vec![-1];
            s.extend(tail);
            ensure(is_negative_definite(&s), || format!("{s:?} not negative definite"))?;
            count += 1;
        }
    }
    let want: usize = (0..7).map(|k| 5usize.pow(k)).sum();
    ensure(count == want, || format!("checked {count} strings, expected {want}"))
}

/// Unit entries of every chain reachable by toric and half-toric blowdowns,
/// computed on the negated entries `b_i = −s_i`.
fn reachable_units_ok(b: &[i64]) -> bool {
    let units: Vec<usize> = (0..b.len()).filter(|&i| b[i] == 1).collect();
    if units.len() > 2 || (units.len() == 2 && units[1] - units[0] != 1) {
        return false;
    }
    if b.len() == 1 {
        return true;
    }
    units.iter().all(|&k| {
        let mut next = b.to_vec();
        next.remove(k);
        if k > 0 {
            next[k - 1] -= 1;
        }
        if k < b.len() - 1 {
            next[k] -= 1;
        }
        reachable_units_ok(&next)
    })
}

/// Strings with a single unit entry never produce two non-adjacent units
/// under repeated blowdowns; checked for every such string up to length 7.
pub fn single_unit_blowdowns() -> Result<(), String> {
    let mut checked = 0;
    for len in 1..=7 {
        for s in tuples(len, -5, -1) {
            if s.iter().filter(|&&x| x == -1).count() != 1 {
                continue;
            }
            let b: Vec<i64> = s.iter().map(|x| -x).collect();
            ensure(reachable_units_ok(&b), || {
                format!("{s:?}: oracle found separated units")
            })?;
            ensure(matches!(adjacent_ones_check(&s), Ok(true)), || {
                format!("{s:?}: adjacent_ones_check")
            })?;
            checked += 1;
        }
    }
    // one unit position, four choices elsewhere
    let want: usize = (1..=7).map(|n| n * 4usize.pow(n as u32 - 1)).sum();
    ensure(checked == want, || {
        format!("checked {checked} strings, expected {want}")
    })
}

/// Square decomposition of a `p × q` rectangle, cutting the largest square
/// off the rectangle each time.
pub fn squares(p: i64, q: i64) -> Vec<i64> {
    let (mut x, mut y) = (p.max(q), p.min(q));
    let mut out = Vec::new();
    while y > 0 {
        let (t, r) = x.div_rem(&y);
        out.extend(std::iter::repeat_n(y, t as usize));
        (x, y) = (y, r);
    }
    out
}

/// `p/q = b_1 − 1/(b_2 − …)` with every `b_i ≥ 2`, by rounding up.
pub fn hj_oracle(p: i64, q: i64) -> Vec<i64> {
    let (mut x, mut y) = (p, q);
    let mut out = Vec::new();
    while y > 0 {
        let b = (x + y - 1) / y;
        out.push(b);
        (x, y) = (y, b * y - x);
    }
    out
}

/// `pq = Σ m²` and `p + q = Σ m + 1` for every coprime pair in `[1, n]²`.
pub fn weight_sequence_identities(n: i64) -> Result<(), String> {
    let mut pairs = 0u64;
    for p in 1..=n {
        for q in 1..=n {
            if p.gcd(&q) != 1 {
                continue;
            }
            let w = weight_sequence(p, q).map_err(|e| format!("({p},{q}): {e}"))?;
            let m = &w.m;
            ensure(m == &squares(p, q), || format!("({p},{q}): {m:?}"))?;
            ensure(p * q == m.iter().map(|x| x * x).sum::<i64>(), || {
                format!("({p},{q}): pq ≠ Σm²")
            })?;
            ensure(p + q == m.iter().sum::<i64>() + 1, || format!("({p},{q}): p+q ≠ Σm+1"))?;
            ensure(m.last() == Some(&1), || {
                format!("({p},{q}): last weight {:?}", m.last())
            })?;
            pairs += 1;
        }
    }
    // coprime pairs in [1,n]², counted by Euler's totient
    let phi: u64 = (1..=n).map(|k| (1..=k).filter(|j| j.gcd(&k) == 1).count() as u64).sum();
    ensure(pairs == 2 * phi - 1, || {
        format!("{pairs} pairs, expected {}", 2 * phi - 1)
    })
}

/// Reversing the continued fraction of `p/q` gives the one of `p/q'` with
/// `q q' ≡ 1 (mod p)`, for every coprime `1 ≤ q < p ≤ n`.
pub fn reversal_duality(n: i64) -> Result<(), String> {
    for p in 2..=n {
        for q in 1..p {
            if p.gcd(&q) != 1 {
                continue;
            }
            let cf = neg_cf_expand(p, q).map_err(|e| format!("{p}/{q}: {e}"))?;
            ensure(cf.entries == hj_oracle(p, q), || format!("{p}/{q}: {:?}", cf.entries))?;
            ensure(neg_cf_fraction(&cf.entries) == (p.into(), q.into()), || {
                format!("{p}/{q}: fraction does not round trip")
            })?;
            let d = neg_cf_dual(p, q).map_err(|e| format!("{p}/{q}: {e}"))?;
            ensure((q * d).rem_euclid(p) == 1 % p && (1..p).contains(&d), || {
                format!("{p}/{q}: dual {d}")
            })?;
            let mut rev = cf.entries.clone();
            rev.reverse();
            let dual = neg_cf_expand(p, d).map_err(|e| format!("{p}/{d}: {e}"))?;
            ensure(dual.entries == rev, || {
                format!("{p}/{q}: reversed {rev:?}, dual {:?}", dual.entries)
            })?;
        }
    }
    Ok(())
}
