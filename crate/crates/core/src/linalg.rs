//! Exact sparse rank machinery.
//!
//! Rows are sparse integer vectors kept in primitive form (content 1); the
//! incremental reducer uses fraction-free cross-multiplication so
//! intermediate entries stay integral. A modular variant computes ranks over
//! random word-sized primes for large row counts, with agreement across
//! independent primes required before the value is accepted.

use crate::Rat;
use num::{BigInt, Integer, Signed, Zero};
use std::collections::BTreeMap;

/// Sparse rational row keyed by dense column ids.
pub type SparseRow = BTreeMap<usize, Rat>;

/// Sparse integer row in primitive form.
type IntRow = BTreeMap<usize, BigInt>;

fn to_primitive_int_row(row: &SparseRow) -> IntRow {
    let mut lcm = BigInt::from(1);
    for v in row.values() {
        if !v.is_zero() {
            lcm = lcm.lcm(v.denom());
        }
    }
    let mut out: IntRow = BTreeMap::new();
    for (c, v) in row {
        if v.is_zero() {
            continue;
        }
        let scaled = v.numer() * (&lcm / v.denom());
        out.insert(*c, scaled);
    }
    normalize(&mut out);
    out
}

fn normalize(row: &mut IntRow) {
    row.retain(|_, v| !v.is_zero());
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
    }
    if g > BigInt::from(1) {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
    // Canonical sign: leading entry positive.
    if let Some((_, lead)) = row.iter().next() {
        if lead.is_negative() {
            for v in row.values_mut() {
                *v = -&*v;
            }
        }
    }
}

/// Incrementally maintained row-echelon basis over the integers.
#[derive(Debug, Clone, Default)]
pub struct RowBasis {
    /// Pivot rows sorted by leading column.
    rows: BTreeMap<usize, IntRow>,
}

impl RowBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `cand` against the current pivots in place.
    fn reduce(&self, cand: &mut IntRow) {
        loop {
            let lead_col = match cand.keys().next() {
                Some(c) => *c,
                None => return,
            };
            let pivot = match self.rows.get(&lead_col) {
                Some(p) => p,
                None => return,
            };
            // Fraction-free elimination of the leading entry.
            let a = cand[&lead_col].clone();
            let b = pivot[&lead_col].clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            for v in cand.values_mut() {
                *v = &*v * &b;
            }
            for (c, v) in pivot {
                let e = cand.entry(*c).or_insert_with(BigInt::zero);
                *e -= &a * v;
            }
            normalize(cand);
        }
    }

    /// Inserts a rational row; returns true when it enlarged the span.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        self.insert_int(to_primitive_int_row(row))
    }

    fn insert_int(&mut self, mut cand: IntRow) -> bool {
        self.reduce(&mut cand);
        match cand.keys().next() {
            None => false,
            Some(&lead) => {
                self.rows.insert(lead, cand);
                true
            }
        }
    }

    /// True when the row already lies in the span.
    pub fn contains(&self, row: &SparseRow) -> bool {
        let mut cand = to_primitive_int_row(row);
        self.reduce(&mut cand);
        cand.is_empty()
    }

    /// The reduced pivot rows, as rational vectors.
    pub fn basis_rows(&self) -> Vec<SparseRow> {
        self.rows
            .values()
            .map(|r| {
                r.iter().map(|(c, v)| (*c, Rat::from_integer(v.clone()))).collect::<SparseRow>()
            })
            .collect()
    }
}

/// Exact rank of a list of sparse rational rows.
pub fn rank_exact<'a>(rows: impl IntoIterator<Item = &'a SparseRow>) -> usize {
    let mut basis = RowBasis::new();
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Next prime at or above `start`, capped below 2^62.
pub fn prime_from(mut start: u64) -> u64 {
    start |= 1;
    while !is_prime_u64(start) {
        start += 2;
    }
    start
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn row_mod_p(row: &SparseRow, p: u64) -> Option<Vec<(usize, u64)>> {
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(row.len());
    for (c, v) in row {
        if v.is_zero() {
            continue;
        }
        let den = v.denom().mod_floor(&pb);
        let den: u64 = den.try_into().ok()?;
        if den == 0 {
            return None; // prime divides a denominator; unusable
        }
        let num = v.numer().mod_floor(&pb);
        let num: u64 = num.try_into().ok()?;
        let r = mulmod(num, invmod(den, p), p);
        if r != 0 {
            out.push((*c, r));
        }
    }
    Some(out)
}

/// Rank of the rows modulo `p`; `None` when `p` divides some denominator.
pub fn rank_mod_p<'a>(rows: impl IntoIterator<Item = &'a SparseRow>, p: u64) -> Option<usize> {
    let mut pivots: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for row in rows {
        let mut cand = row_mod_p(row, p)?;
        loop {
            cand.retain(|&(_, v)| v != 0);
            let lead = match cand.first() {
                Some(&(c, _)) => c,
                None => break,
            };
            let pivot = match pivots.get(&lead) {
                Some(pv) => pv,
                None => {
                    // Normalize so the leading entry is 1.
                    let inv = invmod(cand[0].1, p);
                    for e in cand.iter_mut() {
                        e.1 = mulmod(e.1, inv, p);
                    }
                    pivots.insert(lead, cand);
                    break;
                }
            };
            let factor = cand[0].1;
            let mut merged: BTreeMap<usize, u64> = cand.iter().cloned().collect();
            for &(c, v) in pivot {
                let sub = mulmod(factor, v, p);
                let e = merged.entry(c).or_insert(0);
                *e = (*e + p - sub) % p;
            }
            cand = merged.into_iter().filter(|&(_, v)| v != 0).collect();
        }
    }
    Some(pivots.len())
}

/// Rank strategy used for evaluation matrices: exact elimination for small
/// row counts, otherwise rank modulo three independent random primes with
/// agreement required (any disagreement falls back to the exact path).
pub fn rank_certified(rows: &[SparseRow], exact_threshold: usize, seed: u64) -> usize {
    if rows.len() <= exact_threshold {
        return rank_exact(rows.iter());
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ranks = Vec::new();
    while ranks.len() < 3 {
        let start: u64 = rng.gen_range((1u64 << 61)..(1u64 << 62));
        let p = prime_from(start);
        if let Some(r) = rank_mod_p(rows.iter(), p) {
            ranks.push(r);
        }
    }
    if ranks.iter().all(|&r| r == ranks[0]) {
        ranks[0]
    } else {
        rank_exact(rows.iter())
    }
}
