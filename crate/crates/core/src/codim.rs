//! Codimension and cocharacter computations by exact rank.
//!
//! Evaluation matrices have one row per spanning monomial and one column per
//! (basis tuple, output entry) pair; the rank of such a matrix is the
//! dimension of the multilinear space modulo identities. Aggregation over
//! the leading-slot count gives the total codimension, compared against the
//! closed form and the generating-function coefficients.

use crate::linalg::{rank_certified, rank_exact, SparseRow};
use crate::matcore::{assoc_mul, BasisIndexM, MatElem};
use crate::upoly::{basis_p, UMonomial};
use crate::{Error, Result};
use num::{BigInt, One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Refuse cells whose spanning set exceeds this many rows.
pub const ROW_GUARD: u128 = 200_000;
/// Above this row count the rank switches to the modular strategy.
pub const EXACT_THRESHOLD: usize = 20_000;

/// Number of spanning monomials for a cell: `n! (k^2-1)^(n-r)`.
pub fn cell_rows(r: usize, n: usize, k: usize) -> u128 {
    let mut rows: u128 = 1;
    for t in 1..=n {
        rows = rows.saturating_mul(t as u128);
    }
    let m = (k * k - 1) as u128;
    for _ in 0..n - r {
        rows = rows.saturating_mul(m);
    }
    rows
}

/// Sparse evaluation matrix with lazily assigned column ids.
pub struct EvalMatrix {
    k: usize,
    rows: Vec<SparseRow>,
    cols: BTreeMap<(Vec<u8>, (u8, u8)), usize>,
}

impl EvalMatrix {
    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Builds the matrix for a list of multilinear monomials. Each monomial
    /// evaluates to zero except at the single basis tuple matching its first
    /// exponent indices, where its value is the ordered product of its
    /// second indices.
    pub fn build(monomials: &[UMonomial], k: usize) -> Result<Self> {
        // Rows are evaluated in parallel, then column ids are assigned
        // sequentially so the result is independent of the thread count.
        let raw: Vec<(Vec<u8>, MatElem)> = monomials
            .par_iter()
            .map(|mono| {
                let mut tuple: Vec<(u32, u8)> = mono
                    .factors()
                    .iter()
                    .map(|&(v, e)| (v, e.first().position(k) as u8))
                    .collect();
                tuple.sort();
                let tuple: Vec<u8> = tuple.into_iter().map(|(_, p)| p).collect();
                let mut prod = MatElem::identity(k);
                for &(_, e) in mono.factors() {
                    prod = assoc_mul(&prod, &MatElem::from_basis(k, e.second()))
                        .expect("sizes match");
                }
                (tuple, prod)
            })
            .collect();
        let mut cols = BTreeMap::new();
        let mut rows = Vec::with_capacity(raw.len());
        for (tuple, value) in raw {
            let mut row = SparseRow::new();
            for i in 1..=k {
                for j in 1..=k {
                    let v = value.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    let key = (tuple.clone(), (i as u8, j as u8));
                    let next = cols.len();
                    let id = *cols.entry(key).or_insert(next);
                    row.insert(id, v.clone());
                }
            }
            rows.push(row);
        }
        Ok(EvalMatrix { k, rows, cols })
    }
}

/// Codimension of one cell with an explicit leading letter.
pub fn codim_rn_with_letter(
    r: usize,
    n: usize,
    a: BasisIndexM,
    k: usize,
    seed: u64,
) -> Result<usize> {
    let rows = cell_rows(r, n, k);
    if rows > ROW_GUARD {
        return Err(Error::FeasibilityGuard { rows, limit: ROW_GUARD });
    }
    let monomials = basis_p(r, n, a, k)?;
    let matrix = EvalMatrix::build(&monomials, k)?;
    Ok(rank_certified(matrix.rows(), EXACT_THRESHOLD, seed))
}

/// Codimension of the cell with `r` leading identity-slot variables in
/// degree `n`: the exact rank of the evaluation matrix.
pub fn codim_rn(r: usize, n: usize, k: usize, seed: u64) -> Result<usize> {
    codim_rn_with_letter(r, n, BasisIndexM::E(1, 2), k, seed)
}

fn binom_big(n: usize, r: usize) -> BigInt {
    let mut b = BigInt::one();
    for t in 0..r {
        b = b * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    b
}

/// Total codimension in degree `n`, aggregated over all cells.
pub fn codim_total(n: usize, k: usize, seed: u64) -> Result<BigInt> {
    Ok(codim_breakdown(n, k, seed)?.1)
}

/// Per-cell codimensions alongside the aggregate.
pub fn codim_breakdown(n: usize, k: usize, seed: u64) -> Result<(Vec<usize>, BigInt)> {
    let mut cells = Vec::with_capacity(n + 1);
    let m = BigInt::from(k * k - 1);
    let mut total = BigInt::zero();
    for r in 0..=n {
        let c = codim_rn(r, n, k, seed)?;
        total += binom_big(n, r) * m.pow((n - r) as u32) * BigInt::from(c);
        cells.push(c);
    }
    Ok((cells, total))
}

/// The closed form `k^{2(n+1)} - (k^2 - 1)(n + 1)`.
pub fn closed_form_codim(n: usize, k: usize) -> BigInt {
    let k2 = BigInt::from(k * k);
    k2.pow((n + 1) as u32) - BigInt::from(k * k - 1) * BigInt::from(n + 1)
}

/// Coefficient of the codimension generating function, computed by the
/// series recurrences of its two partial fractions: a geometric part with
/// ratio `k^2` and a second-order pole at 1.
pub fn genfun_coeff(n: usize, k: usize) -> BigInt {
    let k2 = BigInt::from(k * k);
    let mut geo = k2.clone();
    for _ in 0..n {
        geo *= &k2;
    }
    let pole = BigInt::from(k * k - 1) * BigInt::from(n + 1);
    geo - pole
}

/// Certified one-row cocharacter record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocharRecord {
    pub n: usize,
    pub r: usize,
    /// One-row shape lengths of the two factors.
    pub lambda_row: usize,
    pub mu_row: usize,
    pub multiplicity: usize,
    /// True when the candidate images are independent and the degree
    /// accounting matches the cell codimension exactly, forcing every other
    /// shape to multiplicity zero.
    pub certified: bool,
}

/// The exponent patterns of the identified-variable candidates attached to
/// one-row tableaux, as position sequences of second indices.
fn onerow_patterns(m: usize, k: usize) -> Vec<Vec<BasisIndexM>> {
    let h = |i: usize| BasisIndexM::H(i as u8);
    let e = |i: usize, j: usize| BasisIndexM::E(i as u8, j as u8);
    if m == 1 {
        return crate::matcore::s_basis(k)
            .expect("valid size")
            .into_iter()
            .map(|a| vec![a])
            .collect();
    }
    let mut out = Vec::new();
    if k == 2 {
        let alt = |first: BasisIndexM, second: BasisIndexM, len: usize| -> Vec<BasisIndexM> {
            (0..len).map(|t| if t % 2 == 0 { first } else { second }).collect()
        };
        let mut with_h = vec![h(1)];
        with_h.extend(alt(e(1, 2), e(2, 1), m - 1));
        out.push(with_h);
        let mut with_h = vec![h(1)];
        with_h.extend(alt(e(2, 1), e(1, 2), m - 1));
        out.push(with_h);
        out.push(alt(e(1, 2), e(2, 1), m));
        out.push(alt(e(2, 1), e(1, 2), m));
    } else {
        for i in 1..=k {
            for j in 1..=k {
                if i == j {
                    continue;
                }
                let row = if i < k { i } else { k - 1 };
                let mut p = vec![h(row); m - 1];
                p.push(e(i, j));
                out.push(p);
            }
        }
        for hm in 1..k {
            out.push(vec![h(hm); m]);
        }
        let mut p = vec![h(1); m - 1];
        p.push(h(2));
        out.push(p);
    }
    out
}

/// Certifies the one-row multiplicity for the `(r, n-r)` cell: builds the
/// symmetrized highest-weight candidates, checks that their images are
/// linearly independent by evaluation rank, and matches the count against
/// the cell codimension so the remaining shapes are forced to zero.
pub fn onerow_multiplicity(r: usize, n: usize, k: usize, seed: u64) -> Result<CocharRecord> {
    if r > n || n == 0 {
        return Err(Error::InvalidIndex { k, what: format!("cocharacter cell ({r},{n})") });
    }
    let rows = cell_rows(r, n, k);
    if rows > ROW_GUARD {
        return Err(Error::FeasibilityGuard { rows, limit: ROW_GUARD });
    }
    let a0 = BasisIndexM::E(1, 2);
    let m = n - r;
    let patterns: Vec<Vec<BasisIndexM>> =
        if m == 0 { vec![Vec::new()] } else { onerow_patterns(m, k) };
    // Symmetrizing over one-row tableaux permutes each block's variables
    // across its positions while the second indices stay positional, so at
    // the repeated basis tuple every permuted monomial takes the same value
    // and the symmetrized image evaluates to r!(n-r)! times the ordered
    // product of the pattern. Independence of those values certifies
    // independence of the images modulo identities.
    let mut rank_rows: Vec<SparseRow> = Vec::new();
    for pat in &patterns {
        let mut prod = MatElem::identity(k);
        for &b in pat {
            prod = assoc_mul(&prod, &MatElem::from_basis(k, b))?;
        }
        let mut row = SparseRow::new();
        for i in 1..=k {
            for j in 1..=k {
                let v = prod.get(i, j);
                if !v.is_zero() {
                    row.insert((i - 1) * k + (j - 1), v.clone());
                }
            }
        }
        rank_rows.push(row);
    }
    let independent = rank_exact(rank_rows.iter());
    let count = patterns.len();
    let cell = codim_rn_with_letter(r, n, a0, k, seed)?;
    let certified = independent == count && count == cell;
    Ok(CocharRecord { n, r, lambda_row: r, mu_row: m, multiplicity: count, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat_int;

    #[test]
    fn cell_examples() {
        assert_eq!(codim_rn(3, 3, 2, 0).unwrap(), 1);
        assert_eq!(codim_rn(1, 2, 3, 0).unwrap(), 8);
        assert_eq!(codim_rn(0, 1, 2, 0).unwrap(), 3);
        assert_eq!(codim_rn(0, 2, 2, 0).unwrap(), 4);
        assert_eq!(codim_rn(0, 2, 3, 0).unwrap(), 9);
        assert_eq!(codim_rn(1, 3, 2, 0).unwrap(), 4);
    }

    #[test]
    fn cell_table_three_cases() {
        for k in 2..=3usize {
            for n in 1..=3usize {
                for r in 0..=n {
                    let c = codim_rn(r, n, k, 0).unwrap();
                    let want = if r == n {
                        1
                    } else if r == n - 1 {
                        k * k - 1
                    } else {
                        k * k
                    };
                    assert_eq!(c, want, "k={k} n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn letter_independence() {
        for (r, n, k) in [(0usize, 2usize, 2usize), (1, 2, 3), (0, 2, 3)] {
            let a = codim_rn_with_letter(r, n, BasisIndexM::E(1, 2), k, 0).unwrap();
            let b = codim_rn_with_letter(r, n, BasisIndexM::E(2, 1), k, 0).unwrap();
            let c = codim_rn_with_letter(r, n, BasisIndexM::H(1), k, 0).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn totals_match_closed_form_small() {
        assert_eq!(codim_total(1, 2, 0).unwrap(), BigInt::from(10));
        assert_eq!(codim_total(2, 2, 0).unwrap(), BigInt::from(55));
        assert_eq!(codim_total(3, 2, 0).unwrap(), BigInt::from(244));
        assert_eq!(codim_total(1, 3, 0).unwrap(), BigInt::from(65));
        for n in 1..=3usize {
            assert_eq!(codim_total(n, 2, 0).unwrap(), closed_form_codim(n, 2));
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_codim(5, 2), BigInt::from(4078));
        assert_eq!(closed_form_codim(3, 3), BigInt::from(6529));
        for k in 2..=5usize {
            let want = BigInt::from((k * k) * (k * k)) - BigInt::from(2 * (k * k - 1));
            assert_eq!(closed_form_codim(1, k), want);
        }
    }

    #[test]
    fn genfun_matches_closed_form() {
        assert_eq!(genfun_coeff(1, 2), BigInt::from(10));
        assert_eq!(genfun_coeff(0, 2), BigInt::from(1));
        for k in 2..=4usize {
            for n in 1..=6usize {
                assert_eq!(genfun_coeff(n, k), closed_form_codim(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn feasibility_guard_fires() {
        assert!(matches!(codim_rn(0, 6, 2, 0), Err(Error::FeasibilityGuard { .. })));
    }

    #[test]
    fn onerow_examples() {
        let rec = onerow_multiplicity(3, 3, 2, 0).unwrap();
        assert_eq!(rec.multiplicity, 1);
        assert!(rec.certified);
        let rec = onerow_multiplicity(1, 2, 3, 0).unwrap();
        assert_eq!(rec.multiplicity, 8);
        assert!(rec.certified);
        let rec = onerow_multiplicity(0, 2, 2, 0).unwrap();
        assert_eq!(rec.multiplicity, 4);
        assert!(rec.certified);
        let rec = onerow_multiplicity(0, 3, 3, 0).unwrap();
        assert_eq!(rec.multiplicity, 9);
        assert!(rec.certified);
    }

    #[test]
    fn eval_matrix_values() {
        // One-slot monomials over the traceless letters evaluate to their
        // second-index matrices.
        let k = 2;
        let monos = basis_p(0, 1, BasisIndexM::E(1, 2), k).unwrap();
        let m = EvalMatrix::build(&monos, k).unwrap();
        assert_eq!(m.rows().len(), 3);
        assert_eq!(rank_exact(m.rows().iter()), 3);
        let total: crate::Rat = m.rows().iter().flat_map(|r| r.values()).cloned().sum();
        // h1 contributes 1 - 1, the two off-diagonal units one each
        assert_eq!(total, rat_int(2));
    }
}
