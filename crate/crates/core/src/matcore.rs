//! Exact arithmetic on `M_k(Q)` and its distinguished bases.
//!
//! The traceless basis consists of the differences `h_i = e_ii - e_{i+1,i+1}`
//! followed by the off-diagonal matrix units `e_ij` in row-major order; the
//! identity matrix `g` completes it to a basis of the full matrix algebra.
//! One total order on that basis is fixed here and used by every other
//! module.

use crate::{rat_int, Error, Rat, Result};
use num::{One, Signed, Zero};
use std::fmt;

/// Index into the distinguished basis of `M_k`.
///
/// The derived ordering is the canonical one: `H(1) < ... < H(k-1) <
/// E(1,2) < E(1,3) < ... < E(k,k-1) < G`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisIndexM {
    /// `h_i = e_ii - e_{i+1,i+1}`, `1 <= i <= k-1`.
    H(u8),
    /// Off-diagonal matrix unit `e_ij`, `i != j`.
    E(u8, u8),
    /// The identity matrix.
    G,
}

impl BasisIndexM {
    /// Checks that the index is meaningful for size `k`.
    pub fn is_valid(&self, k: usize) -> bool {
        match *self {
            BasisIndexM::H(i) => 1 <= i && (i as usize) < k,
            BasisIndexM::E(i, j) => {
                i != j && 1 <= i && (i as usize) <= k && 1 <= j && (j as usize) <= k
            }
            BasisIndexM::G => true,
        }
    }

    /// True for every index except `G`.
    pub fn is_traceless(&self) -> bool {
        !matches!(self, BasisIndexM::G)
    }

    /// Position of the index in the canonical order, `0..k*k`.
    pub fn position(&self, k: usize) -> usize {
        match *self {
            BasisIndexM::H(i) => i as usize - 1,
            BasisIndexM::E(i, j) => {
                let (i, j) = (i as usize, j as usize);
                // Count off-diagonal slots before row i, then within row i.
                (k - 1) + (i - 1) * (k - 1) + if j < i { j - 1 } else { j - 2 }
            }
            BasisIndexM::G => k * k - 1,
        }
    }

    /// Inverse of [`position`](Self::position).
    pub fn from_position(pos: usize, k: usize) -> Self {
        if pos < k - 1 {
            BasisIndexM::H(pos as u8 + 1)
        } else if pos == k * k - 1 {
            BasisIndexM::G
        } else {
            let off = pos - (k - 1);
            let i = off / (k - 1) + 1;
            let r = off % (k - 1);
            let j = if r + 1 < i { r + 1 } else { r + 2 };
            BasisIndexM::E(i as u8, j as u8)
        }
    }
}

impl fmt::Display for BasisIndexM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisIndexM::H(i) => write!(f, "h{}", i),
            BasisIndexM::E(i, j) => {
                if i < 10 && j < 10 {
                    write!(f, "e{}{}", i, j)
                } else {
                    write!(f, "e{},{}", i, j)
                }
            }
            BasisIndexM::G => write!(f, "g"),
        }
    }
}

/// A `k x k` matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatElem {
    k: usize,
    entries: Vec<Rat>,
}

impl MatElem {
    pub fn zero(k: usize) -> Self {
        MatElem { k, entries: vec![Rat::zero(); k * k] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zero(k);
        for i in 1..=k {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Matrix unit `e_ij` (1-based), diagonal allowed.
    pub fn unit(k: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(k);
        m.set(i, j, Rat::one());
        m
    }

    /// Realizes a basis index as a matrix.
    pub fn from_basis(k: usize, a: BasisIndexM) -> Self {
        match a {
            BasisIndexM::H(i) => {
                let mut m = Self::zero(k);
                m.set(i as usize, i as usize, Rat::one());
                m.set(i as usize + 1, i as usize + 1, -Rat::one());
                m
            }
            BasisIndexM::E(i, j) => Self::unit(k, i as usize, j as usize),
            BasisIndexM::G => Self::identity(k),
        }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[(i - 1) * self.k + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[(i - 1) * self.k + (j - 1)] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn trace(&self) -> Rat {
        (1..=self.k).map(|i| self.get(i, i).clone()).fold(Rat::zero(), |a, b| a + b)
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().is_zero()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        MatElem { k: self.k, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::SizeMismatch(self.k, other.k));
        }
        Ok(MatElem {
            k: self.k,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rat::one()))
    }
}

/// Standard matrix product.
pub fn assoc_mul(x: &MatElem, y: &MatElem) -> Result<MatElem> {
    if x.k != y.k {
        return Err(Error::SizeMismatch(x.k, y.k));
    }
    let k = x.k;
    let mut out = MatElem::zero(k);
    for i in 1..=k {
        for l in 1..=k {
            let a = x.get(i, l);
            if a.is_zero() {
                continue;
            }
            for j in 1..=k {
                let b = y.get(l, j);
                if b.is_zero() {
                    continue;
                }
                let cur = out.get(i, j).clone();
                out.set(i, j, cur + a * b);
            }
        }
    }
    Ok(out)
}

/// Commutator `xy - yx`.
pub fn lie_bracket(x: &MatElem, y: &MatElem) -> Result<MatElem> {
    assoc_mul(x, y)?.sub(&assoc_mul(y, x)?)
}

/// The full ordered basis of `M_k`, paired with its matrices.
pub fn basis_m(k: usize) -> Result<Vec<(BasisIndexM, MatElem)>> {
    if k < 2 {
        return Err(Error::InvalidSize(k));
    }
    let mut out = Vec::with_capacity(k * k);
    for pos in 0..k * k {
        let a = BasisIndexM::from_position(pos, k);
        out.push((a, MatElem::from_basis(k, a)));
    }
    Ok(out)
}

/// The traceless part of the basis, in order (the first `k^2 - 1` entries).
pub fn s_basis(k: usize) -> Result<Vec<BasisIndexM>> {
    Ok(basis_m(k)?.into_iter().take(k * k - 1).map(|(a, _)| a).collect())
}

/// Coefficient of `x` on basis element `a`.
///
/// Reconstruction holds exactly: summing `mu_coeff(x, a) * a` over the whole
/// basis returns `x`.
pub fn mu_coeff(x: &MatElem, a: BasisIndexM) -> Result<Rat> {
    let k = x.k;
    if !a.is_valid(k) {
        return Err(Error::InvalidIndex { k, what: format!("{a}") });
    }
    Ok(match a {
        BasisIndexM::E(i, j) => x.get(i as usize, j as usize).clone(),
        BasisIndexM::G => x.trace() / rat_int(k as i64),
        BasisIndexM::H(i) => {
            // Writing the diagonal as mu_G * I plus combinations of the h_l,
            // the h-coordinates are the partial sums of the traceless
            // diagonal.
            let mu_g = x.trace() / rat_int(k as i64);
            let mut acc = Rat::zero();
            for l in 1..=i as usize {
                acc += x.get(l, l) - &mu_g;
            }
            acc
        }
    })
}

/// Expansion of `h_ij = e_ii - e_jj` in the `h_l` coordinates.
///
/// Carries the sign `(-1)^{i>j}` on the run of consecutive `h_l`.
pub fn h_general(i: usize, j: usize, k: usize) -> Result<Vec<(BasisIndexM, Rat)>> {
    if i == j || i < 1 || j < 1 || i > k || j > k {
        return Err(Error::InvalidIndex { k, what: format!("h_{{{i},{j}}}") });
    }
    let sign = if i > j { -Rat::one() } else { Rat::one() };
    let (lo, hi) = (i.min(j), i.max(j));
    Ok((lo..hi).map(|l| (BasisIndexM::H(l as u8), sign.clone())).collect())
}

/// Projects `x` onto its traceless part, erroring when the trace is nonzero.
pub fn require_traceless(x: &MatElem) -> Result<()> {
    if x.is_traceless() {
        Ok(())
    } else {
        Err(Error::NotTraceless)
    }
}

/// Pretty-printer used by reports and tests.
impl fmt::Display for MatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 1..=self.k {
            write!(f, "  ")?;
            for j in 1..=self.k {
                let e = self.get(i, j);
                if e.is_negative() || e.numer().magnitude() >= &num::BigUint::from(10u8) {
                    write!(f, "{:>4} ", e.to_string())?;
                } else {
                    write!(f, "{:>3} ", e.to_string())?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use proptest::prelude::*;

    fn h(i: u8) -> BasisIndexM {
        BasisIndexM::H(i)
    }
    fn e(i: u8, j: u8) -> BasisIndexM {
        BasisIndexM::E(i, j)
    }

    #[test]
    fn basis_order_k2() {
        let b = basis_m(2).unwrap();
        let idx: Vec<_> = b.iter().map(|(a, _)| *a).collect();
        assert_eq!(idx, vec![h(1), e(1, 2), e(2, 1), BasisIndexM::G]);
        // h_1 = diag(1, -1)
        assert_eq!(b[0].1.get(1, 1), &rat_int(1));
        assert_eq!(b[0].1.get(2, 2), &rat_int(-1));
        // g = I_2
        assert_eq!(b[3].1, MatElem::identity(2));
    }

    #[test]
    fn basis_rejects_small_k() {
        assert_eq!(basis_m(1).unwrap_err(), Error::InvalidSize(1));
    }

    #[test]
    fn basis_order_k3_and_positions() {
        let b = basis_m(3).unwrap();
        assert_eq!(b.len(), 9);
        let idx: Vec<_> = b.iter().map(|(a, _)| *a).collect();
        assert_eq!(
            idx,
            vec![h(1), h(2), e(1, 2), e(1, 3), e(2, 1), e(2, 3), e(3, 1), e(3, 2), BasisIndexM::G]
        );
        for (pos, a) in idx.iter().enumerate() {
            assert_eq!(a.position(3), pos);
            assert_eq!(BasisIndexM::from_position(pos, 3), *a);
        }
        // e_11 = (1/3)(2 h_1 + h_2 + g)
        let e11 = MatElem::unit(3, 1, 1);
        assert_eq!(mu_coeff(&e11, h(1)).unwrap(), rat(2, 3));
        assert_eq!(mu_coeff(&e11, h(2)).unwrap(), rat(1, 3));
        assert_eq!(mu_coeff(&e11, BasisIndexM::G).unwrap(), rat(1, 3));
    }

    #[test]
    fn mu_coeff_examples() {
        // x = e_12 + 2 h_1 + 3 h_2 in M_4
        let mut x = MatElem::from_basis(4, e(1, 2));
        x = x.add(&MatElem::from_basis(4, h(1)).scale(&rat_int(2))).unwrap();
        x = x.add(&MatElem::from_basis(4, h(2)).scale(&rat_int(3))).unwrap();
        assert_eq!(mu_coeff(&x, h(1)).unwrap(), rat_int(2));
        assert_eq!(mu_coeff(&x, h(2)).unwrap(), rat_int(3));
        assert_eq!(mu_coeff(&x, h(3)).unwrap(), rat_int(0));
        assert_eq!(mu_coeff(&x, e(1, 2)).unwrap(), rat_int(1));
        // g coordinates
        let g = MatElem::identity(4);
        assert_eq!(mu_coeff(&g, BasisIndexM::G).unwrap(), rat_int(1));
        for i in 1..4 {
            assert_eq!(mu_coeff(&g, h(i)).unwrap(), rat_int(0));
        }
        // e_11 in M_k has g-coordinate 1/k
        for k in 2..=5 {
            let e11 = MatElem::unit(k, 1, 1);
            assert_eq!(mu_coeff(&e11, BasisIndexM::G).unwrap(), rat(1, k as i64));
        }
    }

    #[test]
    fn mu_coeff_is_dual_to_basis() {
        for k in 2..=4 {
            let b = basis_m(k).unwrap();
            for (a, ma) in &b {
                for (c, _) in &b {
                    let expect = if a == c { rat_int(1) } else { rat_int(0) };
                    assert_eq!(mu_coeff(ma, *c).unwrap(), expect, "k={k} a={a} c={c}");
                }
            }
        }
    }

    #[test]
    fn assoc_table() {
        let k = 4;
        // e_12 e_23 = e_13
        let p = assoc_mul(&MatElem::from_basis(k, e(1, 2)), &MatElem::from_basis(k, e(2, 3))).unwrap();
        assert_eq!(p, MatElem::from_basis(k, e(1, 3)));
        // h_i h_j = 0 for j outside {i-1, i, i+1}
        let p = assoc_mul(&MatElem::from_basis(k, h(1)), &MatElem::from_basis(k, h(3))).unwrap();
        assert!(p.is_zero());
        // h_i^2 = e_ii + e_{i+1,i+1}
        let p = assoc_mul(&MatElem::from_basis(k, h(2)), &MatElem::from_basis(k, h(2))).unwrap();
        let want = MatElem::unit(k, 2, 2).add(&MatElem::unit(k, 3, 3)).unwrap();
        assert_eq!(p, want);
        // h_i h_{i+1} = -e_{i+1,i+1} = h_{i+1} h_i
        let a = assoc_mul(&MatElem::from_basis(k, h(1)), &MatElem::from_basis(k, h(2))).unwrap();
        let b = assoc_mul(&MatElem::from_basis(k, h(2)), &MatElem::from_basis(k, h(1))).unwrap();
        let want = MatElem::unit(k, 2, 2).scale(&rat_int(-1));
        assert_eq!(a, want);
        assert_eq!(b, want);
        // g x = x = x g
        for (_, m) in basis_m(k).unwrap() {
            assert_eq!(assoc_mul(&MatElem::identity(k), &m).unwrap(), m);
            assert_eq!(assoc_mul(&m, &MatElem::identity(k)).unwrap(), m);
        }
    }

    #[test]
    fn lie_table() {
        let k = 3;
        // [e_12, e_21] = h_1
        let b = lie_bracket(&MatElem::from_basis(k, e(1, 2)), &MatElem::from_basis(k, e(2, 1))).unwrap();
        assert_eq!(b, MatElem::from_basis(k, h(1)));
        // [h_i, h_j] = 0
        let b = lie_bracket(&MatElem::from_basis(k, h(1)), &MatElem::from_basis(k, h(2))).unwrap();
        assert!(b.is_zero());
        // [g, x] = 0
        for (_, m) in basis_m(k).unwrap() {
            assert!(lie_bracket(&MatElem::identity(k), &m).unwrap().is_zero());
        }
        // [h_ij, e_ij] = 2 e_ij, via h_13 = h_1 + h_2 in M_3
        let h13 = MatElem::unit(3, 1, 1).sub(&MatElem::unit(3, 3, 3)).unwrap();
        let b = lie_bracket(&h13, &MatElem::from_basis(3, e(1, 3))).unwrap();
        assert_eq!(b, MatElem::from_basis(3, e(1, 3)).scale(&rat_int(2)));
    }

    #[test]
    fn bracket_matches_assoc_difference_on_basis() {
        for k in 2..=4 {
            let b = basis_m(k).unwrap();
            for (_, x) in &b {
                for (_, y) in &b {
                    let lhs = lie_bracket(x, y).unwrap();
                    let rhs = assoc_mul(x, y).unwrap().sub(&assoc_mul(y, x).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn jacobi_on_basis_triples() {
        for k in 2..=4 {
            let b = basis_m(k).unwrap();
            for (_, x) in &b {
                for (_, y) in &b {
                    for (_, z) in &b {
                        let t1 = lie_bracket(x, &lie_bracket(y, z).unwrap()).unwrap();
                        let t2 = lie_bracket(y, &lie_bracket(z, x).unwrap()).unwrap();
                        let t3 = lie_bracket(z, &lie_bracket(x, y).unwrap()).unwrap();
                        assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn h_general_examples() {
        // h_13 in M_3 = h_1 + h_2
        let v = h_general(1, 3, 3).unwrap();
        assert_eq!(v, vec![(h(1), rat_int(1)), (h(2), rat_int(1))]);
        // h_21 = -h_1
        let v = h_general(2, 1, 3).unwrap();
        assert_eq!(v, vec![(h(1), rat_int(-1))]);
        assert!(h_general(2, 2, 3).is_err());
        // Reconstruction: coefficients applied to the basis give e_ii - e_jj.
        for k in 2..=5usize {
            for i in 1..=k {
                for j in 1..=k {
                    if i == j {
                        continue;
                    }
                    let mut m = MatElem::zero(k);
                    for (a, c) in h_general(i, j, k).unwrap() {
                        m = m.add(&MatElem::from_basis(k, a).scale(&c)).unwrap();
                    }
                    let want = MatElem::unit(k, i, i).sub(&MatElem::unit(k, j, j)).unwrap();
                    assert_eq!(m, want);
                }
            }
        }
    }

    #[test]
    fn traceless_split() {
        for k in 2..=4 {
            for a in s_basis(k).unwrap() {
                assert!(MatElem::from_basis(k, a).is_traceless());
            }
        }
    }

    proptest! {
        // Reconstruction from coordinates is exact on random rational matrices.
        #[test]
        fn reconstruction(nums in proptest::collection::vec((-20i64..20, 1i64..8), 16)) {
            let k = 4usize;
            let mut x = MatElem::zero(k);
            for (idx, (n, d)) in nums.iter().enumerate() {
                let (i, j) = (idx / k + 1, idx % k + 1);
                x.set(i, j, rat(*n, *d));
            }
            let mut rebuilt = MatElem::zero(k);
            for p in 0..k * k {
                let a = BasisIndexM::from_position(p, k);
                let c = mu_coeff(&x, a).unwrap();
                rebuilt = rebuilt.add(&MatElem::from_basis(k, a).scale(&c)).unwrap();
            }
            prop_assert_eq!(rebuilt, x);
        }
    }
}
