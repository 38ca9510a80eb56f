//! Arithmetic in the universal enveloping algebra of `sl_k`.
//!
//! Elements are stored over the PBW basis of ordered monomials in the
//! traceless basis generators; multiplication straightens out-of-order
//! products with the rewrite `xy -> yx + [x,y]`. The module also provides
//! iterated comultiplication, the representation onto the endomorphism
//! algebra, Casimir elements with their eigenvalues, kernel elements of the
//! representation, and explicit preimages of the endomorphism units.

use crate::endoalg::{identity_endo, inner_derivation_basis, op_mul, Endo};
use crate::linalg::RowBasis;
use crate::matcore::{lie_bracket, mu_coeff, s_basis, BasisIndexM, MatElem};
use crate::{rat, rat_int, Error, Rat, Result};
use num::{BigInt, One, Zero};
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// Ordered monomial: exponent vector over the traceless basis generators in
/// the canonical order. The all-zero vector is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PBWMonomial {
    exps: Vec<u16>,
}

impl PBWMonomial {
    pub fn one(gens: usize) -> Self {
        PBWMonomial { exps: vec![0; gens] }
    }

    pub fn generator(gens: usize, idx: usize) -> Self {
        let mut m = Self::one(gens);
        m.exps[idx] = 1;
        m
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    /// Generator indices with multiplicity, in ascending order.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.degree());
        for (i, &e) in self.exps.iter().enumerate() {
            for _ in 0..e {
                w.push(i);
            }
        }
        w
    }

    fn top_generator(&self) -> Option<usize> {
        self.exps.iter().rposition(|&e| e > 0)
    }

    /// The monomial with one more copy of the given generator.
    pub fn times_generator(&self, idx: usize) -> Self {
        let mut m = self.clone();
        m.exps[idx] += 1;
        m
    }
}

impl Ord for PBWMonomial {
    /// Degree-lexicographic order: lower total degree first; at equal degree
    /// a positive first nonzero entry of the exponent difference means the
    /// smaller monomial.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match self.degree().cmp(&other.degree()) {
            Equal => {}
            o => return o,
        }
        for (a, b) in self.exps.iter().zip(&other.exps) {
            match a.cmp(b) {
                Equal => {}
                Greater => return Less,
                Less => return Greater,
            }
        }
        Equal
    }
}

impl PartialOrd for PBWMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of the enveloping algebra: sparse rational combination of normal
/// monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PBWElem {
    k: usize,
    terms: BTreeMap<PBWMonomial, Rat>,
}

impl PBWElem {
    pub fn zero(k: usize) -> Self {
        PBWElem { k, terms: BTreeMap::new() }
    }

    pub fn one(k: usize) -> Self {
        let gens = k * k - 1;
        let mut e = Self::zero(k);
        e.add_term(PBWMonomial::one(gens), Rat::one());
        e
    }

    pub fn from_monomial(k: usize, m: PBWMonomial, c: Rat) -> Self {
        let mut e = Self::zero(k);
        e.add_term(m, c);
        e
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<PBWMonomial, Rat> {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: PBWMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.k);
        }
        PBWElem { k: self.k, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Coefficient of the unit monomial.
    pub fn constant_term(&self) -> Rat {
        let gens = self.k * self.k - 1;
        self.terms.get(&PBWMonomial::one(gens)).cloned().unwrap_or_else(Rat::zero)
    }
}

impl std::fmt::Display for PBWElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    let a = BasisIndexM::from_position(i, self.k);
                    if e == 1 {
                        write!(f, "*{}", a)?;
                    } else {
                        write!(f, "*{}^{}", a, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

const MEMO_DEGREE_CAP: usize = 8;

/// Per-size context: structure constants, straightening memo, generator
/// images. The memo behaves as a concurrent-read cache with idempotent
/// inserts.
pub struct PbwCtx {
    k: usize,
    gens: usize,
    /// `bracket[a][b]` = expansion of `[s_a, s_b]` over the generators.
    bracket: Vec<Vec<Vec<(usize, Rat)>>>,
    mul_memo: Mutex<HashMap<(PBWMonomial, usize), PBWElem>>,
    rep_memo: Mutex<HashMap<PBWMonomial, Endo>>,
    gen_endos: Vec<Endo>,
}

impl PbwCtx {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSize(k));
        }
        let gens = k * k - 1;
        let s = s_basis(k)?;
        let mats: Vec<MatElem> = s.iter().map(|&a| MatElem::from_basis(k, a)).collect();
        let mut bracket = vec![vec![Vec::new(); gens]; gens];
        for a in 0..gens {
            for b in 0..gens {
                let br = lie_bracket(&mats[a], &mats[b])?;
                let mut row = Vec::new();
                for (c, &sc) in s.iter().enumerate() {
                    let co = mu_coeff(&br, sc)?;
                    if !co.is_zero() {
                        row.push((c, co));
                    }
                }
                bracket[a][b] = row;
            }
        }
        let gen_endos =
            s.iter().map(|&a| inner_derivation_basis(a, k)).collect::<Result<Vec<_>>>()?;
        Ok(PbwCtx {
            k,
            gens,
            bracket,
            mul_memo: Mutex::new(HashMap::new()),
            rep_memo: Mutex::new(HashMap::new()),
            gen_endos,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_generators(&self) -> usize {
        self.gens
    }

    pub fn generator_endos(&self) -> &[Endo] {
        &self.gen_endos
    }

    pub fn one(&self) -> PBWElem {
        PBWElem::one(self.k)
    }

    pub fn zero(&self) -> PBWElem {
        PBWElem::zero(self.k)
    }

    /// Generator index of a traceless basis element.
    pub fn gen_index(&self, a: BasisIndexM) -> Result<usize> {
        if !a.is_valid(self.k) || !a.is_traceless() {
            return Err(Error::InvalidIndex { k: self.k, what: format!("{a}") });
        }
        Ok(a.position(self.k))
    }

    pub fn gen_elem(&self, a: BasisIndexM) -> Result<PBWElem> {
        let idx = self.gen_index(a)?;
        Ok(PBWElem::from_monomial(self.k, PBWMonomial::generator(self.gens, idx), Rat::one()))
    }

    pub fn e(&self, i: usize, j: usize) -> Result<PBWElem> {
        self.gen_elem(BasisIndexM::E(i as u8, j as u8))
    }

    pub fn h(&self, i: usize) -> Result<PBWElem> {
        self.gen_elem(BasisIndexM::H(i as u8))
    }

    /// Monomial times a single generator, straightened; memoized up to the
    /// degree cap.
    fn mul_mono_gen(&self, m: &PBWMonomial, g: usize) -> PBWElem {
        match m.top_generator() {
            None => {
                return PBWElem::from_monomial(
                    self.k,
                    PBWMonomial::generator(self.gens, g),
                    Rat::one(),
                )
            }
            Some(t) if t <= g => {
                return PBWElem::from_monomial(self.k, m.times_generator(g), Rat::one())
            }
            Some(_) => {}
        }
        let key = (m.clone(), g);
        if let Some(hit) = self.mul_memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let t = m.top_generator().unwrap();
        let mut rest = m.clone();
        rest.exps[t] -= 1;
        // m*g = (rest*g)*t + rest*[t,g]
        let a = self.mul_mono_gen(&rest, g);
        let mut out = self.mul_elem_gen(&a, t);
        for (c, coeff) in &self.bracket[t][g] {
            let part = self.mul_mono_gen(&rest, *c).scale(coeff);
            out = out.add(&part);
        }
        if m.degree() <= MEMO_DEGREE_CAP {
            self.mul_memo.lock().unwrap().insert(key, out.clone());
        }
        out
    }

    fn mul_elem_gen(&self, f: &PBWElem, g: usize) -> PBWElem {
        let mut out = PBWElem::zero(self.k);
        for (m, c) in &f.terms {
            out = out.add(&self.mul_mono_gen(m, g).scale(c));
        }
        out
    }

    fn mul_elem_mono(&self, f: &PBWElem, m: &PBWMonomial) -> PBWElem {
        let mut acc = f.clone();
        for g in m.word() {
            acc = self.mul_elem_gen(&acc, g);
        }
        acc
    }

    /// Product in the enveloping algebra, in normal form.
    pub fn mul(&self, f: &PBWElem, g: &PBWElem) -> PBWElem {
        let mut out = PBWElem::zero(self.k);
        for (m, c) in &g.terms {
            out = out.add(&self.mul_elem_mono(f, m).scale(c));
        }
        out
    }

    /// Product of a factor list read in application order (leftmost factor
    /// acts first): the opposite product, realized inside the standard one
    /// by reversing the list.
    pub fn op_word(&self, factors: &[PBWElem]) -> PBWElem {
        let mut acc = self.one();
        for f in factors.iter().rev() {
            acc = self.mul(&acc, f);
        }
        acc
    }

    pub fn power(&self, f: &PBWElem, n: usize) -> PBWElem {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Commutator `fg - gf`.
    pub fn commutator(&self, f: &PBWElem, g: &PBWElem) -> PBWElem {
        self.mul(f, g).sub(&self.mul(g, f))
    }

    /// Iterated comultiplication across `n` tensor slots.
    pub fn comultiply_iter(&self, f: &PBWElem, n: usize) -> Result<TensorElem> {
        assert!(n >= 2, "comultiplication needs at least two slots");
        let cap = 24usize;
        let mut out = TensorElem::zero(self.k, n);
        for (m, c) in &f.terms {
            if m.degree() * n > cap {
                return Err(Error::ComultCapExceeded { degree: m.degree(), slots: n, cap });
            }
            // Expand generator by generator; every slot stays in ascending
            // order, so no straightening is needed.
            let mut terms: BTreeMap<Vec<PBWMonomial>, Rat> = BTreeMap::new();
            terms.insert(vec![PBWMonomial::one(self.gens); n], c.clone());
            for (gi, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut next: BTreeMap<Vec<PBWMonomial>, Rat> = BTreeMap::new();
                for (slots, coeff) in &terms {
                    for (comp, multi) in compositions(e as usize, n) {
                        let mut s2 = slots.clone();
                        for (slot, &j) in s2.iter_mut().zip(&comp) {
                            slot.exps[gi] += j as u16;
                        }
                        let add = coeff * Rat::from_integer(multi.clone());
                        let entry = next.entry(s2).or_insert_with(Rat::zero);
                        *entry += add;
                    }
                }
                terms = next;
            }
            for (slots, coeff) in terms {
                out.add_term(slots, coeff);
            }
        }
        Ok(out)
    }

    /// The representation onto the endomorphism algebra. The unit maps to
    /// the identity, a generator to its inner derivation, and the monomial
    /// `s_1 ... s_d` to the map that applies the `s_d` derivation first, so
    /// an application-order word acts left to right. With this orientation
    /// `rep_phi(fg) = op_mul(rep_phi(g), rep_phi(f))`.
    pub fn rep_phi(&self, f: &PBWElem) -> Result<Endo> {
        let mut out = Endo::zero(self.k);
        for (m, c) in &f.terms {
            let e = self.rep_phi_mono(m)?;
            out = out.add(&e.scale(c))?;
        }
        Ok(out)
    }

    fn rep_phi_mono(&self, m: &PBWMonomial) -> Result<Endo> {
        if let Some(hit) = self.rep_memo.lock().unwrap().get(m) {
            return Ok(hit.clone());
        }
        let mut acc = identity_endo(self.k);
        for g in m.word().into_iter().rev() {
            acc = op_mul(&acc, &self.gen_endos[g])?;
        }
        self.rep_memo.lock().unwrap().insert(m.clone(), acc.clone());
        Ok(acc)
    }

    /// The generator family `x^i_j`: off-diagonal entries are the matrix
    /// units, diagonal ones the weighted combinations of the `h_l`.
    pub fn x_gen(&self, i: usize, j: usize) -> Result<PBWElem> {
        let k = self.k;
        if i < 1 || j < 1 || i > k || j > k {
            return Err(Error::InvalidIndex { k, what: format!("x^{i}_{j}") });
        }
        if i != j {
            return self.e(i, j);
        }
        let mut out = self.zero();
        for l in 1..k {
            let alpha = if l >= i { rat_int((k - l) as i64) } else { rat_int(-(l as i64)) };
            out = out.add(&self.h(l)?.scale(&(alpha / rat_int(k as i64))));
        }
        Ok(out)
    }

    /// The degree-`p` Casimir element, `2 <= p <= k`.
    pub fn casimir(&self, p: usize) -> Result<PBWElem> {
        let k = self.k;
        if p < 2 || p > k {
            return Err(Error::InvalidIndex { k, what: format!("casimir degree {p}") });
        }
        let mut xs = Vec::with_capacity(k * k);
        for i in 1..=k {
            for j in 1..=k {
                xs.push(self.x_gen(i, j)?);
            }
        }
        let x = |i: usize, j: usize| &xs[(i - 1) * k + (j - 1)];
        let mut out = self.zero();
        let mut seq = vec![1usize; p];
        loop {
            let mut prod = x(seq[0], seq[1 % p]).clone();
            for t in 1..p {
                prod = self.mul(&prod, x(seq[t], seq[(t + 1) % p]));
            }
            out = out.add(&prod);
            let mut t = 0;
            loop {
                if t == p {
                    return Ok(out);
                }
                seq[t] += 1;
                if seq[t] <= k {
                    break;
                }
                seq[t] = 1;
                t += 1;
            }
        }
    }

    /// True when the representation sends `f` to the zero endomorphism.
    pub fn in_kernel(&self, f: &PBWElem) -> Result<bool> {
        Ok(self.rep_phi(f)?.is_zero())
    }

    /// The kernel elements: `z_p = c_p - lambda_p`, the constant-free
    /// recombinations `z'_p`, and the combined element
    /// `z = e_12^3 + sum_p e_{1p} z_p`.
    pub fn kernel_elements(&self) -> Result<KernelElements> {
        let k = self.k;
        let mut z_p = Vec::new();
        let mut z_prime = Vec::new();
        let lambda2 = casimir_eigenvalue_closed(2, k)?;
        let c2 = self.casimir(2)?;
        for p in 2..=k {
            let cp = self.casimir(p)?;
            let lp = casimir_eigenvalue_closed(p, k)?;
            let zp = cp.sub(&self.one().scale(&lp));
            z_p.push((p, zp));
            if p >= 3 {
                let zpr = cp.scale(&lambda2).sub(&c2.scale(&lp));
                z_prime.push((p, zpr));
            }
        }
        let e12 = self.e(1, 2)?;
        let mut z = self.power(&e12, 3);
        for (p, zp) in &z_p {
            let e1p = self.e(1, *p)?;
            z = z.add(&self.mul(&e1p, zp));
        }
        Ok(KernelElements { z_p, z_prime, z })
    }
}

/// Kernel data for the representation on `M_k`.
pub struct KernelElements {
    /// `(p, c_p - lambda_p)` for `2 <= p <= k`.
    pub z_p: Vec<(usize, PBWElem)>,
    /// `(p, lambda_2 c_p - lambda_p c_2)` for `3 <= p <= k`.
    pub z_prime: Vec<(usize, PBWElem)>,
    /// `e_12^3 + sum_p e_{1p} z_p`.
    pub z: PBWElem,
}

/// Compositions of `e` into `n` ordered nonnegative parts, with their
/// multinomial coefficients.
fn compositions(e: usize, n: usize) -> Vec<(Vec<usize>, BigInt)> {
    fn rec(
        rem: usize,
        slot: usize,
        n: usize,
        cur: &mut Vec<usize>,
        coeff: BigInt,
        out: &mut Vec<(Vec<usize>, BigInt)>,
    ) {
        if slot == n - 1 {
            cur[slot] = rem;
            out.push((cur.clone(), coeff));
            return;
        }
        for j in 0..=rem {
            cur[slot] = j;
            let mut c = BigInt::one();
            for i in 0..j {
                c = c * BigInt::from(rem - i) / BigInt::from(i + 1);
            }
            rec(rem - j, slot + 1, n, cur, coeff.clone() * c, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    rec(e, 0, n, &mut cur, BigInt::one(), &mut out);
    out
}

/// Sparse element of the `n`-fold tensor power, slot-wise in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElem {
    k: usize,
    n: usize,
    terms: BTreeMap<Vec<PBWMonomial>, Rat>,
}

impl TensorElem {
    pub fn zero(k: usize, n: usize) -> Self {
        TensorElem { k, n, terms: BTreeMap::new() }
    }

    pub fn slots(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<PBWMonomial>, Rat> {
        &self.terms
    }

    pub fn add_term(&mut self, slots: Vec<PBWMonomial>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(slots) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Closed form of the Casimir eigenvalue on the traceless block.
pub fn casimir_eigenvalue_closed(p: usize, k: usize) -> Result<Rat> {
    if k < 2 {
        return Err(Error::InvalidSize(k));
    }
    if p < 1 {
        return Err(Error::InvalidIndex { k, what: "eigenvalue degree 0".into() });
    }
    if p == 1 {
        return Ok(Rat::zero());
    }
    let kb = BigInt::from(k);
    let k2m1 = &kb * &kb - BigInt::one();
    Ok(if p % 2 == 0 {
        let num = kb.pow(p as u32) - BigInt::one();
        Rat::from_integer(kb.clone()) * (Rat::new(num, k2m1) + Rat::one())
    } else {
        let num = kb.pow(p as u32 - 1) - BigInt::one();
        Rat::from_integer(&kb * &kb) * Rat::new(num, k2m1)
    })
}

/// Trace form of the Casimir eigenvalue: `tr(A_k^p E_k)` for the shifted
/// highest-weight matrix `A_k` against the all-ones matrix `E_k`.
pub fn casimir_eigenvalue_trace(p: usize, k: usize) -> Result<Rat> {
    if k < 2 {
        return Err(Error::InvalidSize(k));
    }
    if p < 2 || p > k {
        return Err(Error::InvalidIndex { k, what: format!("trace eigenvalue degree {p}") });
    }
    let a = trace_matrix_a(k);
    let mut e = MatElem::zero(k);
    for i in 1..=k {
        for j in 1..=k {
            e.set(i, j, Rat::one());
        }
    }
    let mut ap = a.clone();
    for _ in 1..p {
        ap = crate::matcore::assoc_mul(&ap, &a)?;
    }
    Ok(crate::matcore::assoc_mul(&ap, &e)?.trace())
}

/// The matrix `A_k`: diagonal `(m_1 + k - 1, ..., m_k)` for the highest
/// weight values `m_1 = 1`, `m_2 = ... = m_{k-1} = 0`, `m_k = -1`, with `-1`
/// above the diagonal.
pub fn trace_matrix_a(k: usize) -> MatElem {
    let mut a = MatElem::zero(k);
    for i in 1..=k {
        let m_i: i64 = if i == 1 {
            1
        } else if i == k {
            -1
        } else {
            0
        };
        a.set(i, i, rat_int(m_i + (k - i) as i64));
        for j in i + 1..=k {
            a.set(i, j, rat_int(-1));
        }
    }
    a
}

/// The dual-vector family of the band system: length `k-1`, entries `-k+i`
/// before position `i`, then `i`, with the pivot entry depending on the
/// comparison with `s`.
pub fn c_vector(i: usize, s: usize, k: usize) -> Vec<Rat> {
    let mut v = Vec::with_capacity(k - 1);
    for m in 1..k {
        let val = if m < i {
            -(k as i64) + i as i64
        } else if m > i {
            i as i64
        } else if i < s {
            -(k as i64) + i as i64
        } else {
            i as i64
        };
        v.push(rat_int(val));
    }
    v
}

/// The band matrix `M(s)`: rows indexed by `j` running over `1..=k` with
/// `s` skipped, each row carrying `-1` at column `j-1`, `+1` at `j`, `+1`
/// at `s-1`, `-1` at `s` (columns outside `1..k-1` dropped, coincident
/// columns accumulated).
pub fn band_matrix(s: usize, k: usize) -> Vec<Vec<Rat>> {
    let mut rows = Vec::with_capacity(k - 1);
    for j in (1..=k).filter(|&j| j != s) {
        let mut row = vec![Rat::zero(); k - 1];
        let mut add = |col: usize, v: i64| {
            if (1..k).contains(&col) {
                row[col - 1] += rat_int(v);
            }
        };
        add(j.wrapping_sub(1), -1);
        add(j, 1);
        add(s.wrapping_sub(1), 1);
        add(s, -1);
        rows.push(row);
    }
    rows
}

/// Checks the dual relation `c_{is} . C_{js} = -k delta_{ij}` for all pairs,
/// and that the scaled dual matrix inverts the band matrix.
pub fn verify_m_inverse(s: usize, k: usize) -> Result<bool> {
    if k < 2 || s < 1 || s > k {
        return Err(Error::InvalidIndex { k, what: format!("band system s={s}") });
    }
    let m = band_matrix(s, k);
    let n = k - 1;
    for i in 1..=n {
        let c = c_vector(i, s, k);
        for j in 1..=n {
            let dot: Rat = (0..n).map(|t| &c[t] * &m[t][j - 1]).fold(Rat::zero(), |a, b| a + b);
            let want = if i == j { rat_int(-(k as i64)) } else { Rat::zero() };
            if dot != want {
                return Ok(false);
            }
        }
    }
    let scale = rat(-1, k as i64);
    for i in 0..n {
        for j in 0..n {
            let cm: Rat = (0..n)
                .map(|t| &m[i][t] * &c_vector(t + 1, s, k)[j] * &scale)
                .fold(Rat::zero(), |a, b| a + b);
            let want = if i == j { Rat::one() } else { Rat::zero() };
            if cm != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Result of the enveloping-dimension iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopingDim {
    /// Stabilized dimension of the span of represented monomials.
    pub dim: usize,
    /// Smallest monomial degree at which the dimension stops growing.
    pub stabilized_at: usize,
    /// Dimension after each degree, starting at degree 0.
    pub profile: Vec<usize>,
}

pub(crate) fn endo_row(e: &Endo, k: usize) -> crate::linalg::SparseRow {
    e.coeffs()
        .iter()
        .map(|((a, b), c)| (a.position(k) * k * k + b.position(k), c.clone()))
        .collect()
}

/// Dimension of the span of represented PBW monomials, grown degree by
/// degree until it stabilizes. Products of at most `d` generator images span
/// the same space as represented monomials of degree at most `d`, so the
/// iteration multiplies the newest representatives by the generator images.
pub fn enveloping_dim(k: usize, degree_cap: usize) -> Result<EnvelopingDim> {
    if degree_cap < 1 {
        return Err(Error::CapExceeded(degree_cap));
    }
    let ctx = PbwCtx::new(k)?;
    let mut basis = RowBasis::new();
    let id = identity_endo(k);
    basis.insert(&endo_row(&id, k));
    let mut frontier = vec![id];
    let mut profile = vec![basis.rank()];
    let mut degree = 0usize;
    loop {
        let mut next = Vec::new();
        for f in &frontier {
            for g in &ctx.gen_endos {
                let prod = op_mul(f, g)?;
                if basis.insert(&endo_row(&prod, k)) {
                    next.push(prod);
                }
            }
        }
        degree += 1;
        profile.push(basis.rank());
        if next.is_empty() {
            return Ok(EnvelopingDim { dim: basis.rank(), stabilized_at: degree - 1, profile });
        }
        if degree >= degree_cap {
            return Err(Error::CapExceeded(degree_cap));
        }
        frontier = next;
    }
}

/// Explicit preimages of the endomorphism units under the representation.
pub mod preimage {
    use super::*;

    /// Builds the preimage of `phi_{ab}` as an element of the enveloping
    /// algebra of degree at most 6. Valid pairs have both indices traceless
    /// or both equal to the identity slot.
    pub fn preimage_rho(a: BasisIndexM, b: BasisIndexM, ctx: &PbwCtx) -> Result<PBWElem> {
        let k = ctx.k();
        if !a.is_valid(k) || !b.is_valid(k) {
            return Err(Error::InvalidIndex { k, what: format!("rho_{{{a},{b}}}") });
        }
        match (a, b) {
            (BasisIndexM::G, BasisIndexM::G) => {
                let mut out = ctx.one();
                for s in s_basis(k)? {
                    out = out.sub(&preimage_rho(s, s, ctx)?);
                }
                Ok(out)
            }
            (BasisIndexM::E(r, s), BasisIndexM::E(i, j)) => {
                rho_e_e(r as usize, s as usize, i as usize, j as usize, ctx)
            }
            (BasisIndexM::E(r, s), BasisIndexM::H(i)) => {
                rho_e_h(r as usize, s as usize, i as usize, ctx)
            }
            (BasisIndexM::H(i), BasisIndexM::E(r, s)) => {
                rho_h_e(i as usize, r as usize, s as usize, ctx)
            }
            (BasisIndexM::H(i), BasisIndexM::H(j)) => rho_h_h(i as usize, j as usize, ctx),
            _ => Err(Error::InvalidExponentPair),
        }
    }

    /// Application-order word of matrix-unit generators.
    fn word(ctx: &PbwCtx, idx: &[(usize, usize)]) -> Result<PBWElem> {
        let factors: Vec<PBWElem> =
            idx.iter().map(|&(i, j)| ctx.e(i, j)).collect::<Result<Vec<_>>>()?;
        Ok(ctx.op_word(&factors))
    }

    fn rho_e_e(r: usize, s: usize, i: usize, j: usize, ctx: &PbwCtx) -> Result<PBWElem> {
        Ok(if (i, j) == (s, r) {
            word(ctx, &[(s, r), (s, r)])?.scale(&rat(-1, 2))
        } else if (i, j) == (r, s) {
            word(ctx, &[(s, r), (s, r), (r, s), (r, s)])?.scale(&rat(1, 4))
        } else if i == s {
            word(ctx, &[(s, r), (s, r), (r, j)])?.scale(&rat(1, 2))
        } else if j == r {
            word(ctx, &[(s, r), (s, r), (i, s)])?.scale(&rat(-1, 2))
        } else {
            word(ctx, &[(s, r), (s, r), (r, j), (i, s)])?.scale(&rat(1, 2))
        })
    }

    fn rho_e_h(r: usize, s: usize, i: usize, ctx: &PbwCtx) -> Result<PBWElem> {
        Ok(if i == r && s == r + 1 {
            word(ctx, &[(s, r), (s, r), (r, s)])?.scale(&rat(-1, 2))
        } else if i == s && s + 1 == r {
            word(ctx, &[(s, r), (s, r), (r, s)])?.scale(&rat(1, 2))
        } else if i == r {
            word(ctx, &[(s, r), (s, r), (r + 1, s), (r, r + 1)])?.scale(&rat(-1, 2))
        } else if i + 1 == s {
            word(ctx, &[(s, r), (s, r), (r, s - 1), (s - 1, s)])?.scale(&rat(1, 2))
        } else if i + 1 == r {
            word(ctx, &[(s, r), (s, r), (r - 1, s), (r, r - 1)])?.scale(&rat(1, 2))
        } else {
            word(ctx, &[(s, r), (s, r), (i + 1, s), (r, i), (i, i + 1)])?.scale(&rat(1, 2))
        })
    }

    fn rho_h_e(i: usize, r: usize, s: usize, ctx: &PbwCtx) -> Result<PBWElem> {
        let k = ctx.k();
        let c = c_vector(i, s, k);
        let mut dot = ctx.zero();
        for (slot, j) in (1..=k).filter(|&j| j != s).enumerate() {
            let vj = if j == r {
                ctx.e(s, r)?.scale(&-Rat::one())
            } else {
                word(ctx, &[(s, j), (j, r)])?
            };
            dot = dot.add(&vj.scale(&c[slot]));
        }
        let tail = ctx.e(r, s)?;
        let prod = ctx.op_word(&[dot, tail.clone(), tail]);
        Ok(prod.scale(&rat(-1, 2 * k as i64)))
    }

    fn rho_h_h(i: usize, j: usize, ctx: &PbwCtx) -> Result<PBWElem> {
        let k = ctx.k();
        let c = c_vector(i, j, k);
        let mut dot = ctx.zero();
        for (slot, r) in (1..=k).filter(|&r| r != j + 1).enumerate() {
            let wr = if r == j {
                word(ctx, &[(j, j + 1), (j + 1, j)])?.scale(&rat(1, 2))
            } else {
                let lead = word(ctx, &[(j, r), (r, j)])?;
                let quad = word(ctx, &[(j + 1, r), (j + 1, r), (r, j + 1), (r, j + 1)])?
                    .scale(&rat(1, 4));
                lead.sub(&quad)
            };
            dot = dot.add(&wr.scale(&c[slot]));
        }
        let prod = ctx.op_word(&[dot, ctx.e(j + 1, j)?, ctx.e(j, j + 1)?]);
        Ok(prod.scale(&rat(1, k as i64)))
    }
}
