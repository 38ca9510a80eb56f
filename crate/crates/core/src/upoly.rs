//! The free algebra with endomorphism exponents.
//!
//! Variables carry exponents indexed by the distinguished basis of the
//! endomorphism subalgebra: pairs of traceless basis elements, plus the
//! identity-slot pair `(g, g)`. The module provides parsing and printing,
//! the Hopf action through comultiplication, substitutions swapping
//! variables, evaluation on `M_k` and on `M_2 (x) M_k`, multilinear identity
//! testing, and the fixed-exponents decomposition.

use crate::endoalg::{apply_endo, in_u, op_mul, phi_unit, Endo};
use crate::matcore::{assoc_mul, basis_m, h_general, mu_coeff, s_basis, BasisIndexM, MatElem};
use crate::pbw::{PBWElem, PbwCtx};
use crate::{rat_int, Error, Rat, Result};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Index into the distinguished basis of the endomorphism subalgebra:
/// either both slots traceless, or the identity pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpIndex {
    first: BasisIndexM,
    second: BasisIndexM,
}

impl ExpIndex {
    pub fn new(first: BasisIndexM, second: BasisIndexM, k: usize) -> Result<Self> {
        let ok = first.is_valid(k)
            && second.is_valid(k)
            && ((first.is_traceless() && second.is_traceless())
                || (first == BasisIndexM::G && second == BasisIndexM::G));
        if ok {
            Ok(ExpIndex { first, second })
        } else {
            Err(Error::InvalidExponentPair)
        }
    }

    pub fn gg() -> Self {
        ExpIndex { first: BasisIndexM::G, second: BasisIndexM::G }
    }

    pub fn is_gg(&self) -> bool {
        self.first == BasisIndexM::G
    }

    pub fn first(&self) -> BasisIndexM {
        self.first
    }

    pub fn second(&self) -> BasisIndexM {
        self.second
    }
}

/// All valid exponent indices for size `k`, `(k^2-1)^2 + 1` of them.
pub fn all_exp_indices(k: usize) -> Result<Vec<ExpIndex>> {
    let s = s_basis(k)?;
    let mut out = Vec::with_capacity(s.len() * s.len() + 1);
    for &a in &s {
        for &b in &s {
            out.push(ExpIndex { first: a, second: b });
        }
    }
    out.push(ExpIndex::gg());
    Ok(out)
}

/// A product of exponentiated variables; variables are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UMonomial {
    factors: Vec<(u32, ExpIndex)>,
}

impl UMonomial {
    pub fn new(factors: Vec<(u32, ExpIndex)>) -> Self {
        assert!(!factors.is_empty(), "monomials are nonempty");
        UMonomial { factors }
    }

    pub fn factors(&self) -> &[(u32, ExpIndex)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        self.factors.iter().map(|&(v, _)| v).collect()
    }

    /// Each variable appears exactly once.
    pub fn is_multilinear(&self) -> bool {
        self.variables().len() == self.factors.len()
    }
}

/// Sparse rational combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    k: usize,
    terms: BTreeMap<UMonomial, Rat>,
}

impl UPoly {
    pub fn zero(k: usize) -> Self {
        UPoly { k, terms: BTreeMap::new() }
    }

    pub fn from_monomial(k: usize, m: UMonomial, c: Rat) -> Self {
        let mut p = Self::zero(k);
        p.add_term(m, c);
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<UMonomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: UMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
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
        UPoly { k: self.k, terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Free-algebra product: concatenation of factor sequences.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.k);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut f = m1.factors.clone();
                f.extend_from_slice(&m2.factors);
                out.add_term(UMonomial::new(f), c1 * c2);
            }
        }
        out
    }

    /// Union of variables across all terms.
    pub fn variables(&self) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            s.extend(m.variables());
        }
        s
    }

    /// Every term multilinear and all terms on the same variable set.
    pub fn is_multilinear(&self) -> bool {
        let mut vars: Option<BTreeSet<u32>> = None;
        for m in self.terms.keys() {
            if !m.is_multilinear() {
                return false;
            }
            let v = m.variables();
            match &vars {
                None => vars = Some(v),
                Some(w) => {
                    if *w != v {
                        return false;
                    }
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    k: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.bump() {
            Some(c) if c == b => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!("expected '{}'", b as char))
            }
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }

    /// `integer['/'integer]`, with an optional leading minus.
    fn coeff(&mut self) -> Result<Rat> {
        let neg = if self.peek() == Some(b'-') {
            self.bump();
            true
        } else {
            false
        };
        let num = self.integer()? as i64;
        let den = if self.peek() == Some(b'/') {
            self.bump();
            self.integer()? as i64
        } else {
            1
        };
        if den == 0 {
            return self.err("zero denominator");
        }
        let r = crate::rat(num, den);
        Ok(if neg { -r } else { r })
    }

    /// One exponent slot: `g`, `hI`, `hI,J`, `eI,J`, with single-digit pairs
    /// allowed to omit the comma. Returns the coefficient expansion over
    /// basis elements (the `h_{i,j}` form expands by linearity).
    fn exp_slot(&mut self) -> Result<Vec<(BasisIndexM, Rat)>> {
        match self.peek() {
            Some(b'g') => {
                self.bump();
                Ok(vec![(BasisIndexM::G, Rat::one())])
            }
            Some(b'h') | Some(b'e') => {
                let kind = self.bump().unwrap();
                let start = self.pos;
                let first = self.integer()?;
                let (i, j) = if self.peek() == Some(b',') {
                    self.bump();
                    (first, Some(self.integer()?))
                } else {
                    let digits = self.pos - start;
                    if digits == 1 {
                        (first, None)
                    } else if digits == 2 {
                        (first / 10, Some(first % 10))
                    } else {
                        return Err(Error::Parse {
                            pos: start,
                            msg: "ambiguous multi-digit index; use a comma".into(),
                        });
                    }
                };
                match (kind, j) {
                    (b'h', None) => {
                        let a = BasisIndexM::H(i as u8);
                        if !a.is_valid(self.k) {
                            return Err(Error::Parse {
                                pos: start,
                                msg: format!("h{i} out of range"),
                            });
                        }
                        Ok(vec![(a, Rat::one())])
                    }
                    (b'h', Some(j)) => h_general(i as usize, j as usize, self.k)
                        .map_err(|e| Error::Parse { pos: start, msg: e.to_string() }),
                    (b'e', Some(j)) => {
                        let a = BasisIndexM::E(i as u8, j as u8);
                        if !a.is_valid(self.k) {
                            return Err(Error::Parse {
                                pos: start,
                                msg: format!("e{i},{j} out of range"),
                            });
                        }
                        Ok(vec![(a, Rat::one())])
                    }
                    (b'e', None) => Err(Error::Parse {
                        pos: start,
                        msg: "matrix unit needs two indices".into(),
                    }),
                    _ => unreachable!(),
                }
            }
            _ => self.err("expected an exponent: g, hI, hI,J or eI,J"),
        }
    }

    /// `'x'INT '^[' exp '|' exp ']'` expanded over the exponent basis.
    fn variable_factor(&mut self) -> Result<UPoly> {
        self.expect(b'x')?;
        let var = self.integer()? as u32;
        if var == 0 {
            return self.err("variables are 1-based");
        }
        self.expect(b'^')?;
        self.expect(b'[')?;
        let first_pos = self.pos;
        let firsts = self.exp_slot()?;
        self.expect(b'|')?;
        let seconds = self.exp_slot()?;
        self.expect(b']')?;
        // The first slot must be a single basis element; general h-runs are
        // only meaningful in the second slot.
        if firsts.len() != 1 || !firsts[0].1.is_one() {
            return Err(Error::Parse {
                pos: first_pos,
                msg: "first exponent slot must be a basis element".into(),
            });
        }
        let a = firsts[0].0;
        let mut out = UPoly::zero(self.k);
        for (b, c) in seconds {
            let exp = ExpIndex::new(a, b, self.k)
                .map_err(|e| Error::Parse { pos: first_pos, msg: e.to_string() })?;
            out.add_term(UMonomial::new(vec![(var, exp)]), c);
        }
        Ok(out)
    }

    /// `factor := variable | '[' poly ',' poly ']'` (commutator sugar).
    fn factor(&mut self) -> Result<UPoly> {
        match self.peek() {
            Some(b'[') => {
                self.bump();
                let p = self.poly()?;
                self.expect(b',')?;
                let q = self.poly()?;
                self.expect(b']')?;
                Ok(p.mul(&q).sub(&q.mul(&p)))
            }
            Some(b'x') => self.variable_factor(),
            _ => self.err("expected a factor"),
        }
    }

    fn term(&mut self) -> Result<UPoly> {
        let mut coeff = Rat::one();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'-') {
            coeff = self.coeff()?;
            self.expect(b'*')?;
        }
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(b'x') | Some(b'[')) {
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc.scale(&coeff))
    }

    fn poly(&mut self) -> Result<UPoly> {
        let mut acc = if self.peek() == Some(b'-') {
            self.bump();
            self.term()?.scale(&rat_int(-1))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }
}

/// Parses the textual grammar. Variable indices must be dense starting at 1.
pub fn parse_upoly(text: &str, k: usize) -> Result<UPoly> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, k };
    let poly = p.poly()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return p.err("trailing input");
    }
    let vars = poly.variables();
    if let Some(&max) = vars.iter().max() {
        if vars.len() != max as usize {
            return Err(Error::Parse { pos: 0, msg: "variable indices must be dense".into() });
        }
    }
    Ok(poly)
}

/// Deterministic rendering in the same grammar, terms in monomial order.
pub fn format_upoly(f: &UPoly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in f.terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            out.push_str(&mag.to_string());
            out.push_str(" * ");
        }
        for (t, (v, e)) in m.factors.iter().enumerate() {
            if t > 0 {
                out.push(' ');
            }
            out.push_str(&format!("x{}^[{}|{}]", v, e.first(), e.second()));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Actions, substitutions, evaluation
// ---------------------------------------------------------------------------

/// Expands an endomorphism in the exponent basis, requiring it to lie in the
/// distinguished subalgebra.
fn endo_to_exp_terms(u: &Endo, k: usize) -> Result<Vec<(ExpIndex, Rat)>> {
    if !in_u(u) {
        return Err(Error::OutsideU);
    }
    u.coeffs()
        .iter()
        .map(|((a, b), c)| Ok((ExpIndex::new(*a, *b, k)?, c.clone())))
        .collect()
}

/// Cartesian expansion of per-factor exponent sums into monomials.
fn expand_factors(
    vars: &[u32],
    options: &[Vec<(ExpIndex, Rat)>],
    coeff: &Rat,
    out: &mut UPoly,
) {
    fn rec(
        vars: &[u32],
        options: &[Vec<(ExpIndex, Rat)>],
        slot: usize,
        cur: &mut Vec<(u32, ExpIndex)>,
        c: Rat,
        out: &mut UPoly,
    ) {
        if slot == vars.len() {
            out.add_term(UMonomial::new(cur.clone()), c);
            return;
        }
        for (e, w) in &options[slot] {
            cur.push((vars[slot], *e));
            rec(vars, options, slot + 1, cur, &c * w, out);
            cur.pop();
        }
    }
    if options.iter().any(|o| o.is_empty()) {
        return;
    }
    rec(vars, options, 0, &mut Vec::new(), coeff.clone(), out);
}

/// The Hopf action of an enveloping-algebra element: comultiply across the
/// factors of each monomial, push the tensor slots through the
/// representation, and right-multiply each exponent.
pub fn act_on_upoly(f: &UPoly, u: &PBWElem, ctx: &PbwCtx) -> Result<UPoly> {
    let k = f.k();
    let mut out = UPoly::zero(k);
    for (mono, c) in f.terms() {
        let n = mono.degree();
        let vars: Vec<u32> = mono.factors.iter().map(|&(v, _)| v).collect();
        if n == 1 {
            let rep = ctx.rep_phi(u)?;
            let (_, exp) = mono.factors[0];
            let new = op_mul(&phi_unit(exp.first(), exp.second(), k)?, &rep)?;
            let opts = vec![endo_to_exp_terms(&new, k)?];
            expand_factors(&vars, &opts, c, &mut out);
            continue;
        }
        let tensor = ctx.comultiply_iter(u, n)?;
        for (slots, tc) in tensor.terms() {
            let mut options = Vec::with_capacity(n);
            for (slot, &(_, exp)) in slots.iter().zip(mono.factors.iter()) {
                let rep = ctx.rep_phi(&PBWElem::from_monomial(k, slot.clone(), Rat::one()))?;
                let new = op_mul(&phi_unit(exp.first(), exp.second(), k)?, &rep)?;
                options.push(endo_to_exp_terms(&new, k)?);
            }
            expand_factors(&vars, &options, &(c * tc), &mut out);
        }
    }
    Ok(out)
}

/// Substitution swapping variables: each factor `x_i^e` becomes
/// `x_{sigma(i)}^{u_i e}` with the new exponent expanded over the basis.
pub fn substitute_swap(
    f: &UPoly,
    sigma: &BTreeMap<u32, u32>,
    exps: &BTreeMap<u32, Endo>,
) -> Result<UPoly> {
    let k = f.k();
    for u in exps.values() {
        if !in_u(u) {
            return Err(Error::OutsideU);
        }
    }
    let mut out = UPoly::zero(k);
    for (mono, c) in f.terms() {
        let vars: Vec<u32> =
            mono.factors.iter().map(|&(v, _)| sigma.get(&v).copied().unwrap_or(v)).collect();
        let mut options = Vec::with_capacity(mono.degree());
        for &(v, exp) in &mono.factors {
            match exps.get(&v) {
                None => options.push(vec![(exp, Rat::one())]),
                Some(u) => {
                    let new = op_mul(u, &phi_unit(exp.first(), exp.second(), k)?)?;
                    options.push(endo_to_exp_terms(&new, k)?);
                }
            }
        }
        expand_factors(&vars, &options, c, &mut out);
    }
    Ok(out)
}

/// Replaces the first index of every traceless exponent by `c`, leaving the
/// identity-slot exponents alone.
pub fn replace_first_indices(f: &UPoly, c: BasisIndexM) -> Result<UPoly> {
    let k = f.k();
    let mut out = UPoly::zero(k);
    for (mono, co) in f.terms() {
        let factors = mono
            .factors
            .iter()
            .map(|&(v, e)| Ok((v, if e.is_gg() { e } else { ExpIndex::new(c, e.second(), k)? })))
            .collect::<Result<Vec<_>>>()?;
        out.add_term(UMonomial::new(factors), co.clone());
    }
    Ok(out)
}

/// Evaluates `f` at an assignment of matrices to its variables.
pub fn evaluate(f: &UPoly, assignment: &BTreeMap<u32, MatElem>) -> Result<MatElem> {
    let k = f.k();
    let mut out = MatElem::zero(k);
    for (mono, c) in f.terms() {
        let mut prod: Option<MatElem> = None;
        let mut coeff = c.clone();
        for &(v, e) in &mono.factors {
            let x = assignment.get(&v).ok_or(Error::MissingAssignment(v))?;
            let mu = mu_coeff(x, e.first())?;
            if mu.is_zero() {
                coeff = Rat::zero();
                break;
            }
            coeff *= mu;
            let b = MatElem::from_basis(k, e.second());
            prod = Some(match prod {
                None => b,
                Some(p) => assoc_mul(&p, &b)?,
            });
        }
        if coeff.is_zero() {
            continue;
        }
        out = out.add(&prod.expect("nonempty monomial").scale(&coeff))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tensor evaluation in M_2 (x) M_k
// ---------------------------------------------------------------------------

/// Sparse element of `M_2 (x) M_k`, stored as second-factor matrices keyed
/// by 2x2 matrix-unit positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor2k {
    k: usize,
    terms: BTreeMap<(u8, u8), MatElem>,
}

impl Tensor2k {
    pub fn zero(k: usize) -> Self {
        Tensor2k { k, terms: BTreeMap::new() }
    }

    /// `e_{ij} (x) m` for a 2x2 unit position.
    pub fn unit_tensor(i: u8, j: u8, m: MatElem) -> Self {
        let mut t = Self::zero(m.size());
        t.add_term(i, j, m);
        t
    }

    pub fn add_term(&mut self, i: u8, j: u8, m: MatElem) {
        if m.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(|| MatElem::zero(self.k));
        *e = e.add(&m).expect("sizes match");
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(u8, u8), MatElem> {
        &self.terms
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.k);
        for (&(i, j), a) in &self.terms {
            for (&(r, s), b) in &other.terms {
                if j == r {
                    out.add_term(i, s, assoc_mul(a, b)?);
                }
            }
        }
        Ok(out)
    }

    /// Exponents act on the second factor only.
    pub fn apply_exp(&self, e: ExpIndex, k: usize) -> Result<Self> {
        let u = phi_unit(e.first(), e.second(), k)?;
        let mut out = Self::zero(self.k);
        for (&(i, j), a) in &self.terms {
            out.add_term(i, j, apply_endo(&u, a)?);
        }
        Ok(out)
    }
}

/// Evaluates `f` at an assignment of tensors, with exponents acting on the
/// second factor.
pub fn evaluate_tensor2k(f: &UPoly, assignment: &BTreeMap<u32, Tensor2k>) -> Result<Tensor2k> {
    let k = f.k();
    let mut out = Tensor2k::zero(k);
    for (mono, c) in f.terms() {
        let mut prod: Option<Tensor2k> = None;
        for &(v, e) in &mono.factors {
            let x = assignment.get(&v).ok_or(Error::MissingAssignment(v))?;
            let acted = x.apply_exp(e, k)?;
            prod = Some(match prod {
                None => acted,
                Some(p) => p.mul(&acted)?,
            });
        }
        let p = prod.expect("nonempty monomial");
        for (&(i, j), m) in p.terms() {
            out.add_term(i, j, m.scale(c));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Identity testing and components
// ---------------------------------------------------------------------------

/// Decides whether a multilinear polynomial vanishes under every evaluation.
///
/// A multilinear map vanishes identically iff it vanishes on all tuples of
/// basis elements. Each monomial is nonzero at exactly one basis tuple (the
/// one matching its first exponent indices), where it evaluates to the
/// ordered product of its second indices; grouping terms by that tuple and
/// summing the products performs the exhaustive tuple scan sparsely.
pub fn is_identity(f: &UPoly) -> Result<bool> {
    if !f.is_multilinear() {
        return Err(Error::NonMultilinear);
    }
    let k = f.k();
    let mut groups: BTreeMap<Vec<(u32, BasisIndexM)>, MatElem> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let mut pattern: Vec<(u32, BasisIndexM)> =
            mono.factors.iter().map(|&(v, e)| (v, e.first())).collect();
        pattern.sort();
        let mut prod = MatElem::identity(k);
        for &(_, e) in &mono.factors {
            prod = assoc_mul(&prod, &MatElem::from_basis(k, e.second()))?;
        }
        let entry = groups.entry(pattern).or_insert_with(|| MatElem::zero(k));
        *entry = entry.add(&prod.scale(c))?;
    }
    Ok(groups.values().all(|m| m.is_zero()))
}

/// A fixed-exponents component key: which variables carry the identity-slot
/// exponent, and the first index attached to each remaining variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ComponentKey {
    pub g_vars: BTreeSet<u32>,
    pub first: BTreeMap<u32, BasisIndexM>,
}

/// Splits a multilinear polynomial into its fixed-exponents components.
pub fn decompose_components(f: &UPoly) -> Result<BTreeMap<ComponentKey, UPoly>> {
    if !f.is_multilinear() {
        return Err(Error::NonMultilinear);
    }
    let mut out: BTreeMap<ComponentKey, UPoly> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let mut g_vars = BTreeSet::new();
        let mut first = BTreeMap::new();
        for &(v, e) in &mono.factors {
            if e.is_gg() {
                g_vars.insert(v);
            } else {
                first.insert(v, e.first());
            }
        }
        let key = ComponentKey { g_vars, first };
        out.entry(key).or_insert_with(|| UPoly::zero(f.k())).add_term(mono.clone(), c.clone());
    }
    Ok(out)
}

/// Spanning monomials of the space with `r` leading identity-slot variables
/// and homogeneous first index `a`: all orderings of the variables, all
/// second indices over the traceless basis.
pub fn basis_p(r: usize, n: usize, a: BasisIndexM, k: usize) -> Result<Vec<UMonomial>> {
    if r > n || n == 0 {
        return Err(Error::InvalidIndex { k, what: format!("basis P({r},{n})") });
    }
    if !a.is_valid(k) || !a.is_traceless() {
        return Err(Error::InvalidIndex { k, what: format!("{a}") });
    }
    let s = s_basis(k)?;
    let mut perms: Vec<Vec<u32>> = Vec::new();
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    permutations(&mut cur, 0, &mut perms);
    perms.sort();
    let mut out = Vec::new();
    let mut assign = vec![0usize; n - r];
    loop {
        for perm in &perms {
            let factors = perm
                .iter()
                .map(|&v| {
                    if v as usize <= r {
                        (v, ExpIndex::gg())
                    } else {
                        let b = s[assign[v as usize - r - 1]];
                        (v, ExpIndex { first: a, second: b })
                    }
                })
                .collect();
            out.push(UMonomial::new(factors));
        }
        let mut t = 0;
        loop {
            if t == n - r {
                return Ok(out);
            }
            assign[t] += 1;
            if assign[t] < s.len() {
                break;
            }
            assign[t] = 0;
            t += 1;
        }
    }
}

fn permutations(cur: &mut Vec<u32>, at: usize, out: &mut Vec<Vec<u32>>) {
    if at == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in at..cur.len() {
        cur.swap(at, i);
        permutations(cur, at + 1, out);
        cur.swap(at, i);
    }
}

/// Checks the identity-slot postcomposition congruence: projecting the
/// product `x^{a e_12} y^{a e_21}` onto the identity line agrees with the
/// averaged h-row polynomial under every evaluation at basis pairs.
pub fn gg_postcomposition_congruence(k: usize, a: BasisIndexM) -> Result<bool> {
    let phi_gg = phi_unit(BasisIndexM::G, BasisIndexM::G, k)?;
    let lhs_poly = UPoly::from_monomial(
        k,
        UMonomial::new(vec![
            (1, ExpIndex::new(a, BasisIndexM::E(1, 2), k)?),
            (2, ExpIndex::new(a, BasisIndexM::E(2, 1), k)?),
        ]),
        Rat::one(),
    );
    let mut rhs = UPoly::zero(k);
    let inv_k = crate::rat(1, k as i64);
    for i in 1..k {
        rhs.add_term(
            UMonomial::new(vec![
                (1, ExpIndex::new(a, BasisIndexM::H(i as u8), k)?),
                (2, ExpIndex::new(a, BasisIndexM::H(i as u8), k)?),
            ]),
            inv_k.clone(),
        );
    }
    for i in 1..k.saturating_sub(1) {
        rhs.add_term(
            UMonomial::new(vec![
                (1, ExpIndex::new(a, BasisIndexM::H(i as u8), k)?),
                (2, ExpIndex::new(a, BasisIndexM::H(i as u8 + 1), k)?),
            ]),
            inv_k.clone(),
        );
    }
    for (_, x) in basis_m(k)? {
        for (_, y) in basis_m(k)? {
            let assign: BTreeMap<u32, MatElem> =
                [(1u32, x.clone()), (2u32, y.clone())].into_iter().collect();
            let lhs = apply_endo(&phi_gg, &evaluate(&lhs_poly, &assign)?)?;
            let rhs_val = evaluate(&rhs, &assign)?;
            if lhs != rhs_val {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::lie_bracket;
    use crate::{rat, rat_int};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn h(i: u8) -> BasisIndexM {
        BasisIndexM::H(i)
    }
    fn e(i: u8, j: u8) -> BasisIndexM {
        BasisIndexM::E(i, j)
    }
    fn xi(a: BasisIndexM, b: BasisIndexM, k: usize) -> ExpIndex {
        ExpIndex::new(a, b, k).unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = parse_upoly("x1^[e12|e12] x2^[e12|e31]", 3).unwrap();
        assert_eq!(f.terms().len(), 1);
        let m = f.terms().keys().next().unwrap();
        assert_eq!(m.factors(), &[(1u32, xi(e(1, 2), e(1, 2), 3)), (2u32, xi(e(1, 2), e(3, 1), 3))]);
        // commutator sugar
        let f = parse_upoly("[x1^[g|g], x2^[g|g]]", 2).unwrap();
        assert_eq!(f.terms().len(), 2);
        let mut it = f.terms().iter();
        let (m1, c1) = it.next().unwrap();
        let (m2, c2) = it.next().unwrap();
        let gg = ExpIndex::gg();
        assert_eq!(m1.factors(), &[(1u32, gg), (2u32, gg)]);
        assert_eq!(c1, &rat_int(1));
        assert_eq!(m2.factors(), &[(2u32, gg), (1u32, gg)]);
        assert_eq!(c2, &rat_int(-1));
        // linear expansion of a general h in the second slot
        let f = parse_upoly("x1^[e12|h13]", 3).unwrap();
        assert_eq!(f.terms().len(), 2);
        let g = parse_upoly("x1^[e12|h1] + x1^[e12|h2]", 3).unwrap();
        assert_eq!(f, g);
        // h with comma and reversed orientation
        let f = parse_upoly("x1^[e12|h2,1]", 3).unwrap();
        let g = parse_upoly("-1 * x1^[e12|h1]", 3).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_upoly("x1^[g|e12]", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_upoly("x1^[g|g] x3^[g|g]", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_upoly("x1^[e12|e12] +", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_upoly("x0^[g|g]", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_upoly("x1^[h13|e12]", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_upoly("x1^[e12|e14]", 3), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_round_trip() {
        for text in [
            "x1^[e12|e12] x2^[e12|e31]",
            "[x1^[g|g], x2^[g|g]]",
            "2/3 * x1^[h1|e21] x2^[e12|h1] - x2^[g|g] x1^[e21|e12]",
            "x1^[e12|h13]",
        ] {
            let f = parse_upoly(text, 3).unwrap();
            let s = format_upoly(&f);
            let g = parse_upoly(&s, 3).unwrap();
            assert_eq!(f, g, "render {s}");
        }
    }

    proptest! {
        #[test]
        fn format_parse_round_trip_random(
            seeds in proptest::collection::vec((0usize..65, 0usize..65, -6i64..7, 1i64..5), 1..5)
        ) {
            let k = 3usize;
            let exps = all_exp_indices(k).unwrap();
            let mut f = UPoly::zero(k);
            for (a, b, n, d) in &seeds {
                let m = UMonomial::new(vec![
                    (1, exps[a % exps.len()]),
                    (2, exps[b % exps.len()]),
                ]);
                let c = rat(*n + i64::from(*n >= 0), *d);
                f.add_term(m, c);
            }
            let s = format_upoly(&f);
            let g = parse_upoly(&s, k).unwrap();
            prop_assert_eq!(f, g);
        }
    }

    #[test]
    fn evaluate_examples() {
        let k = 4;
        let f =
            UPoly::from_monomial(k, UMonomial::new(vec![(1, xi(h(1), e(2, 3), k))]), Rat::one());
        let mut x = MatElem::from_basis(k, e(1, 2));
        x = x.add(&MatElem::from_basis(k, h(1)).scale(&rat_int(2))).unwrap();
        x = x.add(&MatElem::from_basis(k, h(2)).scale(&rat_int(3))).unwrap();
        let assign: BTreeMap<u32, MatElem> = [(1u32, x)].into_iter().collect();
        assert_eq!(
            evaluate(&f, &assign).unwrap(),
            MatElem::from_basis(k, e(2, 3)).scale(&rat_int(2))
        );
        // the identity-slot commutator vanishes at arbitrary pairs
        let f = parse_upoly("[x1^[g|g], x2^[g|g]]", 3).unwrap();
        let mut a = MatElem::identity(3).scale(&rat(3, 2));
        a.set(1, 2, rat_int(7));
        let mut b = MatElem::identity(3).scale(&rat(-1, 5));
        b.set(3, 1, rat(2, 3));
        let assign: BTreeMap<u32, MatElem> = [(1u32, a), (2u32, b)].into_iter().collect();
        assert!(evaluate(&f, &assign).unwrap().is_zero());
        // the identity-slot exponent fixes g
        let f = parse_upoly("x1^[g|g]", 3).unwrap();
        let assign: BTreeMap<u32, MatElem> = [(1u32, MatElem::identity(3))].into_iter().collect();
        assert_eq!(evaluate(&f, &assign).unwrap(), MatElem::identity(3));
        assert!(matches!(
            evaluate(&parse_upoly("x1^[g|g]", 3).unwrap(), &BTreeMap::new()),
            Err(Error::MissingAssignment(1))
        ));
    }

    #[test]
    fn act_examples() {
        let k = 2;
        let ctx = PbwCtx::new(k).unwrap();
        // the fourth power of the nilpotent generator flips both exponents
        let f = parse_upoly("x1^[e12|e21] x2^[e12|e21]", k).unwrap();
        let e12 = ctx.e(1, 2).unwrap();
        let acted = act_on_upoly(&f, &ctx.power(&e12, 4), &ctx).unwrap();
        let want = parse_upoly("24 * x1^[e12|e12] x2^[e12|e12]", k).unwrap();
        assert_eq!(acted, want);
        // the unit acts as the identity
        let g = parse_upoly("x1^[e12|h1] x2^[e21|e12] - 2 * x2^[g|g] x1^[h1|h1]", k).unwrap();
        assert_eq!(act_on_upoly(&g, &ctx.one(), &ctx).unwrap(), g);
        // scaled fourth powers in the opposite direction
        let k3 = 3;
        let ctx3 = PbwCtx::new(k3).unwrap();
        for (a, b) in [(1usize, 2usize), (1, 3), (2, 3)] {
            let f = UPoly::from_monomial(
                k3,
                UMonomial::new(vec![
                    (1, xi(e(1, 2), e(a as u8, b as u8), k3)),
                    (2, xi(e(1, 2), e(a as u8, b as u8), k3)),
                ]),
                Rat::one(),
            );
            let eba = ctx3.e(b, a).unwrap();
            let acted = act_on_upoly(&f, &ctx3.power(&eba, 4).scale(&rat(1, 24)), &ctx3).unwrap();
            let want = UPoly::from_monomial(
                k3,
                UMonomial::new(vec![
                    (1, xi(e(1, 2), e(b as u8, a as u8), k3)),
                    (2, xi(e(1, 2), e(b as u8, a as u8), k3)),
                ]),
                Rat::one(),
            );
            assert_eq!(acted, want, "a={a} b={b}");
        }
    }

    #[test]
    fn substitute_examples() {
        let k = 2;
        let f = parse_upoly("x1^[e12|e12] x2^[e12|e21]", k).unwrap();
        // plain swap
        let sigma: BTreeMap<u32, u32> = [(1u32, 2u32), (2u32, 1u32)].into_iter().collect();
        let swapped = substitute_swap(&f, &sigma, &BTreeMap::new()).unwrap();
        let want = parse_upoly("x2^[e12|e12] x1^[e12|e21]", k).unwrap();
        assert_eq!(swapped, want);
        // left multiplication moves the first index
        let u = phi_unit(e(2, 1), e(1, 2), k).unwrap();
        let exps: BTreeMap<u32, Endo> = [(1u32, u)].into_iter().collect();
        let moved = substitute_swap(&f, &BTreeMap::new(), &exps).unwrap();
        let want = parse_upoly("x1^[e21|e12] x2^[e12|e21]", k).unwrap();
        assert_eq!(moved, want);
        // a mismatched idempotent kills the factor
        let u = phi_unit(h(1), h(1), k).unwrap();
        let exps: BTreeMap<u32, Endo> = [(1u32, u)].into_iter().collect();
        let killed = substitute_swap(&f, &BTreeMap::new(), &exps).unwrap();
        assert!(killed.is_zero());
    }

    #[test]
    fn tensor_examples() {
        let k = 2;
        let f2 =
            parse_upoly("x1^[e12|e12] x2^[e12|e21] - x2^[e12|e12] x1^[e12|e21]", k).unwrap();
        let assign: BTreeMap<u32, Tensor2k> = [
            (1u32, Tensor2k::unit_tensor(1, 2, MatElem::from_basis(k, e(1, 2)))),
            (2u32, Tensor2k::unit_tensor(2, 1, MatElem::from_basis(k, e(1, 2)))),
        ]
        .into_iter()
        .collect();
        let v = evaluate_tensor2k(&f2, &assign).unwrap();
        // h_1 (x) e_11
        let mut want = Tensor2k::zero(k);
        want.add_term(1, 1, MatElem::unit(k, 1, 1));
        want.add_term(2, 2, MatElem::unit(k, 1, 1).scale(&rat_int(-1)));
        assert_eq!(v, want);
        // zero products kill the monomial
        let k3 = 3;
        let f = parse_upoly("x1^[e12|e12] x2^[e12|e31]", k3).unwrap();
        let assign: BTreeMap<u32, Tensor2k> = [
            (1u32, Tensor2k::unit_tensor(1, 2, MatElem::from_basis(k3, e(1, 2)))),
            (2u32, Tensor2k::unit_tensor(2, 1, MatElem::from_basis(k3, e(1, 2)))),
        ]
        .into_iter()
        .collect();
        assert!(evaluate_tensor2k(&f, &assign).unwrap().is_zero());
        // identity slot fixes g (x) g
        let f = parse_upoly("x1^[g|g]", k).unwrap();
        let mut gt = Tensor2k::zero(k);
        gt.add_term(1, 1, MatElem::identity(k));
        gt.add_term(2, 2, MatElem::identity(k));
        let assign: BTreeMap<u32, Tensor2k> = [(1u32, gt.clone())].into_iter().collect();
        assert_eq!(evaluate_tensor2k(&f, &assign).unwrap(), gt);
    }

    #[test]
    fn identity_examples() {
        let f = parse_upoly("x1^[e12|e12] x2^[e12|e31]", 3).unwrap();
        assert!(is_identity(&f).unwrap());
        let f = parse_upoly("x1^[e12|h1] x2^[e12|h1]", 3).unwrap();
        assert!(!is_identity(&f).unwrap());
        let f = parse_upoly("x1^[g|g]", 3).unwrap();
        assert!(!is_identity(&f).unwrap());
        let bad = UPoly::from_monomial(
            3,
            UMonomial::new(vec![(1, ExpIndex::gg()), (1, ExpIndex::gg())]),
            Rat::one(),
        );
        assert!(matches!(is_identity(&bad), Err(Error::NonMultilinear)));
    }

    #[test]
    fn decompose_examples() {
        let k = 3;
        let f = parse_upoly("x1^[g|g] x2^[e12|h1] + x1^[e31|e12] x2^[e31|e21]", k).unwrap();
        let comps = decompose_components(&f).unwrap();
        assert_eq!(comps.len(), 2);
        let mut total = UPoly::zero(k);
        for part in comps.values() {
            total = total.add(part);
        }
        assert_eq!(total, f);
        let single = parse_upoly("x1^[e12|e12] x2^[e12|e31]", k).unwrap();
        assert_eq!(decompose_components(&single).unwrap().len(), 1);
    }

    #[test]
    fn identity_components_are_identities() {
        let k = 3;
        // identity with two components, from the zero product e_23 e_12 = 0
        let f = parse_upoly("x1^[h1|e23] x2^[h1|e12] + x1^[e12|e23] x2^[e12|e12]", k).unwrap();
        assert!(is_identity(&f).unwrap());
        for part in decompose_components(&f).unwrap().values() {
            assert!(is_identity(part).unwrap());
        }
    }

    #[test]
    fn component_normalization_preserves_identity_verdict() {
        let k = 3;
        let f = parse_upoly("x1^[h1|e23] x2^[e21|e12]", k).unwrap();
        assert!(is_identity(&f).unwrap());
        for c in s_basis(k).unwrap() {
            let g = replace_first_indices(&f, c).unwrap();
            assert!(is_identity(&g).unwrap(), "c={c}");
            // moving the variable block to the front keeps the verdict too
            let sigma: BTreeMap<u32, u32> = [(1u32, 2u32), (2u32, 1u32)].into_iter().collect();
            let moved = substitute_swap(&g, &sigma, &BTreeMap::new()).unwrap();
            assert!(is_identity(&moved).unwrap());
        }
        let f = parse_upoly("x1^[h1|e12] x2^[e21|e23]", k).unwrap();
        assert!(!is_identity(&f).unwrap());
        for c in s_basis(k).unwrap() {
            let g = replace_first_indices(&f, c).unwrap();
            assert!(!is_identity(&g).unwrap(), "c={c}");
        }
    }

    #[test]
    fn basis_p_counts() {
        assert_eq!(basis_p(0, 1, e(1, 2), 2).unwrap().len(), 3);
        assert_eq!(basis_p(1, 2, e(1, 2), 2).unwrap().len(), 6);
        assert_eq!(basis_p(3, 3, e(1, 2), 2).unwrap().len(), 6);
        for m in basis_p(3, 3, e(1, 2), 2).unwrap() {
            assert!(m.factors().iter().all(|&(_, e)| e.is_gg()));
        }
    }

    #[test]
    fn evaluation_commutes_with_action() {
        // Evaluation intertwines the Hopf action with the represented
        // endomorphism acting on the value: eval(f^u, t) = eval(f, t)^{phi(u)}.
        // For a degree-1 generator this is exactly the derivation rule on the
        // evaluated product.
        let mut rng = StdRng::seed_from_u64(97);
        for k in 2..=3usize {
            let ctx = PbwCtx::new(k).unwrap();
            let exps = all_exp_indices(k).unwrap();
            let basis = basis_m(k).unwrap();
            for _ in 0..8 {
                let mono = UMonomial::new(vec![
                    (1, exps[rng.gen_range(0..exps.len())]),
                    (2, exps[rng.gen_range(0..exps.len())]),
                ]);
                let f = UPoly::from_monomial(k, mono, rat(rng.gen_range(1..5), 1));
                let t1 = basis[rng.gen_range(0..basis.len())].1.clone();
                let t2 = basis[rng.gen_range(0..basis.len())].1.clone();
                let assign: BTreeMap<u32, MatElem> =
                    [(1u32, t1.clone()), (2u32, t2.clone())].into_iter().collect();
                let base = evaluate(&f, &assign).unwrap();
                for c in s_basis(k).unwrap() {
                    // degree 1: the bracket with the generator
                    let u = ctx.gen_elem(c).unwrap();
                    let acted = act_on_upoly(&f, &u, &ctx).unwrap();
                    let lhs = evaluate(&acted, &assign).unwrap();
                    let cm = MatElem::from_basis(k, c);
                    assert_eq!(lhs, lie_bracket(&cm, &base).unwrap());
                }
                // a random degree-2 element through the representation
                let a = s_basis(k).unwrap()[rng.gen_range(0..k * k - 1)];
                let b = s_basis(k).unwrap()[rng.gen_range(0..k * k - 1)];
                let u = ctx.mul(&ctx.gen_elem(a).unwrap(), &ctx.gen_elem(b).unwrap());
                let acted = act_on_upoly(&f, &u, &ctx).unwrap();
                let lhs = evaluate(&acted, &assign).unwrap();
                let rhs = apply_endo(&ctx.rep_phi(&u).unwrap(), &base).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn identity_invariant_under_action_and_substitution() {
        let k = 3;
        let ctx = PbwCtx::new(k).unwrap();
        let f = parse_upoly("x1^[e12|e12] x2^[e12|e31]", k).unwrap();
        assert!(is_identity(&f).unwrap());
        let mut rng = StdRng::seed_from_u64(3);
        let exps = all_exp_indices(k).unwrap();
        for _ in 0..6 {
            let a = s_basis(k).unwrap()[rng.gen_range(0..8)];
            let b = s_basis(k).unwrap()[rng.gen_range(0..8)];
            let u = ctx.mul(&ctx.gen_elem(a).unwrap(), &ctx.gen_elem(b).unwrap());
            let acted = act_on_upoly(&f, &u, &ctx).unwrap();
            if !acted.is_zero() {
                assert!(is_identity(&acted).unwrap());
            }
            let sigma: BTreeMap<u32, u32> = [(1u32, 2u32), (2u32, 1u32)].into_iter().collect();
            let e1 = exps[rng.gen_range(0..exps.len())];
            let u1 = phi_unit(e1.first(), e1.second(), k).unwrap();
            let subd = substitute_swap(&f, &sigma, &[(1u32, u1)].into_iter().collect()).unwrap();
            if !subd.is_zero() {
                assert!(is_identity(&subd).unwrap());
            }
        }
    }

    #[test]
    fn gg_postcomposition_congruence_small() {
        for k in 2..=3usize {
            for a in s_basis(k).unwrap() {
                assert!(gg_postcomposition_congruence(k, a).unwrap(), "k={k} a={a}");
            }
        }
    }
}
