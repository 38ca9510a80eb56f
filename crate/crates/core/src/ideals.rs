//! Two-variable ideal machinery at multilinear degree 2.
//!
//! The degree-2 multilinear part of the ideal generated by a set of
//! two-variable polynomials is spanned by swapped/exponentiated substitution
//! instances of the generators acted on by the represented comultiplication.
//! Substitutions multiply exponents on the left (mixing first indices), the
//! Hopf action multiplies on the right (acting on second indices), and the
//! two variable orderings couple through a shared first-index slot. Working
//! per exponent-type sector, the span is therefore exactly the set of
//! elements whose concatenated coefficient rows lie in a fixed row space:
//! the closure of the generators' rows under the degree-1 column actions.
//! The module computes those row spaces exactly, decides membership,
//! materializes bases, replays deduction chains, and assembles the
//! generator and minimality reports.

use crate::endoalg::{phi_unit, Endo};
use crate::linalg::{RowBasis, SparseRow};
use crate::matcore::{lie_bracket, mu_coeff, s_basis, BasisIndexM, MatElem};
use crate::pbw::{PBWElem, PbwCtx};
use crate::upoly::{
    act_on_upoly, all_exp_indices, evaluate_tensor2k, is_identity, substitute_swap, ExpIndex,
    Tensor2k, UMonomial, UPoly,
};
use crate::{rat, rat_int, Error, Rat, Result};
use num::{One, Zero};
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Stabilized comultiplication image
// ---------------------------------------------------------------------------

/// Element of the two-fold tensor square of the endomorphism subalgebra.
pub type TensorSquareElem = BTreeMap<(ExpIndex, ExpIndex), Rat>;

/// Span of the represented comultiplication over all monomials up to the
/// stabilization degree.
pub struct DeltaImage {
    k: usize,
    basis: Vec<TensorSquareElem>,
    stabilized_at: usize,
}

fn tensor_square_mul(s: &TensorSquareElem, t: &TensorSquareElem, k: usize) -> TensorSquareElem {
    let mut out = TensorSquareElem::new();
    for ((p1, p2), c) in s {
        for ((q1, q2), c2) in t {
            if p1.second() == q1.first() && p2.second() == q2.first() {
                let e1 = ExpIndex::new(p1.first(), q1.second(), k).expect("closed product");
                let e2 = ExpIndex::new(p2.first(), q2.second(), k).expect("closed product");
                let v = out.entry((e1, e2)).or_insert_with(Rat::zero);
                *v += c * c2;
                if v.is_zero() {
                    out.remove(&(e1, e2));
                }
            }
        }
    }
    out
}

fn endo_to_exp_map(u: &Endo, k: usize) -> Result<Vec<(ExpIndex, Rat)>> {
    u.coeffs().iter().map(|((a, b), c)| Ok((ExpIndex::new(*a, *b, k)?, c.clone()))).collect()
}

impl DeltaImage {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn stabilized_at(&self) -> usize {
        self.stabilized_at
    }

    pub fn basis(&self) -> &[TensorSquareElem] {
        &self.basis
    }

    /// Verifies closure of the span under the tensor-square product on the
    /// given basis pairs.
    pub fn check_closure(&self, pairs: &[(usize, usize)]) -> bool {
        let exps = all_exp_indices(self.k).expect("valid size");
        let n = exps.len();
        let ids: BTreeMap<(ExpIndex, ExpIndex), usize> = {
            let mut m = BTreeMap::new();
            for (i, &a) in exps.iter().enumerate() {
                for (j, &b) in exps.iter().enumerate() {
                    m.insert((a, b), i * n + j);
                }
            }
            m
        };
        let mut span = RowBasis::new();
        for e in &self.basis {
            let row: SparseRow = e.iter().map(|(kk, v)| (ids[kk], v.clone())).collect();
            span.insert(&row);
        }
        for &(i, j) in pairs {
            let prod = tensor_square_mul(&self.basis[i], &self.basis[j], self.k);
            let row: SparseRow = prod.iter().map(|(kk, v)| (ids[kk], v.clone())).collect();
            if !span.contains(&row) {
                return false;
            }
        }
        true
    }
}

/// Grows the represented comultiplication image degree by degree until the
/// dimension is flat for two consecutive degrees.
pub fn stabilized_delta_image(k: usize, cap: usize) -> Result<DeltaImage> {
    if cap < 1 {
        return Err(Error::CapExceeded(cap));
    }
    let ctx = PbwCtx::new(k)?;
    let exps = all_exp_indices(k)?;
    let n = exps.len();
    let ids: BTreeMap<(ExpIndex, ExpIndex), usize> = {
        let mut m = BTreeMap::new();
        for (i, &a) in exps.iter().enumerate() {
            for (j, &b) in exps.iter().enumerate() {
                m.insert((a, b), i * n + j);
            }
        }
        m
    };
    let row_of =
        |e: &TensorSquareElem| -> SparseRow { e.iter().map(|(kk, v)| (ids[kk], v.clone())).collect() };
    let diag: Vec<ExpIndex> =
        exps.iter().copied().filter(|d| d.first() == d.second()).collect();
    // Degree-1 generators: c (x) 1 + 1 (x) c through the representation.
    let mut gens: Vec<TensorSquareElem> = Vec::new();
    for c in ctx.generator_endos() {
        let mut g = TensorSquareElem::new();
        for (ce, cv) in endo_to_exp_map(c, k)? {
            for &d in &diag {
                let v = g.entry((ce, d)).or_insert_with(Rat::zero);
                *v += cv.clone();
                let v2 = g.entry((d, ce)).or_insert_with(Rat::zero);
                *v2 += cv.clone();
            }
        }
        g.retain(|_, v| !v.is_zero());
        gens.push(g);
    }
    // Degree 0: the identity (x) identity.
    let mut unit = TensorSquareElem::new();
    for &d1 in &diag {
        for &d2 in &diag {
            unit.insert((d1, d2), Rat::one());
        }
    }
    let mut span = RowBasis::new();
    span.insert(&row_of(&unit));
    let mut reps = vec![unit];
    let mut degree = 0usize;
    let mut flat_rounds = 0usize;
    let mut last_growth_degree = 0usize;
    while flat_rounds < 2 {
        degree += 1;
        if degree > cap {
            return Err(Error::CapExceeded(cap));
        }
        let mut grew = false;
        let snapshot_len = reps.len();
        for idx in 0..snapshot_len {
            for g in &gens {
                let prod = tensor_square_mul(&reps[idx], g, k);
                if span.insert(&row_of(&prod)) {
                    reps.push(prod);
                    grew = true;
                }
            }
        }
        if grew {
            flat_rounds = 0;
            last_growth_degree = degree;
        } else {
            flat_rounds += 1;
        }
    }
    Ok(DeltaImage { k, basis: reps, stabilized_at: last_growth_degree })
}

// ---------------------------------------------------------------------------
// Degree-2 consequence spans
// ---------------------------------------------------------------------------

/// Exact description of the multilinear degree-2 part of the ideal
/// generated by two-variable polynomials, held as one row space per
/// exponent-type sector pair.
pub struct ConsequenceSpan {
    k: usize,
    m: usize,
    /// Both exponents traceless; concatenated width `2 m^2`.
    ss: RowBasis,
    /// `x1` traceless, `x2` on the identity slot; width `2 m`.
    sg: RowBasis,
    /// `x1` on the identity slot, `x2` traceless; width `2 m`.
    gs: RowBasis,
    /// Both identity slots; width 2.
    gg: RowBasis,
    /// Column action of each degree-1 generator on traceless second
    /// indices: `adj[c][b] = expansion of [c, b]`.
    adj: Vec<Vec<Vec<(usize, Rat)>>>,
}

struct SectorRows {
    ss: BTreeMap<(usize, usize), SparseRow>,
    sg: BTreeMap<usize, SparseRow>,
    gs: BTreeMap<usize, SparseRow>,
    gg: SparseRow,
}

fn add_row_entry(row: &mut SparseRow, col: usize, c: &Rat) {
    let v = row.entry(col).or_insert_with(Rat::zero);
    *v += c;
    if v.is_zero() {
        row.remove(&col);
    }
}

/// Splits a degree-2 multilinear polynomial in `x1, x2` into its
/// concatenated sector rows: the slot records the first index carried by
/// each variable, the two column halves record the two orderings.
fn sector_rows(f: &UPoly) -> Result<SectorRows> {
    let k = f.k();
    let m = k * k - 1;
    let mut out = SectorRows {
        ss: BTreeMap::new(),
        sg: BTreeMap::new(),
        gs: BTreeMap::new(),
        gg: SparseRow::new(),
    };
    for (mono, c) in f.terms() {
        let fs = mono.factors();
        if fs.len() != 2 || mono.variables() != [1u32, 2u32].into_iter().collect() {
            return Err(Error::NonMultilinear);
        }
        let (v1, e1) = fs[0];
        let (_, e2) = fs[1];
        let copy_a = v1 == 1;
        let p = |a: BasisIndexM| a.position(k);
        match (e1.is_gg(), e2.is_gg()) {
            (false, false) => {
                let (slot, half) = if copy_a {
                    ((p(e1.first()), p(e2.first())), 0usize)
                } else {
                    ((p(e2.first()), p(e1.first())), 1usize)
                };
                let col = half * m * m + p(e1.second()) * m + p(e2.second());
                add_row_entry(out.ss.entry(slot).or_default(), col, c);
            }
            (false, true) => {
                // position 1 is the traceless one; it belongs to x1 in the
                // first ordering and to x2 in the second
                if copy_a {
                    let row = out.sg.entry(p(e1.first())).or_default();
                    add_row_entry(row, p(e1.second()), c);
                } else {
                    let row = out.gs.entry(p(e1.first())).or_default();
                    add_row_entry(row, m + p(e1.second()), c);
                }
            }
            (true, false) => {
                if copy_a {
                    let row = out.gs.entry(p(e2.first())).or_default();
                    add_row_entry(row, p(e2.second()), c);
                } else {
                    let row = out.sg.entry(p(e2.first())).or_default();
                    add_row_entry(row, m + p(e2.second()), c);
                }
            }
            (true, true) => {
                add_row_entry(&mut out.gg, if copy_a { 0 } else { 1 }, c);
            }
        }
    }
    Ok(out)
}

impl ConsequenceSpan {
    /// Builds the span for a set of degree-2 multilinear generators in
    /// `x1, x2`. Both variable orderings of each generator seed the row
    /// spaces, which are then closed under the degree-1 column actions.
    pub fn new(generators: &[UPoly], k: usize) -> Result<Self> {
        let m = k * k - 1;
        let s = s_basis(k)?;
        let mats: Vec<MatElem> = s.iter().map(|&a| MatElem::from_basis(k, a)).collect();
        let mut adj = vec![vec![Vec::new(); m]; m];
        for c in 0..m {
            for b in 0..m {
                let br = lie_bracket(&mats[c], &mats[b])?;
                let mut row = Vec::new();
                for (t, &st) in s.iter().enumerate() {
                    let co = mu_coeff(&br, st)?;
                    if !co.is_zero() {
                        row.push((t, co));
                    }
                }
                adj[c][b] = row;
            }
        }
        let mut span = ConsequenceSpan {
            k,
            m,
            ss: RowBasis::new(),
            sg: RowBasis::new(),
            gs: RowBasis::new(),
            gg: RowBasis::new(),
            adj,
        };
        let swap: BTreeMap<u32, u32> = [(1u32, 2u32), (2u32, 1u32)].into_iter().collect();
        for g in generators {
            if g.is_zero() {
                continue;
            }
            for version in [g.clone(), substitute_swap(g, &swap, &BTreeMap::new())?] {
                let rows = sector_rows(&version)?;
                for r in rows.ss.values() {
                    span.ss.insert(r);
                }
                for r in rows.sg.values() {
                    span.sg.insert(r);
                }
                for r in rows.gs.values() {
                    span.gs.insert(r);
                }
                span.gg.insert(&rows.gg);
            }
        }
        span.close();
        Ok(span)
    }

    fn apply_adj_ss(&self, row: &SparseRow, c: usize) -> SparseRow {
        let m = self.m;
        let mut out = SparseRow::new();
        for (&col, v) in row {
            let half = col / (m * m);
            let rest = col % (m * m);
            let (b, d) = (rest / m, rest % m);
            for (b2, w) in &self.adj[c][b] {
                add_row_entry(&mut out, half * m * m + b2 * m + d, &(v * w));
            }
            for (d2, w) in &self.adj[c][d] {
                add_row_entry(&mut out, half * m * m + b * m + d2, &(v * w));
            }
        }
        out
    }

    fn apply_adj_single(&self, row: &SparseRow, c: usize) -> SparseRow {
        let m = self.m;
        let mut out = SparseRow::new();
        for (&col, v) in row {
            let half = col / m;
            let b = col % m;
            for (b2, w) in &self.adj[c][b] {
                add_row_entry(&mut out, half * m + b2, &(v * w));
            }
        }
        out
    }

    fn close(&mut self) {
        let m = self.m;
        loop {
            let mut grew = false;
            for r in self.ss.basis_rows() {
                for c in 0..m {
                    if self.ss.insert(&self.apply_adj_ss(&r, c)) {
                        grew = true;
                    }
                }
            }
            for r in self.sg.basis_rows() {
                for c in 0..m {
                    if self.sg.insert(&self.apply_adj_single(&r, c)) {
                        grew = true;
                    }
                }
            }
            for r in self.gs.basis_rows() {
                for c in 0..m {
                    if self.gs.insert(&self.apply_adj_single(&r, c)) {
                        grew = true;
                    }
                }
            }
            // identity-slot exponents absorb no degree-1 action
            if !grew {
                break;
            }
        }
    }

    /// Membership of a degree-2 multilinear polynomial.
    pub fn contains(&self, f: &UPoly) -> Result<bool> {
        let rows = sector_rows(f)?;
        Ok(rows.ss.values().all(|r| self.ss.contains(r))
            && rows.sg.values().all(|r| self.sg.contains(r))
            && rows.gs.values().all(|r| self.gs.contains(r))
            && self.gg.contains(&rows.gg))
    }

    /// Dimension of the full degree-2 part.
    pub fn dim(&self) -> usize {
        let m = self.m;
        m * m * self.ss.rank() + m * self.sg.rank() + m * self.gs.rank() + self.gg.rank()
    }

    /// Materializes a linearly independent basis as polynomials: each row
    /// space element placed in each slot.
    pub fn basis_upolys(&self) -> Result<Vec<UPoly>> {
        let k = self.k;
        let m = self.m;
        let s = s_basis(k)?;
        let mut out = Vec::with_capacity(self.dim());
        let ss_rows = self.ss.basis_rows();
        for pa in 0..m {
            for pc in 0..m {
                for row in &ss_rows {
                    let mut p = UPoly::zero(k);
                    for (&col, v) in row {
                        let half = col / (m * m);
                        let rest = col % (m * m);
                        let (b, d) = (rest / m, rest % m);
                        let factors = if half == 0 {
                            vec![
                                (1u32, ExpIndex::new(s[pa], s[b], k)?),
                                (2u32, ExpIndex::new(s[pc], s[d], k)?),
                            ]
                        } else {
                            vec![
                                (2u32, ExpIndex::new(s[pc], s[b], k)?),
                                (1u32, ExpIndex::new(s[pa], s[d], k)?),
                            ]
                        };
                        p.add_term(UMonomial::new(factors), v.clone());
                    }
                    out.push(p);
                }
            }
        }
        let sg_rows = self.sg.basis_rows();
        for pa in 0..m {
            for row in &sg_rows {
                let mut p = UPoly::zero(k);
                for (&col, v) in row {
                    let half = col / m;
                    let b = col % m;
                    let factors = if half == 0 {
                        vec![(1u32, ExpIndex::new(s[pa], s[b], k)?), (2u32, ExpIndex::gg())]
                    } else {
                        vec![(2u32, ExpIndex::gg()), (1u32, ExpIndex::new(s[pa], s[b], k)?)]
                    };
                    p.add_term(UMonomial::new(factors), v.clone());
                }
                out.push(p);
            }
        }
        let gs_rows = self.gs.basis_rows();
        for pc in 0..m {
            for row in &gs_rows {
                let mut p = UPoly::zero(k);
                for (&col, v) in row {
                    let half = col / m;
                    let d = col % m;
                    let factors = if half == 0 {
                        vec![(1u32, ExpIndex::gg()), (2u32, ExpIndex::new(s[pc], s[d], k)?)]
                    } else {
                        vec![(2u32, ExpIndex::new(s[pc], s[d], k)?), (1u32, ExpIndex::gg())]
                    };
                    p.add_term(UMonomial::new(factors), v.clone());
                }
                out.push(p);
            }
        }
        for row in &self.gg.basis_rows() {
            let mut p = UPoly::zero(k);
            for (&col, v) in row {
                let factors = if col == 0 {
                    vec![(1u32, ExpIndex::gg()), (2u32, ExpIndex::gg())]
                } else {
                    vec![(2u32, ExpIndex::gg()), (1u32, ExpIndex::gg())]
                };
                p.add_term(UMonomial::new(factors), v.clone());
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// Basis of the multilinear degree-2 part of the ideal generated by `gens`.
pub fn consequences_deg2(gens: &[UPoly], k: usize) -> Result<Vec<UPoly>> {
    ConsequenceSpan::new(gens, k)?.basis_upolys()
}

/// The degree-2 variable swap that carries first indices along: the
/// variables exchange places keeping their own first exponent index, while
/// the second indices stay attached to the positions. This is the natural
/// symmetric-group action on fixed-exponents spaces.
pub fn swap_with_first_index(f: &UPoly) -> Result<UPoly> {
    let k = f.k();
    let mut out = UPoly::zero(k);
    for (mono, c) in f.terms() {
        let fs = mono.factors();
        if fs.len() != 2 {
            return Err(Error::NonMultilinear);
        }
        let (v1, e1) = fs[0];
        let (v2, e2) = fs[1];
        let (n1, n2) = if e1.is_gg() != e2.is_gg() {
            return Err(Error::InvalidExponentPair);
        } else if e1.is_gg() {
            (ExpIndex::gg(), ExpIndex::gg())
        } else {
            (
                ExpIndex::new(e2.first(), e1.second(), k)?,
                ExpIndex::new(e1.first(), e2.second(), k)?,
            )
        };
        out.add_term(UMonomial::new(vec![(v2, n1), (v1, n2)]), c.clone());
    }
    Ok(out)
}

/// Membership in the degree-2 part, by exact row reduction.
pub fn member_deg2(f: &UPoly, gens: &[UPoly], k: usize) -> Result<bool> {
    ConsequenceSpan::new(gens, k)?.contains(f)
}

// ---------------------------------------------------------------------------
// Deduction engine
// ---------------------------------------------------------------------------

/// One deduction step: an enveloping-algebra action followed by
/// subtractions of earlier results (index 0 is the starting polynomial,
/// index `i` the result of step `i`).
pub struct DeductionStep {
    pub exponent: PBWElem,
    pub subtract: Vec<(Rat, usize)>,
}

/// Replays a deduction: fold the actions and subtractions over the history.
pub fn deduce(start: &UPoly, steps: &[DeductionStep], ctx: &PbwCtx) -> Result<UPoly> {
    let mut history = vec![start.clone()];
    for step in steps {
        let mut cur = act_on_upoly(history.last().unwrap(), &step.exponent, ctx)?;
        for (c, r) in &step.subtract {
            let elem =
                history.get(*r).ok_or(Error::DanglingReference(*r, history.len()))?.clone();
            cur = cur.sub(&elem.scale(c));
        }
        history.push(cur);
    }
    Ok(history.pop().expect("nonempty history"))
}

// ---------------------------------------------------------------------------
// The four generators and the two-variable identity list
// ---------------------------------------------------------------------------

/// Second-index specification with the first index elided.
#[derive(Clone, Copy, Debug)]
pub enum Sec {
    E(usize, usize),
    H(usize),
    /// General difference of diagonal units, expanded by linearity.
    Hg(usize, usize),
    G,
}

fn sec_terms(k: usize, s: Sec) -> Result<Vec<(BasisIndexM, Rat)>> {
    Ok(match s {
        Sec::E(i, j) => vec![(BasisIndexM::E(i as u8, j as u8), Rat::one())],
        Sec::H(i) => vec![(BasisIndexM::H(i as u8), Rat::one())],
        Sec::Hg(i, j) => crate::matcore::h_general(i, j, k)?,
        Sec::G => vec![(BasisIndexM::G, Rat::one())],
    })
}

/// Builds `coeff * x_{v1}^{(a0, s1)} x_{v2}^{(a0, s2)}` with the fixed first
/// index `a0 = e_12` on traceless slots, expanding general h's linearly.
pub fn mono2(k: usize, coeff: Rat, v1: u32, s1: Sec, v2: u32, s2: Sec) -> Result<UPoly> {
    let a0 = BasisIndexM::E(1, 2);
    let mut out = UPoly::zero(k);
    for (b1, c1) in sec_terms(k, s1)? {
        for (b2, c2) in sec_terms(k, s2)? {
            let e1 =
                if b1 == BasisIndexM::G { ExpIndex::gg() } else { ExpIndex::new(a0, b1, k)? };
            let e2 =
                if b2 == BasisIndexM::G { ExpIndex::gg() } else { ExpIndex::new(a0, b2, k)? };
            out.add_term(UMonomial::new(vec![(v1, e1), (v2, e2)]), &coeff * &c1 * &c2);
        }
    }
    Ok(out)
}

fn xy(k: usize, s1: Sec, s2: Sec) -> Result<UPoly> {
    mono2(k, Rat::one(), 1, s1, 2, s2)
}

fn yx(k: usize, s1: Sec, s2: Sec) -> Result<UPoly> {
    mono2(k, Rat::one(), 2, s1, 1, s2)
}

/// The four generators for the given size.
pub fn four_generators(k: usize) -> Result<Vec<UPoly>> {
    let e_tail = if k == 2 { Sec::E(1, 2) } else { Sec::E(3, 1) };
    let f1 = xy(k, Sec::E(1, 2), e_tail)?;
    let f2 = xy(k, Sec::E(1, 2), Sec::E(2, 1))?.sub(&yx(k, Sec::E(1, 2), Sec::E(2, 1))?);
    let f3 = xy(k, Sec::G, Sec::G)?.sub(&yx(k, Sec::G, Sec::G)?);
    let f4 = xy(k, Sec::G, Sec::E(1, 2))?.sub(&yx(k, Sec::E(1, 2), Sec::G)?);
    Ok(vec![f1, f2, f3, f4])
}

/// The two-variable identity list, instantiated over all admissible index
/// tuples with the fixed first index, grouped by item number.
pub fn list_l_items(k: usize) -> Result<Vec<(usize, Vec<UPoly>)>> {
    let mut items: Vec<(usize, Vec<UPoly>)> = Vec::new();
    let e_pairs: Vec<(usize, usize)> = (1..=k)
        .flat_map(|i| (1..=k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    // 1: products of units with mismatched middle index
    let mut v = Vec::new();
    for &(i, j) in &e_pairs {
        for &(l, m) in &e_pairs {
            if j != l {
                v.push(xy(k, Sec::E(i, j), Sec::E(l, m))?);
            }
        }
    }
    items.push((1, v));
    // 2: h then unit with unrelated row
    let mut v = Vec::new();
    for i in 1..k {
        for &(j, l) in &e_pairs {
            if j != i && j != i + 1 {
                v.push(xy(k, Sec::H(i), Sec::E(j, l))?);
            }
        }
    }
    items.push((2, v));
    // 3: unit then h with unrelated column
    let mut v = Vec::new();
    for i in 1..k {
        for &(j, l) in &e_pairs {
            if l != i && l != i + 1 {
                v.push(xy(k, Sec::E(j, l), Sec::H(i))?);
            }
        }
    }
    items.push((3, v));
    // 4: distant h pairs
    let mut v = Vec::new();
    for i in 1..k {
        for j in 1..k {
            if j + 1 < i || j > i + 1 {
                v.push(xy(k, Sec::H(i), Sec::H(j))?);
            }
        }
    }
    items.push((4, v));
    // 5
    let mut v = Vec::new();
    for i in 1..=k {
        for j in 2..=k {
            for l in 1..=k {
                if j != i && l != i && l != j {
                    v.push(
                        xy(k, Sec::E(i, j), Sec::H(j - 1))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                    );
                }
            }
        }
    }
    items.push((5, v));
    // 6
    let mut v = Vec::new();
    for i in 2..=k {
        for j in 1..=k {
            for l in 1..=k {
                if j != i && l != i && l != j {
                    v.push(
                        xy(k, Sec::H(i - 1), Sec::E(i, j))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                    );
                }
            }
        }
    }
    items.push((6, v));
    // 7
    let mut v = Vec::new();
    for i in 1..k {
        for j in 2..=k {
            if j != i {
                v.push(
                    xy(k, Sec::H(i), Sec::E(i, j))?.add(&xy(k, Sec::E(i, j), Sec::H(j - 1))?),
                );
            }
        }
    }
    items.push((7, v));
    // 8
    let mut v = Vec::new();
    for i in 2..=k {
        for j in 1..k {
            if j != i {
                v.push(
                    xy(k, Sec::H(i - 1), Sec::E(i, j))?.add(&xy(k, Sec::E(i, j), Sec::H(j))?),
                );
            }
        }
    }
    items.push((8, v));
    // 9
    let mut v = Vec::new();
    for i in 2..k {
        for j in 1..=k {
            if j != i {
                v.push(
                    xy(k, Sec::H(i - 1), Sec::H(i))?.add(&xy(k, Sec::E(i, j), Sec::E(j, i))?),
                );
            }
        }
    }
    items.push((9, v));
    // 10
    let mut v = Vec::new();
    for i in 1..k {
        for j in 1..=k {
            for l in 1..=k {
                if j != i && l != i + 1 {
                    v.push(
                        xy(k, Sec::E(i, j), Sec::E(j, i))?
                            .add(&xy(k, Sec::E(i + 1, l), Sec::E(l, i + 1))?)
                            .sub(&xy(k, Sec::H(i), Sec::H(i))?),
                    );
                }
            }
        }
    }
    items.push((10, v));
    // 11: symmetry under swapping the variables
    let mut v = Vec::new();
    let secs: Vec<Sec> =
        (1..k).map(Sec::H).chain(e_pairs.iter().map(|&(i, j)| Sec::E(i, j))).collect();
    for &a in &secs {
        for &b in &secs {
            v.push(xy(k, a, b)?.sub(&yx(k, a, b)?));
        }
    }
    items.push((11, v));
    // 12: identity-slot commutators
    let mut v = Vec::new();
    v.push(xy(k, Sec::G, Sec::G)?.sub(&yx(k, Sec::G, Sec::G)?));
    for &b in &secs {
        v.push(xy(k, Sec::G, b)?.sub(&yx(k, b, Sec::G)?));
    }
    items.push((12, v));
    // 13: commutators of adjacent h's
    let mut v = Vec::new();
    for i in 1..k.saturating_sub(1) {
        v.push(xy(k, Sec::H(i), Sec::H(i + 1))?.sub(&yx(k, Sec::H(i + 1), Sec::H(i))?));
    }
    items.push((13, v));
    Ok(items)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One named pass/fail item in a report.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckItem { name: name.into(), pass, detail: detail.into() }
    }
}

/// Report of the generator verification.
pub struct GeneratorReport {
    pub k: usize,
    pub items: Vec<CheckItem>,
    pub list_total: usize,
    pub list_passed: usize,
}

impl GeneratorReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Checks that the four generators are identities and that every
/// instantiated list identity lies in their degree-2 span.
pub fn verify_generators(k: usize) -> Result<GeneratorReport> {
    let gens = four_generators(k)?;
    let mut items = Vec::new();
    let names = ["unit pair", "skew pair", "identity-slot commutator", "mixed commutator"];
    for (g, name) in gens.iter().zip(names) {
        let pass = is_identity(g)?;
        items.push(CheckItem::new(format!("generator ({name}) is an identity"), pass, ""));
    }
    let expected_tail = if k == 2 { "e12" } else { "e31" };
    let tail_ok = gens[0]
        .terms()
        .keys()
        .all(|mono| {
            mono.factors().iter().all(|&(v, e)| v != 2 || e.second().to_string() == expected_tail)
        });
    items.push(CheckItem::new(
        format!("generator choice for k={k} uses tail {expected_tail}"),
        tail_ok,
        "",
    ));
    let span = ConsequenceSpan::new(&gens, k)?;
    let mut total = 0;
    let mut passed = 0;
    for (no, polys) in list_l_items(k)? {
        let mut ok = 0;
        let n = polys.len();
        for p in &polys {
            total += 1;
            if is_identity(p)? && span.contains(p)? {
                ok += 1;
                passed += 1;
            }
        }
        items.push(CheckItem::new(
            format!("list item {no}: members of the generator span"),
            ok == n,
            format!("{ok}/{n}"),
        ));
    }
    Ok(GeneratorReport { k, items, list_total: total, list_passed: passed })
}

/// Report of the minimality certificates.
pub struct MinimalityReport {
    pub k: usize,
    pub items: Vec<CheckItem>,
}

impl MinimalityReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Produces the three minimality certificates: block separation of the two
/// commutator generators, swap-skewness of the skew generator's span, and
/// the tensor evaluation separating the unit-pair generator.
pub fn minimality_witness(k: usize) -> Result<MinimalityReport> {
    let gens = four_generators(k)?;
    let (f1, f2, f3, f4) = (&gens[0], &gens[1], &gens[2], &gens[3]);
    let mut items = Vec::new();
    // (a) block separation by idempotent substitutions
    let gg = phi_unit(BasisIndexM::G, BasisIndexM::G, k)?;
    let p12 = phi_unit(BasisIndexM::E(1, 2), BasisIndexM::E(1, 2), k)?;
    let sub_gg: BTreeMap<u32, Endo> =
        [(1u32, gg.clone()), (2u32, gg.clone())].into_iter().collect();
    let sub_mixed: BTreeMap<u32, Endo> = [(1u32, gg), (2u32, p12)].into_iter().collect();
    let id_sigma = BTreeMap::new();
    let s1 = |f: &UPoly| substitute_swap(f, &id_sigma, &sub_gg);
    let s2 = |f: &UPoly| substitute_swap(f, &id_sigma, &sub_mixed);
    items.push(CheckItem::new(
        "identity-slot substitution isolates the slot commutator",
        s1(f3)? == *f3 && s1(f4)?.is_zero() && s1(f1)?.is_zero() && s1(f2)?.is_zero(),
        "",
    ));
    items.push(CheckItem::new(
        "mixed substitution isolates the mixed commutator",
        s2(f4)? == *f4 && s2(f3)?.is_zero() && s2(f1)?.is_zero() && s2(f2)?.is_zero(),
        "",
    ));
    // (b) everything generated by the skew pair is antisymmetric under the
    // swap carrying first indices along; the unit pair is not
    let span2 = ConsequenceSpan::new(std::slice::from_ref(f2), k)?;
    let basis2 = span2.basis_upolys()?;
    let all_skew = basis2.iter().all(|b| {
        swap_with_first_index(b).map(|j| j == b.scale(&rat_int(-1))).unwrap_or(false)
    });
    items.push(CheckItem::new(
        "skew-pair span is swap-antisymmetric",
        all_skew,
        format!("basis size {}", basis2.len()),
    ));
    let f1_skew = swap_with_first_index(f1)? == f1.scale(&rat_int(-1));
    items.push(CheckItem::new(
        "unit pair lies outside the skew-pair span",
        !f1_skew && !span2.contains(f1)?,
        "",
    ));
    // (c) tensor evaluation separates the unit-pair span from the skew pair
    let assign: BTreeMap<u32, Tensor2k> = [
        (1u32, Tensor2k::unit_tensor(1, 2, MatElem::from_basis(k, BasisIndexM::E(1, 2)))),
        (2u32, Tensor2k::unit_tensor(2, 1, MatElem::from_basis(k, BasisIndexM::E(1, 2)))),
    ]
    .into_iter()
    .collect();
    let f2_val = evaluate_tensor2k(f2, &assign)?;
    let mut want = Tensor2k::zero(k);
    want.add_term(1, 1, MatElem::unit(k, 1, 1));
    want.add_term(2, 2, MatElem::unit(k, 1, 1).scale(&rat_int(-1)));
    items.push(CheckItem::new(
        "skew pair evaluates to h1 (x) e11 at the separating tuple",
        !f2_val.is_zero() && f2_val == want,
        "",
    ));
    let span1 = ConsequenceSpan::new(std::slice::from_ref(f1), k)?;
    let basis1 = span1.basis_upolys()?;
    let all_vanish = basis1
        .iter()
        .all(|b| evaluate_tensor2k(b, &assign).map(|v| v.is_zero()).unwrap_or(false));
    items.push(CheckItem::new(
        "unit-pair span vanishes at the separating tuple",
        all_vanish,
        format!("basis size {}", basis1.len()),
    ));
    items.push(CheckItem::new(
        "skew pair lies outside the unit-pair span",
        !span1.contains(f2)?,
        "",
    ));
    Ok(MinimalityReport { k, items })
}

// ---------------------------------------------------------------------------
// Deduction chain replay
// ---------------------------------------------------------------------------

struct ChainInstance {
    name: String,
    start: UPoly,
    steps: Vec<DeductionStep>,
    target: UPoly,
    /// When false, the final polynomial may differ from the target by a
    /// residual that must itself be an identity.
    exact: bool,
}

/// Report of the chain replay.
pub struct ReplayReport {
    pub k: usize,
    pub families: Vec<CheckItem>,
    pub total: usize,
    pub passed: usize,
}

impl ReplayReport {
    pub fn all_pass(&self) -> bool {
        self.families.iter().all(|f| f.pass)
    }
}

fn run_chain(inst: &ChainInstance, ctx: &PbwCtx) -> Result<bool> {
    if !is_identity(&inst.start)? || !is_identity(&inst.target)? {
        return Ok(false);
    }
    let fin = deduce(&inst.start, &inst.steps, ctx)?;
    let residual = fin.sub(&inst.target);
    if inst.exact {
        Ok(residual.is_zero())
    } else {
        Ok(residual.is_zero() || is_identity(&residual)?)
    }
}

fn act(exp: PBWElem) -> DeductionStep {
    DeductionStep { exponent: exp, subtract: Vec::new() }
}

fn act_sub(exp: PBWElem, subtract: Vec<(Rat, usize)>) -> DeductionStep {
    DeductionStep { exponent: exp, subtract }
}

/// Replays the eight deduction families for all admissible index tuples at
/// the given size.
pub fn replay_deduction_chains(k: usize) -> Result<ReplayReport> {
    let ctx = PbwCtx::new(k)?;
    let mut families: Vec<CheckItem> = Vec::new();
    let mut total = 0usize;
    let mut passed = 0usize;
    let mut run_family = |name: &str, instances: Vec<ChainInstance>| -> Result<()> {
        let n = instances.len();
        let mut ok = 0usize;
        let mut failing: Vec<String> = Vec::new();
        for inst in &instances {
            if run_chain(inst, &ctx)? {
                ok += 1;
            } else if failing.len() < 5 {
                failing.push(inst.name.clone());
            }
        }
        total += n;
        passed += ok;
        let detail = if failing.is_empty() {
            format!("{ok}/{n} instances")
        } else {
            format!("{ok}/{n} instances; failing: {}", failing.join(", "))
        };
        families.push(CheckItem::new(name, ok == n, detail));
        Ok(())
    };

    let e = |i: usize, j: usize| ctx.e(i, j).unwrap();
    let sq = |i: usize, j: usize| ctx.power(&e(i, j), 2);
    let one = Rat::one();

    // Family 1: single products of a repeated unit exponent.
    let mut v = Vec::new();
    for a in 1..=k {
        for b in 1..=k {
            if a == b {
                continue;
            }
            for c in 1..=k {
                if c != a && c != b {
                    v.push(ChainInstance {
                        name: format!("d1 row-change ({a},{b};{c})"),
                        start: xy(k, Sec::E(a, b), Sec::E(a, b))?,
                        steps: vec![act(sq(c, a).scale(&rat(1, 2)))],
                        target: xy(k, Sec::E(c, b), Sec::E(c, b))?,
                        exact: true,
                    });
                    v.push(ChainInstance {
                        name: format!("d1 col-change ({a},{b};{c})"),
                        start: xy(k, Sec::E(a, b), Sec::E(a, b))?,
                        steps: vec![act(sq(b, c).scale(&rat(1, 2)))],
                        target: xy(k, Sec::E(a, c), Sec::E(a, c))?,
                        exact: true,
                    });
                }
            }
            v.push(ChainInstance {
                name: format!("d1 transpose ({a},{b})"),
                start: xy(k, Sec::E(a, b), Sec::E(a, b))?,
                steps: vec![act(ctx.power(&e(b, a), 4).scale(&rat(1, 24)))],
                target: xy(k, Sec::E(b, a), Sec::E(b, a))?,
                exact: true,
            });
        }
    }
    run_family("one-monomial unit identities, two indices", v)?;

    // Family 2: three distinct indices.
    let mut v = Vec::new();
    for a in 1..=k {
        for b in 1..=k {
            for c in 1..=k {
                if a == b || a == c || b == c {
                    continue;
                }
                let start = xy(k, Sec::E(a, b), Sec::E(c, a))?;
                v.push(ChainInstance {
                    name: format!("d2.1 ({a},{b},{c})"),
                    start: start.clone(),
                    steps: vec![act(sq(b, a).scale(&rat(-1, 2)))],
                    target: xy(k, Sec::E(b, a), Sec::E(c, a))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d2.2 ({a},{b},{c})"),
                    start: start.clone(),
                    steps: vec![act(sq(a, c).scale(&rat(-1, 2)))],
                    target: xy(k, Sec::E(a, b), Sec::E(a, c))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d2.3 ({a},{b},{c})"),
                    start: start.clone(),
                    steps: vec![act(sq(b, c).scale(&rat(-1, 2)))],
                    target: xy(k, Sec::E(a, c), Sec::E(b, a))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d2.4 ({a},{b},{c})"),
                    start: start.clone(),
                    steps: vec![
                        act(e(b, a).scale(&-one.clone())),
                        act_sub(e(a, b).scale(&-one.clone()), vec![(rat_int(2), 0)]),
                        act_sub(e(b, a).scale(&rat(1, 2)), vec![(rat(-1, 2), 1)]),
                    ],
                    target: xy(k, Sec::E(b, a), Sec::E(c, b))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d2.7 ({a},{b},{c})"),
                    start: xy(k, Sec::E(a, b), Sec::E(a, c))?,
                    steps: vec![act(e(c, b).scale(&-one.clone()))],
                    target: xy(k, Sec::E(a, b), Sec::E(a, b))?,
                    exact: true,
                });
                for d in 1..=k {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    v.push(ChainInstance {
                        name: format!("d2.5 ({a},{b},{c},{d})"),
                        start: start.clone(),
                        steps: vec![
                            act(e(d, a)),
                            act_sub(e(a, d).scale(&-one.clone()), vec![(rat_int(-1), 0)]),
                        ],
                        target: xy(k, Sec::E(d, b), Sec::E(c, d))?,
                        exact: true,
                    });
                    v.push(ChainInstance {
                        name: format!("d2.6 ({a},{b},{c},{d})"),
                        start: start.clone(),
                        steps: vec![act(e(b, d).scale(&-one.clone()))],
                        target: xy(k, Sec::E(a, d), Sec::E(c, a))?,
                        exact: true,
                    });
                }
            }
        }
    }
    run_family("one-monomial unit identities, three indices", v)?;

    // Family 3: four distinct indices.
    let mut v = Vec::new();
    for a in 1..=k {
        for b in 1..=k {
            for c in 1..=k {
                for d in 1..=k {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if !distinct {
                        continue;
                    }
                    v.push(ChainInstance {
                        name: format!("d3.1 ({a},{b},{c},{d})"),
                        start: xy(k, Sec::E(a, b), Sec::E(c, a))?,
                        steps: vec![act(e(a, d).scale(&-one.clone()))],
                        target: xy(k, Sec::E(a, b), Sec::E(c, d))?,
                        exact: true,
                    });
                    let start4 = xy(k, Sec::E(a, b), Sec::E(c, d))?;
                    v.push(ChainInstance {
                        name: format!("d3.2 ({a},{b},{c},{d})"),
                        start: start4.clone(),
                        steps: vec![act(sq(b, a).scale(&rat(-1, 2)))],
                        target: xy(k, Sec::E(b, a), Sec::E(c, d))?,
                        exact: true,
                    });
                    v.push(ChainInstance {
                        name: format!("d3.3 ({a},{b},{c},{d})"),
                        start: start4.clone(),
                        steps: vec![act(sq(d, c).scale(&rat(-1, 2)))],
                        target: xy(k, Sec::E(a, b), Sec::E(d, c))?,
                        exact: true,
                    });
                    v.push(ChainInstance {
                        name: format!("d3.4 ({a},{b},{c},{d})"),
                        start: start4.clone(),
                        steps: vec![act(sq(b, c).scale(&rat(-1, 2)))],
                        target: xy(k, Sec::E(a, c), Sec::E(b, d))?,
                        exact: true,
                    });
                    for i in 1..=k {
                        if i != a && i != b && i != c && i != d {
                            v.push(ChainInstance {
                                name: format!("d3.5 ({a},{b},{c},{d};{i})"),
                                start: start4.clone(),
                                steps: vec![act(e(i, a))],
                                target: xy(k, Sec::E(i, b), Sec::E(c, d))?,
                                exact: true,
                            });
                        }
                    }
                }
            }
        }
    }
    run_family("one-monomial unit identities, four indices", v)?;

    // Family 4: reaching h-type exponents.
    let mut v = Vec::new();
    for i in 1..k {
        for a in 1..=k {
            for b in 1..=k {
                if a == b {
                    continue;
                }
                if a != i && a != i + 1 && b != i + 1 {
                    v.push(ChainInstance {
                        name: format!("d4.1 (i={i};{a},{b})"),
                        start: xy(k, Sec::E(i, i + 1), Sec::E(a, b))?,
                        steps: vec![act(e(i + 1, i).scale(&-one.clone()))],
                        target: xy(k, Sec::H(i), Sec::E(a, b))?,
                        exact: true,
                    });
                }
                if a != i && b != i && b != i + 1 {
                    v.push(ChainInstance {
                        name: format!("d4.3 (i={i};{a},{b})"),
                        start: xy(k, Sec::E(a, b), Sec::E(i, i + 1))?,
                        steps: vec![act(e(i + 1, i).scale(&-one.clone()))],
                        target: xy(k, Sec::E(a, b), Sec::H(i))?,
                        exact: true,
                    });
                }
            }
            if a != i && a != i + 1 {
                v.push(ChainInstance {
                    name: format!("d4.2 (i={i};{a})"),
                    start: xy(k, Sec::E(i, i + 1), Sec::E(a, i + 1))?,
                    steps: vec![act(e(i + 1, i).scale(&-one.clone()))],
                    target: xy(k, Sec::H(i), Sec::E(a, i + 1))?,
                    exact: false,
                });
                v.push(ChainInstance {
                    name: format!("d4.4 (i={i};{a})"),
                    start: xy(k, Sec::E(i, a), Sec::E(i, i + 1))?,
                    steps: vec![act(e(i + 1, i))],
                    target: xy(k, Sec::E(i, a), Sec::H(i))?.scale(&rat_int(-1)),
                    exact: false,
                });
            }
        }
        for j in 1..k {
            if i + 1 < j || j + 1 < i {
                v.push(ChainInstance {
                    name: format!("d4.5 (i={i},j={j})"),
                    start: xy(k, Sec::H(i), Sec::E(j, j + 1))?,
                    steps: vec![act(e(j + 1, j).scale(&-one.clone()))],
                    target: xy(k, Sec::H(i), Sec::H(j))?,
                    exact: true,
                });
            }
        }
    }
    run_family("h-type exponents reached from unit identities", v)?;

    // Family 5: auxiliary two-term differences.
    let mut v = Vec::new();
    for i in 1..=k {
        for j in 1..=k {
            for l in 1..=k {
                if i == j || i == l || j == l {
                    continue;
                }
                v.push(ChainInstance {
                    name: format!("d5.1 ({i},{j},{l})"),
                    start: xy(k, Sec::E(i, j), Sec::E(l, i))?,
                    steps: vec![act(e(j, l).scale(&-one.clone()))],
                    target: xy(k, Sec::E(i, l), Sec::E(l, i))?
                        .sub(&xy(k, Sec::E(i, j), Sec::E(j, i))?),
                    exact: true,
                });
                if j < k && l != j + 1 {
                    v.push(ChainInstance {
                        name: format!("d5.2 ({i},{j},{l})"),
                        start: xy(k, Sec::E(i, l), Sec::H(j))?,
                        steps: vec![act(e(l, j).scale(&-one.clone()))],
                        target: xy(k, Sec::E(i, j), Sec::H(j))?
                            .sub(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                        exact: true,
                    });
                }
                if i < k && l != i + 1 {
                    v.push(ChainInstance {
                        name: format!("d5.4 ({i},{j},{l})"),
                        start: xy(k, Sec::H(i), Sec::E(l, j))?,
                        steps: vec![act(e(i, l))],
                        target: xy(k, Sec::H(i), Sec::E(i, j))?
                            .sub(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                        exact: true,
                    });
                }
            }
        }
    }
    for j in 1..k {
        for i in 1..=k {
            if i != j && i != j + 1 {
                v.push(ChainInstance {
                    name: format!("d5.3 (i={i},j={j})"),
                    start: xy(k, Sec::E(i, j + 1), Sec::E(j, j + 1))?,
                    steps: vec![act(sq(j + 1, j).scale(&rat(1, 2)))],
                    target: xy(k, Sec::E(i, j), Sec::H(j))?
                        .sub(&xy(k, Sec::E(i, j + 1), Sec::E(j + 1, j))?),
                    exact: true,
                });
            }
        }
    }
    for i in 1..k {
        for j in 1..=k {
            if j != i && j != i + 1 {
                v.push(ChainInstance {
                    name: format!("d5.5 (i={i},j={j})"),
                    start: xy(k, Sec::E(i + 1, i), Sec::E(i + 1, j))?,
                    steps: vec![act(sq(i, i + 1).scale(&rat(1, 2)))],
                    target: xy(k, Sec::H(i), Sec::E(i, j))?
                        .sub(&xy(k, Sec::E(i, i + 1), Sec::E(i + 1, j))?),
                    exact: true,
                });
            }
        }
    }
    run_family("auxiliary index-moving differences", v)?;

    // Family 6: two- and three-monomial sums with variables in order.
    let mut v = Vec::new();
    for i in 1..=k {
        for j in 2..=k {
            for l in 1..=k {
                if i == j || i == l || j == l {
                    continue;
                }
                if l != j - 1 {
                    v.push(ChainInstance {
                        name: format!("d6.1 ({i},{j},{l})"),
                        start: xy(k, Sec::E(i, l), Sec::H(j - 1))?,
                        steps: vec![act(e(l, j).scale(&-one.clone()))],
                        target: xy(k, Sec::E(i, j), Sec::H(j - 1))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                        exact: true,
                    });
                }
            }
            if i != j && i != j - 1 {
                v.push(ChainInstance {
                    name: format!("d6.2 ({i},{j})"),
                    start: xy(k, Sec::E(i, j - 1), Sec::E(j, j - 1))?,
                    steps: vec![act(sq(j - 1, j).scale(&rat(-1, 2)))],
                    target: xy(k, Sec::E(i, j), Sec::H(j - 1))?
                        .add(&xy(k, Sec::E(i, j - 1), Sec::E(j - 1, j))?),
                    exact: true,
                });
            }
        }
    }
    for i in 2..=k {
        for j in 1..=k {
            for l in 1..=k {
                if i == j || i == l || j == l {
                    continue;
                }
                if l != i - 1 {
                    v.push(ChainInstance {
                        name: format!("d6.3 ({i},{j},{l})"),
                        start: xy(k, Sec::H(i - 1), Sec::E(l, j))?,
                        steps: vec![act(e(i, l))],
                        target: xy(k, Sec::H(i - 1), Sec::E(i, j))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                        exact: true,
                    });
                }
                if j != i - 1 {
                    v.push(ChainInstance {
                        name: format!("d6.t1 ({i},{j},{l})"),
                        start: xy(k, Sec::H(i - 1), Sec::E(i, j))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, j))?),
                        steps: vec![act(e(j, i).scale(&-one.clone()))],
                        target: xy(k, Sec::H(i - 1), Sec::Hg(i, j))?
                            .add(&xy(k, Sec::E(i, l), Sec::E(l, i))?),
                        exact: false,
                    });
                }
            }
            if i != j && j != i - 1 {
                v.push(ChainInstance {
                    name: format!("d6.4 ({i},{j})"),
                    start: xy(k, Sec::E(i - 1, i), Sec::E(i - 1, j))?,
                    steps: vec![act(sq(i, i - 1).scale(&rat(-1, 2)))],
                    target: xy(k, Sec::H(i - 1), Sec::E(i, j))?
                        .add(&xy(k, Sec::E(i, i - 1), Sec::E(i - 1, j))?),
                    exact: true,
                });
            }
        }
    }
    for i in 1..k {
        for j in 1..=k {
            if j == i || j == i + 1 {
                continue;
            }
            v.push(ChainInstance {
                name: format!("d6.t2 (i={i},j={j})"),
                start: xy(k, Sec::H(i), Sec::E(i, i + 1))?
                    .sub(&xy(k, Sec::E(i, j), Sec::E(j, i + 1))?),
                steps: vec![act(e(i + 1, i).scale(&-one.clone()))],
                target: xy(k, Sec::H(i), Sec::H(i))?
                    .sub(&xy(k, Sec::E(i + 1, j), Sec::E(j, i + 1))?)
                    .sub(&xy(k, Sec::E(i, j), Sec::E(j, i))?),
                exact: false,
            });
        }
    }
    run_family("ordered two- and three-monomial sums", v)?;

    // Family 7: permuted-variable skew pairs.
    let mut v = Vec::new();
    let skew = |s1: Sec, s2: Sec| -> Result<UPoly> { Ok(xy(k, s1, s2)?.sub(&yx(k, s1, s2)?)) };
    for a in 1..=k {
        for b in 1..=k {
            if a == b {
                continue;
            }
            v.push(ChainInstance {
                name: format!("d7.4 skew ({a},{b})"),
                start: skew(Sec::E(a, b), Sec::E(b, a))?,
                steps: vec![
                    act(e(b, a).scale(&-one.clone())),
                    act_sub(e(a, b), vec![(rat_int(-2), 0)]),
                    act_sub(e(b, a).scale(&rat(1, 2)), vec![(rat_int(1), 1)]),
                    act_sub(e(a, b).scale(&rat(-1, 2)), vec![(rat(-1, 2), 2)]),
                ],
                target: skew(Sec::E(b, a), Sec::E(a, b))?,
                exact: true,
            });
            for c in 1..=k {
                if c == a || c == b {
                    continue;
                }
                v.push(ChainInstance {
                    name: format!("d7.1 skew ({a},{b};{c})"),
                    start: skew(Sec::E(a, b), Sec::E(b, a))?,
                    steps: vec![act(e(a, c).scale(&-one.clone()))],
                    target: skew(Sec::E(a, b), Sec::E(b, c))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d7.2 skew ({a},{b};{c})"),
                    start: skew(Sec::E(a, b), Sec::E(b, a))?,
                    steps: vec![act(e(c, a))],
                    target: skew(Sec::E(c, b), Sec::E(b, a))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d7.3 skew ({a},{b};{c})"),
                    start: skew(Sec::E(a, b), Sec::E(b, a))?,
                    steps: vec![
                        act(e(c, a)),
                        act_sub(e(a, c).scale(&-one.clone()), vec![(rat_int(-1), 0)]),
                    ],
                    target: skew(Sec::E(c, b), Sec::E(b, c))?,
                    exact: true,
                });
            }
        }
    }
    for i in 2..k {
        for l in 1..=k {
            if l == i || l == i + 1 {
                continue;
            }
            v.push(ChainInstance {
                name: format!("d7.t (i={i},l={l})"),
                start: xy(k, Sec::E(i + 1, i), Sec::H(i - 1))?
                    .add(&xy(k, Sec::E(i + 1, l), Sec::E(l, i))?),
                steps: vec![act(e(i, i + 1))],
                target: xy(k, Sec::H(i), Sec::H(i - 1))?
                    .add(&xy(k, Sec::E(i, l), Sec::E(l, i))?),
                exact: false,
            });
        }
    }
    run_family("permuted-variable skew pairs", v)?;

    // Family 8: identity-slot commutators.
    let mut v = Vec::new();
    let comm = |s2: Sec| -> Result<UPoly> { Ok(xy(k, Sec::G, s2)?.sub(&yx(k, s2, Sec::G)?)) };
    for a in 1..=k {
        for b in 1..=k {
            if a == b {
                continue;
            }
            for c in 1..=k {
                if c == a || c == b {
                    continue;
                }
                v.push(ChainInstance {
                    name: format!("d8.1 ({a},{b};{c})"),
                    start: comm(Sec::E(a, b))?,
                    steps: vec![act(e(c, a))],
                    target: comm(Sec::E(c, b))?,
                    exact: true,
                });
                v.push(ChainInstance {
                    name: format!("d8.2 ({a},{b};{c})"),
                    start: comm(Sec::E(a, b))?,
                    steps: vec![act(e(b, c).scale(&-one.clone()))],
                    target: comm(Sec::E(a, c))?,
                    exact: true,
                });
            }
            v.push(ChainInstance {
                name: format!("d8.3 ({a},{b})"),
                start: comm(Sec::E(a, b))?,
                steps: vec![act(sq(b, a).scale(&rat(-1, 2)))],
                target: comm(Sec::E(b, a))?,
                exact: true,
            });
        }
    }
    for i in 1..k {
        v.push(ChainInstance {
            name: format!("d8.4 (i={i})"),
            start: comm(Sec::E(i, i + 1))?,
            steps: vec![act(e(i + 1, i).scale(&-one.clone()))],
            target: comm(Sec::H(i))?,
            exact: true,
        });
    }
    run_family("identity-slot commutators", v)?;

    Ok(ReplayReport { k, families, total, passed })
}

/// The adjacent h-h commutator assembled from established identities: it
/// equals an adjacent-sum instance minus its swapped counterpart plus a
/// variable-symmetry instance, each of which is an identity.
pub fn adjacent_h_commutator_decomposition(k: usize) -> Result<bool> {
    for i in 2..k {
        for l in 1..=k {
            if l == i || l == i + 1 {
                continue;
            }
            let nine =
                xy(k, Sec::H(i - 1), Sec::H(i))?.add(&xy(k, Sec::E(i, l), Sec::E(l, i))?);
            let reversed =
                yx(k, Sec::H(i), Sec::H(i - 1))?.add(&yx(k, Sec::E(i, l), Sec::E(l, i))?);
            let sym = yx(k, Sec::E(i, l), Sec::E(l, i))?
                .sub(&xy(k, Sec::E(i, l), Sec::E(l, i))?);
            let comm =
                xy(k, Sec::H(i - 1), Sec::H(i))?.sub(&yx(k, Sec::H(i), Sec::H(i - 1))?);
            let assembled = nine.sub(&reversed).add(&sym);
            if comm != assembled
                || !is_identity(&nine)?
                || !is_identity(&reversed)?
                || !is_identity(&sym)?
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
