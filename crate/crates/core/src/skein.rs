//! The Temperley-Lieb skein algebra: linear combinations of diagrams,
//! the Kauffman bracket of braid words, Jones-Wenzl projectors and their
//! torus-braid approximants.
//!
//! A closed loop evaluates to `-(q + q^-1)`; crossings resolve as
//! `s_i -> q^(1/2) id + q^(-1/2) U_i` and inverses with the exponents
//! negated. All elements store circle-free diagrams only.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::laurent::{
    loop_value, quantum_int, HalfExp, LaurentPoly, PowerSeries, QOrder, RationalQ,
};
use crate::tl_diagram::{enumerate_tl, TLDiagram};
use crate::Result;

/// Ring operations needed for coefficients of diagram combinations.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_laurent(p: &LaurentPoly) -> Self;
    /// Substitute `q -> q^(-1)`; fails for series with a finite bound.
    fn substitute_q_inverse(&self) -> Result<Self>;
}

impl Coefficient for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        p.clone()
    }
    fn substitute_q_inverse(&self) -> Result<Self> {
        Ok(self.substitute_q_inverse())
    }
}

impl Coefficient for RationalQ {
    fn zero() -> Self {
        RationalQ::zero()
    }
    fn one() -> Self {
        RationalQ::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn neg(&self) -> Self {
        self.neg()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        RationalQ::from_laurent(p.clone())
    }
    fn substitute_q_inverse(&self) -> Result<Self> {
        Ok(self.substitute_q_inverse())
    }
}

impl Coefficient for PowerSeries {
    fn zero() -> Self {
        PowerSeries::zero(None)
    }
    fn one() -> Self {
        PowerSeries::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn neg(&self) -> Self {
        self.neg()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn from_laurent(p: &LaurentPoly) -> Self {
        PowerSeries::from_laurent_exact(p)
    }
    fn substitute_q_inverse(&self) -> Result<Self> {
        self.substitute_q_inverse()
    }
}

/// A linear combination of circle-free planar diagrams with a common
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TLElement<C: Coefficient> {
    n_in: usize,
    n_out: usize,
    terms: BTreeMap<TLDiagram, C>,
}

impl<C: Coefficient> TLElement<C> {
    pub fn zero(n_in: usize, n_out: usize) -> Self {
        TLElement {
            n_in,
            n_out,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        TLElement::from_diagram(&TLDiagram::identity(n))
    }

    /// A single diagram; its circles are converted to loop values.
    pub fn from_diagram(d: &TLDiagram) -> Self {
        let mut e = TLElement::zero(d.n_in(), d.n_out());
        e.add_diagram(d, C::one());
        e
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Add `c` times a diagram, evaluating circles to loop values.
    pub fn add_diagram(&mut self, d: &TLDiagram, c: C) {
        debug_assert_eq!((d.n_in(), d.n_out()), (self.n_in, self.n_out));
        let mut c = c;
        if d.circles() > 0 {
            let delta = C::from_laurent(&loop_value());
            for _ in 0..d.circles() {
                c = c.mul(&delta);
            }
        }
        let key = d.stripped();
        let cur = self.terms.get(&key).cloned().unwrap_or_else(C::zero);
        let next = cur.add(&c);
        if next.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, next);
        }
    }

    pub fn coeff(&self, d: &TLDiagram) -> C {
        self.terms
            .get(&d.stripped())
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TLDiagram, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &TLElement<C>) -> Result<TLElement<C>> {
        if (self.n_in, self.n_out) != (rhs.n_in, rhs.n_out) {
            return Err(Error::BoundaryMismatch(
                rhs.n_in, rhs.n_out, self.n_in, self.n_out,
            ));
        }
        let mut out = self.clone();
        for (d, c) in &rhs.terms {
            out.add_diagram(d, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> TLElement<C> {
        let mut out = TLElement::zero(self.n_in, self.n_out);
        if c.is_zero() {
            return out;
        }
        for (d, x) in &self.terms {
            let y = x.mul(c);
            if !y.is_zero() {
                out.terms.insert(d.clone(), y);
            }
        }
        out
    }

    pub fn neg(&self) -> TLElement<C> {
        TLElement {
            n_in: self.n_in,
            n_out: self.n_out,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &TLElement<C>) -> Result<TLElement<C>> {
        self.add(&rhs.neg())
    }

    /// Compose with `rhs` stacked on top; circles become loop values.
    pub fn compose(&self, rhs: &TLElement<C>) -> Result<TLElement<C>> {
        if self.n_out != rhs.n_in {
            return Err(Error::BoundaryMismatch(
                rhs.n_in, rhs.n_out, self.n_in, self.n_out,
            ));
        }
        let mut out = TLElement::zero(self.n_in, rhs.n_out);
        for (d1, c1) in &self.terms {
            for (d2, c2) in &rhs.terms {
                let prod = d1.compose(d2)?;
                out.add_diagram(&prod, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn extend_right(&self, k: usize) -> TLElement<C> {
        TLElement {
            n_in: self.n_in + k,
            n_out: self.n_out + k,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.extend_right(k), c.clone()))
                .collect(),
        }
    }

    /// Vertical reflection combined with `q -> q^(-1)` on coefficients.
    pub fn mirror(&self) -> Result<TLElement<C>> {
        let mut out = TLElement::zero(self.n_out, self.n_in);
        for (d, c) in &self.terms {
            out.terms.insert(d.mirror(), c.substitute_q_inverse()?);
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TLElement<D> {
        let mut terms = BTreeMap::new();
        for (d, c) in &self.terms {
            let x = f(c);
            if !x.is_zero() {
                terms.insert(d.clone(), x);
            }
        }
        TLElement {
            n_in: self.n_in,
            n_out: self.n_out,
            terms,
        }
    }

    /// Markov trace: close every diagram and evaluate circles to loop
    /// values. Requires `n_in == n_out`.
    pub fn closure_value(&self) -> Result<C> {
        let delta = C::from_laurent(&loop_value());
        let mut acc = C::zero();
        for (d, c) in &self.terms {
            let circles = d.closure_trace()?.total_circles();
            let mut v = c.clone();
            for _ in 0..circles {
                v = v.mul(&delta);
            }
            acc = acc.add(&v);
        }
        Ok(acc)
    }
}

impl<C: Coefficient> fmt::Display for TLElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            let cs = c.to_string();
            if cs == "1" {
                write!(f, "[{}]", d)?;
            } else if cs
                .chars()
                .skip(1)
                .any(|ch| ch == '+' || ch == '-' || ch == '/')
            {
                write!(f, "({})*[{}]", cs, d)?;
            } else {
                write!(f, "{}*[{}]", cs, d)?;
            }
            first = false;
        }
        Ok(())
    }
}

/// A braid word on `n` strands. Letter `i > 0` is the positive generator
/// `s_i`, letter `-i` its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i64>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<i64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, n });
        }
        for &l in &letters {
            let i = l.unsigned_abs() as usize;
            if l == 0 || i + 1 > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        Ok(BraidWord { n, letters })
    }

    /// `(s_{n-1}^-1 ... s_1^-1)^(m n)`, the `m`-fold full twist braid
    /// cut open, with `m n (n-1)` crossings.
    pub fn torus(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, n });
        }
        let block: Vec<i64> = (1..n as i64).rev().map(|i| -i).collect();
        let mut letters = Vec::with_capacity(m * n * block.len());
        for _ in 0..m * n {
            letters.extend_from_slice(&block);
        }
        Ok(BraidWord { n, letters })
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[i64] {
        &self.letters
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|l| l.signum()).sum()
    }

    /// Mirror image: every crossing switched, order preserved.
    pub fn mirror(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().map(|l| -l).collect(),
        }
    }

    pub fn reversed(&self) -> BraidWord {
        BraidWord {
            n: self.n,
            letters: self.letters.iter().rev().copied().collect(),
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for l in &self.letters {
            write!(f, " {}", l)?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ns, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse("braid word must look like 'n: l1 l2 ...'".into()))?;
        let n: usize = ns
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad strand count '{}'", ns)))?;
        let mut letters = Vec::new();
        for tok in rest.split([' ', ',']).filter(|t| !t.is_empty()) {
            let l: i64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad braid letter '{}'", tok)))?;
            letters.push(l);
        }
        BraidWord::new(n, letters)
    }
}

/// Kauffman bracket in the Temperley-Lieb algebra, one crossing at a time.
pub fn bracket(w: &BraidWord) -> Result<TLElement<LaurentPoly>> {
    let n = w.strands();
    let mut acc = TLElement::identity(n);
    for &l in w.letters() {
        let i = l.unsigned_abs() as usize;
        let (e_id, e_u) = if l > 0 {
            (HalfExp(1), HalfExp(-1))
        } else {
            (HalfExp(-1), HalfExp(1))
        };
        let mut x = TLElement::zero(n, n);
        x.add_diagram(&TLDiagram::identity(n), LaurentPoly::q_pow(e_id));
        x.add_diagram(&TLDiagram::u(n, i)?, LaurentPoly::q_pow(e_u));
        acc = acc.compose(&x)?;
    }
    Ok(acc)
}

/// The Jones-Wenzl projector `p_n`, found as the unique element with
/// identity coefficient 1 killed by every cap.
pub fn jones_wenzl(n: usize) -> Result<TLElement<RationalQ>> {
    if n == 0 {
        return Ok(TLElement::identity(0));
    }
    let basis = enumerate_tl(n);
    let index: BTreeMap<&TLDiagram, usize> = basis.iter().zip(0..).collect();
    let m = basis.len();
    let delta = loop_value();

    // One row per (cap position, output diagram), plus normalisation.
    let mut rows: BTreeMap<(usize, TLDiagram), Vec<RationalQ>> = BTreeMap::new();
    for i in 1..n {
        let cap = TLDiagram::cap(n, i)?;
        for (d, &col) in &index {
            let prod = d.compose(&cap)?;
            let weight = delta.pow(prod.circles() as u32);
            let row = rows
                .entry((i, prod.stripped()))
                .or_insert_with(|| vec![RationalQ::zero(); m]);
            row[col] = row[col].add(&RationalQ::from_laurent(weight));
        }
    }
    let mut matrix: Vec<(Vec<RationalQ>, RationalQ)> =
        rows.into_values().map(|r| (r, RationalQ::zero())).collect();
    let id_col = index[&TLDiagram::identity(n)];
    let mut norm = vec![RationalQ::zero(); m];
    norm[id_col] = RationalQ::one();
    matrix.push((norm, RationalQ::one()));

    let solution = solve(matrix, m)?;
    let mut out = TLElement::zero(n, n);
    for (d, &col) in &index {
        if !solution[col].is_zero() {
            out.add_diagram(d, solution[col].clone());
        }
    }
    Ok(out)
}

/// Gauss-Jordan elimination over the rational function field. Requires a
/// unique solution.
fn solve(mut rows: Vec<(Vec<RationalQ>, RationalQ)>, m: usize) -> Result<Vec<RationalQ>> {
    let mut rank = 0usize;
    let mut pivot_of_col = vec![usize::MAX; m];
    for (col, pivot) in pivot_of_col.iter_mut().enumerate() {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank].0[col].inv()?;
        for x in rows[rank].0.iter_mut() {
            *x = x.mul(&inv);
        }
        rows[rank].1 = rows[rank].1.mul(&inv);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row.0[col].is_zero() {
                continue;
            }
            let factor = row.0[col].clone();
            for (x, p) in row.0.iter_mut().zip(pivot_row.0.iter()) {
                *x = x.sub(&factor.mul(p));
            }
            row.1 = row.1.sub(&factor.mul(&pivot_row.1));
        }
        *pivot = rank;
        rank += 1;
    }
    if rank < m {
        return Err(Error::SingularSystem);
    }
    for row in rows.iter().skip(rank) {
        if !row.1.is_zero() {
            return Err(Error::SingularSystem);
        }
    }
    Ok(pivot_of_col.iter().map(|&r| rows[r].1.clone()).collect())
}

/// Reference construction of `p_n` by the Wenzl recursion
/// `p_{k+1} = p_k + ([k]/[k+1]) p_k U_k p_k`.
pub fn jones_wenzl_recursive(n: usize) -> Result<TLElement<RationalQ>> {
    let mut p: TLElement<RationalQ> = TLElement::identity(n.min(1));
    for k in 1..n {
        let pk = p.extend_right(1);
        let uk = TLElement::from_diagram(&TLDiagram::u(k + 1, k)?);
        let ratio = RationalQ::new(quantum_int(k as u32), quantum_int(k as u32 + 1))?;
        let correction = pk.compose(&uk)?.compose(&pk)?.scale(&ratio);
        p = pk.add(&correction)?;
    }
    Ok(p)
}

/// Coefficients of `p_n` expanded as power series through `through`.
pub fn jw_series(n: usize, through: HalfExp) -> Result<TLElement<PowerSeries>> {
    let p = jones_wenzl(n)?;
    Ok(p.map_coeffs(|c| c.series_expand(through)))
}

/// The framing-corrected bracket of the torus braid: the bracket of
/// `BraidWord::torus(n, m)` times `q^(m n (n-1) / 2)`.
pub fn approximant(n: usize, m: usize) -> Result<TLElement<LaurentPoly>> {
    let w = BraidWord::torus(n, m)?;
    let b = bracket(&w)?;
    let shift = HalfExp((m * n * (n - 1)) as i64);
    Ok(b.scale(&LaurentPoly::q_pow(shift)))
}

/// Smallest order in `q` at which the approximant differs from the
/// projector, coefficient by coefficient.
pub fn convergence_order(n: usize, m: usize) -> Result<QOrder> {
    let p = jones_wenzl(n)?;
    let a = approximant(n, m)?.map_coeffs(|c| RationalQ::from_laurent(c.clone()));
    let diff = p.sub(&a)?;
    let mut best = QOrder::Infinite;
    for (_, c) in diff.terms() {
        best = best.min(c.q_order());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(k: i64) -> LaurentPoly {
        LaurentPoly::q_pow(HalfExp::from_int(k))
    }

    fn u_elt(n: usize, i: usize) -> TLElement<LaurentPoly> {
        TLElement::from_diagram(&TLDiagram::u(n, i).unwrap())
    }

    #[test]
    fn loop_evaluation() {
        // U_1^2 = -(q+q^-1) U_1.
        let u = u_elt(2, 1);
        let sq = u.compose(&u).unwrap();
        assert_eq!(sq, u.scale(&loop_value()));
    }

    #[test]
    fn bracket_double_negative_twist() {
        let w = BraidWord::new(2, vec![-1, -1]).unwrap();
        let b = bracket(&w).unwrap();
        assert_eq!(b.coeff(&TLDiagram::identity(2)), q(-1));
        assert_eq!(
            b.coeff(&TLDiagram::u(2, 1).unwrap()),
            &LaurentPoly::one() - &q(2)
        );
    }

    #[test]
    fn kink_values() {
        // Closing one strand of a single crossing gives the kink factor
        // times the identity on the other strand.
        // Partial closure of strand 2: cup_2 on one strand, the crossing
        // extended by an identity strand, then cap_2.
        let cap = TLElement::<LaurentPoly>::from_diagram(&TLDiagram::cap(3, 2).unwrap());
        let cup = TLElement::<LaurentPoly>::from_diagram(&TLDiagram::cup(3, 2).unwrap());
        let close = |w: &BraidWord| {
            let b = bracket(w).unwrap().extend_right(1);
            cup.compose(&b).unwrap().compose(&cap).unwrap()
        };
        // Negative kink: -q^(-3/2).
        let closed = close(&BraidWord::new(2, vec![-1]).unwrap());
        let expected =
            TLElement::identity(1).scale(&-&LaurentPoly::q_pow(HalfExp::from_halves(-3)));
        assert_eq!(closed, expected);
        // Positive kink: -q^(3/2).
        let closed = close(&BraidWord::new(2, vec![1]).unwrap());
        let expected = TLElement::identity(1).scale(&-&LaurentPoly::q_pow(HalfExp::from_halves(3)));
        assert_eq!(closed, expected);
    }

    #[test]
    fn cap_slides_over_negative_crossing() {
        // A cap over s_1^-1 flattens to -q^(3/2) times the cap: the bend
        // turns the crossing into a kink of the opposite handedness.
        let w = BraidWord::new(2, vec![-1]).unwrap();
        let b = bracket(&w).unwrap();
        let cap = TLElement::<LaurentPoly>::from_diagram(&TLDiagram::cap(2, 1).unwrap());
        let slid = b.compose(&cap).unwrap();
        let expected = cap.scale(&-&LaurentPoly::q_pow(HalfExp::from_halves(3)));
        assert_eq!(slid, expected);
    }

    #[test]
    fn reidemeister_two() {
        let w = BraidWord::new(3, vec![2, -2]).unwrap();
        assert_eq!(bracket(&w).unwrap(), TLElement::identity(3));
    }

    #[test]
    fn reidemeister_three() {
        let a = BraidWord::new(3, vec![-1, -2, -1]).unwrap();
        let b = BraidWord::new(3, vec![-2, -1, -2]).unwrap();
        assert_eq!(bracket(&a).unwrap(), bracket(&b).unwrap());
    }

    #[test]
    fn unknot_closure() {
        let b = bracket(&BraidWord::new(1, vec![]).unwrap()).unwrap();
        assert_eq!(b.closure_value().unwrap(), loop_value());
        // A kinked unknot closure differs by the framing factor only.
        let b = bracket(&BraidWord::new(2, vec![-1]).unwrap()).unwrap();
        let v = b.closure_value().unwrap();
        let expected = &loop_value() * &-&LaurentPoly::q_pow(HalfExp::from_halves(-3));
        assert_eq!(v, expected);
    }

    #[test]
    fn jw_two_exact() {
        let p = jones_wenzl(2).unwrap();
        assert_eq!(p.coeff(&TLDiagram::identity(2)), RationalQ::one());
        let expected = RationalQ::new(
            LaurentPoly::q_pow(HalfExp::from_int(1)),
            &LaurentPoly::q_pow(HalfExp::from_int(2)) + &LaurentPoly::one(),
        )
        .unwrap();
        assert_eq!(p.coeff(&TLDiagram::u(2, 1).unwrap()), expected);
    }

    #[test]
    fn jw_killed_by_caps() {
        for n in 2..=4 {
            let p = jones_wenzl(n).unwrap();
            for i in 1..n {
                let cap = TLElement::<RationalQ>::from_diagram(&TLDiagram::cap(n, i).unwrap());
                let prod = p.compose(&cap).unwrap();
                assert!(prod.is_zero(), "cap_{} after p_{}", i, n);
            }
        }
    }

    #[test]
    fn jw_idempotent() {
        let p = jones_wenzl(3).unwrap();
        assert_eq!(p.compose(&p).unwrap(), p);
    }

    #[test]
    fn jw_matches_wenzl_recursion() {
        for n in 1..=5 {
            let solved = jones_wenzl(n).unwrap();
            let recursive = jones_wenzl_recursive(n).unwrap();
            assert_eq!(solved, recursive, "p_{}", n);
        }
    }

    #[test]
    fn jw_series_expansion() {
        let s = jw_series(2, HalfExp::from_int(7)).unwrap();
        let c = s.coeff(&TLDiagram::u(2, 1).unwrap());
        let mut expected = PowerSeries::zero(Some(HalfExp::from_int(7)));
        for (k, sign) in [(1i64, 1), (3, -1), (5, 1), (7, -1)] {
            expected.add_term(HalfExp::from_int(k), BigInt::from(sign));
        }
        assert_eq!(c, expected);
    }

    #[test]
    fn approximant_small_cases() {
        let a = approximant(2, 1).unwrap();
        assert_eq!(a.coeff(&TLDiagram::identity(2)), LaurentPoly::one());
        assert_eq!(a.coeff(&TLDiagram::u(2, 1).unwrap()), &q(1) - &q(3));
        let a = approximant(2, 2).unwrap();
        assert_eq!(a.coeff(&TLDiagram::identity(2)), LaurentPoly::one());
        assert_eq!(
            a.coeff(&TLDiagram::u(2, 1).unwrap()),
            LaurentPoly::from_terms(
                [(1i64, 1i64), (3, -1), (5, 1), (7, -1)]
                    .map(|(k, c)| (HalfExp::from_int(k), BigInt::from(c)))
            )
        );
    }

    #[test]
    fn convergence_orders_two_strands() {
        assert_eq!(
            convergence_order(2, 1).unwrap(),
            QOrder::Finite(HalfExp::from_int(5))
        );
        assert_eq!(
            convergence_order(2, 2).unwrap(),
            QOrder::Finite(HalfExp::from_int(9))
        );
    }

    #[test]
    fn torus_word_shape() {
        let w = BraidWord::torus(3, 1).unwrap();
        assert_eq!(w.letters().len(), 6);
        assert_eq!(&w.letters()[..2], &[-2, -1]);
        assert_eq!(w.writhe(), -6);
    }

    #[test]
    fn braid_word_round_trip() {
        let w = BraidWord::new(3, vec![-1, 2, -2]).unwrap();
        let s = w.to_string();
        assert_eq!(s, "3: -1 2 -2");
        let back: BraidWord = s.parse().unwrap();
        assert_eq!(back, w);
        assert!("3: 0".parse::<BraidWord>().is_err());
        assert!("2: 2".parse::<BraidWord>().is_err());
    }

    #[test]
    fn mirror_relations() {
        let w = BraidWord::new(3, vec![-1, -2]).unwrap();
        let b = bracket(&w).unwrap();
        let mb = b.mirror().unwrap();
        // Vertical flip reverses the word; the mirror negates letters.
        let expected = bracket(&w.mirror().reversed()).unwrap();
        assert_eq!(mb, expected);
    }
}
