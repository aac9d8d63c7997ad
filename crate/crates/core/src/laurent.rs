//! Coefficient rings: Laurent polynomials in `q^(1/2)`, rational functions
//! of `q`, and one-sided power series with an explicit validity bound.
//!
//! All exponents are stored in half-units, so `HalfExp(3)` means `q^(3/2)`.
//! Half-integer powers only ever enter as common scale factors, but the
//! arithmetic is uniform: internally everything is a Laurent polynomial in
//! the variable `x = q^(1/2)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exponent of `q` counted in half-units: `HalfExp(k)` stands for `q^(k/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfExp(pub i64);

impl HalfExp {
    pub const ZERO: HalfExp = HalfExp(0);

    pub fn from_halves(halves: i64) -> Self {
        HalfExp(halves)
    }

    pub fn from_int(full: i64) -> Self {
        HalfExp(2 * full)
    }

    pub fn halves(self) -> i64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    /// The exponent in full units. Panics on a genuine half-integer.
    pub fn full_units(self) -> i64 {
        assert!(self.is_integral(), "exponent {} is not integral", self);
        self.0 / 2
    }
}

impl Add for HalfExp {
    type Output = HalfExp;
    fn add(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 + rhs.0)
    }
}

impl Sub for HalfExp {
    type Output = HalfExp;
    fn sub(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0 - rhs.0)
    }
}

impl Neg for HalfExp {
    type Output = HalfExp;
    fn neg(self) -> HalfExp {
        HalfExp(-self.0)
    }
}

impl fmt::Display for HalfExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Order of vanishing at `q = 0`. The zero element has order `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QOrder {
    Finite(HalfExp),
    Infinite,
}

impl QOrder {
    pub fn finite(self) -> Option<HalfExp> {
        match self {
            QOrder::Finite(e) => Some(e),
            QOrder::Infinite => None,
        }
    }
}

impl PartialOrd for QOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (QOrder::Finite(a), QOrder::Finite(b)) => a.cmp(b),
            (QOrder::Finite(_), QOrder::Infinite) => Ordering::Less,
            (QOrder::Infinite, QOrder::Finite(_)) => Ordering::Greater,
            (QOrder::Infinite, QOrder::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for QOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QOrder::Finite(e) => write!(f, "{}", e),
            QOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Laurent polynomial in `q^(1/2)` over the integers.
///
/// Zero coefficients are never stored; the zero polynomial has an empty
/// term map.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<HalfExp, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(BigInt::one(), HalfExp::ZERO)
    }

    pub fn monomial(coeff: BigInt, exp: HalfExp) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    /// `q^(k/2)` for `k` half-units.
    pub fn q_pow(exp: HalfExp) -> Self {
        LaurentPoly::monomial(BigInt::one(), exp)
    }

    pub fn from_int(n: i64) -> Self {
        LaurentPoly::monomial(BigInt::from(n), HalfExp::ZERO)
    }

    pub fn from_terms(it: impl IntoIterator<Item = (HalfExp, BigInt)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: HalfExp, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (HalfExp, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: HalfExp) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exp(&self) -> Option<HalfExp> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<HalfExp> {
        self.terms.keys().next_back().copied()
    }

    pub fn q_order(&self) -> QOrder {
        match self.min_exp() {
            Some(e) => QOrder::Finite(e),
            None => QOrder::Infinite,
        }
    }

    /// Multiply by `q^(k/2)`.
    pub fn shift(&self, by: HalfExp) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e + by, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, by: &BigInt) -> Self {
        if by.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * by)).collect(),
        }
    }

    /// Substitute `q -> q^(-1)`.
    pub fn substitute_q_inverse(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-*e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Integer content (gcd of coefficients), non-negative.
    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Exact division by another Laurent polynomial; `None` if not divisible.
    fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        let mut rem = self.clone();
        let mut quo = LaurentPoly::zero();
        let (dl, dc) = {
            let e = d.max_exp().unwrap();
            (e, d.coeff(e))
        };
        while !rem.is_zero() {
            let re = rem.max_exp().unwrap();
            if re < dl {
                return None;
            }
            let rc = rem.coeff(re);
            let (q, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let t = LaurentPoly::monomial(q, re - dl);
            rem = &rem - &(&t * d);
            quo = &quo + &t;
        }
        Some(quo)
    }
}

/// Gcd of two Laurent polynomials viewed as polynomials in `x = q^(1/2)`,
/// after shifting both to lowest exponent zero. Primitive, positive
/// leading coefficient. Powers of `q` are units and never appear in it.
fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_gcd(b);
    }
    if b.is_zero() {
        return normalize_gcd(a);
    }
    let mut f = primitive_shifted(a);
    let mut g = primitive_shifted(b);
    if f.max_exp().unwrap() < g.max_exp().unwrap() {
        std::mem::swap(&mut f, &mut g);
    }
    let content = a.content().gcd(&b.content());
    // Primitive pseudo-remainder sequence.
    while !g.is_zero() {
        let r = pseudo_rem(&f, &g);
        f = g;
        g = primitive_shifted(&r);
    }
    let mut res = f.scale(&content);
    if res.coeff(res.max_exp().unwrap()).is_negative() {
        res = -&res;
    }
    res
}

fn normalize_gcd(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let mut r = primitive_shifted(p).scale(&p.content());
    if r.coeff(r.max_exp().unwrap()).is_negative() {
        r = -&r;
    }
    r
}

/// Shift to lowest exponent zero and divide out the integer content.
fn primitive_shifted(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let shifted = p.shift(-p.min_exp().unwrap());
    let c = shifted.content();
    shifted
        .div_exact(&LaurentPoly::monomial(c, HalfExp::ZERO))
        .unwrap()
}

/// Pseudo-remainder of `f` by `g` (both with lowest exponent zero).
fn pseudo_rem(f: &LaurentPoly, g: &LaurentPoly) -> LaurentPoly {
    let gl = g.max_exp().unwrap();
    let gc = g.coeff(gl);
    let mut rem = f.clone();
    while let Some(re) = rem.max_exp() {
        if re < gl {
            break;
        }
        let rc = rem.coeff(re);
        rem = &rem.scale(&gc) - &(&g.shift(re - gl) * &LaurentPoly::monomial(rc, HalfExp::ZERO));
    }
    rem
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(*ea + *eb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

/// The quantum integer `[n] = (q^n - q^-n)/(q - q^-1)`.
pub fn quantum_int(n: u32) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for k in 0..n {
        let e = (n as i64 - 1) - 2 * k as i64;
        p.add_term(HalfExp::from_int(e), BigInt::one());
    }
    p
}

/// `-(q + q^-1)`, the value of a closed loop.
pub fn loop_value() -> LaurentPoly {
    -&quantum_int(2)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            write_term(f, &abs, *e)?;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, abs: &BigInt, e: HalfExp) -> fmt::Result {
    if e == HalfExp::ZERO {
        return write!(f, "{}", abs);
    }
    if !abs.is_one() {
        write!(f, "{}*", abs)?;
    }
    if e.is_integral() {
        let k = e.full_units();
        if k == 1 {
            write!(f, "q")
        } else {
            write!(f, "q^{}", k)
        }
    } else {
        write!(f, "q^({}/2)", e.halves())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty Laurent polynomial".into()));
        }
        let mut out = LaurentPoly::zero();
        let bytes = s.as_bytes();
        let mut start = 0usize;
        let mut depth = 0i32;
        let mut cuts = Vec::new();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-'
                    if depth == 0
                        && i > 0
                        && bytes[i - 1] != b'^'
                        && bytes[i - 1] != b'*'
                        && bytes[i - 1] != b'+'
                        && bytes[i - 1] != b'-'
                        && bytes[i - 1] != b'(' =>
                {
                    cuts.push(i)
                }
                _ => {}
            }
        }
        cuts.push(s.len());
        for &cut in &cuts {
            let piece = &s[start..cut];
            if !piece.is_empty() {
                let (e, c) = parse_term(piece)?;
                out.add_term(e, c);
            }
            start = cut;
        }
        Ok(out)
    }
}

fn parse_term(t: &str) -> Result<(HalfExp, BigInt), Error> {
    let bad = || Error::Parse(format!("bad term '{}'", t));
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let (coeff_str, q_str) = match rest.find('q') {
        Some(i) => (&rest[..i], &rest[i..]),
        None => (rest, ""),
    };
    let coeff_str = coeff_str.strip_suffix('*').unwrap_or(coeff_str);
    let coeff: BigInt = if coeff_str.is_empty() {
        BigInt::one()
    } else {
        coeff_str.parse().map_err(|_| bad())?
    };
    let coeff = coeff * sign;
    if q_str.is_empty() {
        return Ok((HalfExp::ZERO, coeff));
    }
    let exp_str = q_str.strip_prefix('q').ok_or_else(bad)?;
    let exp = if exp_str.is_empty() {
        HalfExp::from_int(1)
    } else {
        let e = exp_str.strip_prefix('^').ok_or_else(bad)?;
        if let Some(inner) = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let halves = inner.strip_suffix("/2").ok_or_else(bad)?;
            HalfExp::from_halves(halves.parse().map_err(|_| bad())?)
        } else {
            HalfExp::from_int(e.parse().map_err(|_| bad())?)
        }
    };
    Ok((exp, coeff))
}

/// Rational function of `q` in lowest terms.
///
/// The denominator is a polynomial with lowest exponent zero and positive
/// leading coefficient; `gcd(num, den) = 1` up to units `±q^(k/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalQ {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalQ {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalQ {
                num,
                den: LaurentPoly::one(),
            });
        }
        // Push the denominator's power of q into the numerator.
        let dshift = den.min_exp().unwrap();
        let mut num = num.shift(-dshift);
        let mut den = den.shift(-dshift);
        let nshift = num.min_exp().unwrap();
        let num0 = num.shift(-nshift);
        let g = poly_gcd(&num0, &den);
        if !(g.max_exp() == Some(HalfExp::ZERO) && g.coeff(HalfExp::ZERO).is_one()) {
            num = num0.div_exact(&g).expect("gcd divides").shift(nshift);
            den = den.div_exact(&g).expect("gcd divides");
        }
        if den.coeff(den.max_exp().unwrap()).is_negative() {
            num = -&num;
            den = -&den;
        }
        Ok(RationalQ { num, den })
    }

    pub fn zero() -> Self {
        RationalQ {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RationalQ {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalQ {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == LaurentPoly::one()
    }

    pub fn add(&self, rhs: &RationalQ) -> RationalQ {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalQ::new(num, &self.den * &rhs.den).expect("nonzero den")
    }

    pub fn sub(&self, rhs: &RationalQ) -> RationalQ {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        RationalQ::new(num, &self.den * &rhs.den).expect("nonzero den")
    }

    pub fn mul(&self, rhs: &RationalQ) -> RationalQ {
        RationalQ::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero den")
    }

    pub fn neg(&self) -> RationalQ {
        RationalQ {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RationalQ, Error> {
        RationalQ::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &RationalQ) -> Result<RationalQ, Error> {
        RationalQ::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Order at `q = 0` of the expansion in ascending powers of `q`.
    pub fn q_order(&self) -> QOrder {
        match self.num.min_exp() {
            None => QOrder::Infinite,
            // den has lowest exponent 0 by normalisation.
            Some(e) => QOrder::Finite(e),
        }
    }

    pub fn substitute_q_inverse(&self) -> RationalQ {
        RationalQ::new(
            self.num.substitute_q_inverse(),
            self.den.substitute_q_inverse(),
        )
        .expect("nonzero den")
    }

    /// The unique expansion in ascending powers of `q` agreeing with this
    /// function, truncated after exponent `through`.
    ///
    /// Every denominator reached through this crate's constructions has
    /// constant term dividing all the iterated numerators (quantum-integer
    /// products have constant term 1), so the expansion is integral; a
    /// non-integral step is an internal failure and panics.
    pub fn series_expand(&self, through: HalfExp) -> PowerSeries {
        let mut out = PowerSeries::zero(Some(through));
        let ord = match self.num.min_exp() {
            None => return out,
            Some(e) => e,
        };
        let d0 = self.den.coeff(HalfExp::ZERO);
        let mut acc: BTreeMap<HalfExp, BigInt> = BTreeMap::new();
        let mut e = ord;
        while e <= through {
            let mut v = self.num.coeff(e);
            for (k, c) in &acc {
                let j = e - *k;
                if j > HalfExp::ZERO {
                    v -= c * self.den.coeff(j);
                }
            }
            let (q, r) = v.div_rem(&d0);
            assert!(r.is_zero(), "non-integral series expansion of {}", self);
            if !q.is_zero() {
                acc.insert(e, q.clone());
                out.add_term(e, q);
            } else {
                acc.insert(e, BigInt::zero());
            }
            e = e + HalfExp(1);
        }
        out
    }
}

impl fmt::Display for RationalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        if self.num.terms.len() > 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}

/// One-sided power series in ascending powers of `q^(1/2)`.
///
/// `valid_through = Some(b)` means every exponent `<= b` is exact and
/// nothing is known beyond; `None` marks an exact Laurent polynomial
/// reinterpreted as a series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    terms: BTreeMap<HalfExp, BigInt>,
    valid_through: Option<HalfExp>,
}

impl PowerSeries {
    pub fn zero(valid_through: Option<HalfExp>) -> Self {
        PowerSeries {
            terms: BTreeMap::new(),
            valid_through,
        }
    }

    pub fn one() -> Self {
        PowerSeries::from_laurent_exact(&LaurentPoly::one())
    }

    /// Reinterpret an exact Laurent polynomial as a series valid everywhere.
    pub fn from_laurent_exact(p: &LaurentPoly) -> Self {
        PowerSeries {
            terms: p.terms.clone(),
            valid_through: None,
        }
    }

    /// Reinterpret a Laurent polynomial as a series valid through `bound`,
    /// discarding any terms beyond it.
    pub fn from_laurent(p: &LaurentPoly, bound: HalfExp) -> Self {
        PowerSeries {
            terms: p
                .terms
                .iter()
                .filter(|(e, _)| **e <= bound)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            valid_through: Some(bound),
        }
    }

    pub fn add_term(&mut self, exp: HalfExp, coeff: BigInt) {
        if let Some(b) = self.valid_through {
            if exp > b {
                return;
            }
        }
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn valid_through(&self) -> Option<HalfExp> {
        self.valid_through
    }

    pub fn terms(&self) -> impl Iterator<Item = (HalfExp, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: HalfExp) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// No nonzero stored terms. With a finite bound this only asserts
    /// vanishing through the bound.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn q_order(&self) -> QOrder {
        match self.terms.keys().next() {
            Some(e) => QOrder::Finite(*e),
            None => QOrder::Infinite,
        }
    }

    /// Restrict to a (possibly tighter) validity bound.
    pub fn truncate(mut self, bound: Option<HalfExp>) -> Self {
        let bound = Self::min_bound(self.valid_through, bound);
        if let Some(b) = bound {
            self.terms.retain(|e, _| *e <= b);
        }
        self.valid_through = bound;
        self
    }

    fn min_bound(a: Option<HalfExp>, b: Option<HalfExp>) -> Option<HalfExp> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn add(&self, rhs: &PowerSeries) -> PowerSeries {
        let bound = Self::min_bound(self.valid_through, rhs.valid_through);
        let mut out = PowerSeries::zero(bound);
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &PowerSeries) -> PowerSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PowerSeries {
        PowerSeries {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            valid_through: self.valid_through,
        }
    }

    /// Product. The validity bound of each factor is degraded by the
    /// partner's negative lowest exponent, if any.
    pub fn mul(&self, rhs: &PowerSeries) -> PowerSeries {
        let adj = |vt: Option<HalfExp>, other: &PowerSeries| {
            vt.map(|b| {
                let o = other.q_order().finite().unwrap_or(HalfExp::ZERO);
                b + o.min(HalfExp::ZERO)
            })
        };
        let bound = Self::min_bound(adj(self.valid_through, rhs), adj(rhs.valid_through, self));
        let mut out = PowerSeries::zero(bound);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(*ea + *eb, ca * cb);
            }
        }
        out
    }

    pub fn mul_laurent(&self, p: &LaurentPoly) -> PowerSeries {
        self.mul(&PowerSeries::from_laurent_exact(p))
    }

    /// Substitute `q -> q^(-1)`. Only exact series survive this.
    pub fn substitute_q_inverse(&self) -> Result<PowerSeries, Error> {
        if self.valid_through.is_some() {
            return Err(Error::MirrorValidity);
        }
        Ok(PowerSeries {
            terms: self.terms.iter().map(|(e, c)| (-*e, c.clone())).collect(),
            valid_through: None,
        })
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = LaurentPoly {
            terms: self.terms.clone(),
        };
        write!(f, "{}", poly)?;
        if let Some(b) = self.valid_through {
            let next = b + HalfExp(1);
            if next.is_integral() {
                write!(f, "+O(q^{})", next.full_units())?;
            } else {
                write!(f, "+O(q^({}/2))", next.halves())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> LaurentPoly {
        LaurentPoly::q_pow(HalfExp::from_int(k))
    }

    fn qh(halves: i64) -> LaurentPoly {
        LaurentPoly::q_pow(HalfExp::from_halves(halves))
    }

    #[test]
    fn monomial_products() {
        assert_eq!(&q(2) * &q(3), q(5));
        assert_eq!(&qh(1) * &qh(1), q(1));
        assert_eq!(&qh(1) * &qh(-3), q(-1));
    }

    #[test]
    fn difference_of_squares() {
        let a = &q(1) + &q(-1);
        let b = &q(1) - &q(-1);
        assert_eq!(&a * &b, &q(2) - &q(-2));
    }

    // Long-multiplication oracle: (1+q^2) * (1 - q^2 + q^4 - ... ) telescopes.
    #[test]
    fn geometric_telescoping() {
        let onepq2 = &LaurentPoly::one() + &q(2);
        let mut alt = LaurentPoly::zero();
        for k in 0..=5 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            alt.add_term(HalfExp::from_int(2 * k), BigInt::from(sign));
        }
        let prod = &onepq2 * &alt;
        // 1 - q^12, everything in between cancels.
        assert_eq!(prod, &LaurentPoly::one() - &q(12));
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(quantum_int(1), LaurentPoly::one());
        assert_eq!(quantum_int(2), &q(1) + &q(-1));
        let q2 = quantum_int(2);
        let q3 = quantum_int(3);
        // [2]^2 = [3] + [1]
        assert_eq!(&q2 * &q2, &q3 + &LaurentPoly::one());
    }

    #[test]
    fn display_round_trip() {
        let cases = [
            LaurentPoly::zero(),
            LaurentPoly::one(),
            -&LaurentPoly::one(),
            &q(1) - &q(3),
            &(&q(-2) + &q(0)) + &q(7),
            qh(1),
            -&qh(-3),
            &LaurentPoly::monomial(BigInt::from(42), HalfExp::from_halves(5)) - &q(-1),
            LaurentPoly::monomial(BigInt::from(-7), HalfExp::ZERO),
        ];
        for p in &cases {
            let s = p.to_string();
            let back: LaurentPoly = s.parse().unwrap();
            assert_eq!(&back, p, "round trip through '{}'", s);
        }
    }

    #[test]
    fn display_shapes() {
        assert_eq!((&q(1) - &q(3)).to_string(), "q-q^3");
        assert_eq!(qh(-3).to_string(), "q^(-3/2)");
        assert_eq!(loop_value().to_string(), "-q^-1-q");
        assert_eq!(LaurentPoly::from_int(5).to_string(), "5");
    }

    #[test]
    fn rational_normalisation() {
        // 2q / (2q^3 + 2q) = 1/(q^2+1)
        let num = q(1).scale(&BigInt::from(2));
        let den = &q(3).scale(&BigInt::from(2)) + &q(1).scale(&BigInt::from(2));
        let r = RationalQ::new(num, den).unwrap();
        assert_eq!(r.num(), &LaurentPoly::one());
        assert_eq!(r.den(), &(&q(2) + &LaurentPoly::one()));
    }

    #[test]
    fn rational_field_ops() {
        let r = RationalQ::new(LaurentPoly::one(), quantum_int(2)).unwrap();
        let s = r.mul(&RationalQ::from_laurent(quantum_int(2)));
        assert_eq!(s, RationalQ::one());
        let t = r.add(&r.neg());
        assert!(t.is_zero());
        let u = r.inv().unwrap();
        assert_eq!(u, RationalQ::from_laurent(quantum_int(2)));
    }

    // Geometric series oracle: 1/(q+q^-1) = q - q^3 + q^5 - q^7 + ...
    #[test]
    fn expand_inverse_quantum_two() {
        let r = RationalQ::new(LaurentPoly::one(), quantum_int(2)).unwrap();
        let s = r.series_expand(HalfExp::from_int(7));
        let expected = {
            let mut p = PowerSeries::zero(Some(HalfExp::from_int(7)));
            for (k, sign) in [(1, 1), (3, -1), (5, 1), (7, -1)] {
                p.add_term(HalfExp::from_int(k), BigInt::from(sign));
            }
            p
        };
        assert_eq!(s, expected);
    }

    #[test]
    fn expand_matches_product() {
        // Verify num = den * expansion through the bound, for a thicker case.
        let num = &LaurentPoly::one() + &q(1);
        let den = &quantum_int(3) + &LaurentPoly::one();
        let r = RationalQ::new(num.clone(), den.clone()).unwrap();
        let through = HalfExp::from_int(12);
        let s = r.series_expand(through);
        let sp = LaurentPoly::from_terms(s.terms().map(|(e, c)| (e, c.clone())));
        let back = &sp * r.den();
        for (e, c) in back.terms() {
            if e <= through {
                assert_eq!(c, &r.num().coeff(e), "coefficient at {}", e);
            }
        }
    }

    #[test]
    fn q_orders() {
        assert_eq!(LaurentPoly::zero().q_order(), QOrder::Infinite);
        assert_eq!(
            (&q(2) + &q(5)).q_order(),
            QOrder::Finite(HalfExp::from_int(2))
        );
        let r = RationalQ::new(q(3), quantum_int(2)).unwrap();
        // ord num - ord den after normalisation: q^3/(q+q^-1) = q^4/(q^2+1).
        assert_eq!(r.q_order(), QOrder::Finite(HalfExp::from_int(4)));
        assert_eq!(RationalQ::zero().q_order(), QOrder::Infinite);
    }

    #[test]
    fn series_bound_rules() {
        let a = PowerSeries::from_laurent(&(&q(1) + &q(9)), HalfExp::from_int(5));
        let b = PowerSeries::from_laurent_exact(&q(-2));
        // q^9 is beyond the bound and must be dropped at construction.
        assert_eq!(a.coeff(HalfExp::from_int(9)), BigInt::zero());
        let p = a.mul(&b);
        // Bound degrades by the partner's negative lowest exponent.
        assert_eq!(p.valid_through(), Some(HalfExp::from_int(3)));
        assert_eq!(p.coeff(HalfExp::from_int(-1)), BigInt::one());
        let s = a.add(&PowerSeries::from_laurent(&q(2), HalfExp::from_int(4)));
        assert_eq!(s.valid_through(), Some(HalfExp::from_int(4)));
    }

    #[test]
    fn series_mirror_guard() {
        let exact = PowerSeries::from_laurent_exact(&(&q(1) + &q(2)));
        assert!(exact.substitute_q_inverse().is_ok());
        let bounded = PowerSeries::from_laurent(&q(1), HalfExp::from_int(9));
        assert_eq!(bounded.substitute_q_inverse(), Err(Error::MirrorValidity));
    }

    #[test]
    fn laurent_mirror_involution() {
        let p = &(&q(-3) + &q(2).scale(&BigInt::from(4))) - &qh(1);
        assert_eq!(p.substitute_q_inverse().substitute_q_inverse(), p);
    }
}
