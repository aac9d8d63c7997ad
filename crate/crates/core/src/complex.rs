//! Triply graded complexes over the dotted cobordism category.
//!
//! Objects are Temperley-Lieb diagrams with a grading shift `{q; h; z2}`,
//! differentials are matrices of [`CobLin`] entries between adjacent
//! homological degrees. Complexes of braid words categorify the bracket:
//! `K0` recovers the skein element, delooping and Gaussian reduction
//! preserve the homotopy type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg};

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::cobordism::{deloop, CobLin};
use crate::error::Error;
use crate::laurent::{HalfExp, LaurentPoly};
use crate::skein::{BraidWord, TLElement};
use crate::tl_diagram::TLDiagram;
use crate::Result;

/// One full homological unit in half-unit storage.
const FULL: HalfExp = HalfExp(2);

/// Shift triple `{q; h; z2}`, each component in half-units.
///
/// `z2` is an inner grading defined modulo two full units; it is kept
/// reduced so that equality of gradings is equality of structs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Grading {
    q: HalfExp,
    h: HalfExp,
    z2: HalfExp,
}

impl Grading {
    pub fn new(q: HalfExp, h: HalfExp, z2: HalfExp) -> Self {
        Grading {
            q,
            h,
            z2: HalfExp(z2.0.rem_euclid(4)),
        }
    }

    pub fn zero() -> Self {
        Grading::new(HalfExp(0), HalfExp(0), HalfExp(0))
    }

    pub fn q(&self) -> HalfExp {
        self.q
    }

    pub fn h(&self) -> HalfExp {
        self.h
    }

    pub fn z2(&self) -> HalfExp {
        self.z2
    }
}

impl Add for Grading {
    type Output = Grading;
    fn add(self, rhs: Grading) -> Grading {
        Grading::new(self.q + rhs.q, self.h + rhs.h, self.z2 + rhs.z2)
    }
}

impl Neg for Grading {
    type Output = Grading;
    fn neg(self) -> Grading {
        Grading::new(-self.q, -self.h, -self.z2)
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{};{};{}}}", self.q, self.h, self.z2)
    }
}

/// A diagram together with its grading shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TLObject {
    pub diagram: TLDiagram,
    pub grading: Grading,
}

/// A bounded complex of graded TL diagrams with cobordism differentials.
///
/// Chain groups are keyed by the `h` half-degree; a differential entry
/// goes from `(h, i)` to `(h + 1, j)` (one full unit up).
#[derive(Debug, Clone)]
pub struct TLComplex {
    n_in: usize,
    n_out: usize,
    groups: BTreeMap<HalfExp, Vec<TLObject>>,
    diffs: BTreeMap<HalfExp, BTreeMap<(usize, usize), CobLin>>,
}

impl TLComplex {
    pub fn new(n_in: usize, n_out: usize) -> Self {
        TLComplex {
            n_in,
            n_out,
            groups: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    /// One-object complex: `d` at grading zero, no differential.
    pub fn from_diagram(d: TLDiagram) -> Self {
        let mut c = TLComplex::new(d.n_in(), d.n_out());
        c.push_object(TLObject {
            diagram: d,
            grading: Grading::zero(),
        });
        c
    }

    pub fn identity_complex(n: usize) -> Self {
        TLComplex::from_diagram(TLDiagram::identity(n))
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn groups(&self) -> &BTreeMap<HalfExp, Vec<TLObject>> {
        &self.groups
    }

    pub fn differentials(&self) -> &BTreeMap<HalfExp, BTreeMap<(usize, usize), CobLin>> {
        &self.diffs
    }

    pub fn objects_at(&self, h: HalfExp) -> &[TLObject] {
        self.groups.get(&h).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn object(&self, h: HalfExp, i: usize) -> Option<&TLObject> {
        self.groups.get(&h).and_then(|v| v.get(i))
    }

    pub fn entry(&self, h: HalfExp, i: usize, j: usize) -> Option<&CobLin> {
        self.diffs.get(&h).and_then(|m| m.get(&(i, j)))
    }

    pub fn object_count(&self) -> usize {
        self.groups.values().map(|v| v.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.object_count() == 0
    }

    pub fn h_min(&self) -> Option<HalfExp> {
        self.groups.keys().next().copied()
    }

    pub fn h_max(&self) -> Option<HalfExp> {
        self.groups.keys().next_back().copied()
    }

    /// Append an object to its `h`-group; returns its address.
    pub fn push_object(&mut self, obj: TLObject) -> (HalfExp, usize) {
        assert_eq!(obj.diagram.n_in(), self.n_in, "object boundary");
        assert_eq!(obj.diagram.n_out(), self.n_out, "object boundary");
        let h = obj.grading.h();
        let v = self.groups.entry(h).or_default();
        v.push(obj);
        (h, v.len() - 1)
    }

    /// Record a differential entry from `(h, i)` to `(h + 1, j)`.
    /// Zero entries are dropped; adding to an existing entry accumulates.
    pub fn add_entry(&mut self, h: HalfExp, i: usize, j: usize, cob: CobLin) {
        if cob.is_zero() {
            return;
        }
        let m = self.diffs.entry(h).or_default();
        match m.remove(&(i, j)) {
            None => {
                m.insert((i, j), cob);
            }
            Some(old) => {
                let sum = old.add(&cob).expect("entry planes agree");
                if !sum.is_zero() {
                    m.insert((i, j), sum);
                }
            }
        }
        if self.diffs.get(&h).is_some_and(|m| m.is_empty()) {
            self.diffs.remove(&h);
        }
    }

    /// Structural checks: boundaries, plan/object agreement, homogeneous
    /// entry degrees with `q` preserved as a graded map, the `z2` parity
    /// rule, and `d . d = 0`.
    pub fn validate(&self) -> Result<()> {
        for (&h, objs) in &self.groups {
            for o in objs {
                if o.grading.h() != h {
                    return Err(Error::InvalidComplex("object filed at wrong h".into()));
                }
                if o.diagram.n_in() != self.n_in || o.diagram.n_out() != self.n_out {
                    return Err(Error::BoundaryMismatch(
                        self.n_in,
                        self.n_out,
                        o.diagram.n_in(),
                        o.diagram.n_out(),
                    ));
                }
            }
        }
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                let a = self
                    .object(h, i)
                    .ok_or_else(|| Error::InvalidComplex("entry source missing".into()))?;
                let b = self
                    .object(h + FULL, j)
                    .ok_or_else(|| Error::InvalidComplex("entry target missing".into()))?;
                if e.source() != &a.diagram || e.target() != &b.diagram {
                    return Err(Error::InvalidComplex("entry plan mismatch".into()));
                }
                let deg = e
                    .degree()
                    .ok_or_else(|| Error::InvalidComplex("entry not homogeneous".into()))?;
                let dq = b.grading.q() - a.grading.q();
                if dq.0 != 2 * deg {
                    return Err(Error::InvalidComplex(format!(
                        "entry at h={} does not preserve q",
                        h
                    )));
                }
                let dz = b.grading.z2() - a.grading.z2();
                if (dz - dq).0.rem_euclid(4) != 0 {
                    return Err(Error::InvalidComplex(format!(
                        "entry at h={} breaks the z2 parity rule",
                        h
                    )));
                }
            }
        }
        for (&h, m1) in &self.diffs {
            let Some(m2) = self.diffs.get(&(h + FULL)) else {
                if m1.is_empty() {
                    continue;
                }
                // entries out of h with no further level: d^2 trivially 0
                continue;
            };
            let mut acc: BTreeMap<(usize, usize), CobLin> = BTreeMap::new();
            for (&(a, b), e1) in m1 {
                for (&(b2, c), e2) in m2 {
                    if b != b2 {
                        continue;
                    }
                    let path = e1.compose(e2)?;
                    match acc.remove(&(a, c)) {
                        None => {
                            acc.insert((a, c), path);
                        }
                        Some(old) => {
                            acc.insert((a, c), old.add(&path)?);
                        }
                    }
                }
            }
            for ((a, c), total) in acc {
                if !total.is_zero() {
                    return Err(Error::InvalidComplex(format!(
                        "d^2 != 0 from (h={}, {}) to {}",
                        h, a, c
                    )));
                }
            }
        }
        Ok(())
    }

    /// Shift every grading by `g`.
    pub fn shift(&self, g: Grading) -> TLComplex {
        let mut out = TLComplex::new(self.n_in, self.n_out);
        for objs in self.groups.values() {
            for o in objs {
                out.push_object(TLObject {
                    diagram: o.diagram.clone(),
                    grading: o.grading.add(g),
                });
            }
        }
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                out.add_entry(h + g.h(), i, j, e.clone());
            }
        }
        out
    }

    fn negate_differential(&self) -> TLComplex {
        let mut out = self.clone();
        for m in out.diffs.values_mut() {
            for e in m.values_mut() {
                *e = e.neg();
            }
        }
        out
    }

    /// Keep only chain groups with `h >= from_h`.
    pub fn truncate(&self, from_h: HalfExp) -> TLComplex {
        let mut out = TLComplex::new(self.n_in, self.n_out);
        for (&h, objs) in &self.groups {
            if h < from_h {
                continue;
            }
            for o in objs {
                out.push_object(o.clone());
            }
        }
        for (&h, m) in &self.diffs {
            if h < from_h {
                continue;
            }
            for (&(i, j), e) in m {
                out.add_entry(h, i, j, e.clone());
            }
        }
        out
    }

    /// Raw composition: stack `upper` on top, tensor the differentials.
    /// No delooping is performed. The sign rule places `(-1)^k` on the
    /// second factor's differential, where `k` counts full steps of the
    /// first factor's object below its top degree, so head-row inclusions
    /// stay sign-free.
    pub fn compose_raw(&self, upper: &TLComplex) -> Result<TLComplex> {
        Ok(self.compose_raw_indexed(upper)?.0)
    }

    #[allow(clippy::type_complexity)]
    fn compose_raw_indexed(
        &self,
        upper: &TLComplex,
    ) -> Result<(
        TLComplex,
        BTreeMap<((HalfExp, usize), (HalfExp, usize)), (HalfExp, usize)>,
    )> {
        if self.n_out != upper.n_in {
            return Err(Error::BoundaryMismatch(
                self.n_in,
                self.n_out,
                upper.n_in,
                upper.n_out,
            ));
        }
        let mut out = TLComplex::new(self.n_in, upper.n_out);
        let mut index = BTreeMap::new();
        for (&ha, aobjs) in &self.groups {
            for (ia, ao) in aobjs.iter().enumerate() {
                for (&hb, bobjs) in &upper.groups {
                    for (ib, bo) in bobjs.iter().enumerate() {
                        let d = ao.diagram.compose(&bo.diagram)?;
                        let addr = out.push_object(TLObject {
                            diagram: d,
                            grading: ao.grading.add(bo.grading),
                        });
                        index.insert(((ha, ia), (hb, ib)), addr);
                    }
                }
            }
        }
        let h_top = self.h_max();
        let sign_for = |ha: HalfExp| -> i64 {
            let steps = (h_top.expect("nonempty first factor").0 - ha.0).div_euclid(2);
            if steps.rem_euclid(2) == 0 {
                1
            } else {
                -1
            }
        };
        for (&ha, m) in &self.diffs {
            for (&(i, j), e) in m {
                for (&hb, bobjs) in &upper.groups {
                    for (ib, bo) in bobjs.iter().enumerate() {
                        let idb = CobLin::identity(&bo.diagram)?;
                        let cob = e.horizontal(&idb)?;
                        let (fh, fi) = index[&((ha, i), (hb, ib))];
                        let (_, ti) = index[&((ha + FULL, j), (hb, ib))];
                        out.add_entry(fh, fi, ti, cob);
                    }
                }
            }
        }
        for (&hb, m) in &upper.diffs {
            for (&(k, l), e) in m {
                for (&ha, aobjs) in &self.groups {
                    let sign = sign_for(ha);
                    for (ia, ao) in aobjs.iter().enumerate() {
                        let ida = CobLin::identity(&ao.diagram)?;
                        let cob = ida.horizontal(e)?.scale(sign);
                        let (fh, fi) = index[&((ha, ia), (hb, k))];
                        let (_, ti) = index[&((ha, ia), (hb + FULL, l))];
                        out.add_entry(fh, fi, ti, cob);
                    }
                }
            }
        }
        Ok((out, index))
    }

    /// Composition followed by delooping of every circle.
    pub fn compose(&self, upper: &TLComplex) -> Result<TLComplex> {
        Ok(self.compose_raw(upper)?.deloop_complex())
    }

    fn first_circled(&self) -> Option<(HalfExp, usize)> {
        for (&h, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                if o.diagram.circles() > 0 {
                    return Some((h, i));
                }
            }
        }
        None
    }

    /// Replace the object at `(h, idx)` by its two delooped copies
    /// (low at `idx`, high at `idx + 1`), conjugating incident entries.
    fn deloop_at(&self, h: HalfExp, idx: usize) -> Result<TLComplex> {
        let obj = self.object(h, idx).expect("deloop address");
        let iso = deloop(&obj.diagram)?;
        let g_low = obj
            .grading
            .add(Grading::new(HalfExp(-2), HalfExp(0), HalfExp(2)));
        let g_high = obj
            .grading
            .add(Grading::new(HalfExp(2), HalfExp(0), HalfExp(2)));

        let mut out = TLComplex::new(self.n_in, self.n_out);
        for (&gh, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                if gh == h && i == idx {
                    out.push_object(TLObject {
                        diagram: iso.reduced.clone(),
                        grading: g_low,
                    });
                    out.push_object(TLObject {
                        diagram: iso.reduced.clone(),
                        grading: g_high,
                    });
                } else {
                    out.push_object(o.clone());
                }
            }
        }
        let remap = |lev: HalfExp, i: usize| -> usize {
            if lev == h && i > idx {
                i + 1
            } else {
                i
            }
        };
        for (&lev, m) in &self.diffs {
            let tgt_lev = lev + FULL;
            for (&(i, j), e) in m {
                let from_split = lev == h && i == idx;
                let into_split = tgt_lev == h && j == idx;
                if from_split {
                    out.add_entry(lev, idx, remap(tgt_lev, j), iso.merge[0].compose(e)?);
                    out.add_entry(lev, idx + 1, remap(tgt_lev, j), iso.merge[1].compose(e)?);
                } else if into_split {
                    out.add_entry(lev, remap(lev, i), idx, e.compose(&iso.split[0])?);
                    out.add_entry(lev, remap(lev, i), idx + 1, e.compose(&iso.split[1])?);
                } else {
                    out.add_entry(lev, remap(lev, i), remap(tgt_lev, j), e.clone());
                }
            }
        }
        Ok(out)
    }

    /// Remove every circle, splitting objects into shifted pairs.
    /// Homotopy type and `K0` are preserved.
    pub fn deloop_complex(&self) -> TLComplex {
        let mut c = self.clone();
        while let Some((h, i)) = c.first_circled() {
            c = c.deloop_at(h, i).expect("delooping a circled object");
        }
        c
    }

    fn find_cancellable(&self) -> Option<(HalfExp, usize, usize, i64)> {
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                let a = self.object(h, i)?;
                let b = self.object(h + FULL, j)?;
                if a.grading.q() != b.grading.q() {
                    continue;
                }
                if let Some(sign) = e.as_pm_identity() {
                    return Some((h, i, j, sign));
                }
            }
        }
        None
    }

    /// Cancel the invertible entry from `(h, ci)` to `(h + 1, cj)`,
    /// adding the correction `-c . e^{-1} . r` for every zig-zag through
    /// the cancelled pair.
    fn cancel_at(&self, h: HalfExp, ci: usize, cj: usize, sign: i64) -> Result<TLComplex> {
        let h2 = h + FULL;
        let level = self.diffs.get(&h).expect("cancel level");
        let rs: Vec<(usize, &CobLin)> = level
            .iter()
            .filter(|&(&(x, y), _)| y == cj && x != ci)
            .map(|(&(x, _), e)| (x, e))
            .collect();
        let cs: Vec<(usize, &CobLin)> = level
            .iter()
            .filter(|&(&(x, y), _)| x == ci && y != cj)
            .map(|(&(_, y), e)| (y, e))
            .collect();
        let mut corr: BTreeMap<(usize, usize), CobLin> = BTreeMap::new();
        for &(x, r) in &rs {
            for &(y, c) in &cs {
                let path = r.compose(c)?.scale(-sign);
                match corr.remove(&(x, y)) {
                    None => {
                        corr.insert((x, y), path);
                    }
                    Some(old) => {
                        corr.insert((x, y), old.add(&path)?);
                    }
                }
            }
        }

        let mut out = TLComplex::new(self.n_in, self.n_out);
        for (&gh, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                if (gh == h && i == ci) || (gh == h2 && i == cj) {
                    continue;
                }
                out.push_object(o.clone());
            }
        }
        let remap = |lev: HalfExp, i: usize| -> usize {
            if (lev == h && i > ci) || (lev == h2 && i > cj) {
                i - 1
            } else {
                i
            }
        };
        for (&lev, m) in &self.diffs {
            let tgt_lev = lev + FULL;
            for (&(i, j), e) in m {
                let touches = (lev == h && i == ci)
                    || (lev == h2 && i == cj)
                    || (tgt_lev == h && j == ci)
                    || (tgt_lev == h2 && j == cj);
                if touches {
                    continue;
                }
                out.add_entry(lev, remap(lev, i), remap(tgt_lev, j), e.clone());
            }
        }
        for ((x, y), e) in corr {
            out.add_entry(h, remap(h, x), remap(h2, y), e);
        }
        Ok(out)
    }

    /// Deloop eagerly and cancel `±identity` entries, lowest `h` first,
    /// until none remain. Preserves the homotopy type and `K0`.
    pub fn gaussian_reduce(&self) -> TLComplex {
        let mut c = self.clone();
        loop {
            if let Some((h, i, j, sign)) = c.find_cancellable() {
                c = c.cancel_at(h, i, j, sign).expect("cancelling a unit entry");
                continue;
            }
            if let Some((h, i)) = c.first_circled() {
                c = c.deloop_at(h, i).expect("delooping a circled object");
                continue;
            }
            return c;
        }
    }

    /// Shift by `{1/2; -1/2; 1/2}` per crossing.
    pub fn s_normalize(&self, crossings: usize) -> TLComplex {
        let c = crossings as i64;
        self.shift(Grading::new(HalfExp(c), HalfExp(-c), HalfExp(c)))
    }

    /// Graded Euler characteristic as a TL element: the sum of
    /// `(-1)^(h + z2) q^q [diagram]` over objects, circles contributing
    /// loop values. Requires integral gradings.
    pub fn k0(&self) -> Result<TLElement<LaurentPoly>> {
        let mut out = TLElement::zero(self.n_in, self.n_out);
        for objs in self.groups.values() {
            for o in objs {
                let g = o.grading;
                if g.q().0 % 2 != 0 || g.h().0 % 2 != 0 || g.z2().0 % 2 != 0 {
                    return Err(Error::HalfIntegerGrading);
                }
                let parity = ((g.h().0 + g.z2().0) / 2).rem_euclid(2);
                let unit = if parity == 0 {
                    BigInt::from(1)
                } else {
                    BigInt::from(-1)
                };
                out.add_diagram(&o.diagram, LaurentPoly::monomial(unit, g.q()));
            }
        }
        Ok(out)
    }

    /// True when no chain group contains the identity diagram.
    pub fn is_one_dropped(&self) -> bool {
        self.groups
            .values()
            .flatten()
            .all(|o| !o.diagram.is_identity())
    }

    /// True when every object at `(h, q) = (-i, j)` satisfies
    /// `i >= 0` and `i <= j <= 2 i`.
    pub fn is_angle_shaped(&self) -> bool {
        self.groups.values().flatten().all(|o| {
            let i = -o.grading.h().0;
            let j = o.grading.q().0;
            i >= 0 && i <= j && j <= 2 * i
        })
    }

    /// `-(max h)` of the reduced complex; `None` for a contractible one.
    pub fn hom_order_reduced(&self) -> Option<HalfExp> {
        let r = self.gaussian_reduce();
        r.h_max().map(|h| -h)
    }

    /// Locate the unique identity-diagram object and return its grading
    /// together with the complex with that object (and its incident
    /// entries) removed. `None` unless exactly one identity object exists.
    pub fn split_identity_head(&self) -> Option<(Grading, TLComplex)> {
        let mut found: Option<(HalfExp, usize, Grading)> = None;
        for (&h, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                if o.diagram.is_identity() {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((h, i, o.grading));
                }
            }
        }
        let (h, idx, g) = found?;
        let mut out = TLComplex::new(self.n_in, self.n_out);
        for (&gh, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                if gh == h && i == idx {
                    continue;
                }
                out.push_object(o.clone());
            }
        }
        let remap = |lev: HalfExp, i: usize| -> usize {
            if lev == h && i > idx {
                i - 1
            } else {
                i
            }
        };
        for (&lev, m) in &self.diffs {
            let tgt_lev = lev + FULL;
            for (&(i, j), e) in m {
                if (lev == h && i == idx) || (tgt_lev == h && j == idx) {
                    continue;
                }
                out.add_entry(lev, remap(lev, i), remap(tgt_lev, j), e.clone());
            }
        }
        Some((g, out))
    }

    /// Multiset of `(grading, diagram)` pairs, for comparing minimal forms.
    pub fn graded_objects(&self) -> BTreeMap<(Grading, TLDiagram), usize> {
        let mut out = BTreeMap::new();
        for objs in self.groups.values() {
            for o in objs {
                *out.entry((o.grading, o.diagram.clone())).or_insert(0) += 1;
            }
        }
        out
    }

    /// Mirror image: diagrams and cobordisms reflected, arrows reversed,
    /// all three gradings negated.
    pub fn mirror(&self) -> TLComplex {
        let mut out = TLComplex::new(self.n_out, self.n_in);
        for objs in self.groups.values() {
            for o in objs {
                out.push_object(TLObject {
                    diagram: o.diagram.mirror(),
                    grading: o.grading.neg(),
                });
            }
        }
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                out.add_entry(-(h + FULL), j, i, e.mirror());
            }
        }
        out
    }

    /// Stable JSON form: flat object list and differential entries.
    pub fn to_json(&self) -> Value {
        let mut ids: BTreeMap<(HalfExp, usize), usize> = BTreeMap::new();
        let mut objects = Vec::new();
        for (&h, objs) in &self.groups {
            for (i, o) in objs.iter().enumerate() {
                let id = objects.len();
                ids.insert((h, i), id);
                objects.push(json!({
                    "q2": o.grading.q().0,
                    "h2": o.grading.h().0,
                    "z22": o.grading.z2().0,
                    "diagram": o.diagram.to_string(),
                }));
            }
        }
        let mut entries = Vec::new();
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                let terms: Vec<Value> = e
                    .terms()
                    .map(|(mask, c)| {
                        let dots: Vec<usize> = (0..e.plan().total_cycles())
                            .filter(|k| mask & (1 << k) != 0)
                            .collect();
                        json!({"coeff": c, "dots": dots})
                    })
                    .collect();
                entries.push(json!({
                    "from": ids[&(h, i)],
                    "to": ids[&(h + FULL, j)],
                    "terms": terms,
                }));
            }
        }
        json!({
            "n_in": self.n_in,
            "n_out": self.n_out,
            "objects": objects,
            "differentials": entries,
        })
    }
}

impl fmt::Display for TLComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "complex ({} -> {}), {} objects",
            self.n_in,
            self.n_out,
            self.object_count()
        )?;
        for (&h, objs) in &self.groups {
            write!(f, "h={}:", h)?;
            for (i, o) in objs.iter().enumerate() {
                write!(f, " {}:[{}]{}", i, o.diagram, o.grading)?;
            }
            writeln!(f)?;
        }
        for (&h, m) in &self.diffs {
            for (&(i, j), e) in m {
                writeln!(f, "d h={}: {} -> {}: {}", h, i, j, e)?;
            }
        }
        Ok(())
    }
}

/// The two-object complex of a single crossing `sigma_i^sign` on `n`
/// strands, in raw (half-integer) grading.
pub fn crossing_complex(n: usize, i: usize, sign: i64) -> Result<TLComplex> {
    let u = TLDiagram::u(n, i)?;
    let id = TLDiagram::identity(n);
    let mut c = TLComplex::new(n, n);
    if sign < 0 {
        c.push_object(TLObject {
            diagram: u.clone(),
            grading: Grading::new(HalfExp(1), HalfExp(-1), HalfExp(1)),
        });
        c.push_object(TLObject {
            diagram: id.clone(),
            grading: Grading::new(HalfExp(-1), HalfExp(1), HalfExp(-1)),
        });
        c.add_entry(HalfExp(-1), 0, 0, CobLin::disks(u, id)?);
    } else {
        c.push_object(TLObject {
            diagram: id.clone(),
            grading: Grading::new(HalfExp(1), HalfExp(-1), HalfExp(1)),
        });
        c.push_object(TLObject {
            diagram: u.clone(),
            grading: Grading::new(HalfExp(-1), HalfExp(1), HalfExp(-1)),
        });
        c.add_entry(HalfExp(-1), 0, 0, CobLin::disks(id, u)?);
    }
    Ok(c)
}

/// Raw complex of a braid word: tensor of crossing complexes, half-integer
/// gradings, circles kept.
pub fn braid_complex(w: &BraidWord) -> Result<TLComplex> {
    let mut c = TLComplex::identity_complex(w.strands());
    for &l in w.letters() {
        let letter = crossing_complex(w.strands(), l.unsigned_abs() as usize, l)?;
        c = c.compose_raw(&letter)?;
    }
    Ok(c)
}

/// The normalized complex of a braid word: raw complex shifted by
/// `{1/2; -1/2; 1/2}` per crossing, making all gradings integral.
pub fn braid_complex_s(w: &BraidWord) -> Result<TLComplex> {
    Ok(braid_complex(w)?.s_normalize(w.letters().len()))
}

/// Reduced normalized complex of an all-negative braid word, built one
/// crossing at a time with delooping and cancellation interleaved. The
/// result keeps a single identity-diagram object at shift zero; its tail
/// is one-dropped and angle-shaped for cyclic braid powers.
pub fn special_complex(w: &BraidWord) -> Result<TLComplex> {
    for &l in w.letters() {
        if l > 0 {
            return Err(Error::PositiveLetter(l as usize));
        }
    }
    let s_shift = Grading::new(HalfExp(1), HalfExp(-1), HalfExp(1));
    let mut c = TLComplex::identity_complex(w.strands());
    for &l in w.letters() {
        let letter = crossing_complex(w.strands(), l.unsigned_abs() as usize, l)?.shift(s_shift);
        c = c.compose_raw(&letter)?.gaussian_reduce();
    }
    Ok(c)
}

/// A degree-0 map of complexes, entries between objects of equal `h`.
#[derive(Debug, Clone)]
pub struct ChainMap {
    source: TLComplex,
    target: TLComplex,
    entries: BTreeMap<(HalfExp, usize, usize), CobLin>,
}

impl ChainMap {
    pub fn new(source: TLComplex, target: TLComplex) -> Self {
        ChainMap {
            source,
            target,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(a: &TLComplex) -> Self {
        let mut f = ChainMap::new(a.clone(), a.clone());
        for (&h, objs) in a.groups() {
            for (i, o) in objs.iter().enumerate() {
                f.add_entry(h, i, i, CobLin::identity(&o.diagram).expect("identity"));
            }
        }
        f
    }

    pub fn source(&self) -> &TLComplex {
        &self.source
    }

    pub fn target(&self) -> &TLComplex {
        &self.target
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(HalfExp, usize, usize), &CobLin)> {
        self.entries.iter()
    }

    pub fn add_entry(&mut self, h: HalfExp, i: usize, j: usize, cob: CobLin) {
        if cob.is_zero() {
            return;
        }
        self.entries.insert((h, i, j), cob);
    }

    /// Check plans, gradings and commutation with the differentials.
    pub fn validate(&self) -> Result<()> {
        for (&(h, i, j), e) in &self.entries {
            let a = self.source.object(h, i).ok_or(Error::NotAChainMap)?;
            let b = self.target.object(h, j).ok_or(Error::NotAChainMap)?;
            if e.source() != &a.diagram || e.target() != &b.diagram {
                return Err(Error::NotAChainMap);
            }
            let deg = e.degree().ok_or(Error::NotAChainMap)?;
            if (b.grading.q() - a.grading.q()).0 != 2 * deg {
                return Err(Error::NotAChainMap);
            }
        }
        // f d_S = d_T f, comparing sums over both factorizations
        let mut lhs: BTreeMap<(HalfExp, usize, usize), CobLin> = BTreeMap::new();
        let mut rhs: BTreeMap<(HalfExp, usize, usize), CobLin> = BTreeMap::new();
        for (&(h, i, j), f) in &self.entries {
            if let Some(m) = self.target.differentials().get(&h) {
                for (&(j2, y), d) in m {
                    if j2 != j {
                        continue;
                    }
                    let path = f.compose(d)?;
                    accumulate(&mut lhs, (h, i, y), path)?;
                }
            }
        }
        for (&h, m) in self.source.differentials() {
            for (&(i, i2), d) in m {
                for (&(h2, i3, y), f) in &self.entries {
                    if h2 != h + FULL || i3 != i2 {
                        continue;
                    }
                    let path = d.compose(f)?;
                    accumulate(&mut rhs, (h, i, y), path)?;
                }
            }
        }
        let keys: std::collections::BTreeSet<_> = lhs.keys().chain(rhs.keys()).cloned().collect();
        for k in keys {
            match (lhs.get(&k), rhs.get(&k)) {
                (Some(a), Some(b)) => {
                    if !a.sub(b)?.is_zero() {
                        return Err(Error::NotAChainMap);
                    }
                }
                (Some(a), None) | (None, Some(a)) => {
                    if !a.is_zero() {
                        return Err(Error::NotAChainMap);
                    }
                }
                (None, None) => {}
            }
        }
        Ok(())
    }
}

fn accumulate(
    map: &mut BTreeMap<(HalfExp, usize, usize), CobLin>,
    key: (HalfExp, usize, usize),
    cob: CobLin,
) -> Result<()> {
    match map.remove(&key) {
        None => {
            map.insert(key, cob);
        }
        Some(old) => {
            map.insert(key, old.add(&cob)?);
        }
    }
    Ok(())
}

/// Mapping cone: level `i` holds `A^{i+1} (+) B^i` with differential
/// `(-d_A, -f; 0, d_B)`.
pub fn cone(f: &ChainMap) -> Result<TLComplex> {
    Ok(cone_with_maps(f)?.0)
}

/// Cone together with its canonical maps: the inclusion of the target
/// and the projection onto the shifted source (whose differential is
/// negated, matching the cone's inner sign).
pub fn cone_with_maps(f: &ChainMap) -> Result<(TLComplex, ChainMap, ChainMap)> {
    f.validate()?;
    let a = f.source();
    let b = f.target();
    if a.n_in() != b.n_in() || a.n_out() != b.n_out() {
        return Err(Error::BoundaryMismatch(
            a.n_in(),
            a.n_out(),
            b.n_in(),
            b.n_out(),
        ));
    }
    let mut levels: std::collections::BTreeSet<HalfExp> = std::collections::BTreeSet::new();
    for &h in a.groups().keys() {
        levels.insert(h - FULL);
    }
    for &h in b.groups().keys() {
        levels.insert(h);
    }
    let na = |h: HalfExp| a.objects_at(h + FULL).len();

    let mut c = TLComplex::new(a.n_in(), a.n_out());
    for &h in &levels {
        for o in a.objects_at(h + FULL) {
            c.push_object(TLObject {
                diagram: o.diagram.clone(),
                grading: o
                    .grading
                    .add(Grading::new(HalfExp(0), HalfExp(-2), HalfExp(0))),
            });
        }
        for o in b.objects_at(h) {
            c.push_object(o.clone());
        }
    }
    for (&ha, m) in a.differentials() {
        for (&(i, j), e) in m {
            c.add_entry(ha - FULL, i, j, e.neg());
        }
    }
    for (&(h, i, j), e) in &f.entries {
        c.add_entry(h - FULL, i, na(h) + j, e.neg());
    }
    for (&hb, m) in b.differentials() {
        for (&(k, l), e) in m {
            c.add_entry(hb, na(hb) + k, na(hb + FULL) + l, e.clone());
        }
    }

    let mut in_f = ChainMap::new(b.clone(), c.clone());
    for (&h, objs) in b.groups() {
        for (k, o) in objs.iter().enumerate() {
            in_f.add_entry(h, k, na(h) + k, CobLin::identity(&o.diagram)?);
        }
    }
    let a_shifted = a
        .shift(Grading::new(HalfExp(0), HalfExp(-2), HalfExp(0)))
        .negate_differential();
    let mut del_f = ChainMap::new(c.clone(), a_shifted);
    for (&h, objs) in a.groups() {
        for (i, o) in objs.iter().enumerate() {
            del_f.add_entry(h - FULL, i, i, CobLin::identity(&o.diagram)?);
        }
    }
    Ok((c, in_f, del_f))
}

/// The canonical map from the `m`-twist complex to the `(m+1)`-twist one:
/// the head inclusion of the one-twist complex, composed with the
/// `m`-twist complex. Its cone measures the tower's convergence.
pub fn tower_map(n: usize, m: usize) -> Result<ChainMap> {
    let s1 = special_complex(&BraidWord::torus(n, 1)?)?;
    let xm = special_complex(&BraidWord::torus(n, m)?)?;
    let head = s1
        .groups()
        .iter()
        .flat_map(|(&h, objs)| {
            objs.iter()
                .enumerate()
                .map(move |(i, o)| (h, i, o.diagram.is_identity()))
        })
        .find(|&(_, _, is_id)| is_id)
        .map(|(h, i, _)| (h, i))
        .ok_or_else(|| Error::InvalidComplex("one-twist complex has no identity head".into()))?;
    let (t, index) = xm.compose_raw_indexed(&s1)?;
    let mut f = ChainMap::new(xm.clone(), t);
    for (&h, objs) in xm.groups() {
        for (i, o) in objs.iter().enumerate() {
            let (th, tj) = index[&((h, i), head)];
            debug_assert_eq!(th, h);
            f.add_entry(h, i, tj, CobLin::identity(&o.diagram)?);
        }
    }
    Ok(f)
}
