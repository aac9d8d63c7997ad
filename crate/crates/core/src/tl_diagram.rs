//! Planar diagrams of the Temperley-Lieb category.
//!
//! A diagram connects `n_in` bottom points to `n_out` top points by a
//! crossingless matching and may carry free circles. Points are numbered
//! internally `0..n_in` along the bottom and `n_in..n_in+n_out` along the
//! top, both left to right. Planarity is checked against the boundary
//! cycle: bottom left to right, then top right to left.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TLDiagram {
    n_in: usize,
    n_out: usize,
    matching: Vec<usize>,
    circles: usize,
}

/// Which factor an arc came from in a composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Lower,
    Upper,
}

/// Full record of a composition: the result plus where every arc and
/// circle of the result came from.
///
/// Result circles are numbered: lower diagram's circles first, then the
/// upper diagram's, then the cycles newly created in the middle, ordered
/// by their smallest middle point.
#[derive(Debug, Clone)]
pub struct ComposeTrace {
    pub diagram: TLDiagram,
    /// For each result arc (in `arcs()` order), the lower/upper arcs it
    /// traverses, in path order.
    pub arc_paths: Vec<Vec<(Layer, usize)>>,
    /// Constituent arcs of each newly created middle cycle.
    pub cycles: Vec<Vec<(Layer, usize)>>,
    pub lower_circles: usize,
    pub upper_circles: usize,
}

impl ComposeTrace {
    pub fn lower_circle_id(&self, k: usize) -> usize {
        debug_assert!(k < self.lower_circles);
        k
    }

    pub fn upper_circle_id(&self, k: usize) -> usize {
        debug_assert!(k < self.upper_circles);
        self.lower_circles + k
    }

    pub fn cycle_circle_id(&self, t: usize) -> usize {
        debug_assert!(t < self.cycles.len());
        self.lower_circles + self.upper_circles + t
    }
}

/// Trace closure of an endomorphism diagram: bottom point `i` is joined
/// to top point `i` for every `i`.
#[derive(Debug, Clone)]
pub struct ClosureTrace {
    /// Closure circle id for each of the `2n` diagram points. Traced
    /// cycles are numbered first, by smallest point.
    pub point_circle: Vec<usize>,
    /// Constituent arcs of each traced cycle.
    pub cycles: Vec<Vec<usize>>,
    /// The diagram's own circles follow the traced cycles: circle `k`
    /// becomes closure circle `cycles.len() + k`.
    pub diagram_circles: usize,
}

impl ClosureTrace {
    pub fn total_circles(&self) -> usize {
        self.cycles.len() + self.diagram_circles
    }

    pub fn diagram_circle_id(&self, k: usize) -> usize {
        debug_assert!(k < self.diagram_circles);
        self.cycles.len() + k
    }
}

/// A diagram factored into caps followed by cups.
///
/// `caps[k]` is a 1-based position among the `n_start - 2k` strands
/// present when it is applied; the caps are applied bottom-up in the
/// order stored, then the cups in the order stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapWord {
    pub n_start: usize,
    pub caps: Vec<usize>,
    pub cups: Vec<usize>,
    pub circles: usize,
}

impl CapWord {
    pub fn to_diagram(&self) -> Result<TLDiagram> {
        let mut acc = TLDiagram::identity(self.n_start);
        let mut n = self.n_start;
        for &i in &self.caps {
            acc = acc.compose(&TLDiagram::cap(n, i)?)?;
            n -= 2;
        }
        for &j in &self.cups {
            acc = acc.compose(&TLDiagram::cup(n + 2, j)?)?;
            n += 2;
        }
        Ok(TLDiagram {
            circles: acc.circles + self.circles,
            ..acc
        })
    }
}

impl TLDiagram {
    pub fn new(n_in: usize, n_out: usize, matching: Vec<usize>, circles: usize) -> Result<Self> {
        if !(n_in + n_out).is_multiple_of(2) {
            return Err(Error::OddBoundary(n_in, n_out));
        }
        if matching.len() != n_in + n_out {
            return Err(Error::NotAnInvolution);
        }
        for (p, &q) in matching.iter().enumerate() {
            if q >= matching.len() || q == p || matching[q] != p {
                return Err(Error::NotAnInvolution);
            }
        }
        let d = TLDiagram {
            n_in,
            n_out,
            matching,
            circles,
        };
        if !d.is_planar() {
            return Err(Error::NotPlanar);
        }
        Ok(d)
    }

    pub fn identity(n: usize) -> Self {
        let matching = (0..2 * n)
            .map(|p| if p < n { p + n } else { p - n })
            .collect();
        TLDiagram {
            n_in: n,
            n_out: n,
            matching,
            circles: 0,
        }
    }

    pub fn empty() -> Self {
        TLDiagram {
            n_in: 0,
            n_out: 0,
            matching: Vec::new(),
            circles: 0,
        }
    }

    /// `cap_i : n -> n-2`, joining bottom points `i, i+1` (1-based).
    pub fn cap(n: usize, i: usize) -> Result<Self> {
        if n < 2 || i == 0 || i + 1 > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut matching = vec![0; 2 * n - 2];
        matching[i - 1] = i;
        matching[i] = i - 1;
        let mut top = n;
        for b in 0..n {
            if b == i - 1 || b == i {
                continue;
            }
            matching[b] = top;
            matching[top] = b;
            top += 1;
        }
        Ok(TLDiagram {
            n_in: n,
            n_out: n - 2,
            matching,
            circles: 0,
        })
    }

    /// `cup_i : n-2 -> n`, joining top points `i, i+1` (1-based).
    pub fn cup(n: usize, i: usize) -> Result<Self> {
        Ok(TLDiagram::cap(n, i)?.mirror())
    }

    /// The Temperley-Lieb generator `U_i = cup_i . cap_i : n -> n`.
    pub fn u(n: usize, i: usize) -> Result<Self> {
        if n < 2 || i == 0 || i + 1 > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let mut matching = vec![0; 2 * n];
        for b in 0..n {
            matching[b] = b + n;
            matching[b + n] = b;
        }
        matching[i - 1] = i;
        matching[i] = i - 1;
        matching[n + i - 1] = n + i;
        matching[n + i] = n + i - 1;
        Ok(TLDiagram {
            n_in: n,
            n_out: n,
            matching,
            circles: 0,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn circles(&self) -> usize {
        self.circles
    }

    pub fn matched(&self, p: usize) -> usize {
        self.matching[p]
    }

    pub fn with_circles(&self, circles: usize) -> Self {
        TLDiagram {
            circles,
            ..self.clone()
        }
    }

    /// The same matching with all circles dropped.
    pub fn stripped(&self) -> Self {
        self.with_circles(0)
    }

    pub fn is_identity(&self) -> bool {
        self.circles == 0 && *self == TLDiagram::identity(self.n_in)
    }

    /// Position of a point along the boundary cycle.
    fn cycle_pos(&self, p: usize) -> usize {
        if p < self.n_in {
            p
        } else {
            self.n_in + (self.n_out - 1 - (p - self.n_in))
        }
    }

    fn is_planar(&self) -> bool {
        let total = self.n_in + self.n_out;
        let mut partner_at = vec![usize::MAX; total];
        for p in 0..total {
            partner_at[self.cycle_pos(p)] = self.cycle_pos(self.matching[p]);
        }
        let mut stack = Vec::new();
        for (pos, &q) in partner_at.iter().enumerate() {
            if q > pos {
                stack.push(pos);
            } else if stack.pop() != Some(q) {
                return false;
            }
        }
        true
    }

    /// Arcs as `(p, q)` pairs with `p < q`, sorted by `p`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity((self.n_in + self.n_out) / 2);
        for (p, &q) in self.matching.iter().enumerate() {
            if p < q {
                out.push((p, q));
            }
        }
        out
    }

    /// Index into `arcs()` of the arc through point `p`.
    pub fn arc_of_point(&self, p: usize) -> usize {
        let key = p.min(self.matching[p]);
        self.matching
            .iter()
            .enumerate()
            .take(key)
            .filter(|(r, &s)| *r < s)
            .count()
    }

    /// Number of strands running from bottom to top.
    pub fn through_strands(&self) -> usize {
        (0..self.n_in)
            .filter(|&p| self.matching[p] >= self.n_in)
            .count()
    }

    /// Number of turnbacks on the bottom boundary.
    pub fn cap_degree(&self) -> usize {
        (self.n_in - self.through_strands()) / 2
    }

    /// Compose with `upper` stacked on top of `self`.
    pub fn compose(&self, upper: &TLDiagram) -> Result<TLDiagram> {
        Ok(self.compose_trace(upper)?.diagram)
    }

    /// Compose, keeping track of every arc and circle in the result.
    pub fn compose_trace(&self, upper: &TLDiagram) -> Result<ComposeTrace> {
        if self.n_out != upper.n_in {
            return Err(Error::BoundaryMismatch(
                upper.n_in,
                upper.n_out,
                self.n_in,
                self.n_out,
            ));
        }
        let mid = self.n_out;
        let res_in = self.n_in;
        let res_out = upper.n_out;
        // Result label for an endpoint, or None when it is a middle point.
        let res_label = |layer: Layer, p: usize| -> Option<usize> {
            match layer {
                Layer::Lower => (p < res_in).then_some(p),
                Layer::Upper => (p >= mid).then(|| res_in + (p - mid)),
            }
        };
        let cross = |layer: Layer, p: usize| -> (Layer, usize) {
            match layer {
                Layer::Lower => (Layer::Upper, p - res_in),
                Layer::Upper => (Layer::Lower, res_in + p),
            }
        };
        let mut visited_mid = vec![false; mid];
        let mut matching = vec![usize::MAX; res_in + res_out];
        let mut path_by_pair: BTreeMap<(usize, usize), Vec<(Layer, usize)>> = BTreeMap::new();

        let mut walk = |layer0: Layer, p0: usize| -> (Layer, usize, Vec<(Layer, usize)>) {
            let mut layer = layer0;
            let mut p = p0;
            let mut path = Vec::new();
            loop {
                let arc = match layer {
                    Layer::Lower => self.arc_of_point(p),
                    Layer::Upper => upper.arc_of_point(p),
                };
                path.push((layer, arc));
                let q = match layer {
                    Layer::Lower => self.matching[p],
                    Layer::Upper => upper.matching[p],
                };
                let is_mid = match layer {
                    Layer::Lower => q >= res_in,
                    Layer::Upper => q < mid,
                };
                if !is_mid {
                    return (layer, q, path);
                }
                let m = match layer {
                    Layer::Lower => q - res_in,
                    Layer::Upper => q,
                };
                visited_mid[m] = true;
                let (nl, np) = cross(layer, q);
                layer = nl;
                p = np;
            }
        };

        let starts: Vec<(Layer, usize)> = (0..res_in)
            .map(|i| (Layer::Lower, i))
            .chain((0..res_out).map(|k| (Layer::Upper, mid + k)))
            .collect();
        for (layer, p) in starts {
            let a = res_label(layer, p).unwrap();
            if matching[a] != usize::MAX {
                continue;
            }
            let (el, ep, path) = walk(layer, p);
            let b = res_label(el, ep).expect("boundary walk ends on the boundary");
            matching[a] = b;
            matching[b] = a;
            path_by_pair.insert((a.min(b), a.max(b)), path);
        }

        let mut cycles = Vec::new();
        for m in 0..mid {
            if visited_mid[m] {
                continue;
            }
            // Walk the closed cycle starting on the lower arc at middle m.
            let mut cycle = Vec::new();
            let mut layer = Layer::Lower;
            let mut p = res_in + m;
            loop {
                let arc = match layer {
                    Layer::Lower => self.arc_of_point(p),
                    Layer::Upper => upper.arc_of_point(p),
                };
                cycle.push((layer, arc));
                let q = match layer {
                    Layer::Lower => self.matching[p],
                    Layer::Upper => upper.matching[p],
                };
                let mi = match layer {
                    Layer::Lower => q - res_in,
                    Layer::Upper => q,
                };
                visited_mid[mi] = true;
                let (nl, np) = cross(layer, q);
                layer = nl;
                p = np;
                if layer == Layer::Lower && p == res_in + m {
                    break;
                }
            }
            cycles.push(cycle);
        }

        let circles = self.circles + upper.circles + cycles.len();
        let diagram = TLDiagram::new(res_in, res_out, matching, circles)?;
        let arc_paths = diagram
            .arcs()
            .into_iter()
            .map(|(a, b)| path_by_pair.remove(&(a, b)).expect("every arc was walked"))
            .collect();
        Ok(ComposeTrace {
            diagram,
            arc_paths,
            cycles,
            lower_circles: self.circles,
            upper_circles: upper.circles,
        })
    }

    /// Vertical reflection: bottom and top swap.
    pub fn mirror(&self) -> TLDiagram {
        let total = self.n_in + self.n_out;
        let relabel = |p: usize| -> usize {
            if p < self.n_in {
                self.n_out + p
            } else {
                p - self.n_in
            }
        };
        let mut matching = vec![0; total];
        for (p, &q) in self.matching.iter().enumerate() {
            matching[relabel(p)] = relabel(q);
        }
        TLDiagram {
            n_in: self.n_out,
            n_out: self.n_in,
            matching,
            circles: self.circles,
        }
    }

    /// Tensor with `k` identity strands on the right.
    pub fn extend_right(&self, k: usize) -> TLDiagram {
        let n_in = self.n_in + k;
        let n_out = self.n_out + k;
        let relabel = |p: usize| -> usize {
            if p < self.n_in {
                p
            } else {
                p + k
            }
        };
        let mut matching = vec![0; n_in + n_out];
        for (p, &q) in self.matching.iter().enumerate() {
            matching[relabel(p)] = relabel(q);
        }
        for t in 0..k {
            let b = self.n_in + t;
            let u = n_in + self.n_out + t;
            matching[b] = u;
            matching[u] = b;
        }
        TLDiagram {
            n_in,
            n_out,
            matching,
            circles: self.circles,
        }
    }

    /// Join bottom point `i` to top point `i` for all `i` and trace the
    /// resulting circles. Requires `n_in == n_out`.
    pub fn closure_trace(&self) -> Result<ClosureTrace> {
        if self.n_in != self.n_out {
            return Err(Error::BoundaryMismatch(
                self.n_in, self.n_out, self.n_in, self.n_in,
            ));
        }
        let n = self.n_in;
        let close = |p: usize| -> usize {
            if p < n {
                p + n
            } else {
                p - n
            }
        };
        let mut point_circle = vec![usize::MAX; 2 * n];
        let mut cycles = Vec::new();
        for start in 0..2 * n {
            if point_circle[start] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let mut p = start;
            loop {
                point_circle[p] = id;
                cycle.push(self.arc_of_point(p));
                let q = self.matching[p];
                point_circle[q] = id;
                p = close(q);
                if p == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        Ok(ClosureTrace {
            point_circle,
            cycles,
            diagram_circles: self.circles,
        })
    }

    /// Peel the diagram into caps followed by cups.
    pub fn cap_cup_factorize(&self) -> CapWord {
        let mut caps = Vec::new();
        let mut current = self.stripped();
        loop {
            let turnback =
                (0..current.n_in.saturating_sub(1)).find(|&b| current.matching[b] == b + 1);
            match turnback {
                Some(b) => {
                    caps.push(b + 1);
                    current = current.remove_bottom_turnback(b);
                }
                None => break,
            }
        }
        let mut cups_rev = Vec::new();
        let mut flipped = current.mirror();
        loop {
            let turnback =
                (0..flipped.n_in.saturating_sub(1)).find(|&b| flipped.matching[b] == b + 1);
            match turnback {
                Some(b) => {
                    cups_rev.push(b + 1);
                    flipped = flipped.remove_bottom_turnback(b);
                }
                None => break,
            }
        }
        cups_rev.reverse();
        CapWord {
            n_start: self.n_in,
            caps,
            cups: cups_rev,
            circles: self.circles,
        }
    }

    /// Delete the turnback joining bottom points `b, b+1` (0-based).
    fn remove_bottom_turnback(&self, b: usize) -> TLDiagram {
        debug_assert_eq!(self.matching[b], b + 1);
        let relabel = |p: usize| -> usize {
            if p < b {
                p
            } else if p < self.n_in {
                p - 2
            } else {
                p - self.n_in + (self.n_in - 2)
            }
        };
        let mut matching = vec![0; self.n_in + self.n_out - 2];
        for (p, &q) in self.matching.iter().enumerate() {
            if p == b || p == b + 1 {
                continue;
            }
            matching[relabel(p)] = relabel(q);
        }
        TLDiagram {
            n_in: self.n_in - 2,
            n_out: self.n_out,
            matching,
            circles: self.circles,
        }
    }
}

/// All circle-free planar `(n, n)` diagrams, in lexicographic order of
/// their matchings. There are Catalan(n) of them.
pub fn enumerate_tl(n: usize) -> Vec<TLDiagram> {
    let mut out = Vec::new();
    let total = 2 * n;
    // Non-crossing matchings of a disjoint union of intervals: pair the
    // first point of the last interval with an odd-offset partner, split,
    // and recurse.
    fn gen(mut work: Vec<(usize, usize)>, partner: &mut [usize], out: &mut Vec<Vec<usize>>) {
        let (lo, hi) = loop {
            match work.pop() {
                Some((lo, hi)) if lo == hi => continue,
                Some(seg) => break seg,
                None => {
                    out.push(partner.to_vec());
                    return;
                }
            }
        };
        for q in (lo + 1..hi).step_by(2) {
            partner[lo] = q;
            partner[q] = lo;
            let mut next = work.clone();
            next.push((lo + 1, q));
            next.push((q + 1, hi));
            gen(next, partner, out);
        }
        partner[lo] = usize::MAX;
    }
    let mut raw = Vec::new();
    let mut partner = vec![usize::MAX; total];
    gen(vec![(0, total)], &mut partner, &mut raw);
    for pos_matching in raw {
        // pos_matching is over boundary-cycle positions; translate back.
        let unpos = |pos: usize| -> usize {
            if pos < n {
                pos
            } else {
                n + (n - 1 - (pos - n))
            }
        };
        let mut matching = vec![0; total];
        for (pos, &q) in pos_matching.iter().enumerate() {
            matching[unpos(pos)] = unpos(q);
        }
        out.push(TLDiagram::new(n, n, matching, 0).expect("non-crossing by construction"));
    }
    out.sort();
    out
}

impl fmt::Display for TLDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |p: usize| -> String {
            if p < self.n_in {
                format!("b{}", p + 1)
            } else {
                format!("t{}", p - self.n_in + 1)
            }
        };
        let mut first = true;
        for (p, q) in self.arcs() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}-{}", name(p), name(q))?;
            first = false;
        }
        for _ in 0..self.circles {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "o")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for TLDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut circles = 0usize;
        let mut pairs: Vec<((char, usize), (char, usize))> = Vec::new();
        let mut max_b = 0usize;
        let mut max_t = 0usize;
        for tok in s.split_whitespace() {
            if tok == "o" {
                circles += 1;
                continue;
            }
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("bad arc '{}'", tok)))?;
            let parse_pt = |t: &str| -> Result<(char, usize)> {
                let kind = t.chars().next().filter(|c| *c == 'b' || *c == 't');
                let idx: usize = t[1..]
                    .parse()
                    .ok()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| Error::Parse(format!("bad point '{}'", t)))?;
                Ok((
                    kind.ok_or_else(|| Error::Parse(format!("bad point '{}'", t)))?,
                    idx,
                ))
            };
            let pa = parse_pt(a)?;
            let pb = parse_pt(b)?;
            for &(k, i) in [&pa, &pb] {
                if k == 'b' {
                    max_b = max_b.max(i);
                } else {
                    max_t = max_t.max(i);
                }
            }
            pairs.push((pa, pb));
        }
        let n_in = max_b;
        let n_out = max_t;
        let label = |(k, i): (char, usize)| -> usize {
            if k == 'b' {
                i - 1
            } else {
                n_in + i - 1
            }
        };
        let mut matching = vec![usize::MAX; n_in + n_out];
        for (pa, pb) in pairs {
            let (a, b) = (label(pa), label(pb));
            if matching[a] != usize::MAX || matching[b] != usize::MAX {
                return Err(Error::NotAnInvolution);
            }
            matching[a] = b;
            matching[b] = a;
        }
        if matching.contains(&usize::MAX) {
            return Err(Error::NotAnInvolution);
        }
        TLDiagram::new(n_in, n_out, matching, circles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize, i: usize) -> TLDiagram {
        TLDiagram::u(n, i).unwrap()
    }

    #[test]
    fn catalan_counts() {
        assert_eq!(enumerate_tl(0).len(), 1);
        assert_eq!(enumerate_tl(1).len(), 1);
        assert_eq!(enumerate_tl(2).len(), 2);
        assert_eq!(enumerate_tl(3).len(), 5);
        assert_eq!(enumerate_tl(4).len(), 14);
        assert_eq!(enumerate_tl(5).len(), 42);
    }

    #[test]
    fn planarity_rejects_crossing() {
        // b1-t2, b2-t1 is the transposition: not planar.
        let r = TLDiagram::new(2, 2, vec![3, 2, 1, 0], 0);
        assert_eq!(r.unwrap_err(), Error::NotPlanar);
        // b1-b2 with t1-t2 is planar (the U generator).
        assert!(TLDiagram::new(2, 2, vec![1, 0, 3, 2], 0).is_ok());
    }

    #[test]
    fn jones_relations() {
        // U_i^2 = (circle) U_i
        let u1 = u(3, 1);
        let sq = u1.compose(&u1).unwrap();
        assert_eq!(sq.stripped(), u1);
        assert_eq!(sq.circles(), 1);
        // U_1 U_2 U_1 = U_1
        let u2 = u(3, 2);
        let prod = u1.compose(&u2).unwrap().compose(&u1).unwrap();
        assert_eq!(prod, u1);
        // U_1 U_3 = U_3 U_1 in TL_4
        let a = u(4, 1).compose(&u(4, 3)).unwrap();
        let b = u(4, 3).compose(&u(4, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn compose_trace_circle_bookkeeping() {
        let u1 = u(2, 1);
        let tr = u1.compose_trace(&u1).unwrap();
        assert_eq!(tr.cycles.len(), 1);
        assert_eq!(tr.lower_circles, 0);
        assert_eq!(tr.cycle_circle_id(0), 0);
        // The middle cycle is the lower diagram's top arc plus the upper's
        // bottom arc.
        let mut constituents = tr.cycles[0].clone();
        constituents.sort();
        assert_eq!(constituents, vec![(Layer::Lower, 1), (Layer::Upper, 0)]);
        // Result arcs: bottom cap traverses only the lower's bottom arc.
        assert_eq!(tr.arc_paths[0], vec![(Layer::Lower, 0)]);
        // Circles accumulate across repeated composition.
        let tr2 = tr.diagram.compose_trace(&u1).unwrap();
        assert_eq!(tr2.diagram.circles(), 2);
        assert_eq!(tr2.lower_circles, 1);
        assert_eq!(tr2.lower_circle_id(0), 0);
        assert_eq!(tr2.cycle_circle_id(0), 1);
    }

    #[test]
    fn cap_cup_shapes() {
        let cap = TLDiagram::cap(2, 1).unwrap();
        assert_eq!(cap.to_string(), "b1-b2");
        let cup = TLDiagram::cup(2, 1).unwrap();
        assert_eq!(cup.to_string(), "t1-t2");
        // cap . cup : 0 -> 0 with one circle.
        let circle = cup.compose(&cap).unwrap();
        assert_eq!(circle.n_in(), 0);
        assert_eq!(circle.circles(), 1);
        assert_eq!(circle.to_string(), "o");
        // Composing cup after cap on 2 strands: cap then cup is U_1.
        assert_eq!(cap.compose(&cup).unwrap(), u(2, 1));
    }

    #[test]
    fn through_strands_and_cap_degree() {
        assert_eq!(TLDiagram::identity(3).through_strands(), 3);
        assert_eq!(TLDiagram::identity(3).cap_degree(), 0);
        let prod = u(3, 1).compose(&u(3, 2)).unwrap();
        assert_eq!(prod.through_strands(), 1);
        assert_eq!(prod.cap_degree(), 1);
    }

    #[test]
    fn factorize_round_trip() {
        for n in 0..=4 {
            for d in enumerate_tl(n) {
                let w = d.cap_cup_factorize();
                assert_eq!(w.to_diagram().unwrap(), d, "diagram {}", d);
            }
        }
        // Non-square case with a circle.
        let d: TLDiagram = "b1-b2 b3-t1 b4-t2 o".parse().unwrap();
        let w = d.cap_cup_factorize();
        assert_eq!(w.caps, vec![1]);
        assert!(w.cups.is_empty());
        assert_eq!(w.circles, 1);
        assert_eq!(w.to_diagram().unwrap(), d);
    }

    #[test]
    fn mirror_and_extend() {
        let cap = TLDiagram::cap(4, 2).unwrap();
        assert_eq!(cap.mirror(), TLDiagram::cup(4, 2).unwrap());
        assert_eq!(cap.mirror().mirror(), cap);
        let ext = u(2, 1).extend_right(1);
        assert_eq!(ext, u(3, 1));
        assert_eq!(TLDiagram::empty().extend_right(2), TLDiagram::identity(2));
    }

    #[test]
    fn closure_circle_counts() {
        // Closing U_1 gives one circle; closing the identity gives two.
        let tr = u(2, 1).closure_trace().unwrap();
        assert_eq!(tr.total_circles(), 1);
        let tr = TLDiagram::identity(2).closure_trace().unwrap();
        assert_eq!(tr.total_circles(), 2);
        assert_eq!(tr.point_circle, vec![0, 1, 0, 1]);
        // A diagram circle gets its own closure circle after the cycles.
        let tr = u(2, 1).with_circles(1).closure_trace().unwrap();
        assert_eq!(tr.total_circles(), 2);
        assert_eq!(tr.diagram_circle_id(0), 1);
    }

    #[test]
    fn display_round_trip() {
        for n in 0..=4 {
            for d in enumerate_tl(n) {
                let s = d.to_string();
                let back: TLDiagram = s.parse().unwrap();
                assert_eq!(back, d, "round trip through '{}'", s);
            }
        }
        let d = u(3, 2).with_circles(2);
        let back: TLDiagram = d.to_string().parse().unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("b1-b2 b1-t1".parse::<TLDiagram>().is_err());
        assert!("b1-t2 b2-t1".parse::<TLDiagram>().is_err());
        assert!("b1".parse::<TLDiagram>().is_err());
        assert!("x1-t1".parse::<TLDiagram>().is_err());
    }
}
