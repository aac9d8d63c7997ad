//! Dotted cobordisms between planar diagrams, in disk normal form.
//!
//! Both diagrams of a cobordism share their boundary points, so the
//! union of source arcs and target arcs is a 2-regular graph; its cycles,
//! together with one cycle per source circle and per target circle, are
//! the canonical boundary cycles of the pair. In normal form the surface
//! is a disjoint union of disks, one per cycle, each carrying at most one
//! dot. Neck-cutting (a dot is half a handle, two dots vanish) rewrites
//! any dotted cobordism as an integer combination of such normal forms,
//! which is what [`CobLin`] stores: a map from dot masks to coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::tl_diagram::{Layer, TLDiagram};
use crate::Result;

/// Dot mask over the canonical cycles of a cobordism pair.
pub type Mask = u64;

/// The canonical boundary cycles of a (source, target) diagram pair.
///
/// Cycle ids: the point cycles first (ordered by smallest point), then
/// one cycle per source circle, then one per target circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePlan {
    source: TLDiagram,
    target: TLDiagram,
    point_cycle: Vec<usize>,
    n_point_cycles: usize,
}

impl CyclePlan {
    pub fn new(source: TLDiagram, target: TLDiagram) -> Result<Self> {
        if (source.n_in(), source.n_out()) != (target.n_in(), target.n_out()) {
            return Err(Error::BoundaryMismatch(
                source.n_in(),
                source.n_out(),
                target.n_in(),
                target.n_out(),
            ));
        }
        let total = source.n_in() + source.n_out();
        let mut point_cycle = vec![usize::MAX; total];
        let mut n_point_cycles = 0;
        for start in 0..total {
            if point_cycle[start] != usize::MAX {
                continue;
            }
            let id = n_point_cycles;
            n_point_cycles += 1;
            let mut p = start;
            loop {
                point_cycle[p] = id;
                let q = source.matched(p);
                point_cycle[q] = id;
                p = target.matched(q);
                if p == start {
                    break;
                }
            }
        }
        let plan = CyclePlan {
            source,
            target,
            point_cycle,
            n_point_cycles,
        };
        assert!(
            plan.total_cycles() <= Mask::BITS as usize,
            "cobordism with more than {} cycles",
            Mask::BITS
        );
        Ok(plan)
    }

    pub fn source(&self) -> &TLDiagram {
        &self.source
    }

    pub fn target(&self) -> &TLDiagram {
        &self.target
    }

    pub fn n_point_cycles(&self) -> usize {
        self.n_point_cycles
    }

    pub fn total_cycles(&self) -> usize {
        self.n_point_cycles + self.source.circles() + self.target.circles()
    }

    pub fn point_cycle(&self, p: usize) -> usize {
        self.point_cycle[p]
    }

    pub fn source_circle_cycle(&self, k: usize) -> usize {
        debug_assert!(k < self.source.circles());
        self.n_point_cycles + k
    }

    pub fn target_circle_cycle(&self, k: usize) -> usize {
        debug_assert!(k < self.target.circles());
        self.n_point_cycles + self.source.circles() + k
    }

    /// Cycle through a given source arc (by arc index).
    pub fn source_arc_cycle(&self, arc: usize) -> usize {
        let (p, _) = self.source.arcs()[arc];
        self.point_cycle[p]
    }

    pub fn target_arc_cycle(&self, arc: usize) -> usize {
        let (p, _) = self.target.arcs()[arc];
        self.point_cycle[p]
    }
}

/// One connected piece of a surface before disk normalisation.
#[derive(Debug, Clone)]
struct Component {
    cycles: Vec<usize>,
    chi: i64,
    dots: usize,
}

/// Expand surface components into disk-basis masks.
///
/// Every dot counts as half a handle: a component of genus `g` carrying
/// `d` dots contributes `2^g` and `g + d` effective dots; two or more
/// effective dots kill the term. A closed component must end up with
/// exactly one effective dot, evaluating to its coefficient. An open
/// component with no effective dot neck-cuts into the sum over its
/// cycles of "all other cycles dotted"; with one effective dot every
/// cycle gets a dot.
fn expand_components(comps: &[Component], coeff: i64) -> BTreeMap<Mask, i64> {
    let mut acc: BTreeMap<Mask, i64> = BTreeMap::new();
    acc.insert(0, coeff);
    for comp in comps {
        let b = comp.cycles.len() as i64;
        let two_g = 2 - b - comp.chi;
        assert!(
            two_g >= 0 && two_g % 2 == 0,
            "bad component: b={} chi={}",
            b,
            comp.chi
        );
        let g = (two_g / 2) as u32;
        let eff = comp.dots + g as usize;
        if eff >= 2 {
            return BTreeMap::new();
        }
        let factor = 1i64 << g;
        let mut options: Vec<Mask> = Vec::new();
        if comp.cycles.is_empty() {
            if eff != 1 {
                return BTreeMap::new();
            }
            options.push(0);
        } else if eff == 1 {
            let mut m = 0;
            for &c in &comp.cycles {
                m |= 1 << c;
            }
            options.push(m);
        } else {
            for &skip in &comp.cycles {
                let mut m = 0;
                for &c in &comp.cycles {
                    if c != skip {
                        m |= 1 << c;
                    }
                }
                options.push(m);
            }
        }
        let mut next = BTreeMap::new();
        for (mask, c) in &acc {
            for &opt in &options {
                let e = next.entry(mask | opt).or_insert(0i64);
                *e += c * factor;
            }
        }
        acc = next;
    }
    acc.retain(|_, c| *c != 0);
    acc
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// An integer combination of disk normal forms over a fixed cycle plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobLin {
    plan: CyclePlan,
    terms: BTreeMap<Mask, i64>,
}

impl CobLin {
    pub fn zero(source: TLDiagram, target: TLDiagram) -> Result<Self> {
        Ok(CobLin {
            plan: CyclePlan::new(source, target)?,
            terms: BTreeMap::new(),
        })
    }

    /// Build from explicit surface components covering all cycles.
    fn from_components(
        source: TLDiagram,
        target: TLDiagram,
        comps: &[Component],
        coeff: i64,
    ) -> Result<Self> {
        let plan = CyclePlan::new(source, target)?;
        debug_assert_eq!(
            comps.iter().map(|c| c.cycles.len()).sum::<usize>(),
            plan.total_cycles()
        );
        let terms = expand_components(comps, coeff);
        Ok(CobLin { plan, terms })
    }

    /// All cycles capped by plain disks: the minimal transition between
    /// two diagrams. For an identity pair this is the identity only when
    /// the diagrams are circle-free.
    pub fn disks(source: TLDiagram, target: TLDiagram) -> Result<Self> {
        let plan = CyclePlan::new(source.clone(), target.clone())?;
        let comps: Vec<Component> = (0..plan.total_cycles())
            .map(|c| Component {
                cycles: vec![c],
                chi: 1,
                dots: 0,
            })
            .collect();
        CobLin::from_components(source, target, &comps, 1)
    }

    /// The identity cobordism: disks over point cycles, annuli over
    /// circles (which neck-cut into two terms each).
    pub fn identity(d: &TLDiagram) -> Result<Self> {
        let plan = CyclePlan::new(d.clone(), d.clone())?;
        let mut comps: Vec<Component> = (0..plan.n_point_cycles())
            .map(|c| Component {
                cycles: vec![c],
                chi: 1,
                dots: 0,
            })
            .collect();
        for k in 0..d.circles() {
            comps.push(Component {
                cycles: vec![plan.source_circle_cycle(k), plan.target_circle_cycle(k)],
                chi: 0,
                dots: 0,
            });
        }
        CobLin::from_components(d.clone(), d.clone(), &comps, 1)
    }

    pub fn plan(&self) -> &CyclePlan {
        &self.plan
    }

    pub fn source(&self) -> &TLDiagram {
        self.plan.source()
    }

    pub fn target(&self) -> &TLDiagram {
        self.plan.target()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, i64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn coeff(&self, mask: Mask) -> i64 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: Mask, coeff: i64) {
        let e = self.terms.entry(mask).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, rhs: &CobLin) -> Result<CobLin> {
        if self.plan != rhs.plan {
            return Err(Error::BoundaryMismatch(
                rhs.source().n_in(),
                rhs.source().n_out(),
                self.source().n_in(),
                self.source().n_out(),
            ));
        }
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, by: i64) -> CobLin {
        let mut out = CobLin {
            plan: self.plan.clone(),
            terms: BTreeMap::new(),
        };
        if by != 0 {
            for (m, c) in self.terms() {
                out.terms.insert(m, c * by);
            }
        }
        out
    }

    pub fn neg(&self) -> CobLin {
        self.scale(-1)
    }

    pub fn sub(&self, rhs: &CobLin) -> Result<CobLin> {
        self.add(&rhs.neg())
    }

    /// Degree of one disk-basis term: cycles minus twice the dots minus
    /// half the boundary points.
    pub fn term_degree(&self, mask: Mask) -> i64 {
        let points = (self.source().n_in() + self.source().n_out()) as i64;
        self.plan.total_cycles() as i64 - 2 * mask.count_ones() as i64 - points / 2
    }

    /// Degree shared by all terms, if they agree.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = self.term_degree(*it.next()?);
        for m in it {
            if self.term_degree(*m) != first {
                return None;
            }
        }
        Some(first)
    }

    /// `Some(c)` with `c = ±1` when this is plus or minus the identity
    /// on a circle-free diagram. Such entries are the invertible ones.
    pub fn as_pm_identity(&self) -> Option<i64> {
        if self.source() != self.target() || self.source().circles() != 0 {
            return None;
        }
        if self.terms.len() != 1 {
            return None;
        }
        let (&mask, &c) = self.terms.iter().next()?;
        if mask == 0 && (c == 1 || c == -1) {
            Some(c)
        } else {
            None
        }
    }

    /// Stack `upper` on this cobordism (in the morphism direction).
    /// Requires this target to equal `upper`'s source, circles included.
    pub fn compose(&self, upper: &CobLin) -> Result<CobLin> {
        if self.target() != upper.source() {
            return Err(Error::BoundaryMismatch(
                upper.source().n_in(),
                upper.source().n_out(),
                self.target().n_in(),
                self.target().n_out(),
            ));
        }
        let mid = self.target().clone();
        let lp = &self.plan;
        let up = &upper.plan;
        let nl = lp.total_cycles();
        let nu = up.total_cycles();
        let result_plan = CyclePlan::new(self.source().clone(), upper.target().clone())?;

        let mut uf = UnionFind::new(nl + nu);
        // Gluings along middle arcs cost one to chi; along circles, none.
        let mut arc_gluings: Vec<(usize, usize)> = Vec::new();
        for arc in 0..mid.arcs().len() {
            let a = lp.target_arc_cycle(arc);
            let b = nl + up.source_arc_cycle(arc);
            uf.union(a, b);
            arc_gluings.push((a, b));
        }
        for k in 0..mid.circles() {
            uf.union(lp.target_circle_cycle(k), nl + up.source_circle_cycle(k));
        }

        // Mask-independent component geometry.
        let mut roots: BTreeMap<usize, (Vec<usize>, i64, Vec<usize>)> = BTreeMap::new();
        for piece in 0..nl + nu {
            let r = uf.find(piece);
            let entry = roots.entry(r).or_insert((Vec::new(), 0, Vec::new()));
            entry.0.push(piece);
            entry.1 += 1;
        }
        for &(a, _) in &arc_gluings {
            let r = uf.find(a);
            roots.get_mut(&r).unwrap().1 -= 1;
        }
        // Attach result cycles to components.
        let total_points = result_plan.source().n_in() + result_plan.source().n_out();
        let mut seen_cycle = vec![false; result_plan.total_cycles()];
        for p in 0..total_points {
            let cyc = result_plan.point_cycle(p);
            if seen_cycle[cyc] {
                continue;
            }
            seen_cycle[cyc] = true;
            let r = uf.find(lp.point_cycle(p));
            roots.get_mut(&r).unwrap().2.push(cyc);
        }
        for k in 0..result_plan.source().circles() {
            let r = uf.find(lp.source_circle_cycle(k));
            roots
                .get_mut(&r)
                .unwrap()
                .2
                .push(result_plan.source_circle_cycle(k));
        }
        for k in 0..result_plan.target().circles() {
            let r = uf.find(nl + up.target_circle_cycle(k));
            roots
                .get_mut(&r)
                .unwrap()
                .2
                .push(result_plan.target_circle_cycle(k));
        }

        let mut out = CobLin {
            plan: result_plan,
            terms: BTreeMap::new(),
        };
        for (m1, c1) in self.terms() {
            for (m2, c2) in upper.terms() {
                let comps: Vec<Component> = roots
                    .values()
                    .map(|(pieces, chi, cycles)| {
                        let dots = pieces
                            .iter()
                            .filter(|&&p| {
                                if p < nl {
                                    m1 & (1 << p) != 0
                                } else {
                                    m2 & (1 << (p - nl)) != 0
                                }
                            })
                            .count();
                        Component {
                            cycles: cycles.clone(),
                            chi: *chi,
                            dots,
                        }
                    })
                    .collect();
                for (mask, c) in expand_components(&comps, c1 * c2) {
                    out.add_term(mask, c);
                }
            }
        }
        Ok(out)
    }

    /// Put `upper` beside this cobordism over composed diagrams: the
    /// result goes from `upper.source . self.source` to
    /// `upper.target . self.target` (diagram composition, self below).
    pub fn horizontal(&self, upper: &CobLin) -> Result<CobLin> {
        let src_trace = self.source().compose_trace(upper.source())?;
        let tgt_trace = self.target().compose_trace(upper.target())?;
        let lp = &self.plan;
        let up = &upper.plan;
        let nl = lp.total_cycles();
        let nu = up.total_cycles();
        let result_plan = CyclePlan::new(src_trace.diagram.clone(), tgt_trace.diagram.clone())?;

        let mid_points = self.source().n_out();
        let res_in = self.source().n_in();
        let mut uf = UnionFind::new(nl + nu);
        for p in 0..mid_points {
            let a = lp.point_cycle(res_in + p);
            let b = nl + up.point_cycle(p);
            uf.union(a, b);
        }

        let mut roots: BTreeMap<usize, (Vec<usize>, i64, Vec<usize>)> = BTreeMap::new();
        for piece in 0..nl + nu {
            let r = uf.find(piece);
            let entry = roots.entry(r).or_insert((Vec::new(), 0, Vec::new()));
            entry.0.push(piece);
            entry.1 += 1;
        }
        for p in 0..mid_points {
            let r = uf.find(lp.point_cycle(res_in + p));
            roots.get_mut(&r).unwrap().1 -= 1;
        }

        // Result point cycles attach through any boundary point on them.
        let res = &result_plan;
        let res_points = res.source().n_in() + res.source().n_out();
        let upper_of = |p: usize| -> usize {
            // Result top j is the upper diagrams' top j.
            upper.source().n_in() + (p - res_in)
        };
        let mut seen_cycle = vec![false; res.total_cycles()];
        for p in 0..res_points {
            let cyc = res.point_cycle(p);
            if seen_cycle[cyc] {
                continue;
            }
            seen_cycle[cyc] = true;
            let piece = if p < res_in {
                lp.point_cycle(p)
            } else {
                nl + up.point_cycle(upper_of(p))
            };
            let r = uf.find(piece);
            roots.get_mut(&r).unwrap().2.push(cyc);
        }
        // Composite circles: the lower diagram's, the upper's, then the
        // cycles born in the middle, on each face.
        let attach_circles =
            |trace: &crate::tl_diagram::ComposeTrace,
             side_circle: &dyn Fn(usize) -> usize,
             uf: &mut UnionFind,
             roots: &mut BTreeMap<usize, (Vec<usize>, i64, Vec<usize>)>,
             lower_circle_piece: &dyn Fn(usize) -> usize,
             upper_circle_piece: &dyn Fn(usize) -> usize,
             arc_piece: &dyn Fn(Layer, usize) -> usize| {
                for k in 0..trace.lower_circles {
                    let r = uf.find(lower_circle_piece(k));
                    roots
                        .get_mut(&r)
                        .unwrap()
                        .2
                        .push(side_circle(trace.lower_circle_id(k)));
                }
                for k in 0..trace.upper_circles {
                    let r = uf.find(upper_circle_piece(k));
                    roots
                        .get_mut(&r)
                        .unwrap()
                        .2
                        .push(side_circle(trace.upper_circle_id(k)));
                }
                for (t, cyc) in trace.cycles.iter().enumerate() {
                    let (layer, arc) = cyc[0];
                    let r = uf.find(arc_piece(layer, arc));
                    roots
                        .get_mut(&r)
                        .unwrap()
                        .2
                        .push(side_circle(trace.cycle_circle_id(t)));
                }
            };
        attach_circles(
            &src_trace,
            &|k| res.source_circle_cycle(k),
            &mut uf,
            &mut roots,
            &|k| lp.source_circle_cycle(k),
            &|k| nl + up.source_circle_cycle(k),
            &|layer, arc| match layer {
                Layer::Lower => lp.source_arc_cycle(arc),
                Layer::Upper => nl + up.source_arc_cycle(arc),
            },
        );
        attach_circles(
            &tgt_trace,
            &|k| res.target_circle_cycle(k),
            &mut uf,
            &mut roots,
            &|k| lp.target_circle_cycle(k),
            &|k| nl + up.target_circle_cycle(k),
            &|layer, arc| match layer {
                Layer::Lower => lp.target_arc_cycle(arc),
                Layer::Upper => nl + up.target_arc_cycle(arc),
            },
        );

        let mut out = CobLin {
            plan: result_plan,
            terms: BTreeMap::new(),
        };
        for (m1, c1) in self.terms() {
            for (m2, c2) in upper.terms() {
                let comps: Vec<Component> = roots
                    .values()
                    .map(|(pieces, chi, cycles)| {
                        let dots = pieces
                            .iter()
                            .filter(|&&p| {
                                if p < nl {
                                    m1 & (1 << p) != 0
                                } else {
                                    m2 & (1 << (p - nl)) != 0
                                }
                            })
                            .count();
                        Component {
                            cycles: cycles.clone(),
                            chi: *chi,
                            dots,
                        }
                    })
                    .collect();
                for (mask, c) in expand_components(&comps, c1 * c2) {
                    out.add_term(mask, c);
                }
            }
        }
        Ok(out)
    }

    /// Transpose under vertical reflection: swaps source and target.
    pub fn mirror(&self) -> CobLin {
        let new_source = self.target().mirror();
        let new_target = self.source().mirror();
        let plan = CyclePlan::new(new_source, new_target).expect("mirror keeps boundaries");
        let old = &self.plan;
        let n_in_old = self.source().n_in();
        let n_out_old = self.source().n_out();
        let relabel = |p: usize| -> usize {
            if p < n_in_old {
                n_out_old + p
            } else {
                p - n_in_old
            }
        };
        // Map old cycle id -> new cycle id.
        let mut cycle_map = vec![usize::MAX; old.total_cycles()];
        for p in 0..n_in_old + n_out_old {
            cycle_map[old.point_cycle(p)] = plan.point_cycle(relabel(p));
        }
        for k in 0..self.source().circles() {
            cycle_map[old.source_circle_cycle(k)] = plan.target_circle_cycle(k);
        }
        for k in 0..self.target().circles() {
            cycle_map[old.target_circle_cycle(k)] = plan.source_circle_cycle(k);
        }
        let mut terms = BTreeMap::new();
        for (m, c) in self.terms() {
            let mut nm: Mask = 0;
            for (cyc, &mapped) in cycle_map.iter().enumerate() {
                if m & (1 << cyc) != 0 {
                    nm |= 1 << mapped;
                }
            }
            terms.insert(nm, c);
        }
        CobLin { plan, terms }
    }
}

impl fmt::Display for CobLin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            let ids: Vec<String> = (0..self.plan.total_cycles())
                .filter(|c| m & (1 << c) != 0)
                .map(|c| c.to_string())
                .collect();
            if c == 1 {
                write!(f, "o{{{}}}", ids.join(","))?;
            } else {
                write!(f, "{}*o{{{}}}", c, ids.join(","))?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Delooping data for a diagram with at least one circle: the circle is
/// removed and the object splits into a low and a high copy.
///
/// The grading shifts, in half-units of `q` and `z2`, are `(-2, 0, +2)`
/// for the low copy and `(+2, 0, +2)` for the high one. The split maps
/// go out of the circled diagram, the merges come back, and they are
/// mutually inverse: `merge_i . split_j = delta_ij`, and the two
/// `split . merge` composites sum to the identity.
#[derive(Debug, Clone)]
pub struct DeloopIso {
    pub reduced: TLDiagram,
    /// `[low, high]`, each from the circled diagram to `reduced`.
    pub split: [CobLin; 2],
    /// `[low, high]`, each from `reduced` to the circled diagram.
    pub merge: [CobLin; 2],
}

/// Deloop the last circle of `d`.
pub fn deloop(d: &TLDiagram) -> Result<DeloopIso> {
    let k = d.circles();
    if k == 0 {
        return Err(Error::MissingCircle);
    }
    let reduced = d.with_circles(k - 1);

    let build = |source: &TLDiagram, target: &TLDiagram, lone_dotted: bool| -> Result<CobLin> {
        let plan = CyclePlan::new(source.clone(), target.clone())?;
        let mut comps: Vec<Component> = (0..plan.n_point_cycles())
            .map(|c| Component {
                cycles: vec![c],
                chi: 1,
                dots: 0,
            })
            .collect();
        for j in 0..k - 1 {
            comps.push(Component {
                cycles: vec![plan.source_circle_cycle(j), plan.target_circle_cycle(j)],
                chi: 0,
                dots: 0,
            });
        }
        // The lone circle: on whichever side still has it.
        let lone = if source.circles() == k {
            plan.source_circle_cycle(k - 1)
        } else {
            plan.target_circle_cycle(k - 1)
        };
        comps.push(Component {
            cycles: vec![lone],
            chi: 1,
            dots: if lone_dotted { 1 } else { 0 },
        });
        CobLin::from_components(source.clone(), target.clone(), &comps, 1)
    };

    Ok(DeloopIso {
        reduced: reduced.clone(),
        split: [build(d, &reduced, true)?, build(d, &reduced, false)?],
        merge: [build(&reduced, d, false)?, build(&reduced, d, true)?],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_masks() {
        // Circle-free identity is the single undotted mask.
        let id = CobLin::identity(&TLDiagram::u(2, 1).unwrap()).unwrap();
        assert_eq!(id.terms().collect::<Vec<_>>(), vec![(0, 1)]);
        // Identity over a circle neck-cuts into two one-dot terms.
        let d = TLDiagram::u(2, 1).unwrap().with_circles(1);
        let id = CobLin::identity(&d).unwrap();
        let terms: Vec<(Mask, i64)> = id.terms().collect();
        assert_eq!(terms.len(), 2);
        assert!(terms.iter().all(|(m, c)| m.count_ones() == 1 && *c == 1));
        // Both dots sit on the circle cycles, not the point cycles.
        let plan = id.plan();
        let circle_bits = (1 << plan.source_circle_cycle(0)) | (1 << plan.target_circle_cycle(0));
        for (m, _) in terms {
            assert_eq!(m & circle_bits, m);
        }
    }

    #[test]
    fn identity_is_idempotent() {
        for d in [
            TLDiagram::identity(2),
            TLDiagram::u(3, 2).unwrap(),
            TLDiagram::u(2, 1).unwrap().with_circles(2),
        ] {
            let id = CobLin::identity(&d).unwrap();
            assert_eq!(id.compose(&id).unwrap(), id, "identity over {}", d);
        }
    }

    #[test]
    fn sphere_values() {
        let empty = TLDiagram::empty();
        let circle = empty.with_circles(1);
        let birth = CobLin::disks(empty.clone(), circle.clone()).unwrap();
        let death = CobLin::disks(circle.clone(), empty.clone()).unwrap();
        let dotted_death = {
            let plan = CyclePlan::new(circle.clone(), empty.clone()).unwrap();
            let mut c = CobLin::zero(circle.clone(), empty.clone()).unwrap();
            c.add_term(1 << plan.source_circle_cycle(0), 1);
            c
        };
        // Plain sphere dies; one dot makes it one.
        let sphere = birth.compose(&death).unwrap();
        assert!(sphere.is_zero());
        let dotted = birth.compose(&dotted_death).unwrap();
        assert_eq!(dotted.terms().collect::<Vec<_>>(), vec![(0, 1)]);
        // Identity between births: id after birth is birth.
        let id = CobLin::identity(&circle).unwrap();
        assert_eq!(birth.compose(&id).unwrap(), birth);
        assert_eq!(id.compose(&death).unwrap(), death);
    }

    #[test]
    fn genus_one_cap_is_twice_dotted() {
        let empty = TLDiagram::empty();
        let circle = empty.with_circles(1);
        // A genus-one surface capping off a circle has chi -1 and one
        // boundary cycle; trading the handle for a dot doubles it.
        let handled_cap = CobLin::from_components(
            circle.clone(),
            empty.clone(),
            &[Component {
                cycles: vec![0],
                chi: -1,
                dots: 0,
            }],
            1,
        )
        .unwrap();
        let plan = CyclePlan::new(circle.clone(), empty.clone()).unwrap();
        let mut expected = CobLin::zero(circle.clone(), empty.clone()).unwrap();
        expected.add_term(1 << plan.source_circle_cycle(0), 2);
        assert_eq!(handled_cap, expected);
        // Closing it with a plain birth makes a torus, which counts 2.
        let birth = CobLin::disks(empty.clone(), circle.clone()).unwrap();
        let torus = birth.compose(&handled_cap).unwrap();
        assert_eq!(torus.terms().collect::<Vec<_>>(), vec![(0, 2)]);
        // One dot on the handle kills it: x^2 = 0.
        let dotted_handle = CobLin::from_components(
            circle.clone(),
            empty,
            &[Component {
                cycles: vec![0],
                chi: -1,
                dots: 1,
            }],
            1,
        )
        .unwrap();
        assert!(dotted_handle.is_zero());
    }

    #[test]
    fn deloop_isos_invert() {
        for d in [
            TLDiagram::u(2, 1).unwrap().with_circles(1),
            TLDiagram::identity(2).with_circles(2),
            TLDiagram::empty().with_circles(1),
        ] {
            let iso = deloop(&d).unwrap();
            let idr = CobLin::identity(&iso.reduced).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let comp = iso.merge[i].compose(&iso.split[j]).unwrap();
                    if i == j {
                        assert_eq!(comp, idr, "merge{} split{} over {}", i, j, d);
                    } else {
                        assert!(comp.is_zero(), "merge{} split{} over {}", i, j, d);
                    }
                }
            }
            let back = iso.split[0]
                .compose(&iso.merge[0])
                .unwrap()
                .add(&iso.split[1].compose(&iso.merge[1]).unwrap())
                .unwrap();
            assert_eq!(
                back,
                CobLin::identity(&d).unwrap(),
                "neck-cut identity over {}",
                d
            );
        }
    }

    #[test]
    fn deloop_degrees() {
        let d = TLDiagram::u(2, 1).unwrap().with_circles(1);
        let iso = deloop(&d).unwrap();
        assert_eq!(iso.split[0].degree(), Some(-1));
        assert_eq!(iso.split[1].degree(), Some(1));
        assert_eq!(iso.merge[0].degree(), Some(1));
        assert_eq!(iso.merge[1].degree(), Some(-1));
    }

    #[test]
    fn saddle_degree() {
        let saddle = CobLin::disks(TLDiagram::u(2, 1).unwrap(), TLDiagram::identity(2)).unwrap();
        assert_eq!(saddle.degree(), Some(-1));
        // Composing the two opposite saddles merges into a tube with a
        // through-going boundary: U -> id -> U is chi 0 over the U cycle
        // pair, which neck-cuts.
        let saddle_back =
            CobLin::disks(TLDiagram::identity(2), TLDiagram::u(2, 1).unwrap()).unwrap();
        let around = saddle.compose(&saddle_back).unwrap();
        assert_eq!(around.degree(), Some(-2));
        assert_eq!(around.terms().count(), 2);
    }

    #[test]
    fn interchange_law() {
        // Entries over composable diagram pairs: lower over (cap, cap),
        // upper over (cup, cup) with a saddle on each floor.
        let u = TLDiagram::u(2, 1).unwrap();
        let id2 = TLDiagram::identity(2);
        let e1 = CobLin::disks(u.clone(), id2.clone()).unwrap();
        let f1 = CobLin::identity(&id2).unwrap();
        let e2 = CobLin::identity(&u).unwrap();
        let f2 = CobLin::disks(u.clone(), id2.clone()).unwrap();
        // (e1 then f1) horizontally composed with (e2 then f2) equals
        // (e1 horizontal e2) then (f1 horizontal f2).
        let lhs = e1
            .compose(&f1)
            .unwrap()
            .horizontal(&e2.compose(&f2).unwrap())
            .unwrap();
        let rhs = e1
            .horizontal(&e2)
            .unwrap()
            .compose(&f1.horizontal(&f2).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn horizontal_traces_middle_circle() {
        // U stacked over U creates a middle circle on each face; the
        // horizontal composite of identities must be the identity of the
        // circled composite.
        let u = TLDiagram::u(2, 1).unwrap();
        let id_u = CobLin::identity(&u).unwrap();
        let h = id_u.horizontal(&id_u).unwrap();
        let composite = u.compose(&u).unwrap();
        assert_eq!(composite.circles(), 1);
        assert_eq!(h, CobLin::identity(&composite).unwrap());
    }

    #[test]
    fn mirror_involution() {
        let u = TLDiagram::u(2, 1).unwrap();
        let saddle = CobLin::disks(u.clone(), TLDiagram::identity(2)).unwrap();
        let m = saddle.mirror();
        assert_eq!(m.source(), &TLDiagram::identity(2));
        assert_eq!(m.target(), &u);
        assert_eq!(m.mirror(), saddle);
        // Mirror respects composition contravariantly.
        let id = CobLin::identity(&u).unwrap();
        let lhs = id.compose(&saddle).unwrap().mirror();
        let rhs = saddle.mirror().compose(&id.mirror()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
