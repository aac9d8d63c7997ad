//! Integral homology of closed complexes.
//!
//! An endomorphism complex is closed by joining bottom point `i` to top
//! point `i`. Each closure circle carries the rank-two Frobenius algebra
//! `Z[x]/(x^2)` with `1` in degree `-1` and `x` in degree `+1`, and every
//! closed cobordism acts component by component: dots and handles multiply
//! by `x` (a handle twice, with a factor two), caps kill `1`, merges
//! multiply, splits comultiply. The resulting finite complexes of free
//! abelian groups split into `(q, z2)` sectors and are diagonalized over
//! the integers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cobordism::{CyclePlan, Mask};
use crate::complex::TLComplex;
use crate::error::Error;
use crate::laurent::{HalfExp, LaurentPoly};
use crate::skein::BraidWord;
use crate::tl_diagram::TLDiagram;
use crate::Result;

/// One bigraded homology group: free rank and torsion prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyRow {
    pub h: HalfExp,
    pub q: HalfExp,
    pub z2: HalfExp,
    pub betti: usize,
    pub torsion: Vec<i64>,
}

/// Homology of a closed complex, one row per nonzero group,
/// sorted by `(h, q, z2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyTable {
    pub rows: Vec<HomologyRow>,
}

impl HomologyTable {
    pub fn total_rank(&self) -> usize {
        self.rows.iter().map(|r| r.betti).sum()
    }

    /// Free rank summed over `z2` at one bidegree.
    pub fn rank_at(&self, h: HalfExp, q: HalfExp) -> usize {
        self.rows
            .iter()
            .filter(|r| r.h == h && r.q == q)
            .map(|r| r.betti)
            .sum()
    }

    /// Rows with `h` strictly above the bound.
    pub fn rows_above(&self, bound: HalfExp) -> Vec<&HomologyRow> {
        self.rows.iter().filter(|r| r.h > bound).collect()
    }

    /// Graded Euler characteristic over the free parts.
    pub fn euler(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for r in &self.rows {
            let parity = ((r.h.0 + r.z2.0) / 2).rem_euclid(2);
            let unit = if parity == 0 {
                BigInt::from(r.betti as i64)
            } else {
                BigInt::from(-(r.betti as i64))
            };
            acc += &LaurentPoly::monomial(unit, r.q);
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "h": r.h.0 / 2,
                    "q2": r.q.0,
                    "z2": r.z2.0 / 2,
                    "betti": r.betti,
                    "torsion": r.torsion,
                })
            })
            .collect();
        json!({ "rows": rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,q2,z2,betti,torsion\n");
        for r in &self.rows {
            let tor = r
                .torsion
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.h.0 / 2,
                r.q.0,
                r.z2.0 / 2,
                r.betti,
                tor
            );
        }
        out
    }
}

/// A homology row in standard knot-theoretic coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardRow {
    pub i: i64,
    pub j: i64,
    pub z2: i64,
    pub betti: usize,
    pub torsion: Vec<i64>,
}

/// Convert a table to standard `(i, j)` coordinates for a closure of
/// writhe `w`, returning the change-of-grading formula alongside.
pub fn standard_grading(table: &HomologyTable, writhe: i64) -> (String, Vec<StandardRow>) {
    let mut rows: Vec<StandardRow> = table
        .rows
        .iter()
        .map(|r| StandardRow {
            i: r.h.0 / 2,
            j: -r.q.0 / 2 + writhe,
            z2: r.z2.0 / 2,
            betti: r.betti,
            torsion: r.torsion.clone(),
        })
        .collect();
    rows.sort_by_key(|r| (r.i, r.j, r.z2));
    ("i = h, j = w - q (w = writhe)".to_string(), rows)
}

/// Connected piece of a closed cobordism: genus plus the source and
/// target closure circles on its boundary.
struct CompInfo {
    genus: usize,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

/// Closure data of one differential entry, shared by all its terms.
struct EntryClosure {
    cycle_comp: Vec<usize>,
    comps: Vec<CompInfo>,
    pow2: i64,
}

fn uf_find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl EntryClosure {
    fn new(src: &TLDiagram, tgt: &TLDiagram, plan: &CyclePlan) -> Result<Self> {
        let n = src.n_in();
        let tr_a = src.closure_trace()?;
        let tr_b = tgt.closure_trace()?;
        let total = plan.total_cycles();
        let mut parent: Vec<usize> = (0..total).collect();
        for i in 0..n {
            let a = uf_find(&mut parent, plan.point_cycle(i));
            let b = uf_find(&mut parent, plan.point_cycle(n + i));
            parent[a] = b;
        }
        let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cycle_comp = vec![0usize; total];
        for (c, slot) in cycle_comp.iter_mut().enumerate() {
            let r = uf_find(&mut parent, c);
            let next = comp_of_root.len();
            *slot = *comp_of_root.entry(r).or_insert(next);
        }
        let n_comps = comp_of_root.len();
        let mut cycles = vec![0i64; n_comps];
        for c in 0..total {
            cycles[cycle_comp[c]] += 1;
        }
        let mut bands = vec![0i64; n_comps];
        for i in 0..n {
            bands[cycle_comp[plan.point_cycle(i)]] += 1;
        }
        let mut inputs = vec![Vec::new(); n_comps];
        for s in 0..tr_a.total_circles() {
            let cycle = if s < tr_a.cycles.len() {
                let p = tr_a
                    .point_circle
                    .iter()
                    .position(|&c| c == s)
                    .expect("traced circle has a point");
                plan.point_cycle(p)
            } else {
                plan.source_circle_cycle(s - tr_a.cycles.len())
            };
            inputs[cycle_comp[cycle]].push(s);
        }
        let mut outputs = vec![Vec::new(); n_comps];
        for t in 0..tr_b.total_circles() {
            let cycle = if t < tr_b.cycles.len() {
                let p = tr_b
                    .point_circle
                    .iter()
                    .position(|&c| c == t)
                    .expect("traced circle has a point");
                plan.point_cycle(p)
            } else {
                plan.target_circle_cycle(t - tr_b.cycles.len())
            };
            outputs[cycle_comp[cycle]].push(t);
        }
        let mut comps = Vec::with_capacity(n_comps);
        let mut genus_total = 0u32;
        for k in 0..n_comps {
            let chi = cycles[k] - bands[k];
            let b = (inputs[k].len() + outputs[k].len()) as i64;
            let twice_genus = 2 - b - chi;
            if twice_genus < 0 || twice_genus % 2 != 0 {
                return Err(Error::InvalidComplex(format!(
                    "closed component with chi {} and {} boundary circles",
                    chi, b
                )));
            }
            let genus = (twice_genus / 2) as usize;
            genus_total += genus as u32;
            comps.push(CompInfo {
                genus,
                inputs: std::mem::take(&mut inputs[k]),
                outputs: std::mem::take(&mut outputs[k]),
            });
        }
        Ok(EntryClosure {
            cycle_comp,
            comps,
            pow2: 1i64 << genus_total,
        })
    }

    /// Evaluate one normal-form term on the generator `m_in` (bit = `x`).
    /// Every returned mask carries the same coefficient `pow2`.
    fn apply(&self, dotmask: Mask, m_in: Mask) -> Vec<Mask> {
        let mut dots = vec![0usize; self.comps.len()];
        for (c, &comp) in self.cycle_comp.iter().enumerate() {
            if dotmask & (1 << c) != 0 {
                dots[comp] += 1;
            }
        }
        let mut masks: Vec<Mask> = vec![0];
        for (k, comp) in self.comps.iter().enumerate() {
            let xin = comp
                .inputs
                .iter()
                .filter(|&&s| m_in & (1 << s) != 0)
                .count();
            let e = xin + dots[k] + comp.genus;
            if e >= 2 {
                return Vec::new();
            }
            if comp.outputs.is_empty() {
                if e == 0 {
                    return Vec::new();
                }
            } else if e == 1 {
                let all: Mask = comp.outputs.iter().fold(0, |a, &t| a | (1 << t));
                for m in masks.iter_mut() {
                    *m |= all;
                }
            } else {
                let all: Mask = comp.outputs.iter().fold(0, |a, &t| a | (1 << t));
                let mut next = Vec::with_capacity(masks.len() * comp.outputs.len());
                for &m in &masks {
                    for &o in &comp.outputs {
                        next.push(m | (all & !(1 << o)));
                    }
                }
                masks = next;
            }
        }
        masks
    }
}

/// Smith diagonalization: returns the rank and the elementary divisor
/// chain (absolute values, each dividing the next).
fn smith_normal_form(mut m: Vec<Vec<BigInt>>) -> (usize, Vec<BigInt>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut divisors: Vec<BigInt> = Vec::new();
    let mut t = 0;
    'outer: while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if m[i][j].abs() < m[bi][bj].abs() {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        for i in (t + 1)..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = &m[i][t] / &m[t][t];
            if !q.is_zero() {
                #[allow(clippy::needless_range_loop)]
                for j in t..cols {
                    let v = &m[t][j] * &q;
                    m[i][j] -= v;
                }
            }
            if !m[i][t].is_zero() {
                m.swap(t, i);
                continue 'outer;
            }
        }
        for j in (t + 1)..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = &m[t][j] / &m[t][t];
            if !q.is_zero() {
                for row in m.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
            }
            if !m[t][j].is_zero() {
                for row in m.iter_mut() {
                    row.swap(t, j);
                }
                continue 'outer;
            }
        }
        for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if (&m[i][j] % &m[t][t]).is_zero() {
                    continue;
                }
                #[allow(clippy::needless_range_loop)]
                for jj in t..cols {
                    let v = m[i][jj].clone();
                    m[t][jj] += v;
                }
                continue 'outer;
            }
        }
        divisors.push(m[t][t].abs());
        t += 1;
    }
    (divisors.len(), divisors)
}

fn prime_power_factors(mut d: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2i64;
    while p * p <= d {
        if d % p == 0 {
            let mut pk = 1i64;
            while d % p == 0 {
                pk *= p;
                d /= p;
            }
            out.push(pk);
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

type SectorKey = (HalfExp, HalfExp);

struct Sector {
    dims: BTreeMap<HalfExp, usize>,
    mats: BTreeMap<HalfExp, Vec<Vec<BigInt>>>,
}

/// Integral homology of the trace closure of an endomorphism complex.
/// Gradings must be integral.
pub fn integral_homology(c: &TLComplex) -> Result<HomologyTable> {
    if c.n_in() != c.n_out() {
        return Err(Error::BoundaryMismatch(
            c.n_in(),
            c.n_out(),
            c.n_out(),
            c.n_in(),
        ));
    }
    // generator bookkeeping: position of (h, object, mask) in its sector
    let mut sectors: BTreeMap<SectorKey, Sector> = BTreeMap::new();
    let mut of_gen: BTreeMap<(HalfExp, usize, Mask), (SectorKey, usize)> = BTreeMap::new();
    let mut circles_of: BTreeMap<(HalfExp, usize), usize> = BTreeMap::new();
    for (&h, objs) in c.groups() {
        for (i, o) in objs.iter().enumerate() {
            let g = o.grading;
            if g.q().0 % 2 != 0 || g.h().0 % 2 != 0 || g.z2().0 % 2 != 0 {
                return Err(Error::HalfIntegerGrading);
            }
            let tr = o.diagram.closure_trace()?;
            let circ = tr.total_circles();
            circles_of.insert((h, i), circ);
            for mask in 0..(1u64 << circ) {
                let q = HalfExp(g.q().0 + 4 * (mask.count_ones() as i64) - 2 * circ as i64);
                let z2 = HalfExp((g.z2().0 + 2 * circ as i64).rem_euclid(4));
                let sector = sectors.entry((q, z2)).or_insert_with(|| Sector {
                    dims: BTreeMap::new(),
                    mats: BTreeMap::new(),
                });
                let pos = sector.dims.entry(h).or_insert(0);
                of_gen.insert((h, i, mask), ((q, z2), *pos));
                *pos += 1;
            }
        }
    }
    for sector in sectors.values_mut() {
        let dims = sector.dims.clone();
        for (&h, &dim) in &dims {
            let cols = dims.get(&(h + HalfExp(2))).copied().unwrap_or(0);
            sector.mats.insert(h, vec![vec![BigInt::zero(); cols]; dim]);
        }
    }
    for (&h, m) in c.differentials() {
        for (&(i, j), e) in m {
            let src = &c.object(h, i).expect("entry source").diagram;
            let tgt = &c.object(h + HalfExp(2), j).expect("entry target").diagram;
            let closure = EntryClosure::new(src, tgt, e.plan())?;
            let circ = circles_of[&(h, i)];
            for m_in in 0..(1u64 << circ) {
                let (src_sector, row) = of_gen[&(h, i, m_in)];
                let mut acc: BTreeMap<Mask, i64> = BTreeMap::new();
                for (dotmask, coeff) in e.terms() {
                    for m_out in closure.apply(dotmask, m_in) {
                        *acc.entry(m_out).or_insert(0) += coeff * closure.pow2;
                    }
                }
                for (m_out, coeff) in acc {
                    if coeff == 0 {
                        continue;
                    }
                    let (tgt_sector, col) = of_gen[&(h + HalfExp(2), j, m_out)];
                    if tgt_sector != src_sector {
                        return Err(Error::InvalidComplex(
                            "closure differential is not sector-graded".into(),
                        ));
                    }
                    let mat = sectors
                        .get_mut(&src_sector)
                        .expect("sector")
                        .mats
                        .get_mut(&h)
                        .expect("matrix level");
                    mat[row][col] += BigInt::from(coeff);
                }
            }
        }
    }
    let mut rows = Vec::new();
    for (&(q, z2), sector) in &sectors {
        let mut snf: BTreeMap<HalfExp, (usize, Vec<BigInt>)> = BTreeMap::new();
        for (&h, mat) in &sector.mats {
            snf.insert(h, smith_normal_form(mat.clone()));
        }
        for (&h, &dim) in &sector.dims {
            let r_out = snf.get(&h).map(|x| x.0).unwrap_or(0);
            let incoming = snf.get(&(h - HalfExp(2)));
            let r_in = incoming.map(|x| x.0).unwrap_or(0);
            let betti = dim - r_out - r_in;
            let mut torsion = Vec::new();
            if let Some((_, divisors)) = incoming {
                for d in divisors {
                    let v = d.to_i64().expect("small divisor");
                    if v > 1 {
                        torsion.extend(prime_power_factors(v));
                    }
                }
            }
            torsion.sort_unstable();
            if betti > 0 || !torsion.is_empty() {
                rows.push(HomologyRow {
                    h,
                    q,
                    z2,
                    betti,
                    torsion,
                });
            }
        }
    }
    rows.sort_by_key(|r| (r.h, r.q, r.z2));
    Ok(HomologyTable { rows })
}

/// Euler characteristic of the closed complex computed on the skein
/// level: the closure value of `K0`.
pub fn closed_euler(c: &TLComplex) -> Result<LaurentPoly> {
    c.k0()?.closure_value()
}

/// One comparison step of the stability scan.
#[derive(Debug, Clone)]
pub struct StabilizationStep {
    pub m: usize,
    /// Agreement is required strictly above this `h`.
    pub bound: HalfExp,
    pub agrees: bool,
    pub first_mismatch: Option<(HalfExp, HalfExp, HalfExp)>,
}

/// Homology tables of the closed twist powers, with pairwise agreement
/// above the expected stability range.
#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub n: usize,
    pub steps: Vec<StabilizationStep>,
    pub tables: Vec<(usize, HomologyTable)>,
}

pub fn stabilization_report(n: usize, m_max: usize) -> Result<StabilizationReport> {
    let mut tables = Vec::new();
    for m in 1..=(m_max + 1) {
        let x = crate::complex::special_complex(&BraidWord::torus(n, m)?)?;
        tables.push((m, integral_homology(&x)?));
    }
    let mut steps = Vec::new();
    for m in 1..=m_max {
        let bound = HalfExp(-4 * (m as i64) * (n as i64 - 1));
        let a = &tables[m - 1].1;
        let b = &tables[m].1;
        let ra = a.rows_above(bound);
        let rb = b.rows_above(bound);
        let mut first_mismatch = None;
        let mut agrees = ra.len() == rb.len();
        if agrees {
            for (x, y) in ra.iter().zip(rb.iter()) {
                if x != y {
                    agrees = false;
                    first_mismatch = Some((x.h, x.q, x.z2));
                    break;
                }
            }
        } else {
            let key = ra
                .iter()
                .zip(rb.iter())
                .find(|(x, y)| x != y)
                .map(|(x, _)| (x.h, x.q, x.z2))
                .or_else(|| ra.first().map(|r| (r.h, r.q, r.z2)))
                .or_else(|| rb.first().map(|r| (r.h, r.q, r.z2)));
            first_mismatch = key;
        }
        steps.push(StabilizationStep {
            m,
            bound,
            agrees,
            first_mismatch,
        });
    }
    Ok(StabilizationReport { n, steps, tables })
}
