//! Named consistency batteries behind the `check` command.
//!
//! Each check exercises one published identity of the skein, complex or
//! homology layer and reports pass or fail with a short detail line.
//! Randomized checks draw reproducibly from the given seed.

use std::fmt;

use serde_json::{json, Value};

use crate::complex::{braid_complex_s, cone, special_complex, ChainMap, Grading, TLComplex};
use crate::error::Error;
use crate::homology::{closed_euler, integral_homology, stabilization_report};
use crate::laurent::{loop_value, quantum_int, HalfExp, LaurentPoly, RationalQ};
use crate::skein::{bracket, convergence_order, jones_wenzl, jones_wenzl_recursive, BraidWord};
use crate::tl_diagram::TLDiagram;
use crate::Result;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub suite: String,
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
            .collect();
        json!({"suite": self.suite, "passed": self.all_passed(), "results": results})
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            if r.detail.is_empty() {
                writeln!(f, "{}: {}", r.name, status)?;
            } else {
                writeln!(f, "{}: {} ({})", r.name, status, r.detail)?;
            }
        }
        write!(
            f,
            "{}: {}/{} checks passed",
            self.suite,
            self.results.iter().filter(|r| r.passed).count(),
            self.results.len()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Skein,
    Complex,
    Homology,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skein" => Ok(Suite::Skein),
            "complex" => Ok(Suite::Complex),
            "homology" => Ok(Suite::Homology),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite {:?}", other))),
        }
    }
}

/// Minimal deterministic generator for reproducible word sampling.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_word(rng: &mut SplitMix64, max_len: usize, all_negative: bool) -> BraidWord {
    let n = 2 + rng.below(2) as usize;
    let len = 1 + rng.below(max_len as u64) as usize;
    let letters: Vec<i64> = (0..len)
        .map(|_| {
            let i = 1 + rng.below(n as u64 - 1) as i64;
            if all_negative || rng.below(2) == 0 {
                -i
            } else {
                i
            }
        })
        .collect();
    BraidWord::new(n, letters).expect("generated word is valid")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::CheckFailed(msg.into()))
    }
}

fn check(name: &str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult {
            name: name.to_string(),
            passed: true,
            detail,
        },
        Err(e) => CheckResult {
            name: name.to_string(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn suite_skein(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("jw_idempotent", || {
        for n in 1..=4 {
            let p = jones_wenzl(n)?;
            ensure(
                p.compose(&p)?.sub(&p)?.is_zero(),
                format!("p{}^2 != p{}", n, n),
            )?;
        }
        Ok("n = 1..4".into())
    }));
    out.push(check("jw_kills_turnbacks", || {
        for n in 2..=4 {
            let p = jones_wenzl(n)?;
            for i in 1..n {
                let cap = TLDiagram::cap(n, i)?;
                let capped = p.compose(&crate::skein::TLElement::from_diagram(&cap))?;
                ensure(capped.is_zero(), format!("cap_{} p{} != 0", i, n))?;
                let cup = TLDiagram::cup(n, i)?;
                let cupped = crate::skein::TLElement::from_diagram(&cup).compose(&p)?;
                ensure(cupped.is_zero(), format!("p{} cup_{} != 0", n, i))?;
            }
        }
        Ok("n = 2..4, all turnbacks".into())
    }));
    out.push(check("jw_mirror_symmetric", || {
        for n in 1..=4 {
            let p = jones_wenzl(n)?;
            ensure(
                p.mirror()?.sub(&p)?.is_zero(),
                format!("mirror p{} != p{}", n, n),
            )?;
        }
        Ok("n = 1..4".into())
    }));
    out.push(check("jw_recursion_agrees", || {
        for n in 1..=4 {
            let a = jones_wenzl(n)?;
            let b = jones_wenzl_recursive(n)?;
            ensure(
                a.sub(&b)?.is_zero(),
                format!("solve vs recursion at n = {}", n),
            )?;
        }
        Ok("n = 1..4".into())
    }));
    out.push(check("jw_trace_is_quantum_integer", || {
        for n in 1..=4u32 {
            let p = jones_wenzl(n as usize)?;
            let tr = p.closure_value()?;
            let mut expect = RationalQ::from_laurent(quantum_int(n + 1));
            if n % 2 == 1 {
                expect = RationalQ::zero().sub(&expect);
            }
            ensure(
                tr.sub(&expect).is_zero(),
                format!("trace p{} != (-1)^{} [{}]", n, n, n + 1),
            )?;
        }
        Ok("n = 1..4".into())
    }));
    out.push(check("bracket_multiplicative", || {
        let mut rng = SplitMix64(seed ^ 0x736b65696e);
        for _ in 0..8 {
            let u = random_word(&mut rng, 4, false);
            let v = {
                let m = random_word(&mut rng, 4, false);
                BraidWord::new(
                    u.strands(),
                    m.letters()
                        .iter()
                        .map(|&l| {
                            let i = l.unsigned_abs().min(u.strands() as u64 - 1).max(1) as i64;
                            if l < 0 {
                                -i
                            } else {
                                i
                            }
                        })
                        .collect(),
                )?
            };
            let uv = BraidWord::new(
                u.strands(),
                u.letters().iter().chain(v.letters()).copied().collect(),
            )?;
            let lhs = bracket(&uv)?;
            let rhs = bracket(&u)?.compose(&bracket(&v)?)?;
            ensure(
                lhs.sub(&rhs)?.is_zero(),
                format!("bracket({}) factorization", uv),
            )?;
        }
        Ok("8 random word splits".into())
    }));
    out.push(check("unknot_bracket_value", || {
        let b = bracket(&BraidWord::new(2, vec![-1]).unwrap())?;
        let v = b.closure_value()?;
        let expect = &loop_value() * &-&LaurentPoly::q_pow(HalfExp(-3));
        ensure(v == expect, "kinked unknot closure".to_string())?;
        Ok("framing factor -q^{-3/2}".into())
    }));
    out.push(check("torus_order_bound_small", || {
        for (n, m) in [(2usize, 1usize), (3, 1)] {
            let bound = HalfExp::from_int((2 * m * n + 1) as i64);
            let ord = convergence_order(n, m)?
                .finite()
                .ok_or_else(|| Error::CheckFailed("exact approximant".into()))?;
            ensure(
                ord >= bound,
                format!("order({},{}) = {} < {}", n, m, ord, bound),
            )?;
        }
        Ok("(2,1), (3,1)".into())
    }));
    out
}

fn suite_complex(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("d_squared_zero_random", || {
        let mut rng = SplitMix64(seed ^ 0x636f6d70);
        let mut count = 0;
        for _ in 0..6 {
            let w = random_word(&mut rng, 5, false);
            braid_complex_s(&w)?.validate()?;
            count += 1;
        }
        Ok(format!("{} random words", count))
    }));
    out.push(check("k0_matches_bracket_random", || {
        let mut rng = SplitMix64(seed ^ 0x6b30);
        for _ in 0..6 {
            let w = random_word(&mut rng, 5, true);
            let c = braid_complex_s(&w)?.gaussian_reduce();
            c.validate()?;
            let scale = LaurentPoly::q_pow(HalfExp(w.letters().len() as i64));
            let b = bracket(&w)?.scale(&scale);
            ensure(
                c.k0()?.sub(&b)?.is_zero(),
                format!("K0 vs bracket on {}", w),
            )?;
        }
        Ok("6 random negative words".into())
    }));
    out.push(check("k0_reduction_invariant", || {
        let mut rng = SplitMix64(seed ^ 0x696e76);
        for _ in 0..5 {
            let w = random_word(&mut rng, 5, false);
            let c = braid_complex_s(&w)?;
            let k = c.k0()?;
            ensure(
                c.deloop_complex().k0()?.sub(&k)?.is_zero(),
                format!("deloop changed K0 on {}", w),
            )?;
            ensure(
                c.gaussian_reduce().k0()?.sub(&k)?.is_zero(),
                format!("reduction changed K0 on {}", w),
            )?;
        }
        Ok("5 random words".into())
    }));
    out.push(check("k0_multiplicative", || {
        let mut rng = SplitMix64(seed ^ 0x6d756c);
        for _ in 0..4 {
            let u = random_word(&mut rng, 3, true);
            let v = BraidWord::new(
                u.strands(),
                (0..(1 + rng.below(3)))
                    .map(|_| -(1 + rng.below(u.strands() as u64 - 1) as i64))
                    .collect(),
            )?;
            let a = braid_complex_s(&u)?;
            let b = braid_complex_s(&v)?;
            let lhs = a.compose_raw(&b)?.k0()?;
            let rhs = a.k0()?.compose(&b.k0()?)?;
            ensure(lhs.sub(&rhs)?.is_zero(), format!("K0({} {})", u, v))?;
        }
        Ok("4 random pairs".into())
    }));
    out.push(check("special_head_and_tail", || {
        for (n, m) in [(2usize, 1usize), (2, 2), (3, 1)] {
            let s = special_complex(&BraidWord::torus(n, m)?)?;
            s.validate()?;
            let (head, tail) = s
                .split_identity_head()
                .ok_or_else(|| Error::CheckFailed(format!("no unique head ({},{})", n, m)))?;
            ensure(head == Grading::zero(), format!("head shift ({},{})", n, m))?;
            let shifted = tail.shift(Grading::new(HalfExp(-2), HalfExp(2), HalfExp(0)));
            ensure(
                shifted.is_one_dropped(),
                format!("tail not one-dropped ({},{})", n, m),
            )?;
            ensure(
                shifted.is_angle_shaped(),
                format!("tail not angle-shaped ({},{})", n, m),
            )?;
        }
        Ok("(2,1), (2,2), (3,1)".into())
    }));
    out.push(check("twist_idempotency_witness", || {
        let s1 = special_complex(&BraidWord::torus(2, 1)?)?;
        for m in 1..=2usize {
            let xm = special_complex(&BraidWord::torus(2, m)?)?;
            let lhs = xm.compose_raw(&s1)?.gaussian_reduce();
            let rhs = special_complex(&BraidWord::torus(2, m + 1)?)?;
            let from = HalfExp(-4 * m as i64);
            let a = lhs.truncate(from);
            let b = rhs.truncate(from);
            ensure(
                a.graded_objects() == b.graded_objects(),
                format!("objects differ above h = -{} at m = {}", 2 * m + 1, m),
            )?;
            ensure(
                a.k0()?.sub(&b.k0()?)?.is_zero(),
                format!("K0 differs above h = -{} at m = {}", 2 * m + 1, m),
            )?;
        }
        Ok("m = 1, 2 on two strands".into())
    }));
    out.push(check("cone_of_identity_contractible", || {
        let s = special_complex(&BraidWord::torus(2, 1)?)?;
        let c = cone(&ChainMap::identity(&s))?;
        c.validate()?;
        ensure(
            c.gaussian_reduce().is_zero(),
            "cone(id) not contractible".to_string(),
        )?;
        Ok("two-strand twist".into())
    }));
    out.push(check("mirror_involution", || {
        let mut rng = SplitMix64(seed ^ 0x6d6972);
        for _ in 0..4 {
            let w = random_word(&mut rng, 4, false);
            let c = braid_complex_s(&w)?;
            let back = c.mirror().mirror();
            ensure(
                back.graded_objects() == c.graded_objects(),
                format!("double mirror on {}", w),
            )?;
            c.mirror().validate()?;
        }
        Ok("4 random words".into())
    }));
    out
}

fn suite_homology(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check("unknot_closure_rank", || {
        let t = integral_homology(&TLComplex::identity_complex(1))?;
        ensure(t.total_rank() == 2, format!("rank {}", t.total_rank()))?;
        ensure(
            t.rank_at(HalfExp(0), HalfExp(-2)) == 1 && t.rank_at(HalfExp(0), HalfExp(2)) == 1,
            "unknot bidegrees".to_string(),
        )?;
        Ok("rank 1 at q = -1 and q = +1".into())
    }));
    out.push(check("hopf_closure_table", || {
        let c = special_complex(&BraidWord::torus(2, 1)?)?;
        let t = integral_homology(&c)?;
        ensure(t.total_rank() == 4, format!("rank {}", t.total_rank()))?;
        ensure(
            t.rows.iter().all(|r| r.torsion.is_empty()),
            "unexpected torsion".to_string(),
        )?;
        Ok("rank 4, torsion-free".into())
    }));
    out.push(check("trefoil_torsion", || {
        let c = special_complex(&BraidWord::new(2, vec![-1, -1, -1])?)?;
        let t = integral_homology(&c)?;
        let tors: Vec<_> = t
            .rows
            .iter()
            .filter(|r| !r.torsion.is_empty())
            .map(|r| (r.h, r.q, r.torsion.clone()))
            .collect();
        ensure(
            tors == vec![(HalfExp(-4), HalfExp(8), vec![2])],
            format!("torsion rows {:?}", tors),
        )?;
        Ok("Z/2 at (h, q) = (-2, 4)".into())
    }));
    out.push(check("euler_equals_closed_bracket", || {
        let mut rng = SplitMix64(seed ^ 0x65756c65);
        for _ in 0..4 {
            let w = random_word(&mut rng, 4, true);
            let c = braid_complex_s(&w)?;
            let t = integral_homology(&c)?;
            ensure(
                t.euler() == closed_euler(&c)?,
                format!("euler vs K0 closure on {}", w),
            )?;
            let scale = LaurentPoly::q_pow(HalfExp(w.letters().len() as i64));
            let expect = &bracket(&w)?.closure_value()? * &scale;
            ensure(t.euler() == expect, format!("euler vs bracket on {}", w))?;
        }
        Ok("4 random negative words".into())
    }));
    out.push(check("homology_reduction_invariant", || {
        let mut rng = SplitMix64(seed ^ 0x686f6d);
        for _ in 0..3 {
            let w = random_word(&mut rng, 4, true);
            let a = integral_homology(&braid_complex_s(&w)?)?;
            let b = integral_homology(&braid_complex_s(&w)?.gaussian_reduce())?;
            ensure(a == b, format!("reduction changed homology on {}", w))?;
        }
        Ok("3 random negative words".into())
    }));
    out.push(check("twist_stabilization", || {
        let rep = stabilization_report(2, 2)?;
        for s in &rep.steps {
            ensure(
                s.agrees,
                format!("m = {} disagrees above h = {}", s.m, s.bound),
            )?;
        }
        Ok("two strands, m = 1..2".into())
    }));
    out
}

pub fn run_suite(suite: Suite, seed: u64) -> CheckReport {
    let (name, results) = match suite {
        Suite::Skein => ("skein", suite_skein(seed)),
        Suite::Complex => ("complex", suite_complex(seed)),
        Suite::Homology => ("homology", suite_homology(seed)),
        Suite::All => {
            let mut all = suite_skein(seed);
            all.extend(suite_complex(seed));
            all.extend(suite_homology(seed));
            ("all", all)
        }
    };
    CheckReport {
        suite: name.to_string(),
        results,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for suite in [Suite::Skein, Suite::Complex, Suite::Homology] {
            let report = run_suite(suite, 7);
            for r in &report.results {
                assert!(r.passed, "{}: {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::Complex, 42).to_json().to_string();
        let b = run_suite(Suite::Complex, 42).to_json().to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
