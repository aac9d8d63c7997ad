//! Acceptance gate: the quantitative claims the library is built around.
//! Runs without the test harness so every criterion prints its own
//! PASS/FAIL line; the process exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use skeinkit::complex::{braid_complex_s, cone, special_complex, tower_map, Grading, TLComplex};
use skeinkit::homology::{closed_euler, integral_homology, stabilization_report};
use skeinkit::laurent::QOrder;
use skeinkit::skein::{bracket, convergence_order, jones_wenzl, TLElement};
use skeinkit::{BraidWord, HalfExp, LaurentPoly, RationalQ, TLDiagram};

struct Criterion {
    name: &'static str,
    limit: Duration,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str, limit: Duration) -> Self {
        Criterion {
            name,
            limit,
            started: Instant::now(),
        }
    }

    fn finish(self, detail: &str) {
        let dt = self.started.elapsed();
        let timely = dt <= self.limit;
        let status = if timely { "PASS" } else { "FAIL" };
        println!("{}: {} - {} [{:.2?}]", self.name, status, detail, dt);
        if !timely {
            panic!("{}", REPORTED);
        }
    }

    fn fail(self, detail: &str) -> ! {
        println!("{}: FAIL - {}", self.name, detail);
        panic!("{}", REPORTED);
    }
}

const REPORTED: &str = "criterion already reported";

fn run(name: &'static str, limit: Duration, body: fn(Criterion)) -> bool {
    match std::panic::catch_unwind(|| body(Criterion::start(name, limit))) {
        Ok(()) => true,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(|s| s.as_str())
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("panicked");
            if msg != REPORTED {
                println!("{}: FAIL - {}", name, msg);
            }
            false
        }
    }
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let mut ok = true;
    ok &= run("A1", Duration::from_secs(10), a1_convergence_order);
    ok &= run("A2", Duration::from_secs(30), a2_jones_wenzl_axioms);
    ok &= run("A3", Duration::from_secs(120), a3_special_complex_shape);
    ok &= run("A4", Duration::from_secs(300), a4_k0_matches_bracket);
    ok &= run("A5", Duration::from_secs(300), a5_cone_order);
    ok &= run(
        "A6",
        Duration::from_secs(120),
        a6_cap_annihilation_and_slide,
    );
    ok &= run("A7", Duration::from_secs(300), a7_stabilization_and_oracles);
    ok &= run("A8", Duration::from_secs(300), a8_structural_invariants);
    let _ = std::panic::take_hook();
    if !ok {
        std::process::exit(1);
    }
}

fn q(full: i64) -> LaurentPoly {
    LaurentPoly::q_pow(HalfExp::from_int(full))
}

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

fn random_negative_word(rng: &mut SplitMix64, max_strands: usize, max_len: usize) -> BraidWord {
    let n = 2 + rng.below(max_strands as u64 - 1) as usize;
    let len = 1 + rng.below(max_len as u64) as usize;
    let letters: Vec<i64> = (0..len)
        .map(|_| -(1 + rng.below(n as u64 - 1) as i64))
        .collect();
    BraidWord::new(n, letters).unwrap()
}

fn a1_convergence_order(c: Criterion) {
    for (n, m) in [(2usize, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let bound = HalfExp::from_int((2 * m * n + 1) as i64);
        match convergence_order(n, m).unwrap() {
            QOrder::Finite(ord) if ord < bound => {
                c.fail(&format!("order({},{}) = {} < bound {}", n, m, ord, bound))
            }
            _ => {}
        }
    }
    if convergence_order(2, 1).unwrap() != QOrder::Finite(HalfExp::from_int(5)) {
        c.fail("order(2,1) is not exactly 5");
    }
    // the difference at (2,1) lives on [U1] and starts q^5 - q^7
    let p = jones_wenzl(2).unwrap();
    let a = skeinkit::skein::approximant(2, 1)
        .unwrap()
        .map_coeffs(|c| RationalQ::from_laurent(c.clone()));
    let diff = p.sub(&a).unwrap();
    let id2 = TLDiagram::identity(2);
    let u1 = TLDiagram::u(2, 1).unwrap();
    if !diff.coeff(&id2).is_zero() {
        c.fail("difference has an [id] component");
    }
    let head = RationalQ::from_laurent(&q(5) - &q(7));
    let rest = diff.coeff(&u1).sub(&head);
    match rest.q_order() {
        QOrder::Finite(o) if o < HalfExp::from_int(9) => c.fail(&format!(
            "difference does not start q^5 - q^7 (next at {})",
            o
        )),
        _ => {}
    }
    c.finish("orders meet 2mn+1 on all five pairs; (2,1) exact at 5 with q^5 - q^7 head");
}

fn a2_jones_wenzl_axioms(c: Criterion) {
    for n in 1..=4usize {
        let p = jones_wenzl(n).unwrap();
        if !p.compose(&p).unwrap().sub(&p).unwrap().is_zero() {
            c.fail(&format!("p{} not idempotent", n));
        }
        if p.coeff(&TLDiagram::identity(n)) != RationalQ::one() {
            c.fail(&format!("p{} identity coefficient is not 1", n));
        }
        if !p.mirror().unwrap().sub(&p).unwrap().is_zero() {
            c.fail(&format!("p{} not mirror symmetric", n));
        }
        for i in 1..n {
            let cap = TLElement::from_diagram(&TLDiagram::cap(n, i).unwrap());
            if !p.compose(&cap).unwrap().is_zero() {
                c.fail(&format!("cap_{} p{} != 0", i, n));
            }
            let cup = TLElement::from_diagram(&TLDiagram::cup(n, i).unwrap());
            if !cup.compose(&p).unwrap().is_zero() {
                c.fail(&format!("p{} cup_{} != 0", n, i));
            }
        }
    }
    c.finish("idempotent, turnback-killing, unit head, mirror symmetric for n = 1..4");
}

fn a3_special_complex_shape(c: Criterion) {
    for (n, m) in [(2usize, 1usize), (2, 2), (2, 3), (3, 1)] {
        let s = special_complex(&BraidWord::torus(n, m).unwrap()).unwrap();
        let Some((head, tail)) = s.split_identity_head() else {
            c.fail(&format!("({},{}) has no unique identity head", n, m))
        };
        if head != Grading::zero() {
            c.fail(&format!("({},{}) head not at shift zero: {}", n, m, head));
        }
        let shifted = tail.shift(Grading::new(HalfExp(-2), HalfExp(2), HalfExp(0)));
        if !shifted.is_one_dropped() {
            c.fail(&format!("({},{}) tail is not one-dropped", n, m));
        }
        if !shifted.is_angle_shaped() {
            c.fail(&format!("({},{}) tail is not angle-shaped", n, m));
        }
    }
    c.finish("unique [id] head at h=0 and {-1,+1,0}-shifted tail predicates on all four twists");
}

fn a4_k0_matches_bracket(c: Criterion) {
    let mut rng = SplitMix64(0xa4);
    for k in 0..50 {
        let w = random_negative_word(&mut rng, 3, 8);
        let reduced = braid_complex_s(&w).unwrap().gaussian_reduce();
        let scale = LaurentPoly::q_pow(HalfExp(w.letters().len() as i64));
        let expect = bracket(&w).unwrap().scale(&scale);
        if !reduced.k0().unwrap().sub(&expect).unwrap().is_zero() {
            c.fail(&format!(
                "word {} of 50 ({}): K0 != q^(c/2) bracket",
                k + 1,
                w
            ));
        }
    }
    c.finish("K0 of the reduced complex equals q^(c/2) bracket on 50 random negative words");
}

fn a5_cone_order(c: Criterion) {
    for (n, m) in [(2usize, 0usize), (2, 1), (2, 2), (3, 0), (3, 1)] {
        let bound = HalfExp::from_int((2 * m * (n - 1) + 1) as i64);
        let f = tower_map(n, m).unwrap();
        let cn = cone(&f).unwrap();
        match cn.hom_order_reduced() {
            Some(ord) if ord < bound => c.fail(&format!(
                "cone order({},{}) = {} < bound {}",
                n, m, ord, bound
            )),
            _ => {}
        }
    }
    c.finish("cone of the tower map clears 2m(n-1)+1 on all five pairs");
}

fn a6_cap_annihilation_and_slide(c: Criterion) {
    for n in [2usize, 3] {
        for m in [1usize, 2] {
            let w = BraidWord::torus(n, m).unwrap();
            let x = special_complex(&w).unwrap();
            let bound = HalfExp::from_int((2 * m * (n - 1)) as i64);
            for i in 1..n {
                let cap = TLComplex::from_diagram(TLDiagram::cap(n, i).unwrap());
                let capped = x.compose(&cap).unwrap();
                match capped.hom_order_reduced() {
                    Some(ord) if ord < bound => c.fail(&format!(
                        "cap_{} on ({},{}): order {} < bound {}",
                        i, n, m, ord, bound
                    )),
                    _ => {}
                }
                // bracket-level slide: cap_i B_s(D_{m,n}) = q^{2mn} B_s(D_{m,n-2}) cap_i
                let cap_elt = TLElement::from_diagram(&TLDiagram::cap(n, i).unwrap());
                let bs = |v: &BraidWord| -> TLElement<LaurentPoly> {
                    let scale = LaurentPoly::q_pow(HalfExp(v.letters().len() as i64));
                    bracket(v).unwrap().scale(&scale)
                };
                let lhs = bs(&w).compose(&cap_elt).unwrap();
                let inner = if n >= 3 {
                    bs(&BraidWord::torus(n - 2, m).unwrap())
                } else {
                    TLElement::identity(0)
                };
                let rhs = cap_elt
                    .compose(&inner)
                    .unwrap()
                    .scale(&q(2 * (m * n) as i64));
                if !lhs.sub(&rhs).unwrap().is_zero() {
                    c.fail(&format!(
                        "slide identity fails at cap_{} on ({},{})",
                        i, n, m
                    ));
                }
            }
        }
    }
    c.finish("cap orders clear 2m(n-1) and the q^{2mn} slide identity is exact");
}

fn a7_stabilization_and_oracles(c: Criterion) {
    let rep = stabilization_report(2, 3).unwrap();
    for s in &rep.steps {
        if !s.agrees {
            c.fail(&format!(
                "tables for m = {} and {} disagree above h = {} at {:?}",
                s.m,
                s.m + 1,
                s.bound,
                s.first_mismatch
            ));
        }
    }
    let unknot = integral_homology(&TLComplex::identity_complex(1)).unwrap();
    let ok = unknot.total_rank() == 2
        && unknot.rank_at(HalfExp(0), HalfExp(-2)) == 1
        && unknot.rank_at(HalfExp(0), HalfExp(2)) == 1;
    if !ok {
        c.fail("unknot table is not rank 1 at (0, -1) and (0, +1)");
    }
    let hopf =
        integral_homology(&special_complex(&BraidWord::torus(2, 1).unwrap()).unwrap()).unwrap();
    if hopf.total_rank() != 4 {
        c.fail(&format!("Hopf total rank {} != 4", hopf.total_rank()));
    }
    c.finish("twist towers stable above -2m for m = 1..3; unknot and Hopf ranks exact");
}

fn a8_structural_invariants(c: Criterion) {
    // representative complexes from the other criteria
    let mut endo: Vec<(String, TLComplex)> = Vec::new();
    for (n, m) in [(2usize, 1usize), (2, 2), (2, 3), (3, 1)] {
        let w = BraidWord::torus(n, m).unwrap();
        endo.push((
            format!("special({},{})", n, m),
            special_complex(&w).unwrap(),
        ));
    }
    let mut rng = SplitMix64(0xa8);
    for _ in 0..5 {
        let w = random_negative_word(&mut rng, 3, 6);
        endo.push((
            format!("reduced({})", w),
            braid_complex_s(&w).unwrap().gaussian_reduce(),
        ));
    }
    let mut all: Vec<(String, TLComplex)> = endo.clone();
    for (n, m) in [(2usize, 1usize), (3, 1)] {
        all.push((
            format!("cone({},{})", n, m),
            cone(&tower_map(n, m).unwrap()).unwrap(),
        ));
        let x = special_complex(&BraidWord::torus(n, m).unwrap()).unwrap();
        let cap = TLComplex::from_diagram(TLDiagram::cap(n, 1).unwrap());
        all.push((format!("capped({},{})", n, m), x.compose(&cap).unwrap()));
    }
    // d^2 = 0, q-preservation and the z2 parity rule all live in validate()
    for (name, cx) in &all {
        if let Err(e) = cx.validate() {
            c.fail(&format!("{}: {}", name, e));
        }
    }
    // Euler characteristic equals the closed bracket, and homology is
    // invariant under reduction, for the endomorphism complexes
    for (name, cx) in &endo {
        let table = integral_homology(cx).unwrap();
        if table.euler() != closed_euler(cx).unwrap() {
            c.fail(&format!("{}: Euler != closed bracket", name));
        }
        let again = integral_homology(&cx.gaussian_reduce()).unwrap();
        if table != again {
            c.fail(&format!("{}: homology changed under reduction", name));
        }
    }
    c.finish(
        "validate, Euler = closed bracket and reduction-invariance on all generated complexes",
    );
}
