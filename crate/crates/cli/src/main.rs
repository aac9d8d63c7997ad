use std::fmt::Write as _;
use std::process;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use skeinkit::complex::{braid_complex_s, cone, special_complex, TLComplex};
use skeinkit::homology::{
    integral_homology, stabilization_report, standard_grading, HomologyTable,
};
use skeinkit::laurent::QOrder;
use skeinkit::skein::{approximant, bracket, convergence_order, jones_wenzl, jw_series, TLElement};
use skeinkit::suites::{run_suite, Suite};
use skeinkit::{BraidWord, Coefficient, Error, HalfExp, LaurentPoly, RationalQ, TLDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "skeinkit",
    version,
    about = "Exact Temperley-Lieb skein computations and their categorified towers"
)]
struct Cli {
    /// Output format; kh defaults to json, everything else to text
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Series truncation order in half-units of q
    #[arg(
        long,
        global = true,
        env = "SKEINKIT_ORDER",
        default_value_t = 16,
        allow_negative_numbers = true
    )]
    order: i64,

    /// Reduction strategy (only "eager" is implemented)
    #[arg(long, global = true, default_value = "eager")]
    strategy: String,

    /// Seed for randomized check suites
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jones-Wenzl projector on n strands, exact or as a series
    Jw {
        #[arg(long)]
        n: usize,
        /// Print the series expansion through the truncation order
        #[arg(long)]
        series: bool,
    },
    /// Kauffman bracket of a braid word in the Temperley-Lieb algebra
    Bracket {
        #[arg(long)]
        n: usize,
        /// Whitespace- or comma-separated letters, e.g. "-1 -2 -1"
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Convergence order of the m-th torus approximant against 2mn+1
    Approx {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Bar-Natan complex of a braid word, raw or reduced
    Complex {
        /// Full word syntax "n: l1 l2 ...", e.g. "2: -1 -1"
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// Gaussian-reduce the complex
        #[arg(long)]
        reduce: bool,
        /// Build the reduced special form (all-negative words only)
        #[arg(long)]
        special: bool,
    },
    /// Homotopy order of the cone over the twist tower map, against 2m(n-1)+1
    ConeOrder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Integral homology of the closed twist power
    Kh {
        /// Strands and twists as "N,M"; 2,1 is the Hopf link
        #[arg(long)]
        torus: String,
        /// Convert to standard oriented (i, j) coordinates
        #[arg(long)]
        standard_grading: bool,
    },
    /// Homology tables of successive twist powers and their agreement range
    Stabilize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mmax: usize,
    },
    /// Run a named consistency suite
    Check {
        /// One of: skein, complex, homology, all
        #[arg(long)]
        suite: String,
    },
}

fn diagram_name(d: &TLDiagram) -> String {
    if d.is_identity() {
        return "id".to_string();
    }
    if d.n_in() == d.n_out() && d.circles() == 0 {
        for i in 1..d.n_in() {
            if let Ok(u) = TLDiagram::u(d.n_in(), i) {
                if *d == u {
                    return format!("U{}", i);
                }
            }
        }
    }
    d.to_string()
}

/// Laurent polynomial with terms in descending powers of q, the usual
/// convention for quantum integers like q+q^-1.
fn laurent_desc(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (i, (e, c)) in terms.iter().rev().enumerate() {
        let cs = c.to_string();
        let (neg, abs) = match cs.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, cs),
        };
        if neg {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        if *e == HalfExp::ZERO {
            let _ = write!(out, "{}", abs);
            continue;
        }
        if abs != "1" {
            let _ = write!(out, "{}*", abs);
        }
        if e.is_integral() {
            let k = e.full_units();
            if k == 1 {
                out.push('q');
            } else {
                let _ = write!(out, "q^{}", k);
            }
        } else {
            let _ = write!(out, "q^({}/2)", e.halves());
        }
    }
    out
}

/// Rational coefficient with the denominator balanced around q^0, so
/// quantum-integer denominators read q+q^-1 rather than 1+q^2.
fn rational_balanced(r: &RationalQ) -> String {
    if r.is_polynomial() {
        return laurent_desc(r.num());
    }
    let den = r.den();
    let shift = match (den.min_exp(), den.max_exp()) {
        (Some(lo), Some(hi)) => HalfExp(-(lo.0 + hi.0) / 2),
        _ => HalfExp::ZERO,
    };
    let num = r.num() * &LaurentPoly::q_pow(shift);
    let den = den * &LaurentPoly::q_pow(shift);
    let ns = laurent_desc(&num);
    let ds = laurent_desc(&den);
    let ns = if num.terms().count() > 1 {
        format!("({})", ns)
    } else {
        ns
    };
    format!("{}/({})", ns, ds)
}

/// True when the string has a top-level + or - separating terms, i.e. it
/// needs parentheses next to a diagram label.
fn is_sum(s: &str) -> bool {
    let b = s.as_bytes();
    let mut depth = 0i32;
    for i in 0..b.len() {
        match b[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && b[i - 1] != b'^' && b[i - 1] != b'*' => {
                return true
            }
            _ => {}
        }
    }
    false
}

fn ordered_terms<C: Coefficient>(e: &TLElement<C>) -> Vec<(&TLDiagram, &C)> {
    let mut terms: Vec<_> = e.terms().collect();
    terms.sort_by_key(|(d, _)| (!d.is_identity(), (*d).clone()));
    terms
}

fn element_text<C: Coefficient>(e: &TLElement<C>, render: impl Fn(&C) -> String) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (d, c) in ordered_terms(e) {
        let cs = render(c);
        if cs == "1" {
            parts.push(format!("[{}]", diagram_name(d)));
        } else if is_sum(&cs) {
            parts.push(format!("({}) [{}]", cs, diagram_name(d)));
        } else {
            parts.push(format!("{} [{}]", cs, diagram_name(d)));
        }
    }
    parts.join(" + ")
}

fn element_json<C: Coefficient>(e: &TLElement<C>) -> Value {
    let terms: Vec<Value> = ordered_terms(e)
        .into_iter()
        .map(|(d, c)| json!({"diagram": diagram_name(d), "coeff": c.to_string()}))
        .collect();
    json!({"n_in": e.n_in(), "n_out": e.n_out(), "terms": terms})
}

fn element_csv<C: Coefficient>(e: &TLElement<C>) -> String {
    let mut out = String::from("diagram,coeff\n");
    for (d, c) in ordered_terms(e) {
        let _ = writeln!(out, "{},{}", diagram_name(d), c);
    }
    out
}

fn print_element<C: Coefficient>(e: &TLElement<C>, format: Format, render: impl Fn(&C) -> String) {
    match format {
        Format::Text => println!("{}", element_text(e, render)),
        Format::Json => println!("{}", element_json(e)),
        Format::Csv => print!("{}", element_csv(e)),
    }
}

fn order_str(o: Option<HalfExp>) -> String {
    match o {
        Some(x) => x.to_string(),
        None => "inf".to_string(),
    }
}

fn table_text(t: &HomologyTable) -> String {
    let mut out = String::from("h\tq\tz2\tbetti\ttorsion\n");
    for r in &t.rows {
        let tor = if r.torsion.is_empty() {
            "-".to_string()
        } else {
            r.torsion
                .iter()
                .map(|x| format!("Z/{}", x))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.h, r.q, r.z2, r.betti, tor);
    }
    out
}

fn parse_letters(s: &str) -> Result<Vec<i64>, Error> {
    s.split([' ', ','])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad braid letter '{}'", t)))
        })
        .collect()
}

fn run(cli: Cli) -> Result<i32, Error> {
    if cli.order < 0 {
        return Err(Error::Parse("truncation order must be >= 0".into()));
    }
    if cli.strategy != "eager" {
        return Err(Error::Parse(format!(
            "unknown reduction strategy '{}'",
            cli.strategy
        )));
    }
    let default_format = match cli.cmd {
        Cmd::Kh { .. } => Format::Json,
        _ => Format::Text,
    };
    let format = cli.format.unwrap_or(default_format);

    match cli.cmd {
        Cmd::Jw { n, series } => {
            if series {
                let p = jw_series(n, HalfExp(cli.order))?;
                print_element(&p, format, |c| c.to_string());
            } else {
                let p = jones_wenzl(n)?;
                print_element(&p, format, rational_balanced);
            }
            Ok(0)
        }
        Cmd::Bracket { n, word } => {
            let w = BraidWord::new(n, parse_letters(&word)?)?;
            let b = bracket(&w)?;
            print_element(&b, format, laurent_desc);
            Ok(0)
        }
        Cmd::Approx { n, m } => {
            if n < 2 {
                return Err(Error::Parse("approx needs n >= 2".into()));
            }
            let bound = HalfExp::from_int((2 * m * n + 1) as i64);
            let ord = convergence_order(n, m)?;
            let pass = match ord {
                QOrder::Finite(x) => x >= bound,
                QOrder::Infinite => true,
            };
            match format {
                Format::Text => println!(
                    "order={} bound={} {}",
                    order_str(ord.finite()),
                    bound,
                    if pass { "PASS" } else { "FAIL" }
                ),
                Format::Json => {
                    let _ = approximant(n, m)?;
                    println!(
                        "{}",
                        json!({
                            "n": n,
                            "m": m,
                            "order_half_units": ord.finite().map(|x| x.0),
                            "bound_half_units": bound.0,
                            "pass": pass,
                        })
                    );
                }
                Format::Csv => {
                    // convergence curve for plotting: one row per twist power
                    println!("m,order,bound");
                    for mm in 1..=m.max(1) {
                        let o = convergence_order(n, mm)?;
                        println!(
                            "{},{},{}",
                            mm,
                            order_str(o.finite()),
                            HalfExp::from_int((2 * mm * n + 1) as i64)
                        );
                    }
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        Cmd::Complex {
            word,
            reduce,
            special,
        } => {
            let w = BraidWord::from_str(&word)?;
            let c: TLComplex = if special {
                special_complex(&w)?
            } else if reduce {
                braid_complex_s(&w)?.gaussian_reduce()
            } else {
                braid_complex_s(&w)?
            };
            match format {
                Format::Text => print!("{}", c),
                Format::Json => println!("{}", c.to_json()),
                Format::Csv => {
                    println!("h2,q2,z22,diagram");
                    for (&h, objs) in c.groups() {
                        for o in objs {
                            println!(
                                "{},{},{},{}",
                                h.0,
                                o.grading.q().0,
                                o.grading.z2().0,
                                o.diagram
                            );
                        }
                    }
                }
            }
            Ok(0)
        }
        Cmd::ConeOrder { n, m } => {
            if n < 2 {
                return Err(Error::Parse("cone-order needs n >= 2".into()));
            }
            let bound = HalfExp::from_int((2 * m * (n - 1) + 1) as i64);
            let f = skeinkit::complex::tower_map(n, m)?;
            let ord = cone(&f)?.hom_order_reduced();
            let pass = ord.is_none_or(|x| x >= bound);
            match format {
                Format::Text => println!(
                    "order={} bound={} {}",
                    order_str(ord),
                    bound,
                    if pass { "PASS" } else { "FAIL" }
                ),
                Format::Json => println!(
                    "{}",
                    json!({
                        "n": n,
                        "m": m,
                        "order_half_units": ord.map(|x| x.0),
                        "bound_half_units": bound.0,
                        "pass": pass,
                    })
                ),
                Format::Csv => {
                    println!("n,m,order,bound");
                    println!("{},{},{},{}", n, m, order_str(ord), bound);
                }
            }
            Ok(if pass { 0 } else { 1 })
        }
        Cmd::Kh {
            torus,
            standard_grading: std_grading,
        } => {
            let (ns, ms) = torus
                .split_once(',')
                .ok_or_else(|| Error::Parse("expected --torus N,M".into()))?;
            let n: usize = ns
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad strand count '{}'", ns)))?;
            let m: usize = ms
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad twist count '{}'", ms)))?;
            let w = BraidWord::torus(n, m)?;
            let table = integral_homology(&special_complex(&w)?)?;
            if std_grading {
                let (formula, rows) = standard_grading(&table, w.writhe());
                match format {
                    Format::Text => {
                        println!("{}", formula);
                        println!("i\tj\tz2\tbetti\ttorsion");
                        for r in &rows {
                            let tor = if r.torsion.is_empty() {
                                "-".to_string()
                            } else {
                                r.torsion
                                    .iter()
                                    .map(|x| format!("Z/{}", x))
                                    .collect::<Vec<_>>()
                                    .join(" + ")
                            };
                            println!("{}\t{}\t{}\t{}\t{}", r.i, r.j, r.z2, r.betti, tor);
                        }
                    }
                    Format::Json => {
                        let rows: Vec<Value> = rows
                            .iter()
                            .map(|r| {
                                json!({
                                    "i": r.i, "j": r.j, "z2": r.z2,
                                    "betti": r.betti, "torsion": r.torsion,
                                })
                            })
                            .collect();
                        println!("{}", json!({"formula": formula, "rows": rows}));
                    }
                    Format::Csv => {
                        println!("i,j,z2,betti,torsion");
                        for r in &rows {
                            let tor = r
                                .torsion
                                .iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(";");
                            println!("{},{},{},{},{}", r.i, r.j, r.z2, r.betti, tor);
                        }
                    }
                }
            } else {
                match format {
                    Format::Text => print!("{}", table_text(&table)),
                    Format::Json => println!("{}", table.to_json()),
                    Format::Csv => print!("{}", table.to_csv()),
                }
            }
            Ok(0)
        }
        Cmd::Stabilize { n, mmax } => {
            let rep = stabilization_report(n, mmax)?;
            match format {
                Format::Text => {
                    for s in &rep.steps {
                        println!(
                            "m={} vs m={}: agree above h={}: {}",
                            s.m,
                            s.m + 1,
                            s.bound,
                            if s.agrees { "yes" } else { "NO" }
                        );
                    }
                    if let Some((m, t)) = rep.tables.last() {
                        println!("table for m={}:", m);
                        print!("{}", table_text(t));
                    }
                }
                Format::Json => {
                    let steps: Vec<Value> = rep
                        .steps
                        .iter()
                        .map(|s| {
                            json!({
                                "m": s.m,
                                "bound_half_units": s.bound.0,
                                "agrees": s.agrees,
                            })
                        })
                        .collect();
                    let tables: Vec<Value> = rep
                        .tables
                        .iter()
                        .map(|(m, t)| json!({"m": m, "table": t.to_json()}))
                        .collect();
                    println!("{}", json!({"n": n, "steps": steps, "tables": tables}));
                }
                Format::Csv => {
                    println!("m,h,q2,z2,betti,torsion");
                    for (m, t) in &rep.tables {
                        for r in &t.rows {
                            let tor = r
                                .torsion
                                .iter()
                                .map(|x| x.to_string())
                                .collect::<Vec<_>>()
                                .join(";");
                            println!(
                                "{},{},{},{},{},{}",
                                m,
                                r.h.0 / 2,
                                r.q.0,
                                r.z2.0 / 2,
                                r.betti,
                                tor
                            );
                        }
                    }
                }
            }
            let all = rep.steps.iter().all(|s| s.agrees);
            Ok(if all { 0 } else { 1 })
        }
        Cmd::Check { suite } => {
            let suite = Suite::from_str(&suite)?;
            let report = run_suite(suite, cli.seed);
            match format {
                Format::Text => println!("{}", report),
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => {
                    println!("name,passed,detail");
                    for r in &report.results {
                        println!("{},{},{}", r.name, r.passed, r.detail.replace(',', ";"));
                    }
                }
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() {
    // die quietly when the downstream pipe closes, e.g. `skeinkit kh ... | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("skeinkit: {}", e);
            process::exit(2);
        }
    }
}
