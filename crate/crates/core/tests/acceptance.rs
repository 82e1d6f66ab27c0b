//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs under its own harness so the summary lines are printed in order and
//! unbuffered. Oracles here avoid the library's own search code: unit orders
//! come from machine-integer modular powers, ideal membership from
//! multiplying by the conjugate, and norm bounds from a tuple-based ball
//! search in `SL_2(Z/pZ)`.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sl2cert::elemgen;
use sl2cert::lemma::{self, Core};
use sl2cert::norms::{self, FiniteGroupTable, NormError};
use sl2cert::rings::{infinite_order_unit, PrincipalIdeal, RingDescriptor, RingElement};
use sl2cert::sample;
use sl2cert::sl2::Mat2;

const LEMMA_RINGS: [&str; 4] = ["Z[1/2]", "Z[1/3]", "Z[1/6]", "Z[sqrt2]"];

struct Verdict {
    passed: bool,
    detail: String,
}

fn ring(s: &str) -> RingDescriptor {
    s.parse().unwrap()
}

/// `x / c` when it lies in `R`, computed without the library's division:
/// rationals by cross-multiplication, quadratics through `x conj(c) / N(c)`.
fn quotient_in_ring(x: &RingElement, c: &RingElement) -> Option<RingElement> {
    let ring = x.ring();
    match ring {
        RingDescriptor::Quadratic { d } => {
            let (a, b) = x.as_quadratic().unwrap();
            let (e, f) = c.as_quadratic().unwrap();
            let n = e * e - BigInt::from(d) * f * f;
            let p = a * e - BigInt::from(d) * b * f;
            let q = b * e - a * f;
            if (&p % &n).is_zero() && (&q % &n).is_zero() {
                RingElement::from_quadratic(ring, p / &n, q / &n)
            } else {
                None
            }
        }
        _ => {
            let (a, b) = x.as_fraction().unwrap();
            let (e, f) = c.as_fraction().unwrap();
            // (a/b) / (e/f) = a f / (b e); in Z[1/m] when the reduced denominator is m-smooth
            let mut den = b * e;
            let mut num = a * f;
            if den.is_negative() {
                den = -den;
                num = -num;
            }
            let g = num_integer::Integer::gcd(&num, &den);
            let den = &den / &g;
            let mut rest = den.clone();
            for p in ring.inverted_primes() {
                while (&rest % p).is_zero() {
                    rest /= p;
                }
            }
            if rest.is_one() {
                RingElement::from_fraction(ring, num / &g, den)
            } else {
                None
            }
        }
    }
}

fn in_ideal(x: &RingElement, c: &RingElement) -> bool {
    x.is_zero() || quotient_in_ring(x, c).is_some()
}

/// Random `A` with nonzero (2,1) entry: `h(w) E12(s) E21(c') E12(r)`.
fn lemma_matrix(r: RingDescriptor, rng: &mut ChaCha8Rng) -> Mat2 {
    let corner_bound = if r.is_quadratic() { 3 } else { 30 };
    loop {
        let w = sample::random_unit(r, rng, 2);
        let s = sample::small_fraction(r, rng, 20, 2);
        let t = sample::small_fraction(r, rng, 20, 2);
        let c = sample::small_nonzero(r, rng, corner_bound);
        let a = &(&(&Mat2::diagonal(&w).unwrap() * &Mat2::upper(s)) * &Mat2::lower(c)) * &Mat2::upper(t);
        if a.entries().iter().all(|e| e.height() <= BigInt::from(1000)) {
            return a;
        }
    }
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let mut cases = 0;
    for name in LEMMA_RINGS {
        let r = ring(name);
        for _ in 0..100 {
            let a = lemma_matrix(r, &mut rng);
            let c = a.a21().clone();
            let u = match lemma::find_unit(&c) {
                Ok(cert) => cert.u,
                Err(e) => return fail(format!("{name}: find_unit({c}) failed: {e}")),
            };
            let z = &c * &sample::small_element(r, &mut rng, 100);
            let w = match lemma::lemma2_witness(&a, &u, &z) {
                Ok(w) => w,
                Err(e) => return fail(format!("{name}: A = {a}, z = {z}: {e}")),
            };
            // product of the four conjugates, multiplied out here
            let a_inv = a.inverse();
            let mut product = Mat2::identity(r);
            for f in &w.factors {
                let g = f.conjugator.evaluate(r).unwrap();
                let core = if f.core == Core::A { &a } else { &a_inv };
                product = &(&(&product * &g) * core) * &g.inverse();
                let one = RingElement::one(r);
                let [g11, g12, g21, g22] = g.entries();
                let trivial = [g11 - &one, g12.clone(), g21.clone(), g22 - &one].iter().all(|e| in_ideal(e, &c));
                if !trivial {
                    return fail(format!("{name}: conjugator {g} is not 1 mod ({c})"));
                }
            }
            let u4 = u.pow(4);
            let u4_inv = u.unit_inverse().unwrap().pow(4);
            let target = Mat2::upper((&u4 - &u4_inv) * &z);
            if w.factors.len() != 4 || product != target {
                return fail(format!("{name}: A = {a}: product differs from E12((u^4 - u^-4) z)"));
            }
            if !in_ideal(&w.t, &c) || !in_ideal(&w.q, &c) {
                return fail(format!("{name}: t or q outside cR for A = {a}"));
            }
            cases += 1;
        }
    }
    timed(start, Duration::from_secs(60), format!("{cases} witnesses, exact equality"))
}

/// Order of `v` modulo `c^2`, by repeated multiplication in machine integers.
fn brute_force_order(v: &RingElement, c: &RingElement) -> u64 {
    let ring = c.ring();
    match ring {
        RingDescriptor::Quadratic { d } => {
            // c^2 divides n = N(c)^2; test x - 1 in c^2 R via (x - 1) conj(c^2) = 0 mod n
            let c2 = c * c;
            let n = c2.norm().abs().to_i128().unwrap();
            let (e, f) = c2.conjugate().as_quadratic().map(|(e, f)| (e.to_i128().unwrap(), f.to_i128().unwrap())).unwrap();
            let (va, vb) = v.as_quadratic().map(|(a, b)| (a.to_i128().unwrap(), b.to_i128().unwrap())).unwrap();
            let d = d as i128;
            let (mut a, mut b) = (va.rem_euclid(n), vb.rem_euclid(n));
            for k in 1.. {
                let p = ((a - 1) * e + d * b % n * f).rem_euclid(n);
                let q = ((a - 1) * f + b * e).rem_euclid(n);
                if p == 0 && q == 0 {
                    return k;
                }
                (a, b) = ((a * va + d * b % n * vb).rem_euclid(n), (a * vb + b * va).rem_euclid(n));
            }
            unreachable!()
        }
        _ => {
            let (num, _) = c.as_fraction().unwrap();
            let mut c0 = num.abs().to_u128().unwrap();
            for p in ring.inverted_primes() {
                while c0 % p as u128 == 0 {
                    c0 /= p as u128;
                }
            }
            let modulus = c0 * c0;
            let v = v.as_fraction().unwrap().0.to_u128().unwrap() % modulus;
            let mut x = v;
            for k in 1.. {
                if x % modulus == 1 % modulus {
                    return k;
                }
                x = x * v % modulus;
            }
            unreachable!()
        }
    }
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut cases = 0;
    let anchor = lemma::find_unit(&RingElement::from_int(ring("Z[1/2]"), 3)).unwrap();
    if anchor.u.to_string() != "64" {
        return fail(format!("anchor (Z[1/2], 3) gave u = {}", anchor.u));
    }
    for name in LEMMA_RINGS {
        let r = ring(name);
        let bound = if r.is_quadratic() { 6 } else { 200 };
        for _ in 0..50 {
            let c = sample::small_non_unit(r, &mut rng, bound);
            let cert = match lemma::find_unit(&c) {
                Ok(cert) => cert,
                Err(e) => return fail(format!("{name}: c = {c}: {e}")),
            };
            let one = RingElement::one(r);
            if !in_ideal(&(&cert.u - &one), &(&c * &c)) {
                return fail(format!("{name}: c^2 does not divide u - 1 for c = {c}"));
            }
            if cert.u.pow(8).is_one() {
                return fail(format!("{name}: u^8 = 1 for c = {c}"));
            }
            let v = infinite_order_unit(r).unwrap();
            let k = brute_force_order(&v, &c);
            if cert.v != v || cert.k != k {
                return fail(format!("{name}: c = {c}: k = {} but the brute-force order is {k}", cert.k));
            }
            cases += 1;
        }
    }
    pass(format!("{cases} certificates, orders match brute force, anchor u = 64"))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut cases = 0;
    for name in ["Z", "Z[1/2]", "Z[1/3]", "Z[1/6]", "Z[sqrt2]", "Z[sqrt3]"] {
        let r = ring(name);
        for i in 0..50 {
            let u = match i {
                0 => RingElement::one(r),
                1 => RingElement::from_int(r, -1),
                _ => sample::random_unit(r, &mut rng, 6),
            };
            let d = match elemgen::h_decomposition(&u) {
                Ok(d) => d,
                Err(e) => return fail(format!("{name}: u = {u}: {e}")),
            };
            let expected = Mat2::new(u.clone(), RingElement::zero(r), RingElement::zero(r), u.unit_inverse().unwrap()).unwrap();
            if !d.word().is_elementary() || d.word().evaluate(r).unwrap() != expected {
                return fail(format!("{name}: h_decomposition({u}) does not evaluate to h(u)"));
            }
            cases += 1;
        }
    }
    pass(format!("{cases} units including +-1, exact"))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut cases = 0;
    for (name, max_exp) in [("Z", 0), ("Z[1/2]", 4)] {
        let r = ring(name);
        for _ in 0..100 {
            let a = sample::elementary_product(r, &mut rng, 8, |rng| {
                let num = BigInt::from(rng.gen_range(-5i64..=5));
                let den = BigInt::from(2).pow(rng.gen_range(0..=max_exp));
                RingElement::from_fraction(r, num, den).unwrap()
            });
            match elemgen::decompose(&a) {
                Ok(d) if d.word().is_elementary() && d.word().evaluate(r).unwrap() == a => cases += 1,
                Ok(_) => return fail(format!("{name}: decompose({a}) does not round-trip")),
                Err(e) => return fail(format!("{name}: decompose({a}): {}", e.name())),
            }
        }
    }
    pass(format!("{cases} matrices round-trip, no search exhaustion"))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = Vec::new();
    for n in [2i64, 3, 5, 7] {
        let group = FiniteGroupTable::sl2_mod(n).unwrap();
        let expected = (n * (n * n - 1)) as usize;
        if group.order() != expected {
            return fail(format!("|SL_2(Z/{n})| = {} != {expected}", group.order()));
        }
        let z = RingDescriptor::Integers;
        let transvections: Vec<_> = [1, -1]
            .into_iter()
            .flat_map(|x| [Mat2::upper(RingElement::from_int(z, x)), Mat2::lower(RingElement::from_int(z, x))])
            .map(|m| group.image(&m).unwrap())
            .collect();
        let mut sets = vec![norms::conjugation_closure(&group, &transvections)];
        for _ in 0..3 {
            let g = rng.gen_range(0..group.order());
            sets.push(norms::conjugation_closure(&group, &[g]));
        }
        for s in &sets {
            let table = norms::bfs_table(&group, s).unwrap();
            let report = norms::check_norm_axioms(&group, &table.lengths);
            if !report.all_passed() {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.axiom.label()).collect();
                return fail(format!("N = {n}: {failed:?} fail for a generating set of size {}", s.len()));
            }
        }
        checked.push(format!("N={n}:{}", group.order()));
    }
    pass(format!("four axioms exhaustive on {}", checked.join(" ")))
}

type M = [i64; 4];

fn mat_mul(x: &M, y: &M, p: i64) -> M {
    [
        (x[0] * y[0] + x[1] * y[2]).rem_euclid(p),
        (x[0] * y[1] + x[1] * y[3]).rem_euclid(p),
        (x[2] * y[0] + x[3] * y[2]).rem_euclid(p),
        (x[2] * y[1] + x[3] * y[3]).rem_euclid(p),
    ]
}

fn mat_inv(x: &M, p: i64) -> M {
    [x[3], (-x[1]).rem_euclid(p), (-x[2]).rem_euclid(p), x[0]]
}

/// Elements of norm at most 4 in `SL_2(Z/pZ)` for the conjugacy classes of `a^{+-1}`.
fn ball_of_radius_four(a: &M, p: i64) -> BTreeSet<M> {
    let all: Vec<M> = (0..p.pow(4))
        .map(|i| [i / (p * p * p), i / (p * p) % p, i / p % p, i % p])
        .filter(|m| (m[0] * m[3] - m[1] * m[2]).rem_euclid(p) == 1)
        .collect();
    let mut gens = BTreeSet::new();
    for g in &all {
        for core in [*a, mat_inv(a, p)] {
            gens.insert(mat_mul(&mat_mul(g, &core, p), &mat_inv(g, p), p));
        }
    }
    let mut ball = BTreeSet::from([[1, 0, 0, 1]]);
    for _ in 0..4 {
        let next: Vec<M> = ball.iter().flat_map(|x| gens.iter().map(move |s| mat_mul(x, s, p))).collect();
        ball.extend(next);
    }
    ball
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let r = ring("Z[1/2]");
    let a = Mat2::parse(r, "[[1,0],[3,1]]").unwrap();
    let cert = lemma::find_unit(a.a21()).unwrap();
    if cert.u.to_string() != "64" {
        return fail(format!("expected u = 64, got {}", cert.u));
    }
    let mut notes = Vec::new();
    let mut all_passed = true;
    for n in [5i64, 7, 11] {
        let ideal = PrincipalIdeal::new(RingElement::from_int(r, n)).unwrap();
        // oracle for degeneracy: (u^8 - 1) c mod n
        let generator_mod_n = ((64u128.pow(8) - 1) * 3 % n as u128) as i64;
        match norms::lemma_bound_experiment(&a, &cert, &ideal, 50, 606) {
            Ok(report) => {
                let ball = ball_of_radius_four(&[1, 0, 3 % n, 1], n);
                let oracle_ok = report.samples.iter().all(|s| {
                    let j = s.j.as_fraction().unwrap().0.mod_floor_i64(n);
                    ball.contains(&[1, j, 0, 1])
                });
                let ok = report.passed() && oracle_ok && generator_mod_n != 0;
                all_passed &= ok;
                let max = report.max_norm().flatten().map_or("-".into(), |m| m.to_string());
                notes.push(format!(
                    "N={n}: {}/{} nontrivial samples within 4 (max {max}, oracle {})",
                    report.pass_count(),
                    report.requested,
                    if oracle_ok { "agrees" } else { "DISAGREES" }
                ));
            }
            Err(NormError::DegenerateQuotient(_)) => {
                all_passed = false;
                notes.push(format!(
                    "N={n}: no nontrivial sample exists, (u^8-1)c = {generator_mod_n} mod {n}"
                ));
            }
            Err(e) => {
                all_passed = false;
                notes.push(format!("N={n}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{} [{:.1}s]", notes.join("; "), elapsed.as_secs_f64());
    Verdict { passed: all_passed && elapsed < Duration::from_secs(30), detail }
}

trait ModFloor {
    fn mod_floor_i64(&self, n: i64) -> i64;
}

impl ModFloor for BigInt {
    fn mod_floor_i64(&self, n: i64) -> i64 {
        num_integer::Integer::mod_floor(self, &BigInt::from(n)).to_i64().unwrap()
    }
}

fn run_cli(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sl2cert"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn criterion_7() -> Verdict {
    let mut commands: Vec<Vec<String>> = Vec::new();
    let push = |v: &mut Vec<Vec<String>>, args: &[&str]| v.push(args.iter().map(|s| s.to_string()).collect());
    for (name, cs) in [("Z[1/2]", ["3", "5", "-9", "21/4"]), ("Z[1/6]", ["5", "7", "25", "-11/6"]), ("Z[sqrt2]", ["3", "1+2*sqrt(2)", "5", "2+3*sqrt(2)"])] {
        for c in cs {
            push(&mut commands, &["unit", "find", "--ring", name, "--c", c]);
            let a = format!("[[1,0],[{c},1]]");
            let z = c.to_string();
            push(&mut commands, &["lemma", "witness", "--ring", name, "--A", &a, "--z", &z]);
        }
    }
    push(&mut commands, &["lemma", "witness", "--ring", "Z[1/3]", "--A", "[[2,1],[5,3]]", "--z", "-10", "--elementary-conjugators"]);
    for (name, a) in [("Z", "[[2,1],[3,2]]"), ("Z", "[[13,8],[21,13]]"), ("Z[1/2]", "[[1,3/2],[5/3,7/2]]"), ("Z[sqrt2]", "[[3,sqrt(2)],[sqrt(2),1]]"), ("Z[sqrt3]", "[[2,sqrt(3)],[sqrt(3),2]]")] {
        let name = if name == "Z[1/2]" { "Z[1/6]" } else { name };
        push(&mut commands, &["decompose", "--ring", name, "--A", a]);
    }
    for (name, u) in [("Z[1/2]", "1"), ("Z[1/2]", "-1/8"), ("Z[1/6]", "6"), ("Z[sqrt2]", "3-2*sqrt(2)"), ("Z[sqrt7]", "8+3*sqrt(7)")] {
        push(&mut commands, &["h-decompose", "--ring", name, "--u", u]);
    }
    push(&mut commands, &["--seed", "7", "norm", "lemma-bound", "--ring", "Z[1/2]", "--A", "[[1,0],[3,1]]", "--N", "11"]);
    push(&mut commands, &["--seed", "8", "norm", "lemma-bound", "--ring", "Z[1/2]", "--A", "[[1,0],[1,1]]", "--N", "7"]);
    for n in ["2", "3", "5", "7"] {
        push(&mut commands, &["norm", "axioms", "--ring", "Z", "--N", n]);
    }
    push(&mut commands, &["norm", "axioms", "--ring", "Z[sqrt2]", "--N", "1+2*sqrt(2)"]);

    let mut kinds = BTreeSet::new();
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, cert) = run_cli(&args, None);
        if code != 0 {
            return fail(format!("{args:?} exited {code}: {cert}"));
        }
        let value: serde_json::Value = serde_json::from_str(&cert).unwrap();
        kinds.insert(value["kind"].as_str().unwrap_or("?").to_string());
        let (code, out) = run_cli(&["verify", "-"], Some(&cert));
        if code != 0 {
            return fail(format!("{args:?}: verify exited {code}: {out}"));
        }
    }
    if kinds.len() != 6 {
        return fail(format!("only kinds {kinds:?} were exercised"));
    }
    pass(format!("{0}/{0} certificates re-verified via `verify`, all 6 kinds", commands.len()))
}

fn pass(detail: String) -> Verdict {
    Verdict { passed: true, detail }
}

fn fail(detail: String) -> Verdict {
    Verdict { passed: false, detail }
}

fn timed(start: Instant, limit: Duration, detail: String) -> Verdict {
    let elapsed = start.elapsed();
    Verdict { passed: elapsed < limit, detail: format!("{detail} [{:.1}s, limit {}s]", elapsed.as_secs_f64(), limit.as_secs()) }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("four-conjugate witness suite", criterion_1),
        ("find_unit suite", criterion_2),
        ("h(u) decomposition", criterion_3),
        ("decompose round-trip", criterion_4),
        ("norm axiom suite", criterion_5),
        ("4-ball bound experiment", criterion_6),
        ("certificate round-trip", criterion_7),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.passed {
            failures += 1;
        }
        println!("criterion {} {name}: {} ({})", i + 1, if v.passed { "PASS" } else { "FAIL" }, v.detail);
        let _ = std::io::stdout().flush();
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
