//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use newton_lab::hasse::{hasse_report, minimal_monomial};
use newton_lab::polygons::{
    analyze_arithmetic_polygon, arithmetic_polygon, hodge_gap, hodge_polygon, lies_on_or_above,
    IntervalShape, LowerPolygon, RationalValue,
};
use newton_lab_cli::campaign::CrosscheckOutcome;
use newton_lab_cli::{
    run_crosscheck, run_verify, ConfigOverrides, ExperimentConfig, VerifyOutcome,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn r(n: i64, d: i64) -> RationalValue {
    RationalValue::new(n, d)
}

fn shape(d: u32, e: u32) -> IntervalShape {
    IntervalShape::new(d, e).unwrap()
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Direct evaluation of the arithmetic polygon: minimum over admissible
/// `(m, n)` of the two p-unit sums, each term found by search.
fn direct_arithmetic(p: i64, d: i64, e: i64) -> Vec<RationalValue> {
    fn ceil_by_search(a: i64, b: i64) -> i64 {
        let mut c = -(a.abs() + b) / b - 2;
        while c * b < a {
            c += 1;
        }
        c
    }
    let unit = |deg: i64, n: i64| -> i64 { (1..=n).map(|i| ceil_by_search(p * i - n, deg)).sum() };
    let mut out = vec![r(0, 1)];
    for k in 1..d + e {
        let mut best: Option<i64> = None;
        for m in 0..e {
            for n in 0..d {
                if m + n + 1 == k && n * e <= (m + 1) * d && m * d <= (n + 1) * e {
                    let v = unit(e, m) + unit(d, n);
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        out.push(r(best.unwrap(), p - 1));
    }
    out.push(r(d + e, 2));
    out
}

/// Hodge polygon from its slopes `i/d` (`0 <= i < d`) and `j/e` (`1 <= j <= e`).
fn direct_hodge(d: i64, e: i64) -> Vec<RationalValue> {
    let mut slopes: Vec<RationalValue> = (0..d)
        .map(|i| r(i, d))
        .chain((1..=e).map(|j| r(j, e)))
        .collect();
    slopes.sort();
    let mut out = vec![r(0, 1)];
    for s in slopes {
        let last = out.last().unwrap().clone();
        out.push(last + s);
    }
    out
}

fn polygon(points: &[(i64, i64)]) -> Vec<RationalValue> {
    points.iter().map(|&(n, d)| r(n, d)).collect()
}

fn grid() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for p in (5..=101).filter(|&p| is_prime(p)) {
        for d in 2..=6u32 {
            for e in 1..d {
                let s = shape(d, e);
                if !s.big_d().is_multiple_of(p) && p > 3 * s.big_d() {
                    out.push((p, d, e));
                }
            }
        }
    }
    out
}

fn config(p: u64, d: u32, e: u32, mode: &str, count: usize, seed: u64) -> ExperimentConfig {
    ConfigOverrides {
        p: Some(p),
        d: Some(d),
        e: Some(e),
        mode: Some(mode.into()),
        count: (mode == "sample").then_some(count),
        seed: (mode == "sample").then_some(seed),
        ..Default::default()
    }
    .resolve()
    .unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!("{:.1}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs())
}

fn arithmetic_polygon_correctness() -> Outcome {
    let a7 = arithmetic_polygon(7, &shape(2, 1)).unwrap();
    let a11 = arithmetic_polygon(11, &shape(3, 1)).unwrap();
    let expect7 = polygon(&[(0, 1), (0, 1), (1, 2), (3, 2)]);
    let expect11 = polygon(&[(0, 1), (0, 1), (2, 5), (1, 1), (2, 1)]);
    let direct_ok =
        direct_arithmetic(7, 2, 1) == expect7 && direct_arithmetic(11, 3, 1) == expect11;
    let lib_ok = a7.ordinates() == expect7.as_slice() && a11.ordinates() == expect11.as_slice();
    let hodge_ok = a7 == hodge_polygon(&shape(2, 1))
        && a11.ordinate(2) > hodge_polygon(&shape(3, 1)).ordinate(2)
        && *hodge_polygon(&shape(3, 1)).ordinate(2) == r(1, 3);
    Outcome {
        pass: direct_ok && lib_ok && hodge_ok,
        detail: format!("(7,2,1): {a7}; (11,3,1): {a11}; direct oracle agrees: {direct_ok}; Hodge relation: {hodge_ok}"),
    }
}

fn convexity_suite() -> Outcome {
    let start = Instant::now();
    let grid = grid();
    let mut bad = Vec::new();
    for &(p, d, e) in &grid {
        let a = analyze_arithmetic_polygon(p, &shape(d, e)).unwrap();
        let direct = direct_arithmetic(p as i64, d as i64, e as i64);
        if !a.all_hold() || a.polygon.ordinates() != direct.as_slice() {
            bad.push((p, d, e));
        }
    }
    let limit = Duration::from_secs(10);
    let elapsed = start.elapsed();
    Outcome {
        pass: bad.is_empty() && elapsed < limit,
        detail: format!(
            "{} shapes, violations {:?}, {}",
            grid.len(),
            bad,
            within(elapsed, limit)
        ),
    }
}

fn hasse_suite() -> Outcome {
    let start = Instant::now();
    let grid = grid();
    let mut bad = Vec::new();
    let mut components = 0usize;
    for &(p, d, e) in &grid {
        let s = shape(d, e);
        let report = match hasse_report(p, &s) {
            Ok(r) => r,
            Err(err) => {
                bad.push(format!("({p},{d},{e}): {err}"));
                continue;
            }
        };
        for c in &report.components {
            components += 1;
            if c.polynomial.is_zero() {
                bad.push(format!("({p},{d},{e}) k={}: H_k = 0", c.k));
            }
            if c.units.iter().any(|&u| u % p == 0) {
                bad.push(format!("({p},{d},{e}) k={}: u_tau = 0", c.k));
            }
            match minimal_monomial(p, &s, c.k) {
                Ok(m) if m.multiplicity == 1 => {}
                Ok(m) => bad.push(format!(
                    "({p},{d},{e}) k={}: multiplicity {}",
                    c.k, m.multiplicity
                )),
                Err(err) => bad.push(format!("({p},{d},{e}) k={}: {err}", c.k)),
            }
        }
    }
    let limit = Duration::from_secs(60);
    let elapsed = start.elapsed();
    Outcome {
        pass: bad.is_empty() && elapsed < limit,
        detail: format!(
            "{} shapes, {components} components, violations {:?}, {}",
            grid.len(),
            bad.iter().take(5).collect::<Vec<_>>(),
            within(elapsed, limit)
        ),
    }
}

fn main_theorem(runs: &[(&str, &VerifyOutcome)], elapsed: Duration) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let a = &run.report.aggregates;
        let cx = run.report.counterexamples.len();
        pass &= cx == 0;
        parts.push(format!(
            "{name}: {} instances, H!=0 {}, H=0 {}, NP=arith {}, counterexamples {cx}",
            a.instances, a.hasse_nonzero, a.hasse_zero, a.np_equals_arithmetic
        ));
    }
    let (_, small) = runs[0];
    let (_, big) = runs[1];
    pass &= small.report.aggregates.instances == 252 && big.report.aggregates.instances == 12_100;
    pass &= big.report.aggregates.hasse_zero > 0 && big.report.aggregates.hasse_nonzero > 0;
    let limit = Duration::from_secs(30 * 60);
    pass &= elapsed < limit;
    parts.push(within(elapsed, limit));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn hodge_bound(verifies: &[&VerifyOutcome], crosschecks: &[&CrosscheckOutcome]) -> Outcome {
    let mut polygons = 0usize;
    let mut failures = 0usize;
    for v in verifies {
        polygons += v.report.aggregates.instances;
        failures += v.report.aggregates.hodge_bound_failures;
    }
    for c in crosschecks {
        let s = shape(
            c.report.config["d"].as_u64().unwrap() as u32,
            c.report.config["e"].as_u64().unwrap() as u32,
        );
        let hodge = hodge_polygon(&s);
        for rec in &c.report.instances {
            polygons += 1;
            let np = LowerPolygon::from_ordinates(
                rec.oracle_np.iter().map(|x| parse_rational(x)).collect(),
            )
            .unwrap();
            let ok = np.end_point() == hodge.end_point() && lies_on_or_above(&np, &hodge).unwrap();
            failures += usize::from(!ok);
        }
    }
    Outcome {
        pass: failures == 0 && polygons > 0,
        detail: format!("{polygons} computed polygons, {failures} violations"),
    }
}

fn parse_rational(s: &str) -> RationalValue {
    match s.split_once('/') {
        Some((n, d)) => r(n.parse().unwrap(), d.parse().unwrap()),
        None => r(s.parse().unwrap(), 1),
    }
}

fn stickelberger(run: &VerifyOutcome, elapsed: Duration) -> Outcome {
    let a = &run.report.aggregates;
    let hodge: Vec<String> = hodge_polygon(&shape(3, 2))
        .ordinates()
        .iter()
        .map(ToString::to_string)
        .collect();
    let all_hodge = run.report.instances.iter().all(|i| i.np == hodge);
    let limit = Duration::from_secs(5 * 60);
    Outcome {
        pass: a.instances == 200
            && a.stickelberger_checked == 200
            && a.stickelberger_failures == 0
            && all_hodge
            && elapsed < limit,
        detail: format!(
            "(7,3,2): {} instances, NP = Hodge in {}, {}",
            a.instances,
            a.stickelberger_checked - a.stickelberger_failures,
            within(elapsed, limit)
        ),
    }
}

fn line_regression(runs: &[(&str, &VerifyOutcome)], elapsed: Duration) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let a = &run.report.aggregates;
        pass &= a.instances == 100 && a.np_equals_arithmetic > 0 && a.below_arithmetic == 0;
        parts.push(format!(
            "{name}: {} instances, NP = line polygon {}, below {}",
            a.instances, a.np_equals_arithmetic, a.below_arithmetic
        ));
    }
    let limit = Duration::from_secs(5 * 60);
    pass &= elapsed < limit;
    parts.push(within(elapsed, limit));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn dwork_crosscheck(runs: &[(&str, &CrosscheckOutcome)], elapsed: Duration) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, run) in runs {
        let a = &run.report.aggregates;
        let n = a.instances;
        pass &= n == 50
            && a.identical == n
            && a.coefficients_match == n
            && a.stable == n
            && a.leading_terms_clean == n
            && a.floors_clean == n
            && a.row_floors_clean == n;
        parts.push(format!(
            "{name}: identical {}/{n}, stable {}/{n}, leading terms clean {}/{n}, floors clean {}/{n}",
            a.identical, a.stable, a.leading_terms_clean, a.floors_clean
        ));
    }
    let limit = Duration::from_secs(10 * 60);
    pass &= elapsed < limit;
    parts.push(within(elapsed, limit));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn convergence_proxy() -> Outcome {
    let s = shape(3, 1);
    let mut bad = Vec::new();
    let primes: Vec<u64> = (11..=97).filter(|&p| is_prime(p) && p != 3).collect();
    for &p in &primes {
        let gap = hodge_gap(p, &s).unwrap();
        let direct = direct_arithmetic(p as i64, 3, 1)
            .into_iter()
            .zip(direct_hodge(3, 1))
            .map(|(a, h)| a - h)
            .max()
            .unwrap();
        let ok = gap == direct && gap <= r(16, p as i64 - 1) && (p % 3 != 1 || gap == r(0, 1));
        if !ok {
            bad.push(p);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{} primes, violations {:?}", primes.len(), bad),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in ["first", "second"] {
        let mut c = config(11, 3, 1, "sample", 100, 7);
        c.out = Some(dir.path().join(run));
        run_verify(&c).unwrap();
        bytes.push(std::fs::read(dir.path().join(run).join("report.json")).unwrap());
    }
    let same = bytes[0] == bytes[1];
    Outcome {
        pass: same && !bytes[0].is_empty(),
        detail: format!("report.json {} bytes, identical: {same}", bytes[0].len()),
    }
}

fn main() -> ExitCode {
    let mut lines: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        lines.push((name, o));
    };
    report(
        "arithmetic polygon correctness",
        arithmetic_polygon_correctness(),
    );
    report("convexity suite", convexity_suite());
    report("hasse polynomial suite", hasse_suite());

    let start = Instant::now();
    let main7 = run_verify(&config(7, 2, 1, "exhaustive", 0, 0)).unwrap();
    let main11 = run_verify(&config(11, 3, 1, "exhaustive", 0, 0)).unwrap();
    report(
        "main theorem exhaustive",
        main_theorem(
            &[("(7,2,1)", &main7), ("(11,3,1)", &main11)],
            start.elapsed(),
        ),
    );

    let start = Instant::now();
    let stick = run_verify(&config(7, 3, 2, "sample", 200, 1)).unwrap();
    let stick_time = start.elapsed();

    let start = Instant::now();
    let line7 = run_verify(&config(7, 2, 0, "sample", 100, 1)).unwrap();
    let line11 = run_verify(&config(11, 3, 0, "sample", 100, 1)).unwrap();
    let line_time = start.elapsed();

    let start = Instant::now();
    let cross7 = run_crosscheck(&config(7, 2, 1, "sample", 50, 1)).unwrap();
    let cross11 = run_crosscheck(&config(11, 3, 1, "sample", 50, 1)).unwrap();
    let cross_time = start.elapsed();

    report(
        "hodge bound",
        hodge_bound(
            &[&main7, &main11, &stick, &line7, &line11],
            &[&cross7, &cross11],
        ),
    );
    report("stickelberger", stickelberger(&stick, stick_time));
    report(
        "e = 0 regression",
        line_regression(&[("(7,2)", &line7), ("(11,3)", &line11)], line_time),
    );
    report(
        "dwork/oracle cross-validation",
        dwork_crosscheck(&[("(7,2,1)", &cross7), ("(11,3,1)", &cross11)], cross_time),
    );
    report("convergence proxy", convergence_proxy());
    report("determinism", determinism());

    let failed = lines.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        lines.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
