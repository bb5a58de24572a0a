//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use currents_core::checks::steps_to_reach;
use currents_core::dynamics::{self, escape_from_critical};
use currents_core::{
    fmt_q, q, qi, sample, Basis, ConvergenceReport, FreeAutomorphism, Letter, Rational, RationalCurrent,
    TreeLengthFunction, Word,
};
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn b(k: usize) -> Basis {
    Basis::new(k).unwrap()
}

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn corpus() -> Vec<RationalCurrent> {
    let mut rng = sample::rng(SEED);
    (0..1000).map(|_| sample::random_current(&mut rng, b(5), 3, 40)).collect()
}

/// Nonnegativity, both extension identities for every `|v| <= 4`, and the
/// level identity for `m = 1..=4`. Words off the support are covered by
/// checking that every supported word of length `2..=5` has its prefix and
/// suffix in the support: then any `v` with `(v;nu) = 0` has only zero
/// extensions, so both sums vanish too.
fn basic_identities(nu: &RationalCurrent) -> Option<String> {
    let basis = nu.basis();
    let table = nu.table(5);
    let mut level_sums = vec![Rational::zero(); 5];
    for (v, value) in table.support() {
        if !value.is_positive() {
            return Some(format!("nu={nu} v={v} nonpositive stored value"));
        }
        let n = v.len();
        if n <= 4 {
            level_sums[n] += value;
            let last = v.letters()[n - 1];
            let first = v.letters()[0];
            let right: Rational = basis
                .letters()
                .filter(|&x| x != last.inverse())
                .map(|x| table.get(&v.concat(&Word::letter(x))))
                .sum();
            let left: Rational = basis
                .letters()
                .filter(|&x| x != first.inverse())
                .map(|x| table.get(&Word::letter(x).concat(v)))
                .sum();
            if &right != value || &left != value {
                return Some(format!(
                    "nu={nu} v={v} (v;nu)={} right={} left={}",
                    fmt_q(value),
                    fmt_q(&right),
                    fmt_q(&left)
                ));
            }
        }
        if n >= 2 {
            let prefix = Word::parse(&v.to_string()[..n - 1]).unwrap();
            let suffix = Word::parse(&v.to_string()[1..]).unwrap();
            if table.get(&prefix).is_zero() || table.get(&suffix).is_zero() {
                return Some(format!("nu={nu} v={v} supported with unsupported prefix or suffix"));
            }
        }
    }
    for (m, sum) in level_sums.iter().enumerate().skip(1) {
        if sum / qi(2) != nu.length() {
            return Some(format!("nu={nu} m={m} half-sum={} length={}", fmt_q(&(sum / qi(2))), fmt_q(&nu.length())));
        }
    }
    None
}

fn criterion_1(corpus: &[RationalCurrent]) -> Outcome {
    let start = Instant::now();
    let failure = corpus.par_iter().find_map_first(basic_identities);
    let elapsed = start.elapsed();
    match failure {
        Some(f) => outcome(false, f),
        None => outcome(
            elapsed <= Duration::from_secs(60),
            format!("1000 currents, rank 5, roots <= 40, |v| <= 4, {:.1}s (limit 60s)", elapsed.as_secs_f64()),
        ),
    }
}

fn twist_identities(nu: &RationalCurrent, d: &FreeAutomorphism) -> Option<String> {
    let dnu = nu.act(d).unwrap();
    let c = |mu: &RationalCurrent, s: &str| mu.coordinate(&w(s));
    for x in ["a", "c", "d", "e"] {
        if c(&dnu, x) != c(nu, x) {
            return Some(format!("nu={nu} part 1 at {x}"));
        }
    }
    if c(&dnu, "b") != c(nu, "b") + c(nu, "a") - qi(2) * c(nu, "aB") {
        return Some(format!("nu={nu} part 2"));
    }
    if c(&dnu, "aB") != c(nu, "aBB") + c(nu, "aBA") || c(&dnu, "aB") > c(nu, "aB") {
        return Some(format!("nu={nu} part 3"));
    }
    let growth = dnu.length() - nu.length();
    if growth != c(&dnu, "b") - c(nu, "b") || growth != c(nu, "a") - qi(2) * c(nu, "aB") {
        return Some(format!("nu={nu} part 4"));
    }
    if growth.is_positive() {
        let second = dnu.act(d).unwrap().length() - dnu.length();
        if second < growth {
            return Some(format!("nu={nu} increments {} then {}", fmt_q(&growth), fmt_q(&second)));
        }
    }
    None
}

fn criterion_2(corpus: &[RationalCurrent]) -> Outcome {
    let d = FreeAutomorphism::simple_twist(b(5), Letter::generator(1), Letter::generator(2)).unwrap();
    let growing = corpus
        .iter()
        .filter(|nu| nu.act(&d).unwrap().length() > nu.length())
        .count();
    match corpus.par_iter().find_map_first(|nu| twist_identities(nu, &d)) {
        Some(f) => outcome(false, f),
        None => outcome(
            true,
            format!("four twist identities on 1000 currents; increment monotonicity on the {growing} with growth"),
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = sample::rng(SEED + 3);
    for _ in 0..1000 {
        let g = sample::random_nontrivial_word(&mut rng, b(5), 40);
        let expected = common::cyclic_reduce(&g.to_string()).len() as i64;
        let got = RationalCurrent::of_word(b(5), &g).unwrap().length();
        if got != qi(expected) {
            return outcome(false, format!("g={g} ||mu_g||={} ||g||={expected}", fmt_q(&got)));
        }
    }
    outcome(true, "1000 random words of length <= 40 over rank 5")
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut trees = vec![(
        "T_D".to_string(),
        TreeLengthFunction::simple_twist(b(5), Letter::generator(1), Letter::generator(2)).unwrap(),
    )];
    for rho in [qi(1), q(1, 2), qi(3)] {
        for theta in [qi(1), q(1, 2), qi(3)] {
            let name = format!("Delta({},{})", fmt_q(&rho), fmt_q(&theta));
            trees.push((name, TreeLengthFunction::two_edge(b(5), rho.clone(), theta).unwrap()));
        }
    }
    let mut rng = sample::rng(SEED + 4);
    let words: Vec<Word> = (0..500).map(|_| sample::random_nontrivial_word(&mut rng, b(5), 30)).collect();
    let failure = words.par_iter().find_map_first(|g| {
        trees.iter().find_map(|(name, t)| {
            let br = t.length_britton(g).unwrap();
            let lim = t.length_limit(g, 64).unwrap();
            (br != lim).then(|| format!("{name} g={g} britton={} limit={}", fmt_q(&br), fmt_q(&lim)))
        })
    });
    let elapsed = start.elapsed();
    match failure {
        Some(f) => outcome(false, f),
        None => outcome(
            elapsed <= Duration::from_secs(120),
            format!("500 words x 10 trees, {:.1}s (limit 120s)", elapsed.as_secs_f64()),
        ),
    }
}

fn failed_assertions(report: &ConvergenceReport) -> Vec<String> {
    report
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| format!("{} {:?}", a.name, a.witness))
        .collect()
}

fn criterion_5() -> Outcome {
    let report = dynamics::run_theorem_back(b(5)).unwrap();
    let t_d = TreeLengthFunction::simple_twist(b(5), Letter::generator(1), Letter::generator(2)).unwrap();
    let change = FreeAutomorphism::ca_basis_change(b(5)).unwrap();
    let t_d_prime = t_d.clone().with_marking(change).unwrap();
    let ca = w("ca");
    let exact = t_d.length(&ca).unwrap() == qi(1) && t_d_prime.length(&ca).unwrap().is_zero();
    let distinct = t_d.projective_vector(2).unwrap() != t_d_prime.projective_vector(2).unwrap();
    let fails = failed_assertions(&report);
    outcome(
        exact && distinct && fails.is_empty(),
        if fails.is_empty() {
            "||ca||_T_D = 1, ||ca||_T_D' = 0, level-2 vectors differ".to_string()
        } else {
            fails.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let report = dynamics::run_theorem_main(b(5), 50, 2, 64).unwrap();
    let elapsed = start.elapsed();
    let mut problems = failed_assertions(&report);
    for name in [
        "tree-limits-equal-delta",
        "limit-separation",
        "equivariant:b':distance-1-closed-form",
        "equivariant:b'':distance-1-closed-form",
        "anti-equivariant:b':distance-1-closed-form",
        "anti-equivariant:b'':distance-1-closed-form",
    ] {
        if report.assertion(name).is_none() {
            problems.push(format!("missing assertion {name}"));
        }
    }
    for variant in ["equivariant", "anti-equivariant"] {
        for (label, twistor, stable, target) in [("b'", "B", "A", "b"), ("b''", "D", "E", "d")] {
            let (twistor, target_word) = if variant == "equivariant" {
                (twistor.to_string(), target)
            } else {
                (twistor.to_lowercase(), target)
            };
            let table = report.table(&format!("{variant}:{label}")).unwrap();
            for n in 0..=10usize {
                let brute = common::word_distance(5, 1, &format!("{}{stable}c", twistor.repeat(n)), target_word);
                if brute != q(2, n as i64 + 2) || table.rows[n][4] != fmt_q(&brute) {
                    problems.push(format!("{variant}:{label} n={n} brute={brute} table={}", table.rows[n][4]));
                }
            }
        }
    }
    if elapsed > Duration::from_secs(120) {
        problems.push(format!("runtime {:.1}s", elapsed.as_secs_f64()));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "tree limits = [Delta(1,1)], distances 2/(n+2) for n <= 50 (brute force n <= 10), separation 1, {:.1}s",
                elapsed.as_secs_f64()
            )
        } else {
            problems.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let iters = 50;
    let report = dynamics::run_product_minimal(b(5), iters, 1, 64).unwrap();
    let tree_ok = report.assertion("tree-limit-equals-T_D").is_some_and(|a| a.passed);
    let table = report.table("current-orbit").unwrap();
    let violations: Vec<String> = table
        .rows
        .iter()
        .filter_map(|row| {
            let n: i64 = row[0].parse().unwrap();
            let dist = currents_core::parse::parse_rational(&row[4]).unwrap();
            let bound = qi(1) * q(1, n + 2);
            (dist > bound).then(|| format!("n={n}: {} > {}", row[4], fmt_q(&bound)))
        })
        .collect();
    let detail = format!(
        "tree limit = [T_D]: {tree_ok}; L=1 distance <= 1/(n+2) violated at {} of {} steps{}",
        violations.len(),
        table.rows.len(),
        violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
    );
    outcome(tree_ok && violations.is_empty(), detail)
}

fn criterion_8() -> Outcome {
    let report = dynamics::run_outlook_identity(b(5), 20, SEED).unwrap();
    let table = report.table("intersections").unwrap();
    let exact = table
        .rows
        .iter()
        .all(|row| row[1] == fmt_q(&q(1, row[0].parse::<i64>().unwrap() * (row[0].parse::<i64>().unwrap() + 1))));
    let fails = failed_assertions(&report);
    outcome(
        exact && fails.is_empty() && table.rows.len() == 20,
        if fails.is_empty() { "I = 1/(n(n+1)) for n = 1..=20".to_string() } else { fails.join("; ") },
    )
}

fn criterion_9() -> Outcome {
    let mut rng = sample::rng(SEED + 9);
    let corpus: Vec<RationalCurrent> = (0..1000)
        .map(|_| {
            let terms = rng.gen_range(1..=3);
            sample::random_current(&mut rng, b(3), terms, 10)
        })
        .collect();
    let eps = q(1, 10);
    let results: Vec<Result<usize, String>> = corpus
        .par_iter()
        .map(|nu| {
            let e = escape_from_critical(nu).map_err(|err| format!("nu={nu}: {err}"))?;
            match steps_to_reach(nu, &e.iterated(), e.target, &eps, 40).unwrap() {
                Some(n) => Ok(n),
                None => Err(format!("nu={nu} not within 1/10 after 40 steps")),
            }
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let worst = results.iter().filter_map(|r| r.as_ref().ok()).max().copied().unwrap_or(0);
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("1000 currents at rank 3, slowest reached 1/10 in {worst} steps")
        } else {
            format!("{} failures, first: {}", failures.len(), failures[0])
        },
    )
}

fn criterion_10() -> Outcome {
    let report = dynamics::run_primitive_limit(b(3), &w("ab"), 20, 2).unwrap();
    let table = report.table("distances").unwrap();
    let mut problems = Vec::new();
    for n in 5..=20usize {
        let brute = common::word_distance(3, 2, &format!("c{}", "ab".repeat(n)), "ab");
        let bound = q(3, 2 * n as i64 + 1);
        if table.rows[n][2] != fmt_q(&brute) {
            problems.push(format!("n={n} report {} vs brute force {brute}", table.rows[n][2]));
        }
        if brute > bound {
            problems.push(format!("n={n} {brute} > {}", fmt_q(&bound)));
        }
    }
    problems.extend(failed_assertions(&report));
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "d_2 <= 3/(2n+1) for n = 5..=20, values match brute force".to_string()
        } else {
            problems.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(|| criterion_1(&corpus))),
        (2, Box::new(|| criterion_2(&corpus))),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (id, run) in &criteria {
        let start = Instant::now();
        let result = run();
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} [{:.1}s] {}",
            start.elapsed().as_secs_f64(),
            result.detail
        );
        if !result.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
