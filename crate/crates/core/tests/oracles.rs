//! Library results checked against the naive string implementations in
//! `common`, then frozen as exact values.

mod common;

use common::{count, q as cq, word_distance, Q};
use currents_core::dynamics::{self, periodic_perturbation_bound};
use currents_core::{q, qi, sample, Basis, CyclicWord, FreeAutomorphism, Letter, RationalCurrent, TreeLengthFunction, Word};
use rand::Rng;

fn basis(k: usize) -> Basis {
    Basis::new(k).unwrap()
}

fn to_q(x: &currents_core::Rational) -> Q {
    x.clone()
}

#[test]
fn occurrence_counts_match_naive_windows() {
    let mut rng = sample::rng(11);
    for _ in 0..500 {
        let g = sample::random_nontrivial_word(&mut rng, basis(3), 10);
        let w = CyclicWord::of(&g).unwrap();
        let v = sample::random_nontrivial_word(&mut rng, basis(3), 6);
        assert_eq!(w.occurrences(&v), count(&v.to_string(), &w.to_string()), "v={v} w={w}");
    }
}

#[test]
fn power_coherence_brute_force() {
    let words = common::reduced_words(2, 5);
    for f in common::reduced_words(2, 6).iter().step_by(7) {
        let f = common::cyclic_reduce(f);
        if f.is_empty() {
            continue;
        }
        for m in 1..=4 {
            let fm = f.repeat(m);
            for v in words.iter().step_by(3) {
                assert_eq!(count(v, &fm), m * count(v, &f), "f={f} m={m} v={v}");
            }
        }
    }
}

#[test]
fn canonical_rotation_decides_conjugacy() {
    let mut rng = sample::rng(12);
    let b = basis(2);
    for _ in 0..3000 {
        let len = rng.gen_range(1..=8);
        let u = sample::random_word(&mut rng, b, len);
        let w = if rng.gen_bool(0.5) {
            let h = sample::random_word(&mut rng, b, 3);
            h.concat(&u).concat(&h.inverse())
        } else {
            sample::random_word(&mut rng, b, u.len())
        };
        let same = u.cyclic_reduce().unwrap().0 == w.cyclic_reduce().unwrap().0;
        assert_eq!(same, common::conjugate(&u.to_string(), &w.to_string()), "u={u} w={w}");
    }
}

#[test]
fn coordinates_match_naive_sums() {
    let mut rng = sample::rng(13);
    let b = basis(3);
    for _ in 0..100 {
        let g1 = sample::random_nontrivial_word(&mut rng, b, 12);
        let g2 = sample::random_nontrivial_word(&mut rng, b, 12);
        let (s1, s2) = (sample::random_weight(&mut rng), sample::random_weight(&mut rng));
        let nu = RationalCurrent::of_word(b, &g1)
            .unwrap()
            .scale(&s1)
            .unwrap()
            .add(&RationalCurrent::of_word(b, &g2).unwrap().scale(&s2).unwrap())
            .unwrap();
        let expected = common::vector(3, 3, &[(to_q(&s1), &g1.to_string()), (to_q(&s2), &g2.to_string())]);
        let got = nu.projective_vector(3).unwrap();
        for (v, x) in expected {
            assert_eq!(got.entry(&Word::parse(&v).unwrap()), x, "nu={nu} v={v}");
        }
    }
}

#[test]
fn twist_orbit_of_mu_a_is_one_over_n_plus_one() {
    // D^n mu_a = mu_{a b^n}: at level 1 the a- and b-entries are off by 1/(n+1)
    let d = FreeAutomorphism::simple_twist(basis(3), Letter::generator(1), Letter::generator(2)).unwrap();
    let mu_a = RationalCurrent::parse_word(basis(3), "a").unwrap();
    let mu_b = RationalCurrent::parse_word(basis(3), "b").unwrap();
    let orbit = dynamics::current_orbit(&d, &mu_a, 12, 1, Some(&mu_b)).unwrap();
    for s in &orbit {
        let brute = word_distance(3, 1, &format!("a{}", "b".repeat(s.n)), "b");
        assert_eq!(brute, cq(1, s.n as i64 + 1));
        assert_eq!(s.distance.clone().unwrap(), brute);
        assert_eq!(s.length, qi(s.n as i64 + 1));
    }
}

#[test]
fn theorem_main_closed_form_brute_force() {
    for n in 0..=10usize {
        let fwd_b = format!("{}Ac", "B".repeat(n));
        let fwd_d = format!("{}Ec", "D".repeat(n));
        let back_b = format!("{}Ac", "b".repeat(n));
        let back_d = format!("{}Ec", "d".repeat(n));
        for (w, t) in [(&fwd_b, "b"), (&fwd_d, "d"), (&back_b, "b"), (&back_d, "d")] {
            assert_eq!(word_distance(5, 1, w, t), cq(2, n as i64 + 2), "w={w}");
        }
    }
    assert_eq!(word_distance(5, 2, "b", "d"), cq(1, 1));
    let phi = FreeAutomorphism::twist_ab_ed(basis(5)).unwrap();
    let ac = Word::parse("Ac").unwrap();
    for n in 0..=10 {
        assert_eq!(phi.power(n).apply(&ac).unwrap().to_string(), format!("{}Ac", "B".repeat(n as usize)));
        assert_eq!(phi.power(-n).apply(&ac).unwrap().to_string(), format!("{}Ac", "b".repeat(n as usize)));
    }
}

#[test]
fn primitive_limit_ab_closed_form() {
    for n in 1..=20usize {
        let brute = word_distance(3, 2, &format!("c{}", "ab".repeat(n)), "ab");
        assert_eq!(brute, cq(3, 2 * (2 * n as i64 + 1)), "n={n}");
        assert!(brute <= cq(3, 2 * n as i64 + 1));
    }
    let report = dynamics::run_primitive_limit(basis(3), &Word::parse("ab").unwrap(), 20, 2).unwrap();
    let rows = &report.table("distances").unwrap().rows;
    for row in rows.iter().skip(1) {
        let n: i64 = row[0].parse().unwrap();
        assert_eq!(row[2], q(3, 2 * (2 * n + 1)).to_string());
    }
}

#[test]
fn perturbation_bound_dominates_brute_force() {
    let mut rng = sample::rng(14);
    let b = basis(3);
    for _ in 0..300 {
        let g = sample::random_nontrivial_word(&mut rng, b, 5);
        let f = sample::random_nontrivial_word(&mut rng, b, 4);
        let (r, s) = g.cyclic_reduce().unwrap();
        let x = s.inverse().concat(&f).concat(&s);
        for n in 0..6usize {
            let h = g.pow(n as i64).concat(&f);
            if h.is_identity() {
                continue;
            }
            let level = rng.gen_range(1..=3);
            let brute = word_distance(3, level, &h.to_string(), &g.to_string());
            let bound = periodic_perturbation_bound(level, r.len(), n, x.len(), h.cyclic_len());
            assert!(brute <= bound, "g={g} f={f} n={n} L={level}");
        }
    }
}

#[test]
fn off_critical_example_rate() {
    // n = 8, L = 2: distance at most 2 ||f|| / (8 ||g||) = 1/16
    let brute = word_distance(3, 2, &format!("{}a", "abaB".repeat(8)), "abaB");
    assert!(brute <= cq(1, 16), "{brute}");
    let report = dynamics::run_off_critical_perturbation(
        basis(3),
        &Word::parse("abaB").unwrap(),
        &Word::parse("a").unwrap(),
        8,
        2,
    )
    .unwrap();
    assert!(report.all_passed());
    assert_eq!(report.table("distances").unwrap().rows[8][3], brute.to_string());
}

#[test]
fn out_invariance_of_intersection() {
    let mut rng = sample::rng(15);
    let b = basis(4);
    let cayley = TreeLengthFunction::cayley(b);
    for _ in 0..100 {
        let g = sample::random_nontrivial_word(&mut rng, b, 15);
        let t = Letter::generator(rng.gen_range(1..=4));
        let mut z = sample::random_letter(&mut rng, b);
        while z.positive() == t {
            z = sample::random_letter(&mut rng, b);
        }
        let phi = FreeAutomorphism::simple_twist(b, t, z).unwrap();
        let nu = RationalCurrent::of_word(b, &g).unwrap();
        let lhs = cayley.translate(&phi).unwrap().intersection(&nu.act(&phi).unwrap()).unwrap();
        assert_eq!(lhs, qi(g.cyclic_len() as i64));
    }
}

#[test]
fn simple_twist_length_counts_stable_letters_naively() {
    // T_D for a -> ab: hyperbolic length is the number of a-letters left
    // after rewriting a b^k A as the edge-group element b1^k
    for (g, expected) in [("a", 1), ("ab", 1), ("aba", 2), ("abA", 0), ("abAc", 0), ("aaBA", 1), ("acAc", 2), ("ca", 1)] {
        let t = TreeLengthFunction::simple_twist(basis(3), Letter::generator(1), Letter::generator(2)).unwrap();
        let w = Word::parse(g).unwrap();
        assert_eq!(t.length_britton(&w).unwrap(), qi(expected), "g={g}");
        assert_eq!(t.length_limit(&w, 64).unwrap(), qi(expected), "g={g}");
    }
}
