//! Seeded invariant suites run by `selftest`. Each check reports the first
//! failing input as a witness.

use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::automorphism::FreeAutomorphism;
use crate::currents::RationalCurrent;
use crate::dynamics::escape_from_critical;
use crate::error::Result;
use crate::sample;
use crate::trees::TreeLengthFunction;
use crate::word::{Basis, Letter, Word};
use crate::{fmt_q, q, qi, Rational};

/// Ranks covered by [`selftest`].
pub const RANKS: [usize; 3] = [2, 3, 5];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub rank: usize,
    pub name: &'static str,
    pub trials: usize,
    /// First failing input, `None` when every trial passed.
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

struct Suite<'a> {
    suite: &'static str,
    rank: usize,
    rng: &'a mut ChaCha8Rng,
    out: &'a mut Vec<CheckResult>,
}

impl Suite<'_> {
    fn check<F>(&mut self, name: &'static str, trials: usize, mut trial: F)
    where
        F: FnMut(&mut ChaCha8Rng) -> Result<Option<String>>,
    {
        let mut witness = None;
        for _ in 0..trials {
            match trial(self.rng) {
                Ok(None) => {}
                Ok(Some(w)) => {
                    witness = Some(w);
                    break;
                }
                Err(e) => {
                    witness = Some(format!("error: {e}"));
                    break;
                }
            }
        }
        self.out.push(CheckResult {
            suite: self.suite,
            rank: self.rank,
            name,
            trials,
            witness,
        });
    }
}

fn fail_if(bad: bool, witness: impl FnOnce() -> String) -> Option<String> {
    bad.then(witness)
}

fn w(s: &str) -> Word {
    Word::parse(s).expect("literal word")
}

/// Runs every suite over ranks 2, 3 and 5.
pub fn selftest(seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (i, &rank) in RANKS.iter().enumerate() {
        let basis = Basis::new(rank).expect("rank >= 1");
        let mut rng = sample::rng(seed.wrapping_mul(31).wrapping_add(i as u64));
        word_suite(basis, &mut rng, &mut out);
        automorphism_suite(basis, &mut rng, &mut out);
        current_suite(basis, &mut rng, &mut out);
        tree_suite(basis, &mut rng, &mut out);
        if rank >= 3 {
            dynamics_suite(basis, &mut rng, &mut out);
        }
    }
    out
}

fn word_suite(basis: Basis, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let mut s = Suite { suite: "word", rank: basis.rank(), rng, out };
    s.check("reduction-idempotent", 200, |rng| {
        let len = rng.gen_range(0..20);
        let raw: Vec<Letter> = (0..len).map(|_| sample::random_letter(rng, basis)).collect();
        let once = crate::word::free_reduce(raw.iter().copied());
        let twice = crate::word::free_reduce(once.letters().iter().copied());
        Ok(fail_if(once != twice || once.len() > raw.len(), || once.to_string()))
    });
    s.check("occurrence-inverse-symmetry", 200, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 12);
        let v = sample::random_nontrivial_word(rng, basis, 4);
        let c = g.cyclic_reduce()?.0;
        Ok(fail_if(c.occurrences(&v) != c.occurrences(&v.inverse()), || format!("v={v} w={c}")))
    });
    s.check("power-coherence", 200, |rng| {
        let f = sample::random_nontrivial_word(rng, basis, 6).cyclic_reduce()?.0;
        let m = rng.gen_range(1..=4);
        let v = sample::random_nontrivial_word(rng, basis, 5);
        let fm = f.pow(m);
        Ok(fail_if(fm.occurrences(&v) != m * f.occurrences(&v), || {
            format!("f={f} m={m} v={v}")
        }))
    });
    s.check("rotation-canonical", 200, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 8);
        let hl = rng.gen_range(0..5);
        let h = sample::random_word(rng, basis, hl);
        let conj = h.concat(&g).concat(&h.inverse());
        Ok(fail_if(conj.cyclic_reduce()?.0 != g.cyclic_reduce()?.0, || {
            format!("g={g} h={h}")
        }))
    });
}

fn automorphism_suite(basis: Basis, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let d = FreeAutomorphism::simple_twist(basis, Letter::generator(1), Letter::generator(2)).expect("rank >= 2");
    let mut s = Suite { suite: "automorphism", rank: basis.rank(), rng, out };
    s.check("inverse-roundtrip", 200, |rng| {
        let phi = random_twist_product(rng, basis, 3)?;
        let ul = rng.gen_range(0..20);
        let u = sample::random_word(rng, basis, ul);
        let back = phi.apply_inverse(&phi.apply(&u)?)?;
        Ok(fail_if(back != u, || format!("phi={phi} u={u}")))
    });
    s.check("cyclic-action", 200, |rng| {
        let phi = random_twist_product(rng, basis, 3)?;
        let u = sample::random_nontrivial_word(rng, basis, 30);
        let lhs = phi.apply_cyclic(&u.cyclic_reduce()?.0)?;
        let rhs = phi.apply(&u)?.cyclic_reduce()?.0;
        Ok(fail_if(lhs != rhs, || format!("phi={phi} u={u}")))
    });
    let mut n = 0;
    s.check("twist-linear-growth", 20, |_| {
        n += 1;
        let len = d.power(n as i64).apply(&w("a"))?.len();
        Ok(fail_if(len != n + 1, || format!("n={n} |D^n(a)|={len}")))
    });
}

fn random_twist_product(rng: &mut ChaCha8Rng, basis: Basis, factors: usize) -> Result<FreeAutomorphism> {
    let mut phi = FreeAutomorphism::identity(basis);
    for _ in 0..factors {
        let t = Letter::generator(rng.gen_range(1..=basis.rank()));
        let mut z = sample::random_letter(rng, basis);
        while z.positive() == t {
            z = sample::random_letter(rng, basis);
        }
        phi = phi.compose(&FreeAutomorphism::simple_twist(basis, t, z)?)?;
    }
    Ok(phi)
}

fn current_suite(basis: Basis, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let (a, b) = (Letter::generator(1), Letter::generator(2));
    let d = FreeAutomorphism::simple_twist(basis, a, b).expect("rank >= 2");
    let words: Vec<Word> = (1..=3).flat_map(|l| basis.reduced_words(l)).collect();
    let mut s = Suite { suite: "currents", rank: basis.rank(), rng, out };

    s.check("basic-extension-identities", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 12);
        let table = nu.table(4);
        for v in &words {
            let value = table.get(v);
            if value.is_negative() {
                return Ok(Some(format!("nu={nu} v={v} negative")));
            }
            let last = *v.letters().last().expect("nonempty");
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
            if right != value || left != value {
                return Ok(Some(format!(
                    "nu={nu} v={v} (v;nu)={} right-sum={} left-sum={}",
                    fmt_q(&value),
                    fmt_q(&right),
                    fmt_q(&left)
                )));
            }
        }
        Ok(None)
    });
    s.check("basic-level-identity", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 12);
        let table = nu.table(3);
        for m in 1..=3 {
            let total: Rational = basis.reduced_words(m).iter().map(|u| table.get(u)).sum();
            if &total / qi(2) != nu.length() {
                return Ok(Some(format!("nu={nu} m={m} sum={}", fmt_q(&total))));
            }
        }
        Ok(None)
    });
    s.check("word-length", 200, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 30);
        let len = RationalCurrent::of_word(basis, &g)?.length();
        Ok(fail_if(len != qi(g.cyclic_len() as i64), || format!("g={g}")))
    });
    s.check("twist-basic-identities", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 12);
        let dnu = nu.act(&d)?;
        let c = |mu: &RationalCurrent, s: &str| mu.coordinate(&w(s));
        for x in basis.generators().filter(|&x| x != b) {
            let lx = Word::letter(x);
            if dnu.coordinate(&lx) != nu.coordinate(&lx) {
                return Ok(Some(format!("nu={nu} part 1 at {x}")));
            }
        }
        let part2 = c(&dnu, "b") == c(&nu, "b") + c(&nu, "a") - qi(2) * c(&nu, "aB");
        let part3 = c(&dnu, "aB") == c(&nu, "aBB") + c(&nu, "aBA");
        let growth = dnu.length() - nu.length();
        let part4 = growth == c(&dnu, "b") - c(&nu, "b") && growth == c(&nu, "a") - qi(2) * c(&nu, "aB");
        Ok(fail_if(!(part2 && part3 && part4), || {
            format!("nu={nu} parts 2/3/4 = {part2}/{part3}/{part4}")
        }))
    });
    s.check("twist-increment-monotone", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 12);
        let d1 = nu.act(&d)?;
        let d2 = d1.act(&d)?;
        let first = d1.length() - nu.length();
        let second = d2.length() - d1.length();
        Ok(fail_if(first.is_positive() && second < first, || {
            format!("nu={nu} increments {} then {}", fmt_q(&first), fmt_q(&second))
        }))
    });
    s.check("action-composes", 50, |rng| {
        let phi = random_twist_product(rng, basis, 2)?;
        let psi = random_twist_product(rng, basis, 2)?;
        let nu = sample::random_current(rng, basis, 3, 10);
        let lhs = nu.act(&phi.compose(&psi)?)?;
        let rhs = nu.act(&psi)?.act(&phi)?;
        Ok(fail_if(lhs != rhs, || format!("phi={phi} psi={psi} nu={nu}")))
    });
}

fn tree_suite(basis: Basis, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let (a, b) = (Letter::generator(1), Letter::generator(2));
    let mut trees = vec![TreeLengthFunction::simple_twist(basis, a, b).expect("rank >= 2")];
    if basis.rank() >= 5 {
        for (rho, theta) in [(qi(1), qi(1)), (q(1, 2), qi(3)), (qi(3), q(1, 2))] {
            trees.push(TreeLengthFunction::two_edge(basis, rho, theta).expect("rank >= 5"));
        }
    }
    let mut s = Suite { suite: "trees", rank: basis.rank(), rng, out };
    s.check("britton-equals-limit", 100, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 30);
        for t in &trees {
            let br = t.length_britton(&g)?;
            let lim = t.length_limit(&g, crate::limits::DEFAULT_CAP)?;
            if br != lim {
                return Ok(Some(format!("g={g} britton={} limit={}", fmt_q(&br), fmt_q(&lim))));
            }
        }
        Ok(None)
    });
    s.check("conjugacy-and-inversion", 100, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 15);
        let hl = rng.gen_range(0..6);
        let h = sample::random_word(rng, basis, hl);
        let conj = h.concat(&g).concat(&h.inverse());
        for t in &trees {
            let l = t.length(&g)?;
            if t.length(&conj)? != l || t.length(&g.inverse())? != l {
                return Ok(Some(format!("g={g} h={h}")));
            }
        }
        Ok(None)
    });
    s.check("power-homogeneity", 100, |rng| {
        let g = sample::random_nontrivial_word(rng, basis, 10);
        let n = rng.gen_range(1..=5);
        for t in &trees {
            if t.length(&g.pow(n))? != qi(n) * t.length(&g)? {
                return Ok(Some(format!("g={g} n={n}")));
            }
        }
        Ok(None)
    });
    s.check("twistor-elliptic", 1, |_| {
        let l = trees[0].length(&w("b"))?;
        Ok(fail_if(!l.is_zero(), || format!("||b||={}", fmt_q(&l))))
    });
}

fn dynamics_suite(basis: Basis, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) {
    let (a, b) = (Letter::generator(1), Letter::generator(2));
    let d = FreeAutomorphism::simple_twist(basis, a, b).expect("rank >= 2");
    let d_inv = d.inverse();
    let mu_b = RationalCurrent::of_word(basis, &Word::letter(b)).expect("in basis");
    let mut s = Suite { suite: "dynamics", rank: basis.rank(), rng, out };
    s.check("dichotomy-off-critical", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 10);
        let wit = nu.critical_witness(a, b)?;
        if wit.in_critical_set() {
            return Ok(None);
        }
        let psi = if wit.half_t > wit.t_z_inv {
            &d
        } else if wit.half_t > wit.t_z {
            &d_inv
        } else {
            return Ok(Some(format!("nu={nu} off Y but neither inequality holds")));
        };
        let target = mu_b.projective_vector(1)?;
        let mut current = nu.clone();
        let mut prev = current.projective_vector(1)?.distance(&target)?;
        for n in 1..=10 {
            current = current.act(psi)?;
            let dist = current.projective_vector(1)?.distance(&target)?;
            if dist >= prev {
                return Ok(Some(format!("nu={nu} step {n}: {} !< {}", fmt_q(&dist), fmt_q(&prev))));
            }
            prev = dist;
        }
        Ok(None)
    });
    s.check("escape-total", 100, |rng| {
        let nu = sample::random_current(rng, basis, 3, 10);
        let escape = escape_from_critical(&nu)?;
        if let Some((tc, tc_inv)) = &escape.forced_vanishing {
            if !tc.is_zero() || !tc_inv.is_zero() {
                return Ok(Some(format!("nu={nu} critical branch without forced vanishing")));
            }
        }
        let steps = steps_to_reach(&nu, &escape.iterated(), escape.target, &q(1, 10), 40)?;
        Ok(fail_if(steps.is_none(), || format!("nu={nu} not within 1/10 after 40 steps")))
    });
}

/// Number of iterations until the level-1 distance from `[psi^n nu]` to
/// `[mu_target]` is at most `eps`, or `None` within `max_steps`.
pub fn steps_to_reach(
    nu: &RationalCurrent,
    psi: &FreeAutomorphism,
    target: Letter,
    eps: &Rational,
    max_steps: usize,
) -> Result<Option<usize>> {
    let goal = RationalCurrent::of_word(nu.basis(), &Word::letter(target))?.projective_vector(1)?;
    let mut current = nu.clone();
    for n in 0..=max_steps {
        if n > 0 {
            current = current.act(psi)?;
        }
        if current.projective_vector(1)?.distance(&goal)? <= *eps {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_covers_ranks_and_passes() {
        let results = selftest(1);
        for r in &results {
            assert!(r.passed(), "{} rank {} {}: {:?}", r.suite, r.rank, r.name, r.witness);
        }
        for rank in RANKS {
            assert!(results.iter().any(|r| r.rank == rank));
        }
    }
}
