//! Orbit iteration on currents and on tree length functions, exact limit
//! extraction, and the named experiments built from them.
//!
//! Tree-side limits are exact: every orbit sequence `n -> ||phi^-n g||_T`
//! grows exactly linearly after a transient, and the growth coefficients are
//! read off with [`eventual_slope`]. Current-side limits are certified by
//! explicit distance bounds at each finite step.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::automorphism::FreeAutomorphism;
use crate::currents::{CriticalWitness, ProjectiveCurrentVector, RationalCurrent};
use crate::error::{Error, Result};
use crate::limits::{eventual_slope, Stabilized};
use crate::report::{ConvergenceReport, Table};
use crate::sample;
use crate::trees::{ProjectiveTreeVector, TreeLengthFunction};
use crate::word::{Basis, CyclicWord, Letter, Word};
use crate::{fmt_q, q, qi, Rational};

/// One step of a current orbit.
#[derive(Clone, Debug)]
pub struct OrbitStep {
    pub n: usize,
    pub current: RationalCurrent,
    pub length: Rational,
    pub vector: ProjectiveCurrentVector,
    pub distance: Option<Rational>,
}

/// `phi^n nu0` for `n = 0..=iters` with level-`level` projective vectors and,
/// when a target is given, the distance to its projective vector.
pub fn current_orbit(
    phi: &FreeAutomorphism,
    nu0: &RationalCurrent,
    iters: usize,
    level: usize,
    target: Option<&RationalCurrent>,
) -> Result<Vec<OrbitStep>> {
    if nu0.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    let target_vec = target.map(|t| t.projective_vector(level)).transpose()?;
    let mut currents = Vec::with_capacity(iters + 1);
    let mut nu = nu0.clone();
    for n in 0..=iters {
        if n > 0 {
            nu = nu.act(phi)?;
        }
        currents.push(nu.clone());
    }
    currents
        .into_par_iter()
        .enumerate()
        .map(|(n, current)| {
            let vector = current.projective_vector(level)?;
            let distance = target_vec.as_ref().map(|t| vector.distance(t)).transpose()?;
            Ok(OrbitStep {
                n,
                length: current.length(),
                vector,
                distance,
                current,
            })
        })
        .collect()
}

/// Largest entry difference over words of length at most `level`.
pub fn distance_at_level(p: &ProjectiveCurrentVector, q: &ProjectiveCurrentVector, level: usize) -> Rational {
    p.entries()
        .keys()
        .chain(q.entries().keys())
        .filter(|v| v.len() <= level)
        .map(|v| (p.entry(v) - q.entry(v)).abs())
        .fold(Rational::zero(), |a, x| if x > a { x } else { a })
}

/// Report of `iterate_current`. When `phi` is a simple twist and the first
/// step increases length, also checks `||phi^n nu|| >= ||nu|| + n(||phi nu|| - ||nu||)`.
pub fn iterate_current(
    phi: &FreeAutomorphism,
    nu0: &RationalCurrent,
    iters: usize,
    level: usize,
    target: Option<&RationalCurrent>,
) -> Result<ConvergenceReport> {
    let orbit = current_orbit(phi, nu0, iters, level, target)?;
    let mut report = ConvergenceReport::new("iterate", "phi^n nu as normalised level-L coordinate vectors");
    report
        .param("automorphism", phi)
        .param("current", nu0)
        .param("iters", iters)
        .param("level", level);
    if let Some(t) = target {
        report.param("target", t);
    }
    report.tables.push(orbit_table("orbit", &orbit, true));

    if let Some((t, z)) = phi.as_simple_twist() {
        let growth = &orbit.get(1).map(|s| s.length.clone()).unwrap_or_else(Rational::zero) - &orbit[0].length;
        if iters >= 1 && growth.is_positive() {
            let failures: Vec<usize> = orbit
                .iter()
                .filter(|s| s.length < &orbit[0].length + qi(s.n as i64) * &growth)
                .map(|s| s.n)
                .collect();
            report.check(
                "linear-growth-lower-bound",
                failures.is_empty(),
                [
                    ("twist", format!("{t}->{t}{z}")),
                    ("first-increment", fmt_q(&growth)),
                    ("failing-steps", format!("{failures:?}")),
                ],
            );
        }
    }
    Ok(report)
}

fn orbit_table(name: &str, orbit: &[OrbitStep], with_vector: bool) -> Table {
    let keys: Vec<Word> = if with_vector {
        orbit[0].vector.entries().keys().cloned().collect()
    } else {
        Vec::new()
    };
    let mut columns = vec!["n".to_string(), "length".to_string(), "distance".to_string()];
    columns.extend(keys.iter().map(|k| format!("({k})")));
    let mut table = Table {
        name: name.to_string(),
        columns,
        rows: Vec::new(),
    };
    for s in orbit {
        let mut row = vec![
            s.n.to_string(),
            fmt_q(&s.length),
            s.distance.as_ref().map(fmt_q).unwrap_or_default(),
        ];
        row.extend(keys.iter().map(|k| fmt_q(&s.vector.entry(k))));
        table.rows.push(row);
    }
    table
}

/// Exact limit of `[phi^n T0]` at a finite level.
#[derive(Clone, Debug)]
pub struct TreeOrbitLimit {
    pub vector: ProjectiveTreeVector,
    /// Per test class: the stabilised sequence `n -> ||phi^-n g||_{T0}`.
    pub sequences: Vec<(CyclicWord, Stabilized)>,
    /// True when every class grew with slope 0 and the stabilised values were used.
    pub bounded_orbit: bool,
}

/// Limit of `[phi^n T0]` on the test classes of cyclic length `<= level`:
/// the vector of eventual growth rates of `||phi^-n g||_{T0}`, or of the
/// eventual values when nothing grows.
pub fn tree_orbit_limit(
    phi: &FreeAutomorphism,
    t0: &TreeLengthFunction,
    level: usize,
    cap: usize,
) -> Result<TreeOrbitLimit> {
    let classes = t0.basis().power_free_classes(level);
    let sequences = classes
        .par_iter()
        .map(|class| {
            let transient = t0.marking().apply_inverse(&class.to_word())?.cyclic_len();
            let mut word = class.clone();
            let stab = eventual_slope(&class.to_string(), transient, cap, |n| {
                if n > 0 {
                    word = phi.apply_inverse_cyclic(&word)?;
                }
                t0.length(&word.to_word())
            })?;
            Ok((class.clone(), stab))
        })
        .collect::<Result<Vec<_>>>()?;
    let bounded_orbit = sequences.iter().all(|(_, s)| s.slope.is_zero());
    let raw = sequences
        .iter()
        .map(|(c, s)| {
            let value = if bounded_orbit { s.value.clone() } else { s.slope.clone() };
            (c.clone(), value)
        })
        .collect();
    Ok(TreeOrbitLimit {
        vector: ProjectiveTreeVector::normalize(level, raw)?,
        sequences,
        bounded_orbit,
    })
}

fn tree_vector_table(name: &str, vectors: &[(&str, &ProjectiveTreeVector)]) -> Table {
    let mut columns = vec!["class"];
    columns.extend(vectors.iter().map(|(n, _)| *n));
    let mut table = Table::new(name, &columns);
    if let Some((_, first)) = vectors.first() {
        for class in first.entries().keys() {
            let mut row = vec![class.to_string()];
            row.extend(
                vectors
                    .iter()
                    .map(|(_, v)| v.entry(class).map(fmt_q).unwrap_or_default()),
            );
            table.push(row);
        }
    }
    table
}

/// Which inequality let the iteration leave the critical set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EscapeBranch {
    /// `(t;nu) > 2(tz^-1;nu)`: iterate `t -> tz`.
    Forward,
    /// `(t;nu) > 2(tz;nu)`: iterate its inverse.
    Backward,
    /// On the critical set; twist by a third letter instead.
    Critical,
}

#[derive(Clone, Debug)]
pub struct Escape {
    pub twist: FreeAutomorphism,
    /// `+1` iterate `twist`, `-1` iterate its inverse.
    pub direction: i8,
    pub target: Letter,
    pub twisted: Letter,
    pub twistor: Letter,
    pub branch: EscapeBranch,
    pub witness: CriticalWitness,
    /// `((tc;nu), (tc^-1;nu))` in the critical branch; both vanish.
    pub forced_vanishing: Option<(Rational, Rational)>,
}

impl Escape {
    /// The automorphism actually iterated.
    pub fn iterated(&self) -> FreeAutomorphism {
        if self.direction < 0 {
            self.twist.inverse()
        } else {
            self.twist.clone()
        }
    }
}

/// Iterations used to rank escape candidates.
pub const ESCAPE_HORIZON: usize = 40;

/// Every escape admitted by relabeling the basis: a positive letter `t`
/// with `(t;nu) > 0` plays the twisted letter, any other generator `z` the
/// twistor, and the third-letter fallback applies when `[nu]` lies on the
/// critical set of `t -> tz`. Order: by `t`, then `z`, then third letter.
pub fn escape_candidates(nu: &RationalCurrent) -> Result<Vec<Escape>> {
    let basis = nu.basis();
    basis.ensure_rank(3)?;
    if nu.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    let mut out = Vec::new();
    for t in basis.generators().filter(|&x| nu.coordinate(&Word::letter(x)).is_positive()) {
        for z in basis.generators().filter(|&x| x != t) {
            let witness = nu.critical_witness(t, z)?;
            let (direction, branch) = if witness.half_t > witness.t_z_inv {
                (1, EscapeBranch::Forward)
            } else if witness.half_t > witness.t_z {
                (-1, EscapeBranch::Backward)
            } else {
                for c in basis.generators().filter(|&x| x != t && x != z) {
                    let tc = nu.coordinate(&Word::letter(t).concat(&Word::letter(c)));
                    let tc_inv = nu.coordinate(&Word::letter(t).concat(&Word::letter(c.inverse())));
                    out.push(Escape {
                        twist: FreeAutomorphism::simple_twist(basis, t, c)?,
                        direction: 1,
                        target: c,
                        twisted: t,
                        twistor: c,
                        branch: EscapeBranch::Critical,
                        witness: witness.clone(),
                        forced_vanishing: Some((tc, tc_inv)),
                    });
                }
                continue;
            };
            out.push(Escape {
                twist: FreeAutomorphism::simple_twist(basis, t, z)?,
                direction,
                target: z,
                twisted: t,
                twistor: z,
                branch,
                witness,
                forced_vanishing: None,
            });
        }
    }
    Ok(out)
}

/// Picks a simple twist whose forward or backward iteration drives `[nu]`
/// to the counting current of a basis letter: among [`escape_candidates`],
/// the first one whose orbit is closest to its target at level 1 after
/// [`ESCAPE_HORIZON`] steps.
pub fn escape_from_critical(nu: &RationalCurrent) -> Result<Escape> {
    let candidates = escape_candidates(nu)?;
    let scores = candidates
        .par_iter()
        .map(|e| horizon_distance(nu, e, ESCAPE_HORIZON))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..candidates.len())
        .min_by(|&i, &j| scores[i].cmp(&scores[j]).then(i.cmp(&j)))
        .ok_or(Error::ZeroCurrent)?;
    Ok(candidates.into_iter().nth(best).expect("index in range"))
}

fn horizon_distance(nu: &RationalCurrent, escape: &Escape, steps: usize) -> Result<Rational> {
    let psi = escape.iterated();
    let mut current = nu.clone();
    for _ in 0..steps {
        current = current.act(&psi)?;
    }
    let on_target = current.coordinate(&Word::letter(escape.target));
    Ok((current.length() - on_target) / current.length())
}

/// `d_L([mu_w], [mu_r])` bound for a cyclic word `w` obtained by cyclically
/// reducing `r^n x` (`r` cyclically reduced of length `m`, `x` reduced).
///
/// Cancellation consumes `k = (nm + |x| - |w|)/2` letters of `r^n`; the rest
/// holds `n' = floor((nm - k)/m)` consecutive copies of a rotation of `r`
/// (none once `k >= nm`, when `x` may also cancel against itself). With `e = |w| - n'm`, every level-`L` entry differs by at most
/// `(L + 2e - 1)/|w|`.
pub fn periodic_perturbation_bound(level: usize, r_len: usize, n: usize, x_len: usize, w_len: usize) -> Rational {
    let nm = n * r_len;
    let k = (nm + x_len - w_len) / 2;
    let copies = nm.saturating_sub(k) / r_len;
    let extra = w_len - copies * r_len;
    q((level + 2 * extra - 1) as i64, w_len as i64)
}

fn nonincreasing_from(values: &[Rational], start: usize) -> Option<usize> {
    (start.max(1)..values.len()).find(|&i| i > start && values[i] > values[i - 1])
}

fn mu(basis: Basis, s: &str) -> Result<RationalCurrent> {
    RationalCurrent::parse_word(basis, s)
}

fn letter(c: char) -> Letter {
    Letter::from_char(c).expect("ascii letter")
}

/// The two-stable-letter counterexample: the trees `T_{D'}` and `T_{D''}`
/// have the same `phi`-orbit limit `[Delta(1,1)]`, while the currents
/// `mu_{a^-1 c}` and `mu_{e^-1 c}` forced as their images converge to
/// `[mu_b] != [mu_d]` under both `phi^n` and `phi^-n`.
pub fn run_theorem_main(basis: Basis, iters: usize, level: usize, cap: usize) -> Result<ConvergenceReport> {
    basis.ensure_rank(5)?;
    let mut report = ConvergenceReport::new(
        "theorem-main",
        "lim phi^n [T_D'] = lim phi^n [T_D''] = [Delta(1,1)], but lim phi^(±n) [mu_{a^-1 c}] = [mu_b] != [mu_d] = lim phi^(±n) [mu_{e^-1 c}]",
    );
    report
        .param("rank", basis.rank())
        .param("iters", iters)
        .param("level", level)
        .param("cap", cap);

    let phi = FreeAutomorphism::twist_ab_ed(basis)?;
    let prime = FreeAutomorphism::prime_basis_change(basis)?;
    let dprime = FreeAutomorphism::double_prime_basis_change(basis)?;
    let t_d = TreeLengthFunction::simple_twist(basis, letter('a'), letter('b'))?;
    let t_prime = t_d.clone().with_marking(prime.clone())?;
    let t_dprime = t_d.with_marking(dprime.clone())?;
    let delta = TreeLengthFunction::two_edge(basis, qi(1), qi(1))?;

    let b_prime = prime.apply(&Word::parse("b")?)?;
    let b_dprime = dprime.apply(&Word::parse("b")?)?;
    report.check(
        "twistors-of-new-bases",
        b_prime == Word::parse("Ac")? && b_dprime == Word::parse("Ec")?,
        [("b'", b_prime.to_string()), ("b''", b_dprime.to_string())],
    );

    let (b, d) = (Word::parse("b")?, Word::parse("d")?);
    let lens = [
        t_prime.length(&b)?,
        t_prime.length(&d)?,
        t_dprime.length(&b)?,
        t_dprime.length(&d)?,
    ];
    report.check(
        "b-and-d-hyperbolic",
        lens.iter().all(|x| *x == qi(1)),
        [
            ("||b||_T_D'", fmt_q(&lens[0])),
            ("||d||_T_D'", fmt_q(&lens[1])),
            ("||b||_T_D''", fmt_q(&lens[2])),
            ("||d||_T_D''", fmt_q(&lens[3])),
        ],
    );

    // tree side
    let delta_vec = delta.projective_vector(level)?;
    let lim_prime = tree_orbit_limit(&phi, &t_prime, level, cap)?;
    let lim_dprime = tree_orbit_limit(&phi, &t_dprime, level, cap)?;
    report.check(
        "tree-limits-equal-delta",
        lim_prime.vector == delta_vec && lim_dprime.vector == delta_vec,
        [
            ("differing-classes-T_D'", format!("{:?}", lim_prime.vector.differences(&delta_vec))),
            ("differing-classes-T_D''", format!("{:?}", lim_dprime.vector.differences(&delta_vec))),
        ],
    );
    let phi_inv = phi.inverse();
    let back_prime = tree_orbit_limit(&phi_inv, &t_prime, level, cap)?;
    let back_dprime = tree_orbit_limit(&phi_inv, &t_dprime, level, cap)?;
    report.tables.push(tree_vector_table(
        "tree-limits",
        &[
            ("Delta(1,1)", &delta_vec),
            ("phi^n T_D'", &lim_prime.vector),
            ("phi^n T_D''", &lim_dprime.vector),
            ("phi^-n T_D'", &back_prime.vector),
            ("phi^-n T_D''", &back_dprime.vector),
        ],
    ));
    report.note(format!(
        "phi^-n tree limits (reported only): T_D' {} Delta(1,1), T_D'' {} Delta(1,1)",
        if back_prime.vector == delta_vec { "=" } else { "!=" },
        if back_dprime.vector == delta_vec { "=" } else { "!=" },
    ));

    // current side
    let mu_b = mu(basis, "b")?;
    let mu_d = mu(basis, "d")?;
    let separation = mu_b.projective_vector(level)?.distance(&mu_d.projective_vector(level)?)?;
    report.check("limit-separation", separation == qi(1), [("d_L(mu_b, mu_d)", fmt_q(&separation))]);

    let nu_prime = RationalCurrent::of_word(basis, &b_prime)?;
    let nu_dprime = RationalCurrent::of_word(basis, &b_dprime)?;
    for (variant, psi, sign) in [("equivariant", phi.clone(), -1i64), ("anti-equivariant", phi_inv, 1)] {
        for (label, nu0, target, twistor, stable) in [
            ("b'", &nu_prime, &mu_b, "b", "A"),
            ("b''", &nu_dprime, &mu_d, "d", "E"),
        ] {
            let orbit = current_orbit(&psi, nu0, iters, level, Some(target))?;
            let target1 = target.projective_vector(1)?;
            let mut table = Table::new(
                &format!("{variant}:{label}"),
                &["n", "class", "length", "distance-L", "distance-1"],
            );
            let mut closed_form_failures = Vec::new();
            let mut word_failures = Vec::new();
            for s in &orbit {
                let d1 = distance_at_level(&s.vector, &target1, 1);
                let expected_word = Word::parse(twistor)?.pow(sign * s.n as i64).concat(&Word::parse(&format!("{stable}c"))?);
                if s.current != RationalCurrent::of_word(basis, &expected_word)? {
                    word_failures.push(s.n);
                }
                if d1 != q(2, s.n as i64 + 2) {
                    closed_form_failures.push(s.n);
                }
                let class = s.current.terms().next().map(|(c, _)| c.to_string()).unwrap_or_default();
                table.push(vec![
                    s.n.to_string(),
                    class,
                    fmt_q(&s.length),
                    fmt_q(s.distance.as_ref().expect("target given")),
                    fmt_q(&d1),
                ]);
            }
            report.check(
                &format!("{variant}:{label}:orbit-words"),
                word_failures.is_empty(),
                [("failing-steps", format!("{word_failures:?}"))],
            );
            report.check(
                &format!("{variant}:{label}:distance-1-closed-form"),
                closed_form_failures.is_empty(),
                [
                    ("formula", "2/(n+2)".to_string()),
                    ("failing-steps", format!("{closed_form_failures:?}")),
                    (
                        "final-distance-1",
                        table.rows.last().map(|r| r[4].clone()).unwrap_or_default(),
                    ),
                ],
            );
            report.tables.push(table);
        }
    }
    Ok(report)
}

/// Two simple twists with the same twistor `b` whose trees differ: `T_D`
/// and `T_D'` for the basis with `c' = ca`.
pub fn run_theorem_back(basis: Basis) -> Result<ConvergenceReport> {
    basis.ensure_rank(3)?;
    let mut report = ConvergenceReport::new(
        "theorem-back",
        "D and D' are simple twists with twistor b, yet ||ca||_{T_D} = 1 and ||ca||_{T_D'} = 0",
    );
    report.param("rank", basis.rank()).param("level", 2);
    let (a, b) = (letter('a'), letter('b'));
    let d = FreeAutomorphism::simple_twist(basis, a, b)?;
    let change = FreeAutomorphism::ca_basis_change(basis)?;
    let d_prime = change.compose(&d)?.compose(&change.inverse())?;
    let t_d = TreeLengthFunction::simple_twist(basis, a, b)?;
    let t_d_prime = t_d.clone().with_marking(change.clone())?;

    let ca = Word::parse("ca")?;
    let on_d = t_d.length(&ca)?;
    let on_d_prime = t_d_prime.length(&ca)?;
    report.check("||ca||_T_D = 1", on_d == qi(1), [("class", "ca".to_string()), ("value", fmt_q(&on_d))]);
    report.check(
        "||ca||_T_D' = 0",
        on_d_prime.is_zero(),
        [("class", "ca".to_string()), ("value", fmt_q(&on_d_prime))],
    );

    let p = t_d.projective_vector(2)?;
    let p_prime = t_d_prime.projective_vector(2)?;
    let differing: Vec<String> = p.differences(&p_prime).iter().map(|c| c.to_string()).collect();
    let ca_class = CyclicWord::of(&ca)?;
    report.check(
        "projective-classes-differ",
        p != p_prime && differing.contains(&ca_class.to_string()),
        [
            ("witness-class", "ca".to_string()),
            ("canonical-rotation", ca_class.to_string()),
            ("differing-classes", differing.join(" ")),
        ],
    );
    report.tables.push(tree_vector_table("tree-vectors", &[("T_D", &p), ("T_D'", &p_prime)]));

    let twistor_ok = d_prime.apply(&Word::parse("a")?)? == Word::parse("ab")?
        && d_prime.apply(&ca)? == ca
        && d_prime.apply(&Word::parse("b")?)? == Word::parse("b")?;
    report.check(
        "D'-is-twist-with-twistor-b",
        twistor_ok,
        [("D'", d_prime.to_string())],
    );
    let mu_b = mu(basis, "b")?;
    let fixed = mu_b.act(&d)? == mu_b && mu_b.act(&d_prime)? == mu_b;
    report.check("twists-fix-mu_b", fixed, [("mu_b", mu_b.to_string())]);
    Ok(report)
}

/// D-orbit of the pair `([T_D'], [mu_a])` in the product: the tree side
/// reaches `[T_D]` exactly, the current side approaches `[mu_b]`.
pub fn run_product_minimal(basis: Basis, iters: usize, level: usize, cap: usize) -> Result<ConvergenceReport> {
    basis.ensure_rank(5)?;
    let mut report = ConvergenceReport::new(
        "product-minimal",
        "lim D^n ([T_D'], [mu_a]) = ([T_D], [mu_b])",
    );
    report
        .param("rank", basis.rank())
        .param("iters", iters)
        .param("level", level)
        .param("cap", cap);
    let (a, b) = (letter('a'), letter('b'));
    let d = FreeAutomorphism::simple_twist(basis, a, b)?;
    let t_d = TreeLengthFunction::simple_twist(basis, a, b)?;
    let seed_tree = t_d.clone().with_marking(FreeAutomorphism::prime_basis_change(basis)?)?;
    let mu_a = mu(basis, "a")?;
    let mu_b = mu(basis, "b")?;

    let witness = mu_a.critical_witness(a, b)?;
    report.check(
        "seed-off-critical-set",
        !witness.in_critical_set() && witness.half_t > witness.t_z_inv,
        [
            ("(a;mu_a)/2", fmt_q(&witness.half_t)),
            ("(ab;mu_a)", fmt_q(&witness.t_z)),
            ("(aB;mu_a)", fmt_q(&witness.t_z_inv)),
        ],
    );
    let b_len = seed_tree.length(&Word::parse("b")?)?;
    report.check("seed-tree-b-hyperbolic", b_len.is_positive(), [("||b||_T_D'", fmt_q(&b_len))]);

    let limit = tree_orbit_limit(&d, &seed_tree, level, cap)?;
    let expected = t_d.projective_vector(level)?;
    report.check(
        "tree-limit-equals-T_D",
        limit.vector == expected,
        [("differing-classes", format!("{:?}", limit.vector.differences(&expected)))],
    );
    report.tables.push(tree_vector_table(
        "tree-limit",
        &[("T_D", &expected), ("lim D^n T_D'", &limit.vector)],
    ));

    let orbit = current_orbit(&d, &mu_a, iters, level, Some(&mu_b))?;
    let target1 = mu_b.projective_vector(1)?;
    let mut table = Table::new("current-orbit", &["n", "length", "distance-L", "bound-L", "distance-1"]);
    let mut failures = Vec::new();
    for s in &orbit {
        let bound = qi(level as i64) * mu_a.length() / &s.length;
        let dist = s.distance.clone().expect("target given");
        if dist > bound {
            failures.push(s.n);
        }
        table.push(vec![
            s.n.to_string(),
            fmt_q(&s.length),
            fmt_q(&dist),
            fmt_q(&bound),
            fmt_q(&distance_at_level(&s.vector, &target1, 1)),
        ]);
    }
    report.check(
        "current-distance-bound",
        failures.is_empty(),
        [
            ("bound", "L*||mu_a||/||D^n mu_a||".to_string()),
            ("failing-steps", format!("{failures:?}")),
        ],
    );
    report.tables.push(table);
    Ok(report)
}

/// `[mu_{c u^n}] -> [mu_u]` for `u` in `<a, b>`; each `c u^n` is primitive.
pub fn run_primitive_limit(basis: Basis, u: &Word, iters: usize, level: usize) -> Result<ConvergenceReport> {
    basis.ensure_rank(3)?;
    if u.is_identity() {
        return Err(Error::IdentityElement);
    }
    if u.max_index() > 2 {
        return Err(Error::LettersOutsideAB(u.to_string()));
    }
    let mut report = ConvergenceReport::new("primitive-limit", "c u^n is primitive and lim [mu_{c u^n}] = [mu_u]");
    report
        .param("rank", basis.rank())
        .param("u", u)
        .param("iters", iters)
        .param("level", level);
    let (r, s) = u.cyclic_reduce()?;
    let c = Word::parse("c")?;
    let x = s.inverse().concat(&c).concat(&s);
    let target = RationalCurrent::of_word(basis, u)?;
    let target_vec = target.projective_vector(level)?;

    let mut table = Table::new("distances", &["n", "cyclic-length", "distance", "bound"]);
    let mut distances = Vec::new();
    let mut bound_failures = Vec::new();
    let mut primitive_failures = Vec::new();
    for n in 0..=iters {
        let g = c.concat(&u.pow(n as i64));
        // c -> c u^n, a and b fixed: an automorphism sending c to g
        let mut images: Vec<Word> = basis.generators().map(Word::letter).collect();
        let mut inverse_images = images.clone();
        images[2] = g.clone();
        inverse_images[2] = c.concat(&u.pow(-(n as i64)));
        if FreeAutomorphism::new(basis, images, inverse_images).is_err() {
            primitive_failures.push(n);
        }
        let nu = RationalCurrent::of_word(basis, &g)?;
        let dist = nu.projective_vector(level)?.distance(&target_vec)?;
        let w_len = g.cyclic_len();
        let bound = periodic_perturbation_bound(level, r.len(), n, x.len(), w_len);
        if dist > bound {
            bound_failures.push(n);
        }
        table.push(vec![n.to_string(), w_len.to_string(), fmt_q(&dist), fmt_q(&bound)]);
        distances.push(dist);
    }
    report.check(
        "c-u^n-primitive",
        primitive_failures.is_empty(),
        [("failing-steps", format!("{primitive_failures:?}"))],
    );
    report.check(
        "distance-bound",
        bound_failures.is_empty(),
        [
            ("bound", "(L + 2e - 1)/||c u^n||, e = non-periodic letters".to_string()),
            ("failing-steps", format!("{bound_failures:?}")),
        ],
    );
    let tail_start = iters.div_ceil(2);
    let bump = nonincreasing_from(&distances, tail_start);
    report.check(
        "monotone-tail",
        bump.is_none(),
        [
            ("tail-start", tail_start.to_string()),
            ("first-increase", format!("{bump:?}")),
            ("final-distance", distances.last().map(fmt_q).unwrap_or_default()),
        ],
    );
    report.note("rate constants are derived here, not taken from the source argument");
    report.tables.push(table);
    Ok(report)
}

/// `[mu_{g^n f}]` stays off the critical set of `a -> ab` (odd `a`-count)
/// while converging to `[mu_g]`.
pub fn run_off_critical_perturbation(
    basis: Basis,
    g: &Word,
    f: &Word,
    iters: usize,
    level: usize,
) -> Result<ConvergenceReport> {
    let (a, b) = (letter('a'), letter('b'));
    let mu_f = RationalCurrent::of_word(basis, f)?;
    let a_count = mu_f.coordinate(&Word::letter(a));
    if !a_count.is_integer() || a_count.to_integer().is_even() {
        return Err(Error::ParityPrecondition(fmt_q(&a_count)));
    }
    let mu_g = RationalCurrent::of_word(basis, g)?;
    let mut report = ConvergenceReport::new(
        "off-critical",
        "[mu_{g^n f}] lies off the critical set Y for every n and converges to [mu_g]",
    );
    report
        .param("rank", basis.rank())
        .param("g", g)
        .param("f", f)
        .param("iters", iters)
        .param("level", level);
    let g_witness = mu_g.critical_witness(a, b)?;
    if !g_witness.in_critical_set() {
        report.note("[mu_g] is already off the critical set; the perturbation is unnecessary");
    }

    let (r, s) = g.cyclic_reduce()?;
    let x = s.inverse().concat(f).concat(&s);
    let target_vec = mu_g.projective_vector(level)?;
    let mut table = Table::new("distances", &["n", "(a;nu)", "in-Y", "distance", "bound"]);
    let mut in_y = Vec::new();
    let mut distances = Vec::new();
    let mut bound_failures = Vec::new();
    for n in 0..=iters {
        let h = g.pow(n as i64).concat(f);
        let nu = RationalCurrent::of_word(basis, &h)?;
        let wit = nu.critical_witness(a, b)?;
        if wit.in_critical_set() {
            in_y.push(n);
        }
        let dist = nu.projective_vector(level)?.distance(&target_vec)?;
        let bound = if x.is_identity() {
            None
        } else {
            Some(periodic_perturbation_bound(level, r.len(), n, x.len(), h.cyclic_len()))
        };
        if bound.as_ref().is_some_and(|bd| dist > *bd) {
            bound_failures.push(n);
        }
        table.push(vec![
            n.to_string(),
            fmt_q(&(&wit.half_t * qi(2))),
            wit.in_critical_set().to_string(),
            fmt_q(&dist),
            bound.as_ref().map(fmt_q).unwrap_or_default(),
        ]);
        distances.push(dist);
    }
    report.check("off-critical-set", in_y.is_empty(), [("steps-in-Y", format!("{in_y:?}"))]);
    report.check(
        "distance-bound",
        bound_failures.is_empty(),
        [("failing-steps", format!("{bound_failures:?}"))],
    );
    let tail_start = iters.div_ceil(2);
    let bump = nonincreasing_from(&distances, tail_start);
    report.check(
        "monotone-tail",
        bump.is_none(),
        [
            ("tail-start", tail_start.to_string()),
            ("first-increase", format!("{bump:?}")),
            ("final-distance", distances.last().map(fmt_q).unwrap_or_default()),
        ],
    );
    report.note("rate constants are derived here, not taken from the source argument");
    report.tables.push(table);
    Ok(report)
}

/// `I((1/n) D^n T_A, (1/(n+1)) D^n mu_a) = 1/(n(n+1))`.
pub fn run_outlook_identity(basis: Basis, iters: usize, seed: u64) -> Result<ConvergenceReport> {
    let mut report = ConvergenceReport::new(
        "outlook-identity",
        "I((1/n) D^n T_A, (1/(n+1)) D^n mu_a) = I(T_A, mu_a)/(n(n+1)) -> 0",
    );
    report.param("rank", basis.rank()).param("iters", iters).param("seed", seed);
    let (a, b) = (letter('a'), letter('b'));
    let d = FreeAutomorphism::simple_twist(basis, a, b)?;
    let t_a = TreeLengthFunction::cayley(basis);
    let mu_a = mu(basis, "a")?;
    let mut table = Table::new("intersections", &["n", "I", "1/(n(n+1))"]);
    let mut failures = Vec::new();
    let mut dn = FreeAutomorphism::identity(basis);
    for n in 1..=iters {
        dn = d.compose(&dn)?;
        let tree = t_a.translate(&dn)?.scaled(&q(1, n as i64))?;
        let current = mu_a.act(&dn)?.scale(&q(1, n as i64 + 1))?;
        let value = tree.intersection(&current)?;
        let expected = q(1, (n * (n + 1)) as i64);
        if value != expected {
            failures.push(n);
        }
        table.push(vec![n.to_string(), fmt_q(&value), fmt_q(&expected)]);
    }
    report.check("identity-holds", failures.is_empty(), [("failing-n", format!("{failures:?}"))]);
    report.tables.push(table);

    let mut rng = sample::rng(seed);
    let d_tree = t_a.translate(&d)?;
    let mut spot_failures = Vec::new();
    for _ in 0..20 {
        let g = sample::random_nontrivial_word(&mut rng, basis, 12);
        let nu = RationalCurrent::of_word(basis, &g)?;
        if d_tree.intersection(&nu.act(&d)?)? != t_a.intersection(&nu)? {
            spot_failures.push(g.to_string());
        }
    }
    report.check(
        "out-invariance-spot-check",
        spot_failures.is_empty(),
        [("failing-words", spot_failures.join(" "))],
    );
    Ok(report)
}

/// Escape from the critical set followed by the twist iteration it selects.
/// Checks `d_1(n) <= M/(||nu|| + n delta)` where `M` is the mass off the
/// target letter and `delta` the first length increment.
pub fn run_minimality_walk(nu: &RationalCurrent, iters: usize) -> Result<ConvergenceReport> {
    let escape = escape_from_critical(nu)?;
    let mut report = ConvergenceReport::new(
        "minimality-walk",
        "every nonzero [nu] is carried by some simple twist iteration to [mu_x] for a basis letter x",
    );
    report
        .param("rank", nu.basis().rank())
        .param("current", nu)
        .param("iters", iters);
    report.check(
        "escape-found",
        true,
        [
            ("branch", format!("{:?}", escape.branch)),
            ("twist", format!("{}->{}{}", escape.twisted, escape.twisted, escape.twistor)),
            ("direction", escape.direction.to_string()),
            ("target", escape.target.to_string()),
            ("(t;nu)/2", fmt_q(&escape.witness.half_t)),
            ("(tz;nu)", fmt_q(&escape.witness.t_z)),
            ("(tz^-1;nu)", fmt_q(&escape.witness.t_z_inv)),
        ],
    );
    if let Some((tc, tc_inv)) = &escape.forced_vanishing {
        report.check(
            "critical-branch-forced-vanishing",
            tc.is_zero() && tc_inv.is_zero(),
            [("(tc;nu)", fmt_q(tc)), ("(tc^-1;nu)", fmt_q(tc_inv))],
        );
    }
    let target = RationalCurrent::of_word(nu.basis(), &Word::letter(escape.target))?;
    let orbit = current_orbit(&escape.iterated(), nu, iters, 1, Some(&target))?;
    let len0 = orbit[0].length.clone();
    let delta = orbit.get(1).map(|s| &s.length - &len0).unwrap_or_else(Rational::zero);
    let off_target = &len0 - nu.coordinate(&Word::letter(escape.target));
    let mut table = Table::new("orbit", &["n", "length", "distance-1", "bound"]);
    let mut failures = Vec::new();
    for s in &orbit {
        let bound = &off_target / (&len0 + qi(s.n as i64) * &delta);
        let dist = s.distance.clone().expect("target given");
        if dist > bound {
            failures.push(s.n);
        }
        table.push(vec![s.n.to_string(), fmt_q(&s.length), fmt_q(&dist), fmt_q(&bound)]);
    }
    report.check(
        "growth-and-rate",
        delta.is_positive() && failures.is_empty(),
        [
            ("first-increment", fmt_q(&delta)),
            ("failing-steps", format!("{failures:?}")),
            ("final-distance", orbit.last().and_then(|s| s.distance.as_ref()).map(fmt_q).unwrap_or_default()),
        ],
    );
    report.tables.push(table);
    Ok(report)
}

/// A seeded random nonzero current for `minimality-walk` when none is given.
pub fn sample_walk_current(basis: Basis, seed: u64) -> RationalCurrent {
    let mut rng = sample::rng(seed);
    let terms = rng.gen_range(1..=3);
    sample::random_current(&mut rng, basis, terms, 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(k: usize) -> Basis {
        Basis::new(k).unwrap()
    }

    #[test]
    fn escape_examples() {
        let e = escape_from_critical(&mu(b(3), "a").unwrap()).unwrap();
        assert_eq!((e.twisted, e.twistor, e.direction, e.branch), (letter('a'), letter('b'), 1, EscapeBranch::Forward));
        let e = escape_from_critical(&mu(b(3), "abaB").unwrap()).unwrap();
        assert_eq!(e.branch, EscapeBranch::Critical);
        assert_eq!((e.twisted, e.target, e.direction), (letter('a'), letter('c'), 1));
        assert_eq!(e.forced_vanishing, Some((qi(0), qi(0))));
        let e = escape_from_critical(&mu(b(3), "b").unwrap()).unwrap();
        assert_eq!(e.twisted, letter('b'));
        assert_ne!(e.target, letter('b'));
        let e = escape_from_critical(&mu(b(3), "aB").unwrap()).unwrap();
        assert_eq!(e.branch, EscapeBranch::Backward);
        assert_eq!(escape_from_critical(&mu(b(2), "a").unwrap()).unwrap_err(), Error::RankTooSmall { needed: 3, got: 2 });
        assert_eq!(escape_from_critical(&RationalCurrent::zero(b(3))).unwrap_err(), Error::ZeroCurrent);
    }

    #[test]
    fn identity_orbit_limit_is_t0() {
        let t = TreeLengthFunction::simple_twist(b(3), letter('a'), letter('b')).unwrap();
        let lim = tree_orbit_limit(&FreeAutomorphism::identity(b(3)), &t, 2, 16).unwrap();
        assert!(lim.bounded_orbit);
        assert_eq!(lim.vector, t.projective_vector(2).unwrap());
    }

    #[test]
    fn preconditions() {
        assert_eq!(run_theorem_main(b(3), 5, 2, 64).unwrap_err(), Error::RankTooSmall { needed: 5, got: 3 });
        assert!(matches!(
            run_primitive_limit(b(3), &Word::parse("ac").unwrap(), 5, 2),
            Err(Error::LettersOutsideAB(_))
        ));
        assert!(matches!(
            run_off_critical_perturbation(b(3), &Word::parse("abaB").unwrap(), &Word::parse("aa").unwrap(), 5, 2),
            Err(Error::ParityPrecondition(_))
        ));
    }
}
