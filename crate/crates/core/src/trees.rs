//! Translation-length functions of weighted Cayley trees and of Bass–Serre
//! trees of twist splittings `F = <H, t_i | t_i z_i t_i^-1 = zbar_i>`.
//!
//! Twist trees have two evaluators: cyclic Britton reduction, and the growth
//! rate of the weighted cyclic length under iteration of the multi-twist
//! `t_i -> t_i z_i`. They are independent and agree exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::automorphism::FreeAutomorphism;
use crate::currents::RationalCurrent;
use crate::error::{Error, Result};
use crate::limits::{eventual_slope, DEFAULT_CAP};
use crate::word::{Basis, CyclicWord, Letter, Word};
use crate::{fmt_q, qi, Rational};

/// One loop edge of a twist splitting: stable letter `t`, edge group `<z>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist {
    pub stable: Letter,
    pub twistor: Letter,
    pub edge_length: Rational,
}

impl Twist {
    pub fn new(stable: Letter, twistor: Letter, edge_length: Rational) -> Self {
        Twist {
            stable: stable.positive(),
            twistor: twistor.positive(),
            edge_length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSplittingCore {
    basis: Basis,
    twists: Vec<Twist>,
}

impl TwistSplittingCore {
    pub fn new(basis: Basis, twists: Vec<Twist>) -> Result<Self> {
        if twists.is_empty() {
            return Err(Error::InvalidSplitting("no stable letters".into()));
        }
        for (i, tw) in twists.iter().enumerate() {
            basis.check_letter(tw.stable)?;
            basis.check_letter(tw.twistor)?;
            if tw.stable == tw.twistor {
                return Err(Error::DegenerateTwist(tw.stable.to_char()));
            }
            if !tw.edge_length.is_positive() {
                return Err(Error::NonPositiveScalar(fmt_q(&tw.edge_length)));
            }
            for other in &twists[i + 1..] {
                if other.stable == tw.stable {
                    return Err(Error::InvalidSplitting(format!("stable letter {} repeated", tw.stable)));
                }
                if other.twistor == tw.twistor {
                    return Err(Error::InvalidSplitting(format!("twistor {} repeated", tw.twistor)));
                }
            }
            if twists.iter().any(|o| o.stable == tw.twistor) {
                return Err(Error::InvalidSplitting(format!(
                    "twistor {} is a stable letter",
                    tw.twistor
                )));
            }
        }
        Ok(TwistSplittingCore { basis, twists })
    }

    /// The splitting of the simple twist `t -> t z` with edge length 1.
    pub fn simple(basis: Basis, stable: Letter, twistor: Letter) -> Result<Self> {
        Self::new(basis, vec![Twist::new(stable, twistor, qi(1))])
    }

    /// Stable letters `a` and `e` with edge groups `<b>` and `<d>`, edge
    /// lengths `rho` and `theta`.
    pub fn two_edge(basis: Basis, rho: Rational, theta: Rational) -> Result<Self> {
        basis.ensure_rank(5)?;
        let g = Letter::generator;
        Self::new(basis, vec![Twist::new(g(1), g(2), rho), Twist::new(g(5), g(4), theta)])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn twists(&self) -> &[Twist] {
        &self.twists
    }

    fn twist_of_stable(&self, l: Letter) -> Option<usize> {
        self.twists.iter().position(|t| t.stable == l.positive())
    }

    /// The multi-twist `t_i -> t_i z_i`.
    pub fn multi_twist(&self) -> FreeAutomorphism {
        let pairs: Vec<(Letter, Letter)> = self.twists.iter().map(|t| (t.stable, t.twistor)).collect();
        FreeAutomorphism::multi_twist(self.basis, &pairs).expect("validated splitting")
    }

    /// Number of stable letters of each edge surviving cyclic Britton reduction.
    pub fn britton_counts(&self, w: &CyclicWord) -> Vec<usize> {
        let mut syms: Vec<Sym> = w.letters().iter().map(|&l| Sym::from_letter(l)).collect();
        loop {
            cyclic_free_reduce(&mut syms);
            match self.find_pinch(&syms) {
                Some(pinch) => apply_pinch(&mut syms, pinch),
                None => break,
            }
        }
        let mut counts = vec![0; self.twists.len()];
        for s in &syms {
            if let Some(l) = s.as_letter() {
                if let Some(i) = self.twist_of_stable(l) {
                    counts[i] += 1;
                }
            }
        }
        counts
    }

    /// Finds `t z^m t^-1` (becomes `zbar^m`) or `t^-1 zbar^m t` (becomes
    /// `z^m`) somewhere on the circle.
    fn find_pinch(&self, syms: &[Sym]) -> Option<Pinch> {
        let n = syms.len();
        let stable_at: Vec<(usize, Letter, usize)> = syms
            .iter()
            .enumerate()
            .filter_map(|(pos, s)| {
                let l = s.as_letter()?;
                self.twist_of_stable(l).map(|i| (pos, l, i))
            })
            .collect();
        if stable_at.len() < 2 {
            return None;
        }
        for (j, &(p, lp, i)) in stable_at.iter().enumerate() {
            let (q, lq, _) = stable_at[(j + 1) % stable_at.len()];
            if lq != lp.inverse() {
                continue;
            }
            let seg_len = (q + n - p - 1) % n;
            if seg_len == 0 {
                continue;
            }
            let first = syms[(p + 1) % n];
            if !(1..seg_len).all(|k| syms[(p + 1 + k) % n] == first) {
                continue;
            }
            let z = Sym::from_letter(self.twists[i].twistor);
            let bar = Sym::bar(i);
            let replacement = if !lp.is_inverse() {
                if first == z {
                    bar
                } else if first == z.inverse() {
                    bar.inverse()
                } else {
                    continue;
                }
            } else if first == bar {
                z
            } else if first == bar.inverse() {
                z.inverse()
            } else {
                continue;
            };
            return Some(Pinch {
                start: p,
                span: seg_len + 2,
                replacement,
                count: seg_len,
            });
        }
        None
    }
}

impl fmt::Display for TwistSplittingCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .twists
            .iter()
            .map(|t| format!("({}:{},{})", t.stable, t.twistor, fmt_q(&t.edge_length)))
            .collect();
        write!(f, "twist {}", parts.join(" "))
    }
}

/// Symbol of the extended alphabet: basis letters (`±1..=±26`) and the
/// conjugated twistors `zbar_i` (`±(BAR + i)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Sym(i16);

const BAR: i16 = 100;

impl Sym {
    fn from_letter(l: Letter) -> Self {
        let v = l.index() as i16;
        Sym(if l.is_inverse() { -v } else { v })
    }

    fn bar(i: usize) -> Self {
        Sym(BAR + i as i16)
    }

    fn inverse(self) -> Self {
        Sym(-self.0)
    }

    fn as_letter(self) -> Option<Letter> {
        if self.0.abs() >= BAR {
            return None;
        }
        let l = Letter::generator(self.0.unsigned_abs() as usize);
        Some(if self.0 < 0 { l.inverse() } else { l })
    }
}

struct Pinch {
    start: usize,
    span: usize,
    replacement: Sym,
    count: usize,
}

fn apply_pinch(syms: &mut Vec<Sym>, pinch: Pinch) {
    syms.rotate_left(pinch.start);
    syms.splice(0..pinch.span, std::iter::repeat_n(pinch.replacement, pinch.count));
}

fn cyclic_free_reduce(syms: &mut Vec<Sym>) {
    let mut buf: Vec<Sym> = Vec::with_capacity(syms.len());
    for &s in syms.iter() {
        if buf.last().is_some_and(|&p| p == s.inverse()) {
            buf.pop();
        } else {
            buf.push(s);
        }
    }
    let mut lo = 0;
    let mut hi = buf.len();
    while hi - lo >= 2 && buf[lo] == buf[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    *syms = buf[lo..hi].to_vec();
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Core {
    /// Cayley tree of the basis with per-letter edge lengths.
    Cayley(Vec<Rational>),
    Twist(TwistSplittingCore),
}

/// `g -> scale * ||marking^-1(g)||_core`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLengthFunction {
    basis: Basis,
    core: Core,
    marking: FreeAutomorphism,
    scale: Rational,
}

impl TreeLengthFunction {
    /// `T_A`: every edge of length 1.
    pub fn cayley(basis: Basis) -> Self {
        Self::weighted_cayley(basis, vec![qi(1); basis.rank()]).expect("unit weights")
    }

    pub fn weighted_cayley(basis: Basis, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != basis.rank() {
            return Err(Error::InvalidSplitting(format!(
                "{} weights for rank {}",
                weights.len(),
                basis.rank()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::NonPositiveScalar(fmt_q(bad)));
        }
        Ok(TreeLengthFunction {
            basis,
            core: Core::Cayley(weights),
            marking: FreeAutomorphism::identity(basis),
            scale: Rational::one(),
        })
    }

    pub fn twist(core: TwistSplittingCore) -> Self {
        let basis = core.basis;
        TreeLengthFunction {
            basis,
            core: Core::Twist(core),
            marking: FreeAutomorphism::identity(basis),
            scale: Rational::one(),
        }
    }

    /// `T_D` for the simple twist `t -> t z`.
    pub fn simple_twist(basis: Basis, stable: Letter, twistor: Letter) -> Result<Self> {
        Ok(Self::twist(TwistSplittingCore::simple(basis, stable, twistor)?))
    }

    /// `Delta(rho, theta)`.
    pub fn two_edge(basis: Basis, rho: Rational, theta: Rational) -> Result<Self> {
        Ok(Self::twist(TwistSplittingCore::two_edge(basis, rho, theta)?))
    }

    /// Replaces the marking: the result evaluates `g` as `self` evaluates
    /// `marking^-1(g)` on the unmarked core.
    pub fn with_marking(mut self, marking: FreeAutomorphism) -> Result<Self> {
        if marking.basis() != self.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.rank(),
                right: marking.basis().rank(),
            });
        }
        self.marking = marking;
        Ok(self)
    }

    /// `phi T`, with `||w||_{phi T} = ||phi^-1(w)||_T`.
    pub fn translate(&self, phi: &FreeAutomorphism) -> Result<Self> {
        let marking = phi.compose(&self.marking)?;
        Ok(TreeLengthFunction {
            marking,
            ..self.clone()
        })
    }

    pub fn scaled(&self, r: &Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveScalar(fmt_q(r)));
        }
        Ok(TreeLengthFunction {
            scale: &self.scale * r,
            ..self.clone()
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn core(&self) -> &Core {
        &self.core
    }

    pub fn marking(&self) -> &FreeAutomorphism {
        &self.marking
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// `marking^-1(g)`, cyclically reduced.
    fn unmarked(&self, g: &Word) -> Result<CyclicWord> {
        let h = self.marking.apply_inverse(g)?;
        CyclicWord::of(&h)
    }

    fn twist_core(&self) -> Result<&TwistSplittingCore> {
        match &self.core {
            Core::Twist(core) => Ok(core),
            Core::Cayley(_) => Err(Error::InvalidSplitting("not a twist splitting".into())),
        }
    }

    /// `||g||_T`.
    pub fn length(&self, g: &Word) -> Result<Rational> {
        match &self.core {
            Core::Cayley(weights) => {
                let h = self.unmarked(g)?;
                let total = h
                    .letters()
                    .iter()
                    .map(|l| weights[l.index() - 1].clone())
                    .fold(Rational::zero(), |a, x| a + x);
                Ok(total * &self.scale)
            }
            Core::Twist(_) => self.length_britton(g),
        }
    }

    /// Translation length on the Bass–Serre tree, by cyclic Britton reduction.
    pub fn length_britton(&self, g: &Word) -> Result<Rational> {
        let core = self.twist_core()?;
        let h = self.unmarked(g)?;
        let counts = core.britton_counts(&h);
        let total = core
            .twists
            .iter()
            .zip(counts)
            .map(|(t, c)| &t.edge_length * qi(c as i64))
            .fold(Rational::zero(), |a, x| a + x);
        Ok(total * &self.scale)
    }

    /// Translation length as the eventual growth rate of the weighted cyclic
    /// length of `Phi^n(marking^-1(g))`, where `Phi` is the multi-twist and
    /// only twistors carry weight (their edge lengths).
    pub fn length_limit(&self, g: &Word, cap: usize) -> Result<Rational> {
        let core = self.twist_core()?;
        let phi = core.multi_twist();
        let mut weights = vec![Rational::zero(); self.basis.rank()];
        for t in &core.twists {
            weights[t.twistor.index() - 1] = t.edge_length.clone();
        }
        let start = self.unmarked(g)?;
        let transient = start.len();
        let mut current = start;
        let subject = g.to_string();
        let stab = eventual_slope(&subject, transient, cap, |n| {
            if n > 0 {
                current = phi.apply_cyclic(&current)?;
            }
            Ok(current
                .letters()
                .iter()
                .map(|l| weights[l.index() - 1].clone())
                .fold(Rational::zero(), |a, x| a + x))
        })?;
        Ok(stab.slope * &self.scale)
    }

    /// Exact normalised length vector on every power-free class of cyclic
    /// length `<= level`, one class per inverse pair.
    pub fn projective_vector(&self, level: usize) -> Result<ProjectiveTreeVector> {
        let classes = self.basis.power_free_classes(level);
        let lengths = classes
            .par_iter()
            .map(|c| self.length(&c.to_word()))
            .collect::<Result<Vec<_>>>()?;
        ProjectiveTreeVector::normalize(level, classes.into_iter().zip(lengths).collect())
    }

    /// `I(T, nu) = sum_i s_i ||f_i||_T`.
    pub fn intersection(&self, nu: &RationalCurrent) -> Result<Rational> {
        if nu.basis() != self.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.rank(),
                right: nu.basis().rank(),
            });
        }
        let mut total = Rational::zero();
        for (class, s) in nu.terms() {
            total += s * self.length(&class.root().to_word())?;
        }
        Ok(total)
    }
}

/// Limit of a length-function sequence, evaluated with a cap.
pub fn length_limit(t: &TreeLengthFunction, g: &Word) -> Result<Rational> {
    t.length_limit(g, DEFAULT_CAP)
}

/// Finite-level projective class of a length function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveTreeVector {
    level: usize,
    entries: BTreeMap<CyclicWord, Rational>,
}

impl ProjectiveTreeVector {
    /// Normalises raw nonnegative values to sum 1.
    pub fn normalize(level: usize, raw: Vec<(CyclicWord, Rational)>) -> Result<Self> {
        let total = raw.iter().fold(Rational::zero(), |a, (_, x)| a + x);
        if total.is_zero() {
            return Err(Error::AllElliptic);
        }
        Ok(ProjectiveTreeVector {
            level,
            entries: raw.into_iter().map(|(c, x)| (c, x / &total)).collect(),
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &BTreeMap<CyclicWord, Rational> {
        &self.entries
    }

    /// Entry of the class of `w` or of its inverse.
    pub fn entry(&self, w: &CyclicWord) -> Option<&Rational> {
        self.entries.get(w).or_else(|| self.entries.get(&w.inverse()))
    }

    /// Classes on which the two vectors differ.
    pub fn differences<'a>(&'a self, other: &'a ProjectiveTreeVector) -> Vec<&'a CyclicWord> {
        self.entries
            .iter()
            .filter(|(c, x)| other.entries.get(*c) != Some(*x))
            .map(|(c, _)| c)
            .collect()
    }
}

/// Exact equality of two finite-level projective classes.
pub fn tree_projective_eq(p: &ProjectiveTreeVector, q: &ProjectiveTreeVector) -> bool {
    p == q
}
