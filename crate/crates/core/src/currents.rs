//! Rational geodesic currents: finite positive rational combinations of the
//! counting currents `mu_g`, with cylinder coordinates, length, the action
//! of automorphisms and a finite-level projective comparison.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::automorphism::FreeAutomorphism;
use crate::error::{Error, Result};
use crate::word::{Basis, CyclicWord, Letter, Word};
use crate::{fmt_q, qi, Rational};

/// A nontrivial conjugacy class up to inversion (`mu_g = mu_{g^-1}`),
/// represented by the smaller of its power-free root and that root's inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjugacyClass(CyclicWord);

impl ConjugacyClass {
    /// Splits `g` (up to conjugacy) as `f^m` with `f` not a proper power.
    pub fn of_word(g: &Word) -> Result<(ConjugacyClass, usize)> {
        let cyclic = CyclicWord::of(g)?;
        Ok(Self::of_cyclic(&cyclic))
    }

    pub fn of_cyclic(w: &CyclicWord) -> (ConjugacyClass, usize) {
        let (root, m) = w.root();
        let inv = root.inverse();
        (ConjugacyClass(root.min(inv)), m)
    }

    pub fn root(&self) -> &CyclicWord {
        &self.0
    }
}

impl fmt::Debug for ConjugacyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

impl fmt::Display for ConjugacyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

/// `sum_i s_i mu_{f_i}` with distinct power-free classes `f_i` and weights `s_i > 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalCurrent {
    basis: Basis,
    terms: BTreeMap<ConjugacyClass, Rational>,
}

impl RationalCurrent {
    pub fn zero(basis: Basis) -> Self {
        RationalCurrent {
            basis,
            terms: BTreeMap::new(),
        }
    }

    /// `mu_g`; a proper power `g = f^m` becomes `m mu_f`.
    pub fn of_word(basis: Basis, g: &Word) -> Result<Self> {
        basis.check_word(g)?;
        let (class, m) = ConjugacyClass::of_word(g)?;
        let mut terms = BTreeMap::new();
        terms.insert(class, qi(m as i64));
        Ok(RationalCurrent { basis, terms })
    }

    /// Shorthand for [`Self::of_word`] on a word literal.
    pub fn parse_word(basis: Basis, g: &str) -> Result<Self> {
        Self::of_word(basis, &Word::parse(g)?)
    }

    /// `sum weight * mu_word`; words are normalised to their classes and
    /// repeated classes merged.
    pub fn from_terms<'a, I>(basis: Basis, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Word, Rational)>,
    {
        let mut acc = Self::zero(basis);
        for (word, weight) in terms {
            let term = Self::of_word(basis, word)?.scale(&weight)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ConjugacyClass, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_basis(&self, other: Basis) -> Result<()> {
        if self.basis != other {
            return Err(Error::BasisMismatch {
                left: self.basis.rank(),
                right: other.rank(),
            });
        }
        Ok(())
    }

    /// `(v; nu)_A`, counted directly on each root.
    pub fn coordinate(&self, v: &Word) -> Rational {
        self.terms
            .iter()
            .map(|(class, s)| s * qi(class.root().occurrences(v) as i64))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// `||nu||_A = sum over a in A of (a; nu)_A`.
    pub fn length(&self) -> Rational {
        self.terms
            .iter()
            .map(|(class, s)| s * qi(class.root().len() as i64))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn add(&self, other: &RationalCurrent) -> Result<Self> {
        self.check_basis(other.basis)?;
        let mut terms = self.terms.clone();
        for (class, s) in &other.terms {
            *terms.entry(class.clone()).or_insert_with(Rational::zero) += s;
        }
        Ok(RationalCurrent {
            basis: self.basis,
            terms,
        })
    }

    pub fn scale(&self, r: &Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NonPositiveScalar(fmt_q(r)));
        }
        Ok(RationalCurrent {
            basis: self.basis,
            terms: self.terms.iter().map(|(c, s)| (c.clone(), s * r)).collect(),
        })
    }

    /// `phi nu`: each class is carried to the class of its image.
    pub fn act(&self, phi: &FreeAutomorphism) -> Result<Self> {
        self.check_basis(phi.basis())?;
        let mut terms: BTreeMap<ConjugacyClass, Rational> = BTreeMap::new();
        for (class, s) in &self.terms {
            let image = phi.apply_cyclic(class.root())?;
            let (root, m) = ConjugacyClass::of_cyclic(&image);
            *terms.entry(root).or_insert_with(Rational::zero) += s * qi(m as i64);
        }
        Ok(RationalCurrent {
            basis: self.basis,
            terms,
        })
    }

    /// All nonzero coordinates `(v; nu)_A` with `1 <= |v| <= level`.
    pub fn table(&self, level: usize) -> CylinderTable {
        let mut values: HashMap<Word, Rational> = HashMap::new();
        for (class, s) in &self.terms {
            for (word, count) in class.root().forward_profile(level) {
                let add = s * qi(count as i64);
                let inv = word.inverse();
                *values.entry(inv).or_insert_with(Rational::zero) += &add;
                *values.entry(word).or_insert_with(Rational::zero) += add;
            }
        }
        CylinderTable { level, values }
    }

    /// The level-`L` truncation of `nu / ||nu||_A`.
    pub fn projective_vector(&self, level: usize) -> Result<ProjectiveCurrentVector> {
        if self.is_zero() {
            return Err(Error::ZeroCurrent);
        }
        let table = self.table(level);
        let len = self.length();
        let mut entries = BTreeMap::new();
        for n in 1..=level {
            for v in self.basis.reduced_words(n) {
                if v > v.inverse() {
                    continue;
                }
                let value = table.get(&v) / &len;
                entries.insert(v, value);
            }
        }
        Ok(ProjectiveCurrentVector { level, entries })
    }

    /// Membership in the critical set of the twist `t -> t z`:
    /// `1/2 (t; nu) = (tz; nu) = (tz^-1; nu)`.
    pub fn critical_witness(&self, twisted: Letter, twistor: Letter) -> Result<CriticalWitness> {
        if self.is_zero() {
            return Err(Error::ZeroCurrent);
        }
        self.basis.check_letter(twisted)?;
        self.basis.check_letter(twistor)?;
        let t = Word::letter(twisted);
        let tz = Word::letter(twisted).concat(&Word::letter(twistor));
        let tz_inv = Word::letter(twisted).concat(&Word::letter(twistor.inverse()));
        Ok(CriticalWitness {
            half_t: self.coordinate(&t) / qi(2),
            t_z: self.coordinate(&tz),
            t_z_inv: self.coordinate(&tz_inv),
        })
    }
}

impl fmt::Display for RationalCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, s)| format!("{}*{}", fmt_q(s), c))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for RationalCurrent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalCurrent({self})")
    }
}

/// The triple `(1/2 (t;nu), (tz;nu), (tz^-1;nu))` deciding critical-set membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalWitness {
    pub half_t: Rational,
    pub t_z: Rational,
    pub t_z_inv: Rational,
}

impl CriticalWitness {
    pub fn in_critical_set(&self) -> bool {
        self.half_t == self.t_z && self.t_z == self.t_z_inv
    }
}

/// Coordinates of one current up to a fixed word length.
#[derive(Clone, Debug)]
pub struct CylinderTable {
    level: usize,
    values: HashMap<Word, Rational>,
}

impl CylinderTable {
    pub fn level(&self) -> usize {
        self.level
    }

    /// `(v; nu)_A`. Panics if `|v|` exceeds the table level.
    pub fn get(&self, v: &Word) -> Rational {
        assert!(v.len() <= self.level, "word {v} longer than table level {}", self.level);
        self.values.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    /// Words with a nonzero coordinate.
    pub fn support(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.values.iter()
    }
}

/// Level-`L` truncation of a normalised current: one entry per pair `{v, v^-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveCurrentVector {
    level: usize,
    entries: BTreeMap<Word, Rational>,
}

impl ProjectiveCurrentVector {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &BTreeMap<Word, Rational> {
        &self.entries
    }

    /// Entry for `v` or `v^-1`, zero for words above the level.
    pub fn entry(&self, v: &Word) -> Rational {
        let key = std::cmp::min(v.clone(), v.inverse());
        self.entries.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest absolute entry difference.
    pub fn distance(&self, other: &ProjectiveCurrentVector) -> Result<Rational> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut best = Rational::zero();
        for key in self.entries.keys().chain(other.entries.keys()) {
            let d = (self.entry(key) - other.entry(key)).abs();
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }
}

/// Distance between two projective vectors.
pub fn projective_distance(p: &ProjectiveCurrentVector, q: &ProjectiveCurrentVector) -> Result<Rational> {
    p.distance(q)
}
