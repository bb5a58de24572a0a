//! Automorphisms of a free group given by generator images together with
//! the images of an inverse, both checked on construction.

use std::fmt;

use crate::error::{Error, Result};
use crate::word::{free_reduce, Basis, CyclicWord, Letter, Word};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeAutomorphism {
    basis: Basis,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

fn substitute(images: &[Word], u: &Word) -> Word {
    free_reduce(u.letters().iter().flat_map(|&l| {
        let img = &images[l.index() - 1];
        let letters: Vec<Letter> = if l.is_inverse() {
            img.inverse().letters().to_vec()
        } else {
            img.letters().to_vec()
        };
        letters
    }))
}

impl FreeAutomorphism {
    /// Validates that `images` and `inverse_images` are mutually inverse on
    /// every generator.
    pub fn new(basis: Basis, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self> {
        let k = basis.rank();
        if images.len() != k || inverse_images.len() != k {
            return Err(Error::NotAutomorphism(format!(
                "expected {k} images and {k} inverse images, got {} and {}",
                images.len(),
                inverse_images.len()
            )));
        }
        for w in images.iter().chain(&inverse_images) {
            basis.check_word(w)?;
        }
        for g in basis.generators() {
            let x = Word::letter(g);
            let there = substitute(&images, &substitute(&inverse_images, &x));
            let back = substitute(&inverse_images, &substitute(&images, &x));
            if there != x || back != x {
                return Err(Error::NotAutomorphism(format!(
                    "generator {g}: phi(psi({g})) = {there}, psi(phi({g})) = {back}"
                )));
            }
        }
        Ok(FreeAutomorphism {
            basis,
            images,
            inverse_images,
        })
    }

    pub fn identity(basis: Basis) -> Self {
        let gens: Vec<Word> = basis.generators().map(Word::letter).collect();
        FreeAutomorphism {
            basis,
            images: gens.clone(),
            inverse_images: gens,
        }
    }

    /// `t -> t z`, every other generator fixed. `t` and `z` are generators.
    pub fn simple_twist(basis: Basis, twisted: Letter, twistor: Letter) -> Result<Self> {
        Self::multi_twist(basis, &[(twisted, twistor)])
    }

    /// Simultaneous twists `t_i -> t_i z_i`. The twisted letters must be
    /// distinct and none may serve as a twistor.
    pub fn multi_twist(basis: Basis, twists: &[(Letter, Letter)]) -> Result<Self> {
        let mut images: Vec<Word> = basis.generators().map(Word::letter).collect();
        let mut inverse_images = images.clone();
        for &(t, z) in twists {
            basis.check_letter(t)?;
            basis.check_letter(z)?;
            let (t, z) = (t.positive(), z.positive());
            if t == z {
                return Err(Error::DegenerateTwist(t.to_char()));
            }
            if twists.iter().any(|&(other, _)| other.positive() == z) {
                return Err(Error::NotAutomorphism(format!(
                    "twistor {z} is itself twisted"
                )));
            }
            if images[t.index() - 1].len() != 1 {
                return Err(Error::NotAutomorphism(format!("{t} twisted twice")));
            }
            images[t.index() - 1] = free_reduce([t, z]);
            inverse_images[t.index() - 1] = free_reduce([t, z.inverse()]);
        }
        Self::new(basis, images, inverse_images)
    }

    /// The two-letter twist `a -> ab`, `e -> ed` on a basis of rank at least 5.
    pub fn twist_ab_ed(basis: Basis) -> Result<Self> {
        basis.ensure_rank(5)?;
        let g = Letter::generator;
        Self::multi_twist(basis, &[(g(1), g(2)), (g(5), g(4))])
    }

    fn from_literals(basis: Basis, images: &[&str], inverse_images: &[&str]) -> Result<Self> {
        let extend = |given: &[&str]| -> Result<Vec<Word>> {
            let mut out = given.iter().map(|s| Word::parse(s)).collect::<Result<Vec<_>>>()?;
            out.extend(basis.generators().skip(given.len()).map(Word::letter));
            Ok(out)
        };
        Self::new(basis, extend(images)?, extend(inverse_images)?)
    }

    /// Maps the generators of `A` to the elements of the basis
    /// `A' = {a', b', c', d', e', a_6, ...}` defined by
    /// `a = a', e = e', b = b'a'c', d = a'b'd', c = a'b'`.
    /// In particular `b' = a^-1 c`.
    pub fn prime_basis_change(basis: Basis) -> Result<Self> {
        basis.ensure_rank(5)?;
        Self::from_literals(
            basis,
            &["a", "Ac", "ACab", "Cd", "e"],
            &["a", "bac", "ab", "abd", "e"],
        )
    }

    /// As [`Self::prime_basis_change`] for `A''`, which differs only in
    /// `c = e''b''`; here `b'' = e^-1 c`.
    pub fn double_prime_basis_change(basis: Basis) -> Result<Self> {
        basis.ensure_rank(5)?;
        Self::from_literals(
            basis,
            &["a", "Ec", "ACeb", "CeAd", "e"],
            &["a", "bac", "eb", "abd", "e"],
        )
    }

    /// Maps the generators to the basis `A'` with `c' = ca` and every other letter kept.
    pub fn ca_basis_change(basis: Basis) -> Result<Self> {
        basis.ensure_rank(3)?;
        Self::from_literals(basis, &["a", "b", "ca"], &["a", "b", "cA"])
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
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

    pub fn apply(&self, u: &Word) -> Result<Word> {
        self.basis.check_word(u)?;
        Ok(substitute(&self.images, u))
    }

    /// `phi^-1(u)`, without building the inverse automorphism.
    pub fn apply_inverse(&self, u: &Word) -> Result<Word> {
        self.basis.check_word(u)?;
        Ok(substitute(&self.inverse_images, u))
    }

    pub fn apply_cyclic(&self, w: &CyclicWord) -> Result<CyclicWord> {
        CyclicWord::of(&self.apply(&w.to_word())?)
    }

    pub fn apply_inverse_cyclic(&self, w: &CyclicWord) -> Result<CyclicWord> {
        CyclicWord::of(&self.apply_inverse(&w.to_word())?)
    }

    /// `self ∘ other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<Self> {
        self.check_basis(other.basis)?;
        let images = other.images.iter().map(|w| substitute(&self.images, w)).collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, w))
            .collect();
        Ok(FreeAutomorphism {
            basis: self.basis,
            images,
            inverse_images,
        })
    }

    pub fn inverse(&self) -> Self {
        FreeAutomorphism {
            basis: self.basis,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// `phi^n` for any integer `n`; `phi^0` is the identity.
    pub fn power(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.basis);
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).expect("same basis");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq).expect("same basis");
            }
        }
        acc
    }

    /// Recognises `t -> t z^{±1}` with every other generator fixed; returns
    /// the twisted generator and the (signed) twistor letter.
    pub fn as_simple_twist(&self) -> Option<(Letter, Letter)> {
        let mut found = None;
        for (i, img) in self.images.iter().enumerate() {
            let g = Letter::generator(i + 1);
            if img.letters() == [g] {
                continue;
            }
            match img.letters() {
                [t, z] if *t == g && z.index() != g.index() && found.is_none() => {
                    found = Some((g, *z))
                }
                _ => return None,
            }
        }
        found
    }
}

impl fmt::Display for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = |images: &[Word]| {
            images
                .iter()
                .enumerate()
                .map(|(i, w)| format!("{}->{}", Letter::generator(i + 1), w))
                .collect::<Vec<_>>()
                .join("; ")
        };
        write!(f, "{} | {}", table(&self.images), table(&self.inverse_images))
    }
}

impl fmt::Debug for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeAutomorphism({self})")
    }
}
