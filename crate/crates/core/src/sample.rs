//! Seeded random words and currents for property suites and experiments.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::currents::RationalCurrent;
use crate::word::{Basis, Letter, Word};
use crate::{q, Rational};

/// Deterministic generator used throughout; stable across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_letter<R: Rng>(rng: &mut R, basis: Basis) -> Letter {
    let g = Letter::generator(rng.gen_range(1..=basis.rank()));
    if rng.gen_bool(0.5) {
        g.inverse()
    } else {
        g
    }
}

/// Uniform freely reduced word of exactly `len` letters.
pub fn random_word<R: Rng>(rng: &mut R, basis: Basis, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = random_letter(rng, basis);
        if letters.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    crate::word::free_reduce(letters)
}

/// Reduced word of length drawn uniformly from `1..=max_len`.
pub fn random_nontrivial_word<R: Rng>(rng: &mut R, basis: Basis, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    random_word(rng, basis, len)
}

pub fn random_weight<R: Rng>(rng: &mut R) -> Rational {
    q(rng.gen_range(1..=9), rng.gen_range(1..=6))
}

/// Nonzero current with 1 to `max_terms` terms, roots of length at most
/// `max_root_len`, small positive rational weights.
pub fn random_current<R: Rng>(rng: &mut R, basis: Basis, max_terms: usize, max_root_len: usize) -> RationalCurrent {
    let terms = rng.gen_range(1..=max_terms);
    let mut acc = RationalCurrent::zero(basis);
    for _ in 0..terms {
        let g = random_nontrivial_word(rng, basis, max_root_len);
        let weight = random_weight(rng);
        let term = RationalCurrent::of_word(basis, &g)
            .and_then(|t| t.scale(&weight))
            .expect("nontrivial word, positive weight");
        acc = acc.add(&term).expect("same basis");
    }
    acc
}
