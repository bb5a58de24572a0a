//! Naive reference implementations on plain `char` strings, sharing no code
//! with the library.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn inv_char(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

pub fn inverse(w: &str) -> String {
    w.chars().rev().map(inv_char).collect()
}

pub fn reduce(w: &str) -> String {
    let mut stack: Vec<char> = Vec::new();
    for c in w.chars() {
        if stack.last() == Some(&inv_char(c)) {
            stack.pop();
        } else {
            stack.push(c);
        }
    }
    stack.into_iter().collect()
}

pub fn cyclic_reduce(w: &str) -> String {
    let mut v: Vec<char> = reduce(w).chars().collect();
    while v.len() >= 2 && v[0] == inv_char(v[v.len() - 1]) {
        v.remove(0);
        v.pop();
    }
    v.into_iter().collect()
}

/// Every rotation of `w`.
pub fn rotations(w: &str) -> Vec<String> {
    let v: Vec<char> = w.chars().collect();
    (0..v.len()).map(|i| v[i..].iter().chain(&v[..i]).collect()).collect()
}

pub fn conjugate(u: &str, w: &str) -> bool {
    let (u, w) = (cyclic_reduce(u), cyclic_reduce(w));
    u.len() == w.len() && (u.is_empty() || rotations(&u).contains(&w))
}

/// Windows of length `|v|` starting at each of the `|w|` positions of the
/// cyclic word `w`, read with wraparound.
pub fn forward(v: &str, w: &str) -> usize {
    let (v, w): (Vec<char>, Vec<char>) = (v.chars().collect(), w.chars().collect());
    (0..w.len())
        .filter(|&i| (0..v.len()).all(|j| w[(i + j) % w.len()] == v[j]))
        .count()
}

/// `(v; w)` for a cyclically reduced `w`.
pub fn count(v: &str, w: &str) -> usize {
    forward(v, w) + forward(&inverse(v), w)
}

pub fn letters(rank: usize) -> Vec<char> {
    (0..rank)
        .flat_map(|i| {
            let c = (b'a' + i as u8) as char;
            [c, c.to_ascii_uppercase()]
        })
        .collect()
}

pub fn reduced_words(rank: usize, max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for c in letters(rank) {
                if !w.ends_with(inv_char(c)) {
                    next.push(format!("{w}{c}"));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Normalised coordinates of `sum s_i mu_{w_i}` on all reduced words of
/// length `<= level`.
pub fn vector(rank: usize, level: usize, terms: &[(Q, &str)]) -> Vec<(String, Q)> {
    let cyc: Vec<(Q, String)> = terms.iter().map(|(s, w)| (s.clone(), cyclic_reduce(w))).collect();
    let total: Q = cyc.iter().map(|(s, w)| s * Q::from_integer((w.len() as i64).into())).sum();
    reduced_words(rank, level)
        .into_iter()
        .map(|v| {
            let c: Q = cyc.iter().map(|(s, w)| s * Q::from_integer((count(&v, w) as i64).into())).sum();
            (v, c / &total)
        })
        .collect()
}

pub fn distance(p: &[(String, Q)], r: &[(String, Q)]) -> Q {
    p.iter()
        .zip(r)
        .map(|((u, x), (v, y))| {
            assert_eq!(u, v);
            (x - y).abs()
        })
        .fold(Q::zero(), |a, x| if x > a { x } else { a })
}

/// Distance between the normalised counting currents of two words.
pub fn word_distance(rank: usize, level: usize, u: &str, w: &str) -> Q {
    let one = q(1, 1);
    distance(&vector(rank, level, &[(one.clone(), u)]), &vector(rank, level, &[(one, w)]))
}
