//! Seeded generators of random elements and derivations for property checks.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;

use crate::derivations::Derivation;
use crate::gca::{bounded_monomials, Element, GeneratorTable, Rational};

/// A small nonzero rational with numerator in `[-3, 3]` and denominator in `[1, 2]`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3i64..=3);
    }
    Rational::new(BigInt::from(n), BigInt::from(rng.gen_range(1i64..=2)))
}

/// Random homogeneous element: each admissible monomial of word length at
/// most `max_length` is kept with probability one half.
pub fn element<R: Rng>(rng: &mut R, table: &Arc<GeneratorTable>, degree: i64, max_length: u32) -> Element {
    let mut terms = Vec::new();
    for m in bounded_monomials(table, degree, max_length) {
        if rng.gen_bool(0.5) {
            terms.push((m, rational(rng)));
        }
    }
    Element::from_terms(table, terms)
}

/// Random derivation of the given degree whose generator images have word
/// length at most `max_length`.
pub fn derivation<R: Rng>(
    rng: &mut R,
    table: &Arc<GeneratorTable>,
    degree: i64,
    max_length: u32,
) -> Derivation {
    let images = (0..table.len())
        .map(|i| element(rng, table, table.degree(i) + degree, max_length))
        .collect();
    Derivation::new(table, degree, images).expect("images are homogeneous by construction")
}
