//! Seeded random terms for property checks.

use rand::Rng;

use crate::constant::Constant;
use crate::term::{Primitive, SmoothTerm};

/// A constant `k/4` with `|k| ≤ 12`.
pub fn random_constant<R: Rng>(rng: &mut R) -> Constant {
    Constant::ratio(rng.random_range(-12..=12), 4)
}

/// A term of arity ≤ `arity` and depth ≤ `depth` drawing primitives from
/// `prims`.
pub fn random_term<R: Rng>(rng: &mut R, arity: usize, depth: usize, prims: &[Primitive]) -> SmoothTerm {
    let leaf = |rng: &mut R| {
        if arity > 0 && rng.random_bool(0.7) {
            SmoothTerm::Var(rng.random_range(0..arity))
        } else {
            SmoothTerm::Const(random_constant(rng))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let choices = if prims.is_empty() { 4 } else { 5 };
    match rng.random_range(0..choices) {
        0 => leaf(rng),
        1 => random_term(rng, arity, depth - 1, prims) + random_term(rng, arity, depth - 1, prims),
        2 => random_term(rng, arity, depth - 1, prims) * random_term(rng, arity, depth - 1, prims),
        3 => -random_term(rng, arity, depth - 1, prims),
        _ => {
            let p = prims[rng.random_range(0..prims.len())];
            SmoothTerm::prim(p, random_term(rng, arity, depth - 1, prims))
        }
    }
}
