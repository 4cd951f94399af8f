//! Canonical forms for smooth terms.
//!
//! `normalize` folds constants, removes double negation, flattens and
//! orders sums and products, applies the 0/1 identity and absorption laws,
//! and collects like monomials, by passing through [`Poly`]. Primitive
//! applications are atoms whose arguments are normalized recursively;
//! primitives of exact constants fold when the value is rational
//! (`exp 0 = 1`, `recip1psq c = 1/(1+c²)`, …).

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constant::Constant;
use crate::poly::{rebuild, Atom, Poly, Rebuild};
use crate::scalar::Scalar;
use crate::term::SmoothTerm;

impl Atom for SmoothTerm {}

impl Rebuild for SmoothTerm {
    type Atom = SmoothTerm;

    fn from_constant(c: Constant) -> Self {
        SmoothTerm::Const(c)
    }

    fn from_atom(a: &SmoothTerm) -> Self {
        a.clone()
    }

    fn make_add(a: Self, b: Self) -> Self {
        a + b
    }

    fn make_mul(a: Self, b: Self) -> Self {
        a * b
    }

    fn make_neg(a: Self) -> Self {
        -a
    }
}

/// Polynomial normal form of a term.
pub fn to_poly(term: &SmoothTerm) -> Poly<SmoothTerm> {
    match term {
        SmoothTerm::Var(_) => Poly::atom(term.clone()),
        SmoothTerm::Const(c) => Poly::constant(c.value().clone()),
        SmoothTerm::Add(a, b) => to_poly(a).add(&to_poly(b)),
        SmoothTerm::Mul(a, b) => {
            let pa = to_poly(a);
            if pa.is_zero() {
                return pa;
            }
            pa.mul(&to_poly(b))
        }
        SmoothTerm::Neg(a) => to_poly(a).neg(),
        SmoothTerm::Prim(p, a) => {
            let arg = to_poly(a);
            if let Some(c) = arg.as_constant() {
                if let Ok(v) = BigRational::apply_primitive(*p, &c) {
                    return Poly::constant(v);
                }
            }
            Poly::atom(SmoothTerm::Prim(*p, Arc::new(rebuild(&arg))))
        }
    }
}

pub fn normalize(term: &SmoothTerm) -> SmoothTerm {
    rebuild(&to_poly(term))
}

/// `normalize(a - b)` is the zero constant.
pub fn syntactically_equal(a: &SmoothTerm, b: &SmoothTerm) -> bool {
    to_poly(a).sub(&to_poly(b)).is_zero()
}

pub fn is_zero(term: &SmoothTerm) -> bool {
    to_poly(term).is_zero()
}

pub fn is_one(term: &SmoothTerm) -> bool {
    to_poly(term).as_constant().is_some_and(|c| c.is_one())
}

pub(crate) fn is_const_zero(term: &SmoothTerm) -> bool {
    term.as_constant().is_some_and(|c| c.value().is_zero())
}
