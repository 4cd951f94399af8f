//! Pointwise evaluation of smooth terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::term::SmoothTerm;

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<S = f64>(Vec<S>);

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.iter().all(Scalar::is_finite_value) {
            Ok(Point(coords))
        } else {
            Err(Error::NonFinitePoint)
        }
    }

    pub fn coords(&self) -> &[S] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<S> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl<S> AsRef<[S]> for Point<S> {
    fn as_ref(&self) -> &[S] {
        &self.0
    }
}

/// Value of `term` at `point`.
///
/// Fails with `ArityMismatch` if the term mentions a generator beyond the
/// point's dimension, and with `NonFiniteResult` on overflow; callers that
/// sample should discard such points.
pub fn eval<S: Scalar>(term: &SmoothTerm, point: &[S]) -> Result<S> {
    let needed = term.arity();
    if needed > point.len() {
        return Err(Error::ArityMismatch { needed, given: point.len() });
    }
    if !point.iter().all(Scalar::is_finite_value) {
        return Err(Error::NonFinitePoint);
    }
    let value = eval_unchecked(term, point)?;
    if value.is_finite_value() {
        Ok(value)
    } else {
        Err(Error::NonFiniteResult)
    }
}

fn eval_unchecked<S: Scalar>(term: &SmoothTerm, point: &[S]) -> Result<S> {
    Ok(match term {
        SmoothTerm::Var(i) => point[*i].clone(),
        SmoothTerm::Const(c) => S::from_constant(c),
        SmoothTerm::Add(a, b) => eval_unchecked(a, point)? + eval_unchecked(b, point)?,
        SmoothTerm::Mul(a, b) => eval_unchecked(a, point)? * eval_unchecked(b, point)?,
        SmoothTerm::Neg(a) => -eval_unchecked(a, point)?,
        SmoothTerm::Prim(p, a) => S::apply_primitive(*p, &eval_unchecked(a, point)?)?,
    })
}

/// Evaluates every term of a tuple at the same point.
pub fn eval_all<S: Scalar>(terms: &[SmoothTerm], point: &[S]) -> Result<Vec<S>> {
    terms.iter().map(|t| eval(t, point)).collect()
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::term::SmoothTerm as T;

    #[test]
    fn arithmetic_and_primitives() {
        assert_eq!(eval(&(T::var(0) * T::var(1)), &[2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(eval(&T::exp(T::zero()), &[] as &[f64]).unwrap(), 1.0);
    }

    #[test]
    fn localization_relation_vanishes_at_fraction_point() {
        let rel = T::var(0) * T::var(1) - T::one();
        assert_eq!(eval(&rel, &[0.5, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            eval(&T::var(1), &[1.0]),
            Err(Error::ArityMismatch { needed: 2, given: 1 })
        );
        assert_eq!(eval(&T::exp(T::var(0)), &[1000.0]), Err(Error::NonFiniteResult));
        assert_eq!(eval(&T::var(0), &[f64::NAN]), Err(Error::NonFinitePoint));
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn generic_over_scalars() {
        let t = T::recip1psq(T::var(0)) * T::int(5);
        assert_eq!(eval(&t, &[2.0f32]).unwrap(), 1.0);
        let two = BigRational::from_integer(2.into());
        assert_eq!(eval(&t, &[two]).unwrap(), BigRational::from_integer(1.into()));
        assert!(eval(&T::sin(T::var(0)), &[BigRational::from_integer(1.into())]).is_err());
    }
}
