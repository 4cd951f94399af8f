//! Scalar domains for term evaluation.
//!
//! [`Scalar`] covers every carrier a term can be evaluated in: the IEEE
//! floats and exact rationals. [`Real`] adds the transcendental structure
//! needed for jets and root finding.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, ToPrimitive, Zero};

use crate::constant::Constant;
use crate::error::{Error, Result};
use crate::term::Primitive;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_constant(c: &Constant) -> Self;

    /// Value of a library primitive, or `NotRepresentable` when the
    /// domain cannot hold it exactly.
    fn apply_primitive(p: Primitive, x: &Self) -> Result<Self>;

    fn is_finite_value(&self) -> bool;

    fn to_f64_lossy(&self) -> f64;

    /// Multiplicative inverse, `None` at zero.
    fn checked_recip(&self) -> Option<Self>;
}

/// Floating point scalars: `f32` or `f64`.
pub trait Real: Scalar + Float + FromPrimitive + Copy {}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_constant(c: &Constant) -> Self {
                c.to_f64() as $t
            }

            fn apply_primitive(p: Primitive, x: &Self) -> Result<Self> {
                let x = *x;
                Ok(match p {
                    Primitive::Exp => x.exp(),
                    Primitive::Sin => x.sin(),
                    Primitive::Cos => x.cos(),
                    Primitive::Atan => x.atan(),
                    Primitive::Tanh => x.tanh(),
                    Primitive::Recip1pSq => 1.0 / (1.0 + x * x),
                })
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn checked_recip(&self) -> Option<Self> {
                (*self != 0.0).then(|| 1.0 / *self)
            }
        }

        impl Real for $t {}
    )*};
}

impl_real!(f32, f64);

impl Scalar for BigRational {
    fn from_constant(c: &Constant) -> Self {
        c.value().clone()
    }

    fn apply_primitive(p: Primitive, x: &Self) -> Result<Self> {
        match p {
            Primitive::Recip1pSq => Ok((BigRational::one() + x * x).recip()),
            _ if x.is_zero() => Ok(match p {
                Primitive::Exp | Primitive::Cos => BigRational::one(),
                _ => BigRational::zero(),
            }),
            _ => Err(Error::NotRepresentable(p.name())),
        }
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn checked_recip(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_primitives_are_exact_or_refused() {
        let two = BigRational::from_integer(2.into());
        assert_eq!(
            BigRational::apply_primitive(Primitive::Recip1pSq, &two).unwrap(),
            BigRational::new(1.into(), 5.into())
        );
        assert_eq!(
            BigRational::apply_primitive(Primitive::Exp, &BigRational::zero()).unwrap(),
            BigRational::one()
        );
        assert!(BigRational::apply_primitive(Primitive::Sin, &two).is_err());
    }

    #[test]
    fn float_primitives_match_std() {
        assert_eq!(f64::apply_primitive(Primitive::Exp, &0.0).unwrap(), 1.0);
        assert_eq!(f32::apply_primitive(Primitive::Recip1pSq, &1.0).unwrap(), 0.5);
        assert_eq!(0.0f64.checked_recip(), None);
    }
}
