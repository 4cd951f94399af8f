//! Exact numeric literals for terms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact rational constant. Literals are decimals (`-1.25`, `3e-2`)
/// or ratios (`1/3`); printing uses a finite decimal whenever the
/// denominator only has factors 2 and 5.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant(BigRational);

impl Constant {
    pub fn new(value: BigRational) -> Self {
        Constant(value)
    }

    pub fn zero() -> Self {
        Constant(BigRational::zero())
    }

    pub fn one() -> Self {
        Constant(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact binary value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Constant)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Constant(self.0.recip()))
        }
    }
}

impl fmt::Debug for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = self.0.numer();
        let denom = self.0.denom();
        match decimal_places(denom) {
            Some(0) => write!(f, "{numer}"),
            Some(places) => {
                let scale = BigInt::from(10u32).pow(places);
                let scaled = numer * (&scale / denom);
                let sign = if scaled.is_negative() { "-" } else { "" };
                let digits = scaled.abs().to_string();
                let places = places as usize;
                let padded = if digits.len() <= places {
                    format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
                } else {
                    digits
                };
                let (int_part, frac_part) = padded.split_at(padded.len() - places);
                write!(f, "{sign}{int_part}.{frac_part}")
            }
            None => write!(f, "{numer}/{denom}"),
        }
    }
}

/// Number of decimal places needed to print `1/denom` exactly, if finite.
fn decimal_places(denom: &BigInt) -> Option<u32> {
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = denom.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() && !d.is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

impl FromStr for Constant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidLiteral(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.parse().map_err(|_| bad())?;
            let den: BigInt = den.parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(Constant(BigRational::new(num, den)));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => {
                let exp: i32 = s[i + 1..].parse().map_err(|_| bad())?;
                (&s[..i], exp)
            }
            None => (s, 0),
        };
        let (negative, unsigned) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
        let shift = exponent - frac_part.len() as i32;
        let ten = BigRational::from_integer(BigInt::from(10));
        if shift >= 0 {
            value *= num_traits::pow(ten, shift as usize);
        } else {
            value /= num_traits::pow(ten, (-shift) as usize);
        }
        if negative {
            value = -value;
        }
        Ok(Constant(value))
    }
}

impl From<i64> for Constant {
    fn from(n: i64) -> Self {
        Constant::integer(n)
    }
}

impl std::ops::Add for &Constant {
    type Output = Constant;
    fn add(self, rhs: &Constant) -> Constant {
        Constant(&self.0 + &rhs.0)
    }
}

impl std::ops::Mul for &Constant {
    type Output = Constant;
    fn mul(self, rhs: &Constant) -> Constant {
        Constant(&self.0 * &rhs.0)
    }
}

impl std::ops::Neg for &Constant {
    type Output = Constant;
    fn neg(self) -> Constant {
        Constant(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_ratios() {
        assert_eq!("0.5".parse::<Constant>().unwrap(), Constant::ratio(1, 2));
        assert_eq!("-1.25".parse::<Constant>().unwrap(), Constant::ratio(-5, 4));
        assert_eq!("3e-2".parse::<Constant>().unwrap(), Constant::ratio(3, 100));
        assert_eq!("1/3".parse::<Constant>().unwrap(), Constant::ratio(1, 3));
        assert_eq!("7".parse::<Constant>().unwrap(), Constant::integer(7));
        assert!("1/0".parse::<Constant>().is_err());
        assert!("abc".parse::<Constant>().is_err());
        assert!(".".parse::<Constant>().is_err());
    }

    #[test]
    fn prints_shortest_exact_form() {
        assert_eq!(Constant::ratio(1, 2).to_string(), "0.5");
        assert_eq!(Constant::ratio(-5, 4).to_string(), "-1.25");
        assert_eq!(Constant::ratio(1, 3).to_string(), "1/3");
        assert_eq!(Constant::integer(-6).to_string(), "-6");
        assert_eq!(Constant::ratio(3, 100).to_string(), "0.03");
        assert_eq!(Constant::ratio(-1, 20).to_string(), "-0.05");
    }

    #[test]
    fn display_round_trips() {
        for (n, d) in [(1, 2), (-7, 8), (22, 7), (0, 1), (123456, 1000), (-1, 3)] {
            let c = Constant::ratio(n, d);
            assert_eq!(c.to_string().parse::<Constant>().unwrap(), c);
        }
    }
}
