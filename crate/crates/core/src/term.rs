//! Smooth terms: expression trees over a fixed library of globally smooth
//! primitives.

use std::fmt;
use std::sync::Arc;

use crate::constant::Constant;
use crate::error::{Error, Result};

/// The primitive library. Every symbol is unary, total and smooth on ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    Atan,
    Tanh,
    /// x ↦ 1/(1+x²)
    Recip1pSq,
}

impl Primitive {
    pub const ALL: [Primitive; 6] = [
        Primitive::Exp,
        Primitive::Sin,
        Primitive::Cos,
        Primitive::Atan,
        Primitive::Tanh,
        Primitive::Recip1pSq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Atan => "atan",
            Primitive::Tanh => "tanh",
            Primitive::Recip1pSq => "recip1psq",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn arity(self) -> usize {
        1
    }
}

/// A term of the smooth language. Immutable; subterms are shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmoothTerm {
    Var(usize),
    Const(Constant),
    Add(Arc<SmoothTerm>, Arc<SmoothTerm>),
    Mul(Arc<SmoothTerm>, Arc<SmoothTerm>),
    Neg(Arc<SmoothTerm>),
    Prim(Primitive, Arc<SmoothTerm>),
}

impl SmoothTerm {
    pub fn var(i: usize) -> Self {
        SmoothTerm::Var(i)
    }

    pub fn constant(c: impl Into<Constant>) -> Self {
        SmoothTerm::Const(c.into())
    }

    pub fn int(n: i64) -> Self {
        SmoothTerm::Const(Constant::integer(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn prim(p: Primitive, arg: SmoothTerm) -> Self {
        SmoothTerm::Prim(p, Arc::new(arg))
    }

    pub fn exp(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Exp, arg)
    }

    pub fn sin(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Sin, arg)
    }

    pub fn cos(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Cos, arg)
    }

    pub fn atan(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Atan, arg)
    }

    pub fn tanh(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Tanh, arg)
    }

    pub fn recip1psq(arg: SmoothTerm) -> Self {
        Self::prim(Primitive::Recip1pSq, arg)
    }

    /// `self` raised to a non-negative integer power, as a product chain.
    pub fn pow(&self, k: u32) -> Self {
        match k {
            0 => Self::one(),
            _ => (1..k).fold(self.clone(), |acc, _| acc * self.clone()),
        }
    }

    pub fn sum(terms: impl IntoIterator<Item = SmoothTerm>) -> Self {
        terms.into_iter().reduce(|a, b| a + b).unwrap_or_else(Self::zero)
    }

    pub fn as_constant(&self) -> Option<&Constant> {
        match self {
            SmoothTerm::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Number of generators the term mentions: one past the largest
    /// variable index, or 0 for closed terms.
    pub fn arity(&self) -> usize {
        match self {
            SmoothTerm::Var(i) => i + 1,
            SmoothTerm::Const(_) => 0,
            SmoothTerm::Add(a, b) | SmoothTerm::Mul(a, b) => a.arity().max(b.arity()),
            SmoothTerm::Neg(a) | SmoothTerm::Prim(_, a) => a.arity(),
        }
    }

    pub fn mentions_var(&self, index: usize) -> bool {
        match self {
            SmoothTerm::Var(i) => *i == index,
            SmoothTerm::Const(_) => false,
            SmoothTerm::Add(a, b) | SmoothTerm::Mul(a, b) => {
                a.mentions_var(index) || b.mentions_var(index)
            }
            SmoothTerm::Neg(a) | SmoothTerm::Prim(_, a) => a.mentions_var(index),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SmoothTerm::Var(_) | SmoothTerm::Const(_) => 1,
            SmoothTerm::Add(a, b) | SmoothTerm::Mul(a, b) => 1 + a.size() + b.size(),
            SmoothTerm::Neg(a) | SmoothTerm::Prim(_, a) => 1 + a.size(),
        }
    }

    /// Simultaneous substitution of `Var i` by `replacement[i]`, i.e. the
    /// formal composite `self ∘ (g₀, …, g_{n-1})`.
    pub fn substitute(&self, replacement: &[SmoothTerm]) -> Result<SmoothTerm> {
        let needed = self.arity();
        if needed > replacement.len() {
            return Err(Error::ArityMismatch { needed, given: replacement.len() });
        }
        Ok(self.substitute_unchecked(replacement))
    }

    fn substitute_unchecked(&self, replacement: &[SmoothTerm]) -> SmoothTerm {
        match self {
            SmoothTerm::Var(i) => replacement[*i].clone(),
            SmoothTerm::Const(_) => self.clone(),
            SmoothTerm::Add(a, b) => SmoothTerm::Add(
                Arc::new(a.substitute_unchecked(replacement)),
                Arc::new(b.substitute_unchecked(replacement)),
            ),
            SmoothTerm::Mul(a, b) => SmoothTerm::Mul(
                Arc::new(a.substitute_unchecked(replacement)),
                Arc::new(b.substitute_unchecked(replacement)),
            ),
            SmoothTerm::Neg(a) => SmoothTerm::Neg(Arc::new(a.substitute_unchecked(replacement))),
            SmoothTerm::Prim(p, a) => {
                SmoothTerm::Prim(*p, Arc::new(a.substitute_unchecked(replacement)))
            }
        }
    }

    /// Renumbers every variable `i` to `i + offset`.
    pub fn shift_vars(&self, offset: usize) -> SmoothTerm {
        if offset == 0 {
            return self.clone();
        }
        match self {
            SmoothTerm::Var(i) => SmoothTerm::Var(i + offset),
            SmoothTerm::Const(_) => self.clone(),
            SmoothTerm::Add(a, b) => {
                SmoothTerm::Add(Arc::new(a.shift_vars(offset)), Arc::new(b.shift_vars(offset)))
            }
            SmoothTerm::Mul(a, b) => {
                SmoothTerm::Mul(Arc::new(a.shift_vars(offset)), Arc::new(b.shift_vars(offset)))
            }
            SmoothTerm::Neg(a) => SmoothTerm::Neg(Arc::new(a.shift_vars(offset))),
            SmoothTerm::Prim(p, a) => SmoothTerm::Prim(*p, Arc::new(a.shift_vars(offset))),
        }
    }
}

/// Identity tuple `(Var 0, …, Var n-1)`.
pub fn projections(n: usize) -> Vec<SmoothTerm> {
    (0..n).map(SmoothTerm::Var).collect()
}

impl fmt::Display for SmoothTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothTerm::Var(i) => write!(f, "(var {i})"),
            SmoothTerm::Const(c) => write!(f, "(const {c})"),
            SmoothTerm::Add(a, b) => write!(f, "(add {a} {b})"),
            SmoothTerm::Mul(a, b) => write!(f, "(mul {a} {b})"),
            SmoothTerm::Neg(a) => write!(f, "(neg {a})"),
            SmoothTerm::Prim(p, a) => write!(f, "({} {a})", p.name()),
        }
    }
}

impl fmt::Debug for SmoothTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for SmoothTerm {
    type Output = SmoothTerm;
    fn add(self, rhs: SmoothTerm) -> SmoothTerm {
        SmoothTerm::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Mul for SmoothTerm {
    type Output = SmoothTerm;
    fn mul(self, rhs: SmoothTerm) -> SmoothTerm {
        SmoothTerm::Mul(Arc::new(self), Arc::new(rhs))
    }
}

impl std::ops::Neg for SmoothTerm {
    type Output = SmoothTerm;
    fn neg(self) -> SmoothTerm {
        SmoothTerm::Neg(Arc::new(self))
    }
}

impl std::ops::Sub for SmoothTerm {
    type Output = SmoothTerm;
    fn sub(self, rhs: SmoothTerm) -> SmoothTerm {
        self + (-rhs)
    }
}

impl std::ops::Add for &SmoothTerm {
    type Output = SmoothTerm;
    fn add(self, rhs: &SmoothTerm) -> SmoothTerm {
        self.clone() + rhs.clone()
    }
}

impl std::ops::Mul for &SmoothTerm {
    type Output = SmoothTerm;
    fn mul(self, rhs: &SmoothTerm) -> SmoothTerm {
        self.clone() * rhs.clone()
    }
}

impl std::ops::Sub for &SmoothTerm {
    type Output = SmoothTerm;
    fn sub(self, rhs: &SmoothTerm) -> SmoothTerm {
        self.clone() - rhs.clone()
    }
}

impl std::ops::Neg for &SmoothTerm {
    type Output = SmoothTerm;
    fn neg(self) -> SmoothTerm {
        -self.clone()
    }
}
