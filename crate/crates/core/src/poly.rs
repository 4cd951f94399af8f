//! Sparse polynomials with exact rational coefficients over opaque atoms.
//!
//! Normalization maps a term to a polynomial whose atoms are the
//! non-arithmetic subterms (variables, primitive applications, quasi-inverses).
//! Two terms with equal polynomials are equal in every commutative ring
//! interpretation, which is what makes syntactic verdicts sound.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constant::Constant;

pub type Coeff = BigRational;

/// Atoms may impose extra monomial identities (for example `x²·x* = x`).
pub trait Atom: Clone + Ord + Debug {
    fn reduce_monomial(_monomial: &mut Monomial<Self>) {}
}

/// Product of atoms with positive exponents, sorted by atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial<A>(Vec<(A, u32)>);

impl<A: Atom> Monomial<A> {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: A) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn factors(&self) -> &[(A, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, atom: &A) -> u32 {
        self.0.binary_search_by(|(a, _)| a.cmp(atom)).map(|i| self.0[i].1).unwrap_or(0)
    }

    /// Sets the exponent of `atom`, removing it at zero.
    pub fn set_exponent(&mut self, atom: &A, exp: u32) {
        match self.0.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) if exp == 0 => {
                self.0.remove(i);
            }
            Ok(i) => self.0[i].1 = exp,
            Err(_) if exp == 0 => {}
            Err(i) => self.0.insert(i, (atom.clone(), exp)),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        let mut m = Monomial(out);
        A::reduce_monomial(&mut m);
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<A: Atom> {
    terms: BTreeMap<Monomial<A>, Coeff>,
}

impl<A: Atom> Default for Poly<A> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<A: Atom> Poly<A> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn atom(a: A) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::atom(a), Coeff::one());
        p
    }

    pub fn monomial(m: Monomial<A>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, Coeff::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<A>, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial<A>) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial<A>, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial<A>) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            out.add_term(m1.mul(m), c1.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// All atoms that occur, in order.
    pub fn atoms(&self) -> Vec<A> {
        let mut atoms: Vec<A> =
            self.terms.keys().flat_map(|m| m.0.iter().map(|(a, _)| a.clone())).collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }
}

/// Term types that can be rebuilt from a polynomial.
pub trait Rebuild: Sized {
    type Atom: Atom;
    fn from_constant(c: Constant) -> Self;
    fn from_atom(a: &Self::Atom) -> Self;
    fn make_add(a: Self, b: Self) -> Self;
    fn make_mul(a: Self, b: Self) -> Self;
    fn make_neg(a: Self) -> Self;
}

/// Canonical term for a polynomial: a right-nested sum of monomials in
/// monomial order, each a right-nested product with the coefficient in
/// front (`-1` becomes a negation, `1` is omitted).
pub fn rebuild<T: Rebuild>(p: &Poly<T::Atom>) -> T {
    let mut parts: Vec<T> = p.terms().map(|(m, c)| rebuild_monomial(m, c)).collect();
    let Some(mut acc) = parts.pop() else {
        return T::from_constant(Constant::zero());
    };
    while let Some(prev) = parts.pop() {
        acc = T::make_add(prev, acc);
    }
    acc
}

fn rebuild_monomial<T: Rebuild>(m: &Monomial<T::Atom>, c: &Coeff) -> T {
    let mut factors: Vec<T> = m
        .factors()
        .iter()
        .flat_map(|(a, e)| (0..*e).map(move |_| a))
        .map(T::from_atom)
        .collect();
    let Some(mut product) = factors.pop() else {
        return T::from_constant(Constant::new(c.clone()));
    };
    while let Some(prev) = factors.pop() {
        product = T::make_mul(prev, product);
    }
    if c.is_one() {
        product
    } else if (-c).is_one() {
        T::make_neg(product)
    } else {
        T::make_mul(T::from_constant(Constant::new(c.clone())), product)
    }
}
