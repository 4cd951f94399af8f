//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] is an element of the Weil algebra
//! `ℝ[ε₁, …, ε_v] / (ε)^{k+1}`: a dense vector of Taylor coefficients indexed
//! by multi-indices of total degree ≤ k. Smooth primitives act on jets by
//! composing their univariate Taylor series with the nilpotent part, which
//! is exactly the C∞-structure of the algebra.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::term::{Primitive, SmoothTerm};

/// Coefficient indexing shared by all jets with the same (vars, order).
#[derive(Debug, PartialEq, Eq)]
pub struct JetLayout {
    vars: usize,
    order: usize,
    multi_indices: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    // products[k] lists (i, j) with α_i + α_j = α_k
    products: Vec<Vec<(usize, usize)>>,
}

impl JetLayout {
    pub fn new(vars: usize, order: usize) -> Arc<Self> {
        let mut multi_indices = Vec::new();
        for degree in 0..=order {
            compositions(degree as u32, vars, &mut Vec::new(), &mut multi_indices);
        }
        let index: HashMap<Vec<u32>, usize> =
            multi_indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut products = vec![Vec::new(); multi_indices.len()];
        for (i, a) in multi_indices.iter().enumerate() {
            for (j, b) in multi_indices.iter().enumerate() {
                let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = index.get(&sum) {
                    products[k].push((i, j));
                }
            }
        }
        Arc::new(JetLayout { vars, order, multi_indices, index, products })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients.
    pub fn dim(&self) -> usize {
        self.multi_indices.len()
    }

    pub fn multi_indices(&self) -> &[Vec<u32>] {
        &self.multi_indices
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

// Multi-indices of total degree `remaining` over `slots` variables, in
// descending lexicographic order.
fn compositions(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 0 {
        if remaining == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if slots == 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=remaining).rev() {
        prefix.push(first);
        compositions(remaining - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    layout: Arc<JetLayout>,
    coeffs: Vec<S>,
}

impl<S: Real> Jet<S> {
    pub fn constant(layout: &Arc<JetLayout>, value: S) -> Self {
        let mut coeffs = vec![S::zero(); layout.dim()];
        coeffs[0] = value;
        Jet { layout: layout.clone(), coeffs }
    }

    /// `base + ε_var`.
    pub fn variable(layout: &Arc<JetLayout>, base: S, var: usize) -> Self {
        let mut jet = Self::constant(layout, base);
        if layout.order >= 1 {
            let mut alpha = vec![0; layout.vars];
            alpha[var] = 1;
            let k = layout.position(&alpha).expect("degree-1 index");
            jet.coeffs[k] = S::one();
        }
        jet
    }

    pub fn from_coeffs(layout: &Arc<JetLayout>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != layout.dim() {
            return Err(Error::CarrierShape { expected: layout.dim(), given: coeffs.len() });
        }
        Ok(Jet { layout: layout.clone(), coeffs })
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Order-0 coefficient.
    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<S> {
        self.layout.position(alpha).map(|k| self.coeffs[k])
    }

    /// First-order coefficients, one per variable.
    pub fn gradient(&self) -> Vec<S> {
        (0..self.layout.vars)
            .map(|v| {
                let mut alpha = vec![0; self.layout.vars];
                alpha[v] = 1;
                self.coeff(&alpha).unwrap_or_else(S::zero)
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|a| -*a).collect() }
    }

    pub fn scale(&self, s: S) -> Self {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|a| *a * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let coeffs = self
            .layout
            .products
            .iter()
            .map(|pairs| {
                pairs.iter().fold(S::zero(), |acc, &(i, j)| acc + self.coeffs[i] * other.coeffs[j])
            })
            .collect();
        Jet { layout: self.layout.clone(), coeffs }
    }

    /// A jet is a unit iff its order-0 part is nonzero.
    pub fn is_unit(&self) -> bool {
        self.value() != S::zero()
    }

    pub fn recip(&self) -> Option<Self> {
        let a = self.value();
        if a == S::zero() {
            return None;
        }
        let mut series = Vec::with_capacity(self.layout.order + 1);
        let mut term = a.recip();
        for _ in 0..=self.layout.order {
            series.push(term);
            term = -term / a;
        }
        Some(self.compose_series(&series))
    }

    /// Applies a library primitive.
    pub fn apply(&self, p: Primitive) -> Self {
        let series = primitive_series(p, self.value(), self.layout.order);
        self.compose_series(&series)
    }

    // Σ c_m h^m where h is the nilpotent part of self.
    fn compose_series(&self, series: &[S]) -> Self {
        let mut nilpotent = self.clone();
        nilpotent.coeffs[0] = S::zero();
        let mut acc = Jet::constant(&self.layout, series[series.len() - 1]);
        for c in series[..series.len() - 1].iter().rev() {
            acc = acc.mul(&nilpotent);
            acc.coeffs[0] = acc.coeffs[0] + *c;
        }
        acc
    }
}

/// Taylor coefficients of `p(a + t)` in `t` up to degree `order`.
pub fn primitive_series<S: Real>(p: Primitive, a: S, order: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(order + 1);
    match p {
        Primitive::Exp => {
            let mut c = a.exp();
            for m in 0..=order {
                out.push(c);
                c = c / S::from_usize(m + 1).unwrap();
            }
        }
        Primitive::Sin | Primitive::Cos => {
            let (s, c) = (a.sin(), a.cos());
            let cycle = match p {
                Primitive::Sin => [s, c, -s, -c],
                _ => [c, -s, -c, s],
            };
            let mut fact = S::one();
            for m in 0..=order {
                if m > 0 {
                    fact = fact * S::from_usize(m).unwrap();
                }
                out.push(cycle[m % 4] / fact);
            }
        }
        Primitive::Recip1pSq => out = recip1psq_series(a, order),
        Primitive::Atan => {
            out.push(a.atan());
            if order > 0 {
                let r = recip1psq_series(a, order - 1);
                for m in 1..=order {
                    out.push(r[m - 1] / S::from_usize(m).unwrap());
                }
            }
        }
        Primitive::Tanh => {
            // y' = 1 - y²
            out.push(a.tanh());
            for m in 1..=order {
                let mut sq = S::zero();
                for i in 0..m {
                    sq = sq + out[i] * out[m - 1 - i];
                }
                let rhs = if m == 1 { S::one() - sq } else { -sq };
                out.push(rhs / S::from_usize(m).unwrap());
            }
        }
    }
    out
}

// 1/q(t) with q(t) = (1 + a²) + 2a t + t².
fn recip1psq_series<S: Real>(a: S, order: usize) -> Vec<S> {
    let two = S::from_f64(2.0).unwrap();
    let (q0, q1) = (S::one() + a * a, two * a);
    let mut r: Vec<S> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let v = if m == 0 {
            q0.recip()
        } else {
            let mut acc = q1 * r[m - 1];
            if m >= 2 {
                acc = acc + r[m - 2];
            }
            -acc / q0
        };
        r.push(v);
    }
    r
}

/// Interprets `term` on jet arguments: the C∞-structure of the Weil
/// algebra described by `layout`.
pub fn eval_jets<S: Real>(term: &SmoothTerm, args: &[Jet<S>], layout: &Arc<JetLayout>) -> Result<Jet<S>> {
    let needed = term.arity();
    if needed > args.len() {
        return Err(Error::ArityMismatch { needed, given: args.len() });
    }
    let out = eval_jets_unchecked(term, args, layout);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFiniteResult)
    }
}

fn eval_jets_unchecked<S: Real>(term: &SmoothTerm, args: &[Jet<S>], layout: &Arc<JetLayout>) -> Jet<S> {
    match term {
        SmoothTerm::Var(i) => args[*i].clone(),
        SmoothTerm::Const(c) => Jet::constant(layout, S::from_constant(c)),
        SmoothTerm::Add(a, b) => {
            eval_jets_unchecked(a, args, layout).add(&eval_jets_unchecked(b, args, layout))
        }
        SmoothTerm::Mul(a, b) => {
            eval_jets_unchecked(a, args, layout).mul(&eval_jets_unchecked(b, args, layout))
        }
        SmoothTerm::Neg(a) => eval_jets_unchecked(a, args, layout).neg(),
        SmoothTerm::Prim(p, a) => eval_jets_unchecked(a, args, layout).apply(*p),
    }
}

/// Degree-≤`order` Taylor expansion of `term` at `base`, with one
/// infinitesimal per coordinate of `base`.
pub fn jet_eval<S: Real>(term: &SmoothTerm, base: &[S], order: usize) -> Result<Jet<S>> {
    let needed = term.arity();
    if needed > base.len() {
        return Err(Error::ArityMismatch { needed, given: base.len() });
    }
    if !base.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinitePoint);
    }
    let layout = JetLayout::new(base.len(), order);
    let args: Vec<Jet<S>> =
        base.iter().enumerate().map(|(i, &b)| Jet::variable(&layout, b, i)).collect();
    eval_jets(term, &args, &layout)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::eval::eval;
    use crate::term::SmoothTerm as T;

    #[test]
    fn layout_is_graded() {
        let layout = JetLayout::new(2, 2);
        assert_eq!(
            layout.multi_indices(),
            &[vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(JetLayout::new(0, 3).dim(), 1);
    }

    #[test]
    fn exp_at_zero() {
        let j = jet_eval(&T::exp(T::var(0)), &[0.0], 2).unwrap();
        assert_eq!(j.coeffs(), &[1.0, 1.0, 0.5]);
    }

    #[test]
    fn identity_and_square() {
        assert_eq!(jet_eval(&T::var(0), &[1.7], 1).unwrap().coeffs(), &[1.7, 1.0]);
        let sq = jet_eval(&(T::var(0) * T::var(0)), &[3.0], 2).unwrap();
        assert_eq!(sq.coeffs(), &[9.0, 6.0, 1.0]);
    }

    #[test]
    fn order_zero_is_plain_evaluation() {
        let t = T::tanh(T::var(0) * T::atan(T::var(1))) + T::recip1psq(T::var(1));
        let p = [0.3, -1.2];
        assert_eq!(jet_eval(&t, &p, 0).unwrap().value(), eval(&t, &p).unwrap());
    }

    #[test]
    fn known_series() {
        // atan(x) = x - x³/3, tanh(x) = x - x³/3 at 0
        let atan = jet_eval(&T::atan(T::var(0)), &[0.0], 4).unwrap();
        let tanh = jet_eval(&T::tanh(T::var(0)), &[0.0], 4).unwrap();
        for j in [atan, tanh] {
            assert_relative_eq!(j.coeffs()[1], 1.0);
            assert_relative_eq!(j.coeffs()[2], 0.0);
            assert_relative_eq!(j.coeffs()[3], -1.0 / 3.0);
        }
        let r = jet_eval(&T::recip1psq(T::var(0)), &[0.0], 4).unwrap();
        assert_eq!(r.coeffs(), &[1.0, 0.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn mixed_partial() {
        // x*y at (2, 5): 10 + 5 dx + 2 dy + dx dy
        let j = jet_eval(&(T::var(0) * T::var(1)), &[2.0, 5.0], 2).unwrap();
        assert_eq!(j.coeff(&[1, 1]), Some(1.0));
        assert_eq!(j.gradient(), vec![5.0, 2.0]);
    }

    #[test]
    fn reciprocal_of_unit_jet() {
        let layout = JetLayout::new(1, 3);
        let x = Jet::variable(&layout, 2.0f64, 0);
        let inv = x.recip().unwrap();
        let one = x.mul(&inv);
        assert_relative_eq!(one.coeffs()[0], 1.0);
        for c in &one.coeffs()[1..] {
            assert_relative_eq!(*c, 0.0, epsilon = 1e-15);
        }
        assert!(Jet::variable(&layout, 0.0f64, 0).recip().is_none());
    }
}
