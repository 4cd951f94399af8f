//! Executable finitely presented C∞-rings.
//!
//! Terms over a fixed library of smooth primitives ([`SmoothTerm`]) are
//! evaluated pointwise ([`eval`]), on jets ([`jet_eval`]) and normalized to
//! a polynomial canonical form ([`normalize`]). Presentations
//! `C∞(ℝⁿ)/⟨f₁…f_k⟩` carry homomorphisms with ideal certificates, colimits
//! and localizations ([`ring`]); smooth Zariski covers and sheaf checks live
//! in [`site`]; set-valued models and the solution functor in [`models`];
//! the quasi-inverse calculus in [`vn`].
//!
//! Properties that are undecidable for smooth terms are answered with a
//! three-valued [`Verdict`].

pub mod constant;
pub mod error;
pub mod eval;
pub mod generate;
pub mod ideal;
pub mod jet;
pub mod linsolve;
pub mod models;
pub mod normalize;
pub mod poly;
pub mod ring;
pub mod sampling;
pub mod scalar;
pub mod site;
pub mod sexpr;
pub mod term;
pub mod verdict;
pub mod vn;

pub use constant::Constant;
pub use error::{Error, Result};
pub use eval::{eval, eval_all, Point};
pub use ideal::IdealCertificate;
pub use jet::{eval_jets, jet_eval, Jet, JetLayout};
pub use models::ModelRing;
pub use normalize::normalize;
pub use ring::{Element, Morphism, Presentation};
pub use scalar::{Real, Scalar};
pub use site::Cover;
pub use term::{Primitive, SmoothTerm};
pub use verdict::{Config, Flag, Status, Verdict, VerdictReport};
pub use vn::{StarTerm, VnModel};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type Jet64 = Jet<f64>;
pub type Jet32 = Jet<f32>;
pub type Point64 = Point<f64>;

pub(crate) fn serialize_terms<S: serde::Serializer>(terms: &[SmoothTerm], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(terms.iter().map(|t| t.to_string()))
}
