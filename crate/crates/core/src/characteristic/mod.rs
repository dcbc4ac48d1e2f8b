//! Characteristic classes: the algebraic construction for extensions of Lie
//! algebras and Chern–Weil integrals of sampled curvature.

pub mod lecomte;
pub mod weil;

pub use lecomte::{
    characteristic_form, chevalley_differential, exactness, invariant_polynomials, lecomte_obstruction,
    CharacteristicForm, Exactness, HForm, IdealPolynomial, LieSES, Obstruction, SesDescriptor, Splitting,
};
pub use weil::{
    chern_density, chern_weil_number, symmetrized_trace, Bpst, ChernResult, CurvatureField, Flat, RadialGrid,
    SymmetrizedTrace, Vortex,
};
