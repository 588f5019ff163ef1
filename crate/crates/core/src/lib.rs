//! Exact enveloping algebras of involutive color hom-Lie algebras.
//!
//! Scalars live in cyclotomic fields, so every identity is checked exactly.

pub mod algebra;
pub mod grading;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod hom_assoc;
pub mod tensor;
pub mod uea;
pub mod format;
pub mod cli;
