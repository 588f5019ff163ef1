//! Hom-associative color algebras and ε-antisymmetrization.

use crate::algebra::{
    AlgebraError, AlgebraElement, AlgebraFlags, BracketTable, ColorHomLieAlgebra, GradedBasis,
    LinearMap,
};
use crate::grading::CommutationFactor;
use crate::report::VerificationReport;
use crate::scalar::Scalar;

/// A hom-associative algebra `(A, ·, α)`: `α(x)·(y·z) = (x·y)·α(z)`.
pub trait HomAssociative {
    type Element: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Element;
    fn add(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn scale(&self, a: &Self::Element, c: &Scalar) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn twist(&self, a: &Self::Element) -> Self::Element;
}

/// Finite-dimensional hom-associative color algebra by structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct HomAssocColorAlgebra {
    basis: GradedBasis,
    epsilon: CommutationFactor,
    mult: BracketTable,
    alpha: LinearMap,
}

impl HomAssocColorAlgebra {
    /// `mult` holds `e_i · e_j`. Only shapes are checked here.
    pub fn new(
        basis: GradedBasis,
        epsilon: CommutationFactor,
        mult: BracketTable,
        alpha: LinearMap,
    ) -> Result<Self, AlgebraError> {
        // reuse the structural checks of the Lie constructor
        ColorHomLieAlgebra::new(
            basis.clone(),
            epsilon.clone(),
            mult.clone(),
            alpha.clone(),
            AlgebraFlags::default(),
        )?;
        Ok(HomAssocColorAlgebra {
            basis,
            epsilon,
            mult,
            alpha,
        })
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn alpha(&self) -> &LinearMap {
        &self.alpha
    }

    pub fn product(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.mult.eval(x, y)
    }

    fn name(&self, i: usize) -> &str {
        self.basis.name(i)
    }

    /// Grading axiom and hom-associativity over basis pairs and triples.
    pub fn verify(&self) -> VerificationReport {
        let n = self.dim();
        let g = self.epsilon.group();
        let mut report = VerificationReport::new();
        for ((i, j), v) in self.mult.entries() {
            let target = g.add(self.basis.degree(i), self.basis.degree(j));
            if v.terms().any(|(k, _)| *self.basis.degree(k) != target) {
                report.push(
                    "grading",
                    format!("({},{})", self.name(i), self.name(j)),
                    v.display(self.basis.names()),
                );
            }
        }
        for i in 0..n {
            for j in 0..n {
                let xy = self.mult.value(i, j);
                for k in 0..n {
                    let lhs = self
                        .mult
                        .eval(self.alpha.column(i), &self.mult.value(j, k));
                    let rhs = self.mult.eval(&xy, self.alpha.column(k));
                    let defect = lhs.sub(&rhs);
                    if !defect.is_zero() {
                        report.push(
                            "hom-associativity",
                            format!("({},{},{})", self.name(i), self.name(j), self.name(k)),
                            defect.display(self.basis.names()),
                        );
                    }
                }
            }
        }
        report
    }

    /// `[x,y] = xy − ε(x,y)yx` on basis elements.
    pub fn antisymmetrize(&self) -> Result<ColorHomLieAlgebra, AlgebraError> {
        let report = self.verify();
        if let Some(v) = report.of_check("grading").next() {
            return Err(AlgebraError::Grading {
                witness: v.witness.clone(),
            });
        }
        if let Some(v) = report.of_check("hom-associativity").next() {
            return Err(AlgebraError::HomAssociativity {
                witness: v.witness.clone(),
            });
        }
        let n = self.dim();
        let mut bracket = BracketTable::new();
        for i in 0..n {
            for j in 0..n {
                let e = self
                    .epsilon
                    .value(self.basis.degree(i), self.basis.degree(j));
                let mut v = self.mult.value(i, j);
                v.add_scaled(&-e, &self.mult.value(j, i));
                bracket.set(i, j, v);
            }
        }
        let lie = ColorHomLieAlgebra::new(
            self.basis.clone(),
            self.epsilon.clone(),
            bracket,
            self.alpha.clone(),
            AlgebraFlags::default(),
        )?;
        let flags = AlgebraFlags {
            involutive: lie.is_involutive(),
            multiplicative: lie.multiplicativity_report().passed(),
        };
        Ok(lie.with_flags(flags))
    }
}

impl HomAssociative for HomAssocColorAlgebra {
    type Element = AlgebraElement;

    fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero()
    }

    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.add(b)
    }

    fn scale(&self, a: &AlgebraElement, c: &Scalar) -> AlgebraElement {
        a.scale(c)
    }

    fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        self.mult.eval(a, b)
    }

    fn twist(&self, a: &AlgebraElement) -> AlgebraElement {
        self.alpha.apply(a)
    }
}
