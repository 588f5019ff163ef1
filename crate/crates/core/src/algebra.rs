//! Finite-dimensional color hom-Lie algebras given by structure constants.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::grading::{CommutationFactor, Degree};
use crate::linalg::{self, SparseVec};
use crate::report::VerificationReport;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis names and degrees differ in length ({names} vs {degrees})")]
    BasisShape { names: usize, degrees: usize },
    #[error("duplicate basis name '{0}'")]
    DuplicateName(String),
    #[error("degree of '{0}' is not an element of the grading group")]
    ForeignDegree(String),
    #[error("the twist of the input algebra must be the identity")]
    NotIdentityTwist,
    #[error("input is not a color Lie algebra:\n{0}")]
    NotColorLie(VerificationReport),
    #[error("twist map is not even at basis element {witness}")]
    NotEven { witness: String },
    #[error("twist map is not a bracket morphism at {witness}")]
    NotMorphism { witness: String },
    #[error("multiplication violates the grading axiom at {witness}")]
    Grading { witness: String },
    #[error("multiplication is not hom-associative at {witness}")]
    HomAssociativity { witness: String },
}

/// Basis names with one degree per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    names: Vec<String>,
    degrees: Vec<Degree>,
}

impl GradedBasis {
    pub fn new(names: Vec<String>, degrees: Vec<Degree>) -> Result<Self, AlgebraError> {
        if names.len() != degrees.len() {
            return Err(AlgebraError::BasisShape {
                names: names.len(),
                degrees: degrees.len(),
            });
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(AlgebraError::DuplicateName(n.clone()));
            }
        }
        Ok(GradedBasis { names, degrees })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> &Degree {
        &self.degrees[i]
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Sparse coordinate vector over a basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    coords: SparseVec,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::from_terms([(i, Scalar::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut coords = SparseVec::new();
        for (k, c) in terms {
            linalg::add_entry(&mut coords, k, c);
        }
        AlgebraElement { coords }
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coords.get(&i).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    pub fn coords(&self) -> &SparseVec {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &AlgebraElement) {
        linalg::axpy(&mut self.coords, c, &other.coords);
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_integer(-1), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        if c.is_zero() {
            return Self::zero();
        }
        AlgebraElement {
            coords: self.coords.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// The common degree of all terms, or `None` for inhomogeneous/zero elements.
    pub fn homogeneous_degree<'a>(&self, basis: &'a GradedBasis) -> Option<&'a Degree> {
        let mut it = self.coords.keys().map(|&k| basis.degree(k));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayElement { elem: self, names }
    }
}

struct DisplayElement<'a> {
    elem: &'a AlgebraElement,
    names: &'a [String],
}

pub(crate) fn fmt_coeff(c: &Scalar) -> String {
    let s = c.to_string();
    if c.to_rational().is_some() {
        s
    } else {
        format!("({s})")
    }
}

impl fmt::Display for DisplayElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .elem
            .terms()
            .map(|(k, c)| {
                let name = self.names.get(k).map(String::as_str).unwrap_or("?");
                if c.is_one() {
                    name.to_string()
                } else if (-c).is_one() {
                    format!("-{name}")
                } else {
                    format!("{}*{name}", fmt_coeff(c))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Column-stored linear map; column `j` is the image of basis element `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    rows: usize,
    cols: Vec<AlgebraElement>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        LinearMap {
            rows: n,
            cols: (0..n).map(AlgebraElement::basis).collect(),
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        LinearMap {
            rows,
            cols: vec![AlgebraElement::zero(); cols],
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<AlgebraElement>) -> Result<Self, AlgebraError> {
        for c in &cols {
            if let Some(m) = c.max_index() {
                if m >= rows {
                    return Err(AlgebraError::DimensionMismatch {
                        expected: rows,
                        found: m + 1,
                    });
                }
            }
        }
        Ok(LinearMap { rows, cols })
    }

    /// From a row-major dense matrix.
    pub fn from_dense(m: &[Vec<Scalar>]) -> Self {
        let rows = m.len();
        let ncols = m.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|j| AlgebraElement::from_terms((0..rows).map(|i| (i, m[i][j].clone()))))
            .collect();
        LinearMap { rows, cols }
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        LinearMap {
            rows: entries.len(),
            cols: entries
                .iter()
                .enumerate()
                .map(|(i, c)| AlgebraElement::basis(i).scale(c))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &AlgebraElement {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[AlgebraElement] {
        &self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.cols[j].coeff(i)
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows)
            .map(|i| (0..self.cols()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (j, c) in x.terms() {
            out.add_scaled(c, &self.cols[j]);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> LinearMap {
        LinearMap {
            rows: self.rows,
            cols: self.cols.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols.len()
            && self
                .cols
                .iter()
                .enumerate()
                .all(|(j, c)| *c == AlgebraElement::basis(j))
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        if self.rows != self.cols.len() {
            return None;
        }
        linalg::invert_dense(&self.to_dense()).map(|m| LinearMap::from_dense(&m))
    }
}

/// `[e_i, e_j] = Σ_k c_ij^k e_k`; absent pairs bracket to zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BracketTable {
    constants: BTreeMap<(usize, usize), AlgebraElement>,
}

impl BracketTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, i: usize, j: usize, value: AlgebraElement) {
        if value.is_zero() {
            self.constants.remove(&(i, j));
        } else {
            self.constants.insert((i, j), value);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&AlgebraElement> {
        self.constants.get(&(i, j))
    }

    pub fn value(&self, i: usize, j: usize) -> AlgebraElement {
        self.get(i, j).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &AlgebraElement)> {
        self.constants.iter().map(|(k, v)| (*k, v))
    }

    fn max_index(&self) -> Option<usize> {
        self.constants
            .iter()
            .flat_map(|(&(i, j), v)| [Some(i), Some(j), v.max_index()])
            .flatten()
            .max()
    }

    /// Bilinear extension.
    pub fn eval(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                if let Some(v) = self.get(i, j) {
                    out.add_scaled(&(a * b), v);
                }
            }
        }
        out
    }

    /// `σ ∘ [,]` entrywise.
    pub fn post_compose(&self, sigma: &LinearMap) -> BracketTable {
        let mut out = BracketTable::new();
        for ((i, j), v) in self.entries() {
            out.set(i, j, sigma.apply(v));
        }
        out
    }
}

/// Optional properties requested for verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AlgebraFlags {
    pub involutive: bool,
    pub multiplicative: bool,
}

/// `(𝔤, [,], ε, α)` by structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorHomLieAlgebra {
    basis: GradedBasis,
    epsilon: CommutationFactor,
    bracket: BracketTable,
    alpha: LinearMap,
    flags: AlgebraFlags,
}

fn check_dims(
    basis: &GradedBasis,
    epsilon: &CommutationFactor,
    table: &BracketTable,
    alpha: &LinearMap,
) -> Result<(), AlgebraError> {
    let n = basis.dim();
    for i in 0..n {
        if !epsilon.group().contains(basis.degree(i)) {
            return Err(AlgebraError::ForeignDegree(basis.name(i).to_string()));
        }
    }
    if let Some(m) = table.max_index() {
        if m >= n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: m + 1,
            });
        }
    }
    if alpha.rows() != n || alpha.cols() != n {
        return Err(AlgebraError::DimensionMismatch {
            expected: n,
            found: alpha.rows().max(alpha.cols()),
        });
    }
    Ok(())
}

impl ColorHomLieAlgebra {
    /// Structural validation only; the algebraic axioms are checked by [`Self::verify`].
    pub fn new(
        basis: GradedBasis,
        epsilon: CommutationFactor,
        bracket: BracketTable,
        alpha: LinearMap,
        flags: AlgebraFlags,
    ) -> Result<Self, AlgebraError> {
        check_dims(&basis, &epsilon, &bracket, &alpha)?;
        Ok(ColorHomLieAlgebra {
            basis,
            epsilon,
            bracket,
            alpha,
            flags,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn epsilon(&self) -> &CommutationFactor {
        &self.epsilon
    }

    pub fn bracket_table(&self) -> &BracketTable {
        &self.bracket
    }

    pub fn alpha(&self) -> &LinearMap {
        &self.alpha
    }

    pub fn flags(&self) -> AlgebraFlags {
        self.flags
    }

    pub fn with_flags(mut self, flags: AlgebraFlags) -> Self {
        self.flags = flags;
        self
    }

    /// Same structure with a different commutation factor (no checks).
    pub fn with_epsilon(&self, epsilon: CommutationFactor) -> Self {
        ColorHomLieAlgebra {
            epsilon,
            ..self.clone()
        }
    }

    pub fn with_bracket(&self, bracket: BracketTable) -> Self {
        ColorHomLieAlgebra {
            bracket,
            ..self.clone()
        }
    }

    /// `ε(deg e_i, deg e_j)`.
    pub fn eps(&self, i: usize, j: usize) -> &Scalar {
        self.epsilon
            .value(self.basis.degree(i), self.basis.degree(j))
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraElement {
        self.bracket.value(i, j)
    }

    fn check_element(&self, x: &AlgebraElement) -> Result<(), AlgebraError> {
        match x.max_index() {
            Some(m) if m >= self.dim() => Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                found: m + 1,
            }),
            _ => Ok(()),
        }
    }

    pub fn bracket_eval(
        &self,
        x: &AlgebraElement,
        y: &AlgebraElement,
    ) -> Result<AlgebraElement, AlgebraError> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(self.bracket.eval(x, y))
    }

    fn name(&self, i: usize) -> &str {
        self.basis.name(i)
    }

    fn show(&self, x: &AlgebraElement) -> String {
        x.display(self.basis.names()).to_string()
    }

    /// Exhaustive check of the grading axiom, ε-skew symmetry, the ε-hom-Jacobi
    /// identity and evenness of α over basis tuples, plus involutivity and
    /// multiplicativity when flagged.
    pub fn verify(&self) -> VerificationReport {
        let n = self.dim();
        let g = self.epsilon.group();
        let mut report = VerificationReport::new();
        for ((i, j), v) in self.bracket.entries() {
            let target = g.add(self.basis.degree(i), self.basis.degree(j));
            let stray =
                AlgebraElement::from_terms(v.terms().filter(|(k, _)| *self.basis.degree(*k) != target).map(|(k, c)| (k, c.clone())));
            if !stray.is_zero() {
                report.push(
                    "grading",
                    format!("({},{})", self.name(i), self.name(j)),
                    self.show(&stray),
                );
            }
        }
        for i in 0..n {
            for j in i..n {
                let lhs = self.bracket_basis(i, j);
                let mut defect = lhs.clone();
                defect.add_scaled(self.eps(i, j), &self.bracket_basis(j, i));
                if !defect.is_zero() {
                    report.push(
                        "skew-symmetry",
                        format!("({},{})", self.name(i), self.name(j)),
                        self.show(&defect),
                    );
                }
            }
        }
        let alpha_cols: Vec<AlgebraElement> = (0..n).map(|i| self.alpha.column(i).clone()).collect();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // one representative per cyclic class
                    if (j, k, i) < (i, j, k) || (k, i, j) < (i, j, k) {
                        continue;
                    }
                    let defect = self.jacobi_defect(&alpha_cols, i, j, k);
                    if !defect.is_zero() {
                        report.push(
                            "hom-jacobi",
                            format!("({},{},{})", self.name(i), self.name(j), self.name(k)),
                            self.show(&defect),
                        );
                    }
                }
            }
        }
        for j in 0..n {
            let col = self.alpha.column(j);
            let stray = AlgebraElement::from_terms(
                col.terms()
                    .filter(|(k, _)| self.basis.degree(*k) != self.basis.degree(j))
                    .map(|(k, c)| (k, c.clone())),
            );
            if !stray.is_zero() {
                report.push("alpha-even", self.name(j).to_string(), self.show(&stray));
            }
        }
        if self.flags.involutive {
            let sq = self.alpha.compose(&self.alpha);
            for j in 0..n {
                let defect = sq.column(j).sub(&AlgebraElement::basis(j));
                if !defect.is_zero() {
                    report.push("alpha-involutive", self.name(j).to_string(), self.show(&defect));
                }
            }
        }
        if self.flags.multiplicative {
            report.merge(self.multiplicativity_report());
        }
        report
    }

    /// `α[x,y] = [αx, αy]` on basis pairs.
    pub fn multiplicativity_report(&self) -> VerificationReport {
        let n = self.dim();
        let mut report = VerificationReport::new();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.alpha.apply(&self.bracket_basis(i, j));
                let rhs = self
                    .bracket
                    .eval(self.alpha.column(i), self.alpha.column(j));
                let defect = lhs.sub(&rhs);
                if !defect.is_zero() {
                    report.push(
                        "alpha-multiplicative",
                        format!("({},{})", self.name(i), self.name(j)),
                        self.show(&defect),
                    );
                }
            }
        }
        report
    }

    pub fn is_involutive(&self) -> bool {
        self.alpha.compose(&self.alpha).is_identity()
    }

    /// `ε(z,x)[α(x),[y,z]] + ε(x,y)[α(y),[z,x]] + ε(y,z)[α(z),[x,y]]`.
    fn jacobi_defect(&self, alpha_cols: &[AlgebraElement], x: usize, y: usize, z: usize) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
            let inner = self.bracket_basis(b, c);
            if inner.is_zero() {
                continue;
            }
            let term = self.bracket.eval(&alpha_cols[a], &inner);
            out.add_scaled(self.eps(c, a), &term);
        }
        out
    }

    /// Returns `(𝔤, σ∘[,], ε, σ)` for an ordinary color Lie algebra and an even
    /// bracket morphism `σ`.
    pub fn yau_twist(&self, sigma: &LinearMap) -> Result<ColorHomLieAlgebra, AlgebraError> {
        if !self.alpha.is_identity() {
            return Err(AlgebraError::NotIdentityTwist);
        }
        let n = self.dim();
        if sigma.rows() != n || sigma.cols() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: sigma.cols(),
            });
        }
        let base = self.verify();
        if !base.passed() {
            return Err(AlgebraError::NotColorLie(base));
        }
        for j in 0..n {
            if sigma
                .column(j)
                .terms()
                .any(|(k, _)| self.basis.degree(k) != self.basis.degree(j))
            {
                return Err(AlgebraError::NotEven {
                    witness: self.name(j).to_string(),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = sigma.apply(&self.bracket_basis(i, j));
                let rhs = self.bracket.eval(sigma.column(i), sigma.column(j));
                if lhs != rhs {
                    return Err(AlgebraError::NotMorphism {
                        witness: format!("({},{})", self.name(i), self.name(j)),
                    });
                }
            }
        }
        let involutive = sigma.compose(sigma).is_identity();
        Ok(ColorHomLieAlgebra {
            basis: self.basis.clone(),
            epsilon: self.epsilon.clone(),
            bracket: self.bracket.post_compose(sigma),
            alpha: sigma.clone(),
            flags: AlgebraFlags {
                involutive,
                multiplicative: true,
            },
        })
    }

    /// Checks that `f: self → other` is even, preserves brackets and
    /// intertwines the twists.
    pub fn morphism_check(
        &self,
        f: &LinearMap,
        other: &ColorHomLieAlgebra,
    ) -> Result<VerificationReport, AlgebraError> {
        if f.cols() != self.dim() || f.rows() != other.dim() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                found: f.cols(),
            });
        }
        let mut report = VerificationReport::new();
        let show_other = |x: &AlgebraElement| x.display(other.basis.names()).to_string();
        for j in 0..self.dim() {
            let stray = AlgebraElement::from_terms(
                f.column(j)
                    .terms()
                    .filter(|(k, _)| other.basis.degree(*k) != self.basis.degree(j))
                    .map(|(k, c)| (k, c.clone())),
            );
            if !stray.is_zero() {
                report.push("morphism-even", self.name(j).to_string(), show_other(&stray));
            }
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let lhs = other.bracket.eval(f.column(i), f.column(j));
                let rhs = f.apply(&self.bracket_basis(i, j));
                let defect = lhs.sub(&rhs);
                if !defect.is_zero() {
                    report.push(
                        "morphism-bracket",
                        format!("({},{})", self.name(i), self.name(j)),
                        show_other(&defect),
                    );
                }
            }
        }
        let lhs = f.compose(&self.alpha);
        let rhs = other.alpha.compose(f);
        for j in 0..self.dim() {
            let defect = lhs.column(j).sub(rhs.column(j));
            if !defect.is_zero() {
                report.push("morphism-twist", self.name(j).to_string(), show_other(&defect));
            }
        }
        Ok(report)
    }
}
