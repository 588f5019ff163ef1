//! The free involutive hom-associative algebra `T(M) = ⊕_{i≥1} M^{⊗i}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{fmt_coeff, AlgebraElement, ColorHomLieAlgebra, GradedBasis, LinearMap};
use crate::grading::{Degree, GradingGroup};
use crate::hom_assoc::HomAssociative;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("words must be nonempty")]
    EmptyWord,
    #[error("letter {letter} is outside a basis of dimension {dim}")]
    LetterOutOfRange { letter: usize, dim: usize },
    #[error("map does not intertwine the twists at basis element {witness}")]
    Intertwining { witness: String },
    #[error("expected {expected} images, got {found}")]
    ImageCount { expected: usize, found: usize },
}

/// Pure tensor `e_{l₁} ⊗ ⋯ ⊗ e_{lₙ}`, `n ≥ 1`.
///
/// Ordered by length first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Result<Word, TensorError> {
        if letters.is_empty() {
            return Err(TensorError::EmptyWord);
        }
        Ok(Word(letters))
    }

    pub fn letter(l: usize) -> Word {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn degree(&self, basis: &GradedBasis, group: &GradingGroup) -> Degree {
        self.0
            .iter()
            .fold(group.zero(), |acc, &l| group.add(&acc, basis.degree(l)))
    }

    /// Non-increasing letters.
    pub fn is_non_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWord { word: self, names }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct DisplayWord<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match self.names.get(l) {
                Some(n) => f.write_str(n)?,
                None => write!(f, "#{l}")?,
            }
        }
        Ok(())
    }
}

/// Finite linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeMap<Word, Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Scalar::one())
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut t = Self::zero();
        t.add_term(w, c);
        t
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut t = Self::zero();
        for (w, c) in terms {
            t.add_term(w, c);
        }
        t
    }

    /// Embeds `M` as length-1 words.
    pub fn from_algebra_element(x: &AlgebraElement) -> Self {
        Self::from_terms(x.terms().map(|(k, c)| (Word::letter(k), c.clone())))
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &TensorElement) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), c * v);
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_integer(-1), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero();
        out.add_scaled(c, self);
        out
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

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub(crate) fn pop_last(&mut self) -> Option<(Word, Scalar)> {
        self.terms.pop_last()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).max()
    }

    /// Plain tensor product `⊗` (concatenation).
    pub fn tensor(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayTensor { t: self, names }
    }
}

struct DisplayTensor<'a> {
    t: &'a TensorElement,
    names: &'a [String],
}

impl fmt::Display for DisplayTensor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_zero() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.t.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if (-c).is_one() {
                f.write_str("-")?;
            } else if !c.is_one() {
                write!(f, "{}*", fmt_coeff(c))?;
            }
            write!(f, "[{}]", w.display(self.names))?;
        }
        Ok(())
    }
}

/// Applies `map` to the letters at the selected positions, expanding multilinearly.
fn map_positions(map: &LinearMap, t: &TensorElement, at: impl Fn(usize) -> bool) -> TensorElement {
    let mut out = TensorElement::zero();
    for (w, c) in t.terms() {
        let mut partial: Vec<(Vec<usize>, Scalar)> = vec![(Vec::with_capacity(w.len()), c.clone())];
        for (p, &l) in w.letters().iter().enumerate() {
            if at(p) {
                let image = map.column(l);
                let mut next = Vec::with_capacity(partial.len() * image.coords().len());
                for (prefix, pc) in &partial {
                    for (k, kc) in image.terms() {
                        let mut v = prefix.clone();
                        v.push(k);
                        next.push((v, pc * kc));
                    }
                }
                partial = next;
            } else {
                for (prefix, _) in partial.iter_mut() {
                    prefix.push(l);
                }
            }
        }
        for (v, pc) in partial {
            out.add_term(Word(v), pc);
        }
    }
    out
}

/// `α_T` for an arbitrary letter map.
pub fn alpha_t_with(map: &LinearMap, t: &TensorElement) -> TensorElement {
    map_positions(map, t, |_| true)
}

/// `θ` for an arbitrary letter map: applies it at positions 3, 5, 7, … (1-indexed).
pub fn theta_with(map: &LinearMap, t: &TensorElement) -> TensorElement {
    map_positions(map, t, |p| p >= 2 && p % 2 == 0)
}

/// `x ⊙ y` for an involutive letter map.
pub fn odot_with(map: &LinearMap, x: &TensorElement, y: &TensorElement) -> TensorElement {
    let x_twisted = alpha_t_with(map, x);
    let mut out = TensorElement::zero();
    for (wy, cy) in y.terms() {
        let left = if wy.len() % 2 == 0 { &x_twisted } else { x };
        let head = Word::letter(wy.0[0]);
        let right = if wy.len() > 1 {
            let tail = TensorElement::word(Word(wy.0[1..].to_vec()));
            TensorElement::word(head).tensor(&alpha_t_with(map, &tail))
        } else {
            TensorElement::word(head)
        };
        out.add_scaled(cy, &left.tensor(&right));
    }
    out
}

pub fn alpha_t(a: &ColorHomLieAlgebra, t: &TensorElement) -> TensorElement {
    alpha_t_with(a.alpha(), t)
}

/// `x ⊙ y = α_T^{ℓ(y)−1}(x) ⊗ y₁ ⊗ α_T(y₂ ⊗ ⋯ ⊗ y_ℓ)` on pure tensors.
pub fn odot(a: &ColorHomLieAlgebra, x: &TensorElement, y: &TensorElement) -> TensorElement {
    odot_with(a.alpha(), x, y)
}

pub fn theta(a: &ColorHomLieAlgebra, t: &TensorElement) -> TensorElement {
    theta_with(a.alpha(), t)
}

/// Homogeneous degree of every word of `t`, or `None` if inhomogeneous or zero.
pub fn homogeneous_degree(a: &ColorHomLieAlgebra, t: &TensorElement) -> Option<Degree> {
    let g = a.epsilon().group();
    let mut it = t.terms().map(|(w, _)| w.degree(a.basis(), g));
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

/// `T(M)` as a hom-associative algebra.
#[derive(Debug, Clone)]
pub struct TensorAlgebra {
    alpha: LinearMap,
}

impl TensorAlgebra {
    pub fn new(a: &ColorHomLieAlgebra) -> Self {
        TensorAlgebra {
            alpha: a.alpha().clone(),
        }
    }

    pub fn from_twist(alpha: LinearMap) -> Self {
        TensorAlgebra { alpha }
    }
}

impl HomAssociative for TensorAlgebra {
    type Element = TensorElement;

    fn zero(&self) -> TensorElement {
        TensorElement::zero()
    }

    fn add(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        a.add(b)
    }

    fn scale(&self, a: &TensorElement, c: &Scalar) -> TensorElement {
        a.scale(c)
    }

    fn mul(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        odot_with(&self.alpha, a, b)
    }

    fn twist(&self, a: &TensorElement) -> TensorElement {
        alpha_t_with(&self.alpha, a)
    }
}

/// The unique extension `f̄: T(M) → target` of a twist-intertwining map on `M`.
pub struct FreeExtension<'a, T: HomAssociative> {
    target: &'a T,
    images: Vec<T::Element>,
}

/// Builds `f̄` from the images `f(e_j)`, checking `f∘α = α_target∘f` on the basis.
pub fn free_extension<'a, T: HomAssociative>(
    a: &ColorHomLieAlgebra,
    target: &'a T,
    images: Vec<T::Element>,
) -> Result<FreeExtension<'a, T>, TensorError> {
    if images.len() != a.dim() {
        return Err(TensorError::ImageCount {
            expected: a.dim(),
            found: images.len(),
        });
    }
    for j in 0..a.dim() {
        let mut lhs = target.zero();
        for (k, c) in a.alpha().column(j).terms() {
            lhs = target.add(&lhs, &target.scale(&images[k], c));
        }
        if lhs != target.twist(&images[j]) {
            return Err(TensorError::Intertwining {
                witness: a.basis().name(j).to_string(),
            });
        }
    }
    Ok(FreeExtension { target, images })
}

impl<T: HomAssociative> FreeExtension<'_, T> {
    /// `f̄(x₁⊗⋯⊗xₙ) = ((f(x₁)·f(x₂))·f(x₃))⋯·f(xₙ)`.
    pub fn eval(&self, t: &TensorElement) -> Result<T::Element, TensorError> {
        let mut out = self.target.zero();
        for (w, c) in t.terms() {
            if let Some(&l) = w.letters().iter().find(|&&l| l >= self.images.len()) {
                return Err(TensorError::LetterOutOfRange {
                    letter: l,
                    dim: self.images.len(),
                });
            }
            let mut acc = self.images[w.0[0]].clone();
            for &l in &w.0[1..] {
                acc = self.target.mul(&acc, &self.images[l]);
            }
            out = self.target.add(&out, &self.target.scale(&acc, c));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraFlags, BracketTable};
    use crate::grading::CommutationFactor;

    fn w(ls: &[usize]) -> Word {
        Word::new(ls.to_vec()).unwrap()
    }

    fn swap_module() -> ColorHomLieAlgebra {
        let g = GradingGroup::trivial();
        let basis = GradedBasis::new(vec!["e1".into(), "e2".into()], vec![g.zero(); 2]).unwrap();
        let swap = LinearMap::from_columns(2, vec![AlgebraElement::basis(1), AlgebraElement::basis(0)]).unwrap();
        ColorHomLieAlgebra::new(basis, CommutationFactor::trivial(&g), BracketTable::new(), swap, AlgebraFlags::default()).unwrap()
    }

    #[test]
    fn empty_word_rejected() {
        assert_eq!(Word::new(vec![]), Err(TensorError::EmptyWord));
    }

    #[test]
    fn word_order_is_length_then_lex() {
        assert!(w(&[5]) < w(&[0, 0]));
        assert!(w(&[0, 1]) < w(&[1, 0]));
    }

    #[test]
    fn swap_alpha_and_theta() {
        let a = swap_module();
        let t = TensorElement::word(w(&[0, 0, 1]));
        assert_eq!(alpha_t(&a, &t), TensorElement::word(w(&[1, 1, 0])));
        let t = TensorElement::word(w(&[0, 1, 0]));
        assert_eq!(theta(&a, &t), TensorElement::word(w(&[0, 1, 1])));
        let short = TensorElement::word(w(&[1, 0]));
        assert_eq!(theta(&a, &short), short);
    }

    #[test]
    fn swap_odot() {
        let a = swap_module();
        let x = TensorElement::word(w(&[0]));
        let y = TensorElement::word(w(&[0, 1]));
        assert_eq!(odot(&a, &x, &y), TensorElement::word(w(&[1, 0, 0])));
        let z = TensorElement::word(w(&[1]));
        assert_eq!(odot(&a, &y, &z), TensorElement::word(w(&[0, 1, 1])));
    }

    #[test]
    fn sign_twist_is_multilinear() {
        let h = crate::algebra::tests::super_heisenberg();
        let t = h.yau_twist(&LinearMap::diagonal(&[Scalar::from_integer(-1), Scalar::from_integer(-1), Scalar::one()])).unwrap();
        let x = TensorElement::word(w(&[0, 2]));
        assert_eq!(alpha_t(&t, &x), x.scale(&Scalar::from_integer(-1)));
    }

    #[test]
    fn free_extension_into_tensor_algebra_is_identity() {
        let a = swap_module();
        let target = TensorAlgebra::new(&a);
        let images = (0..2).map(|j| TensorElement::word(Word::letter(j))).collect();
        let f = free_extension(&a, &target, images).unwrap();
        for ls in [vec![0], vec![1, 0], vec![0, 1, 1], vec![1, 0, 0, 1]] {
            let t = TensorElement::word(w(&ls));
            assert_eq!(f.eval(&t).unwrap(), t);
        }
    }

    #[test]
    fn free_extension_rejects_non_intertwining_map() {
        let a = swap_module();
        let target = TensorAlgebra::new(&a);
        let images = vec![TensorElement::word(Word::letter(0)), TensorElement::word(Word::letter(0))];
        assert!(matches!(
            free_extension(&a, &target, images),
            Err(TensorError::Intertwining { .. })
        ));
    }
}
