//! The enveloping algebra `U(𝔤) = T(𝔤)/I` with PBW normal forms.
//!
//! Everything here works over an α-stable ordered basis `X`. Words are
//! straightened modulo `J_μ`; the normal form of `t` is `S(θ(t))`.
//!
//! Letters `a` with `ε(a,a) = −1` square to `½[a,a]` in `U(𝔤)`, so they occur
//! at most once in a row in a normal word.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraFlags, BracketTable, ColorHomLieAlgebra, GradedBasis, LinearMap};
use crate::grading::Degree;
use crate::hom_assoc::HomAssociative;
use crate::linalg::{RowSpace, SparseVec};
use crate::report::VerificationReport;
use crate::scalar::Scalar;
use crate::tensor::{alpha_t_with, odot_with, theta_with, TensorElement, Word};

/// Default bound on `max_len` for the decomposition oracle.
pub const DEFAULT_ORACLE_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UeaError {
    #[error("the twist is not involutive (α² ≠ id at basis element {witness})")]
    NotInvolutive { witness: String },
    #[error("the twist is not multiplicative at {witness}")]
    NotMultiplicative { witness: String },
    #[error("input is not a color hom-Lie algebra:\n{0}")]
    NotColorHomLie(VerificationReport),
    #[error(
        "no degree-preserving pairing of eigenvectors exists: degree ({degree}) has {plus} (+1)-eigenvectors and {minus} (−1)-eigenvectors, and the flipped twist fails elsewhere"
    )]
    NoInjection { degree: String, plus: usize, minus: usize },
    #[error("μ must be 1 or −1, got {0}")]
    BadMu(String),
    #[error("straightening exceeded its step budget of {budget}")]
    StepBudget { budget: u128 },
    #[error("max_len {max_len} exceeds the cap {cap}")]
    ResourceCap { max_len: usize, cap: usize },
    #[error("max_len must be at least {min}, got {max_len}")]
    MaxLenTooSmall { max_len: usize, min: usize },
    #[error("letter {letter} is outside a basis of dimension {dim}")]
    LetterOutOfRange { letter: usize, dim: usize },
}

/// Which inversion `straighten` resolves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Leftmost,
    Rightmost,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leftmost" => Ok(Strategy::Leftmost),
            "rightmost" => Ok(Strategy::Rightmost),
            _ => Err(format!("unknown strategy '{s}' (expected leftmost or rightmost)")),
        }
    }
}

/// Coordinates in the basis `π(θ(W))`. Words index the ordered basis `X`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm(TensorElement);

impl NormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn as_tensor(&self) -> &TensorElement {
        &self.0
    }

    pub fn into_tensor(self) -> TensorElement {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.0.terms()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.0.coeff(w)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        self.0.display(names)
    }
}

/// Result of [`decomposition_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub max_len: usize,
    pub mu: Scalar,
    pub dim_t: usize,
    pub rank_j: usize,
    pub pbw_count: usize,
    /// All non-increasing words, ignoring the square rule.
    pub non_increasing_count: usize,
    pub combined_rank: usize,
    pub report: VerificationReport,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max_len: {}", self.max_len)?;
        writeln!(f, "mu: {}", self.mu)?;
        writeln!(f, "dim T: {}", self.dim_t)?;
        writeln!(f, "rank J: {}", self.rank_j)?;
        writeln!(f, "#W: {}", self.pbw_count)?;
        writeln!(f, "#non-increasing words: {}", self.non_increasing_count)?;
        writeln!(f, "rank [J | W]: {}", self.combined_rank)?;
        write!(f, "{}", self.report)
    }
}

/// An involutive multiplicative algebra together with an α-stable ordered basis.
#[derive(Debug, Clone)]
pub struct UeaContext {
    original: ColorHomLieAlgebra,
    /// The algebra rewritten over `X`; its twist is `β` in `X` coordinates.
    x_alg: ColorHomLieAlgebra,
    /// `μβ` in `X` coordinates: a permutation of `X`.
    tau: LinearMap,
    mu: Scalar,
    change_of_basis: LinearMap,
    inverse: LinearMap,
}

fn column_space_split(beta: &LinearMap, basis: &GradedBasis) -> (Vec<(AlgebraElement, usize)>, Vec<(AlgebraElement, usize)>) {
    let n = basis.dim();
    let half = Scalar::from_ratio(1, 2);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut plus_space = RowSpace::new();
    let mut minus_space = RowSpace::new();
    for j in 0..n {
        let e = AlgebraElement::basis(j);
        let b = beta.column(j);
        let p = e.add(b).scale(&half);
        let m = e.sub(b).scale(&half);
        if plus_space.insert(p.coords()) {
            plus.push((p, j));
        }
        if minus_space.insert(m.coords()) {
            minus.push((m, j));
        }
    }
    (plus, minus)
}

fn distinct_name(taken: &[String], base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Builds the ordered basis `X` with `β(X) = X` (or `−β(X) = X` when `μ = −1`).
pub fn build_alpha_stable_basis(a: &ColorHomLieAlgebra) -> Result<UeaContext, UeaError> {
    let n = a.dim();
    let beta = a.alpha();
    let sq = beta.compose(beta);
    if let Some(j) = (0..n).find(|&j| *sq.column(j) != AlgebraElement::basis(j)) {
        return Err(UeaError::NotInvolutive {
            witness: a.basis().name(j).to_string(),
        });
    }
    let core = a.clone().with_flags(AlgebraFlags::default()).verify();
    if !core.passed() {
        return Err(UeaError::NotColorHomLie(core));
    }
    if let Some(v) = a.multiplicativity_report().violations.first() {
        return Err(UeaError::NotMultiplicative {
            witness: v.witness.clone(),
        });
    }

    let (plus, minus) = column_space_split(beta, a.basis());
    let degree_of = |j: usize| a.basis().degree(j).clone();
    let mut counts: BTreeMap<Degree, (usize, usize)> = BTreeMap::new();
    for (_, j) in &plus {
        counts.entry(degree_of(*j)).or_default().0 += 1;
    }
    for (_, j) in &minus {
        counts.entry(degree_of(*j)).or_default().1 += 1;
    }
    let (big, small, mu) = if counts.values().all(|&(p, m)| p >= m) {
        (plus, minus, Scalar::one())
    } else if counts.values().all(|&(p, m)| m >= p) {
        (minus, plus, Scalar::from_integer(-1))
    } else {
        let (d, &(p, m)) = counts
            .iter()
            .find(|(_, &(p, m))| p < m)
            .expect("some degree fails");
        return Err(UeaError::NoInjection {
            degree: d.to_string(),
            plus: p,
            minus: m,
        });
    };

    // ι pairs the k-th small vector of a degree with the k-th big one of that degree
    let mut used = vec![false; big.len()];
    let mut x: Vec<(AlgebraElement, usize)> = Vec::with_capacity(n);
    for (v, j) in &small {
        let d = degree_of(*j);
        let k = (0..big.len())
            .find(|&k| !used[k] && degree_of(big[k].1) == d)
            .expect("degree counts allow an injection");
        used[k] = true;
        x.push((big[k].0.add(v), *j));
        x.push((big[k].0.sub(v), *j));
    }
    for (k, (v, j)) in big.iter().enumerate() {
        if !used[k] {
            x.push((v.clone(), *j));
        }
    }

    let change_of_basis =
        LinearMap::from_columns(n, x.iter().map(|(v, _)| v.clone()).collect()).expect("square");
    let inverse = change_of_basis
        .inverse()
        .expect("eigenvectors of an involution form a basis");

    let mut names = Vec::with_capacity(n);
    for (k, (v, _)) in x.iter().enumerate() {
        let exact = (0..n).find(|&j| *v == AlgebraElement::basis(j));
        let base = match exact {
            Some(j) => a.basis().name(j).to_string(),
            None => format!("X{k}"),
        };
        let taken: Vec<String> = names.iter().cloned().chain(a.basis().names().iter().filter(|s| Some(s.as_str()) != exact.map(|j| a.basis().name(j))).cloned()).collect();
        names.push(distinct_name(&taken, base));
    }
    let degrees = x.iter().map(|(_, j)| degree_of(*j)).collect();
    let x_basis = GradedBasis::new(names, degrees).expect("names are distinct");

    let mut bracket = BracketTable::new();
    for i in 0..n {
        for j in 0..n {
            let v = a
                .bracket_table()
                .eval(change_of_basis.column(i), change_of_basis.column(j));
            bracket.set(i, j, inverse.apply(&v));
        }
    }
    let beta_x = inverse.compose(beta).compose(&change_of_basis);
    let tau = beta_x.scale(&mu);
    debug_assert!(is_permutation(&tau), "μβ permutes X");
    let x_alg = ColorHomLieAlgebra::new(
        x_basis,
        a.epsilon().clone(),
        bracket,
        beta_x,
        AlgebraFlags {
            involutive: true,
            multiplicative: true,
        },
    )
    .expect("shapes agree");
    Ok(UeaContext {
        original: a.clone(),
        x_alg,
        tau,
        mu,
        change_of_basis,
        inverse,
    })
}

fn is_permutation(m: &LinearMap) -> bool {
    m.columns().iter().all(|c| {
        let mut t = c.terms();
        matches!((t.next(), t.next()), (Some((_, v)), None) if v.is_one())
    })
}

/// `Σ_{l=1}^{L} n^l`.
fn count_words(n: usize, max_len: usize) -> usize {
    (1..=max_len).map(|l| n.pow(l as u32)).sum()
}

/// All words of exactly `len` letters over `0..n`, lexicographic.
pub fn all_words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// Non-increasing words of length `len` over `0..n`, lexicographically descending.
pub fn non_increasing_words(n: usize, len: usize) -> Vec<Word> {
    fn rec(bound: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(Word::new(cur.clone()).expect("nonempty"));
            return;
        }
        for l in (0..=bound).rev() {
            cur.push(l);
            rec(l, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len > 0 && n > 0 {
        rec(n - 1, len, &mut Vec::new(), &mut out);
    }
    out
}

impl UeaContext {
    pub fn original(&self) -> &ColorHomLieAlgebra {
        &self.original
    }

    /// The algebra over the ordered basis `X`.
    pub fn x_algebra(&self) -> &ColorHomLieAlgebra {
        &self.x_alg
    }

    pub fn x_names(&self) -> &[String] {
        self.x_alg.basis().names()
    }

    pub fn dim(&self) -> usize {
        self.x_alg.dim()
    }

    pub fn mu(&self) -> &Scalar {
        &self.mu
    }

    /// Column `k` is `X_k` in original coordinates.
    pub fn change_of_basis(&self) -> &LinearMap {
        &self.change_of_basis
    }

    /// The twist `β` in `X` coordinates.
    pub fn beta(&self) -> &LinearMap {
        self.x_alg.alpha()
    }

    /// `μβ` in `X` coordinates, used by `θ` and by the rewrite flanks.
    pub fn tau(&self) -> &LinearMap {
        &self.tau
    }

    /// Same basis `X`, different `μ` (±1).
    pub fn with_mu(&self, mu: Scalar) -> Result<UeaContext, UeaError> {
        if mu != Scalar::one() && mu != Scalar::from_integer(-1) {
            return Err(UeaError::BadMu(mu.to_string()));
        }
        Ok(UeaContext {
            tau: self.beta().scale(&mu),
            mu,
            ..self.clone()
        })
    }

    /// Replaces the commutation factor without any checks.
    pub fn with_epsilon(&self, epsilon: crate::grading::CommutationFactor) -> UeaContext {
        UeaContext {
            x_alg: self.x_alg.with_epsilon(epsilon),
            ..self.clone()
        }
    }

    pub fn eps(&self, a: usize, b: usize) -> &Scalar {
        self.x_alg.eps(a, b)
    }

    fn is_square_letter(&self, a: usize) -> bool {
        *self.eps(a, a) == Scalar::from_integer(-1)
    }

    /// Rewrites an element over the original basis in `X` coordinates.
    pub fn from_original(&self, t: &TensorElement) -> TensorElement {
        alpha_t_with(&self.inverse, t)
    }

    pub fn to_original(&self, t: &TensorElement) -> TensorElement {
        alpha_t_with(&self.change_of_basis, t)
    }

    pub fn theta(&self, t: &TensorElement) -> TensorElement {
        theta_with(&self.tau, t)
    }

    pub fn alpha_t(&self, t: &TensorElement) -> TensorElement {
        alpha_t_with(self.beta(), t)
    }

    pub fn odot(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        odot_with(self.beta(), x, y)
    }

    /// `a⊗b − ε(a,b) b⊗a − [a,b]`.
    pub fn commutator_generator(&self, a: usize, b: usize) -> TensorElement {
        let mut g = TensorElement::zero();
        g.add_term(Word::new(vec![a, b]).expect("nonempty"), Scalar::one());
        g.add_term(Word::new(vec![b, a]).expect("nonempty"), -self.eps(a, b));
        let br = TensorElement::from_algebra_element(&self.x_alg.bracket_basis(a, b));
        g.sub(&br)
    }

    fn check_len(max_len: usize) -> Result<(), UeaError> {
        if max_len < 2 {
            return Err(UeaError::MaxLenTooSmall { max_len, min: 2 });
        }
        Ok(())
    }

    /// Spanning set of `I ∩ T_{≤max_len}`: `(w₁ ⊙ g_ab) ⊙ w₂` over words `w₁, w₂` (possibly omitted).
    pub fn ideal_generators(&self, max_len: usize) -> Result<Vec<TensorElement>, UeaError> {
        Self::check_len(max_len)?;
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let g = self.commutator_generator(a, b);
                for l1 in 0..=max_len - 2 {
                    for l2 in 0..=max_len - 2 - l1 {
                        for w1 in all_words(n, l1) {
                            let left = if l1 == 0 {
                                g.clone()
                            } else {
                                self.odot(&TensorElement::word(Word::new(w1).expect("nonempty")), &g)
                            };
                            for w2 in all_words(n, l2) {
                                if l2 == 0 {
                                    out.push(left.clone());
                                } else {
                                    out.push(self.odot(&left, &TensorElement::word(Word::new(w2).expect("nonempty"))));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Spanning set of `J_μ ∩ T_{≤max_len}` for the context's `μ`.
    pub fn j_mu_generators(&self, max_len: usize) -> Result<Vec<TensorElement>, UeaError> {
        self.j_mu_generators_with(max_len, &self.mu.clone())
    }

    /// `𝔞⊗(a⊗b − ε(a,b) b⊗a)⊗𝔟 − μ^{|𝔞|+|𝔟|} β_T(𝔞)⊗[a,b]⊗β_T(𝔟)` for any `μ`.
    pub fn j_mu_generators_with(&self, max_len: usize, mu: &Scalar) -> Result<Vec<TensorElement>, UeaError> {
        Self::check_len(max_len)?;
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let e = self.eps(a, b).clone();
                let br = self.x_alg.bracket_basis(a, b);
                for l1 in 0..=max_len - 2 {
                    for l2 in 0..=max_len - 2 - l1 {
                        let power = mu.pow((l1 + l2) as i64);
                        for w1 in all_words(n, l1) {
                            for w2 in all_words(n, l2) {
                                let mut g = TensorElement::zero();
                                let word = |mid: [usize; 2]| {
                                    let mut v = w1.clone();
                                    v.extend_from_slice(&mid);
                                    v.extend_from_slice(&w2);
                                    Word::new(v).expect("nonempty")
                                };
                                g.add_term(word([a, b]), Scalar::one());
                                g.add_term(word([b, a]), -&e);
                                for (v, c) in self.flanked(&w1, &br, &w2) {
                                    g.add_term(v, -(&(&power * &c)));
                                }
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Terms of `β_T(t₁) ⊗ x ⊗ β_T(t₂)` for possibly empty flanks.
    fn flanked(&self, t1: &[usize], x: &AlgebraElement, t2: &[usize]) -> Vec<(Word, Scalar)> {
        let left = twist_letters(self.beta(), t1);
        let right = twist_letters(self.beta(), t2);
        let mut out = Vec::new();
        for (u, cu) in &left {
            for (k, ck) in x.terms() {
                for (v, cv) in &right {
                    let mut w = u.clone();
                    w.push(k);
                    w.extend_from_slice(v);
                    out.push((Word::new(w).expect("nonempty"), &(cu * ck) * cv));
                }
            }
        }
        out
    }

    fn reducible_positions(&self, w: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let w = w.to_vec();
        (0..w.len().saturating_sub(1))
            .filter(move |&s| w[s] < w[s + 1] || (w[s] == w[s + 1] && self.is_square_letter(w[s])))
    }

    /// Whether `w` belongs to the PBW set `W`.
    pub fn is_pbw_word(&self, w: &Word) -> bool {
        self.reducible_positions(w.letters()).next().is_none()
    }

    fn check_letters(&self, t: &TensorElement) -> Result<(), UeaError> {
        match t.max_letter() {
            Some(l) if l >= self.dim() => Err(UeaError::LetterOutOfRange {
                letter: l,
                dim: self.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// `10 · L! · (max index + 1) · #words_{≤L}`.
    fn step_budget(&self, t: &TensorElement) -> u128 {
        let l = t.max_word_len() as u128;
        let fact: u128 = (1..=l).product::<u128>().max(1);
        let idx = t.max_letter().map_or(1, |m| m as u128 + 1);
        let words = count_words(self.dim(), t.max_word_len()) as u128;
        10u128
            .saturating_mul(fact)
            .saturating_mul(idx)
            .saturating_mul(words.max(1))
    }

    /// The straightening operator `S` on elements over `X`.
    pub fn straighten(&self, t: &TensorElement, strategy: Strategy) -> Result<NormalForm, UeaError> {
        self.check_letters(t)?;
        let budget = self.step_budget(t);
        let half = Scalar::from_ratio(1, 2);
        let mut work = t.clone();
        let mut out = TensorElement::zero();
        let mut steps: u128 = 0;
        while let Some((w, c)) = work.pop_last() {
            let letters = w.letters();
            let mut positions = self.reducible_positions(letters);
            let s = match strategy {
                Strategy::Leftmost => positions.next(),
                Strategy::Rightmost => positions.last(),
            };
            let Some(s) = s else {
                out.add_term(w, c);
                continue;
            };
            steps += 1;
            if steps > budget {
                return Err(UeaError::StepBudget { budget });
            }
            let (a, b) = (letters[s], letters[s + 1]);
            let (t1, t2) = (&letters[..s], &letters[s + 2..]);
            let mut flank = self.mu.pow(letters.len() as i64 - 2) * &c;
            if a < b {
                let mut v = t1.to_vec();
                v.extend_from_slice(&[b, a]);
                v.extend_from_slice(t2);
                work.add_term(Word::new(v).expect("nonempty"), self.eps(a, b) * &c);
            } else {
                flank = &flank * &half;
            }
            let br = self.x_alg.bracket_basis(a, b);
            for (v, cv) in self.flanked(t1, &br, t2) {
                work.add_term(v, &flank * &cv);
            }
        }
        Ok(NormalForm(out))
    }

    /// Coordinates of `π(t)` in `π(θ(W))`, for `t` over `X`.
    pub fn normal_form(&self, t: &TensorElement) -> Result<NormalForm, UeaError> {
        self.normal_form_with(t, Strategy::Leftmost)
    }

    pub fn normal_form_with(&self, t: &TensorElement, strategy: Strategy) -> Result<NormalForm, UeaError> {
        self.straighten(&self.theta(t), strategy)
    }

    /// The representative `θ(u)` of a normal form.
    pub fn lift(&self, u: &NormalForm) -> TensorElement {
        self.theta(u.as_tensor())
    }

    pub fn multiply(&self, u: &NormalForm, v: &NormalForm) -> Result<NormalForm, UeaError> {
        self.normal_form(&self.odot(&self.lift(u), &self.lift(v)))
    }

    pub fn alpha_u(&self, u: &NormalForm) -> Result<NormalForm, UeaError> {
        self.normal_form(&self.alpha_t(&self.lift(u)))
    }

    /// Non-increasing words of length `len` with no repeated letter of self-factor −1,
    /// lexicographically descending.
    pub fn pbw_words(&self, len: usize) -> Vec<Word> {
        non_increasing_words(self.dim(), len)
            .into_iter()
            .filter(|w| self.is_pbw_word(w))
            .collect()
    }

    /// `ψ([x,y]) = ψ(x)ψ(y) − ε(x,y)ψ(y)ψ(x)` and `ψ∘β = α_U∘ψ` on `X`.
    pub fn psi_check(&self) -> Result<VerificationReport, UeaError> {
        let n = self.dim();
        let names = self.x_names();
        let mut report = VerificationReport::new();
        for x in 0..n {
            for y in 0..n {
                let px = NormalForm(TensorElement::word(Word::letter(x)));
                let py = NormalForm(TensorElement::word(Word::letter(y)));
                let xy = self.multiply(&px, &py)?;
                let yx = self.multiply(&py, &px)?;
                let mut lhs = xy.into_tensor();
                lhs.add_scaled(&-self.eps(x, y), yx.as_tensor());
                let rhs = self.normal_form(&TensorElement::from_algebra_element(&self.x_alg.bracket_basis(x, y)))?;
                let defect = lhs.sub(rhs.as_tensor());
                if !defect.is_zero() {
                    report.push(
                        "psi-bracket",
                        format!("({},{})", names[x], names[y]),
                        defect.display(names),
                    );
                }
            }
        }
        for x in 0..n {
            let px = NormalForm(TensorElement::word(Word::letter(x)));
            let lhs = self.normal_form(&TensorElement::from_algebra_element(self.beta().column(x)))?;
            let rhs = self.alpha_u(&px)?;
            let defect = lhs.as_tensor().sub(rhs.as_tensor());
            if !defect.is_zero() {
                report.push("psi-twist", names[x].clone(), defect.display(names));
            }
        }
        Ok(report)
    }

    pub fn decomposition_oracle(&self, max_len: usize) -> Result<OracleReport, UeaError> {
        self.decomposition_oracle_with(max_len, &self.mu.clone(), DEFAULT_ORACLE_CAP)
    }

    /// Row-reduces `J_μ` in the monomial basis of `T_{≤max_len}` and checks that
    /// `W` spans a complement. No rewriting is involved.
    pub fn decomposition_oracle_with(&self, max_len: usize, mu: &Scalar, cap: usize) -> Result<OracleReport, UeaError> {
        if max_len > cap {
            return Err(UeaError::ResourceCap { max_len, cap });
        }
        Self::check_len(max_len)?;
        let n = self.dim();
        let mut index: BTreeMap<Word, usize> = BTreeMap::new();
        for l in 1..=max_len {
            for w in all_words(n, l) {
                let k = index.len();
                index.insert(Word::new(w).expect("nonempty"), k);
            }
        }
        let dim_t = index.len();
        let row = |t: &TensorElement| -> SparseVec { t.terms().map(|(w, c)| (index[w], c.clone())).collect() };
        let mut space = RowSpace::new();
        for g in self.j_mu_generators_with(max_len, mu)? {
            space.insert(&row(&g));
        }
        let rank_j = space.rank();
        let pbw: Vec<Word> = (1..=max_len).flat_map(|l| self.pbw_words(l)).collect();
        let non_increasing_count = (1..=max_len).map(|l| non_increasing_words(n, l).len()).sum();
        let mut combined = space.clone();
        for w in &pbw {
            combined.insert(&SparseVec::from([(index[w], Scalar::one())]));
        }
        let combined_rank = combined.rank();
        let mut report = VerificationReport::new();
        if rank_j + pbw.len() != dim_t {
            report.push(
                "oracle-dimension",
                format!("max_len={max_len}"),
                format!("rank J + #W = {} + {} != {dim_t}", rank_j, pbw.len()),
            );
        }
        if combined_rank != rank_j + pbw.len() {
            report.push(
                "oracle-intersection",
                format!("max_len={max_len}"),
                format!("rank [J | W] = {combined_rank} < {}", rank_j + pbw.len()),
            );
        }
        Ok(OracleReport {
            max_len,
            mu: mu.clone(),
            dim_t,
            rank_j,
            pbw_count: pbw.len(),
            non_increasing_count,
            combined_rank,
            report,
        })
    }
}

/// Terms of `map_T(letters)`; the empty slice maps to the empty word with coefficient 1.
fn twist_letters(map: &LinearMap, letters: &[usize]) -> Vec<(Vec<usize>, Scalar)> {
    let mut partial = vec![(Vec::with_capacity(letters.len()), Scalar::one())];
    for &l in letters {
        let mut next = Vec::with_capacity(partial.len());
        for (prefix, pc) in &partial {
            for (k, kc) in map.column(l).terms() {
                let mut v = prefix.clone();
                v.push(k);
                next.push((v, pc * kc));
            }
        }
        partial = next;
    }
    partial
}

impl HomAssociative for UeaContext {
    type Element = NormalForm;

    fn zero(&self) -> NormalForm {
        NormalForm::zero()
    }

    fn add(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        NormalForm(a.0.add(&b.0))
    }

    fn scale(&self, a: &NormalForm, c: &Scalar) -> NormalForm {
        NormalForm(a.0.scale(c))
    }

    fn mul(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        self.multiply(a, b).expect("straightening terminates")
    }

    fn twist(&self, a: &NormalForm) -> NormalForm {
        self.alpha_u(a).expect("straightening terminates")
    }
}

impl NormalForm {
    /// Wraps an element already supported on PBW words of `ctx`.
    pub fn from_pbw(ctx: &UeaContext, t: TensorElement) -> Option<NormalForm> {
        if t.terms().all(|(w, _)| ctx.is_pbw_word(w)) {
            Some(NormalForm(t))
        } else {
            None
        }
    }

    pub fn letter(x: usize) -> NormalForm {
        NormalForm(TensorElement::word(Word::letter(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::super_heisenberg;
    use crate::grading::{CommutationFactor, GradingGroup};

    fn s(n: i64) -> Scalar {
        Scalar::from_integer(n)
    }

    fn w(ls: &[usize]) -> Word {
        Word::new(ls.to_vec()).unwrap()
    }

    fn abelian(n: usize, alpha: LinearMap) -> ColorHomLieAlgebra {
        let g = GradingGroup::trivial();
        let basis = GradedBasis::new((0..n).map(|i| format!("e{}", i + 1)).collect(), vec![g.zero(); n]).unwrap();
        ColorHomLieAlgebra::new(basis, CommutationFactor::trivial(&g), BracketTable::new(), alpha, AlgebraFlags::default()).unwrap()
    }

    #[test]
    fn identity_twist_keeps_basis() {
        let ctx = build_alpha_stable_basis(&super_heisenberg()).unwrap();
        assert!(ctx.change_of_basis().is_identity());
        assert_eq!(ctx.mu(), &s(1));
        assert_eq!(ctx.x_names(), &["x", "y", "z"]);
    }

    #[test]
    fn minus_identity_flips() {
        let a = abelian(2, LinearMap::identity(2).scale(&s(-1)));
        let ctx = build_alpha_stable_basis(&a).unwrap();
        assert_eq!(ctx.mu(), &s(-1));
        assert!(ctx.change_of_basis().is_identity());
        assert!(ctx.tau().is_identity());
    }

    #[test]
    fn odd_sign_twist_has_no_injection() {
        let h = super_heisenberg();
        let t = h.yau_twist(&LinearMap::diagonal(&[s(-1), s(-1), s(1)])).unwrap();
        assert!(matches!(build_alpha_stable_basis(&t), Err(UeaError::NoInjection { .. })));
    }

    #[test]
    fn swap_twist_gives_eigen_pairs() {
        let a = abelian(2, LinearMap::from_columns(2, vec![AlgebraElement::basis(1), AlgebraElement::basis(0)]).unwrap());
        let ctx = build_alpha_stable_basis(&a).unwrap();
        // ι(x) ± x with the halved projectors recovers e1, e2
        assert_eq!(ctx.x_names(), &["e1", "e2"]);
        // β(X0) = X1
        assert_eq!(ctx.beta().column(0), &AlgebraElement::basis(1));
    }

    #[test]
    fn straighten_single_inversion() {
        let ctx = build_alpha_stable_basis(&super_heisenberg()).unwrap();
        let nf = ctx.straighten(&TensorElement::word(w(&[0, 1])), Strategy::Leftmost).unwrap();
        // x⊗y = ε(x,y) y⊗x + z = −y⊗x + z
        let expected = TensorElement::from_terms([(w(&[1, 0]), s(-1)), (w(&[2]), s(1))]);
        assert_eq!(nf.as_tensor(), &expected);
        let sq = ctx.straighten(&TensorElement::word(w(&[0, 0])), Strategy::Leftmost).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn pbw_word_counts() {
        let a = abelian(2, LinearMap::identity(2));
        let ctx = build_alpha_stable_basis(&a).unwrap();
        assert_eq!(ctx.pbw_words(2), vec![w(&[1, 1]), w(&[1, 0]), w(&[0, 0])]);
        assert_eq!(non_increasing_words(3, 3).len(), 10);
        let h = build_alpha_stable_basis(&super_heisenberg()).unwrap();
        assert_eq!(h.pbw_words(2).len(), 4);
    }

    #[test]
    fn oracle_dim_one() {
        let ctx = build_alpha_stable_basis(&abelian(1, LinearMap::identity(1))).unwrap();
        let r = ctx.decomposition_oracle(3).unwrap();
        assert_eq!((r.dim_t, r.pbw_count, r.rank_j), (3, 3, 0));
        assert!(r.passed());
        assert!(matches!(ctx.decomposition_oracle(5), Err(UeaError::ResourceCap { .. })));
    }

    #[test]
    fn heisenberg_generators_vanish() {
        let ctx = build_alpha_stable_basis(&super_heisenberg()).unwrap();
        for g in ctx.ideal_generators(3).unwrap() {
            assert!(ctx.normal_form(&g).unwrap().is_zero(), "{}", g.display(ctx.x_names()));
        }
        assert!(ctx.psi_check().unwrap().passed());
    }
}
