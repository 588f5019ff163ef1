#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use colorhom::algebra::{AlgebraElement, ColorHomLieAlgebra, LinearMap};
use colorhom::format;
use colorhom::linalg::{invert_dense, SparseVec};
use colorhom::scalar::Scalar;
use colorhom::tensor::{TensorElement, Word};
use colorhom::uea::{build_alpha_stable_basis, UeaContext};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: &[&str] = &[
    "abelian1",
    "abelian1_neg",
    "abelian2",
    "abelian2_neg",
    "abelian2_swap",
    "abelian3",
    "abelian3_oddswap",
    "heisenberg",
    "heisenberg_scaled",
    "heisenberg_signs",
    "heisenberg_swap",
    "quaternion",
    "quaternion_twist",
    "sl2",
    "sl2_omega",
];

/// Fixtures whose twist admits no degree-preserving eigenbasis pairing.
pub const NON_CONSTRUCTIBLE: &[&str] = &["heisenberg_signs", "quaternion_twist"];

/// (untwisted, twisted) pairs among the fixtures.
pub const YAU_PAIRS: &[(&str, &str)] = &[
    ("abelian1", "abelian1_neg"),
    ("abelian2", "abelian2_neg"),
    ("abelian2", "abelian2_swap"),
    ("abelian3", "abelian3_oddswap"),
    ("heisenberg", "heisenberg_scaled"),
    ("heisenberg", "heisenberg_signs"),
    ("heisenberg", "heisenberg_swap"),
    ("quaternion", "quaternion_twist"),
    ("sl2", "sl2_omega"),
];

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn fixture_text(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn fixture(name: &str) -> ColorHomLieAlgebra {
    let rel = format!("{name}.alg");
    format::parse_algebra(&fixture_text(&rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn constructible() -> Vec<(&'static str, UeaContext)> {
    FIXTURES
        .iter()
        .filter(|n| !NON_CONSTRUCTIBLE.contains(n))
        .map(|&n| (n, build_alpha_stable_basis(&fixture(n)).unwrap_or_else(|e| panic!("{n}: {e}"))))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn s(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

/// Small nonzero rational.
pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let mut num = rng.gen_range(-4i64..=4);
    if num == 0 {
        num = 1;
    }
    Scalar::from_ratio(num, rng.gen_range(1i64..=3))
}

pub fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Word {
    Word::new((0..len).map(|_| rng.gen_range(0..n)).collect()).unwrap()
}

/// Homogeneous-length element with up to `terms` random words.
pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize, len: usize, terms: usize) -> TensorElement {
    let mut t = TensorElement::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let w = random_word(rng, n, len);
        t.add_term(w, random_scalar(rng));
    }
    t
}

pub fn random_element(rng: &mut ChaCha8Rng, n: usize) -> AlgebraElement {
    AlgebraElement::from_terms((0..n).map(|i| (i, Scalar::from_integer(rng.gen_range(-2i64..=2)))))
}

/// `P·D·P⁻¹` with `D = diag(±1)` and `P` a random invertible integer matrix.
pub fn random_involution(rng: &mut ChaCha8Rng, n: usize) -> LinearMap {
    loop {
        let p: Vec<Vec<Scalar>> = (0..n)
            .map(|_| (0..n).map(|_| s(rng.gen_range(-2i64..=2))).collect())
            .collect();
        let Some(pinv) = invert_dense(&p) else { continue };
        let d: Vec<Scalar> = (0..n).map(|_| if rng.gen_bool(0.5) { s(1) } else { s(-1) }).collect();
        let pd = LinearMap::from_dense(&p).compose(&LinearMap::diagonal(&d));
        return pd.compose(&LinearMap::from_dense(&pinv));
    }
}

/// Dense indexing of all words of length ≤ `max_len` over `n` letters.
pub struct WordIndex(HashMap<Word, usize>);

impl WordIndex {
    pub fn new(n: usize, max_len: usize) -> Self {
        let mut map = HashMap::new();
        for l in 1..=max_len {
            for w in colorhom::uea::all_words(n, l) {
                let k = map.len();
                map.insert(Word::new(w).unwrap(), k);
            }
        }
        WordIndex(map)
    }

    pub fn row(&self, t: &TensorElement) -> SparseVec {
        t.terms().map(|(w, c)| (self.0[w], c.clone())).collect()
    }
}

/// Pure tensor `f₁ ⊗ ⋯ ⊗ f_k` expanded into words.
pub fn pure(factors: &[AlgebraElement]) -> TensorElement {
    let mut out = TensorElement::from_algebra_element(&factors[0]);
    for f in &factors[1..] {
        out = out.tensor(&TensorElement::from_algebra_element(f));
    }
    out
}

/// Classical PBW straightening for `α = id`, trivial `ε`: non-increasing
/// words, inserting letters one at a time from the right.
pub struct ClassicalPbw<'a> {
    pub algebra: &'a ColorHomLieAlgebra,
}

type Poly = BTreeMap<Vec<usize>, Scalar>;

fn add_into(acc: &mut Poly, w: Vec<usize>, c: Scalar) {
    let e = acc.entry(w.clone()).or_insert_with(Scalar::zero);
    *e += &c;
    if e.is_zero() {
        acc.remove(&w);
    }
}

impl ClassicalPbw<'_> {
    /// `m · x` for a non-increasing monomial `m`.
    fn times_letter(&self, m: &[usize], x: usize) -> Poly {
        let mut out = Poly::new();
        match m.split_last() {
            None => add_into(&mut out, vec![x], s(1)),
            Some((&last, _)) if last >= x => {
                let mut v = m.to_vec();
                v.push(x);
                add_into(&mut out, v, s(1));
            }
            Some((&last, rest)) => {
                // m'·l·x = (m'·x)·l + m'·[l,x]
                for (w, c) in self.times_letter(rest, x) {
                    for (w2, c2) in self.times_letter(&w, last) {
                        add_into(&mut out, w2, &c * &c2);
                    }
                }
                for (k, ck) in self.algebra.bracket_basis(last, x).terms() {
                    for (w2, c2) in self.times_letter(rest, k) {
                        add_into(&mut out, w2, ck * &c2);
                    }
                }
            }
        }
        out
    }

    pub fn normal_form(&self, t: &TensorElement) -> TensorElement {
        let mut total = Poly::new();
        for (w, c) in t.terms() {
            let mut acc = Poly::new();
            acc.insert(Vec::new(), s(1));
            for &x in w.letters() {
                let mut next = Poly::new();
                for (m, cm) in &acc {
                    for (v, cv) in self.times_letter(m, x) {
                        add_into(&mut next, v, cm * &cv);
                    }
                }
                acc = next;
            }
            for (v, cv) in acc {
                add_into(&mut total, v, c * &cv);
            }
        }
        TensorElement::from_terms(total.into_iter().map(|(w, c)| (Word::new(w).unwrap(), c)))
    }
}
