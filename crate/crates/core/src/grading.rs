//! Finite abelian grading groups and commutation factors.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::report::VerificationReport;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("grading group needs at least one modulus >= 1")]
    EmptyGroup,
    #[error("modulus {0} is not >= 1")]
    BadModulus(i64),
    #[error("degree {degree:?} does not fit moduli {moduli:?}")]
    BadDegree { degree: Vec<i64>, moduli: Vec<u32> },
    #[error("pairing matrix must be {expected}x{expected}")]
    PairingShape { expected: usize },
    #[error("pairing entry ({row},{col}) = {value} is incompatible with the moduli (not a bicharacter)")]
    IncompatiblePairing { row: usize, col: usize, value: i64 },
    #[error("pairing entries ({row},{col}) and ({col},{row}) violate e(a,b)e(b,a)=1")]
    NotSkew { row: usize, col: usize },
    #[error("commutation factor table is missing ({0}, {1})")]
    MissingEntry(Degree, Degree),
    #[error("commutation factor value at ({0}, {1}) is zero")]
    ZeroEntry(Degree, Degree),
}

/// `Z_{m1} × … × Z_{mk}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GradingGroup {
    moduli: Vec<u32>,
}

/// Canonical residue vector of a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn residues(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl GradingGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self, GradingError> {
        if moduli.is_empty() {
            return Err(GradingError::EmptyGroup);
        }
        if let Some(&m) = moduli.iter().find(|&&m| m == 0) {
            return Err(GradingError::BadModulus(m as i64));
        }
        Ok(GradingGroup { moduli })
    }

    /// The trivial group `Z_1`.
    pub fn trivial() -> Self {
        GradingGroup { moduli: vec![1] }
    }

    /// `Z_2`, the super grading.
    pub fn z2() -> Self {
        GradingGroup { moduli: vec![2] }
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// lcm of the moduli; every factor value is an `exponent`-th root of unity.
    pub fn exponent(&self) -> u32 {
        self.moduli.iter().fold(1, |acc, &m| acc.lcm(&m))
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&m| m as usize).product()
    }

    pub fn zero(&self) -> Degree {
        Degree(vec![0; self.moduli.len()])
    }

    pub fn degree(&self, residues: &[i64]) -> Result<Degree, GradingError> {
        if residues.len() != self.moduli.len() {
            return Err(GradingError::BadDegree {
                degree: residues.to_vec(),
                moduli: self.moduli.clone(),
            });
        }
        Ok(Degree(
            residues
                .iter()
                .zip(&self.moduli)
                .map(|(&r, &m)| r.rem_euclid(m as i64) as u32)
                .collect(),
        ))
    }

    pub fn add(&self, a: &Degree, b: &Degree) -> Degree {
        Degree(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Degree) -> Degree {
        Degree(
            a.0.iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    /// Mixed-radix position, last component fastest.
    pub fn index_of(&self, d: &Degree) -> usize {
        d.0.iter()
            .zip(&self.moduli)
            .fold(0, |acc, (&r, &m)| acc * m as usize + r as usize)
    }

    pub fn element(&self, mut idx: usize) -> Degree {
        let mut res = vec![0u32; self.moduli.len()];
        for (slot, &m) in res.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % m as usize) as u32;
            idx /= m as usize;
        }
        Degree(res)
    }

    pub fn elements(&self) -> impl Iterator<Item = Degree> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn contains(&self, d: &Degree) -> bool {
        d.0.len() == self.moduli.len() && d.0.iter().zip(&self.moduli).all(|(&r, &m)| r < m)
    }
}

/// A total table `Γ×Γ → k∖{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationFactor {
    group: GradingGroup,
    table: Vec<Scalar>,
    pairing: Option<Vec<Vec<i64>>>,
}

impl CommutationFactor {
    /// `ε(a,b) = ζ_N^{Σ P_ij a_i b_j}` with `N` the exponent of the group.
    ///
    /// Each entry must be compatible with the moduli it pairs (so the exponent
    /// is well defined on residues) and `P + Pᵀ ≡ 0 (mod N)` so that
    /// `ε(a,b)ε(b,a) = 1`.
    pub fn from_pairing(group: &GradingGroup, pairing: &[Vec<i64>]) -> Result<Self, GradingError> {
        let k = group.rank();
        if pairing.len() != k || pairing.iter().any(|row| row.len() != k) {
            return Err(GradingError::PairingShape { expected: k });
        }
        let n = group.exponent() as i64;
        let m = group.moduli();
        for i in 0..k {
            for j in 0..k {
                let p = pairing[i][j];
                if (p * m[i] as i64) % n != 0 || (p * m[j] as i64) % n != 0 {
                    return Err(GradingError::IncompatiblePairing {
                        row: i,
                        col: j,
                        value: p,
                    });
                }
            }
        }
        for i in 0..k {
            for j in i..k {
                if (pairing[i][j] + pairing[j][i]).rem_euclid(n) != 0 {
                    return Err(GradingError::NotSkew { row: i, col: j });
                }
            }
        }
        let order = group.order();
        let mut table = Vec::with_capacity(order * order);
        for a in group.elements() {
            for b in group.elements() {
                let mut e = 0i64;
                for i in 0..k {
                    for j in 0..k {
                        e += pairing[i][j] * a.0[i] as i64 * b.0[j] as i64;
                    }
                }
                table.push(Scalar::root_of_unity(group.exponent(), e));
            }
        }
        Ok(CommutationFactor {
            group: group.clone(),
            table,
            pairing: Some(pairing.to_vec()),
        })
    }

    /// Free table, not checked against the axioms; run [`Self::verify`] before use.
    pub fn from_table(
        group: &GradingGroup,
        entries: impl IntoIterator<Item = (Degree, Degree, Scalar)>,
    ) -> Result<Self, GradingError> {
        let order = group.order();
        let mut table: Vec<Option<Scalar>> = vec![None; order * order];
        for (a, b, v) in entries {
            for d in [&a, &b] {
                if !group.contains(d) {
                    return Err(GradingError::BadDegree {
                        degree: d.0.iter().map(|&r| r as i64).collect(),
                        moduli: group.moduli.clone(),
                    });
                }
            }
            if v.is_zero() {
                return Err(GradingError::ZeroEntry(a, b));
            }
            table[group.index_of(&a) * order + group.index_of(&b)] = Some(v);
        }
        let mut full = Vec::with_capacity(order * order);
        for (idx, v) in table.into_iter().enumerate() {
            match v {
                Some(v) => full.push(v),
                None => {
                    return Err(GradingError::MissingEntry(
                        group.element(idx / order),
                        group.element(idx % order),
                    ))
                }
            }
        }
        Ok(CommutationFactor {
            group: group.clone(),
            table: full,
            pairing: None,
        })
    }

    /// `ε ≡ 1`.
    pub fn trivial(group: &GradingGroup) -> Self {
        let zero = vec![vec![0; group.rank()]; group.rank()];
        Self::from_pairing(group, &zero).expect("zero pairing is always valid")
    }

    /// `ε(x,y) = (-1)^{|x||y|}` on `Z_2`.
    pub fn super_sign() -> Self {
        Self::from_pairing(&GradingGroup::z2(), &[vec![1]]).expect("super pairing is valid")
    }

    pub fn group(&self) -> &GradingGroup {
        &self.group
    }

    /// The pairing matrix this factor was built from, if any.
    pub fn pairing(&self) -> Option<&[Vec<i64>]> {
        self.pairing.as_deref()
    }

    pub fn value(&self, a: &Degree, b: &Degree) -> &Scalar {
        let n = self.group.order();
        &self.table[self.group.index_of(a) * n + self.group.index_of(b)]
    }

    /// Replaces one table entry. Intended for building sabotage controls.
    pub fn with_value(&self, a: &Degree, b: &Degree, v: Scalar) -> Self {
        let n = self.group.order();
        let mut out = self.clone();
        out.table[self.group.index_of(a) * n + self.group.index_of(b)] = v;
        out.pairing = None;
        out
    }

    /// Exhaustive check of nonvanishing and axioms (i)–(iii).
    pub fn verify(&self) -> VerificationReport {
        let g = &self.group;
        let mut report = VerificationReport::new();
        let elems: Vec<Degree> = g.elements().collect();
        for a in &elems {
            for b in &elems {
                let ab = self.value(a, b);
                if ab.is_zero() {
                    report.push("factor-nonzero", format!("({a}|{b})"), ab);
                }
                let sym = ab * self.value(b, a);
                if !sym.is_one() {
                    report.push(
                        "factor-axiom-iii",
                        format!("({a}|{b})"),
                        &sym - &Scalar::one(),
                    );
                }
                for c in &elems {
                    let lhs = self.value(&g.add(a, b), c);
                    let rhs = self.value(a, c) * self.value(b, c);
                    if lhs != &rhs {
                        report.push("factor-axiom-i", format!("({a}|{b}|{c})"), lhs - &rhs);
                    }
                    let lhs = self.value(a, &g.add(b, c));
                    let rhs = ab * self.value(a, c);
                    if lhs != &rhs {
                        report.push("factor-axiom-ii", format!("({a}|{b}|{c})"), lhs - &rhs);
                    }
                }
            }
        }
        report
    }
}
