//! Exact sparse row reduction over [`Scalar`].

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Sparse vector keyed by column index; no stored zeros.
pub type SparseVec = BTreeMap<usize, Scalar>;

/// Adds `c * v` into `acc`, dropping cancelled entries.
pub fn axpy(acc: &mut SparseVec, c: &Scalar, v: &SparseVec) {
    for (k, x) in v {
        add_entry(acc, *k, c * x);
    }
}

pub fn add_entry(acc: &mut SparseVec, k: usize, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&k) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                acc.remove(&k);
            }
        }
        None => {
            acc.insert(k, c);
        }
    }
}

/// Incrementally maintained echelon basis of a row space.
///
/// Every stored row has leading entry 1 at its pivot column and no other
/// stored row shares that pivot.
#[derive(Debug, Clone, Default)]
pub struct RowSpace {
    pivots: BTreeMap<usize, SparseVec>,
}

impl RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Remainder of `row` after eliminating every pivot column.
    pub fn reduce(&self, row: &SparseVec) -> SparseVec {
        let mut work = row.clone();
        let mut out = SparseVec::new();
        while let Some((c, v)) = work.pop_first() {
            match self.pivots.get(&c) {
                Some(p) => {
                    let f = -&v;
                    for (k, pv) in p.iter().skip(1) {
                        add_entry(&mut work, *k, &f * pv);
                    }
                }
                None => {
                    out.insert(c, v);
                }
            }
        }
        out
    }

    /// Adds `row`; returns whether it enlarged the space.
    pub fn insert(&mut self, row: &SparseVec) -> bool {
        let r = self.reduce(row);
        let Some((&lead, lv)) = r.iter().next() else {
            return false;
        };
        let inv = lv.inv().expect("nonzero leading entry");
        let normalized: SparseVec = r.iter().map(|(k, v)| (*k, v * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    pub fn contains(&self, row: &SparseVec) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut s = Self::new();
        for r in rows {
            s.insert(r);
        }
        s
    }

    /// Whether every row of `other` lies in `self`.
    pub fn contains_space(&self, other: &RowSpace) -> bool {
        other.pivots.values().all(|r| self.contains(r))
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec> {
        self.pivots.values()
    }
}

pub fn rank<'a>(rows: impl IntoIterator<Item = &'a SparseVec>) -> usize {
    RowSpace::from_rows(rows).rank()
}

/// Exact subspace equality of two spans.
pub fn same_span(a: &RowSpace, b: &RowSpace) -> bool {
    a.rank() == b.rank() && a.contains_space(b)
}

/// Gauss-Jordan inverse of a square dense matrix (row-major). `None` if singular.
pub fn invert_dense(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].inv().expect("nonzero pivot");
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot) {
                if !pv.is_zero() {
                    *v -= &(&f * pv);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}
