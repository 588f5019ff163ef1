//! Exact arithmetic in cyclotomic fields `Q(ζ_N)`.
//!
//! A [`Scalar`] stores its coordinates in the power basis `1, ζ, …, ζ^{φ(N)-1}`
//! modulo the `N`-th cyclotomic polynomial. Values that happen to be rational
//! are always normalized to order 1, so rational equality is plain coefficient
//! equality. Values of different orders are compared and combined inside
//! `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scalar literal at column {column}: {message}")]
pub struct ScalarParseError {
    /// 1-based column inside the literal.
    pub column: usize,
    pub message: String,
}

/// Integer coefficients of `Φ_n`, lowest degree first. Memoized per order.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    assert!(n >= 1, "cyclotomic order must be positive");
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("cyclotomic cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    let p = Arc::new(num);
    cache
        .write()
        .expect("cyclotomic cache poisoned")
        .insert(n, p.clone());
    p
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Euler's totient, which is the degree of `Φ_n`.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An exact element of `Q(ζ_N)`.
#[derive(Clone, Debug)]
pub struct Scalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Scalar {
            order: 1,
            coeffs: vec![q],
        }
    }

    /// `ζ_order^k`, reduced modulo `Φ_order`. Negative `k` is allowed.
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        assert!(order >= 1, "root of unity of order 0");
        let e = k.rem_euclid(order as i64) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_poly(order, poly)
    }

    /// Builds `Σ poly[i] ζ_order^i` for an arbitrary-length coefficient list.
    pub fn from_poly(order: u32, poly: Vec<BigRational>) -> Self {
        let coeffs = reduce(order, poly);
        let mut s = Scalar { order, coeffs };
        s.normalize();
        s
    }

    /// The cyclotomic order this value is currently expressed in.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Power-basis coordinates (length `φ(order)`).
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        (self.order == 1).then(|| self.coeffs[0].clone())
    }

    fn normalize(&mut self) {
        if self.order > 1 && self.coeffs.iter().skip(1).all(Zero::is_zero) {
            let c0 = self.coeffs.first().cloned().unwrap_or_else(BigRational::zero);
            self.order = 1;
            self.coeffs = vec![c0];
        }
    }

    /// Re-expresses `self` inside `Q(ζ_m)`; `m` must be a multiple of the order.
    fn lifted(&self, m: u32) -> Vec<BigRational> {
        if m == self.order {
            return self.coeffs.clone();
        }
        debug_assert_eq!(m % self.order, 0);
        let step = (m / self.order) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        reduce(m, poly)
    }

    fn aligned(&self, other: &Scalar) -> (u32, Vec<BigRational>, Vec<BigRational>) {
        if self.order == other.order {
            return (self.order, self.coeffs.clone(), other.coeffs.clone());
        }
        let m = self.order.lcm(&other.order);
        (m, self.lifted(m), other.lifted(m))
    }

    /// Scalar multiplication by a rational.
    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Scalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(Self::from_rational(self.coeffs[0].recip()));
        }
        // Solve (multiplication by self) * c = 1 in the power basis.
        let n = self.coeffs.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut shifted = vec![BigRational::zero(); j];
            shifted.extend(self.coeffs.iter().cloned());
            cols.push(reduce(self.order, shifted));
        }
        let mut rhs = vec![BigRational::zero(); n];
        rhs[0] = BigRational::one();
        let sol = solve_dense(cols, rhs)?;
        let mut s = Scalar {
            order: self.order,
            coeffs: sol,
        };
        s.normalize();
        Some(s)
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut acc = Scalar::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        acc
    }

    /// Parses a literal such as `3/4`, `-2`, `z`, `z^2-1/2`, `1/3*z^3+z` where
    /// `z` stands for `ζ_order`.
    pub fn parse(text: &str, order: u32) -> Result<Scalar, ScalarParseError> {
        Parser::new(text).parse(order)
    }
}

fn reduce(order: u32, mut poly: Vec<BigRational>) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(order);
    let deg = phi.len() - 1;
    while poly.len() > deg {
        let top = poly.pop().expect("nonempty");
        if top.is_zero() {
            continue;
        }
        let base = poly.len() - deg;
        for (j, &pj) in phi.iter().take(deg).enumerate() {
            if pj != 0 {
                poly[base + j] -= &top * BigRational::from_integer(BigInt::from(pj));
            }
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

/// Gauss-Jordan on a column-major dense system. `None` if singular.
fn solve_dense(cols: Vec<Vec<BigRational>>, rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot_row = m[c].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().expect("augmented")).collect())
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (_, a, b) = self.aligned(other);
        a == b
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::from_rational(q)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let (order, mut a, b) = self.aligned(rhs);
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x += y;
        }
        let mut s = Scalar { order, coeffs: a };
        s.normalize();
        s
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let (order, mut a, b) = self.aligned(rhs);
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x -= y;
        }
        let mut s = Scalar { order, coeffs: a };
        s.normalize();
        s
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.order == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.order == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let (order, a, b) = self.aligned(rhs);
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Scalar::from_poly(order, prod)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            return f.write_str(&fmt_rational(&self.coeffs[0]));
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let term = match k {
                0 => fmt_rational(c),
                _ => {
                    let zpart = if k == 1 { "z".to_string() } else { format!("z^{k}") };
                    if c.is_one() {
                        zpart
                    } else if (-c).is_one() {
                        format!("-{zpart}")
                    } else {
                        format!("{}*{zpart}", fmt_rational(c))
                    }
                }
            };
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        f.write_str(&out)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect(),
            pos: 0,
            _src: src,
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(i, _)| i + 1)
            .unwrap_or_else(|| self.chars.last().map(|(i, _)| i + 2).unwrap_or(1))
    }

    fn err(&self, message: impl Into<String>) -> ScalarParseError {
        ScalarParseError {
            column: self.column(),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            // digits separated by whitespace do not form one number
            if self.pos > start && self.chars[self.pos].0 != self.chars[self.pos - 1].0 + 1 {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().ok()
    }

    fn parse(mut self, order: u32) -> Result<Scalar, ScalarParseError> {
        if self.chars.is_empty() {
            return Err(self.err("empty literal"));
        }
        let mut poly: Vec<BigRational> = Vec::new();
        let mut first = true;
        while self.pos < self.chars.len() {
            let negative = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let (coeff, power) = self.term()?;
            let coeff = if negative { -coeff } else { coeff };
            if poly.len() <= power {
                poly.resize(power + 1, BigRational::zero());
            }
            poly[power] += coeff;
        }
        Ok(Scalar::from_poly(order, poly))
    }

    fn term(&mut self) -> Result<(BigRational, usize), ScalarParseError> {
        let mut coeff = BigRational::one();
        let mut had_number = false;
        if let Some(num) = self.digits() {
            had_number = true;
            let mut q = BigRational::from_integer(num);
            if self.peek() == Some('/') {
                self.pos += 1;
                let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                q = BigRational::new(q.numer().clone(), den);
            }
            coeff = q;
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                return Ok((coeff, 0));
            }
        }
        match self.peek() {
            Some('z') | Some('ζ') => {
                self.pos += 1;
                let mut power = 1usize;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
                    power = usize::try_from(e).map_err(|_| self.err("exponent too large"))?;
                    if power > 1 << 16 {
                        return Err(self.err("exponent too large"));
                    }
                }
                Ok((coeff, power))
            }
            _ if had_number => Err(self.err("expected 'z' after '*'")),
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
            None => Err(self.err("unexpected end of literal")),
        }
    }
}
