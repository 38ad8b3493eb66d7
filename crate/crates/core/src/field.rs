//! Arithmetic in GF(p^k) using a polynomial basis over GF(p).
//!
//! Elements are packed into a `u32` as the base-`p` number whose digits are
//! the polynomial coefficients, constant term first. The packing is canonical,
//! so element equality is coefficient-wise equality.
//!
//! Fields with at most 2^16 elements carry exponent/logarithm tables over a
//! fixed primitive element; larger fields fall back to schoolbook polynomial
//! multiplication modulo the defining polynomial.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Largest field order for which log/antilog tables are built.
pub const TABLE_LIMIT: u32 = 1 << 16;

/// Largest field order for which a full addition table is built.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({p}^{k}) does not fit in 32 bits")]
    TooLarge { p: u32, k: u32 },
    #[error("no irreducible polynomial of degree {k} over GF({p})")]
    NoIrreducible { p: u32, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("GF({p}^{k}) is not a quadratic extension")]
    NotQuadratic { p: u32, k: u32 },
    #[error("invalid coefficient vector {0:?}")]
    BadCoefficients(Vec<u32>),
}

/// A field element in packed polynomial-basis form. Meaningful only together
/// with the [`Field`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug)]
struct LogTables {
    /// `exp[i] = g^i` for `i < 2(order - 1)`, doubled to skip a reduction.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

/// GF(p^k) together with its defining polynomial and lookup tables.
#[derive(Debug)]
pub struct Field {
    p: u32,
    k: u32,
    order: u32,
    /// Monic modulus, `k + 1` coefficients, constant term first.
    modulus: Vec<u32>,
    tables: Option<LogTables>,
    add_table: Option<Vec<u32>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && p <= u32::MAX as u64).then_some((p as u32, k))
}

fn checked_order(p: u32, k: u32) -> Option<u32> {
    let mut order: u64 = 1;
    for _ in 0..k {
        order = order.checked_mul(p as u64)?;
        if order > u32::MAX as u64 {
            return None;
        }
    }
    Some(order as u32)
}

// --- polynomial helpers over GF(p), coefficient vectors constant term first ---

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = lead * c as u64 % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn monic_from_index(index: u64, degree: u32, p: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(degree as usize + 1);
    let mut rest = index;
    for _ in 0..degree {
        coeffs.push((rest % p as u64) as u32);
        rest /= p as u64;
    }
    coeffs.push(1);
    coeffs
}

/// Irreducibility by trial division with every monic polynomial of degree
/// `1..=deg/2`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg <= 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for idx in 0..count {
            let divisor = monic_from_index(idx, d, p);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// Builds GF(p^k) with the smallest monic irreducible modulus, where
    /// candidates are ordered by their packed lower coefficients (so the
    /// highest-degree coefficient is most significant).
    pub fn new(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::build(p, k, true)
    }

    /// Same field without log tables. Every multiplication goes through
    /// polynomial reduction; used to cross-check the table path.
    pub fn without_tables(p: u32, k: u32) -> Result<Self, FieldError> {
        Self::build(p, k, false)
    }

    fn build(p: u32, k: u32, tables: bool) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = checked_order(p, k).ok_or(FieldError::TooLarge { p, k })?;
        let candidates = order as u64;
        let modulus = (0..candidates)
            .map(|idx| monic_from_index(idx, k, p))
            .find(|m| is_irreducible(m, p))
            .ok_or(FieldError::NoIrreducible { p, k })?;
        let mut field = Field { p, k, order, modulus, tables: None, add_table: None };
        if tables && order <= TABLE_LIMIT {
            field.tables = Some(field.build_log_tables());
        }
        if p != 2 && order <= ADD_TABLE_LIMIT {
            let n = order as usize;
            let mut table = vec![0u32; n * n];
            for a in 0..order {
                for b in 0..order {
                    table[a as usize * n + b as usize] = field.add_digits(a, b);
                }
            }
            field.add_table = Some(table);
        }
        Ok(field)
    }

    fn build_log_tables(&self) -> LogTables {
        let n = self.order as usize;
        let group = self.order as u64 - 1;
        let factors = prime_factors(group);
        let generator = (1..self.order)
            .map(Elem)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, group / r) != Elem::ONE))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * (n - 1).max(1)];
        let mut log = vec![0u32; n];
        let mut x = Elem::ONE;
        for i in 0..n - 1 {
            exp[i] = x.0;
            log[x.index()] = i as u32;
            x = self.mul_slow(x, generator);
        }
        for i in n - 1..exp.len() {
            exp[i] = exp[i - (n - 1)];
        }
        LogTables { exp, log }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Same characteristic, degree and modulus.
    pub fn same_params(&self, other: &Field) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut rest = x.0;
        for _ in 0..self.k {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients(coeffs.to_vec()));
        }
        Ok(Elem(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)))
    }

    /// Image of an integer under `Z -> GF(p)`.
    pub fn from_int(&self, n: u64) -> Elem {
        Elem((n % self.p as u64) as u32)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            let d = (a % p + b % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if let Some(table) = &self.add_table {
            return Elem(table[a.index() * self.order as usize + b.index()]);
        }
        Elem(self.add_digits(a.0, b.0))
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut rest = a.0;
        let mut out = 0;
        let mut place = 1;
        while rest > 0 {
            let d = rest % p;
            out += ((p - d) % p) * place;
            place = place.wrapping_mul(p);
            rest /= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => Elem(t.exp[(t.log[a.index()] + t.log[b.index()]) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let p = self.p as u64;
        let mut prod = vec![0u32; ca.len() + cb.len()];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
            }
        }
        let mut rem = poly_rem(&prod, &self.modulus, self.p);
        rem.resize(self.k as usize, 0);
        self.from_coeffs(&rem).expect("reduced product has k coefficients")
    }

    fn pow_slow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a.is_zero() {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        match &self.tables {
            Some(t) => {
                let group = self.order as u64 - 1;
                let l = (t.log[a.index()] as u64 * (e % group)) % group;
                Elem(t.exp[l as usize])
            }
            None => self.pow_slow(a, e),
        }
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        match &self.tables {
            Some(t) => {
                let group = self.order - 1;
                let l = t.log[a.index()];
                Some(Elem(t.exp[((group - l) % group) as usize]))
            }
            None => Some(self.pow_slow(a, self.order as u64 - 2)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        let inv = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    /// `q` for a field of order `q^2`.
    pub fn base_order(&self) -> Result<u32, FieldError> {
        if !self.k.is_multiple_of(2) {
            return Err(FieldError::NotQuadratic { p: self.p, k: self.k });
        }
        Ok(self.p.pow(self.k / 2))
    }

    /// The norm `x^(q+1)` from GF(q^2) onto its subfield GF(q).
    pub fn norm(&self, x: Elem) -> Result<Elem, FieldError> {
        let q = self.base_order()?;
        let n = self.pow(x, q as u64 + 1);
        debug_assert_eq!(self.pow(n, q as u64), n, "norm left the subfield");
        Ok(n)
    }

    /// Conjugation `x -> x^q` in GF(q^2).
    pub fn conjugate(&self, x: Elem) -> Result<Elem, FieldError> {
        let q = self.base_order()?;
        Ok(self.pow(x, q as u64))
    }

    /// Elements of the GF(q) subfield, i.e. the fixed points of `x -> x^q`.
    pub fn base_field_elements(&self) -> Result<Vec<Elem>, FieldError> {
        let q = self.base_order()? as u64;
        Ok(self.elements().filter(|&x| self.pow(x, q) == x).collect())
    }

    pub fn element(&self, value: Elem) -> FieldElement<'_> {
        FieldElement { field: self, value }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod [", self.p, self.k)?;
        for (i, c) in self.modulus.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An element bound to its field, for code that wants checked arithmetic
/// and operator syntax rather than the raw [`Elem`] fast path.
#[derive(Clone, Copy, Debug)]
pub struct FieldElement<'f> {
    field: &'f Field,
    value: Elem,
}

impl<'f> FieldElement<'f> {
    pub fn field(&self) -> &'f Field {
        self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn arith(&self, op: FieldOp, rhs: &FieldElement<'_>) -> Result<FieldElement<'f>, FieldError> {
        if !self.field.same_params(rhs.field) {
            return Err(FieldError::FieldMismatch);
        }
        let f = self.field;
        let value = match op {
            FieldOp::Add => f.add(self.value, rhs.value),
            FieldOp::Sub => f.sub(self.value, rhs.value),
            FieldOp::Mul => f.mul(self.value, rhs.value),
            FieldOp::Div => f.div(self.value, rhs.value)?,
        };
        Ok(FieldElement { field: f, value })
    }

    pub fn pow(&self, e: u64) -> FieldElement<'f> {
        self.field.element(self.field.pow(self.value, e))
    }

    pub fn norm(&self) -> Result<FieldElement<'f>, FieldError> {
        Ok(self.field.element(self.field.norm(self.value)?))
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_params(other.field) && self.value == other.value
    }
}

impl Eq for FieldElement<'_> {}

impl fmt::Display for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.coeffs();
        let terms: Vec<String> = coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

macro_rules! impl_op {
    ($tr:ident, $method:ident, $op:expr) => {
        impl<'f> $tr for FieldElement<'f> {
            type Output = FieldElement<'f>;

            fn $method(self, rhs: Self) -> Self::Output {
                match self.arith($op, &rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

impl_op!(Add, add, FieldOp::Add);
impl_op!(Sub, sub, FieldOp::Sub);
impl_op!(Mul, mul, FieldOp::Mul);
impl_op!(Div, div, FieldOp::Div);

impl<'f> Neg for FieldElement<'f> {
    type Output = FieldElement<'f>;

    fn neg(self) -> Self::Output {
        self.field.element(self.field.neg(self.value))
    }
}
