//! Arithmetic in small finite fields GF(p^m).
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of its
//! coefficients in the polynomial basis `1, t, ..., t^{m-1}` modulo the field's
//! modulus. Fields of order up to 2^16 get log/antilog tables; larger fields fall
//! back to polynomial arithmetic on coefficient digits.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Raw field element (coefficient digits packed base p).
pub type Elem = u32;

/// Shared handle to an immutable field context.
pub type FieldRef = Arc<Field>;

/// Largest order that gets log/antilog tables.
pub const TABLE_LIMIT: u64 = 1 << 16;

/// Largest odd-characteristic order that gets a full addition table.
const ADD_TABLE_LIMIT: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId(u64);

/// An element tagged with the field it belongs to, for checked arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub field: FieldId,
    pub value: Elem,
}

struct Tables {
    exp: Vec<u16>,
    log: Vec<u32>,
    add: Option<Vec<u16>>,
}

pub struct Field {
    p: u32,
    m: u32,
    order: u32,
    modulus: Vec<u32>,
    id: FieldId,
    tables: Option<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Field {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

/// Polynomials over GF(p) with coefficients low to high, used for modulus checks.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        let df = degree(f).expect("nonzero divisor");
        let lead_inv = inv_mod(f[df], p);
        while let Some(dr) = degree(&r) {
            if dr < df {
                break;
            }
            let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = dr - df;
            for (i, &fc) in f.iter().enumerate().take(df + 1) {
                let sub = (c as u64 * fc as u64 % p as u64) as u32;
                r[i + shift] = (r[i + shift] + p - sub) % p;
            }
        }
        if r.is_empty() {
            r.push(0);
        }
        trim(&mut r);
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u32; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        rem(&out, f, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while degree(&b).is_some() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// x^(p^i) mod f for i = 1..=count, by repeated p-th powering.
    pub fn frobenius_powers(f: &[u32], p: u32, count: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(count);
        let mut cur = rem(&[0, 1], f, p);
        for _ in 0..count {
            let mut acc = vec![1u32];
            for _ in 0..p {
                acc = mulmod(&acc, &cur, f, p);
            }
            cur = acc;
            out.push(cur.clone());
        }
        out
    }
}

/// Irreducibility over GF(p): no factor of degree <= m/2, i.e. gcd(x^(p^i) - x, f) = 1.
fn modulus_is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    for xp in poly::frobenius_powers(f, p, m / 2) {
        let mut g = xp;
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly::trim(&mut g);
        let d = poly::gcd(f, &g, p);
        if poly::degree(&d).unwrap_or(0) > 0 {
            return false;
        }
    }
    true
}

/// Default moduli used for bit-exact serialization (coefficients low to high).
pub fn default_modulus(p: u32, m: u32) -> Option<Vec<u32>> {
    let known: Option<Vec<u32>> = match (p, m) {
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (2, 4) => Some(vec![1, 1, 0, 0, 1]),
        (2, 12) => Some(vec![1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1]),
        (3, 3) => Some(vec![1, 2, 0, 1]),
        (_, 1) => Some(vec![0, 1]),
        _ => None,
    };
    if known.is_some() || !is_prime(p) || m == 0 {
        return known;
    }
    // first irreducible monic polynomial in integer order of the lower coefficients
    let count = (p as u64).checked_pow(m)?;
    (1..count).find_map(|low| {
        let mut f = Vec::with_capacity(m as usize + 1);
        let mut rest = low;
        for _ in 0..m {
            f.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        f.push(1);
        modulus_is_irreducible(&f, p).then_some(f)
    })
}

impl Field {
    /// GF(p^m) with the given monic modulus (coefficients low to high, length m+1).
    pub fn new(p: u32, m: u32, modulus: &[u32]) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 || modulus.len() != m as usize + 1 {
            return Err(Error::ModulusNotIrreducible(format!(
                "modulus must have degree {m}"
            )));
        }
        if modulus[m as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::ModulusNotIrreducible(
                "modulus must be monic with GF(p) digits".into(),
            ));
        }
        let order = (p as u64).pow(m);
        if order > u32::MAX as u64 / 2 {
            return Err(Error::FieldTooLarge(order));
        }
        if !modulus_is_irreducible(modulus, p) {
            return Err(Error::ModulusNotIrreducible(format!(
                "{} is reducible over GF({p})",
                format_poly(modulus)
            )));
        }
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (p, m, modulus).hash(&mut h);
        let mut field = Field {
            p,
            m,
            order: order as u32,
            modulus: modulus.to_vec(),
            id: FieldId(h.finish()),
            tables: None,
        };
        if order <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(Arc::new(field))
    }

    /// GF(p^m) with the fixed default modulus for that size.
    pub fn with_default_modulus(p: u32, m: u32) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let f = default_modulus(p, m).ok_or_else(|| {
            Error::ModulusNotIrreducible(format!("no default modulus for GF({p}^{m})"))
        })?;
        Field::new(p, m, &f)
    }

    /// The field of the given order (a prime power) with its default modulus.
    pub fn of_order(order: u64) -> Result<FieldRef> {
        let (p, m) = prime_power(order)
            .ok_or_else(|| Error::BadCurveParams(format!("{order} is not a prime power")))?;
        Field::with_default_modulus(p, m)
    }

    fn build_tables(&self) -> Tables {
        let q = self.order;
        let add = if self.p != 2 && q <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = self.add_digits(a, b) as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        let n = q - 1;
        let factors = prime_factors(n as u64);
        let generator = (0..q)
            .map(|k| self.from_rank(k))
            .filter(|&g| g != 0)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_generic(g, n as u64 / r) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u16; 2 * n as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur: Elem = 1;
        for i in 0..n {
            exp[i as usize] = cur as u16;
            exp[(i + n) as usize] = cur as u16;
            log[cur as usize] = i;
            cur = self.mul_generic(cur, generator);
        }
        Tables { exp, log, add }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    fn digits(&self, a: Elem) -> impl Iterator<Item = u32> + '_ {
        let p = self.p;
        let mut rest = a;
        (0..self.m).map(move |_| {
            let d = rest % p;
            rest /= p;
            d
        })
    }

    fn pack_digits(&self, digits: &[u32]) -> Elem {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    /// Coefficients of `a` in the basis 1, t, ..., t^{m-1}.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        self.digits(a).collect()
    }

    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        let digits: Vec<u32> = self
            .digits(a)
            .zip(self.digits(b))
            .map(|(x, y)| (x + y) % p)
            .collect();
        self.pack_digits(&digits)
    }

    fn mul_generic(&self, a: Elem, b: Elem) -> Elem {
        let da: Vec<u32> = self.digits(a).collect();
        let db: Vec<u32> = self.digits(b).collect();
        let mut r = poly::mulmod(&da, &db, &self.modulus, self.p);
        r.resize(self.m as usize, 0);
        self.pack_digits(&r)
    }

    fn pow_generic(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc: Elem = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_generic(acc, base);
            }
            base = self.mul_generic(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        0
    }

    #[inline]
    pub fn one(&self) -> Elem {
        1
    }

    /// The element t (the class of the indeterminate); equals a prime-field
    /// element when m = 1.
    pub fn generator_t(&self) -> Elem {
        if self.m == 1 {
            self.reduce_int(self.p as u64 - self.modulus[0] as u64)
        } else {
            self.p
        }
    }

    /// Image of the integer `n` in the prime field.
    pub fn reduce_int(&self, n: u64) -> Elem {
        (n % self.p as u64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        match &self.tables {
            Some(Tables { add: Some(t), .. }) => t[(a * self.order + b) as usize] as Elem,
            _ => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let digits: Vec<u32> = self.digits(a).map(|d| (p - d) % p).collect();
        self.pack_digits(&digits)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else {
            self.add(a, self.neg(b))
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as Elem,
            None => self.mul_generic(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let n = self.order - 1;
                t.exp[((n - t.log[a as usize]) % n) as usize] as Elem
            }
            None => self.pow_generic(a, self.order as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => {
                let n = (self.order - 1) as u64;
                let l = t.log[a as usize] as u64 * (e % n) % n;
                t.exp[l as usize] as Elem
            }
            None => self.pow_generic(a, e),
        }
    }

    /// `dst[i] += c * src[i]` over packed u16 rows; requires a tabled field.
    pub fn axpy(&self, dst: &mut [u16], src: &[u16], c: Elem) {
        if c == 0 {
            return;
        }
        let t = self
            .tables
            .as_ref()
            .expect("row operations need a tabled field");
        let lc = t.log[c as usize] as usize;
        if self.p == 2 {
            for (d, &x) in dst.iter_mut().zip(src) {
                if x != 0 {
                    *d ^= t.exp[lc + t.log[x as usize] as usize];
                }
            }
            return;
        }
        match &t.add {
            Some(add) => {
                let q = self.order as usize;
                for (d, &x) in dst.iter_mut().zip(src) {
                    if x != 0 {
                        let y = t.exp[lc + t.log[x as usize] as usize] as usize;
                        *d = add[*d as usize * q + y];
                    }
                }
            }
            None => {
                for (d, &x) in dst.iter_mut().zip(src) {
                    if x != 0 {
                        let y = t.exp[lc + t.log[x as usize] as usize] as Elem;
                        *d = self.add_digits(*d as Elem, y) as u16;
                    }
                }
            }
        }
    }

    /// `row[i] *= c` in place; requires a tabled field.
    pub fn scale_row(&self, row: &mut [u16], c: Elem) {
        for x in row.iter_mut() {
            *x = self.mul(c, *x as Elem) as u16;
        }
    }

    /// Table of `c * x` indexed by `x`; requires a tabled field.
    pub fn scale_table(&self, c: Elem) -> Vec<u16> {
        (0..self.order).map(|x| self.mul(c, x) as u16).collect()
    }

    /// Position of `a` in the lexicographic enumeration of coefficient tuples
    /// (c_0, c_1, ..., c_{m-1}).
    pub fn rank_of(&self, a: Elem) -> u32 {
        self.digits(a).fold(0, |acc, d| acc * self.p + d)
    }

    /// Inverse of [`Field::rank_of`].
    pub fn from_rank(&self, rank: u32) -> Elem {
        let mut digits = vec![0u32; self.m as usize];
        let mut rest = rank;
        for slot in digits.iter_mut().rev() {
            *slot = rest % self.p;
            rest /= self.p;
        }
        self.pack_digits(&digits)
    }

    /// All elements in the fixed deterministic enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |k| self.from_rank(k))
    }

    /// Whether `e` lies in the subfield GF(p^d), i.e. e^(p^d) = e.
    pub fn subfield_contains(&self, e: Elem, d: u32) -> Result<bool> {
        if d == 0 || !self.m.is_multiple_of(d) {
            return Err(Error::NotASubfield { d, m: self.m });
        }
        Ok(self.pow(e, (self.p as u64).pow(d)) == e)
    }

    pub fn element(&self, value: Elem) -> FieldElement {
        assert!(
            value < self.order,
            "element {value} outside GF({})",
            self.order
        );
        FieldElement {
            field: self.id,
            value,
        }
    }

    fn check(&self, a: FieldElement) -> Result<Elem> {
        if a.field != self.id {
            return Err(Error::FieldMismatch);
        }
        Ok(a.value)
    }

    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.element(self.add(self.check(a)?, self.check(b)?)))
    }

    pub fn checked_sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.element(self.sub(self.check(a)?, self.check(b)?)))
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.element(self.mul(self.check(a)?, self.check(b)?)))
    }

    pub fn checked_inv(&self, a: FieldElement) -> Result<FieldElement> {
        Ok(self.element(self.inv(self.check(a)?)?))
    }

    pub fn checked_pow(&self, a: FieldElement, e: u64) -> Result<FieldElement> {
        Ok(self.element(self.pow(self.check(a)?, e)))
    }

    /// Human-readable polynomial form of an element, e.g. `t^2+t+1`.
    pub fn format(&self, a: Elem) -> String {
        format_poly(&self.coefficients(a))
    }
}

/// Splits a prime power into (p, m).
pub fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let p = prime_factors(n);
    if p.len() != 1 {
        return None;
    }
    let p = p[0];
    let mut m = 0;
    let mut rest = n;
    while rest > 1 {
        rest /= p;
        m += 1;
    }
    Some((p as u32, m))
}

fn format_poly(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let coef = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            match i {
                0 => c.to_string(),
                1 => format!("{coef}t"),
                _ => format!("{coef}t^{i}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8() -> FieldRef {
        Field::new(2, 3, &[1, 1, 0, 1]).unwrap()
    }

    #[test]
    fn gf8_has_eight_elements() {
        let f = gf8();
        assert_eq!(f.order(), 8);
        let mut all: Vec<Elem> = f.elements().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn gf4096_default_modulus_is_irreducible() {
        let f = Field::new(2, 12, &default_modulus(2, 12).unwrap()).unwrap();
        assert_eq!(f.order(), 4096);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^3 + 1 = (t + 1)(t^2 + t + 1)
        let err = Field::new(2, 3, &[1, 0, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::ModulusNotIrreducible(_)));
        // t^4 + t^2 + 1 = (t^2 + t + 1)^2 has no root but is reducible
        let err = Field::new(2, 4, &[1, 0, 1, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::ModulusNotIrreducible(_)));
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert_eq!(Field::new(4, 1, &[0, 1]).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn gf8_reduction_by_hand() {
        // t * t^2 = t^3 = t + 1 modulo t^3 + t + 1
        let f = gf8();
        let t = f.generator_t();
        let t2 = f.mul(t, t);
        assert_eq!(f.mul(t, t2), f.add(t, 1));
        assert_eq!(f.format(f.mul(t, t2)), "t+1");
    }

    #[test]
    fn gf27_reduction_by_hand() {
        // t^3 = t - 1 modulo t^3 - t + 1 over GF(3)
        let f = Field::new(3, 3, &[1, 2, 0, 1]).unwrap();
        let t = f.generator_t();
        let t3 = f.mul(t, f.mul(t, t));
        assert_eq!(t3, f.sub(t, 1));
        assert_eq!(f.coefficients(t3), vec![2, 1, 0]);
    }

    #[test]
    fn additive_identity() {
        let f = Field::of_order(27).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, 0), a);
        }
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = gf8();
        assert_eq!(f.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn cross_field_operands_rejected() {
        let f8 = gf8();
        let f16 = Field::of_order(16).unwrap();
        let a = f8.element(3);
        let b = f16.element(3);
        assert_eq!(f8.checked_add(a, b), Err(Error::FieldMismatch));
        assert_eq!(f8.checked_mul(a, a).unwrap().value, f8.mul(3, 3));
    }

    #[test]
    fn subfield_of_gf4096() {
        let f = Field::of_order(4096).unwrap();
        assert!(f.subfield_contains(0, 3).unwrap());
        let count = f
            .elements()
            .filter(|&e| f.subfield_contains(e, 3).unwrap())
            .count();
        assert_eq!(count, 8);
        assert_eq!(
            f.subfield_contains(1, 5),
            Err(Error::NotASubfield { d: 5, m: 12 })
        );
    }

    #[test]
    fn generator_of_gf16_not_in_gf4() {
        let f = Field::of_order(16).unwrap();
        // t has order 15 modulo t^4 + t + 1
        let t = f.generator_t();
        assert_ne!(f.pow(t, 4), t);
        assert!(!f.subfield_contains(t, 2).unwrap());
    }

    #[test]
    fn subfield_counts_match_divisors() {
        for order in [8u64, 16, 27, 4096] {
            let f = Field::of_order(order).unwrap();
            for d in (1..=f.m()).filter(|d| f.m().is_multiple_of(*d)) {
                let count = f
                    .elements()
                    .filter(|&e| f.subfield_contains(e, d).unwrap())
                    .count();
                assert_eq!(count as u32, f.p().pow(d), "GF({order}) d={d}");
            }
        }
    }

    #[test]
    fn frobenius_is_additive_exhaustively() {
        for order in [8u64, 16, 27, 81, 4096] {
            let f = Field::of_order(order).unwrap();
            let p = f.p() as u64;
            let frob: Vec<Elem> = (0..f.order()).map(|a| f.pow(a, p)).collect();
            for a in 0..f.order() {
                for b in 0..f.order() {
                    assert_eq!(
                        frob[f.add(a, b) as usize],
                        f.add(frob[a as usize], frob[b as usize])
                    );
                }
            }
        }
    }

    #[test]
    fn fermat_and_inverses() {
        for order in [8u64, 16, 27, 4096] {
            let f = Field::of_order(order).unwrap();
            for a in 1..f.order() {
                assert_eq!(f.pow(a, order - 1), 1);
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn generic_arithmetic_agrees_with_tables() {
        let f = Field::of_order(81).unwrap();
        for a in 0..81 {
            for b in 0..81 {
                assert_eq!(f.mul(a, b), f.mul_generic(a, b));
            }
        }
        // 3^11 has no tables
        let big = Field::with_default_modulus(3, 11).unwrap();
        assert!(!big.has_tables());
        let x = 12345;
        assert_eq!(big.mul(x, big.inv(x).unwrap()), 1);
        assert_eq!(big.pow(x, big.order() as u64 - 1), 1);
    }

    #[test]
    fn enumeration_is_lexicographic_on_coefficients() {
        let f = gf8();
        let tuples: Vec<Vec<u32>> = f.elements().map(|e| f.coefficients(e)).collect();
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(tuples, sorted);
        assert_eq!(tuples[1], vec![0, 0, 1]);
    }
}
