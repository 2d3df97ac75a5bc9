//! Small finite fields GF(p^k) backed by exp/log tables.
//!
//! Elements are addressed by an integer index in `[0, p^k)`: the index is the
//! base-`p` encoding of the coefficient vector of the representing polynomial,
//! lowest degree first. In particular the prime subfield `{0, 1, ..., p-1}`
//! keeps its usual integer labels.

use std::fmt;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Orders up to this size get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrime(u64),
    #[error("field order {p}^{k} exceeds the cap of 2^16")]
    TooLarge { p: u64, k: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("conjugation x -> x^sqrt(q) needs an even extension degree, got k = {0}")]
    OddDegreeField(u32),
}

/// A field element, identified by its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub u16);

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

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// GF(p^k). Immutable after construction.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    order: u32,
    /// Monic modulus, coefficients lowest degree first (length k + 1).
    modulus: Vec<u32>,
    primitive: Elem,
    /// exp[i] = g^i for i in [0, 2(q-1)), doubled to skip a reduction.
    exp: Vec<u16>,
    /// log[a] for nonzero a.
    log: Vec<u32>,
    neg: Vec<u16>,
    add_table: Option<Vec<u16>>,
    /// x -> x^{p^{k/2}}, present when k is even.
    conj_table: Option<Vec<u16>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^k`; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

// Dense polynomials over GF(p), lowest degree first, no trailing zeros.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = (lead as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_rem(&out, m, p)
}

fn decode(index: u32, p: u32, k: u32) -> Vec<u32> {
    let mut digits = Vec::with_capacity(k as usize);
    let mut rest = index;
    for _ in 0..k {
        digits.push(rest % p);
        rest /= p;
    }
    poly_trim(&mut digits);
    digits
}

fn encode(poly: &[u32], p: u32) -> u32 {
    poly.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `deg` whose lower coefficients encode `low`.
fn monic_from_index(low: u32, p: u32, deg: u32) -> Vec<u32> {
    let mut poly = vec![0u32; deg as usize + 1];
    let mut rest = low;
    for c in poly.iter_mut().take(deg as usize) {
        *c = rest % p;
        rest /= p;
    }
    poly[deg as usize] = 1;
    poly
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = (poly.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d) {
            let divisor = monic_from_index(low, p, d);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
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
    /// Builds GF(p^k) with the lexicographically least monic irreducible
    /// modulus of degree `k`.
    pub fn new(p: u64, k: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = p.checked_pow(k).filter(|&o| o <= MAX_ORDER);
        let Some(order) = order else {
            return Err(FieldError::TooLarge { p, k });
        };
        let p32 = p as u32;
        let order32 = order as u32;

        let modulus = (0..p32.pow(k))
            .map(|low| monic_from_index(low, p32, k))
            .find(|m| is_irreducible(m, p32))
            .expect("an irreducible polynomial of every degree exists");

        let mul_slow =
            |a: u32, b: u32| encode(&poly_mul_mod(&decode(a, p32, k), &decode(b, p32, k), &modulus, p32), p32);
        let pow_slow = |a: u32, mut e: u64| {
            let mut base = a;
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_slow(acc, base);
                }
                base = mul_slow(base, base);
                e >>= 1;
            }
            acc
        };

        let group = order - 1;
        let factors = distinct_prime_factors(group);
        let primitive = (1..order32)
            .find(|&g| factors.iter().all(|&r| pow_slow(g, group / r) != 1))
            .expect("the multiplicative group is cyclic");

        let group = group as usize;
        let mut exp = vec![0u16; 2 * group.max(1)];
        let mut log = vec![0u32; order as usize];
        let mut x = 1u32;
        for i in 0..group {
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x = mul_slow(x, primitive);
        }
        for i in group..2 * group {
            exp[i] = exp[i - group];
        }

        let add_digits = |a: u32, b: u32| {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut place = 1u32;
            for _ in 0..k {
                out += ((a % p32 + b % p32) % p32) * place;
                a /= p32;
                b /= p32;
                place *= p32;
            }
            out
        };
        let neg = (0..order32)
            .map(|a| {
                let digits = decode(a, p32, k);
                let negated: Vec<u32> = digits.iter().map(|&c| (p32 - c) % p32).collect();
                encode(&negated, p32) as u16
            })
            .collect();
        let add_table = (order32 <= ADD_TABLE_LIMIT).then(|| {
            let mut t = vec![0u16; (order * order) as usize];
            for a in 0..order32 {
                for b in 0..order32 {
                    t[(a * order32 + b) as usize] = add_digits(a, b) as u16;
                }
            }
            t
        });

        let mut field = Field {
            p: p32,
            k,
            order: order32,
            modulus,
            primitive: Elem(primitive as u16),
            exp,
            log,
            neg,
            add_table,
            conj_table: None,
        };
        if k.is_multiple_of(2) {
            let root = p.pow(k / 2);
            let table = (0..order32).map(|a| field.pow(Elem(a as u16), root as i64).0).collect();
            field.conj_table = Some(table);
        }
        Ok(field)
    }

    /// GF(q) for a prime power `q`.
    pub fn with_order(q: u64) -> Result<Field, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Field::new(p, k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(|i| Elem(i as u16))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u16)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 as u32 + b.0 as u32;
            return Elem(if s >= self.p { s - self.p } else { s } as u16);
        }
        match &self.add_table {
            Some(t) => Elem(t[a.index() * self.order as usize + b.index()]),
            None => {
                let (mut x, mut y) = (a.0 as u32, b.0 as u32);
                let mut out = 0u32;
                let mut place = 1u32;
                for _ in 0..self.k {
                    out += ((x % self.p + y % self.p) % self.p) * place;
                    x /= self.p;
                    y /= self.p;
                    place *= self.p;
                }
                Elem(out as u16)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let group = self.order - 1;
        Ok(Elem(self.exp[((group - self.log[a.index()]) % group) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents need `a != 0`, and `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: i64) -> Elem {
        if a.is_zero() {
            assert!(e >= 0, "zero has no negative powers");
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let group = (self.order - 1) as i64;
        let l = (self.log[a.index()] as i64 * e.rem_euclid(group)).rem_euclid(group);
        Elem(self.exp[l as usize])
    }

    /// The involution `x -> x^{p^{k/2}}` used by hermitian forms.
    pub fn conj(&self, a: Elem) -> Result<Elem, FieldError> {
        match &self.conj_table {
            Some(t) => Ok(Elem(t[a.index()])),
            None => Err(FieldError::OddDegreeField(self.k)),
        }
    }

    #[inline]
    pub(crate) fn conj_unchecked(&self, a: Elem) -> Elem {
        Elem(self.conj_table.as_ref().expect("even degree field")[a.index()])
    }

    /// Order of the fixed field of `conj`, i.e. `sqrt(q)` for even `k`.
    pub fn sqrt_order(&self) -> Option<u32> {
        self.k.is_multiple_of(2).then(|| self.p.pow(self.k / 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Elem) -> Result<u32, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let group = self.order - 1;
        Ok(group / num_integer::gcd(group, self.log[a.index()]))
    }
}
