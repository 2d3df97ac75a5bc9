//! Closed-form counts of points, flags and opposite elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::{GeometryInstance, GeometryKind};
use crate::qpow::{to_integer, CountError, QOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    V,
    C,
    Alpha,
    Beta,
    Gamma,
    D,
}

/// Count formulas for one geometry. Polar formulas take the parameter `e`
/// from the geometry (zero for type D); projective formulas ignore it.
#[derive(Debug, Clone, Copy)]
pub struct Counts {
    pub projective: bool,
    pub oriflamme: bool,
    pub n: i64,
    pub e2: i64,
    pub q: QOrder,
}

impl Counts {
    pub fn of(g: &GeometryInstance) -> Counts {
        Counts {
            projective: g.kind == GeometryKind::ProjectiveA,
            oriflamme: g.kind == GeometryKind::OriflammeD,
            n: g.n as i64,
            e2: g.e2 as i64,
            q: g.qorder,
        }
    }

    pub fn polar(n: i64, e2: i64, q: u64) -> Counts {
        Counts { projective: false, oriflamme: false, n, e2, q: QOrder::new(q) }
    }

    pub fn projective(n: i64, q: u64) -> Counts {
        Counts { projective: true, oriflamme: false, n, e2: 0, q: QOrder::new(q) }
    }

    fn qm1(&self) -> BigRational {
        self.q.q_rat() - BigRational::one()
    }

    /// `q^(a + b e)`.
    pub fn qe(&self, a: i64, b: i64) -> Result<BigRational, CountError> {
        self.q.pow_e(a, b, self.e2)
    }

    /// Points of a rank-`k` space: `(q^(k+1)-1)/(q-1)` projectively,
    /// `(q^k-1)/(q-1) (q^(k-1+e)+1)` in a polar space.
    pub fn v_rat(&self, k: i64) -> Result<BigRational, CountError> {
        if self.projective {
            Ok((self.q.pow(k + 1) - BigRational::one()) / self.qm1())
        } else {
            Ok((self.q.pow(k) - BigRational::one()) / self.qm1() * (self.qe(k - 1, 1)? + BigRational::one()))
        }
    }

    pub fn v(&self, k: i64) -> Result<BigInt, CountError> {
        to_integer(&self.v_rat(k)?, &format!("v({k})"))
    }

    /// Maximal flags of a rank-`k` space: `prod_{i<=k} v(i)`, with `c(0) = 1`.
    pub fn c(&self, k: i64) -> Result<BigInt, CountError> {
        if k < 0 {
            return Err(CountError::OutOfRange(format!("c({k}) needs k >= 0")));
        }
        let mut acc = BigRational::one();
        for i in 1..=k {
            acc *= self.v_rat(i)?;
        }
        to_integer(&acc, &format!("c({k})"))
    }

    pub fn c_rat(&self, k: i64) -> Result<BigRational, CountError> {
        Ok(BigRational::from_integer(self.c(k)?))
    }

    /// Points opposite a given point: `q^(2n+e-2)`.
    pub fn alpha(&self) -> Result<BigInt, CountError> {
        to_integer(&self.qe(2 * self.n - 2, 1)?, "alpha")
    }

    /// Points opposite to both of two opposite points.
    pub fn beta(&self) -> Result<BigInt, CountError> {
        let n = self.n;
        let value = self.qm1() * self.qe(2 * n - 3, 1)? + self.q.pow(n - 2) * (self.qe(0, 1)? - self.q.q_rat());
        to_integer(&value, "beta")
    }

    /// Points opposite to two collinear points.
    pub fn gamma(&self) -> Result<BigInt, CountError> {
        to_integer(&(self.qm1() * self.qe(2 * self.n - 3, 1)?), "gamma")
    }

    /// Rank-`i` subspaces opposite a given rank-`i` subspace:
    /// `q^(2i(n-i) + ie + i(i-1)/2)`.
    pub fn d(&self, i: i64) -> Result<BigInt, CountError> {
        if i < 1 || i > self.n {
            return Err(CountError::OutOfRange(format!("d needs 1 <= i <= n, got i = {i}")));
        }
        let x2 = 2 * (2 * i * (self.n - i)) + i * self.e2 + i * (i - 1);
        to_integer(&self.q.pow_half(x2)?, &format!("d({i})"))
    }

    /// Maximal flags of the underlying A or B geometry.
    pub fn flag_count_b(&self) -> Result<u64, CountError> {
        self.c(self.n)?.to_u64().ok_or(CountError::Overflow { what: "flag count".into() })
    }

    /// Vertices of the opposition graph (halved for the oriflamme geometry).
    pub fn flag_count(&self) -> Result<u64, CountError> {
        let c = self.flag_count_b()?;
        Ok(if self.oriflamme { c / 2 } else { c })
    }

    pub fn point_count(&self) -> Result<u64, CountError> {
        self.v(self.n)?.to_u64().ok_or(CountError::Overflow { what: "point count".into() })
    }

    /// Opposition valency `q^(l(w0))`.
    pub fn valency(&self) -> Result<BigInt, CountError> {
        let n = self.n;
        let value = if self.projective {
            self.q.pow(n * (n + 1) / 2)
        } else if self.oriflamme {
            self.q.pow(n * (n - 1))
        } else {
            self.qe(n * (n - 1), n)?
        };
        to_integer(&value, "valency")
    }
}

/// Evaluates one of the named counts at rank `n`, parameter `2e = e2`
/// (ignored for projective spaces) and index `i` (for `d`), over the
/// field order of `g`.
pub fn closed_form_count(
    g: &GeometryInstance,
    which: CountKind,
    n: i64,
    e2: i64,
    i: Option<i64>,
) -> Result<BigInt, CountError> {
    let mut counts = Counts::of(g);
    counts.n = n;
    counts.e2 = if counts.projective { 0 } else { e2 };
    if counts.projective && !matches!(which, CountKind::V | CountKind::C) {
        return Err(CountError::OutOfRange(format!("{which:?} is defined for polar spaces only")));
    }
    match which {
        CountKind::V => counts.v(n),
        CountKind::C => counts.c(n),
        CountKind::Alpha => counts.alpha(),
        CountKind::Beta => counts.beta(),
        CountKind::Gamma => counts.gamma(),
        CountKind::D => counts.d(i.ok_or_else(|| CountError::OutOfRange("d needs an index i".into()))?),
    }
}

pub fn rat_of(value: &BigInt) -> BigRational {
    BigRational::from_integer(value.clone())
}
