//! Types of maximal flags with respect to a base point.
//!
//! In a projective space the type of `(U_1, ..., U_n)` relative to `X` is
//! the least `k` with `X` in `U_k`, or `n + 1`. In a polar space the chain
//! is extended by perps, `U_n <= U_{n-1}^perp <= ... <= U_1^perp`, giving
//! types `1..=2n`.

use num_bigint::BigInt;
use serde::Serialize;

use super::{polar_params, Result, SpectraError};
use crate::geometry::counts::Counts;
use crate::geometry::enumerate::Registry;
use crate::geometry::{Enumeration, GeometryInstance, GeometryKind};

/// For one base point: which registered subspaces of each rank contain it,
/// and which have it in their perp.
pub(crate) struct Membership {
    inside: Vec<Vec<bool>>,
    perp: Vec<Vec<bool>>,
}

impl Membership {
    pub(crate) fn new(reg: &Registry, n: usize, x: usize) -> Membership {
        let inside = (1..=n).map(|k| reg.level(k).points.iter().map(|b| b.contains(x)).collect()).collect();
        let perp = if reg.has_perp() {
            (1..=n).map(|k| reg.level(k).perp.iter().map(|b| b.contains(x)).collect()).collect()
        } else {
            Vec::new()
        };
        Membership { inside, perp }
    }

    /// Type of the chain `(U_1, ..., U_n)` given by registered ids.
    pub(crate) fn type_of(&self, chain: &[u32]) -> usize {
        let n = chain.len();
        if let Some(k) = (1..=n).find(|&k| self.inside[k - 1][chain[k - 1] as usize]) {
            return k;
        }
        if self.perp.is_empty() {
            return n + 1;
        }
        (n + 1..2 * n).find(|&k| self.perp[2 * n - k - 1][chain[2 * n - k - 1] as usize]).unwrap_or(2 * n)
    }
}

/// Number of flag types: `n + 1` for type A and `2n` for type B.
pub fn num_types(g: &GeometryInstance) -> Result<usize> {
    match g.kind {
        GeometryKind::ProjectiveA => Ok(g.n + 1),
        GeometryKind::Polar => Ok(2 * g.n),
        GeometryKind::OriflammeD => Err(SpectraError::Unsupported("flag types")),
    }
}

/// Type of the maximal flag `leaf` with respect to the point `x`.
pub fn flag_type(g: &GeometryInstance, en: &Enumeration, leaf: usize, x: u32) -> Result<usize> {
    num_types(g)?;
    let reg = &en.registry;
    let chain = en.chain(leaf);
    let n = g.n;
    let x = x as usize;
    if let Some(k) = (1..=n).find(|&k| reg.points_of(k, chain[k - 1]).contains(x)) {
        return Ok(k);
    }
    if !g.is_polar() {
        return Ok(n + 1);
    }
    Ok((n + 1..2 * n).find(|&k| reg.perp_of(2 * n - k, chain[2 * n - k - 1]).contains(x)).unwrap_or(2 * n))
}

/// Types of all maximal flags relative to one base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeProfile {
    pub base_point: u32,
    pub num_types: usize,
    /// `types[c]` is the type (1-based) of flag `c`.
    pub types: Vec<u8>,
}

impl TypeProfile {
    pub fn class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.num_types];
        for &t in &self.types {
            sizes[t as usize - 1] += 1;
        }
        sizes
    }

    /// Flags of type `i`, in index order.
    pub fn class(&self, i: usize) -> Vec<usize> {
        self.types.iter().enumerate().filter(|&(_, &t)| t as usize == i).map(|(c, _)| c).collect()
    }
}

pub fn type_profile(g: &GeometryInstance, en: &Enumeration, x: u32) -> Result<TypeProfile> {
    let num_types = num_types(g)?;
    let m = Membership::new(&en.registry, g.n, x as usize);
    let types = (0..en.num_leaves()).map(|c| m.type_of(en.chain(c)) as u8).collect();
    Ok(TypeProfile { base_point: x, num_types, types })
}

/// `|C_i^X|`: `c(n-1) q^(i-1)` for type A; `c(n-1,e) q^(i-1)` for `i <= n`
/// and `c(n-1,e) q^(i+e-2)` for `i > n` in type B.
pub fn size_of_type_class(g: &GeometryInstance, i: usize) -> Result<BigInt> {
    let ell = num_types(g)?;
    if i == 0 || i > ell {
        return Err(SpectraError::OutOfRangeIndex { j: i, max: ell });
    }
    let counts = Counts::of(g);
    let (n, _) = polar_params(g);
    let c = counts.c_rat(n as i64 - 1)?;
    let i = i as i64;
    let power = if g.kind == GeometryKind::ProjectiveA || i <= n as i64 {
        counts.q.pow(i - 1)
    } else {
        counts.qe(i - 2, 1)?
    };
    Ok(crate::qpow::to_integer(&(c * power), "class size")?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(s: &str) -> (GeometryInstance, Enumeration) {
        let g = GeometryInstance::parse(s).unwrap();
        let en = Enumeration::build(&g).unwrap();
        (g, en)
    }

    #[test]
    fn class_sizes_match_closed_forms() {
        for (s, sizes) in [("A:3:2", vec![21u64, 42, 84, 168]), ("B:2:2:2:sp", vec![3, 6, 12, 24])] {
            let (g, en) = setup(s);
            for x in [0u32, 7, 14] {
                let profile = type_profile(&g, &en, x).unwrap();
                assert_eq!(profile.class_sizes(), sizes);
            }
            for (i, &size) in sizes.iter().enumerate() {
                assert_eq!(size_of_type_class(&g, i + 1).unwrap(), BigInt::from(size));
            }
        }
    }

    #[test]
    fn profile_agrees_with_single_lookups() {
        for s in ["A:3:2", "B:2:4:2:ell", "B:3:2:2:sp"] {
            let (g, en) = setup(s);
            let profile = type_profile(&g, &en, 3).unwrap();
            for c in (0..en.num_leaves()).step_by(3) {
                assert_eq!(profile.types[c] as usize, flag_type(&g, &en, c, 3).unwrap());
            }
        }
    }

    #[test]
    fn first_point_of_a_flag_has_type_one() {
        let (g, en) = setup("B:2:1:4:herm");
        for c in (0..en.num_leaves()).step_by(11) {
            let x = en.chain(c)[0];
            assert_eq!(flag_type(&g, &en, c, x).unwrap(), 1);
        }
    }

    #[test]
    fn perp_position_in_a_quadrangle() {
        // X in U_1^perp but not in U_2 has type 3
        let (g, en) = setup("B:2:2:2:sp");
        let reg = &en.registry;
        let c = 0;
        let chain = en.chain(c);
        let x = (0..15)
            .find(|&x| reg.perp_of(1, chain[0]).contains(x) && !reg.points_of(2, chain[1]).contains(x))
            .unwrap();
        assert_eq!(flag_type(&g, &en, c, x as u32).unwrap(), 3);
    }

    #[test]
    fn point_off_the_plane_has_last_type() {
        let (g, en) = setup("A:3:2");
        let chain = en.chain(0);
        let x = (0..15).find(|&x| !en.registry.points_of(3, chain[2]).contains(x)).unwrap();
        assert_eq!(flag_type(&g, &en, 0, x as u32).unwrap(), 4);
    }

    #[test]
    fn oriflamme_has_no_type_function() {
        let (g, en) = setup("D:4:2");
        assert!(flag_type(&g, &en, 0, 0).is_err());
        assert!(size_of_type_class(&g, 1).is_err());
    }
}
