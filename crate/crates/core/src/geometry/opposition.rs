//! Perp, point relations, generator classes and opposition of flags.
//!
//! Opposition is decided two ways. The literal predicates below test the
//! intersection conditions on subspaces directly. The trie search uses an
//! equivalent determinant form: choose vectors `b_1, ..., b_n` adapted to
//! the chain of `d` and functionals `psi_1, ..., psi_n` adapted to `c`
//! (`psi_s = B(., a_s)` in polar spaces; `psi_s` vanishing on `U_{n+1-s}`
//! in projective spaces). Then `c` and `d` are opposite exactly when every
//! leading principal minor of `[psi_s(b_t)]` is nonzero, which lets the
//! search prune whole subtrees at the first failing depth.

use serde::Serialize;

use super::enumerate::Enumeration;
use super::subspace::{det, dot, Subspace};
use super::{GeometryError, GeometryInstance, GeometryKind};
use crate::field::Elem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointRelation {
    Equal,
    Collinear,
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorClass {
    Minus,
    Plus,
}

pub fn perp(g: &GeometryInstance, u: &Subspace) -> Result<Subspace, GeometryError> {
    Ok(g.form()?.perp(&g.field, u))
}

/// Relation between two points of a polar space, by registered point id.
pub fn point_relation(g: &GeometryInstance, en: &Enumeration, x: u32, y: u32) -> Result<PointRelation, GeometryError> {
    if !g.is_polar() {
        return Err(GeometryError::TypeAHasNoCollinearity);
    }
    Ok(if x == y {
        PointRelation::Equal
    } else if en.registry.levels[0].perp[x as usize].contains(y as usize) {
        PointRelation::Collinear
    } else {
        PointRelation::Opposite
    })
}

/// Class of a generator of a hyperbolic quadric. The first registered
/// generator is of class plus; two generators share a class exactly when
/// their intersection has rank congruent to `n` mod 2.
pub fn generator_class(g: &GeometryInstance, en: &Enumeration, m: &Subspace) -> Result<GeneratorClass, GeometryError> {
    let hyperbolic = g.kind == GeometryKind::OriflammeD || (g.is_polar() && g.e2 == 0);
    if !hyperbolic {
        return Err(GeometryError::NotHyperbolic);
    }
    let form = g.form()?;
    if m.rank() != g.n || !form.is_totally_isotropic(&g.field, m) {
        return Err(GeometryError::NotAGenerator { rank: m.rank(), n: g.n });
    }
    let reference = en.registry.subspace(g.n, 0);
    let same = m.meet_rank(&g.field, reference) % 2 == g.n % 2;
    Ok(if same { GeneratorClass::Plus } else { GeneratorClass::Minus })
}

/// Opposition of two A/B flags (leaves) from the intersection conditions.
pub fn leaves_opposite_literal(g: &GeometryInstance, en: &Enumeration, c: usize, d: usize) -> bool {
    let f = &g.field;
    let reg = &en.registry;
    let n = g.n;
    let (cu, dv) = (en.chain(c), en.chain(d));
    match &g.form {
        None => (1..=n).all(|i| {
            let u = reg.subspace(i, cu[i - 1]);
            let v = reg.subspace(n + 1 - i, dv[n - i]);
            u.join(f, v).rank() == n + 1
        }),
        Some(form) => (1..=n).all(|i| {
            let u = reg.subspace(i, cu[i - 1]);
            let vp = form.perp(f, reg.subspace(i, dv[i - 1]));
            u.join(f, &vp).rank() == g.ambient_dim
        }),
    }
}

/// Opposition of two oriflamme flags from the B-flag representatives.
pub fn dflags_opposite_literal(g: &GeometryInstance, en: &Enumeration, c: usize, d: usize) -> bool {
    let o = en.oriflamme.as_ref().expect("oriflamme enumeration");
    let (cm, cp) = (o.minus[c] as usize, o.plus[c] as usize);
    let (dm, dp) = (o.minus[d] as usize, o.plus[d] as usize);
    if g.n.is_multiple_of(2) {
        leaves_opposite_literal(g, en, cm, dm) && leaves_opposite_literal(g, en, cp, dp)
    } else {
        leaves_opposite_literal(g, en, cm, dp) && leaves_opposite_literal(g, en, cp, dm)
    }
}

/// Opposition of two vertices of the opposition graph (flags of `g`).
pub fn is_opposite_literal(g: &GeometryInstance, en: &Enumeration, c: usize, d: usize) -> bool {
    if en.oriflamme.is_some() {
        dflags_opposite_literal(g, en, c, d)
    } else {
        leaves_opposite_literal(g, en, c, d)
    }
}

/// Trie search for opposite flags.
pub struct Opposition<'a> {
    g: &'a GeometryInstance,
    en: &'a Enumeration,
}

struct Frame {
    /// `m[s * n + t] = psi_s(b_t)`.
    m: Vec<Elem>,
    scratch: Vec<Elem>,
    path: Vec<usize>,
}

impl<'a> Opposition<'a> {
    pub fn new(g: &'a GeometryInstance, en: &'a Enumeration) -> Opposition<'a> {
        Opposition { g, en }
    }

    /// Functionals `psi_1, ..., psi_n` adapted to the leaf flag `c`.
    pub fn functionals(&self, leaf: usize) -> Vec<Vec<Elem>> {
        let f = &self.g.field;
        let n = self.g.n;
        match &self.g.form {
            Some(form) => self.en.leaf_vectors(leaf).into_iter().map(|a| form.functional(f, a)).collect(),
            None => {
                let chain = self.en.chain(leaf);
                let mut psi: Vec<Vec<Elem>> = Vec::with_capacity(n);
                for s in 1..=n {
                    let u = self.en.registry.subspace(n + 1 - s, chain[n - s]);
                    let ann = u.annihilator(f);
                    let prev = Subspace::span(f, self.g.ambient_dim, psi.iter().map(|v| v.as_slice()));
                    let next = ann.rows().find(|r| !prev.contains_vector(f, r)).expect("annihilators grow by one");
                    psi.push(next.to_vec());
                }
                psi
            }
        }
    }

    /// Depth-first search over the trie down to `limit`, calling `visit`
    /// on every node whose leading minors up to `limit` are all nonzero.
    fn search(&self, psi: &[Vec<Elem>], limit: usize, visit: &mut dyn FnMut(usize, &Frame)) {
        let n = self.g.n;
        let mut frame = Frame { m: vec![Elem::ZERO; n * n], scratch: vec![Elem::ZERO; n * n], path: Vec::with_capacity(n) };
        for root in 0..self.en.nodes[0].len() {
            self.descend(psi, 1, root, limit, &mut frame, visit);
        }
    }

    fn descend(
        &self,
        psi: &[Vec<Elem>],
        depth: usize,
        node: usize,
        limit: usize,
        frame: &mut Frame,
        visit: &mut dyn FnMut(usize, &Frame),
    ) {
        let f = &self.g.field;
        let n = self.g.n;
        let k = depth - 1;
        let b = self.en.node_vector(depth, node);
        for s in 0..=k {
            frame.m[s * n + k] = dot(f, &psi[s], b);
        }
        for t in 0..k {
            let bt = self.en.node_vector(t + 1, frame.path[t]);
            frame.m[k * n + t] = dot(f, &psi[k], bt);
        }
        let size = depth;
        for s in 0..size {
            for t in 0..size {
                frame.scratch[s * size + t] = frame.m[s * n + t];
            }
        }
        if det(f, &mut frame.scratch[..size * size], size).is_zero() {
            return;
        }
        frame.path.push(node);
        if depth == limit {
            visit(node, frame);
        } else {
            let level = &self.en.nodes[depth - 1];
            for child in level.children(node) {
                self.descend(psi, depth + 1, child, limit, frame, visit);
            }
        }
        frame.path.pop();
    }

    /// Leaves opposite the leaf `c`, in canonical order.
    pub fn opposite_leaves(&self, c: usize) -> Vec<u32> {
        let psi = self.functionals(c);
        let mut out = Vec::new();
        self.search(&psi, self.g.n, &mut |leaf, _| out.push(leaf as u32));
        out
    }

    /// Oriflamme flags opposite the oriflamme flag `c`, in canonical order.
    pub fn opposite_dflags(&self, c: usize) -> Vec<u32> {
        let o = self.en.oriflamme.as_ref().expect("oriflamme enumeration");
        let f = &self.g.field;
        let n = self.g.n;
        let psi_minus = self.functionals(o.minus[c] as usize);
        let psi_plus = self.functionals(o.plus[c] as usize);
        let even = n.is_multiple_of(2);
        let mut out = Vec::new();
        let mut full = vec![Elem::ZERO; n * n];
        let mut check = |frame: &Frame, psi: &[Vec<Elem>], leaf: usize| -> bool {
            let b = self.en.node_vector(n, leaf);
            for s in 0..n - 1 {
                for t in 0..n - 1 {
                    full[s * n + t] = frame.m[s * n + t];
                }
                full[s * n + n - 1] = dot(f, &psi[s], b);
            }
            for t in 0..n - 1 {
                full[(n - 1) * n + t] = dot(f, &psi[n - 1], self.en.node_vector(t + 1, frame.path[t]));
            }
            full[n * n - 1] = dot(f, &psi[n - 1], b);
            !det(f, &mut full, n).is_zero()
        };
        self.search(&psi_minus[..n - 1], n - 1, &mut |d, frame| {
            let (dm, dp) = (o.minus[d] as usize, o.plus[d] as usize);
            let ok = if even {
                check(frame, &psi_minus, dm) && check(frame, &psi_plus, dp)
            } else {
                check(frame, &psi_minus, dp) && check(frame, &psi_plus, dm)
            };
            if ok {
                out.push(d as u32);
            }
        });
        out
    }

    /// Neighbors of a vertex of the opposition graph.
    pub fn neighbors(&self, v: usize) -> Vec<u32> {
        if self.en.oriflamme.is_some() {
            self.opposite_dflags(v)
        } else {
            self.opposite_leaves(v)
        }
    }
}
