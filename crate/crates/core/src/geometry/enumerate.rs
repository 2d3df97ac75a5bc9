//! Registries of subspaces and the trie of maximal flags.
//!
//! Subspaces of each rank are registered once, sorted by their canonical
//! key. Each carries its point set and, in polar spaces, the point set of
//! its perp. Flags are the root-to-leaf paths of a trie built by ascending
//! chain extension; trie nodes at every depth are stored in depth-first
//! order, so leaf order is the canonical flag order.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::counts::Counts;
use super::subspace::Subspace;
use super::{GeometryError, GeometryInstance, GeometryKind};
use crate::field::Elem;

pub type FlagId = u32;

/// Registered subspaces of one rank.
#[derive(Debug, Clone, Default)]
pub struct Level {
    pub subspaces: Vec<Subspace>,
    pub index: HashMap<Subspace, u32>,
    pub points: Vec<FixedBitSet>,
    /// Points of `U^perp`; empty for projective spaces.
    pub perp: Vec<FixedBitSet>,
    /// Registered subspaces of the next rank containing this one, sorted.
    pub children: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct Registry {
    pub dim: usize,
    pub npoints: usize,
    /// `levels[k - 1]` holds the subspaces of rank `k`.
    pub levels: Vec<Level>,
    /// Generator classes for hyperbolic quadrics (`true` = plus).
    pub generator_plus: Option<Vec<bool>>,
}

impl Registry {
    pub fn level(&self, rank: usize) -> &Level {
        &self.levels[rank - 1]
    }

    pub fn point_vector(&self, p: u32) -> &[Elem] {
        self.levels[0].subspaces[p as usize].row(0)
    }

    pub fn subspace(&self, rank: usize, id: u32) -> &Subspace {
        &self.levels[rank - 1].subspaces[id as usize]
    }

    pub fn points_of(&self, rank: usize, id: u32) -> &FixedBitSet {
        &self.levels[rank - 1].points[id as usize]
    }

    pub fn perp_of(&self, rank: usize, id: u32) -> &FixedBitSet {
        &self.levels[rank - 1].perp[id as usize]
    }

    pub fn has_perp(&self) -> bool {
        !self.levels[0].perp.is_empty()
    }

    pub fn count(&self, rank: usize) -> usize {
        self.levels[rank - 1].subspaces.len()
    }

    /// Builds every subspace of rank `1..=top` (totally isotropic ones in
    /// polar spaces).
    pub fn build(g: &GeometryInstance) -> Result<Registry, GeometryError> {
        let f = &g.field;
        let dim = g.ambient_dim;
        let vectors = g.point_vectors();
        let npoints = vectors.len();
        let top = g.n;

        let mut first = Level::default();
        for v in &vectors {
            let s = Subspace::from_rref(dim, v.clone());
            first.index.insert(s.clone(), first.subspaces.len() as u32);
            first.subspaces.push(s);
        }
        first.points = (0..npoints)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(npoints);
                b.insert(i);
                b
            })
            .collect();
        if let Some(form) = &g.form {
            let functionals: Vec<Vec<Elem>> = vectors.iter().map(|v| form.functional(f, v)).collect();
            first.perp = functionals
                .par_iter()
                .map(|phi| {
                    let mut b = FixedBitSet::with_capacity(npoints);
                    for (j, w) in vectors.iter().enumerate() {
                        if super::subspace::dot(f, w, phi).is_zero() {
                            b.insert(j);
                        }
                    }
                    b
                })
                .collect();
        }

        let point_perp = first.perp.clone();
        let mut levels = vec![first];
        for rank in 1..top {
            let next = extend_level(g, &vectors, &point_perp, &mut levels[rank - 1], npoints);
            levels.push(next);
        }

        if g.is_polar() {
            // no singular point extends any generator, so the Witt index is n
            let gens = &levels[top - 1];
            for (pts, perp) in gens.points.iter().zip(&gens.perp) {
                if perp.difference(pts).next().is_some() {
                    return Err(GeometryError::WittIndex { found: top + 1, expected: top });
                }
            }
        }

        let hyperbolic = matches!(g.kind, GeometryKind::OriflammeD) || (g.is_polar() && g.e2 == 0);
        let generator_plus = hyperbolic.then(|| {
            let gens = &levels[top - 1].subspaces;
            let reference = &gens[0];
            gens.iter().map(|m| (m.meet_rank(f, reference) % 2) == (top % 2)).collect()
        });

        Ok(Registry { dim, npoints, levels, generator_plus })
    }
}

fn extend_level(
    g: &GeometryInstance,
    vectors: &[Vec<Elem>],
    point_perp: &[FixedBitSet],
    current: &mut Level,
    npoints: usize,
) -> Level {
    let f = &g.field;
    let polar = g.is_polar();
    let all = {
        let mut b = FixedBitSet::with_capacity(npoints);
        b.insert_range(..);
        b
    };

    // children of each subspace, found in parallel, deduplicated below
    let found: Vec<Vec<(Subspace, FixedBitSet)>> = (0..current.subspaces.len())
        .into_par_iter()
        .map(|u| {
            let sub = &current.subspaces[u];
            let own = &current.points[u];
            let pool = if polar { &current.perp[u] } else { &all };
            let mut covered = own.clone();
            let mut out = Vec::new();
            for x in pool.ones() {
                if covered.contains(x) {
                    continue;
                }
                let w = sub.extend(f, &vectors[x]);
                let mut pts = FixedBitSet::with_capacity(npoints);
                for y in pool.ones() {
                    if covered.contains(y) && !own.contains(y) {
                        continue;
                    }
                    if own.contains(y) || w.contains_vector(f, &vectors[y]) {
                        pts.insert(y);
                    }
                }
                covered.union_with(&pts);
                out.push((w, pts));
            }
            out
        })
        .collect();

    let mut next = Level::default();
    let mut unique: Vec<(Subspace, FixedBitSet)> = Vec::new();
    let mut seen: HashMap<Subspace, ()> = HashMap::new();
    for list in &found {
        for (w, pts) in list {
            if seen.insert(w.clone(), ()).is_none() {
                unique.push((w.clone(), pts.clone()));
            }
        }
    }
    unique.sort_by(|a, b| a.0.cmp(&b.0));
    for (i, (w, pts)) in unique.into_iter().enumerate() {
        next.index.insert(w.clone(), i as u32);
        next.subspaces.push(w);
        next.points.push(pts);
    }
    current.children = found
        .iter()
        .map(|list| {
            let mut ids: Vec<u32> = list.iter().map(|(w, _)| next.index[w]).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    if polar {
        next.perp = next
            .points
            .par_iter()
            .map(|pts| {
                let mut acc = all.clone();
                for p in pts.ones() {
                    acc.intersect_with(&point_perp[p]);
                }
                acc
            })
            .collect();
    }
    next.children = vec![Vec::new(); next.subspaces.len()];
    next
}

/// Trie nodes of one depth, in depth-first order.
#[derive(Debug, Clone, Default)]
pub struct NodeLevel {
    /// Registered subspace id of the node (rank = depth).
    pub sub: Vec<u32>,
    pub parent: Vec<u32>,
    /// Children of node `i` are `child_start[i]..child_start[i + 1]`.
    pub child_start: Vec<u32>,
    /// A vector of `U_k` outside `U_{k-1}`, flattened `dim` per node.
    pub vector: Vec<Elem>,
}

impl NodeLevel {
    pub fn len(&self) -> usize {
        self.sub.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub.is_empty()
    }

    pub fn children(&self, i: usize) -> std::ops::Range<usize> {
        self.child_start[i] as usize..self.child_start[i + 1] as usize
    }
}

/// Oriflamme flags: trie nodes at depth `n - 1`, each with one generator of
/// each class below it.
#[derive(Debug, Clone)]
pub struct Oriflamme {
    /// Leaf (B-flag) index of `c^-` and `c^+` for every D-flag `c`.
    pub minus: Vec<u32>,
    pub plus: Vec<u32>,
    /// For every leaf: its D-flag and whether its generator is of class plus.
    pub leaf_dflag: Vec<u32>,
    pub leaf_plus: Vec<bool>,
}

/// An oriflamme flag `(U_1, ..., U_{n-2}; M^-, M^+)` as registered ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriflammeFlag {
    pub chain: Vec<u32>,
    pub gen_minus: u32,
    pub gen_plus: u32,
}

/// Points, subspaces and maximal flags of a geometry.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub registry: Registry,
    pub n: usize,
    pub dim: usize,
    /// `nodes[k - 1]` holds the trie nodes at depth `k`.
    pub nodes: Vec<NodeLevel>,
    /// Chains of the leaves (maximal A/B flags), `n` ids per flag.
    pub chains: Vec<u32>,
    pub oriflamme: Option<Oriflamme>,
}

pub const DEFAULT_MAX_FLAGS: u64 = 2_000_000;

impl Enumeration {
    pub fn build(g: &GeometryInstance) -> Result<Enumeration, GeometryError> {
        Self::build_with_limit(g, DEFAULT_MAX_FLAGS)
    }

    pub fn build_with_limit(g: &GeometryInstance, max_flags: u64) -> Result<Enumeration, GeometryError> {
        let expected = Counts::of(g).flag_count_b()?;
        if expected > max_flags {
            return Err(GeometryError::TooManyFlags { count: expected, limit: max_flags });
        }
        let registry = Registry::build(g)?;
        Ok(Self::from_registry(g, registry))
    }

    pub fn from_registry(g: &GeometryInstance, registry: Registry) -> Enumeration {
        let f = &g.field;
        let n = g.n;
        let dim = g.ambient_dim;
        let mut nodes: Vec<NodeLevel> = Vec::with_capacity(n);

        let mut root = NodeLevel::default();
        for p in 0..registry.count(1) as u32 {
            root.sub.push(p);
            root.parent.push(u32::MAX);
            root.vector.extend_from_slice(registry.point_vector(p));
        }
        nodes.push(root);
        for depth in 1..n {
            let prev = &mut nodes[depth - 1];
            let level = registry.level(depth);
            let mut next = NodeLevel::default();
            prev.child_start = Vec::with_capacity(prev.len() + 1);
            for i in 0..prev.len() {
                prev.child_start.push(next.len() as u32);
                let parent_sub = registry.subspace(depth, prev.sub[i]);
                for &c in &level.children[prev.sub[i] as usize] {
                    next.sub.push(c);
                    next.parent.push(i as u32);
                    let child = registry.subspace(depth + 1, c);
                    let v = child
                        .rows()
                        .find(|r| !parent_sub.contains_vector(f, r))
                        .expect("child strictly contains its parent");
                    next.vector.extend_from_slice(v);
                }
            }
            prev.child_start.push(next.len() as u32);
            nodes.push(next);
        }
        let last = nodes.last_mut().expect("n >= 1");
        last.child_start = vec![0; last.len() + 1];

        let leaves = nodes[n - 1].len();
        let mut chains = vec![0u32; leaves * n];
        for leaf in 0..leaves {
            let mut node = leaf;
            for depth in (1..=n).rev() {
                chains[leaf * n + depth - 1] = nodes[depth - 1].sub[node];
                node = nodes[depth - 1].parent[node] as usize;
            }
        }

        let oriflamme = (g.kind == GeometryKind::OriflammeD).then(|| {
            let classes = registry.generator_plus.as_ref().expect("hyperbolic");
            let mid = &nodes[n - 2];
            let mut o = Oriflamme {
                minus: Vec::with_capacity(mid.len()),
                plus: Vec::with_capacity(mid.len()),
                leaf_dflag: vec![0; leaves],
                leaf_plus: vec![false; leaves],
            };
            for c in 0..mid.len() {
                let kids = mid.children(c);
                assert_eq!(kids.len(), 2, "a rank n-1 space lies on exactly two generators of a hyperbolic quadric");
                let mut pair = [u32::MAX; 2];
                for leaf in kids {
                    let plus = classes[nodes[n - 1].sub[leaf] as usize];
                    pair[plus as usize] = leaf as u32;
                    o.leaf_dflag[leaf] = c as u32;
                    o.leaf_plus[leaf] = plus;
                }
                assert!(pair.iter().all(|&x| x != u32::MAX), "generators through a rank n-1 space differ in class");
                o.minus.push(pair[0]);
                o.plus.push(pair[1]);
            }
            o
        });

        Enumeration { registry, n, dim, nodes, chains, oriflamme }
    }

    /// Number of maximal flags of the A/B geometry (leaves of the trie).
    pub fn num_leaves(&self) -> usize {
        self.nodes[self.n - 1].len()
    }

    /// Number of vertices of the opposition graph: leaves, or oriflamme
    /// flags for type D.
    pub fn num_flags(&self) -> usize {
        match &self.oriflamme {
            Some(o) => o.minus.len(),
            None => self.num_leaves(),
        }
    }

    pub fn num_points(&self) -> usize {
        self.registry.npoints
    }

    /// Chain `(U_1, ..., U_n)` of a leaf as registered ids.
    pub fn chain(&self, leaf: usize) -> &[u32] {
        &self.chains[leaf * self.n..(leaf + 1) * self.n]
    }

    /// Adapted vector of the node at `depth` on the path to `leaf`.
    pub fn leaf_vectors(&self, leaf: usize) -> Vec<&[Elem]> {
        let mut out = vec![&[][..]; self.n];
        let mut node = leaf;
        for depth in (1..=self.n).rev() {
            out[depth - 1] = self.node_vector(depth, node);
            node = self.nodes[depth - 1].parent[node] as usize;
        }
        out
    }

    pub fn node_vector(&self, depth: usize, node: usize) -> &[Elem] {
        &self.nodes[depth - 1].vector[node * self.dim..(node + 1) * self.dim]
    }

    pub fn oriflamme_flag(&self, c: usize) -> Option<OriflammeFlag> {
        let o = self.oriflamme.as_ref()?;
        let minus = self.chain(o.minus[c] as usize);
        let plus = self.chain(o.plus[c] as usize);
        Some(OriflammeFlag {
            chain: minus[..self.n - 2].to_vec(),
            gen_minus: minus[self.n - 1],
            gen_plus: plus[self.n - 1],
        })
    }
}
