//! The secant intersection graph `H_q` and its structural checks.
//!
//! Vertices are secants (ids shared with [`UnitalIncidence`]); two secants
//! are adjacent when they meet in a unital point. The maximal cliques are
//! indexed by unital point: clique `c` is every secant through point `c`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificate::{Certificate, Outcome};
use crate::geometry::{GeometryError, UnitalIncidence};
use crate::graph::{bits, Graph};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("secants {0} and {1} share more than one unital point")]
    SharedPoints(u32, u32),
}

#[derive(Debug)]
pub struct IntersectionGraph {
    q: u32,
    unital: UnitalIncidence,
    graph: Graph,
    /// Unital point where the two secants of each edge meet, by edge id.
    edge_point: Vec<u32>,
}

/// Closed-form parameters of `H_q`.
pub mod formulas {
    pub fn vertices(q: u64) -> u64 {
        q.pow(4) - q.pow(3) + q.pow(2)
    }

    pub fn degree(q: u64) -> u64 {
        (q + 1) * (q * q - 1)
    }

    pub fn edges(q: u64) -> u64 {
        vertices(q) * degree(q) / 2
    }

    pub fn lambda(q: u64) -> u64 {
        2 * q * q - 2
    }

    pub fn mu(q: u64) -> u64 {
        (q + 1) * (q + 1)
    }

    pub fn cliques(q: u64) -> u64 {
        q.pow(3) + 1
    }
}

impl IntersectionGraph {
    pub fn new(q: u32) -> Result<Self, BuildError> {
        Self::from_unital(UnitalIncidence::new(q)?)
    }

    pub fn from_unital(unital: UnitalIncidence) -> Result<Self, BuildError> {
        let n = unital.num_secants();
        let words = n.div_ceil(64).max(1);
        let mut seen = vec![0u64; n * words];
        let mut edges = Vec::new();
        for c in 0..unital.num_points() {
            let members = unital.point_secants(c);
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let slot = &mut seen[a as usize * words + b as usize / 64];
                    if *slot >> (b % 64) & 1 == 1 {
                        return Err(BuildError::SharedPoints(a, b));
                    }
                    *slot |= 1 << (b % 64);
                    edges.push((a, b));
                }
            }
        }
        let graph = Graph::from_edges(n, edges).expect("secant ids are in range");
        let edge_point = graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                common_point(unital.secant_points(u as usize), unital.secant_points(v as usize))
                    .expect("adjacent secants share a point")
            })
            .collect();
        Ok(IntersectionGraph { q: unital.q(), unital, graph, edge_point })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn unital(&self) -> &UnitalIncidence {
        &self.unital
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn num_cliques(&self) -> usize {
        self.unital.num_points()
    }

    /// Vertices of clique `c` (all secants through unital point `c`).
    pub fn clique(&self, c: usize) -> &[u32] {
        self.unital.point_secants(c)
    }

    /// Cliques containing vertex `v`, i.e. the unital points on its secant.
    pub fn vertex_cliques(&self, v: usize) -> &[u32] {
        self.unital.secant_points(v)
    }

    pub fn edge_point_by_id(&self, e: usize) -> u32 {
        self.edge_point[e]
    }

    /// Meeting point of adjacent secants `u` and `v`.
    pub fn edge_point(&self, u: usize, v: usize) -> Option<u32> {
        self.graph.edge_id(u, v).map(|e| self.edge_point[e])
    }

    /// True when at least three of the four vertices lie in one clique.
    pub fn three_in_a_clique(&self, k: [u32; 4]) -> bool {
        let ep = |a: u32, b: u32| self.edge_point(a as usize, b as usize);
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]].iter().any(|t| {
            let (a, b, c) = (k[t[0]], k[t[1]], k[t[2]]);
            ep(a, b).is_some() && ep(a, b) == ep(a, c)
        })
    }
}

fn common_point(a: &[u32], b: &[u32]) -> Option<u32> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Outcome of the exhaustive strong-regularity and clique-structure scan.
#[derive(Clone, Debug, Serialize)]
pub struct SrgReport {
    pub q: u32,
    pub n: usize,
    pub degrees: BTreeSet<usize>,
    pub edges: usize,
    /// Distinct common-neighbour counts over adjacent pairs.
    pub lambda_observed: BTreeSet<u32>,
    /// Distinct common-neighbour counts over non-adjacent pairs.
    pub mu_observed: BTreeSet<u32>,
    /// Order and degree match `q^4-q^3+q^2` and `(q+1)(q^2-1)`.
    pub order_and_degree: bool,
    /// `q^3+1` cliques of order `q^2`, pairwise meeting in one vertex.
    pub clique_family: bool,
    /// Each vertex in `q+1` cliques, each edge in exactly one.
    pub clique_membership: bool,
    /// Filled in from a K4-structure certificate when one was run.
    pub k4_structure: Option<bool>,
    pub lambda: bool,
    pub mu: bool,
}

impl SrgReport {
    pub fn passed(&self) -> bool {
        self.order_and_degree
            && self.clique_family
            && self.clique_membership
            && self.lambda
            && self.mu
            && self.k4_structure.unwrap_or(true)
    }

    pub fn with_k4(mut self, cert: &Certificate) -> Self {
        self.k4_structure = Some(cert.passed());
        self
    }

    pub fn to_certificate(&self) -> Certificate {
        let q = self.q as u64;
        let set = |s: &BTreeSet<u32>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut cert = Certificate::new("srg-parameters")
            .param("q", q)
            .quantity("n", self.n as u64)
            .quantity("edges", self.edges as u64)
            .quantity("degrees", self.degrees.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .quantity("lambda_observed", set(&self.lambda_observed))
            .quantity("mu_observed", set(&self.mu_observed))
            .quantity("lambda_expected", formulas::lambda(q))
            .quantity("mu_expected", formulas::mu(q))
            .quantity("item1_order_degree", self.order_and_degree)
            .quantity("item2_clique_family", self.clique_family)
            .quantity("item3_clique_membership", self.clique_membership)
            .quantity("item5_lambda", self.lambda)
            .quantity("item6_mu", self.mu);
        if let Some(k4) = self.k4_structure {
            cert = cert.quantity("item4_k4_structure", k4);
        }
        cert.outcome(if self.passed() { Outcome::Pass } else { Outcome::Fail })
    }
}

/// Checks order, degree, the clique family and every pair's common
/// neighbourhood size.
pub fn verify_srg(g: &IntersectionGraph) -> SrgReport {
    let q = g.q() as u64;
    let graph = g.graph();
    let n = graph.n();
    let degrees: BTreeSet<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let order_and_degree = n as u64 == formulas::vertices(q)
        && degrees.len() == 1
        && *degrees.first().unwrap() as u64 == formulas::degree(q);

    let words = graph.words();
    let nc = g.num_cliques();
    let mut clique_bits = vec![0u64; nc * words];
    for c in 0..nc {
        for &v in g.clique(c) {
            clique_bits[c * words + v as usize / 64] |= 1 << (v % 64);
        }
    }
    let sizes_ok = (0..nc).all(|c| g.clique(c).len() as u64 == q * q)
        && (0..nc).all(|c| {
            g.clique(c)
                .iter()
                .enumerate()
                .all(|(i, &a)| g.clique(c)[i + 1..].iter().all(|&b| graph.has_edge(a as usize, b as usize)))
        });
    let pairwise_ok = (0..nc).into_par_iter().all(|a| {
        (a + 1..nc).all(|b| {
            crate::graph::popcount_and(
                &clique_bits[a * words..(a + 1) * words],
                &clique_bits[b * words..(b + 1) * words],
            ) == 1
        })
    });
    let clique_family = nc as u64 == formulas::cliques(q) && sizes_ok && pairwise_ok;

    let per_clique_edges = (q * q) * (q * q - 1) / 2;
    let clique_membership = (0..n).all(|v| g.vertex_cliques(v).len() as u64 == q + 1)
        && nc as u64 * per_clique_edges == graph.m() as u64
        && graph.edges().iter().all(|&(u, v)| {
            let (a, b) = (g.vertex_cliques(u as usize), g.vertex_cliques(v as usize));
            a.iter().filter(|x| b.contains(x)).count() == 1
        });

    let (lambda_observed, mu_observed) = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut lam = BTreeSet::new();
            let mut mu = BTreeSet::new();
            for v in u + 1..n {
                let c = graph.common_neighbors(u, v);
                if graph.has_edge(u, v) {
                    lam.insert(c);
                } else {
                    mu.insert(c);
                }
            }
            (lam, mu)
        })
        .reduce(
            || (BTreeSet::new(), BTreeSet::new()),
            |(mut a, mut b), (c, d)| {
                a.extend(c);
                b.extend(d);
                (a, b)
            },
        );
    let lambda = lambda_observed.iter().all(|&x| x as u64 == formulas::lambda(q));
    let mu = mu_observed.iter().all(|&x| x as u64 == formulas::mu(q));

    SrgReport {
        q: g.q(),
        n,
        degrees,
        edges: graph.m(),
        lambda_observed,
        mu_observed,
        order_and_degree,
        clique_family,
        clique_membership,
        k4_structure: None,
        lambda,
        mu,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K4Mode {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

/// Draws up to `count` K4s: a random edge, a random common neighbour, then a
/// random vertex adjacent to all three. Stops early when `visit` returns false.
pub fn for_each_sampled_k4(graph: &Graph, seed: u64, count: u64, mut visit: impl FnMut([u32; 4]) -> bool) {
    if graph.m() == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut common = vec![0u64; graph.words()];
    for _ in 0..count {
        let (u, v) = graph.edge(rng.random_range(0..graph.m()));
        for (w, (x, y)) in common.iter_mut().zip(graph.row(u as usize).iter().zip(graph.row(v as usize))) {
            *w = x & y;
        }
        let third: Vec<usize> = bits(&common).collect();
        if third.is_empty() {
            continue;
        }
        let w = third[rng.random_range(0..third.len())];
        let fourth: Vec<usize> = third.iter().copied().filter(|&x| graph.has_edge(w, x)).collect();
        if fourth.is_empty() {
            continue;
        }
        let x = fourth[rng.random_range(0..fourth.len())];
        if !visit([u, v, w as u32, x as u32]) {
            return;
        }
    }
}

/// Every K4 must have three vertices in a common clique; equivalently the
/// four secants never form an O'Nan configuration.
pub fn verify_k4_structure(g: &IntersectionGraph, mode: K4Mode) -> Certificate {
    let base = Certificate::new("k4-three-in-a-clique").param("q", g.q() as u64);
    match mode {
        K4Mode::Exhaustive => {
            let mut count = 0u64;
            let mut bad = None;
            g.graph().for_each_k4(|k| {
                count += 1;
                if g.three_in_a_clique(k) {
                    true
                } else {
                    bad = Some(k);
                    false
                }
            });
            let cert = base.param("mode", "exhaustive").quantity("k4_count", count);
            match bad {
                None => cert.quantity("counterexamples", 0).outcome(Outcome::Pass),
                Some(k) => cert.quantity("counterexamples", 1).witness(k.map(u64::from)).outcome(Outcome::Fail),
            }
        }
        K4Mode::Sampled { seed, count } => {
            let mut found = 0u64;
            let mut bad = None;
            for_each_sampled_k4(g.graph(), seed, count, |k| {
                found += 1;
                if g.three_in_a_clique(k) {
                    true
                } else {
                    bad = Some(k);
                    false
                }
            });
            let cert =
                base.param("mode", "sampled").param("seed", seed).param("samples", count).quantity("k4_sampled", found);
            match bad {
                None => cert.quantity("counterexamples", 0).outcome(Outcome::Pass),
                Some(k) => cert.quantity("counterexamples", 1).witness(k.map(u64::from)).outcome(Outcome::Fail),
            }
        }
    }
}
