//! Degenerate and non-degenerate triangles of `H_q`, the neighbourhood
//! decomposition into spanning cliques, and s-fans.
//!
//! A triangle is non-degenerate when its three secants meet pairwise in three
//! distinct unital points. For a vertex `v` on secant `l` and a unital point
//! `p` off `l`, the `q+1` secants joining `p` to the points of `l` form a
//! *spanning clique* of `G_v`; its edges are exactly the pairs that make a
//! non-degenerate triangle with `v`. The family is stored through these
//! cliques, with an explicit triple list only for small `q`.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::certificate::{Certificate, Outcome};
use crate::intersection::{for_each_sampled_k4, IntersectionGraph, K4Mode};

/// Explicit triangle lists are kept up to this `q`.
pub const EXPLICIT_MAX_Q: u32 = 4;

#[derive(Debug, Error)]
pub enum TriangleError {
    #[error("{what}: closed form gives {expected}, enumeration found {found}")]
    Mismatch { what: &'static str, expected: u64, found: u64 },
    #[error("fan size {s} outside 3..={max}")]
    FanSize { s: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TriangleKind {
    Degenerate,
    NonDegenerate,
    NotATriangle,
}

pub mod formulas {
    use crate::intersection::formulas::vertices;

    pub fn spanning_cliques_per_vertex(q: u64) -> u64 {
        q.pow(3) - q
    }

    /// Non-degenerate triangles through one vertex.
    pub fn per_vertex(q: u64) -> u64 {
        spanning_cliques_per_vertex(q) * (q + 1) * q / 2
    }

    /// Size of the non-degenerate family.
    pub fn total(q: u64) -> u64 {
        vertices(q) * (q.pow(3) - q) * (q + 1) * q / 6
    }
}

/// Classifies three meeting points. Exactly two distinct points cannot happen
/// for secants of a linear space and indicates corrupted input.
fn kind_from_meets(p: [u32; 3]) -> TriangleKind {
    let distinct = 1 + usize::from(p[1] != p[0]) + usize::from(p[2] != p[0] && p[2] != p[1]);
    match distinct {
        1 => TriangleKind::Degenerate,
        3 => TriangleKind::NonDegenerate,
        _ => panic!("triangle with exactly two distinct meeting points {p:?}"),
    }
}

pub fn classify_triangle(g: &IntersectionGraph, a: u32, b: u32, c: u32) -> TriangleKind {
    let ep = |x: u32, y: u32| g.edge_point(x as usize, y as usize);
    match (ep(a, b), ep(b, c), ep(a, c)) {
        (Some(x), Some(y), Some(z)) => kind_from_meets([x, y, z]),
        _ => TriangleKind::NotATriangle,
    }
}

/// A triangle as sorted vertex ids plus the ids of its edges
/// `(v0,v1), (v0,v2), (v1,v2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub vertices: [u32; 3],
    pub edges: [u32; 3],
}

#[derive(Debug)]
pub struct TriangleFamily<'g> {
    graph: &'g IntersectionGraph,
    total: u64,
    explicit: Option<Vec<Triangle>>,
}

impl<'g> TriangleFamily<'g> {
    /// Builds the family and cross-checks the closed form against the
    /// spanning-clique index (and, for small `q`, against brute-force
    /// classification of every triangle).
    pub fn build(g: &'g IntersectionGraph) -> Result<Self, TriangleError> {
        let q = g.q() as u64;
        let total = formulas::total(q);
        let mut fam = TriangleFamily { graph: g, total, explicit: None };

        let mut incidences = 0u64;
        for v in 0..g.n() {
            let mut cliques = 0u64;
            fam.for_each_spanning_clique(v, |_, members| {
                debug_assert_eq!(members.len() as u64, q + 1);
                cliques += 1;
            });
            if cliques != formulas::spanning_cliques_per_vertex(q) {
                return Err(TriangleError::Mismatch {
                    what: "spanning cliques at a vertex",
                    expected: formulas::spanning_cliques_per_vertex(q),
                    found: cliques,
                });
            }
            incidences += cliques * (q + 1) * q / 2;
        }
        if incidences != 3 * total {
            return Err(TriangleError::Mismatch {
                what: "vertex-triangle incidences",
                expected: 3 * total,
                found: incidences,
            });
        }

        if g.q() <= EXPLICIT_MAX_Q {
            let graph = g.graph();
            let mut list = Vec::new();
            let mut per_vertex = vec![0u64; g.n()];
            graph.for_each_triangle(|a, b, c| {
                if classify_triangle(g, a, b, c) == TriangleKind::NonDegenerate {
                    let e = |x: u32, y: u32| graph.edge_id(x as usize, y as usize).unwrap() as u32;
                    list.push(Triangle { vertices: [a, b, c], edges: [e(a, b), e(a, c), e(b, c)] });
                    for x in [a, b, c] {
                        per_vertex[x as usize] += 1;
                    }
                }
            });
            if list.len() as u64 != total {
                return Err(TriangleError::Mismatch {
                    what: "non-degenerate triangles",
                    expected: total,
                    found: list.len() as u64,
                });
            }
            if let Some(&bad) = per_vertex.iter().find(|&&c| c != formulas::per_vertex(q)) {
                return Err(TriangleError::Mismatch {
                    what: "non-degenerate triangles at a vertex",
                    expected: formulas::per_vertex(q),
                    found: bad,
                });
            }
            fam.explicit = Some(list);
        }
        Ok(fam)
    }

    pub fn graph(&self) -> &'g IntersectionGraph {
        self.graph
    }

    pub fn q(&self) -> u32 {
        self.graph.q()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn explicit(&self) -> Option<&[Triangle]> {
        self.explicit.as_deref()
    }

    /// Calls `visit(p, members)` for each unital point `p` off the secant of
    /// `v`, where `members` are the secants joining `p` to the points of
    /// that secant, in the order of those points.
    pub fn for_each_spanning_clique(&self, v: usize, mut visit: impl FnMut(u32, &[u32])) {
        let unital = self.graph.unital();
        let on_line = unital.secant_points(v);
        let mut members = vec![0u32; on_line.len()];
        let mut next_on = 0;
        for p in 0..unital.num_points() as u32 {
            if next_on < on_line.len() && on_line[next_on] == p {
                next_on += 1;
                continue;
            }
            for (slot, &x) in members.iter_mut().zip(on_line) {
                *slot = unital.secant_through(p, x);
            }
            visit(p, &members);
        }
    }

    /// Spanning cliques of `G_v`, each sorted.
    pub fn per_vertex_index(&self, v: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        self.for_each_spanning_clique(v, |_, m| {
            let mut m = m.to_vec();
            m.sort_unstable();
            out.push(m);
        });
        out
    }

    /// `a b c` per line, sorted, when the explicit list exists.
    pub fn dump_text(&self) -> Option<String> {
        let list = self.explicit.as_ref()?;
        let mut out = String::with_capacity(list.len() * 12);
        for t in list {
            writeln!(out, "{} {} {}", t.vertices[0], t.vertices[1], t.vertices[2]).unwrap();
        }
        Some(out)
    }
}

/// Checks that `H_q[N(v)]` splits into `q+1` cliques of order `q^2-1` and
/// `q^3-q` spanning cliques of order `q+1`, covering every edge exactly once.
pub fn verify_nbhd_decomposition(fam: &TriangleFamily<'_>, v: usize) -> Certificate {
    let g = fam.graph();
    let graph = g.graph();
    let q = g.q() as u64;
    let nbrs = graph.neighbors(v);
    let d = nbrs.len();
    let pos = |x: u32| nbrs.binary_search(&x).ok();
    let mut cover = vec![0u8; d * d];
    let mut stray: Option<u32> = None;

    let mut cover_clique = |members: &[u32], cover: &mut Vec<u8>| {
        let idx: Vec<Option<usize>> = members.iter().map(|&x| pos(x)).collect();
        for (i, a) in idx.iter().enumerate() {
            let Some(a) = *a else {
                stray.get_or_insert(members[i]);
                continue;
            };
            for b in idx[i + 1..].iter().flatten() {
                let (lo, hi) = (a.min(*b), a.max(*b));
                cover[lo * d + hi] = cover[lo * d + hi].saturating_add(1);
            }
        }
    };

    let mut big_sizes = Vec::new();
    for &p in g.vertex_cliques(v) {
        let members: Vec<u32> = g.clique(p as usize).iter().copied().filter(|&x| x as usize != v).collect();
        big_sizes.push(members.len() as u64);
        cover_clique(&members, &mut cover);
    }
    let mut spanning_sizes = Vec::new();
    fam.for_each_spanning_clique(v, |_, members| {
        spanning_sizes.push(members.len() as u64);
        cover_clique(members, &mut cover);
    });

    let mut nbhd_edges = 0u64;
    let mut witness = None;
    'scan: for i in 0..d {
        for j in i + 1..d {
            let adjacent = graph.has_edge(nbrs[i] as usize, nbrs[j] as usize);
            nbhd_edges += u64::from(adjacent);
            let expected = u8::from(adjacent);
            if cover[i * d + j] != expected {
                witness = Some([nbrs[i], nbrs[j], cover[i * d + j] as u32]);
                break 'scan;
            }
        }
    }

    let spanning_edges = spanning_sizes.iter().map(|s| s * (s - 1) / 2).sum::<u64>();
    let shape_ok = big_sizes.len() as u64 == q + 1
        && big_sizes.iter().all(|&s| s == q * q - 1)
        && spanning_sizes.len() as u64 == formulas::spanning_cliques_per_vertex(q)
        && spanning_sizes.iter().all(|&s| s == q + 1);

    let cert = Certificate::new("neighbourhood-decomposition")
        .param("q", q)
        .param("vertex", v as u64)
        .quantity("big_cliques", big_sizes.len() as u64)
        .quantity("big_clique_order", big_sizes.first().copied().unwrap_or(0))
        .quantity("spanning_cliques", spanning_sizes.len() as u64)
        .quantity("spanning_clique_order", spanning_sizes.first().copied().unwrap_or(0))
        .quantity("nbhd_edges", nbhd_edges)
        .quantity("spanning_edges", spanning_edges);
    match (witness, stray) {
        (None, None) if shape_ok => cert.outcome(Outcome::Pass),
        (Some(w), _) => {
            cert.witness(w.map(u64::from)).note("witness: two neighbours and their cover count").outcome(Outcome::Fail)
        }
        (_, Some(x)) => cert.witness([x as u64]).note("clique member outside N(v)").outcome(Outcome::Fail),
        _ => cert.note("clique counts or orders differ from the closed form").outcome(Outcome::Fail),
    }
}

/// No K4 may consist of four non-degenerate triangles.
pub fn verify_no_k4_in_family(fam: &TriangleFamily<'_>, mode: K4Mode) -> Certificate {
    let g = fam.graph();
    let check = |k: [u32; 4]| {
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .any(|t| classify_triangle(g, k[t[0]], k[t[1]], k[t[2]]) == TriangleKind::Degenerate)
    };
    let mut count = 0u64;
    let mut bad = None;
    match mode {
        K4Mode::Exhaustive => {
            g.graph().for_each_k4(|k| {
                count += 1;
                if check(k) {
                    true
                } else {
                    bad = Some(k);
                    false
                }
            });
        }
        K4Mode::Sampled { seed, count: samples } => {
            for_each_sampled_k4(g.graph(), seed, samples, |k| {
                count += 1;
                if check(k) {
                    true
                } else {
                    bad = Some(k);
                    false
                }
            });
        }
    }
    let cert = Certificate::new("no-k4-of-nondegenerate-triangles")
        .param("q", g.q() as u64)
        .param("mode", if mode == K4Mode::Exhaustive { "exhaustive" } else { "sampled" })
        .quantity("k4_checked", count);
    match bad {
        None => cert.outcome(Outcome::Pass),
        Some(k) => cert.witness(k.map(u64::from)).outcome(Outcome::Fail),
    }
}

/// `s-1` secants through `apex` plus a transversal secant missing `apex`
/// that meets each of them in the unital.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub apex: u32,
    pub concurrent: Vec<u32>,
    pub transversal: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanFamily {
    pub s: usize,
    pub fans: Vec<Fan>,
}

/// Lexicographic `k`-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut state: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let current = state.take()?;
        let mut next = current.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                state = Some(next);
                break;
            }
        }
        Some(current)
    })
}

/// Streams s-fans ordered by apex, then transversal, then subset.
pub fn fans(g: &IntersectionGraph, s: usize) -> Result<impl Iterator<Item = Fan> + '_, TriangleError> {
    let q = g.q() as usize;
    if !(3..=q + 1).contains(&s) {
        return Err(TriangleError::FanSize { s, max: q + 1 });
    }
    let unital = g.unital();
    Ok((0..unital.num_points() as u32).flat_map(move |apex| {
        (0..g.n() as u32).filter(move |&t| !unital.secant_points(t as usize).contains(&apex)).flat_map(move |t| {
            let joining: Vec<u32> =
                unital.secant_points(t as usize).iter().map(|&x| unital.secant_through(apex, x)).collect();
            combinations(joining.len(), s - 1).map(move |idx| {
                let mut concurrent: Vec<u32> = idx.iter().map(|&i| joining[i]).collect();
                concurrent.sort_unstable();
                Fan { apex, concurrent, transversal: t }
            })
        })
    }))
}

pub fn enumerate_fans(g: &IntersectionGraph, s: usize, limit: usize) -> Result<FanFamily, TriangleError> {
    Ok(FanFamily { s, fans: fans(g, s)?.take(limit).collect() })
}
