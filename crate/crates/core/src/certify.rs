//! Goodman-style monochromatic triangle counting, exact max-cut for small
//! graphs, and the quasi-Folkman certificate for `H_q`.

use std::fmt::Write as _;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::certificate::{rational, Certificate, Outcome};
use crate::graph::{bits, popcount_and, Graph};
use crate::intersection::formulas::vertices;
use crate::triangles::{formulas, TriangleFamily};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("tally sum {sum} and family size {family} differ in parity")]
    Parity { sum: u64, family: u64 },
    #[error("clique count gives {formula} monochromatic triangles, direct scan gives {direct}")]
    CrossCheck { formula: u64, direct: u64 },
    #[error("graph has {n} vertices, limit is {max}")]
    TooLarge { n: usize, max: usize },
    #[error("coloring has {got} edges, graph has {expected}")]
    ColoringSize { got: usize, expected: usize },
    #[error("coloring file: {0}")]
    Format(String),
    #[error("coloring was made for a different graph (checksum mismatch)")]
    Checksum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    Red,
    Blue,
}

/// Red/blue colouring of the edges of a graph, one bit per edge in canonical
/// edge order (bit set = blue).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring<'g> {
    graph: &'g Graph,
    bits: Vec<u64>,
}

impl<'g> EdgeColoring<'g> {
    pub fn monochrome(graph: &'g Graph, color: Color) -> Self {
        let m = graph.m();
        let mut c = EdgeColoring { graph, bits: vec![0; m.div_ceil(64)] };
        if color == Color::Blue {
            c.bits.fill(!0);
            c.mask_tail();
        }
        c
    }

    /// Each edge independently blue with probability 1/2.
    pub fn random(graph: &'g Graph, rng: &mut impl Rng) -> Self {
        let mut c = EdgeColoring { graph, bits: (0..graph.m().div_ceil(64)).map(|_| rng.random()).collect() };
        c.mask_tail();
        c
    }

    pub fn from_fn(graph: &'g Graph, mut f: impl FnMut(usize) -> Color) -> Self {
        let mut c = Self::monochrome(graph, Color::Red);
        for e in 0..graph.m() {
            c.set(e, f(e));
        }
        c
    }

    fn mask_tail(&mut self) {
        let m = self.graph.m();
        if !m.is_multiple_of(64) {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << (m % 64)) - 1;
            }
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.m()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.m() == 0
    }

    pub fn is_blue(&self, e: usize) -> bool {
        self.bits[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn get(&self, e: usize) -> Color {
        if self.is_blue(e) {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn set(&mut self, e: usize, color: Color) {
        match color {
            Color::Red => self.bits[e / 64] &= !(1 << (e % 64)),
            Color::Blue => self.bits[e / 64] |= 1 << (e % 64),
        }
    }

    pub fn flip(&mut self, e: usize) {
        self.bits[e / 64] ^= 1 << (e % 64);
    }

    pub fn blue_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn swapped(&self) -> Self {
        let mut c = self.clone();
        for w in &mut c.bits {
            *w = !*w;
        }
        c.mask_tail();
        c
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Packed bytes, edge `e` at bit `e % 8` of byte `e / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.graph.m();
        let mut out: Vec<u8> = self.bits.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(m.div_ceil(8));
        out
    }

    pub fn from_bytes(graph: &'g Graph, bytes: &[u8]) -> Result<Self, CertifyError> {
        let m = graph.m();
        if bytes.len() != m.div_ceil(8) {
            return Err(CertifyError::ColoringSize { got: bytes.len() * 8, expected: m });
        }
        let mut c = Self::monochrome(graph, Color::Red);
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            c.bits[i] = u64::from_le_bytes(word);
        }
        let before = c.bits.clone();
        c.mask_tail();
        if before != c.bits {
            return Err(CertifyError::Format("bits set beyond the last edge".into()));
        }
        Ok(c)
    }
}

/// Red/blue colouring of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexColoring {
    pub blue: Vec<bool>,
}

impl VertexColoring {
    /// Colour each neighbour of `v` by its edge to `v`.
    pub fn induced(coloring: &EdgeColoring<'_>, v: usize) -> (Vec<u32>, Self) {
        let g = coloring.graph();
        let blue = g.incident_edges(v).iter().map(|&e| coloring.is_blue(e as usize)).collect();
        (g.neighbors(v).to_vec(), VertexColoring { blue })
    }

    pub fn mono_edges(&self, g: &Graph) -> usize {
        g.edges().iter().filter(|&&(u, v)| self.blue[u as usize] == self.blue[v as usize]).count()
    }
}

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Per-vertex same-colour pair counts and the resulting monochromatic count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodmanTally {
    pub red: Vec<u64>,
    pub blue: Vec<u64>,
    pub family_size: u64,
    pub monochromatic: u64,
}

impl GoodmanTally {
    fn from_parts(red: Vec<u64>, blue: Vec<u64>, family_size: u64) -> Result<Self, CertifyError> {
        let sum: u64 = red.iter().chain(&blue).sum();
        if sum < family_size || !(sum - family_size).is_multiple_of(2) {
            return Err(CertifyError::Parity { sum, family: family_size });
        }
        Ok(GoodmanTally { red, blue, family_size, monochromatic: (sum - family_size) / 2 })
    }

    pub fn sum(&self) -> u64 {
        self.red.iter().chain(&self.blue).sum()
    }

    pub fn non_monochromatic(&self) -> u64 {
        self.family_size - self.monochromatic
    }
}

/// Monochromatic count over an explicit triangle list, straight from the
/// definition.
pub fn direct_mono(coloring: &EdgeColoring<'_>, triangles: impl IntoIterator<Item = [u32; 3]>) -> u64 {
    let g = coloring.graph();
    let id = |a: u32, b: u32| g.edge_id(a as usize, b as usize).expect("triangle edge");
    triangles
        .into_iter()
        .filter(|&[a, b, c]| {
            let x = coloring.is_blue(id(a, b));
            x == coloring.is_blue(id(a, c)) && x == coloring.is_blue(id(b, c))
        })
        .count() as u64
}

/// Goodman tally for an arbitrary explicit triangle family on any graph.
pub fn goodman_tally_explicit(
    coloring: &EdgeColoring<'_>,
    triangles: &[[u32; 3]],
) -> Result<GoodmanTally, CertifyError> {
    let g = coloring.graph();
    let n = g.n();
    let (mut red, mut blue) = (vec![0u64; n], vec![0u64; n]);
    let id = |a: u32, b: u32| g.edge_id(a as usize, b as usize).expect("triangle edge");
    for &[a, b, c] in triangles {
        for (v, x, y) in [(a, b, c), (b, a, c), (c, a, b)] {
            match (coloring.is_blue(id(v, x)), coloring.is_blue(id(v, y))) {
                (false, false) => red[v as usize] += 1,
                (true, true) => blue[v as usize] += 1,
                _ => {}
            }
        }
    }
    GoodmanTally::from_parts(red, blue, triangles.len() as u64)
}

/// Counts monochromatic non-degenerate triangles through the spanning
/// cliques of every `G_v`. When the family carries an explicit triangle list
/// the result is also checked against a direct scan.
pub fn goodman_count(fam: &TriangleFamily<'_>, coloring: &EdgeColoring<'_>) -> Result<GoodmanTally, CertifyError> {
    let g = fam.graph().graph();
    let n = g.n();
    let (red, blue): (Vec<u64>, Vec<u64>) = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0u8; n],
            |colour, v| {
                for (&w, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                    colour[w as usize] = u8::from(coloring.is_blue(e as usize));
                }
                let (mut r, mut b) = (0u64, 0u64);
                fam.for_each_spanning_clique(v, |_, members| {
                    let blues = members.iter().filter(|&&w| colour[w as usize] == 1).count() as u64;
                    r += pairs(members.len() as u64 - blues);
                    b += pairs(blues);
                });
                (r, b)
            },
        )
        .unzip();
    let tally = GoodmanTally::from_parts(red, blue, fam.total())?;
    if let Some(list) = fam.explicit() {
        let direct = direct_mono(coloring, list.iter().map(|t| t.vertices));
        if direct != tally.monochromatic {
            return Err(CertifyError::CrossCheck { formula: tally.monochromatic, direct });
        }
    }
    Ok(tally)
}

/// Graphs up to this order get a direct triangle scan as a cross-check.
pub const ALL_TRIANGLE_CHECK_MAX: usize = 300;

/// Monochromatic count over all triangles of any graph, via same-colour
/// edges inside each neighbourhood.
pub fn goodman_count_all_triangles(coloring: &EdgeColoring<'_>) -> Result<u64, CertifyError> {
    let g = coloring.graph();
    let n = g.n();
    let words = g.words();
    let mut red_rows = vec![0u64; n * words];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if !coloring.is_blue(e) {
            red_rows[u as usize * words + v as usize / 64] |= 1 << (v % 64);
            red_rows[v as usize * words + u as usize / 64] |= 1 << (u % 64);
        }
    }
    let red_row = |v: usize| &red_rows[v * words..(v + 1) * words];
    let mut blue_row = vec![0u64; words];
    let (mut same, mut nbhd) = (0u64, 0u64);
    for v in 0..n {
        for (b, (x, r)) in blue_row.iter_mut().zip(g.row(v).iter().zip(red_row(v))) {
            *b = x & !r;
        }
        for w in bits(red_row(v)) {
            same += popcount_and(g.row(w), red_row(v)) as u64;
        }
        for w in bits(&blue_row) {
            same += popcount_and(g.row(w), &blue_row) as u64;
        }
        for &w in g.neighbors(v) {
            nbhd += popcount_and(g.row(w as usize), g.row(v)) as u64;
        }
    }
    // ordered pairs: halve both
    let (same, nbhd) = (same / 2, nbhd / 2);
    let triangles = nbhd / 3;
    if same < triangles || (same - triangles) % 2 != 0 {
        return Err(CertifyError::Parity { sum: same, family: triangles });
    }
    let mono = (same - triangles) / 2;
    if n <= ALL_TRIANGLE_CHECK_MAX {
        let mut direct = 0u64;
        g.for_each_triangle(|a, b, c| direct += direct_mono(coloring, [[a, b, c]]));
        if direct != mono {
            return Err(CertifyError::CrossCheck { formula: mono, direct });
        }
    }
    Ok(mono)
}

pub const MAXCUT_EXHAUSTIVE_MAX: usize = 30;
pub const MAXCUT_BRANCH_MAX: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCut {
    pub size: u64,
    /// `true` for vertices on the second side.
    pub side: Vec<bool>,
}

impl MaxCut {
    pub fn min_mono_edges(&self, g: &Graph) -> u64 {
        g.m() as u64 - self.size
    }
}

fn masks(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| g.row(v)[0]).collect()
}

fn cut_of(adj: &[u64], set: u64) -> u64 {
    adj.iter().enumerate().filter(|(v, _)| set >> v & 1 == 0).map(|(_, a)| (a & set).count_ones() as u64).sum()
}

/// Gray-code walk over all bipartitions with the last vertex pinned.
fn maxcut_gray(adj: &[u64]) -> (u64, u64) {
    let n = adj.len();
    if n <= 1 {
        return (0, 0);
    }
    let (mut set, mut cut) = (0u64, 0i64);
    let (mut best, mut best_set) = (0i64, 0u64);
    for i in 1u64..1 << (n - 1) {
        let v = i.trailing_zeros() as usize;
        let same = if set >> v & 1 == 1 { adj[v] & set } else { adj[v] & !set };
        let other = adj[v] & !same;
        cut += same.count_ones() as i64 - other.count_ones() as i64;
        set ^= 1 << v;
        if cut > best {
            best = cut;
            best_set = set;
        }
    }
    (best as u64, best_set)
}

struct Branch<'a> {
    adj: &'a [u64],
    order: Vec<usize>,
    best: u64,
    best_set: u64,
}

impl Branch<'_> {
    /// `a`/`b`: assigned vertices per side; `depth`: how many of `order` are assigned.
    fn go(&mut self, depth: usize, a: u64, b: u64, cut: u64) {
        if depth == self.order.len() {
            if cut > self.best {
                self.best = cut;
                self.best_set = b;
            }
            return;
        }
        let assigned = a | b;
        let mut bound = cut;
        for &u in &self.order[depth..] {
            let adj = self.adj[u];
            bound += (adj & a).count_ones().max((adj & b).count_ones()) as u64;
            bound += (adj & !assigned & ((1u64 << u) - 1)).count_ones() as u64;
        }
        if bound <= self.best {
            return;
        }
        let v = self.order[depth];
        let adj = self.adj[v];
        let gain_a = (adj & b).count_ones() as u64;
        let gain_b = (adj & a).count_ones() as u64;
        // the first vertex is pinned to side A
        if gain_a >= gain_b || depth == 0 {
            self.go(depth + 1, a | 1 << v, b, cut + gain_a);
            if depth > 0 {
                self.go(depth + 1, a, b | 1 << v, cut + gain_b);
            }
        } else {
            self.go(depth + 1, a, b | 1 << v, cut + gain_b);
            self.go(depth + 1, a | 1 << v, b, cut + gain_a);
        }
    }
}

/// Exact maximum cut: exhaustive up to 30 vertices, branch and bound up to 60.
pub fn maxcut_exact(g: &Graph) -> Result<MaxCut, CertifyError> {
    let n = g.n();
    if n > MAXCUT_BRANCH_MAX {
        return Err(CertifyError::TooLarge { n, max: MAXCUT_BRANCH_MAX });
    }
    let adj = masks(g);
    let (size, set) = if n <= MAXCUT_EXHAUSTIVE_MAX {
        maxcut_gray(&adj)
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
        let mut b = Branch { adj: &adj, order, best: 0, best_set: 0 };
        // warm start from a local optimum
        let mut set = 0u64;
        loop {
            let improved = (0..n).find(|&v| {
                let same = if set >> v & 1 == 1 { adj[v] & set } else { adj[v] & !set };
                same.count_ones() > (adj[v] & !same).count_ones()
            });
            match improved {
                Some(v) => set ^= 1 << v,
                None => break,
            }
        }
        b.best = cut_of(&adj, set);
        b.best_set = set;
        b.go(0, 0, 0, 0);
        (b.best, b.best_set)
    };
    debug_assert_eq!(cut_of(&adj, set), size);
    Ok(MaxCut { size, side: (0..n).map(|v| set >> v & 1 == 1).collect() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueMinMono {
    /// Least number of monochromatic edges over vertex 2-colourings of `K_{q+1}`.
    pub integer: u64,
    /// `(q+1)^2/4 - (q+1)/2`, the real relaxation.
    pub real: Ratio<i64>,
}

pub fn clique_min_mono(q: u64) -> CliqueMinMono {
    let k = q + 1;
    let integer = pairs(k.div_ceil(2)) + pairs(k / 2);
    let k = k as i64;
    CliqueMinMono { integer, real: Ratio::new(k * k, 4) - Ratio::new(k, 2) }
}

/// `L(q) = (n (q^3-q) c - |T_q|) / 2` with `c` the integer clique minimum.
pub fn theorem1_bound(q: u64) -> Ratio<i128> {
    let n = vertices(q) as i128;
    let per_vertex = (q.pow(3) - q) as i128;
    let c = clique_min_mono(q).integer as i128;
    Ratio::new(n * per_vertex * c - formulas::total(q) as i128, 2)
}

/// Same bound with the real-valued clique minimum.
pub fn theorem1_bound_real(q: u64) -> Ratio<i128> {
    let n = vertices(q) as i128;
    let per_vertex = (q.pow(3) - q) as i128;
    let r = clique_min_mono(q).real;
    let r = Ratio::new(*r.numer() as i128, *r.denom() as i128);
    (r * (n * per_vertex) - Ratio::from_integer(formulas::total(q) as i128)) / 2
}

pub fn theorem1_fraction(q: u64) -> Ratio<i128> {
    theorem1_bound(q) / formulas::total(q) as i128
}

pub fn theorem1_certificate(q: u64) -> Certificate {
    let bound = theorem1_bound(q);
    let total = formulas::total(q);
    let cmm = clique_min_mono(q);
    let k = q as i64 + 1;
    let lhs = Ratio::new(k * k, 4) - Ratio::new(k, 2);
    let rhs = Ratio::new(k * q as i64, 6);
    let zero = Ratio::from_integer(0);
    let cert = Certificate::new("quasi-folkman-lower-bound")
        .param("q", q)
        .quantity("vertices", vertices(q))
        .quantity("spanning_cliques_per_vertex", q.pow(3) - q)
        .quantity("family_size", total)
        .quantity("clique_min_mono", cmm.integer)
        .quantity("clique_min_mono_real", rational(&cmm.real))
        .quantity("bound_real", rational(&theorem1_bound_real(q)))
        .quantity("fraction", rational(&theorem1_fraction(q)))
        .quantity("fraction_limit", "1/4")
        .quantity("convexity_lhs", rational(&lhs))
        .quantity("average_rhs", rational(&rhs))
        .quantity("convexity_exceeds_average", lhs > rhs)
        .margin(rational(&bound));
    if bound > zero {
        cert.outcome(Outcome::Pass)
    } else if bound == zero {
        cert.note("bound is zero: counting cannot decide this q").outcome(Outcome::Inconclusive)
    } else {
        cert.outcome(Outcome::Fail)
    }
}

/// Exact monochromatic count of a supplied colouring, compared with `L(q)`.
pub fn adversarial_color_check(
    fam: &TriangleFamily<'_>,
    coloring: &EdgeColoring<'_>,
) -> Result<Certificate, CertifyError> {
    let q = fam.q() as u64;
    let tally = goodman_count(fam, coloring)?;
    let bound = theorem1_bound(q);
    let count = Ratio::from_integer(tally.monochromatic as i128);
    let cert = Certificate::new("coloring-meets-bound")
        .param("q", q)
        .quantity("monochromatic", tally.monochromatic)
        .quantity("family_size", tally.family_size)
        .quantity("blue_edges", coloring.blue_count() as u64)
        .quantity("bound", rational(&bound))
        .quantity("fraction", rational(&Ratio::new(tally.monochromatic as i128, tally.family_size as i128)))
        .margin(rational(&(count - bound)));
    Ok(if count >= bound { cert.outcome(Outcome::Pass) } else { cert.outcome(Outcome::Fail) })
}

pub const COLORING_HEADER: &str = "# hq-coloring v1";

pub fn graph_checksum(g: &Graph) -> String {
    hex::encode(Sha256::digest(g.to_edge_list().as_bytes()))
}

pub fn write_coloring(q: u32, coloring: &EdgeColoring<'_>) -> String {
    let g = coloring.graph();
    let mut out = String::new();
    writeln!(out, "{COLORING_HEADER}").unwrap();
    writeln!(out, "q {q} {}", g.n()).unwrap();
    writeln!(out, "edges {}", g.m()).unwrap();
    writeln!(out, "graph-sha256 {}", graph_checksum(g)).unwrap();
    writeln!(out, "bits {}", hex::encode(coloring.to_bytes())).unwrap();
    out
}

/// Parses a colouring file for `g`; returns the `q` it names.
pub fn read_coloring<'g>(text: &str, g: &'g Graph) -> Result<(u32, EdgeColoring<'g>), CertifyError> {
    let bad = |msg: &str| CertifyError::Format(msg.to_string());
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(COLORING_HEADER) {
        return Err(bad("missing header"));
    }
    let mut field = |key: &str| -> Result<Vec<String>, CertifyError> {
        let line = lines.next().ok_or_else(|| bad(&format!("missing `{key}` line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(&format!("expected `{key}` line")));
        }
        Ok(parts.map(str::to_string).collect())
    };
    let num = |s: Option<&String>| -> Result<usize, CertifyError> {
        s.ok_or_else(|| bad("missing number"))?.parse().map_err(|_| bad("bad number"))
    };
    let qline = field("q")?;
    let q = num(qline.first())? as u32;
    if num(qline.get(1))? != g.n() {
        return Err(bad("vertex count does not match the graph"));
    }
    let m = num(field("edges")?.first())?;
    if m != g.m() {
        return Err(CertifyError::ColoringSize { got: m, expected: g.m() });
    }
    let sum = field("graph-sha256")?;
    if sum.first().map(String::as_str) != Some(graph_checksum(g).as_str()) {
        return Err(CertifyError::Checksum);
    }
    let hex_bits = field("bits")?;
    let bytes = hex::decode(hex_bits.first().map(String::as_str).unwrap_or("")).map_err(|e| bad(&e.to_string()))?;
    Ok((q, EdgeColoring::from_bytes(g, &bytes)?))
}

/// Uniform random colouring from a seed and a stream index.
pub fn seeded_coloring(g: &Graph, seed: u64, stream: u64) -> EdgeColoring<'_> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    EdgeColoring::random(g, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::IntersectionGraph;

    #[test]
    fn clique_minimum_small_q() {
        assert_eq!(clique_min_mono(3), CliqueMinMono { integer: 2, real: Ratio::from_integer(2) });
        assert_eq!(clique_min_mono(4), CliqueMinMono { integer: 4, real: Ratio::new(15, 4) });
        assert_eq!(clique_min_mono(5).integer, 6);
        for q in 2..12u64 {
            let brute = (0..=q + 1).map(|a| pairs(a) + pairs(q + 1 - a)).min().unwrap();
            assert_eq!(clique_min_mono(q).integer, brute);
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(theorem1_bound(4), Ratio::from_integer(4160));
        assert_eq!(theorem1_bound(3), Ratio::from_integer(0));
        assert_eq!(theorem1_bound(2), Ratio::from_integer(0));
        assert_eq!(theorem1_fraction(4), Ratio::new(1, 10));
        assert_eq!(theorem1_certificate(3).outcome, Outcome::Inconclusive);
        assert_eq!(theorem1_certificate(4).outcome, Outcome::Pass);
        assert_eq!(theorem1_certificate(5).outcome, Outcome::Pass);
        assert_eq!(theorem1_bound_real(3), Ratio::from_integer(0));
        // real bound at q=4: (208*60*15/4 - 41600)/2 = 2600
        assert_eq!(theorem1_bound_real(4), Ratio::from_integer(2600));
    }

    #[test]
    fn maxcut_small() {
        let c5 = Graph::cycle(5);
        let mc = maxcut_exact(&c5).unwrap();
        assert_eq!(mc.size, 4);
        assert_eq!(mc.min_mono_edges(&c5), 1);
        let k5 = Graph::complete(5);
        assert_eq!(maxcut_exact(&k5).unwrap().size, 6);
        assert_eq!(maxcut_exact(&Graph::petersen()).unwrap().size, 12);
        assert_eq!(maxcut_exact(&Graph::path(4)).unwrap().size, 3);
        assert_eq!(maxcut_exact(&Graph::empty(0)).unwrap().size, 0);
        assert!(matches!(maxcut_exact(&Graph::empty(61)), Err(CertifyError::TooLarge { .. })));
    }

    #[test]
    fn branch_and_bound_agrees_with_exhaustive() {
        // 31..40 vertices take the branch-and-bound path; compare with a
        // disjoint union whose max cut is additive.
        let c5 = Graph::cycle(5);
        let pet = Graph::petersen();
        let mut edges = Vec::new();
        let mut offset = 0u32;
        for part in [&pet, &c5, &pet, &c5, &Graph::complete(4)] {
            edges.extend(part.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
            offset += part.n() as u32;
        }
        let g = Graph::from_edges(offset as usize, edges).unwrap();
        assert!(g.n() > MAXCUT_EXHAUSTIVE_MAX);
        assert_eq!(maxcut_exact(&g).unwrap().size, 12 + 4 + 12 + 4 + 4);
    }

    #[test]
    fn k3_single_family() {
        let k3 = Graph::complete(3);
        let mut c = EdgeColoring::monochrome(&k3, Color::Red);
        c.set(0, Color::Blue);
        let t = goodman_tally_explicit(&c, &[[0, 1, 2]]).unwrap();
        assert_eq!(t.sum(), 1);
        assert_eq!(t.monochromatic, 0);
        let red = EdgeColoring::monochrome(&k3, Color::Red);
        assert_eq!(goodman_tally_explicit(&red, &[[0, 1, 2]]).unwrap().monochromatic, 1);
    }

    #[test]
    fn all_triangle_variant_on_k4() {
        let k4 = Graph::complete(4);
        for mask in 0u32..64 {
            let c = EdgeColoring::from_fn(&k4, |e| if mask >> e & 1 == 1 { Color::Blue } else { Color::Red });
            let mut direct = 0;
            k4.for_each_triangle(|a, b, cc| direct += direct_mono(&c, [[a, b, cc]]));
            assert_eq!(goodman_count_all_triangles(&c).unwrap(), direct);
        }
        let red = EdgeColoring::monochrome(&k4, Color::Red);
        assert_eq!(goodman_count_all_triangles(&red).unwrap(), 4);
        let c8 = Graph::cycle(8);
        assert_eq!(goodman_count_all_triangles(&seeded_coloring(&c8, 1, 0)).unwrap(), 0);
    }

    #[test]
    fn family_count_matches_direct_q3() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let red = EdgeColoring::monochrome(g.graph(), Color::Red);
        assert_eq!(goodman_count(&fam, &red).unwrap().monochromatic, 3024);
        for s in 0..20 {
            let c = seeded_coloring(g.graph(), 42, s);
            let t = goodman_count(&fam, &c).unwrap();
            let mono = t.monochromatic;
            // 3 mono + nonmono = sum, mono + nonmono = |T|
            assert_eq!(3 * mono + t.non_monochromatic(), t.sum());
            assert_eq!(goodman_count(&fam, &c.swapped()).unwrap().monochromatic, mono);
            for v in 0..g.n() {
                assert!(t.red[v] + t.blue[v] >= 24 * 2);
            }
        }
    }

    #[test]
    fn coloring_file_round_trip() {
        let g = IntersectionGraph::new(2).unwrap();
        let c = seeded_coloring(g.graph(), 3, 0);
        let text = write_coloring(2, &c);
        let (q, back) = read_coloring(&text, g.graph()).unwrap();
        assert_eq!(q, 2);
        assert_eq!(back, c);
        let other = Graph::cycle(g.graph().m());
        assert!(read_coloring(&text, &other).is_err());
        let tampered = text.replace("graph-sha256 ", "graph-sha256 00");
        assert!(matches!(read_coloring(&tampered, g.graph()), Err(CertifyError::Checksum)));
        assert!(read_coloring("hello", g.graph()).is_err());
    }

    #[test]
    fn adversarial_all_red_q3() {
        let g = IntersectionGraph::new(3).unwrap();
        let fam = TriangleFamily::build(&g).unwrap();
        let red = EdgeColoring::monochrome(g.graph(), Color::Red);
        let cert = adversarial_color_check(&fam, &red).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.quantities["monochromatic"], 3024);
    }
}
