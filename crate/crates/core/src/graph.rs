//! Simple undirected graphs with dense bit-matrix adjacency.
//!
//! Edges carry ids in canonical order: lexicographic on `(u, v)` with `u < v`.
//! Edge colorings and every exported artifact rely on that order.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge ({0}, {1}) out of range for {2} vertices")]
    OutOfRange(u32, u32, usize),
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed graph6 string: {0}")]
    Graph6(String),
}

/// Iterates the set bit positions of a word slice.
pub fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + b)
        })
    })
}

#[inline]
pub fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    nbrs: Vec<Vec<u32>>,
    /// Edge id of `(v, nbrs[v][i])`, aligned with `nbrs`.
    incident: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph::from_edges(n, std::iter::empty()).expect("no edges")
    }

    /// Builds a graph from an arbitrary edge iterator. Orientation and
    /// duplicates are normalised away.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![0u64; n * words];
        for (a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::OutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            adj[a as usize * words + b as usize / 64] |= 1 << (b % 64);
            adj[b as usize * words + a as usize / 64] |= 1 << (a % 64);
        }
        Ok(Self::from_adjacency(n, words, adj))
    }

    fn from_adjacency(n: usize, words: usize, adj: Vec<u64>) -> Self {
        let nbrs: Vec<Vec<u32>> =
            (0..n).map(|v| bits(&adj[v * words..(v + 1) * words]).map(|x| x as u32).collect()).collect();
        let mut edges = Vec::new();
        for (u, list) in nbrs.iter().enumerate() {
            for &v in list.iter().filter(|&&v| v as usize > u) {
                edges.push((u as u32, v));
            }
        }
        // Neighbours below v precede those above it in the sorted list, and
        // edge ids ascend with the lower endpoint, so this keeps `incident`
        // aligned with `nbrs`.
        let mut incident: Vec<Vec<u32>> = nbrs.iter().map(|l| Vec::with_capacity(l.len())).collect();
        for (id, &(_, v)) in edges.iter().enumerate() {
            incident[v as usize].push(id as u32);
        }
        for (id, &(u, _)) in edges.iter().enumerate() {
            incident[u as usize].push(id as u32);
        }
        Graph { n, words, adj, nbrs, incident, edges }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Words per adjacency row.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbrs[v]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    #[inline]
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.incident[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: usize) -> (u32, u32) {
        self.edges[id]
    }

    #[inline]
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let pos = self.nbrs[u].binary_search(&(v as u32)).ok()?;
        Some(self.incident[u][pos] as usize)
    }

    #[inline]
    pub fn common_neighbors(&self, u: usize, v: usize) -> u32 {
        popcount_and(self.row(u), self.row(v))
    }

    /// Subgraph on the same vertex set keeping edges whose id satisfies `keep`.
    pub fn edge_subgraph(&self, mut keep: impl FnMut(usize) -> bool) -> Graph {
        let kept: Vec<(u32, u32)> = (0..self.m()).filter(|&e| keep(e)).map(|e| self.edges[e]).collect();
        Graph::from_edges(self.n, kept).expect("subgraph of a valid graph")
    }

    /// Triangles `a < b < c`, each reported once.
    pub fn for_each_triangle(&self, mut visit: impl FnMut(u32, u32, u32)) {
        let mut buf = vec![0u64; self.words];
        for &(a, b) in &self.edges {
            for (w, (x, y)) in buf.iter_mut().zip(self.row(a as usize).iter().zip(self.row(b as usize))) {
                *w = x & y;
            }
            for c in bits(&buf).filter(|&c| c > b as usize) {
                visit(a, b, c as u32);
            }
        }
    }

    pub fn triangle_count(&self) -> u64 {
        let mut count = 0;
        self.for_each_triangle(|_, _, _| count += 1);
        count
    }

    /// Every K4 `a < b < c < d` exactly once. Candidates for the last two
    /// vertices come from the common neighbourhood of the first edge.
    /// Returning `false` from `visit` stops the scan early.
    pub fn for_each_k4(&self, mut visit: impl FnMut([u32; 4]) -> bool) -> bool {
        let mut common = vec![0u64; self.words];
        for &(a, b) in &self.edges {
            let mut any = 0u64;
            for (w, (x, y)) in common.iter_mut().zip(self.row(a as usize).iter().zip(self.row(b as usize))) {
                *w = x & y;
                any |= *w;
            }
            if any == 0 {
                continue;
            }
            for c in bits(&common).filter(|&c| c > b as usize) {
                let rc = self.row(c);
                for (wi, (&cw, &rw)) in common.iter().zip(rc).enumerate() {
                    let mut w = cw & rw;
                    while w != 0 {
                        let d = wi * 64 + w.trailing_zeros() as usize;
                        w &= w - 1;
                        if d > c && !visit([a, b, c as u32, d as u32]) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn k4_count(&self) -> u64 {
        let mut count = 0;
        self.for_each_k4(|_| {
            count += 1;
            true
        });
        count
    }

    pub fn find_k4(&self) -> Option<[u32; 4]> {
        let mut found = None;
        self.for_each_k4(|k| {
            found = Some(k);
            false
        });
        found
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edges.iter().all(|&(a, b)| popcount_and(self.row(a as usize), self.row(b as usize)) == 0)
    }

    /// `# vertices N` header, then one `u v` line per edge with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.m() * 10 + 16);
        writeln!(out, "# vertices {}", self.n).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses `u v` lines. `#` starts a comment; a `# vertices N` comment
    /// fixes the vertex count, otherwise it is one more than the largest id.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let mut it = comment.split_whitespace();
                if it.next() == Some("vertices") {
                    let n = it
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| GraphError::Parse { line: i + 1, msg: "bad vertex count".into() })?;
                    declared = Some(n);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(GraphError::Parse { line: i + 1, msg: format!("expected `u v`, got {line:?}") });
            }
            let parse = |s: &str| s.parse::<u32>().map_err(|e| GraphError::Parse { line: i + 1, msg: e.to_string() });
            edges.push((parse(parts[0])?, parse(parts[1])?));
        }
        let n = declared.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0));
        Graph::from_edges(n, edges)
    }

    /// Standard graph6 encoding (upper triangle, column-major).
    pub fn to_graph6(&self) -> String {
        let mut out = Vec::new();
        let n = self.n as u64;
        if n <= 62 {
            out.push(n as u8 + 63);
        } else if n <= 258_047 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.extend([126, 126]);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | u8::from(self.has_edge(i, j));
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).expect("graph6 is printable ascii")
    }

    pub fn from_graph6(s: &str) -> Result<Self, GraphError> {
        let s = s.trim();
        let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
        let data: Vec<u8> = s.bytes().collect();
        if data.iter().any(|&c| !(63..=126).contains(&c)) {
            return Err(GraphError::Graph6("byte outside 63..=126".into()));
        }
        let (n, body) = match data.as_slice() {
            [126, 126, rest @ ..] if rest.len() >= 6 => {
                (rest[..6].iter().fold(0usize, |a, &c| (a << 6) | (c - 63) as usize), &rest[6..])
            }
            [126, rest @ ..] if rest.len() >= 3 => {
                (rest[..3].iter().fold(0usize, |a, &c| (a << 6) | (c - 63) as usize), &rest[3..])
            }
            [c, rest @ ..] if *c != 126 => ((c - 63) as usize, rest),
            _ => return Err(GraphError::Graph6("truncated size header".into())),
        };
        let needed = (n * n.saturating_sub(1) / 2).div_ceil(6);
        if body.len() != needed {
            return Err(GraphError::Graph6(format!("expected {needed} data bytes, got {}", body.len())));
        }
        let mut edges = Vec::new();
        let mut k = 0usize;
        for j in 1..n {
            for i in 0..j {
                let byte = body[k / 6] - 63;
                if byte >> (5 - k % 6) & 1 == 1 {
                    edges.push((i as u32, j as u32));
                }
                k += 1;
            }
        }
        Graph::from_edges(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        Graph::from_edges(n, (0..n).map(|i| (i as u32, ((i + 1) % n) as u32))).expect("cycle")
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i as u32 - 1, i as u32))).expect("path")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b)));
        Graph::from_edges(n, edges).expect("complete graph")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, edges).expect("petersen")
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_edge_order_and_ids() {
        let g = Graph::from_edges(4, [(3, 1), (0, 2), (2, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2), (1, 3)]);
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            assert_eq!(g.edge_id(u as usize, v as usize), Some(id));
            assert_eq!(g.edge_id(v as usize, u as usize), Some(id));
        }
        assert_eq!(g.edge_id(0, 3), None);
        for v in 0..4 {
            for (i, &w) in g.neighbors(v).iter().enumerate() {
                assert_eq!(g.edge_id(v, w as usize), Some(g.incident_edges(v)[i] as usize));
            }
        }
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]).unwrap_err(), GraphError::SelfLoop(1));
        assert_eq!(Graph::from_edges(3, [(0, 3)]).unwrap_err(), GraphError::OutOfRange(0, 3, 3));
    }

    #[test]
    fn small_counts() {
        assert_eq!(Graph::complete(4).triangle_count(), 4);
        assert_eq!(Graph::complete(5).k4_count(), 5);
        assert_eq!(Graph::complete(6).k4_count(), 15);
        assert!(Graph::cycle(5).is_triangle_free());
        assert!(Graph::petersen().is_triangle_free());
        assert_eq!(Graph::petersen().m(), 15);
        assert!(Graph::complete(4).find_k4().is_some());
        assert!(Graph::cycle(4).find_k4().is_none());
    }

    // Reference strings produced by networkx.to_graph6_bytes(header=False).
    #[test]
    fn graph6_known_strings() {
        assert_eq!(Graph::cycle(5).to_graph6(), "Dhc");
        assert_eq!(Graph::complete(4).to_graph6(), "C~");
        assert_eq!(Graph::petersen().to_graph6(), "IheA@GUAo");
        assert_eq!(Graph::path(70).to_graph6().len(), 4 + (70 * 69 / 2usize).div_ceil(6));
    }

    #[test]
    fn graph6_rejects_garbage() {
        assert!(Graph::from_graph6("D\n!").is_err());
        assert!(Graph::from_graph6("Dh").is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::from_edge_list("# vertices 6\n0 1\n\n1 2 \n# comment\n").unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.m(), 2);
        let g = Graph::from_edge_list("0 4\n").unwrap();
        assert_eq!(g.n(), 5);
        assert!(matches!(Graph::from_edge_list("0 x\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(Graph::from_edge_list("0 1 2\n"), Err(GraphError::Parse { .. })));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..90).prop_flat_map(|n| {
            proptest::collection::vec((0..n as u32, 0..n as u32), 0..300)
                .prop_map(move |pairs| Graph::from_edges(n, pairs.into_iter().filter(|(a, b)| a != b)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn serialisations_round_trip(g in arb_graph()) {
            prop_assert_eq!(&Graph::from_graph6(&g.to_graph6()).unwrap(), &g);
            prop_assert_eq!(&Graph::from_edge_list(&g.to_edge_list()).unwrap(), &g);
        }

        #[test]
        fn triangle_and_k4_counts_match_brute_force(g in arb_graph()) {
            let n = g.n().min(30);
            let sub = Graph::from_edges(n, g.edges().iter().copied()
                .filter(|&(a, b)| (a as usize) < n && (b as usize) < n)).unwrap();
            let mut tri = 0u64;
            let mut k4 = 0u64;
            for a in 0..n { for b in a+1..n { if !sub.has_edge(a, b) { continue; }
                for c in b+1..n { if !(sub.has_edge(a, c) && sub.has_edge(b, c)) { continue; }
                    tri += 1;
                    for d in c+1..n {
                        if sub.has_edge(a, d) && sub.has_edge(b, d) && sub.has_edge(c, d) { k4 += 1; }
                    }
                }
            }}
            prop_assert_eq!(sub.triangle_count(), tri);
            prop_assert_eq!(sub.k4_count(), k4);
        }
    }
}
