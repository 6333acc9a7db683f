//! Simple undirected graphs on dense vertex ids, their text formats, and
//! the connectivity primitives everything else is built from.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite simple undirected graph on vertices `0..n`.
///
/// Neighbour lists are kept sorted and symmetric; the graph is immutable
/// once built.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list, dropping duplicate edges.
    ///
    /// Loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge {u}-{v} has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph { adj })
    }

    /// Same as [`Graph::from_edges`] for edge lists known to be valid.
    ///
    /// # Panics
    /// On loops or out-of-range endpoints.
    pub fn from_edges_unchecked(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::from_edges(n, edges).expect("invalid edge list")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n(), "permutation length mismatch");
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (perm[u], perm[v]))
            .collect();
        Graph::from_edges_unchecked(self.n(), &edges)
    }

    /// Induced subgraph on `vertices`; local vertex `i` is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if local[w] != usize::MAX {
                    adj[i].push(local[w]);
                }
            }
            adj[i].sort_unstable();
        }
        Graph { adj }
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let mut adj = self.adj.clone();
        adj.extend(
            other
                .adj
                .iter()
                .map(|l| l.iter().map(|&w| w + shift).collect::<Vec<_>>()),
        );
        Graph { adj }
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || component_labels(self, &vec![false; self.n()]).1 == 1
    }
}

/// Labels the components of `g` with the vertices flagged in `removed`
/// deleted. Removed vertices get `usize::MAX`. Returns the labels and the
/// number of components; labels follow the order of the smallest vertex.
pub fn component_labels(g: &Graph, removed: &[bool]) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if removed[s] || label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in g.neighbours(v) {
                if !removed[w] && label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Vertex sets of the connected components, each sorted, ordered by their
/// smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    components_avoiding(g, &[])
}

/// Components of `g` minus `removed`, in the same form as
/// [`connected_components`].
pub fn components_avoiding(g: &Graph, removed: &[usize]) -> Vec<Vec<usize>> {
    let mut mask = vec![false; g.n()];
    for &v in removed {
        mask[v] = true;
    }
    let (label, count) = component_labels(g, &mask);
    let mut out = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        if l != usize::MAX {
            out[l].push(v);
        }
    }
    out
}

/// Whether at least two components of `g - s` meet `x - s`.
///
/// When `s` covers `x` no component meets `x`, so the answer is `false`.
pub fn separates(g: &Graph, s: &[usize], x: &[usize]) -> bool {
    let mut mask = vec![false; g.n()];
    for &v in s {
        mask[v] = true;
    }
    let (label, _) = component_labels(g, &mask);
    let mut seen: Option<usize> = None;
    for &v in x {
        if mask[v] {
            continue;
        }
        match seen {
            None => seen = Some(label[v]),
            Some(l) if l != label[v] => return true,
            _ => {}
        }
    }
    false
}

/// `k`-connectivity for `k` in `1..=3`: `|G| > k` and no set of at most
/// `k - 1` vertices disconnects the graph. Cut sets are enumerated
/// exhaustively.
pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let n = g.n();
    if n <= k {
        return false;
    }
    let mut mask = vec![false; n];
    let disconnected = |mask: &[bool]| component_labels(g, mask).1 > 1;
    if disconnected(&mask) {
        return false;
    }
    if k >= 2 {
        for a in 0..n {
            mask[a] = true;
            if disconnected(&mask) {
                return false;
            }
            if k == 3 {
                for b in a + 1..n {
                    mask[b] = true;
                    let cut = disconnected(&mask);
                    mask[b] = false;
                    if cut {
                        return false;
                    }
                }
            }
            mask[a] = false;
        }
    }
    true
}

/// Biconnected components as edge lists (each edge `(u, v)` with `u < v`),
/// together with the articulation points. Isolated vertices belong to no
/// component. Iterative, so deep graphs do not exhaust the stack.
pub fn biconnected_components(g: &Graph) -> (Vec<Vec<(usize, usize)>>, Vec<usize>) {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut comps = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbour position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut pos)) = stack.last_mut() {
            if *pos < g.degree(v) {
                let w = g.neighbours(v)[*pos];
                *pos += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] >= disc[parent] {
                        if parent != root {
                            is_cut[parent] = true;
                        }
                        let mut comp = Vec::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            comp.push((a.min(b), a.max(b)));
                            if (a, b) == (parent, v) {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    let cuts = (0..n).filter(|&v| is_cut[v]).collect();
    (comps, cuts)
}

/// 3-connectivity via articulation points of every one-vertex-deleted
/// subgraph; `O(n (n + m))`.
pub fn is_triconnected(g: &Graph) -> bool {
    let n = g.n();
    if n <= 3 || !g.is_connected() {
        return false;
    }
    if !biconnected_components(g).1.is_empty() {
        return false;
    }
    for a in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&v| v != a).collect();
        let h = g.induced(&rest);
        if !h.is_connected() || !biconnected_components(&h).1.is_empty() {
            return false;
        }
    }
    true
}

/// Equalities and adjacencies realised by an ordered vertex tuple. Index
/// pairs are 1-based and stored with `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType {
    pub k: usize,
    pub equalities: BTreeSet<(usize, usize)>,
    pub adjacencies: BTreeSet<(usize, usize)>,
}

impl AtomicType {
    /// Packs the type into an integer: two bits per index pair, in
    /// lexicographic pair order. Injective for a fixed `k`.
    pub fn code(&self) -> u64 {
        let mut code = 0u64;
        let mut bit = 0;
        for i in 1..=self.k {
            for j in i + 1..=self.k {
                if self.equalities.contains(&(i, j)) {
                    code |= 1 << bit;
                }
                if self.adjacencies.contains(&(i, j)) {
                    code |= 1 << (bit + 1);
                }
                bit += 2;
            }
        }
        code
    }
}

pub fn atomic_type(g: &Graph, tuple: &[usize]) -> AtomicType {
    let mut equalities = BTreeSet::new();
    let mut adjacencies = BTreeSet::new();
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] == tuple[j] {
                equalities.insert((i + 1, j + 1));
            } else if g.has_edge(tuple[i], tuple[j]) {
                adjacencies.insert((i + 1, j + 1));
            }
        }
    }
    AtomicType {
        k: tuple.len(),
        equalities,
        adjacencies,
    }
}

/// Supported text encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// First line `n`, then one `u v` line per edge; `#` starts a comment.
    EdgeList,
    /// The standard 6-bit printable encoding, optional `>>graph6<<` header.
    Graph6,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" | "edgelist" => Ok(Format::EdgeList),
            "graph6" | "g6" => Ok(Format::Graph6),
            other => Err(Error::Precondition(format!("unknown format `{other}`"))),
        }
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<Graph> {
    match format {
        Format::EdgeList => parse_edge_list(text),
        Format::Graph6 => parse_graph6(text),
    }
}

pub fn serialize_graph(g: &Graph, format: Format) -> String {
    match format {
        Format::EdgeList => {
            let mut out = format!("{}\n", g.n());
            for (u, v) in g.edges() {
                out.push_str(&format!("{u} {v}\n"));
            }
            out
        }
        Format::Graph6 => {
            let mut out = encode_graph6(g);
            out.push('\n');
            out
        }
    }
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 1 {
                    return Err(Error::parse(line_no, "expected vertex count"));
                }
                n = Some(
                    fields[0]
                        .parse()
                        .map_err(|_| Error::parse(line_no, "vertex count is not an integer"))?,
                );
            }
            Some(count) => {
                if fields.len() != 2 {
                    return Err(Error::parse(line_no, "expected `u v`"));
                }
                let mut ends = [0usize; 2];
                for (slot, f) in ends.iter_mut().zip(&fields) {
                    *slot = f
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("`{f}` is not a vertex id")))?;
                    if *slot >= count {
                        return Err(Error::parse(
                            line_no,
                            format!("vertex {} out of range 0..{count}", *slot),
                        ));
                    }
                }
                if ends[0] == ends[1] {
                    return Err(Error::Validation(format!(
                        "loop at vertex {} on line {line_no}",
                        ends[0]
                    )));
                }
                edges.push((ends[0], ends[1]));
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, "missing vertex count"))?;
    Graph::from_edges(n, &edges)
}

fn parse_graph6(text: &str) -> Result<Graph> {
    let (line_no, line) = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| Error::parse(1, "empty graph6 input"))?;
    let body = line.strip_prefix(">>graph6<<").unwrap_or(line).as_bytes();
    if body.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(Error::parse(line_no, "byte outside the graph6 range 63..=126"));
    }
    let (n, rest) = match body {
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(Error::parse(line_no, "truncated 36-bit size"));
            }
            (sextets_to_int(&rest[..6]), &rest[6..])
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Error::parse(line_no, "truncated 18-bit size"));
            }
            (sextets_to_int(&rest[..3]), &rest[3..])
        }
        [b, rest @ ..] => ((*b - 63) as usize, rest),
        [] => return Err(Error::parse(line_no, "missing size")),
    };
    let bits = n * n.saturating_sub(1) / 2;
    if rest.len() != bits.div_ceil(6) {
        return Err(Error::parse(
            line_no,
            format!("expected {} data bytes for n={n}, got {}", bits.div_ceil(6), rest.len()),
        ));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = rest[k / 6] - 63;
            if byte & (1 << (5 - k % 6)) != 0 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

fn sextets_to_int(bytes: &[u8]) -> usize {
    bytes
        .iter()
        .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize)
}

fn encode_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
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
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
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
    String::from_utf8(out).expect("graph6 output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges_unchecked(n, &edges)
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges_unchecked(n, &edges)
    }

    #[test]
    fn parses_edge_list_path() {
        let g = parse_graph("3\n0 1\n1 2", Format::EdgeList).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_list_comments_and_duplicates() {
        let g = parse_graph("# header\n3 # n\n0 1\n1 0\n\n2 1\n", Format::EdgeList).unwrap();
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn loop_is_validation_error() {
        let err = parse_graph("2\n0 0", Format::EdgeList).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err:?}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_graph("3\n0 1\n1 x\n", Format::EdgeList).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_graph("3\n0 1 2\n", Format::EdgeList).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_graph("3\n0 7\n", Format::EdgeList).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn graph6_k4() {
        let k4 = parse_graph("C~", Format::Graph6).unwrap();
        assert_eq!(k4.n(), 4);
        assert_eq!(k4.m(), 6);
        assert_eq!(encode_graph6(&complete(4)), "C~");
        let with_header = parse_graph(">>graph6<<C~\n", Format::Graph6).unwrap();
        assert_eq!(with_header, k4);
    }

    #[test]
    fn graph6_reference_strings() {
        // P3 with edges 01, 12: bits x(0,1)=1, x(0,2)=0, x(1,2)=1 -> 101000.
        assert_eq!(encode_graph6(&Graph::from_edges_unchecked(3, &[(0, 1), (1, 2)])), "Bg");
        assert_eq!(encode_graph6(&Graph::empty(0)), "?");
        assert_eq!(encode_graph6(&Graph::empty(1)), "@");
        // C5 as produced by `geng`-style encoders.
        assert_eq!(encode_graph6(&cycle(5)), "Dhc");
    }

    #[test]
    fn graph6_large_size_header() {
        let g = cycle(100);
        let s = encode_graph6(&g);
        assert_eq!(s.as_bytes()[0], 126);
        assert_eq!(parse_graph(&s, Format::Graph6).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_bad_length() {
        assert!(matches!(
            parse_graph("C~~", Format::Graph6),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn serializes_small_graphs() {
        assert_eq!(serialize_graph(&Graph::empty(1), Format::EdgeList), "1\n");
        let p3 = Graph::from_edges_unchecked(3, &[(2, 1), (0, 1)]);
        assert_eq!(serialize_graph(&p3, Format::EdgeList), "3\n0 1\n1 2\n");
    }

    #[test]
    fn components() {
        let two_triangles =
            Graph::from_edges_unchecked(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let comps = connected_components(&two_triangles);
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(connected_components(&complete(4)).len(), 1);
        assert_eq!(connected_components(&Graph::empty(5)).len(), 5);
    }

    #[test]
    fn separation() {
        let p3 = Graph::from_edges_unchecked(3, &[(0, 1), (1, 2)]);
        assert!(separates(&p3, &[1], &[0, 2]));
        assert!(!separates(&p3, &[0, 2], &[0, 2]));
        let k4 = complete(4);
        for a in 0..4 {
            for b in a..4 {
                let rest: Vec<_> = (0..4).filter(|&v| v != a && v != b).collect();
                assert!(!separates(&k4, &[a, b], &rest));
            }
        }
    }

    #[test]
    fn connectivity_levels() {
        assert!(is_k_connected(&complete(4), 3));
        assert!(!is_k_connected(&cycle(5), 3));
        assert!(is_k_connected(&cycle(5), 2));
        assert!(!is_k_connected(&complete(3), 3));
        assert!(is_k_connected(&complete(3), 2));
        assert!(!is_k_connected(&Graph::empty(1), 1));
        assert!(is_k_connected(&Graph::from_edges_unchecked(2, &[(0, 1)]), 1));
    }

    #[test]
    fn biconnected_structure() {
        // Two triangles sharing vertex 2, plus a pendant edge 4-5.
        let g = Graph::from_edges_unchecked(
            6,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (4, 5)],
        );
        let (comps, cuts) = biconnected_components(&g);
        assert_eq!(comps.len(), 3);
        assert_eq!(cuts, vec![2, 4]);
        assert!(is_triconnected(&complete(4)));
        assert!(!is_triconnected(&cycle(5)));
    }

    #[test]
    fn atomic_types() {
        let k2 = Graph::from_edges_unchecked(2, &[(0, 1)]);
        let t = atomic_type(&k2, &[0, 1]);
        assert_eq!(t.adjacencies, BTreeSet::from([(1, 2)]));
        assert!(t.equalities.is_empty());

        let t = atomic_type(&k2, &[1, 1]);
        assert_eq!(t.equalities, BTreeSet::from([(1, 2)]));
        assert!(t.adjacencies.is_empty());

        // C4 = 1-2-3-4-1 relabelled to 0..4; tuple (1,2,4) -> (0,1,3).
        let c4 = cycle(4);
        let t = atomic_type(&c4, &[0, 1, 3]);
        assert_eq!(t.adjacencies, BTreeSet::from([(1, 2), (1, 3)]));
        assert!(t.equalities.is_empty());
    }
}
