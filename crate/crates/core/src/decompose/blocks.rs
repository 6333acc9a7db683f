use std::collections::{HashMap, VecDeque};

use super::tutte::tutte_blocks;
use crate::graph::{component_labels, Graph};

/// Torso edges of `x` (global ids, `u < v`, sorted) and the adhesion of `x`.
///
/// Two vertices of `x` are joined if they are adjacent in `g` or both
/// border a common component of `g - x`.
pub fn torso(g: &Graph, x: &[usize]) -> (Vec<(usize, usize)>, usize) {
    let n = g.n();
    let mut in_x = vec![false; n];
    for &v in x {
        in_x[v] = true;
    }
    let mut edges = Vec::new();
    for &v in x {
        for &w in g.neighbours(v) {
            if in_x[w] && v < w {
                edges.push((v, w));
            }
        }
    }
    let (label, count) = component_labels(g, &in_x);
    let mut border: Vec<Vec<usize>> = vec![Vec::new(); count];
    for &v in x {
        for &w in g.neighbours(v) {
            if !in_x[w] {
                let c = label[w];
                if border[c].last() != Some(&v) {
                    border[c].push(v);
                }
            }
        }
    }
    let mut adh = 0;
    for mut nb in border {
        nb.sort_unstable();
        nb.dedup();
        adh = adh.max(nb.len());
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                edges.push((nb[i], nb[j]));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    (edges, adh)
}

/// Largest `|N(C)|` over the components `C` of `g - x`.
pub fn adhesion(g: &Graph, x: &[usize]) -> usize {
    torso(g, x).1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    Proper,
    Degenerate3,
    Degenerate2,
    Separator,
    Invalid,
}

impl std::fmt::Display for BlockKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlockKind::Proper => "proper",
            BlockKind::Degenerate3 => "degenerate3",
            BlockKind::Degenerate2 => "degenerate2",
            BlockKind::Separator => "separator",
            BlockKind::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockResolution {
    pub kind: BlockKind,
    pub members: Vec<usize>,
    pub torso_edges: Vec<(usize, usize)>,
}

impl BlockResolution {
    fn invalid() -> Self {
        BlockResolution {
            kind: BlockKind::Invalid,
            members: Vec::new(),
            torso_edges: Vec::new(),
        }
    }

    /// Local torso graph; vertex `i` is `members[i]`.
    pub fn torso_graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = self
            .torso_edges
            .iter()
            .map(|&(u, v)| {
                (
                    self.members.binary_search(&u).unwrap(),
                    self.members.binary_search(&v).unwrap(),
                )
            })
            .collect();
        Graph::from_edges_unchecked(self.members.len(), &edges)
    }
}

/// Number of internally vertex-disjoint `s`-`t` paths, counting at most
/// `cap`. For adjacent `s` and `t` the direct edge counts as one path.
pub fn local_connectivity(g: &Graph, s: usize, t: usize, cap: usize) -> usize {
    assert_ne!(s, t);
    let n = g.n();
    // Split graph: v_in = 2v, v_out = 2v + 1.
    let mut head: Vec<usize> = Vec::new();
    let mut capy: Vec<i32> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut add = |a: usize, b: usize, c: i32, head: &mut Vec<usize>, capy: &mut Vec<i32>| {
        adj[a].push(head.len());
        head.push(b);
        capy.push(c);
        adj[b].push(head.len());
        head.push(a);
        capy.push(0);
    };
    let big = cap as i32 + 1;
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        add(2 * v, 2 * v + 1, c, &mut head, &mut capy);
        for &w in g.neighbours(v) {
            add(2 * v + 1, 2 * w, 1, &mut head, &mut capy);
        }
    }
    let (src, dst) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    while flow < cap {
        let mut prev = vec![usize::MAX; 2 * n];
        prev[src] = usize::MAX - 1;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            if x == dst {
                break;
            }
            for &e in &adj[x] {
                let y = head[e];
                if capy[e] > 0 && prev[y] == usize::MAX {
                    prev[y] = e;
                    queue.push_back(y);
                }
            }
        }
        if prev[dst] == usize::MAX {
            break;
        }
        let mut y = dst;
        while y != src {
            let e = prev[y];
            capy[e] -= 1;
            capy[e ^ 1] += 1;
            y = head[e ^ 1];
        }
        flow += 1;
    }
    flow
}

/// No set of at most two vertices other than `v` separates `v` from `b`.
fn three_linked(g: &Graph, v: usize, b: usize) -> bool {
    v == b || g.has_edge(v, b) || local_connectivity(g, v, b, 3) >= 3
}

fn degenerate(g: &Graph, x: &[usize]) -> Option<BlockResolution> {
    let (edges, adh) = torso(g, x);
    let complete = edges.len() == x.len() * (x.len() - 1) / 2;
    let kind = match x.len() {
        3 if complete && adh <= 2 => BlockKind::Degenerate3,
        2 if complete && adh <= 1 => BlockKind::Degenerate2,
        _ => return None,
    };
    Some(BlockResolution {
        kind,
        members: x.to_vec(),
        torso_edges: edges,
    })
}

fn distinct(b: [usize; 3]) -> Vec<usize> {
    let mut x = b.to_vec();
    x.sort_unstable();
    x.dedup();
    x
}

/// The block determined by a vertex triple: `{b1, b2, b3}` itself when it
/// is a degenerate block, otherwise the proper block through three
/// distinct vertices, consisting of every vertex that no set of at most
/// two other vertices separates from the triple.
pub fn block_from_triple(g: &Graph, b1: usize, b2: usize, b3: usize) -> BlockResolution {
    let x = distinct([b1, b2, b3]);
    if let Some(r) = degenerate(g, &x) {
        return r;
    }
    if x.len() != 3 {
        return BlockResolution::invalid();
    }
    let pairwise = three_linked(g, b1, b2) && three_linked(g, b1, b3) && three_linked(g, b2, b3);
    if !pairwise {
        return BlockResolution::invalid();
    }
    let members: Vec<usize> = (0..g.n())
        .filter(|&v| x.iter().all(|&b| three_linked(g, v, b)))
        .collect();
    if members.len() < 4 {
        return BlockResolution::invalid();
    }
    let (torso_edges, _) = torso(g, &members);
    BlockResolution {
        kind: BlockKind::Proper,
        members,
        torso_edges,
    }
}

/// Whether `{s1, s2}` (or `{s1}` when equal) is the intersection of two
/// blocks whose remainders lie in different components of `g - S`.
///
/// For a single vertex this holds exactly at cut vertices; for a pair,
/// exactly when at least two components of `g - S` border both vertices.
pub fn is_block_separator(g: &Graph, s1: usize, s2: usize) -> bool {
    let n = g.n();
    if s1 >= n || s2 >= n {
        return false;
    }
    let mut removed = vec![false; n];
    removed[s1] = true;
    removed[s2] = true;
    let (label, count) = component_labels(g, &removed);
    if s1 == s2 {
        return count >= 2 && g.degree(s1) > 0 && {
            let mut seen: Vec<usize> = g.neighbours(s1).iter().map(|&w| label[w]).collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len() >= 2
        };
    }
    let mut touch = vec![0u8; count];
    for (bit, s) in [(1u8, s1), (2u8, s2)] {
        for &w in g.neighbours(s) {
            if label[w] != usize::MAX {
                touch[label[w]] |= bit;
            }
        }
    }
    touch.iter().filter(|&&t| t == 3).count() >= 2
}

/// Memoised block resolution for one graph.
///
/// Proper blocks are located among the bags of the block decomposition
/// and then certified against the separator characterisation, which
/// avoids a connectivity test from every vertex of the graph.
pub struct BlockResolver<'a> {
    g: &'a Graph,
    proper: Vec<Vec<usize>>,
    by_vertex: Vec<Vec<usize>>,
    cache: HashMap<Vec<usize>, BlockResolution>,
}

impl<'a> BlockResolver<'a> {
    pub fn new(g: &'a Graph) -> Self {
        let proper: Vec<Vec<usize>> = if g.n() > 0 && g.is_connected() {
            tutte_blocks(g)
                .into_iter()
                .filter(|(_, k)| *k == BlockKind::Proper)
                .map(|(b, _)| b)
                .collect()
        } else {
            Vec::new()
        };
        let mut by_vertex = vec![Vec::new(); g.n()];
        for (i, b) in proper.iter().enumerate() {
            for &v in b {
                by_vertex[v].push(i);
            }
        }
        BlockResolver {
            g,
            proper,
            by_vertex,
            cache: HashMap::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn resolve(&mut self, b1: usize, b2: usize, b3: usize) -> BlockResolution {
        let key = {
            let mut k = vec![b1, b2, b3];
            k.sort_unstable();
            k
        };
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let r = self.compute(b1, b2, b3);
        self.cache.insert(key, r.clone());
        r
    }

    fn compute(&self, b1: usize, b2: usize, b3: usize) -> BlockResolution {
        let x = distinct([b1, b2, b3]);
        if let Some(r) = degenerate(self.g, &x) {
            return r;
        }
        if x.len() != 3 {
            return BlockResolution::invalid();
        }
        let candidate = self.by_vertex[b1]
            .iter()
            .find(|&&i| self.proper[i].binary_search(&b2).is_ok() && self.proper[i].binary_search(&b3).is_ok());
        if let Some(&i) = candidate {
            let members = &self.proper[i];
            let (torso_edges, adh) = torso(self.g, members);
            // Every member is 3-linked to the triple, and every outside
            // vertex is cut off by the border of its component (adhesion
            // at most 2), so `members` is exactly the separator-free set.
            let certified = adh <= 2
                && members
                    .iter()
                    .all(|&v| x.iter().all(|&b| three_linked(self.g, v, b)));
            if certified {
                return BlockResolution {
                    kind: BlockKind::Proper,
                    members: members.clone(),
                    torso_edges,
                };
            }
        }
        block_from_triple(self.g, b1, b2, b3)
    }

    /// Classifies an arbitrary vertex set: a block of some kind, a block
    /// separator, or invalid.
    pub fn classify(&mut self, set: &[usize]) -> BlockKind {
        let mut x = set.to_vec();
        x.sort_unstable();
        x.dedup();
        match x.len() {
            0 => BlockKind::Invalid,
            1 => {
                if is_block_separator(self.g, x[0], x[0]) {
                    BlockKind::Separator
                } else {
                    BlockKind::Invalid
                }
            }
            2 | 3 => {
                if let Some(r) = degenerate(self.g, &x) {
                    r.kind
                } else if x.len() == 2 && is_block_separator(self.g, x[0], x[1]) {
                    BlockKind::Separator
                } else {
                    BlockKind::Invalid
                }
            }
            _ => {
                let r = self.resolve(x[0], x[1], x[2]);
                if r.kind == BlockKind::Proper && r.members == x {
                    BlockKind::Proper
                } else {
                    BlockKind::Invalid
                }
            }
        }
    }

    /// Proper blocks of the graph (from its block decomposition).
    pub fn proper_blocks(&self) -> &[Vec<usize>] {
        &self.proper
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges_unchecked(n, &e)
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges_unchecked(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    #[test]
    fn torso_of_cycle_triangle() {
        let (edges, adh) = torso(&cycle(5), &[0, 2, 3]);
        assert_eq!(edges, vec![(0, 2), (0, 3), (2, 3)]);
        assert_eq!(adh, 2);
    }

    #[test]
    fn connectivity_counts() {
        let k4 = complete(4);
        assert_eq!(local_connectivity(&k4, 0, 1, 5), 3);
        assert_eq!(local_connectivity(&cycle(6), 0, 3, 5), 2);
        assert_eq!(local_connectivity(&complete(6), 0, 1, 3), 3);
    }

    #[test]
    fn triple_examples() {
        let k4 = complete(4);
        let r = block_from_triple(&k4, 0, 1, 2);
        assert_eq!(r.kind, BlockKind::Proper);
        assert_eq!(r.members, vec![0, 1, 2, 3]);
        assert_eq!(r.torso_edges.len(), 6);

        let mut e = k4.edges();
        e.push((0, 4));
        let k4p = Graph::from_edges_unchecked(5, &e);
        let r = block_from_triple(&k4p, 0, 1, 2);
        assert_eq!(r.kind, BlockKind::Proper);
        assert_eq!(r.members, vec![0, 1, 2, 3]);
        assert!(crate::graph::is_triconnected(&r.torso_graph()));

        // Any triple on a cycle has a triangle torso of adhesion 2.
        let c6 = cycle(6);
        assert_eq!(block_from_triple(&c6, 0, 2, 4).kind, BlockKind::Degenerate3);
        assert_eq!(block_from_triple(&c6, 0, 1, 3).kind, BlockKind::Degenerate3);
        let star = Graph::from_edges_unchecked(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(block_from_triple(&star, 1, 2, 3).kind, BlockKind::Invalid);

        let p3 = Graph::from_edges_unchecked(3, &[(0, 1), (1, 2)]);
        assert_eq!(block_from_triple(&p3, 0, 1, 1).kind, BlockKind::Degenerate2);
        assert_eq!(block_from_triple(&p3, 0, 2, 2).kind, BlockKind::Invalid);
    }

    #[test]
    fn separator_examples() {
        let glued = Graph::from_edges_unchecked(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)]);
        assert!(is_block_separator(&glued, 0, 1));
        assert!(!is_block_separator(&glued, 2, 3));
        let k4 = complete(4);
        for (u, v) in k4.edges() {
            assert!(!is_block_separator(&k4, u, v));
        }
        let p3 = Graph::from_edges_unchecked(3, &[(0, 1), (1, 2)]);
        assert!(is_block_separator(&p3, 1, 1));
        assert!(!is_block_separator(&p3, 0, 0));
    }

    #[test]
    fn resolver_agrees_with_direct_lemma() {
        let mut e = complete(4).edges();
        e.extend([(3, 4), (4, 5), (5, 3), (5, 6), (6, 3), (4, 6)]);
        let g = Graph::from_edges_unchecked(7, &e);
        let mut res = BlockResolver::new(&g);
        for t in [(0, 1, 2), (3, 4, 5), (0, 3, 4), (1, 2, 3)] {
            assert_eq!(res.resolve(t.0, t.1, t.2), block_from_triple(&g, t.0, t.1, t.2));
        }
        assert_eq!(res.classify(&[0, 1, 2, 3]), BlockKind::Proper);
        assert_eq!(res.classify(&[3]), BlockKind::Separator);
        assert_eq!(res.classify(&[0, 1, 2]), BlockKind::Invalid);
    }
}
