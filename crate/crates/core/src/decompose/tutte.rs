use std::collections::{BTreeMap, HashMap, HashSet};

use super::blocks::BlockKind;
use super::{intersection_size, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{biconnected_components, component_labels, Graph};

/// A piece of a 2-connected component during splitting: its vertices
/// (global ids, sorted) and its edges, real and virtual.
struct Piece {
    vertices: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

enum Final {
    Cycle(Vec<usize>),
    Rigid(Vec<usize>),
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Piece {
    fn local(&self) -> Graph {
        let idx = |v: usize| self.vertices.binary_search(&v).unwrap();
        let e: Vec<_> = self.edges.iter().map(|&(u, v)| (idx(u), idx(v))).collect();
        Graph::from_edges_unchecked(self.vertices.len(), &e)
    }
}

/// Cyclic vertex order of a 2-regular connected graph.
fn cycle_order(h: &Graph, vertices: &[usize]) -> Vec<usize> {
    let mut order = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    loop {
        let next = *h.neighbours(cur).iter().find(|&&w| w != prev).unwrap();
        if next == 0 {
            break;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    order.into_iter().map(|i| vertices[i]).collect()
}

/// Splits one 2-connected component into cycles and 3-connected pieces.
/// Returns the pieces and, for every virtual pair, how many pieces carry it.
fn split_biconnected(vertices: Vec<usize>, edges: Vec<(usize, usize)>) -> (Vec<Final>, HashMap<(usize, usize), usize>) {
    let mut stack = vec![Piece { vertices, edges }];
    let mut out = Vec::new();
    let mut virtual_count: HashMap<(usize, usize), usize> = HashMap::new();
    while let Some(p) = stack.pop() {
        let h = p.local();
        let k = h.n();
        if (0..k).all(|v| h.degree(v) == 2) {
            out.push(Final::Cycle(cycle_order(&h, &p.vertices)));
            continue;
        }
        let mut split = None;
        for a in 0..k {
            let rest: Vec<usize> = (0..k).filter(|&v| v != a).collect();
            let (_, cuts) = biconnected_components(&h.induced(&rest));
            if let Some(&c) = cuts.first() {
                split = Some((a, rest[c]));
                break;
            }
        }
        let Some((a, b)) = split else {
            out.push(Final::Rigid(p.vertices));
            continue;
        };
        let mut removed = vec![false; k];
        removed[a] = true;
        removed[b] = true;
        let (label, count) = component_labels(&h, &removed);
        let (ga, gb) = (p.vertices[a], p.vertices[b]);
        let pair = key(ga, gb);
        *virtual_count.entry(pair).or_insert(0) += count;
        for c in 0..count {
            let mut vs: Vec<usize> = (0..k).filter(|&v| label[v] == c).map(|v| p.vertices[v]).collect();
            vs.push(ga);
            vs.push(gb);
            vs.sort_unstable();
            let inside: HashSet<usize> = vs.iter().copied().collect();
            let mut es: Vec<(usize, usize)> = p
                .edges
                .iter()
                .copied()
                .filter(|&(u, v)| inside.contains(&u) && inside.contains(&v) && key(u, v) != pair)
                .collect();
            es.push(pair);
            stack.push(Piece { vertices: vs, edges: es });
        }
    }
    (out, virtual_count)
}

/// Joins two cycles sharing the edge `{a, b}` into one cycle without it.
fn merge_cycles(c1: &[usize], c2: &[usize], a: usize, b: usize) -> Vec<usize> {
    // Walk c1 from a to b the long way (not across the edge a-b).
    let arc = |c: &[usize], from: usize, to: usize| -> Vec<usize> {
        let l = c.len();
        let i = c.iter().position(|&x| x == from).unwrap();
        let forward = c[(i + 1) % l] != to;
        let mut out = vec![from];
        let mut j = i;
        loop {
            j = if forward { (j + 1) % l } else { (j + l - 1) % l };
            out.push(c[j]);
            if c[j] == to {
                break;
            }
        }
        out
    };
    let mut res = arc(c1, a, b);
    let back = arc(c2, b, a);
    res.extend(&back[1..back.len() - 1]);
    res
}

/// Blocks of a connected graph: proper blocks, fan triangles of every
/// maximal cycle, and bridges. Sorted; a single vertex yields `{v}`.
pub fn tutte_blocks(g: &Graph) -> Vec<(Vec<usize>, BlockKind)> {
    if g.n() == 1 {
        return vec![(vec![0], BlockKind::Degenerate2)];
    }
    let real: HashSet<(usize, usize)> = g.edges().into_iter().collect();
    let (comps, _) = biconnected_components(g);
    let mut out = Vec::new();
    for comp in comps {
        if comp.len() == 1 {
            out.push((vec![comp[0].0, comp[0].1], BlockKind::Degenerate2));
            continue;
        }
        let mut vs: Vec<usize> = comp.iter().flat_map(|&(u, v)| [u, v]).collect();
        vs.sort_unstable();
        vs.dedup();
        let (pieces, vcount) = split_biconnected(vs, comp);
        let mut cycles: Vec<Option<Vec<usize>>> = Vec::new();
        for p in pieces {
            match p {
                Final::Rigid(v) => out.push((v, BlockKind::Proper)),
                Final::Cycle(c) => cycles.push(Some(c)),
            }
        }
        // Cycles glued along a virtual pair shared by exactly two pieces
        // (and no real edge) belong to one larger cycle.
        let mergeable: Vec<(usize, usize)> = {
            let mut m: Vec<_> = vcount
                .iter()
                .filter(|(p, &c)| c == 2 && !real.contains(p))
                .map(|(p, _)| *p)
                .collect();
            m.sort_unstable();
            m
        };
        for (a, b) in mergeable {
            let holders: Vec<usize> = (0..cycles.len())
                .filter(|&i| {
                    cycles[i].as_ref().is_some_and(|c| {
                        let l = c.len();
                        (0..l).any(|j| key(c[j], c[(j + 1) % l]) == (a, b))
                    })
                })
                .collect();
            if let [i, j] = holders[..] {
                let merged = merge_cycles(cycles[i].as_ref().unwrap(), cycles[j].as_ref().unwrap(), a, b);
                cycles[i] = Some(merged);
                cycles[j] = None;
            }
        }
        for c in cycles.into_iter().flatten() {
            // Fan from the smallest vertex.
            let l = c.len();
            let s = (0..l).min_by_key(|&i| c[i]).unwrap();
            let rot: Vec<usize> = (0..l).map(|i| c[(s + i) % l]).collect();
            for i in 1..l - 1 {
                let mut t = vec![rot[0], rot[i], rot[i + 1]];
                t.sort_unstable();
                out.push((t, BlockKind::Degenerate3));
            }
        }
    }
    out.sort();
    out
}

/// Small tree decomposition of a connected graph of adhesion at most 2
/// whose bags are its blocks.
///
/// The bags are the maximal cliques of the chordal graph they induce, so a
/// maximum-weight spanning tree of their intersection graph is a valid
/// decomposition tree. It is rooted at the first bag.
pub fn tutte_block_decomposition(g: &Graph) -> Result<RootedDecomposition> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Precondition(
            "block decomposition needs a connected, non-empty graph".into(),
        ));
    }
    let bags: Vec<Vec<usize>> = tutte_blocks(g).into_iter().map(|(b, _)| b).collect();
    let parent = spanning_tree_parents(&bags);
    RootedDecomposition::new(parent, bags)
}

pub(crate) fn spanning_tree_parents(bags: &[Vec<usize>]) -> Vec<Option<usize>> {
    let k = bags.len();
    let mut by_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, b) in bags.iter().enumerate() {
        for &v in b {
            by_vertex.entry(v).or_default().push(i);
        }
    }
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for list in by_vertex.values() {
        for x in 0..list.len() {
            for y in x + 1..list.len() {
                pairs.insert((list[x], list[y]));
            }
        }
    }
    let mut weighted: Vec<(usize, usize, usize)> = pairs
        .into_iter()
        .map(|(i, j)| (intersection_size(&bags[i], &bags[j]), i, j))
        .collect();
    weighted.sort_unstable_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut dsu: Vec<usize> = (0..k).collect();
    fn find(d: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while d[r] != r {
            r = d[r];
        }
        let mut y = x;
        while d[y] != r {
            let n = d[y];
            d[y] = r;
            y = n;
        }
        r
    }
    let mut adj = vec![Vec::new(); k];
    for (_, i, j) in weighted {
        let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
        if ri != rj {
            dsu[ri] = rj;
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut parent = vec![None; k];
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        adj[x].sort_unstable();
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    parent
}
