//! Canonical certificates for planar graphs.
//!
//! A piece is a connected vertex set `C` together with an ordered
//! interface tuple `I` of the vertices bordering it; edges inside `I` do
//! not belong to the piece. The certificate of a piece is computed by
//! individualising more vertices after `I` and recursing into the
//! components that remain, each again a piece. Vertices are individualised
//! in this order of preference:
//!
//! 1. nothing, if colour refinement already tells all vertices apart;
//! 2. every vertex with a colour of its own;
//! 3. all vertices of a proper block, ordered by their direction strings
//!    from an anchor angle, minimised over anchors;
//! 4. one vertex of the smallest non-trivial colour class, minimised over
//!    the class.
//!
//! Each choice depends only on the isomorphism type of the piece, and the
//! encoding records the whole piece, so two pieces get equal certificates
//! exactly when they are isomorphic by a map that respects the interface.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::decompose::{torso, tutte_blocks, BlockKind, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::planar::{planar_embed, AngleSystem, Embedding};

const DISCRETE: u32 = 1;
const SPLIT: u32 = 2;
const CONNECTED: u32 = 3;
const DISCONNECTED: u32 = 4;
const ROOTED: u32 = 5;

/// Canonical byte string; equal certificates mean isomorphic inputs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    fn from_tokens(tokens: &[u32]) -> Self {
        Certificate(tokens.iter().flat_map(|t| t.to_be_bytes()).collect())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// A piece with its interface vertices individualised in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchoredPiece {
    pub graph: Graph,
    pub interface: Vec<usize>,
}

impl AnchoredPiece {
    /// Requires `graph - interface` to be non-empty and connected, and
    /// every interface vertex to have a neighbour outside the interface.
    pub fn new(graph: Graph, interface: Vec<usize>) -> Result<Self> {
        let k = interface.len();
        let mut is_iface = vec![false; graph.n()];
        for &v in &interface {
            if v >= graph.n() || is_iface[v] {
                return Err(Error::Validation(
                    "interface vertices must be distinct and in range".into(),
                ));
            }
            is_iface[v] = true;
        }
        if k >= graph.n() {
            return Err(Error::Validation("a piece needs a vertex outside its interface".into()));
        }
        let rest: Vec<usize> = (0..graph.n()).filter(|&v| !is_iface[v]).collect();
        if !graph.induced(&rest).is_connected() {
            return Err(Error::Validation("piece minus its interface must be connected".into()));
        }
        if let Some(&v) = interface
            .iter()
            .find(|&&v| graph.neighbours(v).iter().all(|&w| is_iface[w]))
        {
            return Err(Error::Validation(format!(
                "interface vertex {v} has no neighbour inside the piece"
            )));
        }
        Ok(AnchoredPiece { graph, interface })
    }

    /// The piece hanging below `node`: the vertices of its subtree outside
    /// the parent bag, with their neighbours as the interface in
    /// increasing order. The root yields the whole graph.
    pub fn from_decomposition(g: &Graph, d: &RootedDecomposition, node: usize) -> Result<Self> {
        let unions = d.subtree_unions();
        let inner: Vec<usize> = match d.parent(node) {
            None => (0..g.n()).collect(),
            Some(p) => unions[node]
                .iter()
                .copied()
                .filter(|v| d.bag(p).binary_search(v).is_err())
                .collect(),
        };
        let mut inside = vec![false; g.n()];
        for &v in &inner {
            inside[v] = true;
        }
        let mut iface: Vec<usize> = inner
            .iter()
            .flat_map(|&v| g.neighbours(v).iter().copied())
            .filter(|&w| !inside[w])
            .collect();
        iface.sort_unstable();
        iface.dedup();
        let verts: Vec<usize> = iface.iter().chain(&inner).copied().collect();
        let local = g.induced(&verts);
        let k = iface.len();
        let edges: Vec<(usize, usize)> = local.edges().into_iter().filter(|&(_, v)| v >= k).collect();
        AnchoredPiece::new(Graph::from_edges_unchecked(verts.len(), &edges), (0..k).collect())
    }
}

/// Certificate of a piece, invariant under relabelings that keep the
/// interface tuple in place.
pub fn certificate_rooted(piece: &AnchoredPiece) -> Result<Certificate> {
    let p = AnchoredPiece::new(piece.graph.clone(), piece.interface.clone())?;
    let mut canon = Canon::new(&p.graph);
    let mut is_iface = vec![false; p.graph.n()];
    for &v in &p.interface {
        is_iface[v] = true;
    }
    let rest: Vec<usize> = (0..p.graph.n()).filter(|&v| !is_iface[v]).collect();
    let body = canon.piece(&p.interface, &rest);
    let mut tokens = vec![ROOTED, p.interface.len() as u32];
    tokens.extend(body.iter());
    Ok(Certificate::from_tokens(&tokens))
}

/// Certificate of a planar graph; non-planar input is refused with a
/// Kuratowski witness.
pub fn certificate(g: &Graph) -> Result<Certificate> {
    let comps = connected_components(g);
    for comp in &comps {
        if let Embedding::NonPlanar(w) = planar_embed(&g.induced(comp))? {
            let mut w = w;
            w.branch_vertices = w.branch_vertices.iter().map(|&v| comp[v]).collect();
            w.edges = w.edges.iter().map(|&(a, b)| (comp[a], comp[b])).collect();
            return Err(Error::NonPlanar(Box::new(w)));
        }
    }
    let mut canon = Canon::new(g);
    let tokens = if comps.len() == 1 {
        let mut t = vec![CONNECTED];
        t.extend(canon.piece(&[], &comps[0]).iter());
        t
    } else {
        let mut parts: Vec<Rc<Vec<u32>>> = comps.iter().map(|c| canon.piece(&[], c)).collect();
        parts.sort();
        let mut t = vec![DISCONNECTED, parts.len() as u32];
        for p in parts {
            t.push(p.len() as u32);
            t.extend(p.iter());
        }
        t
    };
    Ok(Certificate::from_tokens(&tokens))
}

pub fn isomorphic_planar(g: &Graph, h: &Graph) -> Result<bool> {
    let (a, b) = (certificate(g)?, certificate(h)?);
    Ok(a == b)
}

/// Stable colour refinement; colours are ranks, and a vertex never
/// overtakes one with a smaller previous colour.
fn refine(adj: &[Vec<usize>], mut colour: Vec<u32>) -> Vec<u32> {
    let mut classes = count_classes(&colour);
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..adj.len())
            .map(|v| {
                let mut s: Vec<u32> = adj[v].iter().map(|&w| colour[w]).collect();
                s.sort_unstable();
                (colour[v], s)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let rank: HashMap<&(u32, Vec<u32>), u32> =
            distinct.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        colour = sigs.iter().map(|s| rank[s]).collect();
        let now = distinct.len();
        if now == classes {
            return colour;
        }
        classes = now;
    }
}

fn count_classes(colour: &[u32]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Canon<'a> {
    g: &'a Graph,
    memo: HashMap<(Vec<usize>, Vec<usize>), Rc<Vec<u32>>>,
}

impl<'a> Canon<'a> {
    fn new(g: &'a Graph) -> Self {
        Canon {
            g,
            memo: HashMap::new(),
        }
    }

    /// Encoding of the piece with interface tuple `iface` and inner
    /// vertices `inner` (sorted).
    fn piece(&mut self, iface: &[usize], inner: &[usize]) -> Rc<Vec<u32>> {
        let key = (iface.to_vec(), inner.to_vec());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let out = Rc::new(self.compute(iface, inner));
        self.memo.insert(key, out.clone());
        out
    }

    fn compute(&mut self, iface: &[usize], inner: &[usize]) -> Vec<u32> {
        let k = iface.len();
        let verts: Vec<usize> = iface.iter().chain(inner).copied().collect();
        let local: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj: Vec<Vec<usize>> = verts
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                self.g
                    .neighbours(v)
                    .iter()
                    .filter_map(|w| local.get(w).copied())
                    .filter(|&j| i >= k || j >= k)
                    .collect()
            })
            .collect();
        let init = (0..verts.len()).map(|i| i.min(k) as u32).collect();
        let colour = refine(&adj, init);

        if count_classes(&colour) == verts.len() {
            let mut edges: Vec<(u32, u32)> = Vec::new();
            for (i, nb) in adj.iter().enumerate() {
                for &j in nb {
                    if i < j {
                        let (a, b) = (colour[i], colour[j]);
                        edges.push((a.min(b), a.max(b)));
                    }
                }
            }
            edges.sort_unstable();
            let mut t = vec![DISCRETE, verts.len() as u32, k as u32, edges.len() as u32];
            t.extend(edges.into_iter().flat_map(|(a, b)| [a, b]));
            return t;
        }

        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in k..verts.len() {
            cells.entry(colour[i]).or_default().push(i);
        }
        let singles: Vec<usize> = cells
            .values()
            .filter(|c| c.len() == 1)
            .map(|c| verts[c[0]])
            .collect();
        if !singles.is_empty() {
            let t: Vec<usize> = iface.iter().chain(&singles).copied().collect();
            return self.split(&t, k, inner);
        }

        if let Some(best) = self.via_blocks(&verts, k, &adj, &colour, inner) {
            return best;
        }

        let (_, cell) = cells
            .iter()
            .min_by_key(|(c, cell)| (cell.len(), **c))
            .expect("piece has inner vertices");
        let mut best: Option<Vec<u32>> = None;
        for &x in cell {
            let t: Vec<usize> = iface.iter().copied().chain([verts[x]]).collect();
            let enc = self.split(&t, k, inner);
            if best.as_ref().is_none_or(|b| enc < *b) {
                best = Some(enc);
            }
        }
        best.expect("cell is non-empty")
    }

    /// Individualises a whole proper block in direction-string order,
    /// minimised over the admissible anchor angles.
    fn via_blocks(
        &mut self,
        verts: &[usize],
        k: usize,
        adj: &[Vec<usize>],
        colour: &[u32],
        inner: &[usize],
    ) -> Option<Vec<u32>> {
        let edges: Vec<(usize, usize)> = adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
            .collect();
        let lg = Graph::from_edges_unchecked(verts.len(), &edges);
        let mut proper: Vec<(Vec<u32>, Vec<usize>)> = tutte_blocks(&lg)
            .into_iter()
            .filter(|(b, kind)| *kind == BlockKind::Proper && b.iter().any(|&v| v >= k))
            .map(|(b, _)| {
                let mut key: Vec<u32> = b.iter().map(|&v| colour[v]).collect();
                key.sort_unstable();
                key.insert(0, b.len() as u32);
                (key, b)
            })
            .collect();
        let least = proper.iter().map(|p| p.0.clone()).min()?;
        proper.retain(|p| p.0 == least);

        let iface: Vec<usize> = verts[..k].to_vec();
        let mut best: Option<Vec<u32>> = None;
        for (_, block) in proper {
            let (tedges, _) = torso(&lg, &block);
            let pos: HashMap<usize, usize> = block.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let tloc: Vec<(usize, usize)> = tedges.iter().map(|(a, b)| (pos[a], pos[b])).collect();
            let tg = Graph::from_edges_unchecked(block.len(), &tloc);
            let Ok(system) = AngleSystem::for_graph(&tg) else { continue };
            let key = |a: &crate::planar::Angle| {
                (colour[block[a.0]], colour[block[a.1]], colour[block[a.2]])
            };
            let Some(low) = system.angles().iter().map(key).min() else { continue };
            for &a in system.angles().iter().filter(|a| key(a) == low) {
                let Ok(map) = system.identify_from(a) else { continue };
                let mut t = iface.clone();
                for v in map.order() {
                    let gv = verts[block[v]];
                    if !t.contains(&gv) {
                        t.push(gv);
                    }
                }
                let enc = self.split(&t, k, inner);
                if best.as_ref().is_none_or(|b| enc < *b) {
                    best = Some(enc);
                }
            }
        }
        best
    }

    /// Encodes the piece with tuple `t` (starting with the `k` interface
    /// vertices) individualised: adjacency inside `t`, then the pieces
    /// left over, each keyed by the positions of its interface.
    fn split(&mut self, t: &[usize], k: usize, inner: &[usize]) -> Vec<u32> {
        let pos: HashMap<usize, usize> = t.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut tokens = vec![SPLIT, t.len() as u32, k as u32];
        let mut pairs = Vec::new();
        for (q, &v) in t.iter().enumerate().skip(k) {
            for &w in self.g.neighbours(v) {
                if let Some(&p) = pos.get(&w) {
                    if p < q {
                        pairs.push((p as u32, q as u32));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        tokens.push(pairs.len() as u32);
        tokens.extend(pairs.into_iter().flat_map(|(a, b)| [a, b]));

        let rest: Vec<usize> = inner.iter().copied().filter(|v| !pos.contains_key(v)).collect();
        let restset: HashMap<usize, usize> = rest.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut seen = vec![false; rest.len()];
        let mut children: Vec<Vec<u32>> = Vec::new();
        for s in 0..rest.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![rest[s]];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in self.g.neighbours(v) {
                    if let Some(&j) = restset.get(&w) {
                        if !seen[j] {
                            seen[j] = true;
                            comp.push(w);
                        }
                    }
                }
            }
            comp.sort_unstable();
            let mut border: Vec<usize> = comp
                .iter()
                .flat_map(|&v| self.g.neighbours(v).iter().filter_map(|w| pos.get(w).copied()))
                .collect();
            border.sort_unstable();
            border.dedup();
            let child_iface: Vec<usize> = border.iter().map(|&p| t[p]).collect();
            let cert = self.piece(&child_iface, &comp);
            let mut entry = vec![border.len() as u32];
            entry.extend(border.iter().map(|&p| p as u32));
            entry.push(cert.len() as u32);
            entry.extend(cert.iter());
            children.push(entry);
        }
        children.sort();
        tokens.push(children.len() as u32);
        for c in children {
            tokens.extend(c);
        }
        tokens
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, cycle, path, planar_random};
    use crate::oracle::brute_force_isomorphic;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn k4_is_invariant_under_all_relabelings() {
        let k4 = complete(4);
        let c = certificate(&k4).unwrap();
        for p in permutations(4) {
            assert_eq!(certificate(&k4.permute(&p)).unwrap(), c);
        }
    }

    #[test]
    fn single_edge_piece() {
        let e = Graph::from_edges_unchecked(2, &[(0, 1)]);
        let a = certificate_rooted(&AnchoredPiece::new(e.clone(), vec![0]).unwrap()).unwrap();
        let b = certificate_rooted(&AnchoredPiece::new(e, vec![1]).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interface_order_matters() {
        // Path 0-1-2-3 with a pendant on 1; interface (0, 3) vs (3, 0).
        let g = Graph::from_edges_unchecked(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        let a = certificate_rooted(&AnchoredPiece::new(g.clone(), vec![0, 3]).unwrap()).unwrap();
        let b = certificate_rooted(&AnchoredPiece::new(g, vec![3, 0]).unwrap()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn small_distinctions() {
        let c6 = cycle(6).unwrap();
        let two = cycle(3).unwrap().disjoint_union(&cycle(3).unwrap());
        assert!(!isomorphic_planar(&c6, &two).unwrap());
        assert!(!isomorphic_planar(&complete(4), &cycle(4).unwrap()).unwrap());
        let star = Graph::from_edges_unchecked(7, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]);
        let spider = Graph::from_edges_unchecked(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]);
        assert!(brute_force_isomorphic(&star, &spider, 12).unwrap().is_none());
        assert!(!isomorphic_planar(&star, &spider).unwrap());
        assert!(isomorphic_planar(&path(5).unwrap(), &path(5).unwrap().permute(&[4, 2, 0, 1, 3])).unwrap());
    }

    #[test]
    fn non_planar_is_refused() {
        match certificate(&complete(5)) {
            Err(Error::NonPlanar(w)) => assert_eq!(w.branch_vertices.len(), 5),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn random_relabelings_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for keep in [0.1, 0.5, 1.0] {
            let g = planar_random(40, keep, &mut rng).unwrap();
            let c = certificate(&g).unwrap();
            for _ in 0..10 {
                let mut p: Vec<usize> = (0..g.n()).collect();
                p.shuffle(&mut rng);
                assert_eq!(certificate(&g.permute(&p)).unwrap(), c);
            }
        }
    }

    #[test]
    fn decomposition_pieces_are_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = planar_random(30, 0.3, &mut rng).unwrap();
        let d = crate::decompose::log_block_decomposition(&g).unwrap();
        for node in 0..d.len() {
            let piece = AnchoredPiece::from_decomposition(&g, &d, node).unwrap();
            let c = certificate_rooted(&piece).unwrap();
            let k = piece.interface.len();
            let n = piece.graph.n();
            let mut p: Vec<usize> = (0..n).collect();
            p[k..].shuffle(&mut rng);
            let moved = AnchoredPiece::new(piece.graph.permute(&p), piece.interface.iter().map(|&v| p[v]).collect()).unwrap();
            assert_eq!(certificate_rooted(&moved).unwrap(), c);
        }
    }
}
