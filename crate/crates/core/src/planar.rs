//! Combinatorial planar embeddings, facial walks, angle systems and
//! direction-string vertex identification.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{biconnected_components, component_labels, is_triconnected, Graph};

/// Cyclic order of the neighbours around each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    rot: Vec<Vec<usize>>,
    // (neighbour, position in rot[v]) sorted by neighbour.
    pos: Vec<Vec<(usize, usize)>>,
}

impl RotationSystem {
    /// Checks that every `rot[v]` is a permutation of the neighbours of `v`.
    pub fn new(g: &Graph, rot: Vec<Vec<usize>>) -> Result<Self> {
        if rot.len() != g.n() {
            return Err(Error::Validation(format!(
                "inconsistent rotation: {} vertex rotations for {} vertices",
                rot.len(),
                g.n()
            )));
        }
        for (v, r) in rot.iter().enumerate() {
            let mut sorted = r.clone();
            sorted.sort_unstable();
            if sorted != g.neighbours(v) {
                return Err(Error::Validation(format!(
                    "inconsistent rotation at vertex {v}: not a permutation of its neighbours"
                )));
            }
        }
        Ok(Self::from_rotations(rot))
    }

    fn from_rotations(rot: Vec<Vec<usize>>) -> Self {
        let pos = rot
            .iter()
            .map(|r| {
                let mut p: Vec<(usize, usize)> = r.iter().enumerate().map(|(i, &w)| (w, i)).collect();
                p.sort_unstable();
                p
            })
            .collect();
        RotationSystem { rot, pos }
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    fn position(&self, v: usize, u: usize) -> usize {
        let p = &self.pos[v];
        let i = p
            .binary_search_by_key(&u, |&(w, _)| w)
            .unwrap_or_else(|_| panic!("{u} is not a neighbour of {v}"));
        p[i].1
    }

    /// The neighbour following `u` in the rotation at `v`.
    pub fn next_around(&self, v: usize, u: usize) -> usize {
        let r = &self.rot[v];
        r[(self.position(v, u) + 1) % r.len()]
    }

    /// The neighbour preceding `u` in the rotation at `v`.
    pub fn prev_around(&self, v: usize, u: usize) -> usize {
        let r = &self.rot[v];
        r[(self.position(v, u) + r.len() - 1) % r.len()]
    }

    fn check(&self, g: &Graph) -> Result<()> {
        Self::new(g, self.rot.clone()).map(|_| ())
    }

    /// One `rot v: n1,n2,...` line per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, r) in self.rot.iter().enumerate() {
            let list: Vec<String> = r.iter().map(usize::to_string).collect();
            out.push_str(&format!("rot {v}: {}\n", list.join(",")));
        }
        out
    }

    /// Inverse of [`RotationSystem::to_text`], validated against `g`.
    pub fn parse(g: &Graph, text: &str) -> Result<Self> {
        let mut rot = vec![None; g.n()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rest = line
                .strip_prefix("rot ")
                .ok_or_else(|| Error::parse(i + 1, "expected `rot <v>: ...`"))?;
            let (v, list) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(i + 1, "missing `:`"))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(i + 1, "bad vertex id"))?;
            if v >= g.n() {
                return Err(Error::parse(i + 1, format!("vertex {v} out of range")));
            }
            let list = list.trim();
            let nbrs = if list.is_empty() {
                Vec::new()
            } else {
                list.split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::parse(i + 1, "bad neighbour id"))?
            };
            rot[v] = Some(nbrs);
        }
        let rot = rot
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| Error::Validation(format!("no rotation for vertex {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, rot)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

impl fmt::Display for KuratowskiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KuratowskiKind::K5 => "K5",
            KuratowskiKind::K33 => "K3,3",
        })
    }
}

/// A subdivision of K5 or K3,3 contained in the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonPlanarWitness {
    pub kind: KuratowskiKind,
    pub branch_vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub enum Embedding {
    Planar(RotationSystem),
    NonPlanar(NonPlanarWitness),
}

/// Embeds a connected graph, or returns a Kuratowski subgraph.
pub fn planar_embed(g: &Graph) -> Result<Embedding> {
    if !g.is_connected() {
        return Err(Error::Precondition("planar_embed needs a connected graph".into()));
    }
    let (blocks, _) = biconnected_components(g);
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for block in &blocks {
        match embed_block_edges(g.n(), block) {
            Some(local) => {
                for (v, r) in local {
                    rot[v].extend(r);
                }
            }
            None => return Ok(Embedding::NonPlanar(kuratowski_witness(g.n(), block))),
        }
    }
    Ok(Embedding::Planar(RotationSystem::from_rotations(rot)))
}

/// Like [`planar_embed`] but turns a non-planar result into an error.
pub fn embed_or_error(g: &Graph) -> Result<RotationSystem> {
    match planar_embed(g)? {
        Embedding::Planar(rs) => Ok(rs),
        Embedding::NonPlanar(w) => Err(Error::NonPlanar(Box::new(w))),
    }
}

/// Planarity of an arbitrary (possibly disconnected) graph.
pub fn is_planar(g: &Graph) -> bool {
    let (blocks, _) = biconnected_components(g);
    blocks.iter().all(|b| embed_block_edges(g.n(), b).is_some())
}

/// Rotations around the vertices of one biconnected block, given by its
/// edges. `None` if the block is not planar.
fn embed_block_edges(n: usize, block: &[(usize, usize)]) -> Option<Vec<(usize, Vec<usize>)>> {
    if block.len() == 1 {
        let (u, v) = block[0];
        return Some(vec![(u, vec![v]), (v, vec![u])]);
    }
    let mut verts: Vec<usize> = block.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let edges: Vec<_> = block.iter().map(|&(u, v)| (local[u], local[v])).collect();
    let h = Graph::from_edges_unchecked(verts.len(), &edges);
    if h.m() > 3 * h.n() - 6 {
        return None;
    }
    let faces = embed_biconnected(&h)?;
    let mut succ: Vec<HashMap<usize, usize>> = vec![HashMap::new(); h.n()];
    for f in &faces {
        let l = f.len();
        for i in 0..l {
            let (x, v, y) = (f[(i + l - 1) % l], f[i], f[(i + 1) % l]);
            succ[v].insert(x, y);
        }
    }
    let mut out = Vec::with_capacity(h.n());
    for v in 0..h.n() {
        let start = h.neighbours(v)[0];
        let mut r = vec![verts[start]];
        let mut cur = succ[v][&start];
        while cur != start {
            r.push(verts[cur]);
            cur = succ[v][&cur];
        }
        debug_assert_eq!(r.len(), h.degree(v));
        out.push((verts[v], r));
    }
    Some(out)
}

enum Fragment {
    Edge(usize, usize),
    Component { vertices: Vec<usize>, attachments: Vec<usize> },
}

impl Fragment {
    fn attachments(&self) -> Vec<usize> {
        match self {
            Fragment::Edge(u, v) => vec![*u, *v],
            Fragment::Component { attachments, .. } => attachments.clone(),
        }
    }
}

/// Incremental face insertion on a 2-connected graph with at least three
/// vertices. Returns the oriented facial cycles.
fn embed_biconnected(h: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = h.n();
    let mut emb_v = vec![false; n];
    let mut emb_e: HashSet<(usize, usize)> = HashSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));

    // Initial cycle: edge 0-w closed by a shortest w..0 path avoiding it.
    let w = h.neighbours(0)[0];
    let mut parent = vec![usize::MAX; n];
    parent[w] = w;
    let mut queue = VecDeque::from([w]);
    while let Some(x) = queue.pop_front() {
        for &y in h.neighbours(x) {
            if parent[y] == usize::MAX && !(x == w && y == 0) {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut cycle = vec![0];
    let mut x = parent[0];
    while x != w {
        cycle.push(x);
        x = parent[x];
    }
    cycle.push(w);
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        emb_v[a] = true;
        emb_e.insert(key(a, b));
    }
    let rev: Vec<usize> = cycle.iter().rev().copied().collect();
    let mut faces = vec![cycle.clone(), rev];
    let mut vface: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &cycle {
        vface[v] = vec![0, 1];
    }

    while emb_e.len() < h.m() {
        let mut frags = Vec::new();
        for (u, v) in h.edges() {
            if emb_v[u] && emb_v[v] && !emb_e.contains(&(u, v)) {
                frags.push(Fragment::Edge(u, v));
            }
        }
        let (label, count) = component_labels(h, &emb_v);
        let mut comp_vertices = vec![Vec::new(); count];
        for v in 0..n {
            if label[v] != usize::MAX {
                comp_vertices[label[v]].push(v);
            }
        }
        for vertices in comp_vertices {
            let mut att: Vec<usize> = vertices
                .iter()
                .flat_map(|&v| h.neighbours(v).iter().copied())
                .filter(|&x| emb_v[x])
                .collect();
            att.sort_unstable();
            att.dedup();
            frags.push(Fragment::Component { vertices, attachments: att });
        }

        let mut choice: Option<(usize, usize)> = None;
        let mut fallback: Option<(usize, usize)> = None;
        for (i, frag) in frags.iter().enumerate() {
            let att = frag.attachments();
            let admissible: Vec<usize> = vface[att[0]]
                .iter()
                .copied()
                .filter(|f| att[1..].iter().all(|x| vface[*x].contains(f)))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    choice = Some((i, admissible[0]));
                    break;
                }
                _ => {
                    if fallback.is_none() {
                        fallback = Some((i, admissible[0]));
                    }
                }
            }
        }
        let (fi, f) = choice.or(fallback).expect("at least one fragment remains");

        let path = match &frags[fi] {
            Fragment::Edge(u, v) => vec![*u, *v],
            Fragment::Component { vertices, attachments } => {
                let (a, b) = (attachments[0], attachments[1]);
                let mut inside = vec![false; n];
                for &v in vertices {
                    inside[v] = true;
                }
                let mut par = vec![usize::MAX; n];
                let mut queue = VecDeque::new();
                for &y in h.neighbours(a) {
                    if inside[y] {
                        par[y] = a;
                        queue.push_back(y);
                    }
                }
                let mut end = usize::MAX;
                while let Some(x) = queue.pop_front() {
                    if h.has_edge(x, b) {
                        end = x;
                        break;
                    }
                    for &y in h.neighbours(x) {
                        if inside[y] && par[y] == usize::MAX {
                            par[y] = x;
                            queue.push_back(y);
                        }
                    }
                }
                let mut p = vec![b];
                let mut x = end;
                while x != a {
                    p.push(x);
                    x = par[x];
                }
                p.push(a);
                p.reverse();
                p
            }
        };

        let (a, b) = (path[0], *path.last().unwrap());
        let old = std::mem::take(&mut faces[f]);
        let l = old.len();
        let i = old.iter().position(|&x| x == a).unwrap();
        let j = old.iter().position(|&x| x == b).unwrap();
        let interior = &path[1..path.len() - 1];
        let mut f1 = Vec::new();
        let mut k = i;
        loop {
            f1.push(old[k]);
            if k == j {
                break;
            }
            k = (k + 1) % l;
        }
        f1.extend(interior.iter().rev());
        let mut f2 = Vec::new();
        let mut k = j;
        loop {
            f2.push(old[k]);
            if k == i {
                break;
            }
            k = (k + 1) % l;
        }
        f2.extend(interior.iter());

        let g_id = faces.len();
        for &x in old.iter().chain(interior) {
            vface[x].retain(|&y| y != f);
        }
        for &x in &f1 {
            vface[x].push(f);
        }
        for &x in &f2 {
            vface[x].push(g_id);
        }
        faces[f] = f1;
        faces.push(f2);
        for w in path.windows(2) {
            emb_e.insert(key(w[0], w[1]));
        }
        for &x in interior {
            emb_v[x] = true;
        }
    }
    Some(faces)
}

/// Shrinks a non-planar edge set to an edge-minimal non-planar subgraph and
/// classifies it by its branch vertices.
fn kuratowski_witness(n: usize, block: &[(usize, usize)]) -> NonPlanarWitness {
    let planar = |edges: &[(usize, usize)]| is_planar(&Graph::from_edges_unchecked(n, edges));
    let mut edges = block.to_vec();
    let mut chunk = edges.len() / 2;
    loop {
        let mut start = 0;
        while start < edges.len() {
            let end = (start + chunk.max(1)).min(edges.len());
            let trial: Vec<_> = edges[..start].iter().chain(&edges[end..]).copied().collect();
            if !planar(&trial) {
                edges = trial;
            } else {
                start = end;
            }
        }
        if chunk <= 1 {
            break;
        }
        chunk /= 2;
    }
    let w = Graph::from_edges_unchecked(n, &edges);
    let branch: Vec<usize> = (0..n).filter(|&v| w.degree(v) >= 3).collect();
    let kind = if branch.len() == 5 && branch.iter().all(|&v| w.degree(v) == 4) {
        KuratowskiKind::K5
    } else {
        KuratowskiKind::K33
    };
    NonPlanarWitness {
        kind,
        branch_vertices: branch,
        edges,
    }
}

/// Facial walks traced with the rule "after `u -> v` comes
/// `v -> next_around(v, u)`". Each walk lists the tails of its directed
/// edges; an isolated vertex forms a single trivial walk.
pub fn faces(g: &Graph, rs: &RotationSystem) -> Result<Vec<Vec<usize>>> {
    rs.check(g)?;
    if g.m() == 0 {
        return Ok((0..g.n()).map(|v| vec![v]).collect());
    }
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for u in 0..g.n() {
        for &v in g.neighbours(u) {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut walk = Vec::new();
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                walk.push(a);
                let c = rs.next_around(b, a);
                a = b;
                b = c;
            }
            if (a, b) != (u, v) {
                return Err(Error::Validation("inconsistent rotation: face tracing does not close".into()));
            }
            out.push(walk);
        }
    }
    Ok(out)
}

/// Whitney's facial-cycle criterion: `c` is induced and `g - V(c)` is
/// connected (an empty remainder counts as connected).
pub fn whitney_is_facial(g: &Graph, c: &[usize]) -> Result<bool> {
    let l = c.len();
    let mut on = vec![false; g.n()];
    for &v in c {
        if v >= g.n() || on[v] {
            return Err(Error::Validation("cycle repeats a vertex or is out of range".into()));
        }
        on[v] = true;
    }
    if l < 3 || (0..l).any(|i| !g.has_edge(c[i], c[(i + 1) % l])) {
        return Err(Error::Validation("not a cycle of the graph".into()));
    }
    let inner_edges: usize = c
        .iter()
        .map(|&v| g.neighbours(v).iter().filter(|&&w| on[w]).count())
        .sum::<usize>()
        / 2;
    if inner_edges != l {
        return Ok(false);
    }
    Ok(component_labels(g, &on).1 <= 1)
}

/// An ordered triple `(w, v, w')` of successive vertices on a facial walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(pub usize, pub usize, pub usize);

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0, self.1, self.2)
    }
}

/// The angles of a 3-connected plane graph with the aligned (`A`) and
/// wedge (`W`) successor maps.
#[derive(Clone, Debug)]
pub struct AngleSystem {
    n: usize,
    angles: Vec<Angle>,
    index: HashMap<Angle, usize>,
    aligned: Vec<usize>,
    wedge: Vec<usize>,
}

/// Builds the angle system of a 3-connected graph under `rs`.
pub fn angle_system(g: &Graph, rs: &RotationSystem) -> Result<AngleSystem> {
    if !is_triconnected(g) {
        return Err(Error::Precondition("angle systems need a 3-connected graph".into()));
    }
    let walks = faces(g, rs)?;
    if g.n() + walks.len() != g.m() + 2 {
        return Err(Error::Precondition("rotation system is not a planar embedding".into()));
    }
    Ok(AngleSystem::from_walks(g.n(), &walks, rs))
}

impl AngleSystem {
    /// Embeds `g` and builds its angle system.
    pub fn for_graph(g: &Graph) -> Result<AngleSystem> {
        if !g.is_connected() {
            return Err(Error::Precondition("angle systems need a 3-connected graph".into()));
        }
        let rs = embed_or_error(g)?;
        angle_system(g, &rs)
    }

    fn from_walks(n: usize, walks: &[Vec<usize>], rs: &RotationSystem) -> AngleSystem {
        let mut pairs: Vec<(Angle, Angle)> = Vec::new();
        for walk in walks {
            for w in [walk.clone(), walk.iter().rev().copied().collect()] {
                let l = w.len();
                let at = |i: usize| Angle(w[(i + l - 1) % l], w[i % l], w[(i + 1) % l]);
                for i in 0..l {
                    pairs.push((at(i), at(i + 1)));
                }
            }
        }
        pairs.sort_unstable();
        let angles: Vec<Angle> = pairs.iter().map(|p| p.0).collect();
        let index: HashMap<Angle, usize> = angles.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let aligned = pairs.iter().map(|p| index[&p.1]).collect();
        let wedge = angles
            .iter()
            .map(|&Angle(v1, v2, v3)| {
                let next = rs.next_around(v2, v3);
                let x = if next == v1 { rs.prev_around(v2, v3) } else { next };
                index[&Angle(v3, v2, x)]
            })
            .collect();
        AngleSystem {
            n,
            angles,
            index,
            aligned,
            wedge,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All angles in sorted order.
    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn contains(&self, a: Angle) -> bool {
        self.index.contains_key(&a)
    }

    pub fn aligned_next(&self, a: Angle) -> Option<Angle> {
        self.index.get(&a).map(|&i| self.angles[self.aligned[i]])
    }

    pub fn wedge_next(&self, a: Angle) -> Option<Angle> {
        self.index.get(&a).map(|&i| self.angles[self.wedge[i]])
    }

    /// Breadth-first identification from `anchor`; anchors are excluded
    /// from the map.
    pub fn identify_from(&self, anchor: Angle) -> Result<IdentificationMap> {
        let start = *self
            .index
            .get(&anchor)
            .ok_or_else(|| Error::Precondition(format!("{anchor} is not an angle")))?;
        let mut word: Vec<Option<String>> = vec![None; self.len()];
        word[start] = Some(String::new());
        let mut queue = VecDeque::from([start]);
        let mut strings = BTreeMap::new();
        let anchors = [anchor.0, anchor.1, anchor.2];
        while let Some(i) = queue.pop_front() {
            let s = word[i].clone().unwrap();
            let w = self.angles[i].2;
            if !anchors.contains(&w) {
                strings.entry(w).or_insert_with(|| s.clone());
            }
            for (c, j) in [('A', self.aligned[i]), ('W', self.wedge[i])] {
                if word[j].is_none() {
                    word[j] = Some(format!("{s}{c}"));
                    queue.push_back(j);
                }
            }
        }
        let expected = self.n - anchors.iter().collect::<HashSet<_>>().len();
        if strings.len() != expected {
            return Err(Error::Precondition(format!(
                "angle walks from {anchor} reach {} of {expected} vertices",
                strings.len()
            )));
        }
        Ok(IdentificationMap { anchor, strings })
    }
}

/// Follows `delta` (letters `A` and `W`) from `start`.
pub fn angle_walk(system: &AngleSystem, start: Angle, delta: &str) -> Result<Angle> {
    let mut i = *system
        .index
        .get(&start)
        .ok_or_else(|| Error::Precondition(format!("{start} is not an angle")))?;
    for c in delta.chars() {
        i = match c {
            'A' => system.aligned[i],
            'W' => system.wedge[i],
            _ => return Err(Error::Validation(format!("invalid direction letter {c:?}"))),
        };
    }
    Ok(system.angles[i])
}

/// Direction strings for all vertices other than the anchor triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentificationMap {
    pub anchor: Angle,
    pub strings: BTreeMap<usize, String>,
}

impl IdentificationMap {
    pub fn get(&self, w: usize) -> Option<&str> {
        self.strings.get(&w).map(String::as_str)
    }

    /// Anchors first, then the rest by (length, string).
    pub fn order(&self) -> Vec<usize> {
        let mut rest: Vec<(usize, &String)> = self.strings.iter().map(|(&w, s)| (w, s)).collect();
        rest.sort_by(|a, b| (a.1.len(), a.1).cmp(&(b.1.len(), b.1)));
        let mut out = vec![self.anchor.0, self.anchor.1, self.anchor.2];
        out.extend(rest.into_iter().map(|(w, _)| w));
        out
    }

    /// One `id w: string` line per identified vertex.
    pub fn to_text(&self) -> String {
        self.strings
            .iter()
            .map(|(w, s)| format!("id {w}: {s}\n"))
            .collect()
    }
}

/// Identification anchored at `(v1, v2, v3)` with `v3` the least valid
/// third coordinate.
pub fn identify_vertices(g: &Graph, v1: usize, v2: usize) -> Result<IdentificationMap> {
    if !g.has_edge(v1, v2) {
        return Err(Error::Precondition(format!("{v1}-{v2} is not an edge")));
    }
    let system = AngleSystem::for_graph(g)?;
    let v3 = g
        .neighbours(v2)
        .iter()
        .copied()
        .find(|&x| system.contains(Angle(v1, v2, x)))
        .expect("every edge lies on a face");
    system.identify_from(Angle(v1, v2, v3))
}
