//! Brute-force ground truth used to cross-check the fast algorithms.
//!
//! Everything here is exponential and guarded by size caps.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{atomic_type, component_labels, is_k_connected, separates, Graph};

pub const DEFAULT_ISO_CAP: usize = 12;

/// An isomorphism `mapping[v]` from `g` to `h`, if one exists.
pub type IsoWitness = Option<Vec<usize>>;

/// Backtracking isomorphism test for graphs of order at most `cap`.
pub fn brute_force_isomorphic(g: &Graph, h: &Graph, cap: usize) -> Result<IsoWitness> {
    let n = g.n();
    if n.max(h.n()) > cap {
        return Err(Error::ResourceCap {
            what: "brute-force isomorphism order".into(),
            requested: n.max(h.n()) as u128,
            cap: cap as u128,
        });
    }
    if n != h.n() || g.m() != h.m() || g.degree_sequence() != h.degree_sequence() {
        return Ok(None);
    }
    // Assign in BFS order so each new vertex has an assigned neighbour.
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for s in 0..n {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let mut i = order.len();
        order.push(s);
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &w in g.neighbours(v) {
                if !placed[w] {
                    placed[w] = true;
                    order.push(w);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(g, h, &order, 0, &mut map, &mut used) {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

fn extend(
    g: &Graph,
    h: &Graph,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for y in 0..h.n() {
        if used[y] || h.degree(y) != g.degree(v) {
            continue;
        }
        let ok = order[..depth]
            .iter()
            .all(|&u| g.has_edge(u, v) == h.has_edge(map[u], y));
        if !ok {
            continue;
        }
        map[v] = y;
        used[y] = true;
        if extend(g, h, order, depth + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[v] = usize::MAX;
    }
    false
}

/// Whether `map` is an isomorphism from `g` to `h`.
pub fn is_isomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    if g.n() != h.n() || map.len() != g.n() || g.m() != h.m() {
        return false;
    }
    let mut seen = vec![false; h.n()];
    for &y in map {
        if y >= h.n() || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    g.edges().iter().all(|&(u, v)| h.has_edge(map[u], map[v]))
}

/// Limits and mode for the bijective pebble game.
#[derive(Clone, Copy, Debug)]
pub struct GameLimits {
    pub max_n: usize,
    pub max_k: usize,
    pub max_rounds: usize,
    /// Search Duplicator bijections as a bipartite matching instead of
    /// enumerating permutations. Both are exact.
    pub prune: bool,
}

impl Default for GameLimits {
    fn default() -> Self {
        GameLimits {
            max_n: 7,
            max_k: 2,
            max_rounds: 4,
            prune: true,
        }
    }
}

/// Game outcomes for every pair of `k`-tuples, computed bottom-up.
///
/// `table[r][a * N + b]` says whether Duplicator survives `r` rounds from
/// tuples with indices `a` in `g` and `b` in `h`, where `N = n^k` and tuple
/// `(u_1, .., u_k)` has index `sum u_j * n^(k - j)`. Same game as
/// [`pebble_game_equivalent`]; both graphs must have order `n`.
pub fn pebble_game_table(
    g: &Graph,
    h: &Graph,
    k: usize,
    rounds: usize,
    limits: GameLimits,
) -> Result<Vec<Vec<bool>>> {
    let n = g.n();
    if h.n() != n || k == 0 {
        return Err(Error::Precondition("game tables need equal orders and k >= 1".into()));
    }
    for (what, requested, cap) in [
        ("pebble game order", n, limits.max_n),
        ("pebble game k", k, limits.max_k),
        ("pebble game rounds", rounds, limits.max_rounds),
    ] {
        if requested > cap {
            return Err(Error::ResourceCap {
                what: what.into(),
                requested: requested as u128,
                cap: cap as u128,
            });
        }
    }
    let big = n.pow(k as u32);
    let tuple = |mut i: usize| {
        let mut t = vec![0; k];
        for j in (0..k).rev() {
            t[j] = i % n;
            i /= n;
        }
        t
    };
    let index = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * n + x);
    let tuples: Vec<Vec<usize>> = (0..big).map(tuple).collect();
    let types_g: Vec<_> = tuples.iter().map(|t| atomic_type(g, t)).collect();
    let types_h: Vec<_> = tuples.iter().map(|t| atomic_type(h, t)).collect();
    let base: Vec<bool> = (0..big * big)
        .map(|i| types_g[i / big] == types_h[i % big])
        .collect();
    let mut table = vec![base];
    for _ in 0..rounds {
        let prev = table.last().unwrap();
        let mut next = vec![false; big * big];
        for a in 0..big {
            for b in 0..big {
                if !table[0][a * big + b] {
                    continue;
                }
                let (u, v) = (&tuples[a], &tuples[b]);
                let compat: Vec<Vec<bool>> = (0..n)
                    .map(|x| {
                        (0..n)
                            .map(|y| {
                                let mut ux = u.clone();
                                ux.push(x);
                                let mut vy = v.clone();
                                vy.push(y);
                                atomic_type(g, &ux) == atomic_type(h, &vy)
                                    && (0..k).all(|j| {
                                        let (mut l, mut r) = (u.clone(), v.clone());
                                        l[j] = x;
                                        r[j] = y;
                                        prev[index(&l) * big + index(&r)]
                                    })
                            })
                            .collect()
                    })
                    .collect();
                next[a * big + b] = if limits.prune {
                    perfect_matching_exists(&compat)
                } else {
                    any_bijection(&compat, 0, &mut vec![false; n])
                };
            }
        }
        table.push(next);
    }
    Ok(table)
}

/// Pebbled tuples in both graphs and the number of rounds left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GamePosition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub rounds: usize,
}

/// Bijective game matching the tuple refinement: Duplicator survives `r`
/// rounds from `(u, v)` iff the atomic types agree and, for `r > 0`, some
/// bijection `f` has `atp(u x) = atp(v f(x))` and survives `r - 1` rounds
/// from every `(u[j <- x], v[j <- f(x)])`.
pub fn pebble_game_equivalent(
    g: &Graph,
    u: &[usize],
    h: &Graph,
    v: &[usize],
    rounds: usize,
    limits: GameLimits,
) -> Result<bool> {
    let k = u.len();
    let cap = |what: &str, requested: usize, cap: usize| -> Result<()> {
        if requested > cap {
            Err(Error::ResourceCap {
                what: what.into(),
                requested: requested as u128,
                cap: cap as u128,
            })
        } else {
            Ok(())
        }
    };
    cap("pebble game order", g.n().max(h.n()), limits.max_n)?;
    cap("pebble game k", k, limits.max_k)?;
    cap("pebble game rounds", rounds, limits.max_rounds)?;
    if k == 0 || v.len() != k {
        return Err(Error::Precondition("pebble tuples must have equal positive length".into()));
    }
    if u.iter().any(|&x| x >= g.n()) || v.iter().any(|&x| x >= h.n()) {
        return Err(Error::Precondition("pebbled vertex out of range".into()));
    }
    if g.n() != h.n() {
        return Ok(false);
    }
    let mut game = Game {
        g,
        h,
        prune: limits.prune,
        memo: HashMap::new(),
    };
    Ok(game.survives(GamePosition {
        left: u.to_vec(),
        right: v.to_vec(),
        rounds,
    }))
}

struct Game<'a> {
    g: &'a Graph,
    h: &'a Graph,
    prune: bool,
    memo: HashMap<GamePosition, bool>,
}

impl Game<'_> {
    fn survives(&mut self, pos: GamePosition) -> bool {
        if let Some(&r) = self.memo.get(&pos) {
            return r;
        }
        let result = self.evaluate(&pos);
        self.memo.insert(pos, result);
        result
    }

    fn evaluate(&mut self, pos: &GamePosition) -> bool {
        if atomic_type(self.g, &pos.left) != atomic_type(self.h, &pos.right) {
            return false;
        }
        if pos.rounds == 0 {
            return true;
        }
        let n = self.g.n();
        let mut compat = vec![vec![false; n]; n];
        for (x, row) in compat.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                *cell = self.compatible(pos, x, y);
            }
        }
        if self.prune {
            perfect_matching_exists(&compat)
        } else {
            let mut used = vec![false; n];
            any_bijection(&compat, 0, &mut used)
        }
    }

    fn compatible(&mut self, pos: &GamePosition, x: usize, y: usize) -> bool {
        let mut ux = pos.left.clone();
        ux.push(x);
        let mut vy = pos.right.clone();
        vy.push(y);
        if atomic_type(self.g, &ux) != atomic_type(self.h, &vy) {
            return false;
        }
        (0..pos.left.len()).all(|j| {
            let mut l = pos.left.clone();
            let mut r = pos.right.clone();
            l[j] = x;
            r[j] = y;
            self.survives(GamePosition {
                left: l,
                right: r,
                rounds: pos.rounds - 1,
            })
        })
    }
}

fn any_bijection(compat: &[Vec<bool>], x: usize, used: &mut [bool]) -> bool {
    if x == compat.len() {
        return true;
    }
    for y in 0..compat.len() {
        if !used[y] && compat[x][y] {
            used[y] = true;
            if any_bijection(compat, x + 1, used) {
                return true;
            }
            used[y] = false;
        }
    }
    false
}

fn perfect_matching_exists(compat: &[Vec<bool>]) -> bool {
    let n = compat.len();
    let mut owner = vec![usize::MAX; n];
    fn augment(x: usize, compat: &[Vec<bool>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for y in 0..compat.len() {
            if compat[x][y] && !seen[y] {
                seen[y] = true;
                if owner[y] == usize::MAX || augment(owner[y], compat, seen, owner) {
                    owner[y] = x;
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|x| augment(x, compat, &mut vec![false; n], &mut owner))
}

/// Every `S` with `|S| <= max_size` that separates `x`, ordered by size
/// then lexicographically. Supersets of minimal separators are included.
pub fn enumerate_separators(g: &Graph, x: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    assert!(max_size <= 2, "separator size is at most 2");
    let n = g.n();
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new()];
    if max_size >= 1 {
        candidates.extend((0..n).map(|a| vec![a]));
    }
    if max_size >= 2 {
        candidates.extend((0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])));
    }
    candidates.into_iter().filter(|s| separates(g, s, x)).collect()
}

/// Coarsest stable partition under neighbour-colour multisets, as sorted
/// classes ordered by their smallest vertex.
pub fn naive_colour_refinement(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut colour = vec![0usize; n];
    let mut classes = if n == 0 { 0 } else { 1 };
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut m: Vec<usize> = g.neighbours(v).iter().map(|&w| colour[w]).collect();
                m.sort_unstable();
                (colour[v], m)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        colour = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        if distinct.len() == classes {
            break;
        }
        classes = distinct.len();
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for v in 0..n {
        let i = *slot.entry(colour[v]).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[i].push(v);
    }
    out
}

/// All induced cycles of `g`, each rotated to start at its least vertex and
/// oriented so the second vertex is smaller than the last.
pub fn enumerate_induced_cycles(g: &Graph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in 0..g.n() {
        let mut path = vec![s];
        let mut on = vec![false; g.n()];
        on[s] = true;
        grow_cycles(g, s, &mut path, &mut on, &mut out);
    }
    out.sort();
    out
}

fn grow_cycles(g: &Graph, s: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let last = *path.last().unwrap();
    for &w in g.neighbours(last) {
        if w <= s || on[w] {
            continue;
        }
        // w may only touch the path at `last`, and at `s` when it closes.
        let interior = if path.len() > 2 { &path[1..path.len() - 1] } else { &[][..] };
        let interior_touch = interior.iter().any(|&p| g.has_edge(p, w));
        if interior_touch {
            continue;
        }
        if path.len() >= 2 && g.has_edge(s, w) {
            // Closing through w: record, but do not extend past a chord to s.
            let mut cyc = path.clone();
            cyc.push(w);
            if cyc[1] < w {
                out.push(cyc);
            }
            continue;
        }
        path.push(w);
        on[w] = true;
        grow_cycles(g, s, path, on, out);
        on[w] = false;
        path.pop();
    }
}

/// Kind of a brute-force block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OracleBlockKind {
    Proper,
    Degenerate3,
    Degenerate2,
}

/// Torso edges and adhesion of `x` computed from the definitions.
pub fn brute_force_torso(g: &Graph, x: &[usize]) -> (Graph, usize) {
    let n = g.n();
    let mut in_x = vec![false; n];
    for &v in x {
        in_x[v] = true;
    }
    let mut local = vec![usize::MAX; n];
    for (i, &v) in x.iter().enumerate() {
        local[v] = i;
    }
    let mut edges = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        for &w in g.neighbours(v) {
            if in_x[w] && i < local[w] {
                edges.push((i, local[w]));
            }
        }
    }
    let (label, count) = component_labels(g, &in_x);
    let mut adhesion = 0;
    for c in 0..count {
        let mut nb: Vec<usize> = (0..n)
            .filter(|&v| in_x[v] && g.neighbours(v).iter().any(|&w| label[w] == c))
            .collect();
        nb.sort_unstable();
        adhesion = adhesion.max(nb.len());
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                edges.push((local[nb[i]].min(local[nb[j]]), local[nb[i]].max(local[nb[j]])));
            }
        }
    }
    (Graph::from_edges_unchecked(x.len(), &edges), adhesion)
}

/// Every block of a connected graph by subset enumeration (`n <= 16`).
pub fn brute_force_blocks(g: &Graph) -> Vec<(Vec<usize>, OracleBlockKind)> {
    let n = g.n();
    assert!(n <= 16, "subset enumeration is limited to 16 vertices");
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let x: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if x.len() < 2 {
            continue;
        }
        let (torso, adhesion) = brute_force_torso(g, &x);
        let complete = torso.m() == x.len() * (x.len() - 1) / 2;
        let kind = match x.len() {
            2 if complete && adhesion <= 1 => Some(OracleBlockKind::Degenerate2),
            3 if complete && adhesion <= 2 => Some(OracleBlockKind::Degenerate3),
            l if l >= 4 && adhesion <= 2 && is_k_connected(&torso, 3) => Some(OracleBlockKind::Proper),
            _ => None,
        };
        if let Some(kind) = kind {
            out.push((x, kind));
        }
    }
    out.sort();
    out
}

/// Block separators from a block list, as sorted vertex sets.
pub fn brute_force_block_separators(g: &Graph, blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for b2 in &blocks[i + 1..] {
            let s: Vec<usize> = b.iter().copied().filter(|v| b2.contains(v)).collect();
            let mut mask = vec![false; g.n()];
            for &v in &s {
                mask[v] = true;
            }
            let (label, _) = component_labels(g, &mask);
            let ca: Vec<usize> = b.iter().filter(|v| !mask[**v]).map(|&v| label[v]).collect();
            let cb: Vec<usize> = b2.iter().filter(|v| !mask[**v]).map(|&v| label[v]).collect();
            if !ca.is_empty() && !cb.is_empty() && ca.iter().all(|c| !cb.contains(c)) {
                out.push(s);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// grown vertex by vertex and deduplicated with the backtracking test.
pub fn graphs_up_to_isomorphism(n: usize) -> Result<Vec<Graph>> {
    if n > 7 {
        return Err(Error::ResourceCap {
            what: "exhaustive graph enumeration order".into(),
            requested: n as u128,
            cap: 7,
        });
    }
    let mut level = vec![Graph::empty(0)];
    for size in 1..=n {
        let mut buckets: HashMap<Vec<(usize, Vec<usize>)>, Vec<Graph>> = HashMap::new();
        let mut out = Vec::new();
        for base in &level {
            let old = base.edges();
            for mask in 0u32..(1 << (size - 1)) {
                let mut e = old.clone();
                e.extend((0..size - 1).filter(|&v| mask >> v & 1 == 1).map(|v| (v, size - 1)));
                let g = Graph::from_edges_unchecked(size, &e);
                let mut key: Vec<(usize, Vec<usize>)> = (0..size)
                    .map(|v| {
                        let mut d: Vec<usize> = g.neighbours(v).iter().map(|&w| g.degree(w)).collect();
                        d.sort_unstable();
                        (g.degree(v), d)
                    })
                    .collect();
                key.sort();
                let bucket = buckets.entry(key).or_default();
                let mut fresh = true;
                for h in bucket.iter() {
                    if brute_force_isomorphic(&g, h, DEFAULT_ISO_CAP)?.is_some() {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    bucket.push(g.clone());
                    out.push(g);
                }
            }
        }
        level = out;
    }
    Ok(level)
}
