//! k-dimensional Weisfeiler-Leman refinement over `V^k` with per-round
//! traces.
//!
//! Round 0 colours a tuple by its atomic type. Round `i + 1` colours it by
//! its previous colour together with the multiset, over all vertices `v`,
//! of the atomic type of `(u_1, .., u_k, v)` and the round-`i` colours of
//! the `k` tuples obtained by putting `v` into each position. Round indices
//! start at 0, so "stable at round `i`" means the partition of round `i`
//! equals that of round `i + 1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Limits for a refinement run.
#[derive(Clone, Debug)]
pub struct WlConfig {
    /// Highest round index that will be computed.
    pub max_rounds: usize,
    /// Largest admissible number of tuples `n^k`.
    pub cap_tuples: u128,
    /// Runs with at most this many multiset entries per round (`n^(k+1)`
    /// summed over the graphs) compare signatures exactly; larger runs
    /// compare 128-bit multiset fingerprints.
    pub exact_entry_limit: u128,
}

impl Default for WlConfig {
    fn default() -> Self {
        WlConfig {
            max_rounds: 10_000,
            cap_tuples: 1 << 27,
            exact_entry_limit: 1 << 22,
        }
    }
}

impl WlConfig {
    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = rounds;
        self
    }
}

/// Colourings of `V^k` for rounds `0..=last`.
///
/// Tuple `(u_1, .., u_k)` lives at index `sum u_j * n^(k - j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouringTrace {
    k: usize,
    n: usize,
    rounds: Vec<Vec<u32>>,
    stable_index: Option<usize>,
}

impl ColouringTrace {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored rounds (the last stored round is `num_rounds() - 1`).
    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn stable_index(&self) -> Option<usize> {
        self.stable_index
    }

    pub fn colours(&self, round: usize) -> Result<&[u32]> {
        self.rounds
            .get(round)
            .map(Vec::as_slice)
            .ok_or(Error::RoundOutOfRange {
                round,
                available: self.rounds.len(),
            })
    }

    /// Colours at `round`, reusing the last stored round once the trace is
    /// stable (the partition no longer changes after that).
    pub fn colours_clamped(&self, round: usize) -> Result<&[u32]> {
        if self.stable_index.is_some() && round >= self.rounds.len() {
            return self.colours(self.rounds.len() - 1);
        }
        self.colours(round)
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.k);
        tuple.iter().fold(0, |acc, &u| acc * self.n + u)
    }

    pub fn tuple_at(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    pub fn num_classes(&self, round: usize) -> Result<usize> {
        Ok(self.histogram(round)?.len())
    }

    /// `(colour, count)` pairs sorted by colour.
    pub fn histogram(&self, round: usize) -> Result<Vec<(u32, usize)>> {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &c in self.colours(round)? {
            *counts.entry(c).or_default() += 1;
        }
        let mut out: Vec<_> = counts.into_iter().collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The vertex partition of the last stored round for `k = 1`, as
    /// sorted classes ordered by their smallest vertex.
    pub fn final_vertex_partition(&self) -> Vec<Vec<usize>> {
        assert_eq!(self.k, 1, "vertex partitions exist for k = 1 only");
        partition_of(self.rounds.last().expect("trace has round 0"))
    }

    /// `round,colour,count` rows for every stored round.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("round,colour,count\n");
        for round in 0..self.rounds.len() {
            for (c, count) in self.histogram(round).expect("stored round") {
                out.push_str(&format!("{round},{c},{count}\n"));
            }
        }
        out
    }

    /// One `u1,u2,.. colour` line per tuple.
    pub fn tuple_dump(&self, round: usize) -> Result<String> {
        let colours = self.colours(round)?;
        let mut out = String::new();
        for (i, c) in colours.iter().enumerate() {
            let t: Vec<String> = self.tuple_at(i).iter().map(usize::to_string).collect();
            out.push_str(&format!("{} {c}\n", t.join(",")));
        }
        Ok(out)
    }
}

/// Classes of a colouring as index sets, ordered by smallest member.
pub fn partition_of(colours: &[u32]) -> Vec<Vec<usize>> {
    let mut first: HashMap<u32, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, &c) in colours.iter().enumerate() {
        let slot = *first.entry(c).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[slot].push(i);
    }
    classes
}

/// Result of refining two graphs with a shared colour dictionary.
#[derive(Clone, Debug)]
pub struct JointRun {
    pub left: ColouringTrace,
    pub right: ColouringTrace,
    /// Least round whose colour histograms differ, if any was found.
    pub distinguishing_round: Option<usize>,
    /// Smallest round at which the partition of the union of both tuple
    /// sets is stable, if reached within `max_rounds`.
    pub joint_stable_index: Option<usize>,
}

pub fn wl_run(g: &Graph, k: usize, cfg: &WlConfig) -> Result<ColouringTrace> {
    let (mut traces, _) = refine_all(&[g], k, cfg)?;
    Ok(traces.pop().expect("one trace"))
}

pub fn wl_joint(g: &Graph, h: &Graph, k: usize, cfg: &WlConfig) -> Result<JointRun> {
    let (mut traces, joint_stable_index) = refine_all(&[g, h], k, cfg)?;
    let right = traces.pop().expect("two traces");
    let left = traces.pop().expect("two traces");
    let mut distinguishing_round = None;
    if g.n() != h.n() {
        distinguishing_round = Some(0);
    } else {
        for round in 0..left.num_rounds() {
            if left.histogram(round)? != right.histogram(round)? {
                distinguishing_round = Some(round);
                break;
            }
        }
    }
    Ok(JointRun {
        left,
        right,
        distinguishing_round,
        joint_stable_index,
    })
}

/// The stable round of a trace, or [`Error::NotStable`] when the run was
/// cut off by `max_rounds` first.
pub fn stable_round(trace: &ColouringTrace) -> Result<usize> {
    trace.stable_index.ok_or(Error::NotStable {
        rounds: trace.num_rounds(),
    })
}

pub fn colour_histogram(trace: &ColouringTrace, round: usize) -> Result<Vec<(u32, usize)>> {
    trace.histogram(round)
}

/// Refines all graphs in lockstep with shared dictionaries. Returns one
/// trace per graph plus the joint stable index.
fn refine_all(graphs: &[&Graph], k: usize, cfg: &WlConfig) -> Result<(Vec<ColouringTrace>, Option<usize>)> {
    if !(1..=3).contains(&k) {
        return Err(Error::Precondition(format!("k must be in 1..=3, got {k}")));
    }
    let mut entries: u128 = 0;
    for g in graphs {
        let tuples = (g.n() as u128).pow(k as u32);
        if tuples > cfg.cap_tuples {
            return Err(Error::ResourceCap {
                what: format!("n^k tuples (n={}, k={k})", g.n()),
                requested: tuples,
                cap: cfg.cap_tuples,
            });
        }
        entries += tuples * g.n() as u128;
    }
    let exact = entries <= cfg.exact_entry_limit;
    let contexts: Vec<GraphContext> = graphs.iter().map(|g| GraphContext::new(g, k)).collect();

    let mut rounds: Vec<Vec<Vec<u32>>> = vec![initial_colouring(&contexts)];
    let mut joint_stable = None;
    while rounds.len() <= cfg.max_rounds {
        let prev = rounds.last().expect("round 0");
        let next = if exact {
            refine_exact(&contexts, prev)
        } else {
            refine_fingerprint(&contexts, prev)
        };
        if same_partition(prev.iter().zip(&next).map(|(a, b)| (a.as_slice(), b.as_slice()))) {
            joint_stable = Some(rounds.len() - 1);
            break;
        }
        rounds.push(next);
    }

    let traces = contexts
        .iter()
        .enumerate()
        .map(|(gi, ctx)| {
            let per_graph: Vec<Vec<u32>> = rounds.iter().map(|r| r[gi].clone()).collect();
            let mut stable_index = None;
            for i in 0..per_graph.len().saturating_sub(1) {
                if same_partition(std::iter::once((per_graph[i].as_slice(), per_graph[i + 1].as_slice()))) {
                    stable_index = Some(i);
                    break;
                }
            }
            if stable_index.is_none() && joint_stable.is_some() {
                stable_index = Some(per_graph.len() - 1);
            }
            ColouringTrace {
                k,
                n: ctx.n,
                rounds: per_graph,
                stable_index,
            }
        })
        .collect();
    Ok((traces, joint_stable))
}

struct GraphContext<'a> {
    g: &'a Graph,
    n: usize,
    k: usize,
    /// Dense adjacency bitset rows when `n` is small enough.
    bits: Option<Vec<u64>>,
    words: usize,
}

impl<'a> GraphContext<'a> {
    fn new(g: &'a Graph, k: usize) -> Self {
        let n = g.n();
        let words = n.div_ceil(64);
        let bits = (n <= 1 << 15).then(|| {
            let mut bits = vec![0u64; n * words];
            for (u, v) in g.edges() {
                bits[u * words + v / 64] |= 1 << (v % 64);
                bits[v * words + u / 64] |= 1 << (u % 64);
            }
            bits
        });
        GraphContext { g, n, k, bits, words }
    }

    #[inline]
    fn adjacent(&self, u: usize, v: usize) -> bool {
        match &self.bits {
            Some(bits) => bits[u * self.words + v / 64] >> (v % 64) & 1 == 1,
            None => self.g.has_edge(u, v),
        }
    }

    fn num_tuples(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
    }

    /// Relation bits of `v` against each coordinate: bit `2j` equality,
    /// bit `2j + 1` adjacency.
    #[inline]
    fn relation(&self, tuple: &[usize], v: usize) -> u128 {
        let mut rel = 0u128;
        for (j, &u) in tuple.iter().enumerate() {
            if u == v {
                rel |= 1 << (2 * j);
            } else if self.adjacent(u, v) {
                rel |= 1 << (2 * j + 1);
            }
        }
        rel
    }

    /// Calls `f(entry)` for every `v`, where the entry packs the relation
    /// bits of `v` and the colours of the `k` substituted tuples.
    fn for_each_entry(&self, index: usize, colours: &[u32], transposed: Option<&[u32]>, mut f: impl FnMut(u128)) {
        let mut tuple = [0usize; 3];
        let tuple = &mut tuple[..self.k];
        self.digits(index, tuple);
        let n = self.n;
        let k = self.k;
        let mut strides = [0usize; 3];
        let mut bases = [0usize; 3];
        for j in 0..k {
            strides[j] = n.pow((k - 1 - j) as u32);
            bases[j] = index - tuple[j] * strides[j];
        }
        for v in 0..n {
            let mut entry = self.relation(tuple, v);
            for j in 0..k {
                let c = match (j, transposed) {
                    (0, Some(t)) if k == 2 => t[tuple[1] * n + v],
                    _ => colours[bases[j] + v * strides[j]],
                };
                entry |= (c as u128) << (6 + 32 * j);
            }
            f(entry);
        }
    }
}

fn initial_colouring(contexts: &[GraphContext]) -> Vec<Vec<u32>> {
    let raw: Vec<Vec<u64>> = contexts
        .iter()
        .map(|ctx| {
            let mut tuple = vec![0usize; ctx.k];
            (0..ctx.num_tuples())
                .map(|i| {
                    ctx.digits(i, &mut tuple);
                    atomic_code(ctx, &tuple)
                })
                .collect()
        })
        .collect();
    renumber(raw)
}

fn atomic_code(ctx: &GraphContext, tuple: &[usize]) -> u64 {
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] == tuple[j] {
                code |= 1 << bit;
            } else if ctx.adjacent(tuple[i], tuple[j]) {
                code |= 1 << (bit + 1);
            }
            bit += 2;
        }
    }
    code
}

/// Replaces keys by their rank among all distinct keys of all graphs.
fn renumber<K: Ord + Clone + std::hash::Hash>(raw: Vec<Vec<K>>) -> Vec<Vec<u32>> {
    let mut distinct: Vec<K> = raw.iter().flatten().cloned().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let rank: HashMap<K, u32> = distinct
        .into_iter()
        .enumerate()
        .map(|(i, key)| (key, i as u32))
        .collect();
    raw.into_iter()
        .map(|keys| keys.iter().map(|key| rank[key]).collect())
        .collect()
}

fn transpose_if_useful(ctx: &GraphContext, colours: &[u32]) -> Option<Vec<u32>> {
    (ctx.k == 2).then(|| {
        let n = ctx.n;
        let mut t = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                t[b * n + a] = colours[a * n + b];
            }
        }
        t
    })
}

fn refine_exact(contexts: &[GraphContext], prev: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut dictionary: HashMap<Vec<u128>, u32> = HashMap::new();
    let mut keys: Vec<Vec<u128>> = Vec::new();
    let mut provisional: Vec<Vec<u32>> = Vec::with_capacity(contexts.len());
    let mut signature: Vec<u128> = Vec::new();
    for (ctx, colours) in contexts.iter().zip(prev) {
        let transposed = transpose_if_useful(ctx, colours);
        let mut ids = Vec::with_capacity(ctx.num_tuples());
        for index in 0..ctx.num_tuples() {
            signature.clear();
            ctx.for_each_entry(index, colours, transposed.as_deref(), |e| signature.push(e));
            signature.sort_unstable();
            signature.push(colours[index] as u128);
            let id = match dictionary.get(&signature) {
                Some(&id) => id,
                None => {
                    let id = keys.len() as u32;
                    dictionary.insert(signature.clone(), id);
                    keys.push(signature.clone());
                    id
                }
            };
            ids.push(id);
        }
        provisional.push(ids);
    }
    canonical_ranks(provisional, &keys)
}

fn refine_fingerprint(contexts: &[GraphContext], prev: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut dictionary: HashMap<(u32, u128), u32> = HashMap::new();
    let mut keys: Vec<(u32, u128)> = Vec::new();
    let mut provisional = Vec::with_capacity(contexts.len());
    for (ctx, colours) in contexts.iter().zip(prev) {
        let transposed = transpose_if_useful(ctx, colours);
        let mut ids = Vec::with_capacity(ctx.num_tuples());
        for index in 0..ctx.num_tuples() {
            let (mut lo, mut hi) = (0u64, 0u64);
            ctx.for_each_entry(index, colours, transposed.as_deref(), |e| {
                let (a, b) = entry_hash(e);
                lo = lo.wrapping_add(a);
                hi = hi.wrapping_add(b);
            });
            let key = (colours[index], (hi as u128) << 64 | lo as u128);
            let id = *dictionary.entry(key).or_insert_with(|| {
                keys.push(key);
                keys.len() as u32 - 1
            });
            ids.push(id);
        }
        provisional.push(ids);
    }
    canonical_ranks(provisional, &keys)
}

/// Maps provisional ids (insertion order) to ranks of the sorted keys so
/// colour names do not depend on tuple visiting order.
fn canonical_ranks<K: Ord>(provisional: Vec<Vec<u32>>, keys: &[K]) -> Vec<Vec<u32>> {
    let mut order: Vec<u32> = (0..keys.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
    let mut rank = vec![0u32; keys.len()];
    for (r, &id) in order.iter().enumerate() {
        rank[id as usize] = r as u32;
    }
    provisional
        .into_iter()
        .map(|ids| ids.into_iter().map(|id| rank[id as usize]).collect())
        .collect()
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn entry_hash(e: u128) -> (u64, u64) {
    let lo = e as u64;
    let hi = (e >> 64) as u64;
    let a = splitmix(lo ^ splitmix(hi ^ 0x51_7C_C1_B7_27_22_0A_95));
    let b = splitmix(lo.rotate_left(29) ^ splitmix(hi.wrapping_add(0x2545_F491_4F6C_DD1D)));
    (a, b)
}

/// Whether two consecutive colourings induce the same partition. Counts
/// the classes and checks that the class correspondence is one-to-one.
fn same_partition<'a>(pairs: impl Iterator<Item = (&'a [u32], &'a [u32])>) -> bool {
    let mut forward: HashMap<u32, u32> = HashMap::new();
    let mut backward: HashMap<u32, u32> = HashMap::new();
    for (p, q) in pairs {
        for (&a, &b) in p.iter().zip(q) {
            if *forward.entry(a).or_insert(b) != b || *backward.entry(b).or_insert(a) != a {
                return false;
            }
        }
    }
    forward.len() == backward.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges_unchecked(n, &edges)
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges_unchecked(n, &edges)
    }

    fn cfg() -> WlConfig {
        WlConfig::default()
    }

    #[test]
    fn triangle_is_stable_immediately() {
        let t = wl_run(&cycle(3), 1, &cfg()).unwrap();
        assert_eq!(stable_round(&t).unwrap(), 0);
        assert_eq!(colour_histogram(&t, 0).unwrap().len(), 1);
        assert_eq!(colour_histogram(&t, 0).unwrap()[0].1, 3);
    }

    #[test]
    fn star_splits_once() {
        let star = Graph::from_edges_unchecked(4, &[(0, 1), (0, 2), (0, 3)]);
        let t = wl_run(&star, 1, &cfg()).unwrap();
        assert_eq!(stable_round(&t).unwrap(), 1);
        let mut counts: Vec<usize> = colour_histogram(&t, 1).unwrap().iter().map(|p| p.1).collect();
        counts.sort();
        assert_eq!(counts, vec![1, 3]);
        assert_eq!(t.final_vertex_partition(), vec![vec![0], vec![1, 2, 3]]);
    }

    #[test]
    fn p4_ends_and_middles() {
        let t = wl_run(&path(4), 1, &cfg()).unwrap();
        assert_eq!(partition_of(t.colours(1).unwrap()), vec![vec![0, 3], vec![1, 2]]);
        assert_eq!(stable_round(&t).unwrap(), 1);
    }

    #[test]
    fn histogram_sums_to_tuple_count() {
        let g = path(5);
        for k in 1..=3 {
            let t = wl_run(&g, k, &cfg()).unwrap();
            for r in 0..t.num_rounds() {
                let total: usize = t.histogram(r).unwrap().iter().map(|p| p.1).sum();
                assert_eq!(total, 5usize.pow(k as u32));
            }
        }
    }

    #[test]
    fn joint_c6_versus_two_triangles() {
        let c6 = cycle(6);
        let two_c3 = Graph::from_edges_unchecked(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let run1 = wl_joint(&c6, &two_c3, 1, &cfg()).unwrap();
        assert_eq!(run1.distinguishing_round, None);
        let run2 = wl_joint(&c6, &two_c3, 2, &cfg()).unwrap();
        assert!(run2.distinguishing_round.unwrap() >= 1);
        let same = wl_joint(&c6, &c6, 2, &cfg()).unwrap();
        assert_eq!(same.distinguishing_round, None);
    }

    #[test]
    fn cap_and_range_errors() {
        let g = path(10);
        let small = WlConfig {
            cap_tuples: 50,
            ..WlConfig::default()
        };
        assert!(matches!(wl_run(&g, 2, &small), Err(Error::ResourceCap { requested: 100, .. })));
        let t = wl_run(&g, 1, &cfg()).unwrap();
        assert!(matches!(t.histogram(99), Err(Error::RoundOutOfRange { .. })));
        let cut = wl_run(&g, 1, &cfg().with_max_rounds(1)).unwrap();
        assert!(matches!(stable_round(&cut), Err(Error::NotStable { .. })));
        assert_eq!(cut.num_rounds(), 2);
    }

    #[test]
    fn exact_and_fingerprint_agree_on_partitions() {
        let g = Graph::from_edges_unchecked(
            7,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (0, 3), (2, 5)],
        );
        let fp = WlConfig {
            exact_entry_limit: 0,
            ..WlConfig::default()
        };
        for k in 1..=2 {
            let a = wl_run(&g, k, &cfg()).unwrap();
            let b = wl_run(&g, k, &fp).unwrap();
            assert_eq!(a.stable_index(), b.stable_index());
            for r in 0..a.num_rounds() {
                assert_eq!(partition_of(a.colours(r).unwrap()), partition_of(b.colours(r).unwrap()));
            }
        }
    }

    #[test]
    fn tuple_indexing_round_trips() {
        let t = wl_run(&path(4), 2, &cfg()).unwrap();
        for i in 0..16 {
            assert_eq!(t.tuple_index(&t.tuple_at(i)), i);
        }
        assert!(t.tuple_dump(0).unwrap().starts_with("0,0 "));
        assert!(t.histogram_csv().starts_with("round,colour,count\n0,"));
    }
}
