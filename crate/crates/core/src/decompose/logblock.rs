use std::collections::{HashSet, VecDeque};

use super::blocks::{BlockKind, BlockResolver};
use super::treedec::tree_logdec;
use super::validate::find_cover;
use super::tutte::tutte_block_decomposition;
use super::{decomposition_tree, merge_sorted, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Log-height decomposition whose bags are unions of at most four blocks
/// or block separators.
///
/// The log-height decomposition of the block tree is computed with the
/// first block in the root. Each block goes to the topmost node holding
/// it; a block held further down contributes only its intersection with
/// the unique neighbouring block that first appears below that node.
/// Subtrees whose remainder falls apart in `g` are then copied once per
/// component, with bags restricted to that component.
pub fn log_block_decomposition(g: &Graph) -> Result<RootedDecomposition> {
    let raw = activator_decomposition(g)?;
    Ok(split_disconnected_remainders(g, &raw))
}

/// The activator construction on its own, before remainders are split.
pub(crate) fn activator_decomposition(g: &Graph) -> Result<RootedDecomposition> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Precondition(
            "log block decomposition needs a connected, non-empty graph".into(),
        ));
    }
    let blocks = tutte_block_decomposition(g)?;
    let t = decomposition_tree(&blocks);
    let tstar = tree_logdec(&t, &[0])?;
    let order = tstar.preorder();
    let mut top = vec![usize::MAX; t.n()];
    for &x in &order {
        for &tn in tstar.bag(x) {
            if top[tn] == usize::MAX {
                top[tn] = x;
            }
        }
    }
    // Entry/exit times for subtree tests.
    let children = tstar.children();
    let mut tin = vec![0; tstar.len()];
    let mut tout = vec![0; tstar.len()];
    let mut clock = 0;
    let mut stack = vec![(tstar.root(), false)];
    while let Some((x, done)) = stack.pop() {
        if done {
            tout[x] = clock;
            continue;
        }
        tin[x] = clock;
        clock += 1;
        stack.push((x, true));
        for &c in children[x].iter().rev() {
            stack.push((c, false));
        }
    }
    let below = |anc: usize, x: usize| tin[anc] <= tin[x] && tin[x] < tout[anc];

    let mut bags = Vec::with_capacity(tstar.len());
    let mut parts = Vec::with_capacity(tstar.len());
    for x in 0..tstar.len() {
        let mut bag: Vec<usize> = Vec::new();
        let mut mine: Vec<Vec<usize>> = Vec::new();
        for &tn in tstar.bag(x) {
            let part = if top[tn] == x {
                Some(blocks.bag(tn).to_vec())
            } else {
                let activators: Vec<usize> = t
                    .neighbours(tn)
                    .iter()
                    .copied()
                    .filter(|&u| below(x, top[u]))
                    .collect();
                debug_assert!(activators.len() <= 1, "activator is unique");
                activators.first().map(|&u| {
                    blocks
                        .bag(tn)
                        .iter()
                        .copied()
                        .filter(|v| blocks.bag(u).binary_search(v).is_ok())
                        .collect()
                })
            };
            if let Some(p) = part {
                bag = merge_sorted(&bag, &p);
                if !mine.contains(&p) {
                    mine.push(p);
                }
            }
        }
        bags.push(bag);
        parts.push(mine);
    }
    let parent = (0..tstar.len()).map(|x| tstar.parent(x)).collect();
    Ok(RootedDecomposition::new(parent, bags)?.with_constituents(parts))
}

struct Splitter<'a> {
    g: &'a Graph,
    d: &'a RootedDecomposition,
    children: Vec<Vec<usize>>,
    unions: Vec<Vec<usize>>,
    mark: Vec<u32>,
    stamp: u32,
    bags: Vec<Vec<usize>>,
    parts: Vec<Vec<Vec<usize>>>,
    parent: Vec<Option<usize>>,
    resolver: Option<BlockResolver<'a>>,
}

/// Copies each subtree once per component of its remainder in `g`.
/// Copies whose restricted bag lies inside the bag above are contracted.
fn split_disconnected_remainders(g: &Graph, d: &RootedDecomposition) -> RootedDecomposition {
    let mut s = Splitter {
        g,
        d,
        children: d.children(),
        unions: d.subtree_unions(),
        mark: vec![0; g.n()],
        stamp: 0,
        bags: Vec::new(),
        parts: Vec::new(),
        parent: Vec::new(),
        resolver: None,
    };
    s.emit(d.root(), None, None);
    renumber(s.parent, s.bags, s.parts)
}

impl Splitter<'_> {
    /// Emits `old` restricted to `allowed` below `above`, merging it into
    /// `above` when nothing new remains.
    fn emit(&mut self, old: usize, allowed: Option<&HashSet<usize>>, above: Option<usize>) {
        let keep = |v: &usize| allowed.is_none_or(|a| a.contains(v));
        let bag: Vec<usize> = self.d.bag(old).iter().copied().filter(keep).collect();
        let here = match above {
            Some(a) if bag.iter().all(|v| self.bags[a].binary_search(v).is_ok()) => a,
            _ => {
                let mut bag = bag;
                let mut mine: Vec<Vec<usize>> = Vec::new();
                for p in &self.d.constituents().expect("constituents are recorded")[old] {
                    let q: Vec<usize> = p.iter().copied().filter(keep).collect();
                    if !q.is_empty() && !mine.contains(&q) {
                        mine.push(q);
                    }
                }
                self.absorb_split_parts(old, &keep, &mut bag, &mut mine);
                // A restricted part may shrink to a non-block; drop the ones
                // covered by another part.
                let covered = |i: usize| {
                    mine.iter().enumerate().any(|(j, o)| {
                        j != i && mine[i].len() < o.len() && mine[i].iter().all(|v| o.contains(v))
                    })
                };
                let keep_parts: Vec<bool> = (0..mine.len()).map(|i| !covered(i)).collect();
                let mut it = keep_parts.iter();
                mine.retain(|_| *it.next().unwrap());
                let resolver = self.resolver.get_or_insert_with(|| BlockResolver::new(self.g));
                if mine.iter().any(|p| resolver.classify(p) == BlockKind::Invalid) {
                    if let Some(cover) = find_cover(resolver, &bag) {
                        mine = cover;
                    }
                }
                self.bags.push(bag);
                self.parts.push(mine);
                self.parent.push(above);
                self.bags.len() - 1
            }
        };
        for w in self.children[old].clone() {
            let gamma: Vec<usize> = self.unions[w]
                .iter()
                .copied()
                .filter(keep)
                .filter(|v| self.bags[here].binary_search(v).is_err())
                .collect();
            for comp in self.components(&gamma) {
                let restriction: HashSet<usize> =
                    comp.into_iter().chain(self.bags[here].iter().copied()).collect();
                self.emit(w, Some(&restriction), Some(here));
            }
        }
    }

    /// Moves into `bag` every part below `old` that would otherwise be cut
    /// across two components of a remainder.
    fn absorb_split_parts(
        &mut self,
        old: usize,
        keep: &dyn Fn(&usize) -> bool,
        bag: &mut Vec<usize>,
        mine: &mut Vec<Vec<usize>>,
    ) {
        let parts = self.d.constituents().expect("constituents are recorded");
        loop {
            let mut grew = false;
            for w in self.children[old].clone() {
                let gamma: Vec<usize> = self.unions[w]
                    .iter()
                    .copied()
                    .filter(keep)
                    .filter(|v| bag.binary_search(v).is_err())
                    .collect();
                let comps = self.components(&gamma);
                if comps.len() < 2 {
                    continue;
                }
                let mut comp_of = std::collections::HashMap::new();
                for (i, c) in comps.iter().enumerate() {
                    for &v in c {
                        comp_of.insert(v, i);
                    }
                }
                let mut stack = vec![w];
                while let Some(u) = stack.pop() {
                    for p in &parts[u] {
                        let mut seen = p.iter().filter_map(|v| comp_of.get(v));
                        let first = seen.next();
                        if first.is_some_and(|f| seen.any(|c| c != f)) {
                            let q: Vec<usize> = p.iter().copied().filter(keep).collect();
                            *bag = merge_sorted(bag, &q);
                            mine.push(q);
                            grew = true;
                        }
                    }
                    if grew {
                        break;
                    }
                    stack.extend(&self.children[u]);
                }
                if grew {
                    break;
                }
            }
            if !grew {
                return;
            }
        }
    }

    fn components(&mut self, set: &[usize]) -> Vec<Vec<usize>> {
        self.stamp += 2;
        let s = self.stamp;
        for &v in set {
            self.mark[v] = s;
        }
        let mut out = Vec::new();
        for &seed in set {
            if self.mark[seed] != s {
                continue;
            }
            self.mark[seed] = s + 1;
            let mut comp = vec![seed];
            let mut queue = VecDeque::from([seed]);
            while let Some(v) = queue.pop_front() {
                for &u in self.g.neighbours(v) {
                    if self.mark[u] == s {
                        self.mark[u] = s + 1;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Renumbers nodes in breadth-first order from the root (node 0).
fn renumber(
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
    parts: Vec<Vec<Vec<usize>>>,
) -> RootedDecomposition {
    let raw = RootedDecomposition::new(parent, bags).expect("splitting keeps a tree");
    let order = raw.preorder();
    let mut new_id = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        new_id[v] = k;
    }
    let parent = order.iter().map(|&v| raw.parent(v).map(|p| new_id[p])).collect();
    let bags = order.iter().map(|&v| raw.bag(v).to_vec()).collect();
    let parts = order.iter().map(|&v| parts[v].clone()).collect();
    RootedDecomposition::new(parent, bags)
        .expect("renumbering keeps a tree")
        .with_constituents(parts)
}
