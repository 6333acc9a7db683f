use std::collections::{HashSet, VecDeque};

use super::RootedDecomposition;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A node `t` such that every component of `tree - t` carries at most half
/// of the total weight. Rooted at the smallest id, the walk moves into a
/// child subtree while that subtree is heavier than half.
pub fn find_balanced_node(tree: &Graph, weights: &[u64]) -> usize {
    assert!(tree.n() > 0, "tree must be non-empty");
    assert_eq!(weights.len(), tree.n());
    let nodes: Vec<usize> = (0..tree.n()).collect();
    let mut scratch = Scratch::new(tree.n());
    scratch.balanced(tree, &nodes, &|v| weights[v])
}

struct Scratch {
    mark: Vec<u32>,
    stamp: u32,
    parent: Vec<usize>,
    sub: Vec<u64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            mark: vec![0; n],
            stamp: 0,
            parent: vec![usize::MAX; n],
            sub: vec![0; n],
        }
    }

    fn fresh(&mut self, nodes: &[usize]) -> u32 {
        self.stamp += 1;
        for &v in nodes {
            self.mark[v] = self.stamp;
        }
        self.stamp
    }

    /// `nodes` must be sorted and induce a subtree.
    fn balanced(&mut self, t: &Graph, nodes: &[usize], weight: &dyn Fn(usize) -> u64) -> usize {
        let s = self.fresh(nodes);
        let root = nodes[0];
        let mut order = vec![root];
        self.parent[root] = usize::MAX;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &w in t.neighbours(v) {
                if self.mark[w] == s && w != self.parent[v] {
                    self.parent[w] = v;
                    order.push(w);
                }
            }
        }
        for &v in &order {
            self.sub[v] = weight(v);
        }
        for &v in order.iter().rev() {
            if v != root {
                let p = self.parent[v];
                self.sub[p] += self.sub[v];
            }
        }
        let total = self.sub[root];
        let mut cur = root;
        'walk: loop {
            for &w in t.neighbours(cur) {
                if self.mark[w] == s && self.parent[w] == cur && w != self.parent[cur] && 2 * self.sub[w] > total {
                    cur = w;
                    continue 'walk;
                }
            }
            break;
        }
        cur
    }

    /// Components of `nodes - x`, each sorted, ordered by least element.
    fn components_without(&mut self, t: &Graph, nodes: &[usize], x: usize) -> Vec<Vec<usize>> {
        let s = self.fresh(nodes);
        self.mark[x] = 0;
        let mut out = Vec::new();
        for &seed in nodes {
            if self.mark[seed] != s {
                continue;
            }
            self.mark[seed] = 0;
            let mut comp = vec![seed];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in t.neighbours(v) {
                    if self.mark[w] == s {
                        self.mark[w] = 0;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

struct Builder<'a> {
    t: &'a Graph,
    scratch: Scratch,
    bags: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn neighbour_in(t: &Graph, x: usize, comp: &[usize]) -> usize {
    *t.neighbours(x)
        .iter()
        .find(|w| comp.binary_search(w).is_ok())
        .expect("component is adjacent to the removed node")
}

impl Builder<'_> {
    fn node(&mut self, bag: Vec<usize>) -> usize {
        self.bags.push(sorted(bag));
        self.children.push(Vec::new());
        self.bags.len() - 1
    }

    fn rec(&mut self, nodes: &[usize], b: &[usize]) -> usize {
        let n = nodes.len();
        let root = if n == 1 {
            self.node(nodes.to_vec())
        } else if n <= 4 {
            let r = self.node(b.to_vec());
            let leaf = self.node(nodes.to_vec());
            self.children[r].push(leaf);
            r
        } else if b.len() < 3 {
            self.split_small(nodes, b)
        } else {
            self.split_full(nodes, b)
        };
        debug_assert!(b.iter().all(|x| self.bags[root].contains(x)));
        debug_assert!(self.bags[root].iter().filter(|x| !b.contains(x)).count() <= 1);
        root
    }

    /// `|B| < 3`: split at a node balancing the sizes.
    fn split_small(&mut self, nodes: &[usize], b: &[usize]) -> usize {
        let bn = self.scratch.balanced(self.t, nodes, &|_| 1);
        let comps = self.scratch.components_without(self.t, nodes, bn);
        let plan: Vec<(Vec<usize>, Vec<usize>)> = comps
            .into_iter()
            .map(|c| {
                let ci = neighbour_in(self.t, bn, &c);
                let mut bi: Vec<usize> = b.iter().copied().filter(|x| c.binary_search(x).is_ok()).collect();
                bi.push(ci);
                (c, sorted(bi))
            })
            .collect();
        let mut top = b.to_vec();
        top.push(bn);
        let r = self.node(top);
        for (c, bi) in plan {
            let mut mid = bi.clone();
            mid.push(bn);
            let ri = self.node(mid);
            self.children[r].push(ri);
            let sub = self.rec(&c, &bi);
            self.children[ri].push(sub);
        }
        r
    }

    /// `|B| = 3`: split at a node separating `B`, then split every
    /// component once more at a size-balancing node.
    fn split_full(&mut self, nodes: &[usize], b: &[usize]) -> usize {
        let n = nodes.len();
        let in_b: HashSet<usize> = b.iter().copied().collect();
        let bn = self
            .scratch
            .balanced(self.t, nodes, &|v| u64::from(in_b.contains(&v)));
        let comps = self.scratch.components_without(self.t, nodes, bn);
        let mut top = b.to_vec();
        top.push(bn);
        let r = self.node(top);
        for ci in comps {
            let bi: Vec<usize> = b.iter().copied().filter(|x| ci.binary_search(x).is_ok()).collect();
            debug_assert!(bi.len() <= 1);
            // The neighbour of bn in this component; its edge to bn has to
            // be covered by the bag holding bn.
            let x = neighbour_in(self.t, bn, &ci);
            let x_ok = {
                let parts = self.scratch.components_without(self.t, &ci, x);
                parts.iter().all(|p| 2 * p.len() <= n)
            };
            let c = if x_ok {
                x
            } else {
                self.scratch.balanced(self.t, &ci, &|_| 1)
            };
            let mut carried = bi.clone();
            if x != c && !bi.contains(&x) {
                carried.push(x);
            }
            let mut rb = carried.clone();
            rb.push(c);
            rb.push(bn);
            let ri = self.node(rb);
            self.children[r].push(ri);
            let parts = self.scratch.components_without(self.t, &ci, c);
            let plan: Vec<(Vec<usize>, Vec<usize>)> = parts
                .into_iter()
                .map(|d| {
                    let dj = neighbour_in(self.t, c, &d);
                    let mut bij: Vec<usize> =
                        carried.iter().copied().filter(|v| d.binary_search(v).is_ok()).collect();
                    bij.push(dj);
                    (d, sorted(bij))
                })
                .collect();
            for (d, bij) in plan {
                let sub = self.rec(&d, &bij);
                if bij.len() <= 2 {
                    self.bags[sub].push(c);
                    self.bags[sub].sort_unstable();
                    self.children[ri].push(sub);
                } else {
                    let mut q = bij.clone();
                    q.push(c);
                    let qn = self.node(q);
                    self.children[ri].push(qn);
                    self.children[qn].push(sub);
                }
            }
        }
        r
    }

    /// Copies subtrees per component of their remainder so that every
    /// subtree-union minus the parent bag is connected.
    fn split_components(&self, root: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let mut bags = Vec::new();
        let mut children = Vec::new();
        let mut mark = vec![0u32; self.t.n()];
        let mut stamp = 0u32;
        self.emit(root, None, &mut bags, &mut children, &mut mark, &mut stamp);
        (bags, children)
    }

    fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            i += 1;
            out.extend(&self.children[x]);
        }
        out
    }

    fn emit(
        &self,
        old: usize,
        allowed: Option<&HashSet<usize>>,
        bags: &mut Vec<Vec<usize>>,
        children: &mut Vec<Vec<usize>>,
        mark: &mut [u32],
        stamp: &mut u32,
    ) -> usize {
        let keep = |v: &usize| allowed.is_none_or(|a| a.contains(v));
        let bag: Vec<usize> = self.bags[old].iter().copied().filter(keep).collect();
        let id = bags.len();
        bags.push(bag.clone());
        children.push(Vec::new());
        for &w in &self.children[old] {
            let mut gamma: Vec<usize> = self
                .subtree(w)
                .into_iter()
                .flat_map(|x| self.bags[x].iter().copied())
                .filter(keep)
                .filter(|v| bag.binary_search(v).is_err())
                .collect();
            gamma.sort_unstable();
            gamma.dedup();
            *stamp += 2;
            let s = *stamp;
            for &v in &gamma {
                mark[v] = s;
            }
            for &seed in &gamma {
                if mark[seed] != s {
                    continue;
                }
                mark[seed] = s + 1;
                let mut comp = vec![seed];
                let mut queue = VecDeque::from([seed]);
                while let Some(v) = queue.pop_front() {
                    for &u in self.t.neighbours(v) {
                        if mark[u] == s {
                            mark[u] = s + 1;
                            comp.push(u);
                            queue.push_back(u);
                        }
                    }
                }
                let restriction: HashSet<usize> = comp.into_iter().chain(bag.iter().copied()).collect();
                let child = self.emit(w, Some(&restriction), bags, children, mark, stamp);
                children[id].push(child);
            }
        }
        id
    }
}

/// Contracts tree edges joining equal bags and renumbers nodes in
/// breadth-first order from the root.
pub(crate) fn contract_and_number(
    bags: Vec<Vec<usize>>,
    mut children: Vec<Vec<usize>>,
    root: usize,
) -> RootedDecomposition {
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let t = order[i];
        i += 1;
        loop {
            let pos = children[t].iter().position(|&u| bags[u] == bags[t]);
            match pos {
                Some(p) => {
                    let u = children[t].remove(p);
                    let moved = std::mem::take(&mut children[u]);
                    children[t].extend(moved);
                }
                None => break,
            }
        }
        children[t].sort_unstable();
        order.extend(children[t].iter().copied());
    }
    let mut new_id = vec![usize::MAX; bags.len()];
    for (k, &v) in order.iter().enumerate() {
        new_id[v] = k;
    }
    let mut parent = vec![None; order.len()];
    let mut new_bags = vec![Vec::new(); order.len()];
    for &v in &order {
        new_bags[new_id[v]] = bags[v].clone();
        for &c in &children[v] {
            parent[new_id[c]] = Some(new_id[v]);
        }
    }
    RootedDecomposition::new(parent, new_bags).expect("contraction keeps a tree")
}

/// Rooted decomposition of a tree with `B` in the root bag, height at most
/// `2 log2 |T|`, width at most 3, adhesion at most 3, and connected
/// subtree remainders.
pub fn tree_logdec(t: &Graph, b: &[usize]) -> Result<RootedDecomposition> {
    if t.n() == 0 || t.m() + 1 != t.n() || !t.is_connected() {
        return Err(Error::Precondition("tree_logdec needs a non-empty tree".into()));
    }
    let b = sorted(b.to_vec());
    if b.len() > 3 {
        return Err(Error::Precondition(format!("|B| = {} exceeds 3", b.len())));
    }
    if b.iter().any(|&x| x >= t.n()) {
        return Err(Error::Precondition("B contains a node outside the tree".into()));
    }
    let mut builder = Builder {
        t,
        scratch: Scratch::new(t.n()),
        bags: Vec::new(),
        children: Vec::new(),
    };
    let nodes: Vec<usize> = (0..t.n()).collect();
    let root = builder.rec(&nodes, &b);
    debug_assert_eq!(root, 0);
    let (bags, children) = builder.split_components(root);
    Ok(contract_and_number(bags, children, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges_unchecked(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges_unchecked(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
    }

    fn is_balanced(t: &Graph, w: &[u64], x: usize) -> bool {
        let total: u64 = w.iter().sum();
        crate::graph::components_avoiding(t, &[x])
            .iter()
            .all(|c| 2 * c.iter().map(|&v| w[v]).sum::<u64>() <= total)
    }

    #[test]
    fn balanced_examples() {
        assert_eq!(find_balanced_node(&path(3), &[1, 1, 1]), 1);
        assert_eq!(find_balanced_node(&Graph::empty(1), &[1]), 0);
        let s = star(4);
        let w = [1; 5];
        assert_eq!(find_balanced_node(&s, &w), 0);
        let ok: Vec<usize> = (0..5).filter(|&x| is_balanced(&s, &w, x)).collect();
        assert_eq!(ok, vec![0]);
        let p = path(10);
        let w: Vec<u64> = (0..10).map(|i| if i >= 7 { 5 } else { 0 }).collect();
        assert!(is_balanced(&p, &w, find_balanced_node(&p, &w)));
    }

    #[test]
    fn base_cases() {
        let d = tree_logdec(&Graph::empty(1), &[0]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.height(), 0);
        let d = tree_logdec(&path(3), &[0]).unwrap();
        assert_eq!(d.bags(), &[vec![0], vec![0, 1, 2]]);
        assert_eq!(d.height(), 1);
    }

    #[test]
    fn rejects_large_b_and_non_trees() {
        assert!(tree_logdec(&path(6), &[0, 1, 2, 3]).is_err());
        let c = Graph::from_edges_unchecked(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(tree_logdec(&c, &[0]).is_err());
    }

    #[test]
    fn small_paths_and_stars_validate() {
        for n in 1..40 {
            for b in [vec![0], vec![0, n - 1], vec![0, n / 2, n - 1]] {
                let t = path(n);
                let d = tree_logdec(&t, &b).unwrap();
                let report = super::super::validate_tree_logdec(&t, &b, &d);
                assert!(report.passed(), "path {n} B={b:?}\n{}", report.to_text());
            }
            let t = star(n);
            let d = tree_logdec(&t, &[1.min(n)]).unwrap();
            assert!(super::super::validate_tree_logdec(&t, &[1.min(n)], &d).passed());
        }
    }
}
