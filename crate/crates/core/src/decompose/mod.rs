//! Rooted tree decompositions: the balanced log-height decomposition of
//! trees, the decomposition of a connected graph into its blocks, and the
//! combined log-height block decomposition with its validator.

mod blocks;
mod logblock;
mod treedec;
mod tutte;
mod validate;

pub use blocks::{
    adhesion, block_from_triple, is_block_separator, local_connectivity, torso, BlockKind,
    BlockResolution, BlockResolver,
};
pub use logblock::log_block_decomposition;
pub use treedec::{find_balanced_node, tree_logdec};
pub use tutte::{tutte_block_decomposition, tutte_blocks};
pub use validate::{
    height_bound, validate_decomposition, validate_tree_logdec, Check, ValidationReport,
};

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A rooted tree with a vertex set (bag) per node.
///
/// Bags are sorted. Optionally each bag records the blocks and block
/// separators it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedDecomposition {
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
    root: usize,
    constituents: Option<Vec<Vec<Vec<usize>>>>,
}

impl RootedDecomposition {
    /// Checks that `parent` describes a single rooted tree.
    pub fn new(parent: Vec<Option<usize>>, mut bags: Vec<Vec<usize>>) -> Result<Self> {
        if parent.len() != bags.len() || parent.is_empty() {
            return Err(Error::Validation(
                "a decomposition needs one bag per node and at least one node".into(),
            ));
        }
        let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::Validation(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let n = parent.len();
        if parent.iter().flatten().any(|&p| p >= n) {
            return Err(Error::Validation("parent id out of range".into()));
        }
        let d = RootedDecomposition {
            parent,
            bags: Vec::new(),
            root: roots[0],
            constituents: None,
        };
        let reached = d.preorder().len();
        if reached != n {
            return Err(Error::Validation("parent pointers contain a cycle".into()));
        }
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        Ok(RootedDecomposition { bags, ..d })
    }

    /// Attaches constituent sets; each bag must equal their union.
    pub fn with_constituents(mut self, parts: Vec<Vec<Vec<usize>>>) -> Self {
        assert_eq!(parts.len(), self.len(), "one constituent list per node");
        self.constituents = Some(
            parts
                .into_iter()
                .map(|list| {
                    list.into_iter()
                        .map(|mut s| {
                            s.sort_unstable();
                            s.dedup();
                            s
                        })
                        .collect()
                })
                .collect(),
        );
        self
    }

    pub fn without_constituents(mut self) -> Self {
        self.constituents = None;
        self
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn constituents(&self) -> Option<&[Vec<Vec<usize>>]> {
        self.constituents.as_deref()
    }

    /// Replaces the bag of `node`, dropping any constituent information.
    pub fn set_bag(&mut self, node: usize, mut bag: Vec<usize>) {
        bag.sort_unstable();
        bag.dedup();
        self.bags[node] = bag;
        self.constituents = None;
    }

    /// Children lists, each in increasing id order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(i);
            }
        }
        ch
    }

    /// Nodes in breadth-first order from the root.
    pub fn preorder(&self) -> Vec<usize> {
        let ch = self.children();
        let mut out = vec![self.root];
        let mut i = 0;
        while i < out.len() {
            let v = out[i];
            i += 1;
            out.extend(&ch[v]);
        }
        out
    }

    /// Distance of each node from the root.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.len()];
        for v in self.preorder() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// Length of the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Largest bag size minus one (`0` for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Largest intersection of adjacent bags.
    pub fn adhesion(&self) -> usize {
        (0..self.len())
            .filter_map(|i| self.parent[i].map(|p| intersection_size(&self.bags[i], &self.bags[p])))
            .max()
            .unwrap_or(0)
    }

    /// Union of the bags in the subtree of every node.
    pub fn subtree_unions(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.bags.clone();
        let order = self.preorder();
        for &v in order.iter().rev() {
            if let Some(p) = self.parent[v] {
                let child = std::mem::take(&mut out[v]);
                let mut merged = merge_sorted(&out[p], &child);
                std::mem::swap(&mut out[p], &mut merged);
                out[v] = child;
            }
        }
        out
    }

    /// One `node <id> parent <id|-> bag v1,...` line per node, followed by
    /// ` parts a,b|c,d` when constituents are known.
    pub fn to_text(&self) -> String {
        let join = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for i in 0..self.len() {
            let parent = self.parent[i].map_or("-".to_string(), |p| p.to_string());
            out.push_str(&format!("node {i} parent {parent} bag {}", join(&self.bags[i])));
            if let Some(parts) = &self.constituents {
                let p: Vec<String> = parts[i].iter().map(|s| join(s)).collect();
                out.push_str(&format!(" parts {}", p.join("|")));
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`RootedDecomposition::to_text`]. Node ids must be
    /// `0..len` in any order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Option<usize>, Vec<usize>, Option<Vec<Vec<usize>>>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() < 5 || tokens[0] != "node" || tokens[2] != "parent" || tokens[4] != "bag" {
                return Err(Error::parse(lineno, "expected `node <id> parent <id|-> bag <list>`"));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad number {s:?}")));
            let list = |s: &str| -> Result<Vec<usize>> {
                if s.is_empty() {
                    Ok(Vec::new())
                } else {
                    s.split(',').map(num).collect()
                }
            };
            let id = num(tokens[1])?;
            let parent = if tokens[3] == "-" { None } else { Some(num(tokens[3])?) };
            let mut rest = &tokens[5..];
            let bag = if !rest.is_empty() && rest[0] != "parts" {
                let b = list(rest[0])?;
                rest = &rest[1..];
                b
            } else {
                Vec::new()
            };
            let parts = match rest {
                [] => None,
                ["parts"] => Some(Vec::new()),
                ["parts", p] => Some(p.split('|').map(list).collect::<Result<Vec<_>>>()?),
                _ => return Err(Error::parse(lineno, "unexpected trailing tokens")),
            };
            rows.push((id, parent, bag, parts));
        }
        let n = rows.len();
        let mut parent = vec![None; n];
        let mut bags = vec![Vec::new(); n];
        let mut parts = vec![None; n];
        let mut seen = vec![false; n];
        for (id, p, b, c) in rows {
            if id >= n || seen[id] {
                return Err(Error::Validation(format!("node ids must be 0..{n} without repeats")));
            }
            seen[id] = true;
            parent[id] = p;
            bags[id] = b;
            parts[id] = c;
        }
        let d = Self::new(parent, bags)?;
        if parts.iter().all(Option::is_some) && n > 0 {
            Ok(d.with_constituents(parts.into_iter().map(Option::unwrap).collect()))
        } else {
            Ok(d)
        }
    }
}

pub(crate) fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

pub(crate) fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Whether `g[set]` is connected (the empty set counts as connected).
pub(crate) fn induces_connected(g: &Graph, set: &[usize], mark: &mut [u32], stamp: u32) -> bool {
    if set.is_empty() {
        return true;
    }
    for &v in set {
        mark[v] = stamp;
    }
    let mut seen = 1;
    mark[set[0]] = stamp + 1;
    let mut queue = VecDeque::from([set[0]]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbours(v) {
            if mark[w] == stamp {
                mark[w] = stamp + 1;
                seen += 1;
                queue.push_back(w);
            }
        }
    }
    seen == set.len()
}

/// Tree edges of a decomposition as a graph on its nodes.
pub(crate) fn decomposition_tree(d: &RootedDecomposition) -> Graph {
    let edges: Vec<(usize, usize)> = (0..d.len())
        .filter_map(|i| d.parent(i).map(|p| (i, p)))
        .collect();
    Graph::from_edges_unchecked(d.len(), &edges)
}
