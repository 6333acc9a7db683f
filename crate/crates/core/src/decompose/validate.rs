use super::blocks::{BlockKind, BlockResolver};
use super::{induces_connected, intersection_size, RootedDecomposition};
use crate::graph::Graph;

/// One validator condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `PASS <condition>` or `FAIL <condition> <witness>` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.pass {
                out.push_str(&format!("PASS {}\n", c.name));
            } else {
                out.push_str(&format!("FAIL {} {}\n", c.name, c.witness.as_deref().unwrap_or("")));
            }
        }
        out
    }

    fn push(&mut self, name: &'static str, failure: Option<String>) {
        self.checks.push(Check {
            name,
            pass: failure.is_none(),
            witness: failure,
        });
    }
}

/// `ceil(2 log2 n)`, the height allowed for `n` vertices or tree nodes.
pub fn height_bound(n: usize) -> usize {
    let sq = (n as u128) * (n as u128);
    let mut h = 0;
    while (1u128 << h) < sq {
        h += 1;
    }
    h
}

fn tree_decomposition_checks(g: &Graph, d: &RootedDecomposition, report: &mut ValidationReport) {
    let n = g.n();
    let mut count = vec![0usize; n];
    let mut tops = vec![0usize; n];
    let mut out_of_range = None;
    for node in 0..d.len() {
        for &v in d.bag(node) {
            if v >= n {
                out_of_range = Some(format!("node {node} holds vertex {v} >= {n}"));
                continue;
            }
            count[v] += 1;
            let parent_has = d.parent(node).is_some_and(|p| d.bag(p).binary_search(&v).is_ok());
            if !parent_has {
                tops[v] += 1;
            }
        }
    }
    let uncovered = (0..n).find(|&v| count[v] == 0);
    report.push(
        "vertex-coverage",
        out_of_range.or_else(|| uncovered.map(|v| format!("vertex {v} in no bag"))),
    );
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for node in 0..d.len() {
        for &v in d.bag(node) {
            if v < n {
                holders[v].push(node);
            }
        }
    }
    let missing = g.edges().into_iter().find(|&(u, v)| {
        !holders[u]
            .iter()
            .any(|&node| d.bag(node).binary_search(&v).is_ok())
    });
    report.push("edge-coverage", missing.map(|(u, v)| format!("edge {u}-{v} in no bag")));
    let split = (0..n).find(|&v| tops[v] > 1);
    report.push(
        "occurrence-connectivity",
        split.map(|v| format!("nodes holding vertex {v} form {} subtrees", tops[v])),
    );
}

fn component_check(g: &Graph, d: &RootedDecomposition, report: &mut ValidationReport) {
    let unions = d.subtree_unions();
    let mut mark = vec![0u32; g.n()];
    let mut stamp = 1u32;
    let mut failure = None;
    for u in 0..d.len() {
        let Some(p) = d.parent(u) else { continue };
        let rest: Vec<usize> = unions[u]
            .iter()
            .copied()
            .filter(|&v| v < g.n() && d.bag(p).binary_search(&v).is_err())
            .collect();
        if !induces_connected(g, &rest, &mut mark, stamp) {
            failure = Some(format!("subtree of node {u} below node {p} is disconnected"));
            break;
        }
        stamp += 2;
    }
    report.push("component-connectivity", failure);
}

/// Checks a log-height block decomposition: tree-decomposition axioms,
/// height at most `ceil(2 log2 n)`, every bag a union of at most four
/// blocks or block separators, adhesion at most 6, and connected
/// subtree remainders.
pub fn validate_decomposition(g: &Graph, d: &RootedDecomposition) -> ValidationReport {
    let mut report = ValidationReport::default();
    tree_decomposition_checks(g, d, &mut report);
    let bound = height_bound(g.n());
    report.push(
        "height",
        (d.height() > bound).then(|| format!("height {} exceeds {bound}", d.height())),
    );
    report.push("bag-structure", bag_structure(g, d));
    let adh = d.adhesion();
    report.push("adhesion", (adh > 6).then(|| format!("adhesion {adh} exceeds 6")));
    component_check(g, d, &mut report);
    report
}

fn bag_structure(g: &Graph, d: &RootedDecomposition) -> Option<String> {
    if g.n() == 1 {
        return d
            .bags()
            .iter()
            .any(|b| b != &[0])
            .then(|| "single-vertex graph needs bag {0}".to_string());
    }
    if g.n() == 0 || !g.is_connected() || d.bags().iter().flatten().any(|&v| v >= g.n()) {
        return Some("graph must be connected and bags in range".into());
    }
    let mut resolver = BlockResolver::new(g);
    for node in 0..d.len() {
        let bag = d.bag(node);
        match d.constituents() {
            Some(parts) => {
                let parts = &parts[node];
                if parts.len() > 4 {
                    return Some(format!("node {node} has {} constituents", parts.len()));
                }
                let mut union: Vec<usize> = parts.iter().flatten().copied().collect();
                union.sort_unstable();
                union.dedup();
                if union != bag {
                    return Some(format!("node {node}: constituents do not make up the bag"));
                }
                for p in parts {
                    if resolver.classify(p) == BlockKind::Invalid {
                        return Some(format!("node {node}: {p:?} is neither a block nor a block separator"));
                    }
                }
            }
            None => {
                if !coverable(&mut resolver, bag) {
                    return Some(format!("node {node}: bag is not a union of at most 4 blocks or block separators"));
                }
            }
        }
    }
    None
}

/// Searches for at most four blocks or block separators whose union is
/// exactly `bag`.
fn coverable(resolver: &mut BlockResolver<'_>, bag: &[usize]) -> bool {
    find_cover(resolver, bag).is_some()
}

/// Up to four blocks or block separators whose union is `bag`.
pub(crate) fn find_cover(resolver: &mut BlockResolver<'_>, bag: &[usize]) -> Option<Vec<Vec<usize>>> {
    let inside = |s: &[usize]| s.iter().all(|v| bag.binary_search(v).is_ok());
    let mut cands: Vec<Vec<usize>> = resolver
        .proper_blocks()
        .iter()
        .filter(|b| inside(b))
        .cloned()
        .collect();
    let covered: Vec<usize> = {
        let mut c: Vec<usize> = cands.iter().flatten().copied().collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let loose: Vec<usize> = bag.iter().copied().filter(|v| covered.binary_search(v).is_err()).collect();
    let pool: &[usize] = if bag.len() <= 40 { bag } else { &loose };
    let k = pool.len();
    for i in 0..k {
        for j in i..k {
            for l in j..k {
                let mut s = vec![pool[i], pool[j], pool[l]];
                s.sort_unstable();
                s.dedup();
                if !s.iter().any(|v| loose.binary_search(v).is_ok()) && !loose.is_empty() {
                    continue;
                }
                if !cands.contains(&s) && resolver.classify(&s) != BlockKind::Invalid {
                    cands.push(s);
                }
            }
        }
    }
    fn search(
        bag: &[usize],
        cands: &[Vec<usize>],
        covered: &mut Vec<usize>,
        chosen: &mut Vec<Vec<usize>>,
        left: usize,
    ) -> bool {
        let Some(&first) = bag.iter().find(|v| covered.binary_search(v).is_err()) else {
            return true;
        };
        if left == 0 {
            return false;
        }
        for c in cands.iter().filter(|c| c.contains(&first)) {
            let saved = covered.clone();
            covered.extend(c);
            covered.sort_unstable();
            covered.dedup();
            chosen.push(c.clone());
            if search(bag, cands, covered, chosen, left - 1) {
                return true;
            }
            chosen.pop();
            *covered = saved;
        }
        false
    }
    let mut chosen = Vec::new();
    search(bag, &cands, &mut Vec::new(), &mut chosen, 4).then_some(chosen)
}

/// Checks the postconditions of the tree decomposition of a tree: the
/// decomposition axioms, `B` in the root with at most one extra node,
/// height at most `ceil(2 log2 |T|)`, width and adhesion at most 3, and
/// connected subtree remainders.
pub fn validate_tree_logdec(t: &Graph, b: &[usize], d: &RootedDecomposition) -> ValidationReport {
    let mut report = ValidationReport::default();
    tree_decomposition_checks(t, d, &mut report);
    let root = d.bag(d.root());
    let missing = b.iter().find(|x| root.binary_search(x).is_err());
    report.push("root-contains-B", missing.map(|x| format!("node {x} of B not in root bag")));
    let extra = root.iter().filter(|x| !b.contains(x)).count();
    report.push("root-extra", (extra > 1).then(|| format!("root bag has {extra} nodes outside B")));
    let bound = height_bound(t.n());
    report.push(
        "height",
        (d.height() > bound).then(|| format!("height {} exceeds {bound}", d.height())),
    );
    report.push("width", (d.width() > 3).then(|| format!("width {} exceeds 3", d.width())));
    let adh = (0..d.len())
        .filter_map(|i| d.parent(i).map(|p| (i, intersection_size(d.bag(i), d.bag(p)))))
        .max_by_key(|x| x.1);
    report.push(
        "adhesion",
        adh.filter(|x| x.1 > 3).map(|(i, a)| format!("node {i} meets its parent in {a} nodes")),
    );
    component_check(t, d, &mut report);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{log_block_decomposition, tree_logdec};

    #[test]
    fn height_bounds() {
        assert_eq!(height_bound(1), 0);
        assert_eq!(height_bound(2), 2);
        assert_eq!(height_bound(5), 5);
        assert_eq!(height_bound(16384), 28);
    }

    fn wheel_chain() -> Graph {
        // Two wheels joined by a path, with a pendant triangle.
        let mut e = Vec::new();
        for base in [0, 6] {
            for i in 0..5 {
                e.push((base + i, base + (i + 1) % 5));
                e.push((base + i, base + 5));
            }
        }
        e.extend([(5, 12), (12, 13), (13, 11), (13, 14), (14, 15), (15, 13)]);
        Graph::from_edges_unchecked(16, &e)
    }

    #[test]
    fn mutations_are_flagged() {
        let g = wheel_chain();
        let d = log_block_decomposition(&g).unwrap();
        assert!(validate_decomposition(&g, &d).passed(), "{}", validate_decomposition(&g, &d).to_text());

        // Dropping a vertex from the bag that holds it breaks coverage or
        // connectivity of occurrences.
        let node = (0..d.len()).find(|&i| d.bag(i).contains(&14)).unwrap();
        let mut m = d.clone();
        let bag: Vec<usize> = d.bag(node).iter().copied().filter(|&v| v != 14).collect();
        m.set_bag(node, bag);
        let r = validate_decomposition(&g, &m);
        assert!(!r.passed());
        assert!(
            !r.get("edge-coverage").unwrap().pass
                || !r.get("occurrence-connectivity").unwrap().pass
                || !r.get("vertex-coverage").unwrap().pass
        );

        // A path on twelve vertices is not a union of four of its edges.
        let p = Graph::from_edges_unchecked(12, &(1..12).map(|i| (i - 1, i)).collect::<Vec<_>>());
        let all = RootedDecomposition::new(vec![None], vec![(0..12).collect()]).unwrap();
        let r = validate_decomposition(&p, &all);
        assert!(!r.get("bag-structure").unwrap().pass);
        assert!(r.get("edge-coverage").unwrap().pass);
    }

    #[test]
    fn parsed_decomposition_without_parts_is_searched() {
        let g = wheel_chain();
        let d = log_block_decomposition(&g).unwrap().without_constituents();
        assert!(validate_decomposition(&g, &d).passed());
    }

    #[test]
    fn tree_validator_flags_wide_bags() {
        let t = Graph::from_edges_unchecked(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let d = tree_logdec(&t, &[0]).unwrap();
        assert!(validate_tree_logdec(&t, &[0], &d).passed());
        let wide = RootedDecomposition::new(vec![None], vec![(0..6).collect()]).unwrap();
        let r = validate_tree_logdec(&t, &[0], &wide);
        assert!(!r.get("width").unwrap().pass);
        assert!(!r.get("root-extra").unwrap().pass);
    }
}
