//! Seeded graph families for experiments and tests.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Path,
    Cycle,
    Grid,
    Wheel,
    MaximalPlanarRandom,
    PlanarRandom,
    CfiPair,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Path,
        Family::Cycle,
        Family::Grid,
        Family::Wheel,
        Family::MaximalPlanarRandom,
        Family::PlanarRandom,
        Family::CfiPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Grid => "grid",
            Family::Wheel => "wheel",
            Family::MaximalPlanarRandom => "maximal-planar-random",
            Family::PlanarRandom => "planar-random",
            Family::CfiPair => "cfi-pair",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown family '{s}'")))
    }
}

/// A generator request.
///
/// `n` is the vertex count, except for `grid` (rows, with `cols` columns)
/// and `cfi-pair` (order of the complete base graph).
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub cols: usize,
    /// Probability that `planar-random` keeps an edge outside its spanning tree.
    pub keep: f64,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        FamilySpec {
            family,
            n,
            cols: n,
            keep: 0.5,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Single(Graph),
    Pair(Graph, Graph),
}

impl Generated {
    /// The single graph, or the first graph of a pair.
    pub fn first(&self) -> &Graph {
        match self {
            Generated::Single(g) | Generated::Pair(g, _) => g,
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = match spec.family {
        Family::Path => path(spec.n)?,
        Family::Cycle => cycle(spec.n)?,
        Family::Grid => grid(spec.n, spec.cols)?,
        Family::Wheel => wheel(spec.n)?,
        Family::MaximalPlanarRandom => maximal_planar_random(spec.n, &mut rng)?,
        Family::PlanarRandom => planar_random(spec.n, spec.keep, &mut rng)?,
        Family::CfiPair => {
            if spec.n < 3 {
                return Err(Error::Precondition("cfi-pair needs a base of order >= 3".into()));
            }
            let (a, b) = cfi_pair(&complete(spec.n))?;
            return Ok(Generated::Pair(a, b));
        }
    };
    Ok(Generated::Single(g))
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Precondition("path needs n >= 1".into()));
    }
    Ok(Graph::from_edges_unchecked(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()))
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Precondition("cycle needs n >= 3".into()));
    }
    Ok(Graph::from_edges_unchecked(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()))
}

pub fn complete(n: usize) -> Graph {
    let e: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::from_edges_unchecked(n, &e)
}

/// `rows x cols` grid, vertex `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::Precondition("grid needs positive dimensions".into()));
    }
    let mut e = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    Ok(Graph::from_edges_unchecked(rows * cols, &e))
}

/// Hub `n - 1` joined to the rim cycle `0..n-1`.
pub fn wheel(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::Precondition("wheel needs n >= 4".into()));
    }
    let rim = n - 1;
    let mut e: Vec<_> = (0..rim).map(|i| (i, (i + 1) % rim)).collect();
    e.extend((0..rim).map(|i| (i, rim)));
    Ok(Graph::from_edges_unchecked(n, &e))
}

/// Triangulation grown from a triangle by repeatedly placing a new vertex
/// inside a uniformly chosen face.
pub fn maximal_planar_random<R: Rng>(n: usize, rng: &mut R) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Precondition("maximal-planar-random needs n >= 3".into()));
    }
    let mut e = vec![(0, 1), (1, 2), (0, 2)];
    let mut faces = vec![[0, 1, 2], [0, 1, 2]];
    for v in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        e.extend([(a, v), (b, v), (c, v)]);
        faces.extend([[a, b, v], [b, c, v], [a, c, v]]);
    }
    Ok(Graph::from_edges_unchecked(n, &e))
}

/// A random triangulation with edges deleted at random, keeping a random
/// spanning tree so the result stays connected.
pub fn planar_random<R: Rng>(n: usize, keep: f64, rng: &mut R) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Precondition("planar-random needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::Precondition("keep must lie in [0, 1]".into()));
    }
    if n < 3 {
        return path(n);
    }
    let full = maximal_planar_random(n, rng)?;
    let mut edges = full.edges();
    edges.shuffle(rng);
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(d: &mut [usize], mut x: usize) -> usize {
        while d[x] != x {
            d[x] = d[d[x]];
            x = d[x];
        }
        x
    }
    let mut kept = Vec::new();
    let mut rest = Vec::new();
    for (u, v) in edges {
        let (a, b) = (find(&mut dsu, u), find(&mut dsu, v));
        if a != b {
            dsu[a] = b;
            kept.push((u, v));
        } else {
            rest.push((u, v));
        }
    }
    kept.extend(rest.into_iter().filter(|_| rng.gen_bool(keep)));
    Ok(Graph::from_edges_unchecked(n, &kept))
}

/// Untwisted and twisted CFI graphs over `base`.
///
/// Each base vertex `v` becomes one vertex per even subset of its incident
/// edges, each base edge a pair of vertices `(e, 0)`, `(e, 1)`. The subset
/// vertex for `S` is joined to `(e, 1)` for `e` in `S` and to `(e, 0)`
/// otherwise. The twisted copy swaps the pair of one edge at one endpoint.
pub fn cfi_pair(base: &Graph) -> Result<(Graph, Graph)> {
    let edges = base.edges();
    if edges.is_empty() {
        return Err(Error::Precondition("cfi-pair needs a base with edges".into()));
    }
    if (0..base.n()).any(|v| base.degree(v) > 16) {
        return Err(Error::Precondition("cfi-pair base degree exceeds 16".into()));
    }
    let build = |twisted: bool| {
        let edge_id = |u: usize, v: usize| edges.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
        let mut n = 2 * edges.len();
        let mut out = Vec::new();
        for v in 0..base.n() {
            let inc = base.neighbours(v);
            for mask in 0u32..(1 << inc.len()) {
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let x = n;
                n += 1;
                for (i, &w) in inc.iter().enumerate() {
                    let e = edge_id(v, w);
                    let mut bit = (mask >> i & 1) as usize;
                    if twisted && e == 0 && v == edges[0].0 {
                        bit ^= 1;
                    }
                    out.push((x, 2 * e + bit));
                }
            }
        }
        Graph::from_edges_unchecked(n, &out)
    };
    Ok((build(false), build(true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::is_planar;

    #[test]
    fn small_shapes() {
        assert_eq!(grid(2, 2).unwrap().edges(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(wheel(5).unwrap().m(), 8);
        assert_eq!(path(1).unwrap().m(), 0);
        assert!(cycle(2).is_err());
    }

    #[test]
    fn triangulations_are_tight() {
        let g = generate(&FamilySpec::new(Family::MaximalPlanarRandom, 10, 1)).unwrap();
        let g = g.first();
        assert_eq!(g.m(), 24);
        assert!(g.is_connected() && is_planar(g));
    }

    #[test]
    fn planar_random_is_connected_and_seeded() {
        for seed in 0..10 {
            let spec = FamilySpec::new(Family::PlanarRandom, 40, seed);
            let a = generate(&spec).unwrap();
            assert_eq!(a, generate(&spec).unwrap());
            assert!(a.first().is_connected());
            assert!(is_planar(a.first()));
        }
    }

    #[test]
    fn cfi_members_match_in_degrees() {
        let (a, b) = cfi_pair(&complete(4)).unwrap();
        assert_eq!(a.n(), 28);
        assert_eq!(a.degree_sequence(), b.degree_sequence());
        assert_eq!(a.m(), b.m());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("tree".parse::<Family>().is_err());
    }
}
