#![allow(dead_code)]

use planar_wl::families::{complete, grid, wheel};
use planar_wl::graph::is_triconnected;
use planar_wl::oracle::graphs_up_to_isomorphism;
use planar_wl::planar::is_planar;
use planar_wl::Graph;

/// Connected planar graphs on `1..=max_n` vertices, one per class.
pub fn connected_planar_classes(max_n: usize) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(|n| graphs_up_to_isomorphism(n).unwrap())
        .filter(|g| g.is_connected() && is_planar(g))
        .collect()
}

pub fn octahedron() -> Graph {
    let e: Vec<_> = (0..6)
        .flat_map(|u| (u + 1..6).map(move |v| (u, v)))
        .filter(|&(u, v)| v != u + 3)
        .collect();
    Graph::from_edges_unchecked(6, &e)
}

pub fn cube() -> Graph {
    let mut e = Vec::new();
    for u in 0..8usize {
        for b in 0..3 {
            let v = u ^ (1 << b);
            if u < v {
                e.push((u, v));
            }
        }
    }
    Graph::from_edges_unchecked(8, &e)
}

/// Icosahedron as a stacked pentagonal antiprism with two caps.
pub fn icosahedron() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        let (a, b) = (1 + i, 1 + (i + 1) % 5);
        let (c, d) = (6 + i, 6 + (i + 1) % 5);
        e.extend([(0, a), (a, b), (c, d), (11, c), (a, c), (b, c)]);
    }
    Graph::from_edges_unchecked(12, &e)
}

pub fn dodecahedron() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, 5 + 2 * i));
        e.push((15 + i, 15 + (i + 1) % 5));
        e.push((15 + i, 6 + 2 * i));
    }
    for j in 0..10 {
        e.push((5 + j, 5 + (j + 1) % 10));
    }
    Graph::from_edges_unchecked(20, &e)
}

/// Fixed corpus of 3-connected planar graphs with at most 12 vertices.
pub fn small_triconnected_corpus() -> Vec<(String, Graph)> {
    let mut out = vec![
        ("K4".to_string(), complete(4)),
        ("octahedron".to_string(), octahedron()),
        ("cube".to_string(), cube()),
        ("icosahedron".to_string(), icosahedron()),
    ];
    for n in 5..=12 {
        out.push((format!("wheel{n}"), wheel(n).unwrap()));
    }
    // Prisms C_k x K2.
    for k in 3..=6 {
        let mut e = Vec::new();
        for i in 0..k {
            e.extend([(i, (i + 1) % k), (k + i, k + (i + 1) % k), (i, k + i)]);
        }
        out.push((format!("prism{k}"), Graph::from_edges_unchecked(2 * k, &e)));
    }
    for (name, g) in &out {
        assert!(is_triconnected(g) && is_planar(g), "{name} must be 3-connected planar");
    }
    out
}

/// Larger 3-connected planar graphs up to 60 vertices.
pub fn large_triconnected_corpus() -> Vec<(String, Graph)> {
    let mut out = small_triconnected_corpus();
    out.push(("dodecahedron".to_string(), dodecahedron()));
    out.push(("wheel60".to_string(), wheel(60).unwrap()));
    // Triangulated 6 x 9 grid plus an apex on the boundary: a triangulation.
    let (rows, cols) = (6, 9);
    let mut e = grid(rows, cols).unwrap().edges();
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            e.push((r * cols + c, (r + 1) * cols + c + 1));
        }
    }
    let apex = rows * cols;
    for v in 0..apex {
        let (r, c) = (v / cols, v % cols);
        if r == 0 || c == 0 || r == rows - 1 || c == cols - 1 {
            e.push((v, apex));
        }
    }
    let tg = Graph::from_edges_unchecked(apex + 1, &e);
    out.push(("apex-grid".to_string(), tg));
    for (name, g) in &out {
        assert!(is_triconnected(g) && is_planar(g), "{name} must be 3-connected planar");
    }
    out
}
