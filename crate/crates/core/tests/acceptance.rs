//! Acceptance run: one `PASS`/`FAIL` line per criterion.
//!
//! Criteria marked soft below are reported but do not fail the run; the
//! reasons are printed next to them.

mod common;

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use planar_wl::canon::{certificate, isomorphic_planar};
use planar_wl::decompose::{
    height_bound, log_block_decomposition, tree_logdec, validate_decomposition, validate_tree_logdec,
};
use planar_wl::experiment::experiment_iterations;
use planar_wl::families::{cycle, planar_random, Family, FamilySpec};
use planar_wl::oracle::{
    brute_force_isomorphic, enumerate_induced_cycles, graphs_up_to_isomorphism, pebble_game_table,
    GameLimits,
};
use planar_wl::planar::{angle_walk, embed_or_error, faces, identify_vertices, whitney_is_facial, Angle, AngleSystem};
use planar_wl::wl::{wl_joint, WlConfig};
use planar_wl::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    hard_ok: bool,
    soft_ok: bool,
    detail: String,
}

fn report(name: &str, o: &Outcome) {
    let tag = if o.hard_ok && o.soft_ok { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {}", o.detail);
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("decomposition-validity", decomposition_validity),
        ("tree-logdec-bounds", tree_logdec_bounds),
        ("whitney-equivalence", whitney_equivalence),
        ("angle-system-structure", angle_structure),
        ("vertex-identification", vertex_identification),
        ("canonisation", canonisation),
        ("wl-sanity", wl_sanity),
        ("iteration-scaling", iteration_scaling),
    ];
    let mut hard_failures = 0;
    for (name, f) in criteria {
        let o = f();
        report(name, &o);
        hard_failures += usize::from(!o.hard_ok);
    }
    if hard_failures > 0 {
        std::process::exit(1);
    }
}

fn decomposition_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let n = rng.gen_range(10..=500);
        let keep = [0.0, 0.05, 0.15, 0.3, 0.6, 0.9][i % 6];
        let g = planar_random(n, keep, &mut rng).unwrap();
        let d = log_block_decomposition(&g).unwrap();
        let r = validate_decomposition(&g, &d);
        let ok = r.passed() && d.height() <= height_bound(n) && d.adhesion() <= 6;
        worst = worst.max(d.height() as f64 / height_bound(n) as f64);
        if !ok {
            bad.push(format!("graph {i} (n={n}): {}", r.to_text().replace('\n', "; ")));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        hard_ok: bad.is_empty() && secs < 120.0,
        soft_ok: true,
        detail: format!(
            "{} of 200 invalid, max height/bound {worst:.2}, {secs:.1} s (limit 120 s){}",
            bad.len(),
            bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
        ),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize, style: usize) -> Graph {
    let e: Vec<_> = (1..n)
        .map(|v: usize| {
            let p = match style {
                0 => rng.gen_range(0..v),
                1 => v - 1 - rng.gen_range(0..v.min(3)),
                _ => rng.gen_range(v.saturating_sub(50)..v),
            };
            (p, v)
        })
        .collect();
    Graph::from_edges_unchecked(n, &e)
}

fn tree_logdec_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    for i in 0..100 {
        let n = if i < 10 { 16384 } else { rng.gen_range(1..=16384) };
        let t = random_tree(&mut rng, n, i % 3);
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let b: Vec<usize> = all[..rng.gen_range(0..=3usize.min(n))].to_vec();
        let d = tree_logdec(&t, &b).unwrap();
        let r = validate_tree_logdec(&t, &b, &d);
        let root = d.bag(d.root());
        let extra = root.iter().filter(|v| !b.contains(v)).count();
        let ok = r.passed()
            && d.height() as f64 <= 2.0 * (n as f64).log2()
            && d.width() <= 3
            && d.adhesion() <= 3
            && b.iter().all(|v| root.contains(v))
            && extra <= 1;
        if !ok {
            bad.push(format!("tree {i} (n={n}, height {})", d.height()));
        }
    }
    Outcome {
        hard_ok: bad.is_empty(),
        soft_ok: true,
        detail: format!("{} of 100 trees violate a bound{}", bad.len(), first(&bad)),
    }
}

fn first(v: &[String]) -> String {
    v.first().map(|b| format!(", first: {b}")).unwrap_or_default()
}

fn canonical_cycle(mut c: Vec<usize>) -> Vec<usize> {
    let i = (0..c.len()).min_by_key(|&i| c[i]).unwrap();
    c.rotate_left(i);
    if c.len() > 2 && c[c.len() - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

/// Non-separating check done from scratch: `g - c` is connected.
fn leaves_connected(g: &Graph, c: &[usize]) -> bool {
    let removed: HashSet<usize> = c.iter().copied().collect();
    let rest: Vec<usize> = (0..g.n()).filter(|v| !removed.contains(v)).collect();
    let Some(&s) = rest.first() else { return true };
    let mut seen = HashSet::from([s]);
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if !removed.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == rest.len()
}

fn whitney_equivalence() -> Outcome {
    let mut bad = Vec::new();
    for (name, g) in common::small_triconnected_corpus() {
        let rs = embed_or_error(&g).unwrap();
        let mut facial: Vec<_> = faces(&g, &rs).unwrap().into_iter().map(canonical_cycle).collect();
        facial.sort();
        let mut positive = Vec::new();
        for c in enumerate_induced_cycles(&g) {
            let oracle = leaves_connected(&g, &c);
            if oracle != whitney_is_facial(&g, &c).unwrap() {
                bad.push(format!("{name}: criterion disagrees on {c:?}"));
            }
            if oracle {
                positive.push(canonical_cycle(c));
            }
        }
        positive.sort();
        if facial != positive {
            bad.push(format!("{name}: facial cycles differ"));
        }
    }
    // Euler's formula on every embedding produced here.
    let mut graphs: Vec<(String, Graph)> = common::large_triconnected_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let n = rng.gen_range(1..=200);
        graphs.push((format!("random {i}"), planar_random(n, rng.gen_range(0.0..1.0), &mut rng).unwrap()));
    }
    let mut euler_bad = 0;
    for (name, g) in &graphs {
        let f = faces(g, &embed_or_error(g).unwrap()).unwrap().len();
        if g.n() + f != g.m() + 2 {
            euler_bad += 1;
            bad.push(format!("{name}: Euler fails"));
        }
    }
    Outcome {
        hard_ok: bad.is_empty(),
        soft_ok: true,
        detail: format!(
            "{} corpus graphs, Euler on {} embeddings ({euler_bad} failures){}",
            common::small_triconnected_corpus().len(),
            graphs.len(),
            first(&bad)
        ),
    }
}

/// Angles by definition: consecutive triples on Whitney-facial cycles, in
/// both directions.
fn enumerate_angles(g: &Graph) -> HashSet<Angle> {
    let mut out = HashSet::new();
    for c in enumerate_induced_cycles(g) {
        if !leaves_connected(g, &c) {
            continue;
        }
        let l = c.len();
        for i in 0..l {
            let (a, b, d) = (c[(i + l - 1) % l], c[i], c[(i + 1) % l]);
            out.insert(Angle(a, b, d));
            out.insert(Angle(d, b, a));
        }
    }
    out
}

fn angle_structure() -> Outcome {
    let mut bad = Vec::new();
    let mut involution_breaks = 0;
    let mut total = 0;
    let k4 = planar_wl::families::complete(4);
    let k4_count = AngleSystem::for_graph(&k4).unwrap().len();
    let k4_oracle = enumerate_angles(&k4).len();
    if k4_count != 24 || k4_oracle != 24 {
        bad.push(format!("K4 has {k4_count} angles, enumeration gives {k4_oracle}"));
    }
    for (name, g) in common::large_triconnected_corpus() {
        let sys = AngleSystem::for_graph(&g).unwrap();
        let angles: HashSet<Angle> = sys.angles().iter().copied().collect();
        if g.n() <= 12 && angles != enumerate_angles(&g) {
            bad.push(format!("{name}: angle set differs from enumeration"));
        }
        let aligned: HashSet<Angle> = sys.angles().iter().map(|&a| sys.aligned_next(a).unwrap()).collect();
        let wedge: HashSet<Angle> = sys.angles().iter().map(|&a| sys.wedge_next(a).unwrap()).collect();
        if aligned != angles {
            bad.push(format!("{name}: aligned_next is not a bijection"));
        }
        if wedge != angles {
            bad.push(format!("{name}: wedge_next is not a bijection"));
        }
        for &a in sys.angles() {
            total += 1;
            if sys.wedge_next(sys.wedge_next(a).unwrap()).unwrap() != a {
                involution_breaks += 1;
            }
        }
    }
    Outcome {
        hard_ok: bad.is_empty(),
        soft_ok: involution_breaks == 0,
        detail: format!(
            "K4 angles {k4_count} (enumeration {k4_oracle}); bijections {}; wedge_next twice is the identity on {} of {total} angles \
             [soft: the image of (v1,v2,v3) is (v3,v2,w) with w != v1, so a second step starts at w and cannot return to v1]{}",
            if bad.is_empty() { "ok" } else { "broken" },
            total - involution_breaks,
            first(&bad)
        ),
    }
}

fn vertex_identification() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for (name, g) in common::large_triconnected_corpus() {
        let sys = AngleSystem::for_graph(&g).unwrap();
        for (u, v) in g.edges() {
            for (v1, v2) in [(u, v), (v, u)] {
                runs += 1;
                let map = identify_vertices(&g, v1, v2).unwrap();
                let strings: HashSet<&String> = map.strings.values().collect();
                if strings.len() != map.strings.len() {
                    bad.push(format!("{name} ({v1},{v2}): collision"));
                }
                for (&w, s) in &map.strings {
                    if s.len() > g.n() {
                        bad.push(format!("{name} ({v1},{v2}): string for {w} too long"));
                    }
                    if angle_walk(&sys, map.anchor, s).unwrap().2 != w {
                        bad.push(format!("{name} ({v1},{v2}): replay of {s} misses {w}"));
                    }
                }
            }
        }
    }
    Outcome {
        hard_ok: bad.is_empty(),
        soft_ok: true,
        detail: format!("{runs} anchored runs, {} problems{}", bad.len(), first(&bad)),
    }
}

fn canonisation() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let classes = common::connected_planar_classes(7);
    let mut seen = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, g) in classes.iter().enumerate() {
        let c = certificate(g).unwrap();
        if let Some(j) = seen.insert(c.clone(), i) {
            bad.push(format!("classes {j} and {i} collide"));
        }
        let mut p: Vec<usize> = (0..g.n()).collect();
        p.shuffle(&mut rng);
        if certificate(&g.permute(&p)).unwrap() != c {
            bad.push(format!("class {i} not invariant"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut disagreements = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=10);
        let keep = rng.gen_range(0.0..1.0);
        let g = planar_random(n, keep, &mut rng).unwrap();
        let h = if rng.gen_bool(0.5) {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            g.permute(&p)
        } else {
            planar_random(n, keep, &mut rng).unwrap()
        };
        let expected = brute_force_isomorphic(&g, &h, 12).unwrap().is_some();
        if isomorphic_planar(&g, &h).unwrap() != expected {
            disagreements += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        hard_ok: bad.is_empty() && disagreements == 0 && secs < 600.0,
        soft_ok: true,
        detail: format!(
            "{} classes with n <= 7, {} collisions or variance, {disagreements} of 500 pair disagreements, {secs:.1} s{}",
            classes.len(),
            bad.len(),
            first(&bad)
        ),
    }
}

fn wl_sanity() -> Outcome {
    let mut bad = Vec::new();
    let c6 = cycle(6).unwrap();
    let c3 = cycle(3).unwrap();
    let two_c3 = c3.disjoint_union(&c3);
    let cfg = WlConfig::default();
    let k1 = wl_joint(&c6, &two_c3, 1, &cfg).unwrap().distinguishing_round;
    let k2 = wl_joint(&c6, &two_c3, 2, &cfg).unwrap().distinguishing_round;
    if k1.is_some() || k2.is_none() {
        bad.push(format!("C6 vs 2C3: k=1 {k1:?}, k=2 {k2:?}"));
    }
    let limits = GameLimits::default();
    let mut pairs = 0;
    for n in 1..=5 {
        let graphs = graphs_up_to_isomorphism(n).unwrap();
        for (i, g) in graphs.iter().enumerate() {
            for h in &graphs[i..] {
                pairs += 1;
                let run = wl_joint(g, h, 2, &cfg).unwrap();
                let table = pebble_game_table(g, h, 2, 3, limits).unwrap();
                let big = n * n;
                for (r, row) in table.iter().enumerate() {
                    let lc = run.left.colours_clamped(r).unwrap();
                    let rc = run.right.colours_clamped(r).unwrap();
                    let mismatch = (0..big * big).any(|x| (lc[x / big] == rc[x % big]) != row[x]);
                    if mismatch {
                        bad.push(format!("round {r} mismatch on a pair of order {n}"));
                    }
                }
            }
        }
    }
    Outcome {
        hard_ok: bad.is_empty(),
        soft_ok: true,
        detail: format!(
            "C6 vs 2C3 distinguishing rounds k=1 {k1:?}, k=2 {k2:?}; {pairs} equal-order pairs with n <= 5 agree with the game for rounds 0..=3{}",
            first(&bad)
        ),
    }
}

fn iteration_scaling() -> Outcome {
    let sizes = [16, 32, 64, 128, 256, 512, 1024];
    let specs: Vec<FamilySpec> = sizes.iter().map(|&n| FamilySpec::new(Family::MaximalPlanarRandom, n, 0)).collect();
    let rows = experiment_iterations(&specs, 2, &WlConfig::default(), true).unwrap();
    for r in &rows {
        println!(
            "  maximal-planar-random n={} stable_round={} ratio_to_log2n={:.3} time_ms={:.0}",
            r.n,
            r.stable_round,
            r.stable_round as f64 / (r.n as f64).log2(),
            r.wall_time_ms.unwrap()
        );
    }
    let bounded = rows.iter().all(|r| r.stable_round <= r.n);
    let monotone = rows.windows(2).all(|w| w[0].stable_round <= w[1].stable_round);
    let rounds: Vec<usize> = rows.iter().map(|r| r.stable_round).collect();
    Outcome {
        hard_ok: bounded,
        soft_ok: monotone,
        detail: format!(
            "stable rounds {rounds:?}; stable_round <= n {}; non-decreasing {} \
             [soft: single seeded instances per size, stable rounds sit at 2 or 3 with per-instance noise]",
            if bounded { "holds" } else { "VIOLATED" },
            if monotone { "holds" } else { "violated" }
        ),
    }
}
