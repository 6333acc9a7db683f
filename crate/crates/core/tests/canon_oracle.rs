mod common;

use planar_wl::canon::{certificate, isomorphic_planar};
use planar_wl::families::planar_random;
use planar_wl::oracle::brute_force_isomorphic;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

#[test]
fn certificates_partition_small_planar_graphs() {
    let classes = common::connected_planar_classes(7);
    assert_eq!(classes.len(), 1 + 1 + 2 + 6 + 20 + 99 + 646);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seen = HashMap::new();
    for (i, g) in classes.iter().enumerate() {
        let c = certificate(g).unwrap();
        if let Some(j) = seen.insert(c.clone(), i) {
            panic!("classes {j} and {i} share a certificate");
        }
        let mut p: Vec<usize> = (0..g.n()).collect();
        p.shuffle(&mut rng);
        assert_eq!(certificate(&g.permute(&p)).unwrap(), c);
    }
}

#[test]
fn random_pairs_agree_with_backtracking() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut iso = 0;
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
        iso += expected as usize;
        assert_eq!(isomorphic_planar(&g, &h).unwrap(), expected, "{g:?} vs {h:?}");
    }
    assert!(iso > 200);
}
