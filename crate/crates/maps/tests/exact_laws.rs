use std::collections::HashMap;

use lqgsim_maps::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Labeled simplicial 2-spheres on `n` vertices, by trying every set of
/// `2n - 4` triangles of the complete graph.
fn labeled_spheres(n: usize) -> u64 {
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
        .collect();
    let f = 2 * n - 4;
    let mut count = 0;
    let mut pick = Vec::with_capacity(f);
    fn rec(start: usize, f: usize, n: usize, triples: &[[usize; 3]], pick: &mut Vec<usize>, count: &mut u64) {
        if pick.len() == f {
            if is_sphere(n, pick.iter().map(|&i| triples[i])) {
                *count += 1;
            }
            return;
        }
        for i in start..triples.len() {
            pick.push(i);
            rec(i + 1, f, n, triples, pick, count);
            pick.pop();
        }
    }
    rec(0, f, n, &triples, &mut pick, &mut count);
    count
}

fn is_sphere(n: usize, tris: impl Iterator<Item = [usize; 3]>) -> bool {
    let tris: Vec<[usize; 3]> = tris.collect();
    let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &tris {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            *edge_use.entry((a, b)).or_default() += 1;
        }
    }
    if edge_use.values().any(|&c| c != 2) {
        return false;
    }
    // the link of every vertex is one cycle
    for v in 0..n {
        let link: Vec<(usize, usize)> = tris
            .iter()
            .filter(|t| t.contains(&v))
            .map(|t| {
                let o: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
                (o[0], o[1])
            })
            .collect();
        if link.is_empty() {
            return false;
        }
        let mut seen = vec![link[0]];
        let mut cur = link[0].1;
        let first = link[0].0;
        while cur != first {
            match link.iter().find(|e| !seen.contains(e) && (e.0 == cur || e.1 == cur)) {
                Some(&e) => {
                    cur = if e.0 == cur { e.1 } else { e.0 };
                    seen.push(e);
                }
                None => return false,
            }
        }
        if seen.len() != link.len() {
            return false;
        }
    }
    true
}

#[test]
fn simple_universe_matches_labeled_spheres() {
    for n in 4..=6 {
        let labeled = labeled_spheres(n);
        let edges = 3 * n as u64 - 6;
        let factorial: u64 = (1..=n as u64).product();
        let rooted = 4 * edges * labeled / factorial;
        assert_eq!(4 * edges * labeled % factorial, 0);
        let universe = rooted * (edges + 1);
        assert_eq!(enumerate_triangulations(n, MapClass::Simple).unwrap().len() as u64, universe, "n={n}");
    }
    assert_eq!(labeled_spheres(5), 10);
}

#[test]
fn multi_edge_universe_matches_recursion() {
    for n in 3..=6 {
        let got = enumerate_triangulations(n, MapClass::MultiEdge).unwrap().len();
        assert_eq!(BigUint::from(got), multi_edge_universe(n), "n={n}");
    }
}

#[test]
fn marked_disk_counts_match_gluing() {
    let mut c = DiskCounter::new();
    for m in 2..=5 {
        for n in 0..=2 {
            let mut brute = 0u64;
            for_each_disk(m, n, MapClass::MultiEdge, true, &mut |_| brute += 1).unwrap();
            assert_eq!(c.multi_marked(m, n), BigUint::from(brute), "m={m} n={n}");
        }
    }
}

#[test]
fn counts_grow_with_interior_vertices() {
    for class in [MapClass::MultiEdge, MapClass::Simple] {
        for m in 3..=6 {
            for n in 0..3 {
                let a = count_disk_triangulations(m, n, class).unwrap();
                let b = count_disk_triangulations(m, n + 1, class).unwrap();
                assert!(b >= a, "{class} m={m} n={n}");
            }
        }
    }
    assert!(count_disk_triangulations(1, 0, MapClass::Simple).is_err());
}

fn chain_mode_law(n: usize) -> HashMap<Vec<(usize, usize)>, BigRational> {
    fn go(
        c: &mut DiskCounter,
        state: (usize, usize),
        prefix: &mut Vec<(usize, usize)>,
        w: BigRational,
        out: &mut HashMap<Vec<(usize, usize)>, BigRational>,
    ) {
        prefix.push((state.0 - 2, state.1));
        let total = c.multi_marked(state.0, state.1);
        for m in chain_moves(c, state.0, state.1) {
            let p = BigRational::new(m.weight.clone().into(), total.clone().into());
            match m.next {
                None => *out.entry(prefix.clone()).or_insert_with(BigRational::zero) += &w * p,
                Some(s) => go(c, s, prefix, &w * p, out),
            }
        }
        prefix.pop();
    }
    let mut out = HashMap::new();
    go(&mut DiskCounter::new(), (2, n - 2), &mut Vec::new(), BigRational::one(), &mut out);
    out
}

#[test]
fn chain_mode_and_map_mode_agree() {
    for n in 3..=5 {
        let laws = UniverseLaws::compute(n, MapClass::MultiEdge).unwrap();
        let map_mode = laws.eden.pushforward(|k| k.chain.clone());
        let chain = chain_mode_law(n);
        assert_eq!(chain.len(), map_mode.weights.len());
        for (k, p) in &chain {
            assert_eq!(&map_mode.probability(k), p, "n={n} chain={k:?}");
        }
    }
}

#[test]
fn multi_edge_explorations_agree_exactly() {
    for n in 3..=5 {
        let laws = UniverseLaws::compute(n, MapClass::MultiEdge).unwrap();
        for s in Statistic::ALL {
            let r = laws.report(s).unwrap();
            assert!(r.is_exact_zero(), "{r:?}");
        }
    }
}

#[test]
fn simple_class_explorations_differ() {
    let four = UniverseLaws::compute(4, MapClass::Simple).unwrap();
    for s in [Statistic::Chain, Statistic::TriangleCount, Statistic::NecklaceSequence] {
        assert!(four.tv(s).unwrap().is_zero());
    }
    // reassembled gluings leave the class already for the tetrahedron
    assert!(!four.tv(Statistic::Reshuffle).unwrap().is_zero());
    let five = UniverseLaws::compute(5, MapClass::Simple).unwrap();
    assert_eq!(five.tv(Statistic::Chain).unwrap(), BigRational::new(1.into(), 50.into()));
    assert_eq!(five.tv(Statistic::TriangleCount).unwrap(), BigRational::new(1.into(), 150.into()));
    let report = five.report(Statistic::NecklaceSequence).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["class"], "SIMPLE");
    assert_eq!(json["statistic"], "necklace_sequence");
    assert_eq!((json["tv_distance_num"].as_str(), json["tv_distance_den"].as_str()), (Some("7"), Some("100")));
}

#[test]
fn reference_path_choice_does_not_change_the_traces() {
    for e in enumerate_triangulations(5, MapClass::MultiEdge).unwrap() {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for bits in 0..32u32 {
            let c: Vec<bool> = (0..5).map(|v| bits >> v & 1 == 1).collect();
            left.push(percolation_exploration_with(&e.map, &Coloring::Explicit(c.clone()), ReferencePath::Leftmost).unwrap().positions());
            right.push(percolation_exploration_with(&e.map, &Coloring::Explicit(c), ReferencePath::Rightmost).unwrap().positions());
        }
        left.sort();
        right.sort();
        assert_eq!(left, right);
    }
}

#[test]
fn exchange_format_round_trips_every_map() {
    for e in enumerate_triangulations(5, MapClass::MultiEdge).unwrap() {
        let back = CombMap::from_text(&e.map.to_text()).unwrap();
        assert_eq!(back.canonical_code(), e.map.canonical_code());
        back.validate_sphere().unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eden_traces_keep_their_invariants(index in 0usize..240, seed in any::<u64>()) {
        let maps = enumerate_triangulations(5, MapClass::MultiEdge).unwrap();
        let map = &maps[index % maps.len()].map;
        let t = eden_exploration(map, seed).unwrap();
        t.validate().unwrap();
        let total: usize = t.necklaces.iter().map(|n| n.triangles).sum();
        prop_assert_eq!(total, map.count_kind(FaceKind::Triangle));
        let (m, t2) = reshuffle_necklaces(&t.necklaces, seed ^ 0x5eed).unwrap();
        m.validate_sphere().unwrap();
        prop_assert_eq!(m.n_vertices(), 5);
        prop_assert_eq!(&t2.necklaces, &t.necklaces);
    }
}
