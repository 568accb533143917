use std::collections::HashSet;

use snc_core::conjecture::{consistency_check, ConjectureId};
use snc_core::digraph::Digraph;
use snc_core::linalg::rat;
use snc_core::search::{
    canonicalize, digraph_at, enumerate_digraphs, enumerate_tournaments, random_digraph, sweep,
    EnumSpec, Mode,
};

#[test]
fn stream_lengths() {
    let expected = [1u64, 3, 27, 729, 59049];
    for (n, &count) in (1..=5).zip(expected.iter()) {
        assert_eq!(
            enumerate_digraphs(n).unwrap().count() as u64,
            count,
            "n = {n}"
        );
    }
    let expected = [1u64, 2, 8, 64, 1024];
    for (n, &count) in (1..=5).zip(expected.iter()) {
        assert_eq!(
            enumerate_tournaments(n).unwrap().count() as u64,
            count,
            "n = {n}"
        );
    }
}

#[test]
fn streams_are_distinct_and_valid() {
    let all: HashSet<Digraph> = enumerate_digraphs(4).unwrap().collect();
    assert_eq!(all.len(), 729);
    let t: Vec<Digraph> = enumerate_tournaments(5).unwrap().collect();
    assert!(t.iter().all(Digraph::is_tournament));
    assert_eq!(t.iter().collect::<HashSet<_>>().len(), 1024);
    assert!(t.iter().all(|x| all.len() == 729 && x.arc_count() == 10));
}

#[test]
fn isomorphism_class_counts() {
    // oriented graphs: 1, 2, 7, 42; tournaments: 1, 1, 2, 4, 12
    let oriented = [1usize, 2, 7, 42];
    for (n, &want) in (1..=4).zip(oriented.iter()) {
        let classes: HashSet<Digraph> = enumerate_digraphs(n)
            .unwrap()
            .map(|d| canonicalize(&d).unwrap())
            .collect();
        assert_eq!(classes.len(), want, "n = {n}");
    }
    let tournaments = [1usize, 1, 2, 4, 12];
    for (n, &want) in (1..=5).zip(tournaments.iter()) {
        let classes: HashSet<Digraph> = enumerate_tournaments(n)
            .unwrap()
            .map(|d| canonicalize(&d).unwrap())
            .collect();
        assert_eq!(classes.len(), want, "n = {n}");
    }
}

#[test]
fn dedup_keeps_one_per_class() {
    let mut spec = EnumSpec::new(4, Mode::All);
    spec.dedup = true;
    let r = sweep(&spec).unwrap();
    assert_eq!(r.examined, 42);
    assert_eq!(r.examined + r.skipped_duplicates, 729);

    let mut spec = EnumSpec::random(4, 500, 11);
    spec.dedup = true;
    let r = sweep(&spec).unwrap();
    assert!(r.examined <= 42);
    assert_eq!(r.examined + r.skipped_duplicates, 500);
}

#[test]
fn random_streams_are_deterministic() {
    let third = rat(1, 3);
    let a: Vec<Digraph> = (0..20)
        .map(|s| random_digraph(6, &third, &third, s).unwrap())
        .collect();
    let b: Vec<Digraph> = (0..20)
        .map(|s| random_digraph(6, &third, &third, s).unwrap())
        .collect();
    assert_eq!(a, b);
    assert!(a.iter().collect::<HashSet<_>>().len() > 1);

    let spec = EnumSpec::random(6, 50, 99);
    let again = EnumSpec::random(6, 50, 99);
    let xs: Vec<Digraph> = (0..50).map(|k| spec.instance(k)).collect();
    let ys: Vec<Digraph> = (0..50).map(|k| again.instance(k)).collect();
    assert_eq!(xs, ys);
    let other = EnumSpec::random(6, 50, 100);
    assert_ne!(xs, (0..50).map(|k| other.instance(k)).collect::<Vec<_>>());

    let r1 = sweep(&spec).unwrap();
    let r2 = sweep(&again).unwrap();
    assert_eq!(r1.to_json_lines(), r2.to_json_lines());
}

#[test]
fn random_arc_frequencies_follow_probabilities() {
    let (pf, pb) = (rat(1, 2), rat(1, 4));
    let (mut fwd, mut bwd, mut none) = (0u32, 0u32, 0u32);
    for seed in 0..400 {
        let d = random_digraph(6, &pf, &pb, seed).unwrap();
        for i in 1..=6 {
            for j in i + 1..=6 {
                match (d.has_arc(i, j), d.has_arc(j, i)) {
                    (true, _) => fwd += 1,
                    (_, true) => bwd += 1,
                    _ => none += 1,
                }
            }
        }
    }
    // 6000 pairs; expected 3000 / 1500 / 1500, generous bands
    assert!((2800..3200).contains(&fwd), "{fwd}");
    assert!((1350..1650).contains(&bwd), "{bwd}");
    assert!((1350..1650).contains(&none), "{none}");
}

#[test]
fn prune_never_adds_violations() {
    for n in 1..=5 {
        let plain = sweep(&EnumSpec::new(n, Mode::All)).unwrap();
        let mut spec = EnumSpec::new(n, Mode::All);
        spec.prune = true;
        let pruned = sweep(&spec).unwrap();
        assert!(pruned.violations <= plain.violations);
        assert!(pruned.counterexample_total() <= plain.counterexample_total());
        assert_eq!(pruned.examined + pruned.skipped_pruned, plain.examined);
        // no vertex reaches out-degree 7 below 8 vertices
        assert_eq!(pruned.examined, 0);
    }
}

#[test]
fn small_sweeps_find_nothing() {
    for n in 1..=4 {
        let r = sweep(&EnumSpec::new(n, Mode::All)).unwrap();
        assert!(r.is_clean(), "n = {n}");
        let r = sweep(&EnumSpec::new(n, Mode::Tournaments)).unwrap();
        assert!(r.is_clean(), "n = {n}");
    }
}

#[test]
fn index_addressing_matches_iteration() {
    for (k, d) in enumerate_digraphs(4).unwrap().enumerate() {
        assert_eq!(digraph_at(4, k as u64), d);
    }
    let r = consistency_check(&digraph_at(4, 728)).unwrap();
    assert!(r.verdict(ConjectureId::C1).is_satisfied());
}
