use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rf_core::hl::{
    find_dense_matrix, milliken_search, min_fhl, search_level_product_mono_with, verify_certificate, CertificateBundle,
    HlMode, SearchOptions, SubtreeColoring,
};
use rf_core::tree::{enumerate_strong_subtrees, is_strong_subtree};
use rf_core::types::meet_closure;
use rf_core::{BitString, FiniteTree, LevelProductColoring, ProductColoring};

fn tree_strategy(max_len: usize) -> BoxedStrategy<FiniteTree> {
    let words = BitString::all_up_to(max_len);
    prop::collection::vec(prop::sample::select(words), 0..6)
        .prop_map(|ws| {
            let mut ws = ws;
            ws.push(BitString::empty());
            let closed: Vec<BitString> = meet_closure(&ws).into_iter().collect();
            FiniteTree::new(closed).unwrap()
        })
        .boxed()
}

fn hash_color(seed: u64, t: &[BitString], k: u32) -> u32 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for w in t {
        for b in w.bits() {
            h = (h ^ (b as u64 + 1)).wrapping_mul(0x100_0000_01b3);
        }
        h = (h ^ 7).wrapping_mul(0x100_0000_01b3);
    }
    (h >> 33) as u32 % k
}

#[derive(Debug, Clone)]
enum Instance {
    Hl { trees: Vec<FiniteTree>, k: u32, height: usize, leaves: bool, seed: u64 },
    Dense { trees: Vec<FiniteTree>, k: u32, seed: u64 },
    Milliken { tree: FiniteTree, k: u32, n: usize, m: usize, seed: u64 },
}

fn instance() -> impl Strategy<Value = Instance> {
    let trees = prop::collection::vec(tree_strategy(3), 1..=2);
    prop_oneof![
        (trees.clone(), 1u32..=3, 1usize..=3, any::<bool>(), any::<u64>())
            .prop_map(|(trees, k, height, leaves, seed)| Instance::Hl { trees, k, height, leaves, seed }),
        (trees, 1u32..=3, any::<u64>()).prop_map(|(trees, k, seed)| Instance::Dense { trees, k, seed }),
        (tree_strategy(3), 1u32..=3, 1usize..=2, 0usize..=1, any::<u64>())
            .prop_map(|(tree, k, n, extra, seed)| Instance::Milliken { tree, k, n, m: n + extra, seed }),
    ]
}

/// Runs one instance; returns the bundle if a certificate was found.
fn solve(inst: &Instance) -> Option<CertificateBundle> {
    match inst.clone() {
        Instance::Hl { trees, k, height, leaves, seed } => {
            let c = LevelProductColoring::from_fn(trees, k, |t| hash_color(seed, t, k)).unwrap();
            let mode = if leaves { HlMode::Leaves } else { HlMode::General };
            let opts = SearchOptions { mode, ..Default::default() };
            let cert = search_level_product_mono_with(&c, height, &opts).unwrap()?;
            Some(CertificateBundle::Hl { coloring: c, height, certificate: cert })
        }
        Instance::Dense { trees, k, seed } => {
            let c = ProductColoring::from_fn(trees, k, |t| hash_color(seed, t, k)).unwrap();
            let cert = find_dense_matrix(&c).unwrap()?;
            Some(CertificateBundle::Dense { coloring: c, certificate: cert })
        }
        Instance::Milliken { tree, k, n, m, seed } => {
            let c = SubtreeColoring::from_fn(&tree, n, k, |s| hash_color(seed, s, k)).unwrap();
            let cert = milliken_search(&tree, &c, m).unwrap()?;
            Some(CertificateBundle::Milliken { tree, coloring: c, m, certificate: cert })
        }
    }
}

#[test]
fn ten_thousand_certificates_verify() {
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let found = std::cell::Cell::new(0u32);
    runner
        .run(&instance(), |inst| {
            if let Some(b) = solve(&inst) {
                found.set(found.get() + 1);
                prop_assert!(verify_certificate(&b), "{inst:?}");
                let json = serde_json::to_string(&b).unwrap();
                let back: CertificateBundle = serde_json::from_str(&json).unwrap();
                prop_assert!(verify_certificate(&back));
            }
            Ok(())
        })
        .unwrap();
    assert!(found.get() > 1000, "only {} certificates found", found.get());
}

#[test]
fn milliken_search_agrees_with_direct_enumeration() {
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    runner
        .run(&(tree_strategy(3), 1u32..=3, 1usize..=2, 0usize..=1, any::<u64>()), |(t, k, n, extra, seed)| {
            let m = n + extra;
            let c = SubtreeColoring::from_fn(&t, n, k, |s| hash_color(seed, s, k)).unwrap();
            let direct = enumerate_strong_subtrees(&t, m).unwrap().into_iter().any(|s| {
                let inner = enumerate_strong_subtrees(&s.subtree, n).unwrap();
                let colors: std::collections::BTreeSet<u32> =
                    inner.iter().map(|w| c.color(w.nodes()).unwrap()).collect();
                colors.len() == 1
            });
            prop_assert_eq!(milliken_search(&t, &c, m).unwrap().is_some(), direct);
            Ok(())
        })
        .unwrap();
}

#[test]
fn hl_general_search_is_complete_on_single_trees() {
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    runner
        .run(&(tree_strategy(3), 1u32..=3, 1usize..=3, any::<u64>()), |(t, k, height, seed)| {
            let c = LevelProductColoring::from_fn(vec![t.clone()], k, |x| hash_color(seed, x, k)).unwrap();
            let found = search_level_product_mono_with(&c, height, &SearchOptions::default()).unwrap();
            let direct = enumerate_strong_subtrees(&t, height).unwrap().into_iter().any(|s| {
                let colors: std::collections::BTreeSet<u32> =
                    s.nodes().iter().map(|w| c.color(std::slice::from_ref(w)).unwrap()).collect();
                colors.len() == 1
            });
            prop_assert_eq!(found.is_some(), direct);
            Ok(())
        })
        .unwrap();
}

#[test]
fn tampered_witnesses_fail() {
    let t = FiniteTree::full_binary(3);
    let c = LevelProductColoring::from_fn(vec![t.clone()], 2, |x| (x[0].len() % 2) as u32).unwrap();
    let cert = search_level_product_mono_with(&c, 2, &SearchOptions::default()).unwrap().unwrap();
    let mut bad = cert.clone();
    bad.color = 1 - bad.color;
    assert!(!verify_certificate(&CertificateBundle::Hl { coloring: c.clone(), height: 2, certificate: bad }));
    let mut bad = cert.clone();
    bad.witnesses[0].nodes.pop();
    assert!(!verify_certificate(&CertificateBundle::Hl { coloring: c, height: 2, certificate: bad }));
    assert!(is_strong_subtree(&cert.witnesses[0].nodes, &t).unwrap().is_some());
}

#[test]
fn min_fhl_is_monotone_in_n_and_k() {
    let two = |_: usize| 2;
    let h = |n: usize, k: u64| min_fhl(n, k, 1, &two, 5).unwrap().h;
    assert!(h(1, 1) <= h(2, 1));
    assert!(h(1, 2) <= h(2, 2));
    assert!(h(1, 1) <= h(1, 2) && h(1, 2) <= h(1, 3));
    assert!(h(2, 1) <= h(2, 2));
}
