mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use switchplace::io::{load_network, parse_network, save_network, IoError};
use switchplace::network::{NodeKind, Violation};
use switchplace::{validate_network, Network};

use common::{feeder_path, random_radial, random_two_feeder};

/// Branch ids from `start` to the source, found by scanning for the branch
/// that leads one level closer (breadth-first depths computed from scratch).
fn oracle_path(d: &switchplace::FeederData, start: &str) -> Vec<String> {
    let mut depth: HashMap<String, usize> = HashMap::new();
    let src = d.nodes.iter().find(|n| n.kind == NodeKind::Source).unwrap().id.clone();
    depth.insert(src.clone(), 0);
    let mut frontier = vec![src];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for u in &frontier {
            for b in &d.branches {
                for (x, y) in [(&b.from_node, &b.to_node), (&b.to_node, &b.from_node)] {
                    if x == u && !depth.contains_key(y) {
                        depth.insert(y.clone(), depth[u] + 1);
                        next.push(y.clone());
                    }
                }
            }
        }
        frontier = next;
    }
    let mut path = Vec::new();
    let mut cur = start.to_string();
    while depth[&cur] > 0 {
        let b = d
            .branches
            .iter()
            .find(|b| {
                (b.from_node == cur && depth[&b.to_node] + 1 == depth[&cur])
                    || (b.to_node == cur && depth[&b.from_node] + 1 == depth[&cur])
            })
            .unwrap();
        cur = if b.from_node == cur { b.to_node.clone() } else { b.from_node.clone() };
        path.push(b.id.clone());
    }
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reoriented_branches_point_away_from_source(seed in 0u64..10_000) {
        let d = random_radial(seed, 40);
        let net = Network::from_data(d).unwrap();
        for (b, br) in net.branches().iter().enumerate() {
            let from = net.node_idx(&br.from_node).unwrap();
            let to = net.node_idx(&br.to_node).unwrap();
            prop_assert_eq!(net.parent_branch(to), Some(b));
            prop_assert_eq!(net.branch_from(b), from);
            prop_assert!(net.path_to_source_idx(from).len() < net.path_to_source_idx(to).len());
        }
    }

    #[test]
    fn paths_match_oracle(seed in 0u64..10_000) {
        let d = random_radial(seed, 40);
        let net = Network::from_data(d.clone()).unwrap();
        for n in &d.nodes {
            let got: Vec<String> = net.path_to_source(&n.id).unwrap().iter().map(|s| s.to_string()).collect();
            prop_assert_eq!(got, oracle_path(&d, &n.id));
        }
    }

    #[test]
    fn downstream_sets_are_consistent(seed in 0u64..10_000) {
        let net = Network::from_data(random_radial(seed, 30)).unwrap();
        for f in net.feeders() {
            prop_assert_eq!(f.branches.len() + 1, f.nodes.len());
        }
        for b in 0..net.branches().len() {
            let sub = net.subtree_nodes(b);
            for n in 0..net.nodes().len() {
                prop_assert_eq!(sub.contains(&n), net.is_downstream_of(n, b));
            }
            let below = net.downstream_load_points_idx(b);
            for lp in 0..net.load_points().len() {
                let on_path = net.path_to_source_idx(net.load_node(lp)).contains(&b);
                prop_assert_eq!(below.contains(&lp), on_path);
            }
        }
    }

    #[test]
    fn save_then_load_reproduces_network(seed in 0u64..10_000) {
        let net = Network::from_data(random_two_feeder(seed, 12, 2)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("feeder.json");
        save_network(&net, &path).unwrap();
        prop_assert_eq!(load_network(&path).unwrap(), net);
    }
}

#[test]
fn bundled_fixture_counts() {
    let cases = [
        ("two_feeder.json", 2, 12, 10, 8, 8, 2),
        ("dg_feeder.json", 1, 13, 12, 12, 9, 0),
        ("double_feed.json", 2, 13, 11, 11, 8, 3),
    ];
    for (file, feeders, nodes, branches, loads, switches, ties) in cases {
        let net = load_network(&feeder_path(file)).unwrap();
        assert_eq!(net.feeders().len(), feeders, "{file}");
        assert_eq!(net.nodes().len(), nodes, "{file}");
        assert_eq!(net.branches().len(), branches, "{file}");
        assert_eq!(net.load_points().len(), loads, "{file}");
        assert_eq!(net.num_switch_sites(), switches, "{file}");
        assert_eq!(net.num_maneuver_sites(), ties, "{file}");
        assert!(net.validate().is_empty());
    }
}

#[test]
fn duplicate_node_id_is_named() {
    let mut d = random_radial(5, 6);
    let dup = d.nodes[1].clone();
    d.nodes.push(dup.clone());
    let report = validate_network(&d);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::DuplicateId { id, .. } if *id == dup.id)));
    let text = serde_json::to_string(&d).unwrap();
    match parse_network(&text, "dup.json".as_ref()) {
        Err(IoError::Invalid { report, .. }) => assert!(report.to_string().contains(&dup.id)),
        other => panic!("expected validation failure, got {other:?}"),
    }
}

#[test]
fn empty_file_is_a_parse_error() {
    let err = parse_network("", "empty.json".as_ref()).unwrap_err();
    assert!(matches!(err, IoError::FeederParse { .. }));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn parse_error_names_the_field() {
    let text = r#"{"nodes": [{"id": "s", "kind": "source"}], "branches": [], "load_points": [
        {"id": "l", "at_node": "s", "mean_active": "lots", "class_mix": {"res": 1.0}}]}"#;
    let err = parse_network(text, "bad.json".as_ref()).unwrap_err().to_string();
    assert!(err.contains("load_points[0].mean_active"), "{err}");
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn every_violation_is_listed() {
    let mut d = random_radial(11, 6);
    d.nodes[1].id = d.nodes[2].id.clone();
    d.branches[0].resistance = -1.0;
    d.load_points.push(d.load_points.first().cloned().unwrap_or_else(|| {
        serde_json::from_str(r#"{"id":"x","at_node":"nowhere","mean_active":1,"class_mix":{"res":1}}"#)
            .unwrap()
    }));
    d.load_points.last_mut().unwrap().class_mix.clear();
    assert!(validate_network(&d).len() >= 3);
}
