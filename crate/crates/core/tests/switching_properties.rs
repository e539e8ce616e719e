use popmatch::analysis::Analysis;
use popmatch::engine::{fill_last_resorts, Label};
use popmatch::gen::corpus_instance;
use popmatch::model::{augment_last_resorts, Instance, PostId};
use popmatch::oracle;
use popmatch::switching::{realize_pair, tight_pair, SwitchingGraph};
use proptest::prelude::*;

fn instance(seed: u64) -> Instance {
    let tie = [0.0, 0.3, 0.6][(seed % 3) as usize];
    corpus_instance(6, 6, tie, seed)
}

/// Calls `f(path, weight)` for every simple path with at least one edge, and
/// `c(weight)` for every simple cycle (once per starting node).
fn walk_all(sg: &SwitchingGraph, mut f: impl FnMut(&[PostId], i32), mut c: impl FnMut(i32)) {
    fn go(
        sg: &SwitchingGraph,
        path: &mut Vec<PostId>,
        w: i32,
        f: &mut dyn FnMut(&[PostId], i32),
        c: &mut dyn FnMut(i32),
    ) {
        let v = *path.last().unwrap();
        for e in sg.out_edges(v) {
            if e.to == path[0] {
                c(w + e.weight as i32);
            }
            if path.contains(&e.to) {
                continue;
            }
            path.push(e.to);
            f(path, w + e.weight as i32);
            go(sg, path, w + e.weight as i32, f, c);
            path.pop();
        }
    }
    for v in 0..sg.num_nodes() {
        go(sg, &mut vec![PostId(v)], 0, &mut f, &mut c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sinks_and_components_follow_labels(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        let sg = &an.graph;
        for p in an.ctx.instance().posts() {
            prop_assert_eq!(sg.is_sink(p), !an.ctx.matching().is_matched_post(p));
            if sg.is_sink(p) {
                prop_assert_eq!(an.ctx.labels1().post(p), Label::Even);
            }
            let l2 = an.ctx.labels2().post(p);
            if sg.in_sink_component(p) {
                prop_assert_eq!(l2, Label::Even);
            } else {
                prop_assert_eq!(l2, Label::Unreachable);
            }
        }
    }

    #[test]
    fn edge_weights_follow_rank_one_labels(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for e in an.graph.edges() {
            let w = popmatch::switching::table1_weight(an.graph.label1(e.from), an.graph.label1(e.to));
            prop_assert_eq!(w, Some(e.weight));
        }
    }

    #[test]
    fn path_and_cycle_weights(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        let sg = &an.graph;
        prop_assert!(sg.cycles_balanced());
        let mut bad = Vec::new();
        let mut bad_cycles = Vec::new();
        walk_all(
            sg,
            |path, w| {
                if !(-1..=1).contains(&w) || (w == 1 && sg.is_sink(*path.last().unwrap())) {
                    bad.push(format!("path {path:?} weight {w}"));
                }
            },
            |w| {
                if w != 0 {
                    bad_cycles.push(w);
                }
            },
        );
        prop_assert!(bad.is_empty(), "{:?}", bad);
        prop_assert!(bad_cycles.is_empty(), "cycle weights {:?}", bad_cycles);
    }

    #[test]
    fn every_popular_matching_is_reached_by_switching(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        let aug = an.ctx.instance();
        for other in oracle::enumerate_popular(&g).unwrap() {
            let full = fill_last_resorts(&other, aug).unwrap();
            let (paths, cycles) = an.graph.decompose(&full).unwrap();
            let mut m = an.ctx.matching().clone();
            for t in &paths {
                m = popmatch::switching::apply_path(&m, t).unwrap();
            }
            for c in &cycles {
                m = popmatch::switching::apply_cycle(&m, c).unwrap();
            }
            prop_assert_eq!(m, full);
        }
    }

    #[test]
    fn every_popular_pair_is_realizable(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for &(a, p) in &an.pairs {
            let m = realize_pair(&an.graph, a, p).unwrap();
            prop_assert_eq!(m.post_of(a), Some(p));
            prop_assert!(oracle::is_popular_bruteforce(an.ctx.instance(), &m).unwrap());
        }
    }

    #[test]
    fn tight_pairs_are_closed(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for q in an.ctx.instance().posts() {
            if an.graph.in_sink_component(q) {
                prop_assert!(tight_pair(&an.graph, q).is_err());
                continue;
            }
            let (agents, posts) = tight_pair(&an.graph, q).unwrap();
            prop_assert_eq!(agents.len(), posts.len());
            for a in &agents {
                prop_assert!(an.ctx.choices(*a).iter().all(|p| posts.contains(p)));
            }
        }
    }
}

#[test]
fn lifted_matching_is_popular_in_modified_instance() {
    for seed in 0..60 {
        let g = corpus_instance(5, 6, 0.3, seed);
        let Some(an) = Analysis::of(&g).unwrap() else { continue };
        let tilde = popmatch::manipulation::modified_instance(&an.ctx).unwrap();
        assert!(oracle::is_popular_bruteforce(&tilde.instance, &tilde.matching).unwrap(), "seed {seed}");
        let tctx = tilde.context().unwrap();
        for a in g.agents() {
            assert_eq!(tctx.s(a), an.ctx.s(a), "seed {seed}");
        }
    }
}

#[test]
fn switching_graph_of_plain_matching_rejected() {
    let g = augment_last_resorts(&popmatch::model::parse_instance("a: p q\nb: p q\n").unwrap()).unwrap();
    let m = popmatch::model::Matching::from_names(&g, &[("a", "q"), ("b", "p")]).unwrap();
    // a and b both prefer p; giving it to b and q to a is still popular
    // (tied vote against every alternative).
    let ctx = popmatch::engine::PopularContext::with_matching(&g, m).unwrap();
    let sg = SwitchingGraph::build(&ctx);
    assert!(sg.cycles_balanced());
}
