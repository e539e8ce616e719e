use std::collections::BTreeSet;

use super::bipartite::{eou_labels, max_matching, BipartiteGraph, EouLabels, Label};
use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching, PostId};

/// f(a): the agent's first tier, for every agent.
pub fn first_choices(inst: &Instance) -> Vec<Vec<PostId>> {
    inst.agents().map(|a| inst.list(a).first_tier().to_vec()).collect()
}

/// s(a): the earliest tier holding a post that is even in the rank-one
/// graph, restricted to its even posts. Empty for an agent with no even post
/// on its list, which cannot happen once last resorts are added.
pub fn second_choices(inst: &Instance, labels1: &EouLabels) -> Vec<Vec<PostId>> {
    inst.agents()
        .map(|a| {
            inst.list(a)
                .tiers()
                .iter()
                .map(|t| {
                    t.iter()
                        .copied()
                        .filter(|&p| labels1.post(p) == Label::Even)
                        .collect::<Vec<_>>()
                })
                .find(|t| !t.is_empty())
                .unwrap_or_default()
        })
        .collect()
}

/// The graph on rank-one edges.
pub fn rank_one_graph(inst: &Instance) -> BipartiteGraph {
    BipartiteGraph::from_adjacency(inst.num_posts(), first_choices(inst))
}

/// Replaces "unmatched" by `(a, ℓ(a))` so a base-instance matching can be
/// read in the augmented instance.
pub fn fill_last_resorts(m: &Matching, aug: &Instance) -> Result<Matching> {
    if !aug.is_augmented() {
        return Err(Error::NotAugmented);
    }
    let mut out = m.resized(aug.num_agents(), aug.num_posts());
    for a in aug.agents() {
        if out.post_of(a).is_none() {
            let l = aug.last_resort(a).expect("augmented");
            if out.is_matched_post(l) {
                return Err(Error::InvalidMatching("last-resort post held by another agent".into()));
            }
            out.assign(a, l);
        }
    }
    Ok(out)
}

/// Checks the popularity characterization directly: every agent is matched
/// into f(a) ∪ s(a), and the rank-one pairs form a maximum matching of the
/// rank-one graph. `m` lives in the augmented instance.
pub fn satisfies_characterization(aug: &Instance, m: &Matching) -> Result<bool> {
    if !aug.is_augmented() {
        return Err(Error::NotAugmented);
    }
    m.validate(aug)?;
    let g1 = rank_one_graph(aug);
    let m1 = max_matching(&g1, &Matching::empty_for(aug))?;
    let labels1 = eou_labels(&g1, &m1)?;
    let f = first_choices(aug);
    let s = second_choices(aug, &labels1);
    let mut rank_one = 0;
    for a in aug.agents() {
        let Some(p) = m.post_of(a) else { return Ok(false) };
        if f[a.0].contains(&p) {
            rank_one += 1;
        } else if !s[a.0].contains(&p) {
            return Ok(false);
        }
    }
    Ok(rank_one == m1.len())
}

struct StageOne {
    f: Vec<Vec<PostId>>,
    s: Vec<Vec<PostId>>,
    g1: BipartiteGraph,
    m1: Matching,
    labels1: EouLabels,
    g_prime: BipartiteGraph,
    removed_step4: Vec<(AgentId, PostId)>,
}

/// Rank-one matching, its labels, f/s, and G′ with O₁–(O₁∪U₁) edges dropped.
fn stage_one(inst: &Instance) -> Result<StageOne> {
    if !inst.is_augmented() {
        return Err(Error::NotAugmented);
    }
    let g1 = rank_one_graph(inst);
    let m1 = max_matching(&g1, &Matching::empty_for(inst))?;
    let labels1 = eou_labels(&g1, &m1)?;
    let f = first_choices(inst);
    let s = second_choices(inst, &labels1);

    let mut full = BipartiteGraph::new(inst.num_agents(), inst.num_posts());
    for a in inst.agents() {
        for &p in f[a.0].iter().chain(&s[a.0]) {
            full.add_edge(a, p);
        }
    }
    let (g_prime, removed_step4) = full.partition_edges(|a, p| {
        let (la, lp) = (labels1.agent(a), labels1.post(p));
        let odd_to_odd_or_unr = la == Label::Odd && lp != Label::Even;
        let unr_to_odd = la == Label::Unreachable && lp == Label::Odd;
        !(odd_to_odd_or_unr || unr_to_odd)
    });
    Ok(StageOne {
        f,
        s,
        g1,
        m1,
        labels1,
        g_prime,
        removed_step4,
    })
}

/// Everything the popular-matching pipeline derives from an instance and one
/// of its popular matchings.
#[derive(Debug, Clone)]
pub struct PopularContext {
    inst: Instance,
    f: Vec<Vec<PostId>>,
    s: Vec<Vec<PostId>>,
    g1: BipartiteGraph,
    m1: Matching,
    labels1: EouLabels,
    g_prime: BipartiteGraph,
    labels2: EouLabels,
    g2: BipartiteGraph,
    removed_step4: Vec<(AgentId, PostId)>,
    removed_step9: Vec<(AgentId, PostId)>,
    matching: Matching,
}

/// Edges dropped by the two pruning passes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneReport {
    /// Rank-one edges that no maximum rank-one matching uses.
    pub step4: BTreeSet<(AgentId, PostId)>,
    /// Edges that no popular matching uses.
    pub step9: BTreeSet<(AgentId, PostId)>,
}

/// Runs the popular-matching algorithm on an augmented instance. Returns
/// `Ok(None)` when the instance admits no popular matching.
pub fn popular_matching(inst: &Instance) -> Result<Option<PopularContext>> {
    let one = stage_one(inst)?;
    let m = max_matching(&one.g_prime, &one.m1)?;
    if m.len() < inst.num_agents() {
        return Ok(None);
    }
    Ok(Some(PopularContext::finish(inst, one, m)?))
}

impl PopularContext {
    /// Builds the context around a known popular matching `m` of the
    /// augmented instance. Fails if `m` is not popular.
    pub fn with_matching(inst: &Instance, m: Matching) -> Result<Self> {
        let one = stage_one(inst)?;
        m.validate(inst)?;
        if !satisfies_characterization(inst, &m)? {
            return Err(Error::Contract("matching is not popular".into()));
        }
        if let Some((a, p)) = m.pairs().find(|&(a, p)| !one.g_prime.has_edge(a, p)) {
            return Err(Error::Contract(format!(
                "pair ({}, {}) is outside the pruned graph",
                inst.agent_name(a),
                inst.post_name(p)
            )));
        }
        Self::finish(inst, one, m)
    }

    fn finish(inst: &Instance, one: StageOne, m: Matching) -> Result<Self> {
        let labels2 = eou_labels(&one.g_prime, &m)?;
        let (g2, removed_step9) = one.g_prime.partition_edges(|a, p| {
            let (la, lp) = (labels2.agent(a), labels2.post(p));
            let odd_unr = la == Label::Odd && lp == Label::Unreachable;
            let unr_odd = la == Label::Unreachable && lp == Label::Odd;
            !(odd_unr || unr_odd)
        });
        Ok(PopularContext {
            inst: inst.clone(),
            f: one.f,
            s: one.s,
            g1: one.g1,
            m1: one.m1,
            labels1: one.labels1,
            g_prime: one.g_prime,
            labels2,
            g2,
            removed_step4: one.removed_step4,
            removed_step9,
            matching: m,
        })
    }

    /// The augmented instance.
    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    /// The popular matching (in the augmented instance; every agent matched).
    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn f(&self, a: AgentId) -> &[PostId] {
        &self.f[a.0]
    }

    pub fn s(&self, a: AgentId) -> &[PostId] {
        &self.s[a.0]
    }

    pub fn rank_one_graph(&self) -> &BipartiteGraph {
        &self.g1
    }

    /// The maximum rank-one matching the pipeline started from.
    pub fn rank_one_matching(&self) -> &Matching {
        &self.m1
    }

    /// Labels on the rank-one graph.
    pub fn labels1(&self) -> &EouLabels {
        &self.labels1
    }

    /// Labels on the first-pruned f/s graph w.r.t. the popular matching.
    pub fn labels2(&self) -> &EouLabels {
        &self.labels2
    }

    /// The f/s graph after the first pruning pass.
    pub fn pruned_graph(&self) -> &BipartiteGraph {
        &self.g_prime
    }

    /// The f/s graph after both pruning passes.
    pub fn reduced_graph(&self) -> &BipartiteGraph {
        &self.g2
    }

    /// Posts `a` can hold in some popularity-feasible assignment.
    pub fn choices(&self, a: AgentId) -> &[PostId] {
        self.g2.neighbors(a)
    }

    pub fn prune_report(&self) -> PruneReport {
        PruneReport {
            step4: self.removed_step4.iter().copied().collect(),
            step9: self.removed_step9.iter().copied().collect(),
        }
    }
}
