//! Popular pairs, agent classes, and the cubic-graph reduction.

use std::collections::BTreeSet;
use std::fmt;

use crate::engine::{Label, PopularContext};
use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, PostId, PreferenceList};
use crate::switching::SwitchingGraph;

/// Every `(a, p)` such that some popular matching gives `a` the post `p`,
/// in the augmented instance.
///
/// A pair is popular when it is in the current matching, when its edge lies
/// inside a strongly connected component of the switching graph, or when
/// its edge can be reached from a post that is even both at rank one and in
/// the pruned graph (such posts start every switching path).
pub fn popular_pairs(ctx: &PopularContext, sg: &SwitchingGraph) -> BTreeSet<(AgentId, PostId)> {
    let mut out: BTreeSet<_> = ctx.matching().pairs().collect();
    for e in sg.edges() {
        if sg.same_scc(e.from, e.to) {
            out.insert((e.via, e.to));
        }
    }
    let n = sg.num_nodes();
    let mut seen = vec![false; n];
    let mut stack: Vec<PostId> = (0..n)
        .map(PostId)
        .filter(|&p| ctx.labels1().post(p) == Label::Even && ctx.labels2().post(p) == Label::Even)
        .collect();
    for p in &stack {
        seen[p.0] = true;
    }
    while let Some(v) = stack.pop() {
        for e in sg.out_edges(v) {
            out.insert((e.via, e.to));
            if !seen[e.to.0] {
                seen[e.to.0] = true;
                stack.push(e.to);
            }
        }
    }
    out
}

/// Popular pairs with last resorts read as "unmatched", for comparison with
/// a plain instance.
pub fn plain_pairs(
    inst: &Instance,
    pairs: &BTreeSet<(AgentId, PostId)>,
) -> BTreeSet<(AgentId, Option<PostId>)> {
    pairs
        .iter()
        .map(|&(a, p)| (a, (!inst.is_last_resort(p)).then_some(p)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentClass {
    /// Always matched to a first choice.
    F,
    /// Never matched to a first choice.
    S,
    /// Sometimes.
    FS,
}

impl fmt::Display for AgentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentClass::F => "F",
            AgentClass::S => "S",
            AgentClass::FS => "FS",
        })
    }
}

pub fn classify_agents(ctx: &PopularContext, pairs: &BTreeSet<(AgentId, PostId)>) -> Vec<AgentClass> {
    let inst = ctx.instance();
    inst.agents()
        .map(|a| {
            let (mut first, mut other) = (false, false);
            for &(_, p) in pairs.range((a, PostId(0))..=(a, PostId(usize::MAX))) {
                if ctx.f(a).contains(&p) {
                    first = true;
                } else {
                    other = true;
                }
            }
            match (first, other) {
                (true, false) => AgentClass::F,
                (false, _) => AgentClass::S,
                (true, true) => AgentClass::FS,
            }
        })
        .collect()
}

/// Everything derived from one popular matching of an instance.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub ctx: PopularContext,
    pub graph: SwitchingGraph,
    pub pairs: BTreeSet<(AgentId, PostId)>,
    pub classes: Vec<AgentClass>,
}

impl Analysis {
    pub fn new(ctx: PopularContext) -> Self {
        let graph = SwitchingGraph::build(&ctx);
        let pairs = popular_pairs(&ctx, &graph);
        let classes = classify_agents(&ctx, &pairs);
        Analysis { ctx, graph, pairs, classes }
    }

    /// `None` when the instance has no popular matching. Plain instances are
    /// augmented first.
    pub fn of(inst: &Instance) -> Result<Option<Self>> {
        let aug = inst.ensure_augmented();
        Ok(crate::engine::popular_matching(&aug)?.map(Self::new))
    }

    pub fn posts_of(&self, a: AgentId) -> impl Iterator<Item = PostId> + '_ {
        self.pairs
            .range((a, PostId(0))..=(a, PostId(usize::MAX)))
            .map(|&(_, p)| p)
    }

    /// Best and worst true rank of `a` over all popular matchings.
    pub fn rank_range(&self, a: AgentId) -> (usize, usize) {
        let inst = self.ctx.instance();
        self.posts_of(a)
            .map(|p| inst.true_rank(a, Some(p)))
            .fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }
}

/// Turns a bipartite graph in which every vertex has degree three into an
/// instance where each left vertex ranks its three neighbours equally first.
/// The popular matchings of the result are the perfect matchings of the
/// graph.
pub fn reduction_from_regular(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Instance> {
    if left != right {
        return Err(Error::Contract(format!("sides differ: {left} vs {right}")));
    }
    let mut adj = vec![Vec::new(); left];
    let mut deg_right = vec![0usize; right];
    for &(u, v) in edges {
        if u >= left || v >= right {
            return Err(Error::Contract(format!("edge ({u}, {v}) out of range")));
        }
        if adj[u].contains(&PostId(v)) {
            return Err(Error::Contract(format!("duplicate edge ({u}, {v})")));
        }
        adj[u].push(PostId(v));
        deg_right[v] += 1;
    }
    if adj.iter().any(|n| n.len() != 3) || deg_right.iter().any(|&d| d != 3) {
        return Err(Error::Contract("graph is not 3-regular".into()));
    }
    let lists = adj
        .into_iter()
        .map(|mut n| {
            n.sort();
            PreferenceList::new(vec![n])
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(
        (1..=left).map(|i| format!("a{i}")).collect(),
        (1..=right).map(|i| format!("p{i}")).collect(),
        lists,
    )
}

/// Left vertex `i` joined to right vertices `i`, `i+1`, `i+2` (mod `n`).
pub fn circulant_cubic(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..3).map(move |k| (i, (i + k) % n))).collect()
}
