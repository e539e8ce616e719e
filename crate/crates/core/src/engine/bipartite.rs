//! Bipartite graphs between agents and posts, maximum matchings, and the
//! even/odd/unreachable vertex classification.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{AgentId, Matching, PostId};

/// Undirected bipartite graph; agents on one side, posts on the other.
/// Neighbour lists keep insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    adj: Vec<Vec<PostId>>,
    radj: Vec<Vec<AgentId>>,
}

impl BipartiteGraph {
    pub fn new(num_agents: usize, num_posts: usize) -> Self {
        BipartiteGraph {
            adj: vec![Vec::new(); num_agents],
            radj: vec![Vec::new(); num_posts],
        }
    }

    pub fn from_adjacency(num_posts: usize, adj: Vec<Vec<PostId>>) -> Self {
        let mut g = Self::new(adj.len(), num_posts);
        for (a, ps) in adj.into_iter().enumerate() {
            for p in ps {
                g.add_edge(AgentId(a), p);
            }
        }
        g
    }

    /// Adds `(a, p)` unless present.
    pub fn add_edge(&mut self, a: AgentId, p: PostId) {
        if !self.has_edge(a, p) {
            self.adj[a.0].push(p);
            self.radj[p.0].push(a);
        }
    }

    pub fn has_edge(&self, a: AgentId, p: PostId) -> bool {
        self.adj[a.0].contains(&p)
    }

    pub fn num_agents(&self) -> usize {
        self.adj.len()
    }

    pub fn num_posts(&self) -> usize {
        self.radj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, a: AgentId) -> &[PostId] {
        &self.adj[a.0]
    }

    pub fn agents_of(&self, p: PostId) -> &[AgentId] {
        &self.radj[p.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (AgentId, PostId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ps)| ps.iter().map(move |&p| (AgentId(a), p)))
    }

    /// Splits the edge set by `keep`; returns the kept graph and the removed
    /// edges in agent order.
    pub fn partition_edges(
        &self,
        mut keep: impl FnMut(AgentId, PostId) -> bool,
    ) -> (BipartiteGraph, Vec<(AgentId, PostId)>) {
        let mut kept = BipartiteGraph::new(self.num_agents(), self.num_posts());
        let mut removed = Vec::new();
        for (a, p) in self.edges() {
            if keep(a, p) {
                kept.add_edge(a, p);
            } else {
                removed.push((a, p));
            }
        }
        (kept, removed)
    }

    /// Same edges, neighbour lists reversed.
    pub fn reversed_order(&self) -> BipartiteGraph {
        let mut adj = self.adj.clone();
        for l in &mut adj {
            l.reverse();
        }
        BipartiteGraph::from_adjacency(self.num_posts(), adj)
    }

    fn check_matching(&self, m: &Matching) -> Result<()> {
        if m.num_agents() != self.num_agents() || m.num_posts() != self.num_posts() {
            return Err(Error::Contract("matching dimensions do not fit the graph".into()));
        }
        if let Some((a, p)) = m.pairs().find(|&(a, p)| !self.has_edge(a, p)) {
            return Err(Error::Contract(format!(
                "seed pair (#{}, #{}) is not an edge of the graph",
                a.0, p.0
            )));
        }
        Ok(())
    }
}

/// Maximum matching obtained by augmenting `seed`; agents are tried in index
/// order and each search is breadth-first, so the result is deterministic.
/// Vertices matched by `seed` stay matched.
pub fn max_matching(g: &BipartiteGraph, seed: &Matching) -> Result<Matching> {
    max_matching_in_order(g, seed, (0..g.num_agents()).map(AgentId))
}

/// [`max_matching`] trying free agents in the given order.
pub fn max_matching_in_order(
    g: &BipartiteGraph,
    seed: &Matching,
    order: impl IntoIterator<Item = AgentId>,
) -> Result<Matching> {
    g.check_matching(seed)?;
    let mut m = seed.clone();
    let mut prev: Vec<Option<AgentId>> = vec![None; g.num_posts()];
    let mut touched: Vec<PostId> = Vec::new();
    let mut queue = VecDeque::new();
    for root in order {
        if m.post_of(root).is_some() {
            continue;
        }
        for p in touched.drain(..) {
            prev[p.0] = None;
        }
        queue.clear();
        queue.push_back(root);
        let mut free_end = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for &p in g.neighbors(x) {
                if prev[p.0].is_some() {
                    continue;
                }
                prev[p.0] = Some(x);
                touched.push(p);
                match m.agent_of(p) {
                    None => {
                        free_end = Some(p);
                        break 'bfs;
                    }
                    Some(y) => queue.push_back(y),
                }
            }
        }
        // Flip the alternating path ending at the free post.
        let mut cur = free_end;
        while let Some(p) = cur {
            let x = prev[p.0].expect("post on path has a parent");
            let next = m.post_of(x);
            m.assign(x, p);
            cur = if x == root { None } else { next };
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Even,
    Odd,
    Unreachable,
}

impl Label {
    pub fn short(self) -> &'static str {
        match self {
            Label::Even => "E",
            Label::Odd => "O",
            Label::Unreachable => "U",
        }
    }
}

/// Even/odd/unreachable classification of every vertex with respect to a
/// maximum matching. The classes do not depend on which maximum matching
/// was used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EouLabels {
    agents: Vec<Label>,
    posts: Vec<Label>,
}

impl EouLabels {
    pub fn agent(&self, a: AgentId) -> Label {
        self.agents[a.0]
    }

    pub fn post(&self, p: PostId) -> Label {
        self.posts[p.0]
    }

    pub fn agent_labels(&self) -> &[Label] {
        &self.agents
    }

    pub fn post_labels(&self) -> &[Label] {
        &self.posts
    }

    pub fn count(&self, label: Label) -> usize {
        self.agents.iter().chain(&self.posts).filter(|&&l| l == label).count()
    }

    pub fn posts_with(&self, label: Label) -> impl Iterator<Item = PostId> + '_ {
        self.posts
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(p, _)| PostId(p))
    }
}

#[derive(Clone, Copy)]
enum Vertex {
    Agent(AgentId),
    Post(PostId),
}

/// Labels vertices by alternating-path parity from unmatched vertices.
/// Fails if `m` is not maximum in `g`.
pub fn eou_labels(g: &BipartiteGraph, m: &Matching) -> Result<EouLabels> {
    g.check_matching(m)?;
    let mut agents: Vec<Option<Label>> = vec![None; g.num_agents()];
    let mut posts: Vec<Option<Label>> = vec![None; g.num_posts()];
    let mut queue = VecDeque::new();
    for (a, label) in agents.iter_mut().enumerate() {
        if m.post_of(AgentId(a)).is_none() {
            *label = Some(Label::Even);
            queue.push_back(Vertex::Agent(AgentId(a)));
        }
    }
    for (p, label) in posts.iter_mut().enumerate() {
        if m.agent_of(PostId(p)).is_none() {
            *label = Some(Label::Even);
            queue.push_back(Vertex::Post(PostId(p)));
        }
    }
    let not_maximum = || Error::Contract("matching is not maximum: an augmenting path exists".into());

    // From an even vertex walk a non-matching edge to an odd vertex, then
    // the matching edge to an even vertex.
    while let Some(v) = queue.pop_front() {
        match v {
            Vertex::Agent(a) => {
                let mine = m.post_of(a);
                for &p in g.neighbors(a) {
                    if Some(p) == mine {
                        continue;
                    }
                    match posts[p.0] {
                        Some(Label::Odd) => {}
                        Some(_) => return Err(not_maximum()),
                        None => {
                            posts[p.0] = Some(Label::Odd);
                            let b = m.agent_of(p).ok_or_else(not_maximum)?;
                            match agents[b.0] {
                                None => {
                                    agents[b.0] = Some(Label::Even);
                                    queue.push_back(Vertex::Agent(b));
                                }
                                Some(Label::Even) => {}
                                Some(_) => return Err(not_maximum()),
                            }
                        }
                    }
                }
            }
            Vertex::Post(p) => {
                let mine = m.agent_of(p);
                for &a in g.agents_of(p) {
                    if Some(a) == mine {
                        continue;
                    }
                    match agents[a.0] {
                        Some(Label::Odd) => {}
                        Some(_) => return Err(not_maximum()),
                        None => {
                            agents[a.0] = Some(Label::Odd);
                            let q = m.post_of(a).ok_or_else(not_maximum)?;
                            match posts[q.0] {
                                None => {
                                    posts[q.0] = Some(Label::Even);
                                    queue.push_back(Vertex::Post(q));
                                }
                                Some(Label::Even) => {}
                                Some(_) => return Err(not_maximum()),
                            }
                        }
                    }
                }
            }
        }
    }
    let fin = |v: Vec<Option<Label>>| v.into_iter().map(|l| l.unwrap_or(Label::Unreachable)).collect();
    Ok(EouLabels {
        agents: fin(agents),
        posts: fin(posts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(num_posts: usize, adj: &[&[usize]]) -> BipartiteGraph {
        BipartiteGraph::from_adjacency(
            num_posts,
            adj.iter().map(|l| l.iter().map(|&p| PostId(p)).collect()).collect(),
        )
    }

    /// Largest matching by trying every assignment.
    fn brute_max(g: &BipartiteGraph) -> usize {
        fn go(g: &BipartiteGraph, a: usize, used: &mut Vec<bool>) -> usize {
            if a == g.num_agents() {
                return 0;
            }
            let mut best = go(g, a + 1, used);
            for &p in g.neighbors(AgentId(a)) {
                if !used[p.0] {
                    used[p.0] = true;
                    best = best.max(1 + go(g, a + 1, used));
                    used[p.0] = false;
                }
            }
            best
        }
        go(g, 0, &mut vec![false; g.num_posts()])
    }

    #[test]
    fn empty_graph() {
        let g = BipartiteGraph::new(0, 0);
        assert!(max_matching(&g, &Matching::empty(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn complete_two_by_two() {
        let g = graph(2, &[&[0, 1], &[0, 1]]);
        assert_eq!(max_matching(&g, &Matching::empty(2, 2)).unwrap().len(), 2);
    }

    #[test]
    fn single_matched_edge_is_unreachable() {
        let g = graph(1, &[&[0]]);
        let m = max_matching(&g, &Matching::empty(1, 1)).unwrap();
        let l = eou_labels(&g, &m).unwrap();
        assert_eq!(l.agent(AgentId(0)), Label::Unreachable);
        assert_eq!(l.post(PostId(0)), Label::Unreachable);
    }

    #[test]
    fn unmatched_agent_is_even_and_its_post_odd() {
        // a0 - p0 - a1, p0 matched to a1
        let g = graph(1, &[&[0], &[0]]);
        let mut m = Matching::empty(2, 1);
        m.assign(AgentId(1), PostId(0));
        let l = eou_labels(&g, &m).unwrap();
        assert_eq!(l.agent(AgentId(0)), Label::Even);
        assert_eq!(l.post(PostId(0)), Label::Odd);
        assert_eq!(l.agent(AgentId(1)), Label::Even);
    }

    #[test]
    fn non_maximum_matching_is_rejected() {
        let g = graph(2, &[&[0, 1], &[0]]);
        let mut m = Matching::empty(2, 2);
        m.assign(AgentId(0), PostId(0));
        assert!(matches!(eou_labels(&g, &m), Err(Error::Contract(_))));
    }

    #[test]
    fn seed_must_lie_in_graph() {
        let g = graph(2, &[&[0], &[1]]);
        let mut m = Matching::empty(2, 2);
        m.assign(AgentId(0), PostId(1));
        assert!(max_matching(&g, &m).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = BipartiteGraph> {
        (1usize..7, 1usize..7).prop_flat_map(|(na, np)| {
            proptest::collection::vec(proptest::collection::vec(0..np, 0..=np), na).prop_map(
                move |adj| {
                    BipartiteGraph::from_adjacency(
                        np,
                        adj.into_iter().map(|l| l.into_iter().map(PostId).collect()).collect(),
                    )
                },
            )
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force_size(g in arb_graph()) {
            let m = max_matching(&g, &Matching::empty(g.num_agents(), g.num_posts())).unwrap();
            prop_assert_eq!(m.len(), brute_max(&g));
            for (a, p) in m.pairs() {
                prop_assert!(g.has_edge(a, p));
            }
        }

        #[test]
        fn labels_independent_of_maximum_matching(g in arb_graph()) {
            let empty = Matching::empty(g.num_agents(), g.num_posts());
            let m1 = max_matching(&g, &empty).unwrap();
            let rev = g.reversed_order();
            let m2 = max_matching_in_order(&rev, &empty, (0..g.num_agents()).rev().map(AgentId)).unwrap();
            let l1 = eou_labels(&g, &m1).unwrap();
            let l2 = eou_labels(&g, &m2).unwrap();
            prop_assert_eq!(&l1, &l2);
            // |M| = |O| + |U| / 2
            prop_assert_eq!(m1.len() * 2, 2 * l1.count(Label::Odd) + l1.count(Label::Unreachable));
            // no E-E or E-U edges; odd vertices matched
            for (a, p) in g.edges() {
                let (la, lp) = (l1.agent(a), l1.post(p));
                prop_assert!(!(la == Label::Even && lp != Label::Odd));
                prop_assert!(!(lp == Label::Even && la != Label::Odd));
            }
            for a in 0..g.num_agents() {
                if l1.agent(AgentId(a)) == Label::Odd {
                    prop_assert!(m1.post_of(AgentId(a)).is_some());
                }
            }
        }

        #[test]
        fn augmenting_keeps_seed_vertices_matched(g in arb_graph(), cut in 0usize..6) {
            let empty = Matching::empty(g.num_agents(), g.num_posts());
            let full = max_matching(&g, &empty).unwrap();
            let mut seed = empty.clone();
            for (a, p) in full.pairs().take(cut) {
                seed.assign(a, p);
            }
            let m = max_matching(&g, &seed).unwrap();
            prop_assert_eq!(m.len(), full.len());
            for (a, p) in seed.pairs() {
                prop_assert!(m.post_of(a).is_some());
                prop_assert!(m.agent_of(p).is_some());
            }
        }
    }
}
