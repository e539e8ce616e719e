//! The switching graph of a popular matching.
//!
//! Nodes are all posts of the augmented instance. For every agent `a` and
//! every `p` in `choices(a)` other than `M(a)` there is an edge
//! `M(a) -> p`, carrying the agent and the change in its satisfaction if it
//! moved: `+1` better, `-1` worse, `0` indifferent. Unmatched posts are the
//! sinks. Shifting agents along a zero-weight path that ends in a sink, or
//! around a zero-weight cycle, turns one popular matching into another.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;

use crate::engine::{Label, PopularContext};
use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching, PostId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwitchEdge {
    pub from: PostId,
    pub to: PostId,
    pub weight: i8,
    pub via: AgentId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Sink,
    NonSink,
}

/// Edge weight implied by the rank-one labels of its endpoints, or `None`
/// when no such edge can occur.
pub fn table1_weight(from: Label, to: Label) -> Option<i8> {
    use Label::*;
    match (from, to) {
        (Odd, Odd) | (Even, Even) | (Unreachable, Unreachable) => Some(0),
        (Odd, Even) | (Unreachable, Even) => Some(-1),
        (Even, Odd) => Some(1),
        (Odd, Unreachable) | (Even, Unreachable) | (Unreachable, Odd) => None,
    }
}

#[derive(Debug, Clone)]
pub struct SwitchingGraph {
    edges: Vec<SwitchEdge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    sink: Vec<bool>,
    labels1: Vec<Label>,
    component: Vec<usize>,
    kinds: Vec<ComponentKind>,
    scc: Vec<usize>,
    /// SCC ids in an order where every edge between SCCs goes from a later
    /// entry to an earlier one.
    scc_order: Vec<usize>,
    potential: Vec<i32>,
    matching: Matching,
}

impl SwitchingGraph {
    pub fn build(ctx: &PopularContext) -> Self {
        let inst = ctx.instance();
        let m = ctx.matching();
        let n = inst.num_posts();
        let mut edges = Vec::new();
        for a in inst.agents() {
            let Some(from) = m.post_of(a) else { continue };
            let here = inst.tier_of(a, from).expect("matched along an edge");
            for &to in ctx.choices(a) {
                if to == from {
                    continue;
                }
                let there = inst.tier_of(a, to).expect("choice is an edge");
                let weight = match there.cmp(&here) {
                    std::cmp::Ordering::Less => 1,
                    std::cmp::Ordering::Greater => -1,
                    std::cmp::Ordering::Equal => 0,
                };
                edges.push(SwitchEdge { from, to, weight, via: a });
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out[e.from.0].push(i);
            inc[e.to.0].push(i);
        }
        let sink: Vec<bool> = inst.posts().map(|p| !m.is_matched_post(p)).collect();

        let mut uf = UnionFind::<usize>::new(n);
        for e in &edges {
            uf.union(e.from.0, e.to.0);
        }
        let mut root_id = vec![usize::MAX; n];
        let mut component = vec![0; n];
        let mut kinds = Vec::new();
        for v in 0..n {
            let r = uf.find(v);
            if root_id[r] == usize::MAX {
                root_id[r] = kinds.len();
                kinds.push(ComponentKind::NonSink);
            }
            component[v] = root_id[r];
            if sink[v] {
                kinds[root_id[r]] = ComponentKind::Sink;
            }
        }

        let mut g = DiGraph::<(), ()>::with_capacity(n, edges.len());
        for _ in 0..n {
            g.add_node(());
        }
        for e in &edges {
            g.add_edge(NodeIndex::new(e.from.0), NodeIndex::new(e.to.0), ());
        }
        let sccs = tarjan_scc(&g);
        let mut scc = vec![0; n];
        for (i, c) in sccs.iter().enumerate() {
            for v in c {
                scc[v.index()] = i;
            }
        }
        let scc_order = (0..sccs.len()).collect();

        // Offsets within each SCC; meaningful when every cycle weighs 0.
        let mut potential = vec![0i32; n];
        let mut seen = vec![false; n];
        for c in &sccs {
            let root = c[0].index();
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &i in &out[v] {
                    let e = edges[i];
                    if scc[e.to.0] == scc[v] && !seen[e.to.0] {
                        seen[e.to.0] = true;
                        potential[e.to.0] = potential[v] + e.weight as i32;
                        queue.push_back(e.to.0);
                    }
                }
                for &i in &inc[v] {
                    let e = edges[i];
                    if scc[e.from.0] == scc[v] && !seen[e.from.0] {
                        seen[e.from.0] = true;
                        potential[e.from.0] = potential[v] - e.weight as i32;
                        queue.push_back(e.from.0);
                    }
                }
            }
        }

        SwitchingGraph {
            edges,
            out,
            inc,
            sink,
            labels1: ctx.labels1().post_labels().to_vec(),
            component,
            kinds,
            scc,
            scc_order,
            potential,
            matching: m.clone(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.sink.len()
    }

    pub fn edges(&self) -> &[SwitchEdge] {
        &self.edges
    }

    pub fn out_edges(&self, p: PostId) -> impl Iterator<Item = &SwitchEdge> + '_ {
        self.out[p.0].iter().map(|&i| &self.edges[i])
    }

    pub fn in_edges(&self, p: PostId) -> impl Iterator<Item = &SwitchEdge> + '_ {
        self.inc[p.0].iter().map(|&i| &self.edges[i])
    }

    pub fn edge(&self, from: PostId, to: PostId) -> Option<&SwitchEdge> {
        self.out_edges(from).find(|e| e.to == to)
    }

    pub fn has_edge(&self, from: PostId, to: PostId) -> bool {
        self.edge(from, to).is_some()
    }

    pub fn is_sink(&self, p: PostId) -> bool {
        self.sink[p.0]
    }

    pub fn sinks(&self) -> impl Iterator<Item = PostId> + '_ {
        (0..self.num_nodes()).map(PostId).filter(|&p| self.sink[p.0])
    }

    /// The matching the graph was built from.
    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    /// Rank-one label of a node.
    pub fn label1(&self, p: PostId) -> Label {
        self.labels1[p.0]
    }

    pub fn component(&self, p: PostId) -> usize {
        self.component[p.0]
    }

    pub fn num_components(&self) -> usize {
        self.kinds.len()
    }

    pub fn component_kind(&self, c: usize) -> ComponentKind {
        self.kinds[c]
    }

    pub fn in_sink_component(&self, p: PostId) -> bool {
        self.kinds[self.component[p.0]] == ComponentKind::Sink
    }

    pub fn non_sink_components(&self) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&c| self.kinds[c] == ComponentKind::NonSink)
            .collect()
    }

    pub fn scc(&self, p: PostId) -> usize {
        self.scc[p.0]
    }

    pub fn same_scc(&self, a: PostId, b: PostId) -> bool {
        self.scc[a.0] == self.scc[b.0]
    }

    /// True iff every cycle has weight zero.
    pub fn cycles_balanced(&self) -> bool {
        self.edges.iter().all(|e| {
            !self.same_scc(e.from, e.to)
                || self.potential[e.to.0] == self.potential[e.from.0] + e.weight as i32
        })
    }

    /// For every node, the largest weight of a path (possibly empty) from it
    /// to some node in `targets`, or `None` if no target is reachable.
    /// Assumes [`Self::cycles_balanced`].
    pub fn max_weight_to(&self, targets: &[bool]) -> Vec<Option<i32>> {
        let n = self.num_nodes();
        let mut members = vec![Vec::new(); self.scc_order.len()];
        for v in 0..n {
            members[self.scc[v]].push(v);
        }
        // best_scc[c]: max over targets/exits of c, measured from potential 0.
        let mut best_scc: Vec<Option<i32>> = vec![None; members.len()];
        let mut best = vec![None; n];
        for &c in &self.scc_order {
            let mut b: Option<i32> = None;
            for &v in &members[c] {
                if targets[v] {
                    b = b.max(Some(self.potential[v]));
                }
                for &i in &self.out[v] {
                    let e = self.edges[i];
                    if self.scc[e.to.0] != c {
                        if let Some(rest) = best[e.to.0] {
                            b = b.max(Some(self.potential[v] + e.weight as i32 + rest));
                        }
                    }
                }
            }
            best_scc[c] = b;
            for &v in &members[c] {
                best[v] = b.map(|x| x - self.potential[v]);
            }
        }
        best
    }

    /// Largest weight of a path from each node to a sink.
    pub fn max_weight_to_sink(&self) -> Vec<Option<i32>> {
        self.max_weight_to(&self.sink)
    }

    /// Nodes reachable from `start` (inclusive), in BFS order.
    pub fn reachable_from(&self, start: PostId) -> Vec<PostId> {
        let mut seen = vec![false; self.num_nodes()];
        seen[start.0] = true;
        let mut order = vec![start];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for e in self.out_edges(v) {
                if !seen[e.to.0] {
                    seen[e.to.0] = true;
                    order.push(e.to);
                }
            }
        }
        order
    }

    /// Shortest path from `start` to a node satisfying `goal`, following
    /// edges forward (or backward when `reverse`). The returned sequence
    /// starts at `start`.
    fn bfs(&self, start: PostId, reverse: bool, goal: impl Fn(PostId) -> bool) -> Option<Vec<PostId>> {
        let n = self.num_nodes();
        let mut prev = vec![usize::MAX; n];
        prev[start.0] = start.0;
        let mut queue = VecDeque::from([start.0]);
        while let Some(v) = queue.pop_front() {
            if goal(PostId(v)) {
                let mut path = vec![PostId(v)];
                let mut x = v;
                while x != start.0 {
                    x = prev[x];
                    path.push(PostId(x));
                }
                path.reverse();
                return Some(path);
            }
            let next: Vec<usize> = if reverse {
                self.inc[v].iter().map(|&i| self.edges[i].from.0).collect()
            } else {
                self.out[v].iter().map(|&i| self.edges[i].to.0).collect()
            };
            for w in next {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn walk(&self, nodes: &[PostId], closed: bool) -> Result<(Vec<AgentId>, i32)> {
        let mut agents = Vec::new();
        let mut weight = 0;
        let steps = if closed { nodes.len() } else { nodes.len().saturating_sub(1) };
        for i in 0..steps {
            let (x, y) = (nodes[i], nodes[(i + 1) % nodes.len()]);
            let e = self
                .edge(x, y)
                .ok_or_else(|| Error::Contract(format!("no edge p#{} -> p#{}", x.0, y.0)))?;
            agents.push(e.via);
            weight += e.weight as i32;
        }
        let distinct: BTreeSet<_> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::Contract("walk repeats a node".into()));
        }
        Ok((agents, weight))
    }

    /// Validates `nodes` as a switching path: simple, weight 0, ending at a
    /// sink. A single sink node is the empty path.
    pub fn path(&self, nodes: &[PostId]) -> Result<SwitchingPath> {
        let last = *nodes
            .last()
            .ok_or_else(|| Error::Contract("empty node sequence".into()))?;
        if !self.is_sink(last) {
            return Err(Error::Contract("switching path must end at a sink".into()));
        }
        let (agents, weight) = self.walk(nodes, false)?;
        if weight != 0 {
            return Err(Error::Contract(format!("switching path has weight {weight}")));
        }
        Ok(SwitchingPath {
            nodes: nodes.to_vec(),
            agents,
        })
    }

    /// Validates `nodes` as a switching cycle `nodes[0] -> ... -> nodes[0]`.
    pub fn cycle(&self, nodes: &[PostId]) -> Result<SwitchingCycle> {
        if nodes.len() < 2 {
            return Err(Error::Contract("a cycle needs at least two nodes".into()));
        }
        let (agents, weight) = self.walk(nodes, true)?;
        if weight != 0 {
            return Err(Error::Contract(format!("switching cycle has weight {weight}")));
        }
        Ok(SwitchingCycle {
            nodes: nodes.to_vec(),
            agents,
        })
    }

    /// Splits the difference between the graph's matching and another
    /// popular matching `other` of the same instance into switching paths
    /// and cycles. Fails if the difference is not of that shape.
    pub fn decompose(&self, other: &Matching) -> Result<(Vec<SwitchingPath>, Vec<SwitchingCycle>)> {
        let m = &self.matching;
        let n = self.num_nodes();
        let mut next = vec![None; n];
        let mut has_prev = vec![false; n];
        for (a, from) in m.pairs() {
            let to = other
                .post_of(a)
                .ok_or_else(|| Error::Contract("other matching leaves an agent unmatched".into()))?;
            if to != from {
                next[from.0] = Some(to);
                has_prev[to.0] = true;
            }
        }
        let mut done = vec![false; n];
        let mut paths = Vec::new();
        for v in 0..n {
            if next[v].is_none() || has_prev[v] {
                continue;
            }
            let mut nodes = vec![PostId(v)];
            let mut x = v;
            while let Some(y) = next[x] {
                done[x] = true;
                nodes.push(y);
                x = y.0;
            }
            done[x] = true;
            paths.push(self.path(&nodes)?);
        }
        let mut cycles = Vec::new();
        for v in 0..n {
            if done[v] || next[v].is_none() {
                continue;
            }
            let mut nodes = Vec::new();
            let mut x = v;
            while !done[x] {
                done[x] = true;
                nodes.push(PostId(x));
                x = next[x].expect("cycle continues").0;
            }
            cycles.push(self.cycle(&nodes)?);
        }
        Ok((paths, cycles))
    }

    /// DOT rendering. Nodes show the post name and its rank-one label; sinks
    /// are double circles; edges show weight and agent. Last-resort posts
    /// appear only when some edge touches them.
    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut s = String::from("digraph switching {\n");
        for p in inst.posts() {
            let touched = !self.out[p.0].is_empty() || !self.inc[p.0].is_empty();
            if inst.is_last_resort(p) && !touched {
                continue;
            }
            let shape = if self.is_sink(p) { "doublecircle" } else { "circle" };
            let _ = writeln!(
                s,
                "  \"{}\" [label=\"{} ({})\", shape={}];",
                inst.post_name(p),
                inst.post_name(p),
                self.label1(p).short(),
                shape
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{:+} {}\"];",
                inst.post_name(e.from),
                inst.post_name(e.to),
                e.weight,
                inst.agent_name(e.via)
            );
        }
        s.push_str("}\n");
        s
    }
}

/// A zero-weight simple path ending at a sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingPath {
    nodes: Vec<PostId>,
    agents: Vec<AgentId>,
}

impl SwitchingPath {
    pub fn nodes(&self) -> &[PostId] {
        &self.nodes
    }

    /// The agent moving along each edge.
    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

/// A zero-weight simple cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchingCycle {
    nodes: Vec<PostId>,
    agents: Vec<AgentId>,
}

impl SwitchingCycle {
    pub fn nodes(&self) -> &[PostId] {
        &self.nodes
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }
}

fn shift(m: &Matching, nodes: &[PostId], agents: &[AgentId], closed: bool) -> Result<Matching> {
    for (i, &a) in agents.iter().enumerate() {
        if m.post_of(a) != Some(nodes[i]) {
            return Err(Error::Contract("walk does not follow the matching".into()));
        }
    }
    let mut out = m.clone();
    for &a in agents {
        out.unassign(a);
    }
    for (i, &a) in agents.iter().enumerate() {
        let to = if closed { nodes[(i + 1) % nodes.len()] } else { nodes[i + 1] };
        out.assign(a, to);
    }
    Ok(out)
}

/// Moves every agent on `t` one post forward. The first post is freed and
/// the sink becomes matched.
pub fn apply_path(m: &Matching, t: &SwitchingPath) -> Result<Matching> {
    shift(m, &t.nodes, &t.agents, false)
}

/// Rotates the agents on `c` one post forward.
pub fn apply_cycle(m: &Matching, c: &SwitchingCycle) -> Result<Matching> {
    shift(m, &c.nodes, &c.agents, true)
}

/// The posts reachable from `q`, and the agents holding them. No agent
/// outside the returned set can be moved onto one of these posts.
pub fn tight_pair(sg: &SwitchingGraph, q: PostId) -> Result<(BTreeSet<AgentId>, BTreeSet<PostId>)> {
    if sg.in_sink_component(q) {
        return Err(Error::Contract(format!("post #{} lies in a sink component", q.0)));
    }
    let posts: BTreeSet<PostId> = sg.reachable_from(q).into_iter().collect();
    let agents = posts
        .iter()
        .map(|&p| sg.matching().agent_of(p).expect("non-sink posts are matched"))
        .collect();
    Ok((agents, posts))
}

/// A popular matching giving `a` the post `p`, obtained from the graph's
/// matching by one switching path or cycle through `M(a) -> p`. Fails when
/// no such path or cycle exists.
pub fn realize_pair(sg: &SwitchingGraph, a: AgentId, p: PostId) -> Result<Matching> {
    let m = sg.matching();
    let x = m
        .post_of(a)
        .ok_or_else(|| Error::Contract("agent is unmatched".into()))?;
    if x == p {
        return Ok(m.clone());
    }
    let e = *sg
        .edge(x, p)
        .ok_or_else(|| Error::Contract("post is not among the agent's choices".into()))?;
    debug_assert_eq!(e.via, a);
    if sg.same_scc(x, p) {
        let back = sg
            .bfs(p, false, |v| v == x)
            .expect("same strongly connected component");
        let mut nodes = vec![x];
        nodes.extend_from_slice(&back[..back.len() - 1]);
        return apply_cycle(m, &sg.cycle(&nodes)?);
    }
    let prefix = sg
        .bfs(x, true, |v| sg.label1(v) == Label::Even)
        .ok_or_else(|| Error::Contract("no switching path through the edge".into()))?;
    let suffix = sg
        .bfs(p, false, |v| sg.is_sink(v))
        .ok_or_else(|| Error::Contract("no switching path through the edge".into()))?;
    let mut nodes: Vec<PostId> = prefix.into_iter().rev().collect();
    nodes.extend(suffix);
    apply_path(m, &sg.path(&nodes)?)
}
