//! Agents, posts, tiered preference lists and matchings.
//!
//! Identifiers are dense 0-based indices in file order. Everything downstream
//! iterates in index order, so every "pick any" choice made by the algorithms
//! is reproducible.

mod text;

pub use text::{parse_instance, serialize_instance};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PostId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl PostId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// An ordered sequence of non-empty, pairwise disjoint tiers. Tier `i` holds
/// the posts the agent ranks `i + 1`; posts inside a tier are tied.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceList {
    tiers: Vec<Vec<PostId>>,
}

impl PreferenceList {
    pub fn new(tiers: Vec<Vec<PostId>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for tier in &tiers {
            if tier.is_empty() {
                return Err(Error::Contract("preference tier is empty".into()));
            }
            for &p in tier {
                if !seen.insert(p) {
                    return Err(Error::Contract(format!(
                        "post #{} listed twice in one preference list",
                        p.0
                    )));
                }
            }
        }
        Ok(PreferenceList { tiers })
    }

    /// A strict list: one post per tier.
    pub fn strict(posts: &[PostId]) -> Result<Self> {
        Self::new(posts.iter().map(|&p| vec![p]).collect())
    }

    pub fn tiers(&self) -> &[Vec<PostId>] {
        &self.tiers
    }

    /// Number of tiers.
    pub fn len(&self) -> usize {
        self.tiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.is_empty()
    }

    pub fn first_tier(&self) -> &[PostId] {
        self.tiers.first().map(Vec::as_slice).unwrap_or(&[])
    }

    /// 0-based tier index of `p`, if listed.
    pub fn tier_of(&self, p: PostId) -> Option<usize> {
        self.tiers.iter().position(|t| t.contains(&p))
    }

    pub fn contains(&self, p: PostId) -> bool {
        self.tier_of(p).is_some()
    }

    pub fn posts(&self) -> impl Iterator<Item = PostId> + '_ {
        self.tiers.iter().flatten().copied()
    }

    pub fn is_strict(&self) -> bool {
        self.tiers.iter().all(|t| t.len() == 1)
    }
}

/// A one-sided preference instance `G = (A ∪ P, E)`.
///
/// When augmented, every agent `a` owns a unique last-resort post `ℓ(a)` that
/// sits alone in its final tier. Last-resort posts are always appended after
/// the real posts, so the real posts keep their indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agent_names: Vec<String>,
    post_names: Vec<String>,
    lists: Vec<PreferenceList>,
    /// `Some` once augmented; indexed by agent.
    last_resort: Option<Vec<PostId>>,
    /// Owner of each last-resort post, indexed by post.
    owner: Vec<Option<AgentId>>,
}

impl Instance {
    pub fn new(
        agent_names: Vec<String>,
        post_names: Vec<String>,
        lists: Vec<PreferenceList>,
    ) -> Result<Self> {
        if agent_names.len() != lists.len() {
            return Err(Error::Contract(format!(
                "{} agent names but {} preference lists",
                agent_names.len(),
                lists.len()
            )));
        }
        check_unique(&agent_names, "agent")?;
        check_unique(&post_names, "post")?;
        for (name, list) in agent_names.iter().zip(&lists) {
            if let Some(p) = list.posts().find(|p| p.0 >= post_names.len()) {
                return Err(Error::Contract(format!(
                    "agent `{name}` lists post #{} which does not exist",
                    p.0
                )));
            }
        }
        let owner = vec![None; post_names.len()];
        Ok(Instance {
            agent_names,
            post_names,
            lists,
            last_resort: None,
            owner,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn num_posts(&self) -> usize {
        self.post_names.len()
    }

    /// Posts that are not last resorts.
    pub fn num_real_posts(&self) -> usize {
        self.owner.iter().filter(|o| o.is_none()).count()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.num_agents()).map(AgentId)
    }

    pub fn posts(&self) -> impl Iterator<Item = PostId> {
        (0..self.num_posts()).map(PostId)
    }

    pub fn real_posts(&self) -> impl Iterator<Item = PostId> + '_ {
        self.posts().filter(|&p| !self.is_last_resort(p))
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agent_names[a.0]
    }

    pub fn post_name(&self, p: PostId) -> &str {
        &self.post_names[p.0]
    }

    pub fn find_agent(&self, name: &str) -> Option<AgentId> {
        self.agent_names.iter().position(|n| n == name).map(AgentId)
    }

    pub fn find_post(&self, name: &str) -> Option<PostId> {
        self.post_names.iter().position(|n| n == name).map(PostId)
    }

    pub fn agent(&self, name: &str) -> Result<AgentId> {
        self.find_agent(name)
            .ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }

    pub fn post(&self, name: &str) -> Result<PostId> {
        self.find_post(name)
            .ok_or_else(|| Error::UnknownPost(name.to_string()))
    }

    /// The agent's full list, including the last-resort tier when augmented.
    pub fn list(&self, a: AgentId) -> &PreferenceList {
        &self.lists[a.0]
    }

    /// The agent's tiers without the last-resort tier.
    pub fn true_tiers(&self, a: AgentId) -> &[Vec<PostId>] {
        let tiers = self.lists[a.0].tiers();
        if self.is_augmented() {
            &tiers[..tiers.len() - 1]
        } else {
            tiers
        }
    }

    pub fn is_augmented(&self) -> bool {
        self.last_resort.is_some()
    }

    pub fn last_resort(&self, a: AgentId) -> Option<PostId> {
        self.last_resort.as_ref().map(|l| l[a.0])
    }

    pub fn is_last_resort(&self, p: PostId) -> bool {
        self.owner[p.0].is_some()
    }

    pub fn last_resort_owner(&self, p: PostId) -> Option<AgentId> {
        self.owner[p.0]
    }

    /// Does `a` list `p` (in any tier)?
    pub fn has_edge(&self, a: AgentId, p: PostId) -> bool {
        self.lists[a.0].contains(p)
    }

    pub fn num_edges(&self) -> usize {
        self.lists.iter().map(|l| l.posts().count()).sum()
    }

    /// 0-based tier of `p` in `a`'s list.
    pub fn tier_of(&self, a: AgentId, p: PostId) -> Option<usize> {
        self.lists[a.0].tier_of(p)
    }

    /// 1-based rank of an assignment as judged by `a`'s real list. Being
    /// unmatched, holding `ℓ(a)`, or holding an unlisted post all share the
    /// worst rank, one past the last real tier.
    pub fn true_rank(&self, a: AgentId, p: Option<PostId>) -> usize {
        let tiers = self.true_tiers(a);
        p.and_then(|p| tiers.iter().position(|t| t.contains(&p)))
            .map_or(tiers.len() + 1, |i| i + 1)
    }

    /// A copy with `a`'s real list replaced by `list`. On an augmented
    /// instance `ℓ(a)` is re-appended as the final tier.
    pub fn with_list(&self, a: AgentId, list: PreferenceList) -> Result<Instance> {
        if let Some(p) = list.posts().find(|&p| p.0 >= self.num_posts() || self.is_last_resort(p)) {
            return Err(Error::Contract(format!(
                "replacement list names post #{} which is not a real post",
                p.0
            )));
        }
        let mut out = self.clone();
        out.lists[a.0] = match self.last_resort(a) {
            Some(l) => {
                let mut tiers = list.tiers;
                tiers.push(vec![l]);
                PreferenceList { tiers }
            }
            None => list,
        };
        Ok(out)
    }

    /// The same instance with last-resort posts and tiers removed.
    pub fn base(&self) -> Instance {
        if !self.is_augmented() {
            return self.clone();
        }
        let real = self.num_real_posts();
        Instance {
            agent_names: self.agent_names.clone(),
            post_names: self.post_names[..real].to_vec(),
            lists: self
                .agents()
                .map(|a| PreferenceList {
                    tiers: self.true_tiers(a).to_vec(),
                })
                .collect(),
            last_resort: None,
            owner: vec![None; real],
        }
    }

    /// Augmented copy; returns `self` unchanged if it already is.
    pub fn ensure_augmented(&self) -> Instance {
        if self.is_augmented() {
            self.clone()
        } else {
            augment_last_resorts(self).expect("not yet augmented")
        }
    }

    /// Appends agent `name` with its own last resort. Only for augmented
    /// instances; used to build the dummy-agent instance.
    pub(crate) fn push_agent_with_last_resort(
        &mut self,
        name: String,
        real_tiers: Vec<Vec<PostId>>,
    ) -> AgentId {
        let a = AgentId(self.agent_names.len());
        let l = PostId(self.post_names.len());
        self.post_names.push(last_resort_name(&name));
        self.owner.push(Some(a));
        self.agent_names.push(name);
        let mut tiers = real_tiers;
        tiers.push(vec![l]);
        self.lists.push(PreferenceList { tiers });
        self.last_resort
            .as_mut()
            .expect("push_agent_with_last_resort on augmented instance")
            .push(l);
        a
    }

    /// Human-readable `agent -> post` lines, last resorts shown as `-`.
    pub fn format_matching(&self, m: &Matching) -> String {
        let mut out = String::new();
        for a in self.agents() {
            let post = match m.post_of(a) {
                Some(p) if !self.is_last_resort(p) => self.post_name(p),
                _ => "-",
            };
            out.push_str(&format!("{} -> {}\n", self.agent_name(a), post));
        }
        out
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Contract(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

fn last_resort_name(agent: &str) -> String {
    format!("ℓ({agent})")
}

/// Gives every agent a private worst post `ℓ(a)` so that every agent can be
/// assumed matched.
pub fn augment_last_resorts(inst: &Instance) -> Result<Instance> {
    if inst.is_augmented() {
        return Err(Error::AlreadyAugmented);
    }
    let mut out = inst.clone();
    let mut lr = Vec::with_capacity(inst.num_agents());
    for a in inst.agents() {
        let l = PostId(out.post_names.len());
        out.post_names.push(last_resort_name(inst.agent_name(a)));
        out.owner.push(Some(a));
        out.lists[a.0].tiers.push(vec![l]);
        lr.push(l);
    }
    out.last_resort = Some(lr);
    Ok(out)
}

/// Drops every `(a, ℓ(a))` pair, reporting those agents as unmatched.
pub fn strip_last_resorts(m: &Matching, inst: &Instance) -> Result<Matching> {
    if !inst.is_augmented() {
        return Err(Error::NotAugmented);
    }
    let mut out = m.clone();
    for (a, p) in m.pairs() {
        if inst.is_last_resort(p) {
            out.unassign(a);
        }
    }
    Ok(out)
}

/// An injective partial map from agents to posts, kept in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    post_of: Vec<Option<PostId>>,
    agent_of: Vec<Option<AgentId>>,
}

impl Matching {
    pub fn empty(num_agents: usize, num_posts: usize) -> Self {
        Matching {
            post_of: vec![None; num_agents],
            agent_of: vec![None; num_posts],
        }
    }

    pub fn empty_for(inst: &Instance) -> Self {
        Self::empty(inst.num_agents(), inst.num_posts())
    }

    /// Builds a matching of `inst`, checking injectivity and that every
    /// pair is an edge.
    pub fn from_pairs(
        inst: &Instance,
        pairs: impl IntoIterator<Item = (AgentId, PostId)>,
    ) -> Result<Self> {
        let mut m = Self::empty_for(inst);
        for (a, p) in pairs {
            if a.0 >= inst.num_agents() || p.0 >= inst.num_posts() {
                return Err(Error::InvalidMatching("index out of range".into()));
            }
            if !inst.has_edge(a, p) {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    inst.agent_name(a),
                    inst.post_name(p)
                )));
            }
            if m.post_of[a.0].is_some() || m.agent_of[p.0].is_some() {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) overlaps another pair",
                    inst.agent_name(a),
                    inst.post_name(p)
                )));
            }
            m.assign(a, p);
        }
        Ok(m)
    }

    /// Like [`Matching::from_pairs`] with names, e.g. `[("a1", "p6")]`.
    pub fn from_names(inst: &Instance, pairs: &[(&str, &str)]) -> Result<Self> {
        let ids = pairs
            .iter()
            .map(|(a, p)| Ok((inst.agent(a)?, inst.post(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(inst, ids)
    }

    pub fn num_agents(&self) -> usize {
        self.post_of.len()
    }

    pub fn num_posts(&self) -> usize {
        self.agent_of.len()
    }

    #[inline]
    pub fn post_of(&self, a: AgentId) -> Option<PostId> {
        self.post_of[a.0]
    }

    #[inline]
    pub fn agent_of(&self, p: PostId) -> Option<AgentId> {
        self.agent_of[p.0]
    }

    pub fn is_matched_post(&self, p: PostId) -> bool {
        self.agent_of[p.0].is_some()
    }

    /// Pairs `a` with `p`, first releasing whatever either was paired with.
    pub fn assign(&mut self, a: AgentId, p: PostId) {
        self.unassign(a);
        if let Some(b) = self.agent_of[p.0] {
            self.post_of[b.0] = None;
        }
        self.post_of[a.0] = Some(p);
        self.agent_of[p.0] = Some(a);
    }

    pub fn unassign(&mut self, a: AgentId) {
        if let Some(p) = self.post_of[a.0].take() {
            self.agent_of[p.0] = None;
        }
    }

    pub fn len(&self) -> usize {
        self.post_of.iter().filter(|p| p.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, PostId)> + '_ {
        self.post_of
            .iter()
            .enumerate()
            .filter_map(|(a, p)| p.map(|p| (AgentId(a), p)))
    }

    pub fn contains(&self, a: AgentId, p: PostId) -> bool {
        self.post_of[a.0] == Some(p)
    }

    /// Re-dimensions to `num_agents` x `num_posts`, dropping pairs that fall
    /// outside.
    pub fn resized(&self, num_agents: usize, num_posts: usize) -> Matching {
        let mut out = Matching::empty(num_agents, num_posts);
        for (a, p) in self.pairs() {
            if a.0 < num_agents && p.0 < num_posts {
                out.assign(a, p);
            }
        }
        out
    }

    /// Checks injectivity and edge membership against `inst`.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        if self.num_agents() != inst.num_agents() || self.num_posts() != inst.num_posts() {
            return Err(Error::InvalidMatching(
                "matching dimensions do not fit the instance".into(),
            ));
        }
        for (a, p) in self.pairs() {
            if !inst.has_edge(a, p) {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    inst.agent_name(a),
                    inst.post_name(p)
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, p)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(#{}, #{})", a.0, p.0)?;
        }
        write!(f, "}}")
    }
}
