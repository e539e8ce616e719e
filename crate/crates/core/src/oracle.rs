//! Exhaustive reference implementations.
//!
//! Everything here works straight from the definition of popularity: a
//! matching is popular when no other matching is preferred by strictly more
//! agents than prefer it. The running time is exponential, so inputs are
//! capped at [`MAX_AGENTS`] agents and [`MAX_POSTS`] real posts.
//!
//! There is no shortcut for counting: with ties, counting popular matchings
//! is #P-complete (perfect matchings of a 3-regular bipartite graph are
//! exactly the popular matchings of the same graph with every edge at rank
//! one), which is why [`count_popular`] only exists in exhaustive form.
//!
//! All functions accept augmented or plain instances and work on the plain
//! one; "unmatched" and "holding ℓ(a)" are the same outcome.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::manipulation::better_always;
use crate::model::{AgentId, Instance, Matching, PostId, PreferenceList};

pub const MAX_AGENTS: usize = 8;
pub const MAX_POSTS: usize = 9;

/// Votes in a head-to-head comparison of two matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComparisonResult {
    pub prefer_first: usize,
    pub prefer_second: usize,
}

impl ComparisonResult {
    pub fn delta(&self) -> i64 {
        self.prefer_first as i64 - self.prefer_second as i64
    }
}

fn check_size(inst: &Instance) -> Result<()> {
    let posts = inst.num_real_posts();
    if inst.num_agents() > MAX_AGENTS || posts > MAX_POSTS {
        return Err(Error::SizeLimit {
            agents: inst.num_agents(),
            posts,
            max_agents: MAX_AGENTS,
            max_posts: MAX_POSTS,
        });
    }
    Ok(())
}

/// Counts the agents preferring `m1` and those preferring `m2`. Each agent
/// judges by its real list; being unmatched is worse than any listed post.
pub fn compare(inst: &Instance, m1: &Matching, m2: &Matching) -> ComparisonResult {
    let mut out = ComparisonResult::default();
    for a in inst.agents() {
        let r1 = inst.true_rank(a, m1.post_of(a));
        let r2 = inst.true_rank(a, m2.post_of(a));
        match r1.cmp(&r2) {
            std::cmp::Ordering::Less => out.prefer_first += 1,
            std::cmp::Ordering::Greater => out.prefer_second += 1,
            std::cmp::Ordering::Equal => {}
        }
    }
    out
}

/// Plain instance, ranks as `(post, 1-based rank)` options per agent.
struct Table {
    options: Vec<Vec<(PostId, usize)>>,
    worst: Vec<usize>,
    num_posts: usize,
}

impl Table {
    fn new(base: &Instance) -> Self {
        let options = base
            .agents()
            .map(|a| {
                base.list(a)
                    .tiers()
                    .iter()
                    .enumerate()
                    .flat_map(|(i, t)| t.iter().map(move |&p| (p, i + 1)))
                    .collect()
            })
            .collect();
        let worst = base.agents().map(|a| base.list(a).len() + 1).collect();
        Table {
            options,
            worst,
            num_posts: base.num_posts(),
        }
    }

    fn ranks_of(&self, m: &[Option<PostId>]) -> Vec<usize> {
        m.iter()
            .enumerate()
            .map(|(a, p)| {
                p.and_then(|p| self.options[a].iter().find(|o| o.0 == p).map(|o| o.1))
                    .unwrap_or(self.worst[a])
            })
            .collect()
    }

    /// Is there any matching that beats the one with the given ranks?
    fn beaten(&self, ranks: &[usize]) -> bool {
        fn go(t: &Table, ranks: &[usize], a: usize, used: &mut [bool], score: i64) -> bool {
            let left = (ranks.len() - a) as i64;
            if score + left <= 0 {
                return false;
            }
            if a == ranks.len() {
                return score > 0;
            }
            let vote = |r: usize| match r.cmp(&ranks[a]) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
            };
            for &(p, r) in &t.options[a] {
                if !used[p.0] {
                    used[p.0] = true;
                    let hit = go(t, ranks, a + 1, used, score + vote(r));
                    used[p.0] = false;
                    if hit {
                        return true;
                    }
                }
            }
            go(t, ranks, a + 1, used, score + vote(t.worst[a]))
        }
        go(self, ranks, 0, &mut vec![false; self.num_posts], 0)
    }

    fn for_each_matching(&self, mut f: impl FnMut(&[Option<PostId>])) {
        fn go(
            t: &Table,
            a: usize,
            cur: &mut Vec<Option<PostId>>,
            used: &mut [bool],
            f: &mut dyn FnMut(&[Option<PostId>]),
        ) {
            if a == t.options.len() {
                f(cur);
                return;
            }
            cur.push(None);
            go(t, a + 1, cur, used, f);
            cur.pop();
            for &(p, _) in &t.options[a] {
                if !used[p.0] {
                    used[p.0] = true;
                    cur.push(Some(p));
                    go(t, a + 1, cur, used, f);
                    cur.pop();
                    used[p.0] = false;
                }
            }
        }
        go(self, 0, &mut Vec::new(), &mut vec![false; self.num_posts], &mut f);
    }
}

/// Plain-instance view of `m`: last-resort pairs dropped.
fn plain(inst: &Instance, m: &Matching) -> Vec<Option<PostId>> {
    inst.agents()
        .map(|a| m.post_of(a).filter(|&p| p.0 < inst.num_posts() && !inst.is_last_resort(p)))
        .collect()
}

/// True iff no matching at all (matched or not, any size) is more popular
/// than `m`.
pub fn is_popular_bruteforce(inst: &Instance, m: &Matching) -> Result<bool> {
    check_size(inst)?;
    let base = inst.base();
    let cur = plain(inst, m);
    for (a, p) in cur.iter().enumerate() {
        if let Some(p) = p {
            if !base.has_edge(AgentId(a), *p) {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    base.agent_name(AgentId(a)),
                    base.post_name(*p)
                )));
            }
        }
    }
    let t = Table::new(&base);
    Ok(!t.beaten(&t.ranks_of(&cur)))
}

/// All popular matchings of the plain instance, sorted.
pub fn enumerate_popular(inst: &Instance) -> Result<Vec<Matching>> {
    check_size(inst)?;
    let base = inst.base();
    let t = Table::new(&base);
    let mut out = Vec::new();
    t.for_each_matching(|cur| {
        if !t.beaten(&t.ranks_of(cur)) {
            let mut m = Matching::empty_for(&base);
            for (a, p) in cur.iter().enumerate() {
                if let Some(p) = p {
                    m.assign(AgentId(a), *p);
                }
            }
            out.push(m);
        }
    });
    out.sort();
    Ok(out)
}

pub fn count_popular(inst: &Instance) -> Result<usize> {
    enumerate_popular(inst).map(|v| v.len())
}

/// Every `(agent, post)` that occurs in some popular matching; `None` stands
/// for "unmatched".
pub fn popular_pairs_bruteforce(inst: &Instance) -> Result<BTreeSet<(AgentId, Option<PostId>)>> {
    let all = enumerate_popular(inst)?;
    Ok(all
        .iter()
        .flat_map(|m| inst.agents().map(move |a| (a, m.post_of(a))))
        .collect())
}

/// Result of trying every strict falsified list of length one or two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveOutcome {
    pub agent: AgentId,
    /// Best and worst true rank over the truthful popular matchings.
    pub truthful_best: usize,
    pub truthful_worst: usize,
    /// Best rank guaranteed by a list that makes the agent better off in
    /// every popular matching; `None` when truth cannot be improved on.
    pub best: Option<usize>,
    /// Every list achieving `best`, in search order.
    pub witnesses: Vec<Vec<PostId>>,
    /// Best true rank seen in any popular matching of any falsified
    /// instance, better-off or not.
    pub best_reachable: Option<usize>,
}

/// Candidate lists: every single post, then every ordered pair of distinct
/// posts.
pub fn short_strict_lists(inst: &Instance) -> Vec<Vec<PostId>> {
    let posts: Vec<PostId> = inst.real_posts().collect();
    let mut out: Vec<Vec<PostId>> = posts.iter().map(|&p| vec![p]).collect();
    for &p in &posts {
        for &q in &posts {
            if p != q {
                out.push(vec![p, q]);
            }
        }
    }
    out
}

/// Range of true ranks `a` receives over the popular matchings of `h`,
/// judged by `truth`'s list. `None` if `h` has no popular matching.
fn rank_range(truth: &Instance, h: &Instance, a: AgentId) -> Result<Option<(usize, usize)>> {
    let all = enumerate_popular(h)?;
    Ok(all
        .iter()
        .map(|m| truth.true_rank(a, m.post_of(a)))
        .fold(None, |acc, r| match acc {
            None => Some((r, r)),
            Some((lo, hi)) => Some((lo.min(r), hi.max(r))),
        }))
}

pub fn exhaustive_strategy_search(inst: &Instance, a: AgentId) -> Result<ExhaustiveOutcome> {
    check_size(inst)?;
    let base = inst.base();
    let (tb, tw) = rank_range(&base, &base, a)?
        .ok_or_else(|| Error::Contract("truthful instance admits no popular matching".into()))?;
    let mut out = ExhaustiveOutcome {
        agent: a,
        truthful_best: tb,
        truthful_worst: tw,
        best: None,
        witnesses: Vec::new(),
        best_reachable: None,
    };
    for list in short_strict_lists(&base) {
        let h = base.with_list(a, PreferenceList::strict(&list)?)?;
        let Some((hb, hw)) = rank_range(&base, &h, a)? else { continue };
        out.best_reachable = Some(out.best_reachable.map_or(hb, |r: usize| r.min(hb)));
        if !better_always(tb, tw, hb, hw) {
            continue;
        }
        match out.best {
            Some(r) if r < hw => {}
            Some(r) if r == hw => out.witnesses.push(list),
            _ => {
                out.best = Some(hw);
                out.witnesses = vec![list];
            }
        }
    }
    Ok(out)
}

/// An agent and the strict list it would report instead of the truth.
pub type Deviation = (AgentId, Vec<PostId>);

/// Truthful reporting is an equilibrium iff no agent has a short strict
/// list that leaves it better off. Returns the first deviating agent and
/// list otherwise.
pub fn truthful_equilibrium_bruteforce(inst: &Instance) -> Result<(bool, Option<Deviation>)> {
    for a in inst.agents() {
        let r = exhaustive_strategy_search(inst, a)?;
        if r.best.is_some() {
            return Ok((false, Some((a, r.witnesses[0].clone()))));
        }
    }
    Ok((true, None))
}
