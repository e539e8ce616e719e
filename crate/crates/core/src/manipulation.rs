//! Single-agent cheating strategies and the truthful-equilibrium test.
//!
//! The manipulator wants to be *better always*: in the falsified instance
//! every popular matching must treat it at least as well as the best it
//! could get truthfully, and at least one must do strictly better. An agent
//! that already gets a first choice in every truthful popular matching has
//! nothing to gain.

use crate::analysis::{AgentClass, Analysis};
use crate::engine::{Label, PopularContext};
use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching, PostId, PreferenceList};
use crate::switching::{realize_pair, SwitchingGraph};

/// The better-always test on true ranks (1 = first tier). `truth_*` range
/// over the truthful popular matchings, `h_*` over those of the falsified
/// instance.
pub fn better_always(truth_best: usize, truth_worst: usize, h_best: usize, h_worst: usize) -> bool {
    if h_worst > truth_best {
        return false;
    }
    if truth_best > 1 {
        h_best < truth_best
    } else {
        truth_worst > 1
    }
}

/// The instance with one extra agent `b` whose first tier is every post
/// left unreachable in the rank-one graph, together with the lifted
/// popular matching that parks `b` on its last resort.
#[derive(Debug, Clone)]
pub struct ModifiedInstance {
    pub instance: Instance,
    pub dummy: AgentId,
    pub matching: Matching,
}

impl ModifiedInstance {
    pub fn context(&self) -> Result<PopularContext> {
        PopularContext::with_matching(&self.instance, self.matching.clone())
    }
}

pub fn modified_instance(ctx: &PopularContext) -> Result<ModifiedInstance> {
    let inst = ctx.instance();
    let mut unreachable: Vec<PostId> = ctx.labels1().posts_with(Label::Unreachable).collect();
    unreachable.sort();
    let mut name = String::from("b");
    while inst.find_agent(&name).is_some() {
        name.push('\'');
    }
    let mut out = inst.clone();
    let tiers = if unreachable.is_empty() { vec![] } else { vec![unreachable] };
    let dummy = out.push_agent_with_last_resort(name, tiers);
    let mut matching = ctx.matching().resized(out.num_agents(), out.num_posts());
    matching.assign(dummy, out.last_resort(dummy).expect("augmented"));
    Ok(ModifiedInstance {
        instance: out,
        dummy,
        matching,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    TruthOptimal,
    Falsify {
        /// Strict list to report, best first.
        list: Vec<PostId>,
        /// The post every popular matching of the falsified instance gives.
        guaranteed: PostId,
        /// Its rank in the true list.
        true_rank: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyOutcome {
    pub agent: AgentId,
    pub class: AgentClass,
    /// Worst true rank over the truthful popular matchings.
    pub true_rank_before: usize,
    pub verdict: Verdict,
}

impl StrategyOutcome {
    /// Rank the agent ends up with for sure.
    pub fn true_rank_after(&self) -> usize {
        match &self.verdict {
            Verdict::TruthOptimal => self.true_rank_before,
            Verdict::Falsify { true_rank, .. } => *true_rank,
        }
    }

    pub fn is_falsify(&self) -> bool {
        matches!(self.verdict, Verdict::Falsify { .. })
    }
}

fn analyse(inst: &Instance) -> Result<Analysis> {
    Analysis::of(inst)?.ok_or_else(|| Error::Contract("instance admits no popular matching".into()))
}

fn check_agent(an: &Analysis, a1: AgentId) -> Result<()> {
    if a1.0 >= an.ctx.instance().num_agents() {
        return Err(Error::UnknownAgent(format!("#{}", a1.0)));
    }
    Ok(())
}

fn outcome(an: &Analysis, a1: AgentId, verdict: Verdict) -> StrategyOutcome {
    StrategyOutcome {
        agent: a1,
        class: an.classes[a1.0],
        true_rank_before: an.rank_range(a1).1,
        verdict,
    }
}

fn sorted(v: &[PostId]) -> Vec<PostId> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn s_agent(an: &Analysis, a1: AgentId) -> Result<StrategyOutcome> {
    let inst = an.ctx.instance();
    let tilde = modified_instance(&an.ctx)?;
    let tsg = SwitchingGraph::build(&tilde.context()?);
    let held = tilde.matching.post_of(a1).expect("augmented matching is complete");
    let t = inst.true_rank(a1, Some(held));
    let mut target = vec![false; tsg.num_nodes()];
    target[held.0] = true;
    let reach = tsg.max_weight_to(&target);

    let tiers = inst.true_tiers(a1);
    let found = (2..t).find_map(|rank| {
        sorted(&tiers[rank - 1])
            .into_iter()
            .find(|&p| tsg.in_sink_component(p) || reach[p.0].is_some())
            .map(|p| (p, rank))
    });
    let Some((p, rank)) = found else {
        return Ok(outcome(an, a1, Verdict::TruthOptimal));
    };

    let f1 = an.ctx.f(a1);
    let second = inst
        .agents()
        .filter(|&a| tilde.matching.post_of(a).is_some_and(|q| f1.contains(&q)))
        .find_map(|a2| sorted(an.ctx.s(a2)).into_iter().find(|&q| !inst.is_last_resort(q)));
    let mut list = vec![p];
    list.extend(second);
    Ok(outcome(
        an,
        a1,
        Verdict::Falsify {
            list,
            guaranteed: p,
            true_rank: rank,
        },
    ))
}

fn fs_agent(an: &Analysis, a1: AgentId) -> Result<StrategyOutcome> {
    let inst = an.ctx.instance();
    let q = sorted(an.ctx.f(a1))
        .into_iter()
        .find(|&q| an.pairs.contains(&(a1, q)))
        .ok_or_else(|| Error::Contract("agent has no popular first-choice pair".into()))?;
    let m = realize_pair(&an.graph, a1, q)?;
    let ctx = PopularContext::with_matching(inst, m)?;
    let tilde = modified_instance(&ctx)?;
    let tsg = SwitchingGraph::build(&tilde.context()?);
    let mut target = vec![false; tsg.num_nodes()];
    target[q.0] = true;
    let best = tsg.max_weight_to(&target);

    let found = inst.real_posts().find(|&p| {
        ctx.labels1().post(p) == Label::Even && !tsg.in_sink_component(p) && best[p.0] != Some(1)
    });
    let verdict = match found {
        None => Verdict::TruthOptimal,
        Some(p2) => Verdict::Falsify {
            list: vec![q, p2],
            guaranteed: q,
            true_rank: 1,
        },
    };
    Ok(outcome(an, a1, verdict))
}

fn dispatch(an: &Analysis, a1: AgentId) -> Result<StrategyOutcome> {
    check_agent(an, a1)?;
    match an.classes[a1.0] {
        AgentClass::F => Ok(outcome(an, a1, Verdict::TruthOptimal)),
        AgentClass::S => s_agent(an, a1),
        AgentClass::FS => fs_agent(an, a1),
    }
}

/// Strategy for an agent never matched to a first choice: the best post
/// ranked strictly between first and its current tier that is either in a
/// sink component of the modified switching graph or can reach the agent's
/// current post.
pub fn strategy_s_agent(inst: &Instance, a1: AgentId) -> Result<StrategyOutcome> {
    let an = analyse(inst)?;
    check_agent(&an, a1)?;
    if an.classes[a1.0] != AgentClass::S {
        return Err(Error::Contract(format!("agent is class {}, not S", an.classes[a1.0])));
    }
    s_agent(&an, a1)
}

/// Strategy for an agent sometimes matched to a first choice: keep that
/// first choice and add an even post from a non-sink component that has no
/// improving path back to it.
pub fn strategy_fs_agent(inst: &Instance, a1: AgentId) -> Result<StrategyOutcome> {
    let an = analyse(inst)?;
    check_agent(&an, a1)?;
    if an.classes[a1.0] != AgentClass::FS {
        return Err(Error::Contract(format!("agent is class {}, not FS", an.classes[a1.0])));
    }
    fs_agent(&an, a1)
}

pub fn best_strategy(inst: &Instance, a1: AgentId) -> Result<StrategyOutcome> {
    dispatch(&analyse(inst)?, a1)
}

/// Strategies for every agent, sharing one analysis.
pub fn all_strategies(inst: &Instance) -> Result<Vec<StrategyOutcome>> {
    let an = analyse(inst)?;
    inst.agents().map(|a| dispatch(&an, a)).collect()
}

/// `g` with `a1`'s real list replaced by the strict `list`, without last
/// resorts.
pub fn falsified_instance(g: &Instance, a1: AgentId, list: &[PostId]) -> Result<Instance> {
    g.base().with_list(a1, PreferenceList::strict(list)?)
}

/// `list` followed by every other real post in index order. The padding
/// does not change the popular matchings.
pub fn pad_list(g: &Instance, list: &[PostId]) -> Vec<PostId> {
    let mut out = list.to_vec();
    out.extend(g.real_posts().filter(|p| !list.contains(p)));
    out
}

/// Is `a1` better always in `h` than in `g`? Ranks are read from `a1`'s
/// list in `g`. `h` must differ from `g` in `a1`'s list only.
pub fn verify_better_always(g: &Instance, h: &Instance, a1: AgentId) -> Result<bool> {
    let (gb, hb) = (g.base(), h.base());
    if gb.num_agents() != hb.num_agents() || gb.num_posts() != hb.num_posts() {
        return Err(Error::Contract("instances have different agents or posts".into()));
    }
    if let Some(a) = gb.agents().find(|&a| a != a1 && gb.list(a) != hb.list(a)) {
        return Err(Error::Contract(format!(
            "falsified instance changes the list of {}",
            gb.agent_name(a)
        )));
    }
    let truth = analyse(&gb)?;
    let Some(fake) = Analysis::of(&hb)? else { return Ok(false) };
    let (tb, tw) = truth.rank_range(a1);
    let aug = truth.ctx.instance();
    let (mut lo, mut hi) = (usize::MAX, 0);
    for p in fake.posts_of(a1) {
        let r = if fake.ctx.instance().is_last_resort(p) {
            aug.true_rank(a1, None)
        } else {
            aug.true_rank(a1, Some(p))
        };
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(better_always(tb, tw, lo, hi))
}

/// Which test settled the equilibrium question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumRule {
    /// Every component of the modified switching graph has a sink.
    NoNonSinkComponent,
    /// Two or more non-sink components.
    SeveralNonSinkComponents,
    /// One non-sink component and an FS agent held in a sink component.
    FsAgentInSinkComponent,
    /// One non-sink component; an S agent held inside it can deviate.
    SAgentInNonSinkComponent,
    /// One non-sink component; an FS agent held inside it can deviate.
    /// The three rules above do not cover this case.
    FsAgentInNonSinkComponent,
    /// One non-sink component and nobody around it can deviate.
    NoDeviation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equilibrium {
    pub equilibrium: bool,
    /// A deviating agent and the list it should report.
    pub witness: Option<(AgentId, Vec<PostId>)>,
    /// Non-sink components of the modified switching graph, not counting
    /// an isolated ℓ(b).
    pub non_sink_components: usize,
    pub rule: EquilibriumRule,
}

/// Decides whether truthful reporting is an equilibrium from the
/// non-sink components of the modified switching graph: none means yes,
/// two or more means no. With exactly one, an FS agent held in a sink
/// component means no; otherwise the S agents, then the FS agents, held
/// inside the non-sink component are asked for a deviation.
pub fn is_truthful_equilibrium(inst: &Instance) -> Result<Equilibrium> {
    use EquilibriumRule::*;
    let an = analyse(inst)?;
    let tilde = modified_instance(&an.ctx)?;
    let tsg = SwitchingGraph::build(&tilde.context()?);
    // ℓ(b) with no edges is a component of its own that no player touches.
    let lb = tilde.instance.last_resort(tilde.dummy).expect("augmented");
    let lone = tsg.out_edges(lb).next().is_none();
    let non_sink = tsg
        .non_sink_components()
        .into_iter()
        .filter(|&c| !(lone && c == tsg.component(lb)))
        .count();
    let agents: Vec<AgentId> = an.ctx.instance().agents().collect();
    let first_witness = |cands: &[AgentId]| -> Result<Option<(AgentId, Vec<PostId>)>> {
        for &a in cands {
            if let Verdict::Falsify { list, .. } = dispatch(&an, a)?.verdict {
                return Ok(Some((a, list)));
            }
        }
        Ok(None)
    };
    let held_in_sink = |a: AgentId| tsg.in_sink_component(tilde.matching.post_of(a).expect("complete"));
    let of_class = |class: AgentClass, in_sink: bool| -> Vec<AgentId> {
        agents
            .iter()
            .copied()
            .filter(|&a| an.classes[a.0] == class && held_in_sink(a) == in_sink)
            .collect()
    };
    let (equilibrium, witness, rule) = match non_sink {
        0 => (true, None, NoNonSinkComponent),
        1 => {
            let fs_out = of_class(AgentClass::FS, true);
            if !fs_out.is_empty() {
                (false, first_witness(&fs_out)?, FsAgentInSinkComponent)
            } else if let Some(w) = first_witness(&of_class(AgentClass::S, false))? {
                (false, Some(w), SAgentInNonSinkComponent)
            } else if let Some(w) = first_witness(&of_class(AgentClass::FS, false))? {
                (false, Some(w), FsAgentInNonSinkComponent)
            } else {
                (true, None, NoDeviation)
            }
        }
        _ => (false, first_witness(&agents)?, SeveralNonSinkComponents),
    };
    Ok(Equilibrium {
        equilibrium,
        witness,
        non_sink_components: non_sink,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::plain_pairs;
    use crate::fixtures;
    use crate::model::parse_instance;
    use crate::oracle;

    fn ex1() -> Instance {
        parse_instance(fixtures::EX1).unwrap()
    }

    fn names(g: &Instance, ps: &[PostId]) -> Vec<String> {
        ps.iter().map(|&p| g.post_name(p).to_string()).collect()
    }

    #[test]
    fn better_always_cases() {
        assert!(better_always(3, 3, 2, 2));
        assert!(!better_always(3, 3, 2, 4));
        assert!(!better_always(3, 3, 3, 3));
        assert!(better_always(1, 2, 1, 1));
        assert!(!better_always(1, 1, 1, 1));
        assert!(!better_always(1, 2, 1, 2));
    }

    #[test]
    fn modified_example() {
        let an = Analysis::of(&ex1()).unwrap().unwrap();
        let tilde = modified_instance(&an.ctx).unwrap();
        let g = &tilde.instance;
        assert_eq!(g.agent_name(tilde.dummy), "b");
        assert_eq!(g.true_tiers(tilde.dummy), &[vec![g.post("p2").unwrap()]]);
        let tctx = tilde.context().unwrap();
        for a in an.ctx.instance().agents() {
            assert_eq!(tctx.s(a), an.ctx.s(a));
        }
        assert!(oracle::is_popular_bruteforce(g, &tilde.matching).unwrap());
    }

    #[test]
    fn modified_without_unreachable_posts() {
        let g = parse_instance("a1: p1 p2\na2: p1 p3\n").unwrap();
        let an = Analysis::of(&g).unwrap().unwrap();
        let tilde = modified_instance(&an.ctx).unwrap();
        assert!(tilde.instance.true_tiers(tilde.dummy).is_empty());
        assert_eq!(tilde.instance.list(tilde.dummy).len(), 1);
    }

    #[test]
    fn a1_falsifies_to_p2() {
        let g = ex1();
        let a1 = g.agent("a1").unwrap();
        let out = strategy_s_agent(&g, a1).unwrap();
        let Verdict::Falsify { list, guaranteed, true_rank } = out.verdict else { panic!("{out:?}") };
        assert_eq!(names(&g, &list), ["p2", "p8"]);
        assert_eq!(g.post_name(guaranteed), "p2");
        assert_eq!(true_rank, 2);
        assert_eq!(out.true_rank_before, 4);
    }

    #[test]
    fn a5_falsifies_to_p3() {
        let g = ex1();
        let a5 = g.agent("a5").unwrap();
        let out = strategy_fs_agent(&g, a5).unwrap();
        let Verdict::Falsify { list, guaranteed, .. } = out.verdict else { panic!("{out:?}") };
        assert_eq!(names(&g, &list), ["p3", "p8"]);
        assert_eq!(g.post_name(guaranteed), "p3");
    }

    #[test]
    fn falsified_instances_pin_the_manipulator() {
        let g = ex1();
        for name in ["a1", "a5"] {
            let a = g.agent(name).unwrap();
            let Verdict::Falsify { list, guaranteed, .. } = best_strategy(&g, a).unwrap().verdict else {
                panic!()
            };
            let h = falsified_instance(&g, a, &list).unwrap();
            let all = oracle::enumerate_popular(&h).unwrap();
            assert!(!all.is_empty());
            assert!(all.iter().all(|m| m.post_of(a) == Some(guaranteed)));
            let an = Analysis::of(&h).unwrap().unwrap();
            let mine: Vec<_> = plain_pairs(an.ctx.instance(), &an.pairs)
                .into_iter()
                .filter(|&(x, _)| x == a)
                .collect();
            assert_eq!(mine, vec![(a, Some(guaranteed))]);
        }
    }

    #[test]
    fn suboptimal_list_is_still_better_always() {
        let g = ex1();
        let a1 = g.agent("a1").unwrap();
        let h = falsified_instance(&g, a1, &[g.post("p3").unwrap(), g.post("p8").unwrap()]).unwrap();
        assert!(verify_better_always(&g, &h, a1).unwrap());
    }

    #[test]
    fn class_checks() {
        let g = ex1();
        assert!(strategy_s_agent(&g, g.agent("a5").unwrap()).is_err());
        assert!(strategy_fs_agent(&g, g.agent("a1").unwrap()).is_err());
        let a4 = best_strategy(&g, g.agent("a4").unwrap()).unwrap();
        assert_eq!(a4.class, AgentClass::F);
        assert_eq!(a4.verdict, Verdict::TruthOptimal);
    }

    #[test]
    fn empty_scan_range_is_truth_optimal() {
        // b and c keep p1 between them, so a always gets its second choice.
        let g = parse_instance("a: p1 p3\nb: p1 p2\nc: p1 p2\n").unwrap();
        let a = g.agent("a").unwrap();
        let out = best_strategy(&g, a).unwrap();
        assert_eq!(out.class, AgentClass::S);
        assert_eq!(out.true_rank_before, 2);
        assert_eq!(out.verdict, Verdict::TruthOptimal);
    }

    #[test]
    fn verify_examples() {
        let g = ex1();
        let (a1, a5) = (g.agent("a1").unwrap(), g.agent("a5").unwrap());
        let p = |n| g.post(n).unwrap();
        assert!(verify_better_always(&g, &falsified_instance(&g, a1, &[p("p2"), p("p8")]).unwrap(), a1).unwrap());
        assert!(verify_better_always(&g, &falsified_instance(&g, a5, &[p("p3"), p("p8")]).unwrap(), a5).unwrap());
        assert!(!verify_better_always(&g, &g, a1).unwrap());
        let other = falsified_instance(&g, a5, &[p("p3")]).unwrap();
        assert!(verify_better_always(&g, &other, a1).is_err());
    }

    #[test]
    fn padding_keeps_the_guarantee() {
        let g = ex1();
        let a1 = g.agent("a1").unwrap();
        let list = pad_list(&g, &[g.post("p2").unwrap(), g.post("p8").unwrap()]);
        assert_eq!(list.len(), 9);
        let h = falsified_instance(&g, a1, &list).unwrap();
        let all = oracle::enumerate_popular(&h).unwrap();
        assert!(all.iter().all(|m| m.post_of(a1) == g.find_post("p2")));
    }

    #[test]
    fn example_is_not_an_equilibrium() {
        let g = ex1();
        let eq = is_truthful_equilibrium(&g).unwrap();
        assert!(!eq.equilibrium);
        let (a, list) = eq.witness.unwrap();
        let h = falsified_instance(&g, a, &list).unwrap();
        assert!(verify_better_always(&g, &h, a).unwrap());
    }

    #[test]
    fn deviation_by_fs_agent_inside_the_only_non_sink_component() {
        // All posts are matched, so the single non-sink component holds
        // everyone; no FS agent sits in a sink component and there is no S
        // agent, yet a1 can deviate.
        let g = parse_instance(
            "a1: p4 (p3 p1) p2 p5\na2: p4 p1 (p3 p5)\na3: p1 p2 p4 p5\na4: p1 (p2 p5)\na5: p2 p4 p5\n",
        )
        .unwrap();
        let eq = is_truthful_equilibrium(&g).unwrap();
        assert_eq!(eq.non_sink_components, 1);
        assert_eq!(eq.rule, EquilibriumRule::FsAgentInNonSinkComponent);
        assert!(!eq.equilibrium);
        let (a, list) = eq.witness.unwrap();
        assert!(verify_better_always(&g, &falsified_instance(&g, a, &list).unwrap(), a).unwrap());
        assert!(!oracle::truthful_equilibrium_bruteforce(&g).unwrap().0);
    }

    #[test]
    fn distinct_first_choices_are_an_equilibrium() {
        let g = parse_instance("a1: p1 p2\na2: p2 p3\na3: p3 p1\n").unwrap();
        let eq = is_truthful_equilibrium(&g).unwrap();
        assert!(eq.equilibrium);
        assert_eq!(eq.non_sink_components, 0);
    }
}
