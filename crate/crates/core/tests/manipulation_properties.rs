use popmatch::analysis::{AgentClass, Analysis};
use popmatch::engine::Label;
use popmatch::gen::corpus_instance;
use popmatch::manipulation::{all_strategies, falsified_instance, verify_better_always, Verdict};
use popmatch::model::{Instance, PostId};
use popmatch::oracle;
use proptest::prelude::*;

fn instance(seed: u64) -> Instance {
    let tie = [0.0, 0.3, 0.6][(seed % 3) as usize];
    corpus_instance(5, 5, tie, seed)
}

fn even_real_posts(an: &Analysis) -> Vec<PostId> {
    let inst = an.ctx.instance();
    inst.real_posts()
        .filter(|&p| an.ctx.labels1().post(p) == Label::Even)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn first_choices_of_non_f_agents_are_odd(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for a in g.agents() {
            if an.classes[a.0] != AgentClass::F {
                for &p in an.ctx.f(a) {
                    prop_assert_eq!(an.ctx.labels1().post(p), Label::Odd);
                }
            }
        }
    }

    #[test]
    fn falsification_keeps_even_posts_and_second_choices(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for out in all_strategies(&g).unwrap() {
            let Verdict::Falsify { list, guaranteed, .. } = &out.verdict else { continue };
            let h = falsified_instance(&g, out.agent, list).unwrap();
            prop_assert!(verify_better_always(&g, &h, out.agent).unwrap());
            let hn = Analysis::of(&h).unwrap().expect("falsified instance has a popular matching");
            prop_assert_eq!(even_real_posts(&an), even_real_posts(&hn));
            for a in g.agents().filter(|&a| a != out.agent) {
                prop_assert_eq!(an.ctx.s(a), hn.ctx.s(a));
            }
            let mine: Vec<PostId> = hn.posts_of(out.agent).collect();
            prop_assert_eq!(mine, vec![*guaranteed]);
        }
    }

    #[test]
    fn s_agents_never_reach_a_first_choice(seed in any::<u64>()) {
        let g = instance(seed);
        let Some(an) = Analysis::of(&g).unwrap() else { return Ok(()) };
        for a in g.agents().filter(|&a| an.classes[a.0] == AgentClass::S) {
            let ex = oracle::exhaustive_strategy_search(&g, a).unwrap();
            prop_assert!(ex.best_reachable.is_none_or(|r| r > 1));
        }
    }
}
