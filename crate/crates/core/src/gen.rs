//! Seeded random instance generator.
//!
//! Each agent draws a list length uniformly from `1..=posts`, takes that many
//! distinct posts in random order, then merges each adjacent pair into one tie
//! with probability `tie_prob`. Uses ChaCha8 so a seed reproduces the same
//! instance on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, PostId, PreferenceList};

pub fn random_instance(agents: usize, posts: usize, tie_prob: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with(agents, posts, tie_prob, &mut rng)
}

pub fn random_instance_with<R: Rng>(
    agents: usize,
    posts: usize,
    tie_prob: f64,
    rng: &mut R,
) -> Instance {
    assert!(posts >= 1, "need at least one post");
    let universe: Vec<PostId> = (0..posts).map(PostId).collect();
    let mut lists = Vec::with_capacity(agents);
    for _ in 0..agents {
        let len = rng.gen_range(1..=posts);
        let mut order = universe.clone();
        order.shuffle(rng);
        order.truncate(len);
        let mut tiers: Vec<Vec<PostId>> = vec![vec![order[0]]];
        for &p in &order[1..] {
            if rng.gen_bool(tie_prob.clamp(0.0, 1.0)) {
                tiers.last_mut().unwrap().push(p);
            } else {
                tiers.push(vec![p]);
            }
        }
        lists.push(PreferenceList::new(tiers).expect("distinct posts"));
    }
    Instance::new(
        (1..=agents).map(|i| format!("a{i}")).collect(),
        (1..=posts).map(|i| format!("p{i}")).collect(),
        lists,
    )
    .expect("generated instance is well formed")
}

/// A corpus instance: sizes drawn from the seed, then [`random_instance`].
pub fn corpus_instance(max_agents: usize, max_posts: usize, tie_prob: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let agents = rng.gen_range(1..=max_agents);
    let posts = rng.gen_range(1..=max_posts);
    random_instance_with(agents, posts, tie_prob, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(random_instance(5, 4, 0.3, 7), random_instance(5, 4, 0.3, 7));
    }

    #[test]
    fn lengths_within_bounds_and_no_ties_at_zero() {
        for seed in 0..50 {
            let inst = random_instance(4, 5, 0.0, seed);
            for a in inst.agents() {
                let l = inst.list(a);
                assert!(l.is_strict());
                assert!((1..=5).contains(&l.len()));
            }
        }
    }
}
