//! Maximum matchings, vertex classification and the popular-matching
//! pipeline.

mod bipartite;
mod popular;

pub use bipartite::{
    eou_labels, max_matching, max_matching_in_order, BipartiteGraph, EouLabels, Label,
};
pub use popular::{
    first_choices, fill_last_resorts, popular_matching, rank_one_graph, satisfies_characterization,
    second_choices, PopularContext, PruneReport,
};
