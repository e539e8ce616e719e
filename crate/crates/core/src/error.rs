use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("instance already carries last-resort posts")]
    AlreadyAugmented,

    #[error("instance has no last-resort posts; augment it first")]
    NotAugmented,

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown post `{0}`")]
    UnknownPost(String),

    /// A documented precondition of an operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(
        "instance too large for exhaustive enumeration: {agents} agents / {posts} posts \
         (limit {max_agents} / {max_posts})"
    )]
    SizeLimit {
        agents: usize,
        posts: usize,
        max_agents: usize,
        max_posts: usize,
    },
}
