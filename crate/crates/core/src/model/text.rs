//! Plain-text instance format.
//!
//! ```text
//! # comment
//! posts: p1 p2 p3 p4
//! a1: p1 (p2 p3) p4
//! a2: p2
//! ```
//!
//! One line per agent. A parenthesised group is a tie. The optional `posts:`
//! header fixes the post universe and its order; once present, every post an
//! agent mentions must be declared there. Without a header the universe is
//! the mentioned posts in order of first appearance.

use std::collections::HashMap;

use super::{AgentId, Instance, PostId, PreferenceList};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Name(&'a str),
}

fn tokenize(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        let is_sep = c.is_whitespace() || c == '(' || c == ')';
        if is_sep {
            if let Some(st) = start.take() {
                out.push(Token::Name(&s[st..i]));
            }
            match c {
                '(' => out.push(Token::Open),
                ')' => out.push(Token::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Token::Name(&s[st..]));
    }
    out
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains([':', '#'])
}

struct Posts {
    names: Vec<String>,
    index: HashMap<String, PostId>,
    closed: bool,
}

impl Posts {
    fn lookup(&mut self, name: &str, line: usize) -> Result<PostId> {
        if let Some(&p) = self.index.get(name) {
            return Ok(p);
        }
        if self.closed {
            return Err(Error::Parse {
                line,
                msg: format!("unknown post `{name}` (not declared in the posts: header)"),
            });
        }
        let p = PostId(self.names.len());
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), p);
        Ok(p)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut posts = Posts {
        names: Vec::new(),
        index: HashMap::new(),
        closed: false,
    };
    let mut agent_names: Vec<String> = Vec::new();
    let mut agent_index: HashMap<String, AgentId> = HashMap::new();
    let mut lists = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let (head, rest) = body
            .split_once(':')
            .ok_or_else(|| err("expected `NAME: items`".into()))?;
        let head = head.trim();
        if rest.contains(':') {
            return Err(err("more than one `:` on a line".into()));
        }

        if head == "posts" {
            if posts.closed {
                return Err(err("duplicate posts: header".into()));
            }
            if !agent_names.is_empty() {
                return Err(err("posts: header must precede agent lines".into()));
            }
            for tok in tokenize(rest) {
                let Token::Name(name) = tok else {
                    return Err(err("ties are not allowed in the posts: header".into()));
                };
                if posts.index.contains_key(name) {
                    return Err(err(format!("post `{name}` declared twice")));
                }
                posts.lookup(name, line)?;
            }
            posts.closed = true;
            continue;
        }

        if !valid_name(head) || head.contains(char::is_whitespace) || head.contains(['(', ')']) {
            return Err(err(format!("invalid agent name `{head}`")));
        }
        if agent_index.contains_key(head) {
            return Err(err(format!("agent `{head}` defined twice")));
        }

        let mut tiers: Vec<Vec<PostId>> = Vec::new();
        let mut group: Option<Vec<PostId>> = None;
        let mut seen = std::collections::HashSet::new();
        for tok in tokenize(rest) {
            match tok {
                Token::Open => {
                    if group.is_some() {
                        return Err(err("nested tie group".into()));
                    }
                    group = Some(Vec::new());
                }
                Token::Close => match group.take() {
                    Some(g) if g.is_empty() => return Err(err("empty tie group".into())),
                    Some(g) => tiers.push(g),
                    None => return Err(err("unbalanced `)`".into())),
                },
                Token::Name(name) => {
                    let p = posts.lookup(name, line)?;
                    if !seen.insert(p) {
                        return Err(err(format!("post `{name}` listed twice for `{head}`")));
                    }
                    match group.as_mut() {
                        Some(g) => g.push(p),
                        None => tiers.push(vec![p]),
                    }
                }
            }
        }
        if group.is_some() {
            return Err(err("unclosed `(`".into()));
        }
        if tiers.is_empty() {
            return Err(err(format!("agent `{head}` has an empty preference list")));
        }
        agent_index.insert(head.to_string(), AgentId(agent_names.len()));
        agent_names.push(head.to_string());
        lists.push(PreferenceList::new(tiers).map_err(|e| err(e.to_string()))?);
    }

    Instance::new(agent_names, posts.names, lists)
}

/// Canonical text form: a `posts:` header followed by one line per agent.
/// Last-resort posts are omitted, so an augmented instance serializes as its
/// base.
pub fn serialize_instance(inst: &Instance) -> String {
    let inst = inst.base();
    let mut out = String::from("posts:");
    for p in inst.posts() {
        out.push(' ');
        out.push_str(inst.post_name(p));
    }
    out.push('\n');
    for a in inst.agents() {
        out.push_str(inst.agent_name(a));
        out.push(':');
        for tier in inst.list(a).tiers() {
            out.push(' ');
            if tier.len() == 1 {
                out.push_str(inst.post_name(tier[0]));
            } else {
                let names: Vec<&str> = tier.iter().map(|&p| inst.post_name(p)).collect();
                out.push('(');
                out.push_str(&names.join(" "));
                out.push(')');
            }
        }
        out.push('\n');
    }
    out
}
