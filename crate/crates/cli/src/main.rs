//! `popmatch`: popular matchings from the command line.
//!
//! Exit codes: 0 success, 1 no popular matching (or an oracle mismatch),
//! 2 usage or input error, 3 instance too large for the exhaustive oracle.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use popmatch::analysis::{plain_pairs, Analysis};
use popmatch::manipulation::{best_strategy, is_truthful_equilibrium, pad_list, Verdict};
use popmatch::model::{parse_instance, serialize_instance, strip_last_resorts, Instance, PostId};
use popmatch::{gen, oracle, Error};

#[derive(Parser)]
#[command(name = "popmatch", version, about = "Popular matchings with ties")]
struct Cli {
    /// Instance file; `-` or absent reads stdin.
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for `gen`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a popular matching.
    Solve,
    /// Print every pair used by some popular matching.
    Pairs,
    /// Print F / S / FS for each agent.
    Classify,
    /// Print the switching graph in DOT.
    Switching {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best falsified list for one agent.
    Cheat {
        #[arg(long)]
        agent: String,
        /// Append the remaining posts to the reported list.
        #[arg(long)]
        pad: bool,
    },
    /// Is truthful reporting an equilibrium?
    Equilibrium,
    /// Count popular matchings exhaustively.
    Count,
    /// Cross-check the algorithm against the exhaustive oracle.
    OracleCheck,
    /// Print a random instance.
    Gen {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        posts: usize,
        #[arg(long, default_value_t = 0.0)]
        tie_prob: f64,
    },
}

enum Failure {
    NoPopular,
    Mismatch,
    Input(String),
    Size(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeLimit { .. } => Failure::Size(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read_instance(path: &Option<PathBuf>) -> Result<Instance, Failure> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(parse_instance(&text)?)
}

fn analyse(g: &Instance) -> Result<Analysis, Failure> {
    Analysis::of(g)?.ok_or(Failure::NoPopular)
}

fn post_json(inst: &Instance, p: Option<PostId>) -> Value {
    match p {
        Some(p) if !inst.is_last_resort(p) => json!(inst.post_name(p)),
        _ => Value::Null,
    }
}

fn names(inst: &Instance, ps: &[PostId]) -> Vec<String> {
    ps.iter().map(|&p| inst.post_name(p).to_string()).collect()
}

fn emit(out: &mut String, as_json: bool, value: Value, text: String) {
    if as_json {
        out.push_str(&serde_json::to_string_pretty(&value).expect("serializable"));
        out.push('\n');
    } else {
        out.push_str(&text);
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<(), Failure> {
    if let Command::Gen { agents, posts, tie_prob } = &cli.command {
        if *posts == 0 || !(0.0..=1.0).contains(tie_prob) {
            return Err(Failure::Input("need --posts ≥ 1 and --tie-prob in [0, 1]".into()));
        }
        out.push_str(&serialize_instance(&gen::random_instance(*agents, *posts, *tie_prob, cli.seed)));
        return Ok(());
    }
    let g = read_instance(&cli.input)?;
    match &cli.command {
        Command::Solve => {
            let an = analyse(&g)?;
            let aug = an.ctx.instance();
            let m = strip_last_resorts(an.ctx.matching(), aug)?;
            let rows: Vec<Value> = g
                .agents()
                .map(|a| json!({"agent": g.agent_name(a), "post": post_json(&g, m.post_of(a))}))
                .collect();
            emit(out, cli.json, json!({"popular": true, "matching": rows}), g.format_matching(&m));
        }
        Command::Pairs => {
            let an = analyse(&g)?;
            let pairs = plain_pairs(an.ctx.instance(), &an.pairs);
            let mut text = String::new();
            let mut rows = Vec::new();
            for (a, p) in pairs {
                let post = p.map_or("-", |p| g.post_name(p));
                text.push_str(&format!("{} -> {}\n", g.agent_name(a), post));
                rows.push(json!({"agent": g.agent_name(a), "post": post_json(&g, p)}));
            }
            emit(out, cli.json, json!({"pairs": rows}), text);
        }
        Command::Classify => {
            let an = analyse(&g)?;
            let mut map = serde_json::Map::new();
            let mut text = String::new();
            for a in g.agents() {
                let c = an.classes[a.0].to_string();
                text.push_str(&format!("{} {}\n", g.agent_name(a), c));
                map.insert(g.agent_name(a).to_string(), json!(c));
            }
            emit(out, cli.json, json!({"classes": map}), text);
        }
        Command::Switching { out: path } => {
            let an = analyse(&g)?;
            let dot = an.graph.to_dot(an.ctx.instance());
            match path {
                Some(p) => fs::write(p, dot).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                None => out.push_str(&dot),
            }
        }
        Command::Cheat { agent, pad } => {
            let a = g.agent(agent)?;
            analyse(&g)?;
            let s = best_strategy(&g, a)?;
            let (kind, list, guaranteed) = match &s.verdict {
                Verdict::TruthOptimal => ("TruthOptimal", None, None),
                Verdict::Falsify { list, guaranteed, .. } => {
                    let list = if *pad { pad_list(&g, list) } else { list.clone() };
                    ("Falsify", Some(names(&g, &list)), Some(g.post_name(*guaranteed).to_string()))
                }
            };
            let text = match (&list, &guaranteed) {
                (Some(l), Some(p)) => format!(
                    "{}: report {}; every popular matching then gives {} (true rank {}, was {})\n",
                    agent,
                    l.join(" "),
                    p,
                    s.true_rank_after(),
                    s.true_rank_before
                ),
                _ => format!("{}: truthful list is optimal (class {})\n", agent, s.class),
            };
            let value = json!({
                "agent": agent,
                "class": s.class.to_string(),
                "kind": kind,
                "list": list,
                "guaranteed": guaranteed,
                "true_rank_before": s.true_rank_before,
                "true_rank_after": s.true_rank_after(),
            });
            emit(out, cli.json, value, text);
        }
        Command::Equilibrium => {
            analyse(&g)?;
            let eq = is_truthful_equilibrium(&g)?;
            let witness = eq.witness.as_ref().map(|(a, l)| (g.agent_name(*a), names(&g, l)));
            let mut text = format!("equilibrium: {}\n", eq.equilibrium);
            if let Some((a, l)) = &witness {
                text.push_str(&format!("witness: {} reports {}\n", a, l.join(" ")));
            }
            let mut value = json!({"equilibrium": eq.equilibrium, "rule": format!("{:?}", eq.rule)});
            if let Some((a, l)) = witness {
                value["witness"] = json!({"agent": a, "list": l});
            }
            emit(out, cli.json, value, text);
        }
        Command::Count => {
            let n = oracle::count_popular(&g)?;
            emit(out, cli.json, json!({"count": n}), format!("{n}\n"));
        }
        Command::OracleCheck => {
            let report = oracle_check(&g)?;
            let ok = report.iter().all(|(_, v)| *v);
            let mut text = String::new();
            let mut map = serde_json::Map::new();
            for (k, v) in &report {
                text.push_str(&format!("{k}: {}\n", if *v { "agree" } else { "DISAGREE" }));
                map.insert(k.to_string(), json!(v));
            }
            map.insert("ok".into(), json!(ok));
            emit(out, cli.json, Value::Object(map), text);
            if !ok {
                return Err(Failure::Mismatch);
            }
        }
        Command::Gen { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn oracle_check(g: &Instance) -> Result<Vec<(&'static str, bool)>, Failure> {
    let all = oracle::enumerate_popular(g)?;
    let an = Analysis::of(g)?;
    let mut report = vec![("existence", an.is_some() == !all.is_empty())];
    if let Some(an) = an {
        let aug = an.ctx.instance();
        let m = strip_last_resorts(an.ctx.matching(), aug)?;
        report.push(("matching", oracle::is_popular_bruteforce(g, &m)?));
        report.push(("pairs", plain_pairs(aug, &an.pairs) == oracle::popular_pairs_bruteforce(g)?));
        let mut strategies = true;
        for a in g.agents() {
            let ex = oracle::exhaustive_strategy_search(g, a)?;
            let s = best_strategy(g, a)?;
            let got = s.is_falsify().then(|| s.true_rank_after());
            strategies &= got == ex.best;
        }
        report.push(("strategies", strategies));
        let eq = is_truthful_equilibrium(g)?;
        report.push(("equilibrium", eq.equilibrium == oracle::truthful_equilibrium_bruteforce(g)?.0));
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    let _ = io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoPopular) => {
            if cli.json {
                println!("{}", json!({"popular": false}));
            } else {
                println!("no popular matching");
            }
            ExitCode::from(1)
        }
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Size(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
