use std::path::Path;
use std::process::ExitCode;

use ccs_hhpb::bits::EventSet;
use ccs_hhpb::conf::auto_concurrent;
use ccs_hhpb::crosscheck::{self, CorpusError, Generator, Pair};
use ccs_hhpb::encoding::encode;
use ccs_hhpb::equiv::{self, EquivError, Options, PlayStep, Relation};
use ccs_hhpb::export::{event_names, to_dot, to_json};
use ccs_hhpb::memenc::{address, encode_memory};
use ccs_hhpb::rccs::{lift, parse_trace, replay, RProcess, RccsError};
use ccs_hhpb::syntax::{parse_with, ParseError, Process, SumMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Configuration structures, reversible CCS and history-preserving bisimulations.
#[derive(Parser)]
#[command(name = "ccs-hhpb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the configuration structure of a process.
    Encode {
        /// Process expression, or a file holding one.
        input: String,
        #[command(flatten)]
        format: Format,
    },
    /// Replay a trace script and print every state.
    Simulate {
        input: String,
        /// Steps such as `fwd 1:c; fwd 2:tau`, or a file holding them.
        #[arg(long)]
        trace: String,
        /// Also print the memory encoding of each state.
        #[arg(long)]
        show_memory: bool,
    },
    /// Identified structure encoding the memories reached by a trace.
    EncodeMemory {
        input: String,
        #[arg(long)]
        trace: String,
        #[command(flatten)]
        format: Format,
    },
    /// Configuration of the origin's structure reached by a trace.
    Address {
        input: String,
        #[arg(long)]
        trace: String,
        /// Emit the origin's structure as DOT with the address path filled gray.
        #[arg(long, alias = "highlight-address")]
        dot: bool,
    },
    /// Decide an equivalence between two processes.
    Check {
        left: String,
        right: String,
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long, value_enum, default_value = "structure")]
        level: Level,
        /// Dump the bisimulation (or the refuting play) as JSON.
        #[arg(long)]
        witness: bool,
    },
    /// Report two concurrent events with the same label, if any.
    Autoconcurrency { input: String },
    /// Run the agreement suite over a corpus.
    Crosscheck {
        /// `examples`, `random:SEED:COUNT` or a file of `P1 ; P2` lines; repeatable.
        #[arg(long, required = true)]
        corpus: Vec<String>,
        /// Forward depth of the reachable-state search for the lemma oracles.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    #[arg(long)]
    dot: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Hpb,
    Hhpb,
    Wfhpb,
    Wfhhpb,
    Bf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Structure,
    Process,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<RccsError> for Failure {
    fn from(e: RccsError) -> Failure {
        match e {
            RccsError::TooManyStates(_) => Failure {
                code: 3,
                message: e.to_string(),
            },
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<EquivError> for Failure {
    fn from(e: EquivError) -> Failure {
        match e {
            EquivError::TooManyTriples(_) => Failure {
                code: 3,
                message: e.to_string(),
            },
            EquivError::Rccs(e) => e.into(),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Failure {
        Failure::usage(e.to_string())
    }
}

/// Reads `arg` as a file when one exists at that path.
fn text_of(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn process_of(arg: &str) -> Result<Process, Failure> {
    Ok(parse_with(text_of(arg)?.trim(), SumMode::General)?)
}

fn states_of(input: &str, trace: &str) -> Result<Vec<RProcess>, Failure> {
    let p = process_of(input)?;
    let script = parse_trace(&text_of(trace)?)?;
    Ok(replay(&lift(&p), &script)?)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn run(cli: Cli, opts: &Options) -> Result<u8, Failure> {
    match cli.command {
        Command::Encode { input, format } => {
            let c = encode(&process_of(&input)?);
            if format.dot {
                print!("{}", to_dot(&c, None, &[]));
            } else if format.json {
                println!("{}", pretty(&to_json(&c, None)));
            } else {
                let names = event_names(&c, None);
                println!("{} events, {} configurations", c.event_count(), c.configs().len());
                for x in c.configs() {
                    let members: Vec<&str> = x.iter().map(|e| names[e].as_str()).collect();
                    println!("{{{}}}", members.join(", "));
                }
            }
            Ok(0)
        }
        Command::Simulate {
            input,
            trace,
            show_memory,
        } => {
            for r in states_of(&input, &trace)? {
                println!("{r}");
                if show_memory {
                    let d = encode_memory(&r);
                    let names = event_names(d.base(), Some(d.ids()));
                    let top = d.base().maximal_configs();
                    println!(
                        "  memory: {} events {:?}, {} maximal configuration(s)",
                        names.len(),
                        names,
                        top.len()
                    );
                }
            }
            Ok(0)
        }
        Command::EncodeMemory { input, trace, format } => {
            let states = states_of(&input, &trace)?;
            let d = encode_memory(states.last().expect("replay keeps the start"));
            if format.dot {
                print!("{}", to_dot(d.base(), Some(d.ids()), &[]));
            } else {
                println!("{}", pretty(&to_json(d.base(), Some(d.ids()))));
            }
            Ok(0)
        }
        Command::Address { input, trace, dot } => {
            let states = states_of(&input, &trace)?;
            let a = address(states.last().expect("replay keeps the start"))?;
            let names = event_names(&a.structure, None);
            if dot {
                let mut path = vec![EventSet::new()];
                for (_, e) in &a.trace {
                    let next = path.last().expect("nonempty").with(*e);
                    path.push(next);
                }
                print!("{}", to_dot(&a.structure, None, &path));
            } else {
                println!("origin: {}", a.origin);
                println!("{} configurations", a.structure.configs().len());
                for (t, e) in &a.trace {
                    println!("{t} adds {} = {}", names[*e], a.structure.events()[*e]);
                }
                let members: Vec<&str> = a.config.iter().map(|e| names[e].as_str()).collect();
                println!("address: {{{}}}", members.join(", "));
            }
            Ok(0)
        }
        Command::Check {
            left,
            right,
            relation,
            level,
            witness,
        } => {
            let (p, q) = (process_of(&left)?, process_of(&right)?);
            let rel = match relation {
                RelationArg::Hpb => Some(Relation::Hpb),
                RelationArg::Hhpb => Some(Relation::Hhpb),
                RelationArg::Wfhpb => Some(Relation::WfHpb),
                RelationArg::Wfhhpb => Some(Relation::WfHhpb),
                RelationArg::Bf => None,
            };
            let (holds, play, dump) = match (rel, level) {
                (None, _) => {
                    let v = equiv::check_back_and_forth_with(&p, &q, opts)?;
                    let rel: Vec<[String; 2]> = v
                        .relation
                        .iter()
                        .map(|(a, b)| [a.to_string(), b.to_string()])
                        .collect();
                    (v.holds, v.play, serde_json::json!(rel))
                }
                (Some(rel), Level::Structure) => {
                    let v = equiv::check_structure_with(&encode(&p), &encode(&q), rel, opts)?;
                    let rel: Vec<serde_json::Value> = v
                        .relation
                        .iter()
                        .map(|t| serde_json::json!({"left": t.left.to_vec(), "right": t.right.to_vec(), "map": t.map}))
                        .collect();
                    (v.holds, v.play, serde_json::json!(rel))
                }
                (Some(rel), Level::Process) => {
                    let v = equiv::check_process_with(&p, &q, rel, opts)?;
                    let rel: Vec<serde_json::Value> = v
                        .relation
                        .iter()
                        .map(|t| serde_json::json!({"left": t.left.to_string(), "right": t.right.to_string(), "map": t.map}))
                        .collect();
                    (v.holds, v.play, serde_json::json!(rel))
                }
            };
            report_check(holds, &play, dump, witness);
            Ok(if holds { 0 } else { 1 })
        }
        Command::Autoconcurrency { input } => {
            let c = encode(&process_of(&input)?);
            match auto_concurrent(&c) {
                None => {
                    println!("without auto-concurrency");
                    Ok(0)
                }
                Some(w) => {
                    let names = event_names(&c, None);
                    let members: Vec<&str> = w.config.iter().map(|e| names[e].as_str()).collect();
                    println!(
                        "auto-concurrent: {} and {} are concurrent in {{{}}}",
                        names[w.first],
                        names[w.second],
                        members.join(", ")
                    );
                    Ok(1)
                }
            }
        }
        Command::Crosscheck { corpus, depth, json } => {
            let mut pairs: Vec<Pair> = Vec::new();
            for source in &corpus {
                pairs.extend(corpus_of(source)?);
            }
            let report = crosscheck::run_all(&corpus.join(" + "), &pairs, depth, opts)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.table());
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn corpus_of(source: &str) -> Result<Vec<Pair>, Failure> {
    if source == "examples" {
        return Ok(crosscheck::example_corpus());
    }
    if let Some(rest) = source.strip_prefix("random:") {
        let (seed, count) = rest
            .split_once(':')
            .ok_or_else(|| Failure::usage("expected random:SEED:COUNT"))?;
        let seed = seed
            .parse()
            .map_err(|_| Failure::usage(format!("bad seed `{seed}`")))?;
        let count = count
            .parse()
            .map_err(|_| Failure::usage(format!("bad count `{count}`")))?;
        return Ok(Generator::new(seed).pairs(count));
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{source}: {e}")))?;
    Ok(crosscheck::parse_corpus(&text)?)
}

fn report_check(holds: bool, play: &[PlayStep], dump: serde_json::Value, witness: bool) {
    if holds {
        println!("holds");
        if witness {
            println!("{}", pretty(&dump));
        }
        return;
    }
    println!("does not hold");
    for (k, step) in play.iter().enumerate() {
        match &step.reply {
            Some(r) => println!(
                "{}. {} at {}; best answer leads to {}",
                k + 1,
                step.attack,
                step.position,
                r
            ),
            None => println!(
                "{}. {} at {}; no matching answer",
                k + 1,
                step.attack,
                step.position
            ),
        }
    }
    if witness {
        println!(
            "{}",
            pretty(&serde_json::to_value(play).expect("plays serialize"))
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli, &Options::from_env()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
