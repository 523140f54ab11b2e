mod docs;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use icc::decoder::{decode_user, GraphSideInfo};
use icc::encoder::Transmissions;
use icc::graph::MessageVector;
use icc::oracle::{certify, enumerate_ic_structures, sample_ic_structures, simulate_roundtrip, EnumerationConfig};
use icc::validate::validate;
use icc::{fixtures, Codebook, Construction, Instance, SelectionPolicy, SideInfoGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use docs::Render;

#[derive(Parser)]
#[command(name = "icc", version, about = "Index codes for interlinked-cycle side-information graphs")]
struct Cli {
    /// Output format. JSON is the stable contract.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the document here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the three IC conditions and list every violation.
    Validate { graph: String },
    /// Outer cycles, MOCGs and the c1/c2 conditions.
    Analyze { graph: String },
    /// Build a codebook.
    Encode {
        graph: String,
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Evaluate a codebook on a message vector.
    Transmit {
        graph: String,
        codebook: PathBuf,
        /// JSON array of hex messages, x_1 first. Random messages otherwise.
        #[arg(long)]
        messages: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        msg_len: u64,
        /// Also write the messages used.
        #[arg(long)]
        emit_messages: Option<PathBuf>,
    },
    /// Derive every Z_i and, given the messages, recover each user's message.
    Decode {
        graph: String,
        codebook: PathBuf,
        transmissions: PathBuf,
        /// Full message vector acting as every user's side information.
        #[arg(long)]
        messages: Option<PathBuf>,
    },
    /// Certify decodability by GF(2) elimination and run random round trips.
    Verify {
        graph: String,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        msg_len: u64,
    },
    /// Write IC structures, one graph file each.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=64))]
        max_n: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=64))]
        min_n: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidate graphs drawn per (N, K) once sampling takes over.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Stop after this many structures.
        #[arg(long)]
        limit: Option<usize>,
        /// Keep only structures with outer cycles.
        #[arg(long)]
        outer_only: bool,
        /// Plant outer cycles while sampling.
        #[arg(long)]
        cycle_bias: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Sig)]
        graph_format: GraphFormat,
    },
    /// The full pipeline on the bundled 6-IC example.
    Demo,
}

#[derive(clap::Args)]
struct CodeArgs {
    /// Pre-central override, `ccv=v[,v]`; repeatable.
    #[arg(long = "select", value_name = "CCV=V[,V]")]
    select: Vec<String>,
    #[arg(long, default_value = "2", value_parser = parse_construction)]
    construction: Construction,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Sig,
    Json,
}

fn parse_construction(s: &str) -> Result<Construction, String> {
    s.parse::<u8>().map_err(|e| e.to_string()).and_then(Construction::try_from)
}

/// Exit 1 for domain failures, 2 for unusable input.
enum Failure {
    Domain { kind: &'static str, message: String },
    Usage(String),
}

impl From<icc::Error> for Failure {
    fn from(e: icc::Error) -> Self {
        let kind = match &e {
            icc::Error::Graph(_) => "graph",
            icc::Error::Validate(_) => "not_ic_structure",
            icc::Error::Analysis(_) => "analysis",
            icc::Error::Encode(_) => "encode",
            icc::Error::Decode(_) => "decode",
            icc::Error::Message(_) => "messages",
        };
        Failure::Domain { kind, message: e.to_string() }
    }
}

fn domain(kind: &'static str, e: impl std::fmt::Display) -> Failure {
    Failure::Domain { kind, message: e.to_string() }
}

/// What a command produced and whether it counts as success.
struct Outcome {
    doc: Box<dyn Render>,
    ok: bool,
}

impl Outcome {
    fn ok(doc: impl Render + 'static) -> Result<Self, Failure> {
        Ok(Outcome { doc: Box::new(doc), ok: true })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

/// A bundled fixture name (`g1`, `ic10`) or a graph file.
fn load_graph(arg: &str) -> Result<SideInfoGraph, Failure> {
    let text = match fixtures::by_name(arg) {
        Some(t) => t.to_string(),
        None => read(Path::new(arg))?,
    };
    let parsed = if text.trim_start().starts_with('{') { SideInfoGraph::from_json(&text) } else { SideInfoGraph::parse(&text) };
    parsed.map_err(|e| domain("graph", e))
}

fn load_instance(arg: &str) -> Result<Instance, Failure> {
    Ok(Instance::new(load_graph(arg)?)?)
}

fn load_codebook(path: &Path, g: &SideInfoGraph) -> Result<Codebook, Failure> {
    let book = Codebook::from_json(&read(path)?).map_err(|e| domain("codebook", e))?;
    book.check_against(g).map_err(|e| domain("codebook", e))?;
    Ok(book)
}

fn load_messages(path: &Path) -> Result<MessageVector, Failure> {
    let hexes: Vec<String> = serde_json::from_str(&read(path)?).map_err(|e| domain("messages", e))?;
    let values = hexes.iter().map(hex::decode).collect::<Result<Vec<_>, _>>().map_err(|e| domain("messages", e))?;
    MessageVector::new(values).map_err(|e| domain("messages", e))
}

fn build(ic: &Instance, code: &CodeArgs) -> Result<Codebook, Failure> {
    let policy = SelectionPolicy::parse(code.select.iter().map(String::as_str)).map_err(|e| Failure::Usage(e.to_string()))?;
    if code.construction == Construction::One && !policy.overrides.is_empty() {
        return Err(Failure::Usage("--select applies to construction 2 only".into()));
    }
    Ok(ic.encode_with(code.construction, &policy)?)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(path, text).map_err(|e| domain("io", format!("cannot write {}: {e}", path.display())))
}

fn run(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate { graph } => {
            let g = load_graph(&graph)?;
            let report = validate(&g).map_err(|e| domain("not_ic_structure", e))?;
            let ok = report.is_ic_structure;
            Ok(Outcome { doc: Box::new(docs::Validation(report)), ok })
        }
        Command::Analyze { graph } => Outcome::ok(docs::Analysis::new(&load_instance(&graph)?)),
        Command::Encode { graph, code } => {
            let ic = load_instance(&graph)?;
            Outcome::ok(docs::Book(build(&ic, &code)?.to_doc()))
        }
        Command::Transmit { graph, codebook, messages, seed, msg_len, emit_messages } => {
            let g = load_graph(&graph)?;
            let book = load_codebook(&codebook, &g)?;
            let msgs = match messages {
                Some(p) => load_messages(&p)?,
                None => MessageVector::random(g.num_vertices(), msg_len as usize, &mut ChaCha8Rng::seed_from_u64(seed)),
            };
            msgs.check_for(&g).map_err(|e| domain("messages", e))?;
            if let Some(p) = emit_messages {
                write_json(&p, &docs::hex_messages(&msgs))?;
            }
            let tx = book.transmit(&msgs).map_err(|e| domain("encode", e))?;
            Outcome::ok(docs::Symbols(docs::hex_transmissions(&tx)))
        }
        Command::Decode { graph, codebook, transmissions, messages } => {
            let ic = load_instance(&graph)?;
            let g = ic.graph();
            let book = load_codebook(&codebook, g)?;
            let plan = ic.plan(&book)?;
            let tx: Transmissions = docs::parse_transmissions(&read(&transmissions)?).map_err(|e| domain("transmissions", e))?;
            let mut doc = docs::Decoding::new(&plan);
            let mut ok = true;
            if let Some(p) = messages {
                let msgs = load_messages(&p)?;
                msgs.check_for(g).map_err(|e| domain("messages", e))?;
                let side = GraphSideInfo::new(g, &msgs);
                let users = g
                    .vertices()
                    .map(|u| {
                        let r = decode_user(g, &book, &plan, &tx, &side, u);
                        ok &= r.as_deref() == Ok(msgs.get(u));
                        docs::Recovered::new(u, r, msgs.get(u))
                    })
                    .collect();
                doc.users = Some(users);
            }
            Ok(Outcome { doc: Box::new(doc), ok })
        }
        Command::Verify { graph, code, trials, seed, msg_len } => {
            let ic = load_instance(&graph)?;
            let book = build(&ic, &code)?;
            let plan = ic.plan(&book)?;
            let cert = certify(ic.graph(), &book);
            let report = simulate_roundtrip(ic.graph(), &book, &plan, trials, msg_len as usize, seed)
                .map_err(|e| domain("messages", e))?;
            let ok = cert.all_decodable;
            Ok(Outcome { doc: Box::new(docs::Verification::new(&book, cert, report)), ok })
        }
        Command::Enumerate { max_n, min_n, out, seed, budget, limit, outer_only, cycle_bias, graph_format } => {
            if min_n > max_n {
                return Err(Failure::Usage(format!("--min-n {min_n} exceeds --max-n {max_n}")));
            }
            fs::create_dir_all(&out).map_err(|e| domain("io", format!("cannot create {}: {e}", out.display())))?;
            let cfg = EnumerationConfig { min_n, max_n, seed, budget, cycle_bias, ..Default::default() };
            let mut it = if max_n <= 8 { enumerate_ic_structures(cfg) } else { sample_ic_structures(cfg) };
            let mut files = Vec::new();
            for g in it.by_ref() {
                if limit.is_some_and(|l| files.len() >= l) {
                    break;
                }
                if outer_only && validate(&g).is_ok_and(|r| !r.has_outer_cycles) {
                    continue;
                }
                let (ext, text) = match graph_format {
                    GraphFormat::Sig => ("sig", g.to_text()),
                    GraphFormat::Json => ("json", g.to_json() + "\n"),
                };
                let name = format!("ic-{:05}-n{}-k{}.{ext}", files.len() + 1, g.num_vertices(), g.num_inner());
                fs::write(out.join(&name), text).map_err(|e| domain("io", e))?;
                files.push(name);
            }
            Outcome::ok(docs::Enumeration { dir: out.display().to_string(), seed, attempts: it.attempts(), count: files.len(), files })
        }
        Command::Demo => {
            let ic = Instance::new(fixtures::g1())?;
            let book = ic.encode(&SelectionPolicy::default())?;
            let plan = ic.plan(&book)?;
            let cert = certify(ic.graph(), &book);
            Outcome::ok(docs::Demo::new(&ic, &book, &plan, cert.all_decodable))
        }
    }
}

fn emit(cli_out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match cli_out {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ICC_LOG", "warn")).init();
    let cli = Cli::parse();
    let json = cli.format == Format::Json;
    let (code, kind, message) = match run(cli.command) {
        Ok(outcome) => {
            let text = if json { outcome.doc.json() } else { outcome.doc.text() };
            if let Err(e) = emit(&cli.output, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            return ExitCode::from(if outcome.ok { 0 } else { 1 });
        }
        Err(Failure::Domain { kind, message }) => (1, kind, message),
        Err(Failure::Usage(message)) => (2, "usage", message),
    };
    log::debug!("failing with {kind}");
    if json {
        let diag = serde_json::json!({ "error": { "kind": kind, "message": message } });
        eprintln!("{}", serde_json::to_string_pretty(&diag).expect("serializable"));
    } else {
        eprintln!("error ({kind}): {message}");
    }
    ExitCode::from(code)
}
