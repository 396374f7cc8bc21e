use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use snchar::characters::{char_jt_with, char_mn, character_table, table_labels, CharQuery, TABLE_BOUND};
use snchar::combinat::{Composition, Partition};
use snchar::matchings::{join, Hypergraph3, Hypergraph4, JoinResult, DEFAULT_MAX_GROUND};
use snchar::pipeline::{
    build_gadget, char_instance_diff, char_instance_lemma, modify_gadget, parsimonious_encode, reduce_cnf_pair,
    reduce_matching_pair, reduce_pair, CharInstance, GadgetInstance,
};
use snchar::sat::{
    count_circuit_sat_bounded, count_cnf_bounded, count_one_in_three_bounded, one_in_three_to_3dm, to_one_in_three,
    tseytin, Circuit, Cnf, OneInThree, DEFAULT_MAX_CNF_VARS, DEFAULT_MAX_INPUTS, DEFAULT_MAX_OIT_VARS,
};
use snchar::setpartition::{count_with, CountOptions, SetPartitionInstance, Strategy};
use snchar::verify::{
    verify_identity, verify_parsimony_suite, verify_pipeline, Identity, VerifyReport, IDENTITY_BOUND,
    PARSIMONY_MAX_GROUND, PIPELINE_MAX_GROUND,
};

#[derive(Parser)]
#[command(name = "snchar", version, about = "Exact symmetric-group characters and counting reductions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Character values, tables and identities.
    #[command(subcommand)]
    Char(CharCmd),
    /// Exact solution counts.
    #[command(subcommand)]
    Count(CountCmd),
    /// Run one reduction stage and write its output.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Stage-by-stage verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Mn,
    Jt,
    Both,
}

#[derive(Subcommand)]
enum CharCmd {
    /// Evaluate χ^λ(μ), or the character instance stored in a JSON file.
    Eval {
        #[arg(long, required_unless_present = "instance")]
        lambda: Option<String>,
        #[arg(long, required_unless_present = "instance")]
        mu: Option<String>,
        /// CharInstance JSON file.
        #[arg(long, conflicts_with_all = ["lambda", "mu"])]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Print the character table of S_n.
    Table {
        #[arg(long)]
        n: usize,
    },
    /// Check one identity exhaustively for S_n.
    Identity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "all")]
        which: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Plain,
    Memo,
    Bins,
}

#[derive(Subcommand)]
enum CountCmd {
    /// P(a, b): ordered set partitions of items `a` into bins `b`.
    Setpartition {
        #[arg(long)]
        items: String,
        #[arg(long)]
        bins: String,
        #[arg(long, value_enum, default_value_t = Engine::Bins)]
        engine: Engine,
    },
    /// Perfect matchings of a 3DM file.
    #[command(name = "3dm")]
    ThreeDm(BoundedFile),
    /// Perfect matchings of a 4DM or join file.
    #[command(name = "4dm")]
    FourDm(BoundedFile),
    /// Satisfying inputs of a circuit file.
    Sat(BoundedFile),
    /// Models of a DIMACS CNF file.
    Cnf(BoundedFile),
    /// Models of a one-in-three file.
    Oit(BoundedFile),
}

#[derive(Args)]
struct BoundedFile {
    file: PathBuf,
    /// Enumeration bound (ground set size or variable count).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Circuit,
    Cnf,
    #[value(name = "3dm")]
    ThreeDm,
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Circuit → CNF.
    Tseytin {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// CNF → one-in-three.
    Oit {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// One-in-three → 3DM.
    #[command(name = "3dm")]
    ThreeDm {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Two 3DM files → join file.
    Join {
        e: PathBuf,
        e_prime: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Join file → gadget JSON.
    Gadget {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Gadget JSON → modified gadget JSON.
    Modify {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// (c, d) → character instance JSON with χ = P(c, d̄) − P(c, d̄'); with
    /// `--lemma`, (a, b) → the two-sum instance.
    Charinstance {
        #[arg(long)]
        c: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        lemma: bool,
        #[command(flatten)]
        out: Output,
    },
    /// (a, b) → character instance JSON with χ = P(a, b).
    Parsimonious {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        out: Output,
    },
    /// Two inputs → every intermediate artifact as JSON.
    Pipeline {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = Source::ThreeDm)]
        from: Source,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Re-count every stage of the matching-pair reduction.
    Pipeline {
        e: PathBuf,
        e_prime: PathBuf,
        #[arg(long, default_value_t = PIPELINE_MAX_GROUND)]
        bound: usize,
    },
    /// Count every stage of circuit → CNF → one-in-three → 3DM on random circuits.
    Parsimony {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_inputs: usize,
        #[arg(long, default_value_t = 6)]
        max_gates: usize,
        #[arg(long, default_value_t = PARSIMONY_MAX_GROUND)]
        bound: usize,
    },
    /// All character-table identities for n = 0..=max-n.
    Identities {
        #[arg(long, default_value_t = IDENTITY_BOUND)]
        max_n: usize,
    },
}

/// Command outcome: printed output and whether every check passed.
struct Outcome {
    text: String,
    json: Value,
    pass: bool,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, pass: true }
    }

    /// An artifact printed verbatim in either format.
    fn raw(text: String) -> Self {
        Outcome { json: Value::String(text.clone()), text, pass: true }
    }

    fn report(r: &VerifyReport) -> Result<Self> {
        Ok(Outcome { text: r.to_text().trim_end().to_string(), json: serde_json::from_str(&r.to_json()?)?, pass: r.pass })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_file<T>(path: &Path, parse: impl FnOnce(&str) -> snchar::Result<T>) -> Result<T> {
    parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn comp(s: &str) -> Result<Composition> {
    Ok(Composition::parse_list(s)?)
}

fn partition(s: &str) -> Result<Partition> {
    let c = comp(s)?;
    if c.entries().windows(2).any(|w| w[0] < w[1]) {
        bail!("{s} is not weakly decreasing");
    }
    Ok(Partition::from_composition(&c)?)
}

fn load_3dm(path: &Path) -> Result<Hypergraph3> {
    parse_file(path, |t| Hypergraph3::parse(t, "k"))
}

/// Writes a stage artifact; reports where it went.
fn emit(out: &Output, body: String, what: &str) -> Result<Outcome> {
    match &out.output {
        Some(p) => {
            fs::write(p, &body).with_context(|| format!("writing {}", p.display()))?;
            Ok(Outcome::ok(format!("wrote {what} to {}", p.display()), json!({ "wrote": p, "stage": what })))
        }
        None => Ok(Outcome::raw(body.trim_end().to_string())),
    }
}

fn counted(what: &str, n: impl ToString) -> Outcome {
    let n = n.to_string();
    Outcome::ok(n.clone(), json!({ "count": what, "value": n }))
}

fn run_char(cmd: CharCmd) -> Result<Outcome> {
    match cmd {
        CharCmd::Eval { lambda, mu, instance, method } => {
            let (q, label, jt_opts) = match instance {
                Some(path) => {
                    let inst = parse_file(&path, CharInstance::from_json)?;
                    (inst.query()?, path.display().to_string(), inst.jt_options())
                }
                None => {
                    let (l, m) = (lambda.expect("required"), mu.expect("required"));
                    let q = CharQuery::new(partition(&l)?, comp(&m)?)?;
                    (q, format!("{l} at {m}"), Default::default())
                }
            };
            let mn = matches!(method, Method::Mn | Method::Both).then(|| char_mn(&q)).transpose()?;
            let jt = matches!(method, Method::Jt | Method::Both)
                .then(|| char_jt_with(&q, &jt_opts))
                .transpose()?;
            let pass = match (&mn, &jt) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            };
            let mut text: Vec<String> = mn.iter().chain(jt.iter()).map(|v| v.to_string()).collect();
            if !pass {
                text.push(format!("MISMATCH for {label}"));
            }
            let json = json!({
                "lambda": q.lambda.to_string(),
                "alpha": q.alpha.to_string(),
                "mn": mn.map(|v| v.to_string()),
                "jt": jt.map(|v| v.to_string()),
                "agree": pass,
            });
            Ok(Outcome { text: text.join("\n"), json, pass })
        }
        CharCmd::Table { n } => {
            if n > TABLE_BOUND {
                bail!("n = {n} exceeds the table bound {TABLE_BOUND}");
            }
            let labels: Vec<String> = table_labels(n).iter().map(|p| p.to_string()).collect();
            let table = character_table(n);
            let mut text = format!("mu: {}\n", labels.join(" "));
            for (l, row) in labels.iter().zip(&table) {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("{l}: {}\n", cells.join(" ")));
            }
            let rows: Vec<Vec<String>> = table.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
            Ok(Outcome::ok(text.trim_end().into(), json!({ "labels": labels, "rows": rows })))
        }
        CharCmd::Identity { n, which } => {
            let report = identities(n..=n, &which)?;
            Outcome::report(&report)
        }
    }
}

fn identities(ns: std::ops::RangeInclusive<usize>, which: &str) -> Result<VerifyReport> {
    let selected: Vec<Identity> = if which == "all" { Identity::ALL.to_vec() } else { vec![which.parse()?] };
    let mut report = VerifyReport::new();
    for n in ns {
        for &w in &selected {
            report.extend(&format!("{} n={n}: ", w.name()), verify_identity(n, w)?);
        }
    }
    Ok(report)
}

fn run_count(cmd: CountCmd) -> Result<Outcome> {
    Ok(match cmd {
        CountCmd::Setpartition { items, bins, engine } => {
            let inst = SetPartitionInstance::new(comp(&items)?, comp(&bins)?)?;
            let strategy = match engine {
                Engine::Plain => Strategy::Plain,
                Engine::Memo => Strategy::Memo,
                Engine::Bins => Strategy::Bins,
            };
            counted("setpartition", count_with(&inst, &CountOptions { strategy, radix: None }))
        }
        CountCmd::ThreeDm(f) => {
            let g = load_3dm(&f.file)?;
            counted("3dm", g.count_matchings_bounded(f.bound.unwrap_or(DEFAULT_MAX_GROUND))?)
        }
        CountCmd::FourDm(f) => {
            let text = read(&f.file)?;
            let g = match JoinResult::parse(&text) {
                Ok(jr) => jr.j,
                Err(_) => Hypergraph4::parse(&text, "u").with_context(|| format!("in {}", f.file.display()))?,
            };
            counted("4dm", g.count_matchings_bounded(f.bound.unwrap_or(DEFAULT_MAX_GROUND))?)
        }
        CountCmd::Sat(f) => {
            let c = parse_file(&f.file, Circuit::parse)?;
            counted("sat", count_circuit_sat_bounded(&c, f.bound.unwrap_or(DEFAULT_MAX_INPUTS))?)
        }
        CountCmd::Cnf(f) => {
            let c = parse_file(&f.file, Cnf::parse)?;
            counted("cnf", count_cnf_bounded(&c, f.bound.unwrap_or(DEFAULT_MAX_CNF_VARS))?)
        }
        CountCmd::Oit(f) => {
            let c = parse_file(&f.file, OneInThree::parse)?;
            counted("oit", count_one_in_three_bounded(&c, f.bound.unwrap_or(DEFAULT_MAX_OIT_VARS))?)
        }
    })
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run_reduce(cmd: ReduceCmd) -> Result<Outcome> {
    match cmd {
        ReduceCmd::Tseytin { file, out } => emit(&out, tseytin(&parse_file(&file, Circuit::parse)?).to_dimacs(), "cnf"),
        ReduceCmd::Oit { file, out } => {
            emit(&out, to_one_in_three(&parse_file(&file, Cnf::parse)?).to_dimacs(), "one-in-three")
        }
        ReduceCmd::ThreeDm { file, out } => {
            emit(&out, one_in_three_to_3dm(&parse_file(&file, OneInThree::parse)?).to_text("k"), "3dm")
        }
        ReduceCmd::Join { e, e_prime, out } => emit(&out, join(&load_3dm(&e)?, &load_3dm(&e_prime)?).to_text(), "join"),
        ReduceCmd::Gadget { file, out } => {
            let g = build_gadget(&parse_file(&file, JoinResult::parse)?)?;
            emit(&out, g.to_json()? + "\n", "gadget")
        }
        ReduceCmd::Modify { file, out } => {
            let g = parse_file(&file, GadgetInstance::from_json)?;
            emit(&out, pretty(&modify_gadget(&g))?, "modified gadget")
        }
        ReduceCmd::Charinstance { c, d, lemma, out } => {
            let inst = if lemma {
                char_instance_lemma(&comp(&c)?, &comp(&d)?)?
            } else {
                char_instance_diff(&comp(&c)?, &comp(&d)?)?
            };
            emit(&out, inst.to_json()? + "\n", "character instance")
        }
        ReduceCmd::Parsimonious { a, b, out } => {
            emit(&out, parsimonious_encode(&comp(&a)?, &comp(&b)?)?.to_json()? + "\n", "character instance")
        }
        ReduceCmd::Pipeline { first, second, from, out } => {
            let res = match from {
                Source::ThreeDm => reduce_matching_pair(&load_3dm(&first)?, &load_3dm(&second)?)?,
                Source::Cnf => reduce_cnf_pair(&parse_file(&first, Cnf::parse)?, &parse_file(&second, Cnf::parse)?)?,
                Source::Circuit => {
                    reduce_pair(&parse_file(&first, Circuit::parse)?, &parse_file(&second, Circuit::parse)?)?
                }
            };
            emit(&out, pretty(&res.to_json()?)?, "pipeline")
        }
    }
}

fn run_verify(cmd: VerifyCmd) -> Result<Outcome> {
    let report = match cmd {
        VerifyCmd::Pipeline { e, e_prime, bound } => verify_pipeline(&load_3dm(&e)?, &load_3dm(&e_prime)?, bound)?,
        VerifyCmd::Parsimony { seed, count, max_inputs, max_gates, bound } => {
            verify_parsimony_suite(seed, count, max_inputs, max_gates, bound)?
        }
        VerifyCmd::Identities { max_n } => identities(0..=max_n, "all")?,
    };
    Outcome::report(&report)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Char(c) => run_char(c),
        Command::Count(c) => run_count(c),
        Command::Reduce(c) => run_reduce(c),
        Command::Verify(c) => run_verify(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            let body = match (format, &out.json) {
                (Format::Json, Value::String(s)) => s.clone(),
                (Format::Json, v) => serde_json::to_string_pretty(v).expect("serializable"),
                (Format::Text, _) => out.text,
            };
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{body}");
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
