//! The `grp` command line.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::approx::{approx_from_rows, approx_sequence, torsion_observation, truncation_note, StageRatio};
use crate::bounds::{completion_certificates, def_certificate, supermult_certificate, vd_lower_bound, def_lower_bound};
use crate::chains::{build_chain, Chain, RESIDUAL_CAVEAT};
use crate::coset::{normal_closure_table, todd_coxeter, EnumerationError, EnumerationLimits, DEFAULT_MAX_COSETS};
use crate::homology::{abelian_invariants, is_prime};
use crate::presentation::{parse_presentation, Presentation};
use crate::rational::{self, parse_ratio};
use crate::schreier::rewrite_subgroup;
use crate::tower::{run_tower, TowerConfig};
use crate::words::Word;

#[derive(Debug, Parser)]
#[command(name = "grp", version, about = "Finitely presented groups: coset enumeration, subgroup presentations, homology, p-chains and betti-number ratios")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Maximum number of cosets any enumeration may define.
    #[arg(long, global = true, env = "GRP_MAX_COSETS", default_value_t = DEFAULT_MAX_COSETS)]
    pub max_cosets: usize,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct Input {
    /// A presentation such as "<x,y|[x,y]>", a file containing one, or "-"
    /// for standard input.
    pub presentation: String,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and print a presentation in canonical form.
    Parse(Input),
    /// Enumerate the cosets of a subgroup.
    Tc {
        #[command(flatten)]
        input: Input,
        /// Subgroup generator words, repeated or separated by ';'.
        #[arg(long, short = 'H', value_delimiter = ';')]
        subgroup: Vec<String>,
        /// Use the normal closure of the given words instead.
        #[arg(long)]
        normal: bool,
    },
    /// Reidemeister-Schreier presentation of a finite-index subgroup.
    Rs {
        #[command(flatten)]
        input: Input,
        /// Subgroup generator words, as for `tc`.
        #[arg(long, short = 'H', value_delimiter = ';')]
        subgroup: Vec<String>,
        /// Use the normal closure of the given words.
        #[arg(long)]
        normal: bool,
        /// Drop trivial relators and repeats up to cyclic permutation.
        #[arg(long)]
        simplify: bool,
    },
    /// Abelianization: free rank and torsion.
    B1 {
        #[command(flatten)]
        input: Input,
        /// Also report dim H_1(G; F_p) for these primes.
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
    },
    /// Derived p-series with indices and betti numbers.
    Chain(ChainArgs),
    /// Ratios b1(N)/[G:N] along the chain and the resulting L2 bound.
    Approx {
        #[command(flatten)]
        chain: ChainArgs,
        /// Threshold for the torsion annotation, as p/q or a decimal.
        #[arg(long, default_value = "1/100")]
        eps: String,
        /// Read stages from a file written by `grp chain --format json`
        /// instead of computing them.
        #[arg(long)]
        from_chain: bool,
    },
    /// Lower bound for the p-virtual deficiency.
    Vd(ChainArgs),
    /// Deficiency certificates with replayable provenance.
    Cert(ChainArgs),
    /// Run the torsion-tower construction for a few steps.
    Tower {
        #[arg(long, default_value_t = 2)]
        gens: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        probe_depth: usize,
        #[arg(long, default_value_t = 8)]
        n_cap: u32,
        #[arg(long, default_value_t = 2)]
        chain_depth: usize,
        #[arg(long, default_value_t = 3)]
        word_check_cap: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Limit(_) => 2,
        }
    }
}

impl From<EnumerationError> for CliError {
    fn from(e: EnumerationError) -> Self {
        CliError::Limit(e.to_string())
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// What a command produced: text for the output stream, and an optional
/// error to report after writing it.
pub struct Outcome {
    pub output: String,
    pub error: Option<CliError>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, error: None }
    }
}

fn read_input(source: &str) -> Result<String, CliError> {
    if source.trim_start().starts_with('<') {
        return Ok(source.to_string());
    }
    if source == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(domain)?;
        return Ok(s);
    }
    std::fs::read_to_string(source).map_err(|e| CliError::Domain(format!("{source}: {e}")))
}

fn load(input: &Input) -> Result<Presentation, CliError> {
    parse_presentation(&read_input(&input.presentation)?).map_err(domain)
}

fn check_prime(p: u64) -> Result<(), CliError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CliError::Domain(format!("{p} is not prime")))
    }
}

fn parse_words(pres: &Presentation, words: &[String]) -> Result<Vec<Word>, CliError> {
    words
        .iter()
        .filter(|w| !w.trim().is_empty())
        .map(|w| pres.parse_word(w).map_err(|e| CliError::Domain(format!("subgroup word {w:?}: {e}"))))
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

const CSV_HEADER: [&str; 5] = ["depth", "index", "b1", "ratio", "ratio_exact"];

fn ratio_csv(rows: &[StageRatio]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.depth.to_string(),
            r.index.to_string(),
            r.b1.to_string(),
            rational::decimal_string(&r.ratio),
            r.ratio.to_string(),
        ])
        .expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    format!("# grp {}\n{body}", env!("CARGO_PKG_VERSION"))
}

fn chain_rows(chain: &Chain) -> Vec<StageRatio> {
    chain.stages.iter().map(|s| StageRatio::new(s.depth, s.index(), s.b1)).collect()
}

fn truncation_error(chain: &Chain) -> Option<CliError> {
    chain.truncated.as_ref().map(|t| CliError::Limit(format!("chain truncated: {}", truncation_note(t))))
}

fn presentation_json(pres: &Presentation) -> Value {
    json!({
        "presentation": pres.to_string(),
        "generators": pres.generator_names(),
        "relators": pres.relators().iter().map(|r| pres.display_word(r).to_string()).collect::<Vec<_>>(),
        "generator_count": pres.generator_count(),
        "relator_count": pres.relator_count(),
        "def_lower_bound": def_lower_bound(pres),
    })
}

fn subgroup_table(
    pres: &Presentation,
    words: &[String],
    normal: bool,
    limits: EnumerationLimits,
) -> Result<crate::coset::CosetTable, CliError> {
    let words = parse_words(pres, words)?;
    Ok(if normal { normal_closure_table(pres, &words, limits)? } else { todd_coxeter(pres, &words, limits)? })
}

/// Runs one command.
pub fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let limits = EnumerationLimits::with_max_cosets(config.max_cosets);
    let fmt = |default: Format| config.format.unwrap_or(default);
    match &config.command {
        Command::Parse(input) => {
            let pres = load(input)?;
            Ok(Outcome::ok(match fmt(Format::Text) {
                Format::Json => to_json(&presentation_json(&pres)),
                _ => format!("{pres}\n"),
            }))
        }
        Command::Tc { input, subgroup, normal } => {
            let pres = load(input)?;
            let table = subgroup_table(&pres, subgroup, *normal, limits)?;
            Ok(Outcome::ok(match fmt(Format::Text) {
                Format::Json => to_json(&table),
                _ => {
                    let mut s = format!("index {}\n", table.index());
                    for (g, name) in table.generator_names().iter().enumerate() {
                        let perm: Vec<String> = table.permutation(g).iter().map(u32::to_string).collect();
                        s.push_str(&format!("{name}: {}\n", perm.join(" ")));
                    }
                    s
                }
            }))
        }
        Command::Rs { input, subgroup, normal, simplify } => {
            let pres = load(input)?;
            let table = subgroup_table(&pres, subgroup, *normal, limits)?;
            let sub = rewrite_subgroup(&pres, &table);
            let induced = if *simplify { sub.simplified() } else { sub.presentation().clone() };
            let ledger = sub.ledger(def_lower_bound(&pres));
            let gens: Vec<Value> = sub
                .schreier_generators()
                .iter()
                .zip(sub.presentation().generator_names())
                .map(|(s, name)| {
                    json!({"name": name, "coset": s.coset, "generator": pres.generator_names()[s.generator],
                           "word": pres.display_word(&s.word).to_string()})
                })
                .collect();
            Ok(Outcome::ok(match fmt(Format::Text) {
                Format::Json => to_json(&json!({
                    "presentation": induced.to_string(),
                    "ledger": ledger,
                    "schreier_generators": gens,
                    "transversal": sub.transversal().iter().map(|w| pres.display_word(w).to_string()).collect::<Vec<_>>(),
                })),
                _ => format!("{induced}\n{}\n", serde_json::to_string(&ledger).expect("ledger serializes")),
            }))
        }
        Command::B1 { input, p } => {
            let pres = load(input)?;
            for &q in p {
                check_prime(q)?;
            }
            let inv = abelian_invariants(&pres);
            Ok(Outcome::ok(match fmt(Format::Text) {
                Format::Json => to_json(&inv.report(p)),
                _ => {
                    let torsion: Vec<String> = inv.torsion().iter().map(ToString::to_string).collect();
                    let mut s = format!("rank {}\ntorsion {}\n", inv.rank, torsion.join(" "));
                    for &q in p {
                        s.push_str(&format!("p_rank {q} {}\n", inv.p_rank(q)));
                    }
                    s.replace(" \n", "\n")
                }
            }))
        }
        Command::Chain(args) => {
            let pres = load(&args.input)?;
            check_prime(args.p)?;
            let chain = build_chain(&pres, args.p, args.depth, limits).map_err(domain)?;
            let output = match fmt(Format::Csv) {
                Format::Json => to_json(&chain.report()),
                _ => ratio_csv(&chain_rows(&chain)),
            };
            Ok(Outcome { output, error: truncation_error(&chain) })
        }
        Command::Approx { chain: args, eps, from_chain } => {
            let epsilon = parse_ratio(eps).map_err(domain)?;
            if *from_chain {
                let text = read_input(&args.input.presentation)?;
                let (pres, rows, truncated) = rows_from_chain_json(&text)?;
                let report = approx_from_rows(&pres, &rows, truncated);
                return Ok(Outcome::ok(match fmt(Format::Json) {
                    Format::Json => to_json(&json!({"presentation": pres.to_string(), "report": report, "caveat": RESIDUAL_CAVEAT})),
                    _ => ratio_csv(&report.stages),
                }));
            }
            let pres = load(&args.input)?;
            check_prime(args.p)?;
            let chain = build_chain(&pres, args.p, args.depth, limits).map_err(domain)?;
            let report = approx_sequence(&chain);
            let torsion = torsion_observation(&chain, &epsilon);
            let output = match fmt(Format::Json) {
                Format::Json => to_json(&json!({
                    "presentation": pres.to_string(),
                    "p": args.p,
                    "report": report,
                    "torsion": torsion,
                    "caveat": RESIDUAL_CAVEAT,
                })),
                _ => ratio_csv(&report.stages),
            };
            Ok(Outcome { output, error: truncation_error(&chain) })
        }
        Command::Vd(args) => {
            let pres = load(&args.input)?;
            check_prime(args.p)?;
            let vd = vd_lower_bound(&pres, args.p, args.depth, limits).map_err(domain)?;
            let output = match fmt(Format::Json) {
                Format::Json => to_json(&json!({
                    "presentation": pres.to_string(),
                    "p": args.p,
                    "depth": args.depth,
                    "indices": vd.chain.indices(),
                    "certificate": vd.certificate,
                    "truncated": vd.chain.truncated,
                })),
                _ => format!("{}\n", vd.certificate.statement),
            };
            Ok(Outcome { output, error: truncation_error(&vd.chain) })
        }
        Command::Cert(args) => {
            let pres = load(&args.input)?;
            check_prime(args.p)?;
            let vd = vd_lower_bound(&pres, args.p, args.depth, limits).map_err(domain)?;
            let def = def_certificate(&pres);
            let mut certs = vec![def.clone()];
            certs.extend(vd.chain.stages.iter().skip(1).map(|s| supermult_certificate(&pres, s.index())));
            let (b1c, l2c) = completion_certificates(&def, &vd.certificate, args.p);
            certs.extend([vd.certificate.clone(), b1c, l2c]);
            let output = match fmt(Format::Json) {
                Format::Json => to_json(&json!({"presentation": pres.to_string(), "p": args.p, "certificates": certs})),
                _ => certs.iter().map(|c| format!("{}\n", c.statement)).collect(),
            };
            Ok(Outcome { output, error: truncation_error(&vd.chain) })
        }
        Command::Tower { gens, p, eps, steps, probe_depth, n_cap, chain_depth, word_check_cap } => {
            let tc = TowerConfig {
                gen_count: *gens,
                p: *p,
                epsilon: parse_ratio(eps).map_err(domain)?,
                steps: *steps,
                probe_depth: *probe_depth,
                chain_depth: *chain_depth,
                n_cap: *n_cap,
                word_check_cap: *word_check_cap,
                limits,
            };
            let run = run_tower(tc).map_err(domain)?;
            Ok(Outcome { output: run.jsonl(), error: run.error.map(domain) })
        }
    }
}

fn rows_from_chain_json(text: &str) -> Result<(Presentation, Vec<StageRatio>, bool), CliError> {
    let bad = |what: &str| CliError::Domain(format!("chain file: {what}"));
    let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let pres = parse_presentation(v["presentation"].as_str().ok_or_else(|| bad("missing presentation"))?)
        .map_err(domain)?;
    let stages = v["stages"].as_array().ok_or_else(|| bad("missing stages"))?;
    let mut rows = Vec::with_capacity(stages.len());
    for s in stages {
        let field = |k: &str| s[k].as_u64().map(|x| x as usize).ok_or_else(|| bad(&format!("stage field {k}")));
        let row = StageRatio::new(field("depth")?, field("index")?, field("b1")?);
        if let Some(r) = s["ratio"].as_str() {
            if parse_ratio(r).ok() != Some(row.ratio.clone()) {
                return Err(bad("ratio does not match b1/index"));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no stages"));
    }
    Ok((pres, rows, !v["truncated"].is_null()))
}

/// Parses arguments, runs, writes output and maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match dispatch(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", outcome.output);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match outcome.error {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}

