//! `knap`: key generation, encryption, GA attack, exhaustive oracle and
//! parameter sweeps over JSON and CSV files.
//!
//! Exit codes: 0 success, 1 validation or input error, 2 I/O error,
//! 3 partial attack.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use knapsack_ga::attack::{attack_message, AttackReport, DEFAULT_ATTEMPTS};
use knapsack_ga::cipher::{
    decrypt_message, encrypt_message, generate_keypair, Ciphertext, PrivateKey, PublicKey,
};
use knapsack_ga::ga::{run_ga, GaParams};
use knapsack_ga::harness::{run_sweep, write_sweep_outputs, SweepConfig};
use knapsack_ga::oracle::{brute_force_solve_with_limit, DEFAULT_ORACLE_LIMIT};
use knapsack_ga::{Error, Instance};

#[derive(Parser, Debug)]
#[command(name = "knap", version, about = "Knapsack cipher workbench: keys, encryption, GA attack, oracle, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a Merkle-Hellman key pair
    Keygen(KeygenArgs),
    /// Encrypt a message under a public key
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext file with the private key
    Decrypt(DecryptArgs),
    /// Recover plaintext from ciphertext and public key only, using the GA
    Attack(AttackArgs),
    /// List every exact subset-sum solution by exhaustive enumeration
    Oracle(OracleArgs),
    /// Run the GA once on a subset-sum instance
    Solve(SolveArgs),
    /// Sweep crossover and mutation rates and write result tables
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    /// Block size in bits
    #[arg(long)]
    n: usize,
    /// Bit width of each random increment in the superincreasing sequence
    #[arg(long, default_value_t = 10)]
    magnitude: u32,
    /// RNG seed
    #[arg(long, env = "KNAP_SEED", default_value_t = 0)]
    seed: u64,
    /// Private key output path
    #[arg(long, default_value = "private.json")]
    private: PathBuf,
    /// Public key output path
    #[arg(long, default_value = "public.json")]
    public: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["message", "input"])))]
struct EncryptArgs {
    /// Public key JSON file
    #[arg(long)]
    public: PathBuf,
    /// Message text
    #[arg(long)]
    message: Option<String>,
    /// Read the message bytes from this file instead
    #[arg(long)]
    input: Option<PathBuf>,
    /// Ciphertext output path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    /// Private key JSON file
    #[arg(long)]
    private: PathBuf,
    /// Ciphertext JSON file
    #[arg(long)]
    ciphertext: PathBuf,
    /// Write plaintext bytes here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GaArgs {
    /// JSON file holding a GA parameter block; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Population size
    #[arg(long)]
    pop: Option<usize>,
    /// Crossover rate, percent of the population paired per generation
    #[arg(long)]
    cx_rate: Option<f64>,
    /// Per-chromosome probability of a single bit flip
    #[arg(long)]
    mut_rate: Option<f64>,
    /// Generation cap
    #[arg(long)]
    max_gen: Option<usize>,
    /// RNG seed
    #[arg(long, env = "KNAP_SEED")]
    seed: Option<u64>,
    /// Stop at the first exact solution
    #[arg(long)]
    stop_on_first: bool,
}

impl GaArgs {
    fn params(&self) -> Result<GaParams, CliError> {
        let mut params = match &self.config {
            Some(path) => read_json::<GaParams>(path)?,
            None => GaParams::default(),
        };
        if let Some(v) = self.pop {
            params.population_size = v;
        }
        if let Some(v) = self.cx_rate {
            params.crossover_rate = v;
        }
        if let Some(v) = self.mut_rate {
            params.mutation_rate = v;
        }
        if let Some(v) = self.max_gen {
            params.max_generations = v;
        }
        if let Some(v) = self.seed {
            params.seed = v;
        }
        if self.stop_on_first {
            params.stop_on_first = true;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Ciphertext JSON file
    #[arg(long)]
    ciphertext: PathBuf,
    /// Public key JSON file
    #[arg(long)]
    public: PathBuf,
    /// Attack report output path
    #[arg(long)]
    out: PathBuf,
    /// Independent GA runs per block before giving up on it
    #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
    attempts: usize,
    #[command(flatten)]
    ga: GaArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("problem").required(true).args(["weights", "instance"])))]
struct InstanceArgs {
    /// Comma-separated positive weights
    #[arg(long, requires = "target")]
    weights: Option<String>,
    /// Target sum
    #[arg(long, requires = "weights")]
    target: Option<String>,
    /// Instance JSON file {"weights": [...], "target": m}
    #[arg(long, conflicts_with_all = ["weights", "target"])]
    instance: Option<PathBuf>,
}

impl InstanceArgs {
    fn instance(&self) -> Result<Instance, CliError> {
        match (&self.instance, &self.weights, &self.target) {
            (Some(path), _, _) => read_json(path),
            (None, Some(w), Some(t)) => Ok(Instance::parse_args(w, t)?),
            _ => Err(CliError::Validation("give --weights with --target, or --instance".into())),
        }
    }
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    problem: InstanceArgs,
    /// Largest instance size to enumerate
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    limit: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: InstanceArgs,
    #[command(flatten)]
    ga: GaArgs,
    /// Write the run result JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("grid").required(true).args(["paper", "config"])))]
struct SweepArgs {
    /// Use the five benchmark sets with crossover 2..5, mutation 0.5..0.8, 5 repeats
    #[arg(long)]
    paper: bool,
    /// Sweep configuration JSON file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Base seed for per-cell seed derivation
    #[arg(long, env = "KNAP_SEED")]
    seed: Option<u64>,
    /// Population size (overrides the config)
    #[arg(long)]
    pop: Option<usize>,
    /// Generation cap (overrides the config)
    #[arg(long)]
    max_gen: Option<usize>,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "error: {msg}"),
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        CliError::Validation(format!(
            "{}: parse error at field `{field}`: {}",
            path.display(),
            e.inner()
        ))
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

fn keygen(args: &KeygenArgs) -> Result<u8, CliError> {
    if args.n == 0 {
        return Err(CliError::Validation("--n must be at least 1".into()));
    }
    let pair = generate_keypair(args.n, args.seed, args.magnitude)?;
    write_json(&args.private, &pair.private)?;
    write_json(&args.public, &pair.public)?;
    println!("public key fingerprint: {}", pair.public.fingerprint());
    Ok(0)
}

fn encrypt(args: &EncryptArgs) -> Result<u8, CliError> {
    let key: PublicKey = read_json(&args.public)?;
    let text = match (&args.message, &args.input) {
        (Some(m), _) => m.as_bytes().to_vec(),
        (None, Some(path)) => {
            fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap requires one message source"),
    };
    let ciphertext = encrypt_message(&text, &key);
    write_json(&args.out, &ciphertext)?;
    println!("{} bytes -> {} blocks of {} bits", text.len(), ciphertext.blocks.len(), ciphertext.n);
    Ok(0)
}

fn decrypt(args: &DecryptArgs) -> Result<u8, CliError> {
    let key: PrivateKey = read_json(&args.private)?;
    let ciphertext: Ciphertext = read_json(&args.ciphertext)?;
    let text = decrypt_message(&ciphertext, &key)?;
    match &args.out {
        Some(path) => write_bytes(path, &text)?,
        None => println!("{}", String::from_utf8_lossy(&text)),
    }
    Ok(0)
}

#[derive(Serialize)]
struct AttackOutput {
    plaintext: String,
    /// Set when the recovered bytes were not valid UTF-8.
    lossy: bool,
    plaintext_hex: String,
    #[serde(flatten)]
    report: AttackReport,
}

fn attack(args: &AttackArgs) -> Result<u8, CliError> {
    let ciphertext: Ciphertext = read_json(&args.ciphertext)?;
    let key: PublicKey = read_json(&args.public)?;
    let params = args.ga.params()?;
    let (plain, report) = attack_message(&ciphertext, &key, &params, args.attempts)?;
    let decoded = String::from_utf8_lossy(&plain);
    let output = AttackOutput {
        lossy: std::str::from_utf8(&plain).is_err(),
        plaintext: decoded.into_owned(),
        plaintext_hex: plain.iter().map(|b| format!("{b:02x}")).collect(),
        report,
    };
    write_json(&args.out, &output)?;
    let r = &output.report;
    println!(
        "recovered {} of {} blocks ({} ambiguous, {} failed) in {} generations",
        r.recovered_blocks.len(),
        ciphertext.blocks.len(),
        r.ambiguous_blocks.len(),
        r.failed_blocks.len(),
        r.total_generations
    );
    Ok(if r.is_complete() { 0 } else { 3 })
}

fn oracle(args: &OracleArgs) -> Result<u8, CliError> {
    let instance = args.problem.instance()?;
    let solutions = brute_force_solve_with_limit(&instance, args.limit)?;
    for c in &solutions {
        let picked: Vec<String> = instance
            .weights()
            .iter()
            .zip(c.bits())
            .filter(|(_, &b)| b)
            .map(|(w, _)| w.to_string())
            .collect();
        println!("{c} {{{}}}", picked.join(", "));
    }
    println!("{} solutions", solutions.len());
    Ok(0)
}

fn solve(args: &SolveArgs) -> Result<u8, CliError> {
    let instance = args.problem.instance()?;
    let params = args.ga.params()?;
    let result = run_ga(&instance, &params)?;
    match &args.out {
        Some(path) => write_json(path, &result)?,
        None => println!("{}", serde_json::to_string_pretty(&result).expect("serializable")),
    }
    Ok(0)
}

fn sweep(args: &SweepArgs) -> Result<u8, CliError> {
    let mut config = match &args.config {
        Some(path) => read_json::<SweepConfig>(path)?,
        None => SweepConfig::paper(GaParams::default()),
    };
    if let Some(seed) = args.seed {
        config.base_params.seed = seed;
    }
    if let Some(pop) = args.pop {
        config.base_params.population_size = pop;
    }
    if let Some(max_gen) = args.max_gen {
        config.base_params.max_generations = max_gen;
    }
    config.validate()?;
    let records = run_sweep(&config, args.jobs)?;
    let (tables, summary) = write_sweep_outputs(&records, &args.out)?;
    println!("{} cells, {} experiment tables -> {}", records.len(), tables.len(), args.out.display());

    let mut_rates = summary.mutation_rates();
    print!("mean solutions  cx\\mut");
    for mu in &mut_rates {
        print!(" {mu:>6}");
    }
    println!();
    for cx in summary.crossover_rates() {
        print!("{cx:>22}");
        for &mu in &mut_rates {
            match summary.mean(cx, mu) {
                Some(m) => print!(" {m:>6.3}"),
                None => print!(" {:>6}", "-"),
            }
        }
        println!();
    }
    let best = &summary.argmax;
    let mut notes = Vec::new();
    if summary.tied {
        notes.push("tie");
    }
    if summary.degenerate {
        notes.push("degenerate");
    }
    println!(
        "argmax: cx={} mut={} mean={:.3}{}",
        best.cx_rate,
        best.mut_rate,
        best.mean_solutions,
        if notes.is_empty() { String::new() } else { format!(" ({})", notes.join(", ")) }
    );
    println!(
        "argmax at cx=2, mut=0.6: {}",
        if best.cx_rate == 2.0 && best.mut_rate == 0.6 { "yes" } else { "no" }
    );
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Keygen(args) => keygen(args),
        Command::Encrypt(args) => encrypt(args),
        Command::Decrypt(args) => decrypt(args),
        Command::Attack(args) => attack(args),
        Command::Oracle(args) => oracle(args),
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
