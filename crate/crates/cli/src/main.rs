//! `learnspace`: learning spaces from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "learnspace", version, about = "Build, analyse and assess learning spaces")]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the states, optionally listing them.
    States {
        input: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// The base: states with a single predecessor.
    Base { input: PathBuf },
    /// Fewest learning sequences generating the space, as a .seqs file.
    Minimize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Number of concepts, base size and convex dimension.
    Dims { input: PathBuf },
    /// Projection onto a subset of the concepts.
    Project {
        input: PathBuf,
        /// Comma-separated concepts to keep.
        #[arg(long)]
        keep: String,
    },
    /// Inner and outer fringe of a state.
    Fringe {
        input: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// States that can be removed from, or added to, the space.
    FringeSpace { input: PathBuf },
    /// Add a state and print the adapted space as a .seqs file.
    AddState(EditArgs),
    /// Remove a state and print the adapted space as a .seqs file.
    RemoveState(EditArgs),
    /// Orders in which a learner can acquire every concept.
    BasicWords {
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
    },
    /// Run the adaptive assessment against recorded or simulated answers.
    Assess(AssessArgs),
    /// States containing `know` and avoiding `unknow`.
    Fiber {
        input: PathBuf,
        #[arg(long, default_value = "")]
        know: String,
        #[arg(long, default_value = "")]
        unknow: String,
    },
    /// Decide whether the union closure of a set family is an upper
    /// subfamily of some learning space.
    RecognizeUpper { input: PathBuf },
    /// Pairwise unions of two spaces over the same concepts.
    Join { a: PathBuf, b: PathBuf },
    /// Analyse a semilattice table.
    Semilattice(SemilatticeArgs),
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append transcript events to this JSON-lines file.
        #[arg(long)]
        persist: Option<PathBuf>,
        /// Serve static files from this directory.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EditArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub state: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["answers", "simulate"])))]
pub struct AssessArgs {
    pub input: PathBuf,
    /// File of `concept 0|1` lines giving the answer to each concept.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// Simulate a student in a random state with this seed.
    #[arg(long)]
    pub simulate: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.2)]
    pub theta_lo: f64,
    #[arg(long, default_value_t = 0.8)]
    pub theta_hi: f64,
    #[arg(long, default_value_t = 8)]
    pub collection_size: usize,
    /// Seed for the question collections; defaults to the simulation seed or 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["check", "to_antimatroid", "to_qos"])))]
pub struct SemilatticeArgs {
    pub input: PathBuf,
    /// Classify objects and test for separated equalizers.
    #[arg(long)]
    pub check: bool,
    /// Represent the table as the union operation on sets.
    #[arg(long)]
    pub to_antimatroid: bool,
    /// Represent the table as the lower sets of an order.
    #[arg(long)]
    pub to_qos: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "schema_version": commands::SCHEMA_VERSION, "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
