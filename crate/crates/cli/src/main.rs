//! `abe`: key-policy ABE for layered monotone circuits from the command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 I/O error, 4 the key's
//! circuit rejects the ciphertext's input.

mod scheme;
mod store;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use scheme::{Decrypt, Encrypt, Keygen, Setup};
use store::KeyStore;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    NotSatisfied,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::NotSatisfied => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "abe", version, about = "Key-policy ABE for layered monotone circuits")]
struct Cli {
    /// Route scheme operations through the size-bound backend and report
    /// per-level budget use on stderr. Also enabled by ABE_TRACK_BOUNDS=1.
    #[arg(long, global = true)]
    track_bounds: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate public parameters and the master secret.
    Setup {
        #[arg(long)]
        n: usize,
        /// Maximum circuit depth ℓ; the map has degree ℓ + 1.
        #[arg(long)]
        depth: usize,
        /// The group order is a random prime just above 2^bits.
        #[arg(long, default_value_t = 128)]
        bits: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// log2 of the fresh-element size used with --track-bounds.
        #[arg(long, default_value_t = 8)]
        size_bits: u32,
    },
    /// Issue a secret key for a monotone circuit.
    Keygen {
        #[arg(long)]
        circuit: PathBuf,
        /// Layer the circuit and pad it to the parameters' depth.
        #[arg(long)]
        pad: bool,
        #[arg(long, default_value = "default")]
        label: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Encrypt a one-bit message under an input string such as 1011.
    Encrypt {
        #[arg(long)]
        input: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        message: u8,
        #[arg(long, default_value = "default")]
        label: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Print the decrypted bit, or NOT-SATISFIED.
    Decrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        ct: String,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Circuit tools.
    #[command(subcommand)]
    Circuit(CircuitCommand),
    /// Security-reduction demonstrations.
    #[command(subcommand)]
    Game(GameCommand),
}

#[derive(Subcommand)]
enum CircuitCommand {
    /// Validate a circuit file and list every violation.
    Check { file: PathBuf },
    /// Remove NOT gates; the result reads 2n literal inputs.
    Demorgan { file: PathBuf },
    /// Layer a monotone circuit and pad it to exactly --depth.
    Layer {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Evaluate on an input bit string and print every wire.
    Eval {
        file: PathBuf,
        input: String,
        /// Expand x to (x, NOT x) first, for demorgan output.
        #[arg(long)]
        literals: bool,
    },
}

#[derive(Subcommand)]
enum GameCommand {
    /// Run the simulator on one real and one random instance against an
    /// adversary that knows the challenge randomness.
    Demo {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 32)]
        bits: u32,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn rng(seed: Option<u64>) -> Box<dyn RngCore> {
    Box::new(match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    let track = cli.track_bounds || std::env::var("ABE_TRACK_BOUNDS").is_ok_and(|v| v == "1");
    match cli.command {
        Command::Setup {
            n,
            depth,
            bits,
            seed,
            out_dir,
            size_bits,
        } => {
            let args = Setup {
                n,
                depth,
                bits,
                size_bits: track.then_some(size_bits),
            };
            scheme::setup(&KeyStore::new(out_dir), args, &mut rng(seed))
        }
        Command::Keygen {
            circuit,
            pad,
            label,
            seed,
            dir,
        } => {
            let args = Keygen { circuit, pad, label };
            scheme::keygen(&KeyStore::new(dir), args, track, &mut rng(seed))
        }
        Command::Encrypt {
            input,
            message,
            label,
            seed,
            dir,
        } => {
            let args = Encrypt {
                input,
                message: message == 1,
                label,
            };
            scheme::encrypt(&KeyStore::new(dir), args, track, &mut rng(seed))
        }
        Command::Decrypt { key, ct, dir } => {
            let m = scheme::decrypt(&KeyStore::new(dir), Decrypt { key, ct }, track)?;
            Ok(u8::from(m).to_string())
        }
        Command::Circuit(c) => match c {
            CircuitCommand::Check { file } => tools::check(&file),
            CircuitCommand::Demorgan { file } => tools::demorgan(&file),
            CircuitCommand::Layer { file, depth } => tools::layer(&file, depth),
            CircuitCommand::Eval { file, input, literals } => tools::eval(&file, &input, literals),
        },
        Command::Game(GameCommand::Demo { n, depth, bits, seed }) => tools::game_demo(n, depth, bits, &mut rng(seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::NotSatisfied => println!("NOT-SATISFIED"),
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
