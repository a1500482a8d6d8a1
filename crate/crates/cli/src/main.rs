//! `dqmat`: solve and check dual quaternion matrix equations, run the image
//! cipher and the self-tests.

mod cipher;
mod outcome;
mod solve;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use outcome::Outcome;

#[derive(Parser)]
#[command(name = "dqmat", version, about = "Linear matrix equations over dual quaternions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an equation and write the solution files.
    Solve(SolveArgs),
    /// Evaluate both solvability tests for A X - Y B = C without solving.
    Check(CheckArgs),
    /// Two-image cipher built on C = A X - Y B.
    #[command(subcommand)]
    Cipher(CipherCommand),
    /// Single-pair hand-eye calibration on synthetic motions.
    Handeye(HandeyeArgs),
    /// Randomized self-tests.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    /// Quaternion A X B = C (.qm inputs A B C).
    Axb,
    /// Dual quaternion A X = B (inputs A B).
    #[value(name = "ax-b")]
    AxB,
    /// Dual quaternion Y B = C (inputs B C).
    #[value(name = "yb-c")]
    YbC,
    /// Dual quaternion A X = Y B (inputs A B).
    #[value(name = "ax-yb")]
    AxYb,
    /// Dual quaternion A X - Y B = C (inputs A B C).
    Axmyb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Free {
    Zero,
    Random,
}

#[derive(Args)]
pub struct SolverFlags {
    /// Relative tolerance for the projector conditions.
    #[arg(long, default_value_t = dqmat::solvers::DEFAULT_SOLVER_TOL)]
    pub tol: f64,
    /// Write a JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub equation: Equation,
    /// Values of the arbitrary matrices in the general solution.
    #[arg(long, value_enum, default_value = "zero")]
    pub free: Free,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the solution files.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: SolverFlags,
    /// Coefficient and right-hand-side files, in the order of the equation.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// A.dqm B.dqm C.dqm
    #[arg(conflicts_with = "random")]
    pub inputs: Vec<PathBuf>,
    /// Check this many random instances instead and report agreement.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub flags: SolverFlags,
}

#[derive(Subcommand)]
pub enum CipherCommand {
    /// Generate a book (A, B) and a key Y.
    Keygen {
        /// Rows of the plaintext (image height).
        #[arg(long, required_unless_present = "like")]
        rows: Option<usize>,
        /// Columns of the plaintext (image width).
        #[arg(long, required_unless_present = "like")]
        cols: Option<usize>,
        /// Take the dimensions from this image.
        #[arg(long, conflicts_with_all = ["rows", "cols"])]
        like: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use two images as the key instead of random values.
        #[arg(long, num_args = 2, value_names = ["IMG0", "IMG1"])]
        key_images: Option<Vec<PathBuf>>,
        /// Output directory for A.dqm, B.dqm, book.txt and key.dqm.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Encrypt two same-sized PPM images.
    Encrypt {
        #[arg(long)]
        book: PathBuf,
        #[arg(long)]
        key: PathBuf,
        img0: PathBuf,
        img1: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext into two PPM images.
    Decrypt {
        #[arg(long)]
        book: PathBuf,
        #[arg(long)]
        key: PathBuf,
        ciphertext: PathBuf,
        #[arg(long)]
        out0: PathBuf,
        #[arg(long)]
        out1: PathBuf,
    },
    /// SSIM of reference/test image pairs.
    Ssim {
        /// REF TEST [REF TEST ...]
        #[arg(required = true, num_args = 2..)]
        images: Vec<PathBuf>,
    },
}

#[derive(Args)]
pub struct HandeyeArgs {
    #[arg(long, default_value_t = 5)]
    pub pairs: usize,
    /// Standard deviation of the noise added to each measured motion.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct SelftestArgs {
    /// Trials per suite (default: the full sweep).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub force_fail: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve::cmd_solve(&a),
        Command::Check(a) => solve::cmd_check(&a),
        Command::Cipher(c) => cipher::cmd_cipher(&c),
        Command::Handeye(a) => tools::cmd_handeye(&a),
        Command::Selftest(a) => tools::cmd_selftest(&a),
    };
    let code = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            Outcome::from_error(&e)
        }
    };
    ExitCode::from(code as u8)
}
