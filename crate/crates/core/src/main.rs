use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grassmannian_strata::cli::{run, Command, RunConfig, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "grstrata",
    version,
    about = "Stratify subspaces by a rational hyperplane arrangement"
)]
struct Args {
    /// Arrangement file: `n` on the first line, then one normal per line.
    #[arg(long, short = 'a', global = true)]
    arrangement: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sampled entries are drawn from [-bound, bound].
    #[arg(long, global = true, default_value_t = 3)]
    bound: u64,
    #[arg(long, global = true, default_value_t = grassmannian_strata::arrangement::DEFAULT_CHAIN_CAP)]
    chain_cap: usize,
    #[arg(long, global = true, default_value_t = grassmannian_strata::matroid::MAX_LATTICE_SIZE)]
    lattice_cap: usize,
    #[arg(long, short = 'j', global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the report here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the intersection lattice by rank and count maximal chains.
    Lattice,
    /// Print the coefficient table of the k-adjoint arrangement.
    Adjoint {
        #[arg(long, short)]
        k: usize,
    },
    /// Print the three stratum labels of one subspace.
    Label {
        #[arg(long, short)]
        k: usize,
        #[arg(long, short)]
        subspace: PathBuf,
    },
    /// Label sampled subspaces and verify that the three partitions agree.
    Verify {
        #[arg(long, short)]
        k: usize,
        #[arg(long, short = 'n', default_value_t = 100)]
        samples: usize,
        /// Also inject flats and subspaces built around them.
        #[arg(long)]
        include_flats: bool,
    },
    /// Print the restriction of the arrangement to a subspace.
    Restrict {
        #[arg(long, short)]
        subspace: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let Some(arrangement) = args.arrangement else {
        eprintln!("error: --arrangement is required");
        return ExitCode::from(EXIT_INPUT as u8);
    };
    let command = match args.command {
        Cmd::Lattice => Command::Lattice,
        Cmd::Adjoint { k } => Command::Adjoint { k },
        Cmd::Label { k, subspace } => Command::Label { k, subspace },
        Cmd::Verify {
            k,
            samples,
            include_flats,
        } => Command::Verify {
            k,
            samples,
            include_flats,
        },
        Cmd::Restrict { subspace } => Command::Restrict { subspace },
    };
    let config = RunConfig {
        command,
        arrangement,
        seed: args.seed,
        bound: args.bound,
        chain_cap: args.chain_cap,
        lattice_cap: args.lattice_cap,
        jobs: args.jobs,
        output: args.output,
        json: args.json,
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
