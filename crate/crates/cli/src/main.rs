use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ldp_cli::scenario::{parse_counting, parse_law};
use ldp_cli::runner::fmt_num;
use ldp_cli::{parse_scenario, run, Status};
use ldp_core::montecarlo::MIN_BUDGET;
use ldp_core::oracle::{convolution_tail, enumerate_pgf, first_passage_walk, sparre_andersen_exact, OracleResult};
use ldp_core::predict::big_jump_constant;
use ldp_core::specfun::{gamma_fn, riemann_zeta};

#[derive(Parser)]
#[command(name = "ldp", version, about = "Heavy-tailed large-deviation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write its CSV report.
    Run {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        /// Worker threads; numeric output does not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// CSV destination (stdout when neither this nor `output` is set).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a brute-force reference.
    Verify {
        #[command(subcommand)]
        oracle: Oracle,
    },
    /// Print a special-function value.
    Constants {
        #[command(subcommand)]
        which: Constant,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// P[X1 + … + Xn > x] by quadrature, n ∈ {2, 3}.
    Convolution {
        #[arg(long, default_value = "pareto(beta=0.5, scale=1)")]
        law: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        x: f64,
    },
    /// E[z^N(t)] by direct summation of the count pmf.
    Pgf {
        #[arg(long)]
        counting: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 100_000)]
        n_max: usize,
    },
    /// Simulated P[τ > n] for a Gaussian walk next to the exact formula.
    Walk {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000)]
        walks: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Constant {
    Gamma {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    Zeta {
        #[arg(long)]
        s: f64,
    },
    /// C(γ,β) = Γ(1−γ) Γ(1−β)^γ / Γ(1−γβ).
    Bigjump {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        beta: f64,
    },
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(Status::Config.code() as u8)
}

fn print_oracle(label: &str, r: &OracleResult) {
    println!("{label},{},{},{}", fmt_num(r.value), fmt_num(r.error_bound), r.method);
}

fn run_command(file: PathBuf, seed: Option<u64>, budget: Option<u64>, workers: Option<usize>, out: Option<PathBuf>) -> ExitCode {
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return config_error(format!("{}: {e}", file.display())),
    };
    let mut s = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => return config_error(format!("{}: {e}", file.display())),
    };
    if let Some(v) = seed {
        s.seed = v;
        s.defaults_applied.retain(|d| d.0 != "seed");
    }
    if let Some(b) = budget {
        if b < MIN_BUDGET {
            return config_error(format!("--budget must be at least {MIN_BUDGET}"));
        }
        s.budget = b;
        s.defaults_applied.retain(|d| d.0 != "budget");
    }
    for (k, v) in &s.defaults_applied {
        eprintln!("default: {k} = {v}");
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = workers {
        if k == 0 {
            return config_error("--workers must be positive");
        }
        pool = pool.num_threads(k);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return config_error(e),
    };
    let report = pool.install(|| run(&s));
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    let csv = report.to_csv();
    match out.or_else(|| s.output.clone()) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                return config_error(format!("{}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
    ExitCode::from(report.status.code() as u8)
}

fn verify(oracle: Oracle) -> Result<(), String> {
    match oracle {
        Oracle::Convolution { law, n, x } => {
            let law = parse_law(&law)?;
            println!("oracle,value,error_bound,method");
            print_oracle("convolution", &convolution_tail(&law, n, x).map_err(|e| e.to_string())?);
        }
        Oracle::Pgf { counting, t, z, n_max } => {
            let spec = parse_counting(&counting)?;
            println!("oracle,value,error_bound,method");
            print_oracle("pgf", &enumerate_pgf(&spec, t, z, n_max).map_err(|e| e.to_string())?);
        }
        Oracle::Walk { n_max, walks, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = first_passage_walk(&mut rng, n_max, walks).map_err(|e| e.to_string())?;
            println!("n,empirical,error_bound,exact,agrees");
            for (n, r) in rows.iter().enumerate() {
                let exact = sparre_andersen_exact(n as u64);
                println!("{n},{},{},{},{}", fmt_num(r.value), fmt_num(r.error_bound), fmt_num(exact), r.agrees(exact, 0.0));
            }
        }
    }
    Ok(())
}

fn constant(which: Constant) -> Result<f64, String> {
    match which {
        Constant::Gamma { x } => gamma_fn(x),
        Constant::Zeta { s } => riemann_zeta(s),
        Constant::Bigjump { gamma, beta } => big_jump_constant(gamma, beta),
    }
    .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(Status::Config.code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run { file, seed, budget, workers, out } => run_command(file, seed, budget, workers, out),
        Command::Verify { oracle } => match verify(oracle) {
            Ok(()) => ExitCode::SUCCESS,
            Err(m) => config_error(m),
        },
        Command::Constants { which } => match constant(which) {
            Ok(v) => {
                println!("{v}");
                ExitCode::SUCCESS
            }
            Err(m) => config_error(m),
        },
    }
}
