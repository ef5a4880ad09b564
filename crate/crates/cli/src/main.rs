use std::io::IsTerminal;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use gizkp_cli::commands::{self, exit, CliError};
use gizkp_cli::simulate::{simulate, simulate_over_wire, Adversary, SimulationSpec};
use gizkp_cli::{selftest, Client};
use gizkp_core::kdf::DEFAULT_GRAPH_SIZE;
use gizkp_core::protocol::DEFAULT_ROUNDS;
use gizkp_core::{Credentials, HashId, KdfParams};
use gizkp_service::{ServiceConfig, VerifierService};

#[derive(Parser)]
#[command(name = "gizkp", version, about = "Graph-isomorphism zero-knowledge login")]
struct Cli {
    /// Verifier base URL.
    #[arg(long, global = true, env = "GIZKP_SERVER", default_value = "http://127.0.0.1:8080")]
    server: String,
    /// Graph size.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Rounds per session (simulations only; the server fixes its own).
    #[arg(long, global = true, default_value_t = DEFAULT_ROUNDS)]
    rounds: usize,
    #[arg(long, global = true, default_value = "sha256")]
    hash: HashId,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Server configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the public graphs locally and register them.
    Register {
        #[arg(long)]
        login: String,
    },
    /// Prove knowledge of the password to the server.
    Login {
        #[arg(long)]
        login: String,
    },
    /// Print derived key material, including the secret permutation.
    Derive {
        #[arg(long)]
        login: String,
        /// Allow printing the secret to a terminal.
        #[arg(long)]
        insecure_show_secret: bool,
    },
    /// Measure acceptance rates of honest or cheating provers.
    Simulate {
        #[arg(long, value_enum, default_value = "cheater")]
        kind: Adversary,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        report_seed: u64,
        /// Run real logins against `--server` instead of in-process.
        #[arg(long)]
        over_wire: bool,
    },
    /// Built-in consistency checks.
    Selftest,
    /// Run the verifier.
    Serve,
}

fn init_logging(verbose: u8, default: tracing::Level) {
    let level = match verbose {
        0 => default,
        1 => tracing::Level::DEBUG,
        _ => tracing::Level::TRACE,
    };
    let _ = tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(level)
        .with_ansi(std::io::stderr().is_terminal())
        .try_init();
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let client = || Client::new(&cli.server);
    let creds = |login: &str| -> Result<Credentials, CliError> {
        Ok(Credentials::new(login, commands::read_password()?)?)
    };
    match &cli.command {
        Command::Register { login } => {
            let params = KdfParams::new(cli.n.unwrap_or(DEFAULT_GRAPH_SIZE), cli.hash)?;
            let created = commands::register(&client(), &creds(login)?, &params)?;
            if cli.json {
                print_json(&serde_json::json!({ "login": login, "created": created }));
            } else if created {
                println!("registered {login}");
            } else {
                println!("{login} already registered with this password");
            }
        }
        Command::Login { login } => {
            let c = creds(login)?;
            let verbose = cli.verbose > 0 && !cli.json;
            let token = commands::login(&client(), &c, cli.hash, &mut rand::rng(), |round, b, ok| {
                if verbose {
                    eprintln!("round {round}: b={} {}", b.as_u8(), if ok { "pass" } else { "fail" });
                }
            })?;
            if cli.json {
                print_json(&serde_json::json!({ "verdict": "accepted", "token": token }));
            } else {
                println!("accepted");
                println!("token: {token}");
            }
        }
        Command::Derive {
            login,
            insecure_show_secret,
        } => {
            commands::check_secret_output(std::io::stdout().is_terminal(), *insecure_show_secret)?;
            let params = KdfParams::new(cli.n.unwrap_or(DEFAULT_GRAPH_SIZE), cli.hash)?;
            print_json(&commands::derive(&creds(login)?, &params)?);
        }
        Command::Simulate {
            kind,
            trials,
            report_seed,
            over_wire,
        } => {
            if *trials == 0 {
                return Err(CliError::Other("--trials must be at least 1".into()));
            }
            if !(1..=gizkp_core::protocol::MAX_ROUNDS).contains(&cli.rounds) {
                return Err(CliError::Other(format!(
                    "--rounds must be in 1..={}",
                    gizkp_core::protocol::MAX_ROUNDS
                )));
            }
            let spec = SimulationSpec {
                kind: *kind,
                trials: *trials,
                rounds: cli.rounds,
                n: cli.n.unwrap_or(16),
                report_seed: *report_seed,
            };
            let report = if *over_wire {
                simulate_over_wire(&spec, &client())?
            } else {
                simulate(&spec)
            };
            if cli.json {
                print_json(&report);
            } else {
                println!("{}", report.render());
            }
        }
        Command::Selftest => {
            let checks = selftest::run_default();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(exit::REJECTED);
            }
        }
        Command::Serve => {
            let config = ServiceConfig::load(cli.config.as_deref()).map_err(|e| CliError::Other(e.to_string()))?;
            let addr: SocketAddr = format!("{}:{}", config.bind, config.port)
                .parse()
                .map_err(|e| CliError::Other(format!("bind address: {e}")))?;
            let svc = VerifierService::open(config).map_err(|e| CliError::Other(e.to_string()))?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
            rt.block_on(gizkp_service::http::serve(Arc::new(svc), addr))
                .map_err(|e| CliError::Other(e.to_string()))?;
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = match cli.command {
        Command::Serve => tracing::Level::INFO,
        _ => tracing::Level::WARN,
    };
    init_logging(cli.verbose, default_level);
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
