use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spindetect_cli::{run, CliError, Command, Config, Invocation};

#[derive(Parser, Debug)]
#[command(name = "spindetect", version, about = "Sweeps and reports for Dicke-probe single-spin detection")]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; existing files are never overwritten.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Abort with exit code 3 on the first regime violation.
    #[arg(long, global = true)]
    strict: bool,
    /// Extra `key=value` override, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Reduced dipolar field over an (r, z) grid.
    FieldMap(FieldMapArgs),
    /// Optimal interaction time and column shapes.
    Optimize(OptimizeArgs),
    /// Detection time over density and distance.
    TsMap(TsMapArgs),
    /// Exact probabilities against the closed forms.
    OracleCompare(OracleArgs),
    /// Preparation and readout fidelities with pulse schedules.
    PulseSim(PulseArgs),
    /// Counting identities and interaction invariance checks.
    Verify(VerifyArgs),
}

macro_rules! axis_args {
    ($name:ident { $($field:ident),* $(,)? }) => {
        #[derive(Args, Debug)]
        struct $name {
            $(
                #[arg(long)]
                $field: Option<String>,
            )*
        }

        impl $name {
            fn overrides(&self) -> Vec<(&'static str, &String)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), v));
                    }
                )*
                out
            }
        }
    };
}

axis_args!(FieldMapArgs { r_min, r_max, nr, z_min, z_max, nz });
axis_args!(OptimizeArgs { tol });
axis_args!(TsMapArgs { rho_min, rho_max, n_rho, zmin_min, zmin_max, n_z });
axis_args!(OracleArgs { l_list, u_start, u_stop, n_u });
axis_args!(PulseArgs { l_list, hard_ratios, selectivity });
axis_args!(VerifyArgs { l_max, draws });

fn invocation(cli: Cli) -> Result<Invocation, CliError> {
    let (command, axis) = match &cli.command {
        Cmd::FieldMap(a) => (Command::FieldMap, a.overrides()),
        Cmd::Optimize(a) => (Command::Optimize, a.overrides()),
        Cmd::TsMap(a) => (Command::TsMap, a.overrides()),
        Cmd::OracleCompare(a) => (Command::OracleCompare, a.overrides()),
        Cmd::PulseSim(a) => (Command::PulseSim, a.overrides()),
        Cmd::Verify(a) => (Command::Verify, a.overrides()),
    };
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Config::load(&text)?
        }
        None => Config::default(),
    };
    let mut overrides = Config::default();
    for s in &cli.set {
        let (k, v) = Config::parse_assignment(s)?;
        overrides.set(k, v);
    }
    for (k, v) in axis {
        overrides.set(k, v.clone());
    }
    Ok(Invocation {
        command,
        file,
        overrides,
        seed: cli.seed,
        strict: cli.strict,
        out_dir: cli.out.clone(),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match invocation(cli).and_then(|inv| run(&inv)) {
        Ok(summary) => {
            for p in &summary.written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
