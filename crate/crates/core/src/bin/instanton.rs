use anyhow::Context;
use clap::{Parser, Subcommand};
use instanton_core::cli::{exit_code, run, Command, Report, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact instanton-counting computations and identity checks.
///
/// Exit status: 0 when every checked identity holds, 1 when one fails,
/// 2 on invalid input.
#[derive(Parser, Debug)]
#[command(name = "instanton", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Highest power of Λ kept.
    #[arg(long, global = true)]
    lambda_order: Option<i64>,

    /// Highest power of the blow-up variable t kept.
    #[arg(long, global = true)]
    t_order: Option<usize>,

    /// Truncation degree in (x, z), with x of weight 2 and z of weight 1.
    #[arg(long, global = true)]
    xz_degree: Option<u32>,

    /// Surface data file (repeatable); defaults to the shipped examples.
    #[arg(long = "surface", global = true)]
    surfaces: Vec<PathBuf>,

    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the parallel sums (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Print the JSON report instead of the one-line-per-check summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Instanton partition function as a Λ-series.
    ExpandZ,
    /// F0, H, A, B and the curve data u, T, π/ω.
    Prepotential,
    /// Blow-up ratio on the slice ε₂ = −ε₁ in the limit ε → 0.
    BlowupRatio {
        /// First Chern class k·C of the blow-up, k ∈ {0, 1}.
        #[arg(long, default_value_t = 0)]
        c1: u8,
    },
    /// σ-function identity and the curve identities at a = m.
    SwIdentities,
    /// Residues of the wall-crossing form at v = 0, 1, 1/3, ∞.
    MochizukiResidues,
    /// Donaldson series from the residue at v = 1 against the Witten form.
    Witten,
    /// Superconformal simple type tests.
    Scst,
    /// Three-point localization on P² against the closed form.
    ToricBridge,
    /// Every suite at default orders on the shipped data.
    VerifyAll,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::ExpandZ => Command::ExpandZ,
            Cmd::Prepotential => Command::Prepotential,
            Cmd::BlowupRatio { c1 } => Command::BlowupRatio { c1 },
            Cmd::SwIdentities => Command::SwIdentities,
            Cmd::MochizukiResidues => Command::MochizukiResidues,
            Cmd::Witten => Command::Witten,
            Cmd::Scst => Command::Scst,
            Cmd::ToricBridge => Command::ToricBridge,
            Cmd::VerifyAll => Command::VerifyAll,
        }
    }
}

fn summary(r: &Report) -> String {
    let mut s = String::new();
    for c in &r.checks {
        let mark = if c.holds { "PASS" } else { "FAIL" };
        s.push_str(&format!("{} {}", mark, c.name));
        if let Some(t) = &c.compared_through {
            s.push_str(&format!(" [through {}]", t));
        }
        if let Some(f) = &c.first_failure {
            s.push_str(&format!(" (first failure: {})", f));
        }
        s.push('\n');
    }
    let failed = r.checks.iter().filter(|c| !c.holds).count();
    s.push_str(&format!("{}: {} checks, {} failed\n", r.command, r.checks.len(), failed));
    s
}

fn emit(cli: &Cli, report: &Report) -> anyhow::Result<()> {
    let text = report.render();
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.json {
        print!("{}", text);
    } else {
        print!("{}", summary(report));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    }
    let cfg = RunConfig {
        command: cli.command.into(),
        lambda_order: cli.lambda_order,
        t_order: cli.t_order,
        xz_degree: cli.xz_degree,
        surfaces: cli.surfaces.clone(),
    };
    let outcome = run(&cfg);
    let code = exit_code(&outcome);
    match &outcome {
        Ok(report) => {
            if let Err(e) = emit(&cli, report) {
                eprintln!("error: {:#}", e);
                return ExitCode::from(2);
            }
        }
        Err(e) => eprintln!("error: {}", e),
    }
    ExitCode::from(code as u8)
}
