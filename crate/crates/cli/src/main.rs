use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use msrsb::bench::{export_basis, load_dir, run_case, run_sweep, CaseConfig, RunReport};

/// Multiscale restriction-smoothed basis experiments.
#[derive(Parser)]
#[command(name = "msrsb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case file (a sweep case runs all of its members).
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run every case file in a directory and tabulate iteration counts.
    Sweep {
        dir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write one basis function as VTK and the prolongation as Matrix Market.
    ExportBasis {
        config: PathBuf,
        coarse_node: usize,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Replace every random seed in the case.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "MSRSB_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Relative residual tolerance for every solver run.
    #[arg(long)]
    tol: Option<f64>,
}

impl Opts {
    fn apply(&self, cfg: &mut CaseConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.override_seed(s);
        }
        if let Some(t) = self.tol {
            if t.is_nan() || t <= 0.0 {
                bail!("--tol must be positive");
            }
            cfg.override_tol(t);
        }
        cfg.validate()
            .with_context(|| format!("case `{}`", cfg.id))?;
        Ok(())
    }
}

fn load(path: &Path, opts: &Opts) -> Result<CaseConfig> {
    let mut cfg = CaseConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    opts.apply(&mut cfg)?;
    Ok(cfg)
}

fn summarize(r: &RunReport) -> bool {
    println!(
        "{}: {} fine / {} coarse unknowns, basis {} iterations{}",
        r.case,
        r.fine_unknowns,
        r.coarse_unknowns,
        r.basis_iterations,
        if r.basis_converged {
            ""
        } else {
            " (not converged)"
        }
    );
    if let Some(e) = r.ms_error {
        println!(
            "  initial multiscale error: rel l1 {:.4}, max {:.4}",
            e.rel_l1, e.max_abs
        );
    }
    for run in &r.runs {
        let state = if run.converged {
            "converged"
        } else {
            "NOT converged"
        };
        println!(
            "  {:<40} {:>5} its  {:.3e}  {state}",
            run.label, run.iterations, run.final_residual
        );
    }
    r.runs.iter().all(|x| x.converged)
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved for non-convergence
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, opts } => {
            let cfg = load(&config, &opts)?;
            if cfg.sweep.is_some() {
                let (table, reports) =
                    run_sweep(std::slice::from_ref(&cfg), &cfg.id, &opts.out_dir)?;
                let ok = reports.iter().fold(true, |ok, r| summarize(r) & ok);
                print!("{}", table.to_markdown());
                Ok(ok)
            } else {
                let report = run_case(&cfg, &opts.out_dir)?;
                Ok(summarize(&report))
            }
        }
        Command::Sweep { dir, opts } => {
            let mut cfgs =
                load_dir(&dir).with_context(|| format!("loading cases from {}", dir.display()))?;
            if cfgs.is_empty() {
                bail!("no .toml cases in {}", dir.display());
            }
            for c in &mut cfgs {
                opts.apply(c)?;
            }
            let name = dir
                .file_name()
                .and_then(|s| s.to_str())
                .unwrap_or("sweep")
                .to_string();
            let (table, reports) = run_sweep(&cfgs, &name, &opts.out_dir)?;
            let ok = reports.iter().fold(true, |ok, r| summarize(r) & ok);
            print!("{}", table.to_markdown());
            Ok(ok)
        }
        Command::ExportBasis {
            config,
            coarse_node,
            opts,
        } => {
            let cfg = load(&config, &opts)?;
            let cfg = cfg
                .expand()
                .into_iter()
                .next()
                .expect("at least one member");
            for p in export_basis(&cfg, coarse_node, &opts.out_dir)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}
