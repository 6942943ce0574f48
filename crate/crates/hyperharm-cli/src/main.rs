use clap::{Parser, Subcommand};
use hyperharm_cli::config::ExperimentConfig;
use hyperharm_cli::report;
use hyperharm_cli::selftest;
use hyperharm_cli::sweep::{fit_remainder, run_sweep, FitOutcome};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VERDICT: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

#[derive(Parser)]
#[command(
    name = "hyperharm",
    about = "Pairing experiments on the hyperbolic plane and its cyclic quotients"
)]
struct Cli {
    /// Worker threads for the pair quadratures (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Relative quadrature tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the asymptotic sweep and the remainder fit.
    Sweep {
        /// TOML experiment configuration; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for rows.csv, report.txt and constants.txt.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Print the default configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Measure the normalization constants and write the record.
    Calibrate {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run every module invariant suite.
    Selftest {
        /// Seed for the sampled audits.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Small-r cross-checks between independent routes.
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                hyperharm::Error::NonConvergence { .. } => EXIT_NUMERIC,
                _ => EXIT_VERDICT,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> hyperharm::Result<u8> {
    match cli.command {
        Command::Sweep { config, out, print_config } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        hyperharm::Error::Domain(format!("cannot read {}: {e}", path.display()))
                    })?;
                    ExperimentConfig::from_toml(&text)?
                }
                None => ExperimentConfig::default(),
            };
            if let Some(tol) = cli.tol {
                cfg.quadrature.rel_tol = tol;
            }
            if print_config {
                print!("{}", cfg.to_toml());
                return Ok(EXIT_OK);
            }
            let rows = run_sweep(&cfg)?;
            let fit = if rows.len() >= 4 {
                Some(fit_remainder(&rows)?)
            } else {
                None
            };
            report::emit(&out, &cfg, &rows, fit.as_ref(), None).map_err(|e| {
                hyperharm::Error::Domain(format!("cannot write outputs: {e}"))
            })?;
            for row in &rows {
                println!(
                    "r = {:>10.4}  |ratio - 1| = {:.6e}  (unc {:.1e})",
                    row.r, row.ratio_deviation, row.ratio_uncertainty
                );
            }
            match &fit {
                Some(FitOutcome::Fitted { slope, pass, .. }) => {
                    println!("slope {slope:.4} -> {}", if *pass { "PASS" } else { "FAIL" });
                    Ok(if *pass { EXIT_OK } else { EXIT_VERDICT })
                }
                Some(FitOutcome::NoiseFloor { floor }) => {
                    println!("all deviations below noise floor {floor:.2e} (vacuous pass)");
                    Ok(EXIT_OK)
                }
                Some(FitOutcome::Insufficient { usable }) => {
                    println!("only {usable} usable points; no fit");
                    Ok(EXIT_OK)
                }
                None => {
                    println!("fewer than 4 rows; fit skipped");
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Calibrate { out } => {
            let record = hyperharm::constants::calibrate()?;
            std::fs::create_dir_all(&out).ok();
            let text = report::constants_text(Some(&record));
            std::fs::write(out.join("constants.txt"), &text).map_err(|e| {
                hyperharm::Error::Domain(format!("cannot write constants: {e}"))
            })?;
            print!("{text}");
            let ok = (record.kernel_exponent - 2.0).abs() <= 1e-10
                && (record.haar_exponent - 1.0).abs() <= 1e-6
                && record.factorization_residuals.iter().all(|r| *r <= 1e-8)
                && record.hopf_residual <= 1e-6;
            Ok(if ok { EXIT_OK } else { EXIT_VERDICT })
        }
        Command::Selftest { seed } => {
            let checks = selftest::all_checks(seed)?;
            let mut ok = true;
            for c in &checks {
                println!("[{}] {} -- {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.pass;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VERDICT })
        }
        Command::Oracle => {
            let checks = selftest::oracle_checks()?;
            let mut ok = true;
            for c in &checks {
                println!("[{}] {} -- {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.pass;
            }
            Ok(if ok { EXIT_OK } else { EXIT_VERDICT })
        }
    }
}
