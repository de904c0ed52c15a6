use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dimerdyn::qhd::{rate_expansions, rates, time_scales, Frequency, QhdConstants};
use dimerdyn::runner::{run, RunConfig};
use dimerdyn::Error;

#[derive(Parser)]
#[command(name = "dimerdyn", about = "Dimer vibronic dynamics: exact vs moment closure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario described by a JSON config file.
    Run {
        /// Path to the JSON configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the closed-form rate table for one parameter point.
    Rates {
        /// Coupling g.
        #[arg(long)]
        g: f64,
        /// Mean phonon number ⟨a†a⟩ (γ₀ = nbar in the closed forms).
        #[arg(long)]
        nbar: f64,
        /// Detuning δ = Ω − ω.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Vibrational frequency ω.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::FrameInvariant { .. } | Error::LeakageEscalated { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> dimerdyn::Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = RunConfig::from_json(&text)?;
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            let outcome = run(&cfg)?;
            println!("scenario {} -> {}", cfg.scenario.label(), outcome.out_dir.display());
            if let Some(report) = &outcome.report {
                if let Some(t_star) = report.window_t_star {
                    println!("validity window t* = {t_star:.6}");
                }
                for d in &report.deviations {
                    match d.max_abs_dsz_in_window {
                        Some(v) => println!(
                            "convention {:<9} max|dSz| window {v:.6e} overall {:.6e}",
                            d.convention, d.max_abs_dsz_overall
                        ),
                        None => println!(
                            "convention {:<9} max|dSz| overall {:.6e}",
                            d.convention, d.max_abs_dsz_overall
                        ),
                    }
                }
                if let (Some(c), Some(r)) =
                    (report.detection.collapse_time, report.detection.revival_time)
                {
                    println!("collapse t = {c:.4}, revival t = {r:.4}");
                }
                if let Some(p) = report.predicted_revival_time {
                    println!("predicted revival 2π√γ₀/g = {p:.4}");
                }
            }
            Ok(())
        }
        Command::Rates {
            g,
            nbar,
            delta,
            omega,
        } => {
            let c = QhdConstants::new(nbar, nbar * nbar + nbar, delta, g)?;
            let r = rates(&c);
            println!("gamma0        = {nbar}");
            println!("omega1        = {}", r.omega1);
            match r.omega2 {
                Frequency::Real(w) => println!("omega2        = {w}"),
                Frequency::Imaginary(y) => {
                    println!("omega2        = {y}i (sub-quantum regime)")
                }
            }
            println!("t_plus^-1     = {}", r.t_plus_inv);
            println!("t_minus^-1    = {}", r.t_minus_inv);
            let e = rate_expansions(&c);
            println!(
                "series t+^-1  = {} (rel err {:.2e})",
                e.t_plus_inv_series, e.rel_err_plus
            );
            println!(
                "series t-^-1  = {} (rel err {:.2e})",
                e.t_minus_inv_series, e.rel_err_minus
            );
            let ts = time_scales(omega, g, nbar);
            println!("t_I^-1        = {}", ts.t1_inv);
            println!("t_II^-1       = {}", ts.t2_inv);
            println!("t_III^-1      = {}", ts.t3_inv);
            println!("t_IV^-1       = {}", ts.t4_inv);
            if g > 0.0 {
                println!("t_revival     = {}", ts.revival_period());
            }
            Ok(())
        }
    }
}
