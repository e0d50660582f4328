use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use phasefront::engine::{initial_strength, run_with_schedule, RunOptions};
use phasefront::export;
use phasefront::model::c0;
use phasefront::scenario::{parse, prepare};
use phasefront::sweep::sweep;
use phasefront::thresholds::{choose_parameters, mu_factor, Admissibility, PhaseCase};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Front tracking for the two-interface isothermal phase-transition model.
#[derive(Parser)]
#[command(name = "phasefront", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scenario: case, admissibility and the parameter set it gets.
    Check { file: PathBuf },
    /// Run a scenario and export the event log, functional series, profiles
    /// and summary.
    Run {
        file: PathBuf,
        /// Output directory (created if missing).
        #[arg(short, long)]
        out: PathBuf,
        /// Override the accuracy index of the scenario.
        #[arg(long)]
        nu: Option<u32>,
        /// Override the time horizon.
        #[arg(long = "t")]
        t_end: Option<f64>,
    },
    /// Sweep the severity, threshold and contraction factor over a grid.
    Sweep {
        /// bubble | increasing
        #[arg(long = "case")]
        case: String,
        /// Grid resolution per axis.
        #[arg(long)]
        res: usize,
        #[arg(short, long)]
        out: PathBuf,
        /// Initial strength assumed when choosing parameters per cell.
        #[arg(long, default_value_t = 0.0)]
        bar_l0: f64,
    },
}

fn verbose() -> bool {
    std::env::var("PHASEFRONT_LOG").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn fmt_threshold(t: f64) -> String {
    if t.is_finite() {
        format!("{t:.6}")
    } else {
        "+inf".to_string()
    }
}

fn cmd_check(file: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let scenario = parse(&text)?;
    let prepared = match prepare(&scenario) {
        Ok(p) => p,
        Err(e) => {
            println!("verdict: REJECTED ({e})");
            return Ok(ExitCode::from(2));
        }
    };
    let case_name = match prepared.case {
        PhaseCase::Bubble => "bubble",
        PhaseCase::IncreasingPressure => "increasing-pressure",
    };
    println!(
        "case: {case_name}{}",
        if prepared.reflected {
            " (reflected from decreasing-pressure)"
        } else {
            ""
        }
    );
    println!(
        "eta = {:.6}, zeta = {:.6}  ->  (|eta|, |zeta|) = ({:.6}, {:.6})",
        prepared.scenario.config.eta(),
        prepared.scenario.config.zeta(),
        prepared.x,
        prepared.y
    );
    match &prepared.admissibility {
        Admissibility::Admissible {
            margin,
            threshold,
            tv,
        } => {
            println!("TV(log p0) + TV(u0)/min a = {tv:.6}");
            println!("threshold kappa(H) = {}", fmt_threshold(*threshold));
            println!(
                "verdict: ADMISSIBLE (margin {})",
                if margin.is_finite() {
                    format!("{margin:.6}")
                } else {
                    "+inf".into()
                }
            );
        }
        Admissibility::Rejected {
            reason,
            threshold,
            tv,
        } => {
            println!("TV(log p0) + TV(u0)/min a = {tv:.6}");
            println!("threshold kappa(H) = {}", fmt_threshold(*threshold));
            println!("verdict: REJECTED ({reason})");
            return Ok(ExitCode::from(2));
        }
    }
    let bar_l0 = initial_strength(&prepared.scenario)?;
    let params = choose_parameters(prepared.case, prepared.x, prepared.y, bar_l0)?;
    println!("initial moving strength Lbar(0) = {bar_l0:.6}");
    println!(
        "parameters: m0 = {:.6}, xi = {:.6}, rho = {:.6}, sigma0 = {}",
        params.m0, params.xi, params.rho, prepared.scenario.sigma0
    );
    println!(
        "K weights: eta (l, m, r) = ({:.6}, {:.6}, {:.6}), zeta (l, m, r) = ({:.6}, {:.6}, {:.6})",
        params.k_eta_l,
        params.k_eta_m,
        params.k_eta_r,
        params.k_zeta_l,
        params.k_zeta_m,
        params.k_zeta_r
    );
    let mu = mu_factor(
        prepared.case,
        &params,
        prepared.x,
        prepared.y,
        c0(params.rho),
    );
    println!("contraction factor mu = {mu:.6}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(file: &Path, out: &Path, nu: Option<u32>, t_end: Option<f64>) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let mut scenario = parse(&text)?;
    if let Some(nu) = nu {
        if nu == 0 {
            bail!("nu must be at least 1");
        }
        scenario.nu = nu;
    }
    if let Some(t) = t_end {
        scenario.t_end = t;
    }
    let prepared = prepare(&scenario)?;
    if let Admissibility::Rejected { reason, .. } = &prepared.admissibility {
        bail!("scenario rejected: {reason}");
    }
    let bar_l0 = initial_strength(&prepared.scenario)?;
    let params = choose_parameters(prepared.case, prepared.x, prepared.y, bar_l0)?;
    if verbose() {
        eprintln!(
            "running nu = {} with m0 = {:.4}, xi = {:.4}, rho = {:.4}",
            prepared.scenario.nu, params.m0, params.xi, params.rho
        );
    }
    let (traj, schedule, final_params) =
        run_with_schedule(&prepared, &params, &RunOptions::default())?;
    if verbose() {
        eprintln!(
            "{} events, F {:.6} -> {:.6}, absorbed {:.3e}",
            traj.events.len(),
            traj.f1_0,
            traj.functional.last().map_or(0.0, |s| s.f),
            traj.attached_ledger_total
        );
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    export::write_events_json(&out.join("events.json"), &traj.events)?;
    export::write_functional_csv(&out.join("functional.csv"), &traj.functional)?;
    for profile in &traj.profiles {
        export::write_profile_csv(&out.join(format!("profile_{}.csv", profile.t)), profile)?;
    }
    export::write_profile_csv(&out.join("profile_final.csv"), &traj.final_profile)?;
    let summary = export::summarize(&prepared, &final_params, &schedule, &traj);
    export::write_summary_json(&out.join("summary.json"), &summary)?;
    println!(
        "run complete: {} events, {} violations, outputs in {}",
        traj.events.len(),
        traj.violations.len(),
        out.display()
    );
    if traj.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_sweep(case: &str, res: usize, out: &Path, bar_l0: f64) -> Result<ExitCode> {
    let case = match case {
        "bubble" => PhaseCase::Bubble,
        "increasing" => PhaseCase::IncreasingPressure,
        other => bail!("unknown case '{other}' (expected bubble or increasing)"),
    };
    if res == 0 {
        bail!("resolution must be positive");
    }
    let rows = sweep(case, res, bar_l0);
    export::write_sweep_csv(out, &rows)?;
    let inside = rows.iter().filter(|r| r.in_domain).count();
    println!(
        "sweep complete: {} cells, {} inside the domain, written to {}",
        rows.len(),
        inside,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Check { file } => cmd_check(file),
        Cmd::Run {
            file,
            out,
            nu,
            t_end,
        } => cmd_run(file, out, *nu, *t_end),
        Cmd::Sweep {
            case,
            res,
            out,
            bar_l0,
        } => cmd_sweep(case, *res, out, *bar_l0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
