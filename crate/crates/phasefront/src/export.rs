//! File outputs: event logs, functional time series, profiles, run summary
//! and sweep grids. Every file is written atomically (temp file + rename).

use crate::engine::{EventRecord, NuSchedule, Profile, Trajectory};
use crate::functionals::FunctionalSnapshot;
use crate::scenario::Prepared;
use crate::sweep::SweepRow;
use crate::thresholds::ParameterSet;
use serde::Serialize;
use std::fs;
use std::io;
use std::path::Path;

pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn write_events_json(path: &Path, events: &[EventRecord]) -> io::Result<()> {
    let body = serde_json::to_string_pretty(events)?;
    atomic_write(path, body.as_bytes())
}

pub fn write_functional_csv(path: &Path, series: &[FunctionalSnapshot]) -> io::Result<()> {
    let mut out = String::from("t,L,L0,Q,F,max_shock,eta0_attached,zeta0_attached\n");
    for s in series {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.t, s.l, s.l0, s.q, s.f, s.max_shock, s.attached_net[0], s.attached_net[1]
        ));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_profile_csv(path: &Path, profile: &Profile) -> io::Result<()> {
    let mut out = String::from("x,v_left,u_left,a_left,p_left,v_right,u_right,a_right,p_right\n");
    for r in &profile.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.x,
            r.left.v,
            r.left.u,
            r.left.a,
            r.left.pressure(),
            r.right.v,
            r.right.u,
            r.right.a,
            r.right.pressure()
        ));
    }
    atomic_write(path, out.as_bytes())
}

#[derive(Serialize)]
pub struct RunSummary {
    pub case: crate::thresholds::PhaseCase,
    pub reflected: bool,
    pub eta: f64,
    pub zeta: f64,
    pub tv_expression: f64,
    /// None encodes an infinite threshold (both contacts degenerate).
    pub threshold: Option<f64>,
    pub margin: Option<f64>,
    pub params: ParameterSet,
    pub mu: f64,
    pub nu: u32,
    pub schedule: NuSchedule,
    pub event_count: usize,
    pub max_shock: f64,
    pub f_initial: f64,
    pub f_final: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub lbar0: f64,
    pub xi2_lbar0: f64,
    pub attached_ledger_total: f64,
    pub attached_net_final: [f64; 2],
    pub delta_f_violations: usize,
    pub other_violations: usize,
    pub seed: Option<u64>,
}

pub fn summarize(
    prepared: &Prepared,
    params: &ParameterSet,
    schedule: &NuSchedule,
    traj: &Trajectory,
) -> RunSummary {
    let (threshold, margin, tv) = match &prepared.admissibility {
        crate::thresholds::Admissibility::Admissible {
            margin,
            threshold,
            tv,
        } => {
            let th = if threshold.is_finite() {
                Some(*threshold)
            } else {
                None
            };
            let mg = if margin.is_finite() {
                Some(*margin)
            } else {
                None
            };
            (th, mg, *tv)
        }
        crate::thresholds::Admissibility::Rejected { threshold, tv, .. } => {
            (Some(*threshold), None, *tv)
        }
    };
    let delta_f_violations = traj
        .violations
        .iter()
        .filter(|v| v.kind == crate::functionals::ViolationKind::FunctionalIncrease)
        .count();
    RunSummary {
        case: prepared.case,
        reflected: prepared.reflected,
        eta: prepared.scenario.config.eta(),
        zeta: prepared.scenario.config.zeta(),
        tv_expression: tv,
        threshold,
        margin,
        params: *params,
        mu: traj.mu,
        nu: prepared.scenario.nu,
        schedule: *schedule,
        event_count: traj.events.len(),
        max_shock: traj.max_shock,
        f_initial: traj.f1_0,
        f_final: traj.functional.last().map_or(0.0, |s| s.f),
        f_min: traj.f_min,
        f_max: traj.f_max,
        lbar0: traj.lbar0,
        xi2_lbar0: params.xi * params.xi * traj.lbar0,
        attached_ledger_total: traj.attached_ledger_total,
        attached_net_final: traj.attached_net_final,
        delta_f_violations,
        other_violations: traj.violations.len() - delta_f_violations,
        seed: prepared.scenario.seed,
    }
}

pub fn write_summary_json(path: &Path, summary: &RunSummary) -> io::Result<()> {
    let body = serde_json::to_string_pretty(summary)?;
    atomic_write(path, body.as_bytes())
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> io::Result<()> {
    let mut out = String::from("x,y,in_domain,h,kappa_of_h,mu,cmp_region\n");
    for r in rows {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.x,
            r.y,
            u8::from(r.in_domain),
            fmt(r.h),
            fmt(r.kappa_of_h),
            fmt(r.mu),
            u8::from(r.cmp_region),
        ));
    }
    atomic_write(path, out.as_bytes())
}
