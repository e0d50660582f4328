//! Stability thresholds and parameter selection.
//!
//! This module carries all closed-form machinery around the two-interface
//! configurations: the contact strengths `eta`, `zeta`, the case
//! classification, the admissibility threshold `kappa(H)` on the BV size of
//! the data, the severity functions `H_b` (bubble) and `H_c`
//! (increasing pressure) with its feasibility domain, the selection of the
//! functional parameters `(m0, xi, K weights, rho)` for each case, and the
//! per-generation contraction factor `mu`.

use crate::model::{c, c0, contact_strength, State};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("severity evaluated outside its domain at (|eta|, |zeta|) = ({x}, {y})")]
    OutsideDomain { x: f64, y: f64 },
    #[error(
        "configuration is not a bubble or increasing-pressure case (eta = {eta}, zeta = {zeta})"
    )]
    UnsupportedCase { eta: f64, zeta: f64 },
    #[error("no parameter set exists: {reason}")]
    Infeasible { reason: String },
    #[error("parameter chooser produced a set failing its own checks: {0}")]
    ChooserBug(String),
}

/// The two supported sign configurations of the interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseCase {
    Bubble,
    IncreasingPressure,
}

/// Raw classification of an `(eta, zeta)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    Bubble,
    IncreasingPressure,
    /// Mirror image of the increasing case; handled by spatial reflection.
    DecreasingPressure,
    /// Configurations this crate does not cover (middle phase below both
    /// neighbours, or a single monotone interface).
    Unsupported,
}

pub fn classify(eta: f64, zeta: f64) -> CaseTag {
    if eta >= 0.0 && zeta <= 0.0 {
        CaseTag::Bubble
    } else if eta > 0.0 && zeta > 0.0 {
        CaseTag::IncreasingPressure
    } else if eta < 0.0 && zeta < 0.0 {
        CaseTag::DecreasingPressure
    } else {
        CaseTag::Unsupported
    }
}

/// The three sound coefficients and the interface positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub a_l: f64,
    pub a_m: f64,
    pub a_r: f64,
    pub x_a: f64,
    pub x_b: f64,
}

impl PhaseConfig {
    pub fn eta(&self) -> f64 {
        contact_strength(self.a_l, self.a_m)
    }

    pub fn zeta(&self) -> f64 {
        contact_strength(self.a_m, self.a_r)
    }

    pub fn min_a(&self) -> f64 {
        self.a_l.min(self.a_m).min(self.a_r)
    }

    pub fn tag(&self) -> CaseTag {
        classify(self.eta(), self.zeta())
    }
}

/// `kappa(r) = 2/(1+r) log(1 + (2/r)(1 + sqrt(1+r)))`: the admissibility
/// threshold on the BV size of the data as a function of the configuration
/// severity. Strictly decreasing, divergent at 0+ and vanishing at infinity.
pub fn kappa(r: f64) -> f64 {
    if r <= 0.0 {
        return f64::INFINITY;
    }
    2.0 / (1.0 + r) * (1.0 + 2.0 / r * (1.0 + (1.0 + r).sqrt())).ln()
}

/// Severity of a bubble configuration, defined on `[0,2) x [0,2)`:
/// `4/(4-xy) max{ x(2+y)/(2-y), y(2+x)/(2-x) }`.
pub fn h_bubble(x: f64, y: f64) -> f64 {
    4.0 / (4.0 - x * y) * f64::max(x * (2.0 + y) / (2.0 - y), y * (2.0 + x) / (2.0 - x))
}

/// Roots of the two quadratics that bound `xi - 1` in the increasing case,
/// plus the feasibility verdict for the pair `(x, y) = (|eta|, |zeta|)`.
#[derive(Clone, Copy, Debug)]
pub struct IncreasingRoots {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
    pub feasible: bool,
}

impl IncreasingRoots {
    /// Open window available for `xi - 1`.
    pub fn window(&self, x: f64, y: f64) -> (f64, f64) {
        (
            f64::max(self.z1, self.z3),
            f64::min(self.z2, f64::min(self.z4, 4.0 / (x * y) - 1.0)),
        )
    }
}

/// Stable roots of `a z^2 + b z + c = 0` for `a, c > 0 > b`, returned in
/// increasing order.
fn quadratic_roots(a: f64, b: f64, cc: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return None;
    }
    let q = -0.5 * (b - disc.sqrt());
    Some((cc / q, q / a))
}

/// Coefficients and roots of the parameter-window quadratics of the
/// increasing-pressure case. Returns `feasible = false` whenever the sign
/// conditions fail, a discriminant closes, or the window for `xi` is empty.
pub fn quad_roots_c(x: f64, y: f64) -> IncreasingRoots {
    let infeasible = IncreasingRoots {
        z1: f64::NAN,
        z2: f64::NAN,
        z3: f64::NAN,
        z4: f64::NAN,
        feasible: false,
    };
    if !(x > 0.0 && x < 2.0 && y > 0.0 && y < 2.0) {
        return infeasible;
    }
    let a = x * y * (2.0 - x) / 4.0;
    let b = y * (x + 1.0) - (2.0 - x) * (1.0 - x * y / 4.0);
    let cc = x * y;
    let d = x * y / 4.0;
    let e = x * y * (4.0 - y) / 8.0 - 1.0;
    let f = (1.0 + y / 2.0) * x + y * (1.0 - x * y / 4.0);

    // sign condition on the first quadratic
    if !(b + x * y * (2.0 - x).sqrt() < 0.0) {
        return infeasible;
    }
    // discriminant condition on the second
    if !(e * e - 4.0 * d * f > 0.0) {
        return infeasible;
    }
    let (z1, z2) = match quadratic_roots(a, b, cc) {
        Some(r) => r,
        None => return infeasible,
    };
    let (z3, z4) = match quadratic_roots(d, e, f) {
        Some(r) => r,
        None => return infeasible,
    };
    let roots = IncreasingRoots {
        z1,
        z2,
        z3,
        z4,
        feasible: true,
    };
    let (lo, hi) = roots.window(x, y);
    if !(lo < hi) {
        return infeasible;
    }
    roots
}

pub fn in_domain_c(x: f64, y: f64) -> bool {
    quad_roots_c(x, y).feasible
}

/// Severity of an increasing-pressure configuration: `max{z1, z3}`. Only
/// defined inside the feasibility domain.
pub fn h_increasing(x: f64, y: f64) -> Result<f64, ThresholdError> {
    let roots = quad_roots_c(x, y);
    if !roots.feasible {
        return Err(ThresholdError::OutsideDomain { x, y });
    }
    Ok(f64::max(roots.z1, roots.z3))
}

/// Severity of the case at `(x, y)`; infinite threshold is signalled by
/// returning 0 severity only at the origin of the bubble case.
pub fn severity(case: PhaseCase, x: f64, y: f64) -> Result<f64, ThresholdError> {
    match case {
        PhaseCase::Bubble => Ok(h_bubble(x, y)),
        PhaseCase::IncreasingPressure => h_increasing(x, y),
    }
}

/// Admissibility threshold `kappa(H(x, y))`; `+inf` when both contact
/// strengths vanish.
pub fn admissibility_threshold(case: PhaseCase, x: f64, y: f64) -> Result<f64, ThresholdError> {
    if x == 0.0 && y == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(kappa(severity(case, x, y)?))
}

/// BV expression of a piecewise-constant profile:
/// `TV(log p) + TV(u) / min a` over consecutive states.
pub fn tv_expression(states: &[State]) -> f64 {
    if states.len() < 2 {
        return 0.0;
    }
    let min_a = states.iter().map(|s| s.a).fold(f64::INFINITY, f64::min);
    let mut tv_p = 0.0;
    let mut tv_u = 0.0;
    for w in states.windows(2) {
        tv_p += (w[1].pressure().ln() - w[0].pressure().ln()).abs();
        tv_u += (w[1].u - w[0].u).abs();
    }
    tv_p + tv_u / min_a
}

/// Verdict of the large-data admissibility check.
#[derive(Clone, Debug, Serialize)]
pub enum Admissibility {
    Admissible {
        margin: f64,
        threshold: f64,
        tv: f64,
    },
    Rejected {
        reason: String,
        threshold: f64,
        tv: f64,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// Compare the BV expression of the initial profile against the threshold of
/// the case at `(x, y) = (|eta|, |zeta|)`.
pub fn admissible(
    case: PhaseCase,
    x: f64,
    y: f64,
    tv: f64,
) -> Result<Admissibility, ThresholdError> {
    let threshold = admissibility_threshold(case, x, y)?;
    if tv < threshold {
        Ok(Admissibility::Admissible {
            margin: threshold - tv,
            threshold,
            tv,
        })
    } else {
        Ok(Admissibility::Rejected {
            reason: format!(
                "BV smallness condition fails: TV(log p0) + TV(u0)/min a = {tv:.6} >= kappa(H) = {threshold:.6}"
            ),
            threshold,
            tv,
        })
    }
}

/// `w(m) = 2 / (cosh m - 1)`: strictly decreasing; the largest severity a
/// shock-size cap `m` can stabilize.
pub fn w_of(m: f64) -> f64 {
    2.0 / (m.cosh() - 1.0)
}

/// `z(m) = 2 m c(m)`: strictly increasing; the largest BV expression a
/// shock-size cap `m` can absorb.
pub fn z_of(m: f64) -> f64 {
    2.0 * m * c(m)
}

/// Closed-form inverse of `w`: `arccosh(1 + 2/r)`.
pub fn w_inv(r: f64) -> f64 {
    (1.0 + 2.0 / r).acosh()
}

/// Inverse of `z` by bisection.
pub fn z_inv(target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while z_of(hi) < target {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if z_of(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The weights and caps driving the Glimm-type functional of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    /// Cap on the size of any shock.
    pub m0: f64,
    /// Weight of shocks in the strength functional, `> 1`.
    pub xi: f64,
    pub k_eta_l: f64,
    pub k_zeta_l: f64,
    pub k_eta_m: f64,
    pub k_zeta_m: f64,
    pub k_eta_r: f64,
    pub k_zeta_r: f64,
    /// Threshold separating the accurate from the simplified composite solver.
    pub rho: f64,
    /// Rarefaction splitting cap.
    pub sigma: f64,
}

/// One evaluated inequality of a case's condition list: `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

fn cond(name: &'static str, lhs: f64, rhs: f64) -> ConditionReport {
    ConditionReport {
        name,
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-14 * rhs.abs().max(1.0),
    }
}

/// Every numbered inequality the bubble case needs, evaluated literally.
pub fn check_bubble_conditions(p: &ParameterSet, x: f64, y: f64) -> Vec<ConditionReport> {
    let co = c0(p.rho);
    let xi = p.xi;
    vec![
        cond("xi_at_least_one", 1.0, xi),
        cond("xi_shock_cap", xi * c(p.m0), 1.0),
        cond("k_eta_m_floor", 1.0, p.k_eta_m),
        cond("k_zeta_m_floor", 1.0, p.k_zeta_m),
        cond("k_zeta_r_floor", (xi - 1.0) / 2.0, p.k_zeta_r),
        cond("k_eta_l_floor", (xi - 1.0) / 2.0, p.k_eta_l),
        cond("k_eta_outer", p.k_eta_m, p.k_eta_r),
        cond("k_zeta_outer", p.k_zeta_m, p.k_zeta_l),
        cond("cone_eta", 1.0 + p.k_eta_m * x / 2.0, p.k_zeta_m),
        cond("cone_zeta", 1.0 + p.k_zeta_m * y / 2.0, p.k_eta_m),
        cond(
            "rho_amplification",
            co * (xi + 1.0),
            2.0 * xi * f64::min(p.k_zeta_m, p.k_eta_m),
        ),
        cond("same_family_m_eta", p.k_eta_m * x, xi - 1.0),
        cond("same_family_m_zeta", p.k_zeta_m * y, xi - 1.0),
        cond("same_family_r", p.k_eta_r * x + p.k_zeta_r * y, xi - 1.0),
        cond("same_family_l", p.k_eta_l * x + p.k_zeta_l * y, xi - 1.0),
    ]
}

/// Every numbered inequality the increasing-pressure case needs.
pub fn check_increasing_conditions(p: &ParameterSet, x: f64, y: f64) -> Vec<ConditionReport> {
    let co = c0(p.rho);
    let xi = p.xi;
    vec![
        cond("xi_at_least_one", 1.0, xi),
        cond("xi_shock_cap", xi * c(p.m0), 1.0),
        cond("k_eta_m_floor", 1.0, p.k_eta_m),
        cond("same_family_m_eta", p.k_eta_m * x, xi - 1.0),
        cond(
            "transmit_eta_rarefaction",
            ((xi - 1.0) / 2.0 - p.k_eta_l) * x + (p.k_zeta_m - p.k_zeta_l) * y,
            0.0,
        ),
        cond(
            "transmit_zeta_rarefaction",
            (1.0 - p.k_zeta_r) * y + (p.k_eta_m * (1.0 + y / 2.0) - p.k_eta_r) * x,
            0.0,
        ),
        cond(
            "cone_zeta_m",
            (xi - 1.0) / 2.0 + xi * p.k_eta_m * x / 2.0,
            p.k_zeta_m,
        ),
        cond("cone_eta_m", 1.0 + p.k_zeta_m * y / 2.0, p.k_eta_m),
        cond(
            "rho_zeta_side",
            ((xi + 1.0) * co / 2.0 - xi * p.k_zeta_r) * y
                + xi * (p.k_eta_m * (1.0 + co * y / 2.0) - p.k_eta_r) * x,
            0.0,
        ),
        cond("rho_eta_side", (xi + 1.0) * co / 2.0, xi * p.k_eta_m),
        cond("same_family_m_zeta", p.k_zeta_m * y, xi - 1.0),
        cond("same_family_r", p.k_eta_r * x + p.k_zeta_r * y, xi - 1.0),
        cond("same_family_l", p.k_eta_l * x + p.k_zeta_l * y, xi - 1.0),
    ]
}

pub fn check_case_conditions(
    case: PhaseCase,
    p: &ParameterSet,
    x: f64,
    y: f64,
) -> Vec<ConditionReport> {
    match case {
        PhaseCase::Bubble => check_bubble_conditions(p, x, y),
        PhaseCase::IncreasingPressure => check_increasing_conditions(p, x, y),
    }
}

pub fn conditions_ok(reports: &[ConditionReport]) -> bool {
    reports.iter().all(|r| r.ok)
}

/// Per-generation contraction factor of the case: the displayed maximum over
/// ratio terms. Every denominator is positive for parameter sets passing the
/// case's condition list.
pub fn mu_factor(case: PhaseCase, p: &ParameterSet, x: f64, y: f64, co: f64) -> f64 {
    mu_terms(case, p, x, y, co)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn mu_terms(case: PhaseCase, p: &ParameterSet, x: f64, y: f64, co: f64) -> Vec<f64> {
    let xi = p.xi;
    match case {
        PhaseCase::Bubble => vec![
            (1.0 + p.k_zeta_m * y) / (2.0 * p.k_eta_m - 1.0),
            (1.0 + p.k_eta_m * x) / (2.0 * p.k_zeta_m - 1.0),
            xi / (1.0 + 2.0 * p.k_eta_l),
            xi / (1.0 + 2.0 * p.k_zeta_r),
            (1.0 + p.k_eta_m * x) / xi,
            (1.0 + p.k_zeta_m * y) / xi,
            (1.0 + p.k_eta_l * x + p.k_zeta_l * y) / xi,
            (1.0 + p.k_eta_r * x + p.k_zeta_r * y) / xi,
            co / (xi * (2.0 * p.k_eta_m - co)),
            co / (xi * (2.0 * p.k_zeta_m - co)),
        ],
        PhaseCase::IncreasingPressure => vec![
            (1.0 + p.k_zeta_m * y) / (2.0 * p.k_eta_m - 1.0),
            xi * (1.0 + p.k_eta_m * x) / (1.0 + 2.0 * p.k_zeta_m),
            (1.0 + p.k_eta_m * x) / xi,
            (1.0 + p.k_eta_l * (x + y)) / xi,
            (1.0 + p.k_eta_r * (x + y)) / xi,
            xi * x / 2.0 / ((p.k_eta_l - 0.5) * x + (p.k_zeta_l - p.k_zeta_m) * y),
            y / 2.0 / ((p.k_zeta_r - 0.5) * y + (p.k_eta_r - p.k_eta_m * (1.0 + y / 2.0)) * x),
            co * y
                / 2.0
                / (xi * (p.k_zeta_r - co / 2.0) * y
                    + xi * (p.k_eta_r - p.k_eta_m * (1.0 + co * y / 2.0)) * x),
            co / (xi * (2.0 * p.k_eta_m - co)),
        ],
    }
}

/// Largest member of the decreasing sequence `0.1 * 2^-k` that keeps the
/// case's amplification conditions strict.
fn pick_rho<F: Fn(f64) -> bool>(ok: F) -> Result<f64, ThresholdError> {
    let mut rho = 0.1;
    for _ in 0..200 {
        if ok(rho) {
            return Ok(rho);
        }
        rho *= 0.5;
    }
    Err(ThresholdError::Infeasible {
        reason: "no rho in the geometric sequence satisfies the amplification condition".into(),
    })
}

/// Shock-size cap window: large enough to absorb the initial strength, small
/// enough that the severity fits under `w(m0)`. Midpoint of the window.
fn pick_m0(h_val: f64, bar_l0: f64) -> Result<f64, ThresholdError> {
    let m_lo = z_inv(2.0 * bar_l0);
    let m_hi = if h_val > 0.0 {
        w_inv(h_val)
    } else {
        f64::INFINITY
    };
    if m_lo >= m_hi {
        return Err(ThresholdError::Infeasible {
            reason: format!(
                "initial strength {bar_l0:.6} needs m0 >= {m_lo:.6} but severity {h_val:.6} caps m0 < {m_hi:.6}"
            ),
        });
    }
    if m_hi.is_finite() {
        Ok(0.5 * (m_lo + m_hi))
    } else if m_lo == 0.0 {
        Ok(1.0)
    } else {
        Ok(1.25 * m_lo)
    }
}

/// Choose every parameter of the bubble case at `(x, y) = (|eta|, |zeta|)`
/// given the total initial moving strength. Windows are taken at midpoints
/// and the cone vertex is offset by 1e-3 so that every inequality is strict;
/// the full condition list is re-checked before returning.
pub fn choose_parameters_bubble(
    x: f64,
    y: f64,
    bar_l0: f64,
) -> Result<ParameterSet, ThresholdError> {
    if !(0.0..2.0).contains(&x) || !(0.0..2.0).contains(&y) {
        return Err(ThresholdError::OutsideDomain { x, y });
    }
    let hb = h_bubble(x, y);
    let m0 = pick_m0(hb, bar_l0)?;
    let xi_hi = 1.0 / c(m0);
    let xi_lo = 1.0 + hb;
    if !(xi_lo < xi_hi) {
        return Err(ThresholdError::Infeasible {
            reason: format!("empty xi window ({xi_lo}, {xi_hi})"),
        });
    }
    // the degenerate configuration admits the plain defaults
    let xi = if x == 0.0 && y == 0.0 && xi_hi > 2.0 {
        2.0
    } else {
        0.5 * (xi_lo + xi_hi)
    };

    let vertex_eta = 2.0 * (2.0 + y) / (4.0 - x * y);
    let k_eta_m_hi = if x > 0.0 {
        (xi - 1.0) * (1.0 - y / 2.0) / x
    } else {
        f64::INFINITY
    };
    let offset = 1e-3;
    let k_eta_m = if k_eta_m_hi.is_finite() {
        vertex_eta + f64::min(offset, 0.25 * (k_eta_m_hi - vertex_eta))
    } else {
        vertex_eta + offset
    };

    let k_zeta_m_lo = 1.0 + k_eta_m * x / 2.0;
    let k_zeta_m_hi = if y > 0.0 {
        f64::min(2.0 * (k_eta_m - 1.0) / y, (xi - 1.0) * (1.0 - x / 2.0) / y)
    } else {
        f64::INFINITY
    };
    let k_zeta_m = if k_zeta_m_hi.is_finite() {
        0.5 * (k_zeta_m_lo + k_zeta_m_hi)
    } else {
        k_zeta_m_lo + 0.5
    };

    let k_eta_r = k_eta_m;
    let k_zeta_l = k_zeta_m;

    let k_zeta_r_lo = (xi - 1.0) / 2.0;
    let k_zeta_r_hi = if y > 0.0 {
        ((xi - 1.0) - k_eta_m * x) / y
    } else {
        f64::INFINITY
    };
    let k_zeta_r = if k_zeta_r_hi.is_finite() {
        0.5 * (k_zeta_r_lo + k_zeta_r_hi)
    } else {
        k_zeta_r_lo + 0.5
    };

    let k_eta_l_lo = (xi - 1.0) / 2.0;
    let k_eta_l_hi = if x > 0.0 {
        ((xi - 1.0) - k_zeta_m * y) / x
    } else {
        f64::INFINITY
    };
    let k_eta_l = if k_eta_l_hi.is_finite() {
        0.5 * (k_eta_l_lo + k_eta_l_hi)
    } else {
        k_eta_l_lo + 0.5
    };

    let k_min = f64::min(k_zeta_m, k_eta_m);
    let rho = pick_rho(|r| c0(r) * (xi + 1.0) < 2.0 * xi * k_min)?;

    let params = ParameterSet {
        m0,
        xi,
        k_eta_l,
        k_zeta_l,
        k_eta_m,
        k_zeta_m,
        k_eta_r,
        k_zeta_r,
        rho,
        sigma: 0.1,
    };
    let reports = check_bubble_conditions(&params, x, y);
    if !conditions_ok(&reports) {
        let bad: Vec<_> = reports.iter().filter(|r| !r.ok).map(|r| r.name).collect();
        return Err(ThresholdError::ChooserBug(format!("{bad:?}")));
    }
    if bar_l0 > params.m0 * c(params.m0) {
        return Err(ThresholdError::ChooserBug("initial strength bound".into()));
    }
    Ok(params)
}

/// Choose the parameters of the increasing-pressure case.
///
/// `xi` is scanned deterministically over its window and the first candidate
/// whose induced weights pass the full condition list with contraction factor
/// below one is returned.
pub fn choose_parameters_increasing(
    x: f64,
    y: f64,
    bar_l0: f64,
) -> Result<ParameterSet, ThresholdError> {
    let roots = quad_roots_c(x, y);
    if !roots.feasible {
        return Err(ThresholdError::OutsideDomain { x, y });
    }
    let hc = f64::max(roots.z1, roots.z3);
    let m0 = pick_m0(hc, bar_l0)?;
    let (z_lo, z_hi_roots) = roots.window(x, y);
    let z_hi = f64::min(z_hi_roots, 1.0 / c(m0) - 1.0);
    if !(z_lo < z_hi) {
        return Err(ThresholdError::Infeasible {
            reason: format!("empty xi window ({}, {})", 1.0 + z_lo, 1.0 + z_hi),
        });
    }
    // midpoint first, then sweep the window
    let mut positions = vec![0.5];
    for i in 1..16 {
        positions.push(0.5 + i as f64 / 34.0);
        positions.push(0.5 - i as f64 / 34.0);
    }
    let mut last_reason = String::from("no xi candidate admitted a full parameter set");
    for t in positions {
        let xi = 1.0 + z_lo + t * (z_hi - z_lo);
        match try_increasing_candidate(x, y, xi, m0) {
            Ok(params) => {
                if bar_l0 > params.m0 * c(params.m0) {
                    return Err(ThresholdError::ChooserBug("initial strength bound".into()));
                }
                return Ok(params);
            }
            Err(reason) => last_reason = reason,
        }
    }
    Err(ThresholdError::Infeasible {
        reason: last_reason,
    })
}

fn try_increasing_candidate(x: f64, y: f64, xi: f64, m0: f64) -> Result<ParameterSet, String> {
    let denom = 1.0 - xi * x * y / 4.0;
    if denom <= 0.0 {
        return Err("xi exceeds 4/(xy)".into());
    }
    let vertex_eta = (1.0 + (xi - 1.0) * y / 4.0) / denom;
    let k_eta_m_hi = (xi - 1.0 - y) / ((1.0 + y / 2.0) * x);
    if !(vertex_eta < k_eta_m_hi) {
        return Err(format!("empty K_eta_m window at xi = {xi}"));
    }
    let k_eta_m = vertex_eta + f64::min(1e-3, 0.25 * (k_eta_m_hi - vertex_eta));

    let k_zeta_m_lo = (xi - 1.0) / 2.0 + xi * k_eta_m * x / 2.0;
    let k_zeta_m_hi = f64::min(2.0 * (k_eta_m - 1.0) / y, (xi - 1.0) * (1.0 - x / 2.0) / y);
    if !(k_zeta_m_lo < k_zeta_m_hi) {
        return Err(format!("empty K_zeta_m window at xi = {xi}"));
    }
    // stay low in the window: eases the outer-weight windows below
    let k_zeta_m = k_zeta_m_lo + 0.25 * (k_zeta_m_hi - k_zeta_m_lo);

    let s = x + y;
    let k_l_lo = ((xi - 1.0) * x / 2.0 + k_zeta_m * y) / s;
    let k_r_lo = (k_eta_m * (1.0 + y / 2.0) * x + y) / s;
    let k_hi = (xi - 1.0) / s;
    if !(k_l_lo < k_hi) || !(k_r_lo < k_hi) {
        return Err(format!("empty outer-weight window at xi = {xi}"));
    }
    // the left weight additionally needs an excess of x/(x+y) over its floor
    // for the contraction factor to close below one
    let k_l_target = k_l_lo + x / s;
    let k_eta_l = if k_l_target < k_hi {
        0.5 * (k_l_target + k_hi)
    } else {
        0.5 * (k_l_lo + k_hi)
    };
    let k_r = 0.5 * (k_r_lo + k_hi);

    let mut params = ParameterSet {
        m0,
        xi,
        k_eta_l,
        k_zeta_l: k_eta_l,
        k_eta_m,
        k_zeta_m,
        k_eta_r: k_r,
        k_zeta_r: k_r,
        rho: 0.1,
        sigma: 0.1,
    };
    let rho = pick_rho(|r| {
        let co = c0(r);
        let lhs = ((xi + 1.0) * co / 2.0 - xi * params.k_zeta_r) * y
            + xi * (params.k_eta_m * (1.0 + co * y / 2.0) - params.k_eta_r) * x;
        let eta_side = (xi + 1.0) * co / 2.0 < xi * params.k_eta_m;
        let mut probe = params;
        probe.rho = r;
        lhs < 0.0 && eta_side && mu_factor(PhaseCase::IncreasingPressure, &probe, x, y, co) < 1.0
    })
    .map_err(|e| e.to_string())?;
    params.rho = rho;

    let reports = check_increasing_conditions(&params, x, y);
    if !conditions_ok(&reports) {
        let bad: Vec<_> = reports.iter().filter(|r| !r.ok).map(|r| r.name).collect();
        return Err(format!("conditions failed at xi = {xi}: {bad:?}"));
    }
    let mu = mu_factor(PhaseCase::IncreasingPressure, &params, x, y, c0(params.rho));
    if !(mu < 1.0) {
        return Err(format!("mu = {mu} at xi = {xi}"));
    }
    Ok(params)
}

pub fn choose_parameters(
    case: PhaseCase,
    x: f64,
    y: f64,
    bar_l0: f64,
) -> Result<ParameterSet, ThresholdError> {
    match case {
        PhaseCase::Bubble => choose_parameters_bubble(x, y, bar_l0),
        PhaseCase::IncreasingPressure => choose_parameters_increasing(x, y, bar_l0),
    }
}

/// Largest relative mismatch of `z(w^-1(r))` against `kappa(r)` over a grid,
/// with the inverse taken by bisection rather than the closed form.
pub fn w_z_consistency(r_lo: f64, r_hi: f64, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let r = r_lo + (r_hi - r_lo) * i as f64 / n as f64;
        let m = w_inv_bisect(r);
        let lhs = z_of(m);
        let rhs = kappa(r);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-300));
    }
    worst
}

fn w_inv_bisect(r: f64) -> f64 {
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while w_of(hi) > r {
        hi *= 2.0;
    }
    while w_of(lo) < r {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if w_of(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
