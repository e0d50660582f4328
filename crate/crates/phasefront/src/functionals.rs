//! The Glimm-type functional `F = L + L0 + Q` and its bookkeeping.
//!
//! `L` sums moving strengths with shocks weighted by `xi`; `L0` is the total
//! size attached to the composite waves; `Q` is the case-dependent
//! interaction potential counting waves that approach an interface. The
//! functional must not increase across any interaction; `assert_delta_f`
//! checks that event by event.
//!
//! `L0` is accounted through the per-generation absorption ledger (absolute
//! sizes, never cancelling), which makes the per-generation split an exact
//! partition of `F`. The net attached sizes of the composites are tracked
//! separately and enter the total-variation cross-check.

use crate::front::{region_of, Front, FrontPayload, InterfaceId, Region};
use crate::model::Family;
use crate::thresholds::{ParameterSet, PhaseCase, PhaseConfig};
use serde::Serialize;
use std::collections::BTreeMap;

/// Relative tolerance for the monotonicity monitor.
pub const DELTA_F_TOL: f64 = 1e-10;

/// All functional values at one instant.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalSnapshot {
    pub t: f64,
    pub l: f64,
    pub l_by_region: [f64; 3],
    /// Absorption ledger total; the `L0` entering `f`.
    pub l0: f64,
    /// Net attached size `|d01| + |d03|` per interface.
    pub attached_net: [f64; 2],
    pub q: f64,
    pub q_by_region: [f64; 3],
    pub f: f64,
    /// Unweighted total moving strength.
    pub lbar: f64,
    pub max_shock: f64,
    /// Exact split of `f` by generation order.
    pub f_by_gen: BTreeMap<u32, f64>,
}

fn region_index(r: Region) -> usize {
    match r {
        Region::Left => 0,
        Region::Middle => 1,
        Region::Right => 2,
    }
}

/// Multiplier `M` such that a wave of absolute size `s` contributes `M s`
/// to the interaction potential of its region.
fn q_multiplier(
    case: PhaseCase,
    region: Region,
    family: Family,
    shock: bool,
    p: &ParameterSet,
    x: f64,
    y: f64,
) -> f64 {
    match case {
        PhaseCase::Bubble => match (region, family, shock) {
            (Region::Left, Family::Three, false) => p.k_eta_l * x + p.k_zeta_l * y,
            (Region::Left, Family::Three, true) => p.xi * p.k_zeta_l * y,
            (Region::Middle, Family::One, false) => p.k_eta_m * x,
            (Region::Middle, Family::One, true) => p.xi * p.k_eta_m * x,
            (Region::Middle, Family::Three, false) => p.k_zeta_m * y,
            (Region::Middle, Family::Three, true) => p.xi * p.k_zeta_m * y,
            (Region::Right, Family::One, false) => p.k_eta_r * x + p.k_zeta_r * y,
            (Region::Right, Family::One, true) => p.xi * p.k_eta_r * x,
            _ => 0.0,
        },
        PhaseCase::IncreasingPressure => match (region, family, shock) {
            (Region::Left, Family::Three, false) => p.k_eta_l * x + p.k_zeta_l * y,
            (Region::Middle, Family::One, false) => p.k_eta_m * x,
            (Region::Middle, Family::One, true) => p.xi * p.k_eta_m * x,
            (Region::Middle, Family::Three, false) => p.k_zeta_m * y,
            (Region::Right, Family::One, false) => p.k_eta_r * x + p.k_zeta_r * y,
            (Region::Right, Family::One, true) => p.xi * (p.k_eta_r * x + p.k_zeta_r * y),
            _ => 0.0,
        },
    }
}

/// Evaluate the snapshot of a consistent front list.
pub fn evaluate(
    fronts: &[Front],
    case: PhaseCase,
    params: &ParameterSet,
    config: &PhaseConfig,
    t: f64,
) -> FunctionalSnapshot {
    let x = config.eta().abs();
    let y = config.zeta().abs();
    let mut l_by_region = [0.0; 3];
    let mut q_by_region = [0.0; 3];
    let mut attached_net = [0.0; 2];
    let mut l0 = 0.0;
    let mut lbar = 0.0;
    let mut max_shock: f64 = 0.0;
    let mut f_by_gen: BTreeMap<u32, f64> = BTreeMap::new();

    for front in fronts {
        match &front.payload {
            FrontPayload::Wave {
                family,
                strength,
                generation,
            } => {
                let region = region_of(front.position, front.speed, config);
                let idx = region_index(region);
                let size = strength.abs();
                let shock = *strength < 0.0;
                let weight = if shock { params.xi } else { 1.0 };
                l_by_region[idx] += weight * size;
                lbar += size;
                if shock {
                    max_shock = max_shock.max(size);
                }
                let qm = q_multiplier(case, region, *family, shock, params, x, y);
                q_by_region[idx] += qm * size;
                *f_by_gen.entry(*generation).or_insert(0.0) += (weight + qm) * size;
            }
            FrontPayload::Interface {
                which,
                cw,
                absorbed,
            } => {
                let slot = match which {
                    InterfaceId::Eta => 0,
                    InterfaceId::Zeta => 1,
                };
                attached_net[slot] = cw.attached_size();
                for (gen, size) in absorbed {
                    l0 += size;
                    *f_by_gen.entry(*gen).or_insert(0.0) += size;
                }
            }
        }
    }
    let l: f64 = l_by_region.iter().sum();
    let q: f64 = q_by_region.iter().sum();
    FunctionalSnapshot {
        t,
        l,
        l_by_region,
        l0,
        attached_net,
        q,
        q_by_region,
        f: l + l0 + q,
        lbar,
        max_shock,
        f_by_gen,
    }
}

impl FunctionalSnapshot {
    /// Tail sum of the per-generation functionals from order `k` up.
    pub fn tail_from(&self, k: u32) -> f64 {
        self.f_by_gen.range(k..).map(|(_, v)| v).sum()
    }

    pub fn max_generation(&self) -> u32 {
        self.f_by_gen.keys().next_back().copied().unwrap_or(1)
    }
}

/// Total variation of `log p` over the profile, counting the composite
/// internals (attached 1-strength, contact, attached 3-strength) as separate
/// jumps. Computed from states only.
pub fn tv_log_pressure(fronts: &[Front]) -> f64 {
    let mut tv = 0.0;
    for front in fronts {
        match &front.payload {
            FrontPayload::Wave { .. } => {
                tv += (front.right.pressure().ln() - front.left.pressure().ln()).abs();
            }
            FrontPayload::Interface { cw, .. } => {
                if let Ok((s1, s2, s3)) = cw.internal_states(&front.left) {
                    tv += (s1.pressure().ln() - front.left.pressure().ln()).abs();
                    tv += (s2.pressure().ln() - s1.pressure().ln()).abs();
                    tv += (s3.pressure().ln() - s2.pressure().ln()).abs();
                }
            }
        }
    }
    tv
}

/// Mismatch of the two routes to the unweighted strength total: the sum of
/// moving strengths against half the pressure variation minus the net
/// attached sizes.
pub fn lbar_identity_residual(fronts: &[Front], snap: &FunctionalSnapshot) -> f64 {
    let from_profile = 0.5 * tv_log_pressure(fronts) - snap.attached_net[0] - snap.attached_net[1];
    (snap.lbar - from_profile).abs()
}

/// A failed runtime check, with enough context to locate the event.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub t: f64,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    FunctionalIncrease,
    ShockCap,
    InitialBound,
    GenerationDecay,
    Consistency,
}

/// Monotonicity monitor: `after.f - before.f <= tol * max(1, before.f)`.
pub fn assert_delta_f(
    before: &FunctionalSnapshot,
    after: &FunctionalSnapshot,
) -> Option<Violation> {
    let df = after.f - before.f;
    if df <= DELTA_F_TOL * f64::max(1.0, before.f) {
        None
    } else {
        Some(Violation {
            kind: ViolationKind::FunctionalIncrease,
            t: after.t,
            detail: format!(
                "dF = {df:e} (F {} -> {}); L {} -> {}, L0 {} -> {}, Q {} -> {}",
                before.f, after.f, before.l, after.l, before.l0, after.l0, before.q, after.q
            ),
        })
    }
}

/// Initial bound `F(0) <= xi^2 Lbar(0)` and the induced shock-size chain.
pub fn check_initial_bound(
    snap0: &FunctionalSnapshot,
    params: &ParameterSet,
    bar_l0: f64,
) -> Option<Violation> {
    let bound = params.xi * params.xi * bar_l0;
    if snap0.f <= bound + 1e-9 * f64::max(1.0, bound) {
        None
    } else {
        Some(Violation {
            kind: ViolationKind::InitialBound,
            t: snap0.t,
            detail: format!("F(0) = {} > xi^2 Lbar(0) = {}", snap0.f, bound),
        })
    }
}
