//! Shared helpers for the integration suites: a seeded generator of
//! admissible two-interface scenarios and an exact self-similar Riemann
//! sampler used as an independent oracle.

#![allow(dead_code)]

use phasefront::engine::Profile;
use phasefront::model::{apply_wave, shock_speed, Curve, Family, State, WaveStrength};
use phasefront::riemann::solve_initial;
use phasefront::scenario::{DataPiece, Scenario};
use phasefront::thresholds::{in_domain_c, kappa, severity, PhaseCase, PhaseConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const INTERFACES: (f64, f64) = (-0.6, 0.6);

/// Draw an admissible scenario of the given case. The bulk data is scaled so
/// its BV expression lands at `tv_frac` of the admissibility threshold, and
/// the interface jumps are pressure-continuous so they cost no budget.
pub fn random_scenario(case: PhaseCase, seed: u64, tv_frac: f64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, y) = match case {
        PhaseCase::Bubble => (rng.gen_range(0.15..0.55), rng.gen_range(0.10..0.45)),
        PhaseCase::IncreasingPressure => loop {
            let x = rng.gen_range(0.04..0.22);
            let y = rng.gen_range(0.04..0.22);
            if in_domain_c(x, y) {
                break (x, y);
            }
        },
    };
    let a_l = 1.0;
    let a_m = a_l * (2.0 + x) / (2.0 - x);
    let a_r = match case {
        PhaseCase::Bubble => a_m * (2.0 - y) / (2.0 + y),
        PhaseCase::IncreasingPressure => a_m * (2.0 + y) / (2.0 - y),
    };
    let (x_a, x_b) = INTERFACES;
    let config = PhaseConfig {
        a_l,
        a_m,
        a_r,
        x_a,
        x_b,
    };

    let mut positions: Vec<f64> = Vec::new();
    for _ in 0..10 {
        positions.push(rng.gen_range(-1.7..-0.7));
    }
    for _ in 0..26 {
        positions.push(rng.gen_range(-0.5..0.5));
    }
    for _ in 0..10 {
        positions.push(rng.gen_range(0.7..1.7));
    }
    positions.sort_by(f64::total_cmp);
    positions.dedup_by(|a, b| (*a - *b).abs() < 1e-3);

    let deltas: Vec<(f64, f64)> = positions
        .iter()
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let min_a = a_l.min(a_m).min(a_r);
    let tv_unit: f64 = deltas
        .iter()
        .map(|(dv, du)| dv.abs() + du.abs() / min_a)
        .sum();
    let budget = kappa(severity(case, x, y).expect("generator stays inside the domain"));
    let amp = tv_frac * budget / tv_unit;

    let base_v = |pos: f64| {
        if pos < x_a {
            1.0
        } else if pos < x_b {
            (a_m / a_l) * (a_m / a_l)
        } else {
            (a_r / a_l) * (a_r / a_l)
        }
    };
    let mut events: Vec<(f64, Option<(f64, f64)>)> = positions
        .iter()
        .zip(&deltas)
        .map(|(p, d)| (*p, Some(*d)))
        .collect();
    events.push((x_a, None));
    events.push((x_b, None));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut pieces = vec![DataPiece {
        x: -2.0,
        v: base_v(-2.0),
        u: 0.0,
    }];
    let mut cum_logv = 0.0;
    let mut cum_u = 0.0;
    for (pos, delta) in events {
        if let Some((dv, du)) = delta {
            cum_logv += amp * dv;
            cum_u += amp * du;
        }
        pieces.push(DataPiece {
            x: pos,
            v: base_v(pos) * cum_logv.exp(),
            u: cum_u,
        });
    }
    Scenario {
        config,
        pieces,
        nu: 4,
        t_end: 7.0,
        sigma0: 0.1,
        seed: Some(seed),
        profile_times: vec![],
    }
}

/// A single-jump scenario in a uniform phase (`eta = zeta = 0`), with the
/// interfaces parked far to the left of the active region.
pub fn uniform_phase_riemann(left: State, right: State, t_end: f64) -> Scenario {
    Scenario {
        config: PhaseConfig {
            a_l: left.a,
            a_m: left.a,
            a_r: left.a,
            x_a: -50.0,
            x_b: -40.0,
        },
        pieces: vec![
            DataPiece {
                x: -60.0,
                v: left.v,
                u: left.u,
            },
            DataPiece {
                x: 0.0,
                v: right.v,
                u: right.u,
            },
        ],
        nu: 1,
        t_end,
        sigma0: 0.1,
        seed: None,
        profile_times: vec![],
    }
}

/// Exact self-similar solution of a Riemann problem in a uniform phase.
pub struct ExactRiemann {
    pub left: State,
    pub mid: State,
    pub right: State,
    pub eps1: f64,
    pub eps3: f64,
    a: f64,
}

impl ExactRiemann {
    pub fn new(left: State, right: State) -> Self {
        assert!((left.a - right.a).abs() < 1e-14, "uniform phase only");
        let pat = solve_initial(&left, &right).expect("solvable");
        let mid = apply_wave(&left, WaveStrength::new(Family::One, pat.eps1), Curve::Lax).unwrap();
        ExactRiemann {
            left,
            mid,
            right,
            eps1: pat.eps1,
            eps3: pat.eps3,
            a: left.a,
        }
    }

    /// Wave-speed edges `(lo, hi)` of each characteristic field in the
    /// self-similar plane; shocks have `lo == hi`.
    pub fn edges(&self) -> ((f64, f64), (f64, f64)) {
        let one = if self.eps1 < 0.0 {
            let s = shock_speed(&self.left, &self.mid, Family::One).unwrap();
            (s, s)
        } else {
            (-self.a / self.left.v, -self.a / self.mid.v)
        };
        let three = if self.eps3 < 0.0 {
            let s = shock_speed(&self.mid, &self.right, Family::Three).unwrap();
            (s, s)
        } else {
            (self.a / self.mid.v, self.a / self.right.v)
        };
        (one, three)
    }

    /// Total width of the rarefaction fans per unit time.
    pub fn fan_width(&self) -> f64 {
        let ((l1, h1), (l3, h3)) = self.edges();
        (h1 - l1) + (h3 - l3)
    }

    /// State at the ray `xi = x / t`.
    pub fn sample(&self, xi: f64) -> (f64, f64) {
        let ((lo1, hi1), (lo3, hi3)) = self.edges();
        if xi < lo1 {
            (self.left.v, self.left.u)
        } else if xi <= hi1 && self.eps1 > 0.0 {
            let v = -self.a / xi;
            let u = self.left.u + self.a * (v / self.left.v).ln();
            (v, u)
        } else if xi < lo3 {
            (self.mid.v, self.mid.u)
        } else if xi <= hi3 && self.eps3 > 0.0 {
            let v = self.a / xi;
            let u = self.mid.u + self.a * (self.mid.v / v).ln();
            (v, u)
        } else {
            (self.right.v, self.right.u)
        }
    }
}

/// Piecewise-constant lookup into a profile.
pub fn profile_state_at(profile: &Profile, x: f64) -> (f64, f64) {
    let mut state = profile.rows.first().map(|r| r.left).unwrap();
    for row in &profile.rows {
        if row.x <= x {
            state = row.right;
        } else {
            break;
        }
    }
    (state.v, state.u)
}

/// Exact `L1` distance of `(v, u)` between two piecewise-constant profiles:
/// both are constant on every interval of the merged breakpoint mesh.
pub fn l1_profile_distance(pa: &Profile, pb: &Profile, x_lo: f64, x_hi: f64) -> f64 {
    let mut cuts: Vec<f64> = vec![x_lo, x_hi];
    for p in [pa, pb] {
        for row in &p.rows {
            if row.x > x_lo && row.x < x_hi {
                cuts.push(row.x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut dist = 0.0;
    for w in cuts.windows(2) {
        let x = 0.5 * (w[0] + w[1]);
        let (va, ua) = profile_state_at(pa, x);
        let (vb, ub) = profile_state_at(pb, x);
        dist += ((va - vb).abs() + (ua - ub).abs()) * (w[1] - w[0]);
    }
    dist
}

/// `L1` distance of `(v, u)` between a numerical profile at time `t` and the
/// exact solution, integrated over `[x_lo, x_hi]` by midpoint quadrature on
/// a mesh refined with every breakpoint of both solutions.
pub fn l1_error(profile: &Profile, oracle: &ExactRiemann, t: f64, x_lo: f64, x_hi: f64) -> f64 {
    let mut cuts: Vec<f64> = vec![x_lo, x_hi];
    for row in &profile.rows {
        if row.x > x_lo && row.x < x_hi {
            cuts.push(row.x);
        }
    }
    let ((l1, h1), (l3, h3)) = oracle.edges();
    for edge in [l1, h1, l3, h3] {
        let x = edge * t;
        if x > x_lo && x < x_hi {
            cuts.push(x);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = 32;
        let dx = (b - a) / n as f64;
        for k in 0..n {
            let x = a + (k as f64 + 0.5) * dx;
            let (vn, un) = profile_state_at(profile, x);
            let (ve, ue) = oracle.sample(x / t);
            err += ((vn - ve).abs() + (un - ue).abs()) * dx;
        }
    }
    err
}
