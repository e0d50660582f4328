//! Grid sweeps over the `(|eta|, |zeta|)` square: domain membership,
//! severity, threshold and contraction factor per cell. Cells are
//! independent and evaluated in parallel.

use crate::model::c0;
use crate::thresholds::{choose_parameters, in_domain_c, kappa, mu_factor, severity, PhaseCase};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub in_domain: bool,
    pub h: Option<f64>,
    pub kappa_of_h: Option<f64>,
    pub mu: Option<f64>,
    /// Bubble only: the region where the severity is dominated by `x + y`.
    pub cmp_region: bool,
}

/// Sweep the case over an `res x res` grid of the square `[0,2)^2`. The
/// bubble grid starts on the axes (the severity degenerates to the other
/// coordinate there); the increasing grid uses cell centers since its
/// domain excludes the axes.
pub fn sweep(case: PhaseCase, res: usize, bar_l0: f64) -> Vec<SweepRow> {
    let cells: Vec<(usize, usize)> = (0..res)
        .flat_map(|i| (0..res).map(move |j| (i, j)))
        .collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = match case {
                PhaseCase::Bubble => (2.0 * i as f64 / res as f64, 2.0 * j as f64 / res as f64),
                PhaseCase::IncreasingPressure => (
                    2.0 * (i as f64 + 0.5) / res as f64,
                    2.0 * (j as f64 + 0.5) / res as f64,
                ),
            };
            evaluate_cell(case, x, y, bar_l0)
        })
        .collect()
}

pub fn evaluate_cell(case: PhaseCase, x: f64, y: f64, bar_l0: f64) -> SweepRow {
    let in_domain = match case {
        PhaseCase::Bubble => true,
        PhaseCase::IncreasingPressure => in_domain_c(x, y),
    };
    if !in_domain {
        return SweepRow {
            x,
            y,
            in_domain,
            h: None,
            kappa_of_h: None,
            mu: None,
            cmp_region: false,
        };
    }
    let h = severity(case, x, y).ok();
    let kappa_of_h = h.map(kappa);
    let mu = choose_parameters(case, x, y, bar_l0)
        .ok()
        .map(|p| mu_factor(case, &p, x, y, c0(p.rho)));
    let cmp_region = case == PhaseCase::Bubble && x + y < 0.5;
    SweepRow {
        x,
        y,
        in_domain,
        h,
        kappa_of_h,
        mu,
        cmp_region,
    }
}
