mod common;

use phasefront::engine::{initial_strength, run, RunOptions};
use phasefront::scenario::{prepare, DataPiece, Scenario};
use phasefront::thresholds::{
    choose_parameters, h_bubble, in_domain_c, kappa, PhaseCase, PhaseConfig,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn build(case: PhaseCase, x: f64, y: f64, seed: u64, tv_frac: f64, t_end: f64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_l = 1.0;
    let a_m = a_l * (2.0 + x) / (2.0 - x);
    let a_r = match case {
        PhaseCase::Bubble => a_m * (2.0 - y) / (2.0 + y),
        PhaseCase::IncreasingPressure => a_m * (2.0 + y) / (2.0 - y),
    };
    let (x_a, x_b) = (-0.6, 0.6);
    let mut positions: Vec<f64> = (0..36)
        .map(|i| match i % 3 {
            0 => rng.gen_range(-1.7..-0.7),
            1 => rng.gen_range(-0.5..0.5),
            _ => rng.gen_range(0.7..1.7),
        })
        .collect();
    positions.sort_by(f64::total_cmp);
    positions.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let deltas: Vec<(f64, f64)> = positions
        .iter()
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let min_a = a_l.min(a_m).min(a_r);
    let tv1: f64 = deltas
        .iter()
        .map(|(dv, du)| dv.abs() + du.abs() / min_a)
        .sum();
    let h = match case {
        PhaseCase::Bubble => h_bubble(x, y),
        PhaseCase::IncreasingPressure => phasefront::thresholds::h_increasing(x, y).unwrap(),
    };
    let amp = tv_frac * kappa(h) / tv1;
    let base_v = |p: f64| {
        if p < x_a {
            1.0
        } else if p < x_b {
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
        v: 1.0,
        u: 0.0,
    }];
    let (mut lv, mut uu) = (0.0, 0.0);
    for (pos, d) in events {
        if let Some((dv, du)) = d {
            lv += amp * dv;
            uu += amp * du;
        }
        pieces.push(DataPiece {
            x: pos,
            v: base_v(pos) * lv.exp(),
            u: uu,
        });
    }
    Scenario {
        config: PhaseConfig {
            a_l,
            a_m,
            a_r,
            x_a,
            x_b,
        },
        pieces,
        nu: 4,
        t_end,
        sigma0: 0.1,
        seed: Some(seed),
        profile_times: vec![],
    }
}

#[test]
#[ignore]
fn near_threshold_large_interface_stress() {
    let mut total_events = 0usize;
    let mut runs = 0usize;
    // near-threshold data on moderate and large contact strengths
    for (case, configs) in [
        (
            PhaseCase::Bubble,
            vec![(0.3, 0.25), (0.9, 0.7), (1.3, 1.0), (0.1, 1.2), (1.5, 0.2)],
        ),
        (
            PhaseCase::IncreasingPressure,
            vec![(0.05, 0.05), (0.2, 0.1), (0.35, 0.2), (0.12, 0.3)],
        ),
    ] {
        for (x, y) in configs {
            if case == PhaseCase::IncreasingPressure && !in_domain_c(x, y) {
                println!("skip ({x}, {y}): outside domain");
                continue;
            }
            for seed in 0..6u64 {
                for tv_frac in [0.6, 0.9] {
                    let scn = build(case, x, y, seed, tv_frac, 12.0);
                    let prepared = prepare(&scn).unwrap();
                    assert!(prepared.admissibility.is_admissible());
                    let bar = initial_strength(&prepared.scenario).unwrap();
                    let params = match choose_parameters(case, x, y, bar) {
                        Ok(p) => p,
                        Err(e) => {
                            println!("({x}, {y}) frac {tv_frac}: chooser refused: {e}");
                            continue;
                        }
                    };
                    let mut p = params;
                    p.sigma = scn.sigma0 / scn.nu as f64;
                    match run(&prepared, &p, &RunOptions::default()) {
                        Ok(t) => {
                            total_events += t.events.len();
                            runs += 1;
                            assert!(t.violations.is_empty());
                        }
                        Err(e) => panic!("{case:?} ({x}, {y}) seed {seed} frac {tv_frac}: {e}"),
                    }
                }
            }
        }
    }
    println!("stress PASS: {runs} runs, {total_events} events, zero violations");
}
