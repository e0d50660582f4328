//! Scenario files: the plain-text configuration format, validation, the
//! initial piecewise-constant profile, and reduction of the mirrored
//! decreasing-pressure configuration to the increasing one by reflection.
//!
//! Format: bracketed sections with one `key = value` pair per line, `#`
//! comments allowed. The `[data]` section lists `piece = x v u` lines whose
//! `x` are strictly increasing; the first piece extends to minus infinity
//! (its `x` is only an anchor). Data jumps may sit exactly on an interface,
//! in which case the state and the phase jump there together.

use crate::front::InterfaceId;
use crate::model::State;
use crate::thresholds::{
    admissible, classify, tv_expression, Admissibility, CaseTag, PhaseCase, PhaseConfig,
    ThresholdError,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("unsupported phase configuration: eta = {eta:.6}, zeta = {zeta:.6} ({hint})")]
    UnsupportedCase { eta: f64, zeta: f64, hint: String },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

/// One constant piece of the initial data, valid from `x` to the next piece.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DataPiece {
    pub x: f64,
    pub v: f64,
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub config: PhaseConfig,
    pub pieces: Vec<DataPiece>,
    pub nu: u32,
    pub t_end: f64,
    pub sigma0: f64,
    pub seed: Option<u64>,
    pub profile_times: Vec<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let c = &self.config;
        if !(c.a_l > 0.0 && c.a_m > 0.0 && c.a_r > 0.0) {
            return Err(ScenarioError::Invalid(
                "sound coefficients must be positive".into(),
            ));
        }
        if !(c.x_a < c.x_b) {
            return Err(ScenarioError::Invalid(format!(
                "interfaces must be ordered: x_a = {} >= x_b = {}",
                c.x_a, c.x_b
            )));
        }
        if self.pieces.is_empty() {
            return Err(ScenarioError::Invalid("no data pieces".into()));
        }
        for w in self.pieces.windows(2) {
            if !(w[0].x < w[1].x) {
                return Err(ScenarioError::Invalid(format!(
                    "piece positions must be strictly increasing ({} then {})",
                    w[0].x, w[1].x
                )));
            }
        }
        for p in &self.pieces {
            if !(p.v > 0.0) || !p.v.is_finite() || !p.u.is_finite() || !p.x.is_finite() {
                return Err(ScenarioError::Invalid(format!(
                    "invalid piece (x = {}, v = {}, u = {})",
                    p.x, p.v, p.u
                )));
            }
        }
        if self.nu == 0 {
            return Err(ScenarioError::Invalid("nu must be at least 1".into()));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(ScenarioError::Invalid(
                "t_end must be finite and >= 0".into(),
            ));
        }
        if !(self.sigma0 > 0.0) {
            return Err(ScenarioError::Invalid("sigma0 must be positive".into()));
        }
        if self.profile_times.iter().any(|t| !(*t >= 0.0)) {
            return Err(ScenarioError::Invalid(
                "profile times must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Serialize to the canonical text form; `parse` of the output yields an
    /// identical scenario.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[phase]\n");
        out.push_str(&format!("a_l = {}\n", self.config.a_l));
        out.push_str(&format!("a_m = {}\n", self.config.a_m));
        out.push_str(&format!("a_r = {}\n", self.config.a_r));
        out.push_str(&format!("x_a = {}\n", self.config.x_a));
        out.push_str(&format!("x_b = {}\n", self.config.x_b));
        out.push_str("\n[data]\n");
        for p in &self.pieces {
            out.push_str(&format!("piece = {} {} {}\n", p.x, p.v, p.u));
        }
        out.push_str("\n[run]\n");
        out.push_str(&format!("nu = {}\n", self.nu));
        out.push_str(&format!("t_end = {}\n", self.t_end));
        out.push_str(&format!("sigma0 = {}\n", self.sigma0));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed = {}\n", seed));
        }
        if !self.profile_times.is_empty() {
            let times: Vec<String> = self.profile_times.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!("profile_times = {}\n", times.join(" ")));
        }
        out
    }
}

#[derive(Default)]
struct RawPhase {
    a: [Option<f64>; 3],
    lambda: [Option<f64>; 3],
    a_table: Option<Vec<(f64, f64)>>,
    x_a: Option<f64>,
    x_b: Option<f64>,
}

/// Parse the text form. Errors carry the offending line number.
pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let mut section = String::new();
    let mut phase = RawPhase::default();
    let mut pieces: Vec<DataPiece> = Vec::new();
    let mut nu: Option<u32> = None;
    let mut t_end: Option<f64> = None;
    let mut sigma0: f64 = 0.1;
    let mut seed: Option<u64> = None;
    let mut profile_times: Vec<f64> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].to_string();
            if !matches!(section.as_str(), "phase" | "data" | "run") {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("unknown section [{section}]"),
                });
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Parse {
            line: line_no,
            message: "expected 'key = value'".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let fnum = |v: &str| -> Result<f64, ScenarioError> {
            v.parse::<f64>().map_err(|_| ScenarioError::Parse {
                line: line_no,
                message: format!("not a number: '{v}'"),
            })
        };
        match (section.as_str(), key) {
            ("phase", "a_l") => phase.a[0] = Some(fnum(value)?),
            ("phase", "a_m") => phase.a[1] = Some(fnum(value)?),
            ("phase", "a_r") => phase.a[2] = Some(fnum(value)?),
            ("phase", "lambda_l") => phase.lambda[0] = Some(fnum(value)?),
            ("phase", "lambda_m") => phase.lambda[1] = Some(fnum(value)?),
            ("phase", "lambda_r") => phase.lambda[2] = Some(fnum(value)?),
            ("phase", "x_a") => phase.x_a = Some(fnum(value)?),
            ("phase", "x_b") => phase.x_b = Some(fnum(value)?),
            ("phase", "a_table") => {
                let mut table = Vec::new();
                for entry in value.split_whitespace() {
                    let (l, a) = entry.split_once(':').ok_or_else(|| ScenarioError::Parse {
                        line: line_no,
                        message: format!("a_table entries are 'lambda:a', got '{entry}'"),
                    })?;
                    table.push((fnum(l)?, fnum(a)?));
                }
                phase.a_table = Some(table);
            }
            ("data", "piece") => {
                let nums: Vec<&str> = value.split_whitespace().collect();
                if nums.len() != 3 {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: "piece needs exactly 'x v u'".into(),
                    });
                }
                pieces.push(DataPiece {
                    x: fnum(nums[0])?,
                    v: fnum(nums[1])?,
                    u: fnum(nums[2])?,
                });
            }
            ("run", "nu") => {
                nu = Some(value.parse::<u32>().map_err(|_| ScenarioError::Parse {
                    line: line_no,
                    message: format!("not an integer: '{value}'"),
                })?)
            }
            ("run", "t_end") => t_end = Some(fnum(value)?),
            ("run", "sigma0") => sigma0 = fnum(value)?,
            ("run", "seed") => {
                seed = Some(value.parse::<u64>().map_err(|_| ScenarioError::Parse {
                    line: line_no,
                    message: format!("not an integer: '{value}'"),
                })?)
            }
            ("run", "profile_times") => {
                for v in value.split_whitespace() {
                    profile_times.push(fnum(v)?);
                }
            }
            _ => {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("unknown key '{key}' in section [{section}]"),
                })
            }
        }
    }

    let resolve_a = |slot: usize, name: &str| -> Result<f64, ScenarioError> {
        if let Some(a) = phase.a[slot] {
            return Ok(a);
        }
        if let (Some(lambda), Some(table)) = (phase.lambda[slot], phase.a_table.as_ref()) {
            return interpolate_a(table, lambda).ok_or_else(|| {
                ScenarioError::Invalid(format!(
                    "lambda_{name} = {lambda} outside the a_table range"
                ))
            });
        }
        Err(ScenarioError::Invalid(format!(
            "phase value a_{name} missing (give a_{name} or lambda_{name} with a_table)"
        )))
    };
    let config = PhaseConfig {
        a_l: resolve_a(0, "l")?,
        a_m: resolve_a(1, "m")?,
        a_r: resolve_a(2, "r")?,
        x_a: phase
            .x_a
            .ok_or_else(|| ScenarioError::Invalid("x_a missing".into()))?,
        x_b: phase
            .x_b
            .ok_or_else(|| ScenarioError::Invalid("x_b missing".into()))?,
    };
    let scenario = Scenario {
        config,
        pieces,
        nu: nu.unwrap_or(4),
        t_end: t_end.ok_or_else(|| ScenarioError::Invalid("t_end missing".into()))?,
        sigma0,
        seed,
        profile_times,
    };
    scenario.validate()?;
    Ok(scenario)
}

fn interpolate_a(table: &[(f64, f64)], lambda: f64) -> Option<f64> {
    let mut sorted = table.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if sorted.is_empty() || lambda < sorted[0].0 || lambda > sorted.last().unwrap().0 {
        return None;
    }
    for w in sorted.windows(2) {
        if lambda <= w[1].0 {
            let t = if w[1].0 == w[0].0 {
                0.0
            } else {
                (lambda - w[0].0) / (w[1].0 - w[0].0)
            };
            return Some(w[0].1 + t * (w[1].1 - w[0].1));
        }
    }
    sorted.last().map(|p| p.1)
}

/// Mirror the scenario through the origin: `x -> -x`, `u -> -u`. Turns a
/// decreasing-pressure configuration into an increasing one.
pub fn reflect(s: &Scenario) -> Scenario {
    let n = s.pieces.len();
    let mut pieces = Vec::with_capacity(n);
    // value of reflected piece j is the value of old piece n-1-j
    for j in 0..n {
        let src = &s.pieces[n - 1 - j];
        let x = if j == 0 {
            if n > 1 {
                -s.pieces[n - 1].x - 1.0
            } else {
                -src.x
            }
        } else {
            -s.pieces[n - j].x
        };
        pieces.push(DataPiece {
            x,
            v: src.v,
            u: -src.u,
        });
    }
    Scenario {
        config: PhaseConfig {
            a_l: s.config.a_r,
            a_m: s.config.a_m,
            a_r: s.config.a_l,
            x_a: -s.config.x_b,
            x_b: -s.config.x_a,
        },
        pieces,
        nu: s.nu,
        t_end: s.t_end,
        sigma0: s.sigma0,
        seed: s.seed,
        profile_times: s.profile_times.clone(),
    }
}

/// One jump of the assembled initial profile.
#[derive(Clone, Copy, Debug)]
pub struct InitialJump {
    pub position: f64,
    pub left: State,
    pub right: State,
    pub interface: Option<InterfaceId>,
}

/// Assemble the initial profile: data pieces merged with the two phase
/// interfaces, as a leftmost state plus ordered jumps.
pub fn initial_profile(s: &Scenario) -> Result<(State, Vec<InitialJump>), ScenarioError> {
    let c = &s.config;
    let a_at = |x: f64| {
        if x < c.x_a {
            c.a_l
        } else if x < c.x_b {
            c.a_m
        } else {
            c.a_r
        }
    };
    let mut positions: Vec<f64> = s.pieces.iter().skip(1).map(|p| p.x).collect();
    for xi in [c.x_a, c.x_b] {
        if !positions.contains(&xi) {
            positions.push(xi);
        }
    }
    positions.sort_by(f64::total_cmp);

    let mk = |v: f64, u: f64, a: f64| {
        State::new(v, u, a).map_err(|e| ScenarioError::Invalid(e.to_string()))
    };
    let piece_at = |x: f64| {
        // last piece whose anchor is <= x; the first piece extends left
        let mut cur = &s.pieces[0];
        for p in &s.pieces[1..] {
            if p.x <= x {
                cur = p;
            } else {
                break;
            }
        }
        cur
    };
    let first = s.pieces[0];
    let left_anchor = positions
        .first()
        .map(|p| p - 1.0)
        .unwrap_or(first.x)
        .min(first.x - 1.0);
    let mut cur = mk(first.v, first.u, a_at(left_anchor))?;
    let leftmost = cur;
    let mut jumps = Vec::with_capacity(positions.len());
    for pos in positions {
        let piece = piece_at(pos);
        let right = mk(piece.v, piece.u, a_at(pos))?;
        let interface = if pos == c.x_a {
            Some(InterfaceId::Eta)
        } else if pos == c.x_b {
            Some(InterfaceId::Zeta)
        } else {
            None
        };
        jumps.push(InitialJump {
            position: pos,
            left: cur,
            right,
            interface,
        });
        cur = right;
    }
    Ok((leftmost, jumps))
}

/// The scenario after case resolution, with the admissibility verdict.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub case: PhaseCase,
    /// `|eta|` and `|zeta|` of the (possibly reflected) configuration.
    pub x: f64,
    pub y: f64,
    pub reflected: bool,
    pub admissibility: Admissibility,
}

/// Classify, reflect if needed, and run the admissibility check.
pub fn prepare(scenario: &Scenario) -> Result<Prepared, ScenarioError> {
    scenario.validate()?;
    let eta = scenario.config.eta();
    let zeta = scenario.config.zeta();
    let (scenario, case, reflected) = match classify(eta, zeta) {
        CaseTag::Bubble => (scenario.clone(), PhaseCase::Bubble, false),
        CaseTag::IncreasingPressure => (scenario.clone(), PhaseCase::IncreasingPressure, false),
        CaseTag::DecreasingPressure => (reflect(scenario), PhaseCase::IncreasingPressure, true),
        CaseTag::Unsupported => {
            let hint = if eta < 0.0 && zeta > 0.0 {
                "middle phase below both neighbours is not covered"
            } else {
                "single monotone interface configurations are not covered"
            };
            return Err(ScenarioError::UnsupportedCase {
                eta,
                zeta,
                hint: hint.into(),
            });
        }
    };
    let x = scenario.config.eta().abs();
    let y = scenario.config.zeta().abs();
    let (leftmost, jumps) = initial_profile(&scenario)?;
    let mut states = vec![leftmost];
    states.extend(jumps.iter().map(|j| j.right));
    let tv = tv_expression(&states);
    let admissibility = admissible(case, x, y, tv)?;
    Ok(Prepared {
        scenario,
        case,
        x,
        y,
        reflected,
        admissibility,
    })
}
