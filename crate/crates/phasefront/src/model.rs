//! States, the pressure law, wave curves and the elementary scalar maps used
//! by the solvers and the stability machinery.
//!
//! A state is a point `(v, u, a)`: specific volume, velocity and the sound
//! coefficient of the current phase. The pressure law is `p = a^2 / v`. The
//! genuinely nonlinear families 1 and 3 move with speeds `-a/v` and `+a/v`;
//! the linearly degenerate family 2 is stationary and carries the jump of `a`.

use serde::Serialize;
use thiserror::Error;

/// Absolute tolerance below which a wave strength is treated as zero.
pub const STRENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid state v = {v}, a = {a}: both must be positive and finite")]
    InvalidState { v: f64, a: f64 },
    #[error("2-wave strength {delta} lies outside (-2, 2)")]
    ContactStrengthRange { delta: f64 },
    #[error("wave application left the admissible region (v = {v})")]
    LeftAdmissibleRegion { v: f64 },
    #[error("family {family:?} does not carry shocks")]
    UnsupportedFamily { family: Family },
    #[error("states are not connected by a single {family:?}-shock (RH residuals {r1:e}, {r2:e})")]
    NotShockCompatible { family: Family, r1: f64, r2: f64 },
}

/// Wave family of the 3x3 system. Families 1 and 3 are genuinely nonlinear,
/// family 2 is the stationary contact carrying the phase interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    One,
    Two,
    Three,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
        }
    }
}

/// Curve parametrization a strength refers to. Lax curves switch to the
/// shock branch for negative strengths; integral curves keep the rarefaction
/// parametrization for all strengths and form a group under composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Curve {
    Lax,
    Integral,
}

/// A constant state of the flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct State {
    pub v: f64,
    pub u: f64,
    pub a: f64,
}

impl State {
    pub fn new(v: f64, u: f64, a: f64) -> Result<Self, ModelError> {
        if !(v > 0.0) || !(a > 0.0) || !v.is_finite() || !a.is_finite() || !u.is_finite() {
            return Err(ModelError::InvalidState { v, a });
        }
        Ok(State { v, u, a })
    }

    /// Pressure `p = a^2 / v`.
    pub fn pressure(&self) -> f64 {
        self.a * self.a / self.v
    }

    /// Characteristic speeds `(-a/v, +a/v)` of families 1 and 3.
    pub fn char_speeds(&self) -> (f64, f64) {
        let s = self.a / self.v;
        (-s, s)
    }
}

/// Signed wave strength. For families 1 and 3 a positive strength is a
/// rarefaction and a negative one a shock; family 2 strengths measure the
/// relative jump of `a` and lie in `(-2, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveStrength {
    pub family: Family,
    pub eps: f64,
}

impl WaveStrength {
    pub fn new(family: Family, eps: f64) -> Self {
        WaveStrength { family, eps }
    }

    pub fn is_shock(&self) -> bool {
        self.family != Family::Two && self.eps < 0.0
    }

    pub fn is_rarefaction(&self) -> bool {
        self.family != Family::Two && self.eps > 0.0
    }
}

/// `h(e) = e` for `e >= 0` and `sinh e` for `e < 0`. The velocity shift along
/// a Lax curve of strength `eps` is `2 a h(eps)`; `h` is strictly increasing
/// and C^1 at the origin.
pub fn h(eps: f64) -> f64 {
    if eps >= 0.0 {
        eps
    } else {
        eps.sinh()
    }
}

pub fn h_prime(eps: f64) -> f64 {
    if eps >= 0.0 {
        1.0
    } else {
        eps.cosh()
    }
}

/// Velocity-shift map of the chosen curve: `h` on Lax curves, the identity on
/// integral curves.
pub fn theta(curve: Curve, eps: f64) -> f64 {
    match curve {
        Curve::Lax => h(eps),
        Curve::Integral => eps,
    }
}

pub fn theta_prime(curve: Curve, eps: f64) -> f64 {
    match curve {
        Curve::Lax => h_prime(eps),
        Curve::Integral => 1.0,
    }
}

/// `c(z) = (cosh z - 1) / (cosh z + 1)`: the damping factor of reflections in
/// mixed shock-rarefaction interactions. Strictly increasing from 0 toward 1
/// on `z >= 0` and even in `z`.
pub fn c(z: f64) -> f64 {
    let ch = z.cosh();
    (ch - 1.0) / (ch + 1.0)
}

/// `C0(rho) = sinh(rho) / rho`, the amplification constant of the simplified
/// solver. Greater than 1 for any positive `rho` and -> 1 as `rho -> 0`.
pub fn c0(rho: f64) -> f64 {
    if rho == 0.0 {
        1.0
    } else {
        rho.sinh() / rho
    }
}

/// Follow the wave curve of `w.family` from `origin` (taken as the left
/// state) to the right state of a wave of the given strength.
///
/// Families 1 and 3 use the curve selected by `curve`; family 2 rescales `v`
/// by the squared ratio of sound coefficients and leaves `u` and `p` alone.
pub fn apply_wave(origin: &State, w: WaveStrength, curve: Curve) -> Result<State, ModelError> {
    let out = match w.family {
        Family::One => State {
            v: origin.v * (2.0 * w.eps).exp(),
            u: origin.u + 2.0 * origin.a * theta(curve, w.eps),
            a: origin.a,
        },
        Family::Three => State {
            v: origin.v * (-2.0 * w.eps).exp(),
            u: origin.u + 2.0 * origin.a * theta(curve, w.eps),
            a: origin.a,
        },
        Family::Two => {
            if !(w.eps.abs() < 2.0) {
                return Err(ModelError::ContactStrengthRange { delta: w.eps });
            }
            let a_new = origin.a * (2.0 + w.eps) / (2.0 - w.eps);
            State {
                v: origin.v * (a_new * a_new) / (origin.a * origin.a),
                u: origin.u,
                a: a_new,
            }
        }
    };
    if !out.v.is_finite() || !(out.v > 0.0) || !out.u.is_finite() {
        return Err(ModelError::LeftAdmissibleRegion { v: out.v });
    }
    Ok(out)
}

/// Rankine-Hugoniot speed of the single shock of `family` joining `left` to
/// `right`: `-a / sqrt(v- v+)` for family 1 and `+a / sqrt(v- v+)` for
/// family 3. The two RH residuals are verified to 1e-10 relative.
pub fn shock_speed(left: &State, right: &State, family: Family) -> Result<f64, ModelError> {
    let a = left.a;
    let s = match family {
        Family::One => -a / (left.v * right.v).sqrt(),
        Family::Three => a / (left.v * right.v).sqrt(),
        Family::Two => return Err(ModelError::UnsupportedFamily { family }),
    };
    let r1 = s * (right.v - left.v) + (right.u - left.u);
    let r2 = s * (right.u - left.u) - (right.pressure() - left.pressure());
    let scale1 = f64::max(
        1.0,
        s.abs() * (left.v + right.v) + left.u.abs() + right.u.abs(),
    );
    let scale2 = f64::max(1.0, left.pressure() + right.pressure());
    if r1.abs() > 1e-10 * scale1 || r2.abs() > 1e-10 * scale2 {
        return Err(ModelError::NotShockCompatible { family, r1, r2 });
    }
    Ok(s)
}

/// Propagation speed of a rarefaction front: the characteristic speed of its
/// family at the right state.
pub fn rarefaction_front_speed(right: &State, family: Family) -> f64 {
    let (l1, l3) = right.char_speeds();
    match family {
        Family::One => l1,
        Family::Three => l3,
        Family::Two => 0.0,
    }
}

/// Strength of the single wave of `family` connecting `left` to `right`,
/// read off the curve parametrization.
pub fn strength_between(left: &State, right: &State, family: Family) -> f64 {
    match family {
        Family::One => 0.5 * (right.v / left.v).ln(),
        Family::Three => 0.5 * (left.v / right.v).ln(),
        Family::Two => contact_strength(left.a, right.a),
    }
}

/// Strength of a 2-wave between sound coefficients: `2 (a+ - a-) / (a+ + a-)`.
pub fn contact_strength(a_minus: f64, a_plus: f64) -> f64 {
    2.0 * (a_plus - a_minus) / (a_plus + a_minus)
}
