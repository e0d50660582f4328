//! Moving and stationary fronts of the piecewise-constant approximation.

use crate::model::{Family, State};
use crate::riemann::CompositeWave;
use crate::thresholds::PhaseConfig;
use serde::Serialize;
use std::collections::BTreeMap;

/// Which interface a composite front sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceId {
    Eta,
    Zeta,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FrontPayload {
    /// A moving discontinuity of family 1 or 3.
    Wave {
        family: Family,
        strength: f64,
        generation: u32,
    },
    /// A pinned composite wave. `absorbed` records the absolute sizes the
    /// simplified solver attached, split by the generation order of the
    /// absorbed strength.
    Interface {
        which: InterfaceId,
        cw: CompositeWave,
        absorbed: BTreeMap<u32, f64>,
    },
}

/// One front of the profile. Adjacent fronts share their touching states.
#[derive(Clone, Debug, PartialEq)]
pub struct Front {
    pub id: u64,
    pub position: f64,
    pub speed: f64,
    pub left: State,
    pub right: State,
    pub payload: FrontPayload,
}

impl Front {
    pub fn is_interface(&self) -> bool {
        matches!(self.payload, FrontPayload::Interface { .. })
    }

    pub fn wave(&self) -> Option<(Family, f64, u32)> {
        match &self.payload {
            FrontPayload::Wave {
                family,
                strength,
                generation,
            } => Some((*family, *strength, *generation)),
            _ => None,
        }
    }

    pub fn composite(&self) -> Option<&CompositeWave> {
        match &self.payload {
            FrontPayload::Interface { cw, .. } => Some(cw),
            _ => None,
        }
    }
}

/// The three bulk regions cut out by the interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    Left,
    Middle,
    Right,
}

/// Region of a moving front. Between events moving fronts sit strictly away
/// from the interfaces; at an event instant a front emitted on an interface
/// belongs to the region its speed points into.
pub fn region_of(position: f64, speed: f64, config: &PhaseConfig) -> Region {
    if position < config.x_a || (position == config.x_a && speed < 0.0) {
        Region::Left
    } else if position > config.x_b || (position == config.x_b && speed > 0.0) {
        Region::Right
    } else {
        Region::Middle
    }
}
