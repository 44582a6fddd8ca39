//! Simulated range sensor and the object server that republishes the
//! object list only when its membership changes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{Point, Pose};
use crate::world::OccupancyWorld;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerceptionError {
    #[error("invalid sensor parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorParams {
    /// Detection range, meters.
    pub range: f64,
    /// Ray-cast against occupied cells.
    pub occlusion: bool,
    pub period_ticks: u64,
}

impl Default for SensorParams {
    fn default() -> Self {
        Self {
            range: 5.0,
            occlusion: true,
            period_ticks: 5,
        }
    }
}

impl SensorParams {
    pub fn validate(&self) -> Result<(), PerceptionError> {
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(PerceptionError::InvalidParameter(format!(
                "range must be positive, got {}",
                self.range
            )));
        }
        if self.period_ticks == 0 {
            return Err(PerceptionError::InvalidParameter(
                "period_ticks must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Detected object names with a position snapshot each. Names iterate in
/// lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectList {
    pub tick: u64,
    pub entries: BTreeMap<String, Point>,
}

impl ObjectList {
    pub fn new(tick: u64) -> Self {
        Self {
            tick,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I, S>(tick: u64, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Point)>,
        S: Into<String>,
    {
        Self {
            tick,
            entries: entries.into_iter().map(|(n, p)| (n.into(), p)).collect(),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn position(&self, name: &str) -> Option<Point> {
        self.entries.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Short content hash of the name set, used in traces.
    pub fn name_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for name in self.names() {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
        }
        hex::encode(&hasher.finalize()[..8])
    }
}

/// Objects within range and, with occlusion on, with a free ray from the
/// robot.
pub fn sense(
    world: &OccupancyWorld,
    pose: Pose,
    params: &SensorParams,
    tick: u64,
) -> Result<ObjectList, PerceptionError> {
    params.validate()?;
    let origin = pose.point();
    if !world.is_free(origin) {
        return Err(PerceptionError::InvalidState(format!(
            "sensor pose ({:.3}, {:.3}) is in an occupied cell",
            pose.x, pose.y
        )));
    }
    let grid = world.grid();
    let entries = world
        .objects()
        .iter()
        .filter(|obj| origin.distance(&obj.point()) <= params.range)
        .filter(|obj| !params.occlusion || grid.segment_is_free(origin, obj.point()))
        .map(|obj| (obj.name.clone(), obj.point()));
    Ok(ObjectList::from_entries(tick, entries))
}

/// True iff the name sets differ.
pub fn list_changed(prev: &ObjectList, curr: &ObjectList) -> bool {
    !prev.entries.keys().eq(curr.entries.keys())
}

/// Caches the last published list between sensor periods.
#[derive(Debug, Clone)]
pub struct ObjectServer {
    params: SensorParams,
    current: Option<ObjectList>,
}

impl ObjectServer {
    pub fn new(params: SensorParams) -> Self {
        Self { params, current: None }
    }

    pub fn params(&self) -> &SensorParams {
        &self.params
    }

    pub fn is_sample_tick(&self, tick: u64) -> bool {
        tick.is_multiple_of(self.params.period_ticks)
    }

    /// Samples the sensor. Returns true when a new list was published: on
    /// the first sample and whenever membership changed. Positions of an
    /// unchanged list are refreshed silently.
    pub fn update(&mut self, world: &OccupancyWorld, pose: Pose, tick: u64) -> Result<bool, PerceptionError> {
        let fresh = sense(world, pose, &self.params, tick)?;
        let changed = self.current.as_ref().is_none_or(|prev| list_changed(prev, &fresh));
        match &mut self.current {
            Some(cur) if !changed => cur.entries = fresh.entries,
            slot => *slot = Some(fresh),
        }
        Ok(changed)
    }

    pub fn current(&self) -> Option<&ObjectList> {
        self.current.as_ref()
    }
}
