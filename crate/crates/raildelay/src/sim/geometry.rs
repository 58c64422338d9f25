//! Track geometry and train movement.

use super::SimError;

const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance between two (lat, lon) points in meters.
pub fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().asin()
}

/// A railway track as a polyline with cumulative chainage.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    vertices: Vec<(f64, f64)>,
    chainage_km: Vec<f64>,
}

impl Track {
    /// Build a track from (lat, lon) vertices; chainage accumulates the
    /// great-circle length of each segment.
    pub fn from_vertices(vertices: Vec<(f64, f64)>) -> Result<Self, SimError> {
        if vertices.len() < 2 {
            return Err(SimError::TrackTooShort(vertices.len()));
        }
        let mut chainage_km = Vec::with_capacity(vertices.len());
        chainage_km.push(0.0);
        for i in 1..vertices.len() {
            let d_km = haversine_m(vertices[i - 1], vertices[i]) / 1000.0;
            if d_km <= 0.0 {
                return Err(SimError::DegenerateSegment(i - 1, i));
            }
            chainage_km.push(chainage_km[i - 1] + d_km);
        }
        Ok(Self {
            vertices,
            chainage_km,
        })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn length_km(&self) -> f64 {
        *self.chainage_km.last().expect("track has vertices")
    }

    /// Interpolated (lat, lon) at a chainage, clamped to the track ends.
    pub fn position_at(&self, chainage_km: f64) -> (f64, f64) {
        let c = chainage_km.clamp(0.0, self.length_km());
        let idx = match self
            .chainage_km
            .binary_search_by(|probe| probe.total_cmp(&c))
        {
            Ok(i) => return self.vertices[i],
            Err(i) => i,
        };
        // c lies strictly inside segment (idx-1, idx).
        let (c0, c1) = (self.chainage_km[idx - 1], self.chainage_km[idx]);
        let w = (c - c0) / (c1 - c0);
        let (a, b) = (self.vertices[idx - 1], self.vertices[idx]);
        (a.0 + (b.0 - a.0) * w, a.1 + (b.1 - a.1) * w)
    }
}

/// One piece of a piecewise-constant speed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSegment {
    pub start_s: f64,
    pub speed_kmh: f64,
}

/// A train run: speed profile, duration, and starting chainage.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub segments: Vec<SpeedSegment>,
    pub duration_s: u64,
    pub start_chainage_km: f64,
}

impl TrainRun {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.duration_s == 0 {
            return Err(SimError::InvalidScenario("run duration is zero".into()));
        }
        if self.segments.is_empty() {
            return Err(SimError::InvalidScenario("speed profile is empty".into()));
        }
        if self.segments[0].start_s != 0.0 {
            return Err(SimError::InvalidScenario(
                "speed profile must start at t = 0".into(),
            ));
        }
        for pair in self.segments.windows(2) {
            if pair[1].start_s <= pair[0].start_s {
                return Err(SimError::InvalidScenario(
                    "speed profile start times must strictly increase".into(),
                ));
            }
        }
        for seg in &self.segments {
            if !(seg.speed_kmh >= 0.0) || !seg.speed_kmh.is_finite() {
                return Err(SimError::InvalidScenario(format!(
                    "invalid speed {} km/h",
                    seg.speed_kmh
                )));
            }
        }
        if self.start_chainage_km < 0.0 {
            return Err(SimError::InvalidScenario(
                "start chainage is negative".into(),
            ));
        }
        Ok(())
    }

    /// Profile speed at time `t_s`.
    pub fn speed_at(&self, t_s: f64) -> f64 {
        let mut speed = self.segments[0].speed_kmh;
        for seg in &self.segments {
            if seg.start_s <= t_s {
                speed = seg.speed_kmh;
            } else {
                break;
            }
        }
        speed
    }

    /// Distance travelled from the run start up to time `t_s`, in km.
    pub fn distance_km(&self, t_s: f64) -> f64 {
        let mut total = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let seg_end = self
                .segments
                .get(i + 1)
                .map_or(f64::INFINITY, |next| next.start_s);
            let lo = seg.start_s.min(t_s);
            let hi = seg_end.min(t_s);
            if hi > lo {
                total += seg.speed_kmh * (hi - lo) / 3600.0;
            }
        }
        total
    }
}
