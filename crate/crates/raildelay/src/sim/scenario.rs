//! Scenario configuration: operator networks, cell sites, routing
//! constants, the bundled default campaign, and the sectioned key-value
//! config file format.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::geometry::{SpeedSegment, Track, TrainRun};
use super::SimError;
use crate::data::DelayKind;

/// One cell site of an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSite {
    /// Owning operator, 1-based.
    pub operator_id: u8,
    pub lat: f64,
    pub lon: f64,
    /// Received power at the reference distance, dBm.
    pub ref_power_dbm: f64,
}

/// Radio and delay parameterization of one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorNetwork {
    pub sites: Vec<CellSite>,
    pub base_delay_ms: f64,
    /// Median of the log-normal delay jitter, ms.
    pub jitter_scale_ms: f64,
    pub handover_spike_mean_ms: f64,
    pub handover_hysteresis_db: f64,
    pub shadowing_sigma_db: f64,
    /// Per-second AR(1) coefficient of the shadowing process, in [0, 1).
    pub shadowing_corr: f64,
    /// Retransmission penalty per dB of SNR below the threshold, ms/dB.
    pub quality_penalty_ms_per_db: f64,
    /// SNR above which the quality penalty vanishes, dB.
    pub quality_snr_threshold_db: f64,
    /// Delay penalty per km/h of train speed, ms/(km/h).
    pub speed_penalty_ms_per_kmh: f64,
}

impl OperatorNetwork {
    fn validate(&self, index: usize) -> Result<(), SimError> {
        let label = format!("operator{}", index + 1);
        let fail = |reason: String| Err(SimError::InvalidScenario(reason));
        if self.sites.is_empty() {
            return fail(format!("{label} has no sites"));
        }
        for site in &self.sites {
            if site.operator_id as usize != index + 1 {
                return fail(format!(
                    "{label} lists a site owned by operator{}",
                    site.operator_id
                ));
            }
            if !(-70.0..=-40.0).contains(&site.ref_power_dbm) {
                return fail(format!(
                    "{label} site ref_power {} outside [-70, -40]",
                    site.ref_power_dbm
                ));
            }
        }
        if !(self.base_delay_ms > 0.0) {
            return fail(format!("{label} base_delay_ms must be positive"));
        }
        if self.jitter_scale_ms < 0.0 {
            return fail(format!("{label} jitter_scale_ms must be non-negative"));
        }
        if self.handover_spike_mean_ms < 0.0 {
            return fail(format!("{label} handover_spike_mean_ms must be non-negative"));
        }
        if self.handover_hysteresis_db < 0.0 {
            return fail(format!("{label} handover_hysteresis_db must be non-negative"));
        }
        if self.shadowing_sigma_db < 0.0 {
            return fail(format!("{label} shadowing_sigma_db must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.shadowing_corr) {
            return fail(format!("{label} shadowing_corr outside [0, 1)"));
        }
        if self.quality_penalty_ms_per_db < 0.0 || self.speed_penalty_ms_per_kmh < 0.0 {
            return fail(format!("{label} penalty coefficients must be non-negative"));
        }
        Ok(())
    }
}

/// Additive per-kind service time, ms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayOffsets {
    values: [f64; 5],
}

impl DelayOffsets {
    pub fn get(&self, kind: DelayKind) -> f64 {
        self.values[kind.index()]
    }

    pub fn set(&mut self, kind: DelayKind, ms: f64) {
        self.values[kind.index()] = ms;
    }
}

/// Full parameterization of a simulated measurement campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub track: Track,
    pub operators: [OperatorNetwork; 3],
    pub run: TrainRun,
    pub assessment_period_s: u64,
    pub assessment_overhead_ms: f64,
    pub delay_offsets: DelayOffsets,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.assessment_period_s < 1 {
            return Err(SimError::InvalidScenario(
                "assessment_period_s must be at least 1".into(),
            ));
        }
        if self.assessment_overhead_ms < 0.0 || !self.assessment_overhead_ms.is_finite() {
            return Err(SimError::InvalidScenario(
                "assessment_overhead_ms must be non-negative".into(),
            ));
        }
        for kind in DelayKind::ALL {
            if self.delay_offsets.get(kind) < 0.0 {
                return Err(SimError::InvalidScenario(format!(
                    "offset_{}_ms must be non-negative",
                    kind.slug()
                )));
            }
        }
        for (i, operator) in self.operators.iter().enumerate() {
            operator.validate(i)?;
        }
        self.run.validate()?;
        if self.run.start_chainage_km > self.track.length_km() {
            return Err(SimError::RunBeyondTrack {
                start_km: self.run.start_chainage_km,
                track_km: self.track.length_km(),
            });
        }
        Ok(())
    }

    /// The bundled default campaign: a ~770 km two-lobe track crossing
    /// the 25.5°E regional boundary, three operators with sites every
    /// 4.6-5.9 km, and a 20,000 s run over a varied speed profile.
    pub fn default_scenario() -> ScenarioConfig {
        let track = default_track();
        let operators = default_operators(&track);
        let run = TrainRun {
            segments: vec![
                SpeedSegment { start_s: 0.0, speed_kmh: 80.0 },
                SpeedSegment { start_s: 2500.0, speed_kmh: 120.0 },
                SpeedSegment { start_s: 5000.0, speed_kmh: 160.0 },
                SpeedSegment { start_s: 7500.0, speed_kmh: 60.0 },
                SpeedSegment { start_s: 10000.0, speed_kmh: 180.0 },
                SpeedSegment { start_s: 12500.0, speed_kmh: 100.0 },
                SpeedSegment { start_s: 15000.0, speed_kmh: 140.0 },
                SpeedSegment { start_s: 17500.0, speed_kmh: 120.0 },
            ],
            duration_s: 20_000,
            start_chainage_km: 0.0,
        };
        let mut delay_offsets = DelayOffsets::default();
        delay_offsets.set(DelayKind::PositionReport, 15.0);
        delay_offsets.set(DelayKind::MovementAuthority, 40.0);
        delay_offsets.set(DelayKind::Tcp, 0.0);
        delay_offsets.set(DelayKind::Http, 35.0);
        delay_offsets.set(DelayKind::Dns, 5.0);
        ScenarioConfig {
            track,
            operators,
            run,
            assessment_period_s: 5,
            assessment_overhead_ms: 20.0,
            delay_offsets,
            seed: 42,
        }
    }
}

fn default_track() -> Track {
    // Two-lobe west-to-east path; crosses 25.5°E about a quarter in.
    let n = 48;
    let vertices: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            let lon = 23.6 + 5.6 * s;
            let lat = 61.1 + 0.85 * (std::f64::consts::TAU * 2.0 * s).sin();
            (lat, lon)
        })
        .collect();
    Track::from_vertices(vertices).expect("default track is valid")
}

fn default_operators(track: &Track) -> [OperatorNetwork; 3] {
    // Infrastructure layout is fixed; it does not follow the scenario seed.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5175_17E5);
    let spacing_km = [4.6, 5.2, 5.9];
    let phase_km = [0.0, 1.8, 3.4];
    let base_delay_ms = [28.0, 33.0, 38.0];
    let jitter_scale_ms = [4.0, 5.0, 6.0];

    std::array::from_fn(|op| {
        let mut sites = Vec::new();
        let mut chainage = phase_km[op];
        while chainage <= track.length_km() {
            let (lat, lon) = track.position_at(chainage);
            let lat = lat + rng.random_range(-0.018..0.018);
            let lon = lon + rng.random_range(-0.03..0.03);
            let ref_power_dbm = rng.random_range(-58.0..-52.0);
            sites.push(CellSite {
                operator_id: op as u8 + 1,
                lat,
                lon,
                ref_power_dbm,
            });
            chainage += spacing_km[op];
        }
        OperatorNetwork {
            sites,
            base_delay_ms: base_delay_ms[op],
            jitter_scale_ms: jitter_scale_ms[op],
            handover_spike_mean_ms: 300.0,
            handover_hysteresis_db: 3.0,
            shadowing_sigma_db: 6.0,
            shadowing_corr: 0.9,
            quality_penalty_ms_per_db: 1.2,
            quality_snr_threshold_db: 20.0,
            speed_penalty_ms_per_kmh: 0.25,
        }
    })
}

/// Render a scenario as the sectioned key-value config format; inverse
/// of [`parse_scenario_file`].
pub fn write_scenario_file(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    out.push_str("# raildelay scenario\n\n[track]\n");
    for (lat, lon) in config.track.vertices() {
        out.push_str(&format!("vertex = {lat},{lon}\n"));
    }
    for (i, op) in config.operators.iter().enumerate() {
        out.push_str(&format!("\n[operator{}]\n", i + 1));
        out.push_str(&format!("base_delay_ms = {}\n", op.base_delay_ms));
        out.push_str(&format!("jitter_scale_ms = {}\n", op.jitter_scale_ms));
        out.push_str(&format!(
            "handover_spike_mean_ms = {}\n",
            op.handover_spike_mean_ms
        ));
        out.push_str(&format!(
            "handover_hysteresis_db = {}\n",
            op.handover_hysteresis_db
        ));
        out.push_str(&format!("shadowing_sigma_db = {}\n", op.shadowing_sigma_db));
        out.push_str(&format!("shadowing_corr = {}\n", op.shadowing_corr));
        out.push_str(&format!(
            "quality_penalty_ms_per_db = {}\n",
            op.quality_penalty_ms_per_db
        ));
        out.push_str(&format!(
            "quality_snr_threshold_db = {}\n",
            op.quality_snr_threshold_db
        ));
        out.push_str(&format!(
            "speed_penalty_ms_per_kmh = {}\n",
            op.speed_penalty_ms_per_kmh
        ));
        for site in &op.sites {
            out.push_str(&format!(
                "site = {},{},{}\n",
                site.lat, site.lon, site.ref_power_dbm
            ));
        }
    }
    out.push_str("\n[run]\n");
    out.push_str(&format!("duration_s = {}\n", config.run.duration_s));
    out.push_str(&format!(
        "start_chainage_km = {}\n",
        config.run.start_chainage_km
    ));
    for seg in &config.run.segments {
        out.push_str(&format!("speed = {},{}\n", seg.start_s, seg.speed_kmh));
    }
    out.push_str("\n[routing]\n");
    out.push_str(&format!(
        "assessment_period_s = {}\n",
        config.assessment_period_s
    ));
    out.push_str(&format!(
        "assessment_overhead_ms = {}\n",
        config.assessment_overhead_ms
    ));
    for kind in DelayKind::ALL {
        out.push_str(&format!(
            "offset_{}_ms = {}\n",
            kind.slug(),
            config.delay_offsets.get(kind)
        ));
    }
    out.push_str(&format!("\n[seed]\nvalue = {}\n", config.seed));
    out
}

#[derive(Default)]
struct OperatorDraft {
    sites: Vec<CellSite>,
    base_delay_ms: Option<f64>,
    jitter_scale_ms: Option<f64>,
    handover_spike_mean_ms: Option<f64>,
    handover_hysteresis_db: Option<f64>,
    shadowing_sigma_db: Option<f64>,
    shadowing_corr: Option<f64>,
    quality_penalty_ms_per_db: Option<f64>,
    quality_snr_threshold_db: Option<f64>,
    speed_penalty_ms_per_kmh: Option<f64>,
}

/// Parse the sectioned key-value scenario format. Unknown sections and
/// keys are hard errors with their line number.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioConfig, SimError> {
    let mut vertices: Vec<(f64, f64)> = Vec::new();
    let mut operators: [OperatorDraft; 3] = Default::default();
    let mut duration_s: Option<u64> = None;
    let mut start_chainage_km: Option<f64> = None;
    let mut segments: Vec<SpeedSegment> = Vec::new();
    let mut assessment_period_s: Option<u64> = None;
    let mut assessment_overhead_ms: Option<f64> = None;
    let mut delay_offsets = DelayOffsets::default();
    let mut seed: Option<u64> = None;

    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fail = |reason: String| -> SimError {
            SimError::ConfigParse {
                line: line_no,
                reason,
            }
        };
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| fail("unterminated section header".into()))?
                .trim();
            match name {
                "track" | "operator1" | "operator2" | "operator3" | "run" | "routing"
                | "seed" => section = Some(name.to_string()),
                other => return Err(fail(format!("unknown section '{other}'"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| fail(format!("expected 'key = value', found '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = |v: &str, what: &str| -> Result<f64, SimError> {
            v.parse::<f64>()
                .map_err(|_| fail(format!("{what} '{v}' is not a number")))
        };

        match section.as_deref() {
            None => return Err(fail(format!("key '{key}' before any section"))),
            Some("track") => match key {
                "vertex" => {
                    let (lat, lon) = value
                        .split_once(',')
                        .ok_or_else(|| fail("vertex expects 'lat,lon'".into()))?;
                    vertices.push((
                        parse_f64(lat.trim(), "vertex lat")?,
                        parse_f64(lon.trim(), "vertex lon")?,
                    ));
                }
                other => return Err(fail(format!("unknown track key '{other}'"))),
            },
            Some(op_section) if op_section.starts_with("operator") => {
                let index = op_section["operator".len()..]
                    .parse::<usize>()
                    .expect("validated section name")
                    - 1;
                let draft = &mut operators[index];
                match key {
                    "base_delay_ms" => draft.base_delay_ms = Some(parse_f64(value, key)?),
                    "jitter_scale_ms" => draft.jitter_scale_ms = Some(parse_f64(value, key)?),
                    "handover_spike_mean_ms" => {
                        draft.handover_spike_mean_ms = Some(parse_f64(value, key)?)
                    }
                    "handover_hysteresis_db" => {
                        draft.handover_hysteresis_db = Some(parse_f64(value, key)?)
                    }
                    "shadowing_sigma_db" => draft.shadowing_sigma_db = Some(parse_f64(value, key)?),
                    "shadowing_corr" => draft.shadowing_corr = Some(parse_f64(value, key)?),
                    "quality_penalty_ms_per_db" => {
                        draft.quality_penalty_ms_per_db = Some(parse_f64(value, key)?)
                    }
                    "quality_snr_threshold_db" => {
                        draft.quality_snr_threshold_db = Some(parse_f64(value, key)?)
                    }
                    "speed_penalty_ms_per_kmh" => {
                        draft.speed_penalty_ms_per_kmh = Some(parse_f64(value, key)?)
                    }
                    "site" => {
                        let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                        if parts.len() != 3 {
                            return Err(fail("site expects 'lat,lon,ref_power_dbm'".into()));
                        }
                        draft.sites.push(CellSite {
                            operator_id: index as u8 + 1,
                            lat: parse_f64(parts[0], "site lat")?,
                            lon: parse_f64(parts[1], "site lon")?,
                            ref_power_dbm: parse_f64(parts[2], "site ref_power")?,
                        });
                    }
                    other => return Err(fail(format!("unknown operator key '{other}'"))),
                }
            }
            Some("run") => match key {
                "duration_s" => {
                    duration_s = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| fail(format!("duration_s '{value}' is not an integer")))?,
                    )
                }
                "start_chainage_km" => start_chainage_km = Some(parse_f64(value, key)?),
                "speed" => {
                    let (start, speed) = value
                        .split_once(',')
                        .ok_or_else(|| fail("speed expects 'start_s,speed_kmh'".into()))?;
                    segments.push(SpeedSegment {
                        start_s: parse_f64(start.trim(), "speed start_s")?,
                        speed_kmh: parse_f64(speed.trim(), "speed_kmh")?,
                    });
                }
                other => return Err(fail(format!("unknown run key '{other}'"))),
            },
            Some("routing") => match key {
                "assessment_period_s" => {
                    assessment_period_s = Some(value.parse::<u64>().map_err(|_| {
                        fail(format!("assessment_period_s '{value}' is not an integer"))
                    })?)
                }
                "assessment_overhead_ms" => {
                    assessment_overhead_ms = Some(parse_f64(value, key)?)
                }
                _ => {
                    let kind = key
                        .strip_prefix("offset_")
                        .and_then(|rest| rest.strip_suffix("_ms"))
                        .and_then(|slug| slug.parse::<DelayKind>().ok())
                        .ok_or_else(|| fail(format!("unknown routing key '{key}'")))?;
                    delay_offsets.set(kind, parse_f64(value, key)?);
                }
            },
            Some("seed") => match key {
                "value" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| fail(format!("seed '{value}' is not an integer")))?,
                    )
                }
                other => return Err(fail(format!("unknown seed key '{other}'"))),
            },
            Some(other) => unreachable!("section '{other}' was validated"),
        }
    }

    let missing = |what: &str| SimError::InvalidScenario(format!("missing {what}"));
    let track = Track::from_vertices(vertices)?;
    for (i, draft) in operators.iter().enumerate() {
        if draft.base_delay_ms.is_none() {
            return Err(missing(&format!("operator{} base_delay_ms", i + 1)));
        }
    }
    let operators: [OperatorNetwork; 3] = std::array::from_fn(|i| {
        let draft = &operators[i];
        OperatorNetwork {
            sites: draft.sites.clone(),
            base_delay_ms: draft.base_delay_ms.unwrap_or(0.0),
            jitter_scale_ms: draft.jitter_scale_ms.unwrap_or(0.0),
            handover_spike_mean_ms: draft.handover_spike_mean_ms.unwrap_or(0.0),
            handover_hysteresis_db: draft.handover_hysteresis_db.unwrap_or(0.0),
            shadowing_sigma_db: draft.shadowing_sigma_db.unwrap_or(0.0),
            shadowing_corr: draft.shadowing_corr.unwrap_or(0.0),
            quality_penalty_ms_per_db: draft.quality_penalty_ms_per_db.unwrap_or(0.0),
            quality_snr_threshold_db: draft.quality_snr_threshold_db.unwrap_or(20.0),
            speed_penalty_ms_per_kmh: draft.speed_penalty_ms_per_kmh.unwrap_or(0.0),
        }
    });
    let run = TrainRun {
        segments,
        duration_s: duration_s.ok_or_else(|| missing("run duration_s"))?,
        start_chainage_km: start_chainage_km.unwrap_or(0.0),
    };
    let config = ScenarioConfig {
        track,
        operators,
        run,
        assessment_period_s: assessment_period_s.unwrap_or(5),
        assessment_overhead_ms: assessment_overhead_ms.unwrap_or(20.0),
        delay_offsets,
        seed: seed.ok_or_else(|| missing("seed"))?,
    };
    config.validate()?;
    Ok(config)
}
