//! The campaign loop: advances the train second by second, evolves the
//! per-operator radio state, draws one shared per-link delay realization,
//! and routes it through both disciplines.
//!
//! BQ and PR datasets are built from common random numbers: identical
//! timestamps, positions, KPIs, and per-link delays, differing only in
//! routing. That makes `bq >= pr` hold exactly at every sample.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::geometry::haversine_m;
use super::radio::{
    derive_rsrq, derive_snr, link_delay, path_rsrp, quality_penalty, speed_penalty,
    update_serving, LinkState, ShadowingState,
};
use super::routing::{route_pr, BqRouter};
use super::scenario::ScenarioConfig;
use super::SimError;
use crate::data::{Dataset, DelayKind, DelayValues, MeasurementRecord, Mode, OperatorKpi};

/// RSRQ measurement-noise standard deviation, dB.
const RSRQ_NOISE_SD: f64 = 0.4;
/// SNR measurement-noise standard deviation, dB.
const SNR_NOISE_SD: f64 = 0.8;

/// The paired outputs of one simulated campaign.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub bq: Dataset,
    pub pr: Dataset,
    /// Handover events per operator over the run.
    pub handovers: [u64; 3],
}

/// Per-link delay totals behind one routed sample, for audits.
#[derive(Debug, Clone, Copy)]
pub struct LinkSample {
    pub t_s: u64,
    pub kind: DelayKind,
    pub totals_ms: [f64; 3],
}

/// Run a campaign and keep the per-link delay trace.
pub fn simulate_traced(config: &ScenarioConfig) -> Result<(SimOutput, Vec<LinkSample>), SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let track = &config.track;
    let run = &config.run;

    let mut bq = Dataset::new(Mode::BestQuality);
    let mut pr = Dataset::new(Mode::PacketReplication);
    let mut trace = Vec::new();
    let mut router = BqRouter::new();
    let mut handovers = [0u64; 3];
    let noise =
        |sd: f64, rng: &mut ChaCha8Rng| Normal::new(0.0, sd).expect("valid sd").sample(rng);

    // Initial link state at the t = 0 position: stationary shadowing and
    // the strongest site serving, with no handover charged.
    let start = track.position_at(run.start_chainage_km);
    let mut links: Vec<LinkState> = config
        .operators
        .iter()
        .map(|op| {
            let shadowing = ShadowingState::init(op.shadowing_sigma_db, &mut rng);
            let serving = op
                .sites
                .iter()
                .enumerate()
                .map(|(i, site)| {
                    let d = haversine_m((site.lat, site.lon), start);
                    (i, path_rsrp(site, d, shadowing.value_db))
                })
                .max_by(|(ai, a), (bi, b)| a.total_cmp(b).then(bi.cmp(ai)))
                .map(|(i, _)| i)
                .expect("operator has sites");
            LinkState::new(serving, shadowing)
        })
        .collect();

    for t in 0..run.duration_s {
        let chainage = run.start_chainage_km + run.distance_km(t as f64);
        if chainage > track.length_km() + 1e-9 {
            break; // run truncates at the end of the track
        }
        let position = track.position_at(chainage);
        let speed = run.speed_at(t as f64);

        // Radio state and KPIs, in operator order.
        let mut kpis = [OperatorKpi {
            rsrp: 0.0,
            rsrq: 0.0,
            snr: 0.0,
        }; 3];
        for (op_index, op) in config.operators.iter().enumerate() {
            let state = &mut links[op_index];
            if t > 0 {
                state
                    .shadowing
                    .step(op.shadowing_corr, op.shadowing_sigma_db, &mut rng);
            }
            let site_rsrp: Vec<f64> = op
                .sites
                .iter()
                .map(|site| {
                    let d = haversine_m((site.lat, site.lon), position);
                    path_rsrp(site, d, state.shadowing.value_db)
                })
                .collect();
            if update_serving(
                state,
                &site_rsrp,
                op.handover_hysteresis_db,
                op.handover_spike_mean_ms,
                &mut rng,
            ) {
                handovers[op_index] += 1;
            }
            let rsrp = site_rsrp[state.serving_site];
            kpis[op_index] = OperatorKpi {
                rsrp,
                rsrq: derive_rsrq(rsrp, noise(RSRQ_NOISE_SD, &mut rng)),
                snr: derive_snr(rsrp, noise(SNR_NOISE_SD, &mut rng)),
            };
        }
        let rsrp_by_op: Vec<f64> = kpis.iter().map(|k| k.rsrp).collect();

        // One shared link-delay realization per sampled kind, routed
        // through both disciplines.
        let mut bq_delays = DelayValues::new();
        let mut pr_delays = DelayValues::new();
        for kind in DelayKind::ALL {
            if !kind.sampled_at(t as f64) {
                continue;
            }
            let mut totals = [0.0f64; 3];
            for (op_index, op) in config.operators.iter().enumerate() {
                totals[op_index] = link_delay(
                    op,
                    &links[op_index],
                    config.delay_offsets.get(kind),
                    &mut rng,
                ) + quality_penalty(op, kpis[op_index].snr)
                    + speed_penalty(op, speed);
            }
            let pr_ms = route_pr(&totals.map(Some)).expect("three live links");
            let (bq_ms, _) = router.route(
                t,
                &totals,
                &rsrp_by_op,
                config.assessment_period_s,
                config.assessment_overhead_ms,
            );
            pr_delays.set(kind, pr_ms);
            bq_delays.set(kind, bq_ms);
            trace.push(LinkSample {
                t_s: t,
                kind,
                totals_ms: totals,
            });
        }
        for state in &mut links {
            state.decay_spike();
        }

        let record = |mode: Mode, delays: DelayValues| MeasurementRecord {
            timestamp_s: t as f64,
            lat: position.0,
            lon: position.1,
            chainage_km: chainage,
            speed_kmh: speed,
            kpis: [Some(kpis[0]), Some(kpis[1]), Some(kpis[2])],
            delays,
            mode,
        };
        bq.push(record(Mode::BestQuality, bq_delays))?;
        pr.push(record(Mode::PacketReplication, pr_delays))?;
    }

    Ok((SimOutput { bq, pr, handovers }, trace))
}

/// Run a campaign; see [`simulate_traced`] for the auditable variant.
pub fn simulate(config: &ScenarioConfig) -> Result<SimOutput, SimError> {
    simulate_traced(config).map(|(output, _)| output)
}
