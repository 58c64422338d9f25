//! Radio propagation, KPI synthesis, serving-cell selection, and
//! per-link delay generation.

use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};

use super::scenario::{CellSite, OperatorNetwork};
use crate::data::{RSRP_RANGE, RSRQ_RANGE, SNR_RANGE};

/// Log-distance path-loss exponent.
pub const PATH_LOSS_EXPONENT: f64 = 3.5;

/// Reference distance of the path-loss model, meters.
pub const REFERENCE_DISTANCE_M: f64 = 100.0;

/// Shape parameter of the log-normal delay jitter (log-domain sigma).
pub const JITTER_SIGMA: f64 = 0.75;

/// Received power from one site: log-distance path loss from the site's
/// reference power plus the shadowing term, clamped to the RSRP
/// reporting range.
pub fn path_rsrp(site: &CellSite, distance_m: f64, shadow_db: f64) -> f64 {
    let d = distance_m.max(REFERENCE_DISTANCE_M);
    let loss_db = 10.0 * PATH_LOSS_EXPONENT * (d / REFERENCE_DISTANCE_M).log10();
    (site.ref_power_dbm - loss_db + shadow_db).clamp(RSRP_RANGE.0, RSRP_RANGE.1)
}

/// RSRQ synthesized from RSRP by an affine map plus measurement noise.
pub fn derive_rsrq(rsrp_dbm: f64, noise_db: f64) -> f64 {
    (-3.0 - (-40.0 - rsrp_dbm) / 10.0 + noise_db).clamp(RSRQ_RANGE.0, RSRQ_RANGE.1)
}

/// SNR synthesized from RSRP by an affine map plus measurement noise.
pub fn derive_snr(rsrp_dbm: f64, noise_db: f64) -> f64 {
    ((rsrp_dbm + 110.0) / 2.0 + noise_db).clamp(SNR_RANGE.0, SNR_RANGE.1)
}

/// AR(1)-correlated shadowing in dB (log-normal in linear units).
#[derive(Debug, Clone, Copy)]
pub struct ShadowingState {
    pub value_db: f64,
}

impl ShadowingState {
    /// Initialize at the stationary distribution.
    pub fn init<R: Rng>(sigma_db: f64, rng: &mut R) -> Self {
        let value_db = if sigma_db > 0.0 {
            Normal::new(0.0, sigma_db).expect("valid sigma").sample(rng)
        } else {
            0.0
        };
        Self { value_db }
    }

    /// Advance one second: `s' = corr * s + sqrt(1 - corr^2) * sigma * z`,
    /// which keeps the stationary standard deviation at `sigma_db`.
    pub fn step<R: Rng>(&mut self, corr: f64, sigma_db: f64, rng: &mut R) {
        let innovation_sd = sigma_db * (1.0 - corr * corr).max(0.0).sqrt();
        let z = if innovation_sd > 0.0 {
            Normal::new(0.0, innovation_sd)
                .expect("valid sigma")
                .sample(rng)
        } else {
            0.0
        };
        self.value_db = corr * self.value_db + z;
    }
}

/// Per-operator link state: serving site, shadowing, and the remaining
/// handover spike.
#[derive(Debug, Clone, Copy)]
pub struct LinkState {
    /// Index into the operator's site list.
    pub serving_site: usize,
    pub shadowing: ShadowingState,
    /// Remaining spike charge, ms; decays to zero over three samples.
    pub spike_remaining_ms: f64,
    /// Per-sample decay amount, ms.
    pub spike_step_ms: f64,
}

impl LinkState {
    pub fn new(serving_site: usize, shadowing: ShadowingState) -> Self {
        Self {
            serving_site,
            shadowing,
            spike_remaining_ms: 0.0,
            spike_step_ms: 0.0,
        }
    }

    /// Apply the per-sample spike decay, after the sample was emitted.
    pub fn decay_spike(&mut self) {
        self.spike_remaining_ms = (self.spike_remaining_ms - self.spike_step_ms).max(0.0);
    }
}

/// Switch the serving site if some candidate beats it by more than the
/// hysteresis. On a switch the link is charged an exponentially
/// distributed spike with the given mean; a new handover restarts any
/// spike still decaying. Returns whether a handover occurred.
pub fn update_serving<R: Rng>(
    state: &mut LinkState,
    site_rsrp_dbm: &[f64],
    hysteresis_db: f64,
    spike_mean_ms: f64,
    rng: &mut R,
) -> bool {
    debug_assert!(!site_rsrp_dbm.is_empty());
    let best = site_rsrp_dbm
        .iter()
        .enumerate()
        .max_by(|(ai, a), (bi, b)| a.total_cmp(b).then(bi.cmp(ai)))
        .map(|(i, _)| i)
        .expect("non-empty site list");
    if best == state.serving_site
        || site_rsrp_dbm[best] <= site_rsrp_dbm[state.serving_site] + hysteresis_db
    {
        return false;
    }
    state.serving_site = best;
    let spike = if spike_mean_ms > 0.0 {
        Exp::new(1.0 / spike_mean_ms)
            .expect("positive rate")
            .sample(rng)
    } else {
        0.0
    };
    state.spike_remaining_ms = spike;
    state.spike_step_ms = spike / 3.0;
    true
}

/// Stochastic per-link delay: base delay, per-kind service offset,
/// log-normal jitter with median `jitter_scale_ms`, and the remaining
/// handover spike.
pub fn link_delay<R: Rng>(
    operator: &OperatorNetwork,
    state: &LinkState,
    kind_offset_ms: f64,
    rng: &mut R,
) -> f64 {
    let jitter = if operator.jitter_scale_ms > 0.0 {
        LogNormal::new(operator.jitter_scale_ms.ln(), JITTER_SIGMA)
            .expect("valid parameters")
            .sample(rng)
    } else {
        0.0
    };
    operator.base_delay_ms + kind_offset_ms + jitter + state.spike_remaining_ms
}

/// Deterministic retransmission penalty for poor signal quality:
/// proportional to how far the SNR sits below the operator's
/// good-signal threshold.
pub fn quality_penalty(operator: &OperatorNetwork, snr_db: f64) -> f64 {
    operator.quality_penalty_ms_per_db * (operator.quality_snr_threshold_db - snr_db).max(0.0)
}

/// Deterministic penalty growing with train speed (Doppler and
/// handover-preparation overhead at speed).
pub fn speed_penalty(operator: &OperatorNetwork, speed_kmh: f64) -> f64 {
    operator.speed_penalty_ms_per_kmh * speed_kmh
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn site(ref_power: f64) -> CellSite {
        CellSite {
            operator_id: 1,
            lat: 61.0,
            lon: 25.0,
            ref_power_dbm: ref_power,
        }
    }

    fn operator(base: f64, jitter: f64) -> OperatorNetwork {
        OperatorNetwork {
            sites: vec![site(-60.0)],
            base_delay_ms: base,
            jitter_scale_ms: jitter,
            handover_spike_mean_ms: 300.0,
            handover_hysteresis_db: 3.0,
            shadowing_sigma_db: 6.0,
            shadowing_corr: 0.9,
            quality_penalty_ms_per_db: 0.0,
            quality_snr_threshold_db: 20.0,
            speed_penalty_ms_per_kmh: 0.0,
        }
    }

    #[test]
    fn rsrp_at_reference_distance_is_ref_power() {
        assert_eq!(path_rsrp(&site(-60.0), 100.0, 0.0), -60.0);
    }

    #[test]
    fn rsrp_at_ten_times_reference_loses_35_db() {
        let v = path_rsrp(&site(-60.0), 1000.0, 0.0);
        assert!((v - -95.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rsrp_is_always_in_reporting_range() {
        for (d, shadow) in [(1.0, 80.0), (1e7, -80.0), (250.0, 0.0), (5e4, 12.0)] {
            let v = path_rsrp(&site(-60.0), d, shadow);
            assert!((-140.0..=-40.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn kpi_derivations_clamp_to_ranges() {
        assert_eq!(derive_rsrq(-40.0, 0.0), -3.0);
        assert!((derive_rsrq(-140.0, 0.0) - -13.0).abs() < 1e-12);
        assert_eq!(derive_snr(-40.0, 0.0), 35.0);
        assert_eq!(derive_snr(-140.0, 0.0), -10.0);
        assert_eq!(derive_rsrq(-40.0, 99.0), -3.0);
        assert_eq!(derive_snr(-140.0, -99.0), -10.0);
    }

    #[test]
    fn candidate_within_hysteresis_does_not_switch() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        let switched = update_serving(&mut state, &[-90.0, -88.0], 3.0, 300.0, &mut rng);
        assert!(!switched);
        assert_eq!(state.serving_site, 0);
    }

    #[test]
    fn candidate_beyond_hysteresis_switches_and_charges_spike() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        let switched = update_serving(&mut state, &[-90.0, -86.0], 3.0, 300.0, &mut rng);
        assert!(switched);
        assert_eq!(state.serving_site, 1);
        assert!(state.spike_remaining_ms > 0.0);
        assert!((state.spike_step_ms - state.spike_remaining_ms / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_site_never_hands_over() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        for i in 0..1000 {
            let rsrp = -90.0 + (i % 17) as f64;
            assert!(!update_serving(&mut state, &[rsrp], 3.0, 300.0, &mut rng));
        }
    }

    #[test]
    fn spike_decays_to_zero_over_three_samples() {
        let mut state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        state.spike_remaining_ms = 300.0;
        state.spike_step_ms = 100.0;
        let mut seen = Vec::new();
        for _ in 0..4 {
            seen.push(state.spike_remaining_ms);
            state.decay_spike();
        }
        assert_eq!(seen, vec![300.0, 200.0, 100.0, 0.0]);
        assert_eq!(state.spike_remaining_ms, 0.0);
    }

    #[test]
    fn deterministic_components_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let op = operator(30.0, 0.0);
        let state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        assert_eq!(link_delay(&op, &state, 0.0, &mut rng), 30.0);
        assert_eq!(link_delay(&op, &state, 40.0, &mut rng), 70.0);
    }

    #[test]
    fn jitter_median_tracks_jitter_scale() {
        // Monte-Carlo check of the jitter parameterization: the sample
        // median of base + offset + jitter must sit within 5% of
        // base + offset + jitter_scale.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let op = operator(30.0, 6.0);
        let state = LinkState::new(0, ShadowingState { value_db: 0.0 });
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| link_delay(&op, &state, 10.0, &mut rng))
            .collect();
        draws.sort_by(|a, b| a.total_cmp(b));
        let median = draws[draws.len() / 2];
        let expected = 30.0 + 10.0 + 6.0;
        assert!(
            (median - expected).abs() / expected < 0.05,
            "median {median}, expected ~{expected}"
        );
    }
}
