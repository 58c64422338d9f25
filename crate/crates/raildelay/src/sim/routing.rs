//! The two routing disciplines: packet replication (first arrival) and
//! best quality (periodic strongest-signal selection).

/// Packet replication: every packet goes out on all available links and
/// the first arrival wins, so the delay is the minimum link delay.
/// Returns `None` when every link is unavailable (the sample is dropped
/// and leaves a gap).
pub fn route_pr(link_delays_ms: &[Option<f64>]) -> Option<f64> {
    link_delays_ms
        .iter()
        .flatten()
        .copied()
        .min_by(|a, b| a.total_cmp(b))
}

/// Best-quality router state: holds the operator picked at the last
/// assessment until the next one, even if conditions change meanwhile.
#[derive(Debug, Clone, Default)]
pub struct BqRouter {
    selected: Option<usize>,
}

impl BqRouter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Route one sample at time `t_s`. At assessment instants
    /// (`t_s % period == 0`) the router re-selects the operator with the
    /// strongest RSRP and the status check adds `overhead_ms` to every
    /// sample sent at that instant. Between assessments the stale
    /// selection persists. Returns the delay and the operator used.
    pub fn route(
        &mut self,
        t_s: u64,
        link_delays_ms: &[f64],
        rsrp_dbm: &[f64],
        assessment_period_s: u64,
        overhead_ms: f64,
    ) -> (f64, usize) {
        debug_assert_eq!(link_delays_ms.len(), rsrp_dbm.len());
        let assessing = t_s % assessment_period_s == 0;
        if assessing || self.selected.is_none() {
            let strongest = rsrp_dbm
                .iter()
                .enumerate()
                .max_by(|(ai, a), (bi, b)| a.total_cmp(b).then(bi.cmp(ai)))
                .map(|(i, _)| i)
                .expect("at least one operator");
            self.selected = Some(strongest);
        }
        let selected = self.selected.expect("set above");
        let overhead = if assessing { overhead_ms } else { 0.0 };
        (link_delays_ms[selected] + overhead, selected)
    }
}
