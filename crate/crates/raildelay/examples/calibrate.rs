//! Scratch calibration harness (not part of the deliverable surface).

use raildelay::data::{time_split, to_features, DelayKind};
use raildelay::metrics::{critical_count, r2, rmse, summary};
use raildelay::ml::{permutation_importance, train_preset, ModelPreset};
use raildelay::sim::{simulate, ScenarioConfig};
use std::time::Instant;

fn main() {
    let config = ScenarioConfig::default_scenario();
    let t0 = Instant::now();
    let out = simulate(&config).unwrap();
    println!("simulate: {:?} for {} samples", t0.elapsed(), out.pr.len());

    // Critical fractions per kind/mode.
    for kind in DelayKind::ALL {
        let thr = kind.critical_threshold_ms();
        let bq = out.bq.delays_of(kind);
        let pr = out.pr.delays_of(kind);
        let (bc, bp) = critical_count(&bq, thr).unwrap();
        let (pc, pp) = critical_count(&pr, thr).unwrap();
        let sb = summary(&bq).unwrap();
        let sp = summary(&pr).unwrap();
        println!(
            "{:<9} BQ crit {:>4} ({:.3}%) PR crit {:>3} ({:.3}%) | BQ mean {:7.2} med {:7.2} max {:9.2} | PR mean {:7.2} med {:7.2} max {:9.2}",
            kind.slug(), bc, bp, pc, pp, sb.mean, sb.median, sb.max, sp.mean, sp.median, sp.max
        );
    }

    // Model quality on 70/30 chronological split for Position and Tcp.
    for kind in [DelayKind::PositionReport, DelayKind::Tcp] {
        let (train, test) = time_split(&out.pr, 0.7).unwrap();
        let ftrain = to_features(&train, kind).unwrap();
        let ftest = to_features(&test, kind).unwrap();
        let mean_pred = vec![
            ftrain.targets.iter().sum::<f64>() / ftrain.targets.len() as f64;
            ftest.targets.len()
        ];
        let baseline = rmse(&ftest.targets, &mean_pred).unwrap();
        for preset in ModelPreset::ALL {
            let t0 = Instant::now();
            let model = train_preset(preset, &ftrain.features, &ftrain.targets, 42, Some(kind))
                .unwrap();
            let fit_time = t0.elapsed();
            let pred = model.predict(&ftest.features).unwrap();
            let hr2 = r2(&ftest.targets, &pred).unwrap().unwrap();
            let hrmse = rmse(&ftest.targets, &pred).unwrap();
            println!(
                "{:<9} {:<18} holdout r2 {:6.3} rmse {:7.3} (baseline {:7.3}, ratio {:.3}) fit {:?}",
                kind.slug(),
                preset.slug(),
                hr2,
                hrmse,
                baseline,
                hrmse / baseline,
                fit_time
            );
            if kind == DelayKind::PositionReport {
                let imp = permutation_importance(&model, &ftest.features, &ftest.targets, 3, 7)
                    .unwrap();
                let mut ranked: Vec<(usize, f64)> =
                    imp.iter().copied().enumerate().collect();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
                let speed_rank = ranked
                    .iter()
                    .position(|(i, _)| *i == 9)
                    .map(|p| p + 1)
                    .unwrap();
                let top: Vec<String> = ranked
                    .iter()
                    .take(4)
                    .map(|(i, v)| {
                        format!("{}={:.3}", ftest.features.column_names()[*i], v)
                    })
                    .collect();
                println!("    speed rank {} | top: {}", speed_rank, top.join(", "));
            }
        }
    }
}
