//! CSV, plot-data and text renderings of a [`ResultTable`].

use std::io::Write;

use super::{ResultTable, POWER_METRICS};
use crate::AppError;

/// Shortest round-trip formatting; non-finite values as `nan`, `inf`, `-inf`.
fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Watts to dBm with two decimals; zero power gives `-inf`.
pub fn format_dbm(watts: f64) -> String {
    if watts == 0.0 {
        return "-inf".into();
    }
    if !(watts > 0.0) || !watts.is_finite() {
        return num(watts);
    }
    format!("{:.2}", 10.0 * (watts / 1e-3).log10())
}

pub const CSV_HEADER: [&str; 13] = [
    "scenario",
    "point",
    "x",
    "series",
    "method",
    "metric",
    "mean",
    "stderr",
    "n_trials",
    "n_feasible",
    "n_infeasible",
    "n_failed",
    "seed",
];

/// One row per (point, method, metric).
pub fn write_csv<W: Write>(rt: &ResultTable, out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &rt.rows {
        w.write_record([
            r.scenario.clone(),
            r.point.clone(),
            num(r.x),
            r.series.clone(),
            r.method.clone(),
            r.metric.clone(),
            num(r.mean),
            num(r.stderr),
            r.n_trials.to_string(),
            r.n_feasible.to_string(),
            r.n_infeasible.to_string(),
            r.n_failed.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `x, series, y, y_stderr` with series `method/metric/curve`.
pub fn write_plotdata<W: Write>(rt: &ResultTable, out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "series", "y", "y_stderr"])?;
    for r in &rt.rows {
        let series = format!("{}/{}/{}", r.method, r.metric, r.series);
        w.write_record([num(r.x), series, num(r.mean), num(r.stderr)])?;
    }
    w.flush()?;
    Ok(())
}

/// Tab-separated text rows in table order (scenario, sweep point, method).
/// With `to_db`, power metrics are shown in dBm and their standard error in
/// dB.
pub fn summarize(rt: &ResultTable, to_db: bool) -> Vec<String> {
    rt.rows
        .iter()
        .map(|r| {
            let (value, err) = if to_db && POWER_METRICS.contains(&r.metric.as_str()) {
                let err = if r.mean > 0.0 { 10.0 / std::f64::consts::LN_10 * r.stderr / r.mean } else { f64::NAN };
                (format_dbm(r.mean), format!("{err:.2}"))
            } else {
                (format!("{:.6}", r.mean), format!("{:.2e}", r.stderr))
            };
            let unit = if to_db && POWER_METRICS.contains(&r.metric.as_str()) { " dBm" } else { "" };
            format!(
                "{}\t{}\t{}\t{}\t{}{}\t+-{}\t{}/{} feasible",
                r.scenario, r.point, r.method, r.metric, value, unit, err, r.n_feasible, r.n_trials
            )
        })
        .collect()
}
