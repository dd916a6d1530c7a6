//! CSV and plain-text emitters. Numbers use 6 significant digits.

use crate::error::{Error, Result};
use crate::mplus::{TransitionDecision, TransitionKind};
use crate::renewal::Trajectory;
use crate::sensitivity::SweepTable;
use crate::stats::{Statistic, Summary};

/// `%.6g`-style formatting: 6 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-4, 1e6)`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn summary_fields(s: &Summary) -> [String; 7] {
    [s.mean, s.sd, s.q05, s.q25, s.q50, s.q75, s.q95].map(format_sig6)
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per grid time per architecture.
pub fn trajectory_csv(series: &[(&str, &Trajectory)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["year", "architecture", "mean", "sd", "q05", "q25", "q50", "q75", "q95"])
        .map_err(csv_err)?;
    for (name, traj) in series {
        for (t, point) in traj.grid.iter().zip(&traj.points) {
            let mut record = vec![format_sig6(*t), name.to_string()];
            record.extend(summary_fields(&point.summary));
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    finish(w)
}

pub fn value_csv(traj: &Trajectory) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["year", "mean", "sd", "q05", "q25", "q50", "q75", "q95"])
        .map_err(csv_err)?;
    for (t, point) in traj.grid.iter().zip(&traj.points) {
        let mut record = vec![format_sig6(*t)];
        record.extend(summary_fields(&point.summary));
        w.write_record(&record).map_err(csv_err)?;
    }
    finish(w)
}

/// Sweep table followed by `# zero_crossing=...` comment lines.
pub fn sweep_csv(table: &SweepTable, stat: Statistic) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = table.axes.iter().map(String::as_str).collect();
    header.extend(["mean", "sd", "q05", "q95"]);
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let mut record: Vec<String> = row.axis_values.iter().copied().map(format_sig6).collect();
        let s = &row.summary;
        record.extend([s.mean, s.sd, s.q05, s.q95].map(format_sig6));
        w.write_record(&record).map_err(csv_err)?;
    }
    let mut out = finish(w)?;
    let stat_note = match stat {
        Statistic::Mean => String::new(),
        other => format!(" statistic={}", format!("{other:?}").to_lowercase()),
    };
    for (key, crossing) in table.zero_crossings(stat)? {
        let value = crossing.map_or_else(|| "none".to_string(), format_sig6);
        match (key, table.axes.get(1)) {
            (Some(k), Some(axis)) => {
                out.push_str(&format!("# zero_crossing={value} {axis}={}{stat_note}\n", format_sig6(k)))
            }
            _ => out.push_str(&format!("# zero_crossing={value}{stat_note}\n")),
        }
    }
    Ok(out)
}

pub fn decision_report(
    source: &str,
    target: &str,
    kind: Option<TransitionKind>,
    value: &Summary,
    decision: &TransitionDecision,
) -> String {
    let kind = kind.map_or_else(|| "not an adjacent-stage step".to_string(), |k| k.to_string());
    format!(
        "transition: {source} -> {target}\n\
         operator: {kind}\n\
         runs: {}\n\
         value_mean_kusd: {}\n\
         value_sd_kusd: {}\n\
         criterion: {}\n\
         statistic_kusd: {}\n\
         recommendation: {}\n",
        value.n,
        format_sig6(value.mean),
        format_sig6(value.sd),
        decision.criterion,
        format_sig6(decision.statistic),
        if decision.recommend { "transition" } else { "stay" },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(178_300.0), "178300");
        assert_eq!(format_sig6(-95_500.0), "-95500");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.5), "0.5");
        assert_eq!(format_sig6(181.873_075_307_8), "181.873");
        assert_eq!(format_sig6(1_234_567.0), "1.23457e+06");
        assert_eq!(format_sig6(999_999.6), "1e+06");
        assert_eq!(format_sig6(0.000_012_345_67), "1.23457e-05");
        assert_eq!(format_sig6(0.000_123_456_7), "0.000123457");
        assert_eq!(format_sig6(26_567_149.2), "2.65671e+07");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(-0.0), "0");
    }
}
