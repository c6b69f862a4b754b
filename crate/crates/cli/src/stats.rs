//! Census-style summaries rebuilt from a scan listing.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::Serialize;

use markoff_core::scan::{default_sample_points, LevelRow, SeriesPoint, CLASS_MODULI};

#[derive(Debug, Serialize)]
pub struct ClassShare {
    pub residue: u64,
    pub count: u64,
    pub percent: f64,
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub schema: &'static str,
    pub k_min: u64,
    pub k_max: u64,
    /// Admissible levels, 1, 2 and 4 included.
    pub admissible: u64,
    pub exceptional: u64,
    pub generic: u64,
    pub hf: u64,
    pub hf_percent: f64,
    /// modulus -> share of Hasse failures per residue
    pub hf_by_class: BTreeMap<u64, Vec<ClassShare>>,
    /// h -> number of generic levels
    pub h_histogram: BTreeMap<u64, u64>,
    /// `n(h+1)/n(h)` for consecutive populated rows
    pub h_ratios: Vec<(u64, f64)>,
    pub percent_series: Vec<SeriesPoint>,
}

pub fn summarize(rows: &[LevelRow]) -> Result<Stats> {
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else { bail!("empty scan listing") };
    let (k_min, k_max) = (first.k, last.k);
    if rows.windows(2).any(|w| w[1].k != w[0].k + 1) {
        bail!("scan listing is not a contiguous increasing range");
    }
    let points = default_sample_points(k_max, 1);
    let mut series = Vec::new();
    let mut by_class: BTreeMap<u64, Vec<u64>> = CLASS_MODULI.iter().map(|&m| (m, vec![0; m as usize])).collect();
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let (mut admissible, mut exceptional, mut generic, mut hf) = (0u64, 0u64, 0u64, 0u64);
    for r in rows {
        if !r.verdict.starts_with("NonAdmissible") {
            admissible += 1;
        }
        if r.verdict.starts_with("Exceptional") {
            exceptional += 1;
        }
        if r.verdict == "Generic" {
            generic += 1;
            let Some(h) = r.h else { bail!("generic level {} without h", r.k) };
            *hist.entry(h).or_default() += 1;
        }
        if r.hasse_failure {
            hf += 1;
            for (m, v) in by_class.iter_mut() {
                v[(r.k % m) as usize] += 1;
            }
        }
        if points.contains(&r.k) {
            series.push(SeriesPoint { k: r.k, hf, admissible, percent: 100.0 * hf as f64 / admissible as f64 });
        }
    }
    let pct = |n: u64, d: u64| if d == 0 { 0.0 } else { 100.0 * n as f64 / d as f64 };
    let hf_by_class = by_class
        .into_iter()
        .map(|(m, v)| {
            let shares =
                v.iter().enumerate().map(|(r, &c)| ClassShare { residue: r as u64, count: c, percent: pct(c, hf) });
            (m, shares.collect())
        })
        .collect();
    let h_ratios = hist.iter().filter_map(|(&h, &n)| hist.get(&(h + 1)).map(|&m| (h, m as f64 / n as f64))).collect();
    Ok(Stats {
        schema: crate::record::STATS_SCHEMA,
        k_min,
        k_max,
        admissible,
        exceptional,
        generic,
        hf,
        hf_percent: pct(hf, admissible),
        hf_by_class,
        h_histogram: hist,
        h_ratios,
        percent_series: series,
    })
}
