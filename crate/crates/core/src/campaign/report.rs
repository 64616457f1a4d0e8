// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, CONFIG_VERSION};
use super::sampler::{sample_faults, split_edges};
use crate::bist::{
    overhead_report, pattern_for, run_block_test, BlockTestReport, DetectorResponse, Fault, FaultKind,
    OverheadReport, Pattern3, WiredBehavior,
};
use crate::bumpmap::{AdjacencyGraph, BumpId, BumpMap, Color};
use crate::diagnosis::{diagnosability, diagnose, fault_dictionary, Diagnosability, Diagnosis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultCategory {
    StuckAt,
    IntraBlockWiredAnd,
    IntraBlockWiredOr,
    InterBlockWiredAnd,
    InterBlockWiredOr,
}

impl FaultCategory {
    pub const ALL: [FaultCategory; 5] = [
        FaultCategory::StuckAt,
        FaultCategory::IntraBlockWiredAnd,
        FaultCategory::IntraBlockWiredOr,
        FaultCategory::InterBlockWiredAnd,
        FaultCategory::InterBlockWiredOr,
    ];

    pub fn of(fault: &Fault, map: &BumpMap) -> Result<Self> {
        Ok(match fault.kind {
            FaultKind::Sa0(_) | FaultKind::Sa1(_) => FaultCategory::StuckAt,
            FaultKind::Bridge { a, b, behavior } => {
                if !map.is_blocked() {
                    return Err(Error::param("bump map has not been partitioned"));
                }
                match (map.block(a) == map.block(b), behavior) {
                    (true, WiredBehavior::WiredAnd) => FaultCategory::IntraBlockWiredAnd,
                    (true, WiredBehavior::WiredOr) => FaultCategory::IntraBlockWiredOr,
                    (false, WiredBehavior::WiredAnd) => FaultCategory::InterBlockWiredAnd,
                    (false, WiredBehavior::WiredOr) => FaultCategory::InterBlockWiredOr,
                }
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FaultCategory::StuckAt => "stuck_at",
            FaultCategory::IntraBlockWiredAnd => "intra_block_wired_and",
            FaultCategory::IntraBlockWiredOr => "intra_block_wired_or",
            FaultCategory::InterBlockWiredAnd => "inter_block_wired_and",
            FaultCategory::InterBlockWiredOr => "inter_block_wired_or",
        }
    }
}

/// One bump whose detector did not report `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingBump {
    pub bump: BumpId,
    pub block: usize,
    pub color: Color,
    pub received: Pattern3,
    pub x: u8,
    pub y: u8,
}

impl FailingBump {
    pub fn response(&self) -> DetectorResponse {
        DetectorResponse::new(self.x == 1, self.y == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultOutcome {
    pub index: usize,
    pub fault: Fault,
    pub category: FaultCategory,
    pub detected: bool,
    /// Whether the injected fault is among the diagnosis candidates.
    pub localized: bool,
    pub failing: Vec<FailingBump>,
    pub diagnosis: Diagnosis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub injected: usize,
    pub detected: usize,
    pub escapes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub injected: usize,
    pub detected: usize,
    pub escape_count: usize,
    /// Indices into `faults`.
    pub escapes: Vec<usize>,
    /// `None` when nothing was injected.
    pub detection_rate: Option<f64>,
    pub by_category: BTreeMap<FaultCategory, CategoryMetrics>,
    pub inter_block_wired_or_escape_rate: Option<f64>,
    pub diagnosability: Diagnosability,
    pub diagnosability_value: f64,
    pub overhead: OverheadReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub bumps: usize,
    pub short_radius_um: f64,
    pub intra_block_edges: usize,
    pub inter_block_edges: usize,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalCheck {
    pub all_pass: bool,
    pub failing: Vec<FailingBump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub version: u32,
    pub config: CampaignConfig,
    pub map: MapSummary,
    pub nominal: NominalCheck,
    pub faults: Vec<FaultOutcome>,
    pub metrics: Metrics,
}

fn failing_bumps(map: &BumpMap, reports: &[BlockTestReport]) -> Vec<FailingBump> {
    reports
        .iter()
        .flat_map(|r| {
            r.failing().map(move |(bump, resp)| FailingBump {
                bump,
                block: r.block,
                color: map.color(bump).expect("colored map"),
                received: r.received[&bump],
                x: u8::from(resp.x),
                y: u8::from(resp.y),
            })
        })
        .collect()
}

/// Rebuilds full block reports from the failing bumps alone; every other
/// bump is taken to have passed on its nominal word.
pub fn reports_from_failing(map: &BumpMap, failing: &[FailingBump]) -> Result<Vec<BlockTestReport>> {
    let mut reports: Vec<BlockTestReport> = (0..map.block_count())
        .map(|block| {
            let members = map.block_members(block);
            BlockTestReport {
                block,
                responses: members.iter().map(|&id| (id, DetectorResponse::PASS)).collect(),
                received: members
                    .iter()
                    .map(|&id| (id, pattern_for(map.color(id).expect("colored map"))))
                    .collect(),
            }
        })
        .collect();
    for f in failing {
        if map.block(f.bump) != Some(f.block) || map.color(f.bump) != Some(f.color) {
            return Err(Error::Validation(format!(
                "stored bump {} does not match the map",
                f.bump
            )));
        }
        let r = &mut reports[f.block];
        r.responses.insert(f.bump, f.response());
        r.received.insert(f.bump, f.received);
    }
    Ok(reports)
}

fn simulate_one(index: usize, fault: &Fault, map: &BumpMap, graph: &AdjacencyGraph) -> Result<FaultOutcome> {
    let reports = run_block_test(map, std::slice::from_ref(fault))?;
    let failing = failing_bumps(map, &reports);
    let diagnosis = diagnose(&reports, map, graph)?;
    Ok(FaultOutcome {
        index,
        fault: fault.clone(),
        category: FaultCategory::of(fault, map)?,
        detected: failing.iter().any(|f| f.y == 0),
        localized: diagnosis.explains(fault),
        failing,
        diagnosis,
    })
}

fn rate(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Runs a full campaign: nominal check, then one independent single-fault
/// simulation per injected fault. Results keep the input order regardless
/// of parallel scheduling.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let (map, graph) = config.build_map()?;
    let faults = match (&config.faults, &config.sampler) {
        (Some(f), _) => f.clone(),
        (None, Some(s)) => sample_faults(s, &map, &graph)?,
        (None, None) => unreachable!("validated"),
    };

    let nominal_failing = failing_bumps(&map, &run_block_test(&map, &[])?);
    let outcomes: Vec<FaultOutcome> = faults
        .par_iter()
        .enumerate()
        .map(|(i, f)| simulate_one(i, f, &map, &graph))
        .collect::<Result<_>>()?;

    let mut by_category: BTreeMap<FaultCategory, CategoryMetrics> =
        FaultCategory::ALL.iter().map(|&c| (c, CategoryMetrics::default())).collect();
    let mut escapes = Vec::new();
    for o in &outcomes {
        let m = by_category.get_mut(&o.category).expect("all categories present");
        m.injected += 1;
        if o.detected {
            m.detected += 1;
        } else {
            m.escapes += 1;
            escapes.push(o.index);
        }
    }
    let injected = outcomes.len();
    let detected = injected - escapes.len();
    let wor = by_category[&FaultCategory::InterBlockWiredOr];
    let d = diagnosability(fault_dictionary());
    let (intra, inter) = split_edges(&map, &graph)?;
    let mut block_sizes = vec![0; map.block_count()];
    for id in map.ids() {
        block_sizes[map.block(id).expect("blocked map")] += 1;
    }

    Ok(CampaignReport {
        version: CONFIG_VERSION,
        config: config.clone(),
        map: MapSummary {
            bumps: map.len(),
            short_radius_um: graph.short_radius_um(),
            intra_block_edges: intra.len(),
            inter_block_edges: inter.len(),
            block_sizes,
        },
        nominal: NominalCheck {
            all_pass: nominal_failing.is_empty(),
            failing: nominal_failing,
        },
        metrics: Metrics {
            injected,
            detected,
            escape_count: escapes.len(),
            escapes,
            detection_rate: rate(detected, injected),
            by_category,
            inter_block_wired_or_escape_rate: rate(wor.escapes, wor.injected),
            diagnosability: d,
            diagnosability_value: d.value(),
            overhead: overhead_report(&map)?,
        },
        faults: outcomes,
    })
}

/// Re-runs diagnosis on each stored fault outcome.
pub fn rediagnose(report: &CampaignReport) -> Result<Vec<Diagnosis>> {
    let (map, graph) = report.config.build_map()?;
    report
        .faults
        .iter()
        .map(|o| diagnose(&reports_from_failing(&map, &o.failing)?, &map, &graph))
        .collect()
}

/// Pretty JSON with sorted object keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

impl CampaignReport {
    pub fn to_canonical_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: CampaignReport =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("report: {e}")))?;
        if r.version != CONFIG_VERSION {
            return Err(Error::Validation(format!("unsupported report version {}", r.version)));
        }
        Ok(r)
    }

    /// Per-category table: `category,injected,detected,escapes,detection_rate`.
    pub fn metrics_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["category", "injected", "detected", "escapes", "detection_rate"])?;
        let fmt_rate = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        for (cat, m) in &self.metrics.by_category {
            w.write_record([
                cat.name().to_string(),
                m.injected.to_string(),
                m.detected.to_string(),
                m.escapes.to_string(),
                fmt_rate(rate(m.detected, m.injected)),
            ])?;
        }
        w.write_record([
            "total".to_string(),
            self.metrics.injected.to_string(),
            self.metrics.detected.to_string(),
            self.metrics.escape_count.to_string(),
            fmt_rate(self.metrics.detection_rate),
        ])?;
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
