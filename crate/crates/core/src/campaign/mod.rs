// SPDX-License-Identifier: Apache-2.0

//! Seeded fault campaigns over a full bump map and their JSON reports.

mod config;
mod report;
mod sampler;

pub use config::{
    BehaviorMix, CampaignConfig, KindMix, MapSpec, OutputSpec, SamplerSpec, CONFIG_VERSION,
};
pub use report::{
    reports_from_failing, rediagnose, run_campaign, to_canonical_json, CampaignReport, CategoryMetrics,
    FailingBump, FaultCategory, FaultOutcome, MapSummary, Metrics, NominalCheck,
};
pub use sampler::{sample_faults, split_edges, EdgeList};
