//! Staged orchestration of the analyze-then-generate workflow.
//!
//! A run flows through six dependency levels: region extraction, then shape
//! and colour extraction in parallel, then three textual descriptor agents in
//! parallel, then sketch and rendering generators in parallel, then a
//! presentation step; a feedback stage persists the human selection
//! afterwards. Agents are pluggable: deterministic local implementations
//! ship in-tree, and generative stages can be rebound to external HTTP
//! endpoints.

use std::collections::BTreeMap;
use std::fmt;

use image::{GrayImage, RgbImage};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Descriptors, FeatureMaps};
use crate::roi::Palette;

mod agents;
mod exec;
mod external;
mod memory;
mod plan;

pub use agents::{mock_descriptor, DescriptorInput};
pub use exec::{record_feedback, run, write_run_dir, RunConfig, RunInputs, Stimulus};
pub use external::{call_agent, AgentRequest, AgentResponse};
pub use memory::{MemoryEntry, MemoryStore};
pub use plan::{plan, PlanStage, StagePlan};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("no binding for agent `{0}`")]
    MissingBinding(AgentName),
    #[error("unknown agent name `{0}`")]
    UnknownAgentName(String),
    #[error("agent `{agent}` is {kind}-bound, which this stage does not support")]
    UnsupportedBinding { agent: AgentName, kind: String },
    #[error("run needs at least one stimulus image")]
    EmptyInputs,
    #[error("duplicate stimulus image id `{0}`")]
    DuplicateStimulus(String),
    #[error("heat grid for `{image_id}` must be non-empty")]
    EmptyHeatGrid { image_id: String },
    #[error("selection references unknown rendering `{0}`")]
    UnknownRendering(String),
    #[error("writing run directory failed: {0}")]
    Io(String),
    #[error("memory store line {line}: {message}")]
    MemoryCorrupt { line: usize, message: String },
}

/// The nine pluggable agents of the workflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentName {
    RoiExtraction,
    ShapeExtraction,
    ColourExtraction,
    ShapeDescriptor,
    StyleTextureDescriptor,
    ColourDescriptor,
    SketchGenerator,
    RenderingGenerator,
    Feedback,
}

impl AgentName {
    pub const ALL: [AgentName; 9] = [
        AgentName::RoiExtraction,
        AgentName::ShapeExtraction,
        AgentName::ColourExtraction,
        AgentName::ShapeDescriptor,
        AgentName::StyleTextureDescriptor,
        AgentName::ColourDescriptor,
        AgentName::SketchGenerator,
        AgentName::RenderingGenerator,
        AgentName::Feedback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentName::RoiExtraction => "roi-extraction",
            AgentName::ShapeExtraction => "shape-extraction",
            AgentName::ColourExtraction => "colour-extraction",
            AgentName::ShapeDescriptor => "shape-descriptor",
            AgentName::StyleTextureDescriptor => "style-texture-descriptor",
            AgentName::ColourDescriptor => "colour-descriptor",
            AgentName::SketchGenerator => "sketch-generator",
            AgentName::RenderingGenerator => "rendering-generator",
            AgentName::Feedback => "feedback",
        }
    }

    pub fn parse(token: &str) -> Result<Self, PipelineError> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == token)
            .ok_or_else(|| PipelineError::UnknownAgentName(token.to_string()))
    }

    /// Extraction stages run local image algorithms; generative stages may be
    /// mocked or delegated to external endpoints.
    pub fn is_generative(self) -> bool {
        matches!(
            self,
            AgentName::ShapeDescriptor
                | AgentName::StyleTextureDescriptor
                | AgentName::ColourDescriptor
                | AgentName::SketchGenerator
                | AgentName::RenderingGenerator
        )
    }
}

impl fmt::Display for AgentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an agent is realized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentKind {
    /// The in-tree algorithmic implementation (extraction, feedback).
    Builtin,
    /// The in-tree deterministic stand-in for a generative agent.
    Mock,
    /// Fault-injection binding: the stage always fails.
    Failing,
    /// Remote endpoint speaking the JSON agent protocol.
    External { url: String, timeout_ms: u64 },
}

impl AgentKind {
    pub fn label(&self) -> &'static str {
        match self {
            AgentKind::Builtin => "builtin",
            AgentKind::Mock => "mock",
            AgentKind::Failing => "failing",
            AgentKind::External { .. } => "external",
        }
    }
}

/// Agent-name → realization map. A run requires all nine agents bound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bindings {
    map: BTreeMap<AgentName, AgentKind>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    /// The no-network default: algorithmic stages builtin, generative stages
    /// mocked.
    pub fn mock_suite() -> Self {
        let mut b = Bindings::new();
        for agent in AgentName::ALL {
            let kind = if agent.is_generative() {
                AgentKind::Mock
            } else {
                AgentKind::Builtin
            };
            b = b.bind(agent, kind);
        }
        b
    }

    pub fn bind(mut self, agent: AgentName, kind: AgentKind) -> Self {
        self.map.insert(agent, kind);
        self
    }

    pub fn get(&self, agent: AgentName) -> Option<&AgentKind> {
        self.map.get(&agent)
    }

    pub fn require(&self, agent: AgentName) -> Result<&AgentKind, PipelineError> {
        self.map
            .get(&agent)
            .ok_or(PipelineError::MissingBinding(agent))
    }

    /// All nine agents bound, with external bindings only on generative
    /// stages (extraction and feedback are local by contract).
    pub fn check_complete(&self) -> Result<(), PipelineError> {
        for agent in AgentName::ALL {
            let kind = self.require(agent)?;
            if matches!(kind, AgentKind::External { .. }) && !agent.is_generative() {
                return Err(PipelineError::UnsupportedBinding {
                    agent,
                    kind: kind.label().to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Completed,
    Failed,
    Skipped,
}

/// One stage execution in the run log. Steps are logical barrier indices
/// (level k runs between steps k and k+1), so the record is reproducible
/// byte-for-byte while still proving the ordering constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub status: StageStatus,
    pub start_step: u32,
    pub end_step: u32,
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Everything a run produced, including partial results after a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub run_id: String,
    pub problem_statement: String,
    pub seed: u64,
    pub stage_log: Vec<StageRecord>,
    pub roi_count: usize,
    pub roi_collage: Option<RgbImage>,
    pub edge_collage: Option<GrayImage>,
    pub palette: Option<Palette>,
    pub shape_text: Option<String>,
    pub texture_text: Option<String>,
    pub colour_text: Option<String>,
    pub sketches: Vec<(String, GrayImage)>,
    pub renderings: Vec<(String, RgbImage)>,
    pub presentation: Option<String>,
}

impl PipelineRun {
    /// True when every logged stage completed.
    pub fn succeeded(&self) -> bool {
        self.stage_log
            .iter()
            .all(|s| s.status == StageStatus::Completed)
    }

    pub fn rendering_ids(&self) -> Vec<&str> {
        self.renderings.iter().map(|(id, _)| id.as_str()).collect()
    }

    /// Assembles the feature-map bundle once all analysis artifacts exist.
    pub fn feature_maps(&self) -> Option<FeatureMaps> {
        Some(FeatureMaps {
            roi_collage: self.roi_collage.clone()?,
            edge_collage: self.edge_collage.clone()?,
            palette: self.palette.as_ref()?.hex_name_pairs(),
            descriptors: Descriptors {
                shape: self.shape_text.clone()?,
                texture_style: self.texture_text.clone()?,
                colour: self.colour_text.clone()?,
            },
        })
    }
}
