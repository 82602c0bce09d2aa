//! Stage dependency graph for a run.

use crate::pipeline::{AgentName, Bindings, PipelineError};

/// A node in the plan: either a bound agent or the presentation step the
/// orchestrator performs itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStage {
    Agent(AgentName),
    Present,
}

impl PlanStage {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanStage::Agent(agent) => agent.as_str(),
            PlanStage::Present => "present",
        }
    }
}

/// The level-structured DAG: stages within a level are independent and may
/// run concurrently; a level starts only after the previous level completes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePlan {
    pub problem_statement: String,
    levels: Vec<Vec<PlanStage>>,
}

impl StagePlan {
    pub fn levels(&self) -> &[Vec<PlanStage>] {
        &self.levels
    }

    /// Stages executed by a run, in log order (the feedback level is driven
    /// separately by the human selection).
    pub fn run_stages(&self) -> impl Iterator<Item = PlanStage> + '_ {
        self.levels
            .iter()
            .filter(|level| level[..] != [PlanStage::Agent(AgentName::Feedback)])
            .flatten()
            .copied()
    }
}

/// Builds the fixed six-level graph after verifying every agent is bound:
/// region extraction, then shape ∥ colour extraction, then the three
/// descriptor agents, then sketch ∥ rendering generation, then presentation,
/// then feedback.
pub fn plan(problem_statement: &str, bindings: &Bindings) -> Result<StagePlan, PipelineError> {
    bindings.check_complete()?;
    Ok(StagePlan {
        problem_statement: problem_statement.to_string(),
        levels: vec![
            vec![PlanStage::Agent(AgentName::RoiExtraction)],
            vec![
                PlanStage::Agent(AgentName::ShapeExtraction),
                PlanStage::Agent(AgentName::ColourExtraction),
            ],
            vec![
                PlanStage::Agent(AgentName::ShapeDescriptor),
                PlanStage::Agent(AgentName::StyleTextureDescriptor),
                PlanStage::Agent(AgentName::ColourDescriptor),
            ],
            vec![
                PlanStage::Agent(AgentName::SketchGenerator),
                PlanStage::Agent(AgentName::RenderingGenerator),
            ],
            vec![PlanStage::Present],
            vec![PlanStage::Agent(AgentName::Feedback)],
        ],
    })
}
