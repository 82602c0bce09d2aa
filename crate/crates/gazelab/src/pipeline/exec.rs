//! The staged run executor.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use image::{GrayImage, RgbImage};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analytics::HeatGrid;
use crate::io::write_report;
use crate::pipeline::agents::{mock_rendering, mock_sketch, present_text};
use crate::pipeline::external::{
    call_agent, gray_to_base64, require_image_gray, require_image_rgb, require_text, rgb_to_base64,
    AgentRequest,
};
use crate::pipeline::{
    mock_descriptor, plan, AgentKind, AgentName, Bindings, DescriptorInput, MemoryEntry,
    MemoryStore, PipelineError, PipelineRun, PlanStage, StageRecord, StageStatus,
};
use crate::roi::{
    compose_collage, crop, detect_rois, extract_edges, extract_palette, RoiThreshold,
};

/// One input image plus its per-cell dwell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    pub image_id: String,
    pub image: RgbImage,
    pub heat: HeatGrid,
}

/// Everything a run consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInputs {
    pub problem_statement: String,
    pub stimuli: Vec<Stimulus>,
}

/// Per-run knobs, mirroring the analysis modules' defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub roi_threshold: RoiThreshold,
    pub edge_low: f64,
    pub edge_high: f64,
    pub palette_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            roi_threshold: RoiThreshold::Auto,
            edge_low: 60.0,
            edge_high: 120.0,
            palette_size: 5,
        }
    }
}

/// Content hash of (problem statement, seed, stimuli), truncated to 12 hex
/// characters; names the run directory.
fn run_id_of(inputs: &RunInputs, seed: u64) -> String {
    fn feed(h: &mut Sha256, bytes: &[u8]) {
        // Length prefix keeps adjacent fields from aliasing.
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    let mut h = Sha256::new();
    feed(&mut h, inputs.problem_statement.as_bytes());
    feed(&mut h, &seed.to_le_bytes());
    for s in &inputs.stimuli {
        feed(&mut h, s.image_id.as_bytes());
        feed(&mut h, &s.image.width().to_le_bytes());
        feed(&mut h, &s.image.height().to_le_bytes());
        feed(&mut h, s.image.as_raw());
        feed(&mut h, &(s.heat.width as u64).to_le_bytes());
        feed(&mut h, &(s.heat.height as u64).to_le_bytes());
        for v in s.heat.data() {
            h.update(v.to_le_bytes());
        }
    }
    h.finalize()
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// External stages get one retry; local stages fail immediately.
fn retries_for(kind: &AgentKind) -> u32 {
    matches!(kind, AgentKind::External { .. }) as u32
}

fn with_retry<T>(retries: u32, f: impl Fn() -> Result<T, String>) -> (Result<T, String>, u32) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        match f() {
            Ok(v) => return (Ok(v), attempts),
            Err(_) if attempts <= retries => continue,
            Err(e) => return (Err(e), attempts),
        }
    }
}

/// Log entry for a stage of DAG level `level` (0-based): the stage ran
/// between logical barrier steps level+1 and level+2.
fn record(
    stage: PlanStage,
    status: StageStatus,
    level: u32,
    attempts: u32,
    message: Option<String>,
) -> StageRecord {
    StageRecord {
        stage: stage.as_str().to_string(),
        status,
        start_step: level + 1,
        end_step: level + 2,
        attempts,
        message,
    }
}

/// Executes the staged workflow over the inputs. A stage failure marks the
/// stage failed and skips every later level; the partial run is still
/// returned (and `Err` is reserved for invalid inputs, not agent trouble).
pub fn run(
    inputs: &RunInputs,
    bindings: &Bindings,
    config: &RunConfig,
) -> Result<PipelineRun, PipelineError> {
    let stage_plan = plan(&inputs.problem_statement, bindings)?;
    if inputs.stimuli.is_empty() {
        return Err(PipelineError::EmptyInputs);
    }
    let mut ids = BTreeSet::new();
    for s in &inputs.stimuli {
        if !ids.insert(s.image_id.as_str()) {
            return Err(PipelineError::DuplicateStimulus(s.image_id.clone()));
        }
        if s.heat.width == 0
            || s.heat.height == 0
            || s.image.width() == 0
            || s.image.height() == 0
        {
            return Err(PipelineError::EmptyHeatGrid {
                image_id: s.image_id.clone(),
            });
        }
    }

    let mut log: Vec<StageRecord> = Vec::new();
    let mut all_ok = true;
    let skip_level = |log: &mut Vec<StageRecord>, level: usize| {
        for stage in &stage_plan.levels()[level] {
            log.push(record(*stage, StageStatus::Skipped, level as u32, 0, None));
        }
    };

    // Level 0: region extraction over every stimulus, packed into a collage.
    let mut roi_count = 0usize;
    let mut roi_collage: Option<RgbImage> = None;
    {
        let kind = bindings.require(AgentName::RoiExtraction)?.clone();
        let (result, attempts) = with_retry(retries_for(&kind), || match &kind {
            AgentKind::Failing => Err("injected failure".to_string()),
            _ => {
                let mut crops = Vec::new();
                let mut count = 0usize;
                for s in &inputs.stimuli {
                    let rois = detect_rois(
                        &s.heat,
                        (s.image.width(), s.image.height()),
                        config.roi_threshold,
                    )
                    .map_err(|e| e.to_string())?;
                    count += rois.len();
                    for roi in &rois {
                        crops.push(crop(&s.image, &roi.rect));
                    }
                }
                if crops.is_empty() {
                    // Nothing cleared the threshold: keep the workflow fed by
                    // treating each whole image as one crop.
                    crops = inputs.stimuli.iter().map(|s| s.image.clone()).collect();
                }
                let collage = compose_collage(&crops).map_err(|e| e.to_string())?;
                Ok((count, collage))
            }
        });
        let stage = PlanStage::Agent(AgentName::RoiExtraction);
        match result {
            Ok((count, collage)) => {
                roi_count = count;
                roi_collage = Some(collage);
                log.push(record(stage, StageStatus::Completed, 0, attempts, None));
            }
            Err(e) => {
                all_ok = false;
                log.push(record(stage, StageStatus::Failed, 0, attempts, Some(e)));
            }
        }
    }

    // Level 1: shape (edges) and colour (palette) extraction in parallel.
    let mut edge_collage: Option<GrayImage> = None;
    let mut palette = None;
    if all_ok {
        let collage = roi_collage.clone().expect("level 0 completed");
        let gray = image::DynamicImage::ImageRgb8(collage.clone()).to_luma8();
        let shape_kind = bindings.require(AgentName::ShapeExtraction)?.clone();
        let colour_kind = bindings.require(AgentName::ColourExtraction)?.clone();
        let (shape_result, colour_result) = thread::scope(|scope| {
            let shape = scope.spawn(|| {
                with_retry(retries_for(&shape_kind), || match &shape_kind {
                    AgentKind::Failing => Err("injected failure".to_string()),
                    _ => extract_edges(&gray, config.edge_low, config.edge_high)
                        .map_err(|e| e.to_string()),
                })
            });
            let colour = scope.spawn(|| {
                with_retry(retries_for(&colour_kind), || match &colour_kind {
                    AgentKind::Failing => Err("injected failure".to_string()),
                    _ => extract_palette(&collage, config.palette_size).map_err(|e| e.to_string()),
                })
            });
            (
                shape.join().expect("stage thread"),
                colour.join().expect("stage thread"),
            )
        });
        let (result, attempts) = shape_result;
        match result {
            Ok(edges) => {
                edge_collage = Some(edges);
                log.push(record(
                    PlanStage::Agent(AgentName::ShapeExtraction),
                    StageStatus::Completed,
                    1,
                    attempts,
                    None,
                ));
            }
            Err(e) => {
                all_ok = false;
                log.push(record(
                    PlanStage::Agent(AgentName::ShapeExtraction),
                    StageStatus::Failed,
                    1,
                    attempts,
                    Some(e),
                ));
            }
        }
        let (result, attempts) = colour_result;
        match result {
            Ok(p) => {
                palette = Some(p);
                log.push(record(
                    PlanStage::Agent(AgentName::ColourExtraction),
                    StageStatus::Completed,
                    1,
                    attempts,
                    None,
                ));
            }
            Err(e) => {
                all_ok = false;
                log.push(record(
                    PlanStage::Agent(AgentName::ColourExtraction),
                    StageStatus::Failed,
                    1,
                    attempts,
                    Some(e),
                ));
            }
        }
    } else {
        skip_level(&mut log, 1);
    }

    // Level 2: the three descriptor agents in parallel.
    let mut shape_text = None;
    let mut texture_text = None;
    let mut colour_text = None;
    if all_ok {
        let edges = edge_collage.clone().expect("level 1 completed");
        let pal = palette.clone().expect("level 1 completed");
        let count = roi_count;
        let describe = |agent: AgentName| {
            let kind = bindings.get(agent).expect("plan checked bindings").clone();
            with_retry(retries_for(&kind), || match &kind {
                AgentKind::Failing => Err("injected failure".to_string()),
                AgentKind::External { url, timeout_ms } => {
                    let request = AgentRequest {
                        agent: agent.as_str().to_string(),
                        text: [
                            (
                                "problem_statement".to_string(),
                                inputs.problem_statement.clone(),
                            ),
                            ("roi_count".to_string(), count.to_string()),
                            ("palette_names".to_string(), pal.names().join(", ")),
                        ]
                        .into_iter()
                        .collect(),
                        images: [("edge_collage".to_string(), gray_to_base64(&edges))]
                            .into_iter()
                            .collect(),
                    };
                    require_text(&call_agent(url, *timeout_ms, &request)?)
                }
                _ => Ok(mock_descriptor(
                    agent,
                    &DescriptorInput {
                        edge_collage: &edges,
                        palette: &pal,
                        roi_count: count,
                    },
                    config.seed,
                )),
            })
        };
        let (shape_result, texture_result, colour_result) = thread::scope(|scope| {
            let a = scope.spawn(|| describe(AgentName::ShapeDescriptor));
            let b = scope.spawn(|| describe(AgentName::StyleTextureDescriptor));
            let c = scope.spawn(|| describe(AgentName::ColourDescriptor));
            (
                a.join().expect("stage thread"),
                b.join().expect("stage thread"),
                c.join().expect("stage thread"),
            )
        });
        for (agent, (result, attempts), slot) in [
            (AgentName::ShapeDescriptor, shape_result, &mut shape_text),
            (
                AgentName::StyleTextureDescriptor,
                texture_result,
                &mut texture_text,
            ),
            (AgentName::ColourDescriptor, colour_result, &mut colour_text),
        ] {
            match result {
                Ok(text) => {
                    *slot = Some(text);
                    log.push(record(
                        PlanStage::Agent(agent),
                        StageStatus::Completed,
                        2,
                        attempts,
                        None,
                    ));
                }
                Err(e) => {
                    all_ok = false;
                    log.push(record(
                        PlanStage::Agent(agent),
                        StageStatus::Failed,
                        2,
                        attempts,
                        Some(e),
                    ));
                }
            }
        }
    } else {
        skip_level(&mut log, 2);
    }

    // Level 3: sketch and rendering generation in parallel.
    let mut sketches: Vec<(String, GrayImage)> = Vec::new();
    let mut renderings: Vec<(String, RgbImage)> = Vec::new();
    if all_ok {
        let edges = edge_collage.clone().expect("level 1 completed");
        let rois = roi_collage.clone().expect("level 0 completed");
        let pal = palette.clone().expect("level 1 completed");
        let sketch_kind = bindings.require(AgentName::SketchGenerator)?.clone();
        let render_kind = bindings.require(AgentName::RenderingGenerator)?.clone();
        let (sketch_result, render_result) = thread::scope(|scope| {
            let sk = scope.spawn(|| {
                with_retry(retries_for(&sketch_kind), || match &sketch_kind {
                    AgentKind::Failing => Err("injected failure".to_string()),
                    AgentKind::External { url, timeout_ms } => {
                        let mut out = Vec::new();
                        for variant in 1..=2u32 {
                            let request = AgentRequest {
                                agent: AgentName::SketchGenerator.as_str().to_string(),
                                text: [
                                    (
                                        "problem_statement".to_string(),
                                        inputs.problem_statement.clone(),
                                    ),
                                    ("variant".to_string(), variant.to_string()),
                                ]
                                .into_iter()
                                .collect(),
                                images: [("edge_collage".to_string(), gray_to_base64(&edges))]
                                    .into_iter()
                                    .collect(),
                            };
                            let response = call_agent(url, *timeout_ms, &request)?;
                            out.push((format!("sketch-{variant}"), require_image_gray(&response)?));
                        }
                        Ok(out)
                    }
                    _ => Ok(vec![
                        ("sketch-1".to_string(), mock_sketch(&edges, 0)),
                        ("sketch-2".to_string(), mock_sketch(&edges, 1)),
                    ]),
                })
            });
            let re = scope.spawn(|| {
                with_retry(retries_for(&render_kind), || match &render_kind {
                    AgentKind::Failing => Err("injected failure".to_string()),
                    AgentKind::External { url, timeout_ms } => {
                        let hexes: Vec<&str> =
                            pal.swatches.iter().map(|s| s.hex.as_str()).collect();
                        let mut out = Vec::new();
                        for variant in 1..=2u32 {
                            let request = AgentRequest {
                                agent: AgentName::RenderingGenerator.as_str().to_string(),
                                text: [
                                    (
                                        "problem_statement".to_string(),
                                        inputs.problem_statement.clone(),
                                    ),
                                    ("palette".to_string(), hexes.join(",")),
                                    ("variant".to_string(), variant.to_string()),
                                ]
                                .into_iter()
                                .collect(),
                                images: [
                                    ("edge_collage".to_string(), gray_to_base64(&edges)),
                                    ("roi_collage".to_string(), rgb_to_base64(&rois)),
                                ]
                                .into_iter()
                                .collect(),
                            };
                            let response = call_agent(url, *timeout_ms, &request)?;
                            out.push((
                                format!("rendering-{variant}"),
                                require_image_rgb(&response)?,
                            ));
                        }
                        Ok(out)
                    }
                    _ => Ok(vec![
                        (
                            "rendering-1".to_string(),
                            mock_rendering(&edges, &pal, 0, config.seed),
                        ),
                        (
                            "rendering-2".to_string(),
                            mock_rendering(&edges, &pal, 1, config.seed),
                        ),
                    ]),
                })
            });
            (
                sk.join().expect("stage thread"),
                re.join().expect("stage thread"),
            )
        });
        let (result, attempts) = sketch_result;
        match result {
            Ok(items) => {
                sketches = items;
                log.push(record(
                    PlanStage::Agent(AgentName::SketchGenerator),
                    StageStatus::Completed,
                    3,
                    attempts,
                    None,
                ));
            }
            Err(e) => {
                all_ok = false;
                log.push(record(
                    PlanStage::Agent(AgentName::SketchGenerator),
                    StageStatus::Failed,
                    3,
                    attempts,
                    Some(e),
                ));
            }
        }
        let (result, attempts) = render_result;
        match result {
            Ok(items) => {
                renderings = items;
                log.push(record(
                    PlanStage::Agent(AgentName::RenderingGenerator),
                    StageStatus::Completed,
                    3,
                    attempts,
                    None,
                ));
            }
            Err(e) => {
                all_ok = false;
                log.push(record(
                    PlanStage::Agent(AgentName::RenderingGenerator),
                    StageStatus::Failed,
                    3,
                    attempts,
                    Some(e),
                ));
            }
        }
    } else {
        skip_level(&mut log, 3);
    }

    // Level 4: assemble the presentation.
    let mut presentation = None;
    if all_ok {
        let sketch_ids: Vec<String> = sketches.iter().map(|(id, _)| id.clone()).collect();
        let rendering_ids: Vec<String> = renderings.iter().map(|(id, _)| id.clone()).collect();
        presentation = Some(present_text(
            &inputs.problem_statement,
            roi_count,
            shape_text.as_deref().expect("level 2 completed"),
            texture_text.as_deref().expect("level 2 completed"),
            colour_text.as_deref().expect("level 2 completed"),
            &sketch_ids,
            &rendering_ids,
        ));
        log.push(record(PlanStage::Present, StageStatus::Completed, 4, 1, None));
    } else {
        skip_level(&mut log, 4);
    }

    Ok(PipelineRun {
        run_id: run_id_of(inputs, config.seed),
        problem_statement: inputs.problem_statement.clone(),
        seed: config.seed,
        stage_log: log,
        roi_count,
        roi_collage,
        edge_collage,
        palette,
        shape_text,
        texture_text,
        colour_text,
        sketches,
        renderings,
        presentation,
    })
}

/// Validates the selection against the run's renderings and appends it to
/// the memory store. The timestamp is caller-supplied so stores replay
/// exactly.
pub fn record_feedback(
    run: &PipelineRun,
    rendering_id: &str,
    comment: &str,
    memory: &mut MemoryStore,
    timestamp: &str,
) -> Result<MemoryEntry, PipelineError> {
    if !run.renderings.iter().any(|(id, _)| id == rendering_id) {
        return Err(PipelineError::UnknownRendering(rendering_id.to_string()));
    }
    let entry = MemoryEntry {
        run_id: run.run_id.clone(),
        rendering_id: rendering_id.to_string(),
        comment: comment.to_string(),
        timestamp: timestamp.to_string(),
    };
    memory.append(entry.clone())?;
    Ok(entry)
}

#[derive(Serialize)]
struct PaletteEntryRecord<'a> {
    hex: &'a str,
    name: &'a str,
    weight: f64,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    run_id: &'a str,
    problem_statement: &'a str,
    seed: u64,
    succeeded: bool,
    roi_count: usize,
    stage_log: &'a [StageRecord],
    palette: Option<Vec<PaletteEntryRecord<'a>>>,
    palette_note: Option<&'a str>,
    shape_descriptor: Option<&'a str>,
    texture_descriptor: Option<&'a str>,
    colour_descriptor: Option<&'a str>,
    sketches: Vec<&'a str>,
    renderings: Vec<&'a str>,
    presentation: Option<&'a str>,
}

fn io_err(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io(e.to_string())
}

/// Writes `<out_root>/<run_id>/` with the canonical run record, collages,
/// sketches, renderings, and presentation text. Rewriting the same run is
/// byte-identical.
pub fn write_run_dir(run: &PipelineRun, out_root: &Path) -> Result<PathBuf, PipelineError> {
    let dir = out_root.join(&run.run_id);
    fs::create_dir_all(&dir).map_err(io_err)?;
    let entries = run.palette.as_ref().map(|p| {
        p.swatches
            .iter()
            .map(|s| PaletteEntryRecord {
                hex: &s.hex,
                name: &s.name,
                weight: s.weight,
            })
            .collect()
    });
    let runfile = RunRecord {
        run_id: &run.run_id,
        problem_statement: &run.problem_statement,
        seed: run.seed,
        succeeded: run.succeeded(),
        roi_count: run.roi_count,
        stage_log: &run.stage_log,
        palette: entries,
        palette_note: run.palette.as_ref().and_then(|p| p.note.as_deref()),
        shape_descriptor: run.shape_text.as_deref(),
        texture_descriptor: run.texture_text.as_deref(),
        colour_descriptor: run.colour_text.as_deref(),
        sketches: run.sketches.iter().map(|(id, _)| id.as_str()).collect(),
        renderings: run.renderings.iter().map(|(id, _)| id.as_str()).collect(),
        presentation: run.presentation.as_deref(),
    };
    fs::write(dir.join("run.json"), write_report(&runfile)).map_err(io_err)?;
    if let Some(img) = &run.roi_collage {
        img.save(dir.join("roi_collage.png")).map_err(io_err)?;
    }
    if let Some(img) = &run.edge_collage {
        img.save(dir.join("edge_collage.png")).map_err(io_err)?;
    }
    for (id, img) in &run.sketches {
        img.save(dir.join(format!("{id}.png"))).map_err(io_err)?;
    }
    for (id, img) in &run.renderings {
        img.save(dir.join(format!("{id}.png"))).map_err(io_err)?;
    }
    if let Some(text) = &run.presentation {
        fs::write(dir.join("presentation.txt"), text).map_err(io_err)?;
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    /// Two 60×40 stimuli with bright motifs and concentrated dwell.
    pub(crate) fn fixture_inputs() -> RunInputs {
        let mut stimuli = Vec::new();
        for (i, rgb) in [[200u8, 40, 40], [40, 80, 200]].into_iter().enumerate() {
            let mut image = RgbImage::from_pixel(60, 40, Rgb([235, 235, 230]));
            for y in 8..28 {
                for x in (10 + 10 * i as u32)..(30 + 10 * i as u32) {
                    image.put_pixel(x, y, Rgb(rgb));
                }
            }
            let mut heat = HeatGrid::zeros(10, 10);
            heat.add(2 + i, 3, 3.0);
            heat.add(3 + i, 3, 2.0);
            heat.add(8, 8, 0.1);
            stimuli.push(Stimulus {
                image_id: format!("img-{i:03}"),
                image,
                heat,
            });
        }
        RunInputs {
            problem_statement: "a poster concept from the attended regions".to_string(),
            stimuli,
        }
    }

    fn stage_names(run: &PipelineRun) -> Vec<&str> {
        run.stage_log.iter().map(|s| s.stage.as_str()).collect()
    }

    #[test]
    fn mock_run_completes_all_nine_stages() {
        let run = run(
            &fixture_inputs(),
            &Bindings::mock_suite(),
            &RunConfig::default(),
        )
        .unwrap();
        assert_eq!(run.stage_log.len(), 9);
        assert!(run.succeeded());
        assert_eq!(
            stage_names(&run),
            vec![
                "roi-extraction",
                "shape-extraction",
                "colour-extraction",
                "shape-descriptor",
                "style-texture-descriptor",
                "colour-descriptor",
                "sketch-generator",
                "rendering-generator",
                "present",
            ]
        );
        assert!(run.roi_count >= 2, "roi_count = {}", run.roi_count);
        assert!(run.feature_maps().is_some());
        assert_eq!(run.sketches.len(), 2);
        assert_eq!(run.rendering_ids(), vec!["rendering-1", "rendering-2"]);
        assert!(run.presentation.as_ref().unwrap().contains("rendering-1"));
        assert_eq!(run.run_id.len(), 12);
    }

    #[test]
    fn identical_inputs_and_seed_reproduce_the_run() {
        let inputs = fixture_inputs();
        let bindings = Bindings::mock_suite();
        let config = RunConfig {
            seed: 17,
            ..RunConfig::default()
        };
        let a = run(&inputs, &bindings, &config).unwrap();
        let b = run(&inputs, &bindings, &config).unwrap();
        assert_eq!(a, b);
        let other_seed = run(
            &inputs,
            &bindings,
            &RunConfig {
                seed: 18,
                ..RunConfig::default()
            },
        )
        .unwrap();
        assert_ne!(a.run_id, other_seed.run_id);
    }

    #[test]
    fn stage_steps_respect_the_dependency_levels() {
        let run = run(
            &fixture_inputs(),
            &Bindings::mock_suite(),
            &RunConfig::default(),
        )
        .unwrap();
        let step_of = |name: &str| {
            run.stage_log
                .iter()
                .find(|s| s.stage == name)
                .map(|s| (s.start_step, s.end_step))
                .unwrap()
        };
        let roi = step_of("roi-extraction");
        for descriptor in [
            "shape-descriptor",
            "style-texture-descriptor",
            "colour-descriptor",
        ] {
            assert!(step_of(descriptor).0 >= roi.1);
        }
        for generator in ["sketch-generator", "rendering-generator"] {
            for descriptor in [
                "shape-descriptor",
                "style-texture-descriptor",
                "colour-descriptor",
            ] {
                assert!(step_of(generator).0 >= step_of(descriptor).1);
            }
        }
        assert!(step_of("present").0 >= step_of("rendering-generator").1);
    }

    #[test]
    fn failing_rendering_generator_keeps_sketches() {
        let bindings =
            Bindings::mock_suite().bind(AgentName::RenderingGenerator, AgentKind::Failing);
        let run = run(&fixture_inputs(), &bindings, &RunConfig::default()).unwrap();
        assert!(!run.succeeded());
        assert_eq!(run.stage_log.len(), 9);
        let by_name = |name: &str| {
            run.stage_log
                .iter()
                .find(|s| s.stage == name)
                .unwrap()
                .clone()
        };
        assert_eq!(by_name("rendering-generator").status, StageStatus::Failed);
        assert_eq!(
            by_name("rendering-generator").message.as_deref(),
            Some("injected failure")
        );
        assert_eq!(by_name("sketch-generator").status, StageStatus::Completed);
        assert_eq!(by_name("present").status, StageStatus::Skipped);
        assert_eq!(run.sketches.len(), 2);
        assert!(run.renderings.is_empty());
        assert!(run.presentation.is_none());
    }

    #[test]
    fn failing_roi_extraction_skips_everything_downstream() {
        let bindings = Bindings::mock_suite().bind(AgentName::RoiExtraction, AgentKind::Failing);
        let run = run(&fixture_inputs(), &bindings, &RunConfig::default()).unwrap();
        assert_eq!(run.stage_log.len(), 9);
        assert_eq!(run.stage_log[0].status, StageStatus::Failed);
        for stage in &run.stage_log[1..] {
            assert_eq!(stage.status, StageStatus::Skipped, "{}", stage.stage);
            assert_eq!(stage.attempts, 0);
        }
        assert!(run.roi_collage.is_none());
        assert!(run.feature_maps().is_none());
    }

    #[test]
    fn invalid_inputs_are_rejected_before_any_stage() {
        let bindings = Bindings::mock_suite();
        let empty = RunInputs {
            problem_statement: "p".into(),
            stimuli: vec![],
        };
        assert_eq!(
            run(&empty, &bindings, &RunConfig::default()).unwrap_err(),
            PipelineError::EmptyInputs
        );
        let mut dupe = fixture_inputs();
        dupe.stimuli[1].image_id = dupe.stimuli[0].image_id.clone();
        assert!(matches!(
            run(&dupe, &bindings, &RunConfig::default()).unwrap_err(),
            PipelineError::DuplicateStimulus(_)
        ));
    }

    #[test]
    fn feedback_validates_the_selection() {
        let pipeline_run = run(
            &fixture_inputs(),
            &Bindings::mock_suite(),
            &RunConfig::default(),
        )
        .unwrap();
        let mut memory = MemoryStore::in_memory();
        let entry = record_feedback(
            &pipeline_run,
            "rendering-2",
            "bolder colours please",
            &mut memory,
            "2026-08-24T00:00:00Z",
        )
        .unwrap();
        assert_eq!(memory.len(), 1);
        assert_eq!(entry.run_id, pipeline_run.run_id);
        assert_eq!(
            record_feedback(
                &pipeline_run,
                "rendering-9",
                "x",
                &mut memory,
                "2026-08-24T00:00:00Z"
            )
            .unwrap_err(),
            PipelineError::UnknownRendering("rendering-9".into())
        );
        assert_eq!(memory.len(), 1);
    }

    #[test]
    fn run_directory_contains_all_artifacts() {
        let pipeline_run = run(
            &fixture_inputs(),
            &Bindings::mock_suite(),
            &RunConfig::default(),
        )
        .unwrap();
        let out = tempfile::tempdir().unwrap();
        let dir = write_run_dir(&pipeline_run, out.path()).unwrap();
        assert_eq!(dir, out.path().join(&pipeline_run.run_id));
        for file in [
            "run.json",
            "roi_collage.png",
            "edge_collage.png",
            "sketch-1.png",
            "sketch-2.png",
            "rendering-1.png",
            "rendering-2.png",
            "presentation.txt",
        ] {
            assert!(dir.join(file).exists(), "missing {file}");
        }
        let record = fs::read_to_string(dir.join("run.json")).unwrap();
        assert!(record.contains("\"succeeded\": true"));
        assert!(record.contains("\"roi-extraction\""));

        // Rewriting is byte-identical.
        let before = fs::read(dir.join("run.json")).unwrap();
        write_run_dir(&pipeline_run, out.path()).unwrap();
        assert_eq!(fs::read(dir.join("run.json")).unwrap(), before);
    }
}
