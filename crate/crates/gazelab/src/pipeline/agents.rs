//! Deterministic local implementations of the generative agents.

use image::{GrayImage, Rgb, RgbImage};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::pipeline::AgentName;
use crate::roi::Palette;

/// Measurable features a descriptor agent works from.
#[derive(Debug, Clone, Copy)]
pub struct DescriptorInput<'a> {
    pub edge_collage: &'a GrayImage,
    pub palette: &'a Palette,
    pub roi_count: usize,
}

fn pick<'a>(rng: &mut ChaCha8Rng, options: &[&'a str]) -> &'a str {
    options[rng.random_range(0..options.len())]
}

/// Fraction of edge pixels in the collage.
fn edge_density(edges: &GrayImage) -> f64 {
    let total = (edges.width() * edges.height()) as f64;
    if total == 0.0 {
        return 0.0;
    }
    let on = edges.pixels().filter(|p| p.0[0] > 0).count() as f64;
    on / total
}

/// Rate of horizontal on/off alternation, a crude busyness measure.
fn transition_rate(edges: &GrayImage) -> f64 {
    let (w, h) = edges.dimensions();
    if w < 2 || h == 0 {
        return 0.0;
    }
    let mut transitions = 0u64;
    for y in 0..h {
        for x in 0..w - 1 {
            if (edges.get_pixel(x, y).0[0] > 0) != (edges.get_pixel(x + 1, y).0[0] > 0) {
                transitions += 1;
            }
        }
    }
    transitions as f64 / ((w - 1) as u64 * h as u64) as f64
}

fn shape_text(input: &DescriptorInput, rng: &mut ChaCha8Rng) -> String {
    let density = edge_density(input.edge_collage);
    if density == 0.0 {
        return "no dominant contours detected".to_string();
    }
    let body = if density < 0.02 {
        "a sparse shape language of isolated, deliberate strokes"
    } else if density < 0.08 {
        "a balanced shape language mixing clean outlines with open space"
    } else {
        "a dense, intricate shape language with tightly packed contours"
    };
    let tone = pick(rng, &["confident", "restrained", "playful", "angular"]);
    format!(
        "The attended regions show {body}. Across {count} region{s}, the linework reads as {tone}.",
        count = input.roi_count,
        s = if input.roi_count == 1 { "" } else { "s" },
    )
}

fn texture_text(input: &DescriptorInput, rng: &mut ChaCha8Rng) -> String {
    let rate = transition_rate(input.edge_collage);
    let body = if rate < 0.05 {
        "smooth, matte surfaces with long uninterrupted passages"
    } else if rate < 0.15 {
        "gently textured surfaces with a regular, woven rhythm"
    } else {
        "busy, tactile surfaces with rapid light-dark alternation"
    };
    let grain = pick(rng, &["velvety", "grainy", "brushed", "pebbled"]);
    format!("The style suggests {body}, with a {grain} finish overall.")
}

fn colour_text(input: &DescriptorInput, rng: &mut ChaCha8Rng) -> String {
    let mut names: Vec<&str> = Vec::new();
    for name in input.palette.names() {
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let mood = pick(rng, &["warm", "cool", "muted", "saturated"]);
    match names.as_slice() {
        [] => "no colour information available".to_string(),
        [only] => format!("A monochrome statement in {only}, {mood} in temperament."),
        [lead, accents @ ..] => format!(
            "A {mood} palette led by {lead} with accents of {}.",
            accents.join(", ")
        ),
    }
}

/// Produces the template-based text for one descriptor agent from measurable
/// features. Identical input and seed give identical text.
pub fn mock_descriptor(agent: AgentName, input: &DescriptorInput, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ agent.as_str().len() as u64);
    match agent {
        AgentName::ShapeDescriptor => shape_text(input, &mut rng),
        AgentName::StyleTextureDescriptor => texture_text(input, &mut rng),
        AgentName::ColourDescriptor => colour_text(input, &mut rng),
        other => unreachable!("{other} is not a descriptor agent"),
    }
}

/// Concept sketch from the edge collage: black strokes on white. Variant 0
/// thickens strokes with a 3×3 dilation; variant 1 keeps them thin.
pub(crate) fn mock_sketch(edges: &GrayImage, variant: u32) -> GrayImage {
    let (w, h) = edges.dimensions();
    let mut sketch = GrayImage::from_pixel(w, h, image::Luma([255u8]));
    for y in 0..h {
        for x in 0..w {
            let mut on = edges.get_pixel(x, y).0[0] > 0;
            if !on && variant == 0 {
                'probe: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        if nx >= 0
                            && ny >= 0
                            && nx < w as i64
                            && ny < h as i64
                            && edges.get_pixel(nx as u32, ny as u32).0[0] > 0
                        {
                            on = true;
                            break 'probe;
                        }
                    }
                }
            }
            if on {
                sketch.put_pixel(x, y, image::Luma([0u8]));
            }
        }
    }
    sketch
}

fn lighten(c: [u8; 3], t: f64) -> [u8; 3] {
    c.map(|v| (v as f64 + (255.0 - v as f64) * t).round() as u8)
}

fn darken(c: [u8; 3], t: f64) -> [u8; 3] {
    c.map(|v| (v as f64 * (1.0 - t)).round() as u8)
}

fn parse_hex_or_gray(hex: &str) -> [u8; 3] {
    crate::roi::parse_hex(hex).unwrap_or([128, 128, 128])
}

/// Product rendering: the sketch strokes tinted over a palette-derived
/// background, with palette chips along the bottom edge. Variants rotate the
/// palette so each rendering leads with a different colour.
pub(crate) fn mock_rendering(
    edges: &GrayImage,
    palette: &Palette,
    variant: u32,
    seed: u64,
) -> RgbImage {
    let (w, h) = edges.dimensions();
    let swatches = &palette.swatches;
    let colour = |i: usize| -> [u8; 3] {
        if swatches.is_empty() {
            [128, 128, 128]
        } else {
            parse_hex_or_gray(&swatches[(variant as usize + i) % swatches.len()].hex)
        }
    };
    let background = lighten(colour(0), 0.75);
    // The variant also shifts the stroke shade so variants stay distinct even
    // under a single-swatch palette.
    let stroke = darken(colour(1), 0.35 + 0.1 * (variant % 3) as f64);
    let mut out = RgbImage::from_pixel(w, h, Rgb(background));
    // A seeded accent band keeps distinct seeds visually distinct.
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(variant as u64));
    let band_y = rng.random_range(0..h.max(1));
    let band = lighten(colour(1), 0.4);
    for y in band_y..(band_y + h.div_ceil(8)).min(h) {
        for x in 0..w {
            out.put_pixel(x, y, Rgb(band));
        }
    }
    for y in 0..h {
        for x in 0..w {
            if edges.get_pixel(x, y).0[0] > 0 {
                out.put_pixel(x, y, Rgb(stroke));
            }
        }
    }
    // Palette chips: one square per swatch along the bottom.
    let chip = (h / 12).clamp(4, 24).min(h);
    for (i, swatch) in swatches.iter().enumerate() {
        let rgb = parse_hex_or_gray(&swatch.hex);
        let x0 = i as u32 * chip;
        if x0 + chip > w {
            break;
        }
        for y in h.saturating_sub(chip)..h {
            for x in x0..x0 + chip {
                out.put_pixel(x, y, Rgb(rgb));
            }
        }
    }
    out
}

/// The presentation step's text summary of everything the run produced.
pub(crate) fn present_text(
    problem_statement: &str,
    roi_count: usize,
    shape: &str,
    texture: &str,
    colour: &str,
    sketch_ids: &[String],
    rendering_ids: &[String],
) -> String {
    format!(
        "Brief: {problem_statement}\n\
         Attended regions: {roi_count}\n\
         Shape: {shape}\n\
         Texture: {texture}\n\
         Colour: {colour}\n\
         Sketches: {}\n\
         Renderings: {}\n\
         Select a rendering and leave a comment to close the loop.\n",
        sketch_ids.join(", "),
        rendering_ids.join(", "),
    )
}
