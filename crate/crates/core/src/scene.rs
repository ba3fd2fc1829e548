//! Scene description files.
//!
//! One `[target]` section per point scatterer:
//!
//! ```text
//! [target]
//! range_m = 9.6
//! azimuth_m = 4.6
//! amplitude = 1
//! # optional motion, m/s and m/s^2
//! v_r = -0.3
//! # optional oscillator; spring, rest, elastic constant and mass are
//! # required once any osc_ key is present
//! osc_spring_length = 1
//! osc_rest_length = 0
//! osc_elastic_constant = 0.25
//! osc_mass = 1
//! osc_damping = 0
//! osc_a = 0.3
//! osc_b = 0.3
//! ```
//!
//! Unknown keys and sections are rejected so that typos do not silently
//! fall back to defaults.

use crate::error::{Error, Result};
use crate::oscillator::OscillatorParams;
use crate::sim::{MotionParams, SceneTarget};
use crate::text::{Document, Section, Writer};

const MOTION_KEYS: [&str; 4] = ["v_r", "v_a", "a_r", "a_a"];
const KNOWN_KEYS: [&str; 14] = [
    "range_m",
    "azimuth_m",
    "amplitude",
    "v_r",
    "v_a",
    "a_r",
    "a_a",
    "osc_spring_length",
    "osc_rest_length",
    "osc_elastic_constant",
    "osc_mass",
    "osc_damping",
    "osc_a",
    "osc_b",
];

/// Parses a scene file into its targets, in file order.
pub fn parse_scene(text: &str) -> Result<Vec<SceneTarget>> {
    let doc = Document::parse(text)?;
    doc.expect_sections(&["target"])?;
    if let Some(e) = doc.root().entries.first() {
        return Err(Error::parse(e.line, format!("key {} outside a [target] section", e.key)));
    }
    doc.sections_named("target").map(parse_target).collect()
}

fn finite(section: &Section, key: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        let line = section.get(key).map_or(section.line, |e| e.line);
        Err(Error::parse(line, format!("{key} must be finite")))
    }
}

fn parse_target(s: &Section) -> Result<SceneTarget> {
    if let Some(e) = s.entries.iter().find(|e| !KNOWN_KEYS.contains(&e.key.as_str())) {
        return Err(Error::parse(e.line, format!("unknown target key {}", e.key)));
    }
    let range_position = finite(s, "range_m", s.require("range_m")?)?;
    let azimuth_position = finite(s, "azimuth_m", s.require("azimuth_m")?)?;
    let amplitude = finite(s, "amplitude", s.parse_or("amplitude", 1.0)?)?;
    if amplitude < 0.0 {
        return Err(Error::parse(s.line, "amplitude must be non-negative"));
    }

    let motion = if MOTION_KEYS.iter().any(|k| s.get(k).is_some()) {
        let get = |k: &str| -> Result<f64> { finite(s, k, s.parse_or(k, 0.0)?) };
        Some(MotionParams {
            v_r: get("v_r")?,
            v_a: get("v_a")?,
            a_r: get("a_r")?,
            a_a: get("a_a")?,
        })
    } else {
        None
    };

    let oscillator = if s.entries.iter().any(|e| e.key.starts_with("osc_")) {
        let p = OscillatorParams {
            spring_length: s.require("osc_spring_length")?,
            rest_length: s.require("osc_rest_length")?,
            elastic_constant: s.require("osc_elastic_constant")?,
            mass: s.require("osc_mass")?,
            damping: s.parse_or("osc_damping", 0.0)?,
            shift_a: s.parse_or("osc_a", 0.0)?,
            shift_b: s.parse_or("osc_b", 0.0)?,
        };
        p.validate().map_err(|e| Error::parse(s.line, e.to_string()))?;
        Some(p)
    } else {
        None
    };

    Ok(SceneTarget {
        range_position,
        azimuth_position,
        amplitude,
        motion,
        oscillator,
    })
}

/// Renders targets in the format read by [`parse_scene`]; floats use
/// shortest round-trip form so parsing the text gives the targets back.
pub fn scene_to_text(targets: &[SceneTarget]) -> String {
    let mut w = Writer::new();
    for t in targets {
        w.section("target")
            .kv("range_m", t.range_position)
            .kv("azimuth_m", t.azimuth_position)
            .kv("amplitude", t.amplitude);
        if let Some(m) = t.motion {
            w.kv("v_r", m.v_r).kv("v_a", m.v_a).kv("a_r", m.a_r).kv("a_a", m.a_a);
        }
        if let Some(o) = t.oscillator {
            w.kv("osc_spring_length", o.spring_length)
                .kv("osc_rest_length", o.rest_length)
                .kv("osc_elastic_constant", o.elastic_constant)
                .kv("osc_mass", o.mass)
                .kv("osc_damping", o.damping)
                .kv("osc_a", o.shift_a)
                .kv("osc_b", o.shift_b);
        }
    }
    w.finish()
}
