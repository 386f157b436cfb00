//! Example measures bundled with the crate.
//!
//! * `two-generator`: 3-4-5 rotations about `x` and `z` with generic
//!   translations, symmetrized.
//! * `three-generator`: adds a 5-12-13 rotation about `y`, uneven weights.
//! * `screw`: three screw motions with translations along their axes, all of
//!   length 0.4; centered, and every atom sits at the same radius.
//! * `pure-rotation`: the rotation parts of `two-generator` alone.

use crate::error::Result;
use crate::group::{center, AtomicMeasure, Isometry};
use crate::io::GeneratorSet;

pub const TWO_GENERATOR: &str = include_str!("../data/two_generator.json");
pub const THREE_GENERATOR: &str = include_str!("../data/three_generator.json");
pub const SCREW: &str = include_str!("../data/screw.json");
pub const PURE_ROTATION: &str = include_str!("../data/pure_rotation.json");

fn load(text: &str) -> AtomicMeasure {
    GeneratorSet::parse(text).and_then(|s| s.measure()).expect("bundled measure is valid")
}

pub fn two_generator() -> AtomicMeasure {
    load(TWO_GENERATOR)
}

pub fn three_generator() -> AtomicMeasure {
    load(THREE_GENERATOR)
}

pub fn screw() -> AtomicMeasure {
    load(SCREW)
}

pub fn pure_rotation() -> AtomicMeasure {
    load(PURE_ROTATION)
}

/// The three measures with translations.
pub fn operator_measures() -> Vec<AtomicMeasure> {
    vec![two_generator(), three_generator(), screw()]
}

/// Centered versions of [`operator_measures`].
pub fn centered_measures() -> Result<Vec<AtomicMeasure>> {
    operator_measures()
        .iter()
        .map(|mu| center(mu).map(|(c, _)| c.with_label(format!("{}-centered", mu.label()))))
        .collect()
}

/// The unsymmetrized generators of `two-generator`, used as the LSG
/// generator set.
pub fn lsg_generators() -> Vec<Isometry> {
    GeneratorSet::parse(TWO_GENERATOR).and_then(|s| s.generators()).expect("bundled set is valid")
}

/// Looks up a bundled generator set by name.
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "two-generator" => Some(TWO_GENERATOR),
        "three-generator" => Some(THREE_GENERATOR),
        "screw" => Some(SCREW),
        "pure-rotation" => Some(PURE_ROTATION),
        _ => None,
    }
}
