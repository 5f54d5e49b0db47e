//! The case-study scenarios, compiled into the binary.

use super::manifest::{load, LoadError, Source};
use super::ScenarioSpec;

macro_rules! files {
    ($dir:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../scenarios/", $dir, "/", $name)))),*]
    };
}

const SCENARIOS: &[&str] = &[
    "scenario1",
    "scenario2",
    "scenario3",
    "scenario4",
    "scenario5",
];

const MANIFESTS: &[(&str, &str)] = &[
    (
        "scenario1",
        include_str!("../../scenarios/scenario1/manifest.toml"),
    ),
    (
        "scenario2",
        include_str!("../../scenarios/scenario2/manifest.toml"),
    ),
    (
        "scenario3",
        include_str!("../../scenarios/scenario3/manifest.toml"),
    ),
    (
        "scenario4",
        include_str!("../../scenarios/scenario4/manifest.toml"),
    ),
    (
        "scenario5",
        include_str!("../../scenarios/scenario5/manifest.toml"),
    ),
];

const LIBRARY: &[(&str, &str)] = files!("library":
    "amy_1.slick", "amy_2.slick", "bob_1.slick", "consortium_1.slick", "consortium_2.slick", "dan_1.slick",
    "st-antonius_1.slick", "st-antonius_2.slick", "st-antonius_3.slick", "st-antonius_4.slick",
    "st-antonius_5.slick", "st-antonius_6.slick", "st-antonius_7.slick",
    "surf_1.slick", "surf_2.slick", "surf_3.slick",
);

struct Bundled;

impl Source for Bundled {
    fn manifest(&self, scenario: &str) -> Result<String, LoadError> {
        MANIFESTS
            .iter()
            .find(|(n, _)| *n == scenario)
            .map(|(_, text)| text.to_string())
            .ok_or_else(|| LoadError::NoScenario(scenario.to_string()))
    }

    fn slick(&self, _scenario: &str, file: &str) -> Result<Option<String>, LoadError> {
        Ok(LIBRARY
            .iter()
            .find(|(n, _)| *n == file)
            .map(|(_, text)| text.to_string()))
    }
}

pub fn bundled_names() -> &'static [&'static str] {
    SCENARIOS
}

pub fn load_bundled(name: &str) -> Result<ScenarioSpec, LoadError> {
    load(&Bundled, name)
}

/// The raw text of a bundled library message, by file name.
pub fn library_file(file: &str) -> Option<&'static str> {
    LIBRARY
        .iter()
        .find(|(n, _)| *n == file)
        .map(|(_, text)| *text)
}
