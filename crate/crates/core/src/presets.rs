//! Built-in experiment configurations.

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

pub struct Preset {
    pub name: &'static str,
    pub reproduces: &'static str,
    pub json: &'static str,
}

macro_rules! preset {
    ($name:literal, $what:literal) => {
        Preset {
            name: $name,
            reproduces: $what,
            json: include_str!(concat!("../presets/", $name, ".json")),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("fig2", "Fig. 2: exact vs closed-form gain profile, eta = 4, F = 1000 dF"),
    preset!("fig3", "Fig. 3: focal points with non-overlapping 3 dB intervals"),
    preset!("fig4", "Fig. 4: sum rate vs SNR, planned vs random placement"),
    preset!("fig5", "Fig. 5: mean sum rate vs number of users"),
    preset!("a3db", "a3db (1 + eta^2) vs eta"),
    preset!("finite-limit", "finite beam-depth limit vs eta, both sizing modes"),
    preset!("fig6", "Fig. 6: bd-vs-eta dual sizing sweep, F = dB"),
    preset!("fig8", "Fig. 8: direct vs indirect distance approximation error"),
    preset!("fig9", "Fig. 9: non-broadside gain profile, phi = pi/16, F = 1000 dF"),
    preset!("fig10", "Fig. 10: beam depth vs azimuth for tall, square and wide arrays"),
    preset!("fig12a", "Fig. 12a: projected-array approximation vs distance, phi = pi/4"),
    preset!("fig12b", "Fig. 12b: projected-array approximation vs azimuth, d = 1000 dF"),
    preset!("fig13", "Fig. 13: planned sum rate vs eta"),
    preset!("sum-rate-phi", "planned sum rate vs azimuth"),
    preset!("fig14", "Fig. 14: circular aperture gain vs distance"),
    preset!("fig15", "Fig. 15: circular gain, nulls and sidelobes, F = dB"),
    preset!("table1", "Table I: nulls and sidelobe peaks of the circular aperture"),
];

pub fn find(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`; run `nearfield-bd presets`")))
}

pub fn load(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::from_json(find(name)?.json)
}

/// Two-column listing of preset names and what they reproduce.
pub fn listing() -> String {
    let width = PRESETS.iter().map(|p| p.name.len()).max().unwrap_or(0);
    PRESETS
        .iter()
        .map(|p| format!("{:width$}  {}\n", p.name, p.reproduces))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for p in PRESETS {
            load(p.name).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(load("fig99").unwrap_err().is_validation());
    }
}
