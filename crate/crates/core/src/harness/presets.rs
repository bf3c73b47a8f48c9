use super::config::Verb;

/// Checked-in configs: `(name, verb they are meant for, file text)`.
pub const PRESETS: &[(&str, Verb, &str)] = &[
    ("fig1-left", Verb::Run, include_str!("../../presets/fig1-left.toml")),
    ("fig1-right", Verb::Run, include_str!("../../presets/fig1-right.toml")),
    ("robust", Verb::Run, include_str!("../../presets/robust.toml")),
    ("gibbs", Verb::Run, include_str!("../../presets/gibbs.toml")),
    ("peel", Verb::Peel, include_str!("../../presets/peel.toml")),
    ("coupled", Verb::Coupled, include_str!("../../presets/coupled.toml")),
    ("sweep-n", Verb::Sweep, include_str!("../../presets/sweep-n.toml")),
    (
        "landscape-bruteforce",
        Verb::Landscape,
        include_str!("../../presets/landscape-bruteforce.toml"),
    ),
    (
        "landscape-mscan",
        Verb::Landscape,
        include_str!("../../presets/landscape-mscan.toml"),
    ),
    (
        "kappa-table",
        Verb::Landscape,
        include_str!("../../presets/kappa-table.toml"),
    ),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentConfig;

    #[test]
    fn presets_parse_and_validate() {
        for &(name, verb, text) in PRESETS {
            let cfg = ExperimentConfig::from_toml(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.validate(verb).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
