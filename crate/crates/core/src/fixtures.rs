//! Scenarios shipped with the toolkit.

use crate::error::{Error, Result};
use crate::model::Scenario;

const BUNDLED: &[(&str, &str)] = &[
    ("mod2", include_str!("../fixtures/mod2.json")),
    ("ccc-fail", include_str!("../fixtures/ccc-fail.json")),
    ("pentagon", include_str!("../fixtures/pentagon.json")),
    ("parity4", include_str!("../fixtures/parity4.json")),
    ("fig6-a", include_str!("../fixtures/fig6-a.json")),
    ("fig6-b", include_str!("../fixtures/fig6-b.json")),
    ("quantization", include_str!("../fixtures/quantization.json")),
    ("fig12", include_str!("../fixtures/fig12.json")),
    ("feedback", include_str!("../fixtures/feedback.json")),
    ("distortion", include_str!("../fixtures/distortion.json")),
    ("tree-fig10", include_str!("../fixtures/tree-fig10.json")),
    ("multifunc", include_str!("../fixtures/multifunc.json")),
    ("chain-proper", include_str!("../fixtures/chain-proper.json")),
];

const ALIASES: &[(&str, &str)] = &[("example2", "ccc-fail")];

pub fn names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Looks up a bundled scenario by name, with or without a `.json` suffix.
pub fn bundled(name: &str) -> Result<Scenario> {
    let stem = name.rsplit(['/', '\\']).next().unwrap_or(name);
    let stem = stem.strip_suffix(".json").unwrap_or(stem);
    let stem = ALIASES.iter().find(|(a, _)| *a == stem).map_or(stem, |(_, t)| *t);
    let text = BUNDLED
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::invalid("scenario", format!("no bundled scenario named '{name}'")))?;
    Scenario::from_json(text)
}

/// Every bundled scenario, parsed.
pub fn all() -> Vec<(&'static str, Scenario)> {
    BUNDLED
        .iter()
        .map(|(n, t)| (*n, Scenario::from_json(t).expect("bundled scenarios are valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_scenarios_load() {
        assert_eq!(all().len(), BUNDLED.len());
        assert_eq!(bundled("example2.json").unwrap(), bundled("ccc-fail").unwrap());
        assert!(bundled("nope").is_err());
    }
}
