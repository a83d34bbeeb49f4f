use serde::{Deserialize, Serialize};

/// One JSON-lines record per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub trial: u64,
    /// Hex SHA-256 of the canonical config text.
    pub spec_hash: String,
    pub crossing: [bool; 3],
    pub largest_component_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sustained_layers: Option<usize>,
}

impl TrialRecord {
    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("record serializes");
        s.push('\n');
        s
    }
}

/// Parses a JSON-lines report, skipping blank lines.
pub fn parse_json_lines(text: &str) -> crate::Result<Vec<TrialRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| crate::Error::Parse { line: i + 1, msg: e.to_string() }))
        .collect()
}
