//! Machine-readable reports and seeded sampling shared by the command line
//! and the test suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::subset::verify::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>, group: Option<String>, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            group,
            parameters: BTreeMap::new(),
            seed,
            checks: Vec::new(),
            results: Value::Null,
            timing_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_owned(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn check(&mut self, name: impl Into<String>, verdict: Verdict) -> &mut Self {
        self.checks.push(Check { name: name.into(), verdict });
        self
    }

    pub fn any_refuted(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_refuted())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per check: name, status, radius, witness detail.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,status,radius,witness\n");
        for c in &self.checks {
            let (status, radius) = match &c.verdict.status {
                crate::subset::verify::Status::VerifiedExact => ("verified_exact", String::new()),
                crate::subset::verify::Status::VerifiedToRadius { radius } => ("verified_to_radius", radius.to_string()),
                crate::subset::verify::Status::Refuted => ("refuted", String::new()),
            };
            let witness = c.verdict.witness.as_ref().map_or(String::new(), |w| w.detail.replace('"', "\"\""));
            out.push_str(&format!("\"{}\",{status},{radius},\"{witness}\"\n", c.name.replace('"', "\"\"")));
        }
        out
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` items drawn with replacement, in draw order.
pub fn sample_with_replacement<T: Clone>(items: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    (0..n).filter_map(|_| items.choose(rng).cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = Report::new(vec!["verify".into(), "coupme".into()], Some("free(2)".into()), 7);
        r.param("radius", 5).check("x", Verdict::exact());
        let text = r.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        assert!(!text.contains("timing"));
        assert!(r.to_csv().starts_with("check,status"));
    }

    #[test]
    fn seeded_sampling_repeats() {
        let items: Vec<u32> = (0..100).collect();
        let a = sample_with_replacement(&items, 20, &mut rng(3));
        let b = sample_with_replacement(&items, 20, &mut rng(3));
        assert_eq!(a, b);
        assert_ne!(a, sample_with_replacement(&items, 20, &mut rng(4)));
    }
}
