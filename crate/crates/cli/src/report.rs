use serde::Serialize;
use serde_json::Value;

use crate::commands::Output;

pub const PRECISION_ENV: &str = "DIGITGAP_PRECISION_BITS";

#[derive(Serialize)]
struct Timing {
    seconds: f64,
}

#[derive(Serialize)]
struct Precision {
    bits: u32,
    env: &'static str,
}

/// Envelope printed by `--json`. Serialized through `serde_json::Value`,
/// whose maps are ordered, so keys come out sorted at every level.
#[derive(Serialize)]
pub struct Report {
    version: &'static str,
    command: Vec<String>,
    inputs: Value,
    outputs: Value,
    timing: Timing,
    precision: Precision,
}

impl Report {
    pub fn new(args: &[String], out: &Output, bits: u32, seconds: f64) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION"),
            command: args.to_vec(),
            inputs: out.inputs.clone(),
            outputs: out.outputs.clone(),
            timing: Timing { seconds },
            precision: Precision { bits, env: PRECISION_ENV },
        }
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report is plain data");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}
