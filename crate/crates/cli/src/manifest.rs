use std::collections::BTreeMap;
use std::ffi::OsString;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to rerun a command. `argv` excludes the program
/// name, so `run(["qcap"] + argv)` replays it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub threads: usize,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new<P: Serialize>(subcommand: &str, argv: &[OsString], params: &P, seeds: Vec<u64>) -> Self {
        let parameters = match serde_json::to_value(params) {
            Ok(Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        RunManifest {
            subcommand: subcommand.to_string(),
            argv: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
            parameters,
            seeds,
            tool_version: TOOL_VERSION.to_string(),
            threads: rayon::current_num_threads(),
            wall_time_s: 0.0,
        }
    }
}
