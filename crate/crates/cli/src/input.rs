use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_path_to_error::Segment;

use nlwave::config::RunConfig;

use crate::Global;

/// RFC 6901 pointer for a deserialization path.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize::<_, RunConfig>(de) {
        Ok(cfg) => Ok(cfg),
        Err(err) => {
            let pointer = json_pointer(err.path());
            let pointer = if pointer.is_empty() { "/".to_string() } else { pointer };
            bail!("config error at {pointer}: {}", err.into_inner())
        }
    }
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// Resolved configuration with the command-line overrides applied.
pub fn load(global: &Global) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(n) = global.sample_every {
        cfg.sample_every = n;
    }
    Ok(cfg)
}

pub fn parse_eps_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad eps value {s:?}")))
        .collect()
}
