use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Human,
}

/// Everything a command prints: the echo, a digest of the resolved inputs,
/// the seed for stochastic commands, and the result payload.
#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub input_digest: String,
    pub seed: Option<u64>,
    pub payload: Value,
}

impl CommandResult {
    /// `inputs` should hold resolved values (truth tables, probabilities),
    /// so equivalent spellings of one input share a digest.
    pub fn new(command: &str, inputs: &Value, seed: Option<u64>, payload: Value) -> Self {
        let canonical = serde_json::to_string(&serde_json::json!({
            "command": command,
            "inputs": inputs,
        }))
        .expect("JSON values serialize");
        CommandResult {
            command: command.to_string(),
            input_digest: hex::encode(Sha256::digest(canonical.as_bytes())),
            seed,
            payload,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("JSON values serialize"),
            Format::Human => {
                let mut out = format!(
                    "{}  (inputs sha256 {})\n",
                    self.command,
                    &self.input_digest[..16]
                );
                if let Some(seed) = self.seed {
                    out.push_str(&format!("seed: {seed}\n"));
                }
                render_value(&self.payload, 0, &mut out);
                out.trim_end().to_string()
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(format!(
                "[{}]",
                items
                    .iter()
                    .filter_map(scalar)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        }
        _ => None,
    }
}

fn render_value(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(item, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_depends_only_on_inputs() {
        let a = CommandResult::new("value", &json!({"f": "and"}), None, json!({"x": 1}));
        let b = CommandResult::new("value", &json!({"f": "and"}), None, json!({"x": 2}));
        let c = CommandResult::new("value", &json!({"f": "or"}), None, json!({"x": 1}));
        assert_eq!(a.input_digest, b.input_digest);
        assert_ne!(a.input_digest, c.input_digest);
        assert_eq!(a.input_digest.len(), 64);
    }

    #[test]
    fn human_rendering() {
        let r = CommandResult::new(
            "value",
            &json!({}),
            Some(3),
            json!({"value": 0.75, "u": "00", "nested": {"ok": true}, "list": [{"w": 0.5}]}),
        );
        let text = r.render(Format::Human);
        assert!(text.contains("value: 0.75"));
        assert!(text.contains("seed: 3"));
        assert!(text.contains("nested:\n  ok: true"));
        assert!(text.contains("list:\n  -\n    w: 0.5"));
    }
}
