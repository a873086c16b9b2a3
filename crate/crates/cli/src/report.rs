//! Command results with a text and a JSON rendering.
//!
//! Reports are `serde_json` objects, whose maps keep keys sorted, so both
//! renderings are stable for identical inputs.

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub body: Map<String, Value>,
    /// Some checked property failed.
    pub violation: bool,
    /// Replaces the text rendering, e.g. for DOT output.
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            body: Map::new(),
            violation: false,
            raw: None,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.body.insert(key.to_string(), value.into());
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.set(key, value);
        self
    }

    pub fn fail(&mut self) {
        self.violation = true;
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut top = self.body.clone();
                top.insert("command".into(), Value::String(self.command.clone()));
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("plain JSON");
                s.push('\n');
                s
            }
            Format::Text if self.raw.is_some() => self.raw.clone().unwrap_or_default(),
            Format::Text => {
                let mut out = format!("{}\n", self.command);
                render_object(&self.body, 2, &mut out);
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Arrays of scalars without spaces render inline as `[a b c]`.
fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    let items = v.as_array()?;
    let parts: Option<Vec<String>> = items
        .iter()
        .map(|x| scalar(x).filter(|s| !s.contains(' ')))
        .collect();
    parts.map(|p| format!("[{}]", p.join(" ")))
}

fn render_object(map: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in map {
        match inline(v) {
            Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
            None => {
                out.push_str(&format!("{pad}{k}:\n"));
                render_value(v, indent + 2, out);
            }
        }
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => render_object(map, indent, out),
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(item, indent + 2, out);
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
    fn text_rendering_is_sorted_and_nested() {
        let mut r = Report::new("classify");
        r.set("flags", json!({"is_lattice": true, "has_rdp": false}));
        r.set("size", 4);
        r.set("blocks", json!([["0", "a", "1"], ["0", "t : x", "1"]]));
        assert_eq!(
            r.render(Format::Text),
            "classify\n  blocks:\n    - [0 a 1]\n    -\n      - 0\n      - t : x\n      - 1\n  flags:\n    has_rdp: false\n    is_lattice: true\n  size: 4\n"
        );
    }

    #[test]
    fn json_includes_command() {
        let r = Report::new("validate").with("valid", true);
        assert_eq!(r.render(Format::Json), "{\n  \"command\": \"validate\",\n  \"valid\": true\n}\n");
    }
}
