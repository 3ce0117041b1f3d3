//! JSON scene documents with a canonical, byte-stable serialization.

use serde_json::Value;

use crate::num::Real;

use super::error::SceneError;
use super::types::SceneConfig;
use super::validate::validate_scene;

/// Significant digits kept for every floating-point value in a scene document.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Report unknown keys as warnings instead of failing.
    pub lenient: bool,
}

#[derive(Clone, Debug)]
pub struct ParsedScene<T> {
    pub scene: SceneConfig<T>,
    /// JSON paths of ignored unknown keys (lenient mode only).
    pub warnings: Vec<String>,
}

/// Strict parse: unknown keys are schema errors and the result must validate.
pub fn parse_scene<T: Real>(text: &str) -> Result<SceneConfig<T>, SceneError> {
    parse_scene_with(text, ParseOptions::default()).map(|p| p.scene)
}

pub fn parse_scene_with<T: Real>(text: &str, opts: ParseOptions) -> Result<ParsedScene<T>, SceneError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let mut unknown = Vec::new();
    let scene: SceneConfig<T> =
        serde_ignored::deserialize(&mut de, |path| unknown.push(path.to_string())).map_err(classify)?;
    de.end().map_err(classify)?;
    if !opts.lenient && !unknown.is_empty() {
        return Err(SceneError::Schema(format!("unknown field(s): {}", unknown.join(", "))));
    }
    let report = validate_scene(&scene);
    if !report.is_empty() {
        return Err(SceneError::Validation(report));
    }
    Ok(ParsedScene { scene, warnings: unknown })
}

fn classify(e: serde_json::Error) -> SceneError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => SceneError::Schema(e.to_string()),
        Category::Syntax | Category::Eof | Category::Io => {
            SceneError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
        }
    }
}

/// Canonical document: sorted keys, two-space indentation, floats rounded to
/// nine significant digits, trailing newline.
pub fn serialize_scene<T: Real>(scene: &SceneConfig<T>) -> String {
    let mut v = serde_json::to_value(scene).expect("scene types serialize to JSON");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
            // -0.0 and 0.0 print differently; keep one canonical zero
            let r = if r == 0.0 { 0.0 } else { r };
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}
