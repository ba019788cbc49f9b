//! Browser bindings for the toolkit. Every export takes an instance
//! document as JSON text and returns a JSON envelope
//! `{"ok": bool, "text": rendered, "report": machine-readable}`;
//! failures carry `{"ok": false, "error": message, "exit": class}`.

use wasm_bindgen::prelude::wasm_bindgen;

use comvar::analysis;
use comvar::document::{parse_document, InstanceDocument};

fn envelope<R: serde::Serialize>(result: comvar::Result<(R, String)>) -> String {
    let value = match result {
        Ok((report, text)) => serde_json::json!({
            "ok": true,
            "text": text,
            "report": report,
        }),
        Err(e) => serde_json::json!({
            "ok": false,
            "error": e.to_string(),
            "exit": e.exit_code(),
        }),
    };
    value.to_string()
}

fn with_doc<R: serde::Serialize>(
    doc_json: &str,
    f: impl FnOnce(&InstanceDocument) -> comvar::Result<(R, String)>,
) -> String {
    envelope(parse_document(doc_json).and_then(|doc| f(&doc)))
}

/// Profile, fibre dimensions and the dimension calculus.
#[wasm_bindgen]
pub fn analyze(doc_json: &str) -> String {
    with_doc(doc_json, |doc| {
        let report = analysis::analyze(doc)?;
        let text = analysis::render_analyze(&report);
        Ok((report, text))
    })
}

/// Irreducible components of the presentable homology locus.
#[wasm_bindgen]
pub fn components(doc_json: &str) -> String {
    with_doc(doc_json, |doc| {
        let report = analysis::components(doc)?;
        let text = analysis::render_components(&report);
        Ok((report, text))
    })
}

/// Exhaustive point counts binned by rank profile, with exact count
/// polynomials.
#[wasm_bindgen]
pub fn count_points(doc_json: &str) -> String {
    with_doc(doc_json, |doc| {
        let report = analysis::count_document(doc, None)?;
        let text = analysis::render_count(&report);
        Ok((report, text))
    })
}

/// Built-in example documents: `[{"id", "title", "json"}]`.
#[wasm_bindgen]
pub fn presets() -> String {
    let list: Vec<serde_json::Value> = analysis::presets()
        .into_iter()
        .map(|p| {
            serde_json::json!({
                "id": p.id,
                "title": p.title,
                "json": p.json,
            })
        })
        .collect();
    serde_json::Value::Array(list).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelopes_are_json() {
        let presets_json: serde_json::Value = serde_json::from_str(&presets()).unwrap();
        let worked = presets_json[0]["json"].as_str().unwrap();
        let small = presets_json[1]["json"].as_str().unwrap();
        for out in [analyze(worked), components(worked), count_points(small)] {
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["ok"], true, "{out}");
            assert!(!v["text"].as_str().unwrap().is_empty());
        }
    }

    #[test]
    fn errors_are_enveloped() {
        let out = analyze("{ nope");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["ok"], false);
        assert_eq!(v["exit"], 1);
    }
}
