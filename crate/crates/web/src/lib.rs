//! Browser bindings: minimize a bunch, compare two bunches, and summarize a
//! configuration space. Every export takes grape or graph text and returns
//! JSON text.

use grapeqi::cube::{self, CubeComplex, SimpleGraph};
use grapeqi::io::{self, AnyInput};
use grapeqi::qi;
use grapeqi::reductions;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest drawing sent back to the page.
const MAX_DRAWN_VERTICES: usize = 400;

fn drawing(labels: &[String], edges: impl Iterator<Item = (usize, usize)>) -> Value {
    if labels.len() > MAX_DRAWN_VERTICES {
        return Value::Null;
    }
    let edges: Vec<[usize; 2]> = edges.map(|(a, b)| [a, b]).collect();
    json!({ "labels": labels, "edges": edges })
}

fn graph_drawing(gr: &SimpleGraph) -> Value {
    drawing(gr.names(), gr.edges().iter().copied())
}

fn complex_drawing(cc: &CubeComplex) -> Value {
    drawing(cc.labels(), (0..cc.edge_count()).map(|e| cc.edge_ends(e)))
}

pub fn minimize_json(text: &str) -> Result<String, String> {
    let g = io::parse_grape(text).map_err(|e| e.to_string())?;
    let (min, trace) = reductions::quasi_minimal(&g).map_err(|e| e.to_string())?;
    let out = json!({
        "document": io::serialize_grape(&min),
        "canonical_form": min.canonical_form(),
        "steps": trace.len(),
        "graph": graph_drawing(&cube::realize_grape(&min)),
    });
    Ok(out.to_string())
}

pub fn decide_qi_json(left: &str, right: &str) -> Result<String, String> {
    let a = io::parse_grape(left).map_err(|e| format!("left: {e}"))?;
    let b = io::parse_grape(right).map_err(|e| format!("right: {e}"))?;
    let d = qi::decide_qi(&a, &b).map_err(|e| e.to_string())?;
    Ok(json!({
        "quasi_isometric": d.quasi_isometric,
        "left": d.left.to_string(),
        "right": d.right.to_string(),
    })
    .to_string())
}

pub fn configuration_space_json(text: &str, n: usize) -> Result<String, String> {
    let base = match io::parse_any(text).map_err(|e| e.to_string())? {
        AnyInput::Graph(g) => g,
        AnyInput::Grape(b) => cube::realize_grape(&b),
    };
    let base = cube::subdivide_for(&base, n).map_err(|e| e.to_string())?;
    let cc = cube::build_udn(&base, n).map_err(|e| e.to_string())?;
    let (b0, b1) = cc.betti();
    let links = cc.links_ok();
    Ok(json!({
        "f_vector": cc.f_vector(),
        "b0": b0,
        "b1": b1,
        "npc": links.ok,
        "special": links.ok && cc.hyperplanes().is_clean(),
        "graph": complex_drawing(&cc),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn minimize(text: &str) -> Result<String, JsValue> {
    minimize_json(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decide_qi(left: &str, right: &str) -> Result<String, JsValue> {
    decide_qi_json(left, right).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn configuration_space(text: &str, n: usize) -> Result<String, JsValue> {
    configuration_space_json(text, n).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimize_star() {
        let text = "stem c a\nstem c b\nstem c d\nstem c e\nloops a 1\nloops b 1\nloops c 1\nloops d 1\nloops e 1";
        let v: Value = serde_json::from_str(&minimize_json(text).unwrap()).unwrap();
        assert_eq!(v["document"], "format 1\nstem a c\nstem b c\nloops a 1\nloops b 1\nloops c 1\n");
        assert_eq!(v["graph"]["labels"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn qi_pair() {
        let v: Value = serde_json::from_str(&decide_qi_json("stem a b\nloops a 1\nloops b 1", "stem x y\nloops x 1\nloops y 1").unwrap()).unwrap();
        assert_eq!(v["quasi_isometric"], true);
        assert!(decide_qi_json("stem a b", "loops o 1").unwrap_err().starts_with("left"));
    }

    #[test]
    fn hexagon() {
        let v: Value = serde_json::from_str(&configuration_space_json("edge c x\nedge c y\nedge c z", 2).unwrap()).unwrap();
        assert_eq!(v["f_vector"], json!([6, 6]));
        assert_eq!(v["b1"], 1);
        assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 6);
    }
}
