//! WebAssembly bindings for the grid-graph demo in `www/`.
//!
//! Every exported function takes and returns JSON strings. The plain Rust
//! functions underneath are what the tests exercise.

use lapsep::generate::{self, InstanceClass, InstanceKind};
use lapsep::{classify, GridIndex, RealMatrix, TensorShape, Verdict, WeightedGraph};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// An edge between two 1-based grid vertices `[i, j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeView {
    pub a: [usize; 2],
    pub b: [usize; 2],
    pub w: f64,
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphView {
    pub p: usize,
    pub q: usize,
    pub edges: Vec<EdgeView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessView {
    pub eigenvalue: f64,
    /// Per-vertex `[re, im]`, row-major over the grid.
    pub vector: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub verdict: String,
    pub rule: Option<String>,
    pub summary: String,
    pub terms: Option<usize>,
    pub witness: Option<WitnessView>,
    pub pt_min_eigenvalue: Option<f64>,
    /// Vertices whose degree changes under the partial transpose.
    pub degree_changes: Vec<[usize; 2]>,
    pub reflected: GraphView,
}

fn shape(p: usize, q: usize) -> Result<TensorShape, String> {
    TensorShape::new(p, q).map_err(|e| e.to_string())
}

fn build_graph(p: usize, q: usize, edges: &[EdgeSpec]) -> Result<WeightedGraph, String> {
    let spec = edges.iter().map(|e| {
        (
            GridIndex::new(e.a[0], e.a[1]),
            GridIndex::new(e.b[0], e.b[1]),
            e.w,
        )
    });
    WeightedGraph::new(shape(p, q)?, spec).map_err(|e| e.to_string())
}

fn view(g: &WeightedGraph) -> GraphView {
    let s = g.shape();
    let edges = g
        .edges()
        .iter()
        .map(|e| EdgeView {
            a: [e.a.i, e.a.j],
            b: [e.b.i, e.b.j],
            w: e.weight,
            entangled: e.is_entangled(),
        })
        .collect();
    GraphView {
        p: s.p(),
        q: s.q(),
        edges,
    }
}

/// The graph whose normalized Laplacian is `m`, read off the negative
/// off-diagonal entries.
fn graph_of_laplacian(s: TensorShape, m: &RealMatrix) -> Result<WeightedGraph, String> {
    let n = s.n();
    let mut edges = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            if m[(k, l)] < 0.0 {
                let a = s.unflatten(k + 1).map_err(|e| e.to_string())?;
                let b = s.unflatten(l + 1).map_err(|e| e.to_string())?;
                edges.push((a, b, -m[(k, l)]));
            }
        }
    }
    WeightedGraph::new(s, edges).map_err(|e| e.to_string())
}

/// Reflects every edge `(i,j)-(k,l)` to `(i,l)-(k,j)`.
pub fn reflect(p: usize, q: usize, edges: &[EdgeSpec]) -> Result<GraphView, String> {
    Ok(view(&build_graph(p, q, edges)?.partial_transpose().graph))
}

/// Classifies the normalized Laplacian of the graph.
pub fn analyze(p: usize, q: usize, edges: &[EdgeSpec], tol: f64) -> Result<Analysis, String> {
    let g = build_graph(p, q, edges)?;
    let rho = g.laplacian_density().map_err(|e| e.to_string())?;
    let c = classify(&rho, g.shape(), tol);
    let rule = c.verdict.rule().map(|r| r.id().to_string());
    let (mut terms, mut witness) = (None, None);
    let summary = match &c.verdict {
        Verdict::Separable {
            decomposition,
            rule,
        } => {
            terms = Some(decomposition.terms.len());
            format!(
                "Separable (rule {rule}), {} product terms",
                decomposition.terms.len()
            )
        }
        Verdict::SeparableNonConstructive { rule } => {
            format!("Separable (rule {rule}), positive partial transpose")
        }
        Verdict::Entangled { witness: w, rule } => {
            witness = Some(WitnessView {
                eigenvalue: w.eigenvalue,
                vector: w.vector.iter().map(|z| [z.re, z.im]).collect(),
            });
            format!(
                "Entangled (rule {rule}), witness eigenvalue {:.6}",
                w.eigenvalue
            )
        }
        Verdict::Unknown => "Unknown: no rule applies".to_string(),
        Verdict::Invalid { reason } => format!("Invalid: {reason}"),
    };
    let degree_changes = g
        .degree_criterion()
        .differing
        .iter()
        .map(|v| [v.i, v.j])
        .collect();
    Ok(Analysis {
        verdict: c.verdict.kind().to_string(),
        rule,
        summary,
        terms,
        witness,
        pt_min_eigenvalue: c.diagnostics.pt_min_eigenvalue,
        degree_changes,
        reflected: view(&g.partial_transpose().graph),
    })
}

/// A random zero-row-sum instance as a graph. `kind` is `separable`,
/// `entangled` or `random`.
pub fn generate_graph(kind: &str, p: usize, q: usize, seed: u64) -> Result<GraphView, String> {
    let kind: InstanceKind = kind.parse()?;
    let s = shape(p, q)?;
    let mut rng = generate::rng(seed);
    let inst =
        generate::generate(&mut rng, InstanceClass::S10, kind, s).map_err(|e| e.to_string())?;
    let g = match inst.graph {
        Some(g) => g,
        None => graph_of_laplacian(s, &inst.matrix)?,
    };
    Ok(view(&g))
}

fn parse_edges(json: &str) -> Result<Vec<EdgeSpec>, JsError> {
    serde_json::from_str(json).map_err(|e| JsError::new(&format!("bad edge list: {e}")))
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = analyzeGraph)]
pub fn analyze_graph(p: usize, q: usize, edges_json: &str, tol: f64) -> Result<String, JsError> {
    to_json(analyze(p, q, &parse_edges(edges_json)?, tol))
}

#[wasm_bindgen(js_name = reflectGraph)]
pub fn reflect_graph(p: usize, q: usize, edges_json: &str) -> Result<String, JsError> {
    to_json(reflect(p, q, &parse_edges(edges_json)?))
}

#[wasm_bindgen(js_name = generateGraph)]
pub fn generate_graph_json(kind: &str, p: usize, q: usize, seed: u32) -> Result<String, JsError> {
    to_json(generate_graph(kind, p, q, u64::from(seed)))
}
