//! Seeded instance generators.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded through
//! `SeedableRng::seed_from_u64`, which produces the same stream on every
//! platform.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::circulation::{CircuitTerm, SimpleCircuit};
use crate::engine::{
    entanglement_witness, separable_decomposition, verify_decomposition, MatrixClass,
    ProductDecomposition, VERIFY_TOL,
};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::RealMatrix;
use crate::tensor::{GridIndex, TensorShape};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix class of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceClass {
    /// Unit trace, zero row sums, nonpositive off-diagonal.
    S10,
    /// Unit trace, nonnegative row sums, nonpositive off-diagonal.
    S1,
    /// Unit trace, nonnegative, diagonally dominant.
    V1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Separable,
    Entangled,
    Random,
}

impl FromStr for InstanceClass {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "s10" => Ok(Self::S10),
            "s1" => Ok(Self::S1),
            "v1" => Ok(Self::V1),
            _ => Err(format!("unknown class '{s}' (expected s10, s1 or v1)")),
        }
    }
}

impl FromStr for InstanceKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "separable" => Ok(Self::Separable),
            "entangled" => Ok(Self::Entangled),
            "random" => Ok(Self::Random),
            _ => Err(format!(
                "unknown kind '{s}' (expected separable, entangled or random)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub shape: TensorShape,
    pub matrix: RealMatrix,
    /// The graph whose Laplacian produced the matrix, when there is one.
    pub graph: Option<WeightedGraph>,
    /// Present for separable instances.
    pub decomposition: Option<ProductDecomposition>,
}

/// A random circulation on `q` nodes made of up to `max_circuits` weighted
/// simple cycles. Returns the matrix and the cycles that built it.
pub fn random_circulation(
    rng: &mut impl Rng,
    q: usize,
    max_circuits: usize,
) -> (RealMatrix, Vec<CircuitTerm>) {
    let count = rng.gen_range(1..=max_circuits.max(1));
    let mut m = RealMatrix::zeros(q);
    let mut terms = Vec::with_capacity(count);
    let mut nodes: Vec<usize> = (1..=q).collect();
    for _ in 0..count {
        let k = rng.gen_range(1..=q);
        nodes.shuffle(rng);
        let circuit = SimpleCircuit::new(nodes[..k].to_vec()).expect("distinct nodes");
        let alpha = rng.gen_range(0.1..1.0);
        for (a, b) in circuit.arcs() {
            m[(a - 1, b - 1)] += alpha;
        }
        terms.push(CircuitTerm { alpha, circuit });
    }
    (m, terms)
}

/// Random weighted graph: each vertex pair becomes an edge with probability
/// `density`; weights are drawn by `weight`. At least one edge is present.
pub fn random_graph(
    rng: &mut impl Rng,
    shape: TensorShape,
    density: f64,
    mut weight: impl FnMut(&mut dyn rand::RngCore) -> f64,
) -> Result<WeightedGraph> {
    let n = shape.n();
    if n < 2 {
        return Err(Error::InvalidGraph(
            "a graph needs at least two vertices".into(),
        ));
    }
    let mut edges = Vec::new();
    for k in 1..=n {
        for l in k + 1..=n {
            if rng.gen_bool(density) {
                edges.push((shape.unflatten(k)?, shape.unflatten(l)?, weight(rng)));
            }
        }
    }
    if edges.is_empty() {
        let k = rng.gen_range(1..n);
        edges.push((shape.unflatten(k)?, shape.unflatten(k + 1)?, weight(rng)));
    }
    WeightedGraph::new(shape, edges)
}

/// Graph whose entangled edges all meet at one randomly chosen vertex, plus
/// random row/column edges elsewhere. Requires `p, q >= 2`.
pub fn star_graph(rng: &mut impl Rng, shape: TensorShape) -> Result<WeightedGraph> {
    let (p, q) = (shape.p(), shape.q());
    if p < 2 || q < 2 {
        return Err(Error::InvalidGraph(format!(
            "entangled edges need p, q >= 2 (got {p}x{q})"
        )));
    }
    let center = GridIndex::new(rng.gen_range(1..=p), rng.gen_range(1..=q));
    let mut others: Vec<GridIndex> = (1..=p)
        .flat_map(|i| (1..=q).map(move |j| GridIndex::new(i, j)))
        .filter(|v| v.i != center.i && v.j != center.j)
        .collect();
    others.shuffle(rng);
    let k = rng.gen_range(1..=others.len().min(3));
    let mut edges: Vec<(GridIndex, GridIndex, f64)> = others[..k]
        .iter()
        .map(|&v| (center, v, rng.gen_range(0.2..1.0)))
        .collect();
    for x in 1..=shape.n() {
        for y in x + 1..=shape.n() {
            let (a, b) = (shape.unflatten(x)?, shape.unflatten(y)?);
            if (a.i == b.i || a.j == b.j) && rng.gen_bool(0.3) {
                edges.push((a, b, rng.gen_range(0.2..1.0)));
            }
        }
    }
    WeightedGraph::new(shape, edges)
}

fn normalize(m: RealMatrix) -> RealMatrix {
    let t = m.trace();
    m.scale(1.0 / t)
}

/// Random symmetric block in the requested class: a Laplacian part for `S`,
/// a nonnegative diagonally dominant part for `V`.
fn random_class_block(rng: &mut impl Rng, q: usize, class: InstanceClass) -> RealMatrix {
    let mut m = RealMatrix::zeros(q);
    for j in 0..q {
        for l in j + 1..q {
            if rng.gen_bool(0.5) {
                let w = rng.gen_range(0.05..0.5);
                let off = if class == InstanceClass::V1 { w } else { -w };
                m[(j, l)] = off;
                m[(l, j)] = off;
                m[(j, j)] += w;
                m[(l, l)] += w;
            }
        }
    }
    if class != InstanceClass::S10 {
        for j in 0..q {
            if rng.gen_bool(0.5) {
                m[(j, j)] += rng.gen_range(0.0..0.3);
            }
        }
    }
    m
}

fn separable_instance(
    rng: &mut impl Rng,
    shape: TensorShape,
    class: InstanceClass,
) -> Result<Instance> {
    let (p, q) = (shape.p(), shape.q());
    let sign = if class == InstanceClass::V1 {
        1.0
    } else {
        -1.0
    };
    let mut a = RealMatrix::zeros(shape.n());
    for u in 0..p {
        let r = random_class_block(rng, q, class);
        for j in 0..q {
            for l in 0..q {
                a[(u * q + j, u * q + l)] += r[(j, l)];
            }
        }
    }
    for u in 0..p {
        for v in u + 1..p {
            if !rng.gen_bool(0.75) {
                continue;
            }
            let (b, _) = random_circulation(rng, q, 3);
            let rows = b.row_sums();
            for j in 0..q {
                a[(u * q + j, u * q + j)] += rows[j];
                a[(v * q + j, v * q + j)] += rows[j];
                for l in 0..q {
                    a[(u * q + j, v * q + l)] += sign * b[(j, l)];
                    a[(v * q + l, u * q + j)] += sign * b[(j, l)];
                }
            }
        }
    }
    if a.trace() <= 0.0 {
        a = RealMatrix::identity(shape.n());
    }
    let matrix = normalize(a);
    let mclass = if class == InstanceClass::V1 {
        MatrixClass::V
    } else {
        MatrixClass::S
    };
    let decomposition = separable_decomposition(&matrix, shape, mclass)?;
    let check = verify_decomposition(&matrix, &decomposition, VERIFY_TOL)?;
    if !check.valid {
        return Err(Error::BadEmbedding(format!(
            "generated decomposition failed verification (error {:e})",
            check.max_error
        )));
    }
    Ok(Instance {
        shape,
        matrix,
        graph: None,
        decomposition: Some(decomposition),
    })
}

fn entangled_instance(
    rng: &mut impl Rng,
    shape: TensorShape,
    class: InstanceClass,
) -> Result<Instance> {
    const ATTEMPTS: usize = 100;
    for _ in 0..ATTEMPTS {
        let graph = star_graph(rng, shape)?;
        let matrix = match class {
            InstanceClass::S10 => graph.laplacian_density()?,
            InstanceClass::S1 => {
                let l = graph.laplacian_density()?;
                let Some(w) = entanglement_witness(&l, shape, 1e-9)? else {
                    continue;
                };
                // Diagonal shift smaller than the negative eigenvalue keeps
                // the partial transpose indefinite.
                let budget = 0.5 * w.eigenvalue.abs();
                let mut m = l;
                for k in 0..shape.n() {
                    m[(k, k)] += rng.gen_range(0.0..budget);
                }
                normalize(m)
            }
            InstanceClass::V1 => {
                let adj = graph.adjacency();
                let mut m = adj.clone();
                for (k, d) in graph.degrees().into_iter().enumerate() {
                    m[(k, k)] = d;
                }
                normalize(m)
            }
        };
        if entanglement_witness(&matrix, shape, 1e-9)?.is_some() {
            let graph = (class == InstanceClass::S10).then_some(graph);
            return Ok(Instance {
                shape,
                matrix,
                graph,
                decomposition: None,
            });
        }
    }
    Err(Error::InvalidGraph(format!(
        "no entangled instance found in {ATTEMPTS} attempts"
    )))
}

fn random_instance(
    rng: &mut impl Rng,
    shape: TensorShape,
    class: InstanceClass,
) -> Result<Instance> {
    match class {
        InstanceClass::S10 | InstanceClass::S1 => {
            let graph = random_graph(rng, shape, 0.4, |r| r.gen_range(1..=3) as f64)?;
            let mut l = graph.laplacian();
            if class == InstanceClass::S1 {
                for k in 0..shape.n() {
                    if rng.gen_bool(0.5) {
                        l[(k, k)] += rng.gen_range(0.0..1.0);
                    }
                }
            }
            let graph = (class == InstanceClass::S10).then_some(graph);
            Ok(Instance {
                shape,
                matrix: normalize(l),
                graph,
                decomposition: None,
            })
        }
        InstanceClass::V1 => {
            let n = shape.n();
            let mut m = RealMatrix::zeros(n);
            for k in 0..n {
                for l in k + 1..n {
                    if rng.gen_bool(0.4) {
                        let w = rng.gen_range(0.05..1.0);
                        m[(k, l)] = w;
                        m[(l, k)] = w;
                        m[(k, k)] += w;
                        m[(l, l)] += w;
                    }
                }
            }
            for k in 0..n {
                m[(k, k)] += rng.gen_range(0.0..0.5);
            }
            if m.trace() <= 0.0 {
                m = RealMatrix::identity(n);
            }
            Ok(Instance {
                shape,
                matrix: normalize(m),
                graph: None,
                decomposition: None,
            })
        }
    }
}

/// Generates one instance. Separable instances carry a verified
/// decomposition; entangled instances are checked to have a witness.
pub fn generate(
    rng: &mut impl Rng,
    class: InstanceClass,
    kind: InstanceKind,
    shape: TensorShape,
) -> Result<Instance> {
    match kind {
        InstanceKind::Separable => separable_instance(rng, shape, class),
        InstanceKind::Entangled => entangled_instance(rng, shape, class),
        InstanceKind::Random => {
            if shape.n() < 2 && class != InstanceClass::V1 {
                return Err(Error::InvalidGraph("random graphs need n >= 2".into()));
            }
            random_instance(rng, shape, class)
        }
    }
}
