//! Weighted graphs on the `p x q` vertex grid.
//!
//! The vertex at grid coordinate `(i, j)` is row/column `(i - 1) q + j` of
//! the adjacency and Laplacian matrices. Reflecting each edge about its
//! midpoint swaps the column coordinates of its endpoints and realizes the
//! partial transpose at the graph level.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::tensor::{GridIndex, TensorShape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Endpoint with the smaller flattened index.
    pub a: GridIndex,
    pub b: GridIndex,
    pub weight: f64,
}

impl Edge {
    /// Endpoints differ in both grid coordinates.
    pub fn is_entangled(&self) -> bool {
        self.a.i != self.b.i && self.a.j != self.b.j
    }

    pub fn touches(&self, v: GridIndex) -> bool {
        self.a == v || self.b == v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    shape: TensorShape,
    edges: Vec<Edge>,
}

/// Result of reflecting every edge of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    pub graph: WeightedGraph,
    /// Number of edges that landed on an endpoint pair already taken; their
    /// weights were merged.
    pub collisions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeCriterion {
    pub equal: bool,
    pub differing: Vec<GridIndex>,
}

impl WeightedGraph {
    /// Validates and canonicalizes an edge list given as
    /// `(endpoint, endpoint, weight)` triples.
    pub fn new(
        shape: TensorShape,
        edges: impl IntoIterator<Item = (GridIndex, GridIndex, f64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (x, y, w) in edges {
            let kx = shape.flatten(x)?;
            let ky = shape.flatten(y)?;
            if kx == ky {
                return Err(Error::InvalidGraph(format!("self-loop at {x}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!("edge {x}-{y} has weight {w}")));
            }
            let key = (kx.min(ky), kx.max(ky));
            if map.insert(key, w).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {x}-{y}")));
            }
        }
        Ok(Self::from_canonical(shape, map))
    }

    pub fn empty(shape: TensorShape) -> Self {
        Self {
            shape,
            edges: Vec::new(),
        }
    }

    fn from_canonical(shape: TensorShape, map: BTreeMap<(usize, usize), f64>) -> Self {
        let edges = map
            .into_iter()
            .map(|((k, l), weight)| Edge {
                a: shape.unflatten(k).expect("validated index"),
                b: shape.unflatten(l).expect("validated index"),
                weight,
            })
            .collect();
        Self { shape, edges }
    }

    pub fn shape(&self) -> TensorShape {
        self.shape
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn entangled_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_entangled())
    }

    fn index(&self, v: GridIndex) -> usize {
        self.shape.flatten(v).expect("edge endpoints are validated") - 1
    }

    pub fn adjacency(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.shape.n());
        for e in &self.edges {
            let (k, l) = (self.index(e.a), self.index(e.b));
            m[(k, l)] += e.weight;
            m[(l, k)] += e.weight;
        }
        m
    }

    /// Weighted degree of every vertex, in flattened order.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.shape.n()];
        for e in &self.edges {
            d[self.index(e.a)] += e.weight;
            d[self.index(e.b)] += e.weight;
        }
        d
    }

    /// `D - A`.
    pub fn laplacian(&self) -> RealMatrix {
        let mut m = self.adjacency().scale(-1.0);
        for (k, d) in self.degrees().into_iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    /// `(D - A) / trace(D)`: a unit-trace density matrix with zero row sums.
    pub fn laplacian_density(&self) -> Result<RealMatrix> {
        let l = self.laplacian();
        let tr = l.trace();
        if tr <= 0.0 {
            return Err(Error::EmptyGraph);
        }
        Ok(l.scale(1.0 / tr))
    }

    /// Reflects each edge `(i,j)-(i',j')` to `(i,j')-(i',j)`.
    pub fn partial_transpose(&self) -> Reflection {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut collisions = 0;
        for e in &self.edges {
            let x = GridIndex::new(e.a.i, e.b.j);
            let y = GridIndex::new(e.b.i, e.a.j);
            let (kx, ky) = (self.index(x) + 1, self.index(y) + 1);
            let key = (kx.min(ky), kx.max(ky));
            match map.get_mut(&key) {
                Some(w) => {
                    *w += e.weight;
                    collisions += 1;
                }
                None => {
                    map.insert(key, e.weight);
                }
            }
        }
        Reflection {
            graph: Self::from_canonical(self.shape, map),
            collisions,
        }
    }

    /// Compares vertex degrees of the graph and its reflection.
    ///
    /// Degrees are compared up to `1e-12` times the total edge weight so that
    /// summation order cannot flip the outcome.
    pub fn degree_criterion(&self) -> DegreeCriterion {
        let before = self.degrees();
        let after = self.partial_transpose().graph.degrees();
        let scale: f64 = self
            .edges
            .iter()
            .map(|e| e.weight)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        let differing: Vec<GridIndex> = before
            .iter()
            .zip(&after)
            .enumerate()
            .filter(|(_, (x, y))| (*x - *y).abs() > 1e-12 * scale)
            .map(|(k, _)| self.shape.unflatten(k + 1).expect("in range"))
            .collect();
        DegreeCriterion {
            equal: differing.is_empty(),
            differing,
        }
    }
}
