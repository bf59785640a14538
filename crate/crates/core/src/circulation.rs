//! Simple circuit matrices and cycle decomposition of circulations.
//!
//! A nonnegative line-sum-symmetric matrix `B` is the arc-weight matrix of a
//! circulation on the digraph with an arc `j -> l` wherever `B[j][l] > 0`
//! (diagonal entries are self-loops). Any such circulation is a positive
//! combination of simple directed cycles.

use std::fmt;

use crate::classes::line_sum_deviation;
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// A directed cycle over distinct 1-based node indices, rotated so the
/// smallest node comes first. A single node denotes a self-loop.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleCircuit {
    nodes: Vec<usize>,
}

impl SimpleCircuit {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGraph(
                "circuit needs at least one node".into(),
            ));
        }
        if nodes.contains(&0) {
            return Err(Error::InvalidGraph("circuit nodes are 1-based".into()));
        }
        let mut seen = nodes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != nodes.len() {
            return Err(Error::InvalidGraph(format!(
                "circuit {nodes:?} repeats a node"
            )));
        }
        Ok(Self::canonical(nodes))
    }

    fn canonical(mut nodes: Vec<usize>) -> Self {
        let pos = nodes
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| k)
            .map(|(i, _)| i)
            .unwrap_or(0);
        nodes.rotate_left(pos);
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Arcs `(from, to)` of the cycle, closing arc last.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.nodes.len();
        (0..k).map(move |t| (self.nodes[t], self.nodes[(t + 1) % k]))
    }

    /// The 0/1 matrix with ones on the arcs of the cycle.
    pub fn to_matrix(&self, q: usize) -> Result<RealMatrix> {
        if let Some(&bad) = self.nodes.iter().find(|&&k| k > q) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: q,
            });
        }
        let mut m = RealMatrix::zeros(q);
        for (a, b) in self.arcs() {
            m[(a - 1, b - 1)] = 1.0;
        }
        Ok(m)
    }
}

impl fmt::Display for SimpleCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (t, k) in self.nodes.iter().enumerate() {
            if t > 0 {
                write!(f, " ")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTerm {
    pub alpha: f64,
    pub circuit: SimpleCircuit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDecomposition {
    pub terms: Vec<CircuitTerm>,
    pub source_dim: usize,
    /// Largest residual entry discarded after the walk ran out of arcs.
    pub dust: f64,
}

impl CircuitDecomposition {
    /// `Σ alpha · matrix(circuit)`.
    pub fn reconstruct(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.source_dim);
        for t in &self.terms {
            for (a, b) in t.circuit.arcs() {
                m[(a - 1, b - 1)] += t.alpha;
            }
        }
        m
    }
}

/// Decomposes a nonnegative line-sum-symmetric matrix into weighted cycles.
///
/// Greedy walk: start at the smallest node with residual outflow, step to the
/// smallest-index target with residual above `tol` (the current node itself
/// when it carries a self-loop and is smallest), and on the first repeated
/// node peel off the cycle at its bottleneck weight. Every extraction zeroes
/// at least one arc, so the number of terms is at most `nnz(B)`.
pub fn decompose_circulation(b: &RealMatrix, tol: f64) -> Result<CircuitDecomposition> {
    decompose_circulation_with(b, tol, tol)
}

/// As [`decompose_circulation`], but validates the input at `check_tol`
/// while treating only entries at or below `zero_tol` as absent during the
/// walk.
pub fn decompose_circulation_with(
    b: &RealMatrix,
    check_tol: f64,
    zero_tol: f64,
) -> Result<CircuitDecomposition> {
    let q = b.dim();
    let tol = check_tol;
    for r in 0..q {
        for c in 0..q {
            let x = b[(r, c)];
            if x < -tol || x.is_nan() {
                return Err(Error::NegativeEntry {
                    row: r + 1,
                    col: c + 1,
                    value: x,
                });
            }
        }
    }
    let deviation = line_sum_deviation(b);
    if deviation > tol {
        return Err(Error::NotLineSumSymmetric { deviation });
    }

    let tol = zero_tol;
    let mut res = b.map(|x| if x.abs() <= tol { 0.0 } else { x });
    let mut terms = Vec::new();
    let next = |res: &RealMatrix, x: usize| (0..q).find(|&y| res[(x, y)] > tol);

    'outer: while let Some(start) = (0..q).find(|&x| next(&res, x).is_some()) {
        let mut path = vec![start];
        let mut pos = vec![usize::MAX; q];
        pos[start] = 0;
        let mut cur = start;
        let cycle = loop {
            let Some(y) = next(&res, cur) else {
                // Flow conservation broke down at the dust level.
                break 'outer;
            };
            if pos[y] != usize::MAX {
                break path[pos[y]..].to_vec();
            }
            pos[y] = path.len();
            path.push(y);
            cur = y;
        };
        let k = cycle.len();
        let arc = |t: usize| (cycle[t], cycle[(t + 1) % k]);
        let (alpha, bottleneck) = (0..k)
            .map(|t| (res[arc(t)], t))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("cycle is nonempty");
        for t in 0..k {
            let e = arc(t);
            res[e] = if t == bottleneck { 0.0 } else { res[e] - alpha };
        }
        terms.push(CircuitTerm {
            alpha,
            circuit: SimpleCircuit::canonical(cycle.iter().map(|&x| x + 1).collect()),
        });
    }

    Ok(CircuitDecomposition {
        terms,
        source_dim: q,
        dust: res.max_abs(),
    })
}
