//! Line-oriented text formats.
//!
//! ```text
//! # matrix: header `n p q`, then n rows of n reals
//! 4 2 2
//! 0.5 0 0 -0.5
//! ...
//! # graph: header `graph p q m`, then m lines `i1 j1 i2 j2 w`
//! graph 2 2 1
//! 1 1 2 2 1
//! # decomposition: header `decomp p q t`, then per term the weight, the
//! # 2p interleaved re/im parts of `a` and the 2q parts of `b`
//! decomp 2 2 1
//! 1
//! 1 0 0 0
//! 1 0 0 0
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. Reals are written in
//! shortest round-trip form, so write-then-read is the identity.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::engine::{ProductDecomposition, ProductTerm};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::RealMatrix;
use crate::tensor::{GridIndex, TensorShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Matrix,
    Graph,
    Decomposition,
}

/// A matrix together with the tensor shape from its header.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub shape: TensorShape,
    pub matrix: RealMatrix,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-comment line as `(line number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (k, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.last = k + 1;
            return Some((k + 1, t.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.last;
        self.next_tokens().ok_or_else(|| {
            parse_err(
                last + 1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    fn finish(&mut self) -> Result<()> {
        match self.next_tokens() {
            Some((line, _)) => Err(parse_err(line, "unexpected trailing data")),
            None => Ok(()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse '{tok}'")))
}

fn reals(line: usize, toks: &[&str], count: usize) -> Result<Vec<f64>> {
    if toks.len() != count {
        return Err(parse_err(
            line,
            format!("expected {count} values, found {}", toks.len()),
        ));
    }
    toks.iter()
        .map(|t| {
            let x: f64 = num(line, t)?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(line, format!("non-finite value '{t}'")))
            }
        })
        .collect()
}

fn shape_at(line: usize, p: usize, q: usize) -> Result<TensorShape> {
    TensorShape::new(p, q).map_err(|_| parse_err(line, "p and q must be positive"))
}

/// Infers the format from the first header token.
pub fn detect_format(text: &str) -> Result<Format> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.expect("a header")?;
    match toks[0] {
        "graph" => Ok(Format::Graph),
        "decomp" => Ok(Format::Decomposition),
        t if t.parse::<usize>().is_ok() => Ok(Format::Matrix),
        t => Err(parse_err(line, format!("unrecognized header token '{t}'"))),
    }
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let mut lines = Lines::new(text);
    let (line, h) = lines.expect("header `n p q`")?;
    if h.len() != 3 {
        return Err(parse_err(line, "matrix header must be `n p q`"));
    }
    let (n, p, q): (usize, usize, usize) = (num(line, h[0])?, num(line, h[1])?, num(line, h[2])?);
    let shape = shape_at(line, p, q)?;
    if n != shape.n() {
        return Err(parse_err(line, format!("n = {n} but p*q = {}", shape.n())));
    }
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        let (line, toks) = lines.expect(&format!("matrix row {}", r + 1))?;
        data.extend(reals(line, &toks, n)?);
    }
    lines.finish()?;
    Ok(MatrixFile {
        shape,
        matrix: RealMatrix::from_vec(n, data)?,
    })
}

pub fn write_matrix(shape: TensorShape, m: &RealMatrix) -> Result<String> {
    shape.check(m)?;
    let mut out = format!("{} {} {}\n", m.dim(), shape.p(), shape.q());
    for r in 0..m.dim() {
        let row: Vec<String> = m.row(r).iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = Lines::new(text);
    let (line, h) = lines.expect("header `graph p q m`")?;
    if h.len() != 4 || h[0] != "graph" {
        return Err(parse_err(line, "graph header must be `graph p q m`"));
    }
    let (p, q, m): (usize, usize, usize) = (num(line, h[1])?, num(line, h[2])?, num(line, h[3])?);
    let shape = shape_at(line, p, q)?;
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (line, t) = lines.expect(&format!("edge {}", k + 1))?;
        if t.len() != 5 {
            return Err(parse_err(line, "edge line must be `i1 j1 i2 j2 w`"));
        }
        let x = GridIndex::new(num(line, t[0])?, num(line, t[1])?);
        let y = GridIndex::new(num(line, t[2])?, num(line, t[3])?);
        let w: f64 = num(line, t[4])?;
        // Validate each edge here so errors carry the line number.
        WeightedGraph::new(shape, [(x, y, w)]).map_err(|e| parse_err(line, e.to_string()))?;
        edges.push((x, y, w));
    }
    lines.finish()?;
    WeightedGraph::new(shape, edges).map_err(|e| parse_err(line, e.to_string()))
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let s = g.shape();
    let mut out = format!("graph {} {} {}\n", s.p(), s.q(), g.edges().len());
    for e in g.edges() {
        let _ = writeln!(
            out,
            "{} {} {} {} {:?}",
            e.a.i, e.a.j, e.b.i, e.b.j, e.weight
        );
    }
    out
}

fn complex_line(line: usize, toks: &[&str], len: usize) -> Result<Vec<Complex64>> {
    let x = reals(line, toks, 2 * len)?;
    Ok(x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

pub fn parse_decomposition(text: &str) -> Result<ProductDecomposition> {
    let mut lines = Lines::new(text);
    let (line, h) = lines.expect("header `decomp p q t`")?;
    if h.len() != 4 || h[0] != "decomp" {
        return Err(parse_err(
            line,
            "decomposition header must be `decomp p q t`",
        ));
    }
    let (p, q, t): (usize, usize, usize) = (num(line, h[1])?, num(line, h[2])?, num(line, h[3])?);
    let shape = shape_at(line, p, q)?;
    let mut terms = Vec::with_capacity(t);
    for k in 0..t {
        let (line, w) = lines.expect(&format!("weight of term {}", k + 1))?;
        let weight = reals(line, &w, 1)?[0];
        let (line, a) = lines.expect(&format!("factor a of term {}", k + 1))?;
        let a = complex_line(line, &a, p)?;
        let (line, b) = lines.expect(&format!("factor b of term {}", k + 1))?;
        let b = complex_line(line, &b, q)?;
        terms.push(ProductTerm { weight, a, b });
    }
    lines.finish()?;
    Ok(ProductDecomposition { shape, terms })
}

pub fn write_decomposition(d: &ProductDecomposition) -> String {
    let mut out = format!("decomp {} {} {}\n", d.shape.p(), d.shape.q(), d.terms.len());
    let cline = |v: &[Complex64]| {
        v.iter()
            .map(|z| format!("{:?} {:?}", z.re, z.im))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for t in &d.terms {
        let _ = writeln!(out, "{:?}", t.weight);
        let _ = writeln!(out, "{}", cline(&t.a));
        let _ = writeln!(out, "{}", cline(&t.b));
    }
    out
}
