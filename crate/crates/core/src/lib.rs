//! Separability and entanglement certificates for density matrices built
//! from generalized Laplacians of weighted graphs and from diagonally
//! dominant nonnegative symmetric matrices on `C^p ⊗ C^q`.
//!
//! A separable verdict carries an explicit product decomposition; an
//! entangled verdict carries a vector on which the partial transpose is
//! negative.
//!
//! ```
//! use lapsep::{classify, GridIndex, TensorShape, Verdict, WeightedGraph};
//!
//! let shape = TensorShape::new(2, 2).unwrap();
//! let g = WeightedGraph::new(shape, [(GridIndex::new(1, 1), GridIndex::new(2, 2), 1.0)]).unwrap();
//! let rho = g.laplacian_density().unwrap();
//! match classify(&rho, shape, 1e-9).verdict {
//!     Verdict::Entangled { witness, .. } => assert!((witness.eigenvalue + 0.5).abs() < 1e-12),
//!     v => panic!("{v:?}"),
//! }
//! ```

pub mod circulation;
pub mod classes;
pub mod engine;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod tensor;

pub use circulation::{decompose_circulation, CircuitDecomposition, CircuitTerm, SimpleCircuit};
pub use classes::{
    block_tridiagonal_inference, blockwise_line_sum_symmetric, classify_membership,
    is_line_sum_symmetric, row_sums_match_after_pt, ClassReport, DEFAULT_TOL,
};
pub use engine::{
    circuit_pair_terms, classify, entanglement_witness, separable_decomposition,
    unitary_pair_terms, verify_decomposition, BlockEmbedding, Classification, MatrixClass,
    ProductDecomposition, ProductTerm, Rule, Verdict, Verification, Witness,
};
pub use error::{Error, Result};
pub use graph::{Edge, WeightedGraph};
pub use linalg::{is_psd, jacobi_eigh, ComplexMatrix, RealMatrix, SpectralDecomposition};
pub use num_complex::Complex64;
pub use tensor::{partial_transpose, GridIndex, TensorShape};
