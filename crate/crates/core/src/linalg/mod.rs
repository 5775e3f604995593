//! Exact linear algebra over Q (and over K = Q(√−d) where weight k > 2
//! requires it): sparse row reduction, kernels, subspaces, characteristic
//! polynomials and rational eigenspaces.

mod eigen;
mod poly;
mod scalar;
mod sparse;

pub use eigen::{rational_eigensystem, rational_roots, EigenDecomposition, EigenPart, IntPoly};
pub use poly::{charpoly, UniPoly};
pub use scalar::{int_to_rational, rational, QuadRat, Scalar, Q};
pub use sparse::{
    echelon, kernel, rank, sv_axpy, sv_collect, sv_dot, sv_from_dense, sv_get, sv_scale,
    sv_to_dense, Echelon, RowReducer, SparseMat, SparseVec, Subspace,
};
