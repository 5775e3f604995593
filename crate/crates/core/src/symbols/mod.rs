//! Manin-symbol presentation of ℳ_k(Γ₁(n)), boundary maps, the cuspidal
//! subspace, and conversion of modular symbols to Manin symbols.

mod boundary;
mod cusp;
mod level;
mod modsym;
mod poly;
mod relations;
mod space;

pub use boundary::{BoundaryTarget, CoarseLabel, CuspClass};
pub use cusp::{edge_matrix, Cusp};
pub use level::{en_normalize, enumerate_en, lift_to_sl2, EnPoint, EnTable, Level, ReducedMat};
pub use modsym::{convergent_path, ModSym};
pub use poly::HomPoly;
pub use relations::{j_matrix, relation_generators, x_matrix, Relation};
pub use space::{build_space, build_space_with, ManinGen, SymbolSpace};
