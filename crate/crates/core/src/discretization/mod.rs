//! Triangulated rectangles, nodal P1 fields and element quadrature.

mod field;
mod mesh;
mod quadrature;

pub use field::{CellField, MeshFunction};
pub use mesh::{Mesh, Rect};
pub use quadrature::{integrate_cells, integrate_nodal, QuadratureRule, QuadratureTable};
