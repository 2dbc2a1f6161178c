//! Ihara zeta functions of finite graphs, sheaves on graphs, and cusped
//! graphs, computed with exact rational arithmetic.

pub mod cusp;
pub mod cyclic;
pub mod exact;
pub mod graph;
pub mod loops;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod roots;
pub mod series;
pub mod sheaf;
pub mod transfer;
pub mod zeta;

pub use exact::Rational;
pub use graph::{Graph, GraphError, OrientedEdge};
pub use loops::{ClosedPath, LoopClass, LoopError, LoopRecord};
pub use poly::{ExactPoly, SquareFreeDecomposition};
pub use series::TruncatedSeries;
pub use transfer::{edge_operator, EdgeOperator};
pub use zeta::{
    full_report, pole_report, zeta_inverse, CheckResult, CheckStatus, ReportOptions, ZetaError,
    ZetaReport,
};
pub use matrix::Matrix;
pub use sheaf::{CSheaf, SheafError};
pub use cusp::{CuspError, CuspedGraph, WeightScheme};
