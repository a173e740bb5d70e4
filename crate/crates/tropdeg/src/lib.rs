//! Exact-arithmetic toolkit for tropical degeneration fans of hypersurfaces
//! in schön affine varieties: rational polyhedral cones and fans, normal
//! fans of weighted point configurations, matroid fans of hyperplane
//! arrangements, degeneration fans with their bounded-cone classification,
//! and the signed symbolic volume ledger of the resulting strata — ending in
//! an automated reproduction of the Grassmannian computation.

pub mod arrangement;
pub mod cone;
pub mod degeneration;
pub mod exactlat;
pub mod fan;
pub mod grassmann;
pub mod jsonio;
pub mod normalfan;
pub mod par;
pub mod strata;
