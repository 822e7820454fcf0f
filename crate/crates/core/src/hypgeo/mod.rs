//! Upper half-plane hyperbolic geometry: distance, SL(2, R) action,
//! geodesics, the convex energy `f`, and d^2-barycenters.

mod barycenter;
mod geometry;
mod point;

pub use barycenter::{
    barycenter, barycenter_report, double_barycenter, double_barycenter_with, midpoint_law,
    BarycenterOptions, BarycenterReport,
};
pub use geometry::{
    exp_map, f_energy, geodesic_combine, hyp_dist, log_map, midpoint, mobius_apply, tangent_norm,
};
pub(crate) use geometry::{f_energy_unchecked, geodesic_unchecked};
pub use point::{MobiusMap, UpperHalfPoint, WeightedPointSet, POINT_EQ_TOL};
