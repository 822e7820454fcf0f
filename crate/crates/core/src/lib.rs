pub mod disorder;
pub mod error;
pub mod grid;
pub mod hypgeo;
pub mod keyest;
pub mod quadrature;
pub mod real;
pub mod transfer;
pub mod treesim;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` instantiations of the generic types.
pub mod f64_types {
    pub type Point = crate::hypgeo::UpperHalfPoint<f64>;
    pub type Mobius = crate::hypgeo::MobiusMap<f64>;
    pub type PointSet = crate::hypgeo::WeightedPointSet<f64>;
    pub type Radial = crate::disorder::RadialDisorder<f64>;
    pub type Scalar = crate::disorder::ScalarDisorder<f64>;
    pub type Transversal = crate::disorder::TransversalDisorder<f64>;
    pub type Grid = crate::grid::WGrid<f64>;
    pub type GridFn = crate::grid::GridFunction<f64>;
    pub type Certificate = crate::transfer::Certificate<f64>;
    pub type ZetaCertificate = crate::keyest::ZetaCertificate<f64>;
    pub type Potential = crate::treesim::PotentialRealization<f64>;
    pub type Profile = crate::treesim::GreenProfile<f64>;
    pub type Estimate = crate::treesim::MomentEstimate<f64>;
}

pub use f64_types::*;
