//! The dynamical system `T_{kappa,z,s}` on the compactified real line, its
//! one-dimensional reduction, bounding functions, and certification.

mod bounds;
mod certify;
mod kernel;
mod operator;
mod pointwise;

use serde::{Deserialize, Serialize};

use crate::disorder::RadialDisorder;
use crate::error::{Error, Result};
use crate::real::Real;

pub use bounds::{
    bound_a, bounding_phi, df_ds_at_zero, initial_bound, operator_norm_bound, ratio_f, ratio_f_sup,
};
pub use certify::{
    certify_contraction, certify_large_coupling, large_coupling_bound, Certificate, LargeCouplingReport,
    zeta_for_energy, Model, SearchParams,
};
pub use operator::{apply_t, apply_t_1d, iterate_norms, iterate_norms_1d, kappa_deviation, TransferOperator};
pub use pointwise::{apply_t_pointwise_complex, PointwiseOptions, MAX_POINTWISE_DEPTH};

/// Which one-dimensional convention a chain-form operator uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Zero-coupling tree: `E~ = E/sqrt 2`, `nu~(q) = sqrt 2 nu(sqrt 2 q)`.
    TreeReduced,
    /// The Anderson chain itself: `E` and `nu` unchanged.
    PlainChain,
}

impl Reduction {
    pub fn scale<T: Real>(self) -> T {
        match self {
            Reduction::TreeReduced => T::FRAC_1_SQRT_2(),
            Reduction::PlainChain => T::one(),
        }
    }
}

/// The law of `q` and the energy scaling used by the chain-form operator
/// `(T f)(w) = E[f(-1/(w + E~ - q)) |w + E~ - q|^(-s)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedLaw<T> {
    pub law: RadialDisorder<T>,
    pub reduction: Reduction,
}

impl<T: Real> ReducedLaw<T> {
    pub fn new(nu: &RadialDisorder<T>, reduction: Reduction) -> Result<Self> {
        let law = match reduction {
            Reduction::TreeReduced => nu.scaled(reduction.scale())?,
            Reduction::PlainChain => nu.clone(),
        };
        Ok(Self { law, reduction })
    }

    /// `E~` for a physical energy `E`.
    pub fn energy(&self, e: T) -> T {
        e * self.reduction.scale::<T>()
    }
}

pub(crate) fn check_s<T: Real>(s: T) -> Result<()> {
    if s > T::zero() && s < T::lit(0.5) {
        Ok(())
    } else {
        Err(Error::Domain(format!("s = {s} outside (0, 1/2)")))
    }
}
