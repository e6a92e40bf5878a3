//! The Weyl-von Neumann construction for antilinear skew-self-adjoint
//! operators and its linear skew-symmetric corollaries.

mod decompose;
mod skew;
mod spectral;
mod step;

pub use decompose::{wvn_decompose, StepSummary, WvnOptions, WvnResult, SEED_TOL};
pub use skew::{kernel_split_wvn, skew_symmetric_wvn, standard_block, SkewWvnResult};
pub use spectral::{
    spectral_measure_g, spectral_projection, spectral_resolution, Interval, Partition,
    SpectralResolution,
};
pub use step::{rank_projection_step, StepResult, DROP_TOL};
