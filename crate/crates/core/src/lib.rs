//! Decompositions of antilinear skew-self-adjoint operators and complex
//! skew-symmetric matrices: Youla block skew-diagonalization, the polar
//! factorization through an anticonjugation, and the Weyl-von Neumann
//! decomposition `A = K + D` with a Schatten-norm budget on `K`.

pub mod antilinear;
pub mod canonical;
pub mod cli;
pub mod cmat;
pub mod error;
pub mod generate;
pub mod matcore;
pub mod schatten;
pub mod verify;
pub mod wvn;

pub use antilinear::{Anticonjugation, AntilinearOperator, Conjugation};
pub use canonical::{
    antilinear_block_skew_diagonalize, polar_factorize, youla_decompose, CanonicalOptions,
    PolarResult, YoulaResult,
};
pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, ComplexVector, C64};
pub use schatten::SchattenP;
pub use wvn::{kernel_split_wvn, skew_symmetric_wvn, wvn_decompose, WvnOptions, WvnResult};
