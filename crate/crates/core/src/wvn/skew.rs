//! The decomposition for `tau`-skew-symmetric linear operators:
//! `T = K + U D U^tr`, with `U^tr = tau U* tau` the `tau`-transpose.
//!
//! `D` is block diagonal in a `tau`-fixed orthonormal frame `Phi` (the
//! columns of [`Conjugation::fixed_basis`]); for the standard conjugation the
//! frame is the identity and `D` is literally `(+) d_j [[0, 1], [-1, 0]]`.

use crate::antilinear::{antilinear_from_linear, linear_from_antilinear, Conjugation};
use crate::canonical::{block_matrix, BlockForm};
use crate::error::{Error, Result};
use crate::matcore::{
    columns_to_matrix, complete_basis, frobenius, svd, ComplexMatrix, ComplexVector,
};

use super::decompose::{wvn_decompose, WvnOptions, WvnResult};

#[derive(Debug, Clone)]
pub struct SkewWvnResult {
    pub k: ComplexMatrix,
    /// `Phi D_block Phi*`.
    pub d: ComplexMatrix,
    pub u: ComplexMatrix,
    /// `(+) d_j [[0, 1], [-1, 0]] (+) 0`, the structural form of `D` in the frame.
    pub d_block: ComplexMatrix,
    pub frame: ComplexMatrix,
    /// The `d_j`, descending.
    pub values: Vec<f64>,
    pub achieved_norm: f64,
    /// Dimension of the kernel split off before decomposing (zero unless
    /// produced by [`kernel_split_wvn`]).
    pub kernel_dim: usize,
}

impl SkewWvnResult {
    /// `||T - K - U D U^tr||_F`.
    pub fn residual(&self, t: &ComplexMatrix, tau: &Conjugation) -> f64 {
        (t - &self.k - &self.u * &self.d * tau.transpose_of(&self.u)).norm()
    }
}

fn require_tau_skew(t: &ComplexMatrix, tau: &Conjugation, tol: f64) -> Result<()> {
    if !t.is_square() || t.nrows() != tau.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not match conjugation of dimension {}",
            t.nrows(),
            t.ncols(),
            tau.dim()
        )));
    }
    let residual = tau.skew_symmetry_residual(t);
    let bound = tol * (1.0 + frobenius(t));
    if !(residual <= bound) {
        return Err(Error::NotSkewSymmetric { residual, bound });
    }
    Ok(())
}

/// `(f_1, e_1, f_2, e_2, ...)`: the block pairs in the order that turns
/// `(+) d_j [[0, -1], [1, 0]]` into `(+) d_j [[0, 1], [-1, 0]]`.
fn swapped_pairs(dim: usize, basis: &[(ComplexVector, ComplexVector)]) -> ComplexMatrix {
    let cols: Vec<ComplexVector> = basis
        .iter()
        .flat_map(|(e, f)| [f.clone(), e.clone()])
        .collect();
    columns_to_matrix(dim, &cols)
}

/// `T = K + U D U^tr` with `K` `tau`-skew-symmetric and `||K||_p < epsilon`.
pub fn skew_symmetric_wvn(
    t: &ComplexMatrix,
    tau: &Conjugation,
    opts: &WvnOptions,
) -> Result<SkewWvnResult> {
    require_tau_skew(t, tau, opts.canonical.tol)?;
    let a = antilinear_from_linear(t, tau)?;
    let r = wvn_decompose(&a, opts)?;
    Ok(from_wvn(t.nrows(), tau, &r))
}

fn from_wvn(n: usize, tau: &Conjugation, r: &WvnResult) -> SkewWvnResult {
    let frame = tau.fixed_basis();
    let d_block = block_matrix(n, &r.values, BlockForm::Congruence);
    SkewWvnResult {
        k: linear_from_antilinear(&r.k, tau),
        d: &frame * &d_block * frame.adjoint(),
        u: swapped_pairs(n, &r.basis) * frame.adjoint(),
        d_block,
        frame,
        values: r.values.clone(),
        achieved_norm: r.achieved_norm,
        kernel_dim: 0,
    }
}

/// As [`skew_symmetric_wvn`], for operators whose kernel has any dimension
/// but coincides with the kernel of the adjoint.
///
/// The kernel is split off, the remaining compression (trivial kernel) is
/// decomposed, and the pieces are re-embedded with the identity on the kernel.
pub fn kernel_split_wvn(
    t: &ComplexMatrix,
    tau: &Conjugation,
    opts: &WvnOptions,
) -> Result<SkewWvnResult> {
    let canon = &opts.canonical;
    require_tau_skew(t, tau, canon.tol)?;
    let n = t.nrows();
    let svd = svd(t);
    let s = &svd.singular_values;
    let s_max = s.first().copied().unwrap_or(0.0);
    let threshold = canon.rank_tol * s_max;
    let (left, right) = (&svd.u, &svd.v);
    let kernel_idx: Vec<usize> = (0..n).filter(|&i| s_max == 0.0 || s[i] <= threshold).collect();
    let gap = (0..n)
        .filter(|i| !kernel_idx.contains(i))
        .map(|i| s[i])
        .fold(f64::INFINITY, f64::min);

    let pick = |m: &ComplexMatrix| {
        let cols: Vec<ComplexVector> = kernel_idx.iter().map(|&i| m.column(i).into_owned()).collect();
        columns_to_matrix(n, &cols)
    };
    let ker_t = pick(right);
    let ker_adj = pick(left);
    let mismatch = (&ker_t * ker_t.adjoint() - &ker_adj * ker_adj.adjoint()).norm();
    // subspace perturbation scales with ||T|| / gap
    let mismatch_bound = canon.tol * (1.0 + if gap.is_finite() { s_max / gap } else { 0.0 });
    if !(mismatch <= mismatch_bound) {
        return Err(Error::KernelMismatch {
            residual: mismatch,
            bound: mismatch_bound,
        });
    }
    let reduce = (tau.matrix() * ker_t.conjugate()
        - &ker_t * (ker_t.adjoint() * tau.matrix() * ker_t.conjugate()))
        .norm();
    if !(reduce <= mismatch_bound) {
        return Err(Error::KernelMismatch {
            residual: reduce,
            bound: mismatch_bound,
        });
    }

    // tau-fixed frame adapted to N(T)^perp (+) N(T)
    let kernel_frame = tau.fixed_basis_of(&ker_t);
    let kdim = kernel_frame.ncols();
    let full = {
        let perp = complete_basis(&kernel_frame);
        let perp_frame = tau.fixed_basis_of(&perp);
        let mut z = ComplexMatrix::zeros(n, n);
        z.columns_mut(0, n - kdim).copy_from(&perp_frame);
        z.columns_mut(n - kdim, kdim).copy_from(&kernel_frame);
        z
    };
    if kdim != kernel_idx.len() || full.ncols() != n {
        return Err(Error::KernelMismatch {
            residual: (kernel_idx.len() as f64 - kdim as f64).abs(),
            bound: 0.0,
        });
    }
    let z1 = full.columns(0, n - kdim).into_owned();
    let m = n - kdim;
    let frame = tau.fixed_basis();

    if m == 0 {
        return Ok(SkewWvnResult {
            k: ComplexMatrix::zeros(n, n),
            d: ComplexMatrix::zeros(n, n),
            u: &full * frame.adjoint(),
            d_block: ComplexMatrix::zeros(n, n),
            frame,
            values: Vec::new(),
            achieved_norm: 0.0,
            kernel_dim: kdim,
        });
    }

    let t2 = z1.adjoint() * t * &z1;
    let inner = skew_symmetric_wvn(&t2, &Conjugation::standard(m), opts)?;
    let mut v = ComplexMatrix::identity(n, n);
    v.view_mut((0, 0), (m, m)).copy_from(&inner.u);
    let mut d_block = ComplexMatrix::zeros(n, n);
    d_block.view_mut((0, 0), (m, m)).copy_from(&inner.d_block);
    Ok(SkewWvnResult {
        k: &z1 * &inner.k * z1.adjoint(),
        d: &frame * &d_block * frame.adjoint(),
        u: &full * v * frame.adjoint(),
        d_block,
        frame,
        values: inner.values,
        achieved_norm: inner.achieved_norm,
        kernel_dim: kdim,
    })
}

/// `(+) d_j [[0, 1], [-1, 0]] (+) 0`.
pub fn standard_block(dim: usize, values: &[f64]) -> ComplexMatrix {
    block_matrix(dim, values, BlockForm::Congruence)
}
