//! One reduction step: a finite-rank skew-self-adjoint `K` such that `A + K`
//! is reduced by a `kappa`-invariant subspace containing `f` and `kappa f`.

use crate::antilinear::{Anticonjugation, AntilinearOperator};
use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, ComplexVector};

use super::spectral::{Partition, SpectralResolution};

/// Cells whose share of the seed is at most this fraction of `||f||` are dropped.
pub const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct StepResult {
    /// Orthogonal projection onto `span{f_k, kappa f_k}`.
    pub p: ComplexMatrix,
    pub k: AntilinearOperator,
    /// Normalised pairs `(f_k, kappa f_k)` spanning the range of `p`.
    pub vectors: Vec<(ComplexVector, ComplexVector)>,
    pub cells: usize,
    /// Cells that met the seed but were dropped as numerically empty.
    pub dropped: usize,
}

impl StepResult {
    pub fn rank(&self) -> usize {
        2 * self.vectors.len()
    }

    /// An orthonormal basis of the range of `p`, pairs interleaved.
    pub fn range_basis(&self) -> ComplexMatrix {
        let n = self.p.nrows();
        let mut q = ComplexMatrix::zeros(n, self.rank());
        for (j, (f, g)) in self.vectors.iter().enumerate() {
            q.set_column(2 * j, f);
            q.set_column(2 * j + 1, g);
        }
        q
    }
}

/// Splits `f` over `n` equal cells of the spectrum of `|A|` and builds
/// `K = -(I - P) A P - P A (I - P)`.
///
/// `res` and `kappa` must both come from the same operator `a`.
pub fn rank_projection_step(
    a: &AntilinearOperator,
    kappa: &Anticonjugation,
    res: &SpectralResolution,
    f: &ComplexVector,
    n: usize,
) -> Result<StepResult> {
    let dim = a.dim();
    if f.len() != dim || kappa.dim() != dim || res.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "step inputs disagree: operator {dim}, seed {}, kappa {}, resolution {}",
            f.len(),
            kappa.dim(),
            res.dim()
        )));
    }
    let fnorm = f.norm();
    if fnorm == 0.0 || !fnorm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let partition = Partition::new(res.a, res.b, n.max(1));
    let mut vectors = Vec::new();
    let mut dropped = 0;
    // eigenvalues ascend, so their cells are nondecreasing
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (k, &lambda) in res.eigenvalues.iter().enumerate() {
        let cell = partition.cell_index(lambda).unwrap_or(partition.n - 1);
        match groups.last_mut() {
            Some((c, members)) if *c == cell => members.push(k),
            _ => groups.push((cell, vec![k])),
        }
    }
    for (_, members) in &groups {
        let fk = res.project_eigenspaces(members, f);
        let norm = fk.norm();
        if norm <= DROP_TOL * fnorm {
            dropped += 1;
            continue;
        }
        let fk = fk.unscale(norm);
        let gk = kappa.apply(&fk);
        vectors.push((fk, gk));
    }
    if vectors.is_empty() {
        return Err(Error::ZeroVector);
    }

    let mut p = ComplexMatrix::zeros(dim, dim);
    for (fk, gk) in &vectors {
        p += fk * fk.adjoint() + gk * gk.adjoint();
    }
    let q = ComplexMatrix::identity(dim, dim) - &p;
    let m = a.matrix();
    let leak = &q * m * p.conjugate() + &p * m * q.conjugate();
    Ok(StepResult {
        p,
        k: AntilinearOperator::new(-leak)?,
        vectors,
        cells: partition.n,
        dropped,
    })
}
