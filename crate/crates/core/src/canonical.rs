//! Canonical forms of complex skew-symmetric matrices.
//!
//! Everything here rests on one pairing routine. For a skew-symmetric `M`
//! with antilinear action `A(x) = M conj(x)`, each positive singular value
//! `r` has an even-dimensional eigenspace of `|A|`. Picking a unit vector `e`
//! in that eigenspace and setting `f = A(e) / r` gives `A(e) = r f` and
//! `A(f) = -r e`, and `<e, f> = 0` because `x^T M x = 0` for every `x`.
//!
//! Candidates for `e` are the conjugated right singular vectors of `M`.
//! Singular values are clustered (relative gap `cluster_tol`); inside a
//! cluster the candidate with the largest residual against the pairs already
//! formed is taken next.

use crate::antilinear::{make_anticonjugation, Anticonjugation, AntilinearOperator};
use crate::error::{Error, Result};
use crate::matcore::{
    antisymmetrize, columns_to_matrix, frobenius, inner, skew_residual, svd, unitarity_residual,
    ComplexMatrix, ComplexVector, C64, DEFAULT_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalOptions {
    /// Residual tolerance for preconditions and the reconstruction check.
    pub tol: f64,
    /// Singular values at or below `rank_tol * s_max` count as kernel.
    pub rank_tol: f64,
    /// Relative gap below which singular values share a cluster.
    pub cluster_tol: f64,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            rank_tol: DEFAULT_TOL,
            cluster_tol: 1e-8,
        }
    }
}

impl CanonicalOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Which 2x2 block the columns of `u` bring the matrix to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockForm {
    /// `M = U (+) [[0, r], [-r, 0]] U^T`; columns ordered `(f_1, e_1, f_2, e_2, ...)`.
    Congruence,
    /// `U* M conj(U) = (+) r [[0, -1], [1, 0]]`; columns ordered `(e_1, f_1, ...)`.
    Antilinear,
}

#[derive(Debug, Clone)]
pub struct YoulaResult {
    pub u: ComplexMatrix,
    /// Positive block values, descending.
    pub r: Vec<f64>,
    pub kernel_dim: usize,
    pub form: BlockForm,
    /// Number of singular values above the rank threshold, before rounding to even.
    pub raw_rank: usize,
    /// Some singular value lies within two decades of the rank threshold, so the
    /// split between kernel and positive part is not numerically determined.
    pub rank_ambiguous: bool,
}

impl YoulaResult {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// The block-diagonal middle factor for this result's [`BlockForm`].
    pub fn block_matrix(&self) -> ComplexMatrix {
        block_matrix(self.dim(), &self.r, self.form)
    }

    /// `||M - U B U^T||_F` (both forms describe the same factorization of `M`).
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.u * self.block_matrix() * self.u.transpose()).norm()
    }

    /// Columns of the `j`-th pair as `(e, f)` with `A e = r f`, `A f = -r e`.
    pub fn pair(&self, j: usize) -> (ComplexVector, ComplexVector) {
        let a = self.u.column(2 * j).into_owned();
        let b = self.u.column(2 * j + 1).into_owned();
        match self.form {
            BlockForm::Antilinear => (a, b),
            BlockForm::Congruence => (b, a),
        }
    }

    pub fn kernel_columns(&self) -> Vec<ComplexVector> {
        (2 * self.r.len()..self.dim())
            .map(|j| self.u.column(j).into_owned())
            .collect()
    }
}

/// `(+) r_j X (+) 0` with `X = [[0, 1], [-1, 0]]` (congruence) or
/// `X = [[0, -1], [1, 0]]` (antilinear).
pub fn block_matrix(dim: usize, r: &[f64], form: BlockForm) -> ComplexMatrix {
    let sign = match form {
        BlockForm::Congruence => 1.0,
        BlockForm::Antilinear => -1.0,
    };
    let mut b = ComplexMatrix::zeros(dim, dim);
    for (j, &v) in r.iter().enumerate() {
        b[(2 * j, 2 * j + 1)] = C64::new(sign * v, 0.0);
        b[(2 * j + 1, 2 * j)] = C64::new(-sign * v, 0.0);
    }
    b
}

struct Pairing {
    pairs: Vec<(ComplexVector, ComplexVector, f64)>,
    kernel: Vec<ComplexVector>,
    raw_rank: usize,
    ambiguous: bool,
}

fn project_out(v: &mut ComplexVector, basis: &[ComplexVector]) {
    for b in basis {
        let c = inner(v, b);
        v.axpy(-c, b, C64::new(1.0, 0.0));
    }
}

fn take_largest(residuals: &[ComplexVector], used: &[bool]) -> Option<(usize, f64)> {
    residuals
        .iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(i, r)| (i, r.norm()))
        .fold(None, |best, (i, n)| match best {
            Some((_, bn)) if bn >= n => best,
            _ => Some((i, n)),
        })
}

fn pair_skew(m: &ComplexMatrix, opts: &CanonicalOptions) -> Result<Pairing> {
    let n = m.nrows();
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return Ok(Pairing {
            pairs: Vec::new(),
            kernel: Vec::new(),
            raw_rank: 0,
            ambiguous: false,
        });
    }
    let svd = svd(m);
    let sigma = &svd.singular_values;
    let u_left = &svd.u;
    let v_t = svd.v.adjoint();
    let candidates: Vec<ComplexVector> = svd.v.column_iter().map(|c| c.conjugate()).collect();

    let s_max = sigma[0];
    let threshold = opts.rank_tol * s_max;
    let raw_rank = if s_max == 0.0 {
        0
    } else {
        sigma.iter().filter(|&&s| s > threshold).count()
    };
    let ambiguous = s_max > 0.0
        && sigma
            .iter()
            .any(|&s| s >= threshold * 1e-2 && s <= threshold * 1e2);
    // singular values of a skew-symmetric matrix come in equal pairs; an odd
    // count means one pair straddles the threshold
    let rank = if raw_rank % 2 == 0 {
        raw_rank
    } else {
        let straddle = 0.5 * (sigma[raw_rank - 1] + sigma[raw_rank]);
        if straddle > threshold {
            raw_rank + 1
        } else {
            raw_rank - 1
        }
    };

    // clusters over the positive part, odd-sized clusters merged forward
    let mut groups: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    for i in 1..=rank {
        let split = i == rank || sigma[i - 1] - sigma[i] > opts.cluster_tol * s_max;
        if split && (i - start) % 2 == 0 {
            groups.push(start..i);
            start = i;
        }
    }

    let mut basis: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut pairs = Vec::with_capacity(rank / 2);
    for group in groups {
        // partial isometry of the cluster: maps conj(e) to A e / r without
        // dividing rounding errors by a possibly small r
        let idx: Vec<usize> = group.clone().collect();
        let left = u_left.select_columns(&idx);
        let right_adj = v_t.select_rows(&idx);
        let mut residuals: Vec<ComplexVector> = group
            .clone()
            .map(|i| {
                let mut r = candidates[i].clone();
                project_out(&mut r, &basis);
                r
            })
            .collect();
        let mut used = vec![false; residuals.len()];
        for _ in 0..group.len() / 2 {
            let (pick, norm) = take_largest(&residuals, &used).ok_or_else(|| {
                Error::ConvergenceFailure("cluster exhausted before pairing completed".into())
            })?;
            if norm <= 1e-8 {
                return Err(Error::ConvergenceFailure(format!(
                    "cluster starting at singular value {:e} is degenerate",
                    sigma[group.start]
                )));
            }
            used[pick] = true;
            let mut e = residuals[pick].clone();
            project_out(&mut e, &basis);
            let e = e.unscale(e.norm());
            let ae = m * e.conjugate();
            let mut f = &left * (&right_adj * e.conjugate());
            project_out(&mut f, &basis);
            let c = inner(&f, &e);
            f.axpy(-c, &e, one);
            let fnorm = f.norm();
            if fnorm == 0.0 {
                return Err(Error::ConvergenceFailure(
                    "image of a positive-part vector vanished".into(),
                ));
            }
            let f = f.unscale(fnorm);
            let r = inner(&ae, &f).re;
            for res in residuals.iter_mut() {
                let ce = inner(res, &e);
                res.axpy(-ce, &e, one);
                let cf = inner(res, &f);
                res.axpy(-cf, &f, one);
            }
            basis.push(e.clone());
            basis.push(f.clone());
            pairs.push((e, f, r));
        }
    }
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2));

    // kernel: remaining singular vectors, then standard basis as a fallback
    let mut residuals: Vec<ComplexVector> = candidates[rank..]
        .iter()
        .cloned()
        .chain((0..n).map(|i| crate::matcore::unit_vector(n, i)))
        .map(|mut r| {
            project_out(&mut r, &basis);
            r
        })
        .collect();
    let kernel_candidates = n - rank;
    let mut used = vec![false; residuals.len()];
    let mut kernel = Vec::with_capacity(n - rank);
    while kernel.len() < n - rank {
        // prefer singular vectors; fall back to the standard basis only when
        // they no longer contribute a well-conditioned direction
        let restricted: Vec<bool> = used
            .iter()
            .enumerate()
            .map(|(i, &u)| u || i >= kernel_candidates)
            .collect();
        let pick = match take_largest(&residuals, &restricted) {
            Some((i, norm)) if norm > 0.5 => (i, norm),
            _ => take_largest(&residuals, &used).expect("standard basis spans the space"),
        };
        used[pick.0] = true;
        let mut v = residuals[pick.0].clone();
        project_out(&mut v, &basis);
        let v = v.unscale(v.norm());
        for res in residuals.iter_mut() {
            let c = inner(res, &v);
            res.axpy(-c, &v, one);
        }
        basis.push(v.clone());
        kernel.push(v);
    }

    Ok(Pairing {
        pairs,
        kernel,
        raw_rank,
        ambiguous,
    })
}

fn assemble(
    m: &ComplexMatrix,
    pairing: Pairing,
    form: BlockForm,
    opts: &CanonicalOptions,
) -> Result<YoulaResult> {
    let n = m.nrows();
    let mut cols = Vec::with_capacity(n);
    for (e, f, _) in &pairing.pairs {
        match form {
            BlockForm::Antilinear => {
                cols.push(e.clone());
                cols.push(f.clone());
            }
            BlockForm::Congruence => {
                cols.push(f.clone());
                cols.push(e.clone());
            }
        }
    }
    cols.extend(pairing.kernel.iter().cloned());
    let result = YoulaResult {
        u: columns_to_matrix(n, &cols),
        r: pairing.pairs.iter().map(|p| p.2).collect(),
        kernel_dim: pairing.kernel.len(),
        form,
        raw_rank: pairing.raw_rank,
        rank_ambiguous: pairing.ambiguous,
    };
    let bound = opts.tol.max(1e-13) * (1.0 + frobenius(m));
    let residual = result.residual(m);
    if !(residual <= bound) {
        return Err(Error::ConvergenceFailure(format!(
            "reconstruction residual {residual:e} exceeds {bound:e}"
        )));
    }
    let unitary = unitarity_residual(&result.u);
    if !(unitary <= opts.tol.max(1e-13) * (n as f64).sqrt()) {
        return Err(Error::ConvergenceFailure(format!(
            "basis orthonormality residual {unitary:e}"
        )));
    }
    Ok(result)
}

/// Unitary congruence `M = U (+) [[0, r_j], [-r_j, 0]] (+) 0 U^T`.
pub fn youla_decompose(m: &ComplexMatrix, opts: &CanonicalOptions) -> Result<YoulaResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let residual = skew_residual(m);
    let bound = opts.tol * (1.0 + frobenius(m));
    if !(residual <= bound) {
        return Err(Error::NotSkewSymmetric { residual, bound });
    }
    let s = antisymmetrize(m);
    let pairing = pair_skew(&s, opts)?;
    assemble(&s, pairing, BlockForm::Congruence, opts)
}

/// Unitary `U` with `U# A U = (+) r_j kappa_2 (+) 0`, where `kappa_2(x, y) = (-conj y, conj x)`.
pub fn antilinear_block_skew_diagonalize(
    a: &AntilinearOperator,
    opts: &CanonicalOptions,
) -> Result<YoulaResult> {
    a.require_skew(opts.tol)?;
    let s = antisymmetrize(a.matrix());
    let pairing = pair_skew(&s, opts)?;
    assemble(&s, pairing, BlockForm::Antilinear, opts)
}

#[derive(Debug, Clone)]
pub struct PolarResult {
    pub kappa: Anticonjugation,
    /// `|A|`, Hermitian positive semidefinite.
    pub modulus: ComplexMatrix,
    /// The block basis both factors were built from.
    pub decomposition: YoulaResult,
}

impl PolarResult {
    /// `kappa o |A|` as a matrix.
    pub fn kappa_modulus(&self) -> ComplexMatrix {
        self.kappa.matrix() * self.modulus.conjugate()
    }

    /// `|A| o kappa` as a matrix.
    pub fn modulus_kappa(&self) -> ComplexMatrix {
        &self.modulus * self.kappa.matrix()
    }

    /// `(||A - kappa|A|||, ||A - |A|kappa||, ||kappa|A| - |A|kappa||)`, Frobenius.
    pub fn residuals(&self, a: &AntilinearOperator) -> (f64, f64, f64) {
        let km = self.kappa_modulus();
        let mk = self.modulus_kappa();
        (
            (a.matrix() - &km).norm(),
            (a.matrix() - &mk).norm(),
            (&km - &mk).norm(),
        )
    }
}

/// `A = kappa |A| = |A| kappa` with `kappa` an anticonjugation.
///
/// `kappa` maps `e_j -> f_j` on each block pair and pairs kernel columns in
/// order; an odd-dimensional kernel admits no anticonjugation at all.
pub fn polar_factorize(a: &AntilinearOperator, opts: &CanonicalOptions) -> Result<PolarResult> {
    let dec = antilinear_block_skew_diagonalize(a, opts)?;
    polar_from_decomposition(dec, opts.tol)
}

/// Builds both polar factors from an antilinear-form block basis.
pub(crate) fn polar_from_decomposition(dec: YoulaResult, tol: f64) -> Result<PolarResult> {
    debug_assert_eq!(dec.form, BlockForm::Antilinear);
    if dec.kernel_dim % 2 == 1 {
        return Err(Error::OddKernel {
            kernel_dim: dec.kernel_dim,
        });
    }
    let n = dec.dim();
    let pairs: Vec<(ComplexVector, ComplexVector)> = (0..n / 2)
        .map(|j| {
            (
                dec.u.column(2 * j).into_owned(),
                dec.u.column(2 * j + 1).into_owned(),
            )
        })
        .collect();
    let kappa = make_anticonjugation(&pairs, tol.max(1e-13) * (n.max(1) as f64).sqrt())?;
    let mut weights = ComplexMatrix::zeros(n, n);
    for (j, &r) in dec.r.iter().enumerate() {
        weights[(2 * j, 2 * j)] = C64::new(r, 0.0);
        weights[(2 * j + 1, 2 * j + 1)] = C64::new(r, 0.0);
    }
    let s = &dec.u * weights * dec.u.adjoint();
    let modulus = (&s + s.adjoint()).unscale(2.0);
    Ok(PolarResult {
        kappa,
        modulus,
        decomposition: dec,
    })
}
