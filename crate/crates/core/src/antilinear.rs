//! Antilinear operators on `C^n`.
//!
//! An antilinear operator is stored by its matrix against the standard
//! conjugation: `A(x) = M conj(x)`. With that convention the antilinear adjoint
//! `A#` is the plain transpose, skew-self-adjointness is complex
//! skew-symmetry of `M`, and composing two antilinear maps yields a linear map
//! (returned as a bare matrix, never as an `AntilinearOperator`).

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::matcore::{
    columns_to_matrix, frobenius, inner, svd, unit_vector, unitarity_residual, ComplexMatrix,
    ComplexVector, C64,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOperator {
    mat: ComplexMatrix,
}

impl AntilinearOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "antilinear operator matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `x -> M conj(x)`.
    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        &self.mat * x.conjugate()
    }

    /// The antilinear adjoint, characterised by `<Ax, y> = conj(<x, A# y>)`.
    pub fn sharp(&self) -> Self {
        Self {
            mat: self.mat.transpose(),
        }
    }

    /// `self o other`, a linear map.
    pub fn compose(&self, other: &AntilinearOperator) -> ComplexMatrix {
        &self.mat * other.mat.conjugate()
    }

    /// `self o L` for a linear `L`.
    pub fn after_linear(&self, l: &ComplexMatrix) -> AntilinearOperator {
        Self {
            mat: &self.mat * l.conjugate(),
        }
    }

    /// `L o self` for a linear `L`.
    pub fn before_linear(&self, l: &ComplexMatrix) -> AntilinearOperator {
        Self { mat: l * &self.mat }
    }

    /// `||M + M^T||_F`, zero exactly when `A# = -A`.
    pub fn skew_residual(&self) -> f64 {
        (&self.mat + self.mat.transpose()).norm()
    }

    pub fn is_skew_self_adjoint(&self, tol: f64) -> bool {
        self.skew_residual() <= tol * (1.0 + frobenius(&self.mat))
    }

    pub(crate) fn require_skew(&self, tol: f64) -> Result<()> {
        let residual = self.skew_residual();
        let bound = tol * (1.0 + frobenius(&self.mat));
        if residual > bound {
            return Err(Error::NotSkewSelfAdjoint { residual, bound });
        }
        Ok(())
    }
}

impl Add for &AntilinearOperator {
    type Output = AntilinearOperator;
    fn add(self, rhs: Self) -> AntilinearOperator {
        AntilinearOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &AntilinearOperator {
    type Output = AntilinearOperator;
    fn sub(self, rhs: Self) -> AntilinearOperator {
        AntilinearOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Neg for &AntilinearOperator {
    type Output = AntilinearOperator;
    fn neg(self) -> AntilinearOperator {
        AntilinearOperator { mat: -&self.mat }
    }
}

pub fn sharp(a: &AntilinearOperator) -> AntilinearOperator {
    a.sharp()
}

pub fn is_skew_self_adjoint(a: &AntilinearOperator, tol: f64) -> bool {
    a.is_skew_self_adjoint(tol)
}

/// `|A|`, the positive square root of `A# A` (whose matrix is `M^T conj(M)`).
///
/// Computed from the singular value decomposition `M = W S V*`, which gives
/// `|A| = conj(V) S V^T` without squaring the condition number.
pub fn modulus(a: &AntilinearOperator) -> ComplexMatrix {
    let n = a.dim();
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let svd = svd(&a.mat);
    let mut left = svd.v.conjugate();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        left.column_mut(j).scale_mut(s);
    }
    let m = left * svd.v.transpose();
    (&m + m.adjoint()).scale(0.5)
}

fn validation_error(what: &'static str, residual: f64, bound: f64) -> Error {
    Error::InvalidStructure {
        what,
        residual,
        bound,
    }
}

/// An antilinear isometric involution `tau(x) = C conj(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugation {
    mat: ComplexMatrix,
}

impl Conjugation {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("conjugation matrix must be square".into()));
        }
        let n = mat.nrows();
        let unitary = unitarity_residual(&mat);
        if unitary > tol {
            return Err(validation_error("conjugation (unitarity)", unitary, tol));
        }
        let involution = (&mat * mat.conjugate() - ComplexMatrix::identity(n, n)).norm();
        if involution > tol {
            return Err(validation_error("conjugation (involution)", involution, tol));
        }
        Ok(Self { mat })
    }

    /// Coordinatewise conjugation, fixing the standard basis.
    pub fn standard(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn is_standard(&self) -> bool {
        self.mat == ComplexMatrix::identity(self.dim(), self.dim())
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        &self.mat * x.conjugate()
    }

    pub fn as_antilinear(&self) -> AntilinearOperator {
        AntilinearOperator {
            mat: self.mat.clone(),
        }
    }

    /// Matrix of `tau T* tau`, which is the transpose of `T` taken in any
    /// orthonormal basis fixed by `tau`.
    pub fn transpose_of(&self, t: &ComplexMatrix) -> ComplexMatrix {
        &self.mat * t.transpose() * self.mat.conjugate()
    }

    /// `||tau T* tau + T||_F`.
    pub fn skew_symmetry_residual(&self, t: &ComplexMatrix) -> f64 {
        (self.transpose_of(t) + t).norm()
    }

    /// A `tau`-fixed orthonormal basis of the whole space, as columns.
    pub fn fixed_basis(&self) -> ComplexMatrix {
        let n = self.dim();
        self.fixed_basis_of(&ComplexMatrix::identity(n, n))
    }

    /// A `tau`-fixed orthonormal basis of the span of `subspace`, whose
    /// columns must be orthonormal and span a `tau`-invariant subspace.
    pub fn fixed_basis_of(&self, subspace: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let k = subspace.ncols();
        let i = C64::new(0.0, 1.0);
        let symmetrize = |x: &ComplexVector| (x + self.apply(x)).scale(0.5);
        // tau-fixed candidates spanning the real form of the subspace
        let mut residuals: Vec<ComplexVector> = subspace
            .column_iter()
            .flat_map(|s| {
                let s = s.into_owned();
                let is = &s * i;
                [symmetrize(&s), symmetrize(&is)]
            })
            .collect();
        let mut basis: Vec<ComplexVector> = Vec::with_capacity(k);
        for _ in 0..k {
            let (best, norm) = residuals
                .iter()
                .enumerate()
                .map(|(j, r)| (j, r.norm()))
                .fold((0, -1.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
            if norm <= 0.0 {
                break;
            }
            let mut v = residuals[best].clone();
            for b in &basis {
                let c = inner(&v, b).re;
                v.axpy(C64::new(-c, 0.0), b, C64::new(1.0, 0.0));
            }
            let v = symmetrize(&v);
            let v = v.unscale(v.norm());
            for r in residuals.iter_mut() {
                let c = inner(r, &v).re;
                r.axpy(C64::new(-c, 0.0), &v, C64::new(1.0, 0.0));
            }
            basis.push(v);
        }
        columns_to_matrix(n, &basis)
    }
}

/// An antilinear isometry `kappa(x) = K conj(x)` with `kappa^2 = -I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Anticonjugation {
    mat: ComplexMatrix,
}

impl Anticonjugation {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("anticonjugation matrix must be square".into()));
        }
        let n = mat.nrows();
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let anti = Self { mat };
        let (unitary, square, skew) = anti.invariant_residuals();
        if unitary > tol {
            return Err(validation_error("anticonjugation (unitarity)", unitary, tol));
        }
        if square > tol {
            return Err(validation_error("anticonjugation (kappa^2 = -I)", square, tol));
        }
        if skew > tol {
            return Err(validation_error("anticonjugation (skew-symmetry)", skew, tol));
        }
        Ok(anti)
    }

    /// `x -> (-conj(y), conj(x))` on each consecutive coordinate pair.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for j in (0..dim).step_by(2) {
            mat[(j, j + 1)] = C64::new(-1.0, 0.0);
            mat[(j + 1, j)] = C64::new(1.0, 0.0);
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        &self.mat * x.conjugate()
    }

    pub fn as_antilinear(&self) -> AntilinearOperator {
        AntilinearOperator {
            mat: self.mat.clone(),
        }
    }

    /// `(||K* K - I||_F, ||K conj(K) + I||_F, ||K + K^T||_F)`.
    pub fn invariant_residuals(&self) -> (f64, f64, f64) {
        let n = self.dim();
        let id = ComplexMatrix::identity(n, n);
        (
            unitarity_residual(&self.mat),
            (&self.mat * self.mat.conjugate() + id).norm(),
            (&self.mat + self.mat.transpose()).norm(),
        )
    }
}

/// The anticonjugation with `kappa(e_j) = f_j` and `kappa(f_j) = -e_j`, i.e.
/// `K = sum_j (f_j e_j^T - e_j f_j^T)`.
pub fn make_anticonjugation(
    pairs: &[(ComplexVector, ComplexVector)],
    tol: f64,
) -> Result<Anticonjugation> {
    let dim = match pairs.first() {
        Some((e, _)) => e.len(),
        None => return Err(Error::DimensionMismatch("no vector pairs supplied".into())),
    };
    if pairs.iter().any(|(e, f)| e.len() != dim || f.len() != dim) {
        return Err(Error::DimensionMismatch("vector pairs have mixed dimensions".into()));
    }
    if dim % 2 == 1 {
        return Err(Error::OddDimension(dim));
    }
    if 2 * pairs.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{} pairs cannot span a space of dimension {dim}",
            pairs.len()
        )));
    }
    let es: Vec<ComplexVector> = pairs.iter().map(|(e, _)| e.clone()).collect();
    let fs: Vec<ComplexVector> = pairs.iter().map(|(_, f)| f.clone()).collect();
    let e = columns_to_matrix(dim, &es);
    let f = columns_to_matrix(dim, &fs);
    let mut all = ComplexMatrix::zeros(dim, dim);
    all.columns_mut(0, pairs.len()).copy_from(&e);
    all.columns_mut(pairs.len(), pairs.len()).copy_from(&f);
    let residual = unitarity_residual(&all);
    if residual > tol {
        return Err(Error::NotOrthonormal { residual });
    }
    let half = &f * e.transpose();
    Ok(Anticonjugation {
        mat: &half - half.transpose(),
    })
}

/// `T o tau`, antilinear skew-self-adjoint exactly when `T` is `tau`-skew-symmetric.
pub fn antilinear_from_linear(t: &ComplexMatrix, tau: &Conjugation) -> Result<AntilinearOperator> {
    if !t.is_square() || t.nrows() != tau.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} does not match conjugation of dimension {}",
            t.nrows(),
            t.ncols(),
            tau.dim()
        )));
    }
    AntilinearOperator::new(t * tau.matrix())
}

/// `A o tau`, the inverse of [`antilinear_from_linear`].
pub fn linear_from_antilinear(a: &AntilinearOperator, tau: &Conjugation) -> ComplexMatrix {
    a.matrix() * tau.matrix().conjugate()
}

/// `||T^tr - tau T* tau||_F`, with `tau T* tau` evaluated column by column
/// from its action on the standard basis.
pub fn transpose_check(t: &ComplexMatrix, tau: &Conjugation) -> f64 {
    let n = t.nrows();
    let adj = t.adjoint();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let x = tau.apply(&unit_vector(n, j));
        cols.push(tau.apply(&(&adj * x)));
    }
    (columns_to_matrix(n, &cols) - t.transpose()).norm()
}
