//! Dense complex matrix primitives.
//!
//! Matrices are plain `nalgebra` dense matrices over `Complex<f64>`. The
//! Hermitian eigensolver comes from `nalgebra`; the singular value
//! decomposition is a one-sided Jacobi iteration, because the bidiagonal
//! solver shipped with `nalgebra` occasionally returns factors that do not
//! reproduce the input. Everything here adds the ordering, clamping and
//! tolerance contracts the rest of the crate relies on.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance used wherever a tolerance is optional.
pub const DEFAULT_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from row-major entries, rejecting empty shapes and non-finite entries.
pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch(format!(
            "matrix shape {rows}x{cols} is empty"
        )));
    }
    if entries.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DimensionMismatch(format!(
            "entry ({}, {}) is not finite",
            k / cols,
            k % cols
        )));
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, entries))
}

/// Inner product linear in the first argument: `<x, y> = sum x_k conj(y_k)`.
#[inline]
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> C64 {
    y.dotc(x)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).singular_values
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `||U* U - I||_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - ComplexMatrix::identity(n, n)).norm()
}

/// `||M + M^T||_F`.
pub fn skew_residual(m: &ComplexMatrix) -> f64 {
    (m + m.transpose()).norm()
}

/// The exactly skew-symmetric part `(M - M^T) / 2`.
pub fn antisymmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.transpose()).scale(0.5)
}

pub fn hermitian_residual(h: &ComplexMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

pub fn columns_to_matrix(dim: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

pub fn unit_vector(dim: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

fn ensure_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Thin singular value decomposition `M = U diag(s) V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.adjoint()
    }
}

const JACOBI_SWEEPS: usize = 80;

/// Applies `[g_p, g_q] <- [g_p, g_q] [[c, s], [-s w, c w]]` to columns of a
/// column-major buffer with `rows` rows.
fn rotate_columns(data: &mut [C64], rows: usize, p: usize, q: usize, c: f64, s: f64, w: C64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let gp = &mut head[p * rows..(p + 1) * rows];
    let gq = &mut tail[..rows];
    for (x, y) in gp.iter_mut().zip(gq.iter_mut()) {
        let (a, b) = (*x, *y * w);
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs of `M V` are rotated until every pair is orthogonal to working
/// precision relative to the product of their norms, so the computed factors
/// satisfy `M V = U S` with a backward error of a few ulps of `||M||`.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let mut g = m.clone();
    let mut v = ComplexMatrix::identity(cols, cols);
    let threshold = f64::EPSILON * rows.max(1) as f64;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let (gp, gq) = (g.column(p), g.column(q));
                    (gp.norm_squared(), gq.norm_squared(), gp.dotc(&gq))
                };
                let mag = gamma.norm();
                if mag == 0.0 || mag <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // diagonalize [[alpha, |gamma|], [|gamma|, beta]] after the
                // phase of gamma is moved into column q
                let w = gamma.conj() / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(g.as_mut_slice(), rows, p, q, c, s, w);
                rotate_columns(v.as_mut_slice(), cols, p, q, c, s, w);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = g.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = v.select_columns(&order);
    let mut left: Vec<ComplexVector> = Vec::with_capacity(cols);
    for &j in &order {
        if norms[j] > 0.0 {
            left.push(g.column(j).unscale(norms[j]));
        }
    }
    let found = left.len();
    let mut u = ComplexMatrix::zeros(rows, cols);
    for (j, col) in left.iter().enumerate() {
        u.set_column(j, col);
    }
    if found < cols {
        // exact zeros: any orthonormal completion will do
        let mut full = complete_basis(&u.columns(0, found).into_owned());
        full = full.columns(0, cols - found).into_owned();
        u.columns_mut(found, cols - found).copy_from(&full);
    }
    Svd {
        u,
        singular_values,
        v,
    }
}

/// Eigendecomposition `H = V diag(values) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending; ties keep the order produced by the solver.
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            scaled.column_mut(j).scale_mut(self.values[j]);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    ensure_square(h, "Hermitian input")?;
    let residual = hermitian_residual(h);
    let bound = tol * (1.0 + h.norm());
    if residual > bound {
        return Err(Error::NotHermitian { residual, bound });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    // Solve on the exactly Hermitian part.
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: ties broken by solver index.
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok(HermitianEig { values, vectors })
}

/// Positive semidefinite square root. Eigenvalues in `[-tol (1 + ||H||_F), 0)` are clamped to zero.
pub fn psd_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol)?;
    let floor = -tol * (1.0 + h.norm());
    if let Some(&min) = eig.values.first() {
        if min < floor {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    let roots = HermitianEig {
        values: eig.values.iter().map(|&v| v.max(0.0).sqrt()).collect(),
        vectors: eig.vectors,
    };
    let s = roots.reconstruct();
    Ok((&s + s.adjoint()).scale(0.5))
}

/// Gram-Schmidt with reorthogonalization. Vectors whose residual norm after
/// projection is at most `tol` are dropped.
pub fn orthonormalize(vectors: &[ComplexVector], tol: f64) -> Vec<ComplexVector> {
    let mut out: Vec<ComplexVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(&r, q);
                r.axpy(-c, q, C64::new(1.0, 0.0));
            }
        }
        let norm = r.norm();
        if norm > tol {
            out.push(r.unscale(norm));
        }
    }
    out
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column
/// span of `q`, whose columns must already be orthonormal.
///
/// Standard basis vectors are projected onto the complement and picked greedily
/// by largest residual, so every accepted residual has squared norm at least
/// `remaining / dim`.
pub fn complete_basis(q: &ComplexMatrix) -> ComplexMatrix {
    let dim = q.nrows();
    let have = q.ncols();
    let need = dim.saturating_sub(have);
    let mut basis: Vec<ComplexVector> = q.column_iter().map(|c| c.into_owned()).collect();
    let mut residuals: Vec<ComplexVector> = (0..dim)
        .map(|i| {
            let mut r = unit_vector(dim, i);
            for b in &basis {
                let c = inner(&r, b);
                r.axpy(-c, b, C64::new(1.0, 0.0));
            }
            r
        })
        .collect();
    let mut added = Vec::with_capacity(need);
    for _ in 0..need {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        let mut v = residuals[best].clone();
        for b in &basis {
            let c = inner(&v, b);
            v.axpy(-c, b, C64::new(1.0, 0.0));
        }
        let v = v.unscale(v.norm());
        for r in residuals.iter_mut() {
            let c = inner(r, &v);
            r.axpy(-c, &v, C64::new(1.0, 0.0));
        }
        basis.push(v.clone());
        added.push(v);
    }
    columns_to_matrix(dim, &added)
}
