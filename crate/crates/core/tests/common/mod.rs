//! Shared fixtures and an independent oracle for the integration tests.
//!
//! The oracle is a cyclic complex Jacobi eigensolver written against plain
//! `Vec`s; it shares no code with the library's factorizations, so values it
//! produces can serve as expected results.

#![allow(dead_code)]

use antilinear_wvn::generate::{gaussian, random_unitary};
use antilinear_wvn::matcore::{c64, ComplexMatrix, ComplexVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| h[(i, j)]).collect()).collect();
    // symmetrize away rounding
    for i in 0..n {
        a[i][i] = c64(a[i][i].re, 0.0);
        for j in i + 1..n {
            let v = (a[i][j] + a[j][i].conj()) * 0.5;
            a[i][j] = v;
            a[j][i] = v.conj();
        }
    }
    let scale: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let c = a[p][q];
                let mag = c.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = c / mag;
                let (app, aqq) = (a[p][p].re, a[q][q].re);
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag(1, conj(phase)) * [[cs, sn], [-sn, cs]] on (p, q)
                let jpp = c64(cs, 0.0);
                let jpq = c64(sn, 0.0);
                let jqp = phase.conj() * (-sn);
                let jqq = phase.conj() * cs;
                // A <- A J
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * jpp + y * jqp;
                    row[q] = x * jpq + y * jqq;
                }
                // A <- J* A
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = jpp.conj() * x + jqp.conj() * y;
                    a[q][k] = jpq.conj() * x + jqq.conj() * y;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values, descending, as the nonnegative half of the spectrum of
/// the Hermitian dilation `[[0, M], [M*, 0]]`; this keeps absolute accuracy
/// for small singular values, unlike the eigenvalues of `M* M`.
pub fn oracle_singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut h = ComplexMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    let mut s = jacobi_eigenvalues(&h);
    s.reverse();
    s.truncate(r.min(c));
    s.into_iter().map(|x| x.max(0.0)).collect()
}

/// `(sum s^p)^(1/p)` straight from the definition.
pub fn oracle_schatten(m: &ComplexMatrix, p: f64) -> f64 {
    oracle_singular_values(m)
        .iter()
        .map(|s| s.powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn random_skew(seed: u64, n: usize) -> ComplexMatrix {
    let w = gaussian(&mut rng(seed), n, n);
    &w - w.transpose()
}

pub fn random_vector(seed: u64, n: usize) -> ComplexVector {
    gaussian(&mut rng(seed), n, 1).column(0).into_owned()
}

pub fn unitary(seed: u64, n: usize) -> ComplexMatrix {
    random_unitary(&mut rng(seed), n)
}

/// `U ((+) r_j [[0, -1], [1, 0]]) U^T`.
pub fn skew_from_values(seed: u64, values: &[f64], n: usize) -> ComplexMatrix {
    let u = unitary(seed, n);
    let mut b = ComplexMatrix::zeros(n, n);
    for (j, &v) in values.iter().enumerate() {
        b[(2 * j, 2 * j + 1)] = c64(-v, 0.0);
        b[(2 * j + 1, 2 * j)] = c64(v, 0.0);
    }
    let m = &u * b * u.transpose();
    (&m - m.transpose()).unscale(2.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn op_norm(m: &ComplexMatrix) -> f64 {
    oracle_singular_values(m).first().copied().unwrap_or(0.0)
}
