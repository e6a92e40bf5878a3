//! Spectral projections of `|A|` and the antilinear measure `G = kappa E`.

use std::ops::Range;

use crate::antilinear::{Anticonjugation, AntilinearOperator};
use crate::canonical::{antilinear_block_skew_diagonalize, CanonicalOptions, YoulaResult};
use crate::error::Result;
use crate::matcore::{ComplexMatrix, ComplexVector};

/// A real interval with a closed lower end; the upper end is open unless
/// `closed_hi` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed_hi: bool,
}

impl Interval {
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            closed_hi: false,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            closed_hi: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && (x < self.hi || (self.closed_hi && x <= self.hi))
    }
}

/// `n` equal cells of `[a, b]`, all half-open except the last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Partition {
    pub fn new(a: f64, b: f64, n: usize) -> Self {
        assert!(n > 0, "a partition needs at least one cell");
        Self { a, b, n }
    }

    pub fn width(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// The `k`-th cell, zero-based.
    pub fn cell(&self, k: usize) -> Interval {
        let h = self.width();
        let lo = self.a + k as f64 * h;
        if k + 1 == self.n {
            Interval::closed(lo, self.b)
        } else {
            Interval::half_open(lo, self.a + (k + 1) as f64 * h)
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.n).map(|k| self.cell(k))
    }

    /// Index of the cell containing `x`, consistent with [`Interval::contains`].
    pub fn cell_index(&self, x: f64) -> Option<usize> {
        if !(self.a <= x && x <= self.b) {
            return None;
        }
        let h = self.width();
        let guess = if h > 0.0 {
            (((x - self.a) / h).floor() as usize).min(self.n - 1)
        } else {
            self.n - 1
        };
        // floor may be off by one at a boundary
        [guess, guess.saturating_sub(1), (guess + 1).min(self.n - 1)]
            .into_iter()
            .find(|&k| self.cell(k).contains(x))
    }
}

/// Eigenprojections of `|A|`.
///
/// The projections are assembled from the same block basis the polar
/// anticonjugation is built from, so every `E(omega)` commutes with `kappa`
/// to rounding.
#[derive(Debug, Clone)]
pub struct SpectralResolution {
    pub a: f64,
    pub b: f64,
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<ComplexMatrix>,
    basis: ComplexMatrix,
    columns: Vec<Range<usize>>,
}

impl SpectralResolution {
    pub(crate) fn from_decomposition(dec: &YoulaResult, cluster_tol: f64) -> Self {
        let n = dec.dim();
        // eigenvalue of |A| attached to each column of the block basis
        let mut values = Vec::with_capacity(n);
        for &r in &dec.r {
            values.push(r);
            values.push(r);
        }
        values.resize(n, 0.0);
        let b = values.first().copied().unwrap_or(0.0);

        // columns are ordered by descending eigenvalue, so clusters are ranges
        let mut ranges: Vec<Range<usize>> = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || values[i - 1] - values[i] > cluster_tol * b {
                ranges.push(start..i);
                start = i;
            }
        }
        ranges.reverse();

        let eigenvalues = ranges
            .iter()
            .map(|r| values[r.clone()].iter().sum::<f64>() / r.len() as f64)
            .collect();
        let projections = ranges
            .iter()
            .map(|r| {
                let q = dec.u.columns(r.start, r.len());
                &q * q.adjoint()
            })
            .collect();
        Self {
            a: 0.0,
            b,
            eigenvalues,
            projections,
            basis: dec.u.clone(),
            columns: ranges,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Indices of the eigenvalues lying in `omega`.
    pub fn select(&self, omega: &Interval) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|&k| omega.contains(self.eigenvalues[k]))
            .collect()
    }

    /// `E(omega) x`, evaluated through the eigenbasis.
    pub fn project(&self, omega: &Interval, x: &ComplexVector) -> ComplexVector {
        self.project_eigenspaces(&self.select(omega), x)
    }

    /// The component of `x` in the listed eigenspaces.
    pub fn project_eigenspaces(&self, indices: &[usize], x: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.dim());
        for &k in indices {
            let q = self.basis.columns(self.columns[k].start, self.columns[k].len());
            out += &q * (q.adjoint() * x);
        }
        out
    }
}

/// Eigenprojections of `|A|`, clustered with relative gap `opts.cluster_tol`.
pub fn spectral_resolution(
    a: &AntilinearOperator,
    opts: &CanonicalOptions,
) -> Result<SpectralResolution> {
    let dec = antilinear_block_skew_diagonalize(a, opts)?;
    Ok(SpectralResolution::from_decomposition(&dec, opts.cluster_tol))
}

/// `E(omega)`: the sum of the eigenprojections with eigenvalue in `omega`.
pub fn spectral_projection(res: &SpectralResolution, omega: &Interval) -> ComplexMatrix {
    let n = res.dim();
    res.select(omega)
        .into_iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, k| acc + &res.projections[k])
}

/// `G(omega) = kappa E(omega)`.
pub fn spectral_measure_g(
    res: &SpectralResolution,
    kappa: &Anticonjugation,
    omega: &Interval,
) -> AntilinearOperator {
    kappa
        .as_antilinear()
        .after_linear(&spectral_projection(res, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::polar_factorize;
    use crate::matcore::{c64, hermitian_residual};

    fn k2_sum(values: &[f64]) -> AntilinearOperator {
        let n = 2 * values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, &v) in values.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = c64(-v, 0.0);
            m[(2 * j + 1, 2 * j)] = c64(v, 0.0);
        }
        AntilinearOperator::new(m).unwrap()
    }

    #[test]
    fn single_eigenvalue() {
        let a = AntilinearOperator::new(-k2_sum(&[2.0]).into_matrix()).unwrap();
        let res = spectral_resolution(&a, &CanonicalOptions::default()).unwrap();
        assert_eq!(res.eigenvalues.len(), 1);
        assert!((res.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((&res.projections[0] - ComplexMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn zero_operator() {
        let res = spectral_resolution(&AntilinearOperator::zeros(3), &CanonicalOptions::default())
            .unwrap();
        assert_eq!(res.eigenvalues, vec![0.0]);
        assert!((&res.projections[0] - ComplexMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn two_blocks() {
        let res =
            spectral_resolution(&k2_sum(&[2.0, 1.0]), &CanonicalOptions::default()).unwrap();
        assert_eq!(res.eigenvalues.len(), 2);
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((res.eigenvalues[1] - 2.0).abs() < 1e-14);
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(2, 2)] = c64(1.0, 0.0);
        want[(3, 3)] = c64(1.0, 0.0);
        assert!((&res.projections[0] - &want).norm() < 1e-14);
        let e = spectral_projection(&res, &Interval::half_open(0.5, 1.5));
        assert!((e - want).norm() < 1e-14);
        let full = spectral_projection(&res, &Interval::closed(res.a, res.b));
        assert!((full - ComplexMatrix::identity(4, 4)).norm() < 1e-14);
        assert_eq!(spectral_projection(&res, &Interval::half_open(1.2, 1.8)).norm(), 0.0);
        for p in &res.projections {
            assert!(hermitian_residual(p) < 1e-15);
            assert!((p * p - p).norm() < 1e-14);
        }
    }

    #[test]
    fn g_on_full_interval_is_kappa() {
        let a = k2_sum(&[3.0, 1.0]);
        let opts = CanonicalOptions::default();
        let polar = polar_factorize(&a, &opts).unwrap();
        let res = spectral_resolution(&a, &opts).unwrap();
        let g = spectral_measure_g(&res, &polar.kappa, &Interval::closed(res.a, res.b));
        assert!((g.matrix() - polar.kappa.matrix()).norm() < 1e-14);
        let g = spectral_measure_g(&res, &polar.kappa, &Interval::half_open(1.5, 2.5));
        assert_eq!(g.matrix().norm(), 0.0);
    }

    #[test]
    fn partition_cells_tile() {
        let p = Partition::new(0.0, 3.0, 4);
        let xs = [0.0, 0.75, 0.7499999, 1.5, 2.999, 3.0];
        for x in xs {
            assert_eq!(p.cells().filter(|c| c.contains(x)).count(), 1, "x={x}");
        }
        assert!(!p.cells().any(|c| c.contains(3.0001)));
        for x in xs {
            let k = p.cell_index(x).unwrap();
            assert!(p.cell(k).contains(x));
        }
        assert_eq!(p.cell_index(3.5), None);
        let degenerate = Partition::new(0.0, 0.0, 4);
        assert_eq!(degenerate.cell_index(0.0), Some(3));
        assert_eq!(degenerate.cells().filter(|c| c.contains(0.0)).count(), 1);
    }
}
