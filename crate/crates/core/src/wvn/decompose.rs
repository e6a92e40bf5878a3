//! The iterative decomposition `A = K + D`.
//!
//! Step `j` works on the orthogonal complement of everything captured so
//! far: the current operator is compressed there, one rank-projection step is
//! taken with the cell count doubled until `||K_j||_p < epsilon / 2^j`, and the
//! captured range is lifted back. Inside each captured block the final `D` is
//! then brought to exact 2x2 form by the canonical module.

use crate::antilinear::AntilinearOperator;
use crate::canonical::{
    antilinear_block_skew_diagonalize, block_matrix, polar_from_decomposition, BlockForm,
    CanonicalOptions,
};
use crate::error::{Error, Result};
use crate::matcore::{antisymmetrize, columns_to_matrix, complete_basis, ComplexMatrix, ComplexVector};
use crate::schatten::{schatten_norm, SchattenP};

use super::spectral::SpectralResolution;
use super::step::rank_projection_step;

/// Seeds whose component outside the captured space is this small are skipped.
pub const SEED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WvnOptions {
    pub epsilon: f64,
    pub p: SchattenP,
    pub canonical: CanonicalOptions,
    pub initial_cells: usize,
    pub max_cells: usize,
}

impl WvnOptions {
    pub fn new(epsilon: f64, p: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            p: SchattenP::finite(p)?,
            canonical: CanonicalOptions::default(),
            initial_cells: 4,
            max_cells: 1 << 20,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.canonical.tol = tol;
        self
    }

    pub fn with_rank_tol(mut self, rank_tol: f64) -> Self {
        self.canonical.rank_tol = rank_tol;
        self
    }
}

/// What one step of the loop did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    /// Zero-based index of the standard basis vector used as seed.
    pub seed: usize,
    pub cells: usize,
    pub rank: usize,
    pub dropped: usize,
    pub norm: f64,
    pub budget: f64,
}

#[derive(Debug, Clone)]
pub struct WvnResult {
    pub k: AntilinearOperator,
    pub d: AntilinearOperator,
    /// Orthonormal pairs with `D e_j = d_j f_j` and `D f_j = -d_j e_j`.
    pub basis: Vec<(ComplexVector, ComplexVector)>,
    /// The `d_j`, descending; zeros for pairs spanning the kernel of `D`.
    pub values: Vec<f64>,
    pub p: f64,
    pub epsilon: f64,
    /// `||K||_p`.
    pub achieved_norm: f64,
    pub steps: Vec<StepSummary>,
}

impl WvnResult {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// The pairs as columns `(e_1, f_1, e_2, f_2, ...)`.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let cols: Vec<ComplexVector> = self
            .basis
            .iter()
            .flat_map(|(e, f)| [e.clone(), f.clone()])
            .collect();
        columns_to_matrix(self.dim(), &cols)
    }

    /// `||mat_A - mat_K - mat_D||_F`.
    pub fn reconstruction_residual(&self, a: &AntilinearOperator) -> f64 {
        (a.matrix() - self.k.matrix() - self.d.matrix()).norm()
    }

    /// Distance of `D`, written in `basis`, from `(+) d_j [[0, -1], [1, 0]]`.
    pub fn block_residual(&self) -> f64 {
        let w = self.basis_matrix();
        let local = w.adjoint() * self.d.matrix() * w.conjugate();
        (local - block_matrix(self.dim(), &self.values, BlockForm::Antilinear)).norm()
    }
}

fn compress(m: &ComplexMatrix, q: &ComplexMatrix) -> AntilinearOperator {
    AntilinearOperator::new(antisymmetrize(&(q.adjoint() * m * q.conjugate())))
        .expect("compression of a square matrix is square")
}

/// `A = K + D` with `D` block skew-diagonal and `||K||_p < epsilon`.
pub fn wvn_decompose(a: &AntilinearOperator, opts: &WvnOptions) -> Result<WvnResult> {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(opts.epsilon));
    }
    if opts.p.is_infinite() {
        return Err(Error::InvalidP(opts.p.value()));
    }
    let canon = &opts.canonical;
    a.require_skew(canon.tol)?;
    let n = a.dim();
    let a_s = antisymmetrize(a.matrix());

    let mut current = a_s.clone();
    let mut k_sum = ComplexMatrix::zeros(n, n);
    let mut captured: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut blocks: Vec<ComplexMatrix> = Vec::new();
    let mut steps = Vec::new();

    while captured.len() < n {
        let j = steps.len() + 1;
        let complement = complete_basis(&columns_to_matrix(n, &captured));
        let (seed, f) = (0..n)
            .map(|i| (i, complement.row(i).adjoint()))
            .find(|(_, f)| f.norm() > SEED_TOL)
            .expect("a nonzero complement has a standard basis vector outside the captured space");

        let local = compress(&current, &complement);
        let dec = antilinear_block_skew_diagonalize(&local, canon)?;
        let res = SpectralResolution::from_decomposition(&dec, canon.cluster_tol);
        let polar = polar_from_decomposition(dec, canon.tol)?;

        let budget = opts.epsilon / 2f64.powi(j as i32);
        let mut cells = opts.initial_cells.max(1);
        let mut best = f64::INFINITY;
        let step = loop {
            let step = rank_projection_step(&local, &polar.kappa, &res, &f, cells)?;
            let norm = schatten_norm(&step.k, opts.p);
            if norm < budget {
                break (step, norm);
            }
            best = best.min(norm);
            if cells >= opts.max_cells {
                return Err(Error::BudgetFailure {
                    step: j,
                    max_cells: opts.max_cells,
                    budget,
                    best,
                });
            }
            cells = (cells * 2).min(opts.max_cells);
        };
        let (step, norm) = step;

        let q = &complement * step.range_basis();
        let k_lift = &complement * step.k.matrix() * complement.transpose();
        current += &k_lift;
        k_sum += &k_lift;
        captured.extend(q.column_iter().map(|c| c.into_owned()));
        steps.push(StepSummary {
            seed,
            cells: step.cells,
            rank: step.rank(),
            dropped: step.dropped,
            norm,
            budget,
        });
        blocks.push(q);
    }

    let d = &a_s + &k_sum;
    let mut triples: Vec<(ComplexVector, ComplexVector, f64)> = Vec::with_capacity(n / 2);
    for q in &blocks {
        let dec = antilinear_block_skew_diagonalize(&compress(&d, q), canon)?;
        let v = q * &dec.u;
        for j in 0..q.ncols() / 2 {
            let value = dec.r.get(j).copied().unwrap_or(0.0);
            triples.push((
                v.column(2 * j).into_owned(),
                v.column(2 * j + 1).into_owned(),
                value,
            ));
        }
    }
    triples.sort_by(|x, y| y.2.total_cmp(&x.2));

    let k = AntilinearOperator::new(-k_sum)?;
    let achieved_norm = schatten_norm(&k, opts.p);
    if !(achieved_norm < opts.epsilon) {
        return Err(Error::ConvergenceFailure(format!(
            "accumulated perturbation norm {achieved_norm:e} is not below {:e}",
            opts.epsilon
        )));
    }
    Ok(WvnResult {
        k,
        d: AntilinearOperator::new(d)?,
        values: triples.iter().map(|t| t.2).collect(),
        basis: triples.into_iter().map(|(e, f, _)| (e, f)).collect(),
        p: opts.p.value(),
        epsilon: opts.epsilon,
        achieved_norm,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c64, singular_values};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_skew(n: usize, seed: u64) -> AntilinearOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        AntilinearOperator::new(&w - w.transpose()).unwrap()
    }

    #[test]
    fn single_block() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c64(1.0, 0.0);
        m[(1, 0)] = c64(-1.0, 0.0);
        let a = AntilinearOperator::new(m).unwrap();
        let r = wvn_decompose(&a, &WvnOptions::new(0.1, 2.0).unwrap()).unwrap();
        assert_eq!(r.values.len(), 1);
        assert!((r.values[0] - 1.0).abs() < 1e-12);
        assert!(r.achieved_norm < 0.1);
        assert!(r.reconstruction_residual(&a) <= 1e-10);
        assert!(r.block_residual() < 1e-12);
    }

    #[test]
    fn zero_operator() {
        let a = AntilinearOperator::zeros(4);
        let r = wvn_decompose(&a, &WvnOptions::new(0.1, 2.0).unwrap()).unwrap();
        assert_eq!(r.k.matrix().norm(), 0.0);
        assert_eq!(r.d.matrix().norm(), 0.0);
        assert_eq!(r.values, vec![0.0, 0.0]);
    }

    #[test]
    fn random_sixteen() {
        let a = random_skew(16, 7);
        let r = wvn_decompose(&a, &WvnOptions::new(1e-3, 2.0).unwrap()).unwrap();
        assert!(r.achieved_norm < 1e-3);
        assert!(r.reconstruction_residual(&a) <= 1e-12 * (1.0 + a.matrix().norm()));
        assert!(r.block_residual() <= 1e-9);
        let s = singular_values(a.matrix());
        let k_op = singular_values(r.k.matrix())[0];
        for (j, d) in r.values.iter().enumerate() {
            assert!((d - s[2 * j]).abs() <= k_op + 1e-9);
        }
        let spent: f64 = r.steps.iter().map(|s| s.norm).sum();
        assert!(spent < 1e-3);
    }

    #[test]
    fn odd_dimension_rejected() {
        let a = random_skew(5, 3);
        assert!(matches!(
            wvn_decompose(&a, &WvnOptions::new(0.1, 2.0).unwrap()),
            Err(Error::OddKernel { kernel_dim: 1 })
        ));
    }

    #[test]
    fn options_validate() {
        assert!(matches!(WvnOptions::new(0.0, 2.0), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(WvnOptions::new(0.1, 1.0), Err(Error::InvalidP(_))));
        assert!(matches!(WvnOptions::new(0.1, f64::INFINITY), Err(Error::InvalidP(_))));
    }
}
