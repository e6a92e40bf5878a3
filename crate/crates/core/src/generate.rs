//! Seeded test instances.
//!
//! All kinds are built from complex Gaussian matrices (real and imaginary
//! parts independent standard normals) drawn from a ChaCha8 stream, so a seed
//! fixes the output on every platform.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::canonical::{block_matrix, BlockForm};
use crate::error::{Error, Result};
use crate::matcore::{antisymmetrize, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// `W - W^T`.
    SkewSymmetric,
    /// `U ((+) r_j K2 (+) 0) U^T` with a seeded unitary `U` and `r_j` in `[0.5, 2)`.
    SkewSymmetricRank,
    /// `O (S (+) 0) O^T` with `S = W - W^T` and a seeded real orthogonal `O`;
    /// skew-symmetric for the standard conjugation, with a real kernel.
    TauSkewSymmetricWithKernel,
}

impl GenKind {
    pub const ALL: [GenKind; 3] = [
        GenKind::SkewSymmetric,
        GenKind::SkewSymmetricRank,
        GenKind::TauSkewSymmetricWithKernel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::SkewSymmetric => "skew-symmetric",
            GenKind::SkewSymmetricRank => "skew-symmetric-rank",
            GenKind::TauSkewSymmetricWithKernel => "tau-skew-symmetric-with-kernel",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind {s:?}"))
    }
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let col = q.column(j) * phase;
            q.set_column(j, &col);
        }
    }
    q
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] }, 0.0)
    })
}

pub fn random_skew(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let w = gaussian(rng, n, n);
    &w - w.transpose()
}

fn check_rank(dim: usize, rank: usize) -> Result<()> {
    if rank > dim {
        return Err(Error::InvalidRank {
            rank,
            dim,
            reason: "rank exceeds the dimension",
        });
    }
    if rank % 2 == 1 {
        return Err(Error::InvalidRank {
            rank,
            dim,
            reason: "a skew-symmetric matrix has even rank",
        });
    }
    Ok(())
}

/// A deterministic instance of `kind`.
///
/// `rank` is ignored for [`GenKind::SkewSymmetric`]; the other kinds default
/// to the largest even rank below `dim`.
pub fn generate(kind: GenKind, dim: usize, rank: Option<usize>, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::DimensionMismatch("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let default_rank = (dim - 1) & !1;
    match kind {
        GenKind::SkewSymmetric => Ok(random_skew(&mut rng, dim)),
        GenKind::SkewSymmetricRank => {
            let rank = rank.unwrap_or(default_rank);
            check_rank(dim, rank)?;
            let u = random_unitary(&mut rng, dim);
            let r: Vec<f64> = (0..rank / 2).map(|_| rng.random_range(0.5..2.0)).collect();
            let b = block_matrix(dim, &r, BlockForm::Antilinear);
            Ok(antisymmetrize(&(&u * b * u.transpose())))
        }
        GenKind::TauSkewSymmetricWithKernel => {
            let rank = rank.unwrap_or(default_rank);
            check_rank(dim, rank)?;
            let o = random_orthogonal(&mut rng, dim);
            let mut padded = ComplexMatrix::zeros(dim, dim);
            padded
                .view_mut((0, 0), (rank, rank))
                .copy_from(&random_skew(&mut rng, rank));
            Ok(antisymmetrize(&(&o * padded * o.transpose())))
        }
    }
}
