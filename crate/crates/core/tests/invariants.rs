//! Property tests of the structural invariants, checked against the Jacobi
//! oracle in `common` wherever a reference value is needed.

mod common;

use antilinear_wvn::antilinear::{make_anticonjugation, transpose_check};
use antilinear_wvn::cmat::{format_cmat, parse_cmat};
use antilinear_wvn::generate::{generate, GenKind};
use antilinear_wvn::matcore::{c64, svd, unit_vector, ComplexMatrix, ComplexVector};
use antilinear_wvn::schatten::{schatten_norm, schatten_norm_linear};
use antilinear_wvn::wvn::{
    kernel_split_wvn, rank_projection_step, spectral_measure_g, spectral_projection,
    spectral_resolution, Interval, Partition,
};
use antilinear_wvn::{
    polar_factorize, wvn_decompose, youla_decompose, AntilinearOperator, CanonicalOptions,
    Conjugation, Error, SchattenP, WvnOptions,
};
use common::*;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn pairs_of(u: &ComplexMatrix) -> Vec<(ComplexVector, ComplexVector)> {
    (0..u.ncols() / 2)
        .map(|j| (u.column(2 * j).into_owned(), u.column(2 * j + 1).into_owned()))
        .collect()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn youla_matches_oracle(seed in any::<u64>(), n in 1usize..24) {
        let m = random_skew(seed, n);
        let y = youla_decompose(&m, &CanonicalOptions::default()).unwrap();
        let scale = 1.0 + m.norm();
        prop_assert!(y.residual(&m) <= 1e-9 * scale);
        prop_assert!((y.u.adjoint() * &y.u - identity(n)).norm() <= 1e-10 * n as f64);
        prop_assert_eq!(2 * y.r.len() + y.kernel_dim, n);
        prop_assert!(y.r.windows(2).all(|w| w[0] >= w[1]));
        // every r_j is a singular value of multiplicity two
        let s = oracle_singular_values(&m);
        for (j, r) in y.r.iter().enumerate() {
            prop_assert!((s[2 * j] - r).abs() <= 1e-9 * scale);
            prop_assert!((s[2 * j + 1] - r).abs() <= 1e-9 * scale);
        }
        prop_assert_eq!(y.kernel_dim % 2, n % 2);
    }

    #[test]
    fn youla_recovers_prescribed_values(
        seed in any::<u64>(),
        values in prop::collection::vec(prop_oneof![Just(1.0), 0.01f64..10.0], 1..6),
        extra in 0usize..3,
    ) {
        let n = 2 * values.len() + extra;
        let m = skew_from_values(seed, &values, n);
        let y = youla_decompose(&m, &CanonicalOptions::default()).unwrap();
        let mut expected = values.clone();
        expected.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(y.r.len(), expected.len());
        for (r, e) in y.r.iter().zip(&expected) {
            prop_assert!((r - e).abs() <= 1e-10 * (1.0 + e));
        }
        prop_assert_eq!(y.kernel_dim, extra);
        prop_assert!(y.residual(&m) <= 1e-9 * (1.0 + m.norm()));
    }

    #[test]
    fn polar_identities(seed in any::<u64>(), n in 1usize..20) {
        let m = random_skew(seed, n);
        let a = AntilinearOperator::new(m.clone()).unwrap();
        match polar_factorize(&a, &CanonicalOptions::default()) {
            Err(Error::OddKernel { kernel_dim }) => prop_assert!(n % 2 == 1 && kernel_dim % 2 == 1),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(p) => {
                prop_assert_eq!(n % 2, 0);
                let k = p.kappa.matrix();
                let bound = 1e-9 * (1.0 + m.norm());
                prop_assert!((&m - k * p.modulus.conjugate()).norm() <= bound);
                prop_assert!((&p.modulus * k - k * p.modulus.conjugate()).norm() <= bound);
                prop_assert!((k * k.conjugate() + identity(n)).norm() <= 1e-10);
                prop_assert!((k + k.transpose()).norm() <= 1e-10);
                // |A| is the positive square root of A# A, whose matrix is M^T conj(M)
                let gram = m.transpose() * m.conjugate();
                prop_assert!((&p.modulus * &p.modulus - &gram).norm() <= 1e-9 * (1.0 + gram.norm()));
                let ev = jacobi_eigenvalues(&p.modulus);
                prop_assert!(ev[0] >= -1e-9);
            }
        }
    }

    #[test]
    fn anticonjugation_invariants(seed in any::<u64>(), half in 1usize..8) {
        let n = 2 * half;
        let pairs = pairs_of(&unitary(seed, n));
        let kappa = make_anticonjugation(&pairs, 1e-12).unwrap();
        let (u, square, skew) = kappa.invariant_residuals();
        prop_assert!(u <= 1e-12 && square <= 1e-12 && skew <= 1e-12);
        for (e, f) in &pairs {
            prop_assert!((kappa.apply(e) - f).norm() <= 1e-12);
            prop_assert!((kappa.apply(f) + e).norm() <= 1e-12);
        }
        let mut h = random_vector(seed ^ 0x5eed, n);
        h.unscale_mut(h.norm());
        prop_assert!(h.dotc(&kappa.apply(&h)).norm() <= 1e-12);
        // isometry
        prop_assert!((kappa.apply(&h).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sharp_is_the_antilinear_adjoint(seed in any::<u64>(), n in 1usize..12) {
        let g = antilinear_wvn::generate::gaussian(&mut rng(seed), n, n + 2);
        let a = AntilinearOperator::new(g.columns(0, n).into_owned()).unwrap();
        let x: ComplexVector = g.column(n).into_owned();
        let y: ComplexVector = g.column(n + 1).into_owned();
        // <Ax, y> = conj <x, A# y>, with <u, v> = v* u
        let lhs = y.dotc(&a.apply(&x));
        let rhs = a.sharp().apply(&y).dotc(&x).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + a.matrix().norm() * x.norm() * y.norm()));
        let twice = a.sharp().sharp();
        prop_assert_eq!(twice.matrix(), a.matrix());
    }

    #[test]
    fn transpose_agrees_with_conjugated_adjoint(seed in any::<u64>(), n in 1usize..10) {
        let t = antilinear_wvn::generate::gaussian(&mut rng(seed), n, n);
        let standard = Conjugation::standard(n);
        prop_assert!(transpose_check(&t, &standard) <= 1e-14 * (1.0 + t.norm()));
        let v = unitary(seed ^ 1, n);
        let tau = Conjugation::new(&v * v.transpose(), 1e-12).unwrap();
        // tau T* tau column by column
        let cols: Vec<ComplexVector> = (0..n)
            .map(|j| tau.apply(&(t.adjoint() * tau.apply(&unit_vector(n, j)))))
            .collect();
        let mut direct = ComplexMatrix::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            direct.set_column(j, c);
        }
        prop_assert!((tau.transpose_of(&t) - direct).norm() <= 1e-12 * (1.0 + t.norm()));
        // the twisted transpose is the plain transpose in a fixed frame
        let frame = tau.fixed_basis();
        let in_frame = frame.adjoint() * &t * &frame;
        let back = frame.adjoint() * tau.transpose_of(&t) * &frame;
        prop_assert!((back - in_frame.transpose()).norm() <= 1e-12 * (1.0 + t.norm()));
    }

    #[test]
    fn g_measure_properties(seed in any::<u64>(), half in 1usize..7, cells in 1usize..7) {
        let n = 2 * half;
        let a = AntilinearOperator::new(random_skew(seed, n)).unwrap();
        let opts = CanonicalOptions::default();
        let polar = polar_factorize(&a, &opts).unwrap();
        let res = spectral_resolution(&a, &opts).unwrap();
        let part = Partition::new(res.a, res.b, cells);
        let mut sum = ComplexMatrix::zeros(n, n);
        for cell in part.cells() {
            let e = spectral_projection(&res, &cell);
            let g = spectral_measure_g(&res, &polar.kappa, &cell);
            prop_assert!((g.compose(&g) + &e).norm() <= 1e-10);
            prop_assert!((g.matrix().transpose() + g.matrix()).norm() <= 1e-10);
            // G(omega) commutes with E(omega): kappa E = E kappa
            prop_assert!((g.matrix() * e.conjugate() - &e * g.matrix()).norm() <= 1e-10);
            sum += &e;
        }
        prop_assert!((sum - identity(n)).norm() <= 1e-10);
        let g_full = spectral_measure_g(&res, &polar.kappa, &Interval::closed(res.a, res.b));
        prop_assert!((g_full.matrix() - polar.kappa.matrix()).norm() <= 1e-10);
        let empty = Interval::half_open(res.b + 1.0, res.b + 2.0);
        prop_assert_eq!(spectral_measure_g(&res, &polar.kappa, &empty).matrix().norm(), 0.0);
    }

    #[test]
    fn partition_cells_are_consistent(a in -5.0f64..5.0, width in 0.0f64..10.0, n in 1usize..40, t in 0.0f64..=1.0) {
        let part = Partition::new(a, a + width, n);
        let x = a + t * width;
        let idx = part.cell_index(x);
        prop_assert!(idx.is_some());
        let hits: Vec<usize> = (0..n).filter(|&k| part.cell(k).contains(x)).collect();
        if width > 0.0 {
            prop_assert_eq!(hits, vec![idx.unwrap()]);
        }
        prop_assert_eq!(part.cell_index(a - 1.0 - width), None);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn step_invariants(seed in any::<u64>(), half in 1usize..10, log_cells in 1u32..5) {
        let n = 2 * half;
        let cells = 1usize << log_cells;
        let m = random_skew(seed, n);
        let a = AntilinearOperator::new(m.clone()).unwrap();
        let opts = CanonicalOptions::default();
        let polar = polar_factorize(&a, &opts).unwrap();
        let res = spectral_resolution(&a, &opts).unwrap();
        let f = random_vector(seed ^ 7, n);
        let step = rank_projection_step(&a, &polar.kappa, &res, &f, cells).unwrap();
        let p = &step.p;
        let q = identity(n) - p;
        prop_assert!((p * p - p).norm() <= 1e-10);
        prop_assert!((p.adjoint() - p).norm() <= 1e-12);
        prop_assert!(step.rank() % 2 == 0 && step.rank() <= 2 * cells);
        // the f_k, g_k are orthonormal
        let basis = step.range_basis();
        prop_assert!((basis.adjoint() * &basis - identity(step.rank())).norm() <= 1e-10);
        for (fk, gk) in &step.vectors {
            prop_assert!((polar.kappa.apply(fk) - gk).norm() <= 1e-10);
        }
        let spread = res.b - res.a;
        let off = &q * &m * p.conjugate();
        prop_assert!(op_norm(&off) <= spread / cells as f64 + 1e-9);
        for pe in [1.5, 2.0, 3.0] {
            let qe = pe / (pe - 1.0);
            prop_assert!(oracle_schatten(&off, pe) <= 2.0 * (2.0 / cells as f64).powf(1.0 / qe) * spread + 1e-9);
        }
        prop_assert!((&q * &f).norm() <= 1e-9 * f.norm());
        prop_assert!((&q * polar.kappa.apply(&f)).norm() <= 1e-9 * f.norm());
        let k = step.k.matrix();
        prop_assert!((k + k.transpose()).norm() <= 1e-12 * (1.0 + m.norm()));
        let sum = &m + k;
        prop_assert!((&q * &sum * p.conjugate()).norm() <= 1e-9);
        prop_assert!((p * &sum * q.conjugate()).norm() <= 1e-9);
    }

    #[test]
    fn wvn_postconditions(
        seed in any::<u64>(),
        half in 1usize..8,
        eps in prop_oneof![Just(1e-1), Just(1e-2), Just(1e-4)],
        pe in prop_oneof![Just(1.25), Just(2.0), Just(4.0)],
    ) {
        let n = 2 * half;
        let m = random_skew(seed, n);
        let a = AntilinearOperator::new(m.clone()).unwrap();
        let r = wvn_decompose(&a, &WvnOptions::new(eps, pe).unwrap()).unwrap();
        let (k, d) = (r.k.matrix(), r.d.matrix());
        prop_assert!((&m - k - d).norm() <= 1e-10 * (1.0 + m.norm()));
        prop_assert!(oracle_schatten(k, pe) < eps);
        prop_assert!(r.block_residual() <= 1e-9);
        prop_assert_eq!(r.values.len(), half);
        prop_assert!(r.values.windows(2).all(|w| w[0] >= w[1]));
        let k_op = op_norm(k);
        for (x, y) in oracle_singular_values(&m).iter().zip(oracle_singular_values(d)) {
            prop_assert!((x - y).abs() <= k_op + 1e-9);
        }
        // the budget halves from step to step
        for (j, s) in r.steps.iter().enumerate() {
            prop_assert!(s.norm < eps / 2f64.powi(j as i32 + 1));
        }
    }

    #[test]
    fn kernel_split_corollary(seed in any::<u64>(), dim in 2usize..14, kernel in 0usize..4) {
        let rank = dim.saturating_sub(kernel) & !1;
        let t = generate(GenKind::TauSkewSymmetricWithKernel, dim, Some(rank), seed).unwrap();
        let tau = Conjugation::standard(dim);
        let r = kernel_split_wvn(&t, &tau, &WvnOptions::new(1e-2, 2.0).unwrap()).unwrap();
        prop_assert!(r.residual(&t, &tau) <= 1e-9 * (1.0 + t.norm()));
        prop_assert!((tau.transpose_of(&r.k) + &r.k).norm() <= 1e-9);
        prop_assert!(oracle_schatten(&r.k, 2.0) < 1e-2);
        prop_assert_eq!(r.kernel_dim, dim - rank);
        prop_assert_eq!(r.values.len(), rank / 2);
        let mut expected = ComplexMatrix::zeros(dim, dim);
        for (j, &v) in r.values.iter().enumerate() {
            expected[(2 * j, 2 * j + 1)] = c64(v, 0.0);
            expected[(2 * j + 1, 2 * j)] = c64(-v, 0.0);
        }
        prop_assert_eq!(&r.d, &expected);
    }
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn cmat_round_trip_is_bit_exact(
        rows in 1usize..5,
        cols in 1usize..5,
        bits in prop::collection::vec(any::<u64>(), 32),
    ) {
        let finite = |b: u64| {
            let x = f64::from_bits(b);
            if x.is_finite() { x } else { f64::from_bits(b >> 12) }
        };
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| {
            let k = 2 * (i * cols + j);
            c64(finite(bits[k]), finite(bits[k + 1]))
        });
        let back = parse_cmat(&format_cmat(&m)).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (x, y) in m.iter().zip(back.iter()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn schatten_norms(seed in any::<u64>(), n in 1usize..10, rank in 1usize..10, p in 1.01f64..8.0) {
        let rank = rank.min(n);
        let left = antilinear_wvn::generate::gaussian(&mut rng(seed), n, rank);
        let right = antilinear_wvn::generate::gaussian(&mut rng(seed ^ 3), rank, n);
        let a = AntilinearOperator::new(left * right).unwrap();
        let sp = SchattenP::finite(p).unwrap();
        let norm = schatten_norm(&a, sp);
        let oracle = oracle_schatten(a.matrix(), p);
        prop_assert!((norm - oracle).abs() <= 1e-9 * (1.0 + oracle));
        let op = schatten_norm(&a, SchattenP::OPERATOR);
        prop_assert!(op <= norm * (1.0 + 1e-12));
        prop_assert!(norm <= (rank as f64).powf(1.0 / p) * op + 1e-9);
        // nonincreasing in p
        let larger = schatten_norm(&a, SchattenP::finite(p + 1.0).unwrap());
        prop_assert!(larger <= norm * (1.0 + 1e-12));
        prop_assert_eq!(norm, schatten_norm_linear(a.matrix(), sp));
    }

    #[test]
    fn svd_matches_oracle(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let m = antilinear_wvn::generate::gaussian(&mut rng(seed), rows, cols);
        let d = svd(&m);
        prop_assert!((d.reconstruct() - &m).norm() <= 1e-13 * (1.0 + m.norm()));
        for (s, o) in d.singular_values.iter().zip(oracle_singular_values(&m)) {
            prop_assert!((s - o).abs() <= 1e-12 * (1.0 + o));
        }
    }
}

#[test]
fn near_block_matrix_decomposes() {
    // a nearly block-diagonal skew matrix with rounding-level couplings
    let m = parse_cmat(include_str!("data/near_block.cmat")).unwrap();
    let y = youla_decompose(&m, &CanonicalOptions::default()).unwrap();
    assert!(y.residual(&m) <= 1e-12 * (1.0 + m.norm()));
    let s = oracle_singular_values(&m);
    for (j, r) in y.r.iter().enumerate() {
        assert!((s[2 * j] - r).abs() < 1e-12);
    }
}

#[test]
fn odd_kernel_rejected_by_wvn_but_split() {
    let t = generate(GenKind::TauSkewSymmetricWithKernel, 5, Some(4), 9).unwrap();
    let a = AntilinearOperator::new(t.clone()).unwrap();
    let opts = WvnOptions::new(1e-2, 2.0).unwrap();
    assert!(matches!(wvn_decompose(&a, &opts), Err(Error::OddKernel { .. })));
    let r = kernel_split_wvn(&t, &Conjugation::standard(5), &opts).unwrap();
    assert_eq!(r.kernel_dim, 1);
    assert!(r.residual(&t, &Conjugation::standard(5)) <= 1e-9 * (1.0 + t.norm()));
}
