//! Residual checks over a skew-symmetric input, reported one row per check.

use std::fmt;
use std::str::FromStr;

use crate::antilinear::AntilinearOperator;
use crate::canonical::{polar_factorize, youla_decompose, CanonicalOptions, PolarResult};
use crate::error::{Error, Result};
use crate::matcore::{frobenius, op_norm, singular_values, skew_residual, unitarity_residual, ComplexMatrix};
use crate::schatten::{schatten_norm_linear, SchattenP};
use crate::wvn::{
    spectral_measure_g, spectral_projection, spectral_resolution, standard_block, wvn_decompose,
    Interval, WvnOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub bound: f64,
}

impl Check {
    /// `PASS` exactly when `residual <= bound`; NaN fails.
    pub fn status(&self) -> Status {
        if self.residual <= self.bound {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Free-form remarks (skipped groups, ambiguous ranks); not check rows.
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn push(&mut self, name: impl Into<String>, residual: f64, bound: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual,
            bound,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status() == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status() == Status::Fail)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} residual={:e} bound={:e}",
                c.name,
                c.status(),
                c.residual,
                c.bound
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Groups of checks `run_verify` can be restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckGroup {
    Skew,
    Youla,
    Polar,
    G,
    Wvn,
}

impl FromStr for CheckGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "skew" => CheckGroup::Skew,
            "youla" => CheckGroup::Youla,
            "polar" => CheckGroup::Polar,
            "g" => CheckGroup::G,
            "wvn" => CheckGroup::Wvn,
            _ => return Err(format!("unknown check group {s:?}")),
        })
    }
}

/// A decomposition `M = K + U D U^T` produced elsewhere.
#[derive(Debug, Clone, Default)]
pub struct Supplied {
    pub k: Option<ComplexMatrix>,
    pub d: Option<ComplexMatrix>,
    pub u: Option<ComplexMatrix>,
}

#[derive(Debug, Clone)]
pub struct VerifyFlags {
    pub tol: f64,
    pub rank_tol: f64,
    pub epsilon: Option<f64>,
    pub p: f64,
    /// `None` runs every applicable group and skips the inapplicable ones
    /// with a note; an explicit list turns inapplicability into an error.
    pub groups: Option<Vec<CheckGroup>>,
    pub supplied: Supplied,
}

impl Default for VerifyFlags {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            rank_tol: 1e-10,
            epsilon: None,
            p: 2.0,
            groups: None,
            supplied: Supplied::default(),
        }
    }
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub report: VerificationReport,
    /// Set when the input could not be processed as requested.
    pub error: Option<Error>,
}

impl VerifyOutcome {
    /// 0 if every check passed, 1 if any failed, 2 on an input error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.report.all_pass() {
            0
        } else {
            1
        }
    }
}

struct Run<'a> {
    m: &'a ComplexMatrix,
    flags: &'a VerifyFlags,
    report: VerificationReport,
}

impl Run<'_> {
    fn wants(&self, g: CheckGroup) -> bool {
        self.flags.groups.as_ref().is_none_or(|gs| gs.contains(&g))
    }

    fn explicit(&self, g: CheckGroup) -> bool {
        self.flags.groups.as_ref().is_some_and(|gs| gs.contains(&g))
    }

    fn scaled(&self) -> f64 {
        self.flags.tol * (1.0 + frobenius(self.m))
    }

    fn canonical(&self) -> CanonicalOptions {
        CanonicalOptions {
            tol: self.flags.tol,
            rank_tol: self.flags.rank_tol,
            ..CanonicalOptions::default()
        }
    }

    /// Records a computational failure as a failed row.
    fn failed(&mut self, name: &str, err: &Error, bound: f64) {
        self.report.note(format!("{name}: {err}"));
        self.report.push(name, f64::INFINITY, bound);
    }

    fn youla(&mut self) {
        let bound = self.scaled();
        match youla_decompose(self.m, &self.canonical()) {
            Ok(y) => {
                let n = self.m.nrows() as f64;
                self.report.push("youla.round_trip", y.residual(self.m), bound);
                self.report
                    .push("youla.unitary", unitarity_residual(&y.u), self.flags.tol * n.sqrt());
                if y.rank_ambiguous {
                    self.report.note(format!(
                        "youla: singular values lie near the rank threshold; kernel dimension {} is not numerically determined",
                        y.kernel_dim
                    ));
                }
            }
            Err(e) => self.failed("youla.round_trip", &e, bound),
        }
    }

    fn polar(&mut self, a: &AntilinearOperator) -> Result<Option<PolarResult>> {
        match polar_factorize(a, &self.canonical()) {
            Ok(p) => {
                let bound = self.scaled();
                let (r1, r2, r3) = p.residuals(a);
                self.report.push("polar.kappa_modulus", r1, bound);
                self.report.push("polar.modulus_kappa", r2, bound);
                self.report.push("polar.commute", r3, bound);
                let (u, inv, skew) = p.kappa.invariant_residuals();
                let tol = self.flags.tol;
                self.report.push("kappa.unitary", u, tol);
                self.report.push("kappa.square", inv, tol);
                self.report.push("kappa.skew", skew, tol);
                Ok(Some(p))
            }
            Err(e @ Error::OddKernel { .. }) => {
                self.report.note(format!("polar: {e}"));
                if self.explicit(CheckGroup::Polar) {
                    Err(e)
                } else {
                    Ok(None)
                }
            }
            Err(e) => {
                self.failed("polar.kappa_modulus", &e, self.scaled());
                Ok(None)
            }
        }
    }

    fn g(&mut self, a: &AntilinearOperator, polar: &PolarResult) {
        let res = match spectral_resolution(a, &self.canonical()) {
            Ok(r) => r,
            Err(e) => return self.failed("g.full", &e, self.flags.tol),
        };
        let tol = self.flags.tol;
        let kappa = &polar.kappa;
        let mid = 0.5 * (res.a + res.b);
        let cells = [
            ("full", Interval::closed(res.a, res.b)),
            ("lower", Interval::half_open(res.a, mid)),
            ("upper", Interval::closed(mid, res.b)),
        ];
        let mut gs = Vec::new();
        for (label, omega) in cells {
            let e = spectral_projection(&res, &omega);
            let g = spectral_measure_g(&res, kappa, &omega);
            let gm = g.matrix();
            self.report
                .push(format!("g.square.{label}"), (gm * gm.conjugate() + &e).norm(), tol);
            self.report
                .push(format!("g.sharp.{label}"), (gm + gm.transpose()).norm(), tol);
            let commute = (kappa.matrix() * e.conjugate() - &e * kappa.matrix()).norm();
            self.report.push(format!("g.commute.{label}"), commute, tol);
            gs.push(gm.clone());
        }
        self.report
            .push("g.full", (&gs[0] - kappa.matrix()).norm(), tol);
        self.report
            .push("g.additive", (&gs[1] + &gs[2] - &gs[0]).norm(), tol);
    }

    fn wvn(&mut self, a: &AntilinearOperator) -> Result<()> {
        let Some(epsilon) = self.flags.epsilon else {
            if self.explicit(CheckGroup::Wvn) {
                return Err(Error::InvalidEpsilon(f64::NAN));
            }
            self.report.note("wvn: skipped, no epsilon given");
            return Ok(());
        };
        let opts = WvnOptions::new(epsilon, self.flags.p)?
            .with_tol(self.flags.tol)
            .with_rank_tol(self.flags.rank_tol);
        let r = match wvn_decompose(a, &opts) {
            Ok(r) => r,
            Err(e @ Error::OddKernel { .. }) => {
                self.report.note(format!("wvn: {e}"));
                return if self.explicit(CheckGroup::Wvn) { Err(e) } else { Ok(()) };
            }
            Err(Error::BudgetFailure { budget, best, step, .. }) => {
                self.report.note(format!("wvn: budget not met at step {step}"));
                self.report.push("wvn.budget", best, budget);
                return Ok(());
            }
            Err(e) => {
                self.failed("wvn.reconstruction", &e, self.scaled());
                return Ok(());
            }
        };
        let bound = self.scaled();
        self.report
            .push("wvn.reconstruction", r.reconstruction_residual(a), bound);
        self.report.push("wvn.norm", r.achieved_norm, epsilon);
        self.report.push("wvn.block", r.block_residual(), bound);
        self.report.push(
            "wvn.k_skew",
            r.k.skew_residual(),
            self.flags.tol * (1.0 + frobenius(r.k.matrix())),
        );
        let s = singular_values(a.matrix());
        let drift = r
            .values
            .iter()
            .enumerate()
            .map(|(j, d)| (d - s[2 * j]).abs())
            .fold(0.0f64, f64::max);
        self.report
            .push("wvn.weyl", drift, op_norm(r.k.matrix()) + bound);
        for (j, step) in r.steps.iter().enumerate() {
            self.report.note(format!(
                "wvn step {}: seed e{} cells {} rank {} dropped {} norm {:e} budget {:e}",
                j + 1,
                step.seed + 1,
                step.cells,
                step.rank,
                step.dropped,
                step.norm,
                step.budget
            ));
        }
        Ok(())
    }

    fn supplied(&mut self) -> Result<()> {
        let n = self.m.nrows();
        let sup = &self.flags.supplied;
        if sup.k.is_none() && sup.d.is_none() && sup.u.is_none() {
            return Ok(());
        }
        for (label, mat) in [("K", &sup.k), ("D", &sup.d), ("U", &sup.u)] {
            if let Some(x) = mat {
                if x.nrows() != n || x.ncols() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "supplied {label} is {}x{}, input is {n}x{n}",
                        x.nrows(),
                        x.ncols()
                    )));
                }
            }
        }
        let tol = self.flags.tol;
        let zero = ComplexMatrix::zeros(n, n);
        let k = sup.k.clone().unwrap_or_else(|| zero.clone());
        if let Some(u) = &sup.u {
            self.report
                .push("supplied.unitary", unitarity_residual(u), tol * (n as f64).sqrt());
        }
        if let Some(d) = &sup.d {
            let values: Vec<f64> = (0..n / 2).map(|j| d[(2 * j, 2 * j + 1)].re).collect();
            let negative = values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum::<f64>();
            let structure = (d - standard_block(n, &values)).norm() + negative;
            self.report
                .push("supplied.block_form", structure, tol * (1.0 + frobenius(d)));
        }
        if sup.k.is_some() {
            self.report.push(
                "supplied.k_skew",
                skew_residual(&k),
                tol * (1.0 + frobenius(&k)),
            );
            if let Some(eps) = self.flags.epsilon {
                let norm = schatten_norm_linear(&k, SchattenP::finite(self.flags.p)?);
                self.report.push("supplied.k_norm", norm, eps);
            }
        }
        if let (Some(u), Some(d)) = (&sup.u, &sup.d) {
            let residual = (self.m - &k - u * d * u.transpose()).norm();
            self.report
                .push("supplied.reconstruction", residual, self.scaled());
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        if !self.m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.m.nrows(),
                self.m.ncols()
            )));
        }
        if let Some(eps) = self.flags.epsilon {
            WvnOptions::new(eps, self.flags.p)?;
        }
        self.supplied()?;
        let skew = skew_residual(self.m);
        let bound = self.scaled();
        if self.wants(CheckGroup::Skew) || skew > bound {
            self.report.push("input.skew", skew, bound);
        }
        if skew > bound {
            self.report
                .note("input is not skew-symmetric; remaining checks skipped");
            return Ok(());
        }
        if self.wants(CheckGroup::Youla) {
            self.youla();
        }
        let a = AntilinearOperator::new(self.m.clone())?;
        let polar = if self.wants(CheckGroup::Polar) || self.wants(CheckGroup::G) {
            self.polar(&a)?
        } else {
            None
        };
        if self.wants(CheckGroup::G) {
            match &polar {
                Some(p) => self.g(&a, p),
                None if self.explicit(CheckGroup::G) => {
                    return Err(Error::OddKernel {
                        kernel_dim: self.m.nrows() % 2,
                    })
                }
                None => self.report.note("g: skipped, no polar factorization"),
            }
        }
        if self.wants(CheckGroup::Wvn) {
            self.wvn(&a)?;
        }
        Ok(())
    }
}

/// Runs the requested checks on `m`, read as `A(x) = M conj(x)`.
pub fn run_verify(m: &ComplexMatrix, flags: &VerifyFlags) -> VerifyOutcome {
    let mut run = Run {
        m,
        flags,
        report: VerificationReport::default(),
    };
    let error = run.run().err();
    if let Some(e) = &error {
        run.report.note(format!("error: {e}"));
    }
    VerifyOutcome {
        report: run.report,
        error,
    }
}
