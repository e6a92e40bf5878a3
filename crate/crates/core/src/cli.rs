//! The `wvn` command line.
//!
//! Every decomposition subcommand writes its factors in the congruence form
//! `M = K + U D U^T` with `D = (+) d_j [[0, 1], [-1, 0]] (+) 0` (for `youla`,
//! `K = 0` and is not written), so `verify --k/--d/--u` can check any of them.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::antilinear::{AntilinearOperator, Conjugation};
use crate::canonical::{polar_factorize, youla_decompose, CanonicalOptions};
use crate::cmat::{format_cmat, parse_cmat, read_cmat};
use crate::error::Result;
use crate::generate::{generate, GenKind};
use crate::matcore::{frobenius, unitarity_residual, ComplexMatrix};
use crate::schatten::{schatten_norm_linear, SchattenP};
use crate::verify::{run_verify, CheckGroup, Supplied, VerificationReport, VerifyFlags};
use crate::wvn::{kernel_split_wvn, skew_symmetric_wvn, SkewWvnResult, WvnOptions};

#[derive(Debug, Parser)]
#[command(name = "wvn", version, about = "Canonical forms and Weyl-von Neumann decompositions of skew-symmetric matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative singular-value threshold for the numerical kernel.
    #[arg(long = "rank-tol", default_value_t = 1e-10)]
    pub rank_tol: f64,
    /// Random seed (used by `gen`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Prefix for output files.
    #[arg(long = "out-prefix")]
    pub out_prefix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Bound on the Schatten norm of the perturbation K.
    #[arg(long)]
    pub epsilon: f64,
    /// Schatten exponent, 1 < p < inf.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance (written to --out, <prefix>.cmat, or stdout).
    Gen {
        #[arg(long)]
        kind: GenKind,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Youla block skew-diagonalization M = U B U^T.
    Youla {
        /// Input CMAT file, or `-` for stdin.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Polar factorization A = kappa |A| of A(x) = M conj(x).
    Polar {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// M = K + U D U^T with ||K||_p < epsilon (even kernel required).
    Wvn {
        input: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        common: Common,
    },
    /// As `wvn`, splitting off the kernel first (any kernel dimension).
    SkewWvn {
        input: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        common: Common,
    },
    /// Check invariants of the input and, optionally, of a supplied decomposition.
    Verify {
        input: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Comma-separated groups: skew, youla, polar, g, wvn.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<CheckGroup>>,
        #[arg(long)]
        k: Option<PathBuf>,
        #[arg(long)]
        d: Option<PathBuf>,
        #[arg(long)]
        u: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn read_input(path: &Path) -> Result<ComplexMatrix> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        parse_cmat(&text)
    } else {
        read_cmat(path)
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn values_line(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    parts.join(" ") + "\n"
}

/// Files produced by a subcommand, written only once everything succeeded.
struct Outputs {
    prefix: Option<PathBuf>,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new(prefix: &Option<PathBuf>) -> Self {
        Self {
            prefix: prefix.clone(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, suffix: &str, contents: String) {
        self.files.push((suffix.to_string(), contents));
    }

    fn matrix(&mut self, suffix: &str, m: &ComplexMatrix) {
        self.add(suffix, format_cmat(m));
    }

    fn write(self) -> Result<()> {
        if let Some(prefix) = &self.prefix {
            for (suffix, contents) in &self.files {
                fs::write(with_suffix(prefix, suffix), contents)?;
            }
        }
        Ok(())
    }
}

fn canonical(common: &Common) -> CanonicalOptions {
    CanonicalOptions {
        tol: common.tol,
        rank_tol: common.rank_tol,
        ..CanonicalOptions::default()
    }
}

fn skew_report(
    m: &ComplexMatrix,
    r: &SkewWvnResult,
    budget: &Budget,
    tol: f64,
) -> Result<VerificationReport> {
    let tau = Conjugation::standard(m.nrows());
    let n = m.nrows() as f64;
    let mut report = VerificationReport::default();
    report.push("decomposition.reconstruction", r.residual(m, &tau), tol * (1.0 + frobenius(m)));
    report.push("decomposition.unitary", unitarity_residual(&r.u), tol * n.sqrt());
    report.push(
        "decomposition.k_skew",
        tau.skew_symmetry_residual(&r.k),
        tol * (1.0 + frobenius(&r.k)),
    );
    report.push(
        "decomposition.k_norm",
        schatten_norm_linear(&r.k, SchattenP::finite(budget.p)?),
        budget.epsilon,
    );
    if r.kernel_dim > 0 {
        report.note(format!("kernel of dimension {} split off", r.kernel_dim));
    }
    Ok(report)
}

fn finish(report: VerificationReport, mut outputs: Outputs, out: &mut dyn Write) -> Result<i32> {
    let text = report.to_string();
    out.write_all(text.as_bytes())?;
    outputs.add(".report.txt", text);
    outputs.write()?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen {
            kind,
            dim,
            rank,
            out: path,
            common,
        } => {
            let m = generate(kind, dim, rank, common.seed.unwrap_or(0))?;
            let text = format_cmat(&m);
            match (path, &common.out_prefix) {
                (Some(p), _) => fs::write(p, text)?,
                (None, Some(prefix)) => fs::write(with_suffix(prefix, ".cmat"), text)?,
                (None, None) => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
        Command::Youla { input, common } => {
            let m = read_input(&input)?;
            let y = youla_decompose(&m, &canonical(&common))?;
            let mut report = VerificationReport::default();
            report.push("youla.round_trip", y.residual(&m), common.tol * (1.0 + frobenius(&m)));
            report.push(
                "youla.unitary",
                unitarity_residual(&y.u),
                common.tol * (m.nrows() as f64).sqrt(),
            );
            if y.rank_ambiguous {
                report.note("singular values lie near the rank threshold");
            }
            let mut outputs = Outputs::new(&common.out_prefix);
            outputs.matrix(".U.cmat", &y.u);
            outputs.matrix(".D.cmat", &y.block_matrix());
            outputs.add(".values.txt", values_line(&y.r));
            finish(report, outputs, out)
        }
        Command::Polar { input, common } => {
            let m = read_input(&input)?;
            let a = AntilinearOperator::new(m.clone())?;
            let p = polar_factorize(&a, &canonical(&common))?;
            let bound = common.tol * (1.0 + frobenius(&m));
            let (r1, r2, r3) = p.residuals(&a);
            let mut report = VerificationReport::default();
            report.push("polar.kappa_modulus", r1, bound);
            report.push("polar.modulus_kappa", r2, bound);
            report.push("polar.commute", r3, bound);
            let (u, inv, skew) = p.kappa.invariant_residuals();
            report.push("kappa.unitary", u, common.tol);
            report.push("kappa.square", inv, common.tol);
            report.push("kappa.skew", skew, common.tol);
            let mut outputs = Outputs::new(&common.out_prefix);
            outputs.matrix(".kappa.cmat", p.kappa.matrix());
            outputs.matrix(".modulus.cmat", &p.modulus);
            outputs.add(".values.txt", values_line(&p.decomposition.r));
            finish(report, outputs, out)
        }
        Command::Wvn {
            input,
            budget,
            common,
        } => run_wvn(&input, &budget, &common, false, out),
        Command::SkewWvn {
            input,
            budget,
            common,
        } => run_wvn(&input, &budget, &common, true, out),
        Command::Verify {
            input,
            epsilon,
            p,
            checks,
            k,
            d,
            u,
            common,
        } => {
            let m = read_input(&input)?;
            let load = |p: Option<PathBuf>| p.map(read_cmat).transpose();
            let flags = VerifyFlags {
                tol: common.tol,
                rank_tol: common.rank_tol,
                epsilon,
                p,
                groups: checks,
                supplied: Supplied {
                    k: load(k)?,
                    d: load(d)?,
                    u: load(u)?,
                },
            };
            let outcome = run_verify(&m, &flags);
            let text = outcome.report.to_string();
            out.write_all(text.as_bytes())?;
            if let Some(prefix) = &common.out_prefix {
                fs::write(with_suffix(prefix, ".report.txt"), &text)?;
            }
            Ok(outcome.exit_code())
        }
    }
}

fn run_wvn(
    input: &Path,
    budget: &Budget,
    common: &Common,
    split_kernel: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let m = read_input(input)?;
    let opts = WvnOptions::new(budget.epsilon, budget.p)?
        .with_tol(common.tol)
        .with_rank_tol(common.rank_tol);
    let tau = Conjugation::standard(m.nrows());
    let r = if split_kernel {
        kernel_split_wvn(&m, &tau, &opts)?
    } else {
        skew_symmetric_wvn(&m, &tau, &opts)?
    };
    let report = skew_report(&m, &r, budget, common.tol)?;
    let mut outputs = Outputs::new(&common.out_prefix);
    outputs.matrix(".K.cmat", &r.k);
    outputs.matrix(".D.cmat", &r.d);
    outputs.matrix(".U.cmat", &r.u);
    outputs.add(".values.txt", values_line(&r.values));
    finish(report, outputs, out)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
