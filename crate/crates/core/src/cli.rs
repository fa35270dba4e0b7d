//! Command-line front end.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::acceptance;
use crate::convert::{sym_to_bos, tilde_state, verify_extension, BosonicState, Extension};
use crate::error::{Error, Result};
use crate::extend::{
    blocks_to_global, gen_random_extendible, global_to_blocks, solve_bosonic, solve_bosonic_k2_generic,
    solve_symmetric, Certificate, Profile, SolverConfig, SolverReport, Status,
};
use crate::fixtures::QUTRIT_MARGINAL_FILE;
use crate::io::{self, LoadedState, Metadata, RunReport, RunStatus};
use crate::linalg::DensityMatrix;
use crate::schur::build_schur_basis;

#[derive(Debug, Parser)]
#[command(name = "symext", version, about = "Symmetric and bosonic extendibility of qubit-B bipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// seed of the solver start point
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    max_iter: usize,
    /// residual accepted as FEASIBLE
    #[arg(long, default_value_t = SolverConfig::default().tol_feasible)]
    tol_feasible: f64,
    /// certified gap required for INFEASIBLE
    #[arg(long, default_value_t = SolverConfig::default().tol_infeasible_gap)]
    tol_gap: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol_feasible: self.tol_feasible,
            tol_infeasible_gap: self.tol_gap,
            max_iter: self.max_iter,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide k-symmetric extendibility of a state on A ⊗ C^2
    CheckSym {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// write the extension on A ⊗ (C^2)^{⊗k} here when feasible
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Decide k-bosonic extendibility of a state on A ⊗ C^2
    CheckBos {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// write the extension on A ⊗ Sym^k(C^2) here when feasible
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Decide two-copy bosonic extendibility for a B side of any dimension
    CheckBos2 {
        #[arg(long = "dB")]
        d_b: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Produce a bosonic extension from a marginal or a symmetric extension
    Convert {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Check an extension against a marginal
    Verify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ext: PathBuf,
        #[arg(long)]
        marginal: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// pass on a symmetric extension without requiring symmetric support
        #[arg(long)]
        symmetric_only: bool,
    },
    /// Form the mixed tilde state and screen it for PPT
    Tilde {
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random k-extendible state
    Gen {
        #[arg(long)]
        k: usize,
        #[arg(long = "dA")]
        d_a: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "all")]
        profile: Profile,
        /// print the file to standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite
    Selftest {
        #[arg(long, default_value_t = acceptance::DEFAULT_SEED)]
        seed: u64,
        /// also write deterministic certificate files here
        #[arg(long)]
        cert_dir: Option<PathBuf>,
    },
    /// Write the qutrit counterexample marginal
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the coupled basis of k qubits
    Basis {
        #[arg(long)]
        k: usize,
    },
}

/// Exit code and captured output of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn error(message: String) -> Self {
        Self { code: 1, stdout: String::new(), stderr: message }
    }
}

pub fn run_from_env() -> i32 {
    let out = run(std::env::args());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput::error(text)
            } else {
                CliOutput { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    match execute(cli.command, echo.join(" ")) {
        Ok(Output::Report(mut report)) => {
            report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            CliOutput { code: report.status.exit_code(), stdout: report.to_text(), stderr: String::new() }
        }
        Ok(Output::Raw(text)) => CliOutput { code: 0, stdout: text, stderr: String::new() },
        Err(e) => CliOutput::error(format!("error: {e}\n")),
    }
}

enum Output {
    Report(RunReport),
    Raw(String),
}

fn solver_report(command: String, r: &SolverReport) -> RunReport {
    let mut report = RunReport::new(command, r.status.into());
    report
        .field("residual", format!("{:.6e}", r.residual))
        .field("gap_estimate", format!("{:.6e}", r.gap_estimate))
        .field("iterations", r.iterations);
    report
}

fn meta(seed: Option<u64>, provenance: String) -> Metadata {
    Metadata { seed, provenance: Some(provenance) }
}

fn is_marginal(rho: &DensityMatrix) -> bool {
    rho.layout().dims().len() == 2 && rho.layout().dims()[1] == 2
}

fn is_qubit_extension(rho: &DensityMatrix, k: usize) -> bool {
    let dims = rho.layout().dims();
    dims.len() == k + 1 && dims[1..].iter().all(|&d| d == 2)
}

fn execute(command: Command, echo: String) -> Result<Output> {
    match command {
        Command::CheckSym { k, input, cert, solver } => {
            let rho = io::load_state(&input)?;
            let r = solve_symmetric(&rho, k, &solver.config())?;
            let mut report = solver_report(echo, &r);
            if let (Some(path), Some(Certificate::Blocks(bs))) = (cert, &r.certificate) {
                let global = blocks_to_global(bs, &build_schur_basis(k)?)?;
                io::save_state(&global, &path, meta(Some(solver.seed), format!("check-sym k={k}")))?;
                report.certificates.push(path.display().to_string());
            }
            Ok(Output::Report(report))
        }
        Command::CheckBos { k, input, cert, solver } => {
            let rho = io::load_state(&input)?;
            let r = solve_bosonic(&rho, k, &solver.config())?;
            let mut report = solver_report(echo, &r);
            if let (Some(path), Some(Certificate::Blocks(bs))) = (cert, &r.certificate) {
                let sigma = BosonicState::from_block_state(bs)?;
                io::save_bosonic(&sigma, &path, meta(Some(solver.seed), format!("check-bos k={k}")))?;
                report.certificates.push(path.display().to_string());
            }
            Ok(Output::Report(report))
        }
        Command::CheckBos2 { d_b, input, cert, solver } => {
            let rho = io::load_state(&input)?;
            let r = solve_bosonic_k2_generic(&rho, d_b, &solver.config())?;
            let mut report = solver_report(echo, &r);
            if let (Some(path), Some(Certificate::Global(g))) = (cert, &r.certificate) {
                io::save_state(g, &path, meta(Some(solver.seed), format!("check-bos2 dB={d_b}")))?;
                report.certificates.push(path.display().to_string());
            }
            Ok(Output::Report(report))
        }
        Command::Convert { k, input, out, solver } => convert(k, &input, &out, &solver, echo),
        Command::Verify { k, ext, marginal, tol, symmetric_only } => {
            let rho = io::load_state(&marginal)?;
            let loaded = io::load_any(&ext)?;
            let v = match &loaded {
                LoadedState::Bosonic(s) => verify_extension(Extension::Bosonic(s), &rho, k, tol)?,
                LoadedState::Dense(s) => verify_extension(Extension::Full(s), &rho, k, tol)?,
            };
            let ok = if symmetric_only { v.is_symmetric_extension() } else { v.is_bosonic_extension() };
            let mut report = RunReport::new(echo, if ok { RunStatus::Pass } else { RunStatus::Fail });
            verification_fields(&mut report, &v);
            Ok(Output::Report(report))
        }
        Command::Tilde { k, input, out } => {
            let rho = io::load_state(&input)?;
            let t = tilde_state(&rho, k)?;
            let mut report = RunReport::new(echo, if t.ppt { RunStatus::Pass } else { RunStatus::Fail });
            report.field("ppt", t.ppt).field("min_pt_eigenvalue", format!("{:.12e}", t.min_pt_eigenvalue));
            if let Some(path) = out {
                io::save_state(&t.state, &path, meta(None, format!("tilde k={k}")))?;
                report.certificates.push(path.display().to_string());
            }
            Ok(Output::Report(report))
        }
        Command::Gen { k, d_a, seed, profile, out } => {
            let (rho, _) = gen_random_extendible(k, d_a, seed, profile)?;
            let provenance = format!("gen k={k} dA={d_a} profile={}", profile.as_str());
            let file = io::state_file(&rho, meta(Some(seed), provenance));
            match out {
                None => Ok(Output::Raw(file.to_json())),
                Some(path) => {
                    std::fs::write(&path, file.to_json())?;
                    let mut report = RunReport::new(echo, RunStatus::Pass);
                    report.certificates.push(path.display().to_string());
                    Ok(Output::Report(report))
                }
            }
        }
        Command::Selftest { seed, cert_dir } => {
            let results = acceptance::run_all(seed);
            let passed = results.iter().all(|r| r.passed);
            let mut report = RunReport::new(echo, if passed { RunStatus::Pass } else { RunStatus::Fail });
            for r in &results {
                report.field(&format!("criterion_{}", r.id), format!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.title, r.detail));
            }
            if let Some(dir) = cert_dir {
                for p in acceptance::write_certificates(&dir, seed)? {
                    report.certificates.push(p.display().to_string());
                }
            }
            Ok(Output::Report(report))
        }
        Command::Fixture { out } => {
            std::fs::write(&out, QUTRIT_MARGINAL_FILE)?;
            let mut report = RunReport::new(echo, RunStatus::Pass);
            report.certificates.push(out.display().to_string());
            Ok(Output::Report(report))
        }
        Command::Basis { k } => Ok(Output::Raw(build_schur_basis(k)?.export_text())),
    }
}

fn verification_fields(report: &mut RunReport, v: &crate::convert::VerificationReport) {
    for (name, c) in [
        ("psd", &v.psd),
        ("trace", &v.trace),
        ("marginals", &v.marginals),
        ("permutation", &v.permutation),
        ("symmetric_support", &v.symmetric_support),
    ] {
        report.field(name, format!("{} ({:.3e})", if c.passed { "PASS" } else { "FAIL" }, c.value));
    }
    report.field("analytic", v.analytic);
}

fn convert(k: usize, input: &Path, out: &Path, solver: &SolverArgs, echo: String) -> Result<Output> {
    let (rho_ab, blocks, note) = match io::load_any(input)? {
        LoadedState::Bosonic(s) => {
            if s.k() != k {
                return Err(Error::InvalidInput(format!("input is sym({}), not sym({k})", s.k())));
            }
            (crate::extend::marginal_from_blocks(&s.to_block_state()), s.to_block_state(), "bosonic input")
        }
        LoadedState::Dense(rho) if is_qubit_extension(&rho, k) && !(k == 1 && is_marginal(&rho)) => {
            let rho_ab = rho.reduce(&[0, 1])?;
            let v = verify_extension(Extension::Full(&rho), &rho_ab, k, 1e-8)?;
            if !v.is_symmetric_extension() {
                let mut report = RunReport::new(echo, RunStatus::Fail);
                report.field("reason", "input is not a symmetric extension");
                verification_fields(&mut report, &v);
                return Ok(Output::Report(report));
            }
            (rho_ab, global_to_blocks(&rho, &build_schur_basis(k)?)?, "symmetric extension input")
        }
        LoadedState::Dense(rho) if is_marginal(&rho) => {
            let r = solve_symmetric(&rho, k, &solver.config())?;
            match r.certificate {
                Some(Certificate::Blocks(bs)) if r.status == Status::Feasible => (rho, bs, "marginal input"),
                _ => {
                    let mut report = solver_report(echo, &r);
                    report.field("reason", "no symmetric extension found");
                    return Ok(Output::Report(report));
                }
            }
        }
        LoadedState::Dense(rho) => {
            return Err(Error::Dimension(format!(
                "layout {:?} is neither a marginal on A ⊗ C^2 nor an extension with {k} qubits",
                rho.layout().dims()
            )))
        }
    };
    let sigma = sym_to_bos(&blocks)?;
    io::save_bosonic(&sigma, out, meta(Some(solver.seed), format!("convert k={k}")))?;
    let v = verify_extension(Extension::Bosonic(&sigma), &rho_ab, k, 1e-8)?;
    let mut report = RunReport::new(echo, if v.is_bosonic_extension() { RunStatus::Pass } else { RunStatus::Fail });
    report.field("source", note);
    verification_fields(&mut report, &v);
    report.certificates.push(out.display().to_string());
    Ok(Output::Report(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["symext"]).code, 1);
        assert_eq!(run(["symext", "check-sym", "--k"]).code, 1);
        assert_eq!(run(["symext", "frobnicate"]).code, 1);
        assert_eq!(run(["symext", "gen", "--k", "2", "--dA", "2", "--seed", "1", "--profile", "odd"]).code, 1);
    }

    #[test]
    fn help_exits_zero() {
        let out = run(["symext", "--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("check-sym"));
    }

    #[test]
    fn missing_file_exits_one() {
        let out = run(["symext", "check-sym", "--k", "2", "--in", "/nonexistent/x.state"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.starts_with("error:"));
    }

    #[test]
    fn gen_without_out_prints_file() {
        let out = run(["symext", "gen", "--k", "2", "--dA", "2", "--seed", "3"]);
        assert_eq!(out.code, 0);
        assert!(io::MatrixFile::parse(&out.stdout).is_ok());
    }
}
