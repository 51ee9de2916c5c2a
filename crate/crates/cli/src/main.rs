//! Command-line driver: problem generation, simulation, reconstruction,
//! de Branges construction and the verification suite.
//!
//! Exit codes: 0 on success, 1 on a verification/data-consistency failure,
//! 2 on usage or i/o errors.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use jacobi_bc::connecting::gram_matrix;
use jacobi_bc::debranges::{hermite_biehler, measure_kappas, verify_axioms, verify_hb};
use jacobi_bc::grid::TimeGrid;
use jacobi_bc::io;
use jacobi_bc::jacobi::JacobiMatrix;
use jacobi_bc::krein::{
    reconstruct_exact, reconstruct_from_response, verify_krein_system, solve_special_controls,
    ReconstructionReport, ResponseSamples,
};
use jacobi_bc::verification::{run_all, FaultInjection, VerifyParams};
use jacobi_bc::wave::{apply_response, solve_forward_trajectory, Control};
use jacobi_bc::Error as CoreError;

#[derive(Parser)]
#[command(name = "jacobi-bc", version, about = "Boundary-control dynamics for finite Jacobi matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral data, orthogonal polynomials and the S-basis Gram matrix.
    Spectra(CommonArgs),
    /// Forward simulation: trajectory, response and response-function samples.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Sampled control CSV (t,re,im); defaults to f ≡ 1 on the grid.
        #[arg(long)]
        control: Option<PathBuf>,
    },
    /// Inverse reconstruction from response samples on (0, 2T).
    Reconstruct {
        #[command(flatten)]
        common: CommonArgs,
        /// Response samples CSV (t,r); generated from the configured matrix
        /// when absent.
        #[arg(long = "r-file")]
        r_file: Option<PathBuf>,
        /// Run the exact S-basis recursion instead of the grid path.
        #[arg(long = "exact-path")]
        exact_path: bool,
    },
    /// Structure function, Hermite–Biehler margins, κ and axiom reports.
    Debranges(CommonArgs),
    /// Run every module's invariant suite; exit 0 iff all pass.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Test fixture: flip the sinh sign in the dynamic kernel.
        #[arg(long = "inject-sinh-sign-error", hide = true)]
        inject_sinh_sign_error: bool,
    },
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Run configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final time T (default 1).
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Grid size m (default 2001; must be ≥ 201, forced odd).
    #[arg(long = "grid")]
    grid_m: Option<usize>,
    /// Seed for the matrix generator.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
struct ConfigFile {
    matrix: Option<JacobiMatrix>,
    generator: Option<GeneratorSpec>,
    #[serde(rename = "T")]
    t_final: Option<f64>,
    grid_m: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    tolerances: Option<HashMap<String, f64>>,
}

#[derive(Debug, Clone, Deserialize)]
struct GeneratorSpec {
    n: usize,
    seed: Option<u64>,
    b_range: Option<(f64, f64)>,
    a_range: Option<(f64, f64)>,
}

struct RunConfig {
    matrix: JacobiMatrix,
    t_final: f64,
    grid_m: usize,
    seed: u64,
    out: PathBuf,
    tolerances: HashMap<String, f64>,
}

enum CliError {
    Usage(String),
    Verification(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::RankMismatch { .. }
            | CoreError::IllPosed { .. }
            | CoreError::SingularGram
            | CoreError::RootNotConverged { .. }
            | CoreError::QuadratureTolerance { .. } => CliError::Verification(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn resolve_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let file: ConfigFile = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };

    let seed = common.seed.or(file.seed).unwrap_or(0);
    let matrix = if let Some(matrix) = file.matrix {
        matrix
    } else {
        let gen = file.generator.unwrap_or(GeneratorSpec {
            n: 3,
            seed: None,
            b_range: None,
            a_range: None,
        });
        if gen.n == 0 {
            return Err(CliError::Usage("generator size must be at least 1".into()));
        }
        JacobiMatrix::random(
            gen.n,
            gen.seed.unwrap_or(seed),
            gen.b_range.unwrap_or((-2.0, 2.0)),
            gen.a_range.unwrap_or((0.5, 2.0)),
        )
    };

    let t_final = common.t_final.or(file.t_final).unwrap_or(1.0);
    if !(t_final > 0.0) {
        return Err(CliError::Usage(format!("T must be positive, got {t_final}")));
    }
    let mut grid_m = common.grid_m.or(file.grid_m).unwrap_or(2001);
    if grid_m < 201 {
        return Err(CliError::Usage(format!(
            "grid must have at least 201 points, got {grid_m}"
        )));
    }
    if grid_m % 2 == 0 {
        grid_m += 1; // Simpson wants an odd point count.
    }
    let out = common.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out"));
    Ok(RunConfig {
        matrix,
        t_final,
        grid_m,
        seed,
        out,
        tolerances: file.tolerances.unwrap_or_default(),
    })
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn lambda_grid(matrix: &JacobiMatrix, points: usize) -> Result<Vec<f64>, CliError> {
    let sd = matrix.spectral_decomposition().map_err(CliError::from)?;
    let lo = sd.lambdas()[0] - 1.0;
    let hi = sd.lambdas()[sd.size() - 1] + 1.0;
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

fn cmd_spectra(config: &RunConfig) -> Result<(), CliError> {
    ensure_out(&config.out)?;
    let sd = config.matrix.spectral_decomposition()?;
    io::write_matrix_json(&config.out.join("matrix.json"), &config.matrix)?;
    io::write_spectra_json(&config.out.join("spectra.json"), &sd)?;
    let grid = lambda_grid(&config.matrix, 201)?;
    io::write_polynomials_csv(&config.out.join("polynomials.csv"), &config.matrix, &grid)?;
    let gram = gram_matrix(&sd, config.t_final)?;
    io::write_gram_json(&config.out.join("gram.json"), &gram)?;
    println!(
        "spectra: N = {}, λ ∈ [{:.6}, {:.6}], cond(G) = {:.3e}",
        sd.size(),
        sd.lambdas()[0],
        sd.lambdas()[sd.size() - 1],
        gram.conditioning().1
    );
    Ok(())
}

fn cmd_simulate(config: &RunConfig, control_path: Option<&Path>) -> Result<(), CliError> {
    ensure_out(&config.out)?;
    let sd = config.matrix.spectral_decomposition()?;
    let grid = TimeGrid::new(config.t_final, config.grid_m)?;
    let control = match control_path {
        Some(path) => {
            let (file_grid, values) = io::read_control_csv(path)?;
            if (file_grid.t_final() - config.t_final).abs() > 1e-9 * config.t_final {
                return Err(CliError::Usage(format!(
                    "control file covers [0, {}], expected [0, {}]",
                    file_grid.t_final(),
                    config.t_final
                )));
            }
            Control::Sampled { grid: file_grid, values }
        }
        None => Control::constant_one(grid),
    };
    let control_grid = match &control {
        Control::Sampled { grid, .. } => *grid,
        Control::SBasis { .. } => grid,
    };
    let trajectory = solve_forward_trajectory(&sd, &control, control_grid)?;
    io::write_trajectory_csv(&config.out.join("trajectory.csv"), control_grid, &trajectory)?;
    let response = apply_response(&sd, &control, control_grid)?;
    io::write_control_csv(&config.out.join("response.csv"), control_grid, &response)?;
    let samples = ResponseSamples::from_spectral_data(&sd, config.t_final, config.grid_m)?;
    io::write_response_samples_csv(&config.out.join("r.csv"), &samples)?;
    println!(
        "simulate: m = {}, ‖u(T)‖ = {:.6e}",
        control_grid.len(),
        trajectory
            .last()
            .map(|u| u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .unwrap_or(0.0)
    );
    Ok(())
}

fn cmd_reconstruct(
    config: &RunConfig,
    r_file: Option<&Path>,
    exact_path: bool,
) -> Result<(), CliError> {
    ensure_out(&config.out)?;
    let n = config.matrix.size();
    let report: ReconstructionReport = if exact_path {
        let sd = config.matrix.spectral_decomposition()?;
        let rec = reconstruct_exact(&sd, config.t_final)?;
        let gram = gram_matrix(&sd, config.t_final)?;
        let controls = solve_special_controls(&sd, &gram);
        let residual = verify_krein_system(&rec, &sd, &gram, &controls);
        ReconstructionReport {
            a: rec.off_diagonal().to_vec(),
            b: rec.diagonal().to_vec(),
            residuals: vec![residual],
            rank: n,
            condition: gram.conditioning().1,
        }
    } else {
        let samples = match r_file {
            Some(path) => io::read_response_samples_csv(path)?,
            None => {
                let sd = config.matrix.spectral_decomposition()?;
                let samples =
                    ResponseSamples::from_spectral_data(&sd, config.t_final, config.grid_m)?;
                io::write_response_samples_csv(&config.out.join("r_used.csv"), &samples)?;
                samples
            }
        };
        let (_, report) = reconstruct_from_response(&samples, n)?;
        report
    };
    fs::write(
        config.out.join("reconstruction.json"),
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Usage(e.to_string()))?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    println!(
        "reconstruct: rank = {}, condition = {:.3e}, max residual = {:.3e}",
        report.rank,
        report.condition,
        report.residuals.iter().fold(0.0f64, |m, r| m.max(*r))
    );
    Ok(())
}

fn cmd_debranges(config: &RunConfig) -> Result<(), CliError> {
    ensure_out(&config.out)?;
    let sd = config.matrix.spectral_decomposition()?;
    let e = hermite_biehler(&sd);

    let grid = lambda_grid(&config.matrix, 401)?;
    let values: Vec<Complex64> = grid
        .iter()
        .map(|&l| e.eval(Complex64::new(l, 0.0)))
        .collect();
    io::write_e_samples_csv(&config.out.join("e_samples.csv"), &grid, &values)?;

    let mut margin_rows = Vec::new();
    let mut samples = Vec::new();
    for &x in grid.iter().step_by(8) {
        for j in 1..=10 {
            let z = Complex64::new(x, 0.5 * j as f64);
            samples.push(z);
            let margin = e.eval(z).norm() - e.eval(z.conj()).norm();
            margin_rows.push((z.re, z.im, margin));
        }
    }
    io::write_hb_margin_csv(&config.out.join("hb_margin.csv"), &margin_rows)?;
    let hb = verify_hb(&e, &samples);

    let kappa = measure_kappas(&sd, config.seed, 16)?;
    fs::write(
        config.out.join("kappa.json"),
        serde_json::to_string_pretty(&kappa).map_err(|e| CliError::Usage(e.to_string()))?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let axioms = verify_axioms(&sd, config.seed, 50);
    fs::write(
        config.out.join("axioms.json"),
        serde_json::to_string_pretty(&axioms).map_err(|e| CliError::Usage(e.to_string()))?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    println!(
        "debranges: ‖J_i‖² = {:.9}, min HB margin = {:.3e}, κ_E = {:.9}, κ_B = {:.9}",
        e.kernel_norm() * e.kernel_norm(),
        hb.min_margin,
        kappa.kappa_e,
        kappa.kappa_b
    );
    let tol = config.tolerances.get("kappa_constancy").copied().unwrap_or(1e-6);
    if hb.min_margin <= 0.0 || kappa.product_defect > tol {
        return Err(CliError::Verification(
            "Hermite–Biehler margin or κ consistency failed".into(),
        ));
    }
    Ok(())
}

fn cmd_verify(config: &RunConfig, faults: FaultInjection) -> Result<(), CliError> {
    let params = VerifyParams {
        t_final: config.t_final,
        grid_m: config.grid_m,
        seed: config.seed,
        overrides: config.tolerances.clone(),
        faults,
    };
    let results = run_all(&config.matrix, &params)?;
    println!("{:<34} {:>6}  {:>12}  {:>12}", "invariant", "status", "value", "threshold");
    let mut all_passed = true;
    for r in &results {
        all_passed &= r.passed;
        println!(
            "{:<34} {:>6}  {:>12.3e}  {:>12.3e}  {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.value,
            r.threshold,
            r.detail
        );
    }
    if all_passed {
        println!("verify: all {} invariants passed", results.len());
        Ok(())
    } else {
        let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        Err(CliError::Verification(format!(
            "failed invariants: {}",
            failed.join(", ")
        )))
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Spectra(common) => cmd_spectra(&resolve_config(common)?),
        Command::Simulate { common, control } => {
            cmd_simulate(&resolve_config(common)?, control.as_deref())
        }
        Command::Reconstruct { common, r_file, exact_path } => {
            cmd_reconstruct(&resolve_config(common)?, r_file.as_deref(), *exact_path)
        }
        Command::Debranges(common) => cmd_debranges(&resolve_config(common)?),
        Command::Verify { common, inject_sinh_sign_error } => cmd_verify(
            &resolve_config(common)?,
            FaultInjection {
                flip_sinh_sign: *inject_sinh_sign_error,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
