//! The invariant suite behind `verify`: every module's quantitative
//! invariants, run against one configured matrix, with one pass/fail row per
//! check.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connecting::{
    apply_ct, apply_ct_grid, ct_kernel_spectral, gram_matrix, project_to_sbasis,
};
use crate::debranges::{
    hermite_biehler, inner, measure_kappas, reproducing_kernel, reproducing_kernel_via_control,
    verify_axioms, verify_hb, BElement,
};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::jacobi::JacobiMatrix;
use crate::kernel::{wave_kernel, wave_kernel_integral};
use crate::krein::{
    grid_f1_in_sbasis, reconstruct_exact, reconstruct_from_response, solve_first_special_control,
    solve_special_controls, verify_krein_system, GridConnectingOperator, ResponseSamples,
};
use crate::tolerances;
use crate::wave::{apply_response, control_operator, solve_forward, Control};

/// One invariant check: `value` is the measured defect (or margin), compared
/// against `threshold` with the stated sense.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity (defect, residual or margin).
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn below(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed: value <= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }

    fn above(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed: value >= threshold,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

/// Deliberate defects for exercising the failure path of the suite.
#[derive(Debug, Clone, Copy, Default)]
pub struct FaultInjection {
    /// Flip the sign of the sinh branch in the dynamic-kernel antiderivative.
    pub flip_sinh_sign: bool,
}

/// Suite parameters; `overrides` replaces thresholds by check name.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub t_final: f64,
    pub grid_m: usize,
    pub seed: u64,
    pub overrides: HashMap<String, f64>,
    pub faults: FaultInjection,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            t_final: 1.0,
            grid_m: 2001,
            seed: 0,
            overrides: HashMap::new(),
            faults: FaultInjection::default(),
        }
    }
}

fn rand_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Runs the whole invariant suite on one matrix.
pub fn run_all(matrix: &JacobiMatrix, params: &VerifyParams) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let tol = |name: &str, default: f64| -> f64 {
        params.overrides.get(name).copied().unwrap_or(default)
    };
    let n = matrix.size();
    let t_final = params.t_final;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(0x5eed));

    let sd = matrix.spectral_decomposition()?;

    // jacobi: eigenvalues against the dense symmetric eigensolver oracle.
    {
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = matrix.diagonal()[i];
            if i + 1 < n {
                dense[(i, i + 1)] = matrix.off_diagonal()[i];
                dense[(i + 1, i)] = matrix.off_diagonal()[i];
            }
        }
        let mut oracle: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        let worst = sd
            .lambdas()
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        out.push(CheckResult::below(
            "spectral_eigen_oracle",
            worst,
            tol("spectral_eigen_oracle", 1e-10),
            "max |λ − λ_dense|",
        ));
    }
    {
        let parseval: f64 = sd.rhos().iter().map(|r| 1.0 / r).sum();
        out.push(CheckResult::below(
            "parseval_sum",
            (parseval - 1.0).abs(),
            tol("parseval_sum", tolerances::PARSEVAL),
            "|Σ 1/ρ_k − 1|",
        ));
    }
    {
        let mut worst: f64 = 0.0;
        for m in 0..n {
            for p in 0..n {
                let s: f64 = (0..n).map(|k| sd.phi(m, k) * sd.phi(p, k) / sd.rhos()[k]).sum();
                let expect = if m == p { 1.0 } else { 0.0 };
                worst = worst.max((s - expect).abs());
            }
        }
        out.push(CheckResult::below(
            "row_orthonormality",
            worst,
            tol("row_orthonormality", tolerances::ROW_ORTHONORMALITY),
            "max |Σ φφ/ρ − δ|",
        ));
    }
    {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let col = matrix.eval_polynomials(sd.lambdas()[k]);
            for m in 0..n {
                let scale = sd.phi(m, k).abs().max(1.0);
                worst = worst.max((col[m] - sd.phi(m, k)).abs() / scale);
            }
        }
        out.push(CheckResult::below(
            "phi_matrix_consistency",
            worst,
            tol("phi_matrix_consistency", 1e-12),
            "polynomials reproduce Φ columns",
        ));
    }
    {
        let low = sd.lambdas()[0] - 1.0;
        let high = sd.lambdas()[n - 1] + 1.0;
        let below = sd.spectral_function(low);
        let above = (sd.spectral_function(high) - 1.0).abs();
        out.push(CheckResult::below(
            "spectral_function_range",
            below.abs().max(above),
            tol("spectral_function_range", tolerances::PARSEVAL),
            "ρ(λ) = 0 below and 1 above the spectrum",
        ));
    }

    // wave: kernel ODE, zero initial state, linearity, response consistency.
    {
        let h = 1e-5;
        let mut worst_excess: f64 = 0.0;
        for _ in 0..50 {
            let t = rng.gen_range(0.1..2.0);
            let lambda = rng.gen_range(-8.0..8.0);
            let s_max = wave_kernel(t, lambda).abs().max(wave_kernel(t + h, lambda).abs());
            let dd = (wave_kernel(t + h, lambda) - 2.0 * wave_kernel(t, lambda)
                + wave_kernel(t - h, lambda))
                / (h * h);
            let rhs = -lambda * wave_kernel(t, lambda);
            // ε/h² rounding floor of the quotient sits above the nominal
            // tolerance once |S| ≳ 0.1; it is part of the bound.
            let bound = tol("wave_kernel_ode", 1e-6) * rhs.abs().max(1.0)
                + 32.0 * f64::EPSILON * s_max / (h * h);
            worst_excess = worst_excess.max((dd - rhs).abs() - bound);
        }
        out.push(CheckResult::below(
            "wave_kernel_ode",
            worst_excess.max(0.0),
            0.0,
            "S'' = −λS by central differences (excess over bound)",
        ));
    }
    {
        let coeffs: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let u0 = solve_forward(&sd, &Control::SBasis { coeffs }, t_final, 0.0)?;
        let worst = u0.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        out.push(CheckResult::below(
            "forward_zero_initial",
            worst,
            0.0,
            "u(0) = 0 exactly",
        ));
    }
    {
        let c1: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let c2: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let (alpha, beta) = (rand_complex(&mut rng, 1.0), rand_complex(&mut rng, 1.0));
        let combo: Vec<Complex64> = c1.iter().zip(&c2).map(|(x, y)| alpha * x + beta * y).collect();
        let w1 = control_operator(&sd, &Control::SBasis { coeffs: c1 }, t_final)?;
        let w2 = control_operator(&sd, &Control::SBasis { coeffs: c2 }, t_final)?;
        let wc = control_operator(&sd, &Control::SBasis { coeffs: combo }, t_final)?;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let lin = alpha * w1[k] + beta * w2[k];
            worst = worst.max((wc[k] - lin).norm() / lin.norm().max(1.0));
        }
        out.push(CheckResult::below(
            "control_operator_linearity",
            worst,
            tol("control_operator_linearity", 1e-10),
            "W(αf + βg) = αWf + βWg",
        ));
    }
    {
        let grid = TimeGrid::new(t_final, 801.min(params.grid_m))?;
        let coeffs: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let f = Control::SBasis { coeffs };
        let resp = apply_response(&sd, &f, grid)?;
        let mut worst: f64 = 0.0;
        for (i, &t) in grid.points().iter().enumerate() {
            let u = solve_forward(&sd, &f, t_final, t)?;
            worst = worst.max((resp[i] - u[0]).norm());
        }
        out.push(CheckResult::below(
            "response_component_consistency",
            worst,
            tol("response_component_consistency", tolerances::RESPONSE_CONSISTENCY),
            "(R^Tf)(t) = u₁(t) on the grid",
        ));
    }

    // connecting: kernel equality, Gram diagnostics, self-adjointness, rank.
    {
        let faulty = params.faults.flip_sinh_sign;
        let antider = |t: f64, lambda: f64| -> f64 {
            let v = wave_kernel_integral(t, lambda);
            if faulty && lambda < 0.0 {
                -v
            } else {
                v
            }
        };
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            for jdx in 0..50 {
                let t = t_final * i as f64 / 49.0;
                let s = t_final * jdx as f64 / 49.0;
                let upper = 2.0 * t_final - s - t;
                let lower = (t - s).abs();
                let dynamic: f64 = 0.5
                    * sd.lambdas()
                        .iter()
                        .zip(sd.rhos())
                        .map(|(&lk, &rk)| (antider(upper, lk) - antider(lower, lk)) / rk)
                        .sum::<f64>();
                let spectral = ct_kernel_spectral(&sd, t_final, t, s);
                worst = worst.max((dynamic - spectral).abs());
            }
        }
        out.push(CheckResult::below(
            "dynamic_kernel_equality",
            worst,
            tol("dynamic_kernel_equality", tolerances::CT_KERNEL_EQUALITY),
            "sup |dynamic − spectral| on a 50×50 grid",
        ));
    }

    let gram = gram_matrix(&sd, t_final)?;
    let (min_eig, cond) = gram.conditioning();
    // Identities that pass through a Gram solve carry an irreducible
    // ε·cond(G) floor with f64-stored coefficient vectors; the suite adds it
    // to their thresholds (a genuine defect still overshoots by orders of
    // magnitude). The acceptance tests pin the bare tolerances instead, on
    // instances whose conditioning admits them.
    let cond_floor = 100.0 * f64::EPSILON * cond;
    {
        out.push(CheckResult::above(
            "gram_positive_definite",
            min_eig,
            f64::MIN_POSITIVE,
            format!("min eigenvalue; condition number {cond:.3e}"),
        ));
    }
    {
        let m = 4001;
        let h = t_final / (m - 1) as f64;
        let mut worst: f64 = 0.0;
        for jdx in 0..n {
            for k in jdx..n {
                let (lj, lk) = (sd.lambdas()[jdx], sd.lambdas()[k]);
                let vals: Vec<f64> = (0..m)
                    .map(|i| {
                        let u = i as f64 * h;
                        wave_kernel(u, lj) * wave_kernel(u, lk)
                    })
                    .collect();
                let oracle = crate::grid::grid_inner_real(&vals, &vec![1.0; m], h);
                worst = worst.max((gram.entry(jdx, k) - oracle).abs() / oracle.abs().max(1.0));
            }
        }
        out.push(CheckResult::below(
            "gram_vs_quadrature",
            worst,
            tol("gram_vs_quadrature", tolerances::GRAM_VS_QUADRATURE),
            "closed forms against composite Simpson (m = 4001)",
        ));
    }
    {
        let cf: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let cg: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let ctf = apply_ct(&sd, &gram, &Control::SBasis { coeffs: cf.clone() });
        let ctg = apply_ct(&sd, &gram, &Control::SBasis { coeffs: cg.clone() });
        let (Control::SBasis { coeffs: ctf }, Control::SBasis { coeffs: ctg }) = (ctf, ctg) else {
            unreachable!()
        };
        let lhs = gram.control_inner(&ctf, &cg);
        let rhs = gram.control_inner(&ctg, &cf);
        let defect = (lhs - rhs.conj()).norm() / lhs.norm().max(1.0);
        out.push(CheckResult::below(
            "ct_self_adjoint",
            defect,
            tol("ct_self_adjoint", 1e-12),
            "(C^Tf,g) = conj((C^Tg,f))",
        ));
    }
    {
        let samples = ResponseSamples::from_spectral_data(&sd, t_final, params.grid_m)?;
        let rank = match GridConnectingOperator::build(&samples, n) {
            Ok(op) => op.rank(),
            Err(crate::error::Error::RankMismatch { found, .. }) => found,
            Err(e) => return Err(e),
        };
        out.push(CheckResult::below(
            "ct_grid_rank",
            (rank as f64 - n as f64).abs(),
            0.0,
            format!("truncated rank {rank}, matrix size {n}"),
        ));
    }

    // krein: round trips, system residual, uniqueness, positivity.
    {
        let f1 = solve_first_special_control(&sd, &gram);
        let u = control_operator(&sd, &f1, t_final)?;
        let mut err: f64 = 0.0;
        for (i, ui) in u.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            err += (ui.re - want).powi(2) + ui.im.powi(2);
        }
        out.push(CheckResult::below(
            "krein_f1_roundtrip",
            err.sqrt(),
            tol("krein_f1_roundtrip", tolerances::KREIN_ROUNDTRIP) + cond_floor,
            "‖W^Tf₁ − d₁‖",
        ));
    }
    let controls = solve_special_controls(&sd, &gram);
    {
        let mut worst: f64 = 0.0;
        for jdx in 0..n {
            let ct = apply_ct(&sd, &gram, &controls.control(jdx));
            let Control::SBasis { coeffs: ct } = ct else { unreachable!() };
            for k in 0..n {
                let ip = gram.control_inner(&ct, controls.coeffs(k));
                let want = if jdx == k { 1.0 } else { 0.0 };
                worst = worst.max((ip - want).norm());
            }
        }
        out.push(CheckResult::below(
            "special_controls_identity",
            worst,
            tol("special_controls_identity", tolerances::SPECIAL_CONTROLS_IDENTITY) + cond_floor,
            "[(C^Tf_j, f_k)] = identity",
        ));
    }
    {
        let resid = verify_krein_system(matrix, &sd, &gram, &controls);
        out.push(CheckResult::below(
            "krein_system_residual",
            resid,
            tol("krein_system_residual", tolerances::KREIN_SYSTEM_RESIDUAL) + cond_floor,
            "difference system with true coefficients",
        ));
    }
    {
        let rec = reconstruct_exact(&sd, t_final)?;
        let mut worst: f64 = 0.0;
        for (x, y) in rec.diagonal().iter().zip(matrix.diagonal()) {
            worst = worst.max((x - y).abs());
        }
        let mut positive = true;
        for (x, y) in rec.off_diagonal().iter().zip(matrix.off_diagonal()) {
            worst = worst.max((x - y).abs());
            positive &= *x > 0.0;
        }
        out.push(CheckResult::below(
            "reconstruct_exact_roundtrip",
            worst,
            tol("reconstruct_exact_roundtrip", tolerances::RECONSTRUCT_EXACT) + cond_floor,
            "componentwise recovery, exact path",
        ));
        out.push(CheckResult::above(
            "reconstructed_positivity",
            if positive { 1.0 } else { -1.0 },
            0.0,
            "a_k > 0 in the exact path",
        ));
    }
    {
        let m = params.grid_m.max(1001);
        let samples = ResponseSamples::from_spectral_data(&sd, t_final, m)?;
        let (rec, report) = reconstruct_from_response(&samples, n)?;
        let mut worst: f64 = 0.0;
        for (x, y) in rec.diagonal().iter().zip(matrix.diagonal()) {
            worst = worst.max((x - y).abs() / y.abs().max(1.0));
        }
        for (x, y) in rec.off_diagonal().iter().zip(matrix.off_diagonal()) {
            worst = worst.max((x - y).abs() / y.abs().max(1.0));
        }
        out.push(CheckResult::below(
            "reconstruct_grid_roundtrip",
            worst,
            tol("reconstruct_grid_roundtrip", tolerances::RECONSTRUCT_GRID_REL),
            format!("relative recovery at m = {m}, condition {:.2e}", report.condition),
        ));
    }
    {
        let samples = ResponseSamples::from_spectral_data(&sd, t_final, params.grid_m)?;
        let via_grid = grid_f1_in_sbasis(&sd, &gram, &samples)?;
        let f1 = solve_first_special_control(&sd, &gram);
        let Control::SBasis { coeffs: direct } = f1 else { unreachable!() };
        let mut worst: f64 = 0.0;
        for (d, v) in direct.iter().zip(&via_grid) {
            worst = worst.max((d - v).norm() / d.norm().max(1.0));
        }
        out.push(CheckResult::below(
            "f1_route_uniqueness",
            worst,
            tol("f1_route_uniqueness", tolerances::F1_UNIQUENESS),
            "Gram solve vs grid least squares in the S-basis",
        ));
    }
    {
        let grid = TimeGrid::new(t_final, params.grid_m)?;
        let coeffs: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 1.0)).collect();
        let f = Control::SBasis { coeffs };
        let sampled = f.sample(&sd, grid)?;
        let grid_out = apply_ct_grid(&sd, grid, &sampled)?;
        let exact = apply_ct(&sd, &gram, &f);
        let exact_vals = exact.sample(&sd, grid)?;
        let mut sup: f64 = 0.0;
        for (a, b) in grid_out.iter().zip(&exact_vals) {
            sup = sup.max((a - b).norm());
        }
        out.push(CheckResult::below(
            "ct_grid_vs_exact",
            sup,
            tol("ct_grid_vs_exact", tolerances::CT_GRID_VS_EXACT),
            "dynamic-kernel quadrature vs S-basis algebra",
        ));
        // The projection of the grid image back to the S-basis is another
        // route to the same coefficients.
        let projected = project_to_sbasis(&sd, &gram, grid, &grid_out);
        let Control::SBasis { coeffs: exact_coeffs } = exact else { unreachable!() };
        let mut worst: f64 = 0.0;
        for (a, b) in projected.iter().zip(&exact_coeffs) {
            worst = worst.max((a - b).norm() / b.norm().max(1.0));
        }
        out.push(CheckResult::below(
            "ct_grid_projection",
            worst,
            tol("ct_grid_projection", 1e-4),
            "grid image projected back to S-basis coefficients",
        ));
    }

    // debranges: reproducing identity, route equality, HB margins, κ, axioms.
    {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let g = BElement::new((0..n).map(|_| rand_complex(&mut rng, 1.0)).collect());
            let z = rand_complex(&mut rng, 3.0);
            let jz = reproducing_kernel(&sd, z);
            let ip = inner(&sd, &g, &jz);
            let gz = g.eval(&sd, z);
            worst = worst.max((ip - gz).norm());
        }
        out.push(CheckResult::below(
            "reproducing_identity",
            worst,
            tol("reproducing_identity", tolerances::REPRODUCING),
            "(G, J_z) = G(z)",
        ));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let z = rand_complex(&mut rng, 2.0);
            let direct = reproducing_kernel(&sd, z);
            let via_control = reproducing_kernel_via_control(&sd, &gram, z)?;
            for (a, b) in direct.coeffs().iter().zip(via_control.coeffs()) {
                worst = worst.max((a - b).norm());
            }
        }
        out.push(CheckResult::below(
            "kernel_route_equality",
            worst,
            tol("kernel_route_equality", tolerances::KERNEL_ROUTES) + cond_floor,
            "control route vs Christoffel–Darboux route for J_z",
        ));
    }
    {
        let e = hermite_biehler(&sd);
        let spread = sd.lambdas()[n - 1] - sd.lambdas()[0] + 4.0;
        let mut samples = Vec::with_capacity(200);
        for i in 0..40 {
            for j in 1..=5 {
                samples.push(Complex64::new(
                    sd.lambdas()[0] - 2.0 + spread * i as f64 / 39.0,
                    j as f64,
                ));
            }
        }
        let report = verify_hb(&e, &samples);
        out.push(CheckResult::above(
            "hb_margin",
            report.min_margin,
            f64::MIN_POSITIVE,
            format!("min |E(z)| − |E(z̄)| over {} samples", report.samples),
        ));
    }
    {
        let report = measure_kappas(&sd, params.seed.wrapping_add(7), 12)?;
        let worst = report
            .kappa_e_spread
            .max(report.kappa_b_spread)
            .max(report.product_defect);
        out.push(CheckResult::below(
            "kappa_constancy",
            worst,
            tol("kappa_constancy", tolerances::KAPPA),
            format!("κ_E = {:.9}, κ_B = {:.9}", report.kappa_e, report.kappa_b),
        ));
    }
    {
        let report = verify_axioms(&sd, params.seed.wrapping_add(11), 30);
        out.push(CheckResult::above(
            "axiom_point_evaluation",
            report.point_evaluation_margin,
            -tol("axiom_point_evaluation", tolerances::AXIOMS),
            "|G(z)| ≤ ‖J_z‖‖G‖",
        ));
        out.push(CheckResult::below(
            "axiom_conjugation",
            report.conjugation_defect,
            tol("axiom_conjugation", tolerances::AXIOMS),
            "‖G^#‖ = ‖G‖",
        ));
        out.push(CheckResult::below(
            "axiom_blaschke",
            report.blaschke_defect,
            tol("axiom_blaschke", tolerances::AXIOMS),
            "‖(λ−ω̄)H‖ = ‖(λ−ω)H‖",
        ));
    }

    Ok(out)
}
