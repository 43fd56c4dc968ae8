//! Studies built on the integrator: the large-λ sweep against the limit
//! profile, rate fitting, step-size self-convergence, and the mixed
//! focusing/defocusing scenario whose limit is linear.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, DataFunctionals, GNConstants, Verdict};
use crate::dynamics::{
    effective_coefficients, evolve, CouplingMatrix, EffectiveCoefficients, IntegratorConfig, RunStatus, SystemSpec,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::field::{
    gradient_modulus, lr_norm_of_modulus, mixed_norm, sigma_norm, MixedNormAccumulator, TwoComponentField,
};
use crate::grid::{make_grid, Grid, ScalarField};
use crate::transforms::{asymptotic_profile, hadamard_mix};

/// `amplitude · (πw²)^{-N/4} · e^{-|x-c|²/(2w²)} · e^{ik·x}`, so `amplitude²`
/// is the component mass. Missing center or momentum entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub amplitude: f64,
    #[serde(default)]
    pub center: Vec<f64>,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub momentum: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

impl GaussianSpec {
    pub fn centered(amplitude: f64) -> Self {
        GaussianSpec {
            amplitude,
            center: Vec::new(),
            width: 1.0,
            momentum: Vec::new(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidArgument("gaussian amplitude must be finite".into()));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gaussian width must be positive (got {})",
                self.width
            )));
        }
        if self.center.len() > dim || self.momentum.len() > dim {
            return Err(Error::InvalidArgument(format!(
                "gaussian center/momentum have more than {dim} entries"
            )));
        }
        if self.center.iter().chain(&self.momentum).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("gaussian center/momentum must be finite".into()));
        }
        Ok(())
    }

    pub fn sample(&self, grid: &Arc<Grid>) -> ScalarField {
        let n = grid.dim() as f64;
        let norm = self.amplitude * (PI * self.width * self.width).powf(-n / 4.0);
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        ScalarField::from_fn(grid, |x| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                r2 += (xi - at(&self.center, i)).powi(2);
                phase += at(&self.momentum, i) * xi;
            }
            Complex64::from_polar(norm * (-r2 / (2.0 * self.width * self.width)).exp(), phase)
        })
    }

    /// True when this is a multiple of the trap ground state for frequency `gamma`.
    fn is_ground_state(&self, gamma: f64) -> bool {
        self.center.iter().chain(&self.momentum).all(|&v| v == 0.0)
            && (self.width * self.width * gamma - 1.0).abs() < 1e-14
    }
}

/// Initial datum: one Gaussian per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Datum {
    pub first: GaussianSpec,
    pub second: GaussianSpec,
}

impl Datum {
    pub fn field(&self, grid: &Arc<Grid>) -> Result<TwoComponentField> {
        self.first.validate(grid.dim())?;
        self.second.validate(grid.dim())?;
        let f = TwoComponentField::new(self.first.sample(grid), self.second.sample(grid))?;
        if !f.is_finite() {
            return Err(Error::InvalidArgument("initial datum is not finite".into()));
        }
        Ok(f)
    }
}

/// Everything needed to run one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dim: usize,
    pub points_per_dim: usize,
    pub half_width: f64,
    pub coupling: CouplingMatrix,
    pub gamma: f64,
    pub lambda: f64,
    pub datum: Datum,
    pub integrator: IntegratorConfig,
}

impl Scenario {
    /// One-dimensional run with `(β₁₁, β₁₂, β₂₂) = (1, 0.5, 2)`, `γ = 1`, two
    /// offset Gaussians (the second carrying momentum), `T = 1`.
    pub fn standard_cubic() -> Self {
        Scenario {
            dim: 1,
            points_per_dim: 512,
            half_width: 10.0,
            coupling: CouplingMatrix::new(1.0, 0.5, 2.0),
            gamma: 1.0,
            lambda: 10.0,
            datum: Datum {
                first: GaussianSpec::centered(1.0),
                second: GaussianSpec {
                    amplitude: 0.5,
                    center: vec![1.0],
                    width: 1.0,
                    momentum: vec![0.5],
                },
            },
            integrator: IntegratorConfig {
                dt_base: 1e-3,
                t_end: 1.0,
                snapshot_stride: 10,
                lambda_cfl: 0.1,
                blowup_threshold: 20.0,
            },
        }
    }

    /// Two-dimensional negative-definite run, `(β₁₁, β₁₂, β₂₂) = (-5, -1, -5)`,
    /// `λ = 1`, integrated up to `π/(2γ)`.
    pub fn negative_definite_collapse() -> Self {
        let amp = 1.5 * PI.sqrt();
        Scenario {
            dim: 2,
            points_per_dim: 256,
            half_width: 8.0,
            coupling: CouplingMatrix::new(-5.0, -1.0, -5.0),
            gamma: 1.0,
            lambda: 1.0,
            datum: Datum {
                first: GaussianSpec::centered(amp),
                second: GaussianSpec::centered(amp),
            },
            integrator: IntegratorConfig {
                dt_base: 5e-4,
                t_end: PI / 2.0,
                snapshot_stride: 20,
                lambda_cfl: 0.1,
                blowup_threshold: 10.0,
            },
        }
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.dim, self.points_per_dim, self.half_width)
    }

    pub fn initial_field(&self) -> Result<TwoComponentField> {
        self.datum.field(&self.grid()?)
    }

    pub fn original_spec(&self, lambda: f64) -> SystemSpec {
        SystemSpec::original(self.coupling, lambda, self.gamma)
    }

    pub fn limit_spec(&self) -> SystemSpec {
        SystemSpec::limit_of(self.coupling, self.gamma)
    }

    /// Global-existence verdict for the limit system; advisory only.
    pub fn limit_advisory(&self) -> Verdict {
        criteria::gwp_limit(self.coupling)
    }

    pub fn data_functionals(&self, lambda: f64) -> Result<DataFunctionals> {
        Ok(DataFunctionals::of(
            &self.initial_field()?,
            self.coupling,
            self.gamma,
            lambda,
        ))
    }

    fn is_linear_ground_state(&self) -> bool {
        let c = self.coupling;
        c.b11 == 0.0
            && c.b12 == 0.0
            && c.b22 == 0.0
            && self.datum.first.is_ground_state(self.gamma)
            && self.datum.second.is_ground_state(self.gamma)
    }
}

/// `Ω_λ(t)Ψ₀e^{-iNγt/2}`: the exact solution when `β = 0` and both components
/// start in the trap ground state.
pub fn linear_oracle(psi0: &TwoComponentField, lambda: f64, gamma: f64, t: f64) -> TwoComponentField {
    let n = psi0.grid().dim() as f64;
    crate::dynamics::rabi_step(psi0, lambda, t).scale(Complex64::from_polar(1.0, -n * gamma * t / 2.0))
}

/// Mixed-norm errors of the value, gradient and `|x|`-weighted difference.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComponentErrors {
    pub value: f64,
    pub grad: f64,
    pub xw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepResult {
    pub lambda: f64,
    /// `sup_t ‖Ψ^λ − Ũ‖_Σ` over shared snapshots.
    pub err_sup_sigma: f64,
    /// Pair `(∞, 2)` for the three components.
    pub err_linf_l2: ComponentErrors,
    /// Pair `(8/N, 4)` for the three components.
    pub err_q8n_l4: ComponentErrors,
    pub status_original: RunStatus,
    pub status_limit: RunStatus,
}

/// Limit system from `VΨ₀`. A blow-up of the reference is an error: the
/// comparison is only meaningful below the limit's maximal time.
pub fn run_limit_reference(s: &Scenario) -> Result<Trajectory> {
    let u0 = hadamard_mix(&s.initial_field()?);
    let traj = evolve(&u0, &s.limit_spec(), &s.integrator)?;
    match traj.status {
        RunStatus::Completed => Ok(traj),
        RunStatus::BlowupDetected { t_stop, .. } => Err(Error::LimitBlowup { t_stop }),
    }
}

/// Compares `Ψ^λ` against `Ũ` at every time both trajectories recorded.
pub fn compare_with_limit(original: &Trajectory, limit: &Trajectory, lambda: f64) -> Result<SweepResult> {
    let dim = original.final_state().grid().dim() as f64;
    let q = 8.0 / dim;
    let mut acc_value = MixedNormAccumulator::new(q, 4.0)?;
    let mut acc_grad = MixedNormAccumulator::new(q, 4.0)?;
    let mut acc_xw = MixedNormAccumulator::new(q, 4.0)?;
    let mut sup_sigma: f64 = 0.0;
    let mut sup = ComponentErrors::default();

    let mut j = 0;
    for (k, &t) in original.times.iter().enumerate() {
        while j < limit.times.len() && limit.times[j] < t - 1e-9 {
            j += 1;
        }
        if j == limit.times.len() {
            break;
        }
        if (limit.times[j] - t).abs() > 1e-9 {
            continue;
        }
        let profile = asymptotic_profile(&limit.snapshots[j], lambda, t);
        let diff = original.snapshots[k].sub(&profile);
        if !diff.is_finite() {
            break;
        }
        let grid = diff.grid();
        let norms = sigma_norm(&diff);
        sup_sigma = sup_sigma.max(norms.sigma);
        sup.value = sup.value.max(norms.l2);
        sup.grad = sup.grad.max(norms.grad_l2);
        sup.xw = sup.xw.max(norms.xweight_l2);

        let modulus: Vec<f64> = diff.density().into_iter().map(f64::sqrt).collect();
        let grad = gradient_modulus(&diff.gradients());
        let weighted: Vec<f64> = modulus
            .iter()
            .zip(grid.radius_sq())
            .map(|(m, r2)| m * r2.sqrt())
            .collect();
        acc_value.push(t, lr_norm_of_modulus(grid, &modulus, 4.0)?)?;
        acc_grad.push(t, lr_norm_of_modulus(grid, &grad, 4.0)?)?;
        acc_xw.push(t, lr_norm_of_modulus(grid, &weighted, 4.0)?)?;
    }
    let mixed = |acc: &MixedNormAccumulator| if acc.len() < 2 { Ok(f64::NAN) } else { mixed_norm(acc) };
    Ok(SweepResult {
        lambda,
        err_sup_sigma: sup_sigma,
        err_linf_l2: sup,
        err_q8n_l4: ComponentErrors {
            value: mixed(&acc_value)?,
            grad: mixed(&acc_grad)?,
            xw: mixed(&acc_xw)?,
        },
        status_original: original.status,
        status_limit: limit.status,
    })
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("lambda list is empty".into()));
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l == 0.0) {
        return Err(Error::InvalidArgument("lambdas must be finite and nonzero".into()));
    }
    if lambdas.windows(2).any(|w| w[1].abs() <= w[0].abs()) {
        return Err(Error::InvalidArgument(
            "lambdas must be strictly increasing in modulus".into(),
        ));
    }
    Ok(())
}

/// Runs the original system for every `λ` (in parallel) and measures the
/// distance to the asymptotic profile. Results are ordered like `lambdas`.
pub fn run_lambda_sweep(s: &Scenario, lambdas: &[f64]) -> Result<Vec<SweepResult>> {
    check_lambdas(lambdas)?;
    let psi0 = s.initial_field()?;
    let limit = run_limit_reference(s)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let traj = evolve(&psi0, &s.original_spec(lambda), &s.integrator)?;
            compare_with_limit(&traj, &limit, lambda)
        })
        .collect()
}

/// Least-squares slope of `log err_sup_sigma` against `log |λ|`, over completed
/// runs with positive error.
pub fn fit_rate(results: &[SweepResult]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = results
        .iter()
        .filter(|r| r.status_original.is_completed() && r.err_sup_sigma > 0.0 && r.err_sup_sigma.is_finite())
        .map(|r| (r.lambda.abs().ln(), r.err_sup_sigma.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 usable sweep points (got {})",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Σ-error at `t_end` of the original system for each `dt_base`, against the
/// exact solution when one is known and the finest run otherwise.
pub fn dt_self_convergence(s: &Scenario, dts: &[f64]) -> Result<Vec<(f64, f64)>> {
    if dts.is_empty() {
        return Ok(Vec::new());
    }
    if dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("dts must be strictly decreasing".into()));
    }
    let t_end = s.integrator.t_end;
    for &dt in dts {
        let k = t_end / dt;
        if dt.is_nan() || dt <= 0.0 || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} does not divide t_end = {t_end}"
            )));
        }
    }
    let psi0 = s.initial_field()?;
    let spec = s.original_spec(s.lambda);
    let finals: Vec<TwoComponentField> = dts
        .par_iter()
        .map(|&dt| {
            let cfg = IntegratorConfig {
                dt_base: dt,
                snapshot_stride: usize::MAX / 2,
                ..s.integrator
            };
            evolve(&psi0, &spec, &cfg).map(|t| t.final_state().clone())
        })
        .collect::<Result<_>>()?;
    let reference = if s.is_linear_ground_state() {
        linear_oracle(&psi0, s.lambda, s.gamma, t_end)
    } else {
        finals.last().expect("nonempty").clone()
    };
    Ok(dts
        .iter()
        .zip(&finals)
        .map(|(&dt, f)| (dt, sigma_norm(&f.sub(&reference)).sigma))
        .collect())
}

/// Grid and time parameters of the mixed focusing/defocusing scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixSetup {
    pub beta: f64,
    pub gamma: f64,
    pub points_per_dim: usize,
    pub half_width: f64,
    pub integrator: IntegratorConfig,
}

impl Default for AppendixSetup {
    fn default() -> Self {
        AppendixSetup {
            beta: 1.0,
            gamma: 1.0,
            points_per_dim: 256,
            half_width: 8.0,
            integrator: IntegratorConfig {
                dt_base: 5e-4,
                t_end: 1.0,
                snapshot_stride: 50,
                lambda_cfl: 0.1,
                blowup_threshold: 20.0,
            },
        }
    }
}

/// Default first-component mass: chosen by running the `λ = 0` case, which
/// collapses for masses of about 6 and above on the default grid.
pub const APPENDIX_MASS_SCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixReport {
    pub lambda: f64,
    pub mass_scale: f64,
    pub effective: EffectiveCoefficients,
    pub gwp: Verdict,
    pub blowup: Verdict,
    pub limit_gwp: Verdict,
    pub status: RunStatus,
    pub max_gradient_ratio: f64,
    pub t_end: f64,
    /// Distance to the (linear) limit profile, for `λ > 0`.
    pub sweep: Option<SweepResult>,
}

impl AppendixSetup {
    pub fn scenario(&self, lambda: f64, mass_scale: f64) -> Scenario {
        Scenario {
            dim: 2,
            points_per_dim: self.points_per_dim,
            half_width: self.half_width,
            coupling: CouplingMatrix::new(-self.beta, 0.0, self.beta),
            gamma: self.gamma,
            lambda,
            datum: Datum {
                first: GaussianSpec::centered(mass_scale.sqrt()),
                second: GaussianSpec::centered(0.0),
            },
            integrator: self.integrator,
        }
    }

    pub fn run(&self, lambda: f64, mass_scale: f64) -> Result<AppendixReport> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be >= 0 (got {lambda})")));
        }
        if !(mass_scale.is_finite() && mass_scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass_scale must be positive (got {mass_scale})"
            )));
        }
        let s = self.scenario(lambda, mass_scale);
        let psi0 = s.initial_field()?;
        let d = DataFunctionals::of(&psi0, s.coupling, s.gamma, lambda);
        let gwp = criteria::gwp_original(s.coupling, 2, lambda, s.gamma, &d, &GNConstants::default())?;
        let blowup = criteria::blowup_original(s.coupling, 2, lambda, s.gamma, &d)?;
        let traj = evolve(&psi0, &s.original_spec(lambda), &s.integrator)?;
        let sweep = if lambda > 0.0 {
            let limit = run_limit_reference(&s)?;
            Some(compare_with_limit(&traj, &limit, lambda)?)
        } else {
            None
        };
        Ok(AppendixReport {
            lambda,
            mass_scale,
            effective: effective_coefficients(s.coupling),
            gwp,
            blowup,
            limit_gwp: s.limit_advisory(),
            status: traj.status,
            max_gradient_ratio: traj.max_gradient_ratio(),
            t_end: s.integrator.t_end,
            sweep,
        })
    }
}

/// The mixed scenario on the default setup.
pub fn appendix_scenario(lambda: f64, mass_scale: f64) -> Result<AppendixReport> {
    AppendixSetup::default().run(lambda, mass_scale)
}
