//! Second-order operator splitting for the Rabi-coupled system and for its
//! effective (averaged) limit.
//!
//! Every substep is an exact flow: the free kinetic flow in Fourier space, the
//! trap plus cubic phases (which commute pointwise), and the constant Rabi
//! rotation `e^{-iτA}`. All error is splitting error.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticRecord};
use crate::error::{Error, Result};
use crate::field::TwoComponentField;
use crate::grid::{apply_kinetic, Grid};

/// Self and cross scattering coefficients `(β₁₁, β₁₂, β₂₂)`; `β₂₁ = β₁₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
}

impl CouplingMatrix {
    pub fn new(b11: f64, b12: f64, b22: f64) -> Self {
        CouplingMatrix { b11, b12, b22 }
    }

    pub fn max_abs(&self) -> f64 {
        self.b11.abs().max(self.b12.abs()).max(self.b22.abs())
    }

    pub fn min(&self) -> f64 {
        self.b11.min(self.b12).min(self.b22)
    }

    /// `Ψ*B̃[Ψ]Ψ = β₁₁|ψ₁|⁴ + 2β₁₂|ψ₁|²|ψ₂|² + β₂₂|ψ₂|⁴` from the two densities.
    #[inline]
    pub fn quartic_form(&self, rho1: f64, rho2: f64) -> f64 {
        self.b11 * rho1 * rho1 + 2.0 * self.b12 * rho1 * rho2 + self.b22 * rho2 * rho2
    }
}

/// Coefficients of the averaged system: `χ` (self) and `χ̃` (cross).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoefficients {
    pub chi: f64,
    pub chi_tilde: f64,
}

/// `χ = (β₁₁ + 2β₁₂ + β₂₂)/4`, `χ̃ = (β₁₁ + β₂₂)/2`.
pub fn effective_coefficients(c: CouplingMatrix) -> EffectiveCoefficients {
    EffectiveCoefficients {
        chi: (c.b11 + 2.0 * c.b12 + c.b22) / 4.0,
        chi_tilde: (c.b11 + c.b22) / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Original,
    Limit,
}

/// Which equation a trajectory integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSpec {
    /// `i∂Ψ = -½ΔΨ + (γ²/2)|x|²Ψ + B̃[Ψ]Ψ + AΨ` with `A = [[0, λ], [λ, 0]]`.
    Original {
        coupling: CouplingMatrix,
        lambda: f64,
        gamma: f64,
    },
    /// `i∂U = -½ΔU + (γ²/2)|x|²U + B̂^∞[U]U`.
    Limit {
        coefficients: EffectiveCoefficients,
        gamma: f64,
    },
}

impl SystemSpec {
    pub fn original(coupling: CouplingMatrix, lambda: f64, gamma: f64) -> Self {
        SystemSpec::Original {
            coupling,
            lambda,
            gamma,
        }
    }

    /// The averaged system belonging to `coupling`.
    pub fn limit_of(coupling: CouplingMatrix, gamma: f64) -> Self {
        SystemSpec::Limit {
            coefficients: effective_coefficients(coupling),
            gamma,
        }
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            SystemSpec::Original { .. } => SystemKind::Original,
            SystemSpec::Limit { .. } => SystemKind::Limit,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            SystemSpec::Original { gamma, .. } | SystemSpec::Limit { gamma, .. } => gamma,
        }
    }

    /// Rabi frequency; zero for the limit system.
    pub fn lambda(&self) -> f64 {
        match *self {
            SystemSpec::Original { lambda, .. } => lambda,
            SystemSpec::Limit { .. } => 0.0,
        }
    }

    /// Phase coefficients `(own-density, other-density)` for component 1 and 2.
    fn phase_coefficients(&self) -> [(f64, f64); 2] {
        match *self {
            SystemSpec::Original { coupling: c, .. } => [(c.b11, c.b12), (c.b22, c.b12)],
            SystemSpec::Limit { coefficients: e, .. } => [(e.chi, e.chi_tilde), (e.chi, e.chi_tilde)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let gamma = self.gamma();
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "trap frequency gamma must be finite and nonnegative (got {gamma})"
            )));
        }
        if !self.lambda().is_finite() {
            return Err(Error::InvalidArgument("lambda must be finite".into()));
        }
        Ok(())
    }
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt_base: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub lambda_cfl: f64,
    pub blowup_threshold: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt_base: 1e-3,
            t_end: 1.0,
            snapshot_stride: 10,
            lambda_cfl: 0.1,
            blowup_threshold: 20.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite (got {v})"
                )))
            }
        };
        positive("dt_base", self.dt_base)?;
        positive("t_end", self.t_end)?;
        positive("lambda_cfl", self.lambda_cfl)?;
        positive("blowup_threshold", self.blowup_threshold)?;
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidArgument("snapshot_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Substeps per base step: the Original system resolves the Rabi
    /// oscillation with `Δt ≤ min(dt_base, c_λ / max(1, |λ|))`, and the base
    /// step is split evenly so every run lands on multiples of `dt_base`.
    pub fn substeps(&self, spec: &SystemSpec) -> usize {
        match spec {
            SystemSpec::Limit { .. } => 1,
            SystemSpec::Original { lambda, .. } => {
                let target = self.dt_base.min(self.lambda_cfl / lambda.abs().max(1.0));
                ((self.dt_base / target) * (1.0 - 1e-12)).ceil().max(1.0) as usize
            }
        }
    }

    /// Step actually used for `spec`.
    pub fn step_size(&self, spec: &SystemSpec) -> f64 {
        self.dt_base / self.substeps(spec) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    BlowupDetected { t_stop: f64, non_finite: bool },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowupDetected { non_finite: true, .. } => "blowup_nonfinite",
            RunStatus::BlowupDetected { .. } => "blowup",
        }
    }
}

/// Output of `evolve`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: SystemSpec,
    pub times: Vec<f64>,
    pub snapshots: Vec<TwoComponentField>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub status: RunStatus,
    /// Step size of the regular steps.
    pub dt: f64,
    /// Length of the shortened final step, when one was needed.
    pub final_step: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &TwoComponentField {
        self.snapshots.last().expect("trajectory has at least one snapshot")
    }

    pub fn max_gradient_ratio(&self) -> f64 {
        let g0 = self.diagnostics.first().map_or(0.0, |d| d.grad_l2);
        if g0 == 0.0 {
            return 1.0;
        }
        self.diagnostics.iter().map(|d| d.grad_l2 / g0).fold(1.0, f64::max)
    }
}

/// Exact flow of `i∂ψ_j = (c_self|ψ_j|² + c_cross|ψ_k|²)ψ_j` for time `tau`.
pub fn nonlinear_phase_step(f: &TwoComponentField, spec: &SystemSpec, tau: f64) -> TwoComponentField {
    let mut out = f.clone();
    apply_phases(&mut out, spec, tau, None);
    out
}

/// Pointwise `Ω_λ(τ) = e^{-iτA}`.
pub fn rabi_step(f: &TwoComponentField, lambda: f64, tau: f64) -> TwoComponentField {
    let mut out = f.clone();
    apply_rabi(&mut out, lambda, tau);
    out
}

/// Multiplies both components by `e^{-i(γ²/2)|x|²τ}`.
pub fn potential_phase_step(f: &TwoComponentField, gamma: f64, tau: f64) -> TwoComponentField {
    let r2 = f.grid().radius_sq();
    let mut out = f.clone();
    for (p, (a, b)) in out
        .first
        .values
        .iter_mut()
        .zip(out.second.values.iter_mut())
        .enumerate()
    {
        let ph = Complex64::from_polar(1.0, -0.5 * gamma * gamma * r2[p] * tau);
        *a *= ph;
        *b *= ph;
    }
    out
}

fn apply_rabi(f: &mut TwoComponentField, lambda: f64, tau: f64) {
    let (s, c) = (lambda * tau).sin_cos();
    let mis = Complex64::new(0.0, -s);
    for (a, b) in f.first.values.iter_mut().zip(f.second.values.iter_mut()) {
        let (p1, p2) = (*a, *b);
        *a = c * p1 + mis * p2;
        *b = mis * p1 + c * p2;
    }
}

fn apply_phases(f: &mut TwoComponentField, spec: &SystemSpec, tau: f64, trap: Option<&[Complex64]>) {
    let [(s1, x1), (s2, x2)] = spec.phase_coefficients();
    for (p, (a, b)) in f.first.values.iter_mut().zip(f.second.values.iter_mut()).enumerate() {
        let (r1, r2) = (a.norm_sqr(), b.norm_sqr());
        let mut pa = Complex64::from_polar(1.0, -(s1 * r1 + x1 * r2) * tau);
        let mut pb = Complex64::from_polar(1.0, -(s2 * r2 + x2 * r1) * tau);
        if let Some(t) = trap {
            pa *= t[p];
            pb *= t[p];
        }
        *a *= pa;
        *b *= pb;
    }
}

/// One Strang step: `K(Δt/2) ∘ P(Δt/2) ∘ R(Δt) ∘ P(Δt/2) ∘ K(Δt/2)`, with `P`
/// the fused trap and cubic phase and `R` the Rabi rotation (absent for the
/// limit system). Negative `dt` runs the step backwards.
pub fn strang_step(f: &TwoComponentField, spec: &SystemSpec, dt: f64) -> TwoComponentField {
    let stepper = Stepper::new(f.grid(), *spec, dt);
    let mut out = f.clone();
    stepper.step(&mut out);
    out
}

/// Strang stepper with the kinetic and trap multipliers cached for one `dt`.
struct Stepper {
    spec: SystemSpec,
    dt: f64,
    kinetic_half: Vec<Complex64>,
    trap_half: Vec<Complex64>,
}

impl Stepper {
    fn new(grid: &Arc<Grid>, spec: SystemSpec, dt: f64) -> Self {
        let gamma = spec.gamma();
        let kinetic_half = grid
            .wavenumber_sq()
            .iter()
            .map(|&k2| Complex64::from_polar(1.0, -0.25 * k2 * dt))
            .collect();
        let trap_half = grid
            .radius_sq()
            .iter()
            .map(|&r2| Complex64::from_polar(1.0, -0.25 * gamma * gamma * r2 * dt))
            .collect();
        Stepper {
            spec,
            dt,
            kinetic_half,
            trap_half,
        }
    }

    fn kinetic(&self, f: &mut TwoComponentField) {
        let grid = Arc::clone(f.grid());
        for comp in [&mut f.first, &mut f.second] {
            grid.forward_inplace(&mut comp.values);
            for (v, m) in comp.values.iter_mut().zip(&self.kinetic_half) {
                *v *= m;
            }
            grid.inverse_inplace(&mut comp.values);
        }
    }

    fn step(&self, f: &mut TwoComponentField) {
        let half = 0.5 * self.dt;
        self.kinetic(f);
        apply_phases(f, &self.spec, half, Some(&self.trap_half));
        if let SystemSpec::Original { lambda, .. } = self.spec {
            apply_rabi(f, lambda, self.dt);
        }
        apply_phases(f, &self.spec, half, Some(&self.trap_half));
        self.kinetic(f);
    }
}

/// Kinetic flow of both components, exposed for tests and oracles.
pub fn kinetic_step(f: &TwoComponentField, tau: f64) -> TwoComponentField {
    TwoComponentField {
        first: apply_kinetic(&f.first, tau),
        second: apply_kinetic(&f.second, tau),
    }
}

/// Integrates `spec` from `f0` to `cfg.t_end`.
///
/// Diagnostics are recorded after every step. The run stops with
/// `BlowupDetected` when `‖∇Ψ‖ ≥ blowup_threshold · ‖∇Ψ₀‖` or when the state
/// turns non-finite. Snapshots are kept at `t = 0`, every
/// `snapshot_stride · dt_base`, and at the final time.
pub fn evolve(f0: &TwoComponentField, spec: &SystemSpec, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    spec.validate()?;
    let grid = Arc::clone(f0.grid());
    let substeps = cfg.substeps(spec);
    let dt = cfg.dt_base / substeps as f64;
    let snapshot_every = cfg.snapshot_stride.saturating_mul(substeps);

    let ratio = cfg.t_end / dt;
    let mut full_steps = ratio.floor() as usize;
    if ratio - full_steps as f64 > 1.0 - 1e-9 {
        full_steps += 1;
    }
    let remainder = cfg.t_end - full_steps as f64 * dt;
    let final_step = (remainder > 1e-9 * dt).then_some(remainder);

    let regular = Stepper::new(&grid, *spec, dt);
    let mut state = f0.clone();
    let first = diagnostics::record(&state, spec, 0.0);
    let grad0 = first.grad_l2;
    let mut traj = Trajectory {
        spec: *spec,
        times: vec![0.0],
        snapshots: vec![state.clone()],
        diagnostics: vec![first],
        status: RunStatus::Completed,
        dt,
        final_step,
    };

    let total = full_steps + usize::from(final_step.is_some());
    for k in 1..=total {
        let t = if k <= full_steps {
            regular.step(&mut state);
            if k == full_steps && final_step.is_none() {
                cfg.t_end
            } else {
                k as f64 * dt
            }
        } else {
            let rem = final_step.unwrap_or(0.0);
            Stepper::new(&grid, *spec, rem).step(&mut state);
            cfg.t_end
        };

        if !state.is_finite() {
            traj.diagnostics.push(DiagnosticRecord::non_finite(t));
            traj.times.push(t);
            traj.snapshots.push(state);
            traj.status = RunStatus::BlowupDetected {
                t_stop: t,
                non_finite: true,
            };
            return Ok(traj);
        }
        let rec = diagnostics::record(&state, spec, t);
        let blown = grad0 > 0.0 && rec.grad_l2 >= cfg.blowup_threshold * grad0;
        traj.diagnostics.push(rec);
        if blown || k % snapshot_every == 0 || k == total {
            traj.times.push(t);
            traj.snapshots.push(state.clone());
        }
        if blown {
            traj.status = RunStatus::BlowupDetected {
                t_stop: t,
                non_finite: false,
            };
            return Ok(traj);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sigma_norm;
    use crate::grid::{make_grid, ScalarField};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_field(grid: &Arc<Grid>) -> TwoComponentField {
        TwoComponentField::new(
            ScalarField::from_fn(grid, |x| Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), 0.4 * x[0])),
            ScalarField::from_fn(grid, |x| {
                c(0.5 * (-(x[0] - 1.0).powi(2) / 2.0).exp(), 0.2 * (-x[0] * x[0]).exp())
            }),
        )
        .unwrap()
    }

    fn max_diff(a: &TwoComponentField, b: &TwoComponentField) -> f64 {
        a.first
            .values
            .iter()
            .zip(&b.first.values)
            .chain(a.second.values.iter().zip(&b.second.values))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn effective_coefficient_rows() {
        let e = effective_coefficients(CouplingMatrix::new(1.0, 2.0, 3.0));
        assert_eq!((e.chi, e.chi_tilde), (2.0, 2.0));
        for beta in [0.5, 1.0, 7.0] {
            let e = effective_coefficients(CouplingMatrix::new(-beta, 0.0, beta));
            assert_eq!((e.chi, e.chi_tilde), (0.0, 0.0));
            let e = effective_coefficients(CouplingMatrix::new(beta, beta, beta));
            assert_eq!((e.chi, e.chi_tilde), (beta, beta));
        }
    }

    #[test]
    fn nonlinear_phase_rows() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let spec = SystemSpec::original(CouplingMatrix::new(1.3, -0.4, 2.0), 3.0, 1.0);
        let f = sample_field(&g);
        assert!(max_diff(&nonlinear_phase_step(&f, &spec, 0.0), &f) == 0.0);
        let out = nonlinear_phase_step(&f, &spec, 0.77);
        for (a, b) in out.first.values.iter().zip(&f.first.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }

        let a = c(0.8, -0.3);
        let cst = TwoComponentField::new(ScalarField::from_fn(&g, |_| a), ScalarField::zeros(&g)).unwrap();
        let tau = 0.5;
        let out = nonlinear_phase_step(&cst, &spec, tau);
        let expected = a * Complex64::from_polar(1.0, -1.3 * a.norm_sqr() * tau);
        assert!(out.first.values.iter().all(|v| (v - expected).norm() < 1e-15));
        assert!(out.second.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn rabi_rows() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let f = sample_field(&g);
        assert!(max_diff(&rabi_step(&f, 2.0, 0.0), &f) == 0.0);
        let lambda = 3.0;
        let out = rabi_step(&f, lambda, FRAC_PI_2 / lambda);
        let minus_i = c(0.0, -1.0);
        for p in 0..g.len() {
            assert!((out.first.values[p] - minus_i * f.second.values[p]).norm() < 1e-15);
            assert!((out.second.values[p] - minus_i * f.first.values[p]).norm() < 1e-15);
        }
        let m0 = f.mass();
        let m1 = rabi_step(&f, 17.0, 0.123).mass();
        assert!(((m1 - m0) / m0).abs() < 1e-14);
    }

    #[test]
    fn rabi_group_property() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let f = sample_field(&g);
        let two = rabi_step(&rabi_step(&f, 4.0, 0.3), 4.0, 0.45);
        let one = rabi_step(&f, 4.0, 0.75);
        assert!(max_diff(&two, &one) < 1e-14);
    }

    #[test]
    fn potential_rows() {
        let g = make_grid(2, 16, 4.0).unwrap();
        let f = TwoComponentField::new(
            ScalarField::from_fn(&g, |x| c((-x[0] * x[0] - x[1] * x[1]).exp(), 0.1)),
            ScalarField::from_fn(&g, |x| c(0.0, (-x[1] * x[1]).exp())),
        )
        .unwrap();
        assert!(max_diff(&potential_phase_step(&f, 1.0, 0.0), &f) == 0.0);
        let out = potential_phase_step(&f, 1.5, 0.4);
        let o = g.origin_index();
        assert_eq!(out.first.values[o], f.first.values[o]);
        assert_eq!(out.second.values[o], f.second.values[o]);
        assert!(((out.mass() - f.mass()) / f.mass()).abs() < 1e-14);
    }

    #[test]
    fn free_step_equals_kinetic_flow() {
        let g = make_grid(1, 64, 6.0).unwrap();
        let f = sample_field(&g);
        let spec = SystemSpec::original(CouplingMatrix::new(0.0, 0.0, 0.0), 0.0, 0.0);
        let dt = 0.01;
        let out = strang_step(&f, &spec, dt);
        assert!(max_diff(&out, &kinetic_step(&f, dt)) < 1e-14);
    }

    #[test]
    fn strang_step_conserves_mass() {
        let g = make_grid(1, 128, 8.0).unwrap();
        let f = sample_field(&g);
        let spec = SystemSpec::original(CouplingMatrix::new(1.0, 0.5, 2.0), 7.0, 1.0);
        let m0 = f.mass();
        let m1 = strang_step(&f, &spec, 0.01).mass();
        assert!(((m1 - m0) / m0).abs() <= 1e-13);
    }

    #[test]
    fn strang_step_is_reversible() {
        let g = make_grid(1, 128, 8.0).unwrap();
        let f = sample_field(&g);
        for spec in [
            SystemSpec::original(CouplingMatrix::new(1.0, 0.5, 2.0), 7.0, 1.0),
            SystemSpec::limit_of(CouplingMatrix::new(1.0, 0.5, 2.0), 1.0),
        ] {
            let back = strang_step(&strang_step(&f, &spec, 0.02), &spec, -0.02);
            let err = sigma_norm(&back.sub(&f)).l2 / sigma_norm(&f).l2;
            assert!(err <= 1e-11, "{err}");
        }
    }

    #[test]
    fn strang_step_second_order_against_linear_oracle() {
        // both components in the trap ground state with β = 0: the exact
        // solution is e^{-iλt} e^{-iγt/2} Ψ₀
        let g = make_grid(1, 128, 8.0).unwrap();
        let gamma = 1.0;
        let ground = ScalarField::from_fn(&g, |x| {
            c((gamma / PI).powf(0.25) * (-gamma * x[0] * x[0] / 2.0).exp(), 0.0)
        });
        let f0 = TwoComponentField::new(ground.clone(), ground).unwrap();
        let spec = SystemSpec::original(CouplingMatrix::new(0.0, 0.0, 0.0), 2.0, gamma);
        let t_end = 0.5;
        let err_at = |dt: f64| {
            let steps = (t_end / dt).round() as usize;
            let mut f = f0.clone();
            for _ in 0..steps {
                f = strang_step(&f, &spec, dt);
            }
            let exact = f0.scale(Complex64::from_polar(1.0, -(2.0 + gamma / 2.0) * t_end));
            sigma_norm(&f.sub(&exact)).sigma
        };
        let ratio = err_at(0.02) / err_at(0.01);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn step_rule() {
        let spec = SystemSpec::original(CouplingMatrix::new(1.0, 0.5, 2.0), 160.0, 1.0);
        let cfg = IntegratorConfig::default();
        assert_eq!(cfg.substeps(&spec), 2);
        assert!((cfg.step_size(&spec) - 5e-4).abs() < 1e-18);
        let spec = SystemSpec::original(CouplingMatrix::new(1.0, 0.5, 2.0), 30.0, 1.0);
        assert_eq!(cfg.substeps(&spec), 1);
        let limit = SystemSpec::limit_of(CouplingMatrix::new(1.0, 0.5, 2.0), 1.0);
        assert_eq!(cfg.substeps(&limit), 1);
    }

    #[test]
    fn evolve_zero_datum() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let spec = SystemSpec::original(CouplingMatrix::new(-3.0, 1.0, 2.0), 5.0, 1.0);
        let cfg = IntegratorConfig {
            t_end: 0.05,
            snapshot_stride: 5,
            ..Default::default()
        };
        let traj = evolve(&TwoComponentField::zeros(&g), &spec, &cfg).unwrap();
        assert!(traj.status.is_completed());
        assert!(traj
            .snapshots
            .iter()
            .all(|s| s.first.values.iter().chain(&s.second.values).all(|v| v.norm() == 0.0)));
        assert_eq!(traj.times.len(), 11);
    }

    #[test]
    fn evolve_shortened_final_step() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let spec = SystemSpec::limit_of(CouplingMatrix::new(1.0, 0.0, 1.0), 1.0);
        let cfg = IntegratorConfig {
            dt_base: 0.01,
            t_end: 0.105,
            snapshot_stride: 4,
            ..Default::default()
        };
        let traj = evolve(&sample_field(&g), &spec, &cfg).unwrap();
        let rem = traj.final_step.expect("shortened final step");
        assert!((rem - 0.005).abs() < 1e-12);
        assert_eq!(*traj.times.last().unwrap(), 0.105);
        assert_eq!(traj.diagnostics.len(), 12);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn evolve_times_land_on_base_grid_for_any_lambda() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let cfg = IntegratorConfig {
            dt_base: 0.01,
            t_end: 0.2,
            snapshot_stride: 5,
            ..Default::default()
        };
        let f = sample_field(&g);
        let a = evolve(
            &f,
            &SystemSpec::original(CouplingMatrix::new(1.0, 0.0, 1.0), 37.0, 1.0),
            &cfg,
        )
        .unwrap();
        let b = evolve(&f, &SystemSpec::limit_of(CouplingMatrix::new(1.0, 0.0, 1.0), 1.0), &cfg).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        for (x, y) in a.times.iter().zip(&b.times) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_rejects_bad_config() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let spec = SystemSpec::limit_of(CouplingMatrix::new(1.0, 0.0, 1.0), 1.0);
        for cfg in [
            IntegratorConfig {
                dt_base: 0.0,
                ..Default::default()
            },
            IntegratorConfig {
                t_end: -1.0,
                ..Default::default()
            },
            IntegratorConfig {
                snapshot_stride: 0,
                ..Default::default()
            },
            IntegratorConfig {
                lambda_cfl: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(evolve(&sample_field(&g), &spec, &cfg).is_err());
        }
    }
}
