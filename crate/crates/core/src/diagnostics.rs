//! Conserved and monitored functionals: masses, energies, the virial and its
//! first two derivatives, and the modified energy `E₁(t)` used for blow-up.

use crate::dynamics::{CouplingMatrix, EffectiveCoefficients, SystemSpec};
use crate::field::{current_from_gradients, TwoComponentField};
use crate::grid::{Grid, ScalarField};

/// One row of the per-step time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRecord {
    pub time: f64,
    pub mass: f64,
    pub mass1: f64,
    pub mass2: f64,
    pub energy: f64,
    pub grad_l2: f64,
    pub xweight_l2: f64,
    pub virial: f64,
    pub virial_rate: f64,
    /// `∫Re(ψ₁*ψ₂)`.
    pub coupling_overlap: f64,
    /// Only recorded for the original system.
    pub modified_energy: Option<f64>,
}

impl DiagnosticRecord {
    /// Placeholder row for a step that produced non-finite values.
    pub fn non_finite(time: f64) -> Self {
        DiagnosticRecord {
            time,
            mass: f64::NAN,
            mass1: f64::NAN,
            mass2: f64::NAN,
            energy: f64::NAN,
            grad_l2: f64::INFINITY,
            xweight_l2: f64::NAN,
            virial: f64::NAN,
            virial_rate: f64::NAN,
            coupling_overlap: f64::NAN,
            modified_energy: None,
        }
    }
}

/// The integrals every functional is assembled from.
#[derive(Debug, Clone, Copy, Default)]
struct Parts {
    mass1: f64,
    mass2: f64,
    grad_sq: f64,
    virial: f64,
    /// `∫x·J`
    x_dot_current: f64,
    overlap: f64,
    rho1_sq: f64,
    rho1_rho2: f64,
    rho2_sq: f64,
}

impl Parts {
    fn of(f: &TwoComponentField, with_current: bool) -> Parts {
        let g = f.grid();
        let (g1, g2) = f.gradients();
        let grad_sq = g1
            .iter()
            .chain(g2.iter())
            .map(|d| g.integrate_with(|p| d.values[p].norm_sqr()))
            .sum();
        let x_dot_current = if with_current {
            x_dot_current(g, f, &g1, &g2)
        } else {
            0.0
        };
        let r2 = g.radius_sq();
        let (a, b) = (&f.first.values, &f.second.values);
        Parts {
            mass1: g.integrate_with(|p| a[p].norm_sqr()),
            mass2: g.integrate_with(|p| b[p].norm_sqr()),
            grad_sq,
            virial: g.integrate_with(|p| r2[p] * (a[p].norm_sqr() + b[p].norm_sqr())),
            x_dot_current,
            overlap: g.integrate_with(|p| (a[p].conj() * b[p]).re),
            rho1_sq: g.integrate_with(|p| a[p].norm_sqr().powi(2)),
            rho1_rho2: g.integrate_with(|p| a[p].norm_sqr() * b[p].norm_sqr()),
            rho2_sq: g.integrate_with(|p| b[p].norm_sqr().powi(2)),
        }
    }

    fn mass(&self) -> f64 {
        self.mass1 + self.mass2
    }

    /// `∫Ψ*B̃[Ψ]Ψ`
    fn quartic(&self, c: CouplingMatrix) -> f64 {
        c.b11 * self.rho1_sq + 2.0 * c.b12 * self.rho1_rho2 + c.b22 * self.rho2_sq
    }

    fn quartic_limit(&self, e: EffectiveCoefficients) -> f64 {
        e.chi / 2.0 * (self.rho1_sq + self.rho2_sq) + e.chi_tilde * self.rho1_rho2
    }

    fn energy(&self, c: CouplingMatrix, gamma: f64, lambda: f64) -> f64 {
        0.5 * self.grad_sq + 0.5 * gamma * gamma * self.virial + 0.5 * self.quartic(c) + 2.0 * lambda * self.overlap
    }

    fn energy_limit(&self, e: EffectiveCoefficients, gamma: f64) -> f64 {
        0.5 * self.grad_sq + 0.5 * gamma * gamma * self.virial + self.quartic_limit(e)
    }

    fn modified_energy(&self, c: CouplingMatrix, gamma: f64, lambda: f64, t: f64) -> f64 {
        let (s, co) = (gamma * t).sin_cos();
        co * co * (0.5 * self.grad_sq + 0.5 * self.quartic(c) + 2.0 * lambda * self.overlap)
            + s * s * 0.5 * gamma * gamma * self.virial
            + 0.5 * gamma * (2.0 * gamma * t).sin() * self.x_dot_current
            + lambda.abs() * (2.0 * gamma * t).cos() / 2.0 * self.mass()
    }
}

fn x_dot_current(g: &Grid, f: &TwoComponentField, g1: &[ScalarField], g2: &[ScalarField]) -> f64 {
    current_from_gradients(f, g1, g2)
        .iter()
        .enumerate()
        .map(|(axis, j)| g.integrate_with(|p| g.coordinate(p, axis) * j.values[p]))
        .sum()
}

/// `E = ∫(½|∇Ψ|² + (γ²/2)|x|²|Ψ|² + ½Ψ*B̃[Ψ]Ψ + 2λRe(ψ₁*ψ₂))`.
pub fn energy_original(f: &TwoComponentField, c: CouplingMatrix, gamma: f64, lambda: f64) -> f64 {
    Parts::of(f, false).energy(c, gamma, lambda)
}

/// `Ê = ∫(½|∇U|² + (γ²/2)|x|²|U|² + (χ/2)(|u₁|⁴+|u₂|⁴) + χ̃|u₁|²|u₂|²)`.
pub fn energy_limit(u: &TwoComponentField, e: EffectiveCoefficients, gamma: f64) -> f64 {
    Parts::of(u, false).energy_limit(e, gamma)
}

/// `I = ∫|x|²|Ψ|²`.
pub fn virial(f: &TwoComponentField) -> f64 {
    let g = f.grid();
    let r2 = g.radius_sq();
    g.integrate_with(|p| r2[p] * f.density_at(p))
}

/// `I′ = 2∫x·J`.
pub fn virial_rate(f: &TwoComponentField) -> f64 {
    let (g1, g2) = f.gradients();
    2.0 * x_dot_current(f.grid(), f, &g1, &g2)
}

/// `I″ = ∫(2|∇Ψ|² + NΨ*B̃[Ψ]Ψ − 2γ²|x|²|Ψ|²)` with `N` the grid dimension.
pub fn virial_accel(f: &TwoComponentField, c: CouplingMatrix, gamma: f64) -> f64 {
    let parts = Parts::of(f, false);
    let n = f.grid().dim() as f64;
    2.0 * parts.grad_sq + n * parts.quartic(c) - 2.0 * gamma * gamma * parts.virial
}

/// `E₁(t) = cos²(γt)∫(½|∇Ψ|² + ½Ψ*B̃Ψ + 2λRe(ψ₁*ψ₂)) + sin²(γt)∫(γ²/2)|x|²|Ψ|²
///          + (γ/2)sin(2γt)∫x·J + |λ|(cos(2γt)/2)∫|Ψ|²`.
pub fn modified_energy(f: &TwoComponentField, c: CouplingMatrix, gamma: f64, lambda: f64, t: f64) -> f64 {
    Parts::of(f, true).modified_energy(c, gamma, lambda, t)
}

/// All functionals of `f` at time `t`.
pub fn record(f: &TwoComponentField, spec: &SystemSpec, t: f64) -> DiagnosticRecord {
    let parts = Parts::of(f, true);
    let (energy, modified) = match *spec {
        SystemSpec::Original {
            coupling,
            lambda,
            gamma,
        } => (
            parts.energy(coupling, gamma, lambda),
            Some(parts.modified_energy(coupling, gamma, lambda, t)),
        ),
        SystemSpec::Limit { coefficients, gamma } => (parts.energy_limit(coefficients, gamma), None),
    };
    DiagnosticRecord {
        time: t,
        mass: parts.mass(),
        mass1: parts.mass1,
        mass2: parts.mass2,
        energy,
        grad_l2: parts.grad_sq.sqrt(),
        xweight_l2: parts.virial.sqrt(),
        virial: parts.virial,
        virial_rate: 2.0 * parts.x_dot_current,
        coupling_overlap: parts.overlap,
        modified_energy: modified,
    }
}
