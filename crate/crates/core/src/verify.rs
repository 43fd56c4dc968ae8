//! Quick built-in invariant checks, run by `rabinls verify`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{evolve, CouplingMatrix, IntegratorConfig};
use crate::error::Result;
use crate::experiments::{linear_oracle, Datum, GaussianSpec, Scenario};
use crate::field::{sigma_norm, TwoComponentField};
use crate::grid::{make_grid, ScalarField};
use crate::transforms::{
    asymptotic_profile, b_infty_apply, b_tilde_apply, from_transformed, hadamard_mix, r_lambda_apply, to_transformed,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        CheckOutcome {
            name,
            value,
            limit,
            passed: value <= limit,
        }
    }
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

/// Deterministic rough field with moduli in `[0, 1)` and scrambled phases.
fn scrambled(n: usize, seed: f64) -> Result<TwoComponentField> {
    let g = make_grid(1, n, 4.0)?;
    let val = |x: f64, s: f64| {
        let r = ((x * 7.1 + s).sin() * 43758.5453).fract().abs();
        let th = ((x * 3.3 + 2.0 * s).cos() * 12345.678).fract() * 2.0 * PI;
        Complex64::from_polar(r, th)
    };
    TwoComponentField::new(
        ScalarField::from_fn(&g, |x| val(x[0], seed)),
        ScalarField::from_fn(&g, |x| val(x[0], seed + 1.7)),
    )
}

pub fn run_verification() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    // β = 0 with both components in the trap ground state: exact solution known
    let oracle = Scenario {
        dim: 1,
        points_per_dim: 128,
        half_width: 8.0,
        coupling: CouplingMatrix::new(0.0, 0.0, 0.0),
        gamma: 1.0,
        lambda: 2.0,
        datum: Datum {
            first: GaussianSpec::centered(1.0),
            second: GaussianSpec::centered(1.0),
        },
        integrator: IntegratorConfig {
            t_end: 0.5,
            ..IntegratorConfig::default()
        },
    };
    let psi0 = oracle.initial_field()?;
    let traj = evolve(&psi0, &oracle.original_spec(2.0), &oracle.integrator)?;
    let exact = linear_oracle(&psi0, 2.0, 1.0, 0.5);
    out.push(CheckOutcome::at_most(
        "linear oracle sigma error",
        sigma_norm(&traj.final_state().sub(&exact)).sigma,
        1e-6,
    ));

    let mut s = Scenario::standard_cubic();
    s.points_per_dim = 128;
    s.integrator.t_end = 0.5;
    let psi0 = s.initial_field()?;
    let traj = evolve(&psi0, &s.original_spec(10.0), &s.integrator)?;
    let d = &traj.diagnostics;
    let m0 = d[0].mass;
    let mass_drift = d.iter().map(|r| ((r.mass - m0) / m0).abs()).fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("mass conservation (relative)", mass_drift, 1e-11));
    let e0 = d[0].energy;
    let energy_drift = d.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("energy drift", energy_drift, 1e-3));

    // central differences of I against I' along the run
    let dt = traj.dt;
    let virial_err = d
        .windows(3)
        .map(|w| ((w[2].virial - w[0].virial) / (2.0 * dt) - w[1].virial_rate).abs())
        .fold(0.0, f64::max);
    out.push(CheckOutcome::at_most("virial rate consistency", virial_err, 1e-3));

    let limit = evolve(&hadamard_mix(&psi0), &s.limit_spec(), &s.integrator)?;
    let ld = &limit.diagnostics;
    let comp_drift = ld
        .iter()
        .map(|r| {
            ((r.mass1 - ld[0].mass1) / ld[0].mass1)
                .abs()
                .max(((r.mass2 - ld[0].mass2) / ld[0].mass2).abs())
        })
        .fold(0.0, f64::max);
    out.push(CheckOutcome::at_most(
        "limit component masses (relative)",
        comp_drift,
        1e-11,
    ));

    let (mut round_trip, mut conjugation, mut profile): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let c = CouplingMatrix::new(1.3, -0.6, 2.1);
    for k in 0..8 {
        let phi = scrambled(64, k as f64)?;
        let (lambda, t) = (3.0 + 5.0 * k as f64, 0.1 + 0.37 * k as f64);
        round_trip = round_trip.max(max_diff(
            &from_transformed(&to_transformed(&phi, lambda, t), lambda, t),
            &phi,
        ));
        let psi = from_transformed(&phi, lambda, t);
        let lhs = to_transformed(&b_tilde_apply(&psi, c), lambda, t);
        let rhs = b_infty_apply(&phi, c).sub(&r_lambda_apply(&phi, c, lambda, t).scale(Complex64::new(-1.0, 0.0)));
        conjugation = conjugation.max(max_diff(&lhs, &rhs));
        // Ũ = Ω_λ(t)VU
        profile = profile.max(max_diff(
            &asymptotic_profile(&phi, lambda, t),
            &from_transformed(&phi, lambda, t),
        ));
    }
    out.push(CheckOutcome::at_most("transform round trip", round_trip, 1e-12));
    out.push(CheckOutcome::at_most("conjugation identity", conjugation, 1e-12));
    out.push(CheckOutcome::at_most("asymptotic profile identity", profile, 1e-12));
    Ok(out)
}
