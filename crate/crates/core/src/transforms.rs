//! The change of variables that removes the Rabi term, `Φ = VΩ_λ(-t)Ψ`, the
//! asymptotic profile built from the limit solution, the two parts of the
//! transformed nonlinearity, and a residual checker for trajectories.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::dynamics::{
    effective_coefficients, rabi_step, CouplingMatrix, EffectiveCoefficients, SystemSpec, Trajectory,
};
use crate::error::{Error, Result};
use crate::field::TwoComponentField;
use crate::grid::ScalarField;

/// A constant 2×2 matrix acting pointwise on two-component fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoUnitary {
    pub entries: [[Complex64; 2]; 2],
}

impl TwoByTwoUnitary {
    /// `V = (1/√2)[[1, 1], [1, -1]]`.
    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        TwoByTwoUnitary {
            entries: [[h, h], [h, -h]],
        }
    }

    /// `Ω_λ(t) = e^{-itA}`.
    pub fn rabi(lambda: f64, t: f64) -> Self {
        let (s, c) = (lambda * t).sin_cos();
        let c = Complex64::new(c, 0.0);
        let mis = Complex64::new(0.0, -s);
        TwoByTwoUnitary {
            entries: [[c, mis], [mis, c]],
        }
    }

    pub fn mul(&self, other: &TwoByTwoUnitary) -> TwoByTwoUnitary {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TwoByTwoUnitary { entries: out }
    }

    pub fn adjoint(&self) -> TwoByTwoUnitary {
        let e = &self.entries;
        TwoByTwoUnitary {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
        }
    }

    /// Largest entrywise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mul(&self.adjoint()).entries;
        let one = Complex64::new(1.0, 0.0);
        [
            (p[0][0] - one).norm(),
            p[0][1].norm(),
            p[1][0].norm(),
            (p[1][1] - one).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn apply(&self, f: &TwoComponentField) -> TwoComponentField {
        f.mix(self.entries)
    }
}

/// `((ψ₁+ψ₂)/√2, (ψ₁-ψ₂)/√2)`.
pub fn hadamard_mix(f: &TwoComponentField) -> TwoComponentField {
    TwoByTwoUnitary::hadamard().apply(f)
}

/// `Φ(t) = VΩ_λ(-t)Ψ(t)`.
pub fn to_transformed(psi: &TwoComponentField, lambda: f64, t: f64) -> TwoComponentField {
    hadamard_mix(&rabi_step(psi, lambda, -t))
}

/// `Ψ(t) = Ω_λ(t)VΦ(t)`.
pub fn from_transformed(phi: &TwoComponentField, lambda: f64, t: f64) -> TwoComponentField {
    rabi_step(&hadamard_mix(phi), lambda, t)
}

/// `Ũ = ((e^{-iλt}u₁ + e^{iλt}u₂)/√2, (e^{-iλt}u₁ - e^{iλt}u₂)/√2)`.
pub fn asymptotic_profile(u: &TwoComponentField, lambda: f64, t: f64) -> TwoComponentField {
    let m = Complex64::from_polar(FRAC_1_SQRT_2, -lambda * t);
    let p = Complex64::from_polar(FRAC_1_SQRT_2, lambda * t);
    u.mix([[m, p], [m, -p]])
}

/// `B̂^∞[Φ]Φ`, row `j` being `(χ|φ_j|² + χ̃|φ_k|²)φ_j`.
pub fn b_infty_apply(phi: &TwoComponentField, c: CouplingMatrix) -> TwoComponentField {
    effective_apply(phi, effective_coefficients(c))
}

fn effective_apply(phi: &TwoComponentField, e: EffectiveCoefficients) -> TwoComponentField {
    let grid = phi.grid();
    let mut a = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for (p1, p2) in phi.first.values.iter().zip(&phi.second.values) {
        let (r1, r2) = (p1.norm_sqr(), p2.norm_sqr());
        a.push((e.chi * r1 + e.chi_tilde * r2) * p1);
        b.push((e.chi * r2 + e.chi_tilde * r1) * p2);
    }
    pair(phi, a, b)
}

/// `R^λ[Φ]Φ` at time `t`: the part of the transformed nonlinearity that
/// oscillates with `e^{±2iλt}` and `e^{±4iλt}`.
pub fn r_lambda_apply(phi: &TwoComponentField, c: CouplingMatrix, lambda: f64, t: f64) -> TwoComponentField {
    let a = (c.b11 - c.b22) / 4.0;
    let q = (c.b11 - 2.0 * c.b12 + c.b22) / 4.0;
    let e2 = Complex64::from_polar(1.0, 2.0 * lambda * t);
    let e4 = Complex64::from_polar(1.0, 4.0 * lambda * t);
    let grid = phi.grid();
    let mut out1 = Vec::with_capacity(grid.len());
    let mut out2 = Vec::with_capacity(grid.len());
    for (&p1, &p2) in phi.first.values.iter().zip(&phi.second.values) {
        let cross = p1 * p2.conj();
        let d = e2.conj() * cross + e2 * cross.conj();
        let m = p1.norm_sqr() + p2.norm_sqr();
        let r11 = a * d;
        let r12 = a * e2 * m + q * e4 * cross.conj();
        let r21 = a * e2.conj() * m + q * e4.conj() * cross;
        out1.push(r11 * p1 + r12 * p2);
        out2.push(r21 * p1 + r11 * p2);
    }
    pair(phi, out1, out2)
}

fn pair(like: &TwoComponentField, a: Vec<Complex64>, b: Vec<Complex64>) -> TwoComponentField {
    let grid = like.grid();
    TwoComponentField {
        first: ScalarField {
            grid: grid.clone(),
            values: a,
        },
        second: ScalarField {
            grid: grid.clone(),
            values: b,
        },
    }
}

/// `B̃[Ψ]Ψ` for the original system.
pub fn b_tilde_apply(psi: &TwoComponentField, c: CouplingMatrix) -> TwoComponentField {
    let mut a = Vec::with_capacity(psi.grid().len());
    let mut b = Vec::with_capacity(psi.grid().len());
    for (p1, p2) in psi.first.values.iter().zip(&psi.second.values) {
        let (r1, r2) = (p1.norm_sqr(), p2.norm_sqr());
        a.push((c.b11 * r1 + c.b12 * r2) * p1);
        b.push((c.b22 * r2 + c.b12 * r1) * p2);
    }
    pair(psi, a, b)
}

/// `-½ΔF + (γ²/2)|x|²F`, componentwise.
pub fn linear_hamiltonian(f: &TwoComponentField, gamma: f64) -> TwoComponentField {
    let grid = f.grid();
    let v = 0.5 * gamma * gamma;
    let apply = |s: &ScalarField| {
        let mut hat = grid.forward(&s.values);
        for (h, k2) in hat.iter_mut().zip(grid.wavenumber_sq()) {
            *h *= 0.5 * k2;
        }
        let mut out = grid.inverse(&hat);
        for ((o, x), r2) in out.iter_mut().zip(&s.values).zip(grid.radius_sq()) {
            *o += v * r2 * x;
        }
        out
    };
    pair(f, apply(&f.first), apply(&f.second))
}

/// Which equation `pde_residual` tests a trajectory against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualSystem {
    Original,
    Transformed,
    Limit,
}

/// For each interior snapshot, the L² norm of `i·∂ₜF − RHS(F)`, with the time
/// derivative a central difference over neighbouring snapshots.
///
/// `Original` and `Transformed` need a trajectory of the original system;
/// `Transformed` maps each snapshot through `to_transformed` first. `Limit`
/// accepts either kind and uses the matching effective coefficients.
pub fn pde_residual(traj: &Trajectory, system: ResidualSystem, lambda: f64) -> Result<Vec<(f64, f64)>> {
    let n = traj.snapshots.len();
    if n < 3 || traj.times.len() != n {
        return Err(Error::InsufficientData(format!(
            "residual needs at least 3 aligned snapshots (got {n})"
        )));
    }
    let h = traj.times[1] - traj.times[0];
    for w in traj.times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(Error::InvalidArgument(
                "residual requires uniformly spaced snapshots".into(),
            ));
        }
    }
    let gamma = traj.spec.gamma();
    let coupling = match traj.spec {
        SystemSpec::Original { coupling, .. } => Some(coupling),
        SystemSpec::Limit { .. } => None,
    };
    let effective = match traj.spec {
        SystemSpec::Original { coupling, .. } => effective_coefficients(coupling),
        SystemSpec::Limit { coefficients, .. } => coefficients,
    };
    if system != ResidualSystem::Limit && coupling.is_none() {
        return Err(Error::InvalidArgument(
            "original and transformed residuals need an original-system trajectory".into(),
        ));
    }

    let state = |k: usize| -> TwoComponentField {
        match system {
            ResidualSystem::Transformed => to_transformed(&traj.snapshots[k], lambda, traj.times[k]),
            _ => traj.snapshots[k].clone(),
        }
    };
    let i_over_2h = Complex64::new(0.0, 1.0 / (2.0 * h));
    let mut out = Vec::with_capacity(n - 2);
    let mut prev = state(0);
    let mut cur = state(1);
    for k in 1..n - 1 {
        let next = state(k + 1);
        let t = traj.times[k];
        let lin = linear_hamiltonian(&cur, gamma);
        let nl = match system {
            ResidualSystem::Original => {
                let c = coupling.expect("checked above");
                let b = b_tilde_apply(&cur, c);
                let lam = Complex64::new(lambda, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                let coupling_term = cur.mix([[zero, lam], [lam, zero]]);
                add(&b, &coupling_term)
            }
            ResidualSystem::Transformed => {
                let c = coupling.expect("checked above");
                add(&b_infty_apply(&cur, c), &r_lambda_apply(&cur, c, lambda, t))
            }
            ResidualSystem::Limit => effective_apply(&cur, effective),
        };
        let rhs = add(&lin, &nl);
        let dt = next.sub(&prev).scale(i_over_2h);
        out.push((t, dt.sub(&rhs).mass().sqrt()));
        prev = cur;
        cur = next;
    }
    Ok(out)
}

fn add(a: &TwoComponentField, b: &TwoComponentField) -> TwoComponentField {
    a.sub(&b.scale(Complex64::new(-1.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, IntegratorConfig, RunStatus};
    use crate::field::sigma_norm;
    use crate::grid::{make_grid, Grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, bound: f64) -> TwoComponentField {
        let mut draw = || {
            let r = bound * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
        };
        let a = (0..grid.len()).map(|_| draw()).collect();
        let b = (0..grid.len()).map(|_| draw()).collect();
        TwoComponentField::new(
            ScalarField::from_values(grid, a).unwrap(),
            ScalarField::from_values(grid, b).unwrap(),
        )
        .unwrap()
    }

    fn smooth(grid: &Arc<Grid>) -> TwoComponentField {
        TwoComponentField::new(
            ScalarField::from_fn(grid, |x| Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), 0.3 * x[0])),
            ScalarField::from_fn(grid, |x| c(0.5 * (-(x[0] - 1.0).powi(2)).exp(), 0.0)),
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
    fn unitaries_are_unitary() {
        assert!(TwoByTwoUnitary::hadamard().unitarity_defect() <= 1e-14);
        for (l, t) in [(1.0, 0.3), (40.0, 2.7), (-3.0, 11.0)] {
            assert!(TwoByTwoUnitary::rabi(l, t).unitarity_defect() <= 1e-14);
        }
    }

    #[test]
    fn hadamard_rows() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let f = smooth(&g);
        assert!(max_diff(&hadamard_mix(&hadamard_mix(&f)), &f) < 1e-15);
        let gauss = ScalarField::from_fn(&g, |x| c((-x[0] * x[0]).exp(), 0.0));
        let out = hadamard_mix(&TwoComponentField::new(gauss.clone(), gauss.clone()).unwrap());
        for (o, v) in out.first.values.iter().zip(&gauss.values) {
            assert!((o - 2f64.sqrt() * v).norm() < 1e-15);
        }
        assert!(out.second.values.iter().all(|v| v.norm() < 1e-15));
        assert!((hadamard_mix(&f).mass() - f.mass()).abs() < 1e-14 * f.mass());
    }

    #[test]
    fn transform_rows() {
        let g = make_grid(1, 64, 6.0).unwrap();
        let f = smooth(&g);
        assert!(max_diff(&to_transformed(&f, 5.0, 0.0), &hadamard_mix(&f)) == 0.0);
        let phi = to_transformed(&f, 5.0, 0.7);
        assert!(max_diff(&from_transformed(&phi, 5.0, 0.7), &f) <= 1e-13);
        let (s0, s1) = (sigma_norm(&f).sigma, sigma_norm(&phi).sigma);
        assert!(((s1 - s0) / s0).abs() <= 1e-12);
    }

    #[test]
    fn asymptotic_profile_rows() {
        let g = make_grid(1, 64, 6.0).unwrap();
        let psi0 = smooth(&g);
        let u0 = hadamard_mix(&psi0);
        assert!(max_diff(&asymptotic_profile(&u0, 3.0, 0.0), &psi0) < 1e-15);
        let (lambda, t) = (3.0, 0.41);
        let direct = asymptotic_profile(&u0, lambda, t);
        let via = rabi_step(&hadamard_mix(&u0), lambda, t);
        assert!(max_diff(&direct, &via) < 1e-14);
        for p in 0..g.len() {
            assert!((direct.density_at(p) - u0.density_at(p)).abs() < 1e-14);
        }
    }

    fn b_infty_matrix_form(phi: &TwoComponentField, cm: CouplingMatrix) -> TwoComponentField {
        // written as the 2×2 matrix with diagonal (β₁₁+2β₁₂+β₂₂)|φ_j|²/4 and
        // off-diagonal 2(β₁₁+β₂₂)φ_jφ_k*/4
        let diag = (cm.b11 + 2.0 * cm.b12 + cm.b22) / 4.0;
        let off = 2.0 * (cm.b11 + cm.b22) / 4.0;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (&p1, &p2) in phi.first.values.iter().zip(&phi.second.values) {
            let m11 = diag * p1.norm_sqr();
            let m12 = off * p1 * p2.conj();
            let m21 = off * p1.conj() * p2;
            let m22 = diag * p2.norm_sqr();
            a.push(m11 * p1 + m12 * p2);
            b.push(m21 * p1 + m22 * p2);
        }
        pair(phi, a, b)
    }

    #[test]
    fn b_infty_rows() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let cm = CouplingMatrix::new(1.0, -0.7, 2.5);
        let e = effective_coefficients(cm);
        let single = TwoComponentField::new(smooth(&g).first, ScalarField::zeros(&g)).unwrap();
        let out = b_infty_apply(&single, cm);
        for (o, p) in out.first.values.iter().zip(&single.first.values) {
            assert!((o - e.chi * p.norm_sqr() * p).norm() < 1e-15);
        }
        assert!(out.second.values.iter().all(|v| v.norm() == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(&g, &mut rng, 1.3);
        let zero = b_infty_apply(&f, CouplingMatrix::new(-2.0, 0.0, 2.0));
        assert!(zero.mass() == 0.0);
        assert!(max_diff(&b_infty_apply(&f, cm), &b_infty_matrix_form(&f, cm)) < 1e-14);
    }

    #[test]
    fn r_lambda_vanishes_for_equal_coefficients() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(&g, &mut rng, 1.0);
        let out = r_lambda_apply(&f, CouplingMatrix::new(1.7, 1.7, 1.7), 9.0, 0.3);
        assert!(out.mass() == 0.0);
    }

    #[test]
    fn conjugation_identity_on_random_fields() {
        let g = make_grid(1, 64, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let cm = CouplingMatrix::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let lambda = rng.gen_range(-20.0..20.0);
            let t = rng.gen_range(0.0..3.0);
            let phi = random_field(&g, &mut rng, 1.0);
            let psi = from_transformed(&phi, lambda, t);
            // VΩ(-t) B̃[Ψ]Ψ with Ψ = Ω(t)VΦ
            let lhs = to_transformed(&b_tilde_apply(&psi, cm), lambda, t);
            let rhs = add(&b_infty_apply(&phi, cm), &r_lambda_apply(&phi, cm, lambda, t));
            assert!(max_diff(&lhs, &rhs) <= 1e-12);
        }
    }

    #[test]
    fn r_lambda_averages_out_over_a_period() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random_field(&g, &mut rng, 1.0);
        let cm = CouplingMatrix::new(2.0, -1.0, 0.5);
        let lambda = 3.0;
        let period = 2.0 * PI / (2.0 * lambda);
        // rectangle rule is exact for trigonometric polynomials of degree < samples
        let samples = 64;
        let mut avg = TwoComponentField::zeros(&g);
        let mut peak: f64 = 0.0;
        for s in 0..samples {
            let t = period * s as f64 / samples as f64;
            let r = r_lambda_apply(&phi, cm, lambda, t);
            peak = peak.max(max_diff(&r, &TwoComponentField::zeros(&g)));
            avg = add(&avg, &r.scale(c(1.0 / samples as f64, 0.0)));
        }
        assert!(max_diff(&avg, &TwoComponentField::zeros(&g)) <= 1e-10 * peak);
    }

    #[test]
    fn lipschitz_ratios_are_bounded() {
        let g = make_grid(1, 1024, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let cm = CouplingMatrix::new(1.0, -2.0, 0.5);
        let bound = 16.0 * cm.max_abs();
        let f1 = random_field(&g, &mut rng, 1.0);
        let f2 = random_field(&g, &mut rng, 1.0);
        let (b1, b2) = (b_infty_apply(&f1, cm), b_infty_apply(&f2, cm));
        let r = r_lambda_apply(&f1, cm, 2.3, 0.9);
        let (mut lip, mut cubic) = (0.0f64, 0.0f64);
        for p in 0..g.len() {
            let num = ((b1.first.values[p] - b2.first.values[p]).norm_sqr()
                + (b1.second.values[p] - b2.second.values[p]).norm_sqr())
            .sqrt();
            let diff = ((f1.first.values[p] - f2.first.values[p]).norm_sqr()
                + (f1.second.values[p] - f2.second.values[p]).norm_sqr())
            .sqrt();
            let den = (f1.density_at(p) + f2.density_at(p)) * diff;
            if den > 1e-12 {
                lip = lip.max(num / den);
            }
            let m = f1.density_at(p).sqrt();
            if m > 1e-6 {
                let rn = (r.first.values[p].norm_sqr() + r.second.values[p].norm_sqr()).sqrt();
                cubic = cubic.max(rn / m.powi(3));
            }
        }
        assert!(lip <= bound && cubic <= bound, "lip {lip} cubic {cubic} bound {bound}");
    }

    #[test]
    fn residual_of_zero_trajectory() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let spec = SystemSpec::original(CouplingMatrix::new(1.0, 0.5, 2.0), 4.0, 1.0);
        let cfg = IntegratorConfig {
            t_end: 0.05,
            snapshot_stride: 10,
            ..Default::default()
        };
        let traj = evolve(&TwoComponentField::zeros(&g), &spec, &cfg).unwrap();
        for sys in [
            ResidualSystem::Original,
            ResidualSystem::Transformed,
            ResidualSystem::Limit,
        ] {
            let r = pde_residual(&traj, sys, 4.0).unwrap();
            assert!(r.iter().all(|&(_, v)| v == 0.0));
        }
    }

    fn oracle_trajectory(g: &Arc<Grid>, lambda: f64, h: f64, count: usize) -> Trajectory {
        let gamma: f64 = 1.0;
        let ground = ScalarField::from_fn(g, |x| c((gamma / PI).powf(0.25) * (-x[0] * x[0] / 2.0).exp(), 0.0));
        let shifted = ground.scale(c(0.0, 0.6));
        let psi0 = TwoComponentField::new(ground, shifted).unwrap();
        let times: Vec<f64> = (0..count).map(|k| k as f64 * h).collect();
        let snapshots = times
            .iter()
            .map(|&t| rabi_step(&psi0, lambda, t).scale(Complex64::from_polar(1.0, -gamma * t / 2.0)))
            .collect();
        Trajectory {
            spec: SystemSpec::original(CouplingMatrix::new(0.0, 0.0, 0.0), lambda, gamma),
            diagnostics: Vec::new(),
            times,
            snapshots,
            status: RunStatus::Completed,
            dt: h,
            final_step: None,
        }
    }

    #[test]
    fn residual_on_analytic_oracle_is_time_difference_error() {
        let g = make_grid(1, 128, 10.0).unwrap();
        let lambda = 2.0;
        let coarse = pde_residual(
            &oracle_trajectory(&g, lambda, 0.02, 6),
            ResidualSystem::Original,
            lambda,
        )
        .unwrap();
        let fine = pde_residual(
            &oracle_trajectory(&g, lambda, 0.01, 6),
            ResidualSystem::Original,
            lambda,
        )
        .unwrap();
        let ratio = coarse[0].1 / fine[0].1;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        assert!(coarse[0].1 < 1e-2);
    }

    #[test]
    fn residual_rejects_nonuniform_spacing() {
        let g = make_grid(1, 32, 10.0).unwrap();
        let mut traj = oracle_trajectory(&g, 1.0, 0.1, 4);
        traj.times[2] += 0.01;
        assert!(pde_residual(&traj, ResidualSystem::Original, 1.0).is_err());
        traj.snapshots.truncate(2);
        traj.times.truncate(2);
        assert!(pde_residual(&traj, ResidualSystem::Original, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn transform_round_trip(lambda in -50.0f64..50.0, t in -3.0f64..3.0, seed in 0u64..1000) {
            let g = make_grid(1, 16, 4.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_field(&g, &mut rng, 2.0);
            let back = from_transformed(&to_transformed(&f, lambda, t), lambda, t);
            prop_assert!(max_diff(&back, &f) <= 1e-13);
        }

        #[test]
        fn profile_preserves_density(lambda in -50.0f64..50.0, t in 0.0f64..3.0, seed in 0u64..1000) {
            let g = make_grid(1, 16, 4.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_field(&g, &mut rng, 2.0);
            let prof = asymptotic_profile(&u, lambda, t);
            for p in 0..g.len() {
                prop_assert!((prof.density_at(p) - u.density_at(p)).abs() <= 1e-13);
            }
        }
    }
}
