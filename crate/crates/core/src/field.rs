//! Two-component fields and the spatial and space-time norms measured on them.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{spectral_gradient, Grid, RealField, ScalarField};

/// The pair `(ψ₁, ψ₂)` on one grid.
#[derive(Debug, Clone)]
pub struct TwoComponentField {
    pub first: ScalarField,
    pub second: ScalarField,
}

impl TwoComponentField {
    pub fn new(first: ScalarField, second: ScalarField) -> Result<Self> {
        if first.grid != second.grid {
            return Err(Error::GridMismatch("components live on different grids".to_string()));
        }
        Ok(TwoComponentField { first, second })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        TwoComponentField {
            first: ScalarField::zeros(grid),
            second: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.first.grid
    }

    pub fn is_finite(&self) -> bool {
        self.first.is_finite() && self.second.is_finite()
    }

    /// `|Ψ|² = |ψ₁|² + |ψ₂|²` at flat point `p`.
    #[inline]
    pub fn density_at(&self, p: usize) -> f64 {
        self.first.values[p].norm_sqr() + self.second.values[p].norm_sqr()
    }

    pub fn density(&self) -> Vec<f64> {
        (0..self.grid().len()).map(|p| self.density_at(p)).collect()
    }

    pub fn mass(&self) -> f64 {
        self.grid().integrate_with(|p| self.density_at(p))
    }

    pub fn component_masses(&self) -> (f64, f64) {
        let g = self.grid();
        (
            g.integrate_with(|p| self.first.values[p].norm_sqr()),
            g.integrate_with(|p| self.second.values[p].norm_sqr()),
        )
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &TwoComponentField) -> TwoComponentField {
        let diff = |a: &ScalarField, b: &ScalarField| ScalarField {
            grid: Arc::clone(&a.grid),
            values: a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
        };
        TwoComponentField {
            first: diff(&self.first, &other.first),
            second: diff(&self.second, &other.second),
        }
    }

    pub fn scale(&self, c: Complex64) -> TwoComponentField {
        TwoComponentField {
            first: self.first.scale(c),
            second: self.second.scale(c),
        }
    }

    /// Applies a spatially constant 2×2 matrix `[[a, b], [c, d]]` pointwise.
    pub fn mix(&self, m: [[Complex64; 2]; 2]) -> TwoComponentField {
        let mut out = self.clone();
        for ((o1, o2), (&p1, &p2)) in out
            .first
            .values
            .iter_mut()
            .zip(out.second.values.iter_mut())
            .zip(self.first.values.iter().zip(&self.second.values))
        {
            *o1 = m[0][0] * p1 + m[0][1] * p2;
            *o2 = m[1][0] * p1 + m[1][1] * p2;
        }
        out
    }

    /// Spectral gradients of both components, `(∇ψ₁, ∇ψ₂)`.
    pub fn gradients(&self) -> (Vec<ScalarField>, Vec<ScalarField>) {
        (spectral_gradient(&self.first), spectral_gradient(&self.second))
    }
}

/// Pointwise modulus `|∇F|` from precomputed component gradients.
pub fn gradient_modulus(grads: &(Vec<ScalarField>, Vec<ScalarField>)) -> Vec<f64> {
    let len = grads.0[0].values.len();
    (0..len)
        .map(|p| {
            grads
                .0
                .iter()
                .chain(grads.1.iter())
                .map(|d| d.values[p].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `L^r` norm of a nonnegative pointwise modulus; `r = ∞` gives the max.
pub fn lr_norm_of_modulus(grid: &Grid, modulus: &[f64], r: f64) -> Result<f64> {
    check_exponent(r)?;
    if r.is_infinite() {
        return Ok(modulus.iter().cloned().fold(0.0, f64::max));
    }
    let s = if r == 2.0 {
        grid.integrate_with(|p| modulus[p] * modulus[p])
    } else {
        grid.integrate_with(|p| modulus[p].powf(r))
    };
    Ok(s.powf(1.0 / r))
}

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "Lebesgue exponent must satisfy 1 <= r <= inf (got {r})"
        )));
    }
    Ok(())
}

/// `(∫|F|^r)^{1/r}` with `|F|` the two-component modulus.
pub fn lr_norm(f: &TwoComponentField, r: f64) -> Result<f64> {
    let modulus: Vec<f64> = f.density().into_iter().map(f64::sqrt).collect();
    lr_norm_of_modulus(f.grid(), &modulus, r)
}

/// Spatial norms of one snapshot. `sigma = l2 + grad_l2 + xweight_l2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormRecord {
    pub time: f64,
    pub l2: f64,
    pub h1: f64,
    pub sigma: f64,
    pub grad_l2: f64,
    pub xweight_l2: f64,
    pub l4: f64,
}

/// Σ-norm record of `f` (time set to 0).
pub fn sigma_norm(f: &TwoComponentField) -> NormRecord {
    let g = f.grid();
    let (g1, g2) = f.gradients();
    let grad_sq: f64 = g1
        .iter()
        .chain(g2.iter())
        .map(|d| g.integrate_with(|p| d.values[p].norm_sqr()))
        .sum();
    let r2 = g.radius_sq();
    let l2 = f.mass().sqrt();
    let grad_l2 = grad_sq.sqrt();
    let xweight_l2 = g.integrate_with(|p| r2[p] * f.density_at(p)).sqrt();
    let l4 = g
        .integrate_with(|p| {
            let d = f.density_at(p);
            d * d
        })
        .powf(0.25);
    NormRecord {
        time: 0.0,
        l2,
        h1: l2 + grad_l2,
        sigma: l2 + grad_l2 + xweight_l2,
        grad_l2,
        xweight_l2,
        l4,
    }
}

/// `J = Im(ψ₁*∇ψ₁ + ψ₂*∇ψ₂)`, one real field per axis.
pub fn current_density(f: &TwoComponentField) -> Vec<RealField> {
    let (g1, g2) = f.gradients();
    current_from_gradients(f, &g1, &g2)
}

pub(crate) fn current_from_gradients(f: &TwoComponentField, g1: &[ScalarField], g2: &[ScalarField]) -> Vec<RealField> {
    g1.iter()
        .zip(g2)
        .map(|(d1, d2)| RealField {
            grid: Arc::clone(f.grid()),
            values: (0..f.grid().len())
                .map(|p| (f.first.values[p].conj() * d1.values[p] + f.second.values[p].conj() * d2.values[p]).im)
                .collect(),
        })
        .collect()
}

/// Samples of a spatial norm in time, for `‖·‖_{L^q_t L^r_x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedNormAccumulator {
    exponent_time: f64,
    exponent_space: f64,
    sample_times: Vec<f64>,
    sample_values: Vec<f64>,
}

impl MixedNormAccumulator {
    pub fn new(exponent_time: f64, exponent_space: f64) -> Result<Self> {
        check_exponent(exponent_time)?;
        check_exponent(exponent_space)?;
        Ok(MixedNormAccumulator {
            exponent_time,
            exponent_space,
            sample_times: Vec::new(),
            sample_values: Vec::new(),
        })
    }

    pub fn exponent_time(&self) -> f64 {
        self.exponent_time
    }

    pub fn exponent_space(&self) -> f64 {
        self.exponent_space
    }

    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    /// Appends the spatial norm value measured at time `t`.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.sample_times.last() {
            if t <= last {
                return Err(Error::InvalidArgument(format!(
                    "sample times must increase strictly ({t} after {last})"
                )));
            }
        }
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "spatial norm samples must be nonnegative (got {value})"
            )));
        }
        self.sample_times.push(t);
        self.sample_values.push(value);
        Ok(())
    }
}

/// Composite-trapezoid `(∫ ‖F(t)‖^q dt)^{1/q}`; the max of the samples for `q = ∞`.
pub fn mixed_norm(acc: &MixedNormAccumulator) -> Result<f64> {
    if acc.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "mixed norm needs at least 2 samples (got {})",
            acc.len()
        )));
    }
    let q = acc.exponent_time;
    if q.is_infinite() {
        return Ok(acc.sample_values.iter().cloned().fold(0.0, f64::max));
    }
    let integral: f64 = acc
        .sample_times
        .windows(2)
        .zip(acc.sample_values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q)))
        .sum();
    Ok(integral.powf(1.0 / q))
}
