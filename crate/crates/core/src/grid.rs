//! Uniform periodic grids, Fourier transforms, spectral differentiation and
//! rectangle-rule quadrature.
//!
//! Fields are stored row-major over axes (the last axis is contiguous). The
//! transform convention is unnormalized forward, `1/n^dim` on the inverse.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic box `[-L, L)^dim` sampled with `n` points per axis.
pub struct Grid {
    dim: usize,
    n: usize,
    half_width: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    deriv_multipliers: Vec<f64>,
    k2: Vec<f64>,
    r2: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("points_per_dim", &self.n)
            .field("half_width", &self.half_width)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_width == other.half_width
    }
}

/// Builds a grid. `points_per_dim` must be a power of two no smaller than 8.
pub fn make_grid(dim: usize, points_per_dim: usize, half_width: f64) -> Result<Arc<Grid>> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Grid(format!("dim must be 1, 2 or 3 (got {dim})")));
    }
    if points_per_dim < 8 || !points_per_dim.is_power_of_two() {
        return Err(Error::Grid(format!(
            "points_per_dim must be a power of two >= 8 (got {points_per_dim})"
        )));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::Grid(format!(
            "half_width must be positive and finite (got {half_width})"
        )));
    }
    let n = points_per_dim;
    let spacing = 2.0 * half_width / n as f64;
    let dk = PI / half_width;
    let wavenumbers: Vec<f64> = (0..n)
        .map(|i| {
            let k = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
            dk * k as f64
        })
        .collect();
    let mut deriv_multipliers = wavenumbers.clone();
    deriv_multipliers[n / 2] = 0.0;

    let total = n.pow(dim as u32);
    let mut k2 = vec![0.0; total];
    let mut r2 = vec![0.0; total];
    for p in 0..total {
        let mut ks = 0.0;
        let mut xs = 0.0;
        for axis in 0..dim {
            let i = axis_index(p, axis, dim, n);
            ks += wavenumbers[i] * wavenumbers[i];
            let x = -half_width + spacing * i as f64;
            xs += x * x;
        }
        k2[p] = ks;
        r2[p] = xs;
    }

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    Ok(Arc::new(Grid {
        dim,
        n,
        half_width,
        spacing,
        wavenumbers,
        deriv_multipliers,
        k2,
        r2,
        fft,
        ifft,
    }))
}

#[inline]
fn axis_index(p: usize, axis: usize, dim: usize, n: usize) -> usize {
    (p / n.pow((dim - 1 - axis) as u32)) % n
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k2.is_empty()
    }

    /// Per-axis wavenumbers `πk/L` in FFT order (`0, 1, …, n/2-1, -n/2, …, -1`).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Derivative multipliers: the wavenumbers with the Nyquist entry zeroed.
    pub fn derivative_multipliers(&self) -> &[f64] {
        &self.deriv_multipliers
    }

    /// `|ξ|²` at every point of the Fourier-space layout.
    pub fn wavenumber_sq(&self) -> &[f64] {
        &self.k2
    }

    /// `|x|²` at every grid point.
    pub fn radius_sq(&self) -> &[f64] {
        &self.r2
    }

    /// `h^dim`, the rectangle-rule cell volume.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Index along `axis` of flat point `p`.
    #[inline]
    pub fn axis_index(&self, p: usize, axis: usize) -> usize {
        axis_index(p, axis, self.dim, self.n)
    }

    /// Coordinate along `axis` of flat point `p`.
    #[inline]
    pub fn coordinate(&self, p: usize, axis: usize) -> f64 {
        -self.half_width + self.spacing * self.axis_index(p, axis) as f64
    }

    /// Flat index of the point at the coordinate origin.
    pub fn origin_index(&self) -> usize {
        (0..self.dim).fold(0, |acc, _| acc * self.n + self.n / 2)
    }

    /// In-place unnormalized forward transform.
    pub fn forward_inplace(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fft);
    }

    /// In-place inverse transform, normalized so that it undoes `forward_inplace`.
    pub fn inverse_inplace(&self, data: &mut [Complex64]) {
        self.transform(data, &self.ifft);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    pub fn forward(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.forward_inplace(&mut out);
        out
    }

    pub fn inverse(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.inverse_inplace(&mut out);
        out
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "field length does not match grid");
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            // gather strided lines into a contiguous block, transform, scatter back
            let block = n * stride;
            let mut lines = vec![Complex64::new(0.0, 0.0); block];
            for chunk in data.chunks_exact_mut(block) {
                for j in 0..stride {
                    for i in 0..n {
                        lines[j * n + i] = chunk[i * stride + j];
                    }
                }
                plan.process_with_scratch(&mut lines, &mut scratch);
                for j in 0..stride {
                    for i in 0..n {
                        chunk[i * stride + j] = lines[j * n + i];
                    }
                }
            }
        }
    }

    /// Rectangle-rule integral `h^dim Σ f`.
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        values.iter().sum::<Complex64>() * self.cell_volume()
    }

    /// Rectangle-rule integral of a real density.
    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Rectangle-rule integral of `density(p)` over all points.
    pub fn integrate_with(&self, density: impl Fn(usize) -> f64) -> f64 {
        (0..self.len()).map(density).sum::<f64>() * self.cell_volume()
    }

    /// Wavenumber-space quadrature of `|f̂|²` for an unnormalized transform;
    /// equals `∫|f|²` by Parseval.
    pub fn spectral_mass(&self, spectrum: &[Complex64]) -> f64 {
        spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.cell_volume() / self.len() as f64
    }
}

/// Complex field on a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
}

/// Real field on a grid (coordinates, densities, current components).
#[derive(Debug, Clone)]
pub struct RealField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// Samples `f(x)` at every grid point; `x` has `dim` entries.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|p| {
                for (axis, xa) in x.iter_mut().enumerate() {
                    *xa = grid.coordinate(p, axis);
                }
                f(&x)
            })
            .collect();
        ScalarField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Exact free flow `i∂_t f = -½Δf` for time `tau`: multiplier `exp(-i|ξ|²τ/2)`.
pub fn apply_kinetic(f: &ScalarField, tau: f64) -> ScalarField {
    let grid = &f.grid;
    let mut spec = grid.forward(&f.values);
    for (v, &k2) in spec.iter_mut().zip(grid.wavenumber_sq()) {
        *v *= Complex64::from_polar(1.0, -0.5 * k2 * tau);
    }
    grid.inverse_inplace(&mut spec);
    ScalarField {
        grid: Arc::clone(grid),
        values: spec,
    }
}

/// Spectral derivative along each axis (multiplier `iξ`, Nyquist mode zeroed).
pub fn spectral_gradient(f: &ScalarField) -> Vec<ScalarField> {
    let grid = &f.grid;
    let spec = grid.forward(&f.values);
    (0..grid.dim())
        .map(|axis| {
            let mut d = spec.clone();
            let mult = grid.derivative_multipliers();
            for (p, v) in d.iter_mut().enumerate() {
                let k = mult[grid.axis_index(p, axis)];
                *v *= Complex64::new(0.0, k);
            }
            grid.inverse_inplace(&mut d);
            ScalarField {
                grid: Arc::clone(grid),
                values: d,
            }
        })
        .collect()
}

/// Rectangle-rule integral of a complex field.
pub fn integrate(f: &ScalarField) -> Complex64 {
    f.grid.integrate(&f.values)
}

/// Field holding each point's coordinate along `axis`.
pub fn coordinate_field(grid: &Arc<Grid>, axis: usize) -> Result<RealField> {
    if axis >= grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for a {}-dimensional grid",
            grid.dim()
        )));
    }
    Ok(RealField {
        grid: Arc::clone(grid),
        values: (0..grid.len()).map(|p| grid.coordinate(p, axis)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_grid_spacing_and_wavenumbers() {
        let g = make_grid(1, 8, 4.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        let mut ks: Vec<f64> = g.wavenumbers().to_vec();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: Vec<f64> = (-4..4).map(|k| PI * k as f64 / 4.0).collect();
        assert_eq!(ks, expected);
    }

    #[test]
    fn large_2d_grid() {
        let g = make_grid(2, 256, 12.0).unwrap();
        assert_eq!(g.len(), 65536);
        assert_eq!(g.spacing(), 0.09375);
        assert_eq!(g.spacing() * 256.0, 24.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(make_grid(1, 7, 4.0).is_err());
        assert!(make_grid(1, 4, 4.0).is_err());
        assert!(make_grid(0, 8, 4.0).is_err());
        assert!(make_grid(4, 8, 4.0).is_err());
        assert!(make_grid(1, 8, 0.0).is_err());
        assert!(make_grid(1, 8, -1.0).is_err());
    }

    #[test]
    fn wavenumbers_symmetric_except_nyquist() {
        let g = make_grid(1, 16, 3.0).unwrap();
        let ks = g.wavenumbers();
        assert_eq!(ks.len(), 16);
        for i in 1..8 {
            assert_eq!(ks[i], -ks[16 - i]);
        }
        assert_eq!(ks[8], -8.0 * PI / 3.0);
        assert_eq!(g.derivative_multipliers()[8], 0.0);
    }

    #[test]
    fn coordinates_1d() {
        let g = make_grid(1, 8, 4.0).unwrap();
        let x = coordinate_field(&g, 0).unwrap();
        assert_eq!(x.values, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(coordinate_field(&g, 1).is_err());
    }

    #[test]
    fn origin_has_zero_radius() {
        for dim in 1..=3 {
            let g = make_grid(dim, 8, 2.0).unwrap();
            let o = g.origin_index();
            assert_eq!(g.radius_sq()[o], 0.0);
            let s: f64 = (0..dim)
                .map(|a| coordinate_field(&g, a).unwrap().values[o].powi(2))
                .sum();
            assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn kinetic_zero_time_is_identity() {
        let g = make_grid(1, 32, 5.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| c((-x[0] * x[0]).exp(), 0.3 * x[0]));
        let out = apply_kinetic(&f, 0.0);
        for (a, b) in out.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn kinetic_plane_wave_eigenfunction() {
        for dim in 1..=2 {
            let g = make_grid(dim, 16, 4.0).unwrap();
            let k0 = 3.0 * PI / 4.0;
            let f = ScalarField::from_fn(&g, |x| Complex64::from_polar(1.0, k0 * x[0]));
            let tau = 0.37;
            let out = apply_kinetic(&f, tau);
            let phase = Complex64::from_polar(1.0, -0.5 * k0 * k0 * tau);
            for (a, b) in out.values.iter().zip(&f.values) {
                assert!((a - phase * b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn kinetic_preserves_norm() {
        let g = make_grid(2, 32, 4.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| {
            c((-(x[0] - 1.0).powi(2) - x[1] * x[1]).exp(), x[0] * x[1] * 0.1)
        });
        let m0 = g.integrate_with(|p| f.values[p].norm_sqr());
        let out = apply_kinetic(&f, 1.3);
        let m1 = g.integrate_with(|p| out.values[p].norm_sqr());
        assert!(((m1 - m0) / m0).abs() < 1e-13);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let g = make_grid(2, 16, 3.0).unwrap();
        let f = ScalarField::from_fn(&g, |_| c(2.5, -1.0));
        for d in spectral_gradient(&f) {
            assert!(d.values.iter().all(|v| v.norm() < 1e-13));
        }
    }

    #[test]
    fn gradient_of_plane_wave() {
        let g = make_grid(1, 32, 4.0).unwrap();
        let k0 = 5.0 * PI / 4.0;
        let f = ScalarField::from_fn(&g, |x| Complex64::from_polar(1.0, k0 * x[0]));
        let d = &spectral_gradient(&f)[0];
        for (a, b) in d.values.iter().zip(&f.values) {
            assert!((a - c(0.0, k0) * b).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_gaussian() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| c((-x[0] * x[0] / 2.0).exp(), 0.0));
        let d = &spectral_gradient(&f)[0];
        let max_err = (0..g.len())
            .map(|p| {
                let x = g.coordinate(p, 0);
                (d.values[p] - c(-x * (-x * x / 2.0).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-10, "max error {max_err}");
    }

    #[test]
    fn gradient_along_second_axis() {
        let g = make_grid(2, 128, 8.0).unwrap();
        let f = ScalarField::from_fn(&g, |x| c((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), 0.0));
        let grads = spectral_gradient(&f);
        let err = (0..g.len())
            .map(|p| {
                let (x, y) = (g.coordinate(p, 0), g.coordinate(p, 1));
                let e = (-(x * x + 2.0 * y * y)).exp();
                (grads[0].values[p].re + 2.0 * x * e).abs() + (grads[1].values[p].re + 4.0 * y * e).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn integrals() {
        let g = make_grid(1, 64, 3.0).unwrap();
        assert_eq!(integrate(&ScalarField::zeros(&g)), c(0.0, 0.0));
        let cst = ScalarField::from_fn(&g, |_| c(1.5, 0.0));
        assert!((integrate(&cst) - c(2.0 * 3.0 * 1.5, 0.0)).norm() < 1e-12);

        let g = make_grid(1, 256, 10.0).unwrap();
        let gauss = g.integrate_with(|p| (-g.coordinate(p, 0).powi(2)).exp());
        assert!((gauss - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_second_moment() {
        let g = make_grid(1, 256, 10.0).unwrap();
        let x = coordinate_field(&g, 0).unwrap();
        let m2 = g.integrate_with(|p| {
            let xv = x.values[p];
            xv * xv * (-xv * xv).exp() / PI.sqrt()
        });
        assert!((m2 - 0.5).abs() < 1e-10);
    }
}
