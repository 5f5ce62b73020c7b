//! Periodic 1-D grid with a unitary DFT and spectral differentiation.
//!
//! Points sit at `x_i = −L/2 + i·dx`. Mode `j` of the transform carries the
//! wavenumber `2πj/L` for `j < n/2` and `2π(j − n)/L` otherwise, so the
//! Nyquist mode is `−πn/L`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Grid1D {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::input(format!("grid size must be even and >= 8, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::input(format!("grid length must be positive, got {length}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid1D {
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Wavenumber of transform slot `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        };
        2.0 * PI * m / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Transform slot holding wavenumber `2πm/L`, if `m` is representable.
    pub fn mode_index(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m >= half || m < -half {
            return None;
        }
        Some(if m >= 0 {
            m as usize
        } else {
            (m + self.n as i64) as usize
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::input(format!("field has {len} values, grid has {}", self.n)));
        }
        Ok(())
    }

    /// Unitary forward DFT (`1/√n` normalization, `e^{−2πi jm/n}` kernel).
    pub fn forward(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
        Ok(buf)
    }

    pub fn inverse(&self, modes: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(modes.len())?;
        let mut buf = modes.to_vec();
        self.inverse.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
        Ok(buf)
    }

    /// `∂ₓ^order` of point values, by multiplying mode `j` with `(i k_j)^order`.
    pub fn derivative(&self, values: &[Complex64], order: u32) -> Result<Vec<Complex64>> {
        if !(1..=4).contains(&order) {
            return Err(Error::input(format!("derivative order must be 1..=4, got {order}")));
        }
        let mut modes = self.forward(values)?;
        for (j, m) in modes.iter_mut().enumerate() {
            *m *= Complex64::new(0.0, self.wavenumber(j)).powu(order);
        }
        self.inverse(&modes)
    }

    pub fn derivative_real(&self, values: &[f64], order: u32) -> Result<Vec<f64>> {
        let c: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        Ok(self.derivative(&c, order)?.into_iter().map(|v| v.re).collect())
    }

    /// Trigonometric interpolant of point values at an arbitrary `x`.
    pub fn interpolate(&self, values: &[Complex64], x: f64) -> Result<Complex64> {
        let modes = self.forward(values)?;
        let xi = x + 0.5 * self.length;
        let s = 1.0 / (self.n as f64).sqrt();
        let nyquist = self.n / 2;
        Ok(modes
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let phase = self.wavenumber(j) * xi;
                if j == nyquist {
                    m * phase.cos()
                } else {
                    m * Complex64::from_polar(1.0, phase)
                }
            })
            .sum::<Complex64>()
            * s)
    }

    pub fn interpolate_real(&self, values: &[f64], x: f64) -> Result<f64> {
        let c: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        Ok(self.interpolate(&c, x)?.re)
    }

    /// `∫ f dx` over one period (rectangle rule, spectrally exact for periodic f).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.dx()
    }

    /// Discrete `L²` norm `(Σ|f|² dx)^{1/2}`.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        (values.iter().map(|v| v * v).sum::<f64>() * self.dx()).sqrt()
    }
}

/// Complex values on a grid, in point space or mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        ComplexField {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f(x)` at the grid points.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        ComplexField {
            grid: grid.clone(),
            values: grid.xs().into_iter().map(f).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn transform(field: &ComplexField, direction: Direction) -> Result<ComplexField> {
    let values = match direction {
        Direction::Forward => field.grid.forward(&field.values)?,
        Direction::Inverse => field.grid.inverse(&field.values)?,
    };
    Ok(ComplexField {
        grid: field.grid.clone(),
        values,
    })
}

pub fn spectral_derivative(field: &ComplexField, order: u32) -> Result<ComplexField> {
    Ok(ComplexField {
        grid: field.grid.clone(),
        values: field.grid.derivative(&field.values, order)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation_and_layout() {
        assert!(Grid1D::new(6, 1.0).is_err());
        assert!(Grid1D::new(9, 1.0).is_err());
        assert!(Grid1D::new(8, 0.0).is_err());
        let g = Grid1D::new(8, 4.0).unwrap();
        assert_eq!(g.dx() * 8.0, 4.0);
        let k: Vec<f64> = g.wavenumbers().iter().map(|k| k * 4.0 / (2.0 * PI)).collect();
        let expect = [0., 1., 2., 3., -4., -3., -2., -1.];
        for (a, b) in k.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(g.mode_index(-1), Some(7));
        assert_eq!(g.mode_index(4), None);
    }

    #[test]
    fn constant_and_single_mode() {
        let g = Grid1D::new(16, 3.0).unwrap();
        let one = ComplexField::from_fn(&g, |_| c(1., 0.));
        let m = transform(&one, Direction::Forward).unwrap();
        assert!((m.values[0] - c(4., 0.)).norm() < 1e-14);
        assert!(m.values[1..].iter().all(|v| v.norm() < 1e-14));

        let wave = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, 2.0 * PI * x / 3.0));
        let m = transform(&wave, Direction::Forward).unwrap();
        for (j, v) in m.values.iter().enumerate() {
            if j == 1 {
                assert!((v.norm() - 4.0).abs() < 1e-13);
            } else {
                assert!(v.norm() < 1e-13, "mode {j}: {v}");
            }
        }
    }

    #[test]
    fn length_mismatch() {
        let g = Grid1D::new(8, 1.0).unwrap();
        assert!(ComplexField::new(g.clone(), vec![c(0., 0.); 7]).is_err());
        let bad = ComplexField {
            grid: g,
            values: vec![c(0., 0.); 5],
        };
        assert!(transform(&bad, Direction::Forward).is_err());
    }

    #[test]
    fn second_derivative_of_sine() {
        let l = 7.0;
        let g = Grid1D::new(32, l).unwrap();
        let q = 2.0 * PI / l;
        let f = ComplexField::from_fn(&g, |x| c((q * x).sin(), 0.));
        let d2 = spectral_derivative(&f, 2).unwrap();
        for (x, v) in g.xs().iter().zip(&d2.values) {
            assert!((v.re + q * q * (q * x).sin()).abs() < 1e-12);
        }
        let zero = spectral_derivative(&ComplexField::from_fn(&g, |_| c(2.5, -1.)), 3).unwrap();
        assert!(zero.values.iter().all(|v| v.norm() < 1e-13));
        assert!(spectral_derivative(&f, 0).is_err());
        assert!(spectral_derivative(&f, 5).is_err());
    }

    #[test]
    fn gaussian_laplacian_matches_fourth_order_differences() {
        let (n, l) = (256, 100.0);
        let g = Grid1D::new(n, l).unwrap();
        let sigma = l / 20.0;
        let f: Vec<f64> = g.xs().iter().map(|x| (-x * x / (2.0 * sigma * sigma)).exp()).collect();
        let spectral = g.derivative_real(&f, 2).unwrap();
        // independent oracle: periodic 5-point stencil
        let h = g.dx();
        let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
        let worst = (0..n as isize)
            .map(|i| {
                let fd = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) / (12.0 * h * h);
                (fd - spectral[i as usize]).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn interpolation_recovers_band_limited_function() {
        let g = Grid1D::new(64, 10.0).unwrap();
        let f = |x: f64| (2.0 * PI * 3.0 * x / 10.0).cos() + 0.5 * (2.0 * PI * x / 10.0).sin();
        let vals: Vec<f64> = g.xs().into_iter().map(f).collect();
        for x in [0.0, 1.2345, -4.99, std::f64::consts::SQRT_2] {
            assert!((g.interpolate_real(&vals, x).unwrap() - f(x)).abs() < 1e-13);
        }
    }

    fn field_strategy() -> impl Strategy<Value = Vec<Complex64>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32)
            .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(vals in field_strategy()) {
            let g = Grid1D::new(32, 5.0).unwrap();
            let f = ComplexField::new(g, vals).unwrap();
            let m = transform(&f, Direction::Forward).unwrap();
            let back = transform(&m, Direction::Inverse).unwrap();
            let scale = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            prop_assert!(back.max_abs_diff(&f) <= 1e-13 * scale);
            prop_assert!((m.norm_sqr() - f.norm_sqr()).abs() <= 1e-12 * f.norm_sqr());
        }

        #[test]
        fn first_derivative_twice_is_second(vals in field_strategy()) {
            let g = Grid1D::new(32, 5.0).unwrap();
            let f = ComplexField::new(g, vals).unwrap();
            let twice = spectral_derivative(&spectral_derivative(&f, 1).unwrap(), 1).unwrap();
            let once = spectral_derivative(&f, 2).unwrap();
            let scale = once.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
            prop_assert!(twice.max_abs_diff(&once) <= 1e-11 * scale);
        }
    }
}
