//! Concrete inner-product spaces.
//!
//! Two kinds of space are supported: the coordinate space `C^n` with the
//! standard inner product, and complex functions sampled on a uniform grid
//! `x_j = xmin + j*dx`, `dx = (xmax - xmin) / count`, whose inner product is
//! the left-endpoint Riemann sum `sum_j f(x_j) conj(g(x_j)) dx`.
//!
//! # Fourier convention
//!
//! All transforms use the kernel `exp(-2 pi i x gamma)`:
//!
//! ```text
//! f_hat(gamma) = integral f(x) exp(-2 pi i x gamma) dx
//! ```
//!
//! With this normalization `exp(-pi t^2)` is its own transform and no
//! `2 pi` factors appear in Plancherel. Admissibility constants of wavelets
//! depend on this choice.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Relative tolerance used when comparing grid parameters.
const GRID_RTOL: f64 = 1e-12;

/// A concrete Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Coordinate { dim: usize },
    Sampled { xmin: f64, xmax: f64, count: usize },
}

impl Space {
    pub fn coordinate(dim: usize) -> Result<Self> {
        let s = Space::Coordinate { dim };
        s.validate()?;
        Ok(s)
    }

    pub fn sampled(xmin: f64, xmax: f64, count: usize) -> Result<Self> {
        let s = Space::Sampled { xmin, xmax, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Space::Coordinate { dim } if dim == 0 => {
                Err(Error::InvalidSpace("dimension must be at least 1".into()))
            }
            Space::Sampled { count, .. } if count < 2 => {
                Err(Error::InvalidSpace("sampled space needs at least 2 points".into()))
            }
            Space::Sampled { xmin, xmax, .. }
                if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) =>
            {
                Err(Error::InvalidSpace(format!(
                    "interval [{xmin}, {xmax}] is empty or non-finite"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        match *self {
            Space::Coordinate { dim } => dim,
            Space::Sampled { count, .. } => count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Space::Sampled { .. })
    }

    /// Measure of one grid point: `dx` for sampled spaces, 1 for coordinates.
    pub fn step(&self) -> f64 {
        match *self {
            Space::Coordinate { .. } => 1.0,
            Space::Sampled { xmin, xmax, count } => (xmax - xmin) / count as f64,
        }
    }

    pub fn xmin(&self) -> f64 {
        match *self {
            Space::Coordinate { .. } => 0.0,
            Space::Sampled { xmin, .. } => xmin,
        }
    }

    /// Abscissa of grid point `j` (the index itself for coordinate spaces).
    pub fn point(&self, j: usize) -> f64 {
        match *self {
            Space::Coordinate { .. } => j as f64,
            Space::Sampled { xmin, .. } => xmin + j as f64 * self.step(),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    /// The frequency grid on which [`dft`] returns values: `count` bins of
    /// width `1 / (count * dx)` centred so that bin `count / 2` is `gamma = 0`.
    pub fn dual(&self) -> Result<Space> {
        match *self {
            Space::Coordinate { .. } => Err(Error::WrongSpaceKind { expected: "sampled" }),
            Space::Sampled { count, .. } => {
                let dg = 1.0 / (count as f64 * self.step());
                let half = (count / 2) as f64;
                Ok(Space::Sampled {
                    xmin: -half * dg,
                    xmax: (count as f64 - half) * dg,
                    count,
                })
            }
        }
    }

    /// Equality up to rounding in the grid parameters.
    pub fn compatible(&self, other: &Space) -> bool {
        match (*self, *other) {
            (Space::Coordinate { dim: a }, Space::Coordinate { dim: b }) => a == b,
            (
                Space::Sampled { xmin: a0, xmax: a1, count: an },
                Space::Sampled { xmin: b0, xmax: b1, count: bn },
            ) => {
                let scale = (a1 - a0).abs().max(b1 - b0).max(1.0);
                an == bn
                    && (a0 - b0).abs() <= GRID_RTOL * scale
                    && (a1 - b1).abs() <= GRID_RTOL * scale
            }
            _ => false,
        }
    }

    pub fn ensure_compatible(&self, other: &Space) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Coordinate { dim } => write!(f, "C^{dim}"),
            Space::Sampled { xmin, xmax, count } => {
                write!(f, "L2[{xmin}, {xmax}) sampled at {count} points")
            }
        }
    }
}

/// An element of a [`Space`].
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    space: Space,
    data: Vec<Complex64>,
}

impl Vector {
    pub fn new(space: Space, data: Vec<Complex64>) -> Result<Self> {
        space.validate()?;
        if data.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector { space, data })
    }

    pub fn zeros(space: Space) -> Self {
        Vector {
            space,
            data: vec![Complex64::new(0.0, 0.0); space.len()],
        }
    }

    pub fn from_real(space: Space, values: &[f64]) -> Result<Self> {
        Vector::new(space, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at the grid points of `space`.
    pub fn from_fn(space: Space, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Vector::new(space, space.points().into_iter().map(f).collect())
    }

    /// Standard basis vector `e_k` (zero-based) of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        let space = Space::coordinate(dim)?;
        if k >= dim {
            return Err(Error::InvalidParameter(format!("basis index {k} >= dim {dim}")));
        }
        let mut v = Vector::zeros(space);
        v.data[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.space.step()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Vector {
        Vector {
            space: self.space,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: Complex64, other: &Vector) -> Result<Vector> {
        self.space.ensure_compatible(&other.space)?;
        Ok(Vector {
            space: self.space,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Linear interpolation of a sampled function at an arbitrary abscissa,
    /// zero outside the sampled range. Lattice points are reproduced exactly.
    pub fn sample_at(&self, t: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let n = self.data.len();
        let pos = (t - self.space.xmin()) / self.space.step();
        let nearest = pos.round();
        if (pos - nearest).abs() <= 1e-9 {
            return if nearest >= 0.0 && (nearest as usize) < n {
                self.data[nearest as usize]
            } else {
                zero
            };
        }
        if pos < 0.0 || pos > (n - 1) as f64 {
            return zero;
        }
        let j = pos.floor() as usize;
        let frac = pos - j as f64;
        self.data[j] * (1.0 - frac) + self.data[j + 1] * frac
    }
}

/// `<u, v>`: linear in `u`, conjugate-linear in `v`.
pub fn inner(u: &Vector, v: &Vector) -> Result<Complex64> {
    u.space.ensure_compatible(&v.space)?;
    Ok(inner_slices(&u.data, &v.data) * u.space.step())
}

/// Unweighted `sum_j u_j conj(v_j)` in fixed index order.
pub(crate) fn inner_slices(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter()
        .zip(v)
        .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

/// Discrete approximation of `f_hat(gamma) = integral f(x) exp(-2 pi i x gamma) dx`
/// on the grid returned by [`Space::dual`].
///
/// The result satisfies Plancherel exactly on the grid:
/// `sum |f_hat|^2 dgamma = sum |f|^2 dx`.
pub fn dft(f: &Vector) -> Result<Vector> {
    let space = *f.space();
    let dual = space.dual()?;
    let n = space.len();
    let half = n / 2;
    let dx = space.step();
    let xmin = space.xmin();
    let mut buf = f.data.clone();
    fft::forward(&mut buf);
    let data = (0..n)
        .map(|p| {
            let gamma = dual.point(p);
            let k = (p + n - half) % n;
            buf[k] * Complex64::from_polar(dx, -2.0 * PI * xmin * gamma)
        })
        .collect();
    Ok(Vector { space: dual, data })
}

/// Inverse of [`dft`]: reconstructs samples on `target` from values on
/// `target.dual()`.
pub fn idft(f_hat: &Vector, target: Space) -> Result<Vector> {
    let dual = target.dual()?;
    dual.ensure_compatible(f_hat.space())?;
    let n = target.len();
    let half = n / 2;
    let dg = dual.step();
    let xmin = target.xmin();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (p, z) in f_hat.data.iter().enumerate() {
        let gamma = dual.point(p);
        buf[(p + n - half) % n] = z * Complex64::from_polar(dg, 2.0 * PI * xmin * gamma);
    }
    fft::inverse(&mut buf);
    Ok(Vector {
        space: target,
        data: buf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian(space: Space) -> Vector {
        Vector::from_fn(space, |t| c((-PI * t * t).exp(), 0.0)).unwrap()
    }

    #[test]
    fn basis_orthonormal() {
        let e1 = Vector::basis(3, 0).unwrap();
        let e2 = Vector::basis(3, 1).unwrap();
        assert_eq!(inner(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn gaussian_norm_matches_closed_form() {
        let s = Space::sampled(-8.0, 8.0, 4096).unwrap();
        let g = gaussian(s);
        let ip = inner(&g, &g).unwrap();
        assert!((ip.re - 2f64.powf(-0.5)).abs() < 1e-6);
        assert_eq!(ip.im, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Space::coordinate(0).is_err());
        assert!(Space::sampled(0.0, 1.0, 1).is_err());
        assert!(Space::sampled(1.0, 1.0, 8).is_err());
        let s = Space::coordinate(2).unwrap();
        assert_eq!(
            Vector::new(s, vec![c(1.0, 0.0)]).unwrap_err(),
            Error::LengthMismatch { expected: 2, got: 1 }
        );
        assert_eq!(
            Vector::new(s, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
        let a = Vector::zeros(s);
        let b = Vector::zeros(Space::coordinate(3).unwrap());
        assert!(matches!(inner(&a, &b), Err(Error::SpaceMismatch { .. })));
        assert!(matches!(dft(&a), Err(Error::WrongSpaceKind { .. })));
    }

    #[test]
    fn dft_of_constant_is_a_dc_spike() {
        let s = Space::sampled(-4.0, 4.0, 64).unwrap();
        let one = Vector::from_fn(s, |_| c(1.0, 0.0)).unwrap();
        let hat = dft(&one).unwrap();
        let zero_bin = 32;
        assert!((hat.space().point(zero_bin)).abs() < 1e-15);
        assert!((hat.as_slice()[zero_bin].norm() - 8.0).abs() < 1e-12);
        for (p, z) in hat.as_slice().iter().enumerate() {
            if p != zero_bin {
                assert!(z.norm() < 1e-12, "bin {p} = {z}");
            }
        }
    }

    #[test]
    fn gaussian_is_its_own_transform() {
        let s = Space::sampled(-8.0, 8.0, 4096).unwrap();
        let hat = dft(&gaussian(s)).unwrap();
        let fs = *hat.space();
        for (p, z) in hat.as_slice().iter().enumerate() {
            let g = fs.point(p);
            if g.abs() <= 3.0 {
                assert!((z - c((-PI * g * g).exp(), 0.0)).norm() < 1e-6, "gamma={g}");
            }
        }
    }

    #[test]
    fn odd_length_grids_round_trip() {
        let s = Space::sampled(-1.3, 2.1, 15).unwrap();
        let f = Vector::from_fn(s, |t| c(t.sin(), t * t)).unwrap();
        let back = idft(&dft(&f).unwrap(), s).unwrap();
        assert!(back.sub(&f).unwrap().norm() < 1e-12);
    }

    #[test]
    fn sample_at_hits_lattice_points() {
        let s = Space::sampled(-1.0, 1.0, 8).unwrap();
        let f = Vector::from_fn(s, |t| c(t, -t)).unwrap();
        for j in 0..8 {
            assert_eq!(f.sample_at(s.point(j)), f.as_slice()[j]);
        }
        assert_eq!(f.sample_at(-1.5), c(0.0, 0.0));
        let mid = f.sample_at(-0.875);
        assert!((mid - c(-0.875, 0.875)).norm() < 1e-14);
    }

    fn vec_pair(len: usize) -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        let entry = (-10.0..10.0f64, -10.0..10.0f64);
        (
            proptest::collection::vec(entry.clone(), len),
            proptest::collection::vec(entry, len),
        )
    }

    fn to_vec(space: Space, raw: &[(f64, f64)]) -> Vector {
        Vector::new(space, raw.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn hermitian_symmetry_and_cauchy_schwarz((u, v) in vec_pair(16)) {
            let s = Space::sampled(-2.0, 3.0, 16).unwrap();
            let (u, v) = (to_vec(s, &u), to_vec(s, &v));
            let uv = inner(&u, &v).unwrap();
            let vu = inner(&v, &u).unwrap();
            prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
            prop_assert!(uv.norm() <= u.norm() * v.norm() + 1e-12 * (1.0 + u.norm() * v.norm()));
            let uu = inner(&u, &u).unwrap();
            prop_assert!(uu.re >= 0.0 && uu.im == 0.0);
        }

        #[test]
        fn plancherel_and_inverse((u, _v) in vec_pair(33)) {
            let s = Space::sampled(-5.0, 7.0, 33).unwrap();
            let f = to_vec(s, &u);
            let hat = dft(&f).unwrap();
            prop_assert!((hat.norm_sq() - f.norm_sq()).abs() <= 1e-10 * f.norm_sq().max(1.0));
            let back = idft(&hat, s).unwrap();
            prop_assert!(back.sub(&f).unwrap().norm() <= 1e-10 * f.norm().max(1.0));
        }
    }
}
