//! Short-time Fourier transform as a tight frame over `R^2` with Lebesgue
//! measure.
//!
//! `V_g f(y, gamma) = integral f(x) conj(g(x - y)) exp(-2 pi i x gamma) dx`
//! `= <f, M_gamma T_y g>`, and the orthogonality relation
//! `integral integral V_{g1} f1 conj(V_{g2} f2) = <f1, f2> <g2, g1>` makes
//! the system tight with bound `||g||^2`.
//!
//! The plane is truncated to a rectangle sampled on a uniform `(y, gamma)`
//! lattice with node weight `dy * dgamma`. When the frequency lattice sits
//! on DFT bins of the signal grid (`1 / (dgamma dx)` an integer and
//! `gamma_min / dgamma` an integer), each column is one folded FFT;
//! otherwise the sums are evaluated directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
pub use crate::field::{CoefficientField, FieldGrid};
use crate::hilbert::{inner, Space, Vector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    g: Vector,
    norm_sq: f64,
}

impl WindowSpec {
    pub fn new(g: Vector) -> Result<Self> {
        if !g.space().is_sampled() {
            return Err(Error::WrongSpaceKind { expected: "sampled" });
        }
        let norm_sq = g.norm_sq();
        if norm_sq == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(WindowSpec { g, norm_sq })
    }

    /// Unit-energy Gaussian `2^{1/4} exp(-pi t^2)`.
    pub fn gaussian(space: Space) -> Result<Self> {
        let c = 2f64.powf(0.25);
        WindowSpec::new(Vector::from_fn(space, |t| Complex64::new(c * (-PI * t * t).exp(), 0.0))?)
    }

    pub fn g(&self) -> &Vector {
        &self.g
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }
}

/// Uniform `(y, gamma)` lattice; field rows are frequencies, columns shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFreqGrid {
    signal: Space,
    y_min: f64,
    dy: f64,
    ny: usize,
    g_min: f64,
    dg: f64,
    ng: usize,
}

impl TimeFreqGrid {
    pub fn new(signal: Space, y_min: f64, dy: f64, ny: usize, g_min: f64, dg: f64, ng: usize) -> Result<Self> {
        if !signal.is_sampled() {
            return Err(Error::WrongSpaceKind { expected: "sampled" });
        }
        if !(dy > 0.0 && dg > 0.0 && dy.is_finite() && dg.is_finite()) {
            return Err(Error::InvalidParameter("lattice steps must be positive".into()));
        }
        if ny == 0 || ng == 0 {
            return Err(Error::InvalidParameter("lattice needs at least one node per axis".into()));
        }
        if !(y_min.is_finite() && g_min.is_finite()) {
            return Err(Error::InvalidParameter("lattice origin must be finite".into()));
        }
        Ok(TimeFreqGrid { signal, y_min, dy, ny, g_min, dg, ng })
    }

    /// Lattice covering `[y_min, y_max] x [g_min, g_max]` inclusive of both
    /// ends (up to rounding of the step count).
    pub fn covering(signal: Space, y: (f64, f64), dy: f64, gamma: (f64, f64), dg: f64) -> Result<Self> {
        if !(y.1 >= y.0 && gamma.1 >= gamma.0) {
            return Err(Error::InvalidParameter("empty rectangle".into()));
        }
        let ny = ((y.1 - y.0) / dy + 1e-9).floor() as usize + 1;
        let ng = ((gamma.1 - gamma.0) / dg + 1e-9).floor() as usize + 1;
        TimeFreqGrid::new(signal, y.0, dy, ny, gamma.0, dg, ng)
    }

    pub fn signal_space(&self) -> &Space {
        &self.signal
    }

    pub fn shift(&self, l: usize) -> f64 {
        self.y_min + l as f64 * self.dy
    }

    pub fn frequency(&self, m: usize) -> f64 {
        self.g_min + m as f64 * self.dg
    }

    pub fn node_weight(&self) -> f64 {
        self.dy * self.dg
    }

    /// `((y_min, y_max), (g_min, g_max))` of the node lattice.
    pub fn coverage(&self) -> ((f64, f64), (f64, f64)) {
        (
            (self.y_min, self.shift(self.ny - 1)),
            (self.g_min, self.frequency(self.ng - 1)),
        )
    }

    fn plan(&self) -> FreqPlan {
        let dx = self.signal.step();
        let p = 1.0 / (self.dg * dx);
        let k0 = self.g_min / self.dg;
        if (p - p.round()).abs() <= LATTICE_TOL * p && (k0 - k0.round()).abs() <= LATTICE_TOL * k0.abs().max(1.0) && p.round() >= 1.0 {
            FreqPlan::Bins { len: p.round() as usize, k0: k0.round() as i64 }
        } else {
            FreqPlan::Direct
        }
    }
}

impl FieldGrid for TimeFreqGrid {
    fn rows(&self) -> usize {
        self.ng
    }

    fn cols(&self) -> usize {
        self.ny
    }

    fn row_coord(&self, m: usize) -> f64 {
        self.frequency(m)
    }

    fn col_coord(&self, l: usize) -> f64 {
        self.shift(l)
    }

    fn weight(&self, _m: usize, _l: usize) -> f64 {
        self.node_weight()
    }

    fn csv_header(&self) -> [&'static str; 2] {
        ["y", "gamma"]
    }

    fn csv_coords(&self, m: usize, l: usize) -> [f64; 2] {
        [self.shift(l), self.frequency(m)]
    }
}

enum FreqPlan {
    /// `gamma_m = (k0 + m) / (len dx)`: a length-`len` FFT of the folded product.
    Bins { len: usize, k0: i64 },
    Direct,
}

fn bin(k0: i64, m: usize, len: usize) -> usize {
    (k0 + m as i64).rem_euclid(len as i64) as usize
}

fn check(f: &Vector, win: &WindowSpec, grid: &TimeFreqGrid) -> Result<()> {
    if !f.space().compatible(win.g.space()) {
        return Err(Error::GridMismatch(format!("signal on {} but window on {}", f.space(), win.g.space())));
    }
    if !f.space().compatible(&grid.signal) {
        return Err(Error::GridMismatch(format!("signal on {} but lattice on {}", f.space(), grid.signal)));
    }
    Ok(())
}

/// `conj(g(x_j - y))` for all grid points.
fn shifted_window(win: &WindowSpec, y: f64) -> Vec<Complex64> {
    let s = win.g.space();
    (0..s.len()).map(|j| win.g.sample_at(s.point(j) - y).conj()).collect()
}

/// One column `V_g f(y_l, .)` over all lattice frequencies.
fn column(f: &Vector, win: &WindowSpec, grid: &TimeFreqGrid, plan: &FreqPlan, l: usize) -> Vec<Complex64> {
    let s = *f.space();
    let dx = s.step();
    let xmin = s.xmin();
    let h: Vec<Complex64> = f
        .as_slice()
        .iter()
        .zip(shifted_window(win, grid.shift(l)))
        .map(|(a, b)| a * b)
        .collect();
    match *plan {
        FreqPlan::Bins { len, k0 } => {
            let mut buf = vec![ZERO; len];
            for (j, z) in h.iter().enumerate() {
                buf[j % len] += z;
            }
            fft::forward(&mut buf);
            (0..grid.ng)
                .map(|m| {
                    let gamma = grid.frequency(m);
                    buf[bin(k0, m, len)] * Complex64::from_polar(dx, -2.0 * PI * xmin * gamma)
                })
                .collect()
        }
        FreqPlan::Direct => (0..grid.ng)
            .map(|m| {
                let gamma = grid.frequency(m);
                h.iter()
                    .enumerate()
                    .fold(ZERO, |acc, (j, z)| acc + z * Complex64::from_polar(1.0, -2.0 * PI * s.point(j) * gamma))
                    * dx
            })
            .collect(),
    }
}

/// `V_g f(y_l, gamma_m)` for every lattice node; `values[m, l]`.
pub fn stft(f: &Vector, win: &WindowSpec, grid: &TimeFreqGrid) -> Result<CoefficientField<TimeFreqGrid>> {
    check(f, win, grid)?;
    let plan = grid.plan();
    let columns: Vec<Vec<Complex64>> = (0..grid.ny)
        .into_par_iter()
        .map(|l| column(f, win, grid, &plan, l))
        .collect();
    let mut values = vec![ZERO; grid.ng * grid.ny];
    for (l, col) in columns.iter().enumerate() {
        for (m, z) in col.iter().enumerate() {
            values[m * grid.ny + l] = *z;
        }
    }
    CoefficientField::new(grid.clone(), values)
}

/// `(1 / ||g||^2) sum_{m,l} dy dgamma V(y_l, gamma_m) M_{gamma_m} T_{y_l} g`.
pub fn istft(field: &CoefficientField<TimeFreqGrid>, win: &WindowSpec) -> Result<Vector> {
    let grid = field.grid();
    if !grid.signal.compatible(win.g.space()) {
        return Err(Error::GridMismatch("field and window live on different grids".into()));
    }
    let s = grid.signal;
    let n = s.len();
    let xmin = s.xmin();
    let plan = grid.plan();
    let scale = grid.node_weight() / win.norm_sq;
    let columns: Vec<Vec<Complex64>> = (0..grid.ny)
        .into_par_iter()
        .map(|l| {
            // q_j = sum_m V[m, l] exp(2 pi i x_j gamma_m)
            let q: Vec<Complex64> = match plan {
                FreqPlan::Bins { len, k0 } => {
                    let mut buf = vec![ZERO; len];
                    for m in 0..grid.ng {
                        let gamma = grid.frequency(m);
                        buf[bin(k0, m, len)] += field.get(m, l) * Complex64::from_polar(1.0, 2.0 * PI * xmin * gamma);
                    }
                    fft::inverse(&mut buf);
                    (0..n).map(|j| buf[j % len]).collect()
                }
                FreqPlan::Direct => (0..n)
                    .map(|j| {
                        let x = s.point(j);
                        (0..grid.ng).fold(ZERO, |acc, m| {
                            acc + field.get(m, l) * Complex64::from_polar(1.0, 2.0 * PI * x * grid.frequency(m))
                        })
                    })
                    .collect(),
            };
            let y = grid.shift(l);
            (0..n).map(|j| q[j] * win.g.sample_at(s.point(j) - y) * scale).collect()
        })
        .collect();
    let mut out = vec![ZERO; n];
    for col in &columns {
        for (o, z) in out.iter_mut().zip(col) {
            *o += z;
        }
    }
    Vector::new(s, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orthogonality {
    /// `sum dy dgamma V_{g1} f1 conj(V_{g2} f2)`.
    pub lhs: Complex64,
    /// `<f1, f2> <g2, g1>`.
    pub rhs: Complex64,
    /// `|lhs - rhs| / (||f1|| ||f2|| ||g1|| ||g2||)`.
    pub gap: f64,
}

pub fn orthogonality_relation(
    f1: &Vector,
    f2: &Vector,
    g1: &WindowSpec,
    g2: &WindowSpec,
    grid: &TimeFreqGrid,
) -> Result<Orthogonality> {
    let v1 = stft(f1, g1, grid)?;
    let v2 = stft(f2, g2, grid)?;
    let lhs = v1.weighted_inner(&v2)?;
    let rhs = inner(f1, f2)? * inner(&g2.g, &g1.g)?;
    let scale = f1.norm() * f2.norm() * g1.norm_sq.sqrt() * g2.norm_sq.sqrt();
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(Orthogonality { lhs, rhs, gap: (lhs - rhs).norm() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space() -> Space {
        Space::sampled(-8.0, 8.0, 256).unwrap()
    }

    fn gauss(s: Space) -> Vector {
        Vector::from_fn(s, |t| c((-PI * t * t).exp(), 0.0)).unwrap()
    }

    fn grid(s: Space) -> TimeFreqGrid {
        TimeFreqGrid::covering(s, (-6.0, 6.0), 1.0 / 16.0, (-6.0, 6.0), 1.0 / 16.0).unwrap()
    }

    #[test]
    fn gaussian_closed_form() {
        let s = space();
        let g = grid(s);
        assert!(matches!(g.plan(), FreqPlan::Bins { len: 256, k0: -96 }));
        let win = WindowSpec::new(gauss(s)).unwrap();
        let v = stft(&gauss(s), &win, &g).unwrap();
        for m in (0..g.rows()).step_by(7) {
            for l in (0..g.cols()).step_by(5) {
                let (y, gm) = (g.shift(l), g.frequency(m));
                let expect = 2f64.powf(-0.5) * (-PI * (y * y + gm * gm) / 2.0).exp();
                assert!((v.get(m, l).norm() - expect).abs() < 1e-4, "y={y} gamma={gm}");
            }
        }
    }

    #[test]
    fn direct_path_matches_bin_path() {
        let s = space();
        let win = WindowSpec::gaussian(s).unwrap();
        let f = Vector::from_fn(s, |t| c((-PI * (t - 0.5).powi(2)).exp(), t * (-PI * t * t).exp())).unwrap();
        let binned = TimeFreqGrid::new(s, -1.0, 0.25, 9, -2.0, 0.125, 33).unwrap();
        // Same nodes, but the origin is nudged off-bin so the direct sum runs.
        let off = TimeFreqGrid::new(s, -1.0, 0.25, 9, -2.0 + 1e-7, 0.125, 33).unwrap();
        assert!(matches!(off.plan(), FreqPlan::Direct));
        let (a, b) = (stft(&f, &win, &binned).unwrap(), stft(&f, &win, &off).unwrap());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-5);
        }
        let back = istft(&b, &win).unwrap();
        let back_bins = istft(&a, &win).unwrap();
        assert!(back.sub(&back_bins).unwrap().norm() < 1e-5);
    }

    #[test]
    fn zero_inputs() {
        let s = space();
        let win = WindowSpec::gaussian(s).unwrap();
        let v = stft(&Vector::zeros(s), &win, &grid(s)).unwrap();
        assert!(v.values().iter().all(|z| *z == ZERO));
        let back = istft(&CoefficientField::zeros(grid(s)), &win).unwrap();
        assert!(back.as_slice().iter().all(|z| *z == ZERO));
        assert_eq!(WindowSpec::new(Vector::zeros(s)).unwrap_err(), Error::ZeroWindow);
    }

    #[test]
    fn matched_filter_peak() {
        let s = space();
        let win = WindowSpec::gaussian(s).unwrap();
        let g = grid(s);
        let l0 = 120;
        let y0 = g.shift(l0);
        let f = Vector::from_fn(s, |t| win.g().sample_at(t - y0)).unwrap();
        let v = stft(&f, &win, &g).unwrap();
        let (m, l) = v.argmax();
        assert_eq!(l, l0);
        assert!(g.frequency(m).abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_window_scaling() {
        let s = space();
        let g = grid(s);
        let f = Vector::from_fn(s, |t| c((-PI * t * t).exp(), 0.0)).unwrap();
        let win = WindowSpec::new(gauss(s)).unwrap();
        let back = istft(&stft(&f, &win, &g).unwrap(), &win).unwrap();
        let err = back.sub(&f).unwrap().norm() / f.norm();
        assert!(err <= 0.01, "err = {err}");
        let win2 = WindowSpec::new(gauss(s).scaled(c(2.0, 0.0))).unwrap();
        let back2 = istft(&stft(&f, &win2, &g).unwrap(), &win2).unwrap();
        assert!(back2.sub(&back).unwrap().norm() < 1e-12 * f.norm());
    }

    #[test]
    fn conjugate_symmetry_for_real_inputs() {
        let s = space();
        let win = WindowSpec::new(gauss(s)).unwrap();
        let g = grid(s);
        let f = Vector::from_fn(s, |t| c((-PI * (t - 1.0).powi(2) / 2.0).exp() * (5.0 * t).cos(), 0.0)).unwrap();
        let v = stft(&f, &win, &g).unwrap();
        let rows = g.rows();
        for m in 0..rows {
            let mirror = rows - 1 - m;
            assert!((g.frequency(m) + g.frequency(mirror)).abs() < 1e-12);
            for l in 0..g.cols() {
                assert!((v.get(m, l) - v.get(mirror, l).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn translation_covariance_up_to_phase() {
        let s = space();
        let win = WindowSpec::new(gauss(s)).unwrap();
        let g = grid(s);
        let f = Vector::from_fn(s, |t| c((-PI * t * t).exp() * (1.0 + t), 0.0)).unwrap();
        let shift_cells = 8;
        let dy = shift_cells as f64 / 16.0;
        let moved = Vector::from_fn(s, |t| f.sample_at(t - dy)).unwrap();
        let (v, w) = (stft(&f, &win, &g).unwrap(), stft(&moved, &win, &g).unwrap());
        for m in 0..g.rows() {
            for l in 0..g.cols() - shift_cells {
                let a = v.get(m, l);
                let b = w.get(m, l + shift_cells);
                assert!((a.norm() - b.norm()).abs() < 1e-12);
                let phase = Complex64::from_polar(1.0, -2.0 * PI * dy * g.frequency(m));
                assert!((b - a * phase).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tight_frame_energy() {
        let s = space();
        let win = WindowSpec::gaussian(s).unwrap();
        let f = Vector::from_fn(s, |t| c((-PI * (t + 0.7).powi(2)).exp(), (t - 0.2) * (-PI * t * t * 0.8).exp())).unwrap();
        let v = stft(&f, &win, &grid(s)).unwrap();
        let ratio = v.energy() / (win.norm_sq() * f.norm_sq());
        assert!((ratio - 1.0).abs() < 1e-3, "ratio = {ratio}");
    }

    #[test]
    fn orthogonality_relation_examples() {
        let s = space();
        let even = gauss(s);
        let odd = Vector::from_fn(s, |t| c(t * (-PI * t * t).exp(), 0.0)).unwrap();
        let g = WindowSpec::new(gauss(s)).unwrap();
        let wide = WindowSpec::new(Vector::from_fn(s, |t| c((-PI * t * t / 2.0).exp(), 0.0)).unwrap()).unwrap();

        let orth = orthogonality_relation(&even, &odd, &g, &wide, &grid(s)).unwrap();
        assert!(orth.rhs.norm() < 1e-15);
        assert!(orth.gap <= 1e-4, "gap = {}", orth.gap);

        let tight = orthogonality_relation(&odd, &odd, &wide, &wide, &grid(s)).unwrap();
        let expected = odd.norm_sq() * wide.norm_sq();
        assert!((tight.lhs - expected).norm() <= 1e-4 * expected);

        // <f, f> <g, g> with every input exp(-pi t^2), each factor 2^{-1/2}.
        let all = orthogonality_relation(&even, &even, &g, &g, &grid(s)).unwrap();
        assert!((all.rhs - c(0.5, 0.0)).norm() < 1e-12);
        assert!((all.lhs - c(0.5, 0.0)).norm() < 1e-4);
    }
}
