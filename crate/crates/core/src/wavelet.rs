//! Continuous wavelet transform as a tight frame over `(R \ {0}) x R` with
//! measure `da db / a^2`.
//!
//! `W f(a, b) = <f, psi^{a,b}>` with `psi^{a,b}(x) = |a|^{-1/2} psi((x - b) / a)`.
//! For admissible `psi`, `C_psi = integral |psi_hat|^2 / |gamma| dgamma` is
//! finite and `integral integral |W f|^2 da db / a^2 = C_psi ||f||^2`.
//! When only positive scales are used the identity holds with `C_psi / 2`
//! for real wavelets (and for any wavelet applied to real signals).
//!
//! The scale axis is truncated to `[a_min, a_max]`, log-spaced with a fixed
//! number of voices per octave. Each scale cell carries its exact
//! `da / a^2` mass, evaluated at the geometric midpoint. Shifts lie on the
//! signal lattice, and each scale row is one circular correlation done with
//! the FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
pub use crate::field::{CoefficientField, FieldGrid};
use crate::frame::{DiscretizedFrame, Node};
use crate::hilbert::{dft, Space, Vector};

/// Relative size of `|psi_hat(0)|` above which the zero mode counts as present.
pub const ZERO_MODE_TOL: f64 = 1e-6;
/// Relative growth of `C_psi` under frequency refinement that signals divergence.
pub const REFINEMENT_GROWTH_TOL: f64 = 1e-3;
/// Share of `C_psi` from the two bins next to `gamma = 0` that raises the flag.
pub const NEAR_DIVERGENCE_SHARE: f64 = 0.1;
/// Largest `|C_+ - C_-| / C_psi` for which positive scales alone are tight.
pub const BALANCE_TOL: f64 = 1e-3;

/// `psi(t) = (1 - t^2) exp(-t^2 / 2)`; `C_psi = 2 pi` under this crate's
/// Fourier convention.
pub fn mexican_hat(space: Space) -> Result<Vector> {
    Vector::from_fn(space, |t| Complex64::new((1.0 - t * t) * (-0.5 * t * t).exp(), 0.0))
}

/// `psi(t) = pi^{-1/4} exp(i omega0 t) exp(-t^2 / 2)`. Not exactly zero-mean;
/// the residual mean is `~exp(-omega0^2 / 2)`.
pub fn morlet(space: Space, omega0: f64) -> Result<Vector> {
    let norm = PI.powf(-0.25);
    Vector::from_fn(space, |t| Complex64::from_polar(norm * (-0.5 * t * t).exp(), omega0 * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// `sum_{gamma != 0} |psi_hat|^2 / |gamma| dgamma`.
    pub c_psi: f64,
    /// Contribution of `gamma > 0`.
    pub c_positive: f64,
    /// Contribution of `gamma < 0`.
    pub c_negative: f64,
    /// `|psi_hat(0)| / max |psi_hat|`.
    pub zero_mode: f64,
    /// `(C_refined - C) / C_refined` after halving the frequency step.
    pub refinement_growth: f64,
    /// The two bins adjacent to `gamma = 0` carry more than 10% of `C_psi`.
    pub near_divergence: bool,
}

struct AdmissibilitySums {
    total: f64,
    positive: f64,
    negative: f64,
    near_zero: f64,
    zero_mode: f64,
    peak: f64,
}

fn admissibility_sums(psi: &Vector) -> Result<AdmissibilitySums> {
    let hat = dft(psi)?;
    let fs = *hat.space();
    let dg = fs.step();
    let zero_bin = fs.len() / 2;
    let mut sums = AdmissibilitySums {
        total: 0.0,
        positive: 0.0,
        negative: 0.0,
        near_zero: 0.0,
        zero_mode: hat.as_slice()[zero_bin].norm(),
        peak: 0.0,
    };
    for (p, z) in hat.as_slice().iter().enumerate() {
        sums.peak = sums.peak.max(z.norm());
        if p == zero_bin {
            continue;
        }
        let gamma = fs.point(p);
        let term = z.norm_sqr() / gamma.abs() * dg;
        if gamma > 0.0 {
            sums.positive += term;
        } else {
            sums.negative += term;
        }
        if p + 1 == zero_bin || p == zero_bin + 1 {
            sums.near_zero += term;
        }
    }
    sums.total = sums.positive + sums.negative;
    Ok(sums)
}

/// Zero-pads a sampled function to twice its length, centred.
fn zero_pad_double(psi: &Vector) -> Result<Vector> {
    let s = *psi.space();
    let n = s.len();
    let dx = s.step();
    let left = n / 2;
    let xmin = s.xmin() - left as f64 * dx;
    let padded = Space::sampled(xmin, xmin + 2.0 * n as f64 * dx, 2 * n)?;
    let mut data = vec![Complex64::new(0.0, 0.0); 2 * n];
    data[left..left + n].copy_from_slice(psi.as_slice());
    Vector::new(padded, data)
}

/// Riemann sum for `C_psi` on the DFT grid, with a divergence test that
/// repeats the sum at half the frequency step.
pub fn admissibility(psi: &Vector) -> Result<Admissibility> {
    if !psi.space().is_sampled() {
        return Err(Error::WrongSpaceKind { expected: "sampled" });
    }
    if psi.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let coarse = admissibility_sums(psi)?;
    let fine = admissibility_sums(&zero_pad_double(psi)?)?;
    let growth = (fine.total - coarse.total) / fine.total;
    let zero_mode = coarse.zero_mode / coarse.peak;
    if zero_mode > ZERO_MODE_TOL && growth > REFINEMENT_GROWTH_TOL {
        return Err(Error::NotAdmissible { zero_mode, growth });
    }
    Ok(Admissibility {
        c_psi: coarse.total,
        c_positive: coarse.positive,
        c_negative: coarse.negative,
        zero_mode,
        refinement_growth: growth,
        near_divergence: coarse.near_zero > NEAR_DIVERGENCE_SHARE * coarse.total,
    })
}

/// A sampled mother wavelet and, once computed, its admissibility data.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSpec {
    psi: Vector,
    admissibility: Option<Admissibility>,
}

impl WaveletSpec {
    pub fn new(psi: Vector) -> Result<Self> {
        if !psi.space().is_sampled() {
            return Err(Error::WrongSpaceKind { expected: "sampled" });
        }
        if psi.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(WaveletSpec { psi, admissibility: None })
    }

    /// Builds the spec and computes `C_psi`.
    pub fn admissible(psi: Vector) -> Result<Self> {
        let mut w = WaveletSpec::new(psi)?;
        w.admissibility = Some(admissibility(&w.psi)?);
        Ok(w)
    }

    pub fn psi(&self) -> &Vector {
        &self.psi
    }

    pub fn admissibility(&self) -> Option<&Admissibility> {
        self.admissibility.as_ref()
    }

    pub fn c_psi(&self) -> Option<f64> {
        self.admissibility.map(|a| a.c_psi)
    }

    /// The constant of the energy identity on `grid`: `C_psi` when negative
    /// scales are included, `C_psi / 2` otherwise. Positive scales alone
    /// form a tight frame only when `psi_hat` carries equal weight on both
    /// half-lines; one-sided wavelets such as Morlet need a mirrored grid.
    pub fn frame_constant(&self, grid: &ScaleShiftGrid) -> Result<f64> {
        let adm = self.admissibility.ok_or(Error::MissingAdmissibility)?;
        if grid.mirrored {
            return Ok(adm.c_psi);
        }
        let imbalance = (adm.c_positive - adm.c_negative).abs() / adm.c_psi;
        if imbalance > BALANCE_TOL {
            return Err(Error::InvalidParameter(format!(
                "wavelet spectrum is unbalanced (|C+ - C-| / C = {imbalance:.3e}); mirror the scale grid"
            )));
        }
        Ok(0.5 * adm.c_psi)
    }
}

/// `|a|^{-1/2} psi((x - b) / a)` on psi's grid, by linear interpolation,
/// zero outside the sampled range.
pub fn dilate_translate(psi: &Vector, a: f64, b: f64) -> Result<Vector> {
    if a == 0.0 {
        return Err(Error::ZeroScale);
    }
    let s = a.abs().powf(-0.5);
    Vector::from_fn(*psi.space(), |x| psi.sample_at((x - b) / a) * s)
}

/// Log-spaced scales times shifts on the signal lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleShiftGrid {
    signal: Space,
    a_min: f64,
    a_max: f64,
    voices: usize,
    mirrored: bool,
    stride: usize,
    /// Signed scales: the positive branch ascending, then its mirror.
    scales: Vec<f64>,
    widths: Vec<f64>,
}

impl ScaleShiftGrid {
    /// Scale cells with edges `a_min 2^{i / voices}` (the last edge clamped
    /// to `a_max`), nodes at geometric midpoints, and shifts at every
    /// `stride`-th point of the signal grid.
    pub fn log_spaced(signal: Space, a_min: f64, a_max: f64, voices: usize, stride: usize, mirror: bool) -> Result<Self> {
        if !signal.is_sampled() {
            return Err(Error::WrongSpaceKind { expected: "sampled" });
        }
        if !(a_min > 0.0 && a_max > a_min && a_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale range [{a_min}, {a_max}] must satisfy 0 < a_min < a_max"
            )));
        }
        if voices == 0 {
            return Err(Error::InvalidParameter("voices must be >= 1".into()));
        }
        if stride == 0 || signal.len() % stride != 0 {
            return Err(Error::InvalidParameter(format!(
                "shift stride {stride} must divide the signal length {}",
                signal.len()
            )));
        }
        let cells = ((a_max / a_min).log2() * voices as f64 - 1e-9).ceil().max(1.0) as usize;
        let edge = |i: usize| {
            if i >= cells {
                a_max
            } else {
                a_min * 2f64.powf(i as f64 / voices as f64)
            }
        };
        let mut scales = Vec::with_capacity(cells * if mirror { 2 } else { 1 });
        let mut widths = Vec::with_capacity(scales.capacity());
        for i in 0..cells {
            let (lo, hi) = (edge(i), edge(i + 1));
            scales.push((lo * hi).sqrt());
            widths.push(hi - lo);
        }
        if mirror {
            for i in 0..cells {
                scales.push(-scales[i]);
                widths.push(widths[i]);
            }
        }
        Ok(ScaleShiftGrid { signal, a_min, a_max, voices, mirrored: mirror, stride, scales, widths })
    }

    pub fn signal_space(&self) -> &Space {
        &self.signal
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    pub fn voices(&self) -> usize {
        self.voices
    }

    pub fn scale_range(&self) -> (f64, f64) {
        (self.a_min, self.a_max)
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn db(&self) -> f64 {
        self.stride as f64 * self.signal.step()
    }

    /// Lattice index of shift `l`.
    pub fn shift_index(&self, l: usize) -> usize {
        l * self.stride
    }

    pub fn shifts(&self) -> Vec<f64> {
        (0..self.cols()).map(|l| self.col_coord(l)).collect()
    }

    /// `da / a^2` mass of scale cell `i`.
    pub fn scale_mass(&self, i: usize) -> f64 {
        self.widths[i] / (self.scales[i] * self.scales[i])
    }
}

impl FieldGrid for ScaleShiftGrid {
    fn rows(&self) -> usize {
        self.scales.len()
    }

    fn cols(&self) -> usize {
        self.signal.len() / self.stride
    }

    fn row_coord(&self, i: usize) -> f64 {
        self.scales[i]
    }

    fn col_coord(&self, l: usize) -> f64 {
        self.signal.point(self.shift_index(l))
    }

    fn weight(&self, i: usize, _l: usize) -> f64 {
        self.scale_mass(i) * self.db()
    }

    fn csv_header(&self) -> [&'static str; 2] {
        ["a", "b"]
    }

    fn csv_coords(&self, i: usize, l: usize) -> [f64; 2] {
        [self.row_coord(i), self.col_coord(l)]
    }
}

/// Samples of `psi^{a,0}` at circular lattice offsets `m dx`, `m` taken in
/// `[-n/2, n/2)`.
fn circular_kernel(psi: &Vector, a: f64) -> Vec<Complex64> {
    let n = psi.len();
    let dx = psi.space().step();
    let s = a.abs().powf(-0.5);
    (0..n)
        .map(|m| {
            let offset = if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 };
            psi.sample_at(offset * dx / a) * s
        })
        .collect()
}

fn check_grid(f: &Vector, w: &WaveletSpec, grid: &ScaleShiftGrid) -> Result<()> {
    if !f.space().compatible(w.psi.space()) {
        return Err(Error::GridMismatch(format!("signal on {} but wavelet on {}", f.space(), w.psi.space())));
    }
    if !f.space().compatible(&grid.signal) {
        return Err(Error::GridMismatch(format!("signal on {} but shifts on {}", f.space(), grid.signal)));
    }
    Ok(())
}

/// `W f(a_i, b_l) = <f, psi^{a_i, b_l}>` for every grid node.
pub fn cwt(f: &Vector, w: &WaveletSpec, grid: &ScaleShiftGrid) -> Result<CoefficientField<ScaleShiftGrid>> {
    check_grid(f, w, grid)?;
    let n = f.len();
    let dx = f.space().step();
    let mut spectrum = f.as_slice().to_vec();
    fft::forward(&mut spectrum);
    let cols = grid.cols();
    let rows: Vec<Vec<Complex64>> = grid
        .scales
        .par_iter()
        .map(|&a| {
            let mut k = circular_kernel(&w.psi, a);
            fft::forward(&mut k);
            let mut prod: Vec<Complex64> = spectrum.iter().zip(&k).map(|(x, y)| x * y.conj()).collect();
            fft::inverse(&mut prod);
            let scale = dx / n as f64;
            (0..cols).map(|l| prod[grid.shift_index(l)] * scale).collect()
        })
        .collect();
    CoefficientField::new(grid.clone(), rows.concat())
}

/// `(1 / C) sum_il w_il W(a_i, b_l) psi^{a_i, b_l}` with `C` the frame
/// constant of the grid.
pub fn icwt(field: &CoefficientField<ScaleShiftGrid>, w: &WaveletSpec) -> Result<Vector> {
    let grid = field.grid();
    let constant = w.frame_constant(grid)?;
    if !grid.signal.compatible(w.psi.space()) {
        return Err(Error::GridMismatch("field and wavelet live on different grids".into()));
    }
    let n = grid.signal.len();
    let db = grid.db();
    let contributions: Vec<Vec<Complex64>> = (0..grid.rows())
        .into_par_iter()
        .map(|i| {
            let mut k = circular_kernel(&w.psi, grid.scales[i]);
            fft::forward(&mut k);
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for (l, z) in field.row(i).iter().enumerate() {
                v[grid.shift_index(l)] = *z;
            }
            fft::forward(&mut v);
            for (vi, ki) in v.iter_mut().zip(&k) {
                *vi *= ki;
            }
            fft::inverse(&mut v);
            let s = grid.scale_mass(i) * db / (n as f64 * constant);
            v.into_iter().map(|z| z * s).collect()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for row in &contributions {
        for (o, z) in out.iter_mut().zip(row) {
            *o += z;
        }
    }
    Vector::new(grid.signal, out)
}

/// `(1 / C) sum w |W f|^2 / ||f||^2`, which is 1 for an exact tight frame.
pub fn energy_ratio(field: &CoefficientField<ScaleShiftGrid>, w: &WaveletSpec, f: &Vector) -> Result<f64> {
    let constant = w.frame_constant(field.grid())?;
    let norm_sq = f.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(field.energy() / (constant * norm_sq))
}

/// The wavelet system on `grid` as an explicit discretized frame. The
/// vectors are the periodized atoms used by [`cwt`], so analysis with this
/// frame reproduces the transform. Only for small grids.
pub fn wavelet_frame(w: &WaveletSpec, grid: &ScaleShiftGrid) -> Result<DiscretizedFrame> {
    let space = grid.signal;
    if !space.compatible(w.psi.space()) {
        return Err(Error::GridMismatch("grid and wavelet live on different grids".into()));
    }
    let n = space.len();
    let mut nodes = Vec::with_capacity(grid.rows() * grid.cols());
    let mut weights = Vec::with_capacity(nodes.capacity());
    let mut rows = Vec::with_capacity(nodes.capacity() * n);
    for i in 0..grid.rows() {
        let k = circular_kernel(&w.psi, grid.scales[i]);
        for l in 0..grid.cols() {
            nodes.push(Node::ScaleShift { a: grid.row_coord(i), b: grid.col_coord(l) });
            weights.push(grid.weight(i, l));
            let shift = grid.shift_index(l);
            rows.extend((0..n).map(|j| k[(j + n - shift) % n]));
        }
    }
    DiscretizedFrame::from_rows(space, nodes, weights, rows)
}
