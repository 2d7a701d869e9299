//! Built-in verification suite: one entry per acceptance property, with
//! deterministic random inputs and machine-readable metrics.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::construct::{
    bessel_only_map, grouped_step_frame, infinite_members_finite_dim, step_frame, unbounded_bessel,
    unbounded_bessel_with_bound, unbounded_frame, DiscreteSystem,
};
use crate::error::{Error, Result};
use crate::frame::{
    analysis, dual_reconstruct, frame_bounds_with, frame_operator, sigma_finite_support_with_bound,
    synthesis, BoundsOptions, DiscretizedFrame, ReconstructOptions, Verdict,
};
use crate::field::FieldGrid;
use crate::gabor::{orthogonality_relation, stft, TimeFreqGrid, WindowSpec};
use crate::hilbert::{Space, Vector};
use crate::measure::make_partition;
use crate::wavelet::{admissibility, cwt, energy_ratio, icwt, mexican_hat, ScaleShiftGrid, WaveletSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteScale {
    Small,
    Full,
}

impl std::str::FromStr for SuiteScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(SuiteScale::Small),
            "full" => Ok(SuiteScale::Full),
            other => Err(Error::InvalidParameter(format!("unknown suite scale '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Relative error allowed in every reconstruction check.
    pub tol_recon: f64,
    pub bounds: BoundsOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 7, tol_recon: 1e-12, bounds: BoundsOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub scale: SuiteScale,
    pub config: SuiteConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Number of entries in a suite report.
pub const CHECK_COUNT: usize = 11;

const NAMES: [&str; CHECK_COUNT] = [
    "parseval_construction",
    "bound_transfer",
    "factorization",
    "sigma_finite_support",
    "bessel_only",
    "unbounded_bessel_refinement",
    "unbounded_frame",
    "cwt_tight_frame",
    "admissibility",
    "stft_orthogonality",
    "determinism",
];

/// Seeded generators for test inputs.
pub mod random {
    use super::*;

    /// A ChaCha stream derived from `seed`; `stream` separates the checks.
    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn vector(rng: &mut ChaCha8Rng, space: Space) -> Vector {
        let data = (0..space.len()).map(|_| complex_normal(rng)).collect();
        Vector::new(space, data).expect("finite samples")
    }

    /// Log-uniform weights in `[e^-3, e^3]`.
    pub fn weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
        (0..k).map(|_| rng.random_range(-3.0..3.0f64).exp()).collect()
    }

    /// Haar-like unitary from the QR factorization of a complex Gaussian matrix.
    pub fn unitary(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
        m.qr().q()
    }

    /// The columns of `u` as a discrete system.
    pub fn columns(u: &DMatrix<Complex64>) -> DiscreteSystem {
        let s = Space::coordinate(u.nrows()).expect("nonzero dimension");
        let vectors = u
            .column_iter()
            .map(|c| Vector::new(s, c.iter().copied().collect()).expect("finite"))
            .collect();
        DiscreteSystem::new(vectors).expect("same space")
    }

    /// `count` Gaussian vectors in `C^dim`, scaled by `1/sqrt(count)`.
    pub fn system(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> DiscreteSystem {
        let s = Space::coordinate(dim).expect("nonzero dimension");
        let scale = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
        let vectors = (0..count).map(|_| vector(rng, s).scaled(scale)).collect();
        DiscreteSystem::new(vectors).expect("same space")
    }

    /// A random frame for `C^dim` with between `2 dim` and `3 dim` members.
    pub fn frame_system(rng: &mut ChaCha8Rng, dim: usize) -> DiscreteSystem {
        let count = rng.random_range(2 * dim..=3 * dim);
        system(rng, dim, count)
    }
}

struct Check {
    passed: bool,
    metrics: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { passed: true, metrics: BTreeMap::new(), notes: Vec::new() }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_owned(), value);
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            if self.notes.len() < 8 {
                self.notes.push(msg());
            }
        }
    }
}

fn finish(id: u32, outcome: Result<Check>) -> CheckResult {
    let name = NAMES[id as usize - 1].to_owned();
    match outcome {
        Ok(c) => CheckResult {
            id,
            name,
            passed: c.passed,
            metrics: c.metrics,
            detail: if c.passed { "ok".into() } else { c.notes.join("; ") },
        },
        Err(e) => CheckResult { id, name, passed: false, metrics: BTreeMap::new(), detail: format!("error: {e}") },
    }
}

fn bounds_of(sys: &DiscreteSystem, opts: &BoundsOptions) -> (f64, f64) {
    let r = frame_bounds_with(&sys.counting_frame(), opts);
    (r.lower, r.upper)
}

/// Step frames over random orthonormal bases are Parseval and reconstruct exactly.
fn parseval_construction(scale: SuiteScale, cfg: &SuiteConfig) -> Result<Check> {
    let (dims, reps): (Vec<usize>, usize) = match scale {
        SuiteScale::Full => ((2..=64).collect(), 20),
        SuiteScale::Small => (vec![2, 3, 5, 8, 16, 32, 64], 4),
    };
    let mut rng = random::rng(cfg.seed, 1);
    let opts = ReconstructOptions { tol_recon: cfg.tol_recon, bounds: cfg.bounds };
    let mut c = Check::new();
    let (mut bound_dev, mut synth_err, mut dual_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut cases = 0;
    for &d in &dims {
        for _ in 0..reps {
            let sys = random::columns(&random::unitary(&mut rng, d));
            let part = make_partition(&random::weights(&mut rng, d))?;
            let fr = step_frame(&part, &sys)?;
            let r = frame_bounds_with(&fr, &cfg.bounds);
            bound_dev = bound_dev.max((r.lower - 1.0).abs()).max((r.upper - 1.0).abs());
            c.require(r.parseval, || format!("dim {d}: not Parseval (A = {}, B = {})", r.lower, r.upper));

            let f = random::vector(&mut rng, *sys.space());
            let back = synthesis(&fr, &analysis(&fr, &f)?)?;
            synth_err = synth_err.max(back.sub(&f)?.norm() / f.norm());
            match dual_reconstruct(&fr, &f, &opts) {
                Ok(rec) => dual_err = dual_err.max(rec.residual),
                Err(Error::SolverDiverged { residual, .. }) => dual_err = dual_err.max(residual),
                Err(e) => return Err(e),
            }
            cases += 1;
        }
    }
    c.metric("cases", cases as f64);
    c.metric("max_bound_deviation", bound_dev);
    c.metric("max_synthesis_error", synth_err);
    c.metric("max_dual_residual", dual_err);
    c.require(bound_dev <= 1e-10, || format!("bound deviation {bound_dev:e} > 1e-10"));
    c.require(synth_err <= cfg.tol_recon, || format!("synthesis error {synth_err:e} > tol_recon"));
    c.require(dual_err <= cfg.tol_recon, || format!("dual residual {dual_err:e} > tol_recon"));
    Ok(c)
}

/// Step frames certify the bounds of the discrete system whatever the weights.
fn bound_transfer(scale: SuiteScale, cfg: &SuiteConfig) -> Result<Check> {
    let count = match scale {
        SuiteScale::Full => 50,
        SuiteScale::Small => 12,
    };
    let mut rng = random::rng(cfg.seed, 2);
    let mut c = Check::new();
    let mut dev = 0.0f64;
    for _ in 0..count {
        let d = rng.random_range(2..=32);
        let sys = random::frame_system(&mut rng, d);
        let (lo, hi) = bounds_of(&sys, &cfg.bounds);
        for _ in 0..2 {
            let part = make_partition(&random::weights(&mut rng, sys.len()))?;
            let r = frame_bounds_with(&step_frame(&part, &sys)?, &cfg.bounds);
            dev = dev.max((r.lower - lo).abs()).max((r.upper - hi).abs());
            c.require(r.verdict == Verdict::Frame, || format!("dim {d}: verdict {:?}", r.verdict));
        }
    }
    c.metric("frames", count as f64);
    c.metric("max_bound_deviation", dev);
    c.require(dev <= 1e-10, || format!("bound deviation {dev:e} > 1e-10"));
    Ok(c)
}

/// `S f = T (T* f)` with `S` assembled as a matrix.
fn factorization(scale: SuiteScale, cfg: &SuiteConfig) -> Result<Check> {
    let frames = match scale {
        SuiteScale::Full => 10,
        SuiteScale::Small => 4,
    };
    let mut rng = random::rng(cfg.seed, 3);
    let mut c = Check::new();
    let mut worst = 0.0f64;
    for _ in 0..frames {
        let d = rng.random_range(2..=32);
        let sys = random::frame_system(&mut rng, d);
        let fr = step_frame(&make_partition(&random::weights(&mut rng, sys.len()))?, &sys)?;
        let s = frame_operator(&fr)?;
        for _ in 0..100 {
            let f = random::vector(&mut rng, *fr.space());
            let sf = &s * nalgebra::DVector::from_column_slice(f.as_slice());
            let tt = synthesis(&fr, &analysis(&fr, &f)?)?;
            let diff: f64 = sf.iter().zip(tt.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(diff / f.norm());
        }
    }
    c.metric("frames", frames as f64);
    c.metric("max_relative_gap", worst);
    c.require(worst <= 1e-12, || format!("gap {worst:e} > 1e-12"));
    Ok(c)
}

/// Level sets of analysis coefficients have bounded measure and are nested.
fn sigma_finite_support(scale: SuiteScale, cfg: &SuiteConfig) -> Result<Check> {
    let mut rng = random::rng(cfg.seed, 4);
    let mut maps: Vec<(&str, DiscretizedFrame)> = Vec::new();
    let eight = random::columns(&random::unitary(&mut rng, 8));
    maps.push(("parseval", step_frame(&make_partition(&random::weights(&mut rng, 8))?, &eight)?));
    let sys = random::frame_system(&mut rng, 6);
    maps.push(("random", step_frame(&make_partition(&random::weights(&mut rng, sys.len()))?, &sys)?));
    let four = random::system(&mut rng, 16, 4);
    maps.push(("bessel_only", bessel_only_map(&make_partition(&random::weights(&mut rng, 4))?, &four)?));
    maps.push(("infinite_members", infinite_members_finite_dim(3, 12, 0.8)?.counting_frame()));
    let h = Vector::from_real(Space::coordinate(2)?, &[0.6, 0.8])?;
    maps.push(("unbounded", unbounded_bessel(&h, 20.0, 4000)?));
    let samples = match scale {
        SuiteScale::Full => 20,
        SuiteScale::Small => 8,
    };

    let mut c = Check::new();
    let mut worst_ratio = 0.0f64;
    let mut levels = 0;
    for (label, fr) in &maps {
        let b = frame_bounds_with(fr, &cfg.bounds).upper;
        for _ in 0..samples {
            let f = random::vector(&mut rng, *fr.space());
            let target = rng.random_range(0.3..3.0);
            let f = f.scaled(Complex64::new(target / f.norm(), 0.0));
            let ks = sigma_finite_support_with_bound(fr, &f, 10, b)?;
            for (n, level) in ks.iter().enumerate() {
                levels += 1;
                worst_ratio = worst_ratio.max(level.mass / level.bound);
                c.require(level.within_bound(), || {
                    format!("{label}: mu(K_{}) = {} > {}", level.n, level.mass, level.bound)
                });
                if let Some(next) = ks.get(n + 1) {
                    let nested = level.nodes.iter().all(|j| next.nodes.binary_search(j).is_ok());
                    c.require(nested, || format!("{label}: K_{} not inside K_{}", level.n, next.n));
                }
            }
        }
    }
    c.metric("maps", maps.len() as f64);
    c.metric("levels", levels as f64);
    c.metric("max_mass_over_bound", worst_ratio);
    Ok(c)
}

/// Fewer cells than dimensions: a Bessel map with the discrete Bessel bound.
fn bessel_only(scale: SuiteScale, cfg: &SuiteConfig) -> Result<Check> {
    let reps = match scale {
        SuiteScale::Full => 10,
        SuiteScale::Small => 3,
    };
    let mut rng = random::rng(cfg.seed, 5);
    let mut c = Check::new();
    let mut dev = 0.0f64;
    for _ in 0..reps {
        let sys = random::system(&mut rng, 16, 4);
        let (_, hi) = bounds_of(&sys, &cfg.bounds);
        let fr = bessel_only_map(&make_partition(&random::weights(&mut rng, 4))?, &sys)?;
        let r = frame_bounds_with(&fr, &cfg.bounds);
        dev = dev.max((r.upper - hi).abs());
        c.require(r.verdict == Verdict::BesselOnly, || format!("verdict {:?}", r.verdict));
    }
    c.metric("maps", reps as f64);
    c.metric("max_bound_deviation", dev);
    c.require(dev <= 1e-10, || format!("Bessel bound deviation {dev:e} > 1e-10"));
    Ok(c)
}

const UNBOUNDED_HALF_WIDTH: f64 = 200.0;
const UNBOUNDED_RESOLUTIONS: [usize; 5] = [256, 512, 1024, 2048, 4096];

fn unbounded_vector() -> Result<Vector> {
    Vector::new(Space::coordinate(2)?, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
}

/// Bessel bound of the integrable-but-unbounded profile under grid refinement.
fn unbounded_bessel_refinement(cfg: &SuiteConfig) -> Result<Check> {
    let h = unbounded_vector()?;
    let limit = 6.0 * h.norm_sq();
    let mut c = Check::new();
    let mut bounds = Vec::new();
    let mut norms = Vec::new();
    for &m in &UNBOUNDED_RESOLUTIONS {
        let k = (2.0 * UNBOUNDED_HALF_WIDTH) as usize * m;
        let fr = unbounded_bessel(&h, UNBOUNDED_HALF_WIDTH, k)?;
        let r = frame_bounds_with(&fr, &cfg.bounds);
        c.metric(&format!("B_h_1_over_{m}"), r.upper);
        bounds.push(r.upper);
        norms.push(fr.max_node_norm());
    }
    let monotone = bounds.windows(2).all(|w| w[1] > w[0] && w[1] <= limit);
    c.require(monotone, || format!("bounds not increasing towards {limit}: {bounds:?}"));
    let gap = (limit - bounds[bounds.len() - 1]) / limit;
    c.metric("limit", limit);
    c.metric("final_relative_gap", gap);
    c.require(gap.abs() <= 0.01, || format!("final bound off by {:.3}%", 100.0 * gap));
    // 4096 / 256 = 16
    let growth = norms[4] / norms[0];
    c.metric("node_norm_growth_16x", growth);
    c.require(growth >= 2.0 * (1.0 - 1e-12), || format!("max node norm grew by {growth} < 2"));
    Ok(c)
}

/// Difference of a small Bessel map and a Parseval frame remains a frame.
fn unbounded_frame_check(cfg: &SuiteConfig) -> Result<Check> {
    let h = unbounded_vector()?;
    let b1 = 0.01;
    let f = unbounded_bessel_with_bound(&h, 20.0, 8000, b1)?;
    let g = grouped_step_frame(*f.space(), f.nodes(), f.weights(), &DiscreteSystem::standard_basis(2)?)?;
    let rg = frame_bounds_with(&g, &cfg.bounds);
    let d = unbounded_frame(&f, &g)?;
    let r = frame_bounds_with(&d, &cfg.bounds);
    let mut c = Check::new();
    c.metric("B1", b1);
    c.metric("A2", rg.lower);
    c.metric("B2", rg.upper);
    c.metric("A", r.lower);
    c.metric("B", r.upper);
    c.metric("max_node_norm", d.max_node_norm());
    let floor = (rg.lower.sqrt() - b1.sqrt()).powi(2);
    c.require(r.verdict == Verdict::Frame, || format!("verdict {:?}", r.verdict));
    c.require(r.lower >= floor - 0.02, || format!("A = {} < {}", r.lower, floor - 0.02));
    c.require(r.upper <= b1 + rg.upper + 0.02, || format!("B = {} > {}", r.upper, b1 + rg.upper + 0.02));
    Ok(c)
}

/// Two Gabor atoms inside the covered band of the acceptance scale grid.
pub fn cwt_test_signal(space: Space) -> Result<Vector> {
    Vector::from_fn(space, |t| {
        let a = (-PI * ((t + 40.0) / 40.0).powi(2)).exp() * (2.0 * PI * 0.1 * t).cos();
        let b = 0.7 * (-PI * ((t - 50.0) / 30.0).powi(2)).exp() * (2.0 * PI * 0.15 * t + 0.3).cos();
        Complex64::new(a + b, 0.0)
    })
}

fn cwt_tight_frame() -> Result<Check> {
    let s = Space::sampled(-256.0, 256.0, 4096)?;
    let w = WaveletSpec::admissible(mexican_hat(s)?)?;
    let grid = ScaleShiftGrid::log_spaced(s, 0.25, 8.0, 16, 1, true)?;
    let f = cwt_test_signal(s)?;
    let field = cwt(&f, &w, &grid)?;
    let ratio = energy_ratio(&field, &w, &f)?;
    let back = icwt(&field, &w)?;
    let err = back.sub(&f)?.norm() / f.norm();
    let mut c = Check::new();
    c.metric("energy_ratio", ratio);
    c.metric("reconstruction_error", err);
    c.require((0.98..=1.02).contains(&ratio), || format!("energy ratio {ratio}"));
    c.require(err <= 0.02, || format!("icwt error {err}"));
    Ok(c)
}

/// `|psi_hat(gamma)|^2 / |gamma|` for the Mexican hat, summed by the
/// midpoint rule with step `dg` over `(0, 8]` and doubled.
pub fn mexican_hat_constant_oracle(dg: f64) -> f64 {
    let steps = (8.0 / dg).round() as usize;
    let half: f64 = (0..steps)
        .map(|k| {
            let g = (k as f64 + 0.5) * dg;
            let hat = (2.0 * PI).sqrt() * 4.0 * PI * PI * g * g * (-2.0 * PI * PI * g * g).exp();
            hat * hat / g * dg
        })
        .sum();
    2.0 * half
}

fn admissibility_check() -> Result<Check> {
    let s = Space::sampled(-64.0, 64.0, 4096)?;
    let adm = admissibility(&mexican_hat(s)?)?;
    let oracle = mexican_hat_constant_oracle(s.dual()?.step() / 10.0);
    let rel = (adm.c_psi - oracle).abs() / oracle;
    let mut c = Check::new();
    c.metric("c_psi", adm.c_psi);
    c.metric("c_psi_oracle", oracle);
    c.metric("relative_gap", rel);
    c.require(rel <= 1e-3, || format!("C_psi {} vs oracle {oracle}", adm.c_psi));
    let gauss = Vector::from_fn(s, |t| Complex64::new((-0.5 * t * t).exp(), 0.0))?;
    let rejected = matches!(admissibility(&gauss), Err(Error::NotAdmissible { .. }));
    c.metric("gaussian_rejected", if rejected { 1.0 } else { 0.0 });
    c.require(rejected, || "Gaussian accepted as a wavelet".into());
    Ok(c)
}

fn stft_orthogonality() -> Result<Check> {
    let s = Space::sampled(-8.0, 8.0, 256)?;
    let grid = TimeFreqGrid::covering(s, (-6.0, 6.0), 1.0 / 16.0, (-6.0, 6.0), 1.0 / 16.0)?;
    let f1 = Vector::from_fn(s, |t| Complex64::new((-PI * t * t).exp(), 0.0))?;
    let f2 = Vector::from_fn(s, |t| Complex64::new(t * (-PI * t * t).exp(), 0.0))?;
    let g1 = WindowSpec::new(f1.clone())?;
    let g2 = WindowSpec::new(Vector::from_fn(s, |t| Complex64::new((-PI * t * t / 4.0).exp(), 0.0))?)?;

    let mut c = Check::new();
    let cases = [(&f1, &f2, &g1, &g2), (&f1, &f1, &g1, &g2), (&f2, &f2, &g2, &g1), (&f2, &f1, &g2, &g2)];
    let mut worst = 0.0f64;
    for (a, b, wa, wb) in cases {
        worst = worst.max(orthogonality_relation(a, b, wa, wb, &grid)?.gap);
    }
    c.metric("max_normalized_gap", worst);
    c.require(worst <= 1e-3, || format!("orthogonality gap {worst:e}"));

    let tight = orthogonality_relation(&f2, &f2, &g2, &g2, &grid)?;
    let expected = f2.norm_sq() * g2.norm_sq();
    let tight_rel = (tight.lhs.re - expected).abs() / expected;
    c.metric("tight_relative_gap", tight_rel);
    c.require(tight_rel <= 1e-3, || format!("tight-frame energy off by {tight_rel:e}"));

    let field = stft(&f1, &g1, &grid)?;
    let mut pointwise = 0.0f64;
    for m in 0..grid.rows() {
        let gamma = grid.frequency(m);
        for l in 0..grid.cols() {
            let y = grid.shift(l);
            let exact = Complex64::from_polar(
                std::f64::consts::FRAC_1_SQRT_2 * (-PI * (y * y + gamma * gamma) / 2.0).exp(),
                -PI * y * gamma,
            );
            pointwise = pointwise.max((field.get(m, l) - exact).norm());
        }
    }
    c.metric("closed_form_max_error", pointwise);
    c.require(pointwise <= 1e-4, || format!("closed-form mismatch {pointwise:e}"));
    Ok(c)
}

fn determinism(cfg: &SuiteConfig) -> Result<Check> {
    let run = || -> Result<String> {
        let entries = vec![
            finish(2, bound_transfer(SuiteScale::Small, cfg)),
            finish(5, bessel_only(SuiteScale::Small, cfg)),
            finish(9, admissibility_check()),
        ];
        Ok(serde_json::to_string(&entries)?)
    };
    let (first, second) = (run()?, run()?);
    let mut c = Check::new();
    c.metric("bytes", first.len() as f64);
    c.require(first == second, || "repeated runs differ".into());
    Ok(c)
}

pub fn verify_suite(scale: SuiteScale, cfg: &SuiteConfig) -> SuiteReport {
    let checks = vec![
        finish(1, parseval_construction(scale, cfg)),
        finish(2, bound_transfer(scale, cfg)),
        finish(3, factorization(scale, cfg)),
        finish(4, sigma_finite_support(scale, cfg)),
        finish(5, bessel_only(scale, cfg)),
        finish(6, unbounded_bessel_refinement(cfg)),
        finish(7, unbounded_frame_check(cfg)),
        finish(8, cwt_tight_frame()),
        finish(9, admissibility_check()),
        finish(10, stft_orthogonality()),
        finish(11, determinism(cfg)),
    ];
    SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        scale,
        config: *cfg,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_closed_form() {
        assert!((mexican_hat_constant_oracle(1e-3) - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = random::rng(1, 0);
        let u = random::unitary(&mut rng, 6);
        let e = &u.adjoint() * &u - DMatrix::<Complex64>::identity(6, 6);
        assert!(e.norm() < 1e-13);
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<f64> = random::weights(&mut random::rng(3, 9), 5);
        let b: Vec<f64> = random::weights(&mut random::rng(3, 9), 5);
        assert_eq!(a, b);
        assert_ne!(a, random::weights(&mut random::rng(3, 8), 5));
    }

    #[test]
    fn failing_checks_carry_a_reason() {
        let r = finish(3, Err(Error::ZeroVector));
        assert!(!r.passed);
        assert_eq!(r.name, "factorization");
        assert!(r.detail.contains("zero"));
    }
}
