//! Operator theory of continuous frames on a quadrature discretization.
//!
//! A continuous frame `F: Omega -> H` over `(Omega, mu)` is represented by
//! nodes `omega_j`, positive weights `w_j` (the measure carried by each
//! node) and vectors `F_j = F(omega_j)`. Every integral over `Omega`
//! becomes `sum_j w_j (...)`, evaluated in node order so results are
//! reproducible bit for bit.
//!
//! * analysis `T* f = (<f, F_j>)_j`
//! * synthesis `T c = sum_j w_j c_j F_j`
//! * frame operator `S = T T* = sum_j w_j F_j F_j^*`
//!
//! The frame bounds are the extreme eigenvalues of `S`. The sesquilinear
//! form `(f, g) -> integral <f, F><F, g> dmu` is available as
//! [`frame_form`], which equals `<S f, g>`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{inner_slices, Space, Vector};

/// Largest dimension for which the frame operator is materialized.
pub const MATERIALIZE_LIMIT: usize = 4096;

/// Largest dimension handled by the dense Hermitian eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 2048;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Label of a quadrature node in the index set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    /// A whole cell of a partition.
    Cell { id: usize },
    /// A point of the real line.
    Point { x: f64 },
    /// A wavelet node `(a, b)`.
    ScaleShift { a: f64, b: f64 },
    /// A time-frequency node `(y, gamma)`.
    TimeFreq { y: f64, gamma: f64 },
}

/// Quadrature representation of a continuous frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedFrame {
    space: Space,
    nodes: Vec<Node>,
    weights: Vec<f64>,
    /// Row-major, one row of `space.len()` entries per node.
    vectors: Vec<Complex64>,
}

impl DiscretizedFrame {
    pub fn new(space: Space, nodes: Vec<Node>, weights: Vec<f64>, vectors: Vec<Vector>) -> Result<Self> {
        let mut flat = Vec::with_capacity(vectors.len() * space.len());
        for v in &vectors {
            space.ensure_compatible(v.space())?;
            flat.extend_from_slice(v.as_slice());
        }
        Self::from_rows(space, nodes, weights, flat)
    }

    /// Builds a frame from row-major vector data without per-node allocation.
    pub fn from_rows(space: Space, nodes: Vec<Node>, weights: Vec<f64>, vectors: Vec<Complex64>) -> Result<Self> {
        space.validate()?;
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidParameter("frame needs at least one node".into()));
        }
        if weights.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: weights.len() });
        }
        if vectors.len() != n * space.len() {
            return Err(Error::LengthMismatch {
                expected: n * space.len(),
                got: vectors.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        if let Some(i) = vectors.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(DiscretizedFrame { space, nodes, weights, vectors })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    /// `F_j` as raw samples.
    pub fn vector(&self, j: usize) -> &[Complex64] {
        let d = self.space.len();
        &self.vectors[j * d..(j + 1) * d]
    }

    pub fn vector_owned(&self, j: usize) -> Vector {
        Vector::new(self.space, self.vector(j).to_vec()).expect("validated at construction")
    }

    pub fn node_norm(&self, j: usize) -> f64 {
        let s: f64 = self.vector(j).iter().map(|z| z.norm_sqr()).sum();
        (s * self.space.step()).sqrt()
    }

    /// `max_j ||F_j||`.
    pub fn max_node_norm(&self) -> f64 {
        (0..self.len()).map(|j| self.node_norm(j)).fold(0.0, f64::max)
    }

    /// The same frame with every vector multiplied by `s`.
    pub fn scaled(&self, s: f64) -> DiscretizedFrame {
        DiscretizedFrame {
            vectors: self.vectors.iter().map(|z| z * s).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn raw_vectors(&self) -> &[Complex64] {
        &self.vectors
    }
}

/// `c_j = <f, F_j>`.
pub fn analysis(fr: &DiscretizedFrame, f: &Vector) -> Result<Vec<Complex64>> {
    fr.space.ensure_compatible(f.space())?;
    let dx = fr.space.step();
    Ok((0..fr.len())
        .map(|j| inner_slices(f.as_slice(), fr.vector(j)) * dx)
        .collect())
}

/// `sum_j w_j c_j F_j`.
pub fn synthesis(fr: &DiscretizedFrame, c: &[Complex64]) -> Result<Vector> {
    if c.len() != fr.len() {
        return Err(Error::LengthMismatch { expected: fr.len(), got: c.len() });
    }
    let mut out = vec![ZERO; fr.dim()];
    for (j, (cj, w)) in c.iter().zip(&fr.weights).enumerate() {
        let s = cj * w;
        if s == ZERO {
            continue;
        }
        for (o, v) in out.iter_mut().zip(fr.vector(j)) {
            *o += s * v;
        }
    }
    Vector::new(fr.space, out)
}

/// `S f = T T* f`, without materializing `S`.
pub fn apply_frame_operator(fr: &DiscretizedFrame, f: &Vector) -> Result<Vector> {
    synthesis(fr, &analysis(fr, f)?)
}

/// `sum_j w_j |c_j|^2`.
pub fn weighted_energy(fr: &DiscretizedFrame, c: &[Complex64]) -> f64 {
    c.iter().zip(&fr.weights).map(|(z, w)| w * z.norm_sqr()).sum()
}

/// `sum_j w_j <f, F_j> <F_j, g>`, which equals `<S f, g>`.
pub fn frame_form(fr: &DiscretizedFrame, f: &Vector, g: &Vector) -> Result<Complex64> {
    let cf = analysis(fr, f)?;
    let cg = analysis(fr, g)?;
    Ok(cf
        .iter()
        .zip(&cg)
        .zip(&fr.weights)
        .fold(ZERO, |acc, ((a, b), w)| acc + a * b.conj() * w))
}

/// Matrix of `S` in grid coordinates: `S_ik = dx sum_j w_j F_j[i] conj(F_j[k])`.
pub fn frame_operator(fr: &DiscretizedFrame) -> Result<DMatrix<Complex64>> {
    let d = fr.dim();
    if d > MATERIALIZE_LIMIT {
        return Err(Error::DimensionTooLarge { dim: d, limit: MATERIALIZE_LIMIT });
    }
    let dx = fr.space.step();
    let mut s = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..fr.len() {
        let v = fr.vector(j);
        let w = fr.weights[j] * dx;
        for k in 0..d {
            let ck = v[k].conj() * w;
            if ck == ZERO {
                continue;
            }
            for i in k..d {
                s[(i, k)] += v[i] * ck;
            }
        }
    }
    for k in 0..d {
        s[(k, k)].im = 0.0;
        for i in k + 1..d {
            s[(k, i)] = s[(i, k)].conj();
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Frame,
    BesselOnly,
    Invalid,
}

/// Certified bounds of a discretized frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub parseval: bool,
    pub verdict: Verdict,
    /// Number of eigenvalues above the frame tolerance; `None` when the
    /// bounds came from the iterative path and the lower bound is zero.
    pub rank: Option<usize>,
    /// Eigenvalues of `S`, ascending. Empty for the iterative path.
    pub spectrum: Vec<f64>,
}

impl FrameReport {
    /// Finite-dimensional surjectivity of the synthesis operator.
    pub fn is_onto(&self, dim: usize) -> bool {
        self.rank == Some(dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsOptions {
    /// Frame tolerance relative to the upper bound.
    pub tol_frame_rel: f64,
    /// Allowed deviation of both bounds from 1 for a Parseval verdict.
    pub tol_parseval: f64,
    /// Dimensions above this use power iteration instead of dense eigensolves.
    pub dense_limit: usize,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            tol_frame_rel: 1e-10,
            tol_parseval: 1e-10,
            dense_limit: DENSE_EIGEN_LIMIT,
        }
    }
}

/// Hermitian eigenvalues in ascending order.
pub fn hermitian_spectrum(s: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(s.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn report_from_extremes(lower: f64, upper: f64, spectrum: Vec<f64>, rank: Option<usize>, opts: &BoundsOptions) -> FrameReport {
    let lower = lower.max(0.0);
    let upper = upper.max(0.0);
    let tol = opts.tol_frame_rel * upper;
    let verdict = if !(upper.is_finite() && lower.is_finite()) || upper == 0.0 {
        Verdict::Invalid
    } else if lower > tol {
        Verdict::Frame
    } else {
        Verdict::BesselOnly
    };
    let parseval = verdict == Verdict::Frame
        && (lower - 1.0).abs() <= opts.tol_parseval
        && (upper - 1.0).abs() <= opts.tol_parseval;
    FrameReport {
        lower,
        upper,
        parseval,
        verdict,
        rank,
        spectrum,
    }
}

pub fn frame_bounds(fr: &DiscretizedFrame) -> FrameReport {
    frame_bounds_with(fr, &BoundsOptions::default())
}

/// `A = lambda_min(S)`, `B = lambda_max(S)`.
pub fn frame_bounds_with(fr: &DiscretizedFrame, opts: &BoundsOptions) -> FrameReport {
    let d = fr.dim();
    if d <= opts.dense_limit {
        let s = frame_operator(fr).expect("dense limit is below materialize limit");
        let spectrum = hermitian_spectrum(&s);
        let lower = spectrum[0];
        let upper = spectrum[d - 1];
        let tol = opts.tol_frame_rel * upper.max(0.0);
        let rank = spectrum.iter().filter(|&&l| l > tol).count();
        report_from_extremes(lower, upper, spectrum, Some(rank), opts)
    } else {
        let (lower, upper) = iterative_extremes(fr);
        let mut report = report_from_extremes(lower, upper, Vec::new(), None, opts);
        if report.verdict == Verdict::Frame {
            report.rank = Some(d);
        }
        report
    }
}

fn apply_raw(fr: &DiscretizedFrame, x: &[Complex64]) -> Vec<Complex64> {
    let v = Vector::new(fr.space, x.to_vec()).expect("finite iterate");
    apply_frame_operator(fr, &v).expect("same space").into_vec()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    inner_slices(a, b)
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

/// Power iteration on `S` for `B`, then on `B I - S` for `B - A`.
fn iterative_extremes(fr: &DiscretizedFrame) -> (f64, f64) {
    const MAX_ITER: usize = 5000;
    const RTOL: f64 = 1e-13;
    let d = fr.dim();
    let start: Vec<Complex64> = (0..d)
        .map(|i| Complex64::new(1.0 + 0.5 * ((i * 7919) % 97) as f64 / 97.0, 0.0))
        .collect();

    let power = |shift: Option<f64>| -> f64 {
        let mut x = start.clone();
        let nx = norm(&x);
        x.iter_mut().for_each(|z| *z /= nx);
        let mut lambda = 0.0;
        for _ in 0..MAX_ITER {
            let mut y = apply_raw(fr, &x);
            if let Some(b) = shift {
                for (yi, xi) in y.iter_mut().zip(&x) {
                    *yi = xi * b - *yi;
                }
            }
            let next = dot(&y, &x).re;
            let ny = norm(&y);
            if ny == 0.0 {
                return 0.0;
            }
            x = y.into_iter().map(|z| z / ny).collect();
            if (next - lambda).abs() <= RTOL * next.abs().max(f64::MIN_POSITIVE) {
                return next;
            }
            lambda = next;
        }
        lambda
    };

    let upper = power(None);
    let gap = power(Some(upper));
    (upper - gap, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub tol_recon: f64,
    pub bounds: BoundsOptions,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            tol_recon: 1e-8,
            bounds: BoundsOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub f_hat: Vector,
    /// `||f_hat - f|| / ||f||`.
    pub residual: f64,
    pub iterations: usize,
}

/// Conjugate gradients for `op(x) = b` with `op` Hermitian positive definite.
/// Stops once `||r|| <= target` or after `max_iter` steps; returns the
/// iterate and the step count.
pub fn conjugate_gradient(
    op: impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    target: f64,
    max_iter: usize,
) -> (Vec<Complex64>, usize) {
    let mut x = vec![ZERO; b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for it in 0..max_iter {
        if rr.sqrt() <= target {
            return (x, it);
        }
        let ap = op(&p);
        let pap = dot(&p, &ap).re;
        if pap <= 0.0 {
            return (x, it);
        }
        let alpha = rr / pap;
        for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
            *xi += pi * alpha;
            *ri -= api * alpha;
        }
        let rr_next = dot(&r, &r).re;
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_next;
    }
    (x, max_iter)
}

/// `f_hat = sum_j w_j <f, F_j> S^{-1} F_j`, i.e. `S^{-1} S f`, with the
/// inverse applied by conjugate gradients.
pub fn dual_reconstruct(fr: &DiscretizedFrame, f: &Vector, opts: &ReconstructOptions) -> Result<Reconstruction> {
    fr.space.ensure_compatible(f.space())?;
    let report = frame_bounds_with(fr, &opts.bounds);
    let tol = opts.bounds.tol_frame_rel * report.upper;
    if report.verdict != Verdict::Frame {
        return Err(Error::NotAFrame { lower: report.lower, tol });
    }
    let f_norm = f.norm();
    if f_norm == 0.0 {
        return Ok(Reconstruction { f_hat: Vector::zeros(fr.space), residual: 0.0, iterations: 0 });
    }
    let sf = apply_frame_operator(fr, f)?;
    let max_iter = 10 * fr.dim();
    // ||x - f|| <= ||r|| / A, so this target keeps the error well inside tol_recon.
    // The coordinate norm is the space norm divided by sqrt(dx).
    let target = 1e-3 * opts.tol_recon * report.lower * f_norm / fr.space.step().sqrt();
    let (x, iterations) = conjugate_gradient(|p| apply_raw(fr, p), sf.as_slice(), target, max_iter);
    let f_hat = Vector::new(fr.space, x)?;
    let residual = f_hat.sub(f)?.norm() / f_norm;
    if residual > opts.tol_recon {
        return Err(Error::SolverDiverged { iterations, residual });
    }
    Ok(Reconstruction { f_hat, residual, iterations })
}

/// One level of the support diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportLevel {
    pub n: usize,
    /// Indices of nodes with `|<f, F_j>| >= 1/n`.
    pub nodes: Vec<usize>,
    /// `mu(K_n) = sum of their weights`.
    pub mass: f64,
    /// `n^2 B ||f||^2`.
    pub bound: f64,
}

impl SupportLevel {
    pub fn within_bound(&self) -> bool {
        self.mass <= self.bound * (1.0 + 1e-12)
    }
}

/// Level sets `K_n = {omega : |<f, F(omega)>| >= 1/n}` for `n = 1..=n_max`,
/// using the certified upper bound of `fr`.
pub fn sigma_finite_support(fr: &DiscretizedFrame, f: &Vector, n_max: usize) -> Result<Vec<SupportLevel>> {
    let upper = frame_bounds(fr).upper;
    sigma_finite_support_with_bound(fr, f, n_max, upper)
}

/// As [`sigma_finite_support`] with a caller-supplied Bessel bound.
pub fn sigma_finite_support_with_bound(
    fr: &DiscretizedFrame,
    f: &Vector,
    n_max: usize,
    bessel_bound: f64,
) -> Result<Vec<SupportLevel>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let c = analysis(fr, f)?;
    let f_sq = f.norm_sq();
    Ok((1..=n_max)
        .map(|n| {
            let threshold = 1.0 / n as f64;
            let nodes: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() >= threshold)
                .map(|(j, _)| j)
                .collect();
            let mass = nodes.iter().map(|&j| fr.weights[j]).sum();
            SupportLevel {
                n,
                nodes,
                mass,
                bound: (n * n) as f64 * bessel_bound * f_sq,
            }
        })
        .collect())
}

/// A vector entry in frame JSON: a bare real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(r) => Complex64::new(r, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// JSON form of a discretized frame.
///
/// `space` defaults to `C^d` with `d` the vector length, `weights` to 1 and
/// `nodes` to one cell per vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Space>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<Node>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub vectors: Vec<Vec<Entry>>,
}

impl From<&DiscretizedFrame> for FrameDoc {
    fn from(fr: &DiscretizedFrame) -> Self {
        FrameDoc {
            space: Some(fr.space),
            nodes: Some(fr.nodes.clone()),
            weights: Some(fr.weights.clone()),
            vectors: (0..fr.len())
                .map(|j| fr.vector(j).iter().map(|z| Entry::Complex([z.re, z.im])).collect())
                .collect(),
        }
    }
}

impl TryFrom<&FrameDoc> for DiscretizedFrame {
    type Error = Error;

    fn try_from(doc: &FrameDoc) -> Result<Self> {
        let first = doc
            .vectors
            .first()
            .ok_or_else(|| Error::InvalidParameter("frame has no vectors".into()))?;
        let space = match doc.space {
            Some(s) => s,
            None => Space::coordinate(first.len())?,
        };
        let n = doc.vectors.len();
        let nodes = doc
            .nodes
            .clone()
            .unwrap_or_else(|| (0..n).map(|id| Node::Cell { id }).collect());
        let weights = doc.weights.clone().unwrap_or_else(|| vec![1.0; n]);
        let mut flat = Vec::with_capacity(n * space.len());
        for v in &doc.vectors {
            if v.len() != space.len() {
                return Err(Error::LengthMismatch { expected: space.len(), got: v.len() });
            }
            flat.extend(v.iter().map(|&e| Complex64::from(e)));
        }
        DiscretizedFrame::from_rows(space, nodes, weights, flat)
    }
}
