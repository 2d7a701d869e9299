//! Explicit continuous frames.
//!
//! The central device is the step frame: given a partition of `Omega` into
//! cells `Omega_k` of positive finite measure and a discrete system
//! `{f_k}`, set `F(omega) = f_k / sqrt(mu(Omega_k))` on `Omega_k`. Then
//! `integral |<f, F>|^2 dmu = sum_k |<f, f_k>|^2`, so the continuous frame
//! inherits the bounds of the discrete system and the weights cancel.
//!
//! Also here: a norm-unbounded Bessel map `F(omega) = a(omega) h` and the
//! norm-unbounded frame obtained by subtracting it from a bounded frame.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::{frame_bounds, DiscretizedFrame, Node};
use crate::hilbert::{Space, Vector};
use crate::measure::Partition;

/// A finite family of vectors in one space, optionally with known bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSystem {
    vectors: Vec<Vector>,
    declared_bounds: Option<(f64, f64)>,
}

impl DiscreteSystem {
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidParameter("system needs at least one vector".into()))?;
        let space = *first.space();
        for v in &vectors[1..] {
            space.ensure_compatible(v.space())?;
        }
        Ok(DiscreteSystem { vectors, declared_bounds: None })
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.declared_bounds = Some((lower, upper));
        self
    }

    /// The standard basis of `C^dim`.
    pub fn standard_basis(dim: usize) -> Result<Self> {
        let vectors = (0..dim).map(|k| Vector::basis(dim, k)).collect::<Result<Vec<_>>>()?;
        Ok(DiscreteSystem::new(vectors)?.with_bounds(1.0, 1.0))
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn space(&self) -> &Space {
        self.vectors[0].space()
    }

    pub fn declared_bounds(&self) -> Option<(f64, f64)> {
        self.declared_bounds
    }

    /// The system as a frame over counting measure (all weights 1).
    pub fn counting_frame(&self) -> DiscretizedFrame {
        let nodes = (0..self.len()).map(|id| Node::Cell { id }).collect();
        DiscretizedFrame::new(*self.space(), nodes, vec![1.0; self.len()], self.vectors.clone())
            .expect("vectors share a space")
    }
}

/// One node per cell with weight `mu(Omega_k)` and vector `f_k / sqrt(mu(Omega_k))`.
pub fn step_frame(partition: &Partition, sys: &DiscreteSystem) -> Result<DiscretizedFrame> {
    if partition.len() != sys.len() {
        return Err(Error::CountMismatch { cells: partition.len(), vectors: sys.len() });
    }
    let space = *sys.space();
    let mut rows = Vec::with_capacity(sys.len() * space.len());
    for (cell, v) in partition.cells().iter().zip(sys.vectors()) {
        let s = 1.0 / cell.weight.sqrt();
        rows.extend(v.as_slice().iter().map(|z| z * s));
    }
    let nodes = partition.cells().iter().map(|c| Node::Cell { id: c.id }).collect();
    DiscretizedFrame::from_rows(space, nodes, partition.weights(), rows)
}

/// The Parseval step frame built from the standard basis of `C^n`, `n` the
/// number of cells.
pub fn parseval_step_frame(partition: &Partition) -> Result<DiscretizedFrame> {
    step_frame(partition, &DiscreteSystem::standard_basis(partition.len())?)
}

/// Step frame over existing quadrature nodes: the nodes are split into
/// `sys.len()` contiguous groups, and group `k` (a cell of measure equal to
/// the summed node weights) carries `f_k / sqrt(mu(group))`.
pub fn grouped_step_frame(space: Space, nodes: &[Node], weights: &[f64], sys: &DiscreteSystem) -> Result<DiscretizedFrame> {
    space.ensure_compatible(sys.space())?;
    let n = nodes.len();
    let groups = sys.len();
    if weights.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: weights.len() });
    }
    if n < groups {
        return Err(Error::CountMismatch { cells: n, vectors: groups });
    }
    let group_of = |j: usize| j * groups / n;
    let mut mass = vec![0.0; groups];
    for (j, w) in weights.iter().enumerate() {
        mass[group_of(j)] += w;
    }
    let mut rows = Vec::with_capacity(n * space.len());
    for j in 0..n {
        let k = group_of(j);
        let s = 1.0 / mass[k].sqrt();
        rows.extend(sys.vectors()[k].as_slice().iter().map(|z| z * s));
    }
    DiscretizedFrame::from_rows(space, nodes.to_vec(), weights.to_vec(), rows)
}

/// The tight system `{decay^m e_i : 0 <= m < levels, 0 <= i < dim}`, a
/// truncation of a frame with infinitely many members in `C^dim`.
/// Declared bounds are `sum_{m < levels} decay^(2m)` for both sides.
pub fn infinite_members_finite_dim(dim: usize, levels: usize, decay: f64) -> Result<DiscreteSystem> {
    if dim == 0 || levels == 0 {
        return Err(Error::InvalidParameter("dim and levels must be >= 1".into()));
    }
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::InvalidParameter(format!("decay {decay} must lie in (0, 1)")));
    }
    let mut vectors = Vec::with_capacity(dim * levels);
    for m in 0..levels {
        let s = decay.powi(m as i32);
        for i in 0..dim {
            vectors.push(Vector::basis(dim, i)?.scaled(Complex64::new(s, 0.0)));
        }
    }
    let bound: f64 = (0..levels).map(|m| decay.powi(2 * m as i32)).sum();
    Ok(DiscreteSystem::new(vectors)?.with_bounds(bound, bound))
}

/// A step frame over `N` cells in a space of dimension greater than `N`.
/// The lower frame inequality necessarily fails, leaving a Bessel map.
pub fn bessel_only_map(partition: &Partition, sys: &DiscreteSystem) -> Result<DiscretizedFrame> {
    if partition.is_truncated() {
        return Err(Error::InvalidParameter("Bessel-only map needs a finite partition".into()));
    }
    if partition.len() != sys.len() {
        return Err(Error::CountMismatch { cells: partition.len(), vectors: sys.len() });
    }
    if sys.space().len() <= partition.len() {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension {} must exceed the cell count {}",
            sys.space().len(),
            partition.len()
        )));
    }
    step_frame(partition, sys)
}

/// `b(x) = |x|^(-1/2)` on `0 < |x| < 1`, `x^(-2)` on `|x| >= 1`, `b(0) = 0`.
/// Integrable with `integral b = 6`, but unbounded near 0.
pub fn unbounded_profile(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        0.0
    } else if ax < 1.0 {
        1.0 / ax.sqrt()
    } else {
        1.0 / (ax * ax)
    }
}

/// Midpoint nodes of `k` equal cells covering `[-half_width, half_width]`.
pub fn midpoint_grid(half_width: f64, k: usize) -> Result<(Vec<Node>, Vec<f64>)> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidParameter(format!("half width {half_width} must be > 0")));
    }
    if k == 0 || k % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "node count {k} must be even and positive so that 0 is a cell edge"
        )));
    }
    let width = 2.0 * half_width / k as f64;
    let nodes = (0..k)
        .map(|j| Node::Point { x: -half_width + (j as f64 + 0.5) * width })
        .collect();
    Ok((nodes, vec![width; k]))
}

/// `F(omega) = sqrt(b(omega)) h` on a midpoint grid over `[-half_width, half_width]`.
pub fn unbounded_bessel(h: &Vector, half_width: f64, k: usize) -> Result<DiscretizedFrame> {
    if h.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (nodes, weights) = midpoint_grid(half_width, k)?;
    let mut rows = Vec::with_capacity(k * h.len());
    for node in &nodes {
        let Node::Point { x } = *node else { unreachable!() };
        let a = unbounded_profile(x).sqrt();
        rows.extend(h.as_slice().iter().map(|z| z * a));
    }
    DiscretizedFrame::from_rows(*h.space(), nodes, weights, rows)
}

/// Node-wise difference `F_j - G_j` of a Bessel map `F` and a frame `G`
/// sharing nodes and weights. Requires the Bessel bound of `F` to be below
/// the lower bound of `G`; the result is then a frame with bounds at least
/// `(sqrt(A_G) - sqrt(B_F))^2` and at most `B_F + B_G`.
pub fn unbounded_frame(fr_bessel: &DiscretizedFrame, fr_frame: &DiscretizedFrame) -> Result<DiscretizedFrame> {
    fr_bessel.space().ensure_compatible(fr_frame.space())?;
    if fr_bessel.nodes() != fr_frame.nodes() || fr_bessel.weights() != fr_frame.weights() {
        return Err(Error::GridMismatch("Bessel map and frame must share nodes and weights".into()));
    }
    let bessel = frame_bounds(fr_bessel).upper;
    let lower = frame_bounds(fr_frame).lower;
    if bessel >= lower {
        return Err(Error::BoundOrderViolation { bessel, lower });
    }
    let rows = fr_bessel
        .raw_vectors()
        .iter()
        .zip(fr_frame.raw_vectors())
        .map(|(f, g)| f - g)
        .collect();
    DiscretizedFrame::from_rows(
        *fr_bessel.space(),
        fr_bessel.nodes().to_vec(),
        fr_bessel.weights().to_vec(),
        rows,
    )
}

/// The Bessel map of [`unbounded_bessel`], rescaled so its certified bound
/// equals `target`.
pub fn unbounded_bessel_with_bound(h: &Vector, half_width: f64, k: usize, target: f64) -> Result<DiscretizedFrame> {
    let fr = unbounded_bessel(h, half_width, k)?;
    let b = frame_bounds(&fr).upper;
    Ok(fr.scaled((target / b).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{analysis, frame_bounds, weighted_energy, Verdict};
    use crate::measure::{make_partition, sigma_finite_cover, CoverRule};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn three() -> DiscreteSystem {
        let s = Space::coordinate(2).unwrap();
        DiscreteSystem::new(vec![
            Vector::from_real(s, &[1.0, 0.0]).unwrap(),
            Vector::from_real(s, &[0.0, 1.0]).unwrap(),
            Vector::from_real(s, &[1.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn step_frame_from_basis_is_parseval() {
        let p = make_partition(&[0.3, 7.0, 2.0, 1e-3]).unwrap();
        let fr = parseval_step_frame(&p).unwrap();
        let r = frame_bounds(&fr);
        assert!(r.parseval, "{r:?}");
        let f = Vector::basis(4, 1).unwrap();
        let coeffs = analysis(&fr, &f).unwrap();
        assert!((coeffs[1] - c(1.0 / 7f64.sqrt())).norm() < 1e-15);
        assert!(coeffs.iter().enumerate().all(|(j, z)| j == 1 || *z == c(0.0)));
    }

    #[test]
    fn step_frame_inherits_discrete_bounds() {
        let p = make_partition(&[1.0, 2.0, 4.0]).unwrap();
        let r = frame_bounds(&step_frame(&p, &three()).unwrap());
        assert!((r.lower - 1.0).abs() < 1e-12 && (r.upper - 3.0).abs() < 1e-12);
        let scaled = make_partition(&[13.0, 26.0, 52.0]).unwrap();
        let r2 = frame_bounds(&step_frame(&scaled, &three()).unwrap());
        assert!((r.lower - r2.lower).abs() < 1e-12 && (r.upper - r2.upper).abs() < 1e-12);
        assert_eq!(
            step_frame(&make_partition(&[1.0]).unwrap(), &three()).unwrap_err(),
            Error::CountMismatch { cells: 1, vectors: 3 }
        );
    }

    #[test]
    fn infinite_member_system_converges_to_geometric_sum() {
        let sys = infinite_members_finite_dim(2, 20, 0.5).unwrap();
        let (a, b) = sys.declared_bounds().unwrap();
        assert!((a - 4.0 / 3.0).abs() < 1e-10 && a == b);
        let cover = sigma_finite_cover(CoverRule::Geometric { ratio: 2.0 }, sys.len()).unwrap();
        let r = frame_bounds(&step_frame(&cover, &sys).unwrap());
        assert!((r.lower - a).abs() < 1e-10 && (r.upper - b).abs() < 1e-10);

        let onb = infinite_members_finite_dim(3, 1, 0.5).unwrap();
        assert_eq!(onb.declared_bounds(), Some((1.0, 1.0)));
        assert!(infinite_members_finite_dim(2, 3, 1.0).is_err());
    }

    #[test]
    fn bessel_only_for_two_cells_in_five_dims() {
        let sys = DiscreteSystem::new(vec![Vector::basis(5, 0).unwrap(), Vector::basis(5, 1).unwrap()]).unwrap();
        let p = make_partition(&[0.5, 3.0]).unwrap();
        let fr = bessel_only_map(&p, &sys).unwrap();
        let r = frame_bounds(&fr);
        assert_eq!(r.verdict, Verdict::BesselOnly);
        assert_eq!(r.lower, 0.0);
        assert!((r.upper - 1.0).abs() < 1e-12);
        assert!(bessel_only_map(&make_partition(&[1.0; 5]).unwrap(), &DiscreteSystem::standard_basis(5).unwrap()).is_err());
    }

    #[test]
    fn energy_identity_for_bessel_only_map() {
        let s = Space::coordinate(4).unwrap();
        let sys = DiscreteSystem::new(vec![
            Vector::new(s, vec![c(0.5), Complex64::new(0.1, 0.2), c(0.0), c(-1.0)]).unwrap(),
            Vector::new(s, vec![c(0.0), c(0.3), Complex64::new(0.0, -0.7), c(0.2)]).unwrap(),
        ])
        .unwrap();
        let fr = bessel_only_map(&make_partition(&[0.01, 40.0]).unwrap(), &sys).unwrap();
        let f = Vector::new(s, vec![c(1.0), Complex64::new(-0.5, 0.5), c(2.0), c(0.1)]).unwrap();
        let lhs = weighted_energy(&fr, &analysis(&fr, &f).unwrap());
        let rhs: f64 = sys
            .vectors()
            .iter()
            .map(|v| crate::hilbert::inner(&f, v).unwrap().norm_sqr())
            .sum();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn unbounded_bessel_is_rank_one() {
        let h = Vector::from_real(Space::coordinate(3).unwrap(), &[1.0, 2.0, 0.0]).unwrap();
        let fr = unbounded_bessel(&h, 10.0, 400).unwrap();
        let r = frame_bounds(&fr);
        assert_eq!(r.rank, Some(1));
        assert_eq!(r.verdict, Verdict::BesselOnly);
        // over [-10, 10] the profile integrates to 6 - 2/10
        assert!(r.upper < 5.0 * 5.8);
        assert!(r.upper > 5.0 * 5.5);
        assert_eq!(unbounded_bessel(&Vector::zeros(*h.space()), 10.0, 400).unwrap_err(), Error::ZeroVector);
        assert!(unbounded_bessel(&h, 10.0, 401).is_err());
    }

    #[test]
    fn profile_pieces() {
        assert_eq!(unbounded_profile(0.0), 0.0);
        assert_eq!(unbounded_profile(0.25), 2.0);
        assert_eq!(unbounded_profile(-2.0), 0.25);
        assert_eq!(unbounded_profile(1.0), 1.0);
    }

    #[test]
    fn zero_bessel_map_leaves_frame_bounds() {
        let s = Space::coordinate(2).unwrap();
        let (nodes, weights) = midpoint_grid(2.0, 8).unwrap();
        let g = grouped_step_frame(s, &nodes, &weights, &three()).unwrap();
        let zero = DiscretizedFrame::from_rows(s, nodes, weights, vec![c(0.0); 16]).unwrap();
        let diff = unbounded_frame(&zero, &g).unwrap();
        let (rg, rd) = (frame_bounds(&g), frame_bounds(&diff));
        assert!((rg.lower - 1.0).abs() < 1e-12 && (rg.upper - 3.0).abs() < 1e-12);
        assert!((rg.lower - rd.lower).abs() < 1e-15 && (rg.upper - rd.upper).abs() < 1e-15);
    }

    #[test]
    fn difference_frame_respects_bounds() {
        let s = Space::coordinate(2).unwrap();
        let h = Vector::from_real(s, &[1.0, 1.0]).unwrap();
        let f = unbounded_bessel_with_bound(&h, 20.0, 4000, 0.01).unwrap();
        let g = grouped_step_frame(s, f.nodes(), f.weights(), &DiscreteSystem::standard_basis(2).unwrap()).unwrap();
        let d = unbounded_frame(&f, &g).unwrap();
        let r = frame_bounds(&d);
        assert!(r.lower >= 0.81 - 1e-12, "A = {}", r.lower);
        assert!(r.upper <= 1.01 + 1e-12, "B = {}", r.upper);
        assert!(d.max_node_norm() >= f.max_node_norm() - g.max_node_norm());

        let big = unbounded_bessel_with_bound(&h, 20.0, 4000, 1.5).unwrap();
        assert!(matches!(unbounded_frame(&big, &g), Err(Error::BoundOrderViolation { .. })));
    }
}
