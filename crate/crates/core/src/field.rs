//! Transform output on a 2-D quadrature grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A product grid with a positive quadrature weight per node.
pub trait FieldGrid {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn row_coord(&self, i: usize) -> f64;
    fn col_coord(&self, l: usize) -> f64;
    fn weight(&self, i: usize, l: usize) -> f64;
    /// Names of the two coordinate columns in CSV output.
    fn csv_header(&self) -> [&'static str; 2];
    /// Coordinates of node `(i, l)` in CSV column order.
    fn csv_coords(&self, i: usize, l: usize) -> [f64; 2];
}

/// Values of `<f, F(omega)>` on the nodes of a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<G> {
    grid: G,
    values: Vec<Complex64>,
}

impl<G: FieldGrid> CoefficientField<G> {
    pub fn new(grid: G, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.rows() * grid.cols();
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, got: values.len() });
        }
        Ok(CoefficientField { grid, values })
    }

    pub fn zeros(grid: G) -> Self {
        let n = grid.rows() * grid.cols();
        CoefficientField { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, l: usize) -> Complex64 {
        self.values[i * self.grid.cols() + l]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let c = self.grid.cols();
        &self.values[i * c..(i + 1) * c]
    }

    /// `sum w_il |values_il|^2`, rows then columns.
    pub fn energy(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.grid.rows() {
            let row: f64 = self
                .row(i)
                .iter()
                .enumerate()
                .map(|(l, z)| self.grid.weight(i, l) * z.norm_sqr())
                .sum();
            total += row;
        }
        total
    }

    /// `sum w_il a_il conj(b_il)` over two fields on the same grid.
    pub fn weighted_inner(&self, other: &CoefficientField<G>) -> Result<Complex64> {
        if self.values.len() != other.values.len() {
            return Err(Error::GridMismatch("fields have different shapes".into()));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.grid.rows() {
            let mut row = Complex64::new(0.0, 0.0);
            for (l, (a, b)) in self.row(i).iter().zip(other.row(i)).enumerate() {
                row += a * b.conj() * self.grid.weight(i, l);
            }
            total += row;
        }
        Ok(total)
    }

    /// Index of the entry of largest modulus.
    pub fn argmax(&self) -> (usize, usize) {
        let (k, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best });
        (k / self.grid.cols(), k % self.grid.cols())
    }
}
