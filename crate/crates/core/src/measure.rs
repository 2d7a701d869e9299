//! Measured index sets given as partitions into cells of positive finite measure.
//!
//! An infinite-measure, sigma-finite index set is represented by the first
//! `K` cells of a countable cover, flagged as truncated. No infinity is ever
//! stored; convergence under increasing `K` stands in for the infinite case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    /// The measure of the cell.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    cells: Vec<Cell>,
    total: f64,
    truncated: bool,
}

/// Weight rule for [`sigma_finite_cover`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CoverRule {
    Unit,
    Geometric { ratio: f64 },
}

fn check_weight(index: usize, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWeight { index, value })
    }
}

impl Partition {
    fn from_weights(weights: &[f64], truncated: bool) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("partition needs at least one cell".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i, w)?;
        }
        let cells: Vec<Cell> = weights
            .iter()
            .enumerate()
            .map(|(id, &weight)| Cell { id, weight })
            .collect();
        let total = weights.iter().sum();
        Ok(Partition { cells, total, truncated })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn weights(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.weight).collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Sum of the stored cell measures.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Number of cells kept from the countable cover, when truncated.
    pub fn truncation_index(&self) -> Option<usize> {
        self.truncated.then_some(self.cells.len())
    }

    /// Re-checks positivity, id uniqueness, and the stored total.
    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<usize> = self.cells.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate cell id".into()));
        }
        for (i, c) in self.cells.iter().enumerate() {
            check_weight(i, c.weight)?;
        }
        let sum: f64 = self.cells.iter().map(|c| c.weight).sum();
        if sum != self.total {
            return Err(Error::InvalidParameter("stored total disagrees with weights".into()));
        }
        Ok(())
    }
}

/// A finite partition with the given cell measures, in input order.
pub fn make_partition(weights: &[f64]) -> Result<Partition> {
    Partition::from_weights(weights, false)
}

/// Same as [`make_partition`] but flagged as the first `weights.len()` cells
/// of a countable cover.
pub fn make_truncated_partition(weights: &[f64]) -> Result<Partition> {
    Partition::from_weights(weights, true)
}

/// The first `k` cells of a countable cover generated by `rule`.
pub fn sigma_finite_cover(rule: CoverRule, k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidParameter("cover needs K >= 1".into()));
    }
    let weights: Vec<f64> = match rule {
        CoverRule::Unit => vec![1.0; k],
        CoverRule::Geometric { ratio } => {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::InvalidParameter(format!("ratio {ratio} must be > 0")));
            }
            (0..k).map(|i| ratio.powi(i as i32)).collect()
        }
    };
    make_truncated_partition(&weights)
}

/// JSON form `{"partition": {"weights": [...], "truncated": bool}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub partition: PartitionBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionBody {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub truncated: bool,
}

impl From<&Partition> for PartitionBody {
    fn from(p: &Partition) -> Self {
        PartitionBody {
            weights: p.weights(),
            truncated: p.truncated,
        }
    }
}

impl TryFrom<&PartitionBody> for Partition {
    type Error = Error;

    fn try_from(body: &PartitionBody) -> Result<Self> {
        Partition::from_weights(&body.weights, body.truncated)
    }
}

impl From<&Partition> for PartitionDoc {
    fn from(p: &Partition) -> Self {
        PartitionDoc { partition: p.into() }
    }
}

impl TryFrom<&PartitionDoc> for Partition {
    type Error = Error;

    fn try_from(doc: &PartitionDoc) -> Result<Self> {
        Partition::try_from(&doc.partition)
    }
}
