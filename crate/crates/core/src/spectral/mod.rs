//! Symmetry-sector Galerkin matrices, their lowest eigenvalues at a chosen
//! precision, and the gap widths read off the periodic and antiperiodic
//! spectra.

mod gaps;
mod matrix;
mod sturm;

pub use gaps::{
    boundary_spectrum, boundary_spectrum_detailed, gap_table, gap_width, ladder_precision,
    sector_spectrum, ConvergedSpectrum, ErrorBudget, GapEstimate, GapMethod, GapTable, Interlacing,
    MAX_DOUBLINGS,
};
pub use matrix::{build_sector_matrix, Boundary, SectorMatrix, SymmetrySector};
pub use sturm::sturm_lowest_eigenvalues;

use crate::error::{invalid, Result};

/// What to compute and how precisely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRequest {
    pub count: usize,
    pub rel_tol: f64,
    pub precision_bits: u32,
    pub max_doublings: u32,
}

impl EigenRequest {
    pub fn new(count: usize, rel_tol: f64, precision_bits: u32) -> Result<Self> {
        if count == 0 {
            return Err(invalid("count", "must be positive"));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(invalid(
                "rel_tol",
                format!("must lie in (0, 1), got {rel_tol}"),
            ));
        }
        if precision_bits < 53 {
            return Err(invalid(
                "precision_bits",
                format!("must be at least 53, got {precision_bits}"),
            ));
        }
        if precision_bits > 1 << 16 {
            return Err(invalid("precision_bits", "unreasonably large"));
        }
        Ok(Self {
            count,
            rel_tol,
            precision_bits,
            max_doublings: MAX_DOUBLINGS,
        })
    }

    /// Tolerance matched to the precision: `2^(12 - bits)`.
    pub fn at_precision(count: usize, precision_bits: u32) -> Result<Self> {
        Self::new(count, default_tolerance(precision_bits), precision_bits)
    }

    /// `rel_tol`, floored at a few ulps of the working precision since
    /// brackets narrower than that cannot be resolved.
    pub fn effective_tol(&self) -> f64 {
        self.rel_tol.max(resolvable_tolerance(self.precision_bits))
    }
}

pub fn default_tolerance(precision_bits: u32) -> f64 {
    2f64.powi(12 - precision_bits as i32)
}

fn resolvable_tolerance(precision_bits: u32) -> f64 {
    2f64.powi(6 - precision_bits as i32)
}
