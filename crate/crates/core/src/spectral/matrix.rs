use rug::Float;

use crate::error::{invalid, Result};
use crate::potential::TrigPotential;

/// Boundary class and parity of an invariant subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetrySector {
    /// `cos 2kx`, `k >= 0`.
    PeriodicEven,
    /// `sin 2kx`, `k >= 1`.
    PeriodicOdd,
    /// `cos (2k+1)x`, `k >= 0`.
    AntiperiodicEven,
    /// `sin (2k+1)x`, `k >= 0`.
    AntiperiodicOdd,
}

/// `f(x + pi) = f(x)` or `f(x + pi) = -f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Antiperiodic,
}

impl Boundary {
    /// (even sector, odd sector)
    pub fn sectors(self) -> (SymmetrySector, SymmetrySector) {
        match self {
            Boundary::Periodic => (SymmetrySector::PeriodicEven, SymmetrySector::PeriodicOdd),
            Boundary::Antiperiodic => (
                SymmetrySector::AntiperiodicEven,
                SymmetrySector::AntiperiodicOdd,
            ),
        }
    }
}

impl SymmetrySector {
    pub const ALL: [SymmetrySector; 4] = [
        SymmetrySector::PeriodicEven,
        SymmetrySector::PeriodicOdd,
        SymmetrySector::AntiperiodicEven,
        SymmetrySector::AntiperiodicOdd,
    ];

    /// Frequency of the `index`-th basis function.
    pub fn mode(self, index: usize) -> i64 {
        let k = index as i64;
        match self {
            SymmetrySector::PeriodicEven => 2 * k,
            SymmetrySector::PeriodicOdd => 2 * k + 2,
            SymmetrySector::AntiperiodicEven | SymmetrySector::AntiperiodicOdd => 2 * k + 1,
        }
    }

    /// `+1` for cosine sectors, `-1` for sine sectors.
    pub fn sigma(self) -> i64 {
        match self {
            SymmetrySector::PeriodicEven | SymmetrySector::AntiperiodicEven => 1,
            SymmetrySector::PeriodicOdd | SymmetrySector::AntiperiodicOdd => -1,
        }
    }

    pub fn boundary(self) -> Boundary {
        match self {
            SymmetrySector::PeriodicEven | SymmetrySector::PeriodicOdd => Boundary::Periodic,
            _ => Boundary::Antiperiodic,
        }
    }

    pub fn is_even(self) -> bool {
        self.sigma() == 1
    }
}

/// Truncated Galerkin matrix of one sector, stored as its three upper bands.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    pub sector: SymmetrySector,
    pub diag: Vec<f64>,
    pub off1: Vec<f64>,
    pub off2: Vec<f64>,
    potential: Option<TrigPotential>,
}

/// Bands of a symmetric pentadiagonal matrix at some working precision.
#[derive(Debug, Clone)]
pub(crate) struct Bands<T> {
    pub diag: Vec<T>,
    pub off1: Vec<T>,
    pub off2: Vec<T>,
}

impl SectorMatrix {
    /// A matrix given directly by its bands; `sector` is only a label.
    pub fn from_bands(
        sector: SymmetrySector,
        diag: Vec<f64>,
        off1: Vec<f64>,
        off2: Vec<f64>,
    ) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(invalid("diag", "empty matrix"));
        }
        if off1.len() != n.saturating_sub(1) || off2.len() != n.saturating_sub(2) {
            return Err(invalid("bands", "off-diagonal lengths must be N-1 and N-2"));
        }
        if diag
            .iter()
            .chain(&off1)
            .chain(&off2)
            .any(|x| !x.is_finite())
        {
            return Err(invalid("bands", "entries must be finite"));
        }
        Ok(Self {
            sector,
            diag,
            off1,
            off2,
            potential: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)` of the stored (double precision) matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match j - i {
            0 => self.diag[i],
            1 => self.off1[i],
            2 => self.off2[i],
            _ => 0.0,
        }
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                if j != i {
                    r += self.entry(i, j).abs();
                }
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The bands at `prec` bits. Assembled matrices are re-evaluated from
    /// the potential so no double rounding leaks into extended precision.
    pub(crate) fn bands_at(&self, prec: u32) -> Bands<Float> {
        match &self.potential {
            Some(pot) if prec > 53 => assemble(pot, self.sector, self.dim(), prec),
            _ => {
                let conv = |v: &[f64]| v.iter().map(|&x| Float::with_val(prec, x)).collect();
                Bands {
                    diag: conv(&self.diag),
                    off1: conv(&self.off1),
                    off2: conv(&self.off2),
                }
            }
        }
    }

    pub(crate) fn bands_f64(&self) -> Bands<f64> {
        Bands {
            diag: self.diag.clone(),
            off1: self.off1.clone(),
            off2: self.off2.clone(),
        }
    }
}

/// Galerkin matrix of `-D^2 + s2 cos 2x + s4 cos 4x` on the first `n` modes
/// of `sector`, in an orthonormal basis.
pub fn build_sector_matrix(
    pot: &TrigPotential,
    sector: SymmetrySector,
    n: usize,
) -> Result<SectorMatrix> {
    if n < 3 {
        return Err(invalid(
            "N",
            format!("truncation dimension must be at least 3, got {n}"),
        ));
    }
    let bands = assemble(pot, sector, n, 53);
    let to_f64 = |v: Vec<Float>| v.into_iter().map(|x| x.to_f64()).collect();
    Ok(SectorMatrix {
        sector,
        diag: to_f64(bands.diag),
        off1: to_f64(bands.off1),
        off2: to_f64(bands.off2),
        potential: Some(*pot),
    })
}

fn assemble(pot: &TrigPotential, sector: SymmetrySector, n: usize, prec: u32) -> Bands<Float> {
    let (s2, s4) = pot.coefficients_at(prec);
    let v2 = s2 / 2u32;
    let v4 = s4 / 2u32;
    let coeff = |index: i64| -> Float {
        match index.abs() {
            2 => v2.clone(),
            4 => v4.clone(),
            _ => Float::new(prec),
        }
    };
    let sigma = sector.sigma();
    let entry = |i: usize, j: usize| -> Float {
        let (mi, mj) = (sector.mode(i), sector.mode(j));
        let mut e = coeff(mi - mj);
        let reflected = coeff(mi + mj);
        if sigma > 0 {
            e += reflected;
        } else {
            e -= reflected;
        }
        if i == j {
            e += mi * mi;
        }
        // cos 0x has norm sqrt(2) relative to cos 2kx in L^2; rescaling its
        // basis vector turns the couplings into V(2k) sqrt 2 / 2 = V(2k) / sqrt 2.
        if sector == SymmetrySector::PeriodicEven && (i == 0) != (j == 0) {
            e /= Float::with_val(prec, 2u32).sqrt();
        }
        e
    };
    Bands {
        diag: (0..n).map(|i| entry(i, i)).collect(),
        off1: (0..n.saturating_sub(1)).map(|i| entry(i, i + 1)).collect(),
        off2: (0..n.saturating_sub(2)).map(|i| entry(i, i + 2)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_operator() {
        let m =
            build_sector_matrix(&TrigPotential::zero(), SymmetrySector::PeriodicEven, 3).unwrap();
        assert_eq!(m.diag, vec![0.0, 4.0, 16.0]);
        assert!(m.off1.iter().chain(&m.off2).all(|&x| x == 0.0));
        let m =
            build_sector_matrix(&TrigPotential::zero(), SymmetrySector::PeriodicOdd, 3).unwrap();
        assert_eq!(m.diag, vec![4.0, 16.0, 36.0]);
        let m = build_sector_matrix(&TrigPotential::zero(), SymmetrySector::AntiperiodicOdd, 3)
            .unwrap();
        assert_eq!(m.diag, vec![1.0, 9.0, 25.0]);
    }

    #[test]
    fn rejects_tiny_truncation() {
        assert!(
            build_sector_matrix(&TrigPotential::zero(), SymmetrySector::PeriodicEven, 2).is_err()
        );
    }

    #[test]
    fn pinned_entries() {
        let pot = TrigPotential::new(0.3, 0.07);
        let pe = build_sector_matrix(&pot, SymmetrySector::PeriodicEven, 5).unwrap();
        let po = build_sector_matrix(&pot, SymmetrySector::PeriodicOdd, 5).unwrap();
        let ae = build_sector_matrix(&pot, SymmetrySector::AntiperiodicEven, 5).unwrap();
        let ao = build_sector_matrix(&pot, SymmetrySector::AntiperiodicOdd, 5).unwrap();
        assert_eq!(pe.entry(1, 1), 4.0 + 0.07 / 2.0);
        // odd periodic storage starts at mode 2
        assert_eq!(po.entry(0, 0), 4.0 - 0.07 / 2.0);
        assert!((pe.entry(0, 1) - 0.3 / 2f64.sqrt()).abs() < 1e-16);
        assert!((pe.entry(0, 2) - 0.07 / 2f64.sqrt()).abs() < 1e-16);
        assert_eq!(pe.entry(0, 0), 0.0);
        assert_eq!(ae.entry(0, 0), 1.0 + 0.15);
        assert_eq!(ao.entry(0, 0), 1.0 - 0.15);
        // cos x cos 3x picks up V(2) and V(4) from the reflected harmonic
        assert_eq!(ae.entry(0, 1), 0.15 + 0.035);
        assert_eq!(ao.entry(0, 1), 0.15 - 0.035);
        assert_eq!(pe.entry(1, 2), 0.15);
        assert_eq!(pe.entry(1, 3), 0.035);
        assert_eq!(pe.entry(0, 3), 0.0);
    }

    #[test]
    fn first_order_mathieu_splitting() {
        let pot = TrigPotential::new(0.1, 0.0);
        let ae = build_sector_matrix(&pot, SymmetrySector::AntiperiodicEven, 3).unwrap();
        let ao = build_sector_matrix(&pot, SymmetrySector::AntiperiodicOdd, 3).unwrap();
        assert_eq!(ae.diag[0], 1.05);
        assert_eq!(ao.diag[0], 0.95);
        assert!((ae.diag[0] - ao.diag[0] - 0.1).abs() < 1e-15);

        let pot = TrigPotential::new(0.0, 0.01);
        let pe = build_sector_matrix(&pot, SymmetrySector::PeriodicEven, 3).unwrap();
        let po = build_sector_matrix(&pot, SymmetrySector::PeriodicOdd, 3).unwrap();
        assert_eq!((pe.entry(1, 1), po.entry(0, 0)), (4.005, 3.995));
    }

    #[test]
    fn matches_galerkin_quadrature() {
        // <phi_i, v phi_j> by the trapezoid rule, exact for trigonometric
        // polynomials of low degree
        let pot = TrigPotential::new(0.37, -0.21);
        let pts = 256;
        let v = |x: f64| pot.s2 * (2.0 * x).cos() + pot.s4 * (4.0 * x).cos();
        for sector in SymmetrySector::ALL {
            let n = 6;
            let m = build_sector_matrix(&pot, sector, n).unwrap();
            let basis = |i: usize, x: f64| {
                let k = sector.mode(i) as f64;
                if sector.is_even() {
                    if k == 0.0 {
                        (1.0 / std::f64::consts::PI).sqrt()
                    } else {
                        (k * x).cos() * (2.0 / std::f64::consts::PI).sqrt()
                    }
                } else {
                    (k * x).sin() * (2.0 / std::f64::consts::PI).sqrt()
                }
            };
            for i in 0..n {
                for j in 0..n {
                    let h = std::f64::consts::PI / pts as f64;
                    let integral: f64 = (0..pts)
                        .map(|t| {
                            let x = t as f64 * h;
                            basis(i, x) * v(x) * basis(j, x)
                        })
                        .sum::<f64>()
                        * h;
                    let kin = if i == j {
                        (sector.mode(i) * sector.mode(i)) as f64
                    } else {
                        0.0
                    };
                    assert!(
                        (m.entry(i, j) - kin - integral).abs() < 1e-13,
                        "{sector:?} ({i},{j}): {} vs {}",
                        m.entry(i, j) - kin,
                        integral
                    );
                }
            }
        }
    }

    #[test]
    fn extended_bands_agree_with_double_bands() {
        let pot = crate::potential::realize_trig(
            &crate::potential::WhittakerHillParams::new(-12.0, -2.0, 0.3, 1.0, 2.0).unwrap(),
        );
        let m = build_sector_matrix(&pot, SymmetrySector::PeriodicEven, 6).unwrap();
        let hp = m.bands_at(256);
        for (a, b) in hp.off1.iter().zip(&m.off1) {
            assert!((a.to_f64() - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
        assert!(hp.diag[0].is_zero());
    }
}
