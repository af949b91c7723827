//! Shared numeric and configuration types.
//!
//! Powers are carried internally in linear milliwatts; dB and dBm only appear
//! in [`SystemConfig`] and in reports. All complex arithmetic is `f64`: a
//! 110 dB path loss squared is far below the `f32` normal range.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column vector of complex weights. Precoders are stored as-is; receive
/// combiners (row vectors `u`) are stored by their entries, so `u·y` is
/// `u.dot(&y)` (non-conjugating).
pub type ComplexVector = DVector<Complex64>;

/// `10^(x/10)`: dBm to mW.
pub fn dbm_to_mw(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn mw_to_dbm(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `10^(x/10)`: dB to a linear power ratio.
pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Dense complex matrix with at least one row and column and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::try_from(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        Ok(Self(DMatrix::zeros(rows, cols)))
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("empty identity".into()));
        }
        Ok(Self(DMatrix::identity(n, n)))
    }

    /// Real diagonal matrix; handy for hand-built test cases.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n, n)?;
        for (i, d) in diag.iter().enumerate() {
            m.0[(i, i)] = Complex64::new(*d, 0.0);
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let (r, c) = self.shape();
        (0..r)
            .flat_map(|i| (0..c).map(move |j| (i, j)))
            .map(|ij| self.0[ij])
            .collect()
    }

    pub fn checked_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "cannot subtract {:?} from {:?}",
                other.shape(),
                self.shape()
            )));
        }
        Ok(Self(&self.0 - &other.0))
    }

    fn check_finite(&self) -> Result<()> {
        if self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("matrix"))
        }
    }
}

impl TryFrom<DMatrix<Complex64>> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "empty {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let m = Self(m);
        m.check_finite()?;
        Ok(m)
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<Complex64>;

    fn deref(&self) -> &DMatrix<Complex64> {
        &self.0
    }
}

/// Scenario constants. Defaults are the desk-scale reproduction setup:
/// 4x4 nodes, 8 canceller taps, -110 dBm noise floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// TX antennas per node.
    pub m: usize,
    /// RX antennas per node.
    pub n: usize,
    pub n_tap: usize,
    pub noise_floor_dbm: f64,
    pub p_max_dbm: f64,
    pub pl_link_db: f64,
    pub pl_si_db: f64,
    pub k_factor_db: f64,
    /// Half-range of the per-tap amplitude error (amplitude dB).
    pub amp_imp_db: f64,
    /// Half-range of the per-tap phase error.
    pub phase_imp_deg: f64,
    pub max_iter: usize,
    pub conv_tol: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            m: 4,
            n: 4,
            n_tap: 8,
            noise_floor_dbm: -110.0,
            p_max_dbm: 30.0,
            pl_link_db: 110.0,
            pl_si_db: 40.0,
            k_factor_db: 35.0,
            amp_imp_db: 0.01,
            phase_imp_deg: 0.065,
            max_iter: 100,
            conv_tol: 1e-6,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidConfig("antenna counts must be >= 1".into()));
        }
        if self.n_tap > self.m * self.n {
            return Err(Error::InvalidConfig(format!(
                "n_tap = {} exceeds M*N = {}",
                self.n_tap,
                self.m * self.n
            )));
        }
        let logs = [
            ("noise_floor_dbm", self.noise_floor_dbm),
            ("p_max_dbm", self.p_max_dbm),
            ("pl_link_db", self.pl_link_db),
            ("pl_si_db", self.pl_si_db),
            ("k_factor_db", self.k_factor_db),
            ("amp_imp_db", self.amp_imp_db),
            ("phase_imp_deg", self.phase_imp_deg),
        ];
        if let Some((name, _)) = logs.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be finite")));
        }
        if self.amp_imp_db < 0.0 || self.phase_imp_deg < 0.0 {
            return Err(Error::InvalidConfig(
                "imperfection half-ranges must be non-negative".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        if !(self.conv_tol > 0.0) {
            return Err(Error::InvalidConfig("conv_tol must be > 0".into()));
        }
        Ok(())
    }

    pub fn noise_mw(&self) -> f64 {
        dbm_to_mw(self.noise_floor_dbm)
    }

    pub fn p_max_mw(&self) -> f64 {
        dbm_to_mw(self.p_max_dbm)
    }
}

/// Linear per-node SINR targets `[Γ₁, Γ₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTargets {
    gamma: [f64; 2],
}

impl SinrTargets {
    pub fn new(gamma_1: f64, gamma_2: f64) -> Result<Self> {
        if !(gamma_1 > 0.0 && gamma_2 > 0.0) || !gamma_1.is_finite() || !gamma_2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "SINR targets must be positive, got [{gamma_1}, {gamma_2}]"
            )));
        }
        Ok(Self {
            gamma: [gamma_1, gamma_2],
        })
    }

    /// Both nodes at rate `r` bps/Hz, i.e. `Γ = 2^r − 1`.
    pub fn from_rate(rate_bps_hz: f64) -> Result<Self> {
        let g = rate_bps_hz.exp2() - 1.0;
        Self::new(g, g)
    }

    pub fn gamma(&self) -> [f64; 2] {
        self.gamma
    }
}

/// Beamformers and powers of both nodes. Index 0 is node 1, index 1 is node 2.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    /// Unit-norm precoders, length M.
    pub v_bar: [ComplexVector; 2],
    /// Unit-norm combiner entries, length N.
    pub u: [ComplexVector; 2],
    /// TX powers in mW.
    pub p: [f64; 2],
}

impl LinkState {
    /// Precoder including power, `√P_k · v̄_k`.
    pub fn precoder(&self, k: usize) -> ComplexVector {
        &self.v_bar[k] * Complex64::from(self.p[k].sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversions() {
        assert_eq!(dbm_to_mw(0.0), 1.0);
        assert!((dbm_to_mw(-110.0) / 1e-11 - 1.0).abs() < 1e-12);
        assert!((dbm_to_mw(30.0) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(-110.0) / 1e-11 - 1.0).abs() < 1e-12);
        assert!((db_to_linear(35.0) - 3162.28).abs() < 1e-2);
    }

    #[test]
    fn matrix_constructors_reject_bad_shapes() {
        let z = Complex64::new(1.0, 0.0);
        assert!(ComplexMatrix::from_row_major(2, 2, vec![z; 3]).is_err());
        assert!(ComplexMatrix::from_row_major(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::zeros(3, 0).is_err());
        assert!(ComplexMatrix::from_row_major(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        let a = ComplexMatrix::from_row_major(2, 3, vec![z; 6]).unwrap();
        let b = ComplexMatrix::zeros(3, 2).unwrap();
        assert!(a.checked_sub(&b).is_err());
    }

    #[test]
    fn row_major_order() {
        let e: Vec<_> = (0..6).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let a = ComplexMatrix::from_row_major(2, 3, e.clone()).unwrap();
        assert_eq!(a[(1, 0)], e[3]);
        assert_eq!(a.row_major(), e);
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::default().validate().is_ok());
        let bad = SystemConfig {
            n_tap: 17,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SystemConfig {
            conv_tol: 0.0,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SystemConfig {
            pl_si_db: f64::INFINITY,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn targets_from_rate() {
        let t = SinrTargets::from_rate(8.0).unwrap();
        assert_eq!(t.gamma(), [255.0, 255.0]);
        assert!(SinrTargets::new(0.0, 1.0).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn conversions_round_trip_and_increase(x in -300.0f64..300.0, dx in 1e-6f64..10.0) {
                let y = dbm_to_mw(x);
                prop_assert!(((mw_to_dbm(y) - x) / x.abs().max(1.0)).abs() < 1e-12);
                prop_assert!((linear_to_db(db_to_linear(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
                prop_assert!(dbm_to_mw(x + dx) > y);
                prop_assert!(db_to_linear(x + dx) > db_to_linear(x));
            }
        }
    }
}
