//! Multi-tap analog self-interference canceller.

use num_complex::Complex64;

use crate::channel::RngStream;
use crate::error::{Error, Result};
use crate::types::ComplexMatrix;

/// Positions of the non-zero canceller taps, sorted row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TapMask {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize)>,
}

impl TapMask {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize)>) -> Result<Self> {
        entries.sort_unstable();
        if entries.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("duplicate tap position".into()));
        }
        if let Some(&(i, j)) = entries.iter().find(|&&(i, j)| i >= rows || j >= cols) {
            return Err(Error::Dimension(format!(
                "tap ({i},{j}) outside a {rows}x{cols} channel"
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, ij: (usize, usize)) -> bool {
        self.entries.binary_search(&ij).is_ok()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Canceller {
    pub c: ComplexMatrix,
    pub mask: TapMask,
}

/// Greedy tap placement: the `n_tap` largest-magnitude entries of `h_si`,
/// ties going to the earlier row-major index.
pub fn select_taps(h_si: &ComplexMatrix, n_tap: usize) -> Result<TapMask> {
    let (rows, cols) = h_si.shape();
    if n_tap > rows * cols {
        return Err(Error::InvalidConfig(format!(
            "n_tap = {n_tap} exceeds {} channel entries",
            rows * cols
        )));
    }
    let mags: Vec<f64> = h_si.row_major().iter().map(|z| z.norm()).collect();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    // stable sort keeps row-major order among equal magnitudes
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    let entries = order[..n_tap]
        .iter()
        .map(|&k| (k / cols, k % cols))
        .collect();
    TapMask::new(rows, cols, entries)
}

/// Copies `h_si` onto the mask with an independent per-tap amplitude error
/// `10^(a/20)`, `a ~ U[−amp_imp_db, amp_imp_db]`, and phase error
/// `θ ~ U[−phase_imp_deg, phase_imp_deg]`.
pub fn build_canceller(
    h_si: &ComplexMatrix,
    mask: &TapMask,
    amp_imp_db: f64,
    phase_imp_deg: f64,
    rng: &mut RngStream,
) -> Result<Canceller> {
    if mask.shape() != h_si.shape() {
        return Err(Error::Dimension(format!(
            "mask {:?} does not match channel {:?}",
            mask.shape(),
            h_si.shape()
        )));
    }
    let mut c = h_si.as_inner().map(|_| Complex64::new(0.0, 0.0));
    for &ij in mask.entries() {
        let a = rng.uniform(-amp_imp_db, amp_imp_db);
        let theta = rng.uniform(-phase_imp_deg, phase_imp_deg).to_radians();
        let gain = 10f64.powf(a / 20.0);
        c[ij] = h_si[ij] * Complex64::from_polar(gain, theta);
    }
    Ok(Canceller {
        c: ComplexMatrix::try_from(c)?,
        mask: mask.clone(),
    })
}

/// `H̃ = H_si − C`.
pub fn residual_channel(h_si: &ComplexMatrix, canc: &Canceller) -> Result<ComplexMatrix> {
    h_si.checked_sub(&canc.c)
}
