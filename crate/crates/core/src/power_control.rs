//! Closed-form minimum TX powers for two-node SINR targets.
//!
//! The SINR constraints stack into `(I − ΓM) p ≥ σ² Γ m`. Since `ΓM` is
//! non-negative, a positive solution exists iff its spectral radius is below
//! one, and then `p* = σ² (I − ΓM)⁻¹ Γ m` meets both targets with equality
//! and is the componentwise-minimal feasible power vector.

use nalgebra::{Matrix2, Vector2};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::types::{ComplexMatrix, ComplexVector, LinkState, SinrTargets};

/// Signal gains below this are treated as a dead link.
pub const MIN_SIGNAL_GAIN: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct PfSystem {
    /// `[[0, Γ₂], [Γ₁, 0]]`
    pub gamma: Matrix2<f64>,
    /// `diag(M₁₁, M₂₂)`, SI-to-signal gain ratios.
    pub m_diag: Matrix2<f64>,
    /// Inverse signal gains.
    pub m_vec: Vector2<f64>,
}

impl PfSystem {
    pub fn new(gamma: [f64; 2], m_diag: [f64; 2], m_vec: [f64; 2]) -> Result<Self> {
        if !(gamma[0] > 0.0 && gamma[1] > 0.0) {
            return Err(Error::InvalidConfig("SINR targets must be positive".into()));
        }
        if !(m_diag[0] >= 0.0 && m_diag[1] >= 0.0) || !(m_vec[0] > 0.0 && m_vec[1] > 0.0) {
            return Err(Error::InvalidConfig(
                "gain ratios must be non-negative and inverse gains positive".into(),
            ));
        }
        Ok(Self {
            gamma: Matrix2::new(0.0, gamma[1], gamma[0], 0.0),
            m_diag: Matrix2::from_diagonal(&Vector2::from(m_diag)),
            m_vec: Vector2::from(m_vec),
        })
    }

    /// `ΓM`.
    pub fn gain_matrix(&self) -> Matrix2<f64> {
        self.gamma * self.m_diag
    }

    /// `ρ(ΓM) = sqrt(Γ₁Γ₂M₁₁M₂₂)` for the zero-diagonal 2×2 case.
    pub fn spectral_radius(&self) -> f64 {
        (self.gamma[(1, 0)] * self.gamma[(0, 1)] * self.m_diag[(0, 0)] * self.m_diag[(1, 1)]).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSolution {
    /// Powers in mW; `None` when the targets are unreachable.
    pub p: Option<[f64; 2]>,
    pub feasible: bool,
    pub spectral_radius: f64,
}

/// `|u H v|²`.
fn gain(u: &ComplexVector, h: &ComplexMatrix, v: &ComplexVector) -> f64 {
    u.dot(&(h.as_inner() * v)).norm_sqr()
}

fn check_unit(what: &str, v: &ComplexVector) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "{what} must have unit norm, got {}",
            v.norm()
        )));
    }
    Ok(())
}

/// Per-node `(signal gain, SI gain)` with unit beamformers:
/// `(|u_k H_lk v̄_l|², |u_k H̃_kk v̄_k|²)`.
pub(crate) fn link_gains(
    state: &LinkState,
    ch: &ChannelSet,
    resid: [&ComplexMatrix; 2],
) -> [(f64, f64); 2] {
    [0, 1].map(|k| {
        let l = 1 - k;
        (
            gain(&state.u[k], ch.incoming(k), &state.v_bar[l]),
            gain(&state.u[k], resid[k], &state.v_bar[k]),
        )
    })
}

pub fn build_pf_system(
    state: &LinkState,
    ch: &ChannelSet,
    resid_11: &ComplexMatrix,
    resid_22: &ComplexMatrix,
    targets: &SinrTargets,
) -> Result<PfSystem> {
    for k in 0..2 {
        check_unit("precoder", &state.v_bar[k])?;
        check_unit("combiner", &state.u[k])?;
    }
    let gains = link_gains(state, ch, [resid_11, resid_22]);
    if let Some(&(s, _)) = gains.iter().find(|(s, _)| !(*s >= MIN_SIGNAL_GAIN)) {
        return Err(Error::DegenerateLink(s));
    }
    let [(s1, i1), (s2, i2)] = gains;
    PfSystem::new(targets.gamma(), [i1 / s1, i2 / s2], [1.0 / s1, 1.0 / s2])
}

/// `p* = σ² (I − ΓM)⁻¹ Γ m` when `ρ(ΓM) < 1`.
pub fn pf_solve(sys: &PfSystem, sigma2: f64) -> PowerSolution {
    let rho = sys.spectral_radius();
    if !(rho < 1.0) {
        return PowerSolution {
            p: None,
            feasible: false,
            spectral_radius: rho,
        };
    }
    let (g1, g2) = (sys.gamma[(1, 0)], sys.gamma[(0, 1)]);
    let (m11, m22) = (sys.m_diag[(0, 0)], sys.m_diag[(1, 1)]);
    let (r1, r2) = (sigma2 * g2 * sys.m_vec[1], sigma2 * g1 * sys.m_vec[0]);
    // (I − ΓM) = [[1, −Γ₂M₂₂], [−Γ₁M₁₁, 1]]
    let det = 1.0 - rho * rho;
    let p1 = (r1 + g2 * m22 * r2) / det;
    let p2 = (r2 + g1 * m11 * r1) / det;
    let ok = p1 > 0.0 && p2 > 0.0 && p1.is_finite() && p2.is_finite();
    PowerSolution {
        p: ok.then_some([p1, p2]),
        feasible: ok,
        spectral_radius: rho,
    }
}

/// `γ_k = P_l |u_k H_lk v̄_l|² / (P_k |u_k H̃_kk v̄_k|² + σ²)`.
pub fn sinr(
    state: &LinkState,
    ch: &ChannelSet,
    resid_11: &ComplexMatrix,
    resid_22: &ComplexMatrix,
    sigma2: f64,
) -> [f64; 2] {
    let gains = link_gains(state, ch, [resid_11, resid_22]);
    [0, 1].map(|k| {
        let (s, i) = gains[k];
        state.p[1 - k] * s / (state.p[k] * i + sigma2)
    })
}
