//! Alternating TX power minimization with SINR guarantees.
//!
//! Each iteration updates, in order, the normalized precoders, the RQ
//! combiners (using the previous iteration's powers) and the powers via
//! [`pf_solve`]. The loop stops once the power vector settles.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::beamforming::{
    build_rq_problem, mrt_precoder, rq_combiner, rq_rq_precoder, zf_rq_precoder,
};
use crate::cancellation::{residual_channel, Canceller};
use crate::channel::{ChannelSet, RngStream};
use crate::error::{Error, Result};
use crate::power_control::{build_pf_system, link_gains, pf_solve, sinr};
use crate::types::{mw_to_dbm, ComplexMatrix, ComplexVector, LinkState, SinrTargets, SystemConfig};

/// Reported in place of `-inf` dBm for an exactly-zero residual SI power.
pub const RESIDUAL_SI_FLOOR_DBM: f64 = -400.0;

/// Consecutive infeasible power updates after which a solve gives up.
pub const MAX_INFEASIBLE_STREAK: usize = 5;

/// Transmit precoder rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TxMode {
    #[serde(rename = "MRT")]
    Mrt,
    #[serde(rename = "ZF_RQ")]
    ZfRq,
    #[serde(rename = "RQ_RQ")]
    RqRq,
}

impl TxMode {
    pub const ALL: [TxMode; 3] = [TxMode::Mrt, TxMode::ZfRq, TxMode::RqRq];

    pub fn as_str(&self) -> &'static str {
        match self {
            TxMode::Mrt => "MRT",
            TxMode::ZfRq => "ZF_RQ",
            TxMode::RqRq => "RQ_RQ",
        }
    }
}

impl std::fmt::Display for TxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TxMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "MRT" => Ok(TxMode::Mrt),
            "ZF_RQ" | "ZF" => Ok(TxMode::ZfRq),
            "RQ_RQ" => Ok(TxMode::RqRq),
            _ => Err(format!(
                "unknown TX mode {s:?} (expected MRT, ZF_RQ or RQ_RQ)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub state: LinkState,
    pub achieved_sinr: [f64; 2],
    /// `P_k |u_k H̃_kk v̄_k|²` in dBm, floored at [`RESIDUAL_SI_FLOOR_DBM`].
    pub residual_si_dbm: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
    pub feasible: bool,
    /// `min(P₁, P₂) > P_max`.
    pub power_outage: bool,
    pub wall_time_s: f64,
}

/// `‖p − p_prev‖₂ / max(‖p_prev‖₂, 1e−30) < tol`.
pub fn converged(p_prev: [f64; 2], p: [f64; 2], tol: f64) -> bool {
    let diff = (p[0] - p_prev[0]).hypot(p[1] - p_prev[1]);
    let base = p_prev[0].hypot(p_prev[1]).max(1e-30);
    diff / base < tol
}

fn residual_dbm(p_mw: f64) -> f64 {
    if p_mw > 0.0 {
        mw_to_dbm(p_mw).max(RESIDUAL_SI_FLOOR_DBM)
    } else {
        RESIDUAL_SI_FLOOR_DBM
    }
}

fn precoder(
    mode: TxMode,
    k: usize,
    ch: &ChannelSet,
    resid: [&ComplexMatrix; 2],
    u: &[ComplexVector; 2],
    sigma2: f64,
) -> Result<ComplexVector> {
    let l = 1 - k;
    match mode {
        TxMode::Mrt => mrt_precoder(ch.outgoing(k), &u[l]),
        TxMode::ZfRq => zf_rq_precoder(ch.outgoing(k), &u[l], resid[k], &u[k]),
        TxMode::RqRq => rq_rq_precoder(ch.outgoing(k), &u[l], resid[k], &u[k], sigma2),
    }
}

/// Runs the alternating loop on one channel realization. `rng` supplies the
/// random unit-norm initial combiners.
pub fn solve(
    cfg: &SystemConfig,
    ch: &ChannelSet,
    cancellers: &[Canceller; 2],
    targets: &SinrTargets,
    rng: &mut RngStream,
    tx_mode: TxMode,
) -> Result<SolveResult> {
    if ch.h_12.shape() != (cfg.n, cfg.m) {
        return Err(Error::Dimension(format!(
            "channels are {:?}, config expects {}x{}",
            ch.h_12.shape(),
            cfg.n,
            cfg.m
        )));
    }
    let resid_11 = residual_channel(&ch.h_11, &cancellers[0])?;
    let resid_22 = residual_channel(&ch.h_22, &cancellers[1])?;
    let resid = [&resid_11, &resid_22];
    let sigma2 = cfg.noise_mw();
    let p_max = cfg.p_max_mw();

    let u0 = rng.unit_vector(cfg.n);
    let u1 = rng.unit_vector(cfg.n);

    let start = Instant::now();
    let mut state = LinkState {
        v_bar: [ComplexVector::zeros(cfg.m), ComplexVector::zeros(cfg.m)],
        u: [u0, u1],
        p: [p_max, p_max],
    };
    let mut iterations = 0;
    let mut is_converged = false;
    let mut last_feasible = false;
    let mut infeasible_streak = 0;

    let update_precoders = |state: &mut LinkState| -> Result<()> {
        let v0 = precoder(tx_mode, 0, ch, resid, &state.u, sigma2)?;
        let v1 = precoder(tx_mode, 1, ch, resid, &state.u, sigma2)?;
        state.v_bar = [v0, v1];
        Ok(())
    };
    // ZF-RQ closes each cycle with the precoder update so that the reported
    // precoders null the SI seen by the final combiners.
    let precoders_last = tx_mode == TxMode::ZfRq;
    if precoders_last {
        update_precoders(&mut state)?;
    }

    while iterations < cfg.max_iter {
        iterations += 1;
        if !precoders_last {
            update_precoders(&mut state)?;
        }

        let u_next = [0, 1].map(|k| {
            let l = 1 - k;
            build_rq_problem(
                ch.incoming(k),
                &state.precoder(l),
                resid[k],
                &state.precoder(k),
                sigma2,
            )
            .and_then(|prob| rq_combiner(&prob))
        });
        let [u0, u1] = u_next;
        state.u = [u0?, u1?];
        if precoders_last {
            update_precoders(&mut state)?;
        }

        let sys = build_pf_system(&state, ch, &resid_11, &resid_22, targets)?;
        let solution = pf_solve(&sys, sigma2);
        let p_prev = state.p;
        match solution.p {
            Some(p) => {
                state.p = p;
                last_feasible = true;
                infeasible_streak = 0;
                if converged(p_prev, p, cfg.conv_tol) {
                    is_converged = true;
                    break;
                }
            }
            None => {
                state.p = p_prev.map(|x| x.min(p_max));
                last_feasible = false;
                infeasible_streak += 1;
                if infeasible_streak >= MAX_INFEASIBLE_STREAK {
                    break;
                }
            }
        }
    }
    let wall_time_s = start.elapsed().as_secs_f64();

    let achieved_sinr = sinr(&state, ch, &resid_11, &resid_22, sigma2);
    let gains = link_gains(&state, ch, resid);
    let residual_si_dbm = [0, 1].map(|k| residual_dbm(state.p[k] * gains[k].1));
    let power_outage = state.p[0].min(state.p[1]) > p_max;
    Ok(SolveResult {
        state,
        achieved_sinr,
        residual_si_dbm,
        iterations,
        converged: is_converged,
        feasible: last_feasible,
        power_outage,
        wall_time_s,
    })
}

/// Draws one trial: channels, then both cancellers, from a single stream;
/// the remaining stream feeds [`solve`].
pub fn draw_trial(cfg: &SystemConfig, rng: &mut RngStream) -> Result<(ChannelSet, [Canceller; 2])> {
    use crate::cancellation::{build_canceller, select_taps};
    let ch = crate::channel::draw_channel_set(cfg, rng);
    let canc = |h: &ComplexMatrix, rng: &mut RngStream| {
        let mask = select_taps(h, cfg.n_tap)?;
        build_canceller(h, &mask, cfg.amp_imp_db, cfg.phase_imp_deg, rng)
    };
    let c1 = canc(&ch.h_11, rng)?;
    let c2 = canc(&ch.h_22, rng)?;
    Ok((ch, [c1, c2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cancellation::{build_canceller, select_taps, TapMask};
    use crate::power_control::PfSystem;

    fn perfect(ch: &ChannelSet) -> [Canceller; 2] {
        let (n, m) = ch.h_11.shape();
        let full = |h: &ComplexMatrix| {
            build_canceller(
                h,
                &select_taps(h, n * m).unwrap(),
                0.0,
                0.0,
                &mut RngStream::new(0),
            )
            .unwrap()
        };
        [full(&ch.h_11), full(&ch.h_22)]
    }

    #[test]
    fn convergence_rule() {
        assert!(converged([1.0, 2.0], [1.0, 2.0], 1e-12));
        assert!(!converged([1.0, 1.0], [2.0, 2.0], 1e-3));
        assert!(converged([1.0, 1.0], [1.0 + 1e-9, 1.0], 1e-6));
        assert!(converged([0.0, 0.0], [0.0, 0.0], 1e-6));
    }

    #[test]
    fn mode_names() {
        for mode in TxMode::ALL {
            assert_eq!(mode.as_str().parse::<TxMode>().unwrap(), mode);
        }
        assert!("foo".parse::<TxMode>().is_err());
    }

    #[test]
    fn perfect_cancellation_decouples_links() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(100);
        let ch = crate::channel::draw_channel_set(&cfg, &mut rng);
        let targets = SinrTargets::from_rate(4.0).unwrap();
        let res = solve(&cfg, &ch, &perfect(&ch), &targets, &mut rng, TxMode::Mrt).unwrap();
        assert!(res.converged && res.feasible);
        for k in 0..2 {
            assert!((res.achieved_sinr[k] / 15.0 - 1.0).abs() < 1e-6);
            assert_eq!(res.residual_si_dbm[k], RESIDUAL_SI_FLOOR_DBM);
        }
    }

    #[test]
    fn scalar_link_reduces_to_pf_solve() {
        let cfg = SystemConfig {
            m: 1,
            n: 1,
            n_tap: 0,
            ..SystemConfig::default()
        };
        for seed in 0..20 {
            let mut rng = RngStream::new(seed);
            let (ch, canc) = draw_trial(&cfg, &mut rng).unwrap();
            let targets = SinrTargets::new(2.0, 3.0).unwrap();
            let res = solve(&cfg, &ch, &canc, &targets, &mut rng, TxMode::Mrt).unwrap();
            let g = |h: &ComplexMatrix| h[(0, 0)].norm_sqr();
            let sys = PfSystem::new(
                [2.0, 3.0],
                [g(&ch.h_11) / g(&ch.h_21), g(&ch.h_22) / g(&ch.h_12)],
                [1.0 / g(&ch.h_21), 1.0 / g(&ch.h_12)],
            )
            .unwrap();
            match pf_solve(&sys, cfg.noise_mw()).p {
                Some(p) => {
                    assert!(res.feasible && res.converged);
                    for (got, want) in res.state.p.iter().zip(p) {
                        assert!((got - want).abs() <= 1e-12 * want);
                    }
                }
                None => assert!(!res.feasible),
            }
        }
    }

    #[test]
    fn deterministic_rerun() {
        let cfg = SystemConfig::default();
        let targets = SinrTargets::from_rate(6.0).unwrap();
        let run = |mode| {
            let mut rng = RngStream::for_trial(9, 3);
            let (ch, canc) = draw_trial(&cfg, &mut rng).unwrap();
            let mut r = solve(&cfg, &ch, &canc, &targets, &mut rng, mode).unwrap();
            r.wall_time_s = 0.0;
            r
        };
        for mode in TxMode::ALL {
            assert_eq!(run(mode), run(mode));
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let cfg = SystemConfig::default();
        let small = SystemConfig {
            m: 2,
            n: 2,
            n_tap: 2,
            ..cfg.clone()
        };
        let mut rng = RngStream::new(1);
        let (ch, canc) = draw_trial(&small, &mut rng).unwrap();
        let targets = SinrTargets::from_rate(2.0).unwrap();
        assert!(solve(&cfg, &ch, &canc, &targets, &mut rng, TxMode::Mrt).is_err());
        let bad = [
            Canceller {
                c: ComplexMatrix::zeros(3, 3).unwrap(),
                mask: TapMask::empty(3, 3),
            },
            canc[1].clone(),
        ];
        assert!(solve(&small, &ch, &bad, &targets, &mut rng, TxMode::Mrt).is_err());
    }

    #[test]
    fn hopeless_targets_report_infeasible() {
        // no cancellation at all and an absurd target
        let cfg = SystemConfig {
            n_tap: 0,
            m: 1,
            n: 1,
            ..SystemConfig::default()
        };
        let mut rng = RngStream::new(4);
        let (ch, canc) = draw_trial(&cfg, &mut rng).unwrap();
        let targets = SinrTargets::from_rate(30.0).unwrap();
        let res = solve(&cfg, &ch, &canc, &targets, &mut rng, TxMode::Mrt).unwrap();
        assert!(!res.feasible);
        assert!(!res.converged);
        assert_eq!(res.iterations, MAX_INFEASIBLE_STREAK);
        assert!(res.state.p.iter().all(|p| *p <= cfg.p_max_mw()));
    }
}
