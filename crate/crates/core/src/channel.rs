//! Seeded block-fading channel generation.
//!
//! Inter-node links are Rayleigh, self-interference links are Ricean with an
//! all-ones line-of-sight component. A [`ChannelSet`] is drawn once per trial
//! and held fixed for every iteration of the solver.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::types::{db_to_linear, ComplexMatrix, ComplexVector, SystemConfig};

/// Reproducible random stream. Streams for parallel trials are derived from
/// `(master_seed, trial)` so results do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for one Monte-Carlo trial.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(trial);
        Self {
            seed: master_seed,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        self.rng.random_range(lo..=hi)
    }

    /// Circularly-symmetric complex Gaussian with `E|z|² = variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    }

    /// Random unit-norm complex vector.
    pub fn unit_vector(&mut self, len: usize) -> ComplexVector {
        loop {
            let v = ComplexVector::from_fn(len, |_, _| self.complex_gaussian(1.0));
            let n = v.norm();
            if n > 0.0 {
                return v / Complex64::from(n);
            }
        }
    }
}

/// One realization of the four N×M channels. `h_12` carries node 1's signal
/// to node 2; `h_11`, `h_22` are the self-interference links.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_12: ComplexMatrix,
    pub h_21: ComplexMatrix,
    pub h_11: ComplexMatrix,
    pub h_22: ComplexMatrix,
}

impl ChannelSet {
    pub fn new(
        h_12: ComplexMatrix,
        h_21: ComplexMatrix,
        h_11: ComplexMatrix,
        h_22: ComplexMatrix,
    ) -> Result<Self> {
        let shape = h_12.shape();
        if [&h_21, &h_11, &h_22].iter().any(|h| h.shape() != shape) {
            return Err(Error::Dimension(
                "all four channels must share one N×M shape".into(),
            ));
        }
        Ok(Self {
            h_12,
            h_21,
            h_11,
            h_22,
        })
    }

    /// Self-interference channel of node `k` (0-based).
    pub fn si(&self, k: usize) -> &ComplexMatrix {
        [&self.h_11, &self.h_22][k]
    }

    /// Channel carrying node `k`'s signal to the other node.
    pub fn outgoing(&self, k: usize) -> &ComplexMatrix {
        [&self.h_12, &self.h_21][k]
    }

    /// Channel carrying the other node's signal into node `k`.
    pub fn incoming(&self, k: usize) -> &ComplexMatrix {
        [&self.h_21, &self.h_12][k]
    }

    fn named(&self) -> [(&'static str, &ComplexMatrix); 4] {
        [
            ("h_12", &self.h_12),
            ("h_21", &self.h_21),
            ("h_11", &self.h_11),
            ("h_22", &self.h_22),
        ]
    }

    /// Text dump: per matrix a `name rows cols` line, then one line per row
    /// holding space-separated `re,im` pairs. Floats use shortest round-trip
    /// formatting so a reparse is bit-exact.
    pub fn to_dump_string(&self) -> String {
        let mut out = String::new();
        for (name, h) in self.named() {
            let (r, c) = h.shape();
            writeln!(out, "{name} {r} {c}").unwrap();
            for i in 0..r {
                let row: Vec<String> = (0..c)
                    .map(|j| format!("{:e},{:e}", h[(i, j)].re, h[(i, j)].im))
                    .collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
        out
    }

    pub fn parse_dump(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut mats = Vec::with_capacity(4);
        for expected in ["h_12", "h_21", "h_11", "h_22"] {
            let header = lines.next().ok_or("truncated dump")?;
            let mut parts = header.split_whitespace();
            if parts.next() != Some(expected) {
                return Err(format!("expected header for {expected}, got {header:?}"));
            }
            let mut dim = || -> std::result::Result<usize, String> {
                parts
                    .next()
                    .ok_or("missing dimension")?
                    .parse()
                    .map_err(|e| format!("bad dimension: {e}"))
            };
            let (r, c) = (dim()?, dim()?);
            let mut entries = Vec::with_capacity(r * c);
            for _ in 0..r {
                let row = lines.next().ok_or("truncated matrix")?;
                for pair in row.split_whitespace() {
                    let (re, im) = pair.split_once(',').ok_or("entry is not re,im")?;
                    let re: f64 = re.parse().map_err(|e| format!("{e}"))?;
                    let im: f64 = im.parse().map_err(|e| format!("{e}"))?;
                    entries.push(Complex64::new(re, im));
                }
            }
            mats.push(ComplexMatrix::from_row_major(r, c, entries).map_err(|e| e.to_string())?);
        }
        let mut it = mats.into_iter();
        let mut next = || it.next().unwrap();
        ChannelSet::new(next(), next(), next(), next()).map_err(|e| e.to_string())
    }

    pub fn write_dump(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_dump_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read_dump(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_dump(&text).map_err(|m| Error::format(path, m))
    }
}

/// I.i.d. CN(0, 10^(−pl_db/10)) entries.
pub fn gen_rayleigh(n: usize, m: usize, pl_db: f64, rng: &mut RngStream) -> ComplexMatrix {
    let g = db_to_linear(-pl_db);
    let h = DMatrix::from_fn(n, m, |_, _| rng.complex_gaussian(g));
    ComplexMatrix::try_from(h).expect("rayleigh draw has positive shape and finite entries")
}

/// `sqrt(g)·(sqrt(κ/(κ+1))·1 + sqrt(1/(κ+1))·H_nlos)` with an all-ones LOS term.
pub fn gen_ricean(n: usize, m: usize, pl_db: f64, k_db: f64, rng: &mut RngStream) -> ComplexMatrix {
    let g = db_to_linear(-pl_db);
    let kappa = db_to_linear(k_db);
    let los = (g * kappa / (kappa + 1.0)).sqrt();
    let nlos = (g / (kappa + 1.0)).sqrt();
    let h = DMatrix::from_fn(n, m, |_, _| {
        Complex64::from(los) + rng.complex_gaussian(1.0) * nlos
    });
    ComplexMatrix::try_from(h).expect("ricean draw has positive shape and finite entries")
}

/// Draws `h_12`, `h_21` (Rayleigh) then `h_11`, `h_22` (Ricean), in that order.
pub fn draw_channel_set(cfg: &SystemConfig, rng: &mut RngStream) -> ChannelSet {
    let (n, m) = (cfg.n, cfg.m);
    let h_12 = gen_rayleigh(n, m, cfg.pl_link_db, rng);
    let h_21 = gen_rayleigh(n, m, cfg.pl_link_db, rng);
    let h_11 = gen_ricean(n, m, cfg.pl_si_db, cfg.k_factor_db, rng);
    let h_22 = gen_ricean(n, m, cfg.pl_si_db, cfg.k_factor_db, rng);
    ChannelSet {
        h_12,
        h_21,
        h_11,
        h_22,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_power(draw: impl Fn(&mut RngStream) -> ComplexMatrix, samples: usize) -> f64 {
        let mut rng = RngStream::new(7);
        let mut acc = 0.0;
        let mut count = 0usize;
        while count < samples {
            let h = draw(&mut rng);
            for z in h.iter() {
                acc += z.norm_sqr();
                count += 1;
            }
        }
        acc / count as f64
    }

    #[test]
    fn rayleigh_power_at_110_db() {
        let p = mean_power(|r| gen_rayleigh(4, 4, 110.0, r), 100_000);
        assert!((p / 1e-11 - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn rayleigh_unit_variance() {
        let p = mean_power(|r| gen_rayleigh(1, 1, 0.0, r), 100_000);
        assert!((p - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn rayleigh_re_im_uncorrelated() {
        let mut rng = RngStream::new(3);
        let zs: Vec<Complex64> = (0..100_000)
            .map(|_| gen_rayleigh(1, 1, 0.0, &mut rng)[(0, 0)])
            .collect();
        let n = zs.len() as f64;
        let (mr, mi) = zs
            .iter()
            .fold((0.0, 0.0), |(a, b), z| (a + z.re / n, b + z.im / n));
        let (mut srr, mut sii, mut sri) = (0.0, 0.0, 0.0);
        for z in &zs {
            srr += (z.re - mr).powi(2);
            sii += (z.im - mi).powi(2);
            sri += (z.re - mr) * (z.im - mi);
        }
        let corr = sri / (srr * sii).sqrt();
        assert!(corr.abs() < 0.01, "{corr}");
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = gen_rayleigh(4, 4, 110.0, &mut RngStream::new(42));
        let b = gen_rayleigh(4, 4, 110.0, &mut RngStream::new(42));
        assert_eq!(a, b);
        let c = gen_rayleigh(4, 4, 110.0, &mut RngStream::new(43));
        assert_ne!(a, c);
    }

    #[test]
    fn trial_streams_differ() {
        let a = gen_rayleigh(2, 2, 0.0, &mut RngStream::for_trial(1, 0));
        let b = gen_rayleigh(2, 2, 0.0, &mut RngStream::for_trial(1, 1));
        let a2 = gen_rayleigh(2, 2, 0.0, &mut RngStream::for_trial(1, 0));
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }

    #[test]
    fn ricean_pure_los_limit() {
        let mut rng = RngStream::new(1);
        let h = gen_ricean(3, 2, 40.0, 200.0, &mut rng);
        for z in h.iter() {
            assert!((z - Complex64::new(1e-2, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn ricean_pure_nlos_limit() {
        let p = mean_power(|r| gen_ricean(4, 4, 40.0, -200.0, r), 100_000);
        assert!((p / 1e-4 - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn ricean_power_at_si_setup() {
        let p = mean_power(|r| gen_ricean(4, 4, 40.0, 35.0, r), 100_000);
        assert!((p / 1e-4 - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn ricean_mean_matrix() {
        let (pl, k) = (40.0, 35.0);
        let draws = 100_000 / 16;
        let mut rng = RngStream::new(11);
        let mut acc = DMatrix::<Complex64>::zeros(4, 4);
        for _ in 0..draws {
            acc += gen_ricean(4, 4, pl, k, &mut rng).as_inner();
        }
        acc /= Complex64::from(draws as f64);
        let (g, kappa) = (db_to_linear(-pl), db_to_linear(k));
        let expected = (g * kappa / (kappa + 1.0)).sqrt();
        for z in acc.iter() {
            assert!((z - Complex64::from(expected)).norm() / expected < 0.02);
        }
    }

    #[test]
    fn channel_set_shapes() {
        let cfg = SystemConfig::default();
        let ch = draw_channel_set(&cfg, &mut RngStream::new(5));
        for (_, h) in ch.named() {
            assert_eq!(h.shape(), (4, 4));
        }
        let cfg = SystemConfig {
            m: 2,
            n: 3,
            n_tap: 2,
            ..SystemConfig::default()
        };
        let ch = draw_channel_set(&cfg, &mut RngStream::new(5));
        for (_, h) in ch.named() {
            assert_eq!(h.shape(), (3, 2));
        }
        assert_eq!(ch, draw_channel_set(&cfg, &mut RngStream::new(5)));
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let ch = draw_channel_set(&SystemConfig::default(), &mut RngStream::new(9));
        let back = ChannelSet::parse_dump(&ch.to_dump_string()).unwrap();
        assert_eq!(ch, back);
        assert!(ChannelSet::parse_dump("h_21 1 1\n0,0\n").is_err());
    }
}
