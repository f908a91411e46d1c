//! Counter-based splitmix64 stream with Box-Muller normals.
//!
//! Sub-streams are keyed by a master seed plus integer labels, so a Monte
//! Carlo cell can rebuild its own stream from `(seed, scenario, p_S, n, j)`
//! without any shared state.

use std::f64::consts::TAU;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random stream. Single owner; clone it to fork an
/// identical copy.
#[derive(Debug, Clone)]
pub struct RandomStream {
    state: u64,
    spare_normal: Option<f64>,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            state: seed,
            spare_normal: None,
        }
    }

    /// Seed of the sub-stream addressed by `labels` under `master`.
    pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
        labels.iter().fold(mix64(master ^ GOLDEN), |h, &label| {
            mix64(h.wrapping_add(GOLDEN) ^ mix64(label.wrapping_add(GOLDEN)))
        })
    }

    pub fn derive(master: u64, labels: &[u64]) -> Self {
        Self::new(Self::derive_seed(master, labels))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller; the second variate of each pair is
    /// cached for the next call.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare_normal = Some(r * s);
        r * c
    }
}
