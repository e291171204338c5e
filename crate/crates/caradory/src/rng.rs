//! Seeded pseudo-randomness for instance generation and solver start points.
//!
//! The generator is SplitMix64 (Steele–Lea–Vigna): the 64-bit state advances
//! by the golden-ratio increment and each output is a bijective finalizer of
//! the new state. It is a counter-based design, so a given seed yields the
//! same stream on every platform and every run. Gaussians come from
//! Box–Muller, Dirichlet(1) weights from normalized exponentials.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_gaussian: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller; the second variate of each pair is
    /// cached so consecutive calls consume one uniform pair per two outputs.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        // 1 − u ∈ (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_gaussian = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_gaussian()).collect()
    }

    /// Dirichlet(1, …, 1) over `k` entries: normalized Exp(1) draws.
    pub fn dirichlet(&mut self, k: usize) -> Vec<f64> {
        let mut e: Vec<f64> = (0..k).map(|_| -(1.0 - self.next_f64()).ln()).collect();
        let total: f64 = e.iter().sum();
        for w in &mut e {
            *w /= total;
        }
        e
    }

    /// Uniform `k`-subset of `0..m` via partial Fisher–Yates, returned sorted.
    pub fn choose_k(&mut self, m: usize, k: usize) -> Vec<usize> {
        assert!(k <= m);
        let mut idx: Vec<usize> = (0..m).collect();
        for i in 0..k {
            let j = i + (self.next_u64() % (m - i) as u64) as usize;
            idx.swap(i, j);
        }
        let mut chosen = idx[..k].to_vec();
        chosen.sort_unstable();
        chosen
    }

    pub fn uniform_index(&mut self, m: usize) -> usize {
        (self.next_u64() % m as u64) as usize
    }
}
