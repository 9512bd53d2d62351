//! Counter-based pseudorandom generator with splittable streams.
//!
//! Each draw is a mix of a key and a 64-bit counter, so a `(seed, stream)`
//! pair fully determines the sample sequence regardless of how work is
//! scheduled. Stream 0 of a seed and the derived per-sample streams never
//! collide because the key mixing is injective in the stream index.

#[allow(unused_imports)] // Float supplies f64 math in no_std builds.
use num_traits::Float;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `stream` of the generator keyed by `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let key = mix64(seed) ^ mix64(stream.wrapping_mul(GAMMA).wrapping_add(1));
        CounterRng { state: key, spare_normal: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard exponential draw (mean one).
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Standard real normal draw via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let r = (-2.0 * self.uniform().ln()).sqrt();
        let theta = 2.0 * core::f64::consts::PI * self.uniform();
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Gamma draw with integer shape `k` and scale one: the sum of `k`
    /// independent standard exponentials.
    pub fn gamma_integer(&mut self, k: u64) -> f64 {
        let mut acc = 0.0;
        for _ in 0..k {
            acc += self.exponential();
        }
        acc
    }
}
