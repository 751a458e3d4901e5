//! SplitMix64 generator and the derived draws used by the simulator.
//!
//! The generator is fully specified by its recurrence so that any
//! implementation reproduces the same scenarios from the same seed:
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z ← state
//! z ← (z ⊕ (z >> 30)) · 0xBF58476D1CE4E5B9      (mod 2^64)
//! z ← (z ⊕ (z >> 27)) · 0x94D049BB133111EB      (mod 2^64)
//! output z ⊕ (z >> 31)
//! ```
//!
//! Derived draws:
//! * `uniform()` = `(next >> 11) · 2^-53`, in [0, 1);
//! * `normal()` uses Box–Muller on two uniforms `u1, u2`, returning
//!   `sqrt(-2 ln(1 - u1)) · cos(2π u2)` (one value per pair);
//! * `poisson(λ)` multiplies uniforms until the product drops to `e^-λ`.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Standard normal redrawn until it falls within `±limit`.
    pub fn truncated_normal(&mut self, limit: f64) -> f64 {
        loop {
            let z = self.normal();
            if z.abs() <= limit {
                return z;
            }
        }
    }

    pub fn poisson(&mut self, lambda: f64) -> usize {
        if lambda <= 0.0 {
            return 0;
        }
        let floor = (-lambda).exp();
        let mut k = 0;
        let mut p = self.uniform();
        while p > floor {
            k += 1;
            p *= self.uniform();
        }
        k
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
