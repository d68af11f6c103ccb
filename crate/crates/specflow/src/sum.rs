//! Compensated summation.

#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
    abs: f64,
    n: u64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
        self.n += 1;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }

    /// Σ|x_i|, for error bounds.
    pub fn abs_sum(&self) -> f64 {
        self.abs
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// A posteriori bound on |computed − exact| for the sum of the (already rounded) terms.
    pub fn error_bound(&self) -> f64 {
        let u = f64::EPSILON / 2.0;
        2.0 * u * self.sum().abs() + 4.0 * (self.n as f64) * u * u * self.abs
    }
}
