//! Compensated accumulation for real and complex quadrature values.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Values a quadrature can produce: reals or complex numbers.
pub trait QuadValue:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn parts(self) -> [f64; 2];
    fn from_parts(parts: [f64; 2]) -> Self;

    fn is_finite(self) -> bool {
        let [a, b] = self.parts();
        a.is_finite() && b.is_finite()
    }
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn parts(self) -> [f64; 2] {
        [self, 0.0]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        parts[0]
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn parts(self) -> [f64; 2] {
        [self.re, self.im]
    }
    fn from_parts(parts: [f64; 2]) -> Self {
        Complex64::new(parts[0], parts[1])
    }
}

/// Neumaier running sum, componentwise.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: [f64; 2],
    comp: [f64; 2],
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add<V: QuadValue>(&mut self, v: V) {
        let parts = v.parts();
        for k in 0..2 {
            let x = parts[k];
            let t = self.sum[k] + x;
            if self.sum[k].abs() >= x.abs() {
                self.comp[k] += (self.sum[k] - t) + x;
            } else {
                self.comp[k] += (x - t) + self.sum[k];
            }
            self.sum[k] = t;
        }
    }

    pub fn value<V: QuadValue>(&self) -> V {
        V::from_parts([self.sum[0] + self.comp[0], self.sum[1] + self.comp[1]])
    }
}

/// Compensated sum of a sequence of reals, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
