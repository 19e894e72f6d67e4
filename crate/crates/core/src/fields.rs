//! Real position-space fields used as classical observables h(q).

use serde::{Deserialize, Serialize};

/// Declared growth of a field at large arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Growth {
    Bounded,
    Polynomial(u32),
}

impl Growth {
    pub fn degree(&self) -> u32 {
        match self {
            Growth::Bounded => 0,
            Growth::Polynomial(d) => *d,
        }
    }
}

pub trait Field1: Sync {
    fn value(&self, x: f64) -> f64;

    fn growth(&self) -> Growth {
        Growth::Bounded
    }

    /// Points where the field may be discontinuous or kinked.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

pub trait Field2: Sync {
    fn value(&self, q: [f64; 2]) -> f64;

    fn growth(&self) -> Growth {
        Growth::Bounded
    }

    /// Discontinuity lines q_axis = const.
    fn breakpoints(&self, _axis: usize) -> Vec<f64> {
        Vec::new()
    }
}

/// Closure-backed field with explicit growth and breakpoints.
pub struct FnField1<F> {
    pub f: F,
    pub growth: Growth,
    pub breaks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnField1<F> {
    pub fn new(f: F, growth: Growth) -> Self {
        FnField1 { f, growth, breaks: Vec::new() }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

impl<F: Fn(f64) -> f64 + Sync> Field1 for FnField1<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn growth(&self) -> Growth {
        self.growth
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

pub struct FnField2<F> {
    pub f: F,
    pub growth: Growth,
    pub breaks: [Vec<f64>; 2],
}

impl<F: Fn([f64; 2]) -> f64 + Sync> FnField2<F> {
    pub fn new(f: F, growth: Growth) -> Self {
        FnField2 { f, growth, breaks: [Vec::new(), Vec::new()] }
    }

    pub fn with_breaks(mut self, b1: Vec<f64>, b2: Vec<f64>) -> Self {
        self.breaks = [b1, b2];
        self
    }
}

impl<F: Fn([f64; 2]) -> f64 + Sync> Field2 for FnField2<F> {
    fn value(&self, q: [f64; 2]) -> f64 {
        (self.f)(q)
    }
    fn growth(&self) -> Growth {
        self.growth
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.breaks[axis].clone()
    }
}

/// Indicator of the open interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Field1 for Interval {
    fn value(&self, x: f64) -> f64 {
        if x > self.a && x < self.b {
            1.0
        } else {
            0.0
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.a, self.b]
    }
}

/// Indicator of an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rectangle {
    pub fn centred(half: [f64; 2]) -> Self {
        Rectangle { lo: [-half[0], -half[1]], hi: half }
    }

    pub fn contains(&self, q: [f64; 2]) -> bool {
        (0..2).all(|j| q[j] > self.lo[j] && q[j] < self.hi[j])
    }
}

impl Field2 for Rectangle {
    fn value(&self, q: [f64; 2]) -> f64 {
        if self.contains(q) {
            1.0
        } else {
            0.0
        }
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        vec![self.lo[axis], self.hi[axis]]
    }
}

/// h₁(q₁)h₂(q₂).
pub struct ProductField<'a> {
    pub h1: &'a dyn Field1,
    pub h2: &'a dyn Field1,
}

impl Field2 for ProductField<'_> {
    fn value(&self, q: [f64; 2]) -> f64 {
        self.h1.value(q[0]) * self.h2.value(q[1])
    }
    fn growth(&self) -> Growth {
        Growth::Polynomial(self.h1.growth().degree() + self.h2.growth().degree())
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        if axis == 0 {
            self.h1.breakpoints()
        } else {
            self.h2.breakpoints()
        }
    }
}

pub struct Constant(pub f64);

impl Field1 for Constant {
    fn value(&self, _x: f64) -> f64 {
        self.0
    }
}

impl Field2 for Constant {
    fn value(&self, _q: [f64; 2]) -> f64 {
        self.0
    }
}
