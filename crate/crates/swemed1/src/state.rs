//! Conservative state vector and its primitive view.

use crate::params::Parameters;
use crate::ModelError;
use serde::{Deserialize, Serialize};

/// One cell's conservative variables `(h, h*u_m, h*alpha_1, h*c_m, h_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State(pub [f64; 5]);

impl State {
    pub fn new(h: f64, hu_m: f64, h_alpha_1: f64, h_c_m: f64, h_b: f64) -> Self {
        Self([h, hu_m, h_alpha_1, h_c_m, h_b])
    }

    pub fn h(&self) -> f64 {
        self.0[0]
    }
    pub fn hu_m(&self) -> f64 {
        self.0[1]
    }
    pub fn h_alpha_1(&self) -> f64 {
        self.0[2]
    }
    pub fn h_c_m(&self) -> f64 {
        self.0[3]
    }
    pub fn h_b(&self) -> f64 {
        self.0[4]
    }

    pub fn from_primitive(q: &Primitive) -> Self {
        Self([
            q.h,
            q.h * q.u_m,
            q.h * q.alpha_1,
            q.h * q.c_m,
            q.h_b,
        ])
    }

    /// Primitive view; requires `h > 0`.
    pub fn primitive(&self) -> Primitive {
        debug_assert!(self.h() > 0.0, "primitive view of a dry state");
        let inv_h = 1.0 / self.h();
        Primitive {
            h: self.h(),
            u_m: self.hu_m() * inv_h,
            alpha_1: self.h_alpha_1() * inv_h,
            c_m: self.h_c_m() * inv_h,
            h_b: self.h_b(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Checks the admissibility invariants `h >= h_min`, `0 <= c_m < 1`,
    /// and finiteness.
    pub fn validate(&self, p: &Parameters) -> Result<(), ModelError> {
        if !self.is_finite() {
            return Err(ModelError::NonFinite);
        }
        if self.h() < p.h_min {
            return Err(ModelError::Dry {
                h: self.h(),
                h_min: p.h_min,
            });
        }
        Ok(())
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        State(out)
    }
}

impl std::ops::Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        State(out)
    }
}

impl std::ops::Mul<f64> for State {
    type Output = State;
    fn mul(self, s: f64) -> State {
        let mut out = self.0;
        for a in out.iter_mut() {
            *a *= s;
        }
        State(out)
    }
}

/// Primitive variables plus the derived bottom velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub h: f64,
    pub u_m: f64,
    pub alpha_1: f64,
    pub c_m: f64,
    pub h_b: f64,
}

impl Primitive {
    /// Bottom velocity `u_b = u_m + alpha_1`.
    pub fn u_b(&self) -> f64 {
        self.u_m + self.alpha_1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roundtrip() {
        let q = Primitive {
            h: 1.5,
            u_m: 0.05,
            alpha_1: -0.01,
            c_m: 0.01,
            h_b: 0.25,
        };
        let s = State::from_primitive(&q);
        let back = s.primitive();
        assert!((back.u_m - q.u_m).abs() < 1e-15);
        assert!((back.alpha_1 - q.alpha_1).abs() < 1e-15);
        assert!((back.c_m - q.c_m).abs() < 1e-15);
        assert_eq!(back.u_b(), back.u_m + back.alpha_1);
    }

    #[test]
    fn validate_rejects_dry_state() {
        let p = Parameters::default();
        let s = State::new(1e-12, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(s.validate(&p), Err(ModelError::Dry { .. })));
        let ok = State::new(1.0, 0.0, 0.0, 0.0, 0.0);
        assert!(ok.validate(&p).is_ok());
    }
}
