//! Continuous problem data for `∂t u − ε u'' + b u' + e u = g`, `u(0) = u0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::BoundarySet;

/// Right-hand side `g(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingDescriptor {
    /// Data manufactured from `u(t, x) = (t² + 1) sin(πx)`.
    SmoothManufactured,
    /// `g = 1` where `x > t`, `0` elsewhere.
    IndicatorDiagonal,
    Zero,
}

/// Initial value `u0(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDescriptor {
    Zero,
    SinPi,
}

impl InitialDescriptor {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::SinPi => (PI * x).sin(),
        }
    }

    /// `‖u0‖²_{L₂(0,1)}`.
    pub fn norm_squared(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::SinPi => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub epsilon: f64,
    pub b: f64,
    pub e: f64,
    /// Dirichlet part of the spatial boundary.
    pub gamma: BoundarySet,
    /// Weight of the initial misfit; at least 1.
    pub beta: f64,
    pub forcing: ForcingDescriptor,
    pub u0: InitialDescriptor,
    /// Impose the right boundary condition through an `ε`-weighted penalty instead.
    pub weak_outflow: bool,
}

/// `1/ε` without reaction, `1` with it.
pub fn default_beta(epsilon: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0 / epsilon
    } else {
        1.0
    }
}

impl ProblemSpec {
    pub fn new(
        epsilon: f64,
        b: f64,
        e: f64,
        gamma: BoundarySet,
        beta: Option<f64>,
        forcing: ForcingDescriptor,
        u0: InitialDescriptor,
    ) -> Result<Self> {
        let p = Self {
            epsilon,
            b,
            e,
            gamma,
            beta: beta.unwrap_or_else(|| default_beta(epsilon, e)),
            forcing,
            u0,
            weak_outflow: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_weak_outflow(mut self) -> Result<Self> {
        self.weak_outflow = true;
        self.validate()?;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProblem(m.to_owned()));
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon must be positive");
        }
        if !(self.beta >= 1.0) || !self.beta.is_finite() {
            return bad("beta must be at least 1");
        }
        if !self.b.is_finite() || !(self.e >= 0.0) {
            return bad("b must be finite and e nonnegative");
        }
        if self.e == 0.0 && self.gamma.is_empty() {
            return bad("without reaction the Dirichlet set must be nonempty");
        }
        if self.weak_outflow && !self.gamma.right {
            return bad("weak outflow replaces a Dirichlet condition at the right end");
        }
        Ok(())
    }

    /// Dirichlet set of the trial space: the right end is dropped under weak outflow.
    pub fn trial_bc(&self) -> BoundarySet {
        if self.weak_outflow {
            self.gamma.without(crate::spaces::Endpoint::Right)
        } else {
            self.gamma
        }
    }

    /// Pointwise forcing value.
    pub fn forcing_at(&self, t: f64, x: f64) -> f64 {
        match self.forcing {
            ForcingDescriptor::Zero => 0.0,
            ForcingDescriptor::IndicatorDiagonal => f64::from(u8::from(x > t)),
            ForcingDescriptor::SmoothManufactured => {
                let [f1, f2] = self.manufactured_factors(t);
                f1 * (PI * x).sin() + f2 * (PI * x).cos()
            }
        }
    }

    /// Time coefficients `[f1, f2]` with `g = f1(t) sin πx + f2(t) cos πx` for the
    /// manufactured solution.
    pub fn manufactured_factors(&self, t: f64) -> [f64; 2] {
        let a = t * t + 1.0;
        [2.0 * t + (self.epsilon * PI * PI + self.e) * a, self.b * PI * a]
    }

    /// The manufactured exact solution.
    pub fn manufactured_solution(t: f64, x: f64) -> f64 {
        (t * t + 1.0) * (PI * x).sin()
    }
}
