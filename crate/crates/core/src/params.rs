//! Model parameters and derived constants.
//!
//! The system is studied close to onset, α = ε²α₀, with slow front speed
//! c = εc₀ and critical wave number kc² = 1 + ε·q₀ (kc = 1 exactly when
//! ε·q₀ = 0). The discriminant Δ = sqrt(c₀² - 16α₀) controls the central
//! eigenvalue pair ε(-c₀ ± Δ)/8; the front pipeline requires c₀² > 16α₀
//! (monotone tails).
//!
//! All validation happens at construction; a [`ModelParams`] value is
//! immutable afterwards and safe to share across threads.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Bifurcation strength α₀ > 0 in α = ε²α₀.
    pub alpha0: f64,
    /// Scaled front speed c₀ > 0 in c = εc₀.
    pub c0: f64,
    /// Coupling parameter of the conservation law.
    pub gamma: f64,
    /// Bifurcation parameter ε ≥ 0.
    pub eps: f64,
    /// Wave-number detuning, kc² = 1 + ε·q₀.
    pub q0: f64,
    /// Phase shift of the pattern, in [0, 2π).
    pub x0: f64,
    /// Critical wave number (derived; 1 when ε·q₀ = 0).
    pub kc: f64,
}

impl ModelParams {
    /// Validates and builds the parameter record. `q0` and `x0` default to 0
    /// via [`ModelParams::new`]; use [`ModelParams::with_detuning`] otherwise.
    pub fn new(alpha0: f64, c0: f64, gamma: f64, eps: f64) -> Result<Self> {
        Self::with_detuning(alpha0, c0, gamma, eps, 0.0, 0.0)
    }

    pub fn with_detuning(
        alpha0: f64,
        c0: f64,
        gamma: f64,
        eps: f64,
        q0: f64,
        x0: f64,
    ) -> Result<Self> {
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::domain(format!("alpha0 must be > 0, got {alpha0}")));
        }
        if !c0.is_finite() || c0 <= 0.0 {
            return Err(Error::domain(format!("c0 must be > 0, got {c0}")));
        }
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::domain(format!("eps must be >= 0, got {eps}")));
        }
        if !gamma.is_finite() || !q0.is_finite() {
            return Err(Error::domain("gamma and q0 must be finite".to_string()));
        }
        if !x0.is_finite() || !(0.0..TAU).contains(&x0) {
            return Err(Error::domain(format!("x0 must lie in [0, 2*pi), got {x0}")));
        }
        let kc2 = 1.0 + eps * q0;
        if kc2 <= 0.0 {
            return Err(Error::domain(format!(
                "kc^2 = 1 + eps*q0 = {kc2} must be positive"
            )));
        }
        let kc = if eps * q0 == 0.0 { 1.0 } else { kc2.sqrt() };
        Ok(Self {
            alpha0,
            c0,
            gamma,
            eps,
            q0,
            x0,
            kc,
        })
    }

    /// α = ε²α₀.
    pub fn alpha(&self) -> f64 {
        self.eps * self.eps * self.alpha0
    }

    /// c = εc₀.
    pub fn c(&self) -> f64 {
        self.eps * self.c0
    }

    /// Δ = sqrt(c₀² - 16α₀); domain error in the oscillatory regime
    /// c₀² < 16α₀, where the front pipeline does not apply.
    pub fn delta(&self) -> Result<f64> {
        let disc = self.c0 * self.c0 - 16.0 * self.alpha0;
        if disc < 0.0 {
            return Err(Error::domain(format!(
                "c0^2 = {} < 16*alpha0 = {}: oscillatory regime, Delta is imaginary",
                self.c0 * self.c0,
                16.0 * self.alpha0
            )));
        }
        Ok(disc.sqrt())
    }

    /// Strict front-regime check c₀² > 16α₀ > 0, required by the
    /// heteroclinic/front reconstruction pipeline.
    pub fn require_front_regime(&self) -> Result<f64> {
        let d = self.delta()?;
        if d == 0.0 {
            return Err(Error::domain(
                "front pipeline requires c0^2 > 16*alpha0 strictly".to_string(),
            ));
        }
        Ok(d)
    }

    /// Existence band of the periodic states: q₀² < α₀, needed whenever
    /// periodic equilibria are requested.
    pub fn require_detuning_band(&self) -> Result<()> {
        if self.q0 * self.q0 >= self.alpha0 {
            return Err(Error::domain(format!(
                "q0^2 = {} must be < alpha0 = {}",
                self.q0 * self.q0,
                self.alpha0
            )));
        }
        Ok(())
    }
}

/// Returns Δ = sqrt(c₀² - 16α₀).
pub fn derived_delta(params: &ModelParams) -> Result<f64> {
    params.delta()
}

/// Parses the flat key = value config format.
///
/// One `key = value` pair per line; `#` starts a comment; keys are the
/// [`ModelParams`] fields. `alpha0`, `c0`, `gamma`, `eps` are required and
/// have no defaults; `q0` and `x0` default to 0. All numbers are decimal.
pub fn parse_config(text: &str) -> Result<ModelParams> {
    let mut alpha0 = None;
    let mut c0 = None;
    let mut gamma = None;
    let mut eps = None;
    let mut q0 = 0.0;
    let mut x0 = 0.0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Config {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value: f64 = value.trim().parse().map_err(|e| Error::Config {
            line: line_no,
            msg: format!("bad number for `{key}`: {e}"),
        })?;
        match key {
            "alpha0" => alpha0 = Some(value),
            "c0" => c0 = Some(value),
            "gamma" => gamma = Some(value),
            "eps" => eps = Some(value),
            "q0" => q0 = value,
            "x0" => x0 = value,
            other => {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let missing = |name: &str| Error::Config {
        line: 0,
        msg: format!("missing required key `{name}`"),
    };
    ModelParams::with_detuning(
        alpha0.ok_or_else(|| missing("alpha0"))?,
        c0.ok_or_else(|| missing("c0"))?,
        gamma.ok_or_else(|| missing("gamma"))?,
        eps.ok_or_else(|| missing("eps"))?,
        q0,
        x0,
    )
}
