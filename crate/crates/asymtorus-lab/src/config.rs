//! Run configuration: a serializable description of one numerical run
//! (the deformation angle, the conformal-factor profile, the spectral
//! cutoff, the heat-fit window, tolerances, and the random seed), so that
//! identical configurations reproduce identical outputs byte for byte.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use asymtorus_core::torus::TorusElement;

use crate::LabError;

/// One extra self-adjoint Fourier mode of the conformal factor: the
/// coefficient `re + i·im` on `U₁^m U₂^n` plus its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoeff {
    pub m: i64,
    pub n: i64,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// The conformal-factor profile `k = constant + eps·(U₁ + U₁*) + modes`,
/// kept self-adjoint by construction.  `floor` is the spectral margin the
/// positivity check demands of the truncated right-multiplication matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub constant: f64,
    pub eps: f64,
    pub modes: Vec<ModeCoeff>,
    pub floor: f64,
}

impl Default for ProfileConfig {
    fn default() -> ProfileConfig {
        ProfileConfig {
            constant: 1.0,
            eps: 0.0,
            modes: Vec::new(),
            floor: 0.05,
        }
    }
}

/// `U₁^m U₂^n` with negative powers taken through the adjoint generators.
fn monomial(theta: f64, m: i64, n: i64) -> Result<TorusElement<Complex64>, LabError> {
    let mut acc = TorusElement::<Complex64>::one(theta);
    let u1 = TorusElement::<Complex64>::u1(theta);
    let u1s = u1.star()?;
    for _ in 0..m.unsigned_abs() {
        acc = acc.mul(if m > 0 { &u1 } else { &u1s })?;
    }
    let u2 = TorusElement::<Complex64>::u2(theta);
    let u2s = u2.star()?;
    for _ in 0..n.unsigned_abs() {
        acc = acc.mul(if n > 0 { &u2 } else { &u2s })?;
    }
    Ok(acc)
}

impl ProfileConfig {
    /// Builds the element at a given deformation angle.  Every mode enters
    /// as `c·W + (c·W)*`, so the result is self-adjoint for any input.
    pub fn element(&self, theta: f64) -> Result<TorusElement<Complex64>, LabError> {
        let mut k =
            TorusElement::<Complex64>::one(theta).scale(&Complex64::new(self.constant, 0.0));
        if self.eps != 0.0 {
            let u1 = TorusElement::<Complex64>::u1(theta);
            let c = Complex64::new(self.eps, 0.0);
            k = k.add(&u1.scale(&c))?.add(&u1.star()?.scale(&c))?;
        }
        for mode in &self.modes {
            let w = monomial(theta, mode.m, mode.n)?.scale(&Complex64::new(mode.re, mode.im));
            k = k.add(&w)?.add(&w.star()?)?;
        }
        Ok(k)
    }

    /// True when the profile has no second-direction dependence, i.e. the
    /// fast block spectral path applies.
    pub fn is_axis(&self) -> bool {
        self.modes.iter().all(|m| m.n == 0)
    }

    /// Parses the command-line profile shorthand: either the word `flat`
    /// or comma-separated `key=value` pairs with keys `c`, `eps`, `floor`
    /// (e.g. `eps=0.2` or `c=1.5,eps=0.1`).  Unnamed keys are rejected.
    pub fn parse_overrides(&mut self, text: &str) -> Result<(), LabError> {
        let text = text.trim();
        if text == "flat" {
            self.eps = 0.0;
            self.modes.clear();
            return Ok(());
        }
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part.split_once('=').ok_or_else(|| {
                LabError::Config(format!("expected key=value in k-profile, got `{}`", part))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                LabError::Config(format!("bad number `{}` in k-profile", value.trim()))
            })?;
            match key.trim() {
                "c" => self.constant = value,
                "eps" => self.eps = value,
                "floor" => self.floor = value,
                other => {
                    return Err(LabError::Config(format!(
                        "unknown k-profile key `{}` (expected c, eps, or floor)",
                        other
                    )))
                }
            }
        }
        Ok(())
    }
}

/// The heat-fit window.  By default the window scales with the cutoff as
/// `t ∈ [alpha/N², beta/N²]`; absolute bounds override the scaling when
/// set.  `samples` log-spaced times are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub alpha: f64,
    pub beta: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub samples: usize,
}

impl Default for WindowConfig {
    fn default() -> WindowConfig {
        WindowConfig {
            alpha: 4.0,
            beta: 8.0,
            t_min: None,
            t_max: None,
            samples: 40,
        }
    }
}

impl WindowConfig {
    /// The concrete window at a cutoff.
    pub fn resolve(&self, cutoff: usize) -> (f64, f64) {
        let n2 = (cutoff as f64) * (cutoff as f64);
        let lo = self.t_min.unwrap_or(self.alpha / n2);
        let hi = self.t_max.unwrap_or(self.beta / n2);
        (lo, hi)
    }

    /// Parses the command-line override `tmin,tmax` into absolute bounds.
    pub fn parse_overrides(&mut self, text: &str) -> Result<(), LabError> {
        let (lo, hi) = text.split_once(',').ok_or_else(|| {
            LabError::Config(format!("expected `tmin,tmax` for the window, got `{}`", text))
        })?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| LabError::Config(format!("bad window bound `{}`", lo.trim())))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| LabError::Config(format!("bad window bound `{}`", hi.trim())))?;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(LabError::Config(format!(
                "window bounds must satisfy 0 < tmin < tmax, got {} and {}",
                lo, hi
            )));
        }
        self.t_min = Some(lo);
        self.t_max = Some(hi);
        Ok(())
    }
}

/// Numerical tolerances for the verification commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on the constant heat coefficient of a dressed factor.
    pub c0_bound: f64,
    /// Relative agreement demanded of closed forms versus quadrature.
    pub quadrature: f64,
    /// Relative agreement demanded of the rearrangement trace identity.
    pub oracle: f64,
    /// Kernel threshold as a fraction of the flat spectral gap.
    pub kernel_scale: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            c0_bound: 0.02,
            quadrature: 1e-8,
            oracle: 1e-10,
            kernel_scale: 1e-6,
        }
    }
}

/// The full run configuration.  Loaded from a JSON file when `--config` is
/// given; individual command-line flags override single fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Deformation angle θ of the torus algebra.
    pub theta: f64,
    /// Spectral cutoff: modes with max(|m|, |n|) ≤ N are kept.
    pub cutoff: usize,
    pub k_profile: ProfileConfig,
    pub window: WindowConfig,
    pub tolerances: Tolerances,
    /// Directory for JSON/CSV outputs; stdout only when unset.
    pub out_dir: Option<PathBuf>,
    /// Seed of every randomized check.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            theta: 0.2,
            cutoff: 24,
            k_profile: ProfileConfig::default(),
            window: WindowConfig::default(),
            tolerances: Tolerances::default(),
            out_dir: None,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, LabError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Config(format!("{}: {}", path.display(), e)))
    }

    /// The conformal factor of this run.
    pub fn k_element(&self) -> Result<TorusElement<Complex64>, LabError> {
        self.k_profile.element(self.theta)
    }

    /// The kernel threshold: a fixed fraction of the flat spectral gap 2π.
    pub fn kernel_tol(&self) -> f64 {
        self.tolerances.kernel_scale * std::f64::consts::TAU
    }
}
