//! Numerical laboratory for the asymmetric-torus toolkit: truncated GNS
//! matrices, Dirac operators and their spectra, heat-trace fits, modular
//! matrix actions, and quadrature oracles, orchestrated by the `asymtorus`
//! command-line binary.

pub mod config;
pub mod dirac;
pub mod gns;
pub mod heat;
pub mod modular;
pub mod quadrature;
pub mod report;

pub mod cli;

use num_complex::Complex64;
use thiserror::Error;

/// Unified error type of the laboratory layer.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("algebra error: {0}")]
    Algebra(String),
    #[error("matrix of element exceeds the cutoff: degree {degree} > N = {n}")]
    CutoffTooSmall { degree: i64, n: usize },
    #[error("k is not positive on the truncated space: eigenvalue {eigenvalue}")]
    NotPositive { eigenvalue: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("nonconvergent integral descriptor")]
    Divergent,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(String),
}

impl From<asymtorus_core::torus::AlgebraError> for LabError {
    fn from(e: asymtorus_core::torus::AlgebraError) -> Self {
        LabError::Algebra(format!("{:?}", e))
    }
}

impl From<asymtorus_core::symbol::SymbolError> for LabError {
    fn from(e: asymtorus_core::symbol::SymbolError) -> Self {
        LabError::Core(format!("{}", e))
    }
}

impl From<asymtorus_core::curvature::CurvatureError> for LabError {
    fn from(e: asymtorus_core::curvature::CurvatureError) -> Self {
        LabError::Core(format!("{}", e))
    }
}

impl From<asymtorus_core::rearrange::RearrangeError> for LabError {
    fn from(e: asymtorus_core::rearrange::RearrangeError) -> Self {
        LabError::Core(format!("{}", e))
    }
}

impl From<asymtorus_core::classical::ClassicalError> for LabError {
    fn from(e: asymtorus_core::classical::ClassicalError) -> Self {
        LabError::Core(format!("{:?}", e))
    }
}

impl From<asymtorus_core::modfn::ModFnError> for LabError {
    fn from(e: asymtorus_core::modfn::ModFnError) -> Self {
        LabError::Core(format!("{}", e))
    }
}

/// A deterministic uniform sampler on [0, 1) built on a seeded stream
/// cipher, so that every randomized run is reproducible from its seed.
pub struct Sampler {
    rng: rand_chacha::ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        use rand_core::SeedableRng;
        Sampler {
            rng: rand_chacha::ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        use rand_core::RngCore;
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Complex number with both parts uniform in [-1, 1).
    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.range(-1.0, 1.0), self.range(-1.0, 1.0))
    }
}
