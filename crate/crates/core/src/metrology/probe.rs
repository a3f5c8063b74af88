//! Parametric state sources `g -> rho_g(t)`.

use num_complex::Complex64 as C64;

use super::derivative::{drho_dg, DerivativeConfig};
use crate::dynamics::{
    analytic_open_entangled, evolve_closed, evolve_open, EvolveConfig, NoiseSpec,
};
use crate::error::{invalid, Result};
use crate::hamiltonian::CanonicalHamiltonian;
use crate::linalg::ComplexMatrix;
use crate::states::{concurrence_mixed, concurrence_pure, DensityMatrix, PureState};

/// A probe state depending on the coupling `g` at time `t`.
pub trait Probe: Sync {
    fn density(&self, g: f64, t: f64) -> Result<DensityMatrix>;

    fn concurrence(&self, g: f64, t: f64) -> Result<f64> {
        Ok(concurrence_mixed(&self.density(g, t)?))
    }

    /// `d rho / d g`; finite differences unless the probe knows better.
    fn drho(&self, g: f64, t: f64, cfg: &DerivativeConfig) -> Result<ComplexMatrix> {
        drho_dg(&|x| self.density(x, t).map(|d| d.matrix().clone()), g, cfg)
    }
}

/// Unitary evolution of a pure state under the canonical Hamiltonian.
#[derive(Clone, Debug)]
pub struct ClosedProbe {
    pub ch: CanonicalHamiltonian,
    pub s0: PureState,
}

impl ClosedProbe {
    pub fn new(ch: CanonicalHamiltonian, s0: PureState) -> Self {
        Self {
            ch,
            s0: s0.to_computational(),
        }
    }

    pub fn pure(&self, g: f64, t: f64) -> PureState {
        evolve_closed(&self.s0, &self.ch, g, t)
    }

    /// `d psi / d g = -i t h psi` with `h` the generator per unit `g`.
    pub fn dpsi(&self, g: f64, t: f64) -> Vec<C64> {
        let psi = self.pure(g, t);
        self.ch
            .generator()
            .matvec(psi.amplitudes())
            .into_iter()
            .map(|z| z * C64::new(0.0, -t))
            .collect()
    }
}

impl Probe for ClosedProbe {
    fn density(&self, g: f64, t: f64) -> Result<DensityMatrix> {
        Ok(self.pure(g, t).density())
    }

    fn concurrence(&self, g: f64, t: f64) -> Result<f64> {
        Ok(concurrence_pure(&self.pure(g, t)))
    }

    fn drho(&self, g: f64, t: f64, _cfg: &DerivativeConfig) -> Result<ComplexMatrix> {
        let psi = self.pure(g, t);
        let d = self.dpsi(g, t);
        let a = ComplexMatrix::outer(&d, psi.amplitudes());
        Ok(&a + &a.adjoint())
    }
}

/// Amplitude-damped evolution integrated from the Liouvillian.
#[derive(Clone, Debug)]
pub struct OpenProbe {
    pub ch: CanonicalHamiltonian,
    pub rho0: DensityMatrix,
    pub noise: NoiseSpec,
    pub evolve: EvolveConfig,
}

impl OpenProbe {
    /// Uses the matrix-exponential propagator, which is smooth in `g`.
    pub fn new(ch: CanonicalHamiltonian, rho0: DensityMatrix, noise: NoiseSpec) -> Self {
        Self {
            ch,
            rho0,
            noise,
            evolve: EvolveConfig::expm(),
        }
    }
}

impl Probe for OpenProbe {
    fn density(&self, g: f64, t: f64) -> Result<DensityMatrix> {
        evolve_open(&self.rho0, &self.ch, &self.noise, g, t, &self.evolve)
    }
}

/// Closed-form damped flip-flop evolution of `alpha |01> + sqrt(1 - alpha^2) |10>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticOpenProbe {
    pub alpha: f64,
    pub kappa: f64,
}

impl AnalyticOpenProbe {
    pub fn separable(kappa: f64) -> Result<Self> {
        Self::entangled(1.0, kappa)
    }

    pub fn entangled(alpha: f64, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(invalid(
                "kappa",
                format!("must be finite and non-negative, got {kappa}"),
            ));
        }
        Ok(Self { alpha, kappa })
    }
}

impl Probe for AnalyticOpenProbe {
    fn density(&self, g: f64, t: f64) -> Result<DensityMatrix> {
        analytic_open_entangled(self.alpha, g, self.kappa, t)
    }
}
