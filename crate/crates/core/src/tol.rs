//! Default numerical tolerances.
//!
//! Every threshold used by the library lives here. Configuration structs
//! (`DerivativeConfig`, `EvolveConfig`, `CoincidenceConfig`, `ScanConfig`)
//! start from these values and may override them.

/// Entrywise Hermiticity tolerance for matrices tagged Hermitian.
pub const HERMITIAN_TAG: f64 = 1e-12;

/// Hermiticity accepted by the eigensolver, relative to `max(1, ||A||)`.
pub const HERMITIAN_INPUT: f64 = 1e-10;

/// Jacobi stops when the off-diagonal Frobenius norm drops below this times `||A||`.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues closer than this form a degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Normalization tolerance for pure states.
pub const STATE_NORM: f64 = 1e-12;

/// Hermiticity and unit-trace tolerance for density matrices.
pub const DENSITY_STRUCTURE: f64 = 1e-10;

/// Most negative eigenvalue still accepted (and clamped) in a density matrix.
pub const DENSITY_MIN_EIGENVALUE: f64 = -1e-9;

/// Eigenvalues below this fraction of the largest are treated as zero before
/// taking square roots; removes sqrt-amplified round-off.
pub const SQRT_CLAMP_RELATIVE: f64 = 1e-13;

/// Rotation-matrix validity for the SU(2) lift.
pub const ROTATION: f64 = 1e-10;

/// QFI / SLD support threshold: pairs with `l_a + l_b <= SUPPORT * Tr(rho)` are dropped.
pub const SUPPORT: f64 = 1e-12;

/// SLD eigenvalues with magnitude at or below this are reported as null.
pub const SLD_NONZERO: f64 = 1e-9;

/// Concurrence floor below which CoE is reported undefined.
pub const KINK_CONCURRENCE: f64 = 1e-6;

/// Relative disagreement between 3- and 5-point CoE stencils that flags a kink.
pub const KINK_STENCIL_RELATIVE: f64 = 1e-3;

/// Absolute floor added to the stencil-disagreement test so that round-off on
/// a vanishing curvature is not mistaken for a kink.
pub const KINK_STENCIL_ABSOLUTE: f64 = 1e-5;

/// Base finite-difference step in g, scaled by `max(1, |g|)`.
pub const FD_STEP: f64 = 1e-4;

/// Default relative tolerance of the adaptive propagator.
pub const INTEGRATOR: f64 = 1e-9;

/// Coincidence: `|CoE / F - 1|` below this counts as CoE = F.
pub const COINCIDENCE_RATIO: f64 = 1e-3;

/// Coincidence: SLD eigenvector concurrence below this counts as a product state.
pub const COINCIDENCE_SLD: f64 = 1e-3;

/// Conjecture scan: violation when `F - CoE < -SCAN_VIOLATION * max(1, F)`.
pub const SCAN_VIOLATION: f64 = 1e-6;

/// Root-finder residual bound.
pub const ROOT_RESIDUAL: f64 = 1e-10;
