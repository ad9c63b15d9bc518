//! Error types shared across the crate.

/// Errors raised by parameter validation and numerical evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("angular frequency must be positive, got {0:.6e} rad/s")]
    InvalidFrequency(f64),

    #[error("decay rate must be nonnegative, got {0:.6e} rad/s")]
    NegativeRate(f64),

    #[error(
        "closed-loop resonance violated: omega_c - (omega_1 - omega_2) = {residual:.6e} rad/s \
         exceeds tolerance {tolerance:.6e} rad/s"
    )]
    ResonanceViolated { residual: f64, tolerance: f64 },

    #[error("both Lambda drive Rabi frequencies vanish; dark state undefined")]
    DegenerateDrive,

    #[error("quadrature node count must be odd and >= 1, got {0}")]
    BadNodeCount(usize),

    #[error("doppler width must be nonnegative, got {0:.6e} rad/s")]
    NegativeWidth(f64),

    #[error("linear response denominator vanished (|D| = {0:.3e})")]
    SingularResponse(f64),

    #[error(
        "grid too narrow for Kramers-Kronig check: edge |Im| fraction {edge:.3e} \
         exceeds {limit:.3e}"
    )]
    KkGridTooNarrow { edge: f64, limit: f64 },

    #[error("Kramers-Kronig check needs at least 16 grid points, got {0}")]
    KkGridTooShort(usize),

    #[error(
        "local-field denominator vanished (|L| = {0:.3e}): polarization catastrophe \
         at the evaluated detuning/density"
    )]
    LocalFieldSingularity(f64),

    #[error("degenerate medium: |mu| = {0:.3e}")]
    DegenerateMedium(f64),

    #[error("superlens resolution must be positive, got {0:.6e}")]
    InvalidResolution(f64),

    #[error("steady-state matrix ill-conditioned: 1-norm condition estimate {0:.3e}")]
    IllConditioned(f64),

    #[error("steady-state residual {0:.3e} exceeds 1e-10")]
    ResidualTooLarge(f64),

    #[error("steady-state solution violates density-matrix invariants: {0}")]
    InvalidSteadyState(String),

    #[error("probe amplitude must be nonzero for parity separation")]
    ZeroProbeAmplitude,

    #[error("deviation reference value is zero")]
    ZeroReference,

    #[error("dressing correction denominator D42*D34 vanished")]
    SingularCorrection,

    #[error("permeability tensor is not invertible")]
    SingularPermeability,

    #[error("propagation direction must be a nonzero vector")]
    ZeroWavevector,
}

pub type Result<T> = std::result::Result<T, Error>;
