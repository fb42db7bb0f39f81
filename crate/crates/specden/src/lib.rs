//! Forward and inverse numerics for probing a reservoir's spectral density
//! with single-photon waveguide scattering.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod quad;
pub mod reconstruct;
pub mod scattering;
pub mod sd;
pub mod selfenergy;

pub use dynamics::{
    discrete_bath_oracle, emission_dynamics, fitted_decay_rate, pseudomode_emission,
    EmissionHistory,
};
pub use error::{
    ConfigError, DynamicsError, FormatError, GridError, QuadratureFailure, ReconstructError,
    SdError,
};
pub use experiments::{
    cavity_qubit_spectrum, nonmarkovianity_ratio, transmon_flatness, transmon_spectrum,
    CavityQubitParams, TransmonParams,
};
pub use grid::FrequencyGrid;
pub use reconstruct::{
    flatness_function, markovianity_verdict, propagate_noise, reconstruct_sd, sd_from_potential,
    MeasuredSpectrum, PointFlag, ReconstructionResult, Verdict, DEFAULT_R_FLOOR,
    DEFAULT_VERDICT_REL_TOL,
};
pub use scattering::{forward_spectrum, EffectivePotential, ProbeConfig, ScatteringSpectrum};
pub use sd::{LorentzianParams, SpectralDensity, Support};
pub use selfenergy::{self_energy, SelfEnergy};
