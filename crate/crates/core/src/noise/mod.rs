//! Decoherence channels, coherence budgets, and loss-parameter inversion.

mod budget;
mod channels;
mod env;
mod inversion;

pub use budget::{budget, CavityInputs, Channel, ChannelRate, CoherenceBudget, ConstantUsed, DecayShape};
pub use channels::{
    chain_aux, derived_tan_delta_l, dielectric_rate, flux_dephasing, flux_relaxation_rate, inductive_rate,
    junction_oxide_rate, normalized_t1, quasiparticle_rate, tan_delta_at, thermal_factor, thermal_photon_dephasing,
    thermal_photons_for_rate, ChainAux, FluxDephasing, REFERENCE_FREQUENCY_GHZ,
};
pub use env::{EnvironmentParams, Source};
pub use inversion::{invert_loss, LossChannel, LossInversion};
