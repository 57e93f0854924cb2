//! Qubit-cavity dispersive shifts and fluxonium-fluxonium couplings.

mod coupling;
mod dispersive;

pub use coupling::{
    coupled_spectrum, coupling_strength, spin_projection, CoupledSpectrum, SpinModel, SpinProjection, TwoQubitCoupling,
};
pub use dispersive::{dispersive_shift, dispersive_shift_exact, CavityParams, DispersiveShift};

use serde::{Deserialize, Serialize};

/// Which qubit operator couples: the charge `n` or the phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    #[default]
    Capacitive,
    Inductive,
}
