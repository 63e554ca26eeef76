//! Families of channels sharing one classical action.

mod constructions;
mod family;
mod qubit;
mod swap;
mod unitary;

pub use constructions::{circulant, circulant_family, column_family, schur_channel, triangle_column};
pub use family::{verify_family, ChannelFamily};
pub use qubit::{
    damping_action, damping_channel, damping_kraus, quadruple_unitaries, qubit_classify, qubit_pair,
    qubit_quadruple, qubit_triple, Damping, QubitAction, QubitClassification, QubitTriple,
};
pub use swap::{
    bistochastic_pair, swap_procedure, transposition_family, BistochasticPair, PairDispatch, SwapSpec,
};
pub use unitary::{
    dplus1_action, dplus1_family, dplus1_phases, is_prime, max_off_diagonal, outlook_pair, outlook_y,
    phased_unitaries, unistochastic_family, unitary_family_gram, w_family, Pairing,
};
