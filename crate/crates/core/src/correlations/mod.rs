//! Exact correlations and CHSH-family evaluators.

mod exact;
mod inequalities;
mod table;

pub use exact::{exact_correlation, PartyMeasurements};
pub use inequalities::{
    chsh, conditional_table, correlator, gamma_chsh, gamma_chsh_all, gamma_form, three_chsh,
    MAIN_PARTY,
};
pub use table::{CorrelationTable, PartyAlphabet, TableLayout};
