pub mod classical;
pub mod evolve;
pub mod gns;
pub mod spectrum;
pub mod uncertainty;
pub mod weyl;
