pub mod bfk;
pub mod entanglement;
pub mod graphstates;
pub mod netsim;
pub mod protocols;
pub mod qsim;
pub mod units;
pub mod quadrature;
pub mod vacuum;
