//! Front end for `wcop-core`: JSON instances and reports, seeded campaigns
//! and the command line.

pub mod cli;
pub mod io;
pub mod random;
pub mod unit_square;
pub mod verify;
